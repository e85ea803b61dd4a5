"""Multinomial r x c engine: independence null against an unrestricted table.

Under the null, cell probabilities factor into row and column margins, each
with a Dirichlet prior; under the encompassing model the whole grid has a
Dirichlet prior. The intrinsic prior trains the latter on an imaginary table
``x`` with grand total ``t`` drawn from the null marginal.
"""

import math

import numpy as np
from scipy.special import logsumexp

from .constraints import ConstraintExpr, evaluate
from .errors import BudgetExceeded, InputError
from .kernel import batch_means_se, independence_metropolis, log_multinom, log_mvbeta
from .tables import Estimate, McConfig, MultinomialHyper, MultinomialTable, TrainingSpec

__all__ = [
    "ENUMERATION_BUDGET",
    "log_marginal_null_mult",
    "log_marginal_encompassing_mult",
    "bf_default_e0_mult",
    "log_intrinsic_term",
    "candidate_probs",
    "compositions",
    "bf_intrinsic_e0_mult_exact",
    "bf_intrinsic_e0_mult",
    "prior_constraint_prob_mult",
    "posterior_constraint_prob_mult",
]

ENUMERATION_BUDGET = 10**6


def _check(table, hyper):
    if table.shape != hyper.shape:
        raise InputError(f"hyperparameters are {hyper.shape}, table is {table.shape}")


def resolve_total(training, n) -> int:
    """Imaginary grand total from an int or a :class:`TrainingSpec`."""
    if isinstance(training, TrainingSpec):
        return int(training.resolve(n))
    t = int(training)
    if t < 0:
        raise InputError("training total must be non-negative")
    return t


def log_marginal_null_mult(table: MultinomialTable, hyper: MultinomialHyper) -> float:
    """ln m(y | M0) under independent Dirichlet priors on the two margins."""
    _check(table, hyper)
    return float(
        log_multinom(table.counts.ravel())
        + log_mvbeta(hyper.rows + table.row_sums)
        - log_mvbeta(hyper.rows)
        + log_mvbeta(hyper.cols + table.col_sums)
        - log_mvbeta(hyper.cols)
    )


def log_marginal_encompassing_mult(table: MultinomialTable, hyper: MultinomialHyper) -> float:
    """ln m(y | Me) under a Dirichlet prior on the whole grid."""
    _check(table, hyper)
    y = table.counts.ravel()
    a = hyper.cells.ravel()
    return float(log_multinom(y) + log_mvbeta(a + y) - log_mvbeta(a))


def bf_default_e0_mult(table, hyper) -> float:
    return float(np.exp(log_marginal_encompassing_mult(table, hyper) - log_marginal_null_mult(table, hyper)))


def log_intrinsic_term(x, table: MultinomialTable, hyper: MultinomialHyper):
    """Log of one summand of the intrinsic Bayes factor for imaginary tables ``x``.

    ``x`` has shape (..., r, c). Summing ``exp`` over every table with grand
    total ``t`` gives the Bayes factor of Me against M0. Up to a constant
    this is also the unnormalised mixing weight of the intrinsic posterior.
    """
    x = np.asarray(x)
    batch = x.shape[:-2]
    r, c = table.shape
    flat = x.reshape(batch + (r * c,))
    y = table.counts.ravel()
    a = hyper.cells.ravel()
    return (
        log_multinom(flat)
        + log_mvbeta(hyper.rows + x.sum(axis=-1))
        + log_mvbeta(hyper.cols + x.sum(axis=-2))
        + log_mvbeta(a + flat + y)
        - log_mvbeta(a + flat)
        - log_mvbeta(hyper.rows + table.row_sums)
        - log_mvbeta(hyper.cols + table.col_sums)
    )


def candidate_probs(table: MultinomialTable) -> np.ndarray:
    """Smoothed cell frequencies (y_ij + 1) / (n + rc), shape (r, c)."""
    r, c = table.shape
    return (table.counts + 1.0) / (table.n + r * c)


def compositions(t: int, k: int) -> np.ndarray:
    """All length-``k`` non-negative integer vectors summing to ``t``.

    Rows come in colexicographic order (the last entry varies slowest).
    """
    if k == 1:
        return np.array([[t]], dtype=np.int64)
    blocks = []
    for last in range(t + 1):
        head = compositions(t - last, k - 1)
        blocks.append(np.column_stack([head, np.full(len(head), last, dtype=np.int64)]))
    return np.concatenate(blocks)


def bf_intrinsic_e0_mult_exact(table, hyper, training, budget=ENUMERATION_BUDGET) -> float:
    """Intrinsic Bayes factor of Me against M0 by enumerating every imaginary table.

    Raises
    ------
    BudgetExceeded
        When C(t + rc - 1, rc - 1) exceeds ``budget``.
    """
    _check(table, hyper)
    t = resolve_total(training, table.n)
    r, c = table.shape
    k = r * c
    terms = math.comb(t + k - 1, k - 1)
    if terms > budget:
        raise BudgetExceeded(
            f"{terms} imaginary tables exceed the enumeration budget of {budget}; "
            "use the Monte Carlo estimator"
        )
    x = compositions(t, k).reshape(-1, r, c)
    return float(np.exp(logsumexp(log_intrinsic_term(x, table, hyper))))


def bf_intrinsic_e0_mult(table, hyper, training, mc: McConfig = None, method="auto") -> Estimate:
    """Intrinsic Bayes factor of Me against M0.

    With ``method="mc"``, imaginary tables are drawn from
    ``Multinomial(t, candidate_probs(table))`` and each summand is divided by
    its candidate probability. ``"auto"`` enumerates when within budget.
    A zero training total returns the default Bayes factor exactly.
    """
    _check(table, hyper)
    t = resolve_total(training, table.n)
    if t == 0:
        return Estimate(bf_default_e0_mult(table, hyper), 0.0)
    if method not in ("auto", "mc", "exact"):
        raise InputError(f"unknown method {method!r}")
    r, c = table.shape
    if method == "exact" or (method == "auto" and math.comb(t + r * c - 1, r * c - 1) <= ENUMERATION_BUDGET):
        return Estimate(bf_intrinsic_e0_mult_exact(table, hyper, t), 0.0)
    mc = mc or McConfig()
    gen = mc.stream("e0").generator
    p = candidate_probs(table).ravel()
    x = gen.multinomial(t, p, size=mc.samples)
    log_cand = log_multinom(x) + (x * np.log(p)).sum(axis=-1)
    lw = log_intrinsic_term(x.reshape(-1, r, c), table, hyper) - log_cand
    shift = lw.max()
    w = np.exp(lw - shift)
    scale = np.exp(shift)
    se = float(w.std(ddof=1) * scale / np.sqrt(w.size)) if w.size > 1 else 0.0
    return Estimate(float(w.mean() * scale), se)


def prior_constraint_prob_mult(hyper, training, constraint: ConstraintExpr, mc: McConfig = None, n=None) -> Estimate:
    """Probability of the constrained region under the intrinsic prior.

    Per draw: row and column margins from their Dirichlet priors, an
    imaginary table ``x ~ Multinomial(t, outer(rows, cols))``, then the grid
    from ``Dirichlet(cells + x)``.
    """
    mc = mc or McConfig()
    if isinstance(training, TrainingSpec) and training.q is not None and n is None:
        raise InputError("a training fraction needs the observed grand total n")
    t = resolve_total(training, n)
    r, c = hyper.shape
    gen = mc.stream("prior").generator
    S = mc.samples
    a = hyper.cells.ravel()
    if t > 0:
        g_r = gen.standard_gamma(np.broadcast_to(hyper.rows, (S, r)))
        g_c = gen.standard_gamma(np.broadcast_to(hyper.cols, (S, c)))
        rows = g_r / g_r.sum(axis=1, keepdims=True)
        cols = g_c / g_c.sum(axis=1, keepdims=True)
        grid = (rows[:, :, None] * cols[:, None, :]).reshape(S, r * c)
        grid /= grid.sum(axis=1, keepdims=True)
        x = gen.multinomial(t, grid)
    else:
        x = np.zeros((S, r * c), dtype=np.int64)
    g = gen.standard_gamma(a + x)
    pis = (g / g.sum(axis=1, keepdims=True)).reshape(S, r, c)
    hits = evaluate(constraint, pis)
    p = float(hits.mean())
    return Estimate(p, float(np.sqrt(p * (1 - p) / S)))


def posterior_constraint_prob_mult(
    table, hyper, training, constraint: ConstraintExpr, mc: McConfig = None, scheme="algorithm"
) -> Estimate:
    """Probability of the constrained region under the intrinsic posterior.

    Independence Metropolis over imaginary tables with proposal
    ``Multinomial(t, (y + 1) / (n + rc))``; the grid is then drawn per kept
    state. ``scheme`` has the same meaning as in
    :func:`ordbayes.binomial.posterior_constraint_prob`: ``"algorithm"`` draws
    from ``Dirichlet(cells + x)``, ``"intrinsic"`` from
    ``Dirichlet(cells + x + y)``, and ``"proposal"`` skips the Metropolis
    correction.
    """
    from .binomial import POSTERIOR_SCHEMES

    _check(table, hyper)
    if scheme not in POSTERIOR_SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}; choose from {POSTERIOR_SCHEMES}")
    mc = mc or McConfig()
    t = resolve_total(training, table.n)
    r, c = table.shape
    gen = mc.stream("posterior").generator
    S, S1 = mc.samples, (0 if scheme == "proposal" else mc.burnin)
    p = candidate_probs(table).ravel()
    x_all = gen.multinomial(t, p, size=S1 + S + 1)
    if scheme == "proposal":
        x = x_all[1:]
    else:
        log_prop = log_multinom(x_all) + (x_all * np.log(p)).sum(axis=-1)
        log_ratio = log_intrinsic_term(x_all.reshape(-1, r, c), table, hyper) - log_prop
        states, _ = independence_metropolis(log_ratio, np.log(gen.random(S1 + S)))
        x = x_all[states[S1:]]
    shape = hyper.cells.ravel() + x
    if scheme == "intrinsic":
        shape = shape + table.counts.ravel()
    g = gen.standard_gamma(shape)
    pis = (g / g.sum(axis=1, keepdims=True)).reshape(-1, r, c)
    hits = evaluate(constraint, pis).astype(float)
    return Estimate(float(hits.mean()), batch_means_se(hits))
