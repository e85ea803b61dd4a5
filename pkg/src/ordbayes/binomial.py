"""Product-binomial engine.

Null model: all rows share one success probability with a Beta prior.
Encompassing model: independent Beta priors per row. The intrinsic prior
trains the encompassing prior on imaginary counts ``x`` (``x_i`` successes
out of ``t_i``) drawn from the null marginal, pulling mass towards equality.

Quantities provided here:

* default marginal likelihoods and their Bayes factor,
* the intrinsic Bayes factor of the encompassing against the null model, by
  exact enumeration over ``x`` or by importance sampling,
* prior and posterior probabilities of a constrained region under the
  intrinsic prior, whose ratio is the Bayes factor of the constrained model
  against the encompassing one.
"""

import numpy as np
from scipy.special import logsumexp

from .constraints import ConstraintExpr, evaluate
from .errors import BudgetExceeded, EstimationError, InputError
from .kernel import (
    batch_means_se,
    independence_metropolis,
    log_beta,
    log_binom,
)
from .tables import BinomialHyper, BinomialTable, Estimate, McConfig, TrainingSpec

__all__ = [
    "ENUMERATION_BUDGET",
    "POSTERIOR_SCHEMES",
    "log_marginal_null",
    "log_marginal_encompassing",
    "bf_default_e0",
    "log_h_weight",
    "proposal_probs",
    "bf_intrinsic_e0",
    "bf_intrinsic_e0_exact",
    "prior_constraint_prob",
    "posterior_constraint_prob",
    "bf_ce",
]

ENUMERATION_BUDGET = 10**6

POSTERIOR_SCHEMES = ("algorithm", "intrinsic", "proposal")


def _check(table, hyper):
    if hyper.r != table.r:
        raise InputError(f"hyperparameters have {hyper.r} rows, table has {table.r}")


def resolve_training(training, n):
    """Training sizes as an int array matching ``n``."""
    if isinstance(training, TrainingSpec):
        return training.resolve(n)
    t = np.asarray(training, dtype=np.int64)
    if t.shape != np.shape(n):
        raise InputError(f"expected {np.size(n)} training sizes, got {t.size}")
    if np.any(t < 0) or np.any(t > n):
        raise InputError("training sizes must satisfy 0 <= t_i <= n_i")
    return t


def log_marginal_null(table: BinomialTable, hyper: BinomialHyper) -> float:
    """ln m(y | M0), including the binomial-coefficient constant."""
    _check(table, hyper)
    a, b = hyper.null
    log_k = float(log_binom(table.n, table.y).sum())
    return log_k + log_beta(a + table.s_y, b + table.total - table.s_y) - log_beta(a, b)


def log_marginal_encompassing(table: BinomialTable, hyper: BinomialHyper) -> float:
    """ln m(y | Me), a product of per-row Beta ratios."""
    _check(table, hyper)
    a, b = hyper.enc[:, 0], hyper.enc[:, 1]
    y, n = table.y, table.n
    log_k = float(log_binom(n, y).sum())
    return log_k + float(np.sum(log_beta(a + y, b + n - y) - log_beta(a, b)))


def bf_default_e0(table: BinomialTable, hyper: BinomialHyper) -> float:
    """Bayes factor of Me against M0 under the default (untrained) priors."""
    return float(np.exp(log_marginal_encompassing(table, hyper) - log_marginal_null(table, hyper)))


def log_h_weight(x, t, table: BinomialTable, hyper: BinomialHyper):
    """Unnormalised log weight of imaginary counts under the intrinsic posterior.

    ``x`` has shape (..., r). Normalising ``exp(log_h_weight)`` over all ``x``
    gives the mixing distribution of the intrinsic posterior.
    """
    x = np.asarray(x)
    a, b = hyper.enc[:, 0], hyper.enc[:, 1]
    a0, b0 = hyper.null
    y, n = table.y, table.n
    sx = x.sum(axis=-1)
    tt = int(np.sum(t))
    rows = (
        log_binom(t, x)
        + log_beta(a + x + y, b + t - x + n - y)
        - log_beta(a + x, b + t - x)
    )
    return rows.sum(axis=-1) + log_beta(a0 + sx, b0 + tt - sx)


def proposal_probs(table: BinomialTable) -> np.ndarray:
    """Smoothed row shares (y_i + 1) / (s_y + r) used by the Metropolis proposal."""
    return (table.y + 1.0) / (table.s_y + table.r)


def _enumerate(t):
    grids = np.indices(tuple(int(v) + 1 for v in t))
    return grids.reshape(len(t), -1).T


def bf_intrinsic_e0_exact(table, hyper, training, budget=ENUMERATION_BUDGET) -> float:
    """Intrinsic Bayes factor of Me against M0 by summing over every ``x``.

    Raises
    ------
    BudgetExceeded
        When the number of imaginary vectors, prod(t_i + 1), exceeds
        ``budget``.
    """
    _check(table, hyper)
    t = resolve_training(training, table.n)
    terms = int(np.prod(t.astype(float) + 1))
    if terms > budget:
        raise BudgetExceeded(
            f"{terms} imaginary vectors exceed the enumeration budget of {budget}; "
            "use the Monte Carlo estimator"
        )
    x = _enumerate(t)
    a0, b0 = hyper.null
    log_norm = log_beta(a0 + table.s_y, b0 + table.total - table.s_y)
    return float(np.exp(logsumexp(log_h_weight(x, t, table, hyper)) - log_norm))


def _log_is_weights(x, t, table, hyper):
    a, b = hyper.enc[:, 0], hyper.enc[:, 1]
    a0, b0 = hyper.null
    y, n = table.y, table.n
    sx = x.sum(axis=-1)
    tt, sy, nn = int(t.sum()), table.s_y, table.total
    enc = (log_beta(a + x + y, b + t - x + n - y) - log_beta(a + x, b + t - x)).sum(axis=-1)
    null = log_beta(a0 + sx + sy, b0 + tt - sx + nn - sy) - log_beta(a0 + sx, b0 + tt - sx)
    return enc - null


def bf_intrinsic_e0(table, hyper, training, mc: McConfig = None, method="auto") -> Estimate:
    """Intrinsic Bayes factor of Me against M0.

    Parameters
    ----------
    method : {"auto", "mc", "exact"}
        ``"mc"`` is the importance sampler: ``pi ~ Beta(a01 + s_y, a02 + n - s_y)``
        then ``x_i ~ Binomial(t_i, pi)``, averaging the ratio of the two
        conditional marginals of ``y``. ``"exact"`` enumerates. ``"auto"``
        enumerates when within budget and samples otherwise.

    Returns
    -------
    Estimate
        With zero standard error for exact results. A zero training size
        always gives the default Bayes factor exactly.
    """
    _check(table, hyper)
    t = resolve_training(training, table.n)
    if t.sum() == 0:
        return Estimate(bf_default_e0(table, hyper), 0.0)
    if method not in ("auto", "mc", "exact"):
        raise InputError(f"unknown method {method!r}")
    if method == "exact" or (method == "auto" and np.prod(t.astype(float) + 1) <= ENUMERATION_BUDGET):
        return Estimate(bf_intrinsic_e0_exact(table, hyper, t), 0.0)
    mc = mc or McConfig()
    gen = mc.stream("e0").generator
    a0, b0 = hyper.null
    pi = gen.beta(a0 + table.s_y, b0 + table.total - table.s_y, size=mc.samples)
    x = gen.binomial(t[None, :], pi[:, None])
    lw = _log_is_weights(x, t, table, hyper)
    shift = lw.max()
    w = np.exp(lw - shift)
    scale = np.exp(shift)
    mean = float(w.mean() * scale)
    se = float(w.std(ddof=1) * scale / np.sqrt(w.size)) if w.size > 1 else 0.0
    return Estimate(mean, se)


def _iid_prob_se(hits):
    p = hits.mean()
    return float(np.sqrt(p * (1 - p) / hits.size))


def prior_constraint_prob(hyper, training, constraint: ConstraintExpr, mc: McConfig = None, n=None) -> Estimate:
    """Probability of the constrained region under the intrinsic prior.

    Draws ``pi* ~ Beta(a01, a02)``, ``x_i ~ Binomial(t_i, pi*)`` and
    ``pi_i ~ Beta(a_i1 + x_i, a_i2 + t_i - x_i)``, and reports the fraction of
    draws inside the region. A zero estimate is returned, not raised; check
    :attr:`Estimate.degenerate`.

    ``training`` is an array of sizes or a :class:`TrainingSpec`; fractional
    specs need the observed row sizes ``n``.
    """
    mc = mc or McConfig()
    r = hyper.r
    if isinstance(training, TrainingSpec):
        if training.q is not None and n is None:
            raise InputError("a training fraction needs the observed row sizes n")
        t = training.resolve(n if n is not None else np.asarray(training.sizes))
    else:
        t = np.asarray(training, dtype=np.int64)
        if np.any(t < 0):
            raise InputError("training sizes must be non-negative")
    if t.shape != (r,):
        raise InputError(f"expected {r} training sizes")
    gen = mc.stream("prior").generator
    a0, b0 = hyper.null
    a, b = hyper.enc[:, 0], hyper.enc[:, 1]
    pi_star = gen.beta(a0, b0, size=mc.samples)
    x = gen.binomial(t[None, :], pi_star[:, None])
    pis = gen.beta(a + x, b + t - x)
    hits = evaluate(constraint, pis)
    return Estimate(float(hits.mean()), _iid_prob_se(hits))


def posterior_constraint_prob(
    table, hyper, training, constraint: ConstraintExpr, mc: McConfig = None, scheme="algorithm"
) -> Estimate:
    """Probability of the constrained region under the intrinsic posterior.

    Imaginary counts follow an independence Metropolis chain whose proposal
    is ``Binomial(t_i, (y_i + 1) / (s_y + r))`` per row and whose target is
    proportional to :func:`log_h_weight`. After ``mc.burnin`` steps each of
    the next ``mc.samples`` states yields one draw of the row probabilities.

    Parameters
    ----------
    scheme : {"algorithm", "intrinsic", "proposal"}
        How the row probabilities are drawn from a state ``x``:

        ``"algorithm"``
            ``Beta(a_i1 + x_i, a_i2 + t_i - x_i)``, conditioning on the
            imaginary counts only.
        ``"intrinsic"``
            ``Beta(a_i1 + x_i + y_i, a_i2 + t_i - x_i + n_i - y_i)``, i.e.
            the mixture-of-posteriors density of the intrinsic posterior.
        ``"proposal"``
            as ``"algorithm"`` but with ``x`` drawn iid from the proposal and
            no Metropolis correction.

    The standard error uses batch means over the kept chain.
    """
    _check(table, hyper)
    if scheme not in POSTERIOR_SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}; choose from {POSTERIOR_SCHEMES}")
    mc = mc or McConfig()
    t = resolve_training(training, table.n)
    gen = mc.stream("posterior").generator
    S, S1 = mc.samples, (0 if scheme == "proposal" else mc.burnin)
    r = table.r
    p_hat = proposal_probs(table)
    x_all = gen.binomial(t[None, :], p_hat[None, :], size=(S1 + S + 1, r))
    if scheme == "proposal":
        x = x_all[1:]
    else:
        log_prop = (
            log_binom(t, x_all) + x_all * np.log(p_hat) + (t - x_all) * np.log1p(-p_hat)
        ).sum(axis=-1)
        log_ratio = log_h_weight(x_all, t, table, hyper) - log_prop
        states, _ = independence_metropolis(log_ratio, np.log(gen.random(S1 + S)))
        x = x_all[states[S1:]]
    a, b = hyper.enc[:, 0], hyper.enc[:, 1]
    if scheme == "intrinsic":
        pis = gen.beta(a + x + table.y, b + t - x + table.n - table.y)
    else:
        pis = gen.beta(a + x, b + t - x)
    hits = evaluate(constraint, pis).astype(float)
    return Estimate(float(hits.mean()), batch_means_se(hits))


def bf_ce(prior: Estimate, posterior: Estimate) -> Estimate:
    """Bayes factor of the constrained against the encompassing model.

    The ratio posterior / prior, with a delta-method standard error that
    treats the two estimates as independent.

    Raises
    ------
    EstimationError
        If the prior probability estimate is zero.
    """
    p0, s0 = prior
    p1, s1 = posterior
    if p0 <= 0:
        raise EstimationError(
            "prior probability of the constrained region estimated as 0; increase the sample count"
        )
    value = p1 / p0
    se = float(np.sqrt((s1 / p0) ** 2 + (p1 * s0 / p0**2) ** 2))
    return Estimate(float(value), se)
