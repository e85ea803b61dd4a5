"""Composition of Bayes factors and posterior model probabilities.

The constrained-vs-null Bayes factor is the product of two separately
estimated pieces, BF_c0 = BF_ce * BF_e0. Posterior model probabilities over
a model set follow from Bayes factors against M0 and prior odds:

    P(M | y) = BF_M0 * o_M / (1 + sum_k BF_k0 * o_k),

with ``o_M0 = 1``. :func:`sweep_q` repeats the whole computation over a grid
of training fractions.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import binomial as bn
from . import multinomial as mn
from .constraints import ConstraintExpr, parse_constraint
from .errors import InputError
from .tables import (
    BinomialHyper,
    BinomialTable,
    Estimate,
    McConfig,
    MultinomialHyper,
    MultinomialTable,
    TrainingSpec,
)

__all__ = [
    "MODEL_SET_CODES",
    "ModelSet",
    "compose_bf_c0",
    "posterior_model_probs",
    "QResult",
    "ComparisonReport",
    "analyze_q",
    "sweep_q",
]

MODEL_SET_CODES = {
    "0e": ("M0", "Me"),
    "0c": ("M0", "Mc"),
    "0ce": ("M0", "Mc", "Me"),
}


@dataclass(frozen=True)
class ModelSet:
    """Models under comparison; always includes the null ``"M0"``.

    ``prior_odds`` maps each non-null member to its prior odds against M0
    (default 1).
    """

    members: tuple
    prior_odds: dict = field(default_factory=dict)

    def __post_init__(self):
        members = tuple(self.members)
        if "M0" not in members or len(members) < 2:
            raise InputError("a model set contains M0 and at least one other model")
        if len(set(members)) != len(members) or not set(members) <= {"M0", "Mc", "Me"}:
            raise InputError(f"invalid model set {members}")
        odds = {m: float(self.prior_odds.get(m, 1.0)) for m in members if m != "M0"}
        if any(v <= 0 for v in odds.values()):
            raise InputError("prior odds must be positive")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "prior_odds", odds)

    @classmethod
    def from_code(cls, code, prior_odds=None):
        """Build from a short code: ``"0e"``, ``"0c"`` or ``"0ce"``."""
        if code not in MODEL_SET_CODES:
            raise InputError(f"unknown model set {code!r}; choose from {sorted(MODEL_SET_CODES)}")
        return cls(MODEL_SET_CODES[code], prior_odds or {})

    @property
    def code(self) -> str:
        return "0" + "".join(m[1] for m in ("Mc", "Me") if m in self.members)


def _as_est(x) -> Estimate:
    return x if isinstance(x, Estimate) else Estimate(float(x), 0.0)


def compose_bf_c0(bf_ce, bf_e0) -> Estimate:
    """BF_c0 = BF_ce * BF_e0 with a delta-method standard error.

    >>> compose_bf_c0(1.0, 7.5).value
    7.5
    """
    ce, e0 = _as_est(bf_ce), _as_est(bf_e0)
    if ce.value <= 0 or e0.value <= 0:
        raise InputError("Bayes factors must be positive")
    value = ce.value * e0.value
    se = float(np.hypot(ce.mc_se * e0.value, e0.mc_se * ce.value))
    return Estimate(value, se)


def posterior_model_probs(model_set: ModelSet, bfs: dict) -> dict:
    """Posterior probabilities of every member of ``model_set``.

    Parameters
    ----------
    bfs : dict
        Bayes factor against M0 (float or :class:`Estimate`) for each
        non-null member.

    Returns
    -------
    dict
        Model name to :class:`Estimate`. The standard errors propagate the
        Bayes factors' errors by a first-order expansion, treating them as
        uncorrelated.
    """
    others = [m for m in model_set.members if m != "M0"]
    missing = [m for m in others if m not in bfs]
    if missing:
        raise InputError(f"missing Bayes factors for {missing}")
    ests = [_as_est(bfs[m]) for m in others]
    if any(e.value < 0 for e in ests):
        raise InputError("Bayes factors must be non-negative")
    odds = np.array([model_set.prior_odds[m] for m in others])
    w = np.concatenate([[1.0], odds * np.array([e.value for e in ests])])
    se_bf = np.array([e.mc_se for e in ests])
    total = w.sum()
    probs = w / total
    # d p_k / d BF_j = o_j (delta_kj - p_k) / total
    jac = (np.eye(len(w))[:, 1:] - probs[:, None]) * odds[None, :] / total
    se = np.sqrt((jac**2 * se_bf[None, :] ** 2).sum(axis=1))
    names = ["M0"] + others
    return {m: Estimate(float(p), float(s)) for m, p, s in zip(names, probs, se)}


@dataclass
class QResult:
    """Everything computed at one training fraction."""

    q: float
    t: object  # int (multinomial) or list of ints (binomial)
    bf_e0: Estimate
    bf_ce: Optional[Estimate] = None
    bf_c0: Optional[Estimate] = None
    prior_prob: Optional[Estimate] = None
    posterior_prob: Optional[Estimate] = None
    probs: dict = field(default_factory=dict)  # set code -> {model: Estimate}

    def to_dict(self):
        def est(e):
            return None if e is None else {"value": float(e.value), "mc_se": float(e.mc_se)}

        return {
            "q": float(self.q),
            "t": self.t,
            "bf_e0": est(self.bf_e0),
            "bf_ce": est(self.bf_ce),
            "bf_c0": est(self.bf_c0),
            "prior_prob": est(self.prior_prob),
            "posterior_prob": est(self.posterior_prob),
            "probs": {code: {m: est(e) for m, e in ps.items()} for code, ps in self.probs.items()},
        }

    @classmethod
    def from_dict(cls, d):
        def est(v):
            return None if v is None else Estimate(v["value"], v["mc_se"])

        return cls(
            q=d["q"],
            t=d["t"],
            bf_e0=est(d["bf_e0"]),
            bf_ce=est(d["bf_ce"]),
            bf_c0=est(d["bf_c0"]),
            prior_prob=est(d["prior_prob"]),
            posterior_prob=est(d["posterior_prob"]),
            probs={code: {m: est(e) for m, e in ps.items()} for code, ps in d["probs"].items()},
        )


@dataclass
class ComparisonReport:
    """Results of a sweep over training fractions, with provenance."""

    kind: str
    counts: list
    constraint: Optional[str]
    model_sets: list
    rows: list
    provenance: dict

    def to_dict(self):
        return {
            "kind": self.kind,
            "counts": self.counts,
            "constraint": self.constraint,
            "model_sets": list(self.model_sets),
            "rows": [r.to_dict() for r in self.rows],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=d["kind"],
            counts=d["counts"],
            constraint=d["constraint"],
            model_sets=list(d["model_sets"]),
            rows=[QResult.from_dict(r) for r in d["rows"]],
            provenance=d["provenance"],
        )

    def row(self, q) -> QResult:
        for r in self.rows:
            if r.q == q:
                return r
        raise KeyError(q)


def _hyper_dict(hyper):
    if isinstance(hyper, BinomialHyper):
        return {"enc": hyper.enc.tolist(), "null": list(hyper.null)}
    return {"cells": hyper.cells.tolist(), "rows": hyper.rows.tolist(), "cols": hyper.cols.tolist()}


def analyze_q(table, hyper, constraint, q, mc: McConfig, scheme="algorithm", model_sets=None) -> QResult:
    """All Bayes factors and model probabilities at one training fraction."""
    model_sets = [ModelSet.from_code(m) if isinstance(m, str) else m for m in (model_sets or ["0e"])]
    training = TrainingSpec.fraction(q)
    if isinstance(table, BinomialTable):
        t = training.resolve(table.n)
        e0 = bn.bf_intrinsic_e0(table, hyper, t, mc)
        t_out = [int(v) for v in t]
    else:
        t = training.resolve(table.n)
        e0 = mn.bf_intrinsic_e0_mult(table, hyper, int(t), mc)
        t_out = int(t)
    res = QResult(q=float(q), t=t_out, bf_e0=e0)
    if constraint is not None:
        if isinstance(table, BinomialTable):
            prior = bn.prior_constraint_prob(hyper, t, constraint, mc)
            post = bn.posterior_constraint_prob(table, hyper, t, constraint, mc, scheme=scheme)
        else:
            prior = mn.prior_constraint_prob_mult(hyper, int(t), constraint, mc)
            post = mn.posterior_constraint_prob_mult(table, hyper, int(t), constraint, mc, scheme=scheme)
        res.prior_prob, res.posterior_prob = prior, post
        res.bf_ce = bn.bf_ce(prior, post)
        res.bf_c0 = compose_bf_c0(res.bf_ce, e0)
    bfs = {"Me": e0}
    if res.bf_c0 is not None:
        bfs["Mc"] = res.bf_c0
    for ms in model_sets:
        if "Mc" in ms.members and constraint is None:
            raise InputError(f"model set {ms.code} needs a constraint")
        res.probs[ms.code] = posterior_model_probs(ms, bfs)
    return res


def _task(args):
    return analyze_q(*args)


def sweep_q(
    table,
    hyper,
    constraint,
    q_values,
    mc: McConfig = None,
    scheme="algorithm",
    model_sets=("0e", "0c", "0ce"),
    workers=None,
) -> ComparisonReport:
    """Run :func:`analyze_q` over a grid of training fractions.

    Each fraction draws from its own stream family (the task path is
    extended with ``("q", q)``), so results do not depend on the grid's other
    members, their order, or on ``workers``.

    Parameters
    ----------
    constraint : ConstraintExpr, str or None
        Strings are parsed against the table's dimensions. Without a
        constraint only ``"0e"`` model sets can be scored.
    workers : int, optional
        Number of worker processes; ``None`` or 1 runs serially.
    """
    q_values = [float(q) for q in q_values]
    if not q_values:
        raise InputError("the q grid is empty")
    if len(set(q_values)) != len(q_values):
        raise InputError("q values must be distinct")
    if any(not 0.0 <= q <= 1.0 for q in q_values):
        raise InputError("q values must lie in [0, 1]")
    mc = mc or McConfig()
    if isinstance(table, BinomialTable):
        kind, dims = "binomial", (table.r, None)
        counts = table.counts().tolist()
        if not isinstance(hyper, BinomialHyper):
            raise InputError("binomial tables need BinomialHyper")
    elif isinstance(table, MultinomialTable):
        kind, dims = "multinomial", table.shape
        counts = table.counts.tolist()
        if not isinstance(hyper, MultinomialHyper):
            raise InputError("multinomial tables need MultinomialHyper")
    else:
        raise InputError(f"unsupported table type {type(table).__name__}")
    if isinstance(constraint, str):
        constraint = parse_constraint(constraint, dims)
    codes = [m if isinstance(m, str) else m.code for m in model_sets]
    if constraint is None:
        codes = [c for c in codes if "c" not in c[1:]]
    tasks = [(table, hyper, constraint, q, mc.child("q", q), scheme, codes) for q in q_values]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_task, tasks))
    else:
        rows = [_task(a) for a in tasks]
    provenance = {
        "seed": int(mc.seed),
        "samples": int(mc.samples),
        "burnin": int(mc.burnin),
        "path": [str(p) for p in mc.path],
        "scheme": scheme,
        "training_rounding": "t = round(q * n), ties to even",
        "hyper": _hyper_dict(hyper),
    }
    return ComparisonReport(
        kind=kind,
        counts=counts,
        constraint=None if constraint is None else str(constraint),
        model_sets=codes,
        rows=rows,
        provenance=provenance,
    )
