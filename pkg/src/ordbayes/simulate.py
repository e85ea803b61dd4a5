"""Simulation study for product-binomial tables generated under a descending order.

Each scenario fixes the number of rows, a common number of trials ``n*``
per row and strictly decreasing true success probabilities. Replicate
tables are drawn, analysed with :func:`ordbayes.compare.sweep_q` under the
full descending chain, and the posterior model probabilities are summarised
by their medians across replicates.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .compare import sweep_q
from .constraints import descending_chain
from .errors import InputError
from .tables import BinomialHyper, BinomialTable, McConfig

__all__ = [
    "SimScenario",
    "SCENARIOS",
    "get_scenario",
    "effect_size_h",
    "classify_effect",
    "SimulationReport",
    "run_simulation",
]


def effect_size_h(p1, p2) -> float:
    """Cohen's h, ``|2 asin(sqrt(p1)) - 2 asin(sqrt(p2))|``.

    >>> round(effect_size_h(0.10, 0.05), 4)
    0.1925
    """
    p1, p2 = float(p1), float(p2)
    if not (0 < p1 < 1 and 0 < p2 < 1):
        raise InputError("proportions must lie strictly between 0 and 1")
    return float(abs(2 * np.arcsin(np.sqrt(p1)) - 2 * np.arcsin(np.sqrt(p2))))


# Conventional small / medium / large bands at 0.2 / 0.5 / 0.8, plus an
# extra-large band for h near or above 1; values are assigned to the
# nearest band centre.
_BANDS = ((0.35, "S"), (0.65, "M"), (0.9, "L"))


def classify_effect(h) -> str:
    """Effect-size band label: ``"S"``, ``"M"``, ``"L"`` or ``"XL"``."""
    for cut, label in _BANDS:
        if h < cut:
            return label
    return "XL"


@dataclass(frozen=True)
class SimScenario:
    label: str
    n_star: int
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 2 or any(not 0 < p < 1 for p in probs):
            raise InputError("need at least two probabilities in (0, 1)")
        if any(a <= b for a, b in zip(probs, probs[1:])):
            raise InputError("scenario probabilities must be strictly decreasing")
        if int(self.n_star) <= 0:
            raise InputError("n* must be positive")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "n_star", int(self.n_star))

    @property
    def r(self) -> int:
        return len(self.probs)

    @property
    def effect_size(self) -> float:
        """h between the largest and smallest probability."""
        return effect_size_h(self.probs[0], self.probs[-1])


def _build():
    two = {
        "S": (392, [(0.10, 0.05), (0.50, 0.40), (0.95, 0.90)]),
        "M": (63, [(0.30, 0.10), (0.50, 0.26), (0.90, 0.70)]),
        "L": (25, [(0.60, 0.22), (0.80, 0.42), (0.90, 0.56)]),
        "XL": (13, [(0.60, 0.15), (0.80, 0.20), (0.90, 0.25)]),
    }
    three = {
        "S": (441, [(0.10, 0.075, 0.05), (0.50, 0.45, 0.40), (0.95, 0.92, 0.90)]),
        "M": (71, [(0.30, 0.20, 0.10), (0.50, 0.38, 0.26), (0.90, 0.80, 0.70)]),
        "L": (28, [(0.60, 0.41, 0.22), (0.80, 0.61, 0.42), (0.90, 0.73, 0.56)]),
        "XL": (15, [(0.60, 0.30, 0.15), (0.80, 0.50, 0.20), (0.90, 0.60, 0.25)]),
    }
    out = {}
    for r, spec in ((2, two), (3, three)):
        for band, (n_star, triples) in spec.items():
            for k, probs in enumerate(triples, start=1):
                label = f"{band}{k}"
                out[(r, label)] = SimScenario(label, n_star, probs)
    return out


SCENARIOS = _build()


def get_scenario(name: str, rows: int = 2) -> SimScenario:
    """Look up a built-in scenario such as ``"XL1"`` for 2 or 3 rows."""
    try:
        return SCENARIOS[(int(rows), name)]
    except KeyError:
        names = sorted({label for _, label in SCENARIOS})
        raise InputError(f"unknown scenario {name!r} with {rows} rows; known: {names}") from None


@dataclass
class SimulationReport:
    """Medians of posterior model probabilities over replicates."""

    scenario: dict
    q_values: list
    replicates: int
    medians: dict  # "q" -> set code -> model -> median probability
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "q_values": self.q_values,
            "replicates": self.replicates,
            "medians": self.medians,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["scenario"], d["q_values"], d["replicates"], d["medians"], d["provenance"])

    def median(self, q, code, model) -> float:
        return self.medians[repr(float(q))][code][model]


def _replicate(args):
    scenario, k, q_values, mc, scheme, codes = args
    gen = mc.stream("data", k).generator
    y = gen.binomial(scenario.n_star, np.asarray(scenario.probs))
    table = BinomialTable(y, np.full(scenario.r, scenario.n_star))
    hyper = BinomialHyper.uniform(scenario.r)
    rep = sweep_q(table, hyper, descending_chain(scenario.r), q_values, mc.child("rep", k), scheme, codes)
    return [{code: {m: e.value for m, e in row.probs[code].items()} for code in codes} for row in rep.rows]


def run_simulation(
    scenario: SimScenario,
    mc: McConfig = None,
    q_values=(0.0, 0.25, 0.5, 0.75, 1.0),
    replicates: int = 50,
    scheme="algorithm",
    model_sets=("0e", "0c", "0ce"),
    workers=None,
) -> SimulationReport:
    """Simulate ``replicates`` tables under ``scenario`` and summarise.

    Replicate ``k`` draws its table from the stream ``("data", k)`` and its
    estimators from ``("rep", k, ...)`` under ``mc``'s path, so every
    replicate is reproducible on its own and independent of ``workers``.
    """
    if int(replicates) < 1:
        raise InputError("replicates must be >= 1")
    mc = (mc or McConfig(samples=20_000)).child("sim", scenario.r, scenario.label)
    codes = list(model_sets)
    tasks = [(scenario, k, list(q_values), mc, scheme, codes) for k in range(int(replicates))]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, tasks))
    else:
        results = [_replicate(a) for a in tasks]
    medians = {}
    for i, q in enumerate(q_values):
        medians[repr(float(q))] = {
            code: {
                m: float(np.median([res[i][code][m] for res in results]))
                for m in results[0][i][code]
            }
            for code in codes
        }
    return SimulationReport(
        scenario={"label": scenario.label, "rows": scenario.r, "n_star": scenario.n_star, "probs": list(scenario.probs)},
        q_values=[float(q) for q in q_values],
        replicates=int(replicates),
        medians=medians,
        provenance={"seed": int(mc.seed), "samples": int(mc.samples), "burnin": int(mc.burnin), "scheme": scheme},
    )
