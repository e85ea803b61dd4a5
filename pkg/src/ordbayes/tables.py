"""Data containers: tables, hyperparameters, training sizes, MC settings."""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .kernel import RngStream, stream_id_from_path

__all__ = [
    "Estimate",
    "BinomialTable",
    "BinomialHyper",
    "MultinomialTable",
    "MultinomialHyper",
    "TrainingSpec",
    "McConfig",
]


class Estimate(NamedTuple):
    """A Monte Carlo (or exact) estimate with its standard error."""

    value: float
    mc_se: float = 0.0

    @property
    def degenerate(self) -> bool:
        """True when a probability estimate registered no hits at all."""
        return self.value == 0.0


def _int_array(values, what):
    arr = np.asarray(values)
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise InputError(f"{what} must be integers")
    return arr.astype(np.int64)


@dataclass(frozen=True)
class BinomialTable:
    """r independent binomial rows: ``y[i]`` successes out of ``n[i]`` trials."""

    y: np.ndarray
    n: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        y = _int_array(self.y, "successes")
        n = _int_array(self.n, "trials")
        if y.ndim != 1 or y.shape != n.shape:
            raise InputError("y and n must be 1-d arrays of equal length")
        if y.size < 2:
            raise InputError("a product-binomial table needs at least two rows")
        if np.any(y < 0) or np.any(y > n):
            raise InputError("need 0 <= y_i <= n_i in every row")
        y.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_counts(cls, counts, labels=()):
        """Build from an r x 2 grid of (successes, failures)."""
        counts = _int_array(counts, "counts")
        if counts.ndim != 2 or counts.shape[1] != 2:
            raise InputError("product-binomial counts need exactly two columns")
        if np.any(counts < 0):
            raise InputError("counts must be non-negative")
        return cls(counts[:, 0], counts.sum(axis=1), labels)

    @property
    def r(self) -> int:
        return int(self.y.size)

    @property
    def s_y(self) -> int:
        return int(self.y.sum())

    @property
    def total(self) -> int:
        return int(self.n.sum())

    def counts(self) -> np.ndarray:
        return np.column_stack([self.y, self.n - self.y])

    def permuted(self, order):
        order = np.asarray(order)
        labels = tuple(self.labels[i] for i in order) if self.labels else ()
        return BinomialTable(self.y[order], self.n[order], labels)


@dataclass(frozen=True)
class BinomialHyper:
    """Beta hyperparameters.

    ``enc`` is an r x 2 array of (α_i1, α_i2) for the encompassing model and
    ``null`` the pair (α_01, α_02) for the common probability under the null.
    """

    enc: np.ndarray
    null: tuple = (1.0, 1.0)

    def __post_init__(self):
        enc = np.asarray(self.enc, dtype=float)
        if enc.ndim != 2 or enc.shape[1] != 2:
            raise InputError("encompassing hyperparameters must be an r x 2 array")
        null = tuple(float(v) for v in self.null)
        if len(null) != 2:
            raise InputError("null hyperparameters must be a pair")
        if np.any(enc <= 0) or min(null) <= 0:
            raise InputError("all hyperparameters must be strictly positive")
        enc.setflags(write=False)
        object.__setattr__(self, "enc", enc)
        object.__setattr__(self, "null", null)

    @classmethod
    def uniform(cls, r):
        return cls(np.ones((r, 2)), (1.0, 1.0))

    @classmethod
    def jeffreys(cls, r):
        return cls(np.full((r, 2), 0.5), (0.5, 0.5))

    @classmethod
    def common(cls, r, enc=(1.0, 1.0), null=(1.0, 1.0)):
        return cls(np.tile(np.asarray(enc, dtype=float), (r, 1)), tuple(null))

    @property
    def r(self) -> int:
        return self.enc.shape[0]

    def permuted(self, order):
        return BinomialHyper(self.enc[np.asarray(order)], self.null)


@dataclass(frozen=True)
class MultinomialTable:
    """An r x c table of cell counts under a single multinomial."""

    counts: np.ndarray
    row_labels: tuple = ()
    col_labels: tuple = ()

    def __post_init__(self):
        counts = _int_array(self.counts, "counts")
        if counts.ndim != 2 or min(counts.shape) < 2:
            raise InputError("a multinomial table must be at least 2 x 2")
        if np.any(counts < 0):
            raise InputError("counts must be non-negative")
        if counts.sum() < 1:
            raise InputError("a multinomial table needs a positive grand total")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))

    @property
    def shape(self):
        return self.counts.shape

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def transposed(self):
        return MultinomialTable(self.counts.T, self.col_labels, self.row_labels)


@dataclass(frozen=True)
class MultinomialHyper:
    """Dirichlet hyperparameters.

    ``cells`` (r x c) for the encompassing model, ``rows`` (length r) and
    ``cols`` (length c) for the two margins under independence.
    """

    cells: np.ndarray
    rows: np.ndarray
    cols: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=float)
        rows = np.asarray(self.rows, dtype=float)
        cols = np.asarray(self.cols, dtype=float)
        if cells.ndim != 2 or rows.shape != (cells.shape[0],) or cols.shape != (cells.shape[1],):
            raise InputError("hyperparameter shapes do not match the table")
        if np.any(cells <= 0) or np.any(rows <= 0) or np.any(cols <= 0):
            raise InputError("all hyperparameters must be strictly positive")
        for arr in (cells, rows, cols):
            arr.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @classmethod
    def uniform(cls, r, c):
        return cls(np.ones((r, c)), np.ones(r), np.ones(c))

    @classmethod
    def common(cls, r, c, cell=1.0, row=1.0, col=1.0):
        return cls(np.full((r, c), float(cell)), np.full(r, float(row)), np.full(c, float(col)))

    @property
    def shape(self):
        return self.cells.shape

    def is_unit(self) -> bool:
        return bool(np.all(self.cells == 1) and np.all(self.rows == 1) and np.all(self.cols == 1))

    def transposed(self):
        return MultinomialHyper(self.cells.T, self.cols, self.rows)


@dataclass(frozen=True)
class TrainingSpec:
    """Training (imaginary) sample sizes, as a fraction ``q`` or explicit sizes.

    Fractions resolve to ``round(q * n_i)`` with ties going to the even
    integer.
    """

    q: float = None
    sizes: tuple = None

    def __post_init__(self):
        if (self.q is None) == (self.sizes is None):
            raise InputError("give exactly one of q or sizes")
        if self.q is not None and not 0.0 <= float(self.q) <= 1.0:
            raise InputError(f"training fraction must lie in [0, 1], got {self.q}")
        if self.sizes is not None:
            sizes = tuple(int(v) for v in np.atleast_1d(self.sizes))
            if any(v < 0 for v in sizes):
                raise InputError("training sizes must be non-negative")
            object.__setattr__(self, "sizes", sizes)

    @classmethod
    def fraction(cls, q):
        return cls(q=float(q))

    @classmethod
    def explicit(cls, sizes):
        return cls(sizes=sizes)

    def resolve(self, n):
        """Training sizes for trial counts ``n`` (array or scalar total)."""
        n = np.asarray(n, dtype=np.int64)
        if self.q is not None:
            return np.rint(self.q * n).astype(np.int64)
        t = np.asarray(self.sizes, dtype=np.int64)
        if n.ndim == 0:
            if t.size != 1:
                raise InputError("a multinomial training size is a single integer")
            t = t.reshape(())
        elif t.shape != n.shape:
            raise InputError(f"expected {n.size} training sizes, got {t.size}")
        if np.any(t > n):
            raise InputError("training sizes may not exceed the observed sizes")
        return t


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    Parameters
    ----------
    samples : int
        Kept draws ``S`` per estimator.
    burnin : int or None
        Metropolis burn-in ``S1``; defaults to ``samples // 10``.
    seed : int
        Root seed.
    path : tuple
        Task path prefix; every estimator appends its own name so that
        distinct tasks consume disjoint streams.
    """

    samples: int = 100_000
    burnin: int = None
    seed: int = 0
    path: tuple = field(default=())

    def __post_init__(self):
        if int(self.samples) < 1:
            raise InputError("samples must be >= 1")
        if self.burnin is None:
            object.__setattr__(self, "burnin", int(self.samples) // 10)
        if int(self.burnin) < 0:
            raise InputError("burnin must be >= 0")
        object.__setattr__(self, "path", tuple(self.path))

    def child(self, *parts):
        """Configuration for a sub-task; streams derive from the longer path."""
        return McConfig(self.samples, self.burnin, self.seed, self.path + parts)

    def stream(self, *parts) -> RngStream:
        return RngStream(self.seed, stream_id_from_path(*(self.path + parts)))
