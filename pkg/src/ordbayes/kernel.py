"""Seedable random streams and log-domain special functions.

Every Monte Carlo task in the package draws from its own :class:`RngStream`.
A stream is identified by ``(seed, stream_id)`` and wraps a counter-based
Philox generator, so a task's variates do not depend on which other tasks ran
before it or on how work was scheduled across processes.

All Beta and Dirichlet normalising constants are handled on the natural-log
scale; ratios are formed by subtraction and only exponentiated for reporting.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, gammaln

from .errors import DomainError

__all__ = [
    "RngStream",
    "stream_id_from_path",
    "log_beta",
    "log_mvbeta",
    "log_binom",
    "log_multinom",
    "sample_beta",
    "sample_dirichlet",
    "sample_binomial",
    "sample_multinomial",
    "independence_metropolis",
    "batch_means_se",
]

_MASK64 = (1 << 64) - 1


def stream_id_from_path(*path) -> int:
    """Map a task path such as ``("q", 2, "prior")`` to a 64-bit stream id.

    The mapping is a BLAKE2b digest of the path's ``repr``, so it is stable
    across runs, platforms and Python hash seeds.
    """
    digest = hashlib.blake2b(repr(tuple(path)).encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "little")


@dataclass(frozen=True)
class RngStream:
    """One logical random stream.

    Parameters
    ----------
    seed : int
        User-level seed (64-bit unsigned).
    stream_id : int
        Identifier of the independent task consuming this stream.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= int(value) <= _MASK64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value}")
        ss = np.random.SeedSequence([int(self.seed), int(self.stream_id)])
        object.__setattr__(self, "_gen", np.random.Generator(np.random.Philox(ss)))

    @classmethod
    def for_path(cls, seed, *path):
        """Stream whose id is derived from a task path."""
        return cls(seed, stream_id_from_path(*path))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen


def _positive(x, what):
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be positive and finite, got {x!r}")
    return arr


def log_beta(a, b):
    """ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a+b), elementwise.

    Raises
    ------
    DomainError
        If any argument is not strictly positive.
    """
    a = _positive(a, "a")
    b = _positive(b, "b")
    out = betaln(a, b)
    return float(out) if out.ndim == 0 else out


def log_mvbeta(alpha, axis=-1):
    """Log of the multivariate Beta function Σ ln Γ(α_k) - ln Γ(Σ α_k).

    ``alpha`` may be batched; the reduction runs over ``axis``.
    """
    alpha = _positive(alpha, "alpha")
    if alpha.ndim == 0 or alpha.shape[axis] < 2:
        raise DomainError("alpha needs at least two components")
    out = gammaln(alpha).sum(axis=axis) - gammaln(alpha.sum(axis=axis))
    return float(out) if np.ndim(out) == 0 else out


def log_binom(n, k):
    """ln C(n, k) for integer arrays with 0 <= k <= n."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def log_multinom(counts, axis=-1):
    """ln of the multinomial coefficient (Σ x)! / Π x! over ``axis``."""
    counts = np.asarray(counts, dtype=float)
    return gammaln(counts.sum(axis=axis) + 1) - gammaln(counts + 1).sum(axis=axis)


def _rng(rng):
    return rng.generator if isinstance(rng, RngStream) else rng


def sample_beta(rng, a, b, size=None):
    """Beta(a, b) variates."""
    _positive(a, "a")
    _positive(b, "b")
    return _rng(rng).beta(a, b, size=size)


def sample_dirichlet(rng, alpha, size=None):
    """Dirichlet variates as normalised Gamma variates.

    ``alpha`` may carry leading batch dimensions (one Dirichlet per row); the
    last axis indexes components. ``size`` prepends extra sample dimensions.
    """
    alpha = _positive(alpha, "alpha")
    shape = alpha.shape if size is None else tuple(np.atleast_1d(size)) + alpha.shape
    g = _rng(rng).standard_gamma(np.broadcast_to(alpha, shape))
    total = g.sum(axis=-1, keepdims=True)
    return g / total


def sample_binomial(rng, trials, p, size=None):
    """Binomial(trials, p) counts."""
    p_arr = np.asarray(p, dtype=float)
    t_arr = np.asarray(trials)
    if np.any(p_arr < 0) or np.any(p_arr > 1) or np.any(t_arr < 0):
        raise DomainError("binomial needs trials >= 0 and 0 <= p <= 1")
    return _rng(rng).binomial(trials, p, size=size)


def sample_multinomial(rng, total, p, size=None):
    """Multinomial(total, p) count vectors.

    ``p`` may be a batch of probability vectors (last axis = categories), in
    which case one draw per row is returned.
    """
    p = np.asarray(p, dtype=float)
    if total < 0:
        raise DomainError("total must be non-negative")
    if np.any(p < 0) or np.any(np.abs(p.sum(axis=-1) - 1.0) > 1e-9):
        raise DomainError("p must lie on the probability simplex")
    p = p / p.sum(axis=-1, keepdims=True)
    return _rng(rng).multinomial(total, p, size=size)


def independence_metropolis(log_ratio, log_u):
    """Run an independence Metropolis chain over pre-drawn proposals.

    Parameters
    ----------
    log_ratio : array, shape (N + 1,)
        ``log target - log proposal`` for each proposal; entry 0 is the
        starting state, entries 1..N are the successive proposals.
    log_u : array, shape (N,)
        Log uniforms driving the accept/reject decisions.

    Returns
    -------
    states : int array, shape (N,)
        Index into the proposal array of the chain state after each step.
    accepted : int
        Number of accepted moves.
    """
    lr = np.asarray(log_ratio, dtype=float).tolist()
    lu = np.asarray(log_u, dtype=float).tolist()
    states = np.empty(len(lu), dtype=np.int64)
    cur = 0
    cur_lr = lr[0]
    accepted = 0
    for s, u in enumerate(lu, start=1):
        if u < lr[s] - cur_lr:
            cur = s
            cur_lr = lr[s]
            accepted += 1
        states[s - 1] = cur
    return states, accepted


def batch_means_se(values, n_batches=None):
    """Standard error of a chain average by non-overlapping batch means.

    With ``n_batches`` unset, about sqrt(N) batches are used. For iid input
    this agrees with the usual ``sd / sqrt(N)`` up to sampling noise.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 4:
        return float(values.std(ddof=0) / np.sqrt(max(n, 1)))
    b = n_batches or max(2, int(np.sqrt(n)))
    size = n // b
    means = values[: size * b].reshape(b, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(b))
