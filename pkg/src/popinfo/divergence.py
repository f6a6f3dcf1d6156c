"""Pairwise divergences between the response distributions of a Poisson population.

All quantities are in nats.  For the Renyi family the package works with the
scaled exponent ``beta * D_beta(p || q) = -ln sum_r p(r)**(1-beta) q(r)**beta``,
which is the quantity the information bounds consume.  For independent Poisson
neurons with means ``a`` (row stimulus) and ``b`` (column stimulus)::

    KL:        sum_n a ln(a/b) + b - a
    beta*D_b:  sum_n (1-beta) a + beta b - a**(1-beta) b**beta

Infinite divergences are stored as IEEE ``inf``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np
from scipy import stats

from .errors import ConfigurationError
from .stimulus import PoissonPopulation

BETA_MIN = 1e-6
BETA_MAX = 1.0 - 1e-6


@dataclass(frozen=True)
class DivergenceMatrix:
    """``values[m, k]`` is the divergence from stimulus ``m`` to stimulus ``k``.

    ``kind`` is ``"kl"``, ``"chernoff"`` (scaled Renyi exponent at ``beta``),
    ``"bhattacharyya"`` or ``"chernoff_information"``.
    """

    values: np.ndarray
    kind: str
    beta: float | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ConfigurationError(f"divergence matrix must be square, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def to_csv(self) -> str:
        """Row-major CSV; infinite entries are written as ``inf``."""
        buf = io.StringIO()
        for row in self.values:
            buf.write(",".join("inf" if np.isinf(v) else repr(float(v)) for v in row))
            buf.write("\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str, beta: float | None = None) -> DivergenceMatrix:
        rows = [[float(tok) for tok in line.split(",")] for line in text.strip().splitlines()]
        return cls(np.array(rows), kind, beta)


class ChernoffResult(NamedTuple):
    value: float
    beta: float | None
    clamped: bool


def _chernoff_terms(a, b, la, lb, beta):
    with np.errstate(invalid="ignore"):
        geo = np.exp((1.0 - beta) * la + beta * lb)
    t = (1.0 - beta) * a + beta * b - geo
    # the closed form is a weighted AM-GM gap, never negative
    return np.where(a == b, 0.0, np.maximum(t, 0.0))


@numba.njit(cache=True)
def _kl_fill(rates_t, logs_t):
    M, N = rates_t.shape
    out = np.zeros((M, M))
    for m in range(M):
        for k in range(M):
            if k == m:
                continue
            acc = 0.0
            for n in range(N):
                a = rates_t[m, n]
                b = rates_t[k, n]
                if a == b:
                    continue
                if a == 0.0:
                    acc += b
                elif b == 0.0:
                    acc = np.inf
                    break
                else:
                    acc += a * (logs_t[m, n] - logs_t[k, n]) + b - a
            out[m, k] = acc
    return out


@numba.njit(cache=True)
def _chernoff_fill(rates_t, pow_a, pow_b, beta):
    M, N = rates_t.shape
    out = np.zeros((M, M))
    for m in range(M):
        for k in range(M):
            if k == m:
                continue
            acc = 0.0
            for n in range(N):
                a = rates_t[m, n]
                b = rates_t[k, n]
                if a == b:
                    continue
                t = (1.0 - beta) * a + beta * b - pow_a[m, n] * pow_b[k, n]
                if t > 0.0:
                    acc += t
            out[m, k] = acc
    return out


def _transposed(rates: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(rates.T, dtype=float)


def kl_matrix(pop: PoissonPopulation) -> DivergenceMatrix:
    rates_t = _transposed(pop.rates)
    with np.errstate(divide="ignore"):
        logs_t = np.log(rates_t)
    return DivergenceMatrix(_kl_fill(rates_t, logs_t), "kl")


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ConfigurationError(f"beta must lie strictly inside (0, 1), got {beta}")
    return beta


def chernoff_coefficient_matrix(pop: PoissonPopulation, beta: float) -> DivergenceMatrix:
    """Matrix of ``beta * D_beta`` (the scaled exponent, not ``D_beta`` itself)."""
    beta = _check_beta(beta)
    rates_t = _transposed(pop.rates)
    # 0**c == 0 for c > 0, as the closed form requires
    values = _chernoff_fill(rates_t, rates_t ** (1.0 - beta), rates_t**beta, beta)
    return DivergenceMatrix(values, "chernoff", beta)


def bhattacharyya_matrix(pop: PoissonPopulation) -> DivergenceMatrix:
    values = chernoff_coefficient_matrix(pop, 0.5).values
    return DivergenceMatrix(values, "bhattacharyya", 0.5)


def _scaled_renyi_pair(a: np.ndarray, b: np.ndarray, beta) -> np.ndarray:
    """``beta * D_beta`` between two rate vectors for one or many ``beta`` values."""
    beta = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore"):
        la, lb = np.log(a), np.log(b)
    terms = _chernoff_terms(a[:, None], b[:, None], la[:, None], lb[:, None], beta.reshape(1, -1))
    return terms.sum(axis=0).reshape(beta.shape)


def hellinger_sq(pop: PoissonPopulation, m: int, k: int) -> float:
    """Squared Hellinger distance ``1 - exp(-Bhattacharyya)``."""
    bd = float(_scaled_renyi_pair(pop.rates[:, m], pop.rates[:, k], 0.5))
    return float(-np.expm1(-bd))


def _chernoff_slopes(a, b, la, lb, beta):
    """Per-neuron derivative in ``beta`` of the closed-form ``beta * D_beta`` terms."""
    with np.errstate(invalid="ignore"):
        geo = np.exp((1.0 - beta) * la + beta * lb)
        t = b - a - geo * (lb - la)
    t = np.where(a == 0, b, t)
    t = np.where(b == 0, -a, t)
    return np.where(a == b, 0.0, t)


def _concave_argmax(slope, lo, hi, tol):
    """Argmax on [lo, hi] of concave functions given their derivative.

    Bisects on the sign of the (decreasing) derivative; vectorized over
    independent problems.  Bracketing on values alone cannot resolve the
    argmax much below sqrt(machine epsilon), the slope can.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    at_lo = slope(lo) <= 0
    at_hi = slope(hi) >= 0
    for _ in range(200):
        active = (hi - lo > 2 * tol) & ~at_lo & ~at_hi
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        rising = slope(mid) > 0
        lo = np.where(active & rising, mid, lo)
        hi = np.where(active & ~rising, mid, hi)
    return np.where(at_lo, lo, np.where(at_hi, hi, 0.5 * (lo + hi)))


def chernoff_information(pop: PoissonPopulation, m: int, k: int, tol: float = 1e-9) -> ChernoffResult:
    """Maximize ``beta * D_beta(m || k)`` over ``beta`` in ``[1e-6, 1 - 1e-6]``.

    ``beta * D_beta`` is concave in ``beta``; the maximizer is bracketed to
    within ``tol``.

    The maximum can sit on the open boundary (e.g. disjoint supports), so the
    search interval is clamped; ``clamped`` reports when the argmax is within
    ``tol`` of a clamp.
    """
    if not tol > 0:
        raise ConfigurationError("tol must be positive")
    a, b = pop.rates[:, m], pop.rates[:, k]
    with np.errstate(divide="ignore"):
        la, lb = np.log(a), np.log(b)

    def g(beta):
        return _scaled_renyi_pair(a, b, beta)

    def slope(beta):
        return _chernoff_slopes(a, b, la, lb, beta).sum()

    probe = g(np.linspace(BETA_MIN, BETA_MAX, 5))
    if not np.any(np.isfinite(probe)):
        return ChernoffResult(float("inf"), None, False)
    beta = float(_concave_argmax(slope, BETA_MIN, BETA_MAX, tol))
    value = float(g(beta))
    clamped = beta - BETA_MIN <= tol or BETA_MAX - beta <= tol
    return ChernoffResult(value, beta, clamped)


def chernoff_information_matrix(pop: PoissonPopulation, tol: float = 1e-9):
    """Chernoff information for every ordered pair.

    Returns ``(DivergenceMatrix, betas)`` where ``betas[m, k]`` is the maximizer.
    """
    rates = pop.rates
    M = rates.shape[1]
    values = np.zeros((M, M))
    betas = np.full((M, M), 0.5)
    with np.errstate(divide="ignore"):
        logs = np.log(rates)
    for m in range(M):
        a, la = rates[:, m, None], logs[:, m, None]

        def g(beta):
            return _chernoff_terms(a, rates, la, logs, beta[None, :]).sum(axis=0)

        def slope(beta):
            return _chernoff_slopes(a, rates, la, logs, beta[None, :]).sum(axis=0)

        bm = _concave_argmax(slope, np.full(M, BETA_MIN), np.full(M, BETA_MAX), tol)
        values[m] = g(bm)
        betas[m] = bm
    np.fill_diagonal(values, 0.0)
    return DivergenceMatrix(values, "chernoff_information"), betas


def poisson_support(rate: float, tail: float = 1e-14) -> np.ndarray:
    """Counts ``0..r_max`` where ``r_max`` is the smallest count with tail mass below ``tail``."""
    if rate == 0:
        return np.arange(1)
    r_max = int(stats.poisson.isf(tail, rate))
    while stats.poisson.sf(r_max, rate) >= tail:
        r_max += 1
    return np.arange(r_max + 1)


def poisson_product_pmf(rates, supports) -> np.ndarray:
    """Joint pmf of independent Poisson counts over the product of ``supports``.

    Returned array has one axis per neuron.
    """
    pmf = np.ones(())
    for lam, r in zip(rates, supports):
        pmf = np.multiply.outer(pmf, stats.poisson.pmf(r, lam))
    return pmf


def truncated_pair_pmfs(a, b, tail: float = 1e-14, max_neurons: int = 3):
    """Truncated joint pmfs of two rate vectors on a common support (oracle helper)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ConfigurationError("rate vectors must be 1-D and of equal length")
    if a.size > max_neurons:
        raise ConfigurationError(f"brute-force enumeration is limited to {max_neurons} neurons")
    supports = [poisson_support(max(x, y), tail) for x, y in zip(a, b)]
    return poisson_product_pmf(a, supports), poisson_product_pmf(b, supports)


def brute_force_divergence(p, q, kind: str = "kl", beta: float | None = None) -> float:
    """Divergence between two explicit pmfs on a common finite support.

    ``kind`` is ``"kl"``, ``"chernoff"`` (returns ``beta * D_beta``) or
    ``"bhattacharyya"``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ConfigurationError(f"support mismatch: {p.shape} vs {q.shape}")
    p, q = p.ravel(), q.ravel()
    if kind == "kl":
        pos = p > 0
        if np.any(q[pos] == 0):
            return float("inf")
        return float(np.sum(p[pos] * (np.log(p[pos]) - np.log(q[pos]))))
    if kind == "bhattacharyya":
        beta = 0.5
    elif kind != "chernoff":
        raise ConfigurationError(f"unknown divergence kind {kind!r}")
    beta = _check_beta(beta)
    overlap = np.sum(p ** (1.0 - beta) * q**beta)
    if np.array_equal(p, q):
        return 0.0
    return float(-np.log(overlap))
