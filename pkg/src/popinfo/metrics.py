"""Closed-form mutual-information approximations and bounds for discrete stimuli.

Every metric here has the shape::

    -sum_m p_m ln( lead + sum_{k in S_m} w_mk exp(-s * E[m, k]) ) + H(X)

where ``E`` is a divergence matrix (KL or the scaled Renyi exponent),
``s`` is 1 or ``1/e``, ``w_mk`` is a prior ratio ``(p_k / p_m)**alpha`` (or 1)
and ``S_m`` is either every stimulus (lead 0, the ``k = m`` term supplies the
1) or the neighbor set of ``m`` (lead 1).  Inner sums stay in linear space:
every exponent is <= 0 and the anchor term keeps the argument >= 1.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .divergence import (
    DivergenceMatrix,
    bhattacharyya_matrix,
    chernoff_coefficient_matrix,
    chernoff_information_matrix,
    kl_matrix,
)
from .errors import ConfigurationError
from .stimulus import LN2, PoissonPopulation, entropy

INV_E = math.exp(-1.0)
ZERO_TOL = 1e-12
TIE_TOL = 1e-9

METRIC_NAMES = (
    "I_u",
    "I_e",
    "I_beta_alpha",
    "I_d",
    "I_u_d",
    "I_beta_alpha_d",
    "I_D",
    "I_D0",
    "h_c_plus_H",
    "H_X",
)


@dataclass(frozen=True)
class NeighborSets:
    """Alias, nearest and combined neighbor sets for each stimulus.

    ``aliases[m]`` holds the indices ``k != m`` with zero divergence,
    ``nearest[m]`` the non-aliases attaining the smallest finite divergence,
    and ``mask[m, k]`` is True exactly for ``k`` in their union.
    """

    aliases: tuple
    nearest: tuple
    mask: np.ndarray
    kind: str
    beta: float | None = None

    def members(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.mask[m])


def neighbor_sets(divmat: DivergenceMatrix, zero_tol: float = ZERO_TOL, tie_tol: float = TIE_TOL) -> NeighborSets:
    """Build neighbor sets from a divergence matrix.

    ``zero_tol`` is absolute (nats); ``tie_tol`` is relative to the minimum
    non-alias divergence.  Infinite entries never enter either set.
    """
    if not (zero_tol > 0 and tie_tol > 0):
        raise ConfigurationError("tolerances must be positive")
    D = divmat.values
    M = D.shape[0]
    mask = np.zeros((M, M), dtype=bool)
    aliases, nearest = [], []
    for m in range(M):
        row = D[m]
        others = np.arange(M) != m
        alias = others & (row <= zero_tol)
        rest = others & ~alias & np.isfinite(row)
        near = np.zeros(M, dtype=bool)
        if rest.any():
            dmin = row[rest].min()
            near = rest & (row <= dmin * (1.0 + tie_tol))
        aliases.append(np.flatnonzero(alias))
        nearest.append(np.flatnonzero(near))
        mask[m] = alias | near
    mask.setflags(write=False)
    return NeighborSets(tuple(aliases), tuple(nearest), mask, divmat.kind, divmat.beta)


def _prior(prior, size):
    p = np.asarray(prior, dtype=float)
    if p.shape != (size,):
        raise ConfigurationError(f"prior has shape {p.shape}, divergence matrix is {size}x{size}")
    if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ConfigurationError("prior must be strictly positive and normalized")
    return p


def _require_kind(divmat: DivergenceMatrix, *kinds):
    if divmat.kind not in kinds:
        raise ConfigurationError(f"expected a {' or '.join(kinds)} matrix, got {divmat.kind!r}")


def _require_sets(divmat: DivergenceMatrix, sets: NeighborSets):
    if sets.kind != divmat.kind or sets.beta != divmat.beta:
        raise ConfigurationError(
            f"neighbor sets built from {sets.kind}(beta={sets.beta}) "
            f"but matrix is {divmat.kind}(beta={divmat.beta})"
        )
    if sets.mask.shape != divmat.values.shape:
        raise ConfigurationError("neighbor sets and matrix sizes differ")


def _information(exponents, p, scale=1.0, alpha=1.0, mask=None, prior_ratio=True):
    with np.errstate(over="ignore"):
        terms = np.exp(-scale * exponents)
    if prior_ratio:
        logp = np.log(p)
        terms = terms * np.exp(alpha * (logp[None, :] - logp[:, None]))
    else:
        terms = terms * np.ones_like(p)[None, :]
    if mask is None:
        inner = terms.sum(axis=1)
    else:
        inner = 1.0 + np.where(mask, terms, 0.0).sum(axis=1)
    return float(-np.dot(p, np.log(inner)) + entropy(p))


def i_u(divmat: DivergenceMatrix, prior) -> float:
    _require_kind(divmat, "kl")
    return _information(divmat.values, _prior(prior, divmat.size))


def i_e(divmat: DivergenceMatrix, prior) -> float:
    _require_kind(divmat, "kl")
    return _information(divmat.values, _prior(prior, divmat.size), scale=INV_E)


def _check_alpha(alpha):
    if not alpha > 0:
        raise ConfigurationError(f"alpha must be positive, got {alpha}")
    return float(alpha)


def i_beta_alpha(divmat: DivergenceMatrix, prior, alpha: float) -> float:
    """Lower bound from a matrix of scaled Renyi exponents ``beta * D_beta``."""
    _require_kind(divmat, "chernoff", "bhattacharyya")
    alpha = _check_alpha(alpha)
    return _information(divmat.values, _prior(prior, divmat.size), alpha=alpha)


def i_d(divmat: DivergenceMatrix, sets: NeighborSets, prior) -> float:
    _require_kind(divmat, "kl")
    _require_sets(divmat, sets)
    p = _prior(prior, divmat.size)
    return _information(divmat.values, p, scale=INV_E, mask=sets.mask)


def i_u_d(divmat: DivergenceMatrix, sets: NeighborSets, prior) -> float:
    _require_kind(divmat, "kl")
    _require_sets(divmat, sets)
    return _information(divmat.values, _prior(prior, divmat.size), mask=sets.mask)


def i_beta_alpha_d(divmat: DivergenceMatrix, sets: NeighborSets, prior, alpha: float) -> float:
    _require_kind(divmat, "chernoff", "bhattacharyya")
    _require_sets(divmat, sets)
    alpha = _check_alpha(alpha)
    return _information(divmat.values, _prior(prior, divmat.size), alpha=alpha, mask=sets.mask)


def i_D(divmat: DivergenceMatrix, sets: NeighborSets, prior) -> float:
    """Like :func:`i_d` but without the prior ratio inside the sum.

    Shares the code path of :func:`i_d`, so the two agree bit for bit when
    the prior is uniform.
    """
    _require_kind(divmat, "kl")
    _require_sets(divmat, sets)
    p = _prior(prior, divmat.size)
    return _information(divmat.values, p, scale=INV_E, mask=sets.mask, prior_ratio=False)


def i_D0(divmat: DivergenceMatrix, sets: NeighborSets, prior) -> float:
    """First-order expansion of :func:`i_D`: ``ln(1 + z)`` replaced by ``z``."""
    _require_kind(divmat, "kl")
    _require_sets(divmat, sets)
    p = _prior(prior, divmat.size)
    with np.errstate(over="ignore"):
        terms = np.where(sets.mask, np.exp(-INV_E * divmat.values), 0.0)
    return float(-np.dot(p, terms.sum(axis=1)) + entropy(p))


def h_c_bound(pop: PoissonPopulation, prior=None, tol: float = 1e-9) -> float:
    """``h_c + H(X)``: the full double sum with the Chernoff information as exponent."""
    p = _prior(pop.prior if prior is None else prior, pop.num_stimuli)
    chernoff, _ = chernoff_information_matrix(pop, tol)
    return _information(chernoff.values, p)


def h_d_bound(pop: PoissonPopulation, beta: float, prior=None, tol: float = 1e-9) -> float:
    """``h_d + H(X)`` under one reading of its exponent.

    The exponent is taken as ``beta_m * D_beta(m || k)``: the pairwise
    Chernoff maximizer ``beta_m`` times the *unscaled* Renyi divergence at the
    supplied ``beta``.  Other readings exist; no ordering against
    :func:`h_c_bound` is implied.
    """
    p = _prior(pop.prior if prior is None else prior, pop.num_stimuli)
    scaled = chernoff_coefficient_matrix(pop, beta).values
    _, betas = chernoff_information_matrix(pop, tol)
    return _information(betas * scaled / beta, p)


@dataclass
class MetricReport:
    """Metric values in nats, plus the configuration that produced them."""

    values: dict
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, v in self.values.items():
            if not np.isfinite(v):
                raise ConfigurationError(f"metric {name} is not finite ({v})")

    @property
    def fingerprint(self) -> str:
        blob = json.dumps(self.config, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def bits(self, name: str) -> float:
        return self.values[name] / LN2

    def to_dict(self) -> dict:
        return {
            "metrics": {k: {"nats": v, "bits": v / LN2} for k, v in self.values.items()},
            "config": self.config,
            "fingerprint": self.fingerprint,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def csv_header(self) -> list:
        cols = []
        for k in self.values:
            cols += [f"{k}_nats", f"{k}_bits"]
        return cols

    def csv_row(self) -> list:
        row = []
        for v in self.values.values():
            row += [v, v / LN2]
        return row


def compute_metrics(
    pop: PoissonPopulation,
    names=METRIC_NAMES,
    beta: float = 0.5,
    alpha: float = 1.0,
    tol: float = 1e-9,
    config: dict | None = None,
) -> MetricReport:
    """Evaluate the requested metrics, building each divergence matrix at most once."""
    unknown = [n for n in names if n not in METRIC_NAMES]
    if unknown:
        raise ConfigurationError(f"unknown metric names: {unknown}")
    p = pop.prior
    cache = {}

    def kl():
        if "kl" not in cache:
            cache["kl"] = kl_matrix(pop)
        return cache["kl"]

    def kl_sets():
        if "kl_sets" not in cache:
            cache["kl_sets"] = neighbor_sets(kl())
        return cache["kl_sets"]

    def chern():
        if "chern" not in cache:
            cache["chern"] = bhattacharyya_matrix(pop) if beta == 0.5 else chernoff_coefficient_matrix(pop, beta)
        return cache["chern"]

    compute = {
        "I_u": lambda: i_u(kl(), p),
        "I_e": lambda: i_e(kl(), p),
        "I_beta_alpha": lambda: i_beta_alpha(chern(), p, alpha),
        "I_d": lambda: i_d(kl(), kl_sets(), p),
        "I_u_d": lambda: i_u_d(kl(), kl_sets(), p),
        "I_beta_alpha_d": lambda: i_beta_alpha_d(chern(), neighbor_sets(chern()), p, alpha),
        "I_D": lambda: i_D(kl(), kl_sets(), p),
        "I_D0": lambda: i_D0(kl(), kl_sets(), p),
        "h_c_plus_H": lambda: h_c_bound(pop, p, tol),
        "H_X": lambda: entropy(p),
    }
    values = {name: compute[name]() for name in names}
    cfg = {"beta": beta, "alpha": alpha, "num_neurons": pop.num_neurons, "num_stimuli": pop.num_stimuli}
    cfg.update(config or {})
    return MetricReport(values, cfg)
