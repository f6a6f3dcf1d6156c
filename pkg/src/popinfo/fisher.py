"""Asymptotic information formulas for continuous stimuli.

For a stimulus density ``p(x)`` on a quadrature grid, with Fisher information
``J(x)`` and prior curvature ``P(x) = -d^2 ln p / dx dx^T``::

    I_G     = 1/2 E[ln det(G / (2 pi e))] + H(X),   G = J + P
    I_F     = 1/2 E[ln det(J / (2 pi e))] + H(X)
    I_gamma = 1/2 E[ln det(gamma G / (2 pi))] + H(X),   gamma = beta (1 - beta)

Expectations and the differential entropy ``H(X)`` are quadrature sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, SingularityError

TWO_PI = 2.0 * math.pi
TWO_PI_E = 2.0 * math.pi * math.e


@dataclass(frozen=True)
class CurvatureField:
    """Fisher information and prior curvature sampled on a quadrature grid.

    Parameters
    ----------
    points : (P, K) array
    weights : (P,) array of positive quadrature weights
    density : (P,) array, prior density ``p(x)`` at the points
    fisher : (P, K, K) array, ``J(x)``
    prior_curvature : (P, K, K) array, ``P(x)``
    """

    points: np.ndarray
    weights: np.ndarray
    density: np.ndarray
    fisher: np.ndarray
    prior_curvature: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        P, K = pts.shape
        w = np.asarray(self.weights, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        J = _as_matrices(self.fisher, P, K, "fisher")
        Pc = _as_matrices(self.prior_curvature, P, K, "prior_curvature")
        if w.shape != (P,) or dens.shape != (P,):
            raise ConfigurationError("weights and density need one entry per grid point")
        if np.any(w <= 0):
            raise ConfigurationError("quadrature weights must be positive")
        if np.any(dens <= 0):
            raise ConfigurationError("density must be positive on the grid")
        mass = float(np.dot(w, dens))
        if abs(mass - 1.0) > 1e-6:
            raise ConfigurationError(f"density integrates to {mass}, not 1 (tolerance 1e-6)")
        if not np.allclose(J, np.swapaxes(J, 1, 2), rtol=1e-12, atol=1e-12):
            raise ConfigurationError("Fisher information must be symmetric")
        if not np.allclose(Pc, np.swapaxes(Pc, 1, 2), rtol=1e-12, atol=1e-12):
            raise ConfigurationError("prior curvature must be symmetric")
        eig = np.linalg.eigvalsh(J)
        scale = np.maximum(1.0, np.abs(eig).max(axis=1))
        if np.any(eig.min(axis=1) < -1e-10 * scale):
            raise ConfigurationError("Fisher information must be positive semidefinite")
        for name, arr in (("points", pts), ("weights", w), ("density", dens), ("fisher", J), ("prior_curvature", Pc)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_curvature(self) -> np.ndarray:
        return self.fisher + self.prior_curvature

    def differential_entropy(self) -> float:
        return float(-np.sum(self.weights * self.density * np.log(self.density)))


def _as_matrices(arr, P, K, name):
    a = np.asarray(arr, dtype=float)
    if a.shape == (P,) and K == 1:
        a = a[:, None, None]
    if a.shape != (P, K, K):
        raise ConfigurationError(f"{name} must have shape ({P}, {K}, {K}), got {a.shape}")
    return a


def _logdet(mats: np.ndarray, points: np.ndarray, label: str) -> np.ndarray:
    try:
        chol = np.linalg.cholesky(mats)
    except np.linalg.LinAlgError:
        for i, mat in enumerate(mats):
            try:
                np.linalg.cholesky(mat)
            except np.linalg.LinAlgError:
                raise SingularityError(
                    f"{label} is not positive definite at grid point {i} (x={points[i].tolist()})"
                ) from None
        raise
    diag = np.diagonal(chol, axis1=1, axis2=2)
    if np.any(diag <= 0):
        i = int(np.flatnonzero(np.any(diag <= 0, axis=1))[0])
        raise SingularityError(f"{label} is singular at grid point {i} (x={points[i].tolist()})")
    return 2.0 * np.log(diag).sum(axis=1)


def _expected_half_logdet(field: CurvatureField, mats: np.ndarray, const: float, label: str) -> float:
    logdet = _logdet(mats, field.points, label) - field.dim * math.log(const)
    return 0.5 * float(np.sum(field.weights * field.density * logdet))


def i_G(field: CurvatureField) -> float:
    return _expected_half_logdet(field, field.total_curvature, TWO_PI_E, "G(x)") + field.differential_entropy()


def i_F(field: CurvatureField) -> float:
    return _expected_half_logdet(field, field.fisher, TWO_PI_E, "J(x)") + field.differential_entropy()


def i_gamma(field: CurvatureField, beta: float) -> float:
    if not 0.0 < beta < 1.0:
        raise ConfigurationError(f"beta must lie strictly inside (0, 1), got {beta}")
    gamma = beta * (1.0 - beta)
    half = _expected_half_logdet(field, field.total_curvature, TWO_PI, "G(x)")
    return half + 0.5 * field.dim * math.log(gamma) + field.differential_entropy()


def poisson_fisher_1d(derivatives, rates) -> np.ndarray:
    """Fisher information ``J(x) = sum_n f'_n(x)**2 / f_n(x)`` of independent Poisson neurons.

    ``derivatives`` and ``rates`` have shape ``(N, P)`` (or ``(P,)`` for a single
    neuron).  Neurons with zero rate and zero slope contribute nothing.
    """
    d = np.atleast_2d(np.asarray(derivatives, dtype=float))
    f = np.atleast_2d(np.asarray(rates, dtype=float))
    if d.shape != f.shape:
        raise ConfigurationError(f"derivatives {d.shape} and rates {f.shape} differ in shape")
    if np.any(f < 0):
        raise ConfigurationError("rates must be nonnegative")
    bad = (f == 0) & (d != 0)
    if np.any(bad):
        n, p = np.argwhere(bad)[0]
        raise SingularityError(f"neuron {n} has zero rate but nonzero slope at grid index {p}")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(f > 0, d**2 / f, 0.0)
    return terms.sum(axis=0)


def trapezoid_weights(grid) -> np.ndarray:
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise ConfigurationError("grid must be 1-D, strictly increasing, with at least 2 points")
    dx = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += dx / 2
    w[1:] += dx / 2
    return w


def product_grid(grids):
    """Points and weights of the tensor-product trapezoid rule over 1-D grids."""
    axes = [np.asarray(g, dtype=float) for g in grids]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    wmesh = np.meshgrid(*[trapezoid_weights(g) for g in axes], indexing="ij")
    weights = np.prod(np.stack([w.ravel() for w in wmesh]), axis=0)
    return points, weights


@dataclass(frozen=True)
class GaussianBump:
    """Tuning ``baseline + peak * exp(-(x - center)**2 / (2 width**2))``."""

    center: float
    width: float
    peak: float
    baseline: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.baseline + self.peak * np.exp(-((x - self.center) ** 2) / (2 * self.width**2))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        bump = self.peak * np.exp(-((x - self.center) ** 2) / (2 * self.width**2))
        return -bump * (x - self.center) / self.width**2


def gaussian_prior_on_grid(grid, sigma: float, mean: float = 0.0):
    """Gaussian density (renormalized on the grid) and its constant curvature ``1/sigma**2``."""
    x = np.asarray(grid, dtype=float)
    w = trapezoid_weights(x)
    dens = np.exp(-((x - mean) ** 2) / (2 * sigma**2)) / (sigma * math.sqrt(TWO_PI))
    dens = dens / np.dot(w, dens)
    return w, dens, np.full(x.size, 1.0 / sigma**2)


def linear_gaussian_field(
    sigma: float, noise_sd: float, num_obs: int = 1, half_width: float = 12.0, num_points: int = 2001
) -> CurvatureField:
    """``x ~ N(0, sigma^2)`` observed through ``num_obs`` readings ``x + N(0, noise_sd^2)``.

    Fisher information is the constant ``num_obs / noise_sd**2``.  The grid
    spans ``+-half_width * sigma``.
    """
    if sigma <= 0 or noise_sd <= 0 or num_obs < 1:
        raise ConfigurationError("sigma, noise_sd must be positive and num_obs >= 1")
    grid = np.linspace(-half_width * sigma, half_width * sigma, num_points)
    w, dens, curv = gaussian_prior_on_grid(grid, sigma)
    J = np.full(grid.size, num_obs / noise_sd**2)
    return CurvatureField(grid, w, dens, J, curv)


def linear_gaussian_mi(sigma: float, noise_sd: float, num_obs: int = 1) -> float:
    """Exact mutual information of the linear-Gaussian channel, in nats."""
    return 0.5 * math.log1p(num_obs * sigma**2 / noise_sd**2)


def poisson_1d_field(tunings, grid, sigma: float, mean: float = 0.0) -> CurvatureField:
    """Population of Poisson neurons with differentiable tunings under a Gaussian prior.

    Each tuning must be callable and expose ``derivative(x)``.
    """
    x = np.asarray(grid, dtype=float)
    rates = np.array([t(x) for t in tunings])
    slopes = np.array([t.derivative(x) for t in tunings])
    w, dens, curv = gaussian_prior_on_grid(x, sigma, mean)
    return CurvatureField(x, w, dens, poisson_fisher_1d(slopes, rates), curv)
