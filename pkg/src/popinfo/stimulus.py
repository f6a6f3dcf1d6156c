"""Stimulus spaces, priors, tuning functions and Poisson population encoders.

A population is stored densely as an ``(N, M)`` array of mean spike counts,
``rates[n, m] = f(x_m; theta_n)``, one row per neuron and one column per
stimulus.  Neurons are conditionally independent Poisson given the stimulus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class StimulusSpace:
    """Discrete stimulus points with a strictly positive prior pmf.

    Parameters
    ----------
    points : array_like, shape (M,) or (M, K)
        Stimulus values.  Must be distinct.
    prior : array_like, shape (M,)
        Probabilities; strictly positive and summing to one within 1e-12.
    """

    points: np.ndarray
    prior: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        prior = np.array(self.prior, dtype=float)
        if points.ndim == 0 or points.shape[0] == 0:
            raise ConfigurationError("stimulus space is empty")
        if prior.shape != (points.shape[0],):
            raise ConfigurationError(
                f"prior has shape {prior.shape}, expected ({points.shape[0]},)"
            )
        if not np.all(np.isfinite(points)):
            raise ConfigurationError("stimulus points must be finite")
        if np.any(prior <= 0) or not np.all(np.isfinite(prior)):
            raise ConfigurationError("prior entries must be strictly positive")
        if abs(prior.sum() - 1.0) > 1e-12:
            raise ConfigurationError(f"prior sums to {prior.sum()!r}, not 1")
        flat = points.reshape(points.shape[0], -1)
        if np.unique(flat, axis=0).shape[0] != flat.shape[0]:
            raise ConfigurationError("stimulus points must be distinct")
        points.setflags(write=False)
        prior.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "prior", prior)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def with_prior(self, prior) -> StimulusSpace:
        return StimulusSpace(self.points, prior)


@dataclass(frozen=True)
class Heaviside:
    """Step tuning ``A * [x >= center]``."""

    center: float
    amplitude: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ConfigurationError("amplitude must be nonnegative")

    def __call__(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.center, float(self.amplitude), 0.0)


@dataclass(frozen=True)
class RectifiedLinear:
    """Tuning ``max(0, x - center)``."""

    center: float

    def __call__(self, x):
        return np.maximum(0.0, np.asarray(x, dtype=float) - self.center)


@dataclass(frozen=True)
class RandomBinary:
    """Tuning equal to ``amplitude`` on a set of stimulus indices, 0 elsewhere.

    Unlike the other two variants this one is defined on stimulus *indices*,
    so it is evaluated with :meth:`column_mask` rather than called on values.
    """

    support: tuple[int, ...]
    amplitude: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ConfigurationError("amplitude must be nonnegative")
        if len(set(self.support)) != len(self.support):
            raise ConfigurationError("support indices must be distinct")

    def column_mask(self, num_stimuli: int) -> np.ndarray:
        mask = np.zeros(num_stimuli, dtype=bool)
        support = np.asarray(self.support, dtype=int)
        if support.size and (support.min() < 0 or support.max() >= num_stimuli):
            raise ConfigurationError("support index outside the stimulus set")
        mask[support] = True
        return mask


@dataclass(frozen=True)
class PoissonPopulation:
    """Independent Poisson neurons with mean counts ``rates[n, m]``."""

    rates: np.ndarray
    space: StimulusSpace
    tuning: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape[0] < 1 or rates.shape[1] < 1:
            raise ConfigurationError(f"rates must be a nonempty 2-D array, got {rates.shape}")
        if rates.shape[1] != self.space.size:
            raise ConfigurationError(
                f"rates have {rates.shape[1]} columns but the space has {self.space.size} points"
            )
        if not np.all(np.isfinite(rates)) or np.any(rates < 0):
            raise ConfigurationError("rates must be finite and nonnegative")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)

    @property
    def num_neurons(self) -> int:
        return self.rates.shape[0]

    @property
    def num_stimuli(self) -> int:
        return self.rates.shape[1]

    @property
    def prior(self) -> np.ndarray:
        return self.space.prior


def uniform_grid(num_points: int, half_range: float) -> np.ndarray:
    """``x_m = 2 (m-1) T / (M-1) - T`` for ``m = 1..M``; a single point sits at 0."""
    if num_points < 1:
        raise ConfigurationError("need at least one stimulus point")
    if half_range <= 0:
        raise ConfigurationError("half_range must be positive")
    if num_points == 1:
        return np.zeros(1)
    m = np.arange(num_points)
    return 2.0 * m * half_range / (num_points - 1) - half_range


def integer_points(num_points: int) -> np.ndarray:
    """The object set ``{1, 2, ..., M}`` used with random binary tuning."""
    if num_points < 1:
        raise ConfigurationError("need at least one stimulus point")
    return np.arange(1, num_points + 1, dtype=float)


def centers(num_neurons: int, half_range: float) -> np.ndarray:
    """Tuning centers evenly spaced on ``[-T, T]`` (a lone neuron sits at 0)."""
    if num_neurons < 1:
        raise ConfigurationError("need at least one neuron")
    if half_range <= 0:
        raise ConfigurationError("half_range must be positive")
    return uniform_grid(num_neurons, half_range)


def make_prior(kind: str, points, sigma: float | None = None) -> np.ndarray:
    """Build a prior pmf over ``points``.

    ``kind`` is one of ``"uniform"``, ``"gaussian"`` or ``"half_gaussian"``.
    Both Gaussian kinds use ``exp(-x**2 / (2 sigma**2))`` normalized over the
    points; ``half_gaussian`` is meant for one-sided point sets such as
    ``{1..1000}`` and rejects negative points.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ConfigurationError("priors are built on a nonempty 1-D point set")
    if kind == "uniform":
        return np.full(x.size, 1.0 / x.size)
    if kind not in ("gaussian", "half_gaussian"):
        raise ConfigurationError(f"unknown prior kind {kind!r}")
    if sigma is None or not sigma > 0:
        raise ConfigurationError("sigma must be positive for Gaussian priors")
    if kind == "half_gaussian" and np.any(x < 0):
        raise ConfigurationError("half_gaussian prior needs nonnegative points")
    # shift by the max log-weight so no entry underflows to zero
    logw = -(x**2) / (2.0 * sigma**2)
    w = np.exp(logw - logw.max())
    p = w / w.sum()
    if np.any(p <= 0):
        raise ConfigurationError("prior underflowed to zero; sigma too small for these points")
    return p


def entropy(prior) -> float:
    """Shannon entropy ``-sum p ln p`` in nats."""
    p = np.asarray(prior, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ConfigurationError("entropy needs a valid pmf")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def to_bits(nats):
    return np.asarray(nats) / LN2 if np.ndim(nats) else float(nats) / LN2


def build_heaviside_population(
    num_neurons: int, half_range: float, amplitude: float, space: StimulusSpace
) -> PoissonPopulation:
    theta = centers(num_neurons, half_range)
    tuning = tuple(Heaviside(float(c), amplitude) for c in theta)
    x = _scalar_points(space)
    rates = np.where(x[None, :] >= theta[:, None], float(amplitude), 0.0)
    return PoissonPopulation(rates, space, tuning)


def build_relu_population(num_neurons: int, half_range: float, space: StimulusSpace) -> PoissonPopulation:
    theta = centers(num_neurons, half_range)
    tuning = tuple(RectifiedLinear(float(c)) for c in theta)
    x = _scalar_points(space)
    rates = np.maximum(0.0, x[None, :] - theta[:, None])
    return PoissonPopulation(rates, space, tuning)


def build_random_binary_population(
    num_neurons: int, support_size: int, amplitude: float, space: StimulusSpace, seed: int
) -> PoissonPopulation:
    """Each neuron responds with ``amplitude`` to ``support_size`` random stimuli.

    Neuron ``n`` draws its support from its own generator seeded by
    ``(seed, n)``, so neuron ``n`` gets the same support whatever ``N`` is.
    """
    if num_neurons < 1:
        raise ConfigurationError("need at least one neuron")
    if amplitude < 0:
        raise ConfigurationError("amplitude must be nonnegative")
    M = space.size
    if not 0 <= support_size <= M:
        raise ConfigurationError(f"support size {support_size} must lie in [0, {M}]")
    rates = np.zeros((num_neurons, M))
    tuning = []
    for n in range(num_neurons):
        rng = np.random.default_rng([seed, n])
        support = rng.choice(M, size=support_size, replace=False)
        tuning.append(RandomBinary(tuple(int(i) for i in support), amplitude))
        rates[n, support] = amplitude
    return PoissonPopulation(rates, space, tuple(tuning))


def population_from_rates(rates: Sequence[Sequence[float]], prior) -> PoissonPopulation:
    """Wrap an explicit rate matrix; stimulus points are the indices ``0..M-1``."""
    rates = np.asarray(rates, dtype=float)
    if rates.ndim != 2:
        raise ConfigurationError("rates must be 2-D (neurons x stimuli)")
    space = StimulusSpace(np.arange(rates.shape[1], dtype=float), prior)
    return PoissonPopulation(rates, space)


def _scalar_points(space: StimulusSpace) -> np.ndarray:
    if space.points.ndim != 1:
        raise ConfigurationError("this tuning function needs scalar stimuli")
    return space.points
