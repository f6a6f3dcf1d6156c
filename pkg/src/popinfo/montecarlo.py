"""Reference values for the mutual information of a Poisson population.

Two routes: a Monte-Carlo estimate with a bootstrap standard deviation, usable
at any scale, and an exact enumeration over a truncated response space for
populations of at most three neurons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import special, stats

from .divergence import poisson_support
from .errors import ConfigurationError, InstanceTooLargeError, UndefinedRelativeError
from .stimulus import PoissonPopulation

# stream tags mixed into the seed so sampling and bootstrap never share draws
_SAMPLE_STREAM = 0
_BOOTSTRAP_STREAM = 1

# ln(0) stand-in; any response with r > 0 on a silent neuron lands far below
# every admissible component and is then mapped to -inf
_LOG_ZERO = -1e12
_NEG_INF_CUTOFF = -1e11


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo settings.

    ``block_size`` fixes how samples are grouped into independently seeded
    substreams; changing it changes the draws, changing anything else
    (threads, machine) does not.
    """

    j_max: int = 100_000
    i_max: int = 100
    seed: int = 0
    block_size: int = 4096

    def __post_init__(self):
        if self.j_max < 1 or self.i_max < 1:
            raise ConfigurationError("j_max and i_max must be at least 1")
        if self.block_size < 1:
            raise ConfigurationError("block_size must be at least 1")
        if self.seed < 0:
            raise ConfigurationError("seed must be nonnegative")


FULL_SCALE_MC = McConfig(j_max=500_000, i_max=100)


@dataclass(frozen=True)
class McEstimate:
    i_mc_star: float
    i_mc: float
    i_std: float
    terms: np.ndarray = field(repr=False)
    replicate_means: np.ndarray = field(repr=False)
    seed: int = 0

    @property
    def j_max(self) -> int:
        return self.terms.size

    @property
    def i_max(self) -> int:
        return self.replicate_means.size

    def to_dict(self) -> dict:
        return {
            "I_MC_star": self.i_mc_star,
            "I_MC": self.i_mc,
            "I_std": self.i_std,
            "j_max": self.j_max,
            "i_max": self.i_max,
            "seed": self.seed,
        }


class ExactMI(NamedTuple):
    value: float
    tail_bound: float


def _generator(seed: int, *stream) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def log_likelihoods(responses: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """``ln p(r_j | x_m)`` up to the stimulus-independent ``-sum ln r!`` term.

    ``responses`` is ``(J, N)``, ``rates`` is ``(N, M)``; returns ``(J, M)``.
    Components that put zero rate on a neuron with a positive count are -inf.
    """
    with np.errstate(divide="ignore"):
        logs = np.log(rates)
    logs = np.where(rates > 0, logs, _LOG_ZERO)
    ll = responses @ logs - rates.sum(axis=0)
    return np.where(ll < _NEG_INF_CUTOFF, -np.inf, ll)


def sample_information_terms(pop: PoissonPopulation, prior=None, cfg: McConfig = McConfig()) -> np.ndarray:
    """Per-sample terms ``ln p(r_j | x_j) - ln p(r_j)`` for ``j = 1..j_max``.

    Sample ``j`` lives in block ``j // block_size``; each block draws its
    stimuli and responses from a generator keyed by ``(seed, block)``.
    """
    rates = pop.rates
    p = np.asarray(pop.prior if prior is None else prior, dtype=float)
    if p.shape != (pop.num_stimuli,):
        raise ConfigurationError("prior size does not match the population")
    logp = np.log(p)
    out = np.empty(cfg.j_max)
    for b, start in enumerate(range(0, cfg.j_max, cfg.block_size)):
        stop = min(start + cfg.block_size, cfg.j_max)
        rng = _generator(cfg.seed, _SAMPLE_STREAM, b)
        x = rng.choice(pop.num_stimuli, size=stop - start, p=p)
        r = rng.poisson(rates[:, x].T).astype(float)
        ll = log_likelihoods(r, rates)
        # log-ratios against the sampled stimulus; its own entry is exactly 0,
        # which keeps t_j accurate to rounding when the mixture is dominated by it
        own = ll[np.arange(stop - start), x]
        out[start:stop] = -special.logsumexp(ll - own[:, None] + logp, axis=1)
    return out


def bootstrap(terms: np.ndarray, i_max: int, seed: int = 0):
    """Replicate means of ``terms`` resampled with replacement, one replicate at a time."""
    terms = np.asarray(terms, dtype=float)
    rng = _generator(seed, _BOOTSTRAP_STREAM)
    reps = np.empty(i_max)
    for i in range(i_max):
        reps[i] = terms[rng.integers(0, terms.size, size=terms.size)].mean()
    return reps


def estimate_from_terms(terms, i_max: int = 100, seed: int = 0) -> McEstimate:
    terms = np.asarray(terms, dtype=float)
    reps = bootstrap(terms, i_max, seed)
    return McEstimate(
        i_mc_star=float(terms.mean()),
        i_mc=float(reps.mean()),
        i_std=float(reps.std()),
        terms=terms,
        replicate_means=reps,
        seed=seed,
    )


def estimate(pop: PoissonPopulation, prior=None, cfg: McConfig = McConfig()) -> McEstimate:
    terms = sample_information_terms(pop, prior, cfg)
    return estimate_from_terms(terms, cfg.i_max, cfg.seed)


def exact_mi(
    pop: PoissonPopulation,
    prior=None,
    tail_tol: float = 1e-14,
    max_neurons: int = 3,
    max_support: int = 64,
) -> ExactMI:
    """Mutual information by summing over a truncated response space.

    Each neuron's counts run up to the point where the Poisson tail of its
    largest rate drops below ``tail_tol``.  ``tail_bound`` is the total
    probability mass left out, summed over neurons.
    """
    rates = pop.rates
    N, M = rates.shape
    p = np.asarray(pop.prior if prior is None else prior, dtype=float)
    supports = [poisson_support(float(rates[n].max()), tail_tol) for n in range(N)]
    sizes = [s.size for s in supports]
    if N > max_neurons or max(sizes) > max_support:
        raise InstanceTooLargeError(
            f"enumeration refused: {N} neurons (limit {max_neurons}), "
            f"per-neuron supports {sizes} (limit {max_support})"
        )
    # log p(r | x_m) on the product grid, shape (M, S_1, ..., S_N)
    logpmf = np.zeros((M,) + tuple(sizes))
    for n, r in enumerate(supports):
        shape = [1] * (N + 1)
        shape[0], shape[n + 1] = M, r.size
        logpmf = logpmf + stats.poisson.logpmf(r[None, :], rates[n][:, None]).reshape(shape)
    flat = logpmf.reshape(M, -1)
    log_marg = special.logsumexp(flat + np.log(p)[:, None], axis=0)
    cond = np.exp(flat)
    with np.errstate(invalid="ignore"):
        pointwise = np.where(cond > 0, cond * (flat - log_marg[None, :]), 0.0)
    value = float(np.dot(p, pointwise.sum(axis=1)))
    tail = float(sum(stats.poisson.sf(r[-1], rates[n].max()) for n, r in enumerate(supports)))
    return ExactMI(value, tail)


def relative_error(metric_value: float, mc: McEstimate):
    """``(DI, DI_std) = ((metric - I_MC) / I_MC, I_std / I_MC)``."""
    if mc.i_mc == 0:
        raise UndefinedRelativeError("relative error is undefined when I_MC = 0")
    return (metric_value - mc.i_mc) / mc.i_mc, mc.i_std / mc.i_mc
