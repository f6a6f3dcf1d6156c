"""Config-driven sweeps over population size.

A config is one JSON document; unknown keys are rejected.  Example::

    {
      "name": "fig1",
      "model": {"kind": "heaviside", "amplitude": 10, "half_range": 10},
      "stimulus": {"kind": "grid", "num_points": 21, "half_range": 10},
      "prior": {"kind": "uniform"},
      "n_values": [1, 2, 3, 10, 100, 1000],
      "metrics": ["I_e", "I_d", "I_D"],
      "beta": 0.5, "alpha": 1.0,
      "mc": {"j_max": 100000, "i_max": 100, "seed": 0},
      "seed": 0,
      "output": {"csv": "fig1.csv", "json": "fig1.json"}
    }

``model.kind`` is ``heaviside`` (amplitude, half_range), ``relu``
(half_range) or ``random_binary`` (support_size, amplitude).
``stimulus.kind`` is ``grid`` (num_points, half_range), ``integers``
(num_points; points 1..M) or ``explicit`` (points).
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError, UndefinedRelativeError
from .metrics import METRIC_NAMES, compute_metrics
from .montecarlo import McConfig, estimate, exact_mi, relative_error
from .stimulus import (
    LN2,
    StimulusSpace,
    build_heaviside_population,
    build_random_binary_population,
    build_relu_population,
    integer_points,
    make_prior,
    uniform_grid,
)

N_SWEEP = (1, 2, 3, 4, 6, 10, 14, 20, 30, 50, 100, 200, 400, 700, 1000)
DEFAULT_METRICS = ("I_u", "I_e", "I_d", "I_D", "I_D0", "I_beta_alpha", "H_X")

_TOP_KEYS = {"name", "model", "stimulus", "prior", "n_values", "metrics", "beta", "alpha", "mc", "seed", "output"}
_MODEL_KEYS = {
    "heaviside": {"kind", "amplitude", "half_range"},
    "relu": {"kind", "half_range"},
    "random_binary": {"kind", "support_size", "amplitude"},
}
_STIMULUS_KEYS = {
    "grid": {"kind", "num_points", "half_range"},
    "integers": {"kind", "num_points"},
    "explicit": {"kind", "points"},
}
_PRIOR_KEYS = {"uniform": {"kind"}, "gaussian": {"kind", "sigma"}, "half_gaussian": {"kind", "sigma"}}
_MC_KEYS = {"j_max", "i_max", "seed"}
_OUTPUT_KEYS = {"csv", "json"}


def _check_keys(section: str, given: dict, allowed: set, required: set = frozenset()):
    if not isinstance(given, dict):
        raise ConfigurationError(f"{section} must be an object")
    extra = set(given) - allowed
    if extra:
        raise ConfigurationError(f"unknown keys in {section}: {sorted(extra)}")
    missing = set(required) - set(given)
    if missing:
        raise ConfigurationError(f"missing keys in {section}: {sorted(missing)}")


def _kinded(section: str, given: dict, table: dict) -> str:
    kind = given.get("kind") if isinstance(given, dict) else None
    if kind not in table:
        raise ConfigurationError(f"{section}.kind must be one of {sorted(table)}, got {kind!r}")
    _check_keys(section, given, table[kind], table[kind])
    return kind


@dataclass
class ExperimentConfig:
    model: dict
    stimulus: dict
    prior: dict
    n_values: list
    metrics: list = field(default_factory=lambda: list(DEFAULT_METRICS))
    beta: float = 0.5
    alpha: float = 1.0
    mc: McConfig = field(default_factory=McConfig)
    seed: int = 0
    name: str = "custom"
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        _kinded("model", self.model, _MODEL_KEYS)
        _kinded("stimulus", self.stimulus, _STIMULUS_KEYS)
        _kinded("prior", self.prior, _PRIOR_KEYS)
        _check_keys("output", self.output, _OUTPUT_KEYS)
        ns = list(self.n_values)
        if not ns or any(not isinstance(n, int) or n < 1 for n in ns):
            raise ConfigurationError("n_values must be a nonempty list of integers >= 1")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigurationError("n_values must be strictly increasing")
        unknown = [m for m in self.metrics if m not in METRIC_NAMES]
        if unknown:
            raise ConfigurationError(f"unknown metric names: {unknown}")
        if not 0 < self.beta < 1:
            raise ConfigurationError("beta must lie in (0, 1)")
        if not self.alpha > 0:
            raise ConfigurationError("alpha must be positive")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigurationError("seed must be a nonnegative integer")
        # build the stimulus space once to surface prior/point errors early
        self.space()

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        _check_keys("config", data, _TOP_KEYS, {"model", "stimulus", "prior", "n_values"})
        data = copy.deepcopy(data)
        mc = data.pop("mc", {})
        _check_keys("mc", mc, _MC_KEYS)
        return cls(mc=McConfig(**mc), **data)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model": dict(self.model),
            "stimulus": dict(self.stimulus),
            "prior": dict(self.prior),
            "n_values": list(self.n_values),
            "metrics": list(self.metrics),
            "beta": self.beta,
            "alpha": self.alpha,
            "mc": {"j_max": self.mc.j_max, "i_max": self.mc.i_max, "seed": self.mc.seed},
            "seed": self.seed,
            "output": dict(self.output),
        }

    def replace(self, **changes) -> ExperimentConfig:
        data = self.to_dict()
        mc = changes.pop("mc", None)
        data.update(changes)
        if mc is not None:
            data["mc"] = {**data["mc"], **mc}
        return ExperimentConfig.from_dict(data)

    def points(self) -> np.ndarray:
        s = self.stimulus
        if s["kind"] == "grid":
            return uniform_grid(int(s["num_points"]), float(s["half_range"]))
        if s["kind"] == "integers":
            return integer_points(int(s["num_points"]))
        return np.asarray(s["points"], dtype=float)

    def space(self) -> StimulusSpace:
        x = self.points()
        return StimulusSpace(x, make_prior(self.prior["kind"], x, self.prior.get("sigma")))

    def population(self, num_neurons: int, space: StimulusSpace | None = None):
        space = space or self.space()
        m = self.model
        if m["kind"] == "heaviside":
            return build_heaviside_population(num_neurons, float(m["half_range"]), float(m["amplitude"]), space)
        if m["kind"] == "relu":
            return build_relu_population(num_neurons, float(m["half_range"]), space)
        return build_random_binary_population(
            num_neurons, int(m["support_size"]), float(m["amplitude"]), space, self.seed
        )

    def mc_seed(self, num_neurons: int) -> int:
        """Seed of the Monte-Carlo run for one sweep entry, derived from ``(mc.seed, N)``."""
        return int(np.random.SeedSequence([self.mc.seed, num_neurons]).generate_state(1)[0])


def presets() -> dict:
    """Configurations of the six published experiment setups."""
    T = 10.0
    grid = {"kind": "grid", "num_points": 21, "half_range": T}
    objects = {"kind": "integers", "num_points": 1000}
    heaviside = {"kind": "heaviside", "amplitude": 10.0, "half_range": T}
    relu = {"kind": "relu", "half_range": T}
    binary = {"kind": "random_binary", "support_size": 10, "amplitude": 10.0}
    table = {
        "fig1": (heaviside, grid, {"kind": "uniform"}),
        "fig2": (heaviside, grid, {"kind": "gaussian", "sigma": T / 2}),
        "fig3": (relu, grid, {"kind": "uniform"}),
        "fig4": (relu, grid, {"kind": "gaussian", "sigma": T / 2}),
        "fig5": (binary, objects, {"kind": "uniform"}),
        "fig6": (binary, objects, {"kind": "half_gaussian", "sigma": 500.0}),
    }
    return {
        name: ExperimentConfig(
            model=dict(model), stimulus=dict(stim), prior=dict(prior), n_values=list(N_SWEEP), name=name
        )
        for name, (model, stim, prior) in table.items()
    }


def load_config(source: str) -> ExperimentConfig:
    """A preset name or a path to a JSON config."""
    table = presets()
    if source in table:
        return table[source]
    path = Path(source)
    if not path.exists():
        raise ConfigurationError(f"{source!r} is neither a preset ({', '.join(table)}) nor a file")
    return ExperimentConfig.from_json(path.read_text())


@dataclass
class ExperimentResult:
    columns: list
    rows: list
    metadata: dict

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])

    def row_for(self, num_neurons: int) -> dict:
        for row in self.rows:
            if row[0] == num_neurons:
                return dict(zip(self.columns, row))
        raise KeyError(num_neurons)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([v if isinstance(v, int) else repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.metadata, indent=2, sort_keys=True)

    def write(self, csv_path=None, json_path=None):
        if csv_path:
            Path(csv_path).write_text(self.to_csv())
        if json_path:
            Path(json_path).write_text(self.to_json())


def _finite(value: float, what: str, num_neurons: int) -> float:
    if not math.isfinite(value):
        raise ConfigurationError(f"N={num_neurons}: {what} is not finite ({value})")
    return value


def run_experiment(config: ExperimentConfig, monte_carlo: bool = True, progress=None) -> ExperimentResult:
    """Sweep ``config.n_values``; one row per population size.

    With ``monte_carlo`` the columns are ``N, I_MC_nats, I_MC_bits,
    I_std_nats, DI_std`` and then ``<metric>_nats, <metric>_bits,
    DI_<metric>`` per metric; without it only ``N`` and the metric columns.
    """
    config.validate()
    columns = ["N"]
    if monte_carlo:
        columns += ["I_MC_nats", "I_MC_bits", "I_std_nats", "DI_std"]
    for name in config.metrics:
        columns += [f"{name}_nats", f"{name}_bits"] + ([f"DI_{name}"] if monte_carlo else [])

    space = config.space()
    rows, runs = [], []
    for N in config.n_values:
        pop = config.population(N, space)
        report = compute_metrics(pop, config.metrics, beta=config.beta, alpha=config.alpha)
        row = [N]
        run = {"N": N}
        if monte_carlo:
            mc_cfg = McConfig(config.mc.j_max, config.mc.i_max, config.mc_seed(N))
            mc = estimate(pop, cfg=mc_cfg)
            if mc.i_mc == 0:
                raise UndefinedRelativeError(f"N={N}: I_MC is 0, relative errors are undefined")
            di_std = mc.i_std / mc.i_mc
            row += [mc.i_mc, mc.i_mc / LN2, mc.i_std, di_std]
            run.update(mc.to_dict())
        for name in config.metrics:
            v = _finite(report.values[name], name, N)
            row += [v, v / LN2]
            if monte_carlo:
                row.append(_finite(relative_error(v, mc)[0], f"DI_{name}", N))
        rows.append(row)
        runs.append(run)
        if progress:
            progress(N)
    metadata = {
        "config": config.to_dict(),
        "columns": columns,
        "runs": runs,
        "package_version": __version__,
    }
    return ExperimentResult(columns, rows, metadata)


def run_oracle(config: ExperimentConfig, tail_tol: float = 1e-14) -> ExperimentResult:
    """Exact mutual information for each ``N`` (small instances only)."""
    config.validate()
    space = config.space()
    columns = ["N", "I_exact_nats", "I_exact_bits", "tail_bound"]
    rows = []
    for N in config.n_values:
        result = exact_mi(config.population(N, space), tail_tol=tail_tol)
        rows.append([N, result.value, result.value / LN2, result.tail_bound])
    return ExperimentResult(columns, rows, {"config": config.to_dict(), "tail_tol": tail_tol})
