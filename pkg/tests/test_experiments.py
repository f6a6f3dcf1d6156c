import csv
import io
import json
import math

import numpy as np
import pytest

from popinfo.cli import main
from popinfo.divergence import DivergenceMatrix, kl_matrix
from popinfo.errors import ConfigurationError
from popinfo.experiments import (
    N_SWEEP,
    ExperimentConfig,
    load_config,
    presets,
    run_experiment,
    run_oracle,
)

FIG1 = presets()["fig1"]


def quick(config, n_values=(1, 3, 10), j_max=2000, i_max=20, **changes):
    return config.replace(n_values=list(n_values), mc={"j_max": j_max, "i_max": i_max}, **changes)


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


# -- config ---------------------------------------------------------------------


def test_fig1_preset_is_the_default_heaviside_setup():
    cfg = load_config("fig1")
    assert cfg.model == {"kind": "heaviside", "amplitude": 10.0, "half_range": 10.0}
    assert cfg.stimulus["num_points"] == 21
    assert cfg.n_values == list(N_SWEEP)
    assert cfg.mc.j_max == 100_000 and cfg.mc.i_max == 100


def test_fig1_and_fig2_differ_only_in_prior():
    a, b = presets()["fig1"].to_dict(), presets()["fig2"].to_dict()
    diff = {k for k in a if a[k] != b[k]}
    assert diff == {"prior", "name"}
    assert b["prior"] == {"kind": "gaussian", "sigma": 5.0}


def test_fig2_prior_peaks_at_zero():
    space = presets()["fig2"].space()
    assert space.points[np.argmax(space.prior)] == 0.0


@pytest.mark.parametrize("N", [1, 7, 100])
def test_fig5_population_has_ten_entries_per_neuron(N):
    pop = presets()["fig5"].population(N)
    assert np.count_nonzero(pop.rates) == 10 * N
    assert pop.num_stimuli == 1000


def test_fig6_prior_is_half_gaussian():
    p = presets()["fig6"].space().prior
    assert np.all(np.diff(p) < 0)


def test_json_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(FIG1.to_dict()))
    assert load_config(str(path)).to_dict() == FIG1.to_dict()


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.update(colour="blue"), "colour"),
        (lambda d: d["model"].update(amplitud=3), "amplitud"),
        (lambda d: d["mc"].update(jmax=10), "jmax"),
        (lambda d: d.update(n_values=[1, 3, 3]), "strictly increasing"),
        (lambda d: d.update(n_values=[0, 1]), ">= 1"),
        (lambda d: d.update(metrics=["I_e", "I_q"]), "I_q"),
        (lambda d: d.update(beta=1.0), "beta"),
        (lambda d: d["prior"].update(kind="cauchy"), "cauchy"),
        (lambda d: d.pop("model"), "model"),
    ],
)
def test_invalid_configs_are_rejected(mutate, message):
    data = FIG1.to_dict()
    mutate(data)
    with pytest.raises(ConfigurationError, match=message):
        ExperimentConfig.from_dict(data)


def test_malformed_json_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_json("{not json")


def test_unknown_source_is_reported():
    with pytest.raises(ConfigurationError, match="preset"):
        load_config("fig9")


def test_explicit_points_config():
    cfg = ExperimentConfig.from_dict(
        {
            "model": {"kind": "relu", "half_range": 2.0},
            "stimulus": {"kind": "explicit", "points": [-1.0, 0.0, 2.0]},
            "prior": {"kind": "uniform"},
            "n_values": [2],
        }
    )
    np.testing.assert_array_equal(cfg.population(2).rates, [[1.0, 2.0, 4.0], [0.0, 0.0, 0.0]])


# -- runs -----------------------------------------------------------------------


def test_run_columns_and_consistency():
    result = run_experiment(quick(FIG1))
    assert result.columns[:5] == ["N", "I_MC_nats", "I_MC_bits", "I_std_nats", "DI_std"]
    assert "DI_I_e" in result.columns and "I_e_bits" in result.columns
    for row in result.rows:
        r = dict(zip(result.columns, row))
        assert r["I_MC_bits"] == pytest.approx(r["I_MC_nats"] / math.log(2), rel=1e-15)
        assert r["DI_std"] == pytest.approx(r["I_std_nats"] / r["I_MC_nats"], rel=1e-12)
        for name in FIG1.metrics:
            expected = (r[f"{name}_nats"] - r["I_MC_nats"]) / r["I_MC_nats"]
            assert abs(r[f"DI_{name}"] - expected) <= 1e-12


def test_csv_values_round_trip_exactly():
    result = run_experiment(quick(FIG1, n_values=(2, 5)))
    header, rows = read_csv(result.to_csv())
    assert header == result.columns
    for parsed, row in zip(rows, result.rows):
        assert int(parsed[0]) == row[0]
        assert [float(v) for v in parsed[1:]] == [float(v) for v in row[1:]]
        assert not any(v in ("inf", "nan", "-inf") for v in parsed)


def test_rerun_is_byte_identical():
    cfg = quick(presets()["fig6"], n_values=(1, 4, 20))
    assert run_experiment(cfg).to_csv() == run_experiment(cfg).to_csv()


def test_seed_changes_the_monte_carlo_columns():
    a = run_experiment(quick(FIG1, n_values=(3,)))
    b = run_experiment(quick(FIG1, n_values=(3,)).replace(mc={"seed": 1}))
    assert a.row_for(3)["I_MC_nats"] != b.row_for(3)["I_MC_nats"]
    assert a.row_for(3)["I_e_nats"] == b.row_for(3)["I_e_nats"]


def test_empty_metric_list_leaves_only_mc_columns():
    result = run_experiment(quick(FIG1, metrics=[]))
    assert result.columns == ["N", "I_MC_nats", "I_MC_bits", "I_std_nats", "DI_std"]


def test_metrics_only_run():
    result = run_experiment(FIG1.replace(n_values=[1, 10]), monte_carlo=False)
    assert "I_MC_nats" not in result.columns
    assert result.row_for(1)["I_e_nats"] == result.row_for(1)["I_d_nats"]


def test_metadata_echoes_config_and_seeds():
    result = run_experiment(quick(FIG1, n_values=(1, 2)))
    meta = json.loads(result.to_json())
    assert meta["config"] == quick(FIG1, n_values=(1, 2)).to_dict()
    assert [run["seed"] for run in meta["runs"]] == [FIG1.mc_seed(1), FIG1.mc_seed(2)]


def test_oracle_run_on_a_tiny_config():
    cfg = FIG1.replace(n_values=[1, 2])
    result = run_oracle(cfg)
    assert result.columns == ["N", "I_exact_nats", "I_exact_bits", "tail_bound"]
    assert 0 < result.row_for(1)["I_exact_nats"] <= math.log(2) + 1e-12


# -- CLI ------------------------------------------------------------------------


def test_cli_metrics_to_stdout(capsys):
    assert main(["metrics", "fig3", "--n", "1", "2"]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header[0] == "N" and [r[0] for r in rows] == ["1", "2"]


def test_cli_run_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "res" / "fig1.csv"
    code = main(["run", "fig1", "--n", "2", "--jmax", "1000", "--imax", "5", "--seed", "3", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out.read_text())
    assert header[1] == "I_MC_nats" and len(rows) == 1
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["config"]["mc"] == {"j_max": 1000, "i_max": 5, "seed": 3}


def test_cli_oracle_refuses_large_sweeps(capsys):
    assert main(["oracle", "fig1", "--n", "4"]) == 2
    assert "enumeration refused" in capsys.readouterr().err


def test_cli_divergence_dump(tmp_path):
    out = tmp_path / "kl.csv"
    assert main(["divergence", "fig1", "--n", "1", "--out", str(out)]) == 0
    mat = DivergenceMatrix.from_csv(out.read_text(), kind="kl")
    np.testing.assert_array_equal(mat.values, kl_matrix(FIG1.population(1)).values)
    assert np.isinf(mat.values).any()


def test_cli_bad_config_exits_with_code_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**FIG1.to_dict(), "extra": 1}))
    assert main(["metrics", str(path)]) == 2
    assert "extra" in capsys.readouterr().err


def test_full_scale_flag_sets_the_large_sample_count():
    from argparse import Namespace

    from popinfo.cli import _apply_overrides

    args = Namespace(seed=None, jmax=None, imax=None, full_scale=True, n=[1])
    cfg = _apply_overrides(FIG1, args)
    assert cfg.mc.j_max == 500_000 and cfg.n_values == [1]
