"""Tests for the experiment driver: aggregation, rate fitting, presets, CSV.

The aggregation oracle reruns every seed individually through the
single-run entry point and recomputes mean and standard error with
explicit two-pass arithmetic.  Rate fitting is checked on synthetic
curves whose log-log slope is known in closed form, with an explicit
least-squares oracle for the curved case.
"""

import math

import numpy as np
import pytest

from tdclab.errors import (
    InsufficientData,
    InvalidArgument,
    NonpositiveError,
    PlanInfeasible,
    UnknownPreset,
)
from tdclab.harness import (
    CSV_HEADER,
    ExperimentConfig,
    RunSeries,
    fit_rate,
    preset,
    read_series,
    run_experiment,
    write_series,
)
from tdclab.mdp import generate_garnet, save_instance
from tdclab.operators import build_problem_data
from tdclab.rng import split_seed
from tdclab.tdc import Diminishing, make_record_grid, run_tdc


GARNET = {"n_states": 10, "n_actions": 2, "branching": 3, "n_features": 4,
          "seed": 3}


def tiny_config(**overrides):
    base = dict(
        instance={"garnet": dict(GARNET)},
        schedule={"kind": "diminishing", "c_alpha": 0.4, "c_beta": 0.4,
                  "sigma": 0.5, "nu": 0.33},
        steps=500,
        runs=5,
        base_seed=77,
        record_grid={"kind": "every", "every": 100},
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# aggregation

def test_run_experiment_matches_single_run_aggregation_oracle():
    config = tiny_config()
    agg = run_experiment(config)

    mdp, policies, features = generate_garnet(
        GARNET["n_states"], GARNET["n_actions"], GARNET["branching"],
        GARNET["n_features"], GARNET["seed"])
    problem = build_problem_data(mdp, policies, features, with_mixing=False)
    schedule = Diminishing(0.4, 0.4, 0.5, 0.33)
    grid = make_record_grid(500, kind="every", every=100)
    singles = [run_tdc(mdp, policies, features, problem, schedule, 500,
                       split_seed(77, i), grid) for i in range(5)]

    theta = np.stack([s.theta_sq_err for s in singles])
    z = np.stack([s.z_sq_err for s in singles])
    n = theta.shape[0]
    mean_t = theta.sum(axis=0) / n
    mean_z = z.sum(axis=0) / n
    se_t = np.sqrt(((theta - mean_t) ** 2).sum(axis=0) / (n - 1)) / math.sqrt(n)
    se_z = np.sqrt(((z - mean_z) ** 2).sum(axis=0) / (n - 1)) / math.sqrt(n)

    assert np.array_equal(agg.checkpoints, grid)
    assert np.allclose(agg.mean_theta_sq_err, mean_t, rtol=1e-12, atol=0.0)
    assert np.allclose(agg.mean_z_sq_err, mean_z, rtol=1e-12, atol=0.0)
    assert np.allclose(agg.se_theta_sq_err, se_t, rtol=1e-12, atol=1e-300)
    assert np.allclose(agg.se_z_sq_err, se_z, rtol=1e-12, atol=1e-300)
    assert agg.runs == 5
    assert agg.block_boundaries is None


def test_run_experiment_single_run_has_zero_standard_error():
    agg = run_experiment(tiny_config(runs=1, steps=200))
    assert np.all(agg.se_theta_sq_err == 0.0)
    assert np.all(agg.se_z_sq_err == 0.0)


def test_run_experiment_is_deterministic():
    a = run_experiment(tiny_config(steps=300))
    b = run_experiment(tiny_config(steps=300))
    assert np.array_equal(a.mean_theta_sq_err, b.mean_theta_sq_err)
    assert np.array_equal(a.se_z_sq_err, b.se_z_sq_err)


def test_run_experiment_from_saved_instance_file(tmp_path):
    mdp, policies, features = generate_garnet(
        GARNET["n_states"], GARNET["n_actions"], GARNET["branching"],
        GARNET["n_features"], GARNET["seed"])
    path = tmp_path / "instance.json"
    save_instance(path, mdp, policies, features)
    from_file = run_experiment(tiny_config(
        instance={"file": str(path)}, steps=300))
    from_params = run_experiment(tiny_config(steps=300))
    assert np.array_equal(from_file.mean_theta_sq_err,
                          from_params.mean_theta_sq_err)
    assert np.array_equal(from_file.mean_z_sq_err, from_params.mean_z_sq_err)


def test_run_experiment_explicit_blockwise_blocks():
    config = tiny_config(
        schedule={"kind": "blockwise",
                  "blocks": [[0.1, 0.05, 50], [0.05, 0.025, 100]]},
        steps=500, runs=2)
    agg = run_experiment(config)
    assert np.array_equal(agg.block_boundaries, [50, 150])
    # The run stops at the plan's horizon, and every block end is a
    # checkpoint even when the requested grid would skip it.
    assert agg.checkpoints[-1] == 150
    assert set(agg.block_boundaries) <= set(agg.checkpoints.tolist())


def test_run_experiment_blockwise_over_budget():
    config = tiny_config(
        schedule={"kind": "blockwise",
                  "blocks": [[0.1, 0.05, 50], [0.05, 0.025, 100]]},
        steps=149, runs=2)
    with pytest.raises(PlanInfeasible):
        run_experiment(config)


# ---------------------------------------------------------------------------
# rate fitting

def synthetic_series(t, mean_theta, mean_z=None):
    t = np.asarray(t, dtype=np.int64)
    mean_theta = np.asarray(mean_theta, dtype=np.float64)
    if mean_z is None:
        mean_z = np.full_like(mean_theta, 0.25)
    zeros = np.zeros_like(mean_theta)
    return RunSeries(checkpoints=t, mean_theta_sq_err=mean_theta,
                     se_theta_sq_err=zeros, mean_z_sq_err=mean_z,
                     se_z_sq_err=zeros, runs=3)


def test_fit_rate_recovers_exact_power_law():
    t = np.array([0, 1, 2, 4, 8, 16, 32, 64, 128, 256])
    series = synthetic_series(t, np.where(t > 0, t.astype(float), 1.0) ** (-2.0 / 3.0))
    slope, intercept, r2 = fit_rate(series, tail_fraction=1.0)
    assert slope == pytest.approx(-2.0 / 3.0, abs=1e-12)
    assert intercept == pytest.approx(0.0, abs=1e-12)
    assert r2 == 1.0


def test_fit_rate_flat_curve_has_zero_slope_and_unit_r2():
    t = np.array([1, 2, 4, 8, 16, 32])
    series = synthetic_series(t, np.full(6, 0.5))
    slope, _, r2 = fit_rate(series, tail_fraction=1.0)
    assert slope == pytest.approx(0.0, abs=1e-12)
    assert r2 == 1.0


def test_fit_rate_logarithmic_drag_matches_least_squares_oracle():
    # mean = ln(t) / t^{2/3} on a geometric grid over [1e3, 1e6]: the
    # log factor drags the fitted slope above -2/3 but the curve still
    # fits tightly.  The oracle is the closed-form least-squares slope.
    t = [1000]
    while t[-1] < 10 ** 6:
        t.append(max(t[-1] + 1, int(t[-1] * 1.05)))
    t = np.array(t)
    y = np.log(t) / t ** (2.0 / 3.0)
    series = synthetic_series(t, y)
    slope, _, r2 = fit_rate(series, tail_fraction=1.0)

    x, ln_y = np.log(t.astype(float)), np.log(y)
    sxx = float(np.sum((x - x.mean()) ** 2))
    sxy = float(np.sum((x - x.mean()) * (ln_y - ln_y.mean())))
    assert slope == pytest.approx(sxy / sxx, rel=1e-10)
    assert -0.67 < slope < -0.55
    assert r2 > 0.999


def test_fit_rate_tail_fraction_and_channel_selection():
    t = np.array([1, 2, 4, 8, 16, 32, 64, 128, 256, 512])
    theta = t.astype(float) ** -0.25
    z = t.astype(float) ** -0.75
    series = synthetic_series(t, theta, mean_z=z)
    slope_z, _, _ = fit_rate(series, tail_fraction=1.0, which="z")
    assert slope_z == pytest.approx(-0.75, abs=1e-12)
    # A half tail of a pure power law fits the same slope.
    slope_half, _, _ = fit_rate(series, tail_fraction=0.5)
    assert slope_half == pytest.approx(-0.25, abs=1e-12)


def test_fit_rate_rejections():
    t = np.array([0, 1, 2, 4, 8, 16, 32, 64, 128, 256])
    series = synthetic_series(t, np.where(t > 0, t.astype(float), 1.0) ** -0.5)
    with pytest.raises(InvalidArgument):
        fit_rate(series, tail_fraction=0.0)
    with pytest.raises(InvalidArgument):
        fit_rate(series, tail_fraction=1.5)
    with pytest.raises(InvalidArgument):
        fit_rate(series, which="w")
    with pytest.raises(InsufficientData):
        # Nine positive checkpoints, a 0.4 tail keeps only four.
        fit_rate(series, tail_fraction=0.4)
    flat_zero = synthetic_series(np.array([1, 2, 4, 8, 16, 32]),
                                 np.zeros(6))
    with pytest.raises(NonpositiveError):
        fit_rate(flat_zero, tail_fraction=1.0)


# ---------------------------------------------------------------------------
# presets

def test_preset_diminishing_family_layout():
    configs = preset("fig1a")
    assert len(configs) == 6
    sigmas = {c.schedule["sigma"] for c in configs}
    assert sigmas == {0.15}
    assert all(c.schedule["c_alpha"] == 0.03 for c in configs)
    nus = [c.schedule["nu"] for c in configs]
    assert nus == sorted(nus)
    assert nus[-1] == pytest.approx(0.15)          # nu = sigma endpoint
    assert nus[3] == pytest.approx(0.15 * 2 / 3)   # the critical ratio
    assert len({c.label for c in configs}) == 6
    # One shared instance and seed so curves are run-for-run comparable.
    assert len({c.instance["garnet"]["seed"] for c in configs}) == 1
    assert len({c.base_seed for c in configs}) == 1
    assert all(c.steps == 200_000 and c.runs == 100 for c in configs)

    stronger = preset("fig1d")
    assert all(c.schedule["sigma"] == 0.60 for c in stronger)
    assert all(c.schedule["c_alpha"] == 4.0 for c in stronger)


def test_preset_constant_comparison_layout():
    configs = preset("fig2")
    assert len(configs) == 5
    assert configs[0].schedule == {"kind": "diminishing", "c_alpha": 1.8,
                                   "c_beta": 1.8, "sigma": 0.45, "nu": 0.30}
    pairs = [(c.schedule["alpha"], c.schedule["beta"]) for c in configs[1:]]
    assert pairs == [(0.01, 0.006), (0.02, 0.008), (0.05, 0.02), (0.1, 0.02)]
    assert all(c.instance == configs[0].instance for c in configs)


def test_preset_blockwise_comparison_layout():
    configs = preset("fig3")
    assert len(configs) == 3
    block = configs[0].schedule
    assert block["kind"] == "blockwise"
    assert block["eps_target_ratio"] == 2.0 ** -8
    assert block["eta"] == "auto" and block["c7"] == "auto"
    assert block["lambda_x"] == "auto"
    assert configs[1].schedule["kind"] == "diminishing"
    assert configs[2].schedule == {"kind": "constant", "alpha": 0.1,
                                   "beta": 0.02}


def test_preset_scaling():
    full = preset("fig2", scale=1.0)[0]
    assert full.instance["garnet"]["n_states"] == 500
    assert full.instance["garnet"]["n_actions"] == 20
    assert full.instance["garnet"]["branching"] == 50
    assert full.instance["garnet"]["n_features"] == 20
    assert full.runs == 500 and full.steps == 500_000

    small = preset("fig2", scale=0.004)[0]
    assert small.instance["garnet"]["n_states"] == 2
    assert small.instance["garnet"]["branching"] == 2   # clipped to n_states
    assert small.instance["garnet"]["n_features"] == 2
    assert small.runs == 2 and small.steps == 2000

    floor = preset("fig2", scale=0.001)[0]
    assert floor.instance["garnet"]["n_states"] == 2    # state floor
    assert floor.runs == 1                              # run floor
    assert floor.steps == 1000                          # horizon floor

    with pytest.raises(UnknownPreset):
        preset("fig9")
    with pytest.raises(InvalidArgument):
        preset("fig2", scale=0.0)
    with pytest.raises(InvalidArgument):
        preset("fig2", scale=1.5)


# ---------------------------------------------------------------------------
# config and CSV

def test_experiment_config_validation():
    with pytest.raises(InvalidArgument):
        tiny_config(steps=0)
    with pytest.raises(InvalidArgument):
        tiny_config(runs=0)
    with pytest.raises(InvalidArgument):
        tiny_config(instance={})
    with pytest.raises(InvalidArgument):
        tiny_config(instance={"garnet": dict(GARNET), "file": "x.json"})
    with pytest.raises(InvalidArgument):
        tiny_config(schedule={"kind": "warp"})
    with pytest.raises(InvalidArgument):
        tiny_config(record_grid={"kind": "sometimes"})


def test_experiment_config_json_round_trip():
    config = tiny_config(label="smoke", out="curve.csv")
    text = config.to_json()
    assert "\n" not in text
    assert ExperimentConfig.from_json(text) == config


def test_csv_round_trip_preserves_everything(tmp_path):
    config = tiny_config(
        schedule={"kind": "blockwise",
                  "blocks": [[0.1, 0.05, 50], [0.05, 0.025, 100]]},
        steps=500, runs=3, label="round trip")
    series = run_experiment(config)
    path = tmp_path / "curve.csv"
    write_series(path, series, config)

    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "# blocks: 50,150"
    assert lines[2] == CSV_HEADER

    back, back_config = read_series(path)
    assert back_config == config
    assert np.array_equal(back.checkpoints, series.checkpoints)
    # repr round-trips doubles exactly.
    assert np.array_equal(back.mean_theta_sq_err, series.mean_theta_sq_err)
    assert np.array_equal(back.se_theta_sq_err, series.se_theta_sq_err)
    assert np.array_equal(back.mean_z_sq_err, series.mean_z_sq_err)
    assert np.array_equal(back.se_z_sq_err, series.se_z_sq_err)
    assert np.array_equal(back.block_boundaries, series.block_boundaries)
    assert back.runs == 3


def test_read_series_names_the_offending_line(tmp_path):
    config = tiny_config(steps=200, runs=1)
    series = run_experiment(config)
    good = tmp_path / "good.csv"
    write_series(good, series, config)
    lines = good.read_text().splitlines()

    bad_header = tmp_path / "bad_header.csv"
    bad_header.write_text("\n".join([lines[0], "t,oops", *lines[2:]]) + "\n")
    with pytest.raises(InvalidArgument, match=r"bad_header\.csv:2"):
        read_series(bad_header)

    short_row = tmp_path / "short_row.csv"
    short_row.write_text("\n".join([*lines[:3], "42,0.5,0.1"]) + "\n")
    with pytest.raises(InvalidArgument, match=r"short_row\.csv:4.*5 fields"):
        read_series(short_row)

    bad_float = tmp_path / "bad_float.csv"
    bad_float.write_text("\n".join([*lines[:3], "42,a,b,c,d"]) + "\n")
    with pytest.raises(InvalidArgument, match=r"bad_float\.csv:4"):
        read_series(bad_float)

    no_config = tmp_path / "no_config.csv"
    no_config.write_text("\n".join(lines[1:]) + "\n")
    with pytest.raises(InvalidArgument, match="missing '# config:'"):
        read_series(no_config)

    no_rows = tmp_path / "no_rows.csv"
    no_rows.write_text("\n".join(lines[:2]) + "\n")
    with pytest.raises(InvalidArgument, match="no data rows"):
        read_series(no_rows)


def test_run_series_validation():
    t = np.array([1, 2, 3])
    ones = np.ones(3)
    with pytest.raises(InvalidArgument):
        RunSeries(checkpoints=t, mean_theta_sq_err=np.ones(2),
                  se_theta_sq_err=ones, mean_z_sq_err=ones,
                  se_z_sq_err=ones, runs=1)
    with pytest.raises(InvalidArgument):
        RunSeries(checkpoints=t, mean_theta_sq_err=-ones,
                  se_theta_sq_err=ones, mean_z_sq_err=ones,
                  se_z_sq_err=ones, runs=1)
    with pytest.raises(InvalidArgument):
        RunSeries(checkpoints=t, mean_theta_sq_err=ones * np.nan,
                  se_theta_sq_err=ones, mean_z_sq_err=ones,
                  se_z_sq_err=ones, runs=1)
    with pytest.raises(InvalidArgument):
        RunSeries(checkpoints=t, mean_theta_sq_err=ones,
                  se_theta_sq_err=ones, mean_z_sq_err=ones,
                  se_z_sq_err=ones, runs=0)
