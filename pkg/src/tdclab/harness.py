"""Multi-run experiment driver: seeded batches, aggregation, CSV, presets.

An experiment is a declarative config: where the instance comes from
(generator parameters or a saved file), which stepsize schedule to run,
how many runs and steps, and how to lay out the checkpoint grid.  Run i
of an experiment is seeded with split(base_seed, i), so the batch is
reproducible and the aggregate is independent of scheduling order.  Runs
execute inside the compiled kernel's parallel loop; aggregation happens
afterwards on a single thread.

The CSV format is deliberately plain: a comment line carrying the full
config as canonical JSON, an optional comment line with block boundaries,
a fixed header, then one row per checkpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import blockwise_plan, eta_lower_bound
from .errors import (
    InsufficientData,
    InvalidArgument,
    NonpositiveError,
    PlanInfeasible,
    TdcLabError,
    UnknownPreset,
)
from .mdp import FeatureMap, generate_garnet, load_instance
from .operators import ProblemData, build_problem_data
from .tdc import (
    Blockwise,
    Constant,
    Diminishing,
    make_record_grid,
    run_tdc_many,
)

__all__ = [
    "ExperimentConfig",
    "RunSeries",
    "run_experiment",
    "fit_rate",
    "preset",
    "write_series",
    "read_series",
    "CSV_HEADER",
]

CSV_HEADER = "t,mean_theta_sq_err,se_theta_sq_err,mean_z_sq_err,se_z_sq_err"

_SCHEDULE_KINDS = ("diminishing", "constant", "blockwise")
_GRID_KINDS = ("geometric", "every")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one aggregated error curve.

    instance is either {"garnet": {n_states, n_actions, branching,
    n_features, seed[, gamma]}} or {"file": path}.  schedule is a plain
    dict keyed by "kind"; blockwise schedules carry the planner inputs
    (eps_target or eps_target_ratio, eta, optional c7 / lambda_x
    overrides, or a fully explicit "blocks" list) and are resolved
    against the instance at run time.  record_grid is {"kind":
    "geometric", "ratio": r} or {"kind": "every", "every": k}.
    """

    instance: dict
    schedule: dict
    steps: int
    runs: int
    base_seed: int
    record_grid: dict = field(
        default_factory=lambda: {"kind": "geometric", "ratio": 1.05})
    label: str = ""
    out: str | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidArgument("steps must be at least 1")
        if self.runs < 1:
            raise InvalidArgument("runs must be at least 1")
        if not (isinstance(self.instance, dict)
                and ("garnet" in self.instance) != ("file" in self.instance)):
            raise InvalidArgument(
                'instance must be {"garnet": {...}} or {"file": path}')
        kind = self.schedule.get("kind") if isinstance(self.schedule, dict) else None
        if kind not in _SCHEDULE_KINDS:
            raise InvalidArgument(f"schedule kind must be one of {_SCHEDULE_KINDS}")
        if self.record_grid.get("kind") not in _GRID_KINDS:
            raise InvalidArgument(f"record grid kind must be one of {_GRID_KINDS}")

    def to_json(self) -> str:
        """Canonical single-line form used in the CSV preamble."""
        payload = {
            "instance": self.instance,
            "schedule": self.schedule,
            "steps": self.steps,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "record_grid": self.record_grid,
            "label": self.label,
            "out": self.out,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        raw = json.loads(text)
        return cls(instance=raw["instance"], schedule=raw["schedule"],
                   steps=raw["steps"], runs=raw["runs"],
                   base_seed=raw["base_seed"], record_grid=raw["record_grid"],
                   label=raw.get("label", ""), out=raw.get("out"))


@dataclass(frozen=True)
class RunSeries:
    """Aggregated training and tracking error curves for one experiment."""

    checkpoints: np.ndarray
    mean_theta_sq_err: np.ndarray
    se_theta_sq_err: np.ndarray
    mean_z_sq_err: np.ndarray
    se_z_sq_err: np.ndarray
    runs: int
    block_boundaries: np.ndarray | None = None

    def __post_init__(self):
        n = self.checkpoints.size
        for name in ("mean_theta_sq_err", "se_theta_sq_err",
                     "mean_z_sq_err", "se_z_sq_err"):
            vec = getattr(self, name)
            if vec.shape != (n,):
                raise InvalidArgument(f"{name} must align with checkpoints")
            if np.any(vec < 0.0) or not np.all(np.isfinite(vec)):
                raise InvalidArgument(f"{name} must be finite and nonnegative")
        if self.runs < 1:
            raise InvalidArgument("runs must be at least 1")


def _resolve_instance(config: ExperimentConfig):
    if "garnet" in config.instance:
        p = config.instance["garnet"]
        return generate_garnet(p["n_states"], p["n_actions"], p["branching"],
                               p["n_features"], p["seed"],
                               gamma=p.get("gamma", 0.95))
    return load_instance(config.instance["file"])


def _resolve_grid(config: ExperimentConfig, steps: int) -> np.ndarray:
    g = config.record_grid
    if g["kind"] == "every":
        return make_record_grid(steps, kind="every", every=int(g["every"]))
    return make_record_grid(steps, kind="geometric",
                            ratio=float(g.get("ratio", 1.05)))


def _resolve_schedule(config: ExperimentConfig, problem: ProblemData,
                      features: FeatureMap):
    """Build the concrete schedule; returns (schedule, steps, block_ends)."""
    s = config.schedule
    kind = s["kind"]
    if kind == "diminishing":
        sched = Diminishing(s["c_alpha"], s["c_beta"], s["sigma"], s["nu"])
        return sched, config.steps, None
    if kind == "constant":
        sched = Constant(s["alpha"], s["beta"])
        return sched, config.steps, None

    if "blocks" in s:
        sched = Blockwise(tuple((a, b, int(T)) for a, b, T in s["blocks"]))
    else:
        theta0 = np.zeros(features.d)
        eps0 = float(problem.theta_star @ problem.theta_star)
        if "eps_target" in s:
            eps_target = float(s["eps_target"])
        else:
            eps_target = eps0 * float(s["eps_target_ratio"])
        eta = s.get("eta", "auto")
        if eta == "auto":
            eta = max(1.0, 1.05 * eta_lower_bound(problem))
        c7 = s.get("c7")
        if c7 == "auto":
            alpha0 = float(s.get("alpha0", 0.1))
            c7 = eps0 / (4.0 * max(alpha0, alpha0 * math.log(1.0 / alpha0)))
        lam_x = s.get("lambda_x")
        if lam_x == "auto":
            lam_x = -abs(problem.lambda_theta)
        plan = blockwise_plan(problem, None, eps_target, float(eta), theta0,
                              c7_override=c7, lambda_x_override=lam_x)
        if plan.S == 0:
            raise PlanInfeasible("eps_target is already met at the start")
        sched = Blockwise(tuple(zip(plan.alpha_s, plan.beta_s, plan.T_s)))
    steps = sched.total_steps
    if steps > config.steps:
        raise PlanInfeasible(
            f"plan needs {steps} steps but the budget is {config.steps}")
    return sched, steps, sched.block_ends.astype(np.int64)


def run_experiment(config: ExperimentConfig) -> RunSeries:
    """Execute the config's batch of runs and aggregate across them.

    Aggregation is the arithmetic mean at each checkpoint plus the
    standard error (sample standard deviation over sqrt(runs); zero for
    a single run).  Any failed run aborts the whole experiment: an
    average over survivors would not estimate the quantity the curve
    claims to show.
    """
    mdp, policies, features = _resolve_instance(config)
    needs_mixing = (config.schedule["kind"] == "blockwise"
                    and "blocks" not in config.schedule
                    and config.schedule.get("c7") is None)
    problem = build_problem_data(mdp, policies, features,
                                 with_mixing=needs_mixing)
    schedule, steps, ends = _resolve_schedule(config, problem, features)
    grid = _resolve_grid(config, steps)
    if ends is not None:
        grid = np.unique(np.concatenate([grid, ends]))
    series = run_tdc_many(mdp, policies, features, problem, schedule, steps,
                          config.base_seed, config.runs, grid)
    if not (np.all(np.isfinite(series.theta_sq_err))
            and np.all(np.isfinite(series.z_sq_err))):
        raise TdcLabError("a run produced non-finite errors; aborting the batch")
    return _aggregate(series, config.runs, ends)


def _aggregate(series, runs: int, ends) -> RunSeries:
    theta = np.atleast_2d(series.theta_sq_err)
    z = np.atleast_2d(series.z_sq_err)
    mean_t = theta.mean(axis=0)
    mean_z = z.mean(axis=0)
    if runs > 1:
        se_t = theta.std(axis=0, ddof=1) / math.sqrt(runs)
        se_z = z.std(axis=0, ddof=1) / math.sqrt(runs)
    else:
        se_t = np.zeros_like(mean_t)
        se_z = np.zeros_like(mean_z)
    return RunSeries(checkpoints=series.t, mean_theta_sq_err=mean_t,
                     se_theta_sq_err=se_t, mean_z_sq_err=mean_z,
                     se_z_sq_err=se_z, runs=runs, block_boundaries=ends)


# ---------------------------------------------------------------------------
# tail rate fitting

def fit_rate(series: RunSeries, tail_fraction: float = 0.5,
             which: str = "theta") -> tuple[float, float, float]:
    """Least-squares slope of ln(mean error) against ln(t) over the tail.

    The tail is the last tail_fraction of the positive-time checkpoints,
    counted, not time-weighted, so a geometric grid weights each decade
    about equally.  Returns (slope, intercept, r_squared).
    """
    if which == "theta":
        means = series.mean_theta_sq_err
    elif which == "z":
        means = series.mean_z_sq_err
    else:
        raise InvalidArgument('which must be "theta" or "z"')
    if not 0.0 < tail_fraction <= 1.0:
        raise InvalidArgument("tail_fraction must lie in (0, 1]")
    mask = series.checkpoints > 0
    t = series.checkpoints[mask].astype(np.float64)
    y = means[mask]
    k = int(math.ceil(tail_fraction * t.size))
    if k < 5:
        raise InsufficientData(f"tail window has {k} checkpoints, need 5")
    t, y = t[-k:], y[-k:]
    if np.any(y <= 0.0):
        raise NonpositiveError("tail means must be positive to fit in log space")
    x = np.log(t)
    ln_y = np.log(y)
    slope, intercept = np.polyfit(x, ln_y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((ln_y - fitted) ** 2))
    ss_tot = float(np.sum((ln_y - ln_y.mean()) ** 2))
    if ss_tot <= 1e-20 * (1.0 + float(ln_y.mean()) ** 2):
        r_squared = 1.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r_squared)


# ---------------------------------------------------------------------------
# presets

_INSTANCE_SEED = 101
_BASE_SEED = 202

_FIG1 = {
    "fig1a": (0.03, 0.15),
    "fig1b": (0.18, 0.30),
    "fig1c": (1.0, 0.45),
    "fig1d": (4.0, 0.60),
}
_NU_RATIOS = (1.0 / 3.0, 0.5, 5.0 / 9.0, 2.0 / 3.0, 5.0 / 6.0, 1.0)
_CONSTANT_PAIRS = ((0.01, 0.006), (0.02, 0.008), (0.05, 0.02), (0.1, 0.02))
_BEST_DIMINISHING = {"kind": "diminishing", "c_alpha": 1.8, "c_beta": 1.8,
                     "sigma": 0.45, "nu": 0.30}


def _profile(scale: float | None):
    """Instance size, run count, and horizon for a preset.

    No scale gives the desk profile, sized to keep a whole figure under
    a few minutes.  scale = 1.0 is the full published setting; smaller
    factors shrink only the state count, the number of runs, and the
    horizon, keeping every stepsize choice intact.
    """
    if scale is None:
        return {"n_states": 50, "n_actions": 5, "branching": 10,
                "n_features": 8}, 100, 200_000
    if not 0.0 < scale <= 1.0:
        raise InvalidArgument("scale must lie in (0, 1]")
    n_states = max(2, round(500 * scale))
    garnet = {"n_states": n_states, "n_actions": 20,
              "branching": min(50, n_states),
              "n_features": min(20, n_states)}
    return garnet, max(1, round(500 * scale)), max(1000, round(500_000 * scale))


def preset(name: str, scale: float | None = None) -> list[ExperimentConfig]:
    """Config lists for the published figure settings.

    Every config in a preset shares one instance and one base seed, so
    the schedules can be compared run for run on identical observation
    streams.
    """
    garnet, runs, steps = _profile(scale)
    garnet = dict(garnet, seed=_INSTANCE_SEED, gamma=0.95)

    def cfg(schedule: dict, label: str) -> ExperimentConfig:
        return ExperimentConfig(instance={"garnet": garnet}, schedule=schedule,
                                steps=steps, runs=runs, base_seed=_BASE_SEED,
                                label=label)

    if name in _FIG1:
        c, sigma = _FIG1[name]
        configs = []
        for ratio in _NU_RATIOS:
            nu = sigma * ratio
            sched = {"kind": "diminishing", "c_alpha": c, "c_beta": c,
                     "sigma": sigma, "nu": nu}
            configs.append(cfg(sched, f"diminishing c={c:g} sigma={sigma:g} "
                                      f"nu={nu:.4g}"))
        return configs
    if name == "fig2":
        configs = [cfg(dict(_BEST_DIMINISHING),
                       "diminishing c=1.8 sigma=0.45 nu=0.3")]
        for alpha, beta in _CONSTANT_PAIRS:
            sched = {"kind": "constant", "alpha": alpha, "beta": beta}
            configs.append(cfg(sched, f"constant alpha={alpha:g} beta={beta:g}"))
        return configs
    if name == "fig3":
        blockwise = {"kind": "blockwise", "eps_target_ratio": 2.0 ** -8,
                     "eta": "auto", "c7": "auto", "lambda_x": "auto",
                     "alpha0": 0.1}
        return [
            cfg(blockwise, "blockwise halving plan"),
            cfg(dict(_BEST_DIMINISHING),
                "diminishing c=1.8 sigma=0.45 nu=0.3"),
            cfg({"kind": "constant", "alpha": 0.1, "beta": 0.02},
                "constant alpha=0.1 beta=0.02"),
        ]
    raise UnknownPreset(f"no preset named {name!r}")


# ---------------------------------------------------------------------------
# CSV

def write_series(path, series: RunSeries, config: ExperimentConfig) -> None:
    """Write the curve with its config preamble; floats keep full precision."""
    lines = [f"# config: {config.to_json()}"]
    if series.block_boundaries is not None and series.block_boundaries.size:
        marks = ",".join(str(int(t)) for t in series.block_boundaries)
        lines.append(f"# blocks: {marks}")
    lines.append(CSV_HEADER)
    for i, t in enumerate(series.checkpoints):
        lines.append(",".join([
            str(int(t)),
            repr(float(series.mean_theta_sq_err[i])),
            repr(float(series.se_theta_sq_err[i])),
            repr(float(series.mean_z_sq_err[i])),
            repr(float(series.se_z_sq_err[i])),
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_series(path) -> tuple[RunSeries, ExperimentConfig]:
    """Inverse of write_series; raises InvalidArgument naming a bad line."""
    config = None
    blocks = None
    rows = []
    header_seen = False
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("# config:"):
            config = ExperimentConfig.from_json(line[len("# config:"):].strip())
            continue
        if line.startswith("# blocks:"):
            payload = line[len("# blocks:"):].strip()
            blocks = np.array([int(x) for x in payload.split(",")],
                              dtype=np.int64)
            continue
        if line.startswith("#"):
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise InvalidArgument(
                    f"{path}:{lineno}: expected header {CSV_HEADER!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise InvalidArgument(f"{path}:{lineno}: expected 5 fields")
        try:
            rows.append((int(parts[0]), *(float(x) for x in parts[1:])))
        except ValueError:
            raise InvalidArgument(
                f"{path}:{lineno}: unparseable row {line!r}") from None
    if config is None:
        raise InvalidArgument(f"{path}: missing '# config:' preamble")
    if not header_seen or not rows:
        raise InvalidArgument(f"{path}: no data rows")
    cols = list(zip(*rows))
    series = RunSeries(
        checkpoints=np.array(cols[0], dtype=np.int64),
        mean_theta_sq_err=np.array(cols[1]),
        se_theta_sq_err=np.array(cols[2]),
        mean_z_sq_err=np.array(cols[3]),
        se_z_sq_err=np.array(cols[4]),
        runs=config.runs,
        block_boundaries=blocks,
    )
    return series, config
