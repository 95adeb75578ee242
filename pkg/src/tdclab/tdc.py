"""Projected two time-scale TDC: schedules, single steps, trajectory runs.

The slow iterate follows the corrected TD direction, the fast iterate
tracks the least-squares solution of the instantaneous linear system;
both are projected back onto norm balls after every step, and both
updates read the same pre-step pair.  Single steps are exposed as a pure
Python function (`tdc_step`) for oracles and tests; full runs go through
the compiled kernel, which replays exactly the same arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import run_trajectories, run_trajectory
from .errors import HorizonExceeded, InvalidArgument
from .mdp import FeatureMap, Mdp, Observation, PolicyPair
from .operators import ProblemData
from .rng import split_seed

__all__ = [
    "Diminishing",
    "Constant",
    "Blockwise",
    "StepSchedule",
    "TdcState",
    "TrajectorySeries",
    "per_sample_matrices",
    "project_ball",
    "tdc_step",
    "stepsize_at",
    "stepsize_arrays",
    "make_record_grid",
    "run_tdc",
    "run_tdc_many",
    "run_blockwise",
]


# ---------------------------------------------------------------------------
# schedules

@dataclass(frozen=True)
class Diminishing:
    """alpha_t = c_alpha/(1+t)^sigma, beta_t = c_beta/(1+t)^nu.

    The fast stepsize must not decay faster than the slow one (nu <= sigma);
    equal exponents are allowed so single-time-scale settings remain
    expressible.
    """

    c_alpha: float
    c_beta: float
    sigma: float
    nu: float

    def __post_init__(self):
        if self.c_alpha <= 0.0 or self.c_beta <= 0.0:
            raise InvalidArgument("stepsize constants must be positive")
        if not 0.0 < self.nu <= self.sigma <= 1.0:
            raise InvalidArgument(
                f"need 0 < nu <= sigma <= 1, got sigma={self.sigma}, nu={self.nu}")


@dataclass(frozen=True)
class Constant:
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise InvalidArgument("constant stepsizes must be positive")


@dataclass(frozen=True)
class Blockwise:
    """Piecewise-constant plan: block s runs T_s steps at (alpha_s, beta_s)."""

    plan: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        plan = tuple((float(a), float(b), int(T)) for a, b, T in self.plan)
        if not plan:
            raise InvalidArgument("blockwise plan must contain at least one block")
        eta = plan[0][1] / plan[0][0]
        for i, (a, b, T) in enumerate(plan):
            if T < 1:
                raise InvalidArgument(f"block {i} has T={T} < 1")
            if a <= 0.0 or b <= 0.0:
                raise InvalidArgument(f"block {i} has nonpositive stepsizes")
            if i > 0 and a >= plan[i - 1][0]:
                raise InvalidArgument("alpha_s must strictly decrease across blocks")
            if abs(b - eta * a) > 1e-9 * max(b, eta * a):
                raise InvalidArgument("beta_s must equal eta * alpha_s with one fixed eta")
        object.__setattr__(self, "plan", plan)

    @property
    def eta(self) -> float:
        return self.plan[0][1] / self.plan[0][0]

    @property
    def total_steps(self) -> int:
        return sum(T for _, _, T in self.plan)

    @property
    def block_ends(self) -> np.ndarray:
        return np.cumsum([T for _, _, T in self.plan])


StepSchedule = Diminishing | Constant | Blockwise


def stepsize_at(schedule: StepSchedule, t: int) -> tuple[float, float]:
    """Stepsize pair in force at sample index t (0-based)."""
    if t < 0:
        raise InvalidArgument("t must be nonnegative")
    if isinstance(schedule, Diminishing):
        base = 1.0 + t
        return schedule.c_alpha * base ** -schedule.sigma, schedule.c_beta * base ** -schedule.nu
    if isinstance(schedule, Constant):
        return schedule.alpha, schedule.beta
    if isinstance(schedule, Blockwise):
        offset = 0
        for a, b, T in schedule.plan:
            if t < offset + T:
                return a, b
            offset += T
        raise HorizonExceeded(f"t={t} beyond the planned horizon {offset}")
    raise InvalidArgument(f"unknown schedule {schedule!r}")


def stepsize_arrays(schedule: StepSchedule, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized stepsizes for t = 0..steps-1 (what the kernel consumes)."""
    if steps < 0:
        raise InvalidArgument("steps must be nonnegative")
    t = np.arange(steps, dtype=np.float64)
    if isinstance(schedule, Diminishing):
        base = 1.0 + t
        return schedule.c_alpha * base ** -schedule.sigma, schedule.c_beta * base ** -schedule.nu
    if isinstance(schedule, Constant):
        return np.full(steps, schedule.alpha), np.full(steps, schedule.beta)
    if isinstance(schedule, Blockwise):
        if steps > schedule.total_steps:
            raise HorizonExceeded(
                f"steps={steps} beyond the planned horizon {schedule.total_steps}")
        alphas = np.empty(steps)
        betas = np.empty(steps)
        offset = 0
        for a, b, T in schedule.plan:
            hi = min(offset + T, steps)
            alphas[offset:hi] = a
            betas[offset:hi] = b
            offset = hi
            if offset == steps:
                break
        return alphas, betas
    raise InvalidArgument(f"unknown schedule {schedule!r}")


# ---------------------------------------------------------------------------
# single-step pieces

@dataclass(frozen=True)
class TdcState:
    theta: np.ndarray
    w: np.ndarray
    t: int


def per_sample_matrices(obs: Observation, features: FeatureMap, rho: float,
                        gamma: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Dense rank-1 update matrices for one observation.

    Exists for oracles and diagnostics; the stepping code never builds
    these, it works with the inner products directly.
    """
    phi_s = features.phi[obs.s]
    phi_n = features.phi[obs.s_next]
    A_t = rho * np.outer(phi_s, gamma * phi_n - phi_s)
    B_t = -gamma * rho * np.outer(phi_n, phi_s)
    C_t = -np.outer(phi_s, phi_s)
    b_t = rho * obs.r * phi_s
    return A_t, B_t, C_t, b_t


def project_ball(x: np.ndarray, R: float) -> np.ndarray:
    """Euclidean projection onto the centered ball of radius R."""
    if R <= 0.0:
        raise InvalidArgument("ball radius must be positive")
    x = np.asarray(x, dtype=np.float64)
    norm_sq = float(x @ x)
    if norm_sq <= R * R:
        return x.copy()
    return x * (R / np.sqrt(norm_sq))


def tdc_step(state: TdcState, obs: Observation, alpha_t: float, beta_t: float,
             R_theta: float, R_w: float, features: FeatureMap, rho: float,
             gamma: float) -> TdcState:
    """One projected update; both directions read the pre-step (theta, w).

    Rank-1 structure throughout: the step costs a handful of length-d
    inner products and never materializes a d-by-d matrix.  The arithmetic
    (operation order included) mirrors the compiled kernel exactly.
    """
    phi_s = features.phi[obs.s]
    phi_n = features.phi[obs.s_next]
    theta, w = state.theta, state.w

    dot_cur = float(phi_s @ theta)
    dot_nxt = float(phi_n @ theta)
    dot_w = float(phi_s @ w)
    delta = obs.r + gamma * dot_nxt - dot_cur

    theta_new = theta + alpha_t * (rho * delta * phi_s - gamma * rho * dot_w * phi_n)
    w_new = w + beta_t * (rho * delta * phi_s - dot_w * phi_s)
    return TdcState(theta=project_ball(theta_new, R_theta),
                    w=project_ball(w_new, R_w),
                    t=state.t + 1)


# ---------------------------------------------------------------------------
# full runs

@dataclass(frozen=True)
class TrajectorySeries:
    """Squared errors of one or more runs at the recorded checkpoints.

    theta_sq_err and z_sq_err have shape (len(t),) for a single run and
    (runs, len(t)) for a batch; row i always belongs to run index i.
    """

    t: np.ndarray
    theta_sq_err: np.ndarray
    z_sq_err: np.ndarray


def make_record_grid(steps: int, kind: str = "geometric", ratio: float = 1.05,
                     every: int | None = None) -> np.ndarray:
    """Checkpoint times: t = 0, t = steps, and either a geometric ladder
    (default, suited to log-log rate reading) or an arithmetic one."""
    if steps < 0:
        raise InvalidArgument("steps must be nonnegative")
    if kind == "every":
        if every is None or every < 1:
            raise InvalidArgument("arithmetic grid needs a positive stride")
        ts = list(range(0, steps + 1, every))
        if ts[-1] != steps:
            ts.append(steps)
        return np.array(ts, dtype=np.int64)
    if kind != "geometric":
        raise InvalidArgument(f"unknown grid kind {kind!r}")
    if ratio <= 1.0:
        raise InvalidArgument("geometric grid ratio must exceed 1")
    ts = [0]
    t = 1
    while t < steps:
        ts.append(t)
        t = max(t + 1, int(t * ratio))
    if steps > 0:
        ts.append(steps)
    return np.array(ts, dtype=np.int64)


def _validate_grid(grid, steps: int) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.int64)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgument("record grid must be a nonempty 1-d list of times")
    if np.any(np.diff(grid) <= 0):
        raise InvalidArgument("record grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > steps:
        raise InvalidArgument(f"record grid must stay inside [0, {steps}]")
    return grid


def _sim_tables(mdp: Mdp, policies: PolicyPair, problem: ProblemData):
    """Cumulative-probability tables and exact-error helpers for the kernel."""
    behavior_cdf = np.cumsum(policies.behavior, axis=1)
    trans_cdf = np.cumsum(mdp.transition, axis=2)
    mu_cdf = np.cumsum(problem.mu)
    psi_mat = -problem.C_inv @ problem.A
    psi_vec = -problem.C_inv @ problem.b
    return (np.ascontiguousarray(behavior_cdf), np.ascontiguousarray(trans_cdf),
            np.ascontiguousarray(policies.rho), np.ascontiguousarray(mdp.reward),
            mu_cdf, psi_mat, psi_vec)


def run_tdc(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
            problem: ProblemData, schedule: StepSchedule, steps: int,
            seed: int, record_grid) -> TrajectorySeries:
    """One run from theta_0 = w_0 = 0 along a single continuous trajectory.

    The chain starts from a stationary draw (one uniform), then each step
    consumes two uniforms (action, successor) from the splitmix64 stream
    seeded with `seed`; the tracking error uses the exact fast-variable
    stationary map from ProblemData.  Bitwise deterministic in `seed`.
    """
    grid = _validate_grid(record_grid, steps)
    alphas, betas = stepsize_arrays(schedule, steps)
    behavior_cdf, trans_cdf, rho, reward, mu_cdf, psi_mat, psi_vec = \
        _sim_tables(mdp, policies, problem)
    theta_err = np.empty(grid.size)
    z_err = np.empty(grid.size)
    run_trajectory(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), steps, behavior_cdf,
                   trans_cdf, rho, features.phi, reward, mu_cdf, mdp.gamma,
                   alphas, betas, problem.R_theta, problem.R_w,
                   problem.theta_star, psi_mat, psi_vec, grid, theta_err, z_err)
    return TrajectorySeries(t=grid, theta_sq_err=theta_err, z_sq_err=z_err)


def run_tdc_many(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                 problem: ProblemData, schedule: StepSchedule, steps: int,
                 base_seed: int, runs: int, record_grid) -> TrajectorySeries:
    """Independent runs i = 0..runs-1, each seeded with split(base_seed, i).

    Runs execute in parallel; outputs are indexed by run number, so the
    result is identical whatever the thread count or scheduling order.
    """
    if runs < 1:
        raise InvalidArgument("need at least one run")
    grid = _validate_grid(record_grid, steps)
    alphas, betas = stepsize_arrays(schedule, steps)
    behavior_cdf, trans_cdf, rho, reward, mu_cdf, psi_mat, psi_vec = \
        _sim_tables(mdp, policies, problem)
    seeds = np.array([split_seed(base_seed, i) for i in range(runs)], dtype=np.uint64)
    theta_err = np.empty((runs, grid.size))
    z_err = np.empty((runs, grid.size))
    run_trajectories(seeds, steps, behavior_cdf, trans_cdf, rho, features.phi,
                     reward, mu_cdf, mdp.gamma, alphas, betas, problem.R_theta,
                     problem.R_w, problem.theta_star, psi_mat, psi_vec, grid,
                     theta_err, z_err)
    return TrajectorySeries(t=grid, theta_sq_err=theta_err, z_sq_err=z_err)


def _as_blockwise(plan) -> Blockwise:
    if isinstance(plan, Blockwise):
        return plan
    if hasattr(plan, "alpha_s"):  # planner output from the bounds module
        return Blockwise(tuple(zip(plan.alpha_s, plan.beta_s, plan.T_s)))
    return Blockwise(tuple(plan))


def run_blockwise(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                  problem: ProblemData, plan, seed: int,
                  record_grid=None) -> tuple[TrajectorySeries, np.ndarray]:
    """Run a piecewise-constant plan over one continuous trajectory.

    State carries over between blocks and the chain is never restarted.
    Block-end times are always recorded (merged into the grid) and also
    returned separately as markers.
    """
    schedule = _as_blockwise(plan)
    steps = schedule.total_steps
    ends = schedule.block_ends.astype(np.int64)
    if record_grid is None:
        record_grid = make_record_grid(steps)
    grid = _validate_grid(record_grid, steps)
    merged = np.unique(np.concatenate([grid, ends]))
    series = run_tdc(mdp, policies, features, problem, schedule, steps, seed, merged)
    return series, ends
