"""Closed-form constants and envelopes for the finite-time analysis.

Every quantity here is an explicit function of the instance: worst-case
norm bounds for the split update directions (the K family), their
Lipschitz moduli (the L family), mixing times of the behavior chain at a
given stepsize, the convergence-rate envelope for diminishing stepsizes,
the constant-stepsize error constants, the stacked single-iterate system
used by the blockwise analysis, the blockwise plan itself, and an
empirical checker that hammers the norm bounds with random samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument, NotNegativeDefinite, PlanInfeasible
from .mdp import FeatureMap, Mdp, Observation, PolicyPair, sample_step
from .operators import ProblemData
from .rng import SplitMix64, split_seed
from .tdc import per_sample_matrices

__all__ = [
    "ConstantsTable",
    "BlockwisePlan",
    "ViolationReport",
    "helper_split",
    "lemma_constants",
    "mixing_time",
    "envelope_h",
    "theorem2_constants",
    "stacked_system",
    "c7_constant",
    "eta_lower_bound",
    "blockwise_plan",
    "check_boundedness",
    "TABLE_FIELD_ROLES",
]


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class ConstantsTable:
    """All instance-level constants of the analysis.

    The K/L/tau block is filled by `lemma_constants`; the C block and the
    stacked-system block are optional until the corresponding computations
    run (theorem2_constants, stacked_system, c7_constant).
    """

    K_f1: float
    K_g1: float
    K_f2: float
    K_g2: float
    K_r1: float
    K_r2: float
    K_r3: float
    L_f1_theta: float
    L_f2_theta: float
    L_f2_z: float
    L_g2_z: float
    tau_alpha: int
    tau_beta: int
    C2: float | None = None
    C3: float | None = None
    C4: float | None = None
    C5: float | None = None
    C6: float | None = None
    C_G: float | None = None
    C_g: float | None = None
    K_h: float | None = None
    L_h: float | None = None
    lambda_x: float | None = None
    C7: float | None = None

    def __post_init__(self):
        for name in ("K_f1", "K_f2", "K_g2", "K_r1", "K_r2", "K_r3",
                     "L_f1_theta", "L_f2_theta", "L_f2_z", "L_g2_z"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidArgument(f"{name} must be positive and finite, got {v}")
        if not (math.isfinite(self.K_g1) and self.K_g1 >= 0.0):
            # K_g1 carries a gamma factor and legitimately hits 0 at gamma -> 0.
            raise InvalidArgument(f"K_g1 must be nonnegative and finite, got {self.K_g1}")
        if self.tau_alpha < 0 or self.tau_beta < 0:
            raise InvalidArgument("mixing times cannot be negative")

    @property
    def valid_for_blockwise(self) -> bool:
        return self.lambda_x is not None and self.lambda_x < 0.0


@dataclass(frozen=True)
class BlockwisePlan:
    """Halving schedule: block s runs T_s steps at (alpha_s, beta_s) and is
    sized to shrink the squared-error target eps_schedule[s-1] to
    eps_schedule[s]."""

    blocks: tuple[tuple[float, float, int], ...]
    eta: float
    eps_schedule: tuple[float, ...]
    S: int

    def __post_init__(self):
        if self.S != len(self.blocks):
            raise InvalidArgument("S must equal the number of blocks")
        if len(self.eps_schedule) != self.S + 1:
            raise InvalidArgument("eps_schedule must have one entry per block boundary")
        for s in range(1, self.S + 1):
            expected = self.eps_schedule[0] / 2 ** s
            if abs(self.eps_schedule[s] - expected) > 1e-12 * expected:
                raise InvalidArgument("eps_schedule must halve exactly")
        for i, (a, b, T) in enumerate(self.blocks):
            if T < 1:
                raise InvalidArgument(f"block {i} has T < 1")
            if i > 0 and a >= self.blocks[i - 1][0]:
                raise InvalidArgument("alpha_s must strictly decrease")
            if i > 0 and T < self.blocks[i - 1][2]:
                raise InvalidArgument("T_s must be nondecreasing")

    @property
    def alpha_s(self) -> tuple[float, ...]:
        return tuple(a for a, _, _ in self.blocks)

    @property
    def beta_s(self) -> tuple[float, ...]:
        return tuple(b for _, b, _ in self.blocks)

    @property
    def T_s(self) -> tuple[int, ...]:
        return tuple(T for _, _, T in self.blocks)

    @property
    def total_steps(self) -> int:
        return sum(self.T_s)


# ---------------------------------------------------------------------------
# update-direction split

def helper_split(theta: np.ndarray, z: np.ndarray, obs: Observation,
                 problem: ProblemData, features: FeatureMap, rho: float,
                 gamma: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split both update directions into a mean part and a tracking part.

    The slow direction decomposes as f1(theta, O) + g1(z, O) and the fast
    one as f2 + g2, where z is the tracking error and the mean parts
    absorb the exact fixed-point map.  Both sums reproduce the raw drift
    evaluated at w = z - C^{-1}(b + A theta); that identity is asserted
    here in debug runs and exercised to 1e-12 by the test oracle.
    """
    A_t, B_t, C_t, b_t = per_sample_matrices(obs, features, rho, gamma)
    A, b, C_inv = problem.A, problem.b, problem.C_inv
    correction = C_inv @ (A @ theta + b)   # C^{-1}(A theta + b)
    f1 = A_t @ theta + b_t - B_t @ correction
    g1 = B_t @ z
    f2 = A_t @ theta + b_t - C_t @ correction
    g2 = C_t @ z
    if __debug__:
        w = z - correction
        raw = A_t @ theta + b_t
        scale = 1.0 + float(np.linalg.norm(raw))
        assert np.linalg.norm(f1 + g1 - (raw + B_t @ w)) <= 1e-9 * scale
        assert np.linalg.norm(f2 + g2 - (raw + C_t @ w)) <= 1e-9 * scale
    return f1, g1, f2, g2


# ---------------------------------------------------------------------------
# lemma constants

def lemma_constants(problem: ProblemData, r_max: float, rho_max: float,
                    gamma: float, c_alpha: float, c_beta: float) -> ConstantsTable:
    """Worst-case norm and Lipschitz constants over the projection balls.

    All closed forms; the only measured inputs are the spectral and radius
    fields of ProblemData and the fitted mixing pair (for the two tau
    entries, evaluated at the given stepsize constants).
    """
    if problem.mixing is None:
        raise InvalidArgument("lemma_constants needs the mixing fit on ProblemData")
    R_t, R_w = problem.R_theta, problem.R_w
    lam_cm = problem.lambda_cm
    one_g = 1.0 + gamma

    K_f2 = (one_g * rho_max + one_g * rho_max / lam_cm) * R_t \
        + rho_max * r_max + rho_max * r_max / lam_cm
    K_f1 = (one_g * rho_max + gamma * one_g * rho_max ** 2 / lam_cm) * R_t \
        + rho_max * r_max + gamma * rho_max ** 2 * r_max / lam_cm
    K_g1 = 2.0 * gamma * rho_max * R_w
    K_g2 = 2.0 * R_w

    norm_A = float(np.linalg.norm(problem.A, 2))
    norm_C_inv = float(np.linalg.norm(problem.C_inv, 2))
    ratio = max(1.0, c_alpha / c_beta)

    K_r1 = norm_C_inv * norm_A * (K_f1 + K_g1)
    K_r2 = K_f2 + K_g2 + ratio * (one_g * rho_max / lam_cm) * (K_f1 + K_g1)
    L_f2_theta = 2.0 * R_w * (one_g * rho_max + one_g * rho_max / lam_cm)
    L_f2_z = 2.0 * K_f2
    K_r3 = ratio * L_f2_theta * (K_f1 + K_g1) + L_f2_z * K_r2
    L_g2_z = 4.0 * R_w + 2.0 * K_g2
    L_f1_theta = 4.0 * R_t * one_g * rho_max * (1.0 + gamma * rho_max / lam_cm) + 2.0 * K_f1

    mix = problem.mixing
    return ConstantsTable(
        K_f1=K_f1, K_g1=K_g1, K_f2=K_f2, K_g2=K_g2,
        K_r1=K_r1, K_r2=K_r2, K_r3=K_r3,
        L_f1_theta=L_f1_theta, L_f2_theta=L_f2_theta,
        L_f2_z=L_f2_z, L_g2_z=L_g2_z,
        tau_alpha=mixing_time(mix.m_hat, mix.rho_hat, c_alpha),
        tau_beta=mixing_time(mix.m_hat, mix.rho_hat, c_beta),
    )


def mixing_time(m_hat: float, rho_hat: float, step: float) -> int:
    """Least i with m_hat * rho_hat**i <= step.

    Also asserts the closed-form logarithmic upper bound that the analysis
    substitutes for this minimum.
    """
    if not 0.0 < rho_hat < 1.0:
        raise InvalidArgument(f"rho_hat must lie in (0,1), got {rho_hat}")
    if m_hat <= 0.0 or step <= 0.0:
        raise InvalidArgument("m_hat and step must be positive")
    if m_hat <= step:
        return 0
    log_inv_rho = math.log(1.0 / rho_hat)
    tau = max(0, math.ceil(math.log(m_hat / step) / log_inv_rho))
    # Guard the ceiling against round-off in either direction.
    while m_hat * rho_hat ** tau > step:
        tau += 1
    while tau > 0 and m_hat * rho_hat ** (tau - 1) <= step:
        tau -= 1
    bound = math.log(m_hat / rho_hat) / log_inv_rho + math.log(1.0 / step) / log_inv_rho
    assert tau <= bound + 1e-9, (tau, bound)
    return tau


def envelope_h(sigma: float, nu: float, t: float, epsilon: float) -> float:
    """Decay envelope of the slow error under diminishing stepsizes.

    Two regimes: when the slow exponent clears 1.5x the fast one the fast
    scale dominates and the envelope is t**-nu; closer exponents give
    t**-(2(sigma-nu)-epsilon) with a caller-chosen epsilon slack.
    """
    if not 0.0 < nu < sigma <= 1.0:
        raise InvalidArgument(f"need 0 < nu < sigma <= 1, got sigma={sigma}, nu={nu}")
    if not 0.0 < epsilon <= sigma - nu:
        raise InvalidArgument(f"epsilon must lie in (0, {sigma - nu}], got {epsilon}")
    if t < 1.0:
        raise InvalidArgument("envelope defined for t >= 1")
    if sigma > 1.5 * nu:
        return t ** -nu
    return t ** -(2.0 * (sigma - nu) - epsilon)


# ---------------------------------------------------------------------------
# constant-stepsize constants

def theorem2_constants(problem: ProblemData, table: ConstantsTable,
                       m_hat: float, rho_hat: float, alpha: float, beta: float,
                       z0_norm_sq: float, *, gamma: float, rho_max: float,
                       ) -> tuple[float, float, float, float, float, float, int]:
    """Error-bound constants for one constant stepsize pair.

    C2..C6 depend only on the instance (via the table and the mixing fit);
    the horizon T and the transient constant C1 additionally depend on
    (alpha, beta) and on the initial tracking error.
    """
    lam_t = abs(problem.lambda_theta)
    lam_w = abs(problem.lambda_w)
    lam_cm = problem.lambda_cm
    if alpha >= 1.0 / lam_t:
        raise InvalidArgument(f"alpha must be below {1.0 / lam_t:.6g}")
    if beta >= 1.0 / lam_w:
        raise InvalidArgument(f"beta must be below {1.0 / lam_w:.6g}")
    if z0_norm_sq <= 0.0:
        raise InvalidArgument("z0_norm_sq must be positive")

    log_inv_rho = math.log(1.0 / rho_hat)
    mix_term = math.log(m_hat / rho_hat) / log_inv_rho + 1.0 / log_inv_rho

    R_t, R_w = problem.R_theta, problem.R_w
    C5 = (2.0 * (table.K_r3 + table.L_g2_z * table.K_r2) / lam_w) * mix_term \
        + (16.0 * R_w * (table.K_f2 + table.K_g2)
           + 3.0 * (table.K_f2 ** 2 + table.K_g2 ** 2)
           + 3.0 * table.K_r1 ** 2) / lam_w
    C6 = 2.0 * (1.0 + gamma) * rho_max * R_w * (table.K_g1 + table.K_f1) / (lam_w * lam_cm)
    C2 = (2.0 * table.L_f1_theta * (table.K_f1 + table.K_g1) / lam_t) * mix_term \
        + 2.0 * (8.0 * R_t * table.K_f1 + table.K_f1 ** 2 + table.K_g1 ** 2) / lam_t
    lever = (gamma * rho_max * R_t / lam_t) ** 2
    C3 = 32.0 * lever * C5
    C4 = 16.0 * lever * C6

    drive = C5 * max(beta, beta * math.log(1.0 / beta))
    T = max(0, math.ceil(math.log(drive / z0_norm_sq) / (-math.log1p(-lam_w * beta))))
    shrink = (1.0 - lam_t * alpha) ** (T + 1)
    C1 = 4.0 * gamma * rho_max * R_t * R_w * (1.0 - shrink) / (lam_t * shrink)

    assert abs(C3 - 2.0 * C4 * (C5 / C6)) <= 1e-9 * C3
    return C1, C2, C3, C4, C5, C6, T


# ---------------------------------------------------------------------------
# stacked system and blockwise planning

def stacked_system(problem: ProblemData, eta: float) -> tuple[float, float, float, float, float]:
    """Single-iterate stacked form of the coupled update.

    Stacks x = [theta; w] with drift matrix G = [[A, B], [eta A, eta B]]
    and offset g = [b; eta b]; returns spectral norms, the worst drift
    magnitude over the product ball, its Lipschitz modulus, and the top
    eigenvalue of G + G^T.  A nonnegative lambda_x is reported, not
    raised; planning refuses it downstream.
    """
    if eta <= 0.0:
        raise InvalidArgument("eta must be positive")
    A, B, b = problem.A, problem.B, problem.b
    G = np.block([[A, B], [eta * A, eta * B]])
    g = np.concatenate([b, eta * b])
    C_G = float(np.linalg.norm(G, 2))
    C_g = float(np.linalg.norm(g))
    lambda_x = float(np.linalg.eigvalsh(G + G.T)[-1])
    ball = math.sqrt(problem.R_theta ** 2 + problem.R_w ** 2)
    K_h = C_G * ball + C_g
    L_h = 4.0 * C_G * ball + 2.0 * K_h
    return C_G, C_g, K_h, L_h, lambda_x


def c7_constant(problem: ProblemData, eta: float, m_hat: float,
                rho_hat: float) -> float:
    """Drift-and-mixing constant that sizes the blockwise stepsizes."""
    _, _, K_h, L_h, lambda_x = stacked_system(problem, eta)
    if lambda_x >= 0.0:
        raise NotNegativeDefinite(
            f"stacked drift is not contractive for eta={eta} (lambda_x={lambda_x:.3e})")
    log_inv_rho = math.log(1.0 / rho_hat)
    ball = math.sqrt(problem.R_theta ** 2 + problem.R_w ** 2)
    return (2.0 / abs(lambda_x)) * (
        8.0 * K_h * ball
        + L_h * K_h * math.log(m_hat / rho_hat) / log_inv_rho
        + L_h * K_h / log_inv_rho
        + 0.5 * K_h ** 2)


def eta_lower_bound(problem: ProblemData) -> float:
    """Smallest admissible fast-to-slow stepsize ratio for blockwise runs."""
    M = problem.C_inv @ (problem.A.T + problem.A)
    sym = 0.5 * (M + M.T)
    return 0.5 * max(0.0, float(np.linalg.eigvalsh(sym)[0]))


def _stepsize_cap_inverse(bound: float) -> float:
    """Largest alpha with max(alpha*ln(1/alpha), alpha) <= bound.

    The left side is continuous and strictly increasing in alpha, so 64
    bisection rounds pin the crossing to full double precision.
    """
    def F(a: float) -> float:
        return max(a * math.log(1.0 / a), a) if a > 0.0 else 0.0

    lo, hi = 0.0, max(1.0, bound)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if F(mid) <= bound:
            lo = mid
        else:
            hi = mid
    return lo


def blockwise_plan(problem: ProblemData, table: ConstantsTable | None,
                   eps_target: float, eta: float, theta0: np.ndarray, *,
                   eps_unsquared: bool = False,
                   c7_override: float | None = None,
                   lambda_x_override: float | None = None) -> BlockwisePlan:
    """Halving plan: block s shrinks the squared-error target by two.

    Stepsizes are the largest values their drift constraint allows, found
    by bisection; block lengths come from the contraction rate |lambda_x|.
    The two overrides substitute practical estimates for the worst-case
    C7 and lambda_x, the knobs one tunes when the closed forms are too
    conservative to run; everything else is unchanged.
    """
    if eps_target <= 0.0:
        raise InvalidArgument("eps_target must be positive")
    bound = eta_lower_bound(problem)
    if eta < bound:
        raise InvalidArgument(f"eta={eta} below the admissible floor {bound:.6g}")
    if lambda_x_override is None:
        lambda_x = stacked_system(problem, eta)[4]
        if lambda_x >= 0.0:
            raise NotNegativeDefinite(
                f"stacked drift not contractive for eta={eta} (lambda_x={lambda_x:.3e})")
    else:
        if lambda_x_override >= 0.0:
            raise InvalidArgument("lambda_x_override must be negative")
        lambda_x = lambda_x_override
    if c7_override is None:
        if problem.mixing is None:
            raise InvalidArgument("blockwise_plan needs the mixing fit on ProblemData")
        C7 = c7_constant(problem, eta, problem.mixing.m_hat, problem.mixing.rho_hat)
    else:
        if c7_override <= 0.0:
            raise InvalidArgument("c7_override must be positive")
        C7 = c7_override

    gap = np.asarray(theta0, dtype=np.float64) - problem.theta_star
    eps0 = float(np.linalg.norm(gap)) if eps_unsquared else float(gap @ gap)
    if eps0 <= 0.0:
        raise InvalidArgument("theta0 already sits on the fixed point; nothing to plan")
    if eps_target >= eps0:
        return BlockwisePlan(blocks=(), eta=eta, eps_schedule=(eps0,), S=0)

    S = math.ceil(math.log2(eps0 / eps_target))
    lam = abs(lambda_x)
    eps_schedule = [eps0 / 2 ** s for s in range(S + 1)]
    blocks = []
    prev_alpha = math.inf
    for s in range(1, S + 1):
        cap = min(eps_schedule[s - 1] / (4.0 * C7), 1.0 / lam)
        alpha = _stepsize_cap_inverse(cap)
        if alpha >= prev_alpha:
            # Both blocks hit the 1/|lambda_x| cap; nudge to keep the strict
            # decrease the schedule type demands.
            alpha = prev_alpha * (1.0 - 1e-9)
        if alpha < 1e-15:
            raise PlanInfeasible(
                f"block {s} needs alpha below 1e-15 (constraint {cap:.3e})")
        shrink = -math.log1p(-lam * alpha) if lam * alpha < 1.0 else math.inf
        T_s = max(1, math.ceil(math.log(4.0) / shrink)) if math.isfinite(shrink) else 1
        blocks.append((alpha, eta * alpha, T_s))
        prev_alpha = alpha
    return BlockwisePlan(blocks=tuple(blocks), eta=eta,
                         eps_schedule=tuple(eps_schedule), S=S)


# ---------------------------------------------------------------------------
# empirical boundedness check

@dataclass(frozen=True)
class ViolationReport:
    """Outcome of hammering the four norm bounds with random samples."""

    n_samples: int
    counts: dict = field(default_factory=dict)
    max_ratio: dict = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return sum(self.counts.values())


def check_boundedness(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                      problem: ProblemData, table: ConstantsTable,
                      n_samples: int, seed: int, *,
                      on_surface: bool = False) -> ViolationReport:
    """Sample (theta, z, observation) triples and test all four norm bounds.

    theta is uniform in the slow ball (or pinned to its surface), z
    uniform in the fast ball, observations come from one continuous
    behavior trajectory.  Returns counts of exceedances per bound plus the
    largest observed norm-to-bound ratio; a correct table yields zero
    counts.
    """
    if n_samples < 1:
        raise InvalidArgument("need at least one sample")
    ball_rng = np.random.default_rng(split_seed(seed, 1))
    d = features.d

    def ball_points(radius: float, n: int) -> np.ndarray:
        direction = ball_rng.standard_normal((n, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        if on_surface:
            return radius * direction
        shrink = ball_rng.uniform(size=(n, 1)) ** (1.0 / d)
        return radius * shrink * direction

    thetas = ball_points(problem.R_theta, n_samples)
    zs = ball_points(problem.R_w, n_samples)

    stream = SplitMix64(split_seed(seed, 2))
    mu_cdf = np.cumsum(problem.mu)
    s = int(np.searchsorted(mu_cdf, stream.uniform(), side="right"))
    s = min(s, mdp.n_states - 1)
    s_idx = np.empty(n_samples, dtype=np.int64)
    a_idx = np.empty(n_samples, dtype=np.int64)
    n_idx = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        obs = sample_step(mdp, policies, s, stream)
        s_idx[i], a_idx[i], n_idx[i] = obs.s, obs.a, obs.s_next
        s = obs.s_next

    phi_s = features.phi[s_idx]
    phi_n = features.phi[n_idx]
    rho = policies.rho[s_idx, a_idx]
    r = mdp.reward[s_idx]
    gamma = mdp.gamma

    # Per-sample drift pieces, all rank-1 in the features:
    #   raw slow drift      rho * delta * phi(s) - gamma rho (phi(s).w) phi(s')
    #   mean parts          subtract the fixed-point correction C^{-1}(A theta + b)
    correction = (problem.C_inv @ (problem.A @ thetas.T + problem.b[:, None])).T
    drift_dot = np.einsum("ij,ij->i", gamma * phi_n - phi_s, thetas)
    base = rho * (drift_dot + r)
    corr_dot = np.einsum("ij,ij->i", phi_s, correction)
    z_dot = np.einsum("ij,ij->i", phi_s, zs)

    f1 = base[:, None] * phi_s + (gamma * rho * corr_dot)[:, None] * phi_n
    f2 = base[:, None] * phi_s + corr_dot[:, None] * phi_s
    g1 = -(gamma * rho * z_dot)[:, None] * phi_n
    g2 = -z_dot[:, None] * phi_s

    counts = {}
    max_ratio = {}
    for name, vecs, bound in (("K_f1", f1, table.K_f1), ("K_g1", g1, table.K_g1),
                              ("K_f2", f2, table.K_f2), ("K_g2", g2, table.K_g2)):
        norms = np.linalg.norm(vecs, axis=1)
        counts[name] = int(np.sum(norms > bound))
        max_ratio[name] = float(norms.max() / bound) if bound > 0.0 else 0.0
    return ViolationReport(n_samples=n_samples, counts=counts, max_ratio=max_ratio)


def with_stacked(table: ConstantsTable, problem: ProblemData, eta: float,
                 m_hat: float, rho_hat: float) -> ConstantsTable:
    """Copy of the table with the stacked-system block filled in."""
    C_G, C_g, K_h, L_h, lambda_x = stacked_system(problem, eta)
    C7 = None
    if lambda_x < 0.0:
        C7 = c7_constant(problem, eta, m_hat, rho_hat)
    return replace(table, C_G=C_G, C_g=C_g, K_h=K_h, L_h=L_h,
                   lambda_x=lambda_x, C7=C7)


def with_theorem2(table: ConstantsTable, problem: ProblemData, m_hat: float,
                  rho_hat: float, alpha: float, beta: float, z0_norm_sq: float,
                  *, gamma: float, rho_max: float) -> ConstantsTable:
    """Copy of the table with the constant-stepsize block filled in."""
    _, C2, C3, C4, C5, C6, _ = theorem2_constants(
        problem, table, m_hat, rho_hat, alpha, beta, z0_norm_sq,
        gamma=gamma, rho_max=rho_max)
    return replace(table, C2=C2, C3=C3, C4=C4, C5=C5, C6=C6)


TABLE_FIELD_ROLES = {
    "K_f1": "uniform norm bound for the mean part of the slow (corrected TD) drift over the slow ball",
    "K_g1": "uniform norm bound for the slow drift's tracking part over the fast ball",
    "K_f2": "uniform norm bound for the mean part of the fast (least-squares tracking) drift",
    "K_g2": "uniform norm bound for the fast drift's tracking part",
    "K_r1": "norm bound for the fixed-point map increment driven by one slow step",
    "K_r2": "norm bound for the tracking-error one-step increment",
    "K_r3": "norm bound for the coupled drift-difference term in the fast-error recursion",
    "L_f1_theta": "Lipschitz modulus of the slow mean drift in theta",
    "L_f2_theta": "Lipschitz modulus of the fast mean drift in theta",
    "L_f2_z": "Lipschitz modulus of the fast mean drift in the tracking error",
    "L_g2_z": "Lipschitz modulus of the fast tracking part in the tracking error",
    "tau_alpha": "mixing time of the behavior chain at the slow stepsize constant",
    "tau_beta": "mixing time of the behavior chain at the fast stepsize constant",
    "C2": "slow-error bound: coefficient of the stepsize-driven noise floor",
    "C3": "slow-error bound: coefficient inherited from the tracking-error floor",
    "C4": "slow-error bound: coefficient of the tracking transient",
    "C5": "tracking-error bound: noise-floor coefficient",
    "C6": "tracking-error bound: slow-interference coefficient",
    "C_G": "spectral norm of the stacked drift matrix",
    "C_g": "norm of the stacked drift offset",
    "K_h": "worst stacked-drift magnitude over the product ball",
    "L_h": "Lipschitz modulus of the stacked drift",
    "lambda_x": "top eigenvalue of the symmetrized stacked drift (negative = contractive)",
    "C7": "blockwise planning constant combining stacked drift and mixing",
}
