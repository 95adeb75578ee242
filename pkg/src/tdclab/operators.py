"""Exact mean-path operators for off-policy TDC with linear features.

Everything here is deterministic linear algebra on the finite instance:
the four operator blocks (A, B, C, b) as exact expectations under the
behavior chain's stationary distribution, the fixed point theta_star, the
projected-Bellman-error objective, the fast-variable stationary map psi,
the spectral constants that drive every finite-time bound downstream, and
the projection radii for the two balls the iteration lives in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NotNegativeDefinite, SingularOperator
from .mdp import FeatureMap, Mdp, MixingEstimate, PolicyPair, induced_chain, \
    mixing_constants, stationary_distribution

__all__ = [
    "ProblemData",
    "exact_operators",
    "optimal_theta",
    "mspbe",
    "psi",
    "spectral_params",
    "projection_radii",
    "build_problem_data",
]

_COND_CAP = 1e12


def _solve(M: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    try:
        x = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        raise SingularOperator(f"{what} is singular") from None
    residual = np.linalg.norm(M @ x - rhs)
    if not np.isfinite(residual) or residual > 1e-10 * (1.0 + np.linalg.norm(rhs)):
        raise SingularOperator(f"{what} solve residual {residual:.3e} too large")
    return x


def exact_operators(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                    mu: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Exact expectations of the per-sample update matrices.

    With weight mu(s) * behavior(a|s) * rho(s,a) on each (s,a) and the
    transition row marginalizing s', the blocks are

        A = E[rho phi(s) (gamma phi(s') - phi(s))^T]
        B = -gamma E[rho phi(s') phi(s)^T]
        C = -E[phi(s) phi(s)^T]
        b = E[rho r(s) phi(s)]

    computed as dense sums, no sampling anywhere.
    """
    mu = np.asarray(mu, dtype=np.float64)
    phi = features.phi
    if mu.shape != (mdp.n_states,):
        raise InvalidArgument(f"mu must have shape ({mdp.n_states},)")
    if abs(float(mu.sum()) - 1.0) > 1e-10 or np.any(mu < 0.0):
        raise InvalidArgument("mu must be a probability vector")
    weight = mu[:, None] * policies.behavior * policies.rho  # (S, A)
    next_feat = mdp.transition @ phi                         # (S, A, d): E[phi(s')|s,a]

    drift = mdp.gamma * next_feat - phi[:, None, :]          # (S, A, d)
    A = np.einsum("sa,sd,sae->de", weight, phi, drift)
    B = -mdp.gamma * np.einsum("sa,sad,se->de", weight, next_feat, phi)
    C = -(phi * mu[:, None]).T @ phi
    C = 0.5 * (C + C.T)
    b = phi.T @ (weight.sum(axis=1) * mdp.reward)

    for name, M in (("A", A), ("C", C)):
        if np.linalg.cond(M) > _COND_CAP:
            raise SingularOperator(f"operator {name} has condition estimate above {_COND_CAP:.0e}")
    return A, B, C, b


@dataclass(frozen=True)
class ProblemData:
    """Everything the algorithm and the bounds need about one instance."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    b: np.ndarray
    C_inv: np.ndarray
    mu: np.ndarray
    theta_star: np.ndarray
    lambda_theta: float
    lambda_w: float
    lambda_cm: float
    R_theta: float
    R_w: float
    mixing: MixingEstimate | None = None

    def __post_init__(self):
        d = self.b.shape[0]
        if np.linalg.norm(self.A @ self.theta_star + self.b) > 1e-10 * (1.0 + np.linalg.norm(self.b)):
            raise InvalidArgument("theta_star does not solve A theta + b = 0")
        if np.max(np.abs(self.C - self.C.T)) > 1e-12:
            raise InvalidArgument("C must be symmetric")
        if np.max(np.abs(self.C_inv @ self.C - np.eye(d))) > 1e-10:
            raise InvalidArgument("C_inv is not an inverse of C")
        if not (self.lambda_theta < 0.0 and self.lambda_w < 0.0):
            raise NotNegativeDefinite("curvature constants must be negative")
        if self.lambda_cm <= 0.0:
            raise InvalidArgument("lambda_cm must be positive")
        if self.R_theta <= 0.0 or self.R_w <= 0.0:
            raise InvalidArgument("projection radii must be positive")
        if np.linalg.norm(self.theta_star) > self.R_theta * (1.0 + 1e-12):
            raise InvalidArgument("theta_star falls outside the slow ball")


def optimal_theta(problem: ProblemData) -> np.ndarray:
    """The unique zero of the mean path, theta* = -A^{-1} b."""
    return _solve(problem.A, -problem.b, "A")


def mspbe(problem: ProblemData, theta: np.ndarray) -> float:
    """Projected-Bellman-error objective (A theta + b)^T (-C)^{-1} (A theta + b)."""
    residual = problem.A @ theta + problem.b
    value = float(residual @ _solve(-problem.C, residual, "-C"))
    return max(value, 0.0)


def psi(problem: ProblemData, theta: np.ndarray) -> np.ndarray:
    """Stationary point of the fast variable at frozen theta: -C^{-1}(b + A theta)."""
    return _solve(problem.C, -(problem.b + problem.A @ theta), "C")


def spectral_params(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> tuple[float, float, float]:
    """Tight negative-curvature constants of the two time scales.

    lambda_theta tops the spectrum of 2 A^T C^{-1} A (slow scale),
    lambda_w tops 2C (fast scale), and lambda_cm is the smallest
    eigenvalue magnitude of C.  B takes no part in these but rides along
    in the signature because the three matrices travel together.
    """
    del B
    if np.max(np.abs(C - C.T)) > 1e-12:
        raise InvalidArgument("C must be symmetric")
    C_inv_A = _solve(C, A, "C")
    M = A.T @ C_inv_A
    M = M + M.T  # equals 2 A^T C^{-1} A, symmetrized exactly
    lambda_theta = float(np.linalg.eigvalsh(M)[-1])
    eig_C = np.linalg.eigvalsh(C)
    lambda_w = float(2.0 * eig_C[-1])
    lambda_cm = float(np.min(np.abs(eig_C)))
    if lambda_theta >= 0.0 or lambda_w >= 0.0:
        raise NotNegativeDefinite(
            f"instance breaks the negative-curvature premises "
            f"(lambda_theta={lambda_theta:.3e}, lambda_w={lambda_w:.3e})")
    return lambda_theta, lambda_w, lambda_cm


def _radii(A: np.ndarray, C: np.ndarray, b: np.ndarray,
           theta_star: np.ndarray) -> tuple[float, float]:
    norm_A = np.linalg.norm(A, 2)
    norm_A_inv = 1.0 / np.linalg.svd(A, compute_uv=False)[-1]
    norm_C_inv = 1.0 / np.linalg.svd(C, compute_uv=False)[-1]
    norm_b = np.linalg.norm(b)
    # Doubled max of every plausible reading of the lower bound, so the fixed
    # point sits strictly inside the ball whichever reading was intended.
    R_theta = 2.0 * max(norm_A * norm_b, norm_A_inv * norm_b, np.linalg.norm(theta_star))
    R_w = 2.0 * norm_C_inv * norm_A * R_theta
    return float(R_theta), float(R_w)


def projection_radii(problem: ProblemData) -> tuple[float, float]:
    """Ball radii for the two iterates, recomputed from the stored operators."""
    return _radii(problem.A, problem.C, problem.b, problem.theta_star)


def build_problem_data(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                       *, mixing_tol: float = 1e-8,
                       with_mixing: bool = True) -> ProblemData:
    """Assemble the full ProblemData for one instance.

    Runs the whole deterministic pipeline: stationary distribution of the
    behavior chain, exact operators, fixed point, spectral constants,
    projection radii, and (unless disabled) the mixing-envelope fit.
    """
    chain = induced_chain(mdp, policies.behavior)
    mu = stationary_distribution(chain)
    A, B, C, b = exact_operators(mdp, policies, features, mu)
    theta_star = _solve(A, -b, "A")
    lambda_theta, lambda_w, lambda_cm = spectral_params(A, B, C)
    R_theta, R_w = _radii(A, C, b, theta_star)
    d = b.shape[0]
    C_inv = _solve(C, np.eye(d), "C")
    mixing = mixing_constants(chain, mu, mixing_tol) if with_mixing else None
    return ProblemData(
        A=A, B=B, C=C, b=b, C_inv=C_inv, mu=mu, theta_star=theta_star,
        lambda_theta=lambda_theta, lambda_w=lambda_w, lambda_cm=lambda_cm,
        R_theta=R_theta, R_w=R_w, mixing=mixing,
    )
