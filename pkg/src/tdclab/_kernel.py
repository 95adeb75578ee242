"""Compiled trajectory loop.

One jitted function simulates a single behavior trajectory and applies the
projected two time-scale update at O(d) per step; a prange wrapper runs
many independent seeds in parallel.  The RNG is the same splitmix64 stream
as `tdclab.rng`, reimplemented here on uint64 so a compiled run and the
pure-Python sampler walk bit-identical paths from the same seed.

Draw order per run: one uniform for the initial state (from the stationary
cdf), then per step one uniform for the action and one for the successor.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_GAMMA64 = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    return z ^ (z >> _U31)


@njit(cache=True, inline="always")
def _next_uniform(state):
    state = state + _GAMMA64
    word = _mix(state)
    return state, np.float64(word >> _U11) * _INV_2_53


@njit(cache=True, inline="always")
def _draw(cdf, u, n):
    idx = np.searchsorted(cdf, u, side="right")
    if idx >= n:
        idx = n - 1
    return idx


@njit(cache=True)
def run_trajectory(seed, steps, behavior_cdf, trans_cdf, rho, phi, reward,
                   mu_cdf, gamma, alphas, betas, r_theta, r_w, theta_star,
                   psi_mat, psi_vec, grid, theta_err_out, z_err_out):
    """Simulate one seeded run, recording squared errors at `grid` times.

    grid must be strictly increasing over [0, steps]; outputs are filled
    position by position.  theta and w start at zero.
    """
    n_states = phi.shape[0]
    n_actions = behavior_cdf.shape[1]
    d = phi.shape[1]

    state = np.uint64(seed)
    theta = np.zeros(d)
    w = np.zeros(d)

    state, u0 = _next_uniform(state)
    s = _draw(mu_cdf, u0, n_states)

    gi = 0
    if grid[gi] == 0:
        err_t = 0.0
        err_z = 0.0
        for j in range(d):
            dt = theta[j] - theta_star[j]
            err_t += dt * dt
            zj = w[j] - psi_vec[j]
            for k in range(d):
                zj -= psi_mat[j, k] * theta[k]
            err_z += zj * zj
        theta_err_out[gi] = err_t
        z_err_out[gi] = err_z
        gi += 1

    r2_theta = r_theta * r_theta
    r2_w = r_w * r_w

    for t in range(steps):
        state, ua = _next_uniform(state)
        a = _draw(behavior_cdf[s], ua, n_actions)
        state, us = _next_uniform(state)
        s_next = _draw(trans_cdf[s, a], us, n_states)

        rho_sa = rho[s, a]
        r = reward[s]
        alpha = alphas[t]
        beta = betas[t]

        dot_cur = 0.0
        dot_nxt = 0.0
        dot_w = 0.0
        for j in range(d):
            dot_cur += phi[s, j] * theta[j]
            dot_nxt += phi[s_next, j] * theta[j]
            dot_w += phi[s, j] * w[j]
        delta = r + gamma * dot_nxt - dot_cur

        norm_t = 0.0
        norm_w = 0.0
        for j in range(d):
            th = theta[j] + alpha * (rho_sa * delta * phi[s, j]
                                     - gamma * rho_sa * dot_w * phi[s_next, j])
            wv = w[j] + beta * (rho_sa * delta * phi[s, j] - dot_w * phi[s, j])
            theta[j] = th
            w[j] = wv
            norm_t += th * th
            norm_w += wv * wv
        if norm_t > r2_theta:
            scale = r_theta / np.sqrt(norm_t)
            for j in range(d):
                theta[j] *= scale
        if norm_w > r2_w:
            scale = r_w / np.sqrt(norm_w)
            for j in range(d):
                w[j] *= scale

        s = s_next

        if gi < grid.shape[0] and grid[gi] == t + 1:
            err_t = 0.0
            err_z = 0.0
            for j in range(d):
                dt = theta[j] - theta_star[j]
                err_t += dt * dt
                zj = w[j] - psi_vec[j]
                for k in range(d):
                    zj -= psi_mat[j, k] * theta[k]
                err_z += zj * zj
            theta_err_out[gi] = err_t
            z_err_out[gi] = err_z
            gi += 1


@njit(cache=True, parallel=True)
def run_trajectories(seeds, steps, behavior_cdf, trans_cdf, rho, phi, reward,
                     mu_cdf, gamma, alphas, betas, r_theta, r_w, theta_star,
                     psi_mat, psi_vec, grid, theta_err_out, z_err_out):
    """Run every seed in parallel; row i of the outputs belongs to seeds[i].

    Each run is a pure function of its own seed, so scheduling order cannot
    change any output bit.
    """
    for i in prange(seeds.shape[0]):
        run_trajectory(seeds[i], steps, behavior_cdf, trans_cdf, rho, phi,
                       reward, mu_cdf, gamma, alphas, betas, r_theta, r_w,
                       theta_star, psi_mat, psi_vec, grid,
                       theta_err_out[i], z_err_out[i])
