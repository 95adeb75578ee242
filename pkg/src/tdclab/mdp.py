"""Random Garnet problems, their induced chains, and trajectory sampling.

A problem instance is the triple (Mdp, PolicyPair, FeatureMap).  The
generator follows the classic Garnet recipe: for every state-action pair,
`branching` successor states chosen without replacement receive probability
mass cut from p-1 sorted uniform points; rewards are state-dependent
uniforms on [0, 1]; feature rows are standard normal scaled to unit norm;
both policies are flat-Dirichlet rows.  Instances that lose feature rank
or whose behavior chain is not usably ergodic are regenerated from a
perturbed seed a bounded number of times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInstance, InvalidArgument, NotErgodic
from .rng import SplitMix64, split_seed

__all__ = [
    "Mdp",
    "PolicyPair",
    "FeatureMap",
    "Observation",
    "MixingEstimate",
    "generate_garnet",
    "induced_chain",
    "stationary_distribution",
    "mixing_constants",
    "sample_step",
    "instance_to_json",
    "instance_from_json",
    "save_instance",
    "load_instance",
]

_ROW_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    out.setflags(write=False)
    return out


def _check_stochastic(rows: np.ndarray, what: str) -> None:
    if np.any(rows < 0.0):
        raise InvalidArgument(f"{what} has negative entries")
    err = np.max(np.abs(rows.sum(axis=-1) - 1.0))
    if err > _ROW_TOL:
        raise InvalidArgument(f"{what} rows deviate from sum 1 by {err:.3e}")


@dataclass(frozen=True)
class Mdp:
    """Finite MDP with a state-dependent reward."""

    n_states: int
    n_actions: int
    transition: np.ndarray  # (n_states, n_actions, n_states)
    reward: np.ndarray      # (n_states,)
    gamma: float
    r_max: float = 1.0

    def __post_init__(self):
        if self.n_states < 1 or self.n_actions < 1:
            raise InvalidArgument("state and action counts must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise InvalidArgument(f"gamma must lie strictly inside (0,1), got {self.gamma}")
        t = _frozen(self.transition)
        r = _frozen(self.reward)
        if t.shape != (self.n_states, self.n_actions, self.n_states):
            raise InvalidArgument(f"transition tensor has shape {t.shape}")
        if r.shape != (self.n_states,):
            raise InvalidArgument(f"reward vector has shape {r.shape}")
        _check_stochastic(t, "transition")
        if np.any(r < 0.0) or np.any(r > self.r_max + _ROW_TOL):
            raise InvalidArgument("reward entries must lie in [0, r_max]")
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "reward", r)


@dataclass(frozen=True)
class PolicyPair:
    """Behavior and target policies with precomputed importance ratios."""

    behavior: np.ndarray  # (n_states, n_actions)
    target: np.ndarray    # (n_states, n_actions)
    rho: np.ndarray = field(init=False)
    rho_max: float = field(init=False)

    def __post_init__(self):
        b = _frozen(self.behavior)
        p = _frozen(self.target)
        if b.shape != p.shape or b.ndim != 2:
            raise InvalidArgument("behavior and target must be matrices of equal shape")
        _check_stochastic(b, "behavior policy")
        _check_stochastic(p, "target policy")
        if np.any(b <= 0.0):
            raise InvalidArgument("behavior policy must be strictly positive everywhere")
        rho = _frozen(p / b)
        object.__setattr__(self, "behavior", b)
        object.__setattr__(self, "target", p)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "rho_max", float(rho.max()))


@dataclass(frozen=True)
class FeatureMap:
    """State features, one row per state, norms capped at 1, full column rank."""

    phi: np.ndarray  # (n_states, d)

    def __post_init__(self):
        phi = _frozen(self.phi)
        if phi.ndim != 2:
            raise InvalidArgument("phi must be a matrix")
        norms = np.linalg.norm(phi, axis=1)
        if norms.max() > 1.0 + _ROW_TOL:
            raise InvalidArgument(f"feature row norm {norms.max():.6f} exceeds 1")
        if np.linalg.matrix_rank(phi) < phi.shape[1]:
            raise InvalidArgument("feature columns are linearly dependent")
        object.__setattr__(self, "phi", phi)

    @property
    def d(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class Observation:
    """One behavior-trajectory transition (s, a, r, s_next)."""

    s: int
    a: int
    r: float
    s_next: int


@dataclass(frozen=True)
class MixingEstimate:
    """Fitted geometric envelope for the worst-start total-variation curve.

    The invariant tv_curve[t-1] <= m_hat * rho_hat**t holds exactly (in
    floating point) at every recorded t; the constructor re-verifies it.
    """

    m_hat: float
    rho_hat: float
    horizon: int
    tv_curve: np.ndarray  # tv_curve[i] is d(i+1)

    def __post_init__(self):
        curve = _frozen(self.tv_curve)
        object.__setattr__(self, "tv_curve", curve)
        if not 0.0 < self.rho_hat < 1.0:
            raise InvalidArgument(f"rho_hat must lie in (0,1), got {self.rho_hat}")
        if self.m_hat <= 0.0:
            raise InvalidArgument("m_hat must be positive")
        envelope = self.m_hat * self.rho_hat ** np.arange(1, len(curve) + 1)
        if np.any(curve > envelope):
            raise InvalidArgument("mixing envelope fails to dominate the recorded curve")


# ---------------------------------------------------------------------------
# generation


def generate_garnet(n_states: int, n_actions: int, branching: int,
                    n_features: int, seed: int, *,
                    gamma: float = 0.95) -> tuple[Mdp, PolicyPair, FeatureMap]:
    """Draw one Garnet instance G(n_states, n_actions, branching, n_features).

    Retries with a perturbed seed (at most 16 times) whenever the feature
    matrix loses column rank or the behavior chain fails the ergodicity
    check (stationary distribution unreachable, or some state carries less
    than 1e-12 stationary mass).
    """
    if not 1 <= branching <= n_states:
        raise InvalidArgument(f"branching must lie in [1, {n_states}], got {branching}")
    if n_features < 1:
        raise InvalidArgument("need at least one feature")
    if n_features > n_states:
        raise InvalidArgument("more features than states cannot have full column rank")

    last_failure = "no attempt made"
    for attempt in range(17):
        rng = np.random.default_rng(seed if attempt == 0 else split_seed(seed, attempt))
        transition = np.zeros((n_states, n_actions, n_states))
        for s in range(n_states):
            for a in range(n_actions):
                succ = rng.choice(n_states, size=branching, replace=False)
                cuts = np.sort(rng.uniform(size=branching - 1))
                probs = np.diff(np.concatenate(([0.0], cuts, [1.0])))
                transition[s, a, succ] = probs
        reward = rng.uniform(size=n_states)
        raw = rng.standard_normal((n_states, n_features))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            last_failure = "zero feature row"
            continue
        phi = raw / norms
        behavior = rng.dirichlet(np.ones(n_actions), size=n_states)
        target = rng.dirichlet(np.ones(n_actions), size=n_states)

        if np.linalg.matrix_rank(phi) < n_features:
            last_failure = "feature matrix rank-deficient"
            continue
        if np.any(behavior <= 0.0):
            last_failure = "behavior policy touched zero"
            continue
        mdp = Mdp(n_states, n_actions, transition, reward, gamma)
        policies = PolicyPair(behavior, target)
        try:
            mu = stationary_distribution(induced_chain(mdp, policies.behavior))
        except NotErgodic:
            last_failure = "behavior chain not ergodic"
            continue
        if mu.min() < 1e-12:
            last_failure = "stationary mass vanishes on some state"
            continue
        return mdp, policies, FeatureMap(phi)

    raise DegenerateInstance(
        f"no usable instance after 17 attempts (last failure: {last_failure})")


def induced_chain(mdp: Mdp, policy: np.ndarray) -> np.ndarray:
    """State chain under `policy`: P[s, s'] = sum_a transition[s,a,s'] policy[s,a]."""
    policy = np.asarray(policy, dtype=np.float64)
    _check_stochastic(policy, "policy")
    chain = np.einsum("saj,sa->sj", mdp.transition, policy)
    assert np.max(np.abs(chain.sum(axis=1) - 1.0)) <= _ROW_TOL
    return chain


def stationary_distribution(P: np.ndarray, *, tol: float = 1e-12,
                            max_iter: int = 10 ** 6) -> np.ndarray:
    """Stationary distribution of a row-stochastic P by power iteration.

    Iterates mu <- mu P from the uniform vector until the L1 residual drops
    below `tol`.  To catch chains where the uniform start happens to sit on
    a fixed point of a reducible or periodic chain (the identity matrix is
    the canonical offender), the iteration is repeated from two point-mass
    starts and all three limits must agree.
    """
    P = np.asarray(P, dtype=np.float64)
    _check_stochastic(P, "chain")
    n = P.shape[0]

    def iterate(start: np.ndarray) -> np.ndarray:
        mu = start
        for _ in range(max_iter):
            nxt = mu @ P
            nxt /= nxt.sum()
            if np.abs(nxt - mu).sum() <= tol:
                return nxt
            mu = nxt
        raise NotErgodic(f"no stationary fixed point within {max_iter} iterations")

    mu = iterate(np.full(n, 1.0 / n))
    if n > 1:
        for probe_state in (0, n - 1):
            probe = np.zeros(n)
            probe[probe_state] = 1.0
            if np.abs(iterate(probe) - mu).sum() > 1e-10:
                raise NotErgodic("different starting states reach different limits")
    return mu


def mixing_constants(P: np.ndarray, mu: np.ndarray, tol: float = 1e-8,
                     *, max_horizon: int = 10 ** 5) -> MixingEstimate:
    """Fit a geometric envelope m_hat * rho_hat**t over the worst-start TV curve.

    d(t) = max_s TV(P^t(s, .), mu) is recorded until it falls below `tol`;
    rho_hat comes from the ratio between the end and the midpoint of the
    recorded curve, m_hat from the largest ratio d(t)/rho_hat**t.  The
    one-step-exact-mixing case d(1) = 0 reports the documented convention
    (rho_hat = 0.5, m_hat = 1).
    """
    P = np.asarray(P, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    powers = P.copy()
    curve = []
    for _ in range(max_horizon):
        d_t = 0.5 * np.max(np.abs(powers - mu).sum(axis=1))
        curve.append(d_t)
        if d_t < tol:
            break
        powers = powers @ P
    else:
        raise NotErgodic(f"worst-start TV stuck at {curve[-1]:.3e} after {max_horizon} steps")

    curve = np.array(curve)
    horizon = len(curve)
    if curve[0] == 0.0:
        return MixingEstimate(m_hat=1.0, rho_hat=0.5, horizon=horizon, tv_curve=curve)

    positive = np.nonzero(curve > 0.0)[0]
    t_end = positive[-1] + 1          # 1-based time of the last positive entry
    t_mid = max(1, t_end // 2)
    if t_end > t_mid:
        rho_hat = (curve[t_end - 1] / curve[t_mid - 1]) ** (1.0 / (t_end - t_mid))
        rho_hat = min(max(rho_hat, 1e-12), 1.0 - 1e-12)
    else:
        rho_hat = 0.5  # curve already under tol at t = 1; no tail to fit

    t_grid = np.arange(1, horizon + 1)
    m_hat = float(np.max(curve / rho_hat ** t_grid))
    # One-ulp style slack so the domination invariant survives the re-multiplied check.
    m_hat *= 1.0 + 1e-12
    while np.any(curve > m_hat * rho_hat ** t_grid):
        m_hat *= 1.0 + 1e-12
    return MixingEstimate(m_hat=m_hat, rho_hat=rho_hat, horizon=horizon, tv_curve=curve)


# ---------------------------------------------------------------------------
# sampling


def sample_step(mdp: Mdp, policies: PolicyPair, s: int, rng: SplitMix64) -> Observation:
    """Draw one behavior transition from state s.

    Consumes exactly two uniforms from `rng` (action, then successor), so a
    fixed seed reproduces the same observation stream bit for bit.  The
    compiled trajectory kernel implements the same draws in the same order;
    the two samplers produce identical paths from identical seeds.
    """
    u_action = rng.uniform()
    cdf_a = np.cumsum(policies.behavior[s])
    a = int(np.searchsorted(cdf_a, u_action, side="right"))
    if a >= mdp.n_actions:
        a = mdp.n_actions - 1
    u_next = rng.uniform()
    cdf_s = np.cumsum(mdp.transition[s, a])
    s_next = int(np.searchsorted(cdf_s, u_next, side="right"))
    if s_next >= mdp.n_states:
        s_next = mdp.n_states - 1
    return Observation(s=s, a=a, r=float(mdp.reward[s]), s_next=s_next)


# ---------------------------------------------------------------------------
# serialization


def instance_to_json(mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                     generator: dict | None = None) -> str:
    """Single JSON document for the whole instance.

    Floats serialize through repr (shortest digits that round-trip), so a
    load immediately after a save reproduces every array bit-exactly.
    """
    doc = {
        "n_states": mdp.n_states,
        "n_actions": mdp.n_actions,
        "gamma": mdp.gamma,
        "r_max": mdp.r_max,
        "transition": mdp.transition.tolist(),
        "reward": mdp.reward.tolist(),
        "behavior": policies.behavior.tolist(),
        "target": policies.target.tolist(),
        "phi": features.phi.tolist(),
        "generator": generator,
    }
    return json.dumps(doc)


def instance_from_json(text: str) -> tuple[Mdp, PolicyPair, FeatureMap]:
    doc = json.loads(text)
    try:
        mdp = Mdp(
            n_states=int(doc["n_states"]),
            n_actions=int(doc["n_actions"]),
            transition=np.array(doc["transition"], dtype=np.float64),
            reward=np.array(doc["reward"], dtype=np.float64),
            gamma=float(doc["gamma"]),
            r_max=float(doc.get("r_max", 1.0)),
        )
        policies = PolicyPair(
            behavior=np.array(doc["behavior"], dtype=np.float64),
            target=np.array(doc["target"], dtype=np.float64),
        )
        features = FeatureMap(phi=np.array(doc["phi"], dtype=np.float64))
    except KeyError as missing:
        raise InvalidArgument(f"instance document lacks field {missing}") from None
    return mdp, policies, features


def save_instance(path, mdp: Mdp, policies: PolicyPair, features: FeatureMap,
                  generator: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(instance_to_json(mdp, policies, features, generator))
        fh.write("\n")


def load_instance(path) -> tuple[Mdp, PolicyPair, FeatureMap]:
    with open(path) as fh:
        return instance_from_json(fh.read())
