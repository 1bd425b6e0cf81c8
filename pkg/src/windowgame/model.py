"""Finite partially observable Markov games and their information structures.

A game is described by two objects: a ``PomgModel`` holding the state/action/
observation primitives, and an ``InfoStructure`` describing how the common and
private information of the players grows by one increment per stage.  Both are
immutable after construction; every tensor is indexed by position in label
declaration order, and joint action/observation indices are flattened
row-major in player order.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .budgets import Budgets, default_budgets
from .errors import InfeasibleEnumeration, SizeOverflow

KERNEL_TOL = 1e-12


def _freeze(a, dtype=float):
    arr = np.ascontiguousarray(np.asarray(a, dtype=dtype))
    arr.flags.writeable = False
    return arr


def joint_size(dims):
    n = 1
    for d in dims:
        n *= d
    return n


def components_table(dims):
    """Row-major unravel table: [joint index, player] -> component index."""
    n = joint_size(dims)
    table = np.empty((n, len(dims)), dtype=np.int64)
    for j in range(n):
        rem = j
        for i in range(len(dims) - 1, -1, -1):
            table[j, i] = rem % dims[i]
            rem //= dims[i]
    return table


def ravel_index(components, dims):
    idx = 0
    for c, d in zip(components, dims):
        idx = idx * d + c
    return idx


@dataclass(frozen=True, eq=False)
class PomgModel:
    """A finite discounted partially observable Markov game.

    Parameters
    ----------
    num_players : int
    state_labels : tuple
        Ordered state labels; tensors index states by position here.
    action_labels : tuple of tuples
        Per-player action labels.
    observation_labels : tuple of tuples
        Per-player observation labels.
    transition : ndarray, shape (n_states, n_joint_actions, n_states)
        Rows are probability vectors over successor states.
    emission : ndarray, shape (n_states, n_joint_observations)
        Probability of each joint observation given the current state.
    rewards : ndarray, shape (num_players, n_states, n_joint_actions)
    prior : ndarray, shape (n_states,)
    discount : float, in [0, 1)
    """

    num_players: int
    state_labels: tuple
    action_labels: tuple
    observation_labels: tuple
    transition: np.ndarray
    emission: np.ndarray
    rewards: np.ndarray
    prior: np.ndarray
    discount: float
    reward_bound: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "transition", _freeze(self.transition))
        object.__setattr__(self, "emission", _freeze(self.emission))
        object.__setattr__(self, "rewards", _freeze(self.rewards))
        object.__setattr__(self, "prior", _freeze(self.prior))
        # The bound is always recomputed from the table; certificates depend on it.
        object.__setattr__(self, "reward_bound", float(np.max(np.abs(self.rewards))))
        object.__setattr__(
            self, "_action_components", components_table(self.action_dims)
        )
        object.__setattr__(
            self, "_obs_components", components_table(self.observation_dims)
        )

    @property
    def num_states(self):
        return len(self.state_labels)

    @property
    def action_dims(self):
        return tuple(len(a) for a in self.action_labels)

    @property
    def observation_dims(self):
        return tuple(len(o) for o in self.observation_labels)

    @property
    def num_joint_actions(self):
        return joint_size(self.action_dims)

    @property
    def num_joint_observations(self):
        return joint_size(self.observation_dims)

    @property
    def action_components(self):
        """[joint action, player] -> per-player action index."""
        return self._action_components

    @property
    def obs_components(self):
        """[joint observation, player] -> per-player observation index."""
        return self._obs_components

    def joint_action(self, per_player):
        return ravel_index(per_player, self.action_dims)


@dataclass(frozen=True, eq=False)
class InfoStructure:
    """Time-homogeneous update kernels for common and private information.

    ``common_update`` has shape (n_private_joint + 1, n_joint_actions,
    n_joint_observations, n_common); the extra final row in the first axis is
    used at the start of play, before any private increment exists.  Each
    ``private_updates[i]`` has shape (n_private_i + 1, n_actions_i,
    n_observations_i, n_private_i) with the same convention.

    ``action_reveal``, when given, maps each common symbol to the joint action
    it certifies; the update kernel may then only emit symbols consistent with
    the action actually played.
    """

    common_labels: tuple
    private_labels: tuple
    common_update: np.ndarray
    private_updates: tuple
    action_reveal: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "common_update", _freeze(self.common_update))
        object.__setattr__(
            self, "private_updates", tuple(_freeze(k) for k in self.private_updates)
        )
        if self.action_reveal is not None:
            object.__setattr__(self, "action_reveal", tuple(self.action_reveal))
        object.__setattr__(
            self, "_private_components", components_table(self.private_dims)
        )

    @property
    def num_players(self):
        return len(self.private_labels)

    @property
    def num_common(self):
        return len(self.common_labels)

    @property
    def private_dims(self):
        return tuple(len(p) for p in self.private_labels)

    @property
    def num_private_joint(self):
        return joint_size(self.private_dims)

    @property
    def initial_row(self):
        """First-axis index of the start-of-play row of ``common_update``."""
        return self.num_private_joint

    def initial_private_row(self, player):
        return self.private_dims[player]

    @property
    def private_components(self):
        """[joint private increment, player] -> per-player symbol index."""
        return self._private_components

    def last_increment_row(self, profile):
        """Kernel row for a private-history profile (tuple of per-player tuples).

        Empty histories map to the start-of-play row.
        """
        if len(profile[0]) == 0 if profile else True:
            return self.initial_row
        return ravel_index([seq[-1] for seq in profile], self.private_dims)


@dataclass(frozen=True)
class HistoryPoint:
    """One realization of the information available after ``time`` stages."""

    common: tuple
    privates: tuple
    time: int

    def __post_init__(self):
        if len(self.common) != self.time:
            raise ValueError("common increment sequence must have one entry per stage")
        for seq in self.privates:
            if len(seq) != self.time:
                raise ValueError(
                    "private increment sequences must match the common length"
                )


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self):
        return len(self.violations) == 0


def _check_rows(violations, name, kernel, tol=KERNEL_TOL):
    arr = np.asarray(kernel)
    if np.any(arr < 0):
        violations.append(f"{name}: negative entries")
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > tol
    if np.any(bad):
        worst = float(np.max(np.abs(sums - 1.0)))
        violations.append(
            f"{name}: {int(np.count_nonzero(bad))} row(s) do not sum to 1 "
            f"(worst drift {worst:.3e})"
        )


def validate_model(model: PomgModel, info: InfoStructure) -> ValidationReport:
    """Collect every violated structural invariant; an empty report is valid."""
    v = []
    n_s, n_a, n_o = model.num_states, model.num_joint_actions, model.num_joint_observations

    if model.transition.shape != (n_s, n_a, n_s):
        v.append("transition: wrong shape")
    else:
        _check_rows(v, "transition", model.transition)
    if model.emission.shape != (n_s, n_o):
        v.append("emission: wrong shape")
    else:
        _check_rows(v, "emission", model.emission)
    if model.prior.shape != (n_s,):
        v.append("prior: wrong shape")
    else:
        if np.any(model.prior < 0) or abs(float(model.prior.sum()) - 1.0) > KERNEL_TOL:
            v.append("prior: not a probability vector")
    if model.rewards.shape != (model.num_players, n_s, n_a):
        v.append("rewards: wrong shape")
    elif abs(model.reward_bound - float(np.max(np.abs(model.rewards)))) > 0:
        v.append("reward_bound: stale, does not match the reward table")
    if not (0.0 <= model.discount < 1.0):
        v.append("discount: must lie in [0, 1)")

    if info.num_players != model.num_players:
        v.append("info: player count differs from the model")
    n_pj, n_z = info.num_private_joint, info.num_common
    if info.common_update.shape != (n_pj + 1, n_a, n_o, n_z):
        v.append("common_update: wrong shape (first axis needs the start-of-play row)")
    else:
        _check_rows(v, "common_update", info.common_update)
    for i, kern in enumerate(info.private_updates):
        n_pi = info.private_dims[i]
        want = (n_pi + 1, model.action_dims[i], model.observation_dims[i], n_pi)
        if kern.shape != want:
            v.append(f"private_update[{i}]: wrong shape {kern.shape}, expected {want}")
        else:
            _check_rows(v, f"private_update[{i}]", kern)

    if info.action_reveal is not None and info.common_update.shape == (
        n_pj + 1,
        n_a,
        n_o,
        n_z,
    ):
        if len(info.action_reveal) != n_z:
            v.append("action_reveal: needs one joint action per common symbol")
        else:
            reveal = np.asarray(info.action_reveal)
            for a in range(n_a):
                support = np.any(info.common_update[:, a, :, :] > 0, axis=(0, 1))
                bad = support & (reveal != a)
                if np.any(bad):
                    zs = np.nonzero(bad)[0]
                    v.append(
                        f"action_reveal: symbol(s) {zs.tolist()} can occur under joint "
                        f"action {a} but are declared to reveal a different action"
                    )
                    break

    return ValidationReport(tuple(v))


@dataclass(frozen=True)
class IndependenceReport:
    """Result of the numerical posterior-invariance check."""

    max_discrepancy: float
    tolerance: float
    trials: int
    histories_checked: int

    @property
    def passed(self):
        return self.max_discrepancy <= self.tolerance


def check_strategy_independence(
    model: PomgModel,
    info: InfoStructure,
    horizon: int,
    trials: int = 4,
    tolerance: float = 1e-9,
    seed: int = 0,
    budgets: Budgets = None,
) -> IndependenceReport:
    """Probe whether posteriors given common information depend on strategies.

    Draws ``trials`` pairs of pure prescription strategies, enumerates every
    common-history realization reachable under both, runs the Bayes filter
    along it under each strategy's prescriptions, and reports the largest
    total-variation discrepancy between the two posteriors.  Models for which
    this is not (numerically) zero do not admit a strategy-free filter.
    """
    from . import filtering

    budgets = budgets or default_budgets()
    rng = np.random.default_rng(seed)
    n_z = info.num_common
    action_dims = model.action_dims

    max_disc = 0.0
    histories = 0

    def random_table(local_rng, player, length):
        # One action per private sequence of the given length.
        n_seq = info.private_dims[player] ** length
        return local_rng.integers(0, action_dims[player], size=max(n_seq, 1))

    for _ in range(trials):
        strat_rngs = (
            np.random.default_rng(rng.integers(2**63)),
            np.random.default_rng(rng.integers(2**63)),
        )
        root = filtering.initial_belief(model, info)
        stack = [((), root, root, 0)]
        while stack:
            common, b1, b2, t = stack.pop()
            histories += 1
            if histories > budgets.max_nodes:
                raise InfeasibleEnumeration(
                    f"history tree exceeded {budgets.max_nodes} nodes"
                )
            if t > 0:
                max_disc = max(max_disc, filtering.tv_distance(b1, b2))
            if t == horizon:
                continue
            tables = []
            for local_rng in strat_rngs:
                tables.append(
                    [random_table(local_rng, i, t) for i in range(model.num_players)]
                )

            def act(tabs, profile):
                per = []
                for i, seq in enumerate(profile):
                    k = info.private_dims[i]
                    flat = 0
                    for sym in seq:
                        flat = flat * k + sym
                    per.append(int(tabs[i][flat]))
                return model.joint_action(per)

            for z in range(n_z):
                posts = []
                for b, tabs in zip((b1, b2), tables):
                    try:
                        posts.append(
                            filtering.public_filter_step(
                                model, info, b, lambda p, _t=tabs: act(_t, p), z
                            )
                        )
                    except filtering.ZeroLikelihood:
                        posts.append(None)
                if posts[0] is not None and posts[1] is not None:
                    stack.append((common + (z,), posts[0], posts[1], t + 1))

    return IndependenceReport(
        max_discrepancy=float(max_disc),
        tolerance=tolerance,
        trials=trials,
        histories_checked=histories,
    )


def make_example1_model(
    global_states,
    local_states_per_player,
    actions_per_player,
    transition_spec="uniform",
    reward_spec="random",
    discount=0.9,
    rng=None,
    budgets: Budgets = None,
):
    """Build a game with a public global state and per-player local states.

    The state factors as (global, local_1, ..., local_n).  Every player
    observes the global state, its own local state and the previous joint
    action; the common increment carries (global state, previous joint
    action) and player i's private increment carries its local state.  The
    common symbol therefore reveals the joint action, which is recorded in
    ``action_reveal``.

    ``transition_spec`` is either ``"uniform"``, ``"random"`` or a full
    (n_states, n_joint_actions, n_states) array.  ``reward_spec`` is
    ``"random"``, ``"zero"`` or a (players, n_states, n_joint_actions) array.
    """
    budgets = budgets or default_budgets()
    if rng is None:
        rng = np.random.default_rng(0)
    n_players = len(local_states_per_player)
    if len(actions_per_player) != n_players:
        raise ValueError("need one action count per player")
    if global_states < 1 or min(local_states_per_player) < 1 or min(actions_per_player) < 1:
        raise ValueError("all sizes must be at least 1")

    state_dims = (global_states,) + tuple(local_states_per_player)
    n_s = joint_size(state_dims)
    action_dims = tuple(actions_per_player)
    n_a = joint_size(action_dims)
    if n_s > 64 or n_a > 64:
        raise SizeOverflow(f"state/action space too large ({n_s} states, {n_a} joint actions)")

    state_comp = components_table(state_dims)
    state_labels = tuple(tuple(state_comp[s]) for s in range(n_s))
    action_labels = tuple(tuple(range(k)) for k in action_dims)
    act_comp = components_table(action_dims)

    # Observation of player i: (global state, own local state, joint action slot).
    obs_dims_per_player = [
        (global_states, local_states_per_player[i], n_a) for i in range(n_players)
    ]
    observation_labels = tuple(
        tuple(itertools.product(range(d[0]), range(d[1]), range(d[2])))
        for d in obs_dims_per_player
    )
    n_o_i = [joint_size(d) for d in obs_dims_per_player]
    n_o = joint_size(n_o_i)
    if n_o > 65536:
        raise SizeOverflow(f"joint observation space too large ({n_o})")
    obs_comp = components_table(tuple(n_o_i))

    # The action slot of the observation tuple cannot be generated from the
    # current state alone, so the emission fills it with a uniform draw shared
    # by all players; the update kernels receive the played action directly,
    # which keeps every posterior exact.
    emission = np.zeros((n_s, n_o))
    for s in range(n_s):
        comps = state_comp[s]
        for d in range(n_a):
            per_player = [
                ravel_index((comps[0], comps[1 + i], d), obs_dims_per_player[i])
                for i in range(n_players)
            ]
            o = ravel_index(per_player, tuple(n_o_i))
            emission[s, o] += 1.0 / n_a

    if isinstance(transition_spec, str):
        if transition_spec == "uniform":
            transition = np.full((n_s, n_a, n_s), 1.0 / n_s)
        elif transition_spec == "random":
            transition = rng.dirichlet(np.ones(n_s), size=(n_s, n_a))
        else:
            raise ValueError(f"unknown transition_spec {transition_spec!r}")
    else:
        transition = np.asarray(transition_spec, dtype=float)

    if isinstance(reward_spec, str):
        if reward_spec == "random":
            rewards = rng.uniform(-1.0, 1.0, size=(n_players, n_s, n_a))
        elif reward_spec == "zero":
            rewards = np.zeros((n_players, n_s, n_a))
        else:
            raise ValueError(f"unknown reward_spec {reward_spec!r}")
    else:
        rewards = np.asarray(reward_spec, dtype=float)

    model = PomgModel(
        num_players=n_players,
        state_labels=state_labels,
        action_labels=action_labels,
        observation_labels=observation_labels,
        transition=transition,
        emission=emission,
        rewards=rewards,
        prior=np.full(n_s, 1.0 / n_s),
        discount=discount,
    )

    # Common symbol: (global state read off any player's observation, action).
    common_labels = tuple(itertools.product(range(global_states), range(n_a)))
    n_z = len(common_labels)
    private_labels = tuple(tuple(range(k)) for k in local_states_per_player)
    private_dims = tuple(local_states_per_player)
    n_pj = joint_size(private_dims)

    global_of_obs1 = np.array(
        [obs_comp[o, 0] // (local_states_per_player[0] * n_a) for o in range(n_o)]
    )
    common_update = np.zeros((n_pj + 1, n_a, n_o, n_z))
    for a in range(n_a):
        for o in range(n_o):
            z = ravel_index((global_of_obs1[o], a), (global_states, n_a))
            common_update[:, a, o, z] = 1.0

    private_updates = []
    for i in range(n_players):
        n_pi = local_states_per_player[i]
        kern = np.zeros((n_pi + 1, action_dims[i], n_o_i[i], n_pi))
        for oi in range(n_o_i[i]):
            local = (oi // n_a) % n_pi
            kern[:, :, oi, local] = 1.0
        private_updates.append(kern)

    action_reveal = tuple(ravel_index((0, z % n_a), (1, n_a)) for z in range(n_z))

    info = InfoStructure(
        common_labels=common_labels,
        private_labels=private_labels,
        common_update=common_update,
        private_updates=tuple(private_updates),
        action_reveal=action_reveal,
    )
    return model, info
