"""Decoy placement as a POMDP over attacker progress, solved online with POMCP.

The attacker state is the set of compromised attack leaves plus the leaf it
entered last. Each step the attacker enters one more leaf of some minimal
scenario; the defender only sees the alert category that leaf raises (or
silence) and chooses which leaves to shadow with decoys for the next step.
"""

from __future__ import annotations

import configparser
import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field, fields, replace
from itertools import accumulate, combinations
from typing import Hashable, Mapping, NamedTuple, Sequence

from .errors import BeliefCollapseError, ConfigError, OverflowLimitError, ValidationError
from .hmm import DecodedPath
from .tree import AttackDefenseTree, AttackScenario, enumerate_scenarios

SILENCE = "-"
DECOY_ALERT = "decoy"


@dataclass(frozen=True)
class PlannerConfig:
    gamma: float = 0.95
    c_ucb: float = 100.0
    particles: int = 1000
    budget: int = 1000
    p_pred: float = 0.7
    r_catch: float = 10.0
    r_goal: float = 100.0
    decoy_cost: float = 0.1
    max_decoys: int = 2
    horizon: int = 20
    rollout_depth: int = 20
    rho: float = 0.8
    seed: int = 0
    max_states: int = 100_000

    def __post_init__(self) -> None:
        if not 0 < self.gamma < 1:
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.particles < 1:
            raise ConfigError(f"particle count K must be >= 1, got {self.particles}")
        if self.budget < 1:
            raise ConfigError(f"simulation budget must be >= 1, got {self.budget}")
        if not 0 <= self.p_pred <= 1 or not 0 <= self.rho <= 1:
            raise ConfigError("p_pred and rho must lie in [0, 1]")
        if self.max_decoys < 0 or self.horizon < 1 or self.rollout_depth < 0:
            raise ConfigError("max_decoys, horizon and rollout_depth must be non-negative (horizon >= 1)")
        if self.c_ucb < 0 or self.r_catch < 0 or self.r_goal < 0 or self.decoy_cost < 0:
            raise ConfigError("c_ucb, rewards and decoy cost must be non-negative magnitudes")


_CONFIG_TYPES = {f.name: f.type for f in fields(PlannerConfig)}


def planner_config_from_mapping(values: Mapping[str, str], base: PlannerConfig | None = None) -> PlannerConfig:
    base = base or PlannerConfig()
    updates = {}
    for key, raw in values.items():
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"unknown planner key {key!r}")
        kind = int if _CONFIG_TYPES[key] in (int, "int") else float
        try:
            updates[key] = kind(raw)
        except ValueError:
            raise ConfigError(f"planner key {key!r}: cannot parse {raw!r}") from None
    return replace(base, **updates)


def load_planner_config(text: str) -> PlannerConfig:
    """``key = value`` lines, optionally under a ``[planner]`` header."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    body = text if text.lstrip().startswith("[") else "[planner]\n" + text
    try:
        parser.read_string(body)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    extra = [s for s in parser.sections() if s != "planner"]
    if extra:
        raise ConfigError(f"unknown section {extra[0]!r}")
    return planner_config_from_mapping(dict(parser["planner"]) if parser.has_section("planner") else {})


def dump_planner_config(cfg: PlannerConfig) -> str:
    return "[planner]\n" + "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in fields(cfg))


# ------------------------------------------------------------ generic POMDP

Outcome = tuple[float, int, float]  # probability, next state, reward


@dataclass(eq=False)
class Pomdp:
    """Finite POMDP with sparse kernels.

    ``outcomes[s][a]`` lists (p, s', r); ``obs_model[a][s']`` lists (p, o).
    Terminal states are absorbing and end a simulation.
    """

    states: list[Hashable]
    actions: list[Hashable]
    observations: list[Hashable]
    outcomes: list[list[list[Outcome]]]
    obs_model: list[list[list[tuple[float, int]]]]
    terminal: list[bool]
    discount: float = 0.95
    _joint: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for s, row in enumerate(self.outcomes):
            for a, outs in enumerate(row):
                total = math.fsum(p for p, _, _ in outs)
                if abs(total - 1.0) > 1e-9:
                    raise ValidationError(f"transition row ({self.states[s]!r}, {self.actions[a]!r}) sums to {total}")
        for a, per_state in enumerate(self.obs_model):
            for s2, obs in enumerate(per_state):
                total = math.fsum(p for p, _ in obs)
                if abs(total - 1.0) > 1e-9:
                    raise ValidationError(f"observation row ({self.actions[a]!r}, {self.states[s2]!r}) sums to {total}")

    @property
    def reward_bounds(self) -> tuple[float, float]:
        rs = [r for row in self.outcomes for outs in row for _, _, r in outs]
        return min(rs), max(rs)

    def joint(self, s: int, a: int) -> tuple[list[float], list[tuple[int, int, float]]]:
        """Cumulative table over (s', o, r) for sampling one step."""
        key = (s, a)
        table = self._joint.get(key)
        if table is None:
            probs, items = [], []
            for p, s2, r in self.outcomes[s][a]:
                for q, o in self.obs_model[a][s2]:
                    if p * q > 0:
                        probs.append(p * q)
                        items.append((s2, o, r))
            cum = list(accumulate(probs))
            cum[-1] = max(cum[-1], 1.0)
            table = (cum, items)
            self._joint[key] = table
        return table

    def step(self, s: int, a: int, rng: random.Random) -> tuple[int, int, float]:
        cum, items = self.joint(s, a)
        return items[min(bisect_right(cum, rng.random() * cum[-1]), len(items) - 1)]

    def obs_prob(self, a: int, s2: int, o: int) -> float:
        return math.fsum(p for p, obs in self.obs_model[a][s2] if obs == o)


# -------------------------------------------------------- attacker movement

class AttackerState(NamedTuple):
    position: str  # entered leaf, "start" or "caught"
    compromised: frozenset
    status: str  # "active", "goal" or "caught"


START = AttackerState("start", frozenset(), "active")
CAUGHT = AttackerState("caught", frozenset(), "caught")


def admissible_moves(leaves: Sequence[str], scenarios: Sequence[AttackScenario], compromised: frozenset) -> list[str]:
    """Uncompromised leaves that belong to a scenario still open to the attacker."""
    if any(s.leaf_set <= compromised for s in scenarios):
        return []
    useful = set().union(*(s.leaf_set for s in scenarios)) if scenarios else set()
    return [leaf for leaf in leaves if leaf in useful and leaf not in compromised]


def predicted_move(tree: AttackDefenseTree, scenarios: Sequence[AttackScenario], compromised: frozenset) -> str | None:
    """Next leaf of the cheapest completion: remaining leaf weight, then scenario order, then leaf weight and order."""
    order = {leaf: i for i, leaf in enumerate(tree.leaves)}

    def weight(leaf: str) -> float:
        w = tree.nodes[leaf].weight
        return 1.0 if w is None else w

    best = None
    for idx, s in enumerate(scenarios):
        rest = s.leaf_set - compromised
        if not rest:
            return None
        key = (math.fsum(weight(x) for x in rest), idx)
        if best is None or key < best[0]:
            best = (key, rest)
    if best is None:
        return None
    return min(best[1], key=lambda x: (weight(x), order[x]))


def move_distribution(
    tree: AttackDefenseTree, scenarios: Sequence[AttackScenario], compromised: frozenset, p_pred: float
) -> dict[str, float]:
    """Attacker kernel: the predicted move with probability p_pred, otherwise uniform over the rest."""
    moves = admissible_moves(tree.leaves, scenarios, compromised)
    if not moves:
        return {}
    pred = predicted_move(tree, scenarios, compromised)
    others = [m for m in moves if m != pred]
    if not others:
        return {pred: 1.0}
    dist = {m: (1.0 - p_pred) / len(others) for m in others}
    dist[pred] = p_pred
    return {m: dist[m] for m in moves if dist[m] > 0}


@dataclass(frozen=True)
class MonitoringModel:
    """Leaf to alert-category map with false-negative and confusion noise."""

    alert_map: Mapping[str, str]
    false_negative: float = 0.0
    confusion: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alert_map", dict(self.alert_map))
        for name in ("false_negative", "confusion"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValidationError(f"{name} rate must lie in [0, 1], got {v}")

    @property
    def categories(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.alert_map.values())))

    def distribution(self, leaf: str) -> dict[str, float]:
        """P(alert | leaf entered); ``SILENCE`` stands for a missed detection."""
        cats = self.categories
        true = self.alert_map[leaf]
        emitted = 1.0 - self.false_negative
        if len(cats) == 1:
            dist = {true: emitted}
        else:
            dist = {c: emitted * self.confusion / (len(cats) - 1) for c in cats}
            dist[true] = emitted * (1.0 - self.confusion)
        dist[SILENCE] = self.false_negative
        return {k: v for k, v in dist.items() if v > 0}

    def emit(self, leaf: str, rng: random.Random) -> str | None:
        """One noisy alert for ``leaf``; None when the monitor misses it."""
        if self.false_negative > 0 and rng.random() < self.false_negative:
            return None
        true = self.alert_map[leaf]
        if self.confusion > 0 and len(self.categories) > 1 and rng.random() < self.confusion:
            return rng.choice([c for c in self.categories if c != true])
        return true


@dataclass(eq=False)
class AttackerPomdp:
    tree: AttackDefenseTree
    monitoring: MonitoringModel
    config: PlannerConfig
    scenarios: list[AttackScenario]
    pomdp: Pomdp
    index: dict[AttackerState, int]

    @property
    def states(self) -> list[AttackerState]:
        return self.pomdp.states  # type: ignore[return-value]

    @property
    def actions(self) -> list[tuple[str, ...]]:
        return self.pomdp.actions  # type: ignore[return-value]

    def action_index(self, placement: Sequence[str]) -> int:
        key = tuple(sorted(placement))
        try:
            return self.pomdp.actions.index(key)
        except ValueError:
            raise ValidationError(f"{key!r} is not an admissible decoy placement") from None

    def observation_index(self, alert: str | None) -> int:
        label = SILENCE if alert is None else alert
        try:
            return self.pomdp.observations.index(label)
        except ValueError:
            raise ValidationError(f"unknown observation {label!r}") from None

    def start_adjacent(self) -> list[int]:
        """States reachable from the start by one attacker move."""
        s0 = self.index[START]
        return sorted({s2 for _, s2, _ in self.pomdp.outcomes[s0][0]})

    def states_at_depth(self, depth: int) -> list[int]:
        return [
            i for i, st in enumerate(self.states)
            if st.status != "caught" and len(st.compromised) == depth
        ]


def build_pomdp(
    tree: AttackDefenseTree,
    alert_map: Mapping[str, str] | MonitoringModel,
    config: PlannerConfig | None = None,
    decoy_leaves: Sequence[str] | None = None,
) -> AttackerPomdp:
    cfg = config or PlannerConfig()
    monitoring = alert_map if isinstance(alert_map, MonitoringModel) else MonitoringModel(alert_map)
    if tree.root is None or not tree.leaves:
        raise ValidationError("cannot build a POMDP from an empty tree")
    unmapped = [leaf for leaf in tree.leaves if leaf not in monitoring.alert_map]
    if unmapped:
        raise ValidationError(f"leaf {unmapped[0]!r} has no alert category")
    scenarios = enumerate_scenarios(tree)
    candidates = list(tree.leaves if decoy_leaves is None else decoy_leaves)
    for leaf in candidates:
        if leaf not in tree.leaves:
            raise ValidationError(f"decoy candidate {leaf!r} is not an attack leaf")
    actions: list[tuple[str, ...]] = [()]
    for k in range(1, min(cfg.max_decoys, len(candidates)) + 1):
        actions.extend(tuple(sorted(c)) for c in combinations(candidates, k))
    actions.sort()

    observations = list(monitoring.categories) + [SILENCE, DECOY_ALERT]
    obs_idx = {o: i for i, o in enumerate(observations)}

    # enumerate reachable attacker states breadth-first from the start
    states: list[AttackerState] = [START]
    index = {START: 0}
    moves: dict[int, dict[str, float]] = {}
    frontier = [START]
    while frontier:
        nxt = []
        for st in frontier:
            dist = move_distribution(tree, scenarios, st.compromised, cfg.p_pred)
            moves[index[st]] = dist
            for leaf in dist:
                comp = st.compromised | {leaf}
                status = "goal" if tree.evaluate(comp) else "active"
                child = AttackerState(leaf, comp, status)
                if child not in index:
                    index[child] = len(states)
                    states.append(child)
                    if len(states) + 1 > cfg.max_states:
                        raise OverflowLimitError(f"attacker POMDP exceeds {cfg.max_states} states")
                    if status == "active":
                        nxt.append(child)
        frontier = nxt
    index[CAUGHT] = len(states)
    states.append(CAUGHT)
    caught = index[CAUGHT]

    outcomes: list[list[list[Outcome]]] = []
    terminal = []
    for i, st in enumerate(states):
        is_terminal = st.status != "active"
        terminal.append(is_terminal)
        if is_terminal:
            outcomes.append([[(1.0, i, 0.0)] for _ in actions])
            continue
        row = []
        for placement in actions:
            step_cost = -cfg.decoy_cost * len(placement)
            acc: dict[int, list[float]] = {}
            for leaf, p in moves[i].items():
                if leaf in placement:
                    s2, r = caught, cfg.r_catch
                else:
                    child = AttackerState(leaf, st.compromised | {leaf}, "")
                    s2 = index.get(child._replace(status="active"))
                    if s2 is None:
                        s2 = index[child._replace(status="goal")]
                    r = -cfg.r_goal if states[s2].status == "goal" else 0.0
                slot = acc.setdefault(s2, [0.0, r + step_cost])
                slot[0] += p
            row.append([(p, s2, r) for s2, (p, r) in acc.items()])
        outcomes.append(row)

    per_state: list[list[tuple[float, int]]] = []
    for st in states:
        if st.status == "caught":
            per_state.append([(1.0, obs_idx[DECOY_ALERT])])
        elif st.position == "start":
            per_state.append([(1.0, obs_idx[SILENCE])])
        else:
            per_state.append([(p, obs_idx[o]) for o, p in monitoring.distribution(st.position).items()])
    obs_model = [per_state for _ in actions]

    pomdp = Pomdp(states, actions, observations, outcomes, obs_model, terminal, cfg.gamma)
    return AttackerPomdp(tree, monitoring, cfg, scenarios, pomdp, index)


# ------------------------------------------------------------------ beliefs

@dataclass(frozen=True)
class DefenderBelief:
    particles: tuple[int, ...]
    history: tuple = ()

    def __post_init__(self) -> None:
        if not self.particles:
            raise BeliefCollapseError("belief has no particles")

    def __len__(self) -> int:
        return len(self.particles)

    def histogram(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.particles:
            out[s] = out.get(s, 0) + 1
        return dict(sorted(out.items()))


def uniform_belief(states: Sequence[int], k: int, seed: int = 0) -> DefenderBelief:
    if k < 1:
        raise ConfigError(f"particle count K must be >= 1, got {k}")
    rng = random.Random(seed)
    return DefenderBelief(tuple(rng.choice(states) for _ in range(k)))


def initial_belief(
    model: AttackerPomdp,
    hint: DecodedPath | None = None,
    k: int | None = None,
    rho: float | None = None,
    seed: int | None = None,
) -> DefenderBelief:
    """Belief over attacker position at first detection.

    Without a hint, particles are uniform over start-adjacent states. A decoded
    path of length d moves the support to depth-d states and sends a fraction
    ``rho`` of draws to states whose entered leaf is the last decoded state.
    """
    cfg = model.config
    k = cfg.particles if k is None else k
    rho = cfg.rho if rho is None else rho
    seed = cfg.seed if seed is None else seed
    if k < 1:
        raise ConfigError(f"particle count K must be >= 1, got {k}")
    rng = random.Random(seed)
    support = model.start_adjacent()
    preferred: list[int] = []
    if hint is not None and len(hint):
        at_depth = model.states_at_depth(len(hint))
        if at_depth:
            support = at_depth
        last, trail = hint.states[-1], frozenset(hint.states)
        preferred = [i for i in support if model.states[i].position == last]
        exact = [i for i in preferred if model.states[i].compromised == trail]
        preferred = exact or preferred
    particles = []
    for _ in range(k):
        if preferred and rng.random() < rho:
            particles.append(rng.choice(preferred))
        else:
            particles.append(rng.choice(support))
    return DefenderBelief(tuple(particles))


def prior_belief(model: AttackerPomdp, k: int | None = None) -> DefenderBelief:
    """Every particle at the start state: the attacker has not entered yet."""
    k = model.config.particles if k is None else k
    if k < 1:
        raise ConfigError(f"particle count K must be >= 1, got {k}")
    return DefenderBelief((model.index[START],) * k)


def update_belief(
    pomdp: Pomdp,
    belief: DefenderBelief,
    action: int,
    observation: int,
    k: int | None = None,
    seed: int = 0,
    reinvigorate: bool = True,
    max_attempts: int | None = None,
    perturb: float = 0.05,
) -> DefenderBelief:
    """Rejection-sampled particle update, refilled to K by reinvigoration."""
    k = len(belief) if k is None else k
    if k < 1:
        raise ConfigError(f"particle count K must be >= 1, got {k}")
    rng = random.Random(seed)
    attempts = max_attempts if max_attempts is not None else 100 * k
    kept: list[int] = []
    particles = belief.particles
    for _ in range(attempts):
        s = particles[rng.randrange(len(particles))]
        s2, o, _ = pomdp.step(s, action, rng)
        if o == observation:
            kept.append(s2)
            if len(kept) == k:
                break
    history = belief.history + (action, observation)
    if len(kept) == k:
        return DefenderBelief(tuple(kept), history)
    if not reinvigorate:
        if not kept:
            raise BeliefCollapseError(
                f"no particle explains observation {pomdp.observations[observation]!r} "
                f"after action {pomdp.actions[action]!r}"
            )
        return DefenderBelief(tuple(kept), history)
    support = sorted(set(particles))
    consistent = sorted({
        s2 for s in support for p, s2, _ in pomdp.outcomes[s][action]
        if p > 0 and pomdp.obs_prob(action, s2, observation) > 0
    })
    if not consistent:
        raise BeliefCollapseError(
            f"observation {pomdp.observations[observation]!r} is impossible after action {pomdp.actions[action]!r}"
        )
    while len(kept) < k:
        if kept and rng.random() >= perturb:
            kept.append(kept[rng.randrange(len(kept))])
        else:
            kept.append(consistent[rng.randrange(len(consistent))])
    return DefenderBelief(tuple(kept), history)


# -------------------------------------------------------------------- POMCP

class _Node:
    __slots__ = ("n", "counts", "values", "children")

    def __init__(self, n_actions: int) -> None:
        self.n = 0
        self.counts = [0] * n_actions
        self.values = [0.0] * n_actions
        self.children: dict[tuple[int, int], _Node] = {}


@dataclass(frozen=True)
class PredictedProbabilityIndex:
    node: str
    probability: float
    priority: int
    layer: int

    def __post_init__(self) -> None:
        if not 0 <= self.probability <= 1:
            raise ValidationError(f"probability {self.probability} outside [0, 1]")

    def __str__(self) -> str:
        return f"P^{self.priority}_{self.layer} = {self.probability:.5f}"


@dataclass(frozen=True)
class DecoyPlan:
    placements: Hashable
    action_index: int
    expected_value: float
    visit_counts: dict
    action_values: dict
    simulations: int
    indices: tuple[PredictedProbabilityIndex, ...] = ()


def pomcp_search(
    pomdp: Pomdp,
    belief: DefenderBelief,
    budget: int,
    c_ucb: float = 100.0,
    gamma: float | None = None,
    seed: int = 0,
    horizon: int = 20,
    rollout_depth: int = 20,
    rollout_policy: str = "noop",
    noop_action: int = 0,
) -> DecoyPlan:
    """Monte-Carlo tree search over action/observation histories from a particle belief.

    UCB1 picks actions inside the tree (untried actions first, in order);
    new histories are valued by a rollout with the no-op (or uniformly random)
    defender. The plan is the most visited root action; equal counts go to
    the higher value estimate, then to the lower action index (lexicographic
    for attacker POMDPs).
    """
    if budget < 1:
        raise ConfigError(f"simulation budget must be >= 1, got {budget}")
    if not belief.particles:
        raise BeliefCollapseError("cannot plan from an empty belief")
    if rollout_policy not in ("noop", "random"):
        raise ConfigError(f"unknown rollout policy {rollout_policy!r}")
    gamma = pomdp.discount if gamma is None else gamma
    rng = random.Random(seed)
    n_actions = len(pomdp.actions)
    terminal = pomdp.terminal
    step = pomdp.step
    log = math.log
    sqrt = math.sqrt

    def rollout(s: int, depth: int) -> float:
        total, disc = 0.0, 1.0
        stop = min(horizon, depth + rollout_depth)
        while depth < stop and not terminal[s]:
            a = noop_action if rollout_policy == "noop" else rng.randrange(n_actions)
            s, _, r = step(s, a, rng)
            total += disc * r
            disc *= gamma
            depth += 1
        return total

    def simulate(s: int, node: _Node, depth: int) -> float:
        if depth >= horizon or terminal[s]:
            return 0.0
        counts, values = node.counts, node.values
        if node.n < n_actions and 0 in counts:
            a = counts.index(0)
        else:
            scale = log(node.n)
            best = -math.inf
            for i in range(n_actions):
                score = values[i] + c_ucb * sqrt(scale / counts[i])
                if score > best:
                    best, a = score, i
        s2, o, r = step(s, a, rng)
        child = node.children.get((a, o))
        if child is None:
            child = _Node(n_actions)
            node.children[(a, o)] = child
            future = rollout(s2, depth + 1)
        else:
            future = simulate(s2, child, depth + 1)
        ret = r + gamma * future
        node.n += 1
        counts[a] += 1
        values[a] += (ret - values[a]) / counts[a]
        return ret

    root = _Node(n_actions)
    particles = belief.particles
    for _ in range(budget):
        s = particles[rng.randrange(len(particles))]
        if not terminal[s]:
            simulate(s, root, 0)

    # most visits; equal counts go to the better estimate, then the lower index
    best_a = max(range(n_actions), key=lambda i: (root.counts[i], root.values[i] if root.counts[i] else -math.inf, -i))
    return DecoyPlan(
        placements=pomdp.actions[best_a],
        action_index=best_a,
        expected_value=root.values[best_a],
        visit_counts={pomdp.actions[i]: root.counts[i] for i in range(n_actions)},
        action_values={pomdp.actions[i]: root.values[i] for i in range(n_actions)},
        simulations=budget,
    )


def plan_decoys(model: AttackerPomdp, belief: DefenderBelief, config: PlannerConfig | None = None,
                seed: int | None = None) -> DecoyPlan:
    cfg = config or model.config
    return pomcp_search(
        model.pomdp, belief, cfg.budget, c_ucb=cfg.c_ucb, gamma=cfg.gamma,
        seed=cfg.seed if seed is None else seed, horizon=cfg.horizon, rollout_depth=cfg.rollout_depth,
    )


# ---------------------------------------------------------------- P^Pr_L

def compute_ppi(
    deltas: Mapping[str, float],
    layers: Mapping[str, int],
    priorities: Mapping[str, int] | None = None,
) -> list[PredictedProbabilityIndex]:
    """One index per guarded node; priority ranks probability within a layer (1 = highest)."""
    missing = [node for node in deltas if node not in layers]
    if missing:
        raise ValidationError(f"no layer assigned to node {missing[0]!r}")
    by_layer: dict[int, list[str]] = {}
    for node in deltas:
        by_layer.setdefault(layers[node], []).append(node)
    out = []
    for layer in sorted(by_layer):
        ranked = sorted(by_layer[layer], key=lambda n: (-deltas[n], n))
        for rank, node in enumerate(ranked, start=1):
            pr = priorities[node] if priorities and node in priorities else rank
            out.append(PredictedProbabilityIndex(node, float(deltas[node]), pr, layer))
    return out


def ppi_from_path(path: DecodedPath) -> list[PredictedProbabilityIndex]:
    """Guard each decoded state at the layer of its decoding step (first occurrence wins)."""
    deltas: dict[str, float] = {}
    layers: dict[str, int] = {}
    for step, (state, delta) in enumerate(zip(path.states, path.deltas), start=1):
        if state not in deltas:
            deltas[state] = delta
            layers[state] = step
    return compute_ppi(deltas, layers)


def format_plan(plan: DecoyPlan) -> str:
    def label(a) -> str:
        return ",".join(a) if isinstance(a, tuple) else str(a)

    lines = [
        f"placements\t{label(plan.placements) or '-'}",
        f"expected_value\t{plan.expected_value:.6f}",
        f"simulations\t{plan.simulations}",
        "action\tvisits\tvalue",
    ]
    for a, n in plan.visit_counts.items():
        if n:
            lines.append(f"{label(a) or '-'}\t{n}\t{plan.action_values[a]:.6f}")
    if plan.indices:
        lines.append("node\tindex")
        lines += [f"{ix.node}\t{ix}" for ix in plan.indices]
    return "\n".join(lines) + "\n"
