"""Discrete-event loop: attacker walks the tree, the monitor alerts, the HMM decodes, the planner places decoys."""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import BeliefCollapseError, ValidationError
from .hmm import HmmModel, TrainingCorpus, viterbi
from .planner import (
    AttackerPomdp,
    MonitoringModel,
    PlannerConfig,
    build_pomdp,
    initial_belief,
    move_distribution,
    plan_decoys,
    predicted_move,
    prior_belief,
    update_belief,
)
from .tree import AttackDefenseTree, AttackScenario, enumerate_scenarios

OUTCOMES = ("goal-reached", "caught", "timeout")
POLICIES = ("pomcp", "noop", "random", "fixed")


@dataclass(frozen=True)
class AttackerAgent:
    """``randomized`` follows the planner's attacker kernel; the others are deterministic."""

    policy: str = "randomized"
    p_pred: float = 0.7
    scenario: int = 0
    script: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.policy not in ("randomized", "scenario-follower", "scripted"):
            raise ValidationError(f"unknown attacker policy {self.policy!r}")
        if not 0 <= self.p_pred <= 1:
            raise ValidationError("p_pred must lie in [0, 1]")
        object.__setattr__(self, "script", tuple(self.script))

    def next_move(
        self,
        tree: AttackDefenseTree,
        scenarios: Sequence[AttackScenario],
        compromised: frozenset,
        step: int,
        rng: random.Random,
    ) -> str | None:
        dist = move_distribution(tree, scenarios, compromised, self.p_pred)
        if not dist:
            return None
        if self.policy == "scripted":
            if step >= len(self.script):
                return None
            leaf = self.script[step]
            if leaf not in dist:
                raise ValidationError(f"scripted move {leaf!r} at step {step + 1} is not admissible")
            return leaf
        if self.policy == "scenario-follower":
            if not 0 <= self.scenario < len(scenarios):
                raise ValidationError(f"no scenario {self.scenario}")
            order = {leaf: i for i, leaf in enumerate(tree.leaves)}
            rest = sorted(scenarios[self.scenario].leaf_set - compromised, key=order.__getitem__)
            return rest[0] if rest else None
        # draw in the kernel's insertion order so a seed always means the same trajectory
        u = rng.random()
        acc = 0.0
        last = None
        for leaf, p in dist.items():
            acc += p
            last = leaf
            if u < acc:
                return leaf
        return last


@dataclass(frozen=True)
class EpisodeRecord:
    seed: int
    leaves: tuple[str, ...]
    alerts: tuple[tuple[int, str], ...]
    decoded: tuple[str, ...]
    decoys: tuple[tuple[str, ...], ...]
    outcome: str
    end_tick: int
    detection_tick: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alerts"] = [list(a) for a in self.alerts]
        d["decoys"] = [list(a) for a in self.decoys]
        return d


def episode_seed(master: int, index: int | str) -> int:
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _drop_silence(leaves: Sequence[str], alerts: Sequence[str | None]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    pairs = [(q, h) for q, h in zip(leaves, alerts) if h is not None]
    return tuple(q for q, _ in pairs), tuple(h for _, h in pairs)


def generate_corpus(
    tree: AttackDefenseTree,
    monitoring: MonitoringModel,
    episodes: int,
    seed: int = 0,
    attacker: AttackerAgent | None = None,
    states: Sequence[str] | None = None,
) -> TrainingCorpus:
    """Labeled (leaf, alert) sequences from undefended attacker episodes.

    Missed detections are dropped, so each sequence is what the decoder would
    have seen. Episodes in which nothing was detected contribute nothing.
    """
    if episodes < 1:
        raise ValidationError("corpus generation needs at least one episode")
    attacker = attacker or AttackerAgent()
    scenarios = enumerate_scenarios(tree)
    seqs = []
    for i in range(episodes):
        rng = random.Random(episode_seed(seed, i))
        comp: frozenset = frozenset()
        leaves: list[str] = []
        alerts: list[str | None] = []
        step = 0
        while True:
            leaf = attacker.next_move(tree, scenarios, comp, step, rng)
            if leaf is None:
                break
            comp = comp | {leaf}
            leaves.append(leaf)
            alerts.append(monitoring.emit(leaf, rng))
            step += 1
        q, h = _drop_silence(leaves, alerts)
        if q:
            seqs.append((q, h))
    state_order = tuple(states) if states is not None else tuple(tree.leaves)
    return TrainingCorpus(state_order, monitoring.categories, tuple(seqs), (f"generator:seed={seed}:episodes={episodes}",))


@dataclass(frozen=True)
class EpisodeSetup:
    tree: AttackDefenseTree
    monitoring: MonitoringModel
    model: HmmModel
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    attacker: AttackerAgent = field(default_factory=AttackerAgent)
    policy: str = "pomcp"
    fixed_decoys: tuple[str, ...] = ()
    timeout: int = 50


def check_alphabets(model: HmmModel, tree: AttackDefenseTree, monitoring: MonitoringModel) -> None:
    missing = [c for c in monitoring.categories if c not in model.symbols]
    if missing:
        raise ValidationError(f"alphabet mismatch: alert {missing[0]!r} not in the model's symbols")
    absent = [leaf for leaf in tree.leaves if leaf not in model.states]
    if absent:
        raise ValidationError(f"alphabet mismatch: leaf {absent[0]!r} not among the model's states")


def run_episode(setup: EpisodeSetup, seed: int, pomdp: AttackerPomdp | None = None) -> EpisodeRecord:
    tree, monitoring, model, cfg = setup.tree, setup.monitoring, setup.model, setup.planner
    if setup.policy not in POLICIES:
        raise ValidationError(f"unknown planner policy {setup.policy!r}")
    check_alphabets(model, tree, monitoring)
    # separate streams keep attacker trajectories identical across planner policies
    rng_attack = random.Random(episode_seed(seed, "attacker"))
    rng_monitor = random.Random(episode_seed(seed, "monitor"))
    rng = random.Random(episode_seed(seed, "planner"))
    scenarios = pomdp.scenarios if pomdp is not None else enumerate_scenarios(tree)
    if setup.policy == "pomcp" and pomdp is None:
        pomdp = build_pomdp(tree, monitoring, cfg)
    belief = prior_belief(pomdp) if setup.policy == "pomcp" else None
    action = 0

    def act() -> tuple[str, ...]:
        nonlocal action
        if setup.policy == "noop":
            return ()
        if setup.policy == "fixed":
            return tuple(sorted(setup.fixed_decoys))
        if setup.policy == "random":
            k = min(cfg.max_decoys, len(tree.leaves))
            return tuple(sorted(rng.sample(list(tree.leaves), k)))
        plan = plan_decoys(pomdp, belief, cfg, seed=rng.getrandbits(32))
        action = plan.action_index
        return plan.placements

    decoys = [act()]
    comp: frozenset = frozenset()
    leaves: list[str] = []
    alerts: list[tuple[int, str]] = []
    decoded: list[str] = []
    outcome, end_tick = "timeout", setup.timeout
    for tick in range(1, setup.timeout + 1):
        leaf = setup.attacker.next_move(tree, scenarios, comp, len(leaves), rng_attack)
        if leaf is None:
            break
        leaves.append(leaf)
        if leaf in decoys[-1]:
            outcome, end_tick = "caught", tick
            break
        comp = comp | {leaf}
        alert = monitoring.emit(leaf, rng_monitor)
        path = None
        if alert is not None:
            alerts.append((tick, alert))
            path = viterbi(model, [a for _, a in alerts])
            decoded.append(path.states[-1])
        if tree.evaluate(comp):
            outcome, end_tick = "goal-reached", tick
            break
        if belief is not None:
            obs = pomdp.observation_index(alert)
            try:
                belief = update_belief(pomdp.pomdp, belief, action, obs, cfg.particles, seed=rng.getrandbits(32))
            except BeliefCollapseError:
                belief = initial_belief(pomdp, path, seed=rng.getrandbits(32))
        decoys.append(act())
    return EpisodeRecord(
        seed=seed,
        leaves=tuple(leaves),
        alerts=tuple(alerts),
        decoded=tuple(decoded),
        decoys=tuple(decoys),
        outcome=outcome,
        end_tick=end_tick,
        detection_tick=alerts[0][0] if alerts else None,
    )


def _run_one(args: tuple[EpisodeSetup, int]) -> EpisodeRecord:
    setup, seed = args
    pomdp = build_pomdp(setup.tree, setup.monitoring, setup.planner) if setup.policy == "pomcp" else None
    return run_episode(setup, seed, pomdp)


def run_batch(setup: EpisodeSetup, n: int, seed: int = 0, workers: int = 1) -> tuple[dict, list[EpisodeRecord]]:
    """Run ``n`` episodes seeded from ``seed``; returns (summary, records).

    Episode i always uses ``episode_seed(seed, i)``, so worker count does not
    change the result.
    """
    seeds = [episode_seed(seed, i) for i in range(n)]
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, [(setup, s) for s in seeds], chunksize=max(1, n // (4 * workers))))
    else:
        pomdp = build_pomdp(setup.tree, setup.monitoring, setup.planner) if setup.policy == "pomcp" and n else None
        records = [run_episode(setup, s, pomdp) for s in seeds]
    return summarize(records), records


def summarize(records: Sequence[EpisodeRecord]) -> dict:
    n = len(records)
    summary: dict = {"episodes": n}
    for outcome in OUTCOMES:
        key = outcome.split("-")[0] + "_rate"
        summary[key] = sum(r.outcome == outcome for r in records) / n if n else None
    detections = [r.detection_tick for r in records if r.detection_tick is not None]
    summary["mean_detection_tick"] = sum(detections) / len(detections) if detections else None
    summary["mean_end_tick"] = sum(r.end_tick for r in records) / n if n else None
    hits = total = 0
    for r in records:
        truth = {tick: leaf for tick, leaf in enumerate(r.leaves, start=1)}
        for (tick, _), state in zip(r.alerts, r.decoded):
            total += 1
            hits += truth.get(tick) == state
    summary["decoder_accuracy"] = hits / total if total else None
    return summary


def format_report(summary: dict, records: Sequence[EpisodeRecord]) -> str:
    return json.dumps(
        {"episodes": [r.to_dict() for r in records], "summary": summary},
        sort_keys=True, indent=1,
    ) + "\n"


def predicted_path(tree: AttackDefenseTree) -> list[str]:
    """Trajectory of an attacker that always takes the predicted move."""
    scenarios = enumerate_scenarios(tree)
    comp: frozenset = frozenset()
    path = []
    while not tree.evaluate(comp):
        leaf = predicted_move(tree, scenarios, comp)
        if leaf is None:
            break
        path.append(leaf)
        comp = comp | {leaf}
    return path
