"""``evcsguard`` command line: one binary, one subcommand per pipeline step.

Exit status: 0 success, 1 domain or validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Callable

from . import hmm, planner, sim, threats, tree
from .config import RunConfig, load_run_config, parse_alert_map, require
from .errors import ConfigError, EvcsGuardError, ValidationError

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2

ARTIFACTS = (
    "threats.tsv",
    "scenarios.tsv",
    "ods.txt",
    "model.hmm",
    "decode.tsv",
    "plan.txt",
    "episodes.json",
)


class StageError(EvcsGuardError):
    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _read(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig | None:
    return load_run_config(args.config) if getattr(args, "config", None) else None


def _alert_map(args, cfg: RunConfig | None) -> dict[str, str]:
    if getattr(args, "alert_map", None):
        return parse_alert_map(args.alert_map)
    if cfg is not None and cfg.alert_map:
        return cfg.alert_map
    raise ConfigError("no alert map given (use --alert-map or [monitoring] alert_map in --config)")


def _monitoring(args, cfg: RunConfig | None) -> planner.MonitoringModel:
    fn = args.false_negative if args.false_negative is not None else (cfg.false_negative if cfg else 0.0)
    conf = args.confusion if args.confusion is not None else (cfg.confusion if cfg else 0.0)
    return planner.MonitoringModel(_alert_map(args, cfg), fn, conf)


def _seed(args, cfg: RunConfig | None) -> int:
    if args.seed is not None:
        return args.seed
    return cfg.seed if cfg is not None else 0


def _planner_config(args, cfg: RunConfig | None) -> planner.PlannerConfig:
    overrides = {"budget": getattr(args, "budget", None), "seed": args.seed}
    if cfg is not None:
        return cfg.planner_config(**overrides)
    values = {k: str(v) for k, v in overrides.items() if v is not None}
    return planner.planner_config_from_mapping(values)


# ------------------------------------------------------------- subcommands

def cmd_validate(args) -> int:
    t = tree.parse_tree(_read(args.tree), args.tree)
    print(f"ok: {len(t.goals)} goals, {len(t.leaves)} attack leaves, {len(t.defenses)} defenses", file=sys.stderr)
    return EXIT_OK


def cmd_threats(args) -> int:
    model = threats.load_dfd(_read(args.dfd), args.dfd)
    _emit(threats.format_threats(threats.enumerate_threats(model)), args.out)
    return EXIT_OK


def cmd_scenarios(args) -> int:
    t = tree.parse_tree(_read(args.tree), args.tree)
    _emit(tree.format_scenarios(tree.enumerate_scenarios(t, cap=args.cap)), args.out)
    return EXIT_OK


def cmd_ods(args) -> int:
    cfg = _config(args)
    t = tree.parse_tree(_read(args.tree), args.tree)
    tradeoff = args.tradeoff if args.tradeoff is not None else (cfg.tradeoff if cfg else 1.0)
    budget = args.budget if args.budget is not None else (cfg.ods_budget if cfg else None)
    _emit(tree.format_ods(tree.compute_ods(t, tradeoff, budget)), args.out)
    return EXIT_OK


def cmd_gen_corpus(args) -> int:
    cfg = _config(args)
    t = tree.parse_tree(_read(args.tree), args.tree)
    episodes = args.episodes if args.episodes is not None else (cfg.corpus_episodes if cfg else 1000)
    p_pred = args.p_pred if args.p_pred is not None else (cfg.p_pred if cfg and cfg.p_pred is not None else 0.7)
    states = cfg.states if cfg and cfg.states else None
    corpus = sim.generate_corpus(
        t, _monitoring(args, cfg), episodes, _seed(args, cfg), sim.AttackerAgent("randomized", p_pred), states
    )
    _emit(hmm.dump_corpus(corpus), args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args)
    states = cfg.states if cfg and cfg.states else None
    corpus = hmm.load_corpus(_read(args.corpus), args.corpus, states=states)
    kappa = args.smoothing if args.smoothing is not None else (cfg.smoothing if cfg else 0.0)
    _emit(hmm.save_model(hmm.train(hmm.count_corpus(corpus), kappa)), args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    model = hmm.load_model(_read(args.model), args.model)
    alerts = hmm.load_alerts(_read(args.alerts), args.alerts)
    if not alerts:
        raise ValidationError(f"{args.alerts}: no alerts to decode")
    _emit(hmm.format_decode(model, hmm.viterbi(model, alerts)), args.out)
    return EXIT_OK


def _plan(t: tree.AttackDefenseTree, model: hmm.HmmModel, monitoring: planner.MonitoringModel,
          alerts: list[str], pcfg: planner.PlannerConfig) -> planner.DecoyPlan:
    sim.check_alphabets(model, t, monitoring)
    path = hmm.viterbi(model, alerts) if alerts else None
    pomdp = planner.build_pomdp(t, monitoring, pcfg)
    belief = planner.initial_belief(pomdp, path)
    plan = planner.plan_decoys(pomdp, belief, pcfg)
    indices = tuple(planner.ppi_from_path(path)) if path is not None else ()
    return dataclasses.replace(plan, indices=indices)


def cmd_plan(args) -> int:
    cfg = _config(args)
    pcfg = planner.load_planner_config(_read(args.planner_config)) if args.planner_config else None
    if pcfg is not None:
        overrides = {k: str(v) for k, v in {"budget": args.budget, "seed": args.seed}.items() if v is not None}
        pcfg = planner.planner_config_from_mapping(overrides, pcfg)
    else:
        pcfg = _planner_config(args, cfg)
    t = tree.parse_tree(_read(args.tree), args.tree)
    model = hmm.load_model(_read(args.model), args.model)
    alerts = hmm.load_alerts(_read(args.alerts), args.alerts) if args.alerts else []
    _emit(planner.format_plan(_plan(t, model, _monitoring(args, cfg), alerts, pcfg)), args.out)
    return EXIT_OK


def _setup(args, cfg: RunConfig | None, t, model, monitoring, pcfg) -> sim.EpisodeSetup:
    p_pred = args.p_pred if getattr(args, "p_pred", None) is not None else (cfg.p_pred if cfg and cfg.p_pred is not None else pcfg.p_pred)
    policy = getattr(args, "policy", None) or (cfg.policy if cfg else "pomcp")
    kind = cfg.attacker if cfg else "randomized"
    return sim.EpisodeSetup(
        t, monitoring, model, pcfg, sim.AttackerAgent(kind, p_pred), policy,
        cfg.fixed_decoys if cfg else (), cfg.timeout if cfg else 50,
    )


def cmd_simulate(args) -> int:
    cfg = _config(args)
    pcfg = _planner_config(args, cfg)
    t = tree.parse_tree(_read(args.tree), args.tree)
    model = hmm.load_model(_read(args.model), args.model)
    setup = _setup(args, cfg, t, model, _monitoring(args, cfg), pcfg)
    n = args.episodes if args.episodes is not None else (cfg.sim_episodes if cfg else 100)
    summary, records = sim.run_batch(setup, n, _seed(args, cfg), workers=cfg.workers if cfg else 1)
    _emit(sim.format_report(summary, records), args.out)
    return EXIT_OK


def run_pipeline(cfg: RunConfig, out_dir: Path, seed: int | None = None) -> list[Path]:
    """Threats, tree, ODS, training, decoding, planning, simulation; one artifact per step."""
    if seed is not None:
        cfg.seed = seed
    outputs: dict[str, str] = {}

    def stage(name: str, fn: Callable):
        try:
            return fn()
        except OSError:
            raise
        except EvcsGuardError as exc:
            raise StageError(name, exc) from exc

    dfd = stage("threats", lambda: threats.load_dfd(_read(require(cfg, "dfd")), str(cfg.dfd)))
    outputs["threats.tsv"] = threats.format_threats(threats.enumerate_threats(dfd))
    t = stage("tree", lambda: tree.parse_tree(_read(require(cfg, "tree")), str(cfg.tree)))
    scenarios = stage("scenarios", lambda: tree.enumerate_scenarios(t))
    outputs["scenarios.tsv"] = tree.format_scenarios(scenarios)
    ods = stage("ods", lambda: tree.compute_ods(t, cfg.tradeoff, cfg.ods_budget, scenarios))
    outputs["ods.txt"] = tree.format_ods(ods)

    def train_stage():
        if not cfg.alert_map:
            raise ConfigError("[monitoring] alert_map is required")
        monitoring = planner.MonitoringModel(cfg.alert_map, cfg.false_negative, cfg.confusion)
        p_pred = cfg.p_pred if cfg.p_pred is not None else planner.PlannerConfig().p_pred
        corpus = sim.generate_corpus(
            t, monitoring, cfg.corpus_episodes, cfg.seed, sim.AttackerAgent("randomized", p_pred), cfg.states
        )
        return monitoring, hmm.train(hmm.count_corpus(corpus), cfg.smoothing)

    monitoring, model = stage("train", train_stage)
    outputs["model.hmm"] = hmm.save_model(model)

    def decode_stage():
        alerts = hmm.load_alerts(_read(require(cfg, "alerts")), str(cfg.alerts))
        if not alerts:
            raise ValidationError("alert log is empty")
        return alerts, hmm.viterbi(model, alerts)

    alerts, path = stage("decode", decode_stage)
    outputs["decode.tsv"] = hmm.format_decode(model, path)
    pcfg = stage("plan", lambda: cfg.planner_config())
    plan = stage("plan", lambda: _plan(t, model, monitoring, alerts, pcfg))
    outputs["plan.txt"] = planner.format_plan(plan)

    def simulate_stage():
        attacker = sim.AttackerAgent(cfg.attacker, cfg.p_pred if cfg.p_pred is not None else pcfg.p_pred)
        setup = sim.EpisodeSetup(t, monitoring, model, pcfg, attacker, cfg.policy, cfg.fixed_decoys, cfg.timeout)
        return sim.run_batch(setup, cfg.sim_episodes, cfg.seed, cfg.workers)

    summary, records = stage("simulate", simulate_stage)
    outputs["episodes.json"] = sim.format_report(summary, records)

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in ARTIFACTS:
        target = out_dir / name
        target.write_text(outputs[name], encoding="utf-8")
        written.append(target)
    return written


def cmd_pipeline(args) -> int:
    if not args.config:
        raise ConfigError("pipeline needs --config")
    if not args.out:
        raise ConfigError("pipeline needs --out DIR")
    cfg = load_run_config(args.config)
    written = run_pipeline(cfg, Path(args.out), args.seed)
    for p in written:
        print(p)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _monitor_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alert-map", help="leaf=category pairs, comma separated")
    p.add_argument("--false-negative", type=float)
    p.add_argument("--confusion", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (directory for pipeline); stdout by default")
    common.add_argument("--config", help="run configuration file")

    parser = argparse.ArgumentParser(prog="evcsguard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check an attack-defense tree")
    p.add_argument("tree")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("threats", parents=[common], help="STRIDE threats per DFD element")
    p.add_argument("dfd")
    p.set_defaults(func=cmd_threats)

    p = sub.add_parser("scenarios", parents=[common], help="minimal attack scenarios")
    p.add_argument("tree")
    p.add_argument("--cap", type=int, default=tree.DEFAULT_SCENARIO_CAP)
    p.set_defaults(func=cmd_scenarios)

    p = sub.add_parser("ods", parents=[common], help="optimal defensive strategy")
    p.add_argument("tree")
    p.add_argument("--tradeoff", type=float, help="weight of covered vulnerability against cost")
    p.add_argument("--budget", type=float, help="cost budget; drops the full-coverage constraint")
    p.set_defaults(func=cmd_ods)

    p = sub.add_parser("gen-corpus", parents=[common], help="labeled training corpus from simulated attackers")
    p.add_argument("tree")
    p.add_argument("--episodes", type=int)
    p.add_argument("--p-pred", type=float)
    _monitor_flags(p)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("train", parents=[common], help="supervised HMM training")
    p.add_argument("corpus")
    p.add_argument("--smoothing", type=float, help="additive smoothing (default 0)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("decode", parents=[common], help="Viterbi decoding of an alert log")
    p.add_argument("model")
    p.add_argument("alerts")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("plan", parents=[common], help="POMCP decoy placement")
    p.add_argument("tree")
    p.add_argument("model")
    p.add_argument("alerts", nargs="?")
    p.add_argument("--planner-config", help="planner key=value file")
    p.add_argument("--budget", type=int)
    _monitor_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", parents=[common], help="batch of attacker episodes")
    p.add_argument("tree")
    p.add_argument("model")
    p.add_argument("--episodes", type=int)
    p.add_argument("--policy", choices=sim.POLICIES)
    p.add_argument("--p-pred", type=float)
    p.add_argument("--budget", type=int)
    _monitor_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", parents=[common], help="run every step and write all artifacts")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EvcsGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
