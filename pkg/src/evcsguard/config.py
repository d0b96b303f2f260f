"""Run configuration: INI-style ``key = value`` files with fixed sections."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .planner import PlannerConfig, _CONFIG_TYPES, planner_config_from_mapping

SECTIONS: dict[str, set[str]] = {
    "run": {"seed"},
    "inputs": {"dfd", "tree", "alerts"},
    "monitoring": {"alert_map", "false_negative", "confusion"},
    "hmm": {"episodes", "smoothing", "states"},
    "ods": {"tradeoff", "budget"},
    "planner": set(_CONFIG_TYPES),
    "sim": {"episodes", "policy", "attacker", "p_pred", "timeout", "workers", "fixed_decoys"},
}


def parse_alert_map(text: str) -> dict[str, str]:
    """``leaf=category`` (or ``leaf:category``) pairs separated by commas."""
    out: dict[str, str] = {}
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        sep = "=" if "=" in item else ":"
        leaf, _, cat = item.partition(sep)
        leaf, cat = leaf.strip(), cat.strip()
        if not leaf or not cat:
            raise ConfigError(f"bad alert map entry {item!r}; expected leaf=category")
        if leaf in out:
            raise ConfigError(f"leaf {leaf!r} mapped twice")
        out[leaf] = cat
    if not out:
        raise ConfigError("empty alert map")
    return out


def _list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.replace("\n", ",").split(",") if x.strip())


@dataclass
class RunConfig:
    base_dir: Path
    seed: int = 0
    dfd: Path | None = None
    tree: Path | None = None
    alerts: Path | None = None
    alert_map: dict[str, str] | None = None
    false_negative: float = 0.0
    confusion: float = 0.0
    corpus_episodes: int = 1000
    smoothing: float = 0.0
    states: tuple[str, ...] | None = None
    tradeoff: float = 1.0
    ods_budget: float | None = None
    planner: dict[str, str] = field(default_factory=dict)
    sim_episodes: int = 100
    policy: str = "pomcp"
    attacker: str = "randomized"
    p_pred: float | None = None
    timeout: int = 50
    workers: int = 1
    fixed_decoys: tuple[str, ...] = ()

    def planner_config(self, **overrides) -> PlannerConfig:
        """Built on demand so bad planner values surface in the planning stage."""
        base = planner_config_from_mapping(self.planner)
        values = {k: str(v) for k, v in overrides.items() if v is not None}
        if "seed" not in self.planner and "seed" not in values:
            values["seed"] = str(self.seed)
        return planner_config_from_mapping(values, base)


def _num(section: str, key: str, raw: str, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_run_config(text, path.resolve().parent)


def parse_run_config(text: str, base_dir: Path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0]) from None
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
    cfg = RunConfig(base_dir=base_dir)

    def get(section: str, key: str) -> str | None:
        return parser.get(section, key) if parser.has_option(section, key) else None

    if (v := get("run", "seed")) is not None:
        cfg.seed = _num("run", "seed", v, int)
    for key in ("dfd", "tree", "alerts"):
        if (v := get("inputs", key)) is not None:
            setattr(cfg, key, (base_dir / v).resolve())
    if (v := get("monitoring", "alert_map")) is not None:
        cfg.alert_map = parse_alert_map(v)
    for key in ("false_negative", "confusion"):
        if (v := get("monitoring", key)) is not None:
            setattr(cfg, key, _num("monitoring", key, v))
    if (v := get("hmm", "episodes")) is not None:
        cfg.corpus_episodes = _num("hmm", "episodes", v, int)
    if (v := get("hmm", "smoothing")) is not None:
        cfg.smoothing = _num("hmm", "smoothing", v)
    if (v := get("hmm", "states")) is not None:
        cfg.states = _list(v)
    if (v := get("ods", "tradeoff")) is not None:
        cfg.tradeoff = _num("ods", "tradeoff", v)
    if (v := get("ods", "budget")) is not None and v.strip():
        cfg.ods_budget = _num("ods", "budget", v)
    if parser.has_section("planner"):
        cfg.planner = dict(parser["planner"])
    if (v := get("sim", "episodes")) is not None:
        cfg.sim_episodes = _num("sim", "episodes", v, int)
    for key in ("policy", "attacker"):
        if (v := get("sim", key)) is not None:
            setattr(cfg, key, v.strip())
    if (v := get("sim", "p_pred")) is not None:
        cfg.p_pred = _num("sim", "p_pred", v)
    if (v := get("sim", "timeout")) is not None:
        cfg.timeout = _num("sim", "timeout", v, int)
    if (v := get("sim", "workers")) is not None:
        cfg.workers = _num("sim", "workers", v, int)
    if (v := get("sim", "fixed_decoys")) is not None:
        cfg.fixed_decoys = _list(v)
    return cfg


def require(cfg: RunConfig, name: str) -> Path:
    value = getattr(cfg, name)
    if value is None:
        raise ConfigError(f"config is missing [inputs] {name}")
    return value

