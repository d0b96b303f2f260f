"""STRIDE-per-element threat enumeration over a data-flow diagram.

DFD documents hold one element per line::

    # kind        id      name                  [from to]
    external-entity EV    "Electric vehicle"
    process         EVC   "EV charger"
    data-flow       F1    "charging request"    EV EVC

Names containing whitespace must be double-quoted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .errors import ParseError, ValidationError

KINDS = ("external-entity", "process", "data-store", "data-flow")


@dataclass(frozen=True)
class ThreatCategory:
    tag: str
    description: str


CATEGORIES: tuple[ThreatCategory, ...] = (
    ThreatCategory("S", "Spoofing"),
    ThreatCategory("T", "Tampering"),
    ThreatCategory("R", "Repudiation"),
    ThreatCategory("I", "Information disclosure"),
    ThreatCategory("D", "Denial of service"),
    ThreatCategory("E", "Elevation of privilege"),
)
CATEGORY_ORDER = {c.tag: i for i, c in enumerate(CATEGORIES)}

# Standard STRIDE-per-element applicability; callers may pass their own.
DEFAULT_APPLICABILITY: dict[str, frozenset[str]] = {
    "external-entity": frozenset("SR"),
    "process": frozenset("STRIDE"),
    "data-store": frozenset("TRID"),
    "data-flow": frozenset("TID"),
}

_GENERIC = {
    "S": "impersonation of {name} by fabricated identity or data",
    "T": "forging or modification of information handled by {name}",
    "R": "{name} denies or suppresses a performed exchange",
    "I": "leakage or interception of data held or carried by {name}",
    "D": "{name} made unavailable to legitimate users",
    "E": "a threat agent gains more privileges on {name} than intended",
}

RATIONALE_TEMPLATES: dict[tuple[str, str], str] = {
    ("external-entity", "S"): "an attacker impersonates {name} to gain access and install unauthorized remote commands or malware",
    ("external-entity", "R"): "{name} denies a completed transaction, e.g. a paid charging fee",
    ("process", "S"): "gaining access to {name} and installing unauthorized remote command sequences or malware",
    ("process", "T"): "{name} injects erroneous charging or discharging information",
    ("process", "R"): "an infected {name} denies the charge processing fee already paid by the owner",
    ("process", "I"): "security-sensitive information processed by {name} is disclosed",
    ("process", "D"): "{name} is shut down, terminating the charging process of connected vehicles",
    ("process", "E"): "a malicious agent obtains critical attributes (firmware, EV ID, user data) and modifies {name} configuration",
    ("data-store", "T"): "records in {name} are corrupted (data poisoning)",
    ("data-store", "R"): "log entries in {name} are suppressed or invalidated",
    ("data-store", "I"): "privacy-sensitive records in {name} leak",
    ("data-store", "D"): "{name} becomes unavailable or exhausted",
    ("data-flow", "T"): "exchanges on {name} (energy request, DR request, EV ID, utility ID) are distorted",
    ("data-flow", "I"): "communication on {name} is intercepted and eavesdropped",
    ("data-flow", "D"): "flooding of the bus network with malicious traffic on {name}",
}


@dataclass(frozen=True)
class DfdElement:
    id: str
    kind: str
    name: str
    connects: tuple[str, str] | None = None


@dataclass(frozen=True)
class DfdModel:
    elements: tuple[DfdElement, ...] = ()

    @cached_property
    def by_id(self) -> dict[str, DfdElement]:
        return {e.id: e for e in self.elements}

    @property
    def flows(self) -> list[DfdElement]:
        return [e for e in self.elements if e.kind == "data-flow"]


@dataclass(frozen=True)
class Threat:
    element: str
    category: str
    rationale: str


_TOKEN = re.compile(r'"((?:[^"\\]|\\.)*)"|(\S+)')


def _tokens(line: str, lineno: int, name: str) -> list[tuple[str, int]]:
    out = []
    for m in _TOKEN.finditer(line):
        if m.group(2) is not None and m.group(2).startswith("#"):
            break
        if m.group(2) is not None and '"' in m.group(2):
            raise ParseError("unterminated string", lineno, m.start() + m.group(2).index('"') + 1, name)
        if m.group(1) is not None:
            text = re.sub(r"\\(.)", r"\1", m.group(1))
        else:
            text = m.group(2)
        out.append((text, m.start() + 1))
    return out


def load_dfd(source: str, name: str = "") -> DfdModel:
    """Parse and validate a DFD document."""
    elements: list[DfdElement] = []
    seen: dict[str, int] = {}
    pending: list[tuple[DfdElement, int, int]] = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        toks = _tokens(line, lineno, name)
        if not toks:
            continue
        kind, kcol = toks[0]
        if kind not in KINDS:
            raise ParseError(f"unknown element kind {kind!r}", lineno, kcol, name)
        want = 5 if kind == "data-flow" else 3
        if len(toks) != want:
            col = toks[min(len(toks), want) - 1][1] if len(toks) > want else kcol
            raise ParseError(f"{kind} expects {want - 1} fields, got {len(toks) - 1}", lineno, col, name)
        eid, icol = toks[1]
        if eid in seen:
            raise ParseError(f"duplicate id {eid!r} (first defined on line {seen[eid]})", lineno, icol, name)
        seen[eid] = lineno
        connects = (toks[3][0], toks[4][0]) if kind == "data-flow" else None
        el = DfdElement(eid, kind, toks[2][0], connects)
        elements.append(el)
        if connects:
            pending.append((el, lineno, toks[3][1]))
    by_id = {e.id: e for e in elements}
    for el, lineno, col in pending:
        for end in el.connects:
            target = by_id.get(end)
            if target is None:
                raise ParseError(f"data-flow {el.id!r} references missing element {end!r}", lineno, col, name)
            if target.kind == "data-flow":
                raise ParseError(f"data-flow {el.id!r} endpoint {end!r} is itself a data-flow", lineno, col, name)
    return DfdModel(tuple(elements))


def dump_dfd(model: DfdModel) -> str:
    lines = []
    for e in model.elements:
        parts = [e.kind, e.id, '"' + e.name.replace("\\", "\\\\").replace('"', '\\"') + '"']
        if e.connects:
            parts.extend(e.connects)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def rationale(element: DfdElement, tag: str) -> str:
    template = RATIONALE_TEMPLATES.get((element.kind, tag), _GENERIC[tag])
    return template.format(name=element.name)


def enumerate_threats(
    model: DfdModel, applicability: Mapping[str, frozenset[str] | str] | None = None
) -> list[Threat]:
    """Every admissible (element, category) pair, sorted by element id then STRIDE order."""
    matrix = DEFAULT_APPLICABILITY if applicability is None else applicability
    for kind, tags in matrix.items():
        bad = set(tags) - set(CATEGORY_ORDER)
        if bad:
            raise ValidationError(f"unknown STRIDE tags {sorted(bad)} for kind {kind!r}")
    out = []
    for el in sorted(model.elements, key=lambda e: e.id):
        tags = sorted(set(matrix.get(el.kind, ())), key=CATEGORY_ORDER.__getitem__)
        out.extend(Threat(el.id, t, rationale(el, t)) for t in tags)
    return out


def format_threats(threats: list[Threat]) -> str:
    return "".join(f"{t.element}\t{t.category}\t{t.rationale}\n" for t in threats)
