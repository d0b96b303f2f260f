"""Weighted attack-defense trees: DSL, minimal attack scenarios, optimal defense selection.

Grammar (``#`` starts a comment)::

    goal    <id> <AND|OR> ["label"] [w=<W>] { <stmt>* }
    leaf    <id> ["label"] [v=<V>] [w=<W>]
    defense <id> ["label"] c=<C> [covers=<id,...>] [w=<W>]
    ref     <id>

A repeated ``leaf`` with the same id (and no conflicting attributes) or a
``ref`` shares an already declared node, so AND groups may overlap the way
the DoS example does. A defense declared inside a goal block without
``covers=`` covers that goal.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import chain
from typing import Iterable, Mapping

from .errors import CycleError, InfeasibleError, OverflowLimitError, ParseError, ValidationError

GOAL, LEAF, DEFENSE = "goal", "attack-leaf", "defense"
AND, OR, NONE = "AND", "OR", "none"

DEFAULT_SCENARIO_CAP = 10**6


@dataclass(frozen=True)
class TreeNode:
    id: str
    kind: str
    label: str = ""
    gate: str = NONE
    children: tuple[str, ...] = ()
    weight: float | None = None
    cost: float | None = None
    vulnerability: float | None = None
    covers: tuple[str, ...] = ()


@dataclass(frozen=True)
class AttackScenario:
    leaves: tuple[str, ...]
    path: tuple[str, ...] = ()

    @property
    def leaf_set(self) -> frozenset[str]:
        return frozenset(self.leaves)


@dataclass(frozen=True)
class DefenseStrategy:
    selected: tuple[str, ...]
    total_cost: float
    covered_vulnerability: float
    objective: float
    covered_leaves: tuple[str, ...] = ()
    mode: str = "full-coverage"


@dataclass(frozen=True)
class AttackDefenseTree:
    nodes: Mapping[str, TreeNode]
    root: str | None

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", dict(self.nodes))
        _validate(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttackDefenseTree):
            return NotImplemented
        return self.root == other.root and self.nodes == other.nodes

    def __hash__(self) -> int:
        return hash((self.root, tuple(sorted(self.nodes))))

    def __getitem__(self, node_id: str) -> TreeNode:
        return self.nodes[node_id]

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        """Attack leaves reachable from the root, in declaration order."""
        reach = self._reachable
        return tuple(n.id for n in self.nodes.values() if n.kind == LEAF and n.id in reach)

    @cached_property
    def goals(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes.values() if n.kind == GOAL)

    @cached_property
    def defenses(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes.values() if n.kind == DEFENSE)

    @cached_property
    def _reachable(self) -> frozenset[str]:
        seen: set[str] = set()
        stack = [self.root] if self.root else []
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            stack.extend(self.nodes[nid].children)
        return frozenset(seen)

    def leaves_under(self, node_id: str) -> frozenset[str]:
        return self._leaves_under[node_id]

    @cached_property
    def _leaves_under(self) -> dict[str, frozenset[str]]:
        memo: dict[str, frozenset[str]] = {}

        def visit(nid: str) -> frozenset[str]:
            if nid not in memo:
                node = self.nodes[nid]
                if node.kind == LEAF:
                    memo[nid] = frozenset([nid])
                else:
                    memo[nid] = frozenset().union(*(visit(c) for c in node.children))
            return memo[nid]

        for nid, node in self.nodes.items():
            if node.kind != DEFENSE:
                visit(nid)
        return memo

    def covered_by(self, defense_id: str) -> frozenset[str]:
        """Attack leaves protected by a defense node."""
        node = self.nodes[defense_id]
        return frozenset().union(*(self.leaves_under(t) for t in node.covers))

    def effective_cost(self, defense_id: str) -> float:
        node = self.nodes[defense_id]
        cost = node.cost or 0.0
        return cost * node.weight if node.weight is not None else cost

    def vulnerability(self, leaf_id: str) -> float:
        v = self.nodes[leaf_id].vulnerability
        return 0.0 if v is None else v

    def evaluate(self, true_leaves: Iterable[str]) -> bool:
        """Whether the root goal holds when exactly ``true_leaves`` succeed."""
        if self.root is None:
            return False
        marked = frozenset(true_leaves)
        return self._holds(self.root, marked, {})

    def _holds(self, nid: str, marked: frozenset[str], memo: dict[str, bool]) -> bool:
        if nid in memo:
            return memo[nid]
        node = self.nodes[nid]
        if node.kind == LEAF:
            result = nid in marked
        elif node.gate == AND:
            result = all(self._holds(c, marked, memo) for c in node.children)
        else:
            result = any(self._holds(c, marked, memo) for c in node.children)
        memo[nid] = result
        return result

    def satisfied_goals(self, true_leaves: Iterable[str]) -> tuple[str, ...]:
        """Goals that hold under ``true_leaves``, in preorder from the root."""
        marked = frozenset(true_leaves)
        memo: dict[str, bool] = {}
        out: list[str] = []
        seen: set[str] = set()

        def walk(nid: str) -> None:
            if nid in seen:
                return
            seen.add(nid)
            node = self.nodes[nid]
            if node.kind == GOAL and self._holds(nid, marked, memo):
                out.append(nid)
                for c in node.children:
                    walk(c)

        if self.root is not None:
            walk(self.root)
        return tuple(out)

    def layers(self) -> dict[str, int]:
        """Depth of every reachable node, root at layer 1 (shortest path)."""
        if self.root is None:
            return {}
        depth = {self.root: 1}
        frontier = [self.root]
        while frontier:
            nxt = []
            for nid in frontier:
                for c in self.nodes[nid].children:
                    if c not in depth:
                        depth[c] = depth[nid] + 1
                        nxt.append(c)
            frontier = nxt
        return depth


def _validate(tree: AttackDefenseTree) -> None:
    nodes = tree.nodes
    if tree.root is not None and tree.root not in nodes:
        raise ValidationError(f"root {tree.root!r} is not a node")
    for node in nodes.values():
        if node.kind not in (GOAL, LEAF, DEFENSE):
            raise ValidationError(f"node {node.id!r}: unknown kind {node.kind!r}")
        if node.kind == GOAL:
            if node.gate not in (AND, OR):
                raise ValidationError(f"goal {node.id!r}: unknown gate {node.gate!r}")
            if not node.children:
                raise ValidationError(f"goal {node.id!r} has no children")
            if len(set(node.children)) != len(node.children):
                raise ValidationError(f"goal {node.id!r} lists a child twice")
        elif node.children or node.gate != NONE:
            raise ValidationError(f"{node.kind} {node.id!r} cannot have a gate or children")
        for c in node.children:
            if c not in nodes:
                raise ValidationError(f"goal {node.id!r} references unknown node {c!r}")
            if nodes[c].kind == DEFENSE:
                raise ValidationError(f"defense {c!r} cannot be a gate child")
        _check_number(node.id, "w", node.weight, lo=0.0)
        if node.kind == LEAF:
            _check_number(node.id, "v", node.vulnerability, lo=0.0, hi=1.0)
        elif node.vulnerability is not None:
            raise ValidationError(f"{node.kind} {node.id!r}: v= is only valid on attack leaves")
        if node.kind == DEFENSE:
            if node.cost is None:
                raise ValidationError(f"defense {node.id!r} needs a cost c=")
            _check_number(node.id, "c", node.cost, lo=0.0)
            if not node.covers:
                raise ValidationError(f"defense {node.id!r} covers nothing")
            for t in node.covers:
                if t not in nodes or nodes[t].kind == DEFENSE:
                    raise ValidationError(f"defense {node.id!r} covers unknown or non-attack node {t!r}")
        elif node.cost is not None or node.covers:
            raise ValidationError(f"{node.kind} {node.id!r}: c=/covers= are only valid on defenses")
    _check_acyclic(nodes)
    if tree.root is not None:
        parents = {c for n in nodes.values() for c in n.children}
        if tree.root in parents:
            raise ValidationError(f"root {tree.root!r} has a parent")
        if nodes[tree.root].kind == DEFENSE:
            raise ValidationError("root cannot be a defense")
        orphans = [
            n.id for n in nodes.values()
            if n.kind != DEFENSE and n.id != tree.root and n.id not in parents
        ]
        if orphans:
            raise ValidationError(f"multiple roots: {tree.root!r} and {orphans[0]!r}")
    elif any(n.kind != DEFENSE for n in nodes.values()):
        raise ValidationError("tree has attack nodes but no root")


def _check_number(nid: str, key: str, value: float | None, lo: float, hi: float | None = None) -> None:
    if value is None:
        return
    if math.isnan(value) or math.isinf(value) or value < lo or (hi is not None and value > hi):
        span = f"[{lo:g}, {hi:g}]" if hi is not None else f">= {lo:g}"
        raise ValidationError(f"node {nid!r}: {key}={value!r} out of range {span}")


def _check_acyclic(nodes: Mapping[str, TreeNode]) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(nodes, WHITE)
    for start in nodes:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(nodes[start].children))]
        color[start] = GREY
        trail = [start]
        while stack:
            nid, it = stack[-1]
            child = next(it, None)
            if child is None:
                color[nid] = BLACK
                stack.pop()
                trail.pop()
            elif color[child] == GREY:
                cycle = trail[trail.index(child):] + [child]
                raise CycleError("cycle detected: " + " -> ".join(cycle))
            elif color[child] == WHITE:
                color[child] = GREY
                trail.append(child)
                stack.append((child, iter(nodes[child].children)))


# --------------------------------------------------------------------- DSL

_TOKEN_RE = re.compile(
    r'(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<brace>[{}])'
    r'|(?P<string>"(?:[^"\\\n]|\\.)*")|(?P<word>[^\s{}"#]+)'
)

_ATTRS = {GOAL: {"w"}, LEAF: {"v", "w"}, DEFENSE: {"c", "covers", "w"}}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str, source: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "string":
            body = re.sub(r"\\(.)", r"\1", m.group()[1:-1])
            toks.append(_Tok("string", body, line, col))
        elif kind in ("brace", "word"):
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, source: str) -> None:
        self.source = source
        self.toks = _lex(text, source)
        self.i = 0
        self.order: list[str] = []
        self.fields: dict[str, dict] = {}
        self.where: dict[str, tuple[int, int]] = {}
        self.refs: list[tuple[str, _Tok]] = []

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        if tok is None:
            tok = self.toks[self.i] if self.i < len(self.toks) else (self.toks[-1] if self.toks else _Tok("", "", 1, 1))
        return ParseError(msg, tok.line, tok.col, self.source)

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind: str | None = None, what: str = "token") -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
            raise ParseError(f"unexpected end of input, expected {what}", last.line, last.col + len(last.text), self.source)
        if kind is not None and tok.kind != kind:
            raise self.error(f"expected {what}, got {tok.text!r}", tok)
        self.i += 1
        return tok

    def parse(self) -> AttackDefenseTree:
        roots: list[str] = []
        while self.peek() is not None:
            nid = self.statement(parent=None)
            if nid is not None:
                roots.append(nid)
        if len(roots) > 1:
            line, col = self.where[roots[1]]
            raise ParseError(f"multiple roots: {roots[0]!r} and {roots[1]!r}", line, col, self.source)
        for nid, tok in self.refs:
            if nid not in self.fields:
                raise self.error(f"reference to undeclared node {nid!r}", tok)
        nodes = {}
        for nid in self.order:
            f = self.fields[nid]
            nodes[nid] = TreeNode(
                id=nid, kind=f["kind"], label=f.get("label", ""), gate=f.get("gate", NONE),
                children=tuple(f.get("children", ())), weight=f.get("w"), cost=f.get("c"),
                vulnerability=f.get("v"), covers=tuple(f.get("covers", ())),
            )
        try:
            return AttackDefenseTree(nodes, roots[0] if roots else None)
        except ValidationError as exc:
            line, col = self._locate(str(exc))
            raise ParseError(str(exc), line, col, self.source) from exc

    def _locate(self, message: str) -> tuple[int, int]:
        for nid in self.order:
            if repr(nid) in message:
                return self.where[nid]
        return (1, 1)

    def statement(self, parent: str | None) -> str | None:
        """Parse one statement; returns the id it contributes as a gate child (None for defenses)."""
        kw = self.take("word", "'goal', 'leaf', 'defense' or 'ref'")
        if kw.text == "ref":
            tok = self.take("word", "node id")
            self.refs.append((tok.text, tok))
            return tok.text
        if kw.text not in ("goal", "leaf", "defense"):
            raise self.error(f"unknown statement {kw.text!r}", kw)
        kind = {"goal": GOAL, "leaf": LEAF, "defense": DEFENSE}[kw.text]
        idtok = self.take("word", "node id")
        nid = idtok.text
        if "=" in nid:
            raise self.error(f"expected node id, got {nid!r}", idtok)
        f: dict = {"kind": kind}
        if kind == GOAL:
            gtok = self.take("word", "gate")
            if gtok.text not in (AND, OR):
                raise self.error(f"unknown gate {gtok.text!r}", gtok)
            f["gate"] = gtok.text
        tok = self.peek()
        if tok is not None and tok.kind == "string":
            f["label"] = self.take().text
        self.attributes(kind, f)
        if kind == GOAL:
            open_tok = self.take("brace", "'{'")
            if open_tok.text != "{":
                raise self.error("expected '{'", open_tok)
            children: list[str] = []
            self.declare(nid, f, idtok)
            while True:
                tok = self.peek()
                if tok is None:
                    raise self.error(f"unclosed block for goal {nid!r}", idtok)
                if tok.text == "}":
                    self.take()
                    break
                child = self.statement(parent=nid)
                if child is not None:
                    if child in children:
                        raise self.error(f"goal {nid!r} lists child {child!r} twice", tok)
                    children.append(child)
            self.fields[nid]["children"] = children
            return nid
        if kind == DEFENSE:
            if "c" not in f:
                raise self.error(f"defense {nid!r} needs a cost c=", idtok)
            if "covers" not in f:
                if parent is None:
                    raise self.error(f"top-level defense {nid!r} needs covers=", idtok)
                f["covers"] = [parent]
            self.declare(nid, f, idtok)
            return None
        if nid in self.fields:
            prev = self.fields[nid]
            if prev["kind"] != LEAF:
                raise self.error(f"id {nid!r} already declared as {prev['kind']}", idtok)
            for key in ("label", "v", "w"):
                if key in f and f[key] != prev.get(key):
                    raise self.error(f"leaf {nid!r} redeclared with different {key}", idtok)
            return nid
        self.declare(nid, f, idtok)
        return nid

    def declare(self, nid: str, f: dict, tok: _Tok) -> None:
        if nid in self.fields:
            raise self.error(f"duplicate id {nid!r}", tok)
        self.fields[nid] = f
        self.order.append(nid)
        self.where[nid] = (tok.line, tok.col)

    def attributes(self, kind: str, f: dict) -> None:
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "word" or "=" not in tok.text:
                return
            self.take()
            key, _, value = tok.text.partition("=")
            if key not in _ATTRS[kind]:
                raise self.error(f"attribute {key!r} not allowed on {kind}", tok)
            if key in f:
                raise self.error(f"attribute {key!r} given twice", tok)
            if key == "covers":
                targets = [t for t in value.split(",") if t]
                if not targets:
                    raise self.error("covers= needs at least one id", tok)
                f[key] = targets
                continue
            try:
                number = float(value)
            except ValueError:
                raise self.error(f"{key}= expects a number, got {value!r}", tok) from None
            lo, hi = (0.0, 1.0) if key == "v" else (0.0, None)
            if math.isnan(number) or math.isinf(number) or number < lo or (hi is not None and number > hi):
                span = f"[{lo:g}, {hi:g}]" if hi is not None else f">= {lo:g}"
                raise self.error(f"{key}={value} out of range {span}", tok)
            f[key] = number


def parse_tree(text: str, source: str = "") -> AttackDefenseTree:
    return _Parser(text, source).parse()


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _attrs(node: TreeNode) -> list[str]:
    attrs = {}
    if node.cost is not None:
        attrs["c"] = repr(node.cost)
    if node.covers:
        attrs["covers"] = ",".join(node.covers)
    if node.vulnerability is not None:
        attrs["v"] = repr(node.vulnerability)
    if node.weight is not None:
        attrs["w"] = repr(node.weight)
    return [f"{k}={attrs[k]}" for k in sorted(attrs)]


def serialize_tree(tree: AttackDefenseTree) -> str:
    """Canonical DSL text: 2-space indent, sorted attributes, defenses after the root."""
    lines: list[str] = []
    emitted: set[str] = set()

    def head(node: TreeNode) -> list[str]:
        parts = [{GOAL: "goal", LEAF: "leaf", DEFENSE: "defense"}[node.kind], node.id]
        if node.kind == GOAL:
            parts.append(node.gate)
        if node.label:
            parts.append(_quote(node.label))
        return parts + _attrs(node)

    def emit(nid: str, depth: int) -> None:
        pad = "  " * depth
        node = tree.nodes[nid]
        if nid in emitted:
            lines.append(f"{pad}ref {nid}")
            return
        emitted.add(nid)
        if node.kind == GOAL:
            lines.append(pad + " ".join(head(node)) + " {")
            for c in node.children:
                emit(c, depth + 1)
            lines.append(pad + "}")
        else:
            lines.append(pad + " ".join(head(node)))

    if tree.root is not None:
        emit(tree.root, 0)
    for nid in tree.defenses:
        lines.append(" ".join(head(tree.nodes[nid])))
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------- scenarios

def _minimize(sets: Iterable[frozenset[str]]) -> list[frozenset[str]]:
    unique = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    kept: list[frozenset[str]] = []
    for s in unique:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


def enumerate_scenarios(tree: AttackDefenseTree, cap: int = DEFAULT_SCENARIO_CAP) -> list[AttackScenario]:
    """All minimal cut sets of the root, ordered by their sorted leaf ids."""
    if tree.root is None:
        return []
    memo: dict[str, list[frozenset[str]]] = {}

    def cuts(nid: str) -> list[frozenset[str]]:
        if nid in memo:
            return memo[nid]
        node = tree.nodes[nid]
        if node.kind == LEAF:
            result = [frozenset([nid])]
        elif node.gate == OR:
            gathered = list(chain.from_iterable(cuts(c) for c in node.children))
            if len(gathered) > cap:
                raise OverflowLimitError(f"goal {nid!r}: more than {cap} scenarios")
            result = _minimize(gathered)
        else:
            acc = [frozenset()]
            for c in node.children:
                child = cuts(c)
                if len(acc) * len(child) > cap:
                    raise OverflowLimitError(f"goal {nid!r}: more than {cap} scenarios")
                acc = _minimize(a | b for a in acc for b in child)
            result = acc
        memo[nid] = result
        return result

    sets = sorted(cuts(tree.root), key=sorted)
    return [AttackScenario(tuple(sorted(s)), tree.satisfied_goals(s)) for s in sets]


# --------------------------------------------------------------------- ODS

def _key(objective: float, selected: tuple[str, ...]) -> tuple:
    return (objective, len(selected), tuple(sorted(selected)))


def compute_ods(
    tree: AttackDefenseTree,
    tradeoff: float = 1.0,
    budget: float | None = None,
    scenarios: list[AttackScenario] | None = None,
) -> DefenseStrategy:
    """Defense selection minimizing total cost minus ``tradeoff`` times covered vulnerability.

    Without ``budget`` every scenario must contain a covered leaf; with it the
    coverage constraint is dropped and total cost must stay within budget.
    Exact branch-and-bound; ties go to fewer defenses, then lexicographic ids.
    """
    if not tradeoff > 0:
        raise ValidationError(f"tradeoff must be positive, got {tradeoff!r}")
    if budget is not None and not budget >= 0:
        raise ValidationError(f"budget must be non-negative, got {budget!r}")
    mode = "full-coverage" if budget is None else "budget"
    if scenarios is None:
        scenarios = enumerate_scenarios(tree)
    leaves = tree.leaves
    bit = {leaf: 1 << i for i, leaf in enumerate(leaves)}
    vuln = [tree.vulnerability(leaf) for leaf in leaves]

    def mask_of(ids: Iterable[str]) -> int:
        m = 0
        for x in ids:
            m |= bit.get(x, 0)
        return m

    def vsum(mask: int) -> list[float]:
        return [vuln[i] for i in range(len(leaves)) if mask >> i & 1]

    defenses = list(tree.defenses)
    cover = [mask_of(tree.covered_by(d)) for d in defenses]
    cost = [tree.effective_cost(d) for d in defenses]
    scen_masks = [mask_of(s.leaves) for s in scenarios] if mode == "full-coverage" else []

    if not leaves or (mode == "full-coverage" and not scenarios):
        return DefenseStrategy((), 0.0, 0.0, 0.0, (), mode)

    reachable = 0
    for m in cover:
        reachable |= m
    uncovered = [s for s, m in zip(scenarios, scen_masks) if not m & reachable]
    if uncovered:
        raise InfeasibleError(
            f"{len(uncovered)} scenario(s) cannot be covered by any defense: "
            + ", ".join("{" + ",".join(s.leaves) + "}" for s in uncovered),
            uncovered,
        )

    n = len(defenses)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | cover[i]

    best: list = [None, None]  # key, selection indices

    def objective(sel: list[int], mask: int) -> float:
        return math.fsum(cost[i] for i in sel) - tradeoff * math.fsum(vsum(mask))

    def consider(sel: list[int], mask: int) -> None:
        if scen_masks and any(not sm & mask for sm in scen_masks):
            return
        ids = tuple(defenses[i] for i in sel)
        key = _key(objective(sel, mask), ids)
        if best[0] is None or key < best[0]:
            best[0], best[1] = key, list(sel)

    def search(i: int, sel: list[int], mask: int, spent: float) -> None:
        if scen_masks and any(not sm & (mask | suffix[i]) for sm in scen_masks):
            return
        if best[0] is not None:
            bound = spent - tradeoff * sum(vsum(mask | suffix[i]))
            if bound > best[0][0] + 1e-9 * (1.0 + abs(best[0][0])):
                return
        if i == n:
            consider(sel, mask)
            return
        gain = cover[i] & ~mask
        # a defense adding no new leaf never improves the objective or the tie-break
        if gain and (budget is None or math.fsum([cost[j] for j in sel] + [cost[i]]) <= budget):
            sel.append(i)
            search(i + 1, sel, mask | cover[i], spent + cost[i])
            sel.pop()
        search(i + 1, sel, mask, spent)

    search(0, [], 0, 0.0)
    if best[1] is None:
        raise InfeasibleError("no selection satisfies the constraints")
    sel = best[1]
    mask = 0
    for i in sel:
        mask |= cover[i]
    total = math.fsum(cost[i] for i in sel)
    covered_v = math.fsum(vsum(mask))
    return DefenseStrategy(
        selected=tuple(defenses[i] for i in sel),
        total_cost=total,
        covered_vulnerability=covered_v,
        objective=best[0][0],
        covered_leaves=tuple(leaf for leaf in leaves if mask & bit[leaf]),
        mode=mode,
    )


def format_scenarios(scenarios: list[AttackScenario]) -> str:
    return "".join(
        f"{i}\t{','.join(s.leaves)}\t{'>'.join(s.path)}\n" for i, s in enumerate(scenarios, start=1)
    )


def format_ods(strategy: DefenseStrategy, tree: AttackDefenseTree | None = None) -> str:
    lines = [
        f"mode\t{strategy.mode}",
        f"selected\t{','.join(strategy.selected) or '-'}",
        f"total_cost\t{strategy.total_cost!r}",
        f"covered_vulnerability\t{strategy.covered_vulnerability!r}",
        f"objective\t{strategy.objective!r}",
        f"covered_leaves\t{','.join(strategy.covered_leaves) or '-'}",
    ]
    return "\n".join(lines) + "\n"
