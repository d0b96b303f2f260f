"""Independent reference implementations used as test oracles.

None of these reuse the package's algorithms: truth tables replace cut-set
algebra, exhaustive subset search replaces branch-and-bound, full state
sequence enumeration replaces Viterbi, and belief-space recursion replaces
Monte-Carlo search.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np

from evcsguard.planner import Pomdp


# ------------------------------------------------------------ attack trees

def truth(tree, true_leaves, node=None) -> bool:
    node = tree.root if node is None else node
    n = tree.nodes[node]
    if n.kind == "attack-leaf":
        return node in true_leaves
    kids = [c for c in n.children if tree.nodes[c].kind != "defense"]
    vals = [truth(tree, true_leaves, c) for c in kids]
    return all(vals) if n.gate == "AND" else any(vals)


def minimal_sets(tree) -> set[frozenset]:
    """Minimal satisfying leaf sets by walking the full truth table."""
    leaves = list(tree.leaves)
    sat = []
    for mask in range(1 << len(leaves)):
        s = frozenset(leaves[i] for i in range(len(leaves)) if mask >> i & 1)
        if truth(tree, s):
            sat.append(s)
    return {s for s in sat if not any(t < s for t in sat)}


def random_tree_text(rng: random.Random, max_leaves: int = 10, n_defenses: int = 0,
                     share: float = 0.15) -> str:
    """A random DSL document: nested AND/OR goals, optional shared leaves and defenses."""
    n_leaves = rng.randint(1, max_leaves)
    leaves = [f"a{i}" for i in range(n_leaves)]
    counter = itertools.count()
    declared: set[str] = set()

    def leaf_line(name: str, pad: str) -> str:
        if name in declared:
            return f"{pad}ref {name}"
        declared.add(name)
        v = round(rng.random(), 3)
        w = round(rng.uniform(0.5, 2.0), 2)
        return f"{pad}leaf {name} v={v} w={w}"

    def build(pool: list[str], depth: int) -> list[str]:
        pad = "  " * depth
        gid = f"g{next(counter)}"
        gate = rng.choice(["AND", "OR"])
        lines = [f"{pad}goal {gid} {gate} {{"]
        if len(pool) <= 2 or depth >= 3:
            groups = [[x] for x in pool]
        else:
            k = rng.randint(2, min(4, len(pool)))
            cuts = sorted(rng.sample(range(1, len(pool)), k - 1))
            groups = [pool[i:j] for i, j in zip([0] + cuts, cuts + [len(pool)])]
        for g in groups:
            if len(g) == 1:
                lines.append(leaf_line(g[0], pad + "  "))
            else:
                lines += build(g, depth + 1)
        direct = {g[0] for g in groups if len(g) == 1}
        shareable = sorted(declared - direct)
        if shareable and rng.random() < share:
            lines.append(f"{pad}  ref {rng.choice(shareable)}")
        lines.append(f"{pad}}}")
        return lines

    lines = build(leaves, 0)
    for d in range(n_defenses):
        covers = rng.sample(leaves, rng.randint(1, min(3, n_leaves)))
        c = round(rng.uniform(0.5, 5.0), 2)
        lines.append(f"defense d{d:02d} c={c} covers={','.join(covers)}")
    return "\n".join(lines) + "\n"


def ods_exhaustive(tree, scenarios, tradeoff: float = 1.0, budget: float | None = None):
    """Best defense subset by scoring every subset (vectorized), ties resolved exactly.

    Returns (selected ids, objective) or None when nothing is feasible.
    """
    defenses = list(tree.defenses)
    leaves = list(tree.leaves)
    n = len(defenses)
    bit = {leaf: i for i, leaf in enumerate(leaves)}
    cover = np.zeros(n, dtype=np.int64)
    cost = np.zeros(n)
    for i, d in enumerate(defenses):
        node = tree.nodes[d]
        covered = set()
        for t in node.covers:
            covered |= _leaves_below(tree, t)
        cover[i] = sum(1 << bit[x] for x in covered if x in bit)
        cost[i] = node.cost * (node.weight if node.weight is not None else 1.0)
    vuln = [tree.nodes[x].vulnerability or 0.0 for x in leaves]

    masks = np.zeros(1 << n, dtype=np.int64)
    costs = np.zeros(1 << n)
    for i in range(n):
        half = 1 << i
        masks[half:2 * half] = masks[:half] | cover[i]
        costs[half:2 * half] = costs[:half] + cost[i]
    vsum = np.zeros(1 << n)
    for j, v in enumerate(vuln):
        vsum += ((masks >> j) & 1) * v
    obj = costs - tradeoff * vsum
    ok = np.ones(1 << n, dtype=bool)
    if budget is None:
        for s in scenarios:
            sm = sum(1 << bit[x] for x in s.leaves)
            ok &= (masks & sm) != 0
    else:
        ok &= costs <= budget + 1e-9
    if not ok.any():
        return None
    best = obj[ok].min()
    cands = np.flatnonzero(ok & (obj <= best + 1e-7 * (1 + abs(best))))

    def exact(sel: int):
        ids = [defenses[i] for i in range(n) if sel >> i & 1]
        m = 0
        for i in range(n):
            if sel >> i & 1:
                m |= int(cover[i])
        c = math.fsum(cost[i] for i in range(n) if sel >> i & 1)
        if budget is not None and c > budget:
            return None
        o = c - tradeoff * math.fsum(vuln[j] for j in range(len(leaves)) if m >> j & 1)
        return (o, len(ids), tuple(sorted(ids)))

    keyed = [k for k in (exact(int(c)) for c in cands) if k is not None]
    o, _, ids = min(keyed)
    return ids, o


def _leaves_below(tree, nid) -> set[str]:
    n = tree.nodes[nid]
    if n.kind == "attack-leaf":
        return {nid}
    out = set()
    for c in n.children:
        if tree.nodes[c].kind != "defense":
            out |= _leaves_below(tree, c)
    return out


# --------------------------------------------------------------------- HMM

def random_model(rng: np.random.Generator, n: int, m: int, zeros: float = 0.0):
    from evcsguard.hmm import HmmModel

    def rows(r, c):
        a = rng.random((r, c))
        if zeros:
            a[rng.random((r, c)) < zeros] = 0.0
            for row in a:
                if not row.any():
                    row[rng.integers(c)] = 1.0
        return a / a.sum(axis=1, keepdims=True)

    return HmmModel(
        tuple(f"s{i}" for i in range(n)),
        tuple(f"o{k}" for k in range(m)),
        rows(n, n), rows(n, m), rows(1, n)[0],
    )


def joint_log(model, alerts, states) -> float:
    si = {s: i for i, s in enumerate(model.states)}
    oi = {o: i for i, o in enumerate(model.symbols)}
    terms = [model.initial[si[states[0]]], model.emission[si[states[0]], oi[alerts[0]]]]
    for t in range(1, len(alerts)):
        terms.append(model.transition[si[states[t - 1]], si[states[t]]])
        terms.append(model.emission[si[states[t]], oi[alerts[t]]])
    if any(x == 0 for x in terms):
        return -math.inf
    return math.fsum(math.log(x) for x in terms)


def viterbi_bruteforce(model, alerts) -> tuple[float, tuple[str, ...]]:
    best = (-math.inf, ())
    for q in itertools.product(model.states, repeat=len(alerts)):
        ll = joint_log(model, alerts, q)
        if ll > best[0]:
            best = (ll, q)
    return best


def viterbi_bruteforce_np(model, alerts) -> float:
    """Maximum joint log-likelihood over all N^k state sequences, vectorized."""
    n, k = model.n_states, len(alerts)
    obs = [model.symbols.index(a) for a in alerts]
    with np.errstate(divide="ignore"):
        lt, le, lp = np.log(model.transition), np.log(model.emission), np.log(model.initial)
    seqs = np.array(list(itertools.product(range(n), repeat=k)))
    ll = lp[seqs[:, 0]] + le[seqs[:, 0], obs[0]]
    for t in range(1, k):
        ll = ll + lt[seqs[:, t - 1], seqs[:, t]] + le[seqs[:, t], obs[t]]
    return float(ll.max())


def fraction_rows(counts) -> list[list[float]]:
    """Row frequencies as correctly rounded exact ratios; empty rows uniform."""
    out = []
    for row in counts:
        total = sum(int(x) for x in row)
        out.append([float(Fraction(int(x), total)) if total else float(Fraction(1, len(row))) for x in row])
    return out


# (states, symbols) string pairs; each character is one step
FIXED_CORPORA = [
    [("ABAB", "xxyy")],
    [("AAB", "xyx"), ("BBA", "yyx")],
    [("ABC", "xyz"), ("CBA", "zyx"), ("BBB", "yyy")],
    [("A", "x")],
    [("AB", "xy"), ("AC", "xz"), ("AD", "xx")],
    [("ABCABC", "xyxyxy")],
    [("AAAA", "xxxy"), ("AB", "yx")],
    [("CAB", "zzx"), ("BCA", "xyz"), ("ABC", "yyy")],
    [("ABAC", "xyxz"), ("CABA", "zxyx")],
    [("DCBA", "wxyz"), ("ABCD", "zyxw")],
    [("AB", "xx")] * 7 + [("AA", "xy")] * 3,
    [("ABBB", "xyyy"), ("BAAA", "yxxx"), ("AB", "yx")],
    [("AC", "xy"), ("CA", "yx"), ("CC", "yy"), ("AA", "xx")],
    [("ABCDE", "xyzxy")],
    [("EDCBA", "yxzyx"), ("AE", "xy")],
    [("ABA", "xyx")] * 3 + [("BAB", "yxy")] * 2,
    [("ACE", "xzz"), ("BDB", "yyx")],
    [("AAAB", "xxxx"), ("BBBA", "yyyy"), ("AB", "xy")],
    [("ABCD", "xxxx")],
    [("DA", "xy"), ("DB", "xz"), ("DC", "yz"), ("DD", "zz")],
]



# ------------------------------------------------------------------ POMDPs

def decoy_tiger(accuracy: float = 0.85, catch: float = 10.0, loss: float = -30.0,
                probe: float = -1.0, gamma: float = 0.95) -> Pomdp:
    """Attacker hides behind one of two entry points; the defender probes or baits one.

    States L, R (intended entry), caught, goal. Probing costs a little and
    returns a noisy hint; a decoy on the right entry catches the attacker, a
    decoy on the wrong one lets it through to the goal.
    """
    states = ["L", "R", "caught", "goal"]
    actions = ["probe", "decoy-L", "decoy-R"]
    observations = ["hint-L", "hint-R"]
    outcomes = []
    for s in range(2):
        row = [[(1.0, s, probe)]]
        for d in range(2):
            row.append([(1.0, 2, catch)] if d == s else [(1.0, 3, loss)])
        outcomes.append(row)
    for t in (2, 3):
        outcomes.append([[(1.0, t, 0.0)] for _ in actions])
    probe_obs = [[(accuracy, 0), (1 - accuracy, 1)], [(1 - accuracy, 0), (accuracy, 1)], [(1.0, 0)], [(1.0, 0)]]
    flat = [[(1.0, 0)] for _ in states]
    return Pomdp(states, actions, observations, outcomes, [probe_obs, flat, flat],
                 [False, False, True, True], gamma)


def belief_q_values(pomdp: Pomdp, belief, horizon: int) -> list[float]:
    """Exact finite-horizon Q-values at ``belief`` by recursion over observations."""
    return [_q(pomdp, belief, a, horizon) for a in range(len(pomdp.actions))]


def _value(pomdp, belief, horizon) -> float:
    if horizon == 0:
        return 0.0
    return max(_q(pomdp, belief, a, horizon) for a in range(len(pomdp.actions)))


def _q(pomdp, belief, a, horizon) -> float:
    n = len(pomdp.states)
    reward = 0.0
    nxt: dict[int, list[float]] = {}
    for s, b in enumerate(belief):
        if b == 0 or pomdp.terminal[s]:
            continue
        for p, s2, r in pomdp.outcomes[s][a]:
            reward += b * p * r
            for q, o in pomdp.obs_model[a][s2]:
                nxt.setdefault(o, [0.0] * n)[s2] += b * p * q
    future = 0.0
    for vec in nxt.values():
        z = sum(vec)
        if z > 0:
            future += z * _value(pomdp, [x / z for x in vec], horizon - 1)
    return reward + pomdp.discount * future


def admissible_trajectories(scenarios) -> set[tuple[str, ...]]:
    """Every leaf sequence that interleaves scenario steps until one scenario is complete.

    A move is admissible when the leaf is new and belongs to some scenario, and
    the walk stops as soon as the compromised set contains a whole scenario.
    """
    universe = sorted(set().union(*(s.leaf_set for s in scenarios)))
    out: set[tuple[str, ...]] = set()

    def walk(seq: tuple[str, ...]) -> None:
        out.add(seq)
        done = set(seq)
        if any(s.leaf_set <= done for s in scenarios):
            return
        for leaf in universe:
            if leaf not in done:
                walk(seq + (leaf,))

    walk(())
    return out
