import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcsguard.errors import InfeasibleError, OverflowLimitError, ParseError
from evcsguard.tree import compute_ods, enumerate_scenarios, parse_tree, serialize_tree

from oracles import minimal_sets, ods_exhaustive, random_tree_text, truth

DOS_SCENARIOS = [{"NF", "M"}, {"M", "P"}, {"P", "A"}, {"ML", "FM"}, {"FM", "MI"}, {"MI", "AF"}]


# ------------------------------------------------------------------ parsing

def test_two_node_tree():
    t = parse_tree("goal root OR { leaf a }")
    assert t.root == "root"
    assert t.nodes["root"].gate == "OR"
    assert len(t.nodes) == 2


def test_dos_fixture_shape(dos_tree):
    t = dos_tree
    assert [t.nodes[g].gate for g in ("L4-1", "L4-2")] == ["OR", "OR"]
    and_groups = [g for g in t.goals if t.nodes[g].gate == "AND"]
    assert len(and_groups) == 6
    assert sorted(t.leaves) == sorted(["NF", "M", "P", "A", "ML", "FM", "MI", "AF"])


@pytest.mark.parametrize("src,needle", [
    ("goal root OR { leaf a v=1.3 }", "out of range"),
    ("goal root XOR { leaf a }", "unknown gate"),
    ("goal a AND { goal b OR { ref a } }", "cycle detected"),
    ("goal root OR { leaf a", "unclosed"),
    ("goal root OR { leaf a w=-1 }", "out of range"),
    ("goal r OR { leaf a }\ngoal s OR { leaf b }", "root"),
    ("goal r OR { leaf a v=0.1 }\nleaf a v=0.2", "a"),
])
def test_parse_errors(src, needle):
    with pytest.raises(ParseError) as exc:
        parse_tree(src, "t.adt")
    assert needle in str(exc.value)
    assert exc.value.line >= 1 and exc.value.col >= 1


def test_node_order_preserved(dos_tree):
    assert dos_tree.leaves == ("NF", "M", "P", "A", "ML", "FM", "MI", "AF")


def test_nested_defense_covers_parent_goal(dos_tree):
    assert dos_tree.covered_by("D-RL") == {"NF", "M", "P", "A"}


def test_round_trip_dos(dos_tree):
    text = serialize_tree(dos_tree)
    again = parse_tree(text)
    assert again == dos_tree
    assert serialize_tree(again) == text


def test_round_trip_random_trees():
    rng = random.Random(5)
    for _ in range(200):
        t = parse_tree(random_tree_text(rng, 10, rng.randint(0, 4)))
        assert parse_tree(serialize_tree(t)) == t


def test_serializer_is_canonical_two_space():
    t = parse_tree('goal r AND {leaf b w=2 v=0.5\n leaf a}\ndefense d c=1 covers=a')
    lines = serialize_tree(t).splitlines()
    assert lines[1].startswith("  leaf ")
    assert lines[1].index("v=") < lines[1].index("w=")


# ---------------------------------------------------------------- scenarios

def test_single_leaf_scenario():
    t = parse_tree("goal root OR { leaf a }")
    assert [s.leaf_set for s in enumerate_scenarios(t)] == [{"a"}]


def test_dos_scenarios(dos_tree):
    got = [set(s.leaves) for s in enumerate_scenarios(dos_tree)]
    assert sorted(map(sorted, got)) == sorted(map(sorted, DOS_SCENARIOS))
    assert len(got) == 6


def test_scenarios_sorted_lexicographically(dos_tree):
    keys = [s.leaves for s in enumerate_scenarios(dos_tree)]
    assert keys == sorted(keys)
    assert all(list(k) == sorted(k) for k in keys)


def test_and_over_two_ors_gives_four():
    t = parse_tree("goal r AND { goal x OR { leaf a leaf b } goal y OR { leaf c leaf d } }")
    got = {s.leaf_set for s in enumerate_scenarios(t)}
    assert got == minimal_sets(t)
    assert len(got) == 4


def test_subset_filtering_with_shared_leaves():
    t = parse_tree("goal r OR { leaf a goal g AND { ref a leaf b } }")
    assert [s.leaves for s in enumerate_scenarios(t)] == [("a",)]


def test_scenario_path_names_satisfied_goals(dos_tree):
    first = enumerate_scenarios(dos_tree)[0]
    assert first.path[0] == "L3-2"


def test_overflow_cap():
    body = " ".join(f"goal g{i} OR {{ leaf a{i} leaf b{i} }}" for i in range(12))
    t = parse_tree(f"goal r AND {{ {body} }}")
    with pytest.raises(OverflowLimitError):
        enumerate_scenarios(t, cap=1000)
    assert len(enumerate_scenarios(t)) == 2**12


def test_minimality_matches_truth_table_on_random_trees():
    rng = random.Random(11)
    for _ in range(150):
        t = parse_tree(random_tree_text(rng, 8))
        scen = enumerate_scenarios(t)
        assert {s.leaf_set for s in scen} == minimal_sets(t)
        for s in scen:
            assert truth(t, s.leaf_set)
            assert not any(truth(t, s.leaf_set - {x}) for x in s.leaves)


# ---------------------------------------------------------------------- ODS

def test_single_leaf_cheaper_defense_wins():
    t = parse_tree("goal r OR { leaf a v=0.5 }\ndefense d1 c=3 covers=a\ndefense d2 c=5 covers=a")
    ods = compute_ods(t)
    assert ods.selected == ("d1",)
    assert ods.total_cost == 3


def test_no_leaves_gives_empty_selection():
    from evcsguard.tree import AttackDefenseTree

    ods = compute_ods(AttackDefenseTree({}, None))
    assert ods.selected == () and ods.objective == 0


def test_infeasible_lists_uncovered():
    t = parse_tree("goal r OR { leaf a leaf b }\ndefense d c=1 covers=a")
    with pytest.raises(InfeasibleError) as exc:
        compute_ods(t)
    assert [s.leaves for s in exc.value.uncovered] == [("b",)]


THREE_DEFENSES = """
goal L3-2 OR {
  goal L4-1 OR {
    goal NB-1 AND { leaf NF v=0.3 leaf M v=0.2 }
    goal NB-2 AND { ref M leaf P v=0.4 }
    goal NB-3 AND { ref P leaf A v=0.5 }
  }
  goal L4-2 OR {
    goal SR-1 AND { leaf ML v=0.6 leaf FM v=0.3 }
    goal SR-2 AND { ref FM leaf MI v=0.2 }
    goal SR-3 AND { ref MI leaf AF v=0.4 }
  }
}
defense D-IDS c=3.0 covers=M,P
defense D-PATCH c=2.5 covers=P,A
defense D-FIM c=3.0 covers=L4-2
"""


def test_three_defenses_on_dos_scenarios_match_exhaustive():
    t = parse_tree(THREE_DEFENSES)
    scen = enumerate_scenarios(t)
    assert len(scen) == 6
    ods = compute_ods(t, scenarios=scen)
    ids, obj = ods_exhaustive(t, scen)
    assert tuple(sorted(ods.selected)) == ids
    assert ods.objective == obj


def test_dos_full_coverage(dos_tree):
    scen = enumerate_scenarios(dos_tree)
    ods = compute_ods(dos_tree)
    ids, obj = ods_exhaustive(dos_tree, scen)
    assert tuple(sorted(ods.selected)) == ids and ods.objective == obj
    covered = set(ods.covered_leaves)
    assert all(s.leaf_set & covered for s in scen)


def test_budget_mode_respects_budget():
    t = parse_tree("goal r AND { leaf a v=0.9 leaf b v=0.8 }\ndefense x c=1 covers=a\ndefense y c=1 covers=b")
    ods = compute_ods(t, tradeoff=5.0, budget=1.0)
    assert ods.mode == "budget"
    assert ods.total_cost <= 1.0
    assert ods.selected == ("x",)


def test_weight_multiplies_defense_cost():
    t = parse_tree("goal r OR { leaf a }\ndefense d1 c=3 w=2 covers=a\ndefense d2 c=5 covers=a")
    assert compute_ods(t).selected == ("d2",)


def test_tie_breaks_fewer_then_lexicographic():
    t = parse_tree("goal r OR { leaf a v=0 }\ndefense zz c=1 covers=a\ndefense aa c=1 covers=a")
    assert compute_ods(t).selected == ("aa",)


def test_random_instances_match_exhaustive():
    rng = random.Random(3)
    for _ in range(40):
        t = parse_tree(random_tree_text(rng, 8, rng.randint(1, 10)))
        scen = enumerate_scenarios(t)
        lam = rng.choice([0.5, 1.0, 4.0])
        expected = ods_exhaustive(t, scen, lam)
        if expected is None:
            with pytest.raises(InfeasibleError):
                compute_ods(t, lam, scenarios=scen)
            continue
        ods = compute_ods(t, lam, scenarios=scen)
        assert (tuple(sorted(ods.selected)), ods.objective) == expected


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), factor=st.sampled_from([0.5, 2.0, 4.0, 10.0]))
def test_scaling_costs_and_tradeoff_keeps_argmin(seed, factor):
    rng = random.Random(seed)
    text = random_tree_text(rng, 6, 5)
    t = parse_tree(text)
    scen = enumerate_scenarios(t)
    try:
        base = compute_ods(t, 1.0, scenarios=scen)
    except InfeasibleError:
        return
    lines = []
    for line in text.splitlines():
        if line.startswith("defense"):
            parts = line.split()
            parts = [f"c={float(p[2:]) * factor!r}" if p.startswith("c=") else p for p in parts]
            line = " ".join(parts)
        lines.append(line)
    scaled = compute_ods(parse_tree("\n".join(lines)), factor, scenarios=scen)
    assert scaled.selected == base.selected
