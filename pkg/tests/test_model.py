import itertools
import random

import pytest
from hypothesis import given, strategies as st

from casekit.model import (
    LATTICE,
    ArgumentNode,
    BlockType,
    CaseGraph,
    ClaimNode,
    Defeater,
    DefeaterKind,
    EvidenceNode,
    Severity,
    Status,
    check_wellformed,
    errors,
    find_cycles,
    is_valid_id,
)


def rules(graph):
    return sorted((d.rule, d.node) for d in check_wellformed(graph))


def small_case(**extra):
    claims = [ClaimNode("Top", "top"), ClaimNode("Sub", "sub")]
    evidence = [EvidenceNode("E1", "log", Status.SATISFIED)]
    arguments = [ArgumentNode("A1", BlockType.DECOMPOSITION, "Top", ("Sub", "E1"))]
    return CaseGraph("t", claims + extra.get("claims", []), evidence + extra.get("evidence", []),
                     arguments + extra.get("arguments", []), extra.get("defeaters", []))


def test_lattice_order_and_colours():
    assert [s.colour for s in LATTICE] == ["white", "red", "orange", "yellow", "green"]
    assert [s.rank for s in LATTICE] == [0, 1, 2, 3, 4]
    assert Status.from_colour("purple") is Status.EXPANDED
    with pytest.raises(ValueError):
        Status.from_colour("blue")


@pytest.mark.parametrize("text,ok", [
    ("a", True), ("C1.1", True), ("Sn-a1", True), ("x_y", True),
    ("1a", False), ("", False), ("a b", False), ("-a", False), ("é", False),
])
def test_id_grammar(text, ok):
    assert is_valid_id(text) is ok


def test_graph_is_immutable_and_compares_by_content():
    g = small_case()
    with pytest.raises(TypeError):
        g.claims["X"] = ClaimNode("X", "x")
    with pytest.raises(AttributeError):
        g.title = "other"
    assert g == small_case()
    assert g != CaseGraph("other", g.claims, g.evidence, g.arguments)


def test_small_case_only_reports_assumption():
    assert rules(small_case()) == [("assumption", "Sub")]


def test_dangling_and_kind_errors():
    g = small_case(arguments=[
        ArgumentNode("A2", BlockType.EVIDENCE_INCORPORATION, "E1", ("Sub",)),
        ArgumentNode("A3", BlockType.CONCRETION, "Ghost", ("Nope",), side="E1"),
    ])
    got = rules(g)
    assert ("evidence-has-children", "A2") in got
    assert got.count(("dangling-ref", "A3")) == 3


def test_duplicate_id_across_kinds():
    g = CaseGraph("t", {"X": ClaimNode("X", "c")}, {"Y": EvidenceNode("X", "e")})
    got = rules(g)
    assert ("duplicate-id", "X") in got and ("key-mismatch", "X") in got


def test_empty_supports_and_text():
    g = CaseGraph("t", [ClaimNode("C", "")], [], [ArgumentNode("A", BlockType.CALCULATION, "C", ())])
    assert {r for r, _ in rules(g)} >= {"empty-supports", "empty-text"}


def test_warnings_do_not_count_as_errors():
    g = CaseGraph("t", [
        ClaimNode("Top", "t", Status.SATISFIED, expands="sub.casl"),
        ClaimNode("Sub", "s"),
        ClaimNode("P", "p", Status.EXPANDED),
    ], [], [ArgumentNode("A", BlockType.CONCRETION, "Top", ("Sub",))])
    got = rules(g)
    assert ("declared-on-supported", "Top") in got
    assert ("expands-with-support", "Top") in got
    assert ("expanded-without-target", "P") in got
    assert not errors(check_wellformed(g))


def test_defeater_target_must_exist():
    g = small_case(defeaters=[Defeater("D1", DefeaterKind.REBUTTAL, "Missing", "doubt"),
                              Defeater("D2", DefeaterKind.UNDERCUT, "A1", "doubt")])
    got = rules(g)
    assert ("dangling-ref", "D1") in got
    assert ("dangling-ref", "D2") not in got


def test_cycle_reported_once_at_smallest_member():
    g = CaseGraph("t", [ClaimNode("B", "b"), ClaimNode("A", "a"), ClaimNode("C", "c")], [], [
        ArgumentNode("x1", BlockType.CONCRETION, "A", ("B",)),
        ArgumentNode("x2", BlockType.CONCRETION, "B", ("C",)),
        ArgumentNode("x3", BlockType.CONCRETION, "C", ("A",)),
    ])
    cyc = [d for d in check_wellformed(g) if d.rule == "cycle"]
    assert len(cyc) == 1 and cyc[0].node == "A" and "A, B, C" in cyc[0].message


def test_side_claim_cycle_detected():
    g = CaseGraph("t", [ClaimNode("A", "a"), ClaimNode("B", "b")], [EvidenceNode("E", "e")], [
        ArgumentNode("x1", BlockType.EVIDENCE_INCORPORATION, "A", ("E",), side="B"),
        ArgumentNode("x2", BlockType.CONCRETION, "B", ("A",)),
    ])
    assert [d.node for d in check_wellformed(g) if d.rule == "cycle"] == ["A"]


def test_diagnostics_are_sorted():
    g = small_case(claims=[ClaimNode("Z", ""), ClaimNode("B", "")])
    diags = check_wellformed(g)
    assert diags == sorted(diags, key=lambda d: (d.node or "", d.rule, d.message))


def _has_cycle_brute(nodes, edges):
    succ = {n: {b for a, b in edges if a == n} for n in nodes}
    for start in nodes:
        seen, stack = set(), list(succ[start])
        while stack:
            n = stack.pop()
            if n == start:
                return True
            if n not in seen:
                seen.add(n)
                stack.extend(succ[n])
    return False


def _on_cycle_brute(nodes, edges):
    succ = {n: {b for a, b in edges if a == n} for n in nodes}

    def reach(a):
        seen, stack = set(), list(succ[a])
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(succ[n])
        return seen
    return {n for n in nodes if n in reach(n)}


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just([f"n{i}" for i in range(n)]),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=12))))
def test_find_cycles_matches_brute_force(data):
    nodes, pairs = data
    edges = [(nodes[a], nodes[b]) for a, b in pairs]
    comps = find_cycles(nodes, edges)
    members = set(itertools.chain.from_iterable(comps))
    assert members == _on_cycle_brute(nodes, edges)
    assert bool(comps) == _has_cycle_brute(nodes, edges)
    assert len(members) == sum(len(c) for c in comps)


def test_find_cycles_deep_chain_is_iterative():
    n = 5000
    nodes = [f"n{i}" for i in range(n)]
    edges = [(nodes[i], nodes[i + 1]) for i in range(n - 1)] + [(nodes[-1], nodes[0])]
    assert len(find_cycles(nodes, edges)[0]) == n


def test_diagnostic_formatting():
    d = errors(check_wellformed(CaseGraph("t", [ClaimNode("C", "")])))[0]
    assert str(d).startswith("C: error:")
    assert d.to_dict()["severity"] == "error"
    assert d.severity is Severity.ERROR
