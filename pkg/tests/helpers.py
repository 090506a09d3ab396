"""Generators and independent oracles shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools
import random
import string

from hypothesis import strategies as st

from casekit.model import (
    LATTICE,
    ArgumentNode,
    BlockType,
    CaseGraph,
    ClaimNode,
    Defeater,
    DefeaterKind,
    EvidenceNode,
    Status,
)
from casekit.casl import ProbRecord

RANK = {s: i for i, s in enumerate(LATTICE)}
DECLARABLE = [None, *LATTICE]


# -- random DAG cases ----------------------------------------------------------

def random_dag(rng: random.Random, max_nodes: int = 20, defeaters: bool = True,
               purple: bool = True) -> CaseGraph:
    """A well-formed case whose support edges only point to higher indices."""
    n = rng.randint(1, max_nodes)
    kinds = ["claim" if i == 0 or rng.random() < 0.6 else "evidence" for i in range(n)]
    names = [f"{'C' if k == 'claim' else 'E'}{i}" for i, k in enumerate(kinds)]
    later_claims = lambda i: [names[j] for j in range(i + 1, n) if kinds[j] == "claim"]
    statuses = DECLARABLE + ([Status.EXPANDED] if purple else [])
    claims, evidence, arguments = {}, {}, {}
    for i, (kind, name) in enumerate(zip(kinds, names)):
        status = rng.choice(statuses)
        if kind == "evidence":
            evidence[name] = EvidenceNode(name, f"evidence {i}", None if status is Status.EXPANDED else status)
            continue
        claims[name] = ClaimNode(name, f"claim {i}", status)
        pool = names[i + 1:]
        if not pool:
            continue
        for k in range(rng.choice([0, 1, 1, 2])):
            supports = tuple(rng.sample(pool, rng.randint(1, min(3, len(pool)))))
            sides = later_claims(i)
            side = rng.choice(sides) if sides and rng.random() < 0.3 else None
            aid = f"A{i}_{k}"
            arguments[aid] = ArgumentNode(aid, rng.choice(list(BlockType)), name, supports, side)
    defs = {}
    if defeaters:
        targets = list(claims) + list(evidence) + list(arguments)
        for k in range(rng.choice([0, 0, 1, 2])):
            did = f"D{k}"
            defs[did] = Defeater(did, rng.choice(list(DefeaterKind)), rng.choice(targets),
                                 "doubt", rng.random() < 0.3)
    return CaseGraph("random", claims, evidence, arguments, defs)


def upgrade_leaf(rng: random.Random, graph: CaseGraph):
    """Raise one leaf's declared status; returns the new graph or None."""
    supported = {a.top for a in graph.arguments.values()}
    leaves = [c for c in graph.claims.values() if c.id not in supported] + list(graph.evidence.values())
    rng.shuffle(leaves)
    for leaf in leaves:
        current = leaf.declared_status
        rank = -1 if current in (None, Status.EXPANDED) else RANK[current]
        if rank >= RANK[Status.SATISFIED]:
            continue
        new = LATTICE[rng.randint(max(rank, 0) + (rank >= 0), len(LATTICE) - 1)]
        claims, evidence = dict(graph.claims), dict(graph.evidence)
        if leaf.id in claims:
            claims[leaf.id] = ClaimNode(leaf.id, leaf.text, new, leaf.expands)
        else:
            evidence[leaf.id] = EvidenceNode(leaf.id, leaf.text, new)
        return CaseGraph(graph.title, claims, evidence, graph.arguments, graph.defeaters)
    return None


def oracle_status(graph: CaseGraph) -> dict[str, Status]:
    """Direct recursive reading of the roll-up rules, no memoisation tricks."""
    caps = {}
    for d in graph.defeaters.values():
        if not d.resolved:
            limit = Status.PARTIAL if d.kind is DefeaterKind.UNDERCUT else Status.DEFERRED
            caps.setdefault(d.target, []).append(limit)

    def cap(node, value):
        for limit in caps.get(node, []):
            if RANK[limit] < RANK[value]:
                value = limit
        return value

    def leaf(declared):
        return Status.UNEVALUATED if declared in (None, Status.EXPANDED) else declared

    def arg(aid):
        a = graph.arguments[aid]
        kids = [node(s) for s in a.supports] + ([node(a.side)] if a.side else [])
        return cap(aid, min(kids, key=RANK.get))

    def node(nid):
        if nid in graph.evidence:
            return cap(nid, leaf(graph.evidence[nid].declared_status))
        args = [a for a in graph.arguments.values() if a.top == nid]
        if not args:
            return cap(nid, leaf(graph.claims[nid].declared_status))
        return cap(nid, max((arg(a.id) for a in args), key=RANK.get))

    return {nid: node(nid) for nid in list(graph.claims) + list(graph.evidence)}


# -- hypothesis strategy for arbitrary well-formed cases -------------------------

ID_HEAD = string.ascii_letters
ID_TAIL = string.ascii_letters + string.digits + "_.-"
ids = st.builds(lambda h, t: h + t, st.sampled_from(ID_HEAD), st.text(ID_TAIL, max_size=6))
texts = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=20)
probs = st.floats(0.0, 1.0, allow_nan=False) | st.sampled_from([0.0, 1.0, 1e-9, 0.1, 0.5])


@st.composite
def well_formed_cases(draw):
    names = draw(st.lists(ids, min_size=1, max_size=12, unique=True))
    kinds = ["claim"] + [draw(st.sampled_from(["claim", "evidence"])) for _ in names[1:]]
    claims, evidence, arguments, defeaters = {}, {}, {}, {}
    for i, (name, kind) in enumerate(zip(names, kinds)):
        status = draw(st.sampled_from(DECLARABLE + [Status.EXPANDED]))
        if kind == "evidence":
            evidence[name] = EvidenceNode(name, draw(texts), status)
        else:
            expands = draw(st.none() | st.sampled_from(["sub.casl", "dir/other case.casl", "x"]))
            claims[name] = ClaimNode(name, draw(texts), status, expands)
    taken = set(names)

    def fresh(prefix):
        k = 0
        while f"{prefix}{k}" in taken:
            k += 1
        taken.add(f"{prefix}{k}")
        return f"{prefix}{k}"

    for i, name in enumerate(names):
        if kinds[i] != "claim" or i == len(names) - 1:
            continue
        for _ in range(draw(st.integers(0, 2))):
            supports = draw(st.lists(st.sampled_from(names[i + 1:]), min_size=1, max_size=3))
            later = [n for j, n in enumerate(names) if j > i and kinds[j] == "claim"]
            side = draw(st.none() | st.sampled_from(later)) if later else None
            aid = fresh("arg")
            arguments[aid] = ArgumentNode(aid, draw(st.sampled_from(list(BlockType))), name,
                                          tuple(supports), side)
    targets = list(claims) + list(evidence) + list(arguments)
    for _ in range(draw(st.integers(0, 2))):
        did = fresh("def")
        defeaters[did] = Defeater(did, draw(st.sampled_from(list(DefeaterKind))),
                                  draw(st.sampled_from(targets)), draw(texts), draw(st.booleans()))
    records = []
    pairs = set()
    for _ in range(draw(st.integers(0, 3))):
        if not evidence:
            break
        pair = (draw(st.sampled_from(sorted(evidence))), draw(st.sampled_from(sorted(claims))))
        if pair in pairs:
            continue
        pairs.add(pair)
        records.append(ProbRecord(pair[0], pair[1], draw(probs), draw(probs)))
    title = draw(st.text(st.characters(blacklist_categories=("Cs",)), max_size=15))
    return CaseGraph(title, claims, evidence, arguments, defeaters), records


# -- brute-force DPN reachability ---------------------------------------------------

def _num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _atom_ok(fields: dict, atom) -> bool:
    if atom.key not in fields:
        return False
    v, lit = fields[atom.key], atom.literal
    if atom.op == "=":
        return _num(v) == _num(lit) and v == lit
    if atom.op == "!=":
        return not (_num(v) == _num(lit) and v == lit)
    if not _num(v):
        return False
    return v >= lit if atom.op == ">=" else v <= lit


def _guard_ok(fields: dict, guard) -> bool:
    return all(_atom_ok(fields, a) for a in guard.atoms)


def _token(payload) -> tuple:
    return (("artefact", payload.artefact),) + tuple(payload.fields)


def _canon_token(place, tok):
    return (place, tuple((k, ("n" if _num(v) else "s"), v) for k, v in tok))


def canonical_state(marking) -> tuple:
    """Order-free view of a marking with serials dropped."""
    return tuple(sorted(_canon_token(p, _token(t.payload)) for p, ts in marking.tokens.items() for t in ts))


def _apply(tokens, transform):
    fields = dict(tokens[0])
    for edit in transform.edits:
        name = type(edit).__name__
        if name == "SetEdit":
            fields[edit.key] = str(edit.literal) if edit.key == "artefact" else edit.literal
        elif name == "CopyEdit":
            src = dict(tokens[edit.source])
            if edit.key not in src:
                return None
            fields[edit.key] = src[edit.key]
        else:
            if edit.key == "artefact":
                return None
            fields.pop(edit.key, None)
    return tuple(fields.items())


def _successors(net, state):
    flat = [(p, tok) for p, tok in state]
    for t in net.transitions.values():
        pools = []
        for place, guard in t.inputs:
            pools.append([i for i, (p, tok) in enumerate(flat)
                          if p == place and _guard_ok(dict(tok), guard)])
        for choice in itertools.product(*pools):
            if len(set(choice)) != len(choice):
                continue
            bound = [flat[i][1] for i in choice]
            outs = []
            for place, transform in t.outputs:
                tok = _apply(bound, transform)
                if tok is None or not _guard_ok(dict(tok), net.places[place].condition):
                    outs = None
                    break
                outs.append((place, tok))
            if outs is None:
                continue
            rest = [x for i, x in enumerate(flat) if i not in choice]
            yield tuple(sorted(rest + outs, key=repr))


def brute_force_reachable(net, marking, bound: int, depth: int) -> set:
    start = tuple(sorted(((p, _token(t.payload)) for p, ts in marking.tokens.items() for t in ts), key=repr))
    level = {start}
    for _ in range(depth):
        grown = set(level)
        for state in level:
            for nxt in _successors(net, state):
                counts = {}
                for p, _ in nxt:
                    counts[p] = counts.get(p, 0) + 1
                if max(counts.values(), default=0) <= bound:
                    grown.add(nxt)
        level = grown
    return {tuple(sorted(_canon_token(p, tok) for p, tok in s)) for s in level}
