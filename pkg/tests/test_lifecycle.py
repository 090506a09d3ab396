import pytest
from hypothesis import given, settings, strategies as st

from casekit.casl import ParseError
from casekit.data import DELIVERY_LOG, DELIVERY_NET, read_text
from casekit.lifecycle import (
    AssuranceCheckFailed,
    AssurancePayload,
    Fire,
    FireError,
    Inject,
    Marking,
    NetError,
    NotEnabled,
    ProcessView,
    ReplayError,
    Token,
    enabled,
    fire,
    inject,
    marking_dict,
    parse_events,
    parse_net,
    reachable,
    replay,
)
from casekit.lifecycle.formats import parse_guard

from helpers import brute_force_reachable, canonical_state

NET = parse_net(read_text(DELIVERY_NET))


def request(package="p1", **extra):
    return AssurancePayload("Request", (("kind", "request"), ("package", package), *extra.items()))


def seeded(*packages):
    m = Marking()
    for p in packages:
        m, _ = inject(NET, m, "Request", request(p))
    return m


def test_packaged_net_shape():
    assert sorted(NET.places) == ["Delivered", "ImprovementBacklog", "InTransit", "Request",
                                  "ServiceResumed", "Stopped"]
    assert NET.input_places == ("Request",)
    assert NET.places["Stopped"].view is ProcessView.FAILURE_RESPONSE
    assert NET.transitions["transport"].stage == "Transport package"


def test_initial_enabled_set():
    assert enabled(NET, Marking()) == []
    assert enabled(NET, seeded("p1")) == [("request_delivery", (1,))]


def test_replay_of_packaged_log():
    events = parse_events(read_text(DELIVERY_LOG))
    final, trace = replay(NET, Marking(), events)
    assert [p for p, ts in final.tokens.items() for _ in ts] == ["Delivered"]
    tok = final.at("Delivered")[0]
    assert tok.payload.get("result") == "success" and not tok.payload.has("status")
    assert [e.record.transition for e in trace if e.record] == ["request_delivery", "transport", "report_success"]
    _, again = replay(NET, Marking(), events)
    assert [e.fingerprint for e in trace] == [e.fingerprint for e in again]
    assert [e.to_dict() for e in trace] == [e.to_dict() for e in again]


def test_failure_response_branch():
    m, _ = fire(NET, seeded("p1"), "request_delivery")
    assert [t for t, _ in enabled(NET, m)] == ["detect_failure", "transport"]
    m, rec = fire(NET, m, "detect_failure")
    m, rec = fire(NET, m, "arrange_alternative")
    assert rec.produced == (("ServiceResumed", 4), ("ImprovementBacklog", 5))
    backlog = m.at("ImprovementBacklog")[0].payload
    assert backlog.artefact == "correction-request" and backlog.get("kind") == "correction"
    assert not backlog.has("approved")
    assert m.at("ServiceResumed")[0].payload.get("vehicle") == "alternative"


def test_deterministic_binding_takes_smallest_serials():
    m = seeded("p1", "p2", "p3")
    m, rec = fire(NET, m, "request_delivery")
    assert rec.consumed == (1,)
    m, rec = fire(NET, m, "request_delivery", serials=[3])
    assert rec.consumed == (3,)
    assert [t.payload.get("package") for t in m.at("Request")] == ["p2"]


def test_failed_fire_leaves_marking_untouched():
    net = parse_net('''place In cond=k=1
place Out cond=ok=yes
input In
transition bad stage="Forgets to certify" in=In out=Out:k=2
''')
    m, _ = inject(net, Marking(), "In", AssurancePayload("doc", (("k", 1),)))
    snapshot = (marking_dict(m), m.next_serial, m.fingerprint())
    with pytest.raises(AssuranceCheckFailed) as info:
        fire(net, m, "bad")
    assert info.value.place == "Out" and str(info.value.atom) == "ok=yes"
    assert (marking_dict(m), m.next_serial, m.fingerprint()) == snapshot
    with pytest.raises(NotEnabled):
        fire(net, m, "bad", serials=[99])
    with pytest.raises(NotEnabled):
        fire(net, m, "nope")
    assert (marking_dict(m), m.next_serial, m.fingerprint()) == snapshot


def test_replay_names_failing_step():
    events = [Inject("Request", request()), Fire("transport")]
    with pytest.raises(ReplayError) as info:
        replay(NET, Marking(), events)
    assert info.value.step == 1


def test_inject_rules():
    with pytest.raises(FireError):
        inject(NET, Marking(), "InTransit", request())
    with pytest.raises(AssuranceCheckFailed):
        inject(NET, Marking(), "Request", AssurancePayload("Request", (("kind", "order"),)))


@pytest.mark.parametrize("guard,fields,ok", [
    ("n>=2", {"n": 2}, True), ("n>=2", {"n": 1.5}, False), ("n<=2", {"n": "1"}, False),
    ("s=1", {"s": "1"}, False), ("s=1", {"s": 1}, True), ("s!=x", {}, False), ("s!=x", {"s": "y"}, True),
    ("a=b&c=d", {"a": "b", "c": "d"}, True), ("a=b&c=d", {"a": "b"}, False), ("", {}, True),
])
def test_guard_semantics(guard, fields, ok):
    assert parse_guard(guard).holds(AssurancePayload("x", tuple(fields.items()))) is ok


def test_payload_rules():
    with pytest.raises(NetError):
        AssurancePayload("x", (("artefact", "y"),))
    with pytest.raises(NetError):
        AssurancePayload("x", (("k", 1), ("k", 2)))
    with pytest.raises(NetError):
        parse_guard("n>=abc")


def test_fingerprint_ignores_serials_and_arrival_order():
    a = seeded("p1", "p2")
    b = seeded("p2", "p1")
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != seeded("p1", "p3").fingerprint()
    one = Marking({"P": [Token(1, AssurancePayload("x", (("v", 1),)))]})
    other = Marking({"P": [Token(1, AssurancePayload("x", (("v", "1"),)))]})
    assert one.fingerprint() != other.fingerprint()


def test_net_parse_errors():
    with pytest.raises(ParseError) as info:
        parse_net('place A\nplace A\ntransition t stage="x" in=A out=B\nwidget\nplace B view=nope\n')
    assert [d.line for d in info.value.diagnostics] == [2, 4, 5]
    with pytest.raises(ParseError):
        parse_net('place A\ntransition t stage="x" in=A out=Missing\n')
    with pytest.raises(ParseError):
        parse_events("inject Request kind\nexplode\n")


@pytest.mark.parametrize("packages", [("p1",), ("p1", "p2")])
def test_reachable_matches_oracle_on_delivery_net(packages):
    start = seeded(*packages)
    res = reachable(NET, start, bound=2, depth=6)
    got = {canonical_state(m) for m in res.markings.values()}
    assert got == brute_force_reachable(NET, start, 2, 6)
    assert len(got) == len(res.fingerprints)


def test_truncation_flags():
    net = parse_net('place P\nplace Q\ninput P\ntransition grow stage="grow" in=P out=P,Q\n')
    m, _ = inject(net, Marking(), "P", AssurancePayload("x"))
    res = reachable(net, m, bound=2, depth=10)
    assert res.truncated and len(res) == 3
    assert {canonical_state(x) for x in res.markings.values()} == brute_force_reachable(net, m, 2, 10)
    deep = reachable(NET, seeded("p1"), bound=2, depth=2)
    assert deep.truncated and len(deep) == 4
    assert not reachable(NET, seeded("p1"), bound=2, depth=6).truncated
    with pytest.raises(ValueError):
        reachable(NET, m, bound=0)


SMALL_NETS = [
    '''place A
place B cond=v>=1
place C
input A
transition inc stage="s" in=A out=B:v=1
transition pair stage="s" in=B,B out=C:w=$2
transition back stage="s" in=C out=A:-w
''',
    '''place A
place B
input A
transition split stage="s" in=A:k=1 out=A:k=2,B
transition merge stage="s" in=A,B out=B:k=$1
''',
]


@settings(max_examples=40)
@given(st.sampled_from(SMALL_NETS), st.lists(st.integers(0, 2), min_size=1, max_size=3),
       st.integers(1, 3), st.integers(1, 5))
def test_reachable_matches_oracle_on_small_nets(source, ks, bound, depth):
    net = parse_net(source)
    m = Marking()
    for k in ks:
        m, _ = inject(net, m, "A", AssurancePayload("t", (("k", k),)))
    res = reachable(net, m, bound=bound, depth=depth)
    assert {canonical_state(x) for x in res.markings.values()} == brute_force_reachable(net, m, bound, depth)
