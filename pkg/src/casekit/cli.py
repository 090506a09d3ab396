"""``casekit`` command line.

Exit codes: 0 when there are no error diagnostics, 1 for validation errors
or a failed check, 2 for usage, I/O and parse failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import lifecycle as dpn
from . import resilience as res
from .blocks import validate_blocks
from .casl import ParseError, parse, serialize
from .confirmation import DEFAULT_THRESHOLD, ConfirmationError, case_confirmation
from .model import CaseGraph, Severity, check_wellformed, errors
from .status import FileLoader, StatusError, emit_dot, propagate, report

OK, FAILED, ABORT = 0, 1, 2


class _Abort(Exception):
    """Stops a command with exit code 2 after its message was printed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ABORT, f"{self.prog}: error: {message}\n")


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"threshold must lie in (0, 1], got {text}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


class Io:
    def __init__(self, out, err):
        self.out, self.err = out, err

    def say(self, text: str = "") -> None:
        self.out.write(text + "\n")

    def emit(self, obj) -> None:
        self.out.write(json.dumps(obj, ensure_ascii=False, sort_keys=False) + "\n")

    def warn(self, text: str) -> None:
        self.err.write(text + "\n")


def _read(io: Io, path: str) -> str:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
        return data.decode("utf-8")
    except OSError as exc:
        io.warn(f"casekit: cannot read {path}: {exc.strerror or exc}")
    except UnicodeDecodeError as exc:
        io.warn(f"casekit: {path}: not valid UTF-8 ({exc.reason} at byte {exc.start})")
    raise _Abort


def _write(io: Io, path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        io.warn(f"casekit: cannot write {path}: {exc.strerror or exc}")
        raise _Abort from None


def _parsed(io: Io, path: str, parser):
    text = _read(io, path)
    try:
        return parser(text)
    except ParseError as exc:
        for d in exc.diagnostics:
            io.warn(f"{path}:{d}")
        raise _Abort from None


def _load_case(io: Io, path: str):
    return _parsed(io, path, parse)


def _report_diags(io: Io, path: str, diags, fmt: str) -> None:
    for d in diags:
        if fmt == "json":
            io.emit({"file": path, **d.to_dict()})
        else:
            io.warn(f"{path}: {d}")


# -- case commands -----------------------------------------------------------

def cmd_check(args, io: Io) -> int:
    graph, _ = _load_case(io, args.file)
    diags = list(check_wellformed(graph))
    if not errors(diags):
        diags += validate_blocks(graph)
    _report_diags(io, args.file, diags, args.format)
    n_err = sum(d.severity is Severity.ERROR for d in diags)
    n_warn = sum(d.severity is Severity.WARNING for d in diags)
    if args.format == "json":
        io.emit({"file": args.file, "errors": n_err, "warnings": n_warn})
    else:
        io.say(f"{args.file}: {n_err} error(s), {n_warn} warning(s)")
    return FAILED if n_err else OK


def _wellformed_or_fail(io: Io, path: str, graph: CaseGraph) -> bool:
    bad = errors(check_wellformed(graph))
    for d in bad:
        io.warn(f"{path}: {d}")
    return not bad


def cmd_status(args, io: Io) -> int:
    graph, _ = _load_case(io, args.file)
    if not _wellformed_or_fail(io, args.file, graph):
        return FAILED
    loader = FileLoader(os.path.dirname(os.path.abspath(args.file)), parse)
    try:
        smap = propagate(graph, loader)
    except (StatusError, OSError, ParseError) as exc:
        io.warn(f"{args.file}: error: {exc}")
        return FAILED
    rep = report(smap, graph)
    if args.format == "json":
        for row in rep.rows:
            io.emit(row.to_dict())
        io.emit({"counts": dict(rep.counts)})
    else:
        io.out.write(rep.text())
    if args.dot:
        _write(io, args.dot, emit_dot(graph, smap))
    return OK


def cmd_confirm(args, io: Io) -> int:
    graph, probs = _load_case(io, args.file)
    if not _wellformed_or_fail(io, args.file, graph):
        return FAILED
    try:
        results, diags = case_confirmation(graph, probs, args.claim, args.threshold)
    except ConfirmationError as exc:
        io.warn(f"{args.file}: error: {exc}")
        return FAILED
    for d in diags:
        io.warn(f"{args.file}:{d}")
    for r in results:
        if args.format == "json":
            io.emit(r.to_dict())
        else:
            io.say(f"{r.evidence}  {r.claim}  F={r.value:.6f}  {r.grade.value}")
    return OK


# -- lifecycle commands ------------------------------------------------------

def _seed(io: Io, net, events_path: Optional[str]):
    if not events_path:
        return dpn.Marking(), []
    events = _parsed(io, events_path, dpn.parse_events)
    try:
        return dpn.replay(net, dpn.Marking(), events)
    except dpn.ReplayError as exc:
        io.warn(f"{events_path}: event {exc.step + 1}: error: {exc}")
        return None, None


def cmd_dpn_run(args, io: Io) -> int:
    net = _parsed(io, args.net, dpn.parse_net)
    marking, trace = _seed(io, net, args.events)
    if marking is None:
        return FAILED
    if args.format == "json":
        if args.trace:
            for entry in trace:
                io.emit(entry.to_dict())
        io.emit({"marking": dpn.marking_dict(marking), "fingerprint": marking.fingerprint()})
    else:
        if args.trace:
            for entry in trace:
                io.say(entry.text())
        io.out.write(dpn.format_marking(marking))
        io.say(f"fingerprint {marking.fingerprint()}")
    return OK


def cmd_dpn_reach(args, io: Io) -> int:
    net = _parsed(io, args.net, dpn.parse_net)
    start, _ = _seed(io, net, args.events)
    if start is None:
        return FAILED
    result = dpn.reachable(net, start, bound=args.bound, depth=args.depth)
    fps = sorted(result.fingerprints)
    if args.format == "json":
        io.emit({"markings": len(fps), "truncated": result.truncated,
                 "bound": args.bound, "depth": args.depth})
        for fp in fps:
            io.emit({"fingerprint": fp, "marking": dpn.marking_dict(result.markings[fp])})
    else:
        io.say(f"markings {len(fps)} truncated {'yes' if result.truncated else 'no'}")
        for fp in fps:
            m = result.markings[fp]
            summary = " ".join(f"{p}:{len(ts)}" for p, ts in m.tokens.items()) or "(empty)"
            io.say(f"{fp[:16]}  {summary}")
    return OK


# -- resilience commands -----------------------------------------------------

def cmd_derive(args, io: Io) -> int:
    entries = _parsed(io, args.catalogue, res.parse_catalogue)
    try:
        reqs = res.derive_requirements(entries, args.service)
    except ValueError as exc:
        io.warn(f"casekit: error: {exc}")
        return ABORT
    for r in reqs:
        if args.format == "json":
            io.emit({"id": r.id, "source": r.source, "outcome": r.outcome_text, "requirement": r.derived_text})
        else:
            io.say(f"{r.id}\t{r.derived_text}")
    return OK


def cmd_verify(args, io: Io) -> int:
    entries = _parsed(io, args.catalogue, res.parse_catalogue)
    records = _parsed(io, args.records, res.parse_records)
    specs = _parsed(io, args.specs, res.parse_specs) if args.specs else None
    try:
        reqs = res.derive_requirements(entries, args.service)
        rep = res.verify(reqs, records, specs)
    except res.VerificationError as exc:
        io.warn(f"{args.records}: error: {exc}")
        return FAILED
    except ValueError as exc:
        io.warn(f"casekit: error: {exc}")
        return ABORT
    for d in rep.diagnostics:
        io.warn(f"{args.records}:{d}")
    if args.format == "json":
        for row in rep.rows:
            io.emit(row.to_dict())
        io.emit({"counts": rep.counts()})
    else:
        io.out.write(rep.text())
    if args.emit_case:
        _write(io, args.emit_case, serialize(res.emit_case(rep)))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="casekit", description="Assurance case toolkit.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("check", help="well-formedness and block rules")
    sp.add_argument("file")
    fmt(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("status", help="effective status report")
    sp.add_argument("file")
    sp.add_argument("--dot", metavar="OUT", help="also write a Graphviz rendering")
    fmt(sp)
    sp.set_defaults(func=cmd_status)

    sp = sub.add_parser("confirm", help="confirmation scores for one claim")
    sp.add_argument("file")
    sp.add_argument("--claim", required=True)
    sp.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    fmt(sp)
    sp.set_defaults(func=cmd_confirm)

    dp = sub.add_parser("dpn", help="lifecycle Petri nets")
    dsub = dp.add_subparsers(dest="dpn_command", metavar="COMMAND", parser_class=_Parser)
    dsub.required = True
    sp = dsub.add_parser("run", help="replay an event log")
    sp.add_argument("net")
    sp.add_argument("--events", required=True)
    sp.add_argument("--trace", action="store_true")
    fmt(sp)
    sp.set_defaults(func=cmd_dpn_run)
    sp = dsub.add_parser("reach", help="bounded reachability")
    sp.add_argument("net")
    sp.add_argument("--bound", type=_positive, default=2)
    sp.add_argument("--depth", type=_positive, default=6)
    sp.add_argument("--events", help="event log whose replay gives the start marking")
    fmt(sp)
    sp.set_defaults(func=cmd_dpn_reach)

    rp = sub.add_parser("resilience", help="resilience analysis loop")
    rsub = rp.add_subparsers(dest="res_command", metavar="COMMAND", parser_class=_Parser)
    rsub.required = True
    sp = rsub.add_parser("derive", help="instantiate requirement templates")
    sp.add_argument("--catalogue", required=True)
    sp.add_argument("--service", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_derive)
    sp = rsub.add_parser("verify", help="verification report")
    sp.add_argument("--catalogue", required=True)
    sp.add_argument("--records", required=True)
    sp.add_argument("--specs")
    sp.add_argument("--service", default="target service")
    sp.add_argument("--emit-case", metavar="OUT")
    fmt(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    io = Io(out or sys.stdout, err or sys.stderr)
    parser = build_parser()
    saved = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = io.out, io.err  # argparse prints usage to these
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return ABORT if exc.code not in (0, None) else OK
        try:
            return args.func(args, io)
        except _Abort:
            return ABORT
    finally:
        sys.stdout, sys.stderr = saved


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
