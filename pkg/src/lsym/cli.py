"""Command-line entry point.

    lsym run    [PROGRAM] [--manifest FILE] [--mode M] [--seed N] [--fuel N] [--schedule S] [--trace]
    lsym trace  (as run; prints the step trace)
    lsym check  [--corpus DIR] [--seeds N] [--generated N] [--summary FILE]
    lsym corpus [NAME ...] [--verify]
    lsym pretty PROGRAM

Exit status: 0 terminal, 1 stuck (or deadlocked), 2 out of fuel (or a scripted
schedule that names a party with nothing to do), 3 usage or manifest error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from . import ds_eval as ds
from . import st_eval as st
from .manifest import MODES, Manifest, ManifestError, PartySpec, load_manifest
from .netshare import ConcreteBackend
from .syntax import LowerError, ParseError, compile_source, pretty_program
from .values import show

EXIT_OK, EXIT_STUCK, EXIT_FUEL, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("program", nargs="?", help="program file (.lsym); defaults to the manifest's")
    p.add_argument("--manifest", metavar="FILE")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--seed", type=int)
    p.add_argument("--fuel", type=int)
    p.add_argument("--schedule", metavar="rr|random|scripted:FILE")
    p.add_argument("--input", action="append", default=[], metavar="PARTY=N,N",
                   help="input queue for one party (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lsym", description="Run and check multiparty programs.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run a program and print its final values")
    _run_flags(p)
    p.add_argument("--trace", action="store_true", help="print the step trace first")

    p = sub.add_parser("trace", help="print the step trace of a run")
    _run_flags(p)

    p = sub.add_parser("check", help="run the semantic checks over the corpus and generated terms")
    p.add_argument("--corpus", metavar="DIR", help="corpus directory (default: the shipped one)")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--fuel", type=int, help="override every corpus entry's fuel")
    p.add_argument("--generated", type=int, default=200, help="number of generated terms")
    p.add_argument("--gen-seed", type=int, default=0)
    p.add_argument("--no-diamond", action="store_true")
    p.add_argument("--summary", metavar="FILE", help="write key=value results here")
    p.add_argument("--quiet", action="store_true", help="only print the summary counts")

    p = sub.add_parser("corpus", help="list the corpus, or verify entries against expectations")
    p.add_argument("names", nargs="*")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--dir", metavar="DIR")

    p = sub.add_parser("pretty", help="print a program after lowering to the core language")
    p.add_argument("program")
    p.add_argument("--no-prelude", action="store_true")
    return ap


# run configuration

def _parse_inputs(specs) -> dict:
    out = {}
    for spec in specs:
        name, sep, nums = spec.partition("=")
        if not sep or not name:
            raise UsageError(f"--input expects PARTY=N,N, found {spec!r}")
        try:
            out[name] = tuple(int(x, 0) for x in nums.replace(",", " ").split())
        except ValueError:
            raise UsageError(f"--input {spec!r}: inputs must be integers") from None
    return out


def resolve(args) -> tuple[Manifest, Path]:
    """Merge the manifest (if any) with command-line overrides."""
    if args.manifest:
        m = load_manifest(args.manifest)
    elif args.program:
        m = Manifest(program=args.program, base_dir=Path("."))
    else:
        raise UsageError("give a program file or --manifest")
    path = Path(args.program).resolve() if args.program else m.program_path()
    for flag in ("mode", "seed", "fuel"):
        if getattr(args, flag) is not None:
            setattr(m, flag, getattr(args, flag))
    if args.fuel is not None and args.fuel <= 0:
        raise UsageError("--fuel must be positive")
    if args.schedule is not None:
        s = args.schedule
        if s not in ("rr", "random") and not s.startswith("scripted:"):
            raise UsageError(f"--schedule expects rr, random or scripted:FILE, found {s!r}")
        if s.startswith("scripted:"):
            s = "scripted:" + str(Path(s[len("scripted:"):]).resolve())
        m.schedule = s
    for name, q in _parse_inputs(args.input).items():
        old = m.parties.get(name, PartySpec(name))
        m.parties[name] = PartySpec(name, q, old.output)
    return m, path


def scheduler_for(m: Manifest) -> ds.Scheduler:
    if m.schedule == "rr":
        return ds.RoundRobin()
    if m.schedule == "random":
        return ds.SeededRandom(m.seed)
    path = m.base_dir / m.schedule[len("scripted:"):]
    try:
        return ds.Scripted(ds.parse_schedule(path.read_text()))
    except OSError as e:
        raise UsageError(f"cannot read schedule: {e}") from None


def load_program(path: Path):
    try:
        return compile_source(path.read_text())
    except OSError as e:
        raise UsageError(f"cannot read program: {e}") from None
    except (ParseError, LowerError) as e:
        raise UsageError(f"{path.name}: {e}") from None


def _write_sinks(m: Manifest, outputs: dict, collect: Optional[dict]) -> None:
    if collect is not None:
        collect.update(outputs)
        return
    for name in m.parties:
        sink = m.output_path(name)
        if sink is not None:
            sink.write_text("".join(f"{n}\n" for n in outputs.get(name, ())))


def single_threaded_rule(diagnostic: str) -> str:
    """Local rules mirror the single-threaded ones: DS-ASSIGN corresponds to ST-ASSIGN."""
    rule = diagnostic.split(":", 1)[0]
    return "ST-" + rule[3:] if rule.startswith("DS-") else rule


def execute(m: Manifest, path: Path, trace=None, out=print, err=None,
            collect: Optional[dict] = None) -> int:
    """Run a resolved manifest; print final values and return the exit status.

    Written integers go to the manifest's sinks, or into ``collect`` when given.
    """
    err = err or (lambda s: print(s, file=sys.stderr))
    prog = load_program(path)
    m.check_principals(prog.principals)
    io = m.oracle()
    if m.mode == "st":
        r = st.run_expr(prog.expr, prog.principals, io, m.fuel, trace)
        if type(r) is st.Terminal:
            out(show(r.value))
            _write_sinks(m, r.outputs, collect)
            return EXIT_OK
        if type(r) is st.StuckState:
            err(f"stuck after {r.steps} steps: {r.diagnostic}")
            return EXIT_STUCK
        err(f"out of fuel after {r.steps} steps")
        return EXIT_FUEL

    backend = ConcreteBackend(m.backend_seed) if m.mode == "ds-concrete" else None
    r = ds.run_expr(prog.expr, prog.principals, scheduler_for(m), io, m.fuel, trace,
                    backend=backend)
    if type(r) is ds.Terminal:
        for a in sorted(r.values):
            out(f"{a}: {show(r.values[a])}")
        _write_sinks(m, r.outputs, collect)
        return EXIT_OK
    if type(r) is ds.LocallyStuck:
        for a, d in sorted(r.stuck.items()):
            err(f"{a}: stuck: {d}")
        err(f"locally stuck after {r.steps} steps: {r.witness}: {r.diagnostic}"
            f" [{single_threaded_rule(r.diagnostic)}]")
        return EXIT_STUCK
    if type(r) is ds.Deadlock:
        for a, view in sorted(r.blocked.items()):
            err(f"{a}: waiting on {view[0]}")
        err(f"deadlock after {r.steps} steps")
        return EXIT_STUCK
    if type(r) is ds.Starved:
        err(f"scripted schedule names {r.party}, which cannot step (after {r.steps} steps)")
        return EXIT_FUEL
    err(f"out of fuel after {r.steps} steps")
    return EXIT_FUEL


# subcommands

def cmd_run(args, trace_only: bool = False) -> int:
    m, path = resolve(args)
    tracing = trace_only or args.trace
    return execute(m, path, trace=print if tracing else None)


def cmd_check(args) -> int:
    from .corpus import corpus_list
    from .harness import report

    subjects = report.corpus_subjects(corpus_list(args.corpus), args.fuel)
    subjects += report.generated_subjects(args.generated, args.gen_seed)
    emit = None if args.quiet else print
    reps = report.run_suite(subjects, args.seeds, diamond=not args.no_diamond, emit=emit)
    text = report.summary(reps)
    if args.summary:
        Path(args.summary).write_text(text)
    print("\n".join(text.splitlines()[:4]))
    for r in reps:
        if r.verdict == report.FAIL:
            print(f"FAIL {r.check} {r.program}: {r.detail}", file=sys.stderr)
    return 1 if report.failed(reps) else 0


def verify_entry(e) -> list[str]:
    """Run one corpus entry under its manifest; return mismatches against ``expected``."""
    lines: list = []
    errs: list = []
    m = e.manifest
    written: dict = {}
    code = execute(m, m.program_path(), out=lines.append, err=errs.append, collect=written)
    problems = []
    want = e.expected
    if want.get("outcome") == "stuck":
        if code != EXIT_STUCK:
            problems.append(f"expected stuck, exit status {code}")
        elif "rule" in want and not any(want["rule"] in s for s in errs):
            problems.append(f"expected a {want['rule']} diagnostic, got {errs[-1:]}")
        return problems
    if code != EXIT_OK:
        return [f"exit status {code}: {' | '.join(errs)}"]
    got = dict(s.split(": ", 1) for s in lines)
    for k, v in want.items():
        if k.startswith("value."):
            a = k[len("value."):]
            if got.get(a) != v:
                problems.append(f"{a}: expected {v}, got {got.get(a)}")
        elif k.startswith("output."):
            a = k[len("output."):]
            have = " ".join(map(str, written.get(a, ())))
            if have != v:
                problems.append(f"{a} wrote {have!r}, expected {v!r}")
    return problems


def cmd_corpus(args) -> int:
    from .corpus import corpus_list
    entries = corpus_list(args.dir)
    if args.names:
        known = {e.name for e in entries}
        missing = [n for n in args.names if n not in known]
        if missing:
            raise UsageError(f"no corpus entry named {', '.join(missing)}")
        entries = [e for e in entries if e.name in args.names]
    bad = 0
    for e in entries:
        if not args.verify:
            print(f"{e.name:<16}{e.expected.get('outcome', '?'):<10}{e.oracle}")
            continue
        problems = verify_entry(e)
        print(f"{e.name:<16}{'FAIL' if problems else 'ok'}")
        for p in problems:
            print(f"    {p}")
        bad += bool(problems)
    return 1 if bad else 0


def cmd_pretty(args) -> int:
    try:
        text = Path(args.program).read_text()
        prog = compile_source(text, use_prelude=not args.no_prelude)
    except OSError as e:
        raise UsageError(f"cannot read program: {e}") from None
    except (ParseError, LowerError) as e:
        raise UsageError(str(e)) from None
    print(pretty_program(prog.principals, prog.expr))
    return 0


def main(argv: Optional[list] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:       # usage errors and --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        if args.cmd == "run":
            return cmd_run(args)
        if args.cmd == "trace":
            return cmd_run(args, trace_only=True)
        if args.cmd == "check":
            return cmd_check(args)
        if args.cmd == "corpus":
            return cmd_corpus(args)
        return cmd_pretty(args)
    except ManifestError as e:
        for msg in e.errors:
            print(f"manifest: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as e:
        print(f"lsym: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
