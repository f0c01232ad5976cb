"""Command line front end.

Exit codes: 0 success, 1 domain failure (no computation, no trace, witness
rejected), 2 usage or parse error.  Every verb prints deterministic output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import compiler, derivation, normalize, presentation, smachine, stdlib, tm
from .words import format_word, parse_word


class UsageError(Exception):
    pass


class DomainFailure(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    paths: list = field(default_factory=list)
    max_steps: int = 64
    max_word: int | None = None
    max_area: int = 8
    N: int = 1
    output: str | None = None

    def __post_init__(self):
        for name in ("max_steps", "max_area", "N"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.max_word is not None and self.max_word < 1:
            raise UsageError("max_word must be positive")


# helpers -------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _machine(arg: str) -> tm.TuringMachine:
    if arg in ("Ma", "M_a"):
        return tm.machine_Ma()
    return tm.parse_tm(_read(arg))


def _compiled(args) -> compiler.SMachineOfM:
    M = _machine(args.machine)
    if getattr(args, "normalize", False):
        M = normalize.normalize(M)
    return compiler.compile_machine(M)


def _accepting(M, word: str, max_steps: int, empty_tapes: bool = True):
    cfg = tm.input_configuration(M, word)
    C = tm.bounded_accept(M, cfg, max_steps, normalize.default_space(tm.config_length(cfg)),
                          empty_tapes=empty_tapes)
    if C is None:
        raise DomainFailure(f"input {word!r} not accepted within {max_steps} steps")
    return C


def _inputs(spec: str, M) -> list:
    """``1..4`` means a, aa, aaa, aaaa over the least input letter; otherwise a comma list."""
    if ".." in spec:
        lo, _, hi = spec.partition("..")
        try:
            a, b = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad range {spec!r}") from None
        letter = sorted(x.base for x in M.X)[0]
        return [letter * n for n in range(a, b + 1)]
    return [w for w in spec.split(",") if w]


# verbs ---------------------------------------------------------------------

def cmd_tm_run(args) -> int:
    M = _machine(args.machine)
    C = _accepting(M, args.input, args.max_steps, empty_tapes=False)
    for cfg, cid in zip(C.configs, [""] + list(C.history)):
        print(f"{cid}\t{tm.config_text(cfg)}" if cid else tm.config_text(cfg))
    t, s, a = tm.computation_metrics(C)
    print(f"time {t} space {s} area {a}")
    return 0


def cmd_tm_normalize(args) -> int:
    M = _machine(args.machine)
    N = normalize.normalize(M, upto=args.stage)
    _write(tm.emit_tm(N), args.output)
    if args.check:
        rep = normalize.verify_normal_form(N, reference=M)
        for line in rep.lines():
            print(line, file=sys.stderr)
        return 0 if rep.ok else 1
    return 0


def _sm(path: str) -> smachine.SMachine:
    if path.startswith("std:"):
        return stdlib.build_standard(path[4:])
    return smachine.parse_smachine(_read(path))


def cmd_sm_run(args) -> int:
    S = _sm(args.machine)
    W = S.word(args.start)
    hist = [smachine.parse_ref(t) for t in args.history.split()]
    try:
        C = smachine.run_history(S, W, hist)
    except smachine.StepError as e:
        raise DomainFailure(f"rule not applicable at step {e.index}") from None
    for w in C.words:
        print(w.text())
    return 0


def cmd_sm_search(args) -> int:
    S = _sm(args.machine)
    W = S.word(args.start)
    targets = [parse_word(t) for t in args.target]
    R = smachine.reach(S, W, targets, max_len=args.max_steps, max_word=args.max_word)
    if not R.reachable:
        raise DomainFailure("no computation reaches the target")
    C = R.first
    print(f"history {C.history_text()}")
    for w in C.words:
        print(w.text())
    print(f"length {C.length - 1} shortest {R.shortest_count} class {smachine.classify_computation(C, S)}")
    return 0


def cmd_sm_stdlib(args) -> int:
    if args.name not in stdlib.STANDARD_NAMES:
        raise UsageError(f"unknown machine {args.name}; choose from {' '.join(stdlib.STANDARD_NAMES)}")
    Y = args.Y.split(",") if args.Y else None
    Y = [parse_word(y)[0] for y in Y] if Y else None
    _write(smachine.emit_smachine(stdlib.build_standard(args.name, Y)), args.output)
    return 0


def cmd_compile(args) -> int:
    SM = _compiled(args)
    text = SM.manifest() if args.manifest else smachine.emit_smachine(SM.machine)
    _write(text, args.output)
    return 0


def cmd_present(args) -> int:
    SM = _compiled(args)
    P = presentation.build_presentation(SM, args.N)
    if args.stats:
        st = presentation.presentation_stats(P)
        _write(json.dumps(st.as_dict(), indent=2, sort_keys=True) + "\n" if args.format == "json"
               else "\n".join(st.lines()) + "\n", args.output)
    else:
        _write(presentation.emit_presentation(P), args.output)
    return 0


def cmd_encode(args) -> int:
    SM = _compiled(args)
    cfg = tm.parse_config(args.config) if args.config else tm.input_configuration(SM.tm, args.input)
    W = compiler.sigma(SM, cfg)
    print(W.text())
    print(f"size {W.size} normal {compiler.is_normal(SM, W)}")
    return 0


def cmd_lift(args) -> int:
    SM = _compiled(args)
    C = _accepting(SM.tm, args.input, args.max_steps)
    L = compiler.lift_computation(SM, C)
    print(f"history {L.history_text()}")
    if args.words:
        for w in L.words:
            print(w.text())
    print(f"length {L.length - 1} space {L.space} area {L.area}")
    return 0


def cmd_disc(args) -> int:
    SM = _compiled(args)
    C = _accepting(SM.tm, args.input, args.max_steps)
    L = compiler.lift_computation(SM, C)
    P = presentation.build_presentation(SM, args.N)
    W = derivation.disc_witness(L, P)
    if args.output:
        _write(derivation.emit_witness(W, P), args.output)
    if args.presentation:
        _write(presentation.emit_presentation(P), args.presentation)
    r = derivation.verify_witness(P, W)
    print(f"annuli {len(W.annuli)} area {W.declared_area} verified {r.ok}")
    return 0 if r.ok else 1


def _load_presentation(args) -> presentation.GroupPresentation:
    if args.presentation:
        return presentation.parse_presentation(_read(args.presentation))
    if not args.relators:
        raise UsageError("give a presentation file or --relators")
    rels = [r.strip() for r in args.relators.split(",") if r.strip()]
    if args.generators:
        gens = args.generators.split(",")
    else:
        names = sorted({format_word((s.pos(),)) for r in rels for s in parse_word(r)})
        gens = names
    return presentation.presentation_from_words(gens, rels)


def cmd_solve(args) -> int:
    P = _load_presentation(args)
    w = parse_word(args.word)
    res = derivation.trivial_machine_search(P, w, args.max_area, args.max_len)
    if not res:
        print(f"not found within area {args.max_area} ({res.explored} states)")
        return 1
    sys.stdout.write(res.text())
    W = derivation.trace_to_witness(res, P)
    if args.witness:
        _write(derivation.emit_witness(W, P), args.witness)
    print(f"substitutions {res.substitutions}")
    return 0


def cmd_verify(args) -> int:
    P = presentation.parse_presentation(_read(args.presentation))
    W, digest = derivation.parse_witness(_read(args.witness))
    if digest is not None and digest != P.digest():
        print("warning: witness was written for a different presentation", file=sys.stderr)
    r = derivation.verify_witness(P, W)
    if r.ok:
        print(f"ok area {r.area}")
        return 0
    print(f"fail step {r.step}: {r.reason}")
    return 1


# bench ---------------------------------------------------------------------

BENCH_COLUMNS = ["n", "input", "tm_time", "tm_space", "lift_length", "lift_space",
                 "lift_area", "disc_area", "status"]


def bench_report(config: RunConfig, machine: str = "Ma", inputs: str = "1..3",
                 max_lift: int = 2000) -> list:
    """One row per input: TM metrics, lifted computation and disc area.

    Inputs whose lift would exceed ``max_lift`` steps are reported, not run.
    """
    M = _machine(machine)
    words = _inputs(inputs, M)
    if not words:
        return []
    SM = compiler.compile_machine(M)
    P = presentation.build_presentation(SM, config.N)
    rows = []
    for w in words:
        row = dict.fromkeys(BENCH_COLUMNS, "")
        row.update(n=len(w), input=w)
        try:
            C = _accepting(M, w, config.max_steps)
        except DomainFailure:
            row["status"] = "rejected"
            rows.append(row)
            continue
        row.update(tm_time=C.time, tm_space=C.space)
        hist = compiler.lift_history(SM, C)
        if len(hist) > max_lift:
            row.update(lift_length=len(hist), status="infeasible")
            rows.append(row)
            continue
        L = compiler.lift_computation(SM, C)
        W = derivation.disc_witness(L, P)
        row.update(lift_length=L.length - 1, lift_space=L.space, lift_area=L.area,
                   disc_area=W.declared_area, status="ok")
        rows.append(row)
    return rows


def cmd_bench(args) -> int:
    cfg = RunConfig("bench", max_steps=args.max_steps, N=args.N)
    rows = bench_report(cfg, args.machine, args.inputs, args.max_lift)
    if args.format == "json":
        print(json.dumps({"columns": BENCH_COLUMNS, "rows": rows}, indent=2))
    else:
        print("\t".join(BENCH_COLUMNS))
        for r in rows:
            print("\t".join(str(r[c]) for c in BENCH_COLUMNS))
    return 0


# argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _machine_args(p, normalize_flag=True):
    p.add_argument("--machine", default="Ma", help="TM file or 'Ma' for the built-in example")
    if normalize_flag:
        p.add_argument("--normalize", action="store_true", help="normalize the TM before compiling")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dehnkit", description="Turing machines, S-machines and their group presentations.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p_tm = sub.add_parser("tm", help="Turing machine tools")
    tsub = p_tm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = tsub.add_parser("run", help="find an accepting computation")
    _machine_args(p, False)
    p.add_argument("--input", required=True)
    p.add_argument("--max-steps", type=int, default=64)
    p.set_defaults(func=cmd_tm_run)
    p = tsub.add_parser("normalize", help="run the normalization pipeline")
    _machine_args(p, False)
    p.add_argument("--stage", choices=normalize.STAGE_NAMES)
    p.add_argument("--check", action="store_true", help="verify the six normal-form properties")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tm_normalize)

    p_sm = sub.add_parser("sm", help="S-machine tools")
    ssub = p_sm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ssub.add_parser("run", help="replay a history")
    p.add_argument("machine", help="S-machine file or std:NAME")
    p.add_argument("--start", required=True)
    p.add_argument("--history", required=True, help="space separated rule refs, inverse as id^-1")
    p.set_defaults(func=cmd_sm_run)
    p = ssub.add_parser("search", help="shortest computation to a word containing the targets")
    p.add_argument("machine", help="S-machine file or std:NAME")
    p.add_argument("--start", required=True)
    p.add_argument("--target", action="append", default=[])
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--max-word", type=int)
    p.set_defaults(func=cmd_sm_search)
    p = ssub.add_parser("stdlib", help="print a standard machine")
    p.add_argument("name")
    p.add_argument("--Y", help="comma separated tape alphabet for S5..S9")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sm_stdlib)

    p = sub.add_parser("compile", help="compile a normal-form TM to its S-machine")
    _machine_args(p)
    p.add_argument("--manifest", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("present", help="print the group presentation")
    _machine_args(p)
    p.add_argument("--N", type=int, default=6)
    p.add_argument("--stats", action="store_true")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("encode", help="S-machine word of a TM configuration")
    _machine_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--config")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("lift", help="lift an accepting TM computation")
    _machine_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("--words", action="store_true", help="print every word")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("disc", help="disc witness for K of the start word")
    _machine_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("-o", "--output", help="witness file")
    p.add_argument("--presentation", help="also write the presentation here")
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("solve", help="trivial-machine search for a derivation")
    p.add_argument("presentation", nargs="?")
    p.add_argument("--relators", help="comma separated relators instead of a file")
    p.add_argument("--generators", help="comma separated generators (default: letters used)")
    p.add_argument("--word", required=True)
    p.add_argument("--max-area", type=int, default=8)
    p.add_argument("--max-len", type=int)
    p.add_argument("--witness", help="write the witness here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="replay a witness")
    p.add_argument("presentation")
    p.add_argument("witness")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="pipeline measurements per input")
    p.add_argument("--machine", default="Ma")
    p.add_argument("--inputs", default="1..3")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("--max-lift", type=int, default=2000)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=cmd_bench)
    return ap


_PARSE_ERRORS = (tm.ParseError, presentation.PresentationError, derivation.WitnessError,
                 derivation.TraceError, normalize.NormalizeError, compiler.NormalFormViolation)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        for name in ("max_steps", "max_area", "N", "max_lift"):
            v = getattr(args, name, None)
            if v is not None and v < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        return args.func(args)
    except DomainFailure as e:
        print(str(e), file=sys.stderr)
        return 1
    except UsageError as e:
        print(f"dehnkit: {e}", file=sys.stderr)
        return 2
    except _PARSE_ERRORS as e:
        print(f"dehnkit: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"dehnkit: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
