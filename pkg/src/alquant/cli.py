"""Command-line interface: ``alquant sat|compile|conflicts|bench|diff``.

Verdicts and automata go to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 verdict mismatch in ``bench``/``diff``, 2 parse or usage error,
3 formula outside the safety fragment, 4 resource limit, 5 internal error.

Extra flags can be supplied through the ``ALQUANT_OPTS`` environment
variable; they are inserted right after the subcommand, so flags given on
the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import multiprocessing as mp
import os
import shlex
import sys
import time
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence

from . import automata as au
from . import compiler, oracle
from .conflicts import conflicts as run_conflicts, trace_table
from .errors import (AlphabetMismatch, ParseError, ResourceLimit, UnknownState,
                     UnknownVariable, UnsupportedFragment)
from .parser import parse_qptl
from .textformat import read_automaton, to_dot, write_automaton
from .translate import translate_qptl

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_FRAGMENT, EXIT_LIMIT, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5
CSV_COLUMNS = ["instance", "verdict", "millis", "states_final", "macros_total"]
AUTOMATON_DIRECTIVES = ("alphabet", "states", "initial", "state")


def bundled(name: str) -> Path:
    """Path of a bundled data directory (``bench`` or ``scalability``)."""
    return Path(str(resources.files("alquant") / "data" / name))


# -- input ---------------------------------------------------------------------------

def _read(path: Optional[str]) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    return Path(path).read_text()


def _is_automaton_text(text: str) -> bool:
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            return line.split(None, 1)[0] in AUTOMATON_DIRECTIVES
    return False


def _load_automaton(text: str):
    """(automaton, quantifier prefix) from automaton text or a QPTL formula."""
    if _is_automaton_text(text):
        return read_automaton(text), ()
    phi = parse_qptl(text)
    return translate_qptl(phi), phi.prefix


def _mode_for(var: str, prefix, mode: Optional[str]) -> str:
    if mode:
        return mode
    return dict((v, q) for q, v in prefix).get(var, "exists")


# -- configuration ---------------------------------------------------------------------

def _add_compile_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pairwise-refine", action="store_true",
                   help="intersect the conflict set with the states of exactly conflicting pairs")
    p.add_argument("--universal-construction", choices=compiler.UNIVERSAL_CONSTRUCTIONS, default="dual")
    p.add_argument("--subset-enumeration", choices=compiler.SUBSET_ENUMERATIONS, default="cover")
    p.add_argument("--no-decider-closure", action="store_true",
                   help="use the fixpoint conflict set as is")
    p.add_argument("--max-macro-states", type=int, default=10_000)
    p.add_argument("--subset-limit", type=int, default=au.DEFAULT_SUBSET_LIMIT)
    p.add_argument("--merge-equal-states", action="store_true")


def _config(args) -> compiler.CompilationConfig:
    return compiler.CompilationConfig(
        max_macro_states=args.max_macro_states,
        pairwise_refine=args.pairwise_refine,
        universal_construction=args.universal_construction,
        subset_limit=args.subset_limit,
        merge_equal_states=args.merge_equal_states,
        decider_closure=not args.no_decider_closure,
        subset_enumeration=args.subset_enumeration,
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alquant", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version="alquant 0.1.0")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sat", help="decide satisfiability of a prenex safety QPTL formula")
    p.add_argument("path", nargs="?", help="formula file, '-' or nothing for stdin")
    p.add_argument("--stats", metavar="FILE", help="write per-round statistics as JSON")
    p.add_argument("--no-timing", action="store_true", help="zero all timings in --stats output")
    p.add_argument("--engine", choices=("pipeline", "oracle"), default="pipeline")
    _add_compile_flags(p)

    p = sub.add_parser("compile", help="print the compiled automaton for one quantifier")
    p.add_argument("path", nargs="?")
    p.add_argument("--var", required=True)
    p.add_argument("--mode", choices=("exists", "forall"))
    p.add_argument("--emit-dot", action="store_true", help="print Graphviz DOT instead of text")
    p.add_argument("--eliminate", action="store_true", help="also quantify the variable state-wise")
    _add_compile_flags(p)

    p = sub.add_parser("conflicts", help="print the fixpoint conflict set")
    p.add_argument("path", nargs="?")
    p.add_argument("--var", required=True)
    p.add_argument("--mode", choices=("exists", "forall"))
    p.add_argument("--trace", action="store_true", help="print the label table per iteration")
    p.add_argument("--pairs", action="store_true", help="also list exactly conflicting pairs")

    p = sub.add_parser("bench", help="run a directory of .qptl instances and write a CSV")
    p.add_argument("dir", nargs="?", help="instance directory (default: the bundled suite)")
    p.add_argument("--csv", metavar="FILE", help="write the CSV here instead of stdout")
    p.add_argument("--timeout", type=float, default=60.0, help="seconds per instance")
    p.add_argument("--seed", type=int, default=7, help="seed for --random instances")
    p.add_argument("--random", type=int, default=0, metavar="N", help="append N seeded random instances")
    p.add_argument("--no-timing", action="store_true", help="write 0 in the millis column")
    _add_compile_flags(p)

    p = sub.add_parser("diff", help="compare one elimination against the explicit oracle")
    p.add_argument("path", nargs="?")
    p.add_argument("--var", required=True)
    p.add_argument("--mode", choices=("exists", "forall"))
    p.add_argument("--limit", type=int, default=oracle.DEFAULT_LIMIT)
    _add_compile_flags(p)
    return ap


def expand_env(argv: Sequence[str], env: Optional[str] = None) -> List[str]:
    """Insert ``ALQUANT_OPTS`` tokens after the subcommand."""
    env = os.environ.get("ALQUANT_OPTS", "") if env is None else env
    tokens = shlex.split(env)
    argv = list(argv)
    if not tokens:
        return argv
    for k, a in enumerate(argv):
        if not a.startswith("-"):
            return argv[:k + 1] + tokens + argv[k + 1:]
    return argv + tokens


# -- commands ----------------------------------------------------------------------------

def cmd_sat(args) -> int:
    phi = parse_qptl(_read(args.path))
    if args.engine == "oracle":
        print(oracle.solve_qptl(phi))
        return EXIT_OK
    verdict, stats = compiler.solve_qptl(phi, _config(args))
    print(verdict)
    if args.stats:
        Path(args.stats).write_text(json.dumps(stats.to_json(timing=not args.no_timing), indent=2) + "\n")
    return EXIT_OK


def cmd_compile(args) -> int:
    A, prefix = _load_automaton(_read(args.path))
    mode = _mode_for(args.var, prefix, args.mode)
    C, _ = compiler.compile_for(A, mode, args.var, _config(args))
    if args.eliminate:
        pv = A.alphabet_var(args.var)
        C = au.statewise_exists(C, pv) if mode == "exists" else au.statewise_forall(C, pv)
    sys.stdout.write(to_dot(C) if args.emit_dot else write_automaton(C))
    return EXIT_OK


def cmd_conflicts(args) -> int:
    A, prefix = _load_automaton(_read(args.path))
    mode = _mode_for(args.var, prefix, args.mode)
    report = run_conflicts(A, args.var, mode)
    print(au.set_label(report.conflict_set, ", "))
    if args.pairs:
        from .conflicts import conflicting_pairs
        for a, b in sorted(conflicting_pairs(A, args.var, mode)):
            print(f"pair {a.name} {b.name}")
    if args.trace:
        sys.stdout.write(trace_table(report))
    return EXIT_OK


def cmd_diff(args) -> int:
    A, prefix = _load_automaton(_read(args.path))
    mode = _mode_for(args.var, prefix, args.mode)
    E = compiler.eliminate_quantifier(A, mode, args.var, _config(args))
    X = oracle.exact_exists(A, args.var, args.limit) if mode == "exists" \
        else oracle.exact_forall(A, args.var, args.limit)
    for left, right, tag in ((E, X, "pipeline-only"), (X, E, "oracle-only")):
        cex = oracle.counterexample(left, right, args.limit)
        if cex is not None:
            stem, loop = cex
            print(f"{tag}: stem {_word(stem)} loop {_word(loop)}")
            return EXIT_MISMATCH
    print("equivalent")
    return EXIT_OK


def _word(letters) -> str:
    return " ".join("{" + ",".join(sorted(a)) + "}" for a in letters) or "-"


# -- bench ---------------------------------------------------------------------------------

def _instances(args):
    directory = Path(args.dir) if args.dir else bundled("bench")
    out = [(f.stem, f.read_text()) for f in sorted(directory.glob("*.qptl"))]
    if args.random:
        import random
        from .generators import random_qptl
        rng = random.Random(args.seed)
        k = 0
        while k < args.random:
            phi = random_qptl(rng)
            out.append((f"seed{args.seed}_{k:03d}", str(phi)))
            k += 1
    return directory, out


def _expected(directory: Path):
    f = directory / "expected.txt"
    if not f.exists():
        return {}
    out = {}
    for line in f.read_text().splitlines():
        line = line.split("#", 1)[0].split()
        if len(line) == 2:
            out[line[0]] = line[1]
    return out


def _bench_worker(text, cfg, queue):
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    try:
        verdict, stats = compiler.solve_qptl(parse_qptl(text), cfg)
        rounds = stats.perRound
        final = rounds[-1].statesAfter if rounds else -1
        queue.put((verdict, final, sum(r.macroStatesCreated for r in rounds)))
    except ResourceLimit:
        queue.put(("LIMIT", -1, -1))
    except UnsupportedFragment:
        queue.put(("UNSUPPORTED", -1, -1))
    except ParseError:
        queue.put(("PARSE_ERROR", -1, -1))
    except Exception as e:  # reported per instance, the harness continues
        queue.put(("ERROR", -1, -1))
        print(f"internal error: {e!r}", file=sys.stderr)


def run_instance(text: str, cfg: compiler.CompilationConfig, timeout: float):
    """(verdict, millis, states_final, macros_total) in a separate process."""
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    queue = ctx.Queue()
    start = time.perf_counter()
    proc = ctx.Process(target=_bench_worker, args=(text, cfg, queue))
    proc.start()
    proc.join(timeout)
    millis = int((time.perf_counter() - start) * 1000)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return "TIMEOUT", millis, -1, -1
    try:
        verdict, final, macros = queue.get(timeout=5)
    except Exception:
        return "ERROR", millis, -1, -1
    return verdict, millis, final, macros


def cmd_bench(args) -> int:
    cfg = _config(args)
    directory, instances = _instances(args)
    expected = _expected(directory)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    mismatches = 0
    for name, text in instances:
        verdict, millis, final, macros = run_instance(text, cfg, args.timeout)
        w.writerow([name, verdict, 0 if args.no_timing else millis, final, macros])
        want = expected.get(name)
        if want is not None and verdict in ("SAT", "UNSAT") and verdict != want:
            mismatches += 1
            print(f"{name}: expected {want}, got {verdict}", file=sys.stderr)
    if args.csv:
        Path(args.csv).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if expected:
        checked = sum(1 for n, _ in instances if n in expected)
        print(f"{checked - mismatches}/{checked} verdicts match {directory / 'expected.txt'}", file=sys.stderr)
    return EXIT_MISMATCH if mismatches else EXIT_OK


COMMANDS = {"sat": cmd_sat, "compile": cmd_compile, "conflicts": cmd_conflicts,
            "bench": cmd_bench, "diff": cmd_diff}


def main(argv: Optional[Sequence[str]] = None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    argv = expand_env(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, UnknownVariable, UnknownState, AlphabetMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedFragment as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_FRAGMENT
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as e:  # anything else is a broken invariant
        print(f"internal error: {e!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
