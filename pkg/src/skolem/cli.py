"""Command line: ``synth``, ``verify``, ``bench`` and ``defx report``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import funcs
from .aiger import AigerError, read_aag
from .bench import bench, par2, to_csv
from .certify import is_skolem_vector
from .definability import unidef
from .engine import Config, synthesize
from .formula import Encoder, QDimacsError, parse_qdimacs

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_TIMEOUT, EXIT_INTERNAL = 0, 1, 2, 3, 4

log = logging.getLogger("skolem")


class UsageError(ValueError):
    pass


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("synthesis options")
    g.add_argument("--k", type=int, default=3, help="clustering radius (default 3)")
    g.add_argument("--s", type=int, default=5, help="maximum chunk size (default 5)")
    g.add_argument("--cluster", choices=["graph", "random"], default="graph")
    g.add_argument("--lex", choices=["on", "off", "always"], default="on")
    g.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $SKOLEM_SEED, then 0)")
    g.add_argument("--timeout", type=float, default=None, help="seconds")
    g.add_argument("--min-samples", type=int, default=1000)
    g.add_argument("--max-samples", type=int, default=10000)
    g.add_argument("--impurity", type=float, default=0.005, help="minimum impurity decrease for a split")
    g.add_argument("--self-sub-threshold", type=int, default=10)
    g.add_argument("--lex-ratio", type=int, default=50)
    g.add_argument("--core-passes", type=int, default=1, help="core shrinking passes (0 disables)")
    g.add_argument("--proof-budget", type=int, default=None, help="max proof nodes per extraction")
    g.add_argument("--max-repair-iterations", type=int, default=1000)
    g.add_argument("--no-unates", dest="unates", action="store_false")
    g.add_argument("--no-definitions", dest="definitions", action="store_false")


def _config(args) -> Config:
    try:
        return _make_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _make_config(args) -> Config:
    return Config(
        k=args.k,
        s=args.s,
        min_samples=args.min_samples,
        max_samples=args.max_samples,
        impurity=args.impurity,
        self_sub_threshold=args.self_sub_threshold,
        lex_ratio=args.lex_ratio,
        seed=args.seed,
        timeout=args.timeout,
        cluster=args.cluster,
        lex=args.lex,
        unates=args.unates,
        definitions=args.definitions,
        core_passes=args.core_passes,
        proof_budget=args.proof_budget,
        max_repair_iterations=args.max_repair_iterations,
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skolem", description="Skolem function synthesis for 2QBF specifications.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a Skolem vector")
    s.add_argument("file")
    s.add_argument("-o", "--output", help="AAG output file (default: stdout)")
    s.add_argument("--stats", help="write run statistics as JSON")
    s.add_argument("--trace", help="write one JSON line per repair iteration")
    s.add_argument("--dump-samples", help="write the sample matrix as CSV")
    s.add_argument("--dump-trees", help="directory for one DOT file per decision tree")
    _add_config_flags(s)

    v = sub.add_parser("verify", help="check a vector in AAG form against a specification")
    v.add_argument("file")
    v.add_argument("vector")

    b = sub.add_parser("bench", help="run every instance in a directory")
    b.add_argument("directory")
    b.add_argument("--csv", help="CSV report file (default: stdout)")
    b.add_argument("--jobs", type=int, default=1)
    _add_config_flags(b)

    d = sub.add_parser("defx", help="definability tools")
    dsub = d.add_subparsers(dest="defx_command", required=True)
    r = dsub.add_parser("report", help="per-output definability CSV")
    r.add_argument("file")
    r.add_argument("--csv", help="output file (default: stdout)")
    r.add_argument("--proof-budget", type=int, default=None)
    return p


def _read_spec(path):
    return parse_qdimacs(Path(path).read_bytes())


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_synth(args) -> int:
    spec = _read_spec(args.file)
    cfg = _config(args)
    trace_lines = []
    on_tree = None
    if args.dump_trees:
        out_dir = Path(args.dump_trees)
        out_dir.mkdir(parents=True, exist_ok=True)

        def on_tree(chunk, tree, features):
            names = [spec.name(v) for v in features]
            dot = tree.export_dot(names, [spec.name(y) for y in chunk])
            (out_dir / ("tree_" + "_".join(spec.name(y) for y in chunk) + ".dot")).write_text(dot)

    res = synthesize(spec, cfg, on_trace=lambda e: trace_lines.append(json.dumps(e, sort_keys=True)), on_tree=on_tree)
    if args.trace:
        Path(args.trace).write_text("".join(line + "\n" for line in trace_lines))
    if args.dump_samples and res.samples is not None:
        names = {v: spec.name(v) for v in res.samples.columns}
        Path(args.dump_samples).write_text(res.samples.to_csv(names))
    if args.stats:
        Path(args.stats).write_text(json.dumps(res.stats.to_dict(), indent=2, sort_keys=True) + "\n")
    if res.stats.status == "timeout":
        log.error("timeout")
        return EXIT_TIMEOUT
    if not res.solved:
        log.error("run ended with status %s", res.stats.status)
        return EXIT_INTERNAL
    _write(args.output, res.to_aag())
    log.info("%s: %s", args.file, res.stats.status)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _read_spec(args.file)
    try:
        vector = read_aag(Path(args.vector).read_bytes(), inputs=spec.inputs)
    except (AigerError, UnicodeDecodeError) as exc:
        print(f"invalid vector: {exc}")
        return EXIT_INVALID
    if len(vector) != len(spec.outputs):
        print(f"invalid vector: {len(vector)} outputs, expected {len(spec.outputs)}")
        return EXIT_INVALID
    ok = is_skolem_vector(spec, vector)
    if ok is None:
        print("unknown")
        return EXIT_INTERNAL
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_bench(args) -> int:
    cfg = _config(args)
    records = bench(args.directory, cfg, jobs=args.jobs)
    _write(args.csv, to_csv(records))
    if cfg.timeout is not None:
        score = par2(records, cfg.timeout)
        if score is not None:
            print(f"PAR-2: {score:.2f}", file=sys.stderr)
    return EXIT_OK


def defx_rows(spec, proof_budget=None):
    """One row per output: status, defining set size, definition clause count."""
    ud = unidef(spec, proof_budget=proof_budget)
    found = {d.output: d for d in ud.determined}
    skipped = set(ud.skipped)
    rows = []
    for y in spec.outputs:
        row = {"variable": y, "name": spec.name(y), "status": "undefined", "defining": "", "clauses": ""}
        d = found.get(y)
        if d is not None and d.kind == "unate":
            row.update(status="unate-pos" if d.function is funcs.TRUE else "unate-neg", defining=0, clauses=1)
        elif d is not None:
            enc = Encoder(ud.working.num_vars + 1)
            enc.equal(y, enc.tseitin(d.function))
            row.update(status="unique", defining=len(d.defining_set), clauses=len(enc.clauses))
        elif y in skipped:
            row["status"] = "skipped"
        rows.append(row)
    return rows


def cmd_defx(args) -> int:
    spec = _read_spec(args.file)
    rows = defx_rows(spec, args.proof_budget)
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["variable", "name", "status", "defining", "clauses"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(args.csv, buf.getvalue())
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "verify": cmd_verify, "bench": cmd_bench, "defx": cmd_defx}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (QDimacsError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        log.exception("internal error: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
