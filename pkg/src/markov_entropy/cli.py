"""``entropy`` command line: regular, walk, exact and profile subcommands.

Exit codes: 0 success, 1 usage error, 2 computation error. Every output
embeds a run manifest (JSON) so the data columns can be reproduced.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata

from . import lang, regular, stats, tree, walker

WALK_SCHEMA = "markov-entropy/walk-csv/1"
EXACT_SCHEMA = "markov-entropy/exact-csv/1"
SWEEP_SCHEMA = "markov-entropy/sweep-csv/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    language: str
    parameters: dict
    tool_version: str = field(default_factory=tool_version)
    started: str = field(default_factory=_now)
    finished: str = ""

    def finish(self) -> "RunManifest":
        self.finished = _now()
        return self

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


def _load_language(args):
    if getattr(args, "pdfa", None):
        return regular.load_pdfa(args.pdfa), args.pdfa
    if getattr(args, "lang", None):
        return lang.parse_language_spec(args.lang), args.lang
    raise UsageError("one of --lang or --pdfa is required")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_regular(args) -> int:
    if args.sweep:
        if not args.lang:
            raise UsageError("--sweep needs --lang with a b=<lo>..<hi> range")
        specs = lang.parse_language_sweep(args.lang)
        manifest = RunManifest("regular", args.lang, {"delta": args.delta, "sweep": True, "state_cap": args.state_cap})
        base = specs[0].with_period_bound(None)
        result = regular.approximation_sweep(base, [s.period_bound for s in specs], args.delta, args.state_cap)
        manifest.finish()
        out, close = _open_out(args.out)
        try:
            out.write(f"# manifest: {manifest.to_json()}\n# schema: {SWEEP_SCHEMA}\n")
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["k", "states", "trimmed_states", "gr", "H", "mu"])
            for row in result.rows:
                writer.writerow([row.k, row.states, row.trimmed_states, repr(float(row.gr)), repr(float(row.H)), repr(float(row.mu))])
            if not result.complete:
                out.write(f"# incomplete: {result.message}\n")
        finally:
            if close:
                out.close()
        return 0 if result.complete else 2

    language, label = _load_language(args)
    if isinstance(language, lang.LanguageSpec):
        if language.period_bound is None or language.is_abelian:
            raise UsageError("regular analysis needs a period-bounded power spec or --pdfa")
        language = regular.build_power_approx_pdfa(language, args.state_cap)
    manifest = RunManifest("regular", label, {"delta": args.delta, "minimize": args.minimize})
    report = regular.analyze_regular(language, args.delta, minimized=args.minimize)
    manifest.finish()
    data = {k: _clean(v) for k, v in report.as_dict().items()}
    out, close = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump({"manifest": json.loads(manifest.to_json()), "report": data}, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write(f"# manifest: {manifest.to_json()}\n")
            width = max(len(k) for k in data)
            for k, v in data.items():
                out.write(f"{k:<{width}}  {v}\n")
    finally:
        if close:
            out.close()
    return 0


def _walk_rows(results, sigma):
    header = ["walk_id", "seed", "n"] + [f"r_{i}" for i in range(1, sigma + 1)]
    header += ["bf", "forced_backtracks", "dead_end_visits", "elapsed_ms"]
    rows = []
    for i, res in enumerate(results):
        if isinstance(res, walker.WalkFailure):
            continue
        bf = stats.bf_from_profile(res.r).bf if res.n else 0.0
        rows.append([i, res.seed, res.n, *res.r, repr(bf), res.forced_backtracks,
                     res.dead_end_visits, f"{res.elapsed * 1000:.1f}"])
    return header, rows


def cmd_walk(args) -> int:
    spec = lang.parse_language_spec(args.lang)
    if args.length < 1 or args.walks < 1:
        raise UsageError("--length and --walks must be >= 1")
    threads = args.threads or walker.default_parallelism()
    opts = walker.WalkOptions(stall_threshold=args.stall_threshold, keep_fraction=args.keep_fraction)
    manifest = RunManifest("walk", str(spec), {
        "length": args.length, "walks": args.walks, "seed": args.seed,
        "stall_threshold": args.stall_threshold, "keep_fraction": args.keep_fraction, "threads": threads,
    })
    results = walker.batch_walks(spec, args.length, args.walks, args.seed, opts, threads)
    profiles, failures = walker.split_results(results)
    for f in failures:
        print(f"walk {f.index} (seed {f.seed}) failed: {f.message}", file=sys.stderr)
    if not profiles:
        print("error: no walk succeeded", file=sys.stderr)
        return 2
    manifest.finish()
    header, rows = _walk_rows(results, spec.sigma)
    estimates = [stats.bf_from_profile(p.r, p.flagged) for p in profiles]
    try:
        summary = {k: _clean(v) for k, v in stats.aggregate(estimates).as_dict().items()}
    except ValueError as exc:
        summary = {"error": str(exc)}
    summary["failed"] = len(failures)
    out, close = _open_out(args.out)
    try:
        if args.format == "json":
            body = [dict(zip(header, row)) for row in rows]
            json.dump({"manifest": json.loads(manifest.to_json()), "walks": body, "summary": summary},
                      out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write(f"# manifest: {manifest.to_json()}\n# schema: {WALK_SCHEMA}\n")
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
            out.write(f"# summary: {json.dumps(summary, sort_keys=True)}\n")
    finally:
        if close:
            out.close()
    return 0


def exact_table(language, max_length: int, budget: int):
    """Rows ``(n, C, H_n, mu_n, E_n, |mu_n - E_n|)``; stops early if the budget runs out."""
    rows = []
    for n in range(max_length + 1):
        try:
            sl = tree.build_slice(language, n, budget)
        except tree.BudgetExceeded as exc:
            return rows, str(exc)
        count = tree.level_count(sl)
        mu = tree.exact_mu_n(sl)
        e = tree.exact_expected_bf(sl)
        rows.append((n, count, tree.general_entropy_order_n(sl), mu, e, abs(mu - e)))
    return rows, ""


def cmd_exact(args) -> int:
    language, label = _load_language(args)
    if args.max_length < 0:
        raise UsageError("--max-length must be >= 0")
    manifest = RunManifest("exact", label, {"max_length": args.max_length, "budget": args.budget})
    rows, problem = exact_table(language, args.max_length, args.budget)
    manifest.finish()
    header = ["n", "C", "H_n", "mu_n", "E_n", "residual"]
    out, close = _open_out(args.out)
    try:
        if args.format == "json":
            body = [dict(zip(header, [_clean(x) for x in row])) for row in rows]
            doc = {"manifest": json.loads(manifest.to_json()), "rows": body}
            if problem:
                doc["incomplete"] = problem
            json.dump(doc, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write(f"# manifest: {manifest.to_json()}\n# schema: {EXACT_SCHEMA}\n")
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(header)
            for n, c, h, mu, e, res in rows:
                writer.writerow([n, c, repr(h), repr(mu), repr(e), repr(res)])
            if problem:
                out.write(f"# incomplete: {problem}\n")
    finally:
        if close:
            out.close()
    return 2 if problem else 0


def read_walk_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    rank_cols = sorted((c for c in reader.fieldnames or () if c.startswith("r_")), key=lambda c: int(c[2:]))
    if not rank_cols:
        raise UsageError("no r_<i> columns in profile file")
    records = []
    for row in reader:
        r = tuple(int(row[c]) for c in rank_cols)
        flagged = int(row.get("forced_backtracks") or 0) > 0
        records.append((row.get("walk_id", ""), r, flagged))
    return records


def cmd_profile(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        records = read_walk_csv(fh.read())
    manifest = RunManifest("profile", args.file, {})
    estimates = [stats.bf_from_profile(r, flagged) for _, r, flagged in records]
    manifest.finish()
    out, close = _open_out(args.out)
    try:
        out.write(f"# manifest: {manifest.to_json()}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["walk_id", "n", "bf"] + [f"c_{i}" for i in range(1, len(records[0][1]) + 1)] if records else ["walk_id"])
        for (wid, r, _), est in zip(records, estimates):
            writer.writerow([wid, est.n, repr(est.bf), *(repr(float(c)) for c in est.c)])
        try:
            summary = {k: _clean(v) for k, v in stats.aggregate(estimates).as_dict().items()}
        except ValueError as exc:
            summary = {"error": str(exc)}
        out.write(f"# summary: {json.dumps(summary, sort_keys=True)}\n")
    finally:
        if close:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entropy", description="Markov entropy of repetition-free languages.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("regular", help="exact growth rate and Markov entropy of a regular language")
    p.add_argument("--lang", help="period-bounded spec, e.g. pf:3:2:b=4 (with --sweep: pf:3:2:b=2..10)")
    p.add_argument("--pdfa", help="automaton file")
    p.add_argument("--sweep", action="store_true", help="tabulate a range of period bounds as CSV")
    p.add_argument("--delta", type=float, default=1e-9)
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--state-cap", type=int, default=5_000_000)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_regular)

    p = sub.add_parser("walk", help="batch of random DFS walks, one CSV row per walk")
    p.add_argument("--lang", required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--walks", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker count (default: $ENTROPY_THREADS or cores)")
    p.add_argument("--stall-threshold", type=int, default=None)
    p.add_argument("--keep-fraction", type=float, default=0.5)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("exact", help="exact order-n entropies by enumerating trimmed prefix trees")
    p.add_argument("--lang")
    p.add_argument("--pdfa")
    p.add_argument("--max-length", type=int, required=True)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("profile", help="recompute branching frequencies from a walk CSV")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"entropy: error: {exc}", file=sys.stderr)
        return 1
    except lang.SpecError as exc:
        print(f"entropy: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, regular.PdfaError) as exc:
        print(f"entropy: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # computation failures map to exit code 2
        print(f"entropy: computation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
