"""Command-line entry point: ``hamlearn {algoa,sweep,scan-h,verify}``.

Exit codes: 0 success, 1 computational or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .algo_a import run_algorithm_a
from .domain import MAX_EXHAUSTIVE_BITS, BitString, HFunction
from .records import RunManifest, encode_complex, now_utc, write_document, write_records_csv
from .sweep import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    CheckpointError,
    SweepConfig,
    resume,
    sweep_assignments,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUCCESS_TOL = 1e-9
WORKERS_ENV = "HAMLEARN_WORKERS"


class UsageError(Exception):
    pass


# -- config file ---------------------------------------------------------------

# key -> (parser, default); flags override the file, the file overrides these
SWEEP_KEYS = {
    "n": (int, None),
    "r": (int, None),
    "starts": (int, 20),
    "seed": (int, 0),
    "gauge": (lambda s: _parse_bool(s), False),
    "range": (lambda s: _parse_range(s), None),
    "max_iters": (int, 2000),
    "ftol": (float, 1e-10),
    "tie_tol": (float, 1e-6),
    "budget": (int, DEFAULT_BUDGET),
    "workers": (int, None),
    "out": (str, None),
    "plot": (lambda s: _parse_bool(s), True),
}


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = str(text).partition(":")
    if not sep:
        raise ValueError(f"range must look like lo:hi, got {text!r}")
    return int(lo), int(hi)


def read_config_file(path: str | Path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys read as underscores."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in SWEEP_KEYS:
            raise UsageError(f"{path}:{lineno}: unrecognized line {raw.strip()!r}")
        try:
            out[key] = SWEEP_KEYS[key][0](value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from exc
    return out


def resolve_sweep_settings(args: argparse.Namespace, environ=os.environ) -> dict:
    file_values = read_config_file(args.config) if args.config else {}
    settings = {}
    for key, (_, default) in SWEEP_KEYS.items():
        flag = getattr(args, key, None)
        settings[key] = flag if flag is not None else file_values.get(key, default)
    if settings["workers"] is None:
        env = environ.get(WORKERS_ENV)
        try:
            settings["workers"] = int(env) if env else 1
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    if settings["n"] is None or settings["r"] is None:
        raise UsageError("sweep needs --n and --r (on the command line or in --config)")
    if settings["workers"] < 1:
        raise UsageError("worker count must be positive")
    return settings


# -- shared output helpers -----------------------------------------------------


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*row) for row in cells[1:]]
    return "\n".join(lines)


def _manifest(command: str, argv: list[str], config: dict, seed=None) -> RunManifest:
    return RunManifest(command=command, argv=["hamlearn", *argv], config=config, seed=seed)


def _finish(manifest: RunManifest, t0: float) -> None:
    manifest.finished = now_utc()
    manifest.wall_clock = round(time.perf_counter() - t0, 3)


# -- algoa -------------------------------------------------------------------------


def cmd_algoa(args, argv) -> int:
    t0 = time.perf_counter()
    try:
        a = BitString.parse(args.a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if a.n != args.n:
        raise UsageError(f"--a has {a.n} bits but --n is {args.n}")
    try:
        run = run_algorithm_a(args.n, a, pair_mode=args.pair_mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    dist = run.outcome_distribution
    body = {
        "n": args.n,
        "a": str(a),
        "pair_mode": args.pair_mode,
        "success_probability": float(f"{run.success_probability:.12g}"),
        "final_phase": encode_complex(run.final_phase),
        "most_likely": str(run.most_likely()),
        "support": {
            format(int(x), f"0{args.n}b"): float(f"{dist[x]:.12g}")
            for x in np.flatnonzero(dist > 1e-12)
        },
    }
    if args.trials:
        rng = np.random.default_rng(args.seed)
        draws = rng.choice(dist.size, size=args.trials, p=dist / dist.sum())
        hits = np.isin(draws, [a.value, a.complement().value] if args.pair_mode else [a.value])
        body["trials"] = {"count": args.trials, "seed": args.seed, "hits": int(hits.sum())}

    config = {"n": args.n, "a": str(a), "pair_mode": args.pair_mode, "trials": args.trials}
    manifest = _manifest("algoa", argv, config, seed=args.seed if args.trials else None)
    _finish(manifest, t0)
    if args.out:
        out = Path(args.out)
        write_document(out / "algoa.json", manifest, body)
        if not args.no_plot:
            from .plotting import plot_outcomes

            plot_outcomes(dist, args.n, out / "outcomes.png", marked=a.value)

    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        label = "Pr[a or complement]" if args.pair_mode else "Pr[a]"
        rows = [[k, f"{v:.12g}"] for k, v in body["support"].items()]
        print(_table(rows, ["outcome", "probability"]))
        phase = run.final_phase
        print(f"{label} = {run.success_probability:.12f}   final phase = {phase.real:+.6f}{phase.imag:+.6f}i")
        if "trials" in body:
            print(f"sampled {args.trials} shots: {body['trials']['hits']} hits")
    return EXIT_OK if run.success_probability >= 1.0 - SUCCESS_TOL else EXIT_FAIL


# -- sweep ---------------------------------------------------------------------


def cmd_sweep(args, argv) -> int:
    t0 = time.perf_counter()
    s = resolve_sweep_settings(args)
    try:
        config = SweepConfig(
            n=s["n"], r=s["r"], starts=s["starts"], max_iters=s["max_iters"], ftol=s["ftol"],
            seed=s["seed"], gauge_reduce=s["gauge"], index_range=s["range"],
            tie_tol=s["tie_tol"], budget=s["budget"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(s["out"] or f"sweep-n{config.n}-r{config.r}")
    records_path = out / "records.jsonl"
    resolved = config.echo() | {"workers": s["workers"], "out": str(out), "plot": s["plot"]}
    manifest = _manifest("sweep", argv, resolved, seed=config.seed)

    try:
        config.check_budget()
        out.mkdir(parents=True, exist_ok=True)
        if args.resume:
            if not records_path.exists():
                raise CheckpointError(f"nothing to resume: {records_path} does not exist")
            report = resume(records_path, config, workers=s["workers"])
        else:
            if records_path.exists():
                raise CheckpointError(f"{records_path} exists; pass --resume or choose another --out")
            report = sweep_assignments(
                config, records_path, workers=s["workers"], header=asdict(manifest)
            )
        _finish(manifest, t0)
        write_document(out / "summary.json", manifest, report.body())
        write_records_csv(out / "summary.csv", report.records)
        if s["plot"] and report.records:
            from .plotting import plot_sweep

            plot_sweep(report, out / "probabilities.png")
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    rows = [
        [o.assignment_index, " ".join(o.sigma), f"{o.probability:.6f}", o.rank, "yes" if o.converged else "no"]
        for o in report.optima
    ]
    print(f"n={config.n} r={config.r}  best = {report.best_probability:.6f}  "
          f"({report.totals['evaluated']} evaluated, {report.totals['skipped_by_gauge']} skipped by gauge, "
          f"{report.totals['rank_deficient']} rank deficient)")
    print(_table(rows, ["index", "assignment", "probability", "rank", "converged"]))
    print(f"records: {records_path}")
    return EXIT_OK


# -- scan-h ----------------------------------------------------------------------


def cmd_scan_h(args, argv) -> int:
    from .nogo import learning_matrix, scan_all_h

    t0 = time.perf_counter()
    if not 1 <= args.n <= MAX_EXHAUSTIVE_BITS:
        print(f"error: scan-h supports 1 <= n <= {MAX_EXHAUSTIVE_BITS}, got {args.n}", file=sys.stderr)
        return EXIT_FAIL
    report = scan_all_h(args.n)
    manifest = _manifest("scan-h", argv, {"n": args.n})
    _finish(manifest, t0)
    body = report.to_dict()
    if args.out:
        out = Path(args.out)
        try:
            write_document(out / "scan.json", manifest, body)
            if not args.no_plot:
                from .plotting import plot_learning_matrix

                h = report.passing_h[0] if report.passing_h else HFunction.b1(args.n)
                verdict = "Hadamard" if report.passing_h else "not Hadamard"
                plot_learning_matrix(
                    learning_matrix(h, args.n), out / "learning_matrix.png",
                    title=f"n = {args.n}, h = {h} ({verdict})",
                )
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
    rows = [[str(h), "" if s is None else s] for h, s in zip(report.passing_h, report.classifications)]
    print(f"n={args.n}: scanned {report.scanned} functions, {len(report.passing_h)} pass, "
          f"{len(report.non_distinct)} give fewer than 2^n distinct concepts")
    if rows:
        print(_table(rows, ["h(0..n)", "b1 shift"]))
    return EXIT_OK


# -- verify ----------------------------------------------------------------------


def cmd_verify(args, argv) -> int:
    from .verify import run_suite

    failed = None
    for check in run_suite(args.suite, stop_on_failure=True):
        print(check.line())
        if not check.passed:
            failed = check
    if failed is not None:
        print(f"first failing invariant: {failed.name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- parser --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hamlearn", description="Hamming distance oracle learning experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("algoa", help="simulate the exact single-query learner")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--a", required=True, help="hidden string, e.g. 0110")
    a.add_argument("--pair-mode", action="store_true", help="n = 1 (mod 4): identify {a, complement}")
    a.add_argument("--trials", type=int, default=0, help="also sample this many measurement shots")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", help="directory for algoa.json and outcomes.png")
    a.add_argument("--json", action="store_true", help="print the result document instead of a table")
    a.add_argument("--no-plot", action="store_true")
    a.set_defaults(func=cmd_algoa)

    s = sub.add_parser("sweep", help="optimize psi for every assignment in a range")
    s.add_argument("--n", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--starts", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--gauge", action="store_const", const=True, default=None,
                   help="only assignments with sigma_0 = identity")
    s.add_argument("--range", type=_range_arg, help="half-open index range lo:hi")
    s.add_argument("--max-iters", dest="max_iters", type=int)
    s.add_argument("--ftol", type=float)
    s.add_argument("--tie-tol", dest="tie_tol", type=float)
    s.add_argument("--budget", type=int)
    s.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    s.add_argument("--out", help="output directory")
    s.add_argument("--resume", action="store_true", help="continue from OUT/records.jsonl")
    s.add_argument("--config", help="key = value settings file")
    s.add_argument("--no-plot", dest="plot", action="store_const", const=False, default=None)
    s.set_defaults(func=cmd_sweep)

    h = sub.add_parser("scan-h", help="exhaustive scan of distance functions h")
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--out", help="directory for scan.json and learning_matrix.png")
    h.add_argument("--no-plot", action="store_true")
    h.set_defaults(func=cmd_scan_h)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", required=True,
                   choices=["lemmas", "statevec", "algoa", "srm", "nogo", "sweep", "all"])
    v.set_defaults(func=cmd_verify)
    return p


def _range_arg(text: str) -> tuple[int, int]:
    try:
        return _parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
