"""Command line front end.

Three subcommands:
  register      solve one correspondence file, emit a JSON result
  bench         run the synthetic benchmark sweep, emit CSV (+ figures)
  vote-inspect  dump the vote table of a file under a chosen kernel

Exit codes: 0 success, 2 parse error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from .benchmark import (
    SOLVERS,
    BenchConfig,
    BenchRecord,
    OutlierMode,
    run_benchmark,
    write_csv,
    write_json,
)
from .cost import GncParams, KernelKind, VoteKernel
from .errors import ParseError, RegistrationError
from .files import (
    load_correspondences,
    load_ground_truth,
    save_correspondences,
    save_ground_truth,
)
from .pipeline import VocraConfig, rotation_error, translation_error, vocra
from .voting import voting_tb

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_IO = 4

DEFAULT_RATES = (0.2, 0.5, 0.8, 0.9, 0.95, 0.97, 0.98, 0.99)

_KERNELS = {k.value: k for k in KernelKind}


def _add_scale_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma", type=float, default=0.01, help="noise scale (default 0.01)")
    p.add_argument("--theta", type=float, default=0.15, help="chordal consensus threshold")
    p.add_argument("--xi1-mult", type=float, default=3.0, help="voting scale multiplier of sigma")
    p.add_argument("--xi2-mult", type=float, default=5.0, help="refinement scale multiplier of sigma")
    p.add_argument("--vote-mu", type=float, default=1.5, help="vote kernel control parameter")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vocra", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    reg = sub.add_parser("register", help="register one correspondence file")
    reg.add_argument("input", help="correspondence file (px py pz qx qy qz per line)")
    _add_scale_flags(reg)
    reg.add_argument("--ground-truth", help="JSON sidecar to score against")
    reg.add_argument("--output", help="write the result JSON here as well as stdout")

    ben = sub.add_parser("bench", help="synthetic benchmark sweep")
    ben.add_argument("--n", type=int, default=1000)
    ben.add_argument("--trials", type=int, default=30)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument(
        "--outlier-rate",
        type=float,
        action="append",
        default=None,
        help="repeatable; default sweep is " + ",".join(str(r) for r in DEFAULT_RATES),
    )
    ben.add_argument(
        "--outlier-mode",
        choices=[m.value for m in OutlierMode],
        default=OutlierMode.SPHERE_RADIUS_1.value,
    )
    ben.add_argument("--solvers", default="vocra", help="comma list: " + ",".join(sorted(SOLVERS)))
    ben.add_argument("--sigma", type=float, default=0.01)
    ben.add_argument("--theta", type=float, default=0.15)
    ben.add_argument("--output", default="bench_results.csv", help=".csv path; a .json mirror is written too")
    ben.add_argument("--no-figures", action="store_true", help="skip the PNG report figures")
    ben.add_argument("--dump-instances", metavar="DIR", help="save each trial instance + ground-truth sidecar")

    vot = sub.add_parser("vote-inspect", help="dump the vote table of a file")
    vot.add_argument("input")
    _add_scale_flags(vot)
    vot.add_argument("--kernel", choices=sorted(_KERNELS), default="tb")
    vot.add_argument("--ground-truth", help="JSON sidecar; marks true inliers in the output")
    vot.add_argument("--output", default="votes.csv")
    vot.add_argument("--no-figures", action="store_true")

    return ap


def _fail(code: int, kind: str, message: str, as_json: bool = False) -> int:
    if as_json:
        print(json.dumps({"error": {"type": kind, "message": message}}))
    print(f"error ({kind}): {message}", file=sys.stderr)
    return code


def _cmd_register(args: argparse.Namespace) -> int:
    try:
        corr = load_correspondences(args.input, sigma=args.sigma)
    except ParseError as exc:
        return _fail(EXIT_PARSE, "ParseError", str(exc), as_json=True)
    config = VocraConfig(
        sigma=args.sigma,
        theta=args.theta,
        xi1=args.xi1_mult * args.sigma,
        xi2=args.xi2_mult * args.sigma,
        vote_mu=args.vote_mu,
    )
    try:
        result = vocra(corr, config)
    except RegistrationError as exc:
        return _fail(EXIT_SOLVER, type(exc).__name__, str(exc), as_json=True)

    payload = {
        "rotation": [float(v) for v in result.transform.rotation.ravel()],
        "translation": [float(v) for v in result.transform.translation],
        "inliers": result.inliers,
        "num_inliers": len(result.inliers),
        "diagnostics": dataclasses.asdict(result.diagnostics),
        "runtime_seconds": result.runtime_seconds,
    }
    if args.ground_truth:
        try:
            truth, _ = load_ground_truth(args.ground_truth)
        except ParseError as exc:
            return _fail(EXIT_PARSE, "ParseError", str(exc), as_json=True)
        payload["rotation_error_deg"] = rotation_error(
            truth.rotation, result.transform.rotation
        )
        payload["translation_error"] = translation_error(
            truth.translation, result.transform.translation
        )
    text = json.dumps(payload, indent=2)
    print(text)
    if args.output:
        try:
            Path(args.output).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            return _fail(EXIT_IO, "IOError", str(exc))
    return EXIT_OK


def _median_or_nan(values: list[float]) -> float:
    return statistics.median(values) if values else float("nan")


def _print_summary(records: list[BenchRecord]) -> None:
    cells = sorted({(r.outlier_rate, r.solver) for r in records})
    print(f"{'rate':>6} {'solver':>8} {'ok':>5} {'med rot err (deg)':>18} "
          f"{'med trans err':>14} {'med runtime (s)':>16}")
    for rate, solver in cells:
        group = [r for r in records if r.outlier_rate == rate and r.solver == solver]
        ok = [r for r in group if r.status == "ok"]
        print(
            f"{rate:>6.2f} {solver:>8} {len(ok):>3}/{len(group):<2}"
            f"{_median_or_nan([r.rotation_error_deg for r in ok]):>17.4f} "
            f"{_median_or_nan([r.translation_error for r in ok]):>14.5f} "
            f"{_median_or_nan([r.runtime_seconds for r in group]):>16.4f}"
        )


def _cmd_bench(args: argparse.Namespace) -> int:
    rates = args.outlier_rate if args.outlier_rate else list(DEFAULT_RATES)
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    for s in solvers:
        if s not in SOLVERS:
            return _fail(EXIT_PARSE, "ParseError", f"unknown solver {s!r}")
    mode = OutlierMode(args.outlier_mode)
    records: list[BenchRecord] = []
    try:
        for rate in rates:
            config = BenchConfig(
                n=args.n,
                outlier_rate=rate,
                sigma=args.sigma,
                theta=args.theta,
                mode=mode,
                seed=args.seed,
                trials=args.trials,
            )
            if args.dump_instances:
                _dump_instances(config, Path(args.dump_instances))
            records.extend(run_benchmark(config, solvers))
    except ValueError as exc:
        return _fail(EXIT_PARSE, "ParseError", str(exc))

    out = Path(args.output)
    try:
        if out.suffix == ".json":
            write_json(records, out)
        else:
            write_csv(records, out)
            write_json(records, out.with_suffix(".json"))
    except OSError as exc:
        return _fail(EXIT_IO, "IOError", str(exc))
    _print_summary(records)
    if not args.no_figures:
        from .figures import render_benchmark_figures

        try:
            paths = render_benchmark_figures(records, out.parent, stem=out.stem)
        except OSError as exc:
            return _fail(EXIT_IO, "IOError", str(exc))
        for p in paths:
            print(f"figure: {p}")
    print(f"records: {len(records)} -> {out}")
    return EXIT_OK


def _dump_instances(config: BenchConfig, out_dir: Path) -> None:
    from .benchmark import generate_instance, surface_model_points

    out_dir.mkdir(parents=True, exist_ok=True)
    tag = f"r{int(round(config.outlier_rate * 100)):02d}_{config.mode.value}"
    for trial in range(config.trials):
        rng = np.random.default_rng(config.seed + trial)
        model = surface_model_points(config.n, rng)
        corr, truth, inliers = generate_instance(model, config, rng)
        save_correspondences(corr, out_dir / f"{tag}_t{trial:03d}.txt")
        save_ground_truth(truth, inliers, out_dir / f"{tag}_t{trial:03d}.gt.json")


def _cmd_vote_inspect(args: argparse.Namespace) -> int:
    try:
        corr = load_correspondences(args.input, sigma=args.sigma)
    except ParseError as exc:
        return _fail(EXIT_PARSE, "ParseError", str(exc))
    xi1 = args.xi1_mult * args.sigma
    kernel = VoteKernel(_KERNELS[args.kernel], GncParams(mu=args.vote_mu, xi=xi1))
    try:
        table = voting_tb(corr, xi1, kernel)
    except RegistrationError as exc:
        return _fail(EXIT_SOLVER, type(exc).__name__, str(exc))

    true_inliers: set[int] | None = None
    if args.ground_truth:
        try:
            _, inliers = load_ground_truth(args.ground_truth)
        except ParseError as exc:
            return _fail(EXIT_PARSE, "ParseError", str(exc))
        true_inliers = set(inliers)

    rank_of = np.empty(len(corr), dtype=np.intp)
    rank_of[table.sorted_indices] = np.arange(1, len(corr) + 1)
    lines = ["index,votes,rank,is_inlier"]
    for i in range(len(corr)):
        mark = "" if true_inliers is None else str(int(i in true_inliers))
        lines.append(f"{i},{table.votes[i]!r},{rank_of[i]},{mark}")
    try:
        Path(args.output).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    except OSError as exc:
        return _fail(EXIT_IO, "IOError", str(exc))
    print(f"e_in={'true' if table.e_in else 'false'}")
    print(f"votes: {len(corr)} rows -> {args.output}")
    if not args.no_figures:
        from .figures import render_vote_figure

        inlier_ranks = (
            sorted(int(rank_of[i]) for i in true_inliers) if true_inliers else None
        )
        out = Path(args.output)
        fig_path = out.with_name(out.stem + "_ranks.png")
        try:
            render_vote_figure(list(table.votes), inlier_ranks, fig_path)
        except OSError as exc:
            return _fail(EXIT_IO, "IOError", str(exc))
        print(f"figure: {fig_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "register":
        return _cmd_register(args)
    if args.command == "bench":
        return _cmd_bench(args)
    return _cmd_vote_inspect(args)


if __name__ == "__main__":
    raise SystemExit(main())
