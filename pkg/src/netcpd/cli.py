"""Command-line interface.

Subcommands: simulate | detect | threshold | benchmark | metrics.
Exit codes: 0 success, 2 usage error, 3 input format error,
4 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import __version__
from .metrics import evaluate, format_table, summarize, write_table_csv
from .netseq import FormatError, aggregate_contacts, read_contacts, read_dnmt, read_edgelist, write_dnmt
from .pipeline import (
    DetectionReport,
    detect_change_points,
    resolve_threads,
    write_changepoints_csv,
    write_signals_csv,
    write_threshold_csv,
    write_traces_csv,
)
from .simulate import derive_seed, read_truth, scenario, simulate, write_truth
from .threshold import DegenerateDataError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_DEGENERATE = 4


def _tau_arg(value: str):
    if value == "auto":
        return "auto"
    try:
        tau = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tau must be 'auto' or a number, got {value!r}")
    if tau < 0:
        raise argparse.ArgumentTypeError(f"tau must be >= 0, got {tau}")
    return tau


def _add_input_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input sequence file")
    p.add_argument(
        "--input-format",
        choices=("dnmt", "edgelist", "contacts"),
        default="dnmt",
        help="input layout (default: dnmt)",
    )
    p.add_argument("--T", type=int, help="number of time points (edgelist input)")
    p.add_argument("--n", type=int, help="number of nodes (edgelist/contacts input)")
    p.add_argument(
        "--window-seconds",
        type=float,
        default=60.0,
        help="aggregation window for contacts input (default: 60)",
    )


def _load_sequence(args):
    if args.input_format == "dnmt":
        return read_dnmt(args.input)
    if args.input_format == "edgelist":
        if args.T is None or args.n is None:
            raise UsageError("--input-format edgelist requires --T and --n")
        return read_edgelist(args.input, args.T, args.n)
    if args.n is None:
        raise UsageError("--input-format contacts requires --n")
    records = read_contacts(args.input)
    anchor = min(r.timestamp for r in records)
    print(f"contacts: {len(records)} events, window anchor at timestamp {anchor}", file=sys.stderr)
    return aggregate_contacts(records, args.window_seconds, args.n)


def _add_detect_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", type=int, default=500, help="number of sampled intervals (default: 500)")
    p.add_argument("--tau", type=_tau_arg, default="auto", help="threshold, a number or 'auto'")
    p.add_argument("--norm", choices=("operator", "frobenius"), default="operator")
    p.add_argument("--refine", choices=("susvt", "naive", "none"), default="susvt")
    p.add_argument("--tau2", type=float, help="spectral denoising threshold (overrides --tau2-scale)")
    p.add_argument(
        "--tau2-scale",
        type=float,
        default=0.6,
        help="tau2 = scale * (sqrt(n) + sqrt(ln T)) (default: 0.6)",
    )
    p.add_argument("--tau3", type=float, help="grid coefficient; default 3/ln T (g = 3)")
    p.add_argument("--trim", type=float, default=0.01, help="coarse-search end trim (default: 0.01)")
    p.add_argument("--seed", type=int, default=0, help="interval-sampling seed (default: 0)")
    p.add_argument("--threads", type=int, help="worker threads (default: NETCPD_THREADS or CPU count)")


class UsageError(ValueError):
    """Bad argument combination detected after parsing."""


def _detect_from_args(args, seq) -> DetectionReport:
    from .pipeline import default_tau2

    tau2 = args.tau2
    if tau2 is None and args.tau2_scale is not None:
        tau2 = default_tau2(seq.n, seq.T, args.tau2_scale)
    return detect_change_points(
        seq,
        M=args.M,
        tau=args.tau,
        seed=args.seed,
        norm=args.norm,
        refine=args.refine,
        tau2=tau2,
        tau3=args.tau3,
        trim=args.trim,
        threads=resolve_threads(args.threads),
    )


def cmd_simulate(args) -> int:
    cfg = scenario(args.scenario, args.n, args.T, args.seed)
    if args.carry_kernel_at_change:
        cfg.carry_kernel_at_change = True
    if args.no_self_loops:
        cfg.self_loops = False
    seq, truth = simulate(cfg, args.seed)
    write_dnmt(seq, args.out)
    truth_path = args.truth or args.out + ".truth.csv"
    write_truth(truth, truth_path)
    cps = " ".join(str(c) for c in truth.change_points) or "(none)"
    print(f"wrote {args.out} (T={seq.T}, n={seq.n}) and {truth_path}; change points: {cps}")
    return EXIT_OK


def cmd_detect(args) -> int:
    seq = _load_sequence(args)
    report = _detect_from_args(args, seq)
    write_changepoints_csv(report, args.out)
    if args.diagnostics_dir:
        import os

        os.makedirs(args.diagnostics_dir, exist_ok=True)
        write_signals_csv(report.records, os.path.join(args.diagnostics_dir, "signals.csv"))
        if report.threshold is not None:
            write_threshold_csv(
                report.records, report.threshold, os.path.join(args.diagnostics_dir, "threshold.csv")
            )
        if report.refine == "susvt":
            write_traces_csv(report.traces, os.path.join(args.diagnostics_dir, "traces.csv"))
    cps = " ".join(str(c) for c in report.change_points) or "(none)"
    print(f"k_hat={report.k_hat} tau={report.tau:.6g} change points: {cps}")
    return EXIT_OK


def cmd_threshold(args) -> int:
    from .cusum import SequenceSums
    from .distill import evaluate_signals, sample_intervals
    from .threshold import select_tau

    seq = _load_sequence(args)
    sums = SequenceSums(seq)
    records = evaluate_signals(
        sums, sample_intervals(seq.T, args.M, args.seed), args.norm, resolve_threads(args.threads)
    )
    thr = select_tau(records, sums, norm=args.norm)
    if args.out:
        write_threshold_csv(records, thr, args.out)
    print(
        f"tau_selected={thr.tau_selected!r} tau_ref={thr.tau_ref!r} "
        f"fallback_used={thr.fallback_used}"
    )
    return EXIT_OK


def _read_changepoints(path: str) -> tuple[list[int], int | None]:
    """Change-points from a detect output, a truth sidecar, or a bare list.

    Returns (change_points, T or None).  The layout is sniffed from the
    header row.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = rows[0]
    if header == ["k", "eta_hat", "l", "r"]:
        return [int(r[1]) for r in rows[1:]], None
    if header == ["key", "value"]:
        truth = read_truth(path)
        return list(truth.change_points), truth.T
    if header == ["eta"]:
        return [int(r[0]) for r in rows[1:] if r], None
    raise FormatError(
        f"{path}: unrecognized header {','.join(header)!r}; expected "
        "'k,eta_hat,l,r', 'key,value', or 'eta'"
    )


def cmd_metrics(args) -> int:
    truth_cps, t_truth = _read_changepoints(args.truth)
    est_cps, _ = _read_changepoints(args.estimate)
    T = args.T if args.T is not None else t_truth
    if T is None:
        raise UsageError("--T is required unless the truth file is a simulation sidecar")
    row = evaluate(truth_cps, est_cps, T)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k_true", "k_hat", "k_diff", "hausdorff_norm", "hausdorff_star", "ari"])
            w.writerow([
                row.k_true, row.k_hat, row.k_diff, repr(row.hausdorff_norm),
                "" if row.hausdorff_star is None else repr(row.hausdorff_star),
                repr(row.ari),
            ])
    star = "" if row.hausdorff_star is None else f" H*={row.hausdorff_star:.6g}"
    print(f"k_true={row.k_true} k_hat={row.k_hat} H={row.hausdorff_norm:.6g}{star} ARI={row.ari:.6g}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    cfg_probe = scenario(args.scenario, args.n, args.T, args.seed)
    rows = []
    for rep in range(args.reps):
        cfg = scenario(args.scenario, args.n, args.T, derive_seed(args.seed, rep, 0))
        if args.carry_kernel_at_change:
            cfg.carry_kernel_at_change = True
        seq, truth = simulate(cfg, derive_seed(args.seed, rep, 0))
        det_args = argparse.Namespace(**vars(args))
        det_args.seed = derive_seed(args.seed, rep, 1)
        report = _detect_from_args(det_args, seq)
        rows.append(
            evaluate(
                list(truth.change_points),
                list(report.change_points),
                seq.T,
                report.runtime_seconds,
            )
        )
        if not args.quiet:
            print(
                f"rep {rep + 1}/{args.reps}: k={rows[-1].k_hat} "
                f"H={rows[-1].hausdorff_norm:.4f} ari={rows[-1].ari:.4f} "
                f"({rows[-1].runtime_seconds:.1f}s)",
                file=sys.stderr,
            )
    table = summarize(rows)
    if args.out:
        write_table_csv(table, args.out)
    if args.rows:
        with open(args.rows, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rep", "k_true", "k_hat", "hausdorff_norm", "hausdorff_star", "ari", "runtime_s"])
            for i, r in enumerate(rows):
                w.writerow([
                    i, r.k_true, r.k_hat, repr(r.hausdorff_norm),
                    "" if r.hausdorff_star is None else repr(r.hausdorff_star),
                    repr(r.ari), repr(r.runtime_seconds),
                ])
    text = format_table(table)
    if args.text:
        with open(args.text, "w") as fh:
            fh.write(text)
    print(text, end="")
    del cfg_probe
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netcpd", description=__doc__)
    p.add_argument("--version", action="version", version=f"netcpd {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="generate a scenario sequence")
    ps.add_argument("--scenario", type=int, required=True, choices=(0, 1, 2, 3))
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--T", type=int, required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", required=True, help="output DNMT path")
    ps.add_argument("--truth", help="sidecar path (default: <out>.truth.csv)")
    ps.add_argument("--carry-kernel-at-change", action="store_true")
    ps.add_argument("--no-self-loops", action="store_true")
    ps.set_defaults(func=cmd_simulate)

    pd = sub.add_parser("detect", help="detect change points in a sequence")
    _add_input_opts(pd)
    _add_detect_opts(pd)
    pd.add_argument("--out", required=True, help="change-points CSV path")
    pd.add_argument("--diagnostics-dir", help="directory for stage diagnostics CSVs")
    pd.set_defaults(func=cmd_detect)

    pt = sub.add_parser("threshold", help="select the filtering threshold only")
    _add_input_opts(pt)
    pt.add_argument("--M", type=int, default=500)
    pt.add_argument("--norm", choices=("operator", "frobenius"), default="operator")
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--threads", type=int)
    pt.add_argument("--out", help="threshold diagnostics CSV path")
    pt.set_defaults(func=cmd_threshold)

    pb = sub.add_parser("benchmark", help="simulate, detect, and score repeatedly")
    pb.add_argument("--scenario", type=int, required=True, choices=(0, 1, 2, 3))
    pb.add_argument("--n", type=int, required=True)
    pb.add_argument("--T", type=int, required=True)
    pb.add_argument("--reps", type=int, default=10)
    pb.add_argument("--carry-kernel-at-change", action="store_true")
    _add_detect_opts(pb)
    pb.add_argument("--out", help="summary CSV path")
    pb.add_argument("--rows", help="per-rep CSV path")
    pb.add_argument("--text", help="aligned text table path")
    pb.add_argument("--quiet", action="store_true", help="suppress per-rep progress")
    pb.set_defaults(func=cmd_benchmark)

    pm = sub.add_parser("metrics", help="score an estimate against a truth file")
    pm.add_argument("--truth", required=True)
    pm.add_argument("--estimate", required=True)
    pm.add_argument("--T", type=int, help="sequence length (taken from a sidecar truth if omitted)")
    pm.add_argument("--out", help="scores CSV path")
    pm.set_defaults(func=cmd_metrics)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DegenerateDataError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
