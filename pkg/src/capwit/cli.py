"""Command-line front end.

Subcommands: theory, witness, simulate, fit, reproduce.  Every invocation is
deterministic given its flags (sampling always runs under an explicit or
defaulted seed).  Exit codes: 0 success, 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataio, pipeline
from .capacity import theory_report
from .channels import ChannelParams, channel_from_spec, correlated_channel, fit_channel
from .errors import ConfigError, DataError, DomainError, ValidationError
from .measure import exact_record, sampled_record
from .witness import SearchConfig

USAGE_EXIT = 2
DATA_EXIT = 3


def _fmt(x) -> str:
    return "none" if x is None else f"{x:.6f}"


def _search_from_args(args) -> SearchConfig:
    return SearchConfig(grid_points=args.grid, refine=args.refine)


def _add_search_flags(sub) -> None:
    sub.add_argument("--grid", type=int, default=21, help="grid points per angle")
    sub.add_argument(
        "--refine",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="simplex refinement after the grid stage",
    )


def cmd_theory(args) -> int:
    report = theory_report(ChannelParams(args.p, args.mu))
    print(f"p = {_fmt(args.p)}")
    print(f"mu = {_fmt(args.mu)}")
    print(f"Q = {_fmt(report.q_exact)}")
    print(f"Q1 = {_fmt(report.q1)}")
    print(f"Q2 = {_fmt(report.q2)}")
    print(f"Q_lim = {_fmt(report.q_lim)}")
    print(f"dQ = {_fmt(report.q_exact - report.q_lim)}")
    return 0


def _sniff_input(path) -> str:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    kind = payload.get("format") if isinstance(payload, dict) else None
    if kind not in (dataio.DATASET_FORMAT, dataio.RECORD_FORMAT):
        raise DataError(f"{path} is neither a dataset nor a record file")
    return kind


def _print_analysis(witness, capacities, q_theory, sigma_q) -> None:
    print(f"Q_det_tot_raw = {_fmt(witness.q_det_raw)}")
    print(f"Q_det_tot = {_fmt(witness.q_det)}")
    print(f"clamped = {'true' if witness.clamped else 'false'}")
    print(f"sigma_Q = {_fmt(sigma_q)}")
    if capacities is not None:
        print(f"Q1 = {_fmt(capacities.q1)}")
        print(f"Q2 = {_fmt(capacities.q2)}")
        print(f"Q_lim = {_fmt(capacities.q_lim)}")
    print(f"Q_theory = {_fmt(q_theory)}")
    pairs = ", ".join(
        f"{pb.family}(theta_b={pb.theta_b:.4f}, theta_d={pb.theta_d:.4f})"
        for pb in witness.best_basis.pairs
    )
    print(f"best_basis = {pairs}")
    if witness.assumptions:
        print("assumptions = " + ";".join(witness.assumptions))
    return None


def cmd_witness(args, parser) -> int:
    if args.bootstrap and args.seed is None:
        parser.error("--bootstrap requires --seed")
    search = _search_from_args(args)
    kind = _sniff_input(args.input)
    seed = args.seed if args.seed is not None else 0
    if kind == dataio.DATASET_FORMAT:
        if not args.fit:
            raise DataError(
                "dataset files lack per-pair correlators; rerun with --fit"
            )
        ds = dataio.load_appendix(args.input)
        analysis = pipeline.analyze_dataset(
            ds, search=search, bootstrap_resamples=args.bootstrap, seed=seed
        )
        print(f"input = {args.input} (dataset p={ds.p_label}, mu={ds.mu_label})")
        print(f"fit_p = {_fmt(analysis.fit.p)}")
        print(f"fit_mu = {_fmt(analysis.fit.mu)}")
        _print_analysis(
            analysis.witness, analysis.capacities, analysis.q_theory, analysis.sigma_q
        )
        rows = [analysis.report_row()]
    else:
        if args.fit:
            parser.error("--fit applies to dataset inputs only")
        rec = dataio.load_record(args.input)
        analysis = pipeline.analyze_record(
            rec, search=search, bootstrap_resamples=args.bootstrap, seed=seed
        )
        print(f"input = {args.input} (record, {rec.n_pairs} pair(s))")
        _print_analysis(
            analysis.witness, analysis.capacities, analysis.q_theory, analysis.sigma_q
        )
        rows = [analysis.report_row()]
    if args.out:
        dataio.write_report(rows, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_simulate(args, parser) -> int:
    if (args.p is None) != (args.mu is None):
        parser.error("--p and --mu must be given together")
    if args.channel and args.p is not None:
        parser.error("--channel and --p/--mu are mutually exclusive")
    if not args.channel and args.p is None:
        parser.error("specify a channel via --p/--mu or --channel")
    if args.exact:
        if args.shots is not None or args.seed is not None:
            parser.error("--exact does not take --shots/--seed")
    else:
        if args.shots is None or args.seed is None:
            parser.error("sampling requires both --shots and --seed")

    if args.channel:
        try:
            spec = json.loads(Path(args.channel).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read channel spec {args.channel}: {exc}") from exc
        ch = channel_from_spec(spec)
    else:
        spec = {"type": "correlated_flip", "p": args.p, "mu": args.mu}
        ch = correlated_channel(ChannelParams(args.p, args.mu))

    meta = {"channel": spec}
    if args.exact:
        rec = exact_record(ch, metadata=meta)
    else:
        rec = sampled_record(ch, args.shots, args.seed, metadata=meta)
    dataio.save_record(rec, args.out)
    mode = "exact" if args.exact else f"sampled shots={args.shots} seed={args.seed}"
    print(f"wrote {args.out} ({mode}, {len(rec.settings)} settings)")
    return 0


def cmd_fit(args) -> int:
    ds = dataio.load_appendix(args.input)
    result = fit_channel(ds.values, ds.sigmas)
    print(f"input = {args.input} (dataset p={ds.p_label}, mu={ds.mu_label})")
    print(f"p = {_fmt(result.p)}")
    print(f"mu = {_fmt(result.mu)}")
    print(f"A_IX = {_fmt(result.a_ix)}")
    print(f"A_XX = {_fmt(result.a_xx)}")
    print(f"residual = {result.residual:.3f}")
    return 0


def cmd_reproduce(args) -> int:
    search = _search_from_args(args)
    datasets = dataio.load_fixture_set(args.data_dir)
    analyses = pipeline.analyze_fixture_set(
        datasets,
        search=search,
        bootstrap_resamples=args.bootstrap,
        seed=args.seed,
    )
    rows = [a.report_row() for a in analyses]
    dataio.write_report(rows, args.out)
    for row in rows:
        print(
            f"p={row.p_label:>4} mu={row.mu_label:>5}  "
            f"Q_tot={row.q_det:.6f}  Q_lim={row.q_lim:.6f}  Q_theory={row.q_theory:.6f}"
        )
    print(f"wrote {args.out}")
    if args.figure:
        from . import plots

        fig_path = Path(args.out).with_suffix(".png")
        plots.render_report(rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capwit",
        description="Capacity witness toolkit for correlated two-qubit flip channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_theory = sub.add_parser("theory", help="closed-form capacities for (p, mu)")
    p_theory.add_argument("--p", type=float, required=True)
    p_theory.add_argument("--mu", type=float, required=True)

    p_witness = sub.add_parser("witness", help="witness bounds from a data file")
    p_witness.add_argument("--input", required=True)
    p_witness.add_argument(
        "--fit",
        action="store_true",
        help="complete dataset inputs with fitted per-pair correlators",
    )
    p_witness.add_argument("--bootstrap", type=int, default=0, metavar="N")
    p_witness.add_argument("--seed", type=int)
    p_witness.add_argument("--out", help="also write a one-row report CSV")
    _add_search_flags(p_witness)

    p_sim = sub.add_parser("simulate", help="simulate the separable scheme")
    p_sim.add_argument("--p", type=float)
    p_sim.add_argument("--mu", type=float)
    p_sim.add_argument("--channel", help="JSON channel spec file")
    p_sim.add_argument("--shots", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--exact", action="store_true", help="infinite-statistics record")
    p_sim.add_argument("--out", required=True)

    p_fit = sub.add_parser("fit", help="fit (p, mu) to a dataset")
    p_fit.add_argument("--input", required=True)

    p_rep = sub.add_parser("reproduce", help="process a fixture set into the report")
    p_rep.add_argument("--data-dir", help="dataset directory (default: packaged)")
    p_rep.add_argument("--out", default="report.csv")
    p_rep.add_argument("--bootstrap", type=int, default=200, metavar="N")
    p_rep.add_argument("--seed", type=int, default=1234)
    p_rep.add_argument(
        "--figure",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="render the bar-chart figure next to the CSV",
    )
    _add_search_flags(p_rep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "theory":
            return cmd_theory(args)
        if args.command == "witness":
            return cmd_witness(args, parser)
        if args.command == "simulate":
            return cmd_simulate(args, parser)
        if args.command == "fit":
            return cmd_fit(args)
        if args.command == "reproduce":
            return cmd_reproduce(args)
        parser.error(f"unknown command {args.command!r}")
    except (DomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (DataError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
