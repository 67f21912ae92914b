"""Command-line front end.

Every subcommand is a thin shell over one library operation and writes its
outputs plus a manifest.json with the fully resolved configuration under
out/<command>/<label>/.  All runs are deterministic.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .chain import BendSpec, ChainSpec, Protocol, spec_from_dict, spec_to_dict
from .metrics import (
    FitDivergedError,
    SweepTable,
    SweepRow,
    TransferResult,
    fit_gaussian,
    fit_linear,
    sweep_alpha,
    sweep_kappa,
    transfer_metrics,
)
from .optimize import detuning_curve, optimize_detuning
from .photonic import DeviceParams, design_layout, parasitic_check
from .reference import calibrate_protocol1, reference
from .spectral import spectrum_report

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

FIGURE_DEFAULT_N = (12, 13, 21, 25)


def parse_grid(text: str) -> np.ndarray:
    """Inclusive `start:step:end` grid (both ends, half-step tolerance),
    or a comma-separated list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:step:end, got {text!r}")
        start, step, end = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be > 0")
        n = int(math.floor((end - start) / step + 0.5)) + 1
        return start + step * np.arange(n)
    return np.array([float(v) for v in text.split(",")])


def _chain_args(parser: argparse.ArgumentParser, bend: bool = False) -> None:
    parser.add_argument("--protocol", type=int, choices=(1, 2), help="1 or 2")
    parser.add_argument("--n", type=int, dest="n_sites", help="number of sites")
    parser.add_argument("--omega0", type=float, default=None)
    parser.add_argument("--ratio", type=float, dest="boundary_ratio",
                        help="boundary coupling ratio (Protocol 1)")
    parser.add_argument("--epsilon", type=float, default=None)
    if bend:
        parser.add_argument("--alpha", type=int, help="corner site index")
        parser.add_argument("--kappa", type=float, help="bend strength g/Omega_max")
        parser.add_argument("--delta", type=float, default=None,
                            help="corner detuning (units of omega0)")


def _out_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path,
                        help="JSON file providing chain/bend parameters")
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--label", default=None,
                        help="run directory name (defaults to the command)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for figure panels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bentchain",
        description="State transfer through bent qubit chains: references, "
        "bend sweeps, corner-defect optimization, spectra, and "
        "waveguide layouts.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reference", help="unbent-chain reference (p0, t0)")
    _chain_args(p)
    p.add_argument("--window", type=float, default=None)
    _out_args(p)

    p = sub.add_parser("calibrate", help="calibrate Protocol 1 boundary ratio")
    p.add_argument("--n", type=int, dest="n_sites", required=True)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--grid", default=None, help="ratio grid, start:step:end")
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--cache", type=Path, default=None)
    _out_args(p)

    p = sub.add_parser("metrics", help="bent-chain transfer metrics (q, s)")
    _chain_args(p, bend=True)
    _out_args(p)

    p = sub.add_parser("sweep-kappa", help="sweep bend strength at fixed corner")
    _chain_args(p, bend=True)
    p.add_argument("--grid", default="0:0.1:1", help="kappa grid")
    p.add_argument("--optimize", action="store_true",
                   help="also optimize the corner detuning per point")
    _out_args(p)

    p = sub.add_parser("sweep-alpha", help="sweep corner position at fixed kappa")
    _chain_args(p, bend=True)
    p.add_argument("--alpha-range", default=None,
                   help="alpha grid (default 2:1:ceil(N/2))")
    p.add_argument("--no-optimize", action="store_true")
    _out_args(p)

    p = sub.add_parser("optimize", help="optimal corner detuning for one bend")
    _chain_args(p, bend=True)
    p.add_argument("--interval", default="-4:0.5",
                   help="detuning search interval lo:hi, units of Omega_max")
    _out_args(p)

    p = sub.add_parser("curve", help="optimal detuning vs kappa")
    _chain_args(p, bend=True)
    p.add_argument("--grid", default="0:0.1:1", help="kappa grid")
    _out_args(p)

    p = sub.add_parser("spectrum", help="eigenvalue gaps and overlaps")
    _chain_args(p, bend=True)
    _out_args(p)

    p = sub.add_parser("design", help="waveguide separations for the chain")
    _chain_args(p)
    p.add_argument("--L", type=float, required=True, help="device length, cm")
    p.add_argument("--eta", type=float, default=19.5, help="coupling prefactor, 1/cm")
    p.add_argument("--xi", type=float, default=0.152, help="decay rate, 1/um")
    p.add_argument("--wavelength", type=float, default=633.0, help="nm")
    _out_args(p)

    p = sub.add_parser("fit", help="fit a sweep CSV (gaussian q(kappa) or "
                                   "linear delta_opt(kappa))")
    p.add_argument("--kind", choices=("gaussian", "linear"), required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--kappa-cut", type=float, default=0.7)
    _out_args(p)

    p = sub.add_parser("figure", help="reproduce a figure's data files")
    p.add_argument("tag", choices=("fig2", "fig3", "fig4", "fig5"))
    _out_args(p)

    return parser


def _resolve_chain(args, config: dict) -> tuple[ChainSpec, BendSpec | None]:
    merged = dict(config)
    for key, attr in (
        ("protocol", "protocol"),
        ("n_sites", "n_sites"),
        ("omega0", "omega0"),
        ("boundary_ratio", "boundary_ratio"),
        ("epsilon", "epsilon"),
        ("alpha", "alpha"),
        ("kappa", "kappa"),
        ("delta_alpha", "delta"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    if "protocol" not in merged or "n_sites" not in merged:
        raise ValueError("missing --protocol/--n (or a --config providing them)")
    return spec_from_dict(merged)


def _run_dir(args) -> Path:
    d = args.out / args.command / (args.label or args.command)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_manifest(run_dir: Path, payload: dict) -> None:
    payload = {"tool_version": __version__, "delta_units": "omega_max", **payload}
    with open(run_dir / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _reference_for(spec: ChainSpec):
    return reference(spec)


def _write_table(table: SweepTable, run_dir: Path, fmt: str, stem: str) -> Path:
    path = run_dir / f"{stem}.{fmt}"
    if fmt == "csv":
        table.to_csv(path)
    else:
        table.to_json(path)
    return path


def cmd_reference(args, config) -> int:
    spec, _ = _resolve_chain(args, config)
    ref = reference(spec, args.window)
    run_dir = _run_dir(args)
    with open(run_dir / "reference.json", "w") as fh:
        json.dump(ref.to_dict(), fh, indent=2)
        fh.write("\n")
    _write_manifest(run_dir, {"command": "reference", "chain": spec_to_dict(spec)})
    print(f"reference: protocol={spec.protocol.value} N={spec.n_sites} "
          f"p0={ref.p0:.8f} t0={ref.t0:.8f}")
    return 0


def cmd_calibrate(args, config) -> int:
    grid = parse_grid(args.grid) if args.grid else None
    ref = calibrate_protocol1(
        args.n_sites, ratio_grid=grid, window=args.window,
        omega0=args.omega0, cache_path=args.cache,
    )
    run_dir = _run_dir(args)
    with open(run_dir / "calibration.json", "w") as fh:
        json.dump(ref.to_dict(), fh, indent=2)
        fh.write("\n")
    _write_manifest(run_dir, {"command": "calibrate", "n_sites": args.n_sites,
                              "window": args.window, "grid": args.grid})
    print(f"calibrate: N={args.n_sites} ratio={ref.boundary_ratio:.6f} "
          f"p0={ref.p0:.6f} t0={ref.t0:.6f}")
    return 0


def cmd_metrics(args, config) -> int:
    spec, bend = _resolve_chain(args, config)
    if bend is None:
        raise ValueError("metrics needs --alpha and --kappa")
    ref = _reference_for(spec)
    result = transfer_metrics(spec, bend, ref)
    run_dir = _run_dir(args)
    payload = {"p": result.p, "t": result.t, "q": result.q, "s": result.s}
    with open(run_dir / "metrics.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    _write_manifest(run_dir, {"command": "metrics",
                              "chain": spec_to_dict(spec, bend)})
    print(f"metrics: q={result.q:.6f} s={result.s:.6f} p={result.p:.6f} "
          f"t={result.t:.6f}")
    return 0


def cmd_sweep_kappa(args, config) -> int:
    spec, bend = _resolve_chain(args, config)
    if bend is None:
        raise ValueError("sweep-kappa needs --alpha (kappa comes from --grid)")
    grid = parse_grid(args.grid)
    table = sweep_kappa(spec, bend.alpha, grid, optimize=args.optimize)
    run_dir = _run_dir(args)
    path = _write_table(table, run_dir, args.format, "sweep_kappa")
    _write_manifest(run_dir, {"command": "sweep-kappa", "grid": args.grid,
                              "optimize": args.optimize,
                              "chain": table.metadata})
    qs = [r.result.q for r in table.rows]
    print(f"sweep-kappa: {len(table.rows)} points, q range "
          f"[{min(qs):.4f}, {max(qs):.4f}] -> {path}")
    return 0


def cmd_sweep_alpha(args, config) -> int:
    spec, _ = _resolve_chain(args, config)
    kappa = args.kappa if args.kappa is not None else config.get("kappa")
    if kappa is None:
        raise ValueError("sweep-alpha needs --kappa")
    if args.alpha_range:
        alphas = [int(a) for a in parse_grid(args.alpha_range)]
    else:
        alphas = list(range(2, math.ceil(spec.n_sites / 2) + 1))
    table = sweep_alpha(spec, float(kappa), alphas, optimize=not args.no_optimize)
    run_dir = _run_dir(args)
    path = _write_table(table, run_dir, args.format, "sweep_alpha")
    _write_manifest(run_dir, {"command": "sweep-alpha", "alphas": alphas,
                              "chain": table.metadata})
    print(f"sweep-alpha: {len(table.rows)} corners at kappa={kappa} -> {path}")
    return 0


def cmd_optimize(args, config) -> int:
    spec, bend = _resolve_chain(args, config)
    if bend is None:
        raise ValueError("optimize needs --alpha and --kappa")
    lo, hi = (float(v) for v in args.interval.split(":"))
    ref = _reference_for(spec)
    res = optimize_detuning(spec, bend, ref, interval=(lo, hi))
    run_dir = _run_dir(args)
    payload = {
        "delta_star": res.delta_star,
        "delta_energy": res.delta_energy,
        "q_opt": res.q_opt,
        "s_opt": res.s_opt,
        "evaluations": res.evaluations,
        "on_boundary": res.on_boundary,
    }
    with open(run_dir / "optimize.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    _write_manifest(run_dir, {"command": "optimize", "interval": [lo, hi],
                              "chain": spec_to_dict(spec, bend)})
    flag = " (boundary)" if res.on_boundary else ""
    print(f"optimize: delta*={res.delta_star:.6f} q_opt={res.q_opt:.6f} "
          f"s_opt={res.s_opt:.6f}{flag}")
    return 0


def cmd_curve(args, config) -> int:
    spec, bend = _resolve_chain(args, config)
    if bend is None:
        raise ValueError("curve needs --alpha")
    grid = parse_grid(args.grid)
    ref = _reference_for(spec)
    curve = detuning_curve(spec, bend.alpha, grid, ref)
    run_dir = _run_dir(args)
    path = run_dir / "curve.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kappa", "delta_opt", "q_opt", "s_opt", "on_boundary"])
        for kappa, res in curve:
            writer.writerow([repr(kappa), repr(res.delta_star), repr(res.q_opt),
                             repr(res.s_opt), int(res.on_boundary)])
    _write_manifest(run_dir, {"command": "curve", "grid": args.grid,
                              "chain": spec_to_dict(spec, bend)})
    deltas = [res.delta_star for _, res in curve]
    print(f"curve: {len(curve)} points, delta* range "
          f"[{min(deltas):.4f}, {max(deltas):.4f}] -> {path}")
    return 0


def cmd_spectrum(args, config) -> int:
    spec, bend = _resolve_chain(args, config)
    if bend is None:
        raise ValueError("spectrum needs --alpha and --kappa")
    ref = _reference_for(spec)
    res = optimize_detuning(spec, bend, ref)
    report = spectrum_report(spec, bend, res.delta_energy)
    run_dir = _run_dir(args)
    path = run_dir / "spectrum.csv"
    report.to_csv(path)
    _write_manifest(run_dir, {"command": "spectrum", "delta_star": res.delta_star,
                              "chain": spec_to_dict(spec, bend)})
    print(f"spectrum: gap distortion bent={report.gap_distortion['bent']:.6f} "
          f"optimized={report.gap_distortion['bent_optimized']:.6f} -> {path}")
    return 0


def cmd_design(args, config) -> int:
    spec, _ = _resolve_chain(args, config)
    dev = DeviceParams(eta=args.eta, xi=args.xi, length=args.L,
                       wavelength=args.wavelength)
    layout = design_layout(spec, dev)
    parasitic = parasitic_check(layout, dev)
    run_dir = _run_dir(args)
    layout.to_csv(run_dir / "layout.csv")
    layout.to_json(run_dir / "layout.json", dev)
    _write_manifest(run_dir, {"command": "design", "device": {
        "eta": args.eta, "xi": args.xi, "length": args.L,
        "wavelength": args.wavelength}, "chain": spec_to_dict(spec)})
    d = layout.separations
    print(f"design: separations {d.min():.2f}..{d.max():.2f} um, "
          f"omega0={layout.omega0_physical:.5f}/cm, "
          f"max parasitic ratio {parasitic.max_ratio:.4f}")
    return 0


def cmd_fit(args, config) -> int:
    rows = []
    with open(args.input, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(rec)
    run_dir = _run_dir(args)
    if args.kind == "gaussian":
        table = SweepTable(
            axis="kappa",
            rows=[
                SweepRow(
                    axis_value=float(r["axis"]),
                    result=TransferResult(p=float(r["p"]), t=float(r["t"]),
                                          q=float(r["q"]), s=float(r["s"])),
                )
                for r in rows
            ],
        )
        report = fit_gaussian(table)
        summary = (f"fit gaussian: A={report.params[0]:.6f} "
                   f"sigma={report.params[1]:.6f} rms={report.residual_rms:.3g}")
    else:
        key = "delta_opt" if "delta_opt" in rows[0] else "delta_star"
        pairs = [(float(r["axis" if "axis" in r else "kappa"]), float(r[key]))
                 for r in rows if r.get(key)]
        report = fit_linear(pairs, kappa_cut=args.kappa_cut)
        summary = (f"fit linear: slope={report.params[0]:.6f} "
                   f"intercept={report.params[1]:.6f} rms={report.residual_rms:.3g}")
    with open(run_dir / "fit.json", "w") as fh:
        json.dump({"kind": report.kind, "params": list(report.params),
                   "residual_rms": report.residual_rms,
                   "domain": list(report.domain)}, fh, indent=2)
        fh.write("\n")
    _write_manifest(run_dir, {"command": "fit", "kind": args.kind,
                              "input": str(args.input)})
    print(summary)
    return 0


def _figure_panel(job: tuple) -> tuple[str, SweepTable | list]:
    kind, proto, n, alpha, kappa, grid = job
    if proto == 2:
        spec = ChainSpec(protocol=Protocol.PROTOCOL_2, n_sites=n)
        ref = reference(spec)
    else:
        ref = calibrate_protocol1(n)
        spec = ChainSpec(protocol=Protocol.PROTOCOL_1, n_sites=n,
                         boundary_ratio=ref.boundary_ratio)
    if kind == "kappa":
        table = sweep_kappa(spec, alpha, grid, optimize=True, ref=ref)
        return f"p{proto}_n{n}_alpha{alpha}_kappa", table
    table = sweep_alpha(spec, kappa, range(2, math.ceil(n / 2) + 1), ref=ref)
    return f"p{proto}_n{n}_kappa{kappa}_alpha", table


def cmd_figure(args, config) -> int:
    run_dir = args.out / "figure" / (args.label or args.tag)
    run_dir.mkdir(parents=True, exist_ok=True)
    kappa_grid = parse_grid("0:0.1:1")
    jobs: list[tuple] = []
    files: list[str] = []
    if args.tag in ("fig2", "fig3"):
        proto = 1 if args.tag == "fig2" else 2
        for n in FIGURE_DEFAULT_N:
            jobs.append(("kappa", proto, n, math.ceil(n / 2), None, kappa_grid))
    elif args.tag == "fig4":
        for proto in (1, 2):
            for n in FIGURE_DEFAULT_N:
                jobs.append(("alpha", proto, n, None, 0.4, None))
    else:  # fig5: spectra for N=25, alpha=12
        for proto, kappa in ((1, 0.5), (2, 0.3)):
            if proto == 2:
                spec = ChainSpec(protocol=Protocol.PROTOCOL_2, n_sites=25)
                ref = reference(spec)
            else:
                ref = calibrate_protocol1(25)
                spec = ChainSpec(protocol=Protocol.PROTOCOL_1, n_sites=25,
                                 boundary_ratio=ref.boundary_ratio)
            bend = BendSpec(alpha=12, kappa=kappa)
            res = optimize_detuning(spec, bend, ref)
            report = spectrum_report(spec, bend, res.delta_energy)
            name = f"p{proto}_n25_alpha12_kappa{kappa}_spectrum.csv"
            report.to_csv(run_dir / name)
            files.append(name)

    if jobs:
        if args.jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                panels = list(pool.map(_figure_panel, jobs))
        else:
            panels = [_figure_panel(j) for j in jobs]
        for stem, table in panels:
            table.to_csv(run_dir / f"{stem}.csv")
            files.append(f"{stem}.csv")

    _write_manifest(run_dir, {
        "command": "figure",
        "tag": args.tag,
        "files": sorted(files),
        "axes": {"kappa": "bend strength g/Omega_max",
                 "alpha": "corner site index",
                 "q": "P / P0", "s": "T / T0",
                 "delta_opt": "optimal detuning, units of Omega_max"},
    })
    print(f"figure {args.tag}: {len(files)} files -> {run_dir}")
    return 0


COMMANDS = {
    "reference": cmd_reference,
    "calibrate": cmd_calibrate,
    "metrics": cmd_metrics,
    "sweep-kappa": cmd_sweep_kappa,
    "sweep-alpha": cmd_sweep_alpha,
    "optimize": cmd_optimize,
    "curve": cmd_curve,
    "spectrum": cmd_spectrum,
    "design": cmd_design,
    "fit": cmd_fit,
    "figure": cmd_figure,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
    try:
        return COMMANDS[args.command](args, config)
    except FitDivergedError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
