"""Command-line interface.

Subcommands: generate (sample a model to a file), meplot (ME plot and
scaled-set artifacts from a data file), classify (tail-regime verdict),
experiment (Monte Carlo convergence report from a TOML config) and
selftest (quick oracle battery). Exit codes: 0 success or confident
verdict, 1 error, 2 inconclusive.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .converse import classify_regime
from .distributions import (
    ThresholdPolicy,
    auto_k,
    gpd_model,
    me_closed_form,
    me_numeric,
    parse_model_spec,
    sample,
)
from .empirical import SortedSample, me_plot, scaled_set
from .errors import MeplotError
from .geometry import Window, hausdorff_windowed, limit_set
from .harness import load_experiment_config, run_experiment


class CliError(Exception):
    pass


def read_values(path) -> np.ndarray:
    """One numeric value per line; '#' comments ignored, header optional."""
    values = []
    bad = []
    seen_content = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            field = text.split(",")[0].strip()
            try:
                parsed = float(field)
            except ValueError:
                if not seen_content:
                    seen_content = True  # optional header line
                else:
                    bad.append(lineno)
                continue
            seen_content = True
            values.append(parsed)
    if bad:
        shown = ", ".join(str(b) for b in bad[:5])
        raise CliError(f"unparseable rows at lines: {shown}")
    if len(values) < 2:
        raise CliError(f"need at least 2 valid values, found {len(values)}")
    return np.asarray(values, dtype=float)


def cmd_generate(args) -> int:
    model = parse_model_spec(args.model)
    if args.require_mean:
        xi = model.true_xi
        if xi is not None and xi >= 1:
            raise CliError(f"mean does not exist for xi={xi} >= 1")
        if model.name == "pareto" and model.params["alpha"] <= 1:
            raise CliError("mean does not exist for alpha <= 1")
    s = sample(model, args.n, args.seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(f"# model={model.spec_string()} n={args.n} seed={args.seed}\n")
        for v in s.values:
            fh.write(f"{float(v)!r}\n")
    print(f"wrote {args.n} values to {args.output}")
    return 0


def cmd_meplot(args) -> int:
    data = read_values(args.input)
    s = SortedSample(data)
    stem = Path(args.input)
    stem = stem.with_suffix("") if stem.suffix else stem
    plot = me_plot(s)
    csv_path = f"{stem}.meplot.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(plot.to_csv())
    written = [csv_path]

    sset = None
    overlay = None
    hausdorff = None
    window = Window(args.window)
    if args.regime:
        k = auto_k(s.n) if args.k == "auto" else int(args.k)
        sset = scaled_set(s, k, args.regime)
        sset_path = f"{stem}.scaledset.csv"
        with open(sset_path, "w", encoding="utf-8") as fh:
            fh.write(sset.to_csv())
        written.append(sset_path)
        if args.overlay_xi is not None or args.regime == "gumbel":
            overlay = limit_set(args.regime, args.overlay_xi)
            hausdorff = hausdorff_windowed(sset, overlay, window)

    if args.svg:
        from . import figures

        svg_path = f"{stem}.meplot.svg"
        comment = f"command: {' '.join(sys.argv)}"
        if hausdorff is not None:
            comment += f" | hausdorff={hausdorff!r} window={window.m!r}"
        figures.render_points(
            sset if sset is not None else plot,
            svg_path,
            title=f"{'Scaled set' if sset is not None else 'ME plot'}: {Path(args.input).name}",
            overlay=overlay,
            window=window if overlay is not None else None,
            comment=comment,
        )
        written.append(svg_path)

    for path in written:
        print(f"wrote {path}")
    if hausdorff is not None:
        print(f"hausdorff={hausdorff!r}")
    return 0


def cmd_classify(args) -> int:
    data = read_values(args.input)
    s = SortedSample(data)
    policy = None
    if args.exponents:
        policy = ThresholdPolicy(
            rule="power_span", exponents=tuple(float(a) for a in args.exponents.split(","))
        )
    estimate = classify_regime(s, policy)
    print(estimate.to_json())
    return 0 if estimate.conclusive else 2


def cmd_experiment(args) -> int:
    spec = load_experiment_config(args.config)
    stem = Path(args.out_dir) / Path(args.config).stem
    stem.parent.mkdir(parents=True, exist_ok=True)

    def progress(row):
        print(
            f"n={row.n} k={row.k} mean={row.mean:.6g} median={row.median:.6g} "
            f"exceedance={row.exceedance:.4g} failures={row.failures}"
        )

    report = run_experiment(spec, progress=progress)
    csv_path, json_path, svg_path = (
        f"{stem}.report.csv", f"{stem}.report.json", f"{stem}.report.svg",
    )
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    if not args.no_figure:
        from . import figures

        figures.render_report(
            report, svg_path, comment=f"command: {' '.join(sys.argv)} | seed={spec.seed}"
        )
        print(f"wrote {csv_path} {json_path} {svg_path}")
    else:
        print(f"wrote {csv_path} {json_path}")
    return 0


def cmd_selftest(args) -> int:
    """Quick oracle battery; fast deterministic checks only."""
    checks = []
    p = gpd_model(0.25, 1.0)
    checks.append(("gpd me closed vs numeric", abs(me_numeric(p, 1.0) - 5.0 / 3.0) < 1e-8))
    u = np.linspace(0.05, 0.95, 19)
    rt = np.max(np.abs(p.cdf(p.quantile(u)) - u))
    checks.append(("gpd quantile round trip", rt < 1e-12))
    s = sample(parse_model_spec("exp:mean=1"), 2000, seed=1)
    checks.append(("sampler determinism", np.array_equal(
        s.values, sample(parse_model_spec("exp:mean=1"), 2000, seed=1).values)))
    lim = limit_set("frechet", 0.5)
    ts = np.linspace(1.0, 3.0, 500)
    on_line = np.column_stack((ts, ts))
    d = hausdorff_windowed(on_line, lim, Window(3.0))
    checks.append(("hausdorff of on-limit points", d < 0.01))
    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}")
        ok = ok and passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meplot", description="Mean-excess plot diagnostics for extreme value analysis"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a distribution model to a file")
    g.add_argument("model", help="model spec, e.g. gpd:xi=0.5,beta=1")
    g.add_argument("-n", type=int, required=True, help="sample size")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--require-mean", action="store_true",
                   help="fail if the model has no finite mean")
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("meplot", help="ME plot and scaled-set artifacts from a data file")
    m.add_argument("input", help="CSV with one numeric column; '#' comments ignored")
    m.add_argument("--k", default="auto", help="threshold count, or 'auto' for ceil(n^0.45)")
    m.add_argument("--regime", choices=("frechet", "weibull", "gumbel"))
    m.add_argument("--window", type=float, default=5.0, help="truncation box size M")
    m.add_argument("--overlay-xi", type=float, help="shape for the limit-set overlay")
    m.add_argument("--seed", type=int, default=0, help="recorded in SVG metadata")
    m.add_argument("--svg", action="store_true", help="also render an SVG figure")
    m.set_defaults(func=cmd_meplot)

    c = sub.add_parser("classify", help="tail-regime verdict for a data file")
    c.add_argument("input")
    c.add_argument("--exponents", help="comma-separated k exponents, e.g. 0.45,0.55,0.65")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("experiment", help="run a Monte Carlo experiment from a TOML config")
    e.add_argument("config")
    e.add_argument("--out-dir", default=".")
    e.add_argument("--no-figure", action="store_true")
    e.set_defaults(func=cmd_experiment)

    t = sub.add_parser("selftest", help="quick internal oracle checks")
    t.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, MeplotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
