"""Command-line front end: ``optosqueeze modes|spectrum|xi|oracle``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (threshold
crossed, singular system, blow-up), 3 Monte Carlo oracle FAIL.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, OracleSettings, ScenarioConfig, load_config, parse_depths
from .eigenmodes import ModeError, NearCollinearError, compute_modes, critical_modulation
from .noise import PresetError, builtin_presets, get_preset, load_presets, thermal_force, xi_factor
from .params import BASELINE_PARAMS, ModulationParams, ParameterError
from .readout import SHOT_NOISE, output_psd
from .spectral import ThresholdError, quadrature_psd

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_ORACLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    return f"{v:.15g}"


def write_csv(path: Path, header_lines, columns: dict) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for row in data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    """``(header_lines, columns)`` from a file written by :func:`write_csv`."""
    header, names, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                header.append(line[1:].strip())
            elif names is None:
                names = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    data = np.array(rows)
    return header, {n: data[:, i] for i, n in enumerate(names)}


def _scenario(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else None
    if args.preset and args.model_given:
        raise ConfigError("--preset cannot be combined with --A/--g/--alpha")
    if cfg is None:
        if args.preset:
            cfg = ScenarioConfig(preset=get_preset(args.preset))
        else:
            cfg = ScenarioConfig(model=BASELINE_PARAMS)
    elif args.preset:
        cfg = cfg.replace(model=None, preset=get_preset(args.preset))
    if args.model_given:
        base = cfg.model or BASELINE_PARAMS
        changes = {k: getattr(args, k) for k in ("A", "g", "alpha") if getattr(args, k) is not None}
        cfg = cfg.replace(model=base.replace(**changes), preset=None)
    if getattr(args, "depths", None) is not None:
        cfg = cfg.replace(depths=parse_depths(args.depths))
    if getattr(args, "seed", None) is not None:
        o = cfg.oracle
        cfg = cfg.replace(oracle=OracleSettings(args.seed, o.runs, o.steps, o.dt, o.cutoff, o.workers))
    if args.out is not None:
        cfg = cfg.replace(out_dir=args.out)
    return cfg


def _out_dir(cfg: ScenarioConfig) -> Path:
    path = Path(cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------


def cmd_modes(args) -> int:
    cfg = _scenario(args)
    dp = cfg.dimensionless()
    modes = compute_modes(dp)
    verdict = "STABLE" if modes.stable else "UNSTABLE"
    lines = [f"A={dp.A:.6g} g={dp.g:.6g} alpha={dp.alpha:.6g}", f"verdict: {verdict}"]
    rows = []
    with np.errstate(all="ignore"):
        m_c = [2 * m.omega * m.gamma / abs(m.modulation_overlap) for m in modes.modes]
    for j, m in enumerate(modes.modes):
        lines.append(
            f"mode {j + 1}: omega={m.omega:.10g} gamma={m.gamma:.10g} Q={m.quality:.6g} "
            f"m_c={m_c[j]:.6g}\n  v=({m.mode_vector[0]:.6g}, {m.mode_vector[1]:.6g}) "
            f"Pi=({m.dual_vector[0]:.6g}, {m.dual_vector[1]:.6g})")
        rows.append((j + 1, m.omega, m.gamma, m.quality, m_c[j]))
    if not modes.stable:
        bad = [f"{s:.6g}" for s in modes.roots if s.imag > 0]
        lines.append("unstable roots (Im s > 0): " + ", ".join(bad))
    print("\n".join(lines))
    if args.out is not None:
        data = np.array(rows)
        write_csv(_out_dir(cfg) / "modes.csv", cfg.header_lines() + [f"verdict={verdict}"],
                  {"mode": data[:, 0], "omega": data[:, 1], "gamma": data[:, 2],
                   "Q": data[:, 3], "m_c": data[:, 4]})
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _scenario(args)
    dp = cfg.dimensionless()
    modes = compute_modes(dp)
    if not modes.stable:
        raise ThresholdError("the optomechanical system is unstable; no stationary spectrum")
    m_c = float(critical_modulation(modes)[0])
    phase = modes.squeezing_phase(0) if cfg.phase is None else cfg.phase
    depths = [d * m_c if cfg.depth_units == "fraction" else d for d in cfg.depths]
    if any(d > m_c for d in depths):
        raise ThresholdError(f"modulation depth above m_c = {m_c:.6g}: the difference "
                             "quadrature is beyond the parametric threshold")
    x = np.linspace(-cfg.half_width * modes[0].gamma, cfg.half_width * modes[0].gamma, cfg.points)
    thermal = thermal_force(cfg.preset, dp=cfg.targets) if cfg.thermal else None
    out = _out_dir(cfg)
    header = cfg.header_lines() + [f"m_c={m_c!r}", f"method={args.method}"]
    bare = ModulationParams(0.0, phase, cfg.pump_half_frequency)
    # G is exported in output shot-noise units, (2 kappa)^2 S_G / (1/2), so kappa cancels
    scale = (2.0 * dp.kappa) ** 2 / SHOT_NOISE
    g_unmod = quadrature_psd(modes, bare, x, thermal=thermal)[0]
    written = []
    for k, depth in enumerate(depths):
        mod = ModulationParams(depth, phase, cfg.pump_half_frequency)
        tag = f"d{k}_m{depth / m_c:.4f}"
        g = quadrature_psd(modes, mod, x, thermal=thermal)[0]
        a = output_psd(modes, mod, x, 0, method=args.method, thermal=thermal)
        h = header + [f"depth={depth!r}", f"depth_fraction={depth / m_c!r}", f"resolved_phase={phase!r}"]
        g_path, a_path = out / f"spectrum_G_{tag}.csv", out / f"spectrum_A_{tag}.csv"
        write_csv(g_path, h + ["quantity=PSD of G_1 times (2 kappa)^2 in shot-noise units"],
                  {"x": x, "S_G_plus": scale * g.S_plus, "S_G_minus": scale * g.S_minus,
                   "S_unmod": scale * g_unmod.S_plus})
        write_csv(a_path, h + ["quantity=output A_1 PSD normalized to shot noise"],
                  {"x": x, "S_A_plus": a.S_A_plus, "S_A_minus": a.S_A_minus, "S_unmod": a.S_unmod})
        written.append((depth / m_c, a, g_path, a_path))
        print(f"m/m_c={depth / m_c:.4f}: S_A+(0)={np.interp(0, x, a.S_A_plus):.6g} "
              f"S_A-(0)={np.interp(0, x, a.S_A_minus):.6g} "
              f"S_unmod(0)={np.interp(0, x, a.S_unmod):.6g} -> {g_path.name}, {a_path.name}")
    if args.plot:
        _plot(out / "spectrum_A.svg", x, written)
    return EXIT_OK


def _plot(path: Path, x, written) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise ConfigError("--plot needs matplotlib (pip install artifact[plot])") from None
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, written[0][1].S_unmod, color="k", lw=2, label="|m| = 0")
    for frac, a, _, _ in written:
        if frac == 0:
            continue
        line, = ax.plot(x, a.S_A_plus, label=f"A+  |m| = {frac:.2f} m_c")
        ax.plot(x, a.S_A_minus, ls="--", color=line.get_color(), label=f"A-  |m| = {frac:.2f} m_c")
    ax.set_yscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel("PSD / shot noise")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    print(f"plot -> {path}")


def cmd_xi(args) -> int:
    if args.presets_file:
        presets, coating = load_presets(args.presets_file)
        custom = True
    else:
        presets, coating = builtin_presets(), None
        custom = False
    names = list(presets) if not args.preset else [n.strip() for n in args.preset.split(",")]
    rows = []
    for name in names:
        if name not in presets:
            raise PresetError(f"unknown preset {name!r}; available: {', '.join(presets)}")
        preset = presets[name]
        if custom:
            preset = preset.replace(reference_xi=None)
        rows.append(xi_factor(preset, coating))
    show_ref = any(r.reference is not None for r in rows)
    head = f"{'preset':<8} {'xi':>10} {'f1 [Hz]':>10}"
    if show_ref:
        head += f" {'reference':>10} {'deviation':>10}"
    print(head)
    for r in rows:
        line = f"{r.preset:<8} {r.xi:10.4g} {r.mode_frequency_hz:10.4g}"
        if show_ref:
            ref = "-" if r.reference is None else f"{r.reference:.4g}"
            dev = "-" if r.deviation is None else f"{100 * r.deviation:+.1f}%"
            line += f" {ref:>10} {dev:>10}"
        print(line)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "xi.csv", "w") as fh:
            fh.write("# closure targets: " + f"A={BASELINE_PARAMS.A} g={BASELINE_PARAMS.g} alpha={BASELINE_PARAMS.alpha}\n")
            fh.write("preset,xi,f1_hz,reference\n")
            for r in rows:
                ref = "" if r.reference is None else _fmt(r.reference)
                fh.write(f"{r.preset},{_fmt(r.xi)},{_fmt(r.mode_frequency_hz)},{ref}\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import OracleConfig, crosscheck

    cfg = _scenario(args)
    o = cfg.oracle
    if cfg.depth_units != "fraction":
        raise ConfigError("oracle depths must be fractions of m_c")
    depths = tuple(cfg.depths) if args.depths is not None or args.config else (0.0, 0.5, 0.7)
    if any(d >= 1 for d in depths):
        raise ConfigError("oracle depths must be below m_c (stationary regime)")
    oc = OracleConfig(dp=cfg.dimensionless(), fractions=depths, seed=o.seed,
                      n_runs=args.runs or o.runs, n_steps=o.steps, dt=o.dt,
                      noise_cutoff=o.cutoff, workers=args.workers or o.workers,
                      corrupt_epsilon=args.corrupt_epsilon)
    print(f"# seed={oc.seed}")
    report = crosscheck(oc, with_ringdown=not args.no_ringdown)
    text = report.format()
    print(text)
    if args.out is not None:
        path = _out_dir(cfg) / "oracle_report.txt"
        path.write_text("\n".join("# " + h for h in cfg.header_lines()) + "\n" + text + "\n")
    return EXIT_OK if report.passed else EXIT_ORACLE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario INI file")
    common.add_argument("--preset", help="detector preset name (xi: comma-separated list)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--A", type=float, help="coupling A (overrides the config)")
    common.add_argument("--g", type=float, help="optical damping g")
    common.add_argument("--alpha", type=float, help="feedback alpha")

    parser = _Parser(prog="optosqueeze", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("modes", parents=[common], help="eigenfrequencies, dampings, m_c")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("spectrum", parents=[common], help="G and A spectra per depth (CSV)")
    p.add_argument("--depths", help="comma-separated depths (fractions of m_c by default)")
    p.add_argument("--method", choices=("modal", "exact"), default="modal",
                   help="slow-amplitude chain or harmonic-balance chain for A")
    p.add_argument("--plot", action="store_true", help="also write an SVG plot")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("xi", parents=[common], help="thermal/quantum factor per preset")
    p.add_argument("--presets-file", help="custom preset INI file")
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("oracle", parents=[common], help="Monte Carlo cross-check")
    p.add_argument("--depths", help="comma-separated fractions of m_c (default 0,0.5,0.7)")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    p.add_argument("--runs", type=int, help="independent runs per depth")
    p.add_argument("--workers", type=int, help="threads for independent runs")
    p.add_argument("--no-ringdown", action="store_true", help="skip the ring-down fit")
    p.add_argument("--corrupt-epsilon", action="store_true",
                   help="debug: flip the modulation coupling in the analytic side")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.model_given = any(getattr(args, k) is not None for k in ("A", "g", "alpha"))
    try:
        return args.func(args)
    except (ConfigError, ParameterError, PresetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ThresholdError, ArithmeticError, np.linalg.LinAlgError, ModeError,
            NearCollinearError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
