"""
Command-line interface.

Exit codes: 0 success, 1 domain error (e.g. photon energy below threshold,
unreadable input), 2 usage error, 3 validation failure.
"""

import argparse
import sys
import time

import numpy as np

from . import fit as fitting
from . import model as m
from . import oracles
from . import sweep as sw
from .units import ev_to_hartree, hartree_to_ev

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2, 3


def _unit_interval(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return value


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _non_negative(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _count(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {text}")
    return value


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def _common():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="FILE", help="key = value file; command-line flags override it")
    parent.add_argument("--eb-ev", type=_positive, default=m.H_MINUS_AFFINITY_EV,
                        help="binding energy E_b of H- (eV)")
    return parent


def _wall(parser, k=1.0, mu=2.0):
    parser.add_argument("--k", type=_unit_interval, default=k, help="reflection parameter K in [0, 1]")
    parser.add_argument("--mu", type=float, default=mu, help="reflection phase index mu (phase mu*pi/2)")
    parser.add_argument("--d-bohr", type=_positive, default=100.0, help="ion-wall distance d (bohr)")


def _output(parser):
    parser.add_argument("--output", "-o", default="-", metavar="PATH", help="output file ('-' for stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="photodetach",
        description="Photodetachment of H- near a partially reflecting wall.",
        formatter_class=_Formatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    common = _common()

    p = sub.add_parser("sigma", parents=[common], formatter_class=_Formatter,
                       help="cross sections at one energy (CSV row)")
    energy = p.add_mutually_exclusive_group(required=True)
    energy.add_argument("--eph-ev", type=float, help="photon energy E_ph (eV)")
    energy.add_argument("--e-au", type=float, help="detached-electron energy E (hartree)")
    _wall(p)
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("modulation", parents=[common], formatter_class=_Formatter,
                       help="modulation function A(u) at given actions")
    p.add_argument("--u", type=_non_negative, nargs="+", required=True, help="action u = 2 d sqrt(2E) (dimensionless)")
    p.add_argument("--k", type=_unit_interval, default=1.0, help="reflection parameter K in [0, 1]")
    p.add_argument("--mu", type=float, default=2.0, help="reflection phase index mu")
    p.set_defaults(func=cmd_modulation)

    p = sub.add_parser("flux-screen", parents=[common], formatter_class=_Formatter,
                       help="screen flux j_z(rho) table")
    p.add_argument("--preset", choices=["fig4"], help="reproduce the fig4 dataset (ignores wall flags)")
    p.add_argument("--eph-ev", type=float, default=sw.FIG4_PHOTON_EV, help="photon energy E_ph (eV)")
    _wall(p)
    p.add_argument("--l-bohr", type=_positive, default=sw.FIG4_SCREEN_DISTANCE, help="wall-screen distance L (bohr)")
    p.add_argument("--rho-max", type=_positive, default=sw.FIG4_RHO_RANGE[1], help="largest screen radius (bohr)")
    p.add_argument("--count", type=_count, default=sw.FIG4_RHO_RANGE[2], help="number of rho samples")
    p.add_argument("--workers", type=int, default=1, help="threads used for evaluation")
    _output(p)
    p.set_defaults(func=cmd_flux_screen)

    p = sub.add_parser("sweep", parents=[common], formatter_class=_Formatter,
                       help="parameter sweep to CSV")
    p.add_argument("--preset", choices=sw.PRESETS, help="figure dataset preset (ignores sweep flags)")
    p.add_argument("--variable", choices=sw.VARIABLES, default="E_ph_eV", help="swept quantity (u, eV or bohr)")
    p.add_argument("--start", type=float, help="first swept value (units of --variable)")
    p.add_argument("--stop", type=float, help="last swept value (units of --variable)")
    p.add_argument("--count", type=_count, default=200, help="number of sweep points")
    p.add_argument("--outputs", default="sigma_total,A",
                   help=f"comma-separated quantities from {','.join(sw.QUANTITY_COLUMNS)}")
    _wall(p)
    p.add_argument("--eph-ev", type=float, help="photon energy for rho_bohr sweeps (eV)")
    p.add_argument("--l-bohr", type=_positive, default=sw.FIG4_SCREEN_DISTANCE, help="wall-screen distance L (bohr)")
    p.add_argument("--workers", type=int, default=1, help="threads used for evaluation")
    _output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[common], formatter_class=_Formatter,
                       help="compare closed forms against quadrature oracles")
    p.add_argument("--grid", choices=sorted(oracles.GRIDS), default="full", help="parameter grid")
    p.add_argument("--tol", type=_positive, default=None,
                   help="relative tolerance for every check; unset means per check: "
                   + ", ".join(f"{k} {v:g}" for k, v in oracles.CHECK_TOLERANCES.items()))
    p.add_argument("--report", default="-", metavar="PATH", help="CSV report destination ('-' for stdout)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", parents=[common], formatter_class=_Formatter,
                       help="synthesize a spectrum CSV (E_ph_eV,sigma_au)")
    _wall(p, k=0.7, mu=1.5)
    p.add_argument("--eph-min", type=float, default=None, help="first photon energy (eV; default E_b + 0.01)")
    p.add_argument("--eph-max", type=float, default=None, help="last photon energy (eV; default E_b + 1.0)")
    p.add_argument("--count", type=int, default=200, help="number of samples")
    p.add_argument("--noise", type=_non_negative, default=0.0, help="relative Gaussian noise width")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    _output(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", parents=[common], formatter_class=_Formatter,
                       help="fit K, mu (and d) to a spectrum CSV")
    p.add_argument("--input", "-i", default="-", metavar="PATH", help="spectrum CSV ('-' for stdin)")
    p.add_argument("--d-bohr", type=_positive, default=None, help="known ion-wall distance d (bohr)")
    p.add_argument("--fit-d", action="store_true", help="fit the wall distance as well")
    p.add_argument("--d-min", type=_positive, default=50.0, help="lower bound on d when fitting (bohr)")
    p.add_argument("--d-max", type=_positive, default=500.0, help="upper bound on d when fitting (bohr)")
    p.add_argument("--format", choices=["kv", "csv"], default="kv", help="key = value block or CSV header + row")
    p.set_defaults(func=cmd_fit)
    return parser


def _config_path(argv):
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def _apply_config(parser, argv, path):
    """Install values from a --config file as subcommand defaults so explicit flags win."""
    choices = parser._subparsers._group_actions[0].choices
    command = next((token for token in argv if token in choices), None)
    if command is None:
        return
    subparser = choices[command]
    config = sw.read_config(path)
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in config.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            subparser.error(f"unknown config key {key!r} in {path}")
        if action.const is True and action.nargs == 0:
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        convert = action.type or str
        try:
            if action.nargs in ("+", "*"):
                defaults[key] = [convert(v) for v in raw.split()]
            else:
                defaults[key] = convert(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            subparser.error(f"config key {key!r}: {exc}")
        if action.choices is not None and defaults[key] not in action.choices:
            subparser.error(f"config key {key!r}: invalid choice {raw!r}")
    for action in subparser._actions:
        if action.dest in defaults:
            action.required = False
            action.default = defaults[action.dest]
    for group in subparser._mutually_exclusive_groups:
        if any(a.dest in defaults for a in group._group_actions):
            group.required = False


def _ion(args):
    return m.IonModel(binding_energy=ev_to_hartree(args.eb_ev))


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline="\n"), True
    except OSError as exc:
        raise OSError(f"cannot open {path} for writing: {exc}") from exc


def _surface(args):
    return m.SurfaceModel(args.k, args.mu, args.d_bohr)


def cmd_sigma(args):
    ion = _ion(args)
    surface = _surface(args)
    if args.e_au is not None:
        E = args.e_au
        photon_ev = hartree_to_ev(E + ion.binding_energy)
    else:
        photon_ev = args.eph_ev
        E = ev_to_hartree(photon_ev) - ion.binding_energy
    if not E > 0:
        raise m.DomainError(
            f"photon energy {photon_ev:g} eV is below detachment threshold {args.eb_ev:g} eV"
        )
    u = m.action(surface, E)
    row = {
        "E_ph_eV": photon_ev,
        "E_au": E,
        "u": u,
        "sigma0_au": m.sigma0(ion, E),
        "sigma1_au": m.sigma1(ion, surface, E),
        "sigma2_au": m.sigma2(ion, surface, E),
        "sigma_total_au": m.sigma_total(ion, surface, E),
        "A": m.modulation(u, surface),
    }
    print(",".join(row))
    print(",".join(sw.format_value(v) for v in row.values()))
    return EXIT_OK


def cmd_modulation(args):
    u = np.asarray(args.u, dtype=float)
    print("u,K,mu,A1,A")
    a1 = np.atleast_1d(m.a1(u, args.mu))
    A = np.atleast_1d(m.modulation_function(u, args.k, args.mu))
    for row in zip(u, np.full(u.size, args.k), np.full(u.size, args.mu), a1, A):
        print(",".join(sw.format_value(v) for v in row))
    return EXIT_OK


def _write(table, path):
    out, close = _open_out(path)
    try:
        sw.write_table(table, out)
    finally:
        if close:
            out.close()


def cmd_flux_screen(args):
    if args.preset:
        spec = sw.preset(args.preset, _ion(args))
    else:
        spec = sw.SweepSpec(
            "rho_bohr", 0.0, args.rho_max, args.count, (_surface(args),), ("j_z",), _ion(args),
            geometry=m.ScreenGeometry(args.l_bohr), photon_ev=args.eph_ev,
        )
    _write(sw.run_sweep(spec, workers=args.workers), args.output)
    return EXIT_OK


def cmd_sweep(args):
    ion = _ion(args)
    if args.preset:
        spec = sw.preset(args.preset, ion)
    else:
        if args.start is None or args.stop is None:
            raise sw.SweepError("start/stop: both --start and --stop are required without --preset")
        outputs = tuple(q.strip() for q in args.outputs.split(",") if q.strip())
        spec = sw.SweepSpec(
            args.variable, args.start, args.stop, args.count, (_surface(args),), outputs, ion,
            geometry=m.ScreenGeometry(args.l_bohr) if args.variable == "rho_bohr" else None,
            photon_ev=args.eph_ev,
        )
    _write(sw.run_sweep(spec, workers=args.workers), args.output)
    return EXIT_OK


def cmd_validate(args):
    start = time.perf_counter()
    results = oracles.run_validation(args.grid, ion=_ion(args), tol=args.tol)
    elapsed = time.perf_counter() - start
    out, close = _open_out(args.report)
    try:
        out.write(oracles.format_report(results))
    finally:
        if close:
            out.close()
    summary = oracles.summarize(results)
    status = "all checks passed" if not summary.failed else f"{summary.failed} checks FAILED"
    print(f"validate: {summary.total} checks, {status} ({elapsed:.2f} s)", file=sys.stderr)
    return EXIT_VALIDATION if summary.failed else EXIT_OK


def cmd_synth(args):
    ion = _ion(args)
    lo = args.eb_ev + 0.01 if args.eph_min is None else args.eph_min
    hi = args.eb_ev + 1.0 if args.eph_max is None else args.eph_max
    spectrum = fitting.synthesize_spectrum(
        ion, _surface(args), np.linspace(lo, hi, args.count), args.noise, args.seed
    )
    out, close = _open_out(args.output)
    try:
        fitting.write_spectrum(spectrum, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_fit(args):
    if not args.fit_d and args.d_bohr is None:
        raise sw.SweepError("d-bohr: give the known --d-bohr or use --fit-d")
    ion = _ion(args)
    source = sys.stdin if args.input == "-" else args.input
    spectrum = fitting.read_spectrum(source, ion)
    bounds = fitting.FitBounds(wall_distance=(args.d_min, args.d_max))
    result = fitting.fit_surface(spectrum, ion, fit_d=args.fit_d, wall_distance=args.d_bohr, bounds=bounds)
    if args.format == "kv":
        sys.stdout.write(result.to_text())
    else:
        print(result.csv_header())
        print(result.to_csv_row())
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    path = _config_path(argv)
    if path is not None:
        try:
            _apply_config(parser, argv, path)
        except (OSError, ValueError) as exc:
            print(f"photodetach: cannot read config: {exc}", file=sys.stderr)
            return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except sw.SweepError as exc:
        print(f"photodetach {args.command}: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"photodetach {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

if __name__ == "__main__":
    sys.exit(main())
