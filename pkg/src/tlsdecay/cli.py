"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
"""
import argparse
from importlib import resources
import json
import sys

from .config import scenario_from_dict, parse_scenario
from .dynamics import KINDS
from .errors import (ConfigValidationError, DegenerateCalibrationError, InvalidInputError,
                     TLSDecayError)
from .io import emit
from .runner import run_scenario
from .spectral import drude_lorentz, full_lorentzian, lrt_compatible

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def load_preset(name):
    text = resources.files("tlsdecay.presets").joinpath(f"{name}.json").read_text()
    return scenario_from_dict(json.loads(text))


def _global_options(suppress):
    # the same flags are accepted before and after the subcommand; SUPPRESS keeps
    # the subparser from clobbering a value given before it
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tolerance", type=float, default=default,
                   help="relative quadrature tolerance (default 1e-10)")
    p.add_argument("--grid-points", type=int, default=default,
                   help="number of grid points before refinement")
    p.add_argument("--seed", type=int, default=default,
                   help="reserved; the pipeline is deterministic and ignores it")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="tlsdecay", parents=[_global_options(False)],
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_options(True)
    run = sub.add_parser("run", parents=[common], help="run a JSON scenario")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the scenario)")
    fig2 = sub.add_parser("fig2", parents=[common], help="decay across all timescales, four models")
    fig2.add_argument("--models", nargs="+", choices=KINDS)
    fig2.add_argument("--out", default=None)
    sub.add_parser("fig1-demo", parents=[common], help="LRT compatibility of two line shapes")
    return parser


def fig1_table():
    rows = []
    for label, spec in (("full Lorentzian", full_lorentzian(10.0, 2.0)),
                        ("Drude-Lorentz", drude_lorentz(10.0, 2.0))):
        verdicts = [lrt_compatible(spec.scaled(a)) for a in (1.0, 1e-3, 1e3)]
        stable = len({v.compatible for v in verdicts}) == 1
        rows.append((label, verdicts[0].compatible, verdicts[0].leakage, stable))
    return rows


def _print_fig1(rows, stream):
    print(f"{'spectrum':<16} {'LRT':<12} {'leakage':>12}  rescaling", file=stream)
    for label, ok, leak, stable in rows:
        verdict = "compatible" if ok else "incompatible"
        print(f"{label:<16} {verdict:<12} {leak:12.4e}  {'stable' if stable else 'UNSTABLE'}",
              file=stream)


def _run(cfg, out, windows, stream):
    bundle = run_scenario(cfg)
    paths = emit(bundle, directory=out, windows=windows)
    st = bundle.stationary
    print(f"Gamma_stat={st['gamma_stat']:.10g} dw_stat={st['dw_stat']:.10g} "
          f"t1={st['t1']:.10g} t2={st['t2']:.10g}", file=stream)
    for n in bundle.all_notices:
        print(f"warning: {n.message} (module={n.module}, model={n.model}, t={n.t})", file=sys.stderr)
    print(f"wrote {len(paths)} files to {paths[0].parent}", file=stream)


def main(argv=None, stream=None):
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    overrides = {"tolerance": getattr(args, "tolerance", None),
                 "grid_points": getattr(args, "grid_points", None)}
    try:
        if args.command == "fig1-demo":
            _print_fig1(fig1_table(), stream)
            return EXIT_OK
        if args.command == "run":
            cfg = parse_scenario(args.config).with_overrides(directory=args.out, **overrides)
            _run(cfg, None, False, stream)
        else:
            cfg = load_preset("fig2").with_overrides(models=args.models, directory=args.out,
                                                     **overrides)
            _run(cfg, None, True, stream)
    except (ConfigValidationError, InvalidInputError, DegenerateCalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TLSDecayError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
