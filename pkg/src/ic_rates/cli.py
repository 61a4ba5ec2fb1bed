"""Command-line interface.

Subcommands map one-to-one onto the library surface: ``mi`` for a single
information term, ``region`` for constraint values, ``optimize-rotation``,
``vsi`` for the very-strong threshold, ``sweep`` for CSV campaigns.  All
powers enter in dB here and are converted once at the boundary; everything
below the CLI works in linear units.

Exit codes: 0 on success, 1 on usage or configuration errors, 2 on numerical
failures (no threshold found, estimator sanity checks tripped).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

from .constellation import UnsupportedAlphabetError, periodicity
from .mi import EstimatorConfig, mi_cross, mi_joint, mi_joint_direct, mi_single
from .region import (
    ChannelConfig,
    Topology,
    finite_region,
    gaussian_region,
    max_sum_rate,
    receiver_model,
)
from .rotation import optimize_rotation
from .sweep import SweepConfigError, resolve_alphabet, run_sweep, spec_from_json
from .vsi import NoThresholdError, ThresholdQuery, find_threshold

_TOPOLOGIES = {"2ic": Topology.TWO_IC, "two_ic": Topology.TWO_IC,
               "zic": Topology.Z_IC, "z_ic": Topology.Z_IC}

_GNUPLOT_HINT = """\
# gnuplot recipe for a sweep table (sum rate against |h|):
set datafile separator ','
set key autotitle columnhead
set xlabel '|h|'
set ylabel 'sum rate [bit/channel use]'
plot '{path}' skip 1 using 4:12 with linespoints title 'sum rate'
# column map: 3=P_dB 4=h_abs 5=psi 6=phi 12=sum_rate_bits; filter rows by
# P_dB/psi first (e.g. with awk) when the sweep holds several curves.
"""


def _estimator_from_args(args) -> EstimatorConfig:
    return EstimatorConfig(
        method=args.method,
        samples=args.samples,
        quadrature_order=args.quad_order,
        seed=args.seed,
    )


def _channel_from_args(args) -> ChannelConfig:
    return ChannelConfig(
        topology=_TOPOLOGIES[args.topology],
        h_abs=args.h_abs,
        psi=args.psi,
        phi=getattr(args, "phi", 0.0),
        power=10.0 ** (args.power_db / 10.0),
    )


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_mi(args) -> int:
    cfg = _estimator_from_args(args)
    ch = _channel_from_args(args)
    alphabet = resolve_alphabet(args.alphabet)
    if args.term == "cond":
        est = mi_single(alphabet, math.sqrt(ch.power), cfg)
    else:
        model = receiver_model(ch, alphabet, args.receiver)
        op = {"cross": mi_cross, "joint": mi_joint, "joint-direct": mi_joint_direct}[args.term]
        est = op(model, cfg)
    _emit(
        {
            "term": args.term,
            "receiver": args.receiver,
            "bits": est.bits,
            "std_error": est.std_error,
            "method": est.method.value,
            "samples_used": est.samples_used,
        },
        args,
    )
    return 0


def _cmd_region(args) -> int:
    power = 10.0 ** (args.power_db / 10.0)
    if args.alphabet == "gaussian":
        region = gaussian_region(args.h_abs, power, _TOPOLOGIES[args.topology])
    else:
        ch = _channel_from_args(args)
        region = finite_region(ch, resolve_alphabet(args.alphabet), _estimator_from_args(args))
    payload = {
        "topology": region.topology.value,
        "source": region.source,
        "r1_max": region.r1_max,
        "r2_max": region.r2_max,
        "sum_rx1": region.sum_rx1,
    }
    if region.sum_rx2 is not None:
        payload["sum_rx2"] = region.sum_rx2
    payload["max_sum_rate"] = max_sum_rate(region)
    _emit(payload, args)
    return 0


def _cmd_optimize_rotation(args) -> int:
    ch = _channel_from_args(args)
    alphabet = resolve_alphabet(args.alphabet)
    step = periodicity(alphabet) / args.grid_points
    result = optimize_rotation(
        ch, alphabet, grid_step=step, cfg=_estimator_from_args(args),
        refine=not args.no_refine,
    )
    payload = {
        "phi_star": result.phi_star,
        "objective_bits": result.objective_bits,
        "objective_kind": result.objective_kind.value,
        "grid_step": result.grid_step,
        "grid_points": len(result.per_grid_values),
    }
    if args.out:
        lines = ["phi,i_cross_rx1,i_cross_rx2"]
        for phi, i1, i2 in result.per_grid_values:
            third = "" if i2 is None else format(i2, ".12g")
            lines.append(f"{phi:.12g},{i1:.12g},{third}")
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        payload["trace"] = args.out
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_vsi(args) -> int:
    power = 10.0 ** (args.power_db / 10.0)
    alphabet = None if args.alphabet == "gaussian" else resolve_alphabet(args.alphabet)
    query = ThresholdQuery(
        power=power,
        alphabet=alphabet,
        psi=args.psi,
        rotation_enabled=args.rotation == "on",
        tolerance_h=args.tolerance_h,
        mi_tolerance=args.mi_tolerance,
        topology=_TOPOLOGIES[args.topology],
    )
    result = find_threshold(query, _estimator_from_args(args))
    _emit(
        {
            "h_vsi": result.h_vsi,
            "bracket": list(result.bracket),
            "evaluations": result.evaluations,
            "gaussian_reference": result.gaussian_reference,
        },
        args,
    )
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        spec = spec_from_json(json.load(fh))
    if args.out:
        spec = replace(spec, output=args.out)
    if not spec.output:
        raise SweepConfigError("no output path: set 'output' in the config or pass --out")
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    records = run_sweep(
        spec,
        use_cache=not args.no_cache,
        cache_dir=args.cache_dir,
        workers=args.workers,
    )
    sys.stdout.write(f"wrote {len(records)} records to {spec.output}\n")
    if args.gnuplot_hint:
        sys.stdout.write(_GNUPLOT_HINT.format(path=spec.output))
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    parser.add_argument("--method", choices=["mc", "quad"], default="mc",
                        help="estimator backend (default mc)")
    parser.add_argument("--samples", type=int, default=20000,
                        help="Monte Carlo draws per expectation term")
    parser.add_argument("--quad-order", type=int, default=24,
                        help="Gauss-Hermite order per real dimension")
    parser.add_argument("--out", default=None, help="write output here instead of stdout")


def _add_channel(parser: argparse.ArgumentParser, with_phi: bool = True) -> None:
    parser.add_argument("--topology", choices=sorted(_TOPOLOGIES), default="2ic")
    parser.add_argument("--alphabet", default="qam4",
                        help="qam4 / qam16 / qam64 (region and vsi also take 'gaussian')")
    parser.add_argument("--power-db", type=float, required=True,
                        help="transmit power in dB")
    parser.add_argument("--h-abs", type=float, default=1.0, help="cross-channel magnitude |h|")
    parser.add_argument("--psi", type=float, default=0.0, help="cross-channel phase [rad]")
    if with_phi:
        parser.add_argument("--phi", type=float, default=0.0,
                            help="transmitter rotation of user 2 [rad]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ic-rates",
        description="Finite-alphabet achievable rates for two-user interference channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mi", help="one mutual-information term")
    _add_channel(p)
    _add_common(p)
    p.add_argument("--term", choices=["cond", "cross", "joint", "joint-direct"],
                   default="cross")
    p.add_argument("--receiver", type=int, choices=[1, 2], default=1)
    p.set_defaults(func=_cmd_mi)

    p = sub.add_parser("region", help="rate-region constraint values as JSON")
    _add_channel(p)
    _add_common(p)
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("optimize-rotation", help="best transmitter rotation")
    _add_channel(p, with_phi=False)
    _add_common(p)
    p.add_argument("--grid-points", type=int, default=64,
                   help="coarse grid points per rotation period")
    p.add_argument("--no-refine", action="store_true",
                   help="skip the refinement pass around the grid winner")
    p.set_defaults(func=_cmd_optimize_rotation, phi=0.0)

    p = sub.add_parser("vsi", help="very-strong-interference threshold on |h|")
    _add_channel(p, with_phi=False)
    _add_common(p)
    p.add_argument("--rotation", choices=["off", "on"], default="off")
    p.add_argument("--tolerance-h", type=float, default=1e-2)
    p.add_argument("--mi-tolerance", type=float, default=0.01)
    p.set_defaults(func=_cmd_vsi, method="quad", phi=0.0)

    p = sub.add_parser("sweep", help="run a JSON-configured sweep to CSV")
    p.add_argument("--config", required=True, help="sweep spec (JSON)")
    p.add_argument("--out", default=None, help="override the config output path")
    p.add_argument("--seed", type=int, default=None,
                   help="override the base seed from the config")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--cache-dir", default=None,
                   help="cache directory (default $IC_RATES_CACHE or ~/.cache/ic-rates)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--gnuplot-hint", action="store_true",
                   help="print a plotting recipe for the emitted CSV")
    p.set_defaults(func=_cmd_sweep)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except (NoThresholdError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UnsupportedAlphabetError, SweepConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
