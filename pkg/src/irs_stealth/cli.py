"""Command-line entry point: ``irs-stealth {solve,simulate,sweep,table,validate}``.

Exit codes: 0 success, 1 configuration error, 2 solver failure, 3 I/O error.
"""

import argparse
from dataclasses import replace
import json
import logging
import math
import sys

import numpy as np

from . import config as cfgmod
from .channel import build_channels
from .detection import detection_probability, empirical_snr, snr_full, synthesize_block
from .exceptions import ConfigError, SolverError
from .geometry import AnglePair
from .harness import build_lookup_table, emit_csv, emit_plot, run_sweep
from .optimizer import SolverOptions, baseline_reflection, solve_kkt
from .surface import build_echo_coefficients

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("irs_stealth")


def _parse_angles(text):
    try:
        az, el = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"--angles expects 'azimuth,elevation' in degrees, got {text!r}") from None
    return AnglePair.from_degrees(az, el)


def _load(args):
    loaded = cfgmod.load_config(args.config)
    if getattr(args, "angles", None):
        angles = _parse_angles(args.angles)
        loaded = replace(loaded, surface_angles=angles, radar_angles=angles)
    return loaded


def cmd_solve(args):
    loaded = _load(args)
    ch = build_channels(loaded.geometry(), loaded.layout, loaded.radar.shape)
    coeffs = build_echo_coefficients(ch.a_irs, ch.a_ewam, loaded.ewam_profile())
    print(json.dumps(solve_kkt(coeffs).to_dict(), indent=2))
    return EXIT_OK


def cmd_simulate(args):
    loaded = _load(args)
    ewam = loaded.ewam_profile()
    ch = build_channels(loaded.geometry(), loaded.layout, loaded.radar.shape)
    coeffs = build_echo_coefficients(ch.a_irs, ch.a_ewam, ewam)
    mode = cfgmod.METHODS[loaded.method]
    state = baseline_reflection(coeffs, mode, np.random.default_rng([loaded.seed, 2]))
    snr = snr_full(ch, state, ewam, loaded.radar.noise_variance)
    out = {
        "snr": snr,
        "snr_db": 10 * math.log10(snr) if snr > 0 else float("-inf"),
        "p_d": detection_probability(snr, loaded.radar.p_fa),
        "p_fa": loaded.radar.p_fa,
        "method": loaded.method,
        "scenario": {
            "layout": {"n_x": loaded.layout.n_x, "n_z": loaded.layout.n_z, "n_irs": loaded.layout.n_irs,
                       "n_ewam": loaded.layout.n_ewam},
            "radar": {"m_x": loaded.radar.shape.m_x, "m_z": loaded.radar.shape.m_z,
                      "noise_variance": loaded.radar.noise_variance, "samples": loaded.radar.samples},
            "surface_angles_deg": [math.degrees(loaded.surface_angles.azimuth),
                                   math.degrees(loaded.surface_angles.elevation)],
            "distance": loaded.scenario.distance,
            "ewam_p": loaded.ewam_p,
            "seed": loaded.seed,
        },
    }
    if args.blocks:
        rng = np.random.default_rng([loaded.seed, 3])
        blocks = [synthesize_block(ch, state, ewam, loaded.radar, "H1", rng) for _ in range(args.blocks)]
        out["empirical_snr"] = empirical_snr(blocks, loaded.radar.noise_variance)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_sweep(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.figure is not None:
        cfg = cfgmod.figure_config(args.figure, **overrides)
    else:
        cfg = cfgmod.load_config(args.config).experiment
        if overrides:
            cfg = replace(cfg, **overrides)
    result = run_sweep(cfg)
    for value, msg in result.errors.items():
        log.warning("grid point %s failed: %s", value, msg)
    emit_csv(result, args.out_csv)
    if args.out_svg:
        emit_plot(result, args.out_svg)
    return EXIT_OK


def cmd_table(args):
    loaded = _load(args)
    step = loaded.experiment.angle_step_deg
    table = build_lookup_table(loaded.layout, loaded.ewam_profile(), step,
                               metadata={"p": loaded.ewam_p, "psi_seed": loaded.seed})
    table.save(args.out)
    print(f"wrote {len(table)} entries to {args.out}")
    return EXIT_OK


def cmd_validate(args):
    from .crosscheck import run_all

    ok = True
    for name, passed, detail in run_all():
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_SOLVER


def build_parser():
    parser = argparse.ArgumentParser(prog="irs-stealth", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the proposed design for one snapshot")
    p.add_argument("--config", required=True)
    p.add_argument("--angles", help="surface azimuth,elevation in degrees")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="received SNR and detection probability")
    p.add_argument("--config", required=True)
    p.add_argument("--angles", help="surface azimuth,elevation in degrees")
    p.add_argument("--blocks", type=int, default=0, help="also report an empirical SNR over N blocks")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV (and SVG)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--figure", type=int, choices=sorted(cfgmod.FIGURES))
    src.add_argument("--config")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="offline azimuth -> reflection lookup table")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("validate", help="run the oracle cross-checks")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
