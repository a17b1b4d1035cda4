"""Command-line entry point.

    condpattern simulate scan|bell-scan [--config F] [--theta-deg X] [--seed N] [--noise on|off] --out F
    condpattern fit gaussian|double-slit|fringe --in F --out F [--config F]
    condpattern analyze visibility --in F [--x-min X --x-max X]
    condpattern analyze chsh (--visibility V | --in F) [--gamma G] [--config F]
    condpattern reproduce fig2|fig3|fig4|fig5|fig6 --outdir D [--seed N] [--noise on|off]

Exit codes: 0 success, 1 invalid input or configuration, 2 fit did not converge.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import bell, io
from .coincidence import scan_signal, scan_waveplate
from .config import RunConfig, load_config, with_overrides
from .errors import InvalidInput, InvalidState
from .fitting import FitModel, fit, visibility_from_fit, visibility_raw
from .geometry import sinc_aperture
from .reproduce import FIGURES, reproduce_figure

EXIT_OK, EXIT_INPUT, EXIT_NOCONV = 0, 1, 2
FIT_KINDS = {"gaussian": "gaussian", "double-slit": "double_slit", "fringe": "fringe"}


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _config(args) -> RunConfig:
    return load_config(args.config) if getattr(args, "config", None) else RunConfig()


def _out_path(args, cfg: RunConfig) -> Path:
    out = args.out or cfg.output
    if not out:
        raise InvalidInput("no output path: pass --out or set \"output\" in the config")
    return Path(out)


def cmd_simulate(args) -> int:
    cfg = with_overrides(_config(args), theta_deg=args.theta_deg, seed=args.seed, noise=args.noise)
    if args.what == "scan":
        pattern = scan_signal(cfg.layout, cfg.state(), cfg.scan, cfg.gamma)
    else:
        bs = cfg.bell_scan
        x = bs.x_fixed if args.x_mm is None else args.x_mm
        pattern = scan_waveplate(cfg.layout, cfg.state(), x, bs.grid(), bs.shots_scale,
                                 noise=cfg.scan.noise, seed=cfg.scan.seed, gamma=cfg.gamma,
                                 slit_samples=bs.slit_samples)
    io.write_pattern(_out_path(args, cfg), pattern)
    return EXIT_OK


def cmd_fit(args) -> int:
    data = io.read_pattern(args.inp)
    kind = FIT_KINDS[args.kind]
    aperture = sinc_aperture(_config(args).layout) if kind == "double_slit" else 1.0
    model = FitModel(kind, aperture=aperture)
    result = fit(model, data)
    io.write_json(args.out, io.fit_result_to_dict(result, model))
    if not result.converged:
        print(f"fit did not converge after {result.iterations} iterations", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.what == "visibility":
        if args.inp is None:
            raise InvalidInput("analyze visibility needs --in")
        window = None
        if args.x_min is not None or args.x_max is not None:
            window = (-math.inf if args.x_min is None else args.x_min,
                      math.inf if args.x_max is None else args.x_max)
        out = {"visibility": visibility_raw(io.read_pattern(args.inp), window)}
    else:
        if (args.visibility is None) == (args.inp is None):
            raise InvalidInput("analyze chsh needs exactly one of --visibility or --in")
        if args.visibility is not None:
            v = args.visibility
        else:
            model = FitModel("fringe")
            res = fit(model, io.read_pattern(args.inp))
            v = visibility_from_fit(res, model)
        s_vis, violated = bell.chsh_from_visibility(v)
        cfg = _config(args)
        gamma = v if args.gamma is None else args.gamma
        s_state = bell.chsh_from_state(cfg.alpha, cfg.beta, 0.0, gamma)
        out = {"visibility": v, "gamma": gamma, "S_visibility": s_vis, "S_state": s_state, "violated": violated}
    sys.stdout.write(io.dumps(out))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = _config(args)
    rep = reproduce_figure(args.fig, cfg, noise=args.noise, seed=args.seed)
    outdir = Path(args.outdir)
    io.write_pattern(outdir / f"{args.fig}.csv", rep.pattern)
    io.write_json(outdir / f"{args.fig}_fit.json", io.fit_result_to_dict(rep.result, rep.model))
    io.write_json(outdir / f"{args.fig}_summary.json", rep.summary)
    return EXIT_OK if rep.result.converged else EXIT_NOCONV


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condpattern", description="Two-crystal conditional interference toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a detector or waveplate scan")
    sim.add_argument("what", choices=("scan", "bell-scan"))
    sim.add_argument("--config")
    sim.add_argument("--theta-deg", type=float)
    sim.add_argument("--x-mm", type=float, help="detector position for bell-scan")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--noise", type=_on_off)
    sim.add_argument("--out")
    sim.set_defaults(func=cmd_simulate)

    ft = sub.add_parser("fit", help="fit a pattern CSV")
    ft.add_argument("kind", choices=tuple(FIT_KINDS))
    ft.add_argument("--in", dest="inp", required=True)
    ft.add_argument("--out", required=True)
    ft.add_argument("--config", help="layout used to pin the double-slit envelope")
    ft.set_defaults(func=cmd_fit)

    an = sub.add_parser("analyze", help="visibility and CHSH figures of merit")
    an.add_argument("what", choices=("visibility", "chsh"))
    an.add_argument("--in", dest="inp")
    an.add_argument("--x-min", type=float)
    an.add_argument("--x-max", type=float)
    an.add_argument("--visibility", type=float)
    an.add_argument("--gamma", type=float, help="coherence for the state-based CHSH value (default: the visibility)")
    an.add_argument("--config")
    an.set_defaults(func=cmd_analyze)

    rp = sub.add_parser("reproduce", help="simulate, fit and summarize a published figure")
    rp.add_argument("fig", choices=FIGURES)
    rp.add_argument("--outdir", required=True)
    rp.add_argument("--config")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--noise", type=_on_off, default=False)
    rp.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, InvalidState) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
