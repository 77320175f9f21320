"""``dimerdg`` command line: converge, simulate, kink, energy-audit."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from . import experiments as ex
from .operator import UnstableFluxError

# flag dest -> RunConfig field
FLAG_FIELDS = {
    "problem": "problem",
    "flux": "flux",
    "tfinal": "t_final",
    "cfl": "cfl",
    "dt": "dt",
    "bc": "bc",
    "out": "out",
    "seed_profile": "seed_profile",
    "init": "init",
    "norm": "norm",
    "snapshot_every": "snapshot_every",
    "energy_every": "energy_every",
    "box": "box",
    "speed": "speed",
    "z0": "z0",
    "domain": "domain",
    "h": "h",
    "seed": "seed",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; explicit flags take precedence")
    common.add_argument("--problem", choices=["example1", "example2", "kink", "bump", "random"])
    common.add_argument("--flux", help="upwind | central | mixed-upwind | mixed-central | custom:a1,a2,b1,b2")
    common.add_argument("--q", help="degree (converge accepts a comma list)")
    common.add_argument("--cells", help="number of elements (converge accepts a comma list)")
    common.add_argument("--tfinal", type=float)
    common.add_argument("--cfl", type=float, help="dt = cfl * h")
    common.add_argument("--dt", type=float, help="fixed time step (wins over --cfl)")
    common.add_argument("--bc", choices=["periodic", "dirichlet"])
    common.add_argument("--out", help="output directory")
    common.add_argument("--allow-unstable", action="store_true", default=None,
                        help="accept flux parameters outside the energy-stable region")
    common.add_argument("--init", choices=list(ex.INIT_CHOICES), help="initial projection")
    common.add_argument("--norm", choices=["l2", "energy"], help="error norm for converge")
    common.add_argument("--snapshot-every", type=float, help="snapshot cadence in time units")
    common.add_argument("--energy-every", type=int, help="energy logging cadence in steps")
    common.add_argument("--box", help="moving box a0,b0")
    common.add_argument("--seed", type=int, help="RNG seed for random data")

    p = argparse.ArgumentParser(prog="dimerdg", description="DG solver for a 1D semilinear hyperbolic dimer system")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("converge", parents=[common], help="convergence sweep against an exact solution")
    sub.add_parser("simulate", parents=[common], help="single run with snapshots and energy log")
    k = sub.add_parser("kink", parents=[common], help="traveling kink experiment")
    k.add_argument("--speed", type=float, help="kink speed c, |c| < 1")
    k.add_argument("--seed-profile", help="'reference' or 'w1,w2' seed near the rest state")
    k.add_argument("--z0", type=float, help="position of the transition at t = 0")
    k.add_argument("--domain", help="x_a,x_b")
    k.add_argument("--h", type=float, help="element width")
    k.add_argument("--long", action="store_true", help="full-length run on (-40, 200) to T = 100")
    a = sub.add_parser("energy-audit", parents=[common], help="energy identity on random states")
    a.add_argument("--states", type=int, default=100, help="random states per flux and boundary kind")
    a.add_argument("--tol", type=float, default=1e-11)
    return p


def config_from_args(args) -> ex.RunConfig:
    if args.command == "kink":
        cfg = ex.kink_config(long=getattr(args, "long", False))
    elif args.command == "converge":
        cfg = ex.RunConfig()
    else:
        cfg = ex.RunConfig(q=3)
    values = {}
    if args.config:
        values.update(ex.load_config_file(args.config))
    for dest, name in FLAG_FIELDS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[name] = ex.coerce_field(name, v) if isinstance(v, str) else v
    if args.allow_unstable:
        values["allow_unstable"] = True
    if args.q is not None:
        qs = ex.coerce_field("q_list", args.q)
        values["q_list"] = qs
        values["q"] = qs[0]
    if args.cells is not None:
        ns = ex.coerce_field("cells_list", args.cells)
        values["cells_list"] = ns
        values["n_elements"] = ns[0]
        if args.command == "kink":
            values["h"] = None
    known = {f.name for f in fields(ex.RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if args.command == "converge":
        if "q" in values and "q_list" not in values:
            values["q_list"] = (values["q"],)
        if "n_elements" in values and "cells_list" not in values:
            values["cells_list"] = (values["n_elements"],)
    return cfg.with_overrides(**values)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    cfg.flux_params()  # validate early
    if args.command == "converge":
        table = ex.run_convergence(cfg)
        print(table.format())
    elif args.command == "simulate":
        res = ex.run_simulation(cfg)
        print(f"t = {res.final.t:.6g}, files: {', '.join(p.name for p in res.files)}")
    elif args.command == "kink":
        res = ex.run_kink(cfg)
        print(
            f"transition {res.transition_initial:.6f} -> {res.transition_final:.6f} "
            f"(moved {res.displacement:.6f}), plateau ({res.plateau[0]:.6f}, {res.plateau[1]:.6f}), "
            f"box energy drift {res.box_energy_drift():.3e}"
        )
    elif args.command == "energy-audit":
        rows = ex.run_energy_audit(cfg, n_states=args.states)
        bad = [r for r in rows if r.max_rel_diff > args.tol]
        for r in rows:
            print(f"{r.flux:>14} {r.boundary:>9}  max rel diff {r.max_rel_diff:.3e}")
        if bad:
            raise RuntimeError(f"energy identity violated for {len(bad)} case(s) above tol {args.tol:g}")
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit:
        raise
    except (ValueError, UnstableFluxError, RuntimeError, FloatingPointError, OSError) as exc:
        print(json.dumps({"status": "error", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
