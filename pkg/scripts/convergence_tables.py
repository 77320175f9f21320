"""Convergence sweeps for every flux preset on both manufactured problems.

Writes errors_<problem>_<flux>.csv under --out. The defaults mirror the
published setup; pass --init l2 --norm energy for the convention that
reproduces the conservative-flux tables.
"""

import argparse

from dimerdg.experiments import RunConfig, run_convergence
from dimerdg.operator import FLUX_PRESETS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/convergence")
    ap.add_argument("--problems", default="example1,example2")
    ap.add_argument("--fluxes", default=",".join(FLUX_PRESETS))
    ap.add_argument("--q", default="0,1,2,3")
    ap.add_argument("--cells", default="40,80,160,320,640")
    ap.add_argument("--init", default="radau", choices=["radau", "l2"])
    ap.add_argument("--norm", default="l2", choices=["l2", "energy"])
    args = ap.parse_args()
    for problem in args.problems.split(","):
        for flux in args.fluxes.split(","):
            cfg = RunConfig(
                problem=problem, flux=flux, out=args.out, init=args.init, norm=args.norm,
                q_list=tuple(int(v) for v in args.q.split(",")),
                cells_list=tuple(int(v) for v in args.cells.split(",")),
            )
            print(run_convergence(cfg).format(), end="\n\n", flush=True)


if __name__ == "__main__":
    main()
