"""Energy identity audit plus conservation and finite-speed runs."""

import argparse

from dimerdg.diagnostics import discrete_energy, moving_box_energy
from dimerdg.experiments import RunConfig, project_initial, run_energy_audit
from dimerdg.mesh import build_uniform_mesh
from dimerdg.model import make_problem
from dimerdg.operator import FluxParams
from dimerdg.timestep import TimeStepPlan, evolve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/energy")
    ap.add_argument("--states", type=int, default=100)
    args = ap.parse_args()

    for row in run_energy_audit(RunConfig(out=args.out, q=3, n_elements=12), n_states=args.states):
        print(f"identity  {row.flux:>14} {row.boundary:>9}  max rel gap {row.max_rel_diff:.3e}")

    p = make_problem("random", seed=0)
    m = build_uniform_mesh(*p.domain, 40)
    s = project_initial(p, m, 3, "l2")
    for name in ("central", "mixed-central", "upwind"):
        f = evolve(s, TimeStepPlan.cfl_scaled(m.h_max, 10.0), p, FluxParams.from_preset(name))
        rel = (discrete_energy(f) - discrete_energy(s)) / discrete_energy(s)
        print(f"energy    {name:>14}  E(10)/E(0) - 1 = {rel:+.3e}")

    p = make_problem("bump")
    m = build_uniform_mesh(*p.domain, 80)
    s = project_initial(p, m, 3, "l2")
    f = evolve(s, TimeStepPlan.cfl_scaled(m.h_max, 1.0), p, FluxParams.from_preset("upwind"))
    edge = 2.0 + 2 * m.h_max
    out = moving_box_energy(f, -4.0, -edge) + moving_box_energy(f, edge, 4.0)
    print(f"cone      energy fraction outside |x| < {edge:g} at T=1: {out / discrete_energy(f):.3e}")


if __name__ == "__main__":
    main()
