"""Integrator error against the RK4 reference over a step-size grid.

Prints one row per (fixture, integrator, h) with the mean position, velocity
and energy errors over random phase points, then the fitted log-log slopes.

    python scripts/order_sweep.py --pairs 20 --out order.csv
"""

import argparse
import csv
import sys

import numpy as np

from rhmc_polytope.barrier import local_norm_u, local_norm_v, metric_state
from rhmc_polytope.diagnostics import loglog_slope
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, hamiltonian, sample_velocity
from rhmc_polytope.integrators import IntegratorConfig, reference_flow, step
from rhmc_polytope.polytope import analytic_center, parse_builtin


def random_state(P, rng, radius=0.5):
    x = analytic_center(P)
    for _ in range(3):
        d = rng.standard_normal(P.n)
        x = x + d * rng.uniform(0, radius) / local_norm_u(metric_state(P, x), d)
    return PhaseState(x, sample_velocity(metric_state(P, x), rng))


def sweep(spec, kinds, hs, pairs, seed):
    P = parse_builtin(spec)
    rng = np.random.default_rng(seed)
    target = TargetDensity(rng.standard_normal(P.n))
    states = [random_state(P, rng) for _ in range(pairs)]
    rows = []
    for h in hs:
        refs = [reference_flow(P, target, s, IntegratorConfig("reference", h)) for s in states]
        for kind in kinds:
            ex, ev, eE = [], [], []
            for s, r in zip(states, refs):
                M = metric_state(P, s.x)
                out, _ = step(P, target, s, IntegratorConfig(kind, h, fp_tolerance=1e-13))
                ex.append(local_norm_u(M, out.x - r.x))
                ev.append(local_norm_v(M, out.v - r.v))
                eE.append(abs(hamiltonian(metric_state(P, out.x), target, out.v) - hamiltonian(M, target, s.v)))
            rows.append(dict(fixture=spec, integrator=kind, h=h, position_error=np.mean(ex),
                             velocity_error=np.mean(ev), energy_error=np.mean(eE)))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", default="hypercube:5:-1:1,simplex:5,random:4:12:7")
    ap.add_argument("--hs", default="0.05,0.025,0.0125,0.00625")
    ap.add_argument("--integrators", default="imm,leapfrog")
    ap.add_argument("--pairs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args(argv)

    hs = [float(t) for t in args.hs.split(",")]
    kinds = args.integrators.split(",")
    rows = []
    for spec in args.fixtures.split(","):
        rows += sweep(spec, kinds, hs, args.pairs, args.seed)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        fh.close()

    for spec in args.fixtures.split(","):
        for kind in kinds:
            sub = [r for r in rows if r["fixture"] == spec and r["integrator"] == kind]
            sx = loglog_slope(hs, [r["position_error"] for r in sub])
            sE = loglog_slope(hs, [r["energy_error"] for r in sub])
            print(f"# {spec:>18} {kind:>9}: slope_x {sx:.3f}  slope_E {sE:.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
