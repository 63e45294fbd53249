"""Mixing versus step size on a box: acceptance, solver failures, asymmetry and ESS.

This is the scan used to pick the step size of the stationarity check.

    python scripts/step_size_scan.py --hs 0.02,0.1,0.2,0.3 --steps 20000
"""

import argparse
import time

import numpy as np

from rhmc_polytope.diagnostics import ess
from rhmc_polytope.hamiltonian import TargetDensity
from rhmc_polytope.integrators import IntegratorConfig
from rhmc_polytope.polytope import analytic_center, parse_builtin
from rhmc_polytope.sampler import ChainConfig, run_chain


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--builtin", default="hypercube:3:0:1")
    ap.add_argument("--alpha", default="1,2,3")
    ap.add_argument("--integrator", default="imm")
    ap.add_argument("--hs", default="0.02,0.05,0.1,0.2,0.3")
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--fp-max-iters", type=int, default=100)
    ap.add_argument("--check-every", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    P = parse_builtin(args.builtin)
    target = TargetDensity([float(t) for t in args.alpha.split(",")])
    x0 = analytic_center(P)
    print(f"{'h':>6} {'accept':>7} {'solver':>8} {'asym':>6} {'min ESS':>8} {'ESS/s':>8} {'sec':>6}")
    for h in (float(t) for t in args.hs.split(",")):
        cfg = ChainConfig(
            IntegratorConfig(args.integrator, h, fp_max_iters=args.fp_max_iters),
            steps=args.steps, burn_in=args.steps // 10, seed=args.seed,
            reversibility_check_every=args.check_every,
        )
        t0 = time.perf_counter()
        samples, st = run_chain(P, target, x0, cfg)
        wall = time.perf_counter() - t0
        e = float(np.min(ess(samples)))
        print(f"{h:6.3f} {st.acceptance_rate:7.4f} {st.rejected_solver / st.proposals:8.1e} "
              f"{st.asymmetric:6d} {e:8.0f} {e / wall:8.1f} {wall:6.1f}")


if __name__ == "__main__":
    main()
