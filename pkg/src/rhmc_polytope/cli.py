"""Command-line front end: ``rhmc sample | check | bench``.

Exit codes: 0 success, 1 a check failed, 2 parse/config error,
3 non-interior start point, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from rhmc_polytope import diagnostics as dg
from rhmc_polytope.barrier import local_norm_u, metric_state
from rhmc_polytope.errors import (
    InfeasibleInterior,
    InsufficientSamples,
    InvalidDimension,
    NotInterior,
    ParseError,
    RankDeficient,
)
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, hamiltonian, sample_velocity
from rhmc_polytope.integrators import IntegratorConfig, IntegratorKind, reference_flow, richardson_gap, step
from rhmc_polytope.polytope import (
    Polytope,
    analytic_center,
    load_polytope,
    make_hypercube,
    make_random,
    make_simplex,
    parse_builtin,
)
from rhmc_polytope.sampler import ChainConfig, StepPreset, run_chain

log = logging.getLogger("rhmc")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NOT_INTERIOR, EXIT_IO = 0, 1, 2, 3, 4
CONFIG_ERRORS = (ParseError, InvalidDimension, RankDeficient, InfeasibleInterior, ValueError)


@dataclass
class RunManifest:
    command: str
    polytope_path: Optional[str] = None
    builtin: Optional[str] = None
    alpha: Optional[str] = None
    integrator: str = "imm"
    h: Optional[float] = None
    steps: int = 1000
    burn_in: int = 0
    thin: int = 1
    seed: int = 0
    output_path: Optional[str] = None
    extra: Dict = field(default_factory=dict)

    def load_polytope(self) -> Polytope:
        if self.polytope_path:
            return load_polytope(self.polytope_path)
        if self.builtin:
            return parse_builtin(self.builtin)
        raise ValueError("one of --polytope or --builtin is required")

    def target(self, n: int) -> TargetDensity:
        if not self.alpha:
            return TargetDensity.uniform(n)
        text = self.alpha
        if os.path.isfile(text):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        try:
            values = [float(t) for t in text.replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"bad alpha {self.alpha!r}") from exc
        if len(values) != n:
            raise ParseError(f"alpha has {len(values)} entries, polytope has n={n}")
        return TargetDensity(np.array(values))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RHMC_THREADS", "1")))
    except ValueError:
        return 1


def _start_point(P: Polytope, x0: Optional[str]) -> np.ndarray:
    if x0:
        x = np.array([float(t) for t in x0.replace(",", " ").split()])
        if x.shape != (P.n,):
            raise ParseError(f"--x0 has {x.size} entries, polytope has n={P.n}")
        return x
    try:
        return analytic_center(P)
    except InfeasibleInterior:
        log.warning("analytic center unavailable (unbounded polytope?); starting at the interior witness")
        return np.array(P.interior_point)


def write_samples_csv(path, samples: np.ndarray):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in samples:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_samples_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


# ---------------------------------------------------------------------------
# sample


def cmd_sample(man: RunManifest) -> int:
    P = man.load_polytope()
    target = man.target(P.n)
    x0 = _start_point(P, man.extra.get("x0"))
    preset = man.extra.get("step_preset")
    h = man.h if man.h is not None else 1.0
    icfg = IntegratorConfig(
        man.integrator, h,
        fp_tolerance=man.extra.get("fp_tol", 1e-10),
        fp_max_iters=man.extra.get("fp_max_iters", 50),
    )
    cfg = ChainConfig(
        icfg, man.steps, man.burn_in, man.thin, man.seed,
        lazy=man.extra.get("lazy", False),
        use_filter=not man.extra.get("no_filter", False),
        step_preset=preset,
        preset_c=man.extra.get("preset_c", 1.0),
        preset_log_ratio=man.extra.get("preset_log_ratio", 1.0),
        reversibility_check_every=man.extra.get("check_every", 0),
    )
    samples, stats = run_chain(P, target, x0, cfg)
    try:
        ess = dg.ess(samples).tolist()
    except InsufficientSamples:
        ess = None
    out = Path(man.output_path)
    write_samples_csv(out, samples)
    stats_path = man.extra.get("stats_path") or str(out.with_suffix("")) + ".stats.json"
    payload = stats.to_dict()
    payload["ess_per_coordinate"] = ess
    payload["step_size"] = cfg.resolved_integrator(P.n).step_size
    payload["start_point"] = x0.tolist()
    with open(stats_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"acceptance rate: {stats.acceptance_rate:.6f}")
    print("ess per coordinate: " + ("n/a (fewer than 100 samples)" if ess is None else " ".join(f"{e:.1f}" for e in ess)))
    if stats.asymmetry_flagged:
        print(f"warning: solver asymmetry in {stats.asymmetric} of {stats.reversibility_checks} checked proposals")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def _rand_state(P, rng, shrink=0.8):
    """Random interior x (Dikin hops from the analytic center) and v ~ N(0, g(x))."""
    x = analytic_center(P)
    for _ in range(3):
        M = metric_state(P, x)
        d = rng.standard_normal(P.n)
        x = x + d * rng.uniform(0, shrink) / local_norm_u(M, d)
    M = metric_state(P, x)
    return PhaseState(x, sample_velocity(M, rng))


def check_reversibility(fixtures, seed, draws=20, h=0.02, tol=1e-12, threshold=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, P in fixtures:
        target = TargetDensity(rng.standard_normal(P.n))
        for kind in ("imm", "leapfrog"):
            cfg = IntegratorConfig(kind, h, fp_tolerance=tol)
            for _ in range(draws):
                rx, rv = dg.reversibility_residual(P, target, _rand_state(P, rng), cfg)
                worst = max(worst, rx, rv)
    return dg.DiagnosticResult(
        "reversibility", {"fixtures": [f for f, _ in fixtures], "h": h, "draws": draws, "seed": seed},
        {"max_residual": worst}, threshold, worst <= threshold,
    )


def check_order(fixtures, seed, pairs=5, hs=(0.05, 0.025, 0.0125), threshold=1.9):
    """Pooled log-log slope per integrator: least squares over every (pair, h) error."""
    rng = np.random.default_rng(seed)
    errors, single = {}, {}
    for name, P in fixtures:
        target = TargetDensity(rng.standard_normal(P.n))
        for kind in ("imm", "leapfrog"):
            cfg = IntegratorConfig(kind, hs[0], fp_tolerance=1e-13)
            key = f"{name}/{kind}"
            for _ in range(pairs):
                fit = dg.order_fit(P, target, _rand_state(P, rng, 0.5), hs, cfg)
                errors.setdefault(key, []).append(np.log(fit.position_errors))
                single[key] = min(single.get(key, np.inf), fit.slope_x)
    h_desc = sorted(hs, reverse=True)
    slopes = {k: dg.loglog_slope(h_desc, np.exp(np.mean(v, axis=0))) for k, v in errors.items()}
    worst = min(slopes.values())
    return dg.DiagnosticResult(
        "second_order", {"fixtures": [f for f, _ in fixtures], "h": list(hs), "pairs": pairs, "seed": seed},
        {"pooled_slope_x": slopes, "min_single_pair_slope_x": single}, threshold, worst >= threshold,
    )


def check_measure_preservation(fixtures, seed, h=0.01, threshold=1e-3):
    rng = np.random.default_rng(seed)
    devs = {}
    for name, P in fixtures:
        target = TargetDensity(rng.standard_normal(P.n))
        for kind in ("imm", "leapfrog"):
            cfg = IntegratorConfig(kind, h, fp_tolerance=1e-14)
            det = dg.measure_preservation(P, target, _rand_state(P, rng, 0.5), cfg)
            devs[f"{name}/{kind}"] = abs(det - 1.0)
    worst = max(devs.values())
    return dg.DiagnosticResult(
        "measure_preservation", {"fixtures": [f for f, _ in fixtures], "h": h, "seed": seed},
        {"abs_det_minus_one": devs}, threshold, worst <= threshold,
    )


def check_sensitivity(fixtures, seed, hs=(0.01, 0.001), threshold=0.9):
    rng = np.random.default_rng(seed)
    ratios = {}
    for name, P in fixtures:
        target = TargetDensity(rng.standard_normal(P.n))
        state = _rand_state(P, rng, 0.5)
        for kind in ("imm", "leapfrog"):
            for h in hs:
                cfg = IntegratorConfig(kind, h, fp_tolerance=1e-14)
                ratios[f"{name}/{kind}/h={h}"] = dg.jacobian_sensitivity(P, target, state, cfg)[2]
    worst = min(ratios.values())
    return dg.DiagnosticResult(
        "sensitivity", {"fixtures": [f for f, _ in fixtures], "h": list(hs), "seed": seed},
        {"ratio": ratios}, threshold, worst >= threshold,
    )


def check_oracle(fixtures, seed, h=0.05, threshold=1e-8):
    rng = np.random.default_rng(seed)
    drift, gap = {}, {}
    for name, P in fixtures:
        target = TargetDensity(rng.standard_normal(P.n))
        state = _rand_state(P, rng, 0.5)
        cfg = IntegratorConfig("reference", h)
        out = reference_flow(P, target, state, cfg)  # raises OracleNotConverged on Richardson failure
        H0 = hamiltonian(metric_state(P, state.x), target, state.v)
        H1 = hamiltonian(metric_state(P, out.x), target, out.v)
        drift[name] = abs(H1 - H0)
        gap[name] = max(richardson_gap(P, target, state, cfg))
    ok = max(drift.values()) <= threshold and max(gap.values()) <= cfg.richardson_tol
    return dg.DiagnosticResult(
        "oracle_integrity", {"fixtures": [f for f, _ in fixtures], "h": h, "seed": seed},
        {"energy_drift": drift, "richardson_gap": gap}, threshold, ok,
    )


def check_acceptance(seed, steps=2000, threshold=0.99):
    P = make_hypercube(5, -1, 1)
    h = 0.1 * 5 ** -1.5
    rates = {}
    solver = {}
    for kind in ("imm", "leapfrog"):
        for label, alpha in (("uniform", np.zeros(5)), ("ones", np.ones(5))):
            cfg = ChainConfig(IntegratorConfig(kind, h), steps, seed=seed)
            _, st = run_chain(P, TargetDensity(alpha), np.zeros(5), cfg)
            rates[f"{kind}/{label}"] = st.acceptance_rate
            solver[f"{kind}/{label}"] = st.rejected_solver / st.proposals
    ok = min(rates.values()) >= threshold and max(solver.values()) <= 1e-3
    return dg.DiagnosticResult(
        "acceptance_rate", {"fixture": "hypercube:5:-1:1", "h": h, "steps": steps, "seed": seed},
        {"acceptance": rates, "solver_failure_fraction": solver}, threshold, ok,
    )


def _box_chain(seed, steps, alpha):
    P = make_hypercube(3, 0, 1)
    cfg = ChainConfig(IntegratorConfig("imm", 0.2, fp_max_iters=100), steps, burn_in=steps // 10, seed=seed)
    samples, _ = run_chain(P, TargetDensity(alpha), analytic_center(P), cfg)
    return P, samples


def check_moments(seed, steps=20000):
    alpha = np.array([1.0, 2.0, 3.0])
    _, samples = _box_chain(seed, steps, alpha)
    rep = dg.moment_test_box(samples, alpha, 0.0, 1.0)
    worst = float(np.max(np.abs(rep.z_mean)))
    return dg.DiagnosticResult(
        "moments", {"fixture": "hypercube:3:0:1", "alpha": alpha, "steps": steps, "seed": seed},
        rep.to_dict(), 3.0, worst <= 3.0,
    )


def check_good_region(seed, steps=20000, rho=0.01, threshold=0.99):
    alpha = np.array([1.0, 2.0, 3.0])
    P, samples = _box_chain(seed, steps, alpha)
    inside = [dg.good_region_check(metric_state(P, x), alpha, P.n, rho)[1] for x in samples]
    frac = float(np.mean(inside))
    return dg.DiagnosticResult(
        "good_region", {"fixture": "hypercube:3:0:1", "alpha": alpha, "rho": rho, "steps": steps, "seed": seed},
        {"fraction_inside": frac}, threshold, frac >= threshold,
    )


def check_regularity(seed, draws=200, threshold=64.0, max_exceed=0.01):
    rng = np.random.default_rng(seed)
    P = make_hypercube(5, -1, 1)
    target = TargetDensity(np.zeros(5))
    h = 0.1 * 5 ** -1.5
    cfg = IntegratorConfig("imm", h)
    exceed = 0
    for _ in range(draws):
        state = _rand_state(P, rng)
        traj = dg.trajectory_record(P, target, state, cfg)
        exceed += dg.regularity(P, traj, dg.default_m1(P, target, state.x)) > threshold
    frac = exceed / draws
    return dg.DiagnosticResult(
        "regularity", {"fixture": "hypercube:5:-1:1", "h": h, "draws": draws, "seed": seed},
        {"fraction_above": frac}, threshold, frac <= max_exceed,
    )


def build_checks(user_polytope: Optional[Polytope], seed: int) -> Dict[str, Callable[[], dg.DiagnosticResult]]:
    box5, simplex5 = make_hypercube(5, -1, 1), make_simplex(5)
    small = [("hypercube:2:-1:1", make_hypercube(2, -1, 1)), ("random:3:6:1", make_random(3, 6, 1))]
    big = [("hypercube:5:-1:1", box5), ("simplex:5", simplex5)]
    if user_polytope is not None:
        big = [("user", user_polytope)]
        if user_polytope.n <= 4:
            small = [("user", user_polytope)]
    return {
        "reversibility": lambda: check_reversibility(big, seed),
        "second_order": lambda: check_order(big[:1], seed),
        "measure_preservation": lambda: check_measure_preservation(small, seed),
        "sensitivity": lambda: check_sensitivity(small[:1], seed),
        "self_concordance": lambda: dg.self_concordance_battery(300, seed),
        "hamiltonian_bounds": lambda: dg.hamiltonian_bounds_battery(300, seed),
        "oracle_integrity": lambda: check_oracle(big + small, seed),
        "acceptance_rate": lambda: check_acceptance(seed),
        "good_region": lambda: check_good_region(seed),
        "moments": lambda: check_moments(seed),
        "regularity": lambda: check_regularity(seed),
    }


CHECK_NAMES = [
    "reversibility", "second_order", "measure_preservation", "sensitivity",
    "self_concordance", "hamiltonian_bounds", "oracle_integrity",
    "acceptance_rate", "good_region", "moments", "regularity",
]


def cmd_check(man: RunManifest) -> int:
    P = man.load_polytope() if (man.polytope_path or man.builtin) else None
    checks = build_checks(P, man.seed)
    names = man.extra.get("only") or list(checks)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = [(name, pool.submit(checks[name])) for name in names]
        results = []
        for name, fut in futures:
            try:
                results.append(fut.result())
            except Exception as exc:  # a crashing check is a failing check
                results.append(dg.DiagnosticResult(name, {}, {"error": repr(exc)}, None, False))
    report = [r.to_dict() for r in results]
    path = man.output_path or "check_report.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.check_name}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# bench

BENCH_COLUMNS = ["integrator", "h", "position_error", "energy_error", "fp_iters", "wall_time"]


def bench_rows(P, target, kinds, hs, pairs, seed):
    rng = np.random.default_rng(seed)
    states = [_rand_state(P, rng, 0.5) for _ in range(pairs)]
    rows = []
    for kind in kinds:
        for h in hs:
            cfg = IntegratorConfig(kind, h, fp_tolerance=1e-13)
            pos, en, iters, wall = [], [], [], 0.0
            for st in states:
                M = metric_state(P, st.x)
                t0 = time.perf_counter()
                out, info = step(P, target, st, cfg)
                wall += time.perf_counter() - t0
                ref = reference_flow(P, target, st, cfg)
                pos.append(local_norm_u(M, out.x - ref.x))
                en.append(abs(hamiltonian(metric_state(P, out.x), target, out.v) - hamiltonian(M, target, st.v)))
                iters.append(info.fp_iters_used)
            rows.append({
                "integrator": kind, "h": h, "position_error": float(np.mean(pos)),
                "energy_error": float(np.mean(en)), "fp_iters": float(np.mean(iters)),
                "wall_time": wall / pairs,
            })
    return rows


def cmd_bench(man: RunManifest) -> int:
    P = man.load_polytope() if (man.polytope_path or man.builtin) else make_hypercube(5, -1, 1)
    target = man.target(P.n)
    hs = man.extra.get("hs") or [0.05, 0.025, 0.0125]
    kinds = man.extra.get("integrators") or ["imm", "leapfrog"]
    rows = bench_rows(P, target, kinds, hs, man.extra.get("pairs", 5), man.seed)
    out = man.output_path or "bench.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if k != "integrator" else v) for k, v in r.items()})
    for r in rows:
        print(f"{r['integrator']:>9} h={r['h']:<8g} pos_err={r['position_error']:.3e} energy_err={r['energy_error']:.3e}")

    ess_steps = man.extra.get("ess_steps", 0)
    if ess_steps:
        ess_out = man.extra.get("ess_out") or str(Path(out).with_suffix("")) + ".ess.csv"
        x0 = _start_point(P, None)
        with open(ess_out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["integrator", "h", "min_ess", "wall_time", "ess_per_second"])
            for kind in kinds:
                if kind == IntegratorKind.REFERENCE.value:
                    log.info("skipping the reference integrator in the ESS sweep (RK4 chains are too slow)")
                    continue
                for h in hs:
                    cfg = ChainConfig(IntegratorConfig(kind, h), ess_steps, seed=man.seed)
                    t0 = time.perf_counter()
                    samples, _ = run_chain(P, target, x0, cfg)
                    wall = time.perf_counter() - t0
                    e = float(np.min(dg.ess(samples)))
                    w.writerow([kind, repr(h), repr(e), repr(wall), repr(e / wall)])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _names(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rhmc", description="Riemannian HMC on polytopes with the log-barrier metric.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def geometry(sp, required):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--polytope", help="polytope text file ('m n' header, then rows 'a_i1 .. a_in b_i')")
        g.add_argument("--builtin", help="hypercube:n:lo:hi | simplex:n | random:n:m:seed")
        sp.add_argument("--alpha", help="comma-separated exponent vector or a file holding it (default: uniform)")
        sp.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("sample", help="run a chain and write samples CSV plus stats JSON")
    geometry(s, True)
    s.add_argument("--integrator", choices=[k.value for k in IntegratorKind], default="imm")
    s.add_argument("--h", type=float, help="step size (required unless --step-preset is given)")
    s.add_argument("--step-preset", choices=[p.value for p in StepPreset])
    s.add_argument("--preset-c", type=float, default=1.0)
    s.add_argument("--preset-log-ratio", type=float, default=1.0, help="log(Lambda/eps) for the preset")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--burn-in", type=int, default=0)
    s.add_argument("--thin", type=int, default=1)
    s.add_argument("--lazy", action="store_true")
    s.add_argument("--no-filter", action="store_true", help="skip the Metropolis filter (reference integrator only)")
    s.add_argument("--fp-tol", type=float, default=1e-10)
    s.add_argument("--fp-max-iters", type=int, default=50)
    s.add_argument("--check-every", type=int, default=0, help="reverse-step check every k-th proposal")
    s.add_argument("--x0", help="comma-separated start point (default: analytic center)")
    s.add_argument("--out", required=True)
    s.add_argument("--stats", help="stats JSON path (default: <out>.stats.json)")

    c = sub.add_parser("check", help="run the diagnostic suite and write a JSON report")
    geometry(c, False)
    c.add_argument("--only", action="append", choices=CHECK_NAMES)
    c.add_argument("--report", default="check_report.json")

    b = sub.add_parser("bench", help="integrator error/cost sweep over a step-size grid")
    geometry(b, False)
    b.add_argument("--hs", type=_floats, default=[0.05, 0.025, 0.0125])
    b.add_argument("--integrators", type=_names, default=["imm", "leapfrog"])
    b.add_argument("--pairs", type=int, default=5)
    b.add_argument("--ess-steps", type=int, default=0, help="chain length for an ESS-per-second table (imm/leapfrog only)")
    b.add_argument("--ess-out")
    b.add_argument("--out", default="bench.csv")
    return p


def manifest_from_args(args) -> RunManifest:
    man = RunManifest(
        command=args.command,
        polytope_path=args.polytope,
        builtin=args.builtin,
        alpha=args.alpha,
        seed=args.seed,
    )
    if args.command == "sample":
        man.integrator = args.integrator
        man.h = args.h
        man.steps, man.burn_in, man.thin = args.steps, args.burn_in, args.thin
        man.output_path = args.out
        man.extra.update(
            step_preset=args.step_preset, preset_c=args.preset_c, preset_log_ratio=args.preset_log_ratio,
            lazy=args.lazy, no_filter=args.no_filter, fp_tol=args.fp_tol, fp_max_iters=args.fp_max_iters,
            check_every=args.check_every, x0=args.x0, stats_path=args.stats,
        )
    elif args.command == "check":
        man.output_path = args.report
        man.extra["only"] = args.only
    else:
        man.output_path = args.out
        man.extra.update(hs=args.hs, integrators=args.integrators, pairs=args.pairs,
                         ess_steps=args.ess_steps, ess_out=args.ess_out)
    return man


COMMANDS = {"sample": cmd_sample, "check": cmd_check, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "sample" and args.h is None and args.step_preset is None:
        parser.error("sample: --h is required unless --step-preset is given")
    if args.command == "sample" and args.h is not None and not args.h > 0:
        parser.error("sample: --h must be positive")
    if args.command == "bench":
        bad = [k for k in args.integrators if k not in {k.value for k in IntegratorKind}]
        if bad:
            parser.error(f"bench: unknown integrators {bad}")
    try:
        man = manifest_from_args(args)
        return COMMANDS[args.command](man)
    except NotInterior as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_INTERIOR
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
