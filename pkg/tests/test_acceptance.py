"""Acceptance gate: every published criterion, one test and one verdict line.

Each test computes its quantities from fresh runs (shared per module via
fixtures), prints exactly one "criterion N (title): PASS/FAIL" line with the
measured values, and then asserts.  Tolerances are stated inline and match
the package's published guarantees; none are loosened here.
"""
import math

import numpy as np
import pytest

from bvflux import (Grid1D, RunConfig, SolverState, TimeStepping,
                    build_problem, compute_alpha_bar,
                    discrete_entropy_residual, discrete_stationary_state,
                    entropy_tolerance, example_problem, run_single,
                    sample_initial_data, step)
from bvflux.properties import (check_beta_tvd, check_flux_equality,
                               check_l1_contraction, check_monotonicity,
                               check_oracle_agreement)

SEED = 20250815

EX1_M = (50, 100, 200, 400, 800, 1600)
# reference L1 error column for paper-ex1 at t=1 over EX1_M
EX1_REFERENCE_E = (0.2244, 0.1603, 0.1047, 0.0673, 0.0423, 0.0258)
EX2_TIMES = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
TV_BETA_START = 7.2804   # reference TV(beta) for paper-ex2 at t=0, M=400


def verdict(number: int, title: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"criterion {number} ({title}): {status}  [{detail}]")


def checks_by_name(result):
    return {c.name: c for c in result.checks}


@pytest.fixture(scope="module")
def ex1_sweep():
    config = RunConfig(t_final=1.0, m_cells=EX1_M, reference="paper-ex1",
                       seed=SEED)
    setup = build_problem(config)
    return {m: run_single(config, setup, m) for m in EX1_M}


@pytest.fixture(scope="module")
def ex2_runs():
    config = RunConfig(t_final=6.0, m_cells=(400, 800),
                       reference="paper-ex2", snapshot_times=EX2_TIMES,
                       seed=SEED)
    setup = build_problem(config)
    return {400: run_single(config, setup, 400, EX2_TIMES),
            800: run_single(config, setup, 800)}


@pytest.fixture(scope="module")
def all_runs(ex1_sweep, ex2_runs):
    runs = {f"paper-ex1 M={m}": res for m, res in ex1_sweep.items()}
    runs.update({f"paper-ex2 M={m}": res for m, res in ex2_runs.items()})
    return runs


@pytest.fixture(scope="module")
def benchmark_models():
    grid = Grid1D(0.0, 6.0, 50)
    return {name: (example_problem(name), grid)
            for name in ("paper-ex1", "paper-ex2")}


def test_criterion_01_example1_convergence_table(ex1_sweep):
    errors = [ex1_sweep[m].l1 for m in EX1_M]
    decreasing = all(b < a for a, b in zip(errors, errors[1:]))
    within = [abs(e - ref) / ref <= 0.25
              for e, ref in zip(errors, EX1_REFERENCE_E)]
    ratios = [b / a for a, b in zip(errors, errors[1:])]
    ratios_ok = all(0.55 <= r <= 0.80 for r in ratios)
    passed = decreasing and all(within) and ratios_ok
    verdict(1, "example-1 convergence table", passed,
            "e=" + ",".join(f"{e:.4f}" for e in errors)
            + " ratios=" + ",".join(f"{r:.3f}" for r in ratios))
    assert decreasing, f"errors not strictly decreasing: {errors}"
    assert all(within), \
        f"errors not within 25% of {EX1_REFERENCE_E}: {errors}"
    assert ratios_ok, f"ratios outside [0.55, 0.80]: {ratios}"


def test_criterion_02_example2_stationary_accuracy(ex2_runs):
    e400 = ex2_runs[400].l1
    e800 = ex2_runs[800].l1
    tvb400 = ex2_runs[400].records[-1].tv_beta
    tvb800 = ex2_runs[800].records[-1].tv_beta
    passed = (e400 <= 1e-5 and tvb400 <= 1e-4
              and e800 <= e400 / 10.0 and tvb800 <= tvb400 / 10.0)
    verdict(2, "example-2 stationary accuracy", passed,
            f"e400={e400:.3e} tvb400={tvb400:.3e} "
            f"e800={e800:.3e} tvb800={tvb800:.3e}")
    assert e400 <= 1e-5 and tvb400 <= 1e-4
    assert e800 <= e400 / 10.0 and tvb800 <= tvb400 / 10.0


def test_criterion_03_total_variation_history(ex2_runs):
    snaps = ex2_runs[400].snapshots
    assert [t for t, _, _, _ in snaps] == list(EX2_TIMES)
    tvu = [s[1] for s in snaps]
    tvb = [s[2] for s in snaps]
    strictly_down = all(b < a for a, b in zip(tvb, tvb[1:]))
    start_ok = abs(tvb[0] - TV_BETA_START) / TV_BETA_START <= 0.01
    end_ok = tvb[-1] <= 1e-4
    tvu_ok = tvu[0] == 0.0 and 11.0 <= tvu[1] <= 13.0
    passed = strictly_down and start_ok and end_ok and tvu_ok
    verdict(3, "total variation history", passed,
            f"tvb0={tvb[0]:.4f} tvb6={tvb[-1]:.3e} tvu0={tvu[0]} "
            f"tvu1={tvu[1]:.4f}")
    assert strictly_down, f"TV(beta) not strictly decreasing: {tvb}"
    assert start_ok and end_ok
    assert tvu_ok


def test_criterion_04_beta_tvd_everywhere(all_runs, benchmark_models):
    run_worst = {name: checks_by_name(res)["beta_tvd"]
                 for name, res in all_runs.items()}
    runs_ok = all(c.passed and c.value <= 1e-10
                  for c in run_worst.values())
    random_results = []
    for name, (prob, grid) in benchmark_models.items():
        rng = np.random.default_rng(SEED)
        random_results.append(check_beta_tvd(prob.model, grid, rng,
                                             n_states=50, n_steps=20))
    random_ok = all(r.passed for r in random_results)
    worst = max([c.value for c in run_worst.values()]
                + [r.worst for r in random_results])
    passed = runs_ok and random_ok
    verdict(4, "beta-TVD on runs and random data", passed,
            f"worst increase={worst:.3e} over {len(run_worst)} runs + "
            f"{sum(r.n_trials for r in random_results)} random steps")
    assert runs_ok, {n: c.value for n, c in run_worst.items()}
    assert random_ok, [r.line() for r in random_results]
    assert worst <= 1e-10


def test_criterion_05_monotone_and_l1_contractive(benchmark_models):
    results = []
    for name, (prob, grid) in benchmark_models.items():
        rng = np.random.default_rng(SEED)
        mono = check_monotonicity(prob.model, grid, rng, n_pairs=100,
                                  n_steps=20)
        contract = check_l1_contraction(prob.model, grid, rng, n_pairs=100,
                                        n_steps=20)
        results.append((name, mono, contract))
    mono_exact = all(m.worst <= 0.0 and m.passed for _, m, _ in results)
    contract_ok = all(c.passed for _, _, c in results)
    passed = mono_exact and contract_ok
    worst_mono = max(m.worst for _, m, _ in results)
    worst_grow = max(c.worst for _, _, c in results)
    verdict(5, "monotonicity and L1 contraction", passed,
            f"worst order defect={worst_mono:.3e} "
            f"worst L1 growth={worst_grow:.3e} (100 pairs each flux)")
    assert mono_exact, [m.line() for _, m, _ in results]
    assert contract_ok, [c.line() for _, _, c in results]


def test_criterion_06_stationary_fixed_points(benchmark_models):
    worst = -math.inf
    for name, (prob, grid) in benchmark_models.items():
        state0 = sample_initial_data(prob.u0, grid)
        alpha_bar = compute_alpha_bar(state0, grid, prob.model)
        bounds = prob.model.lipschitz_bounds(5.0)
        ts = TimeStepping.from_bounds(grid, bounds, 1.0)
        for branch in ("plus", "minus"):
            k = discrete_stationary_state(grid, alpha_bar, branch,
                                          prob.model)
            out = step(k.as_solver_state(), grid, ts, prob.model)
            worst = max(worst, float(np.max(np.abs(out.u - k.values))))
    passed = worst <= 1e-14
    verdict(6, "stationary states are fixed points", passed,
            f"max one-step drift={worst:.3e} (both fluxes, both branches)")
    assert passed


def test_criterion_07_entropy_certificate(all_runs):
    entries = {name: checks_by_name(res)["entropy"]
               for name, res in all_runs.items()}
    runs_ok = all(c.passed for c in entries.values())
    worst = max(c.value for c in entries.values())

    # negative control: a corrupted update must violate the inequality
    prob = example_problem("paper-ex1")
    grid = Grid1D(0.0, 6.0, 50)
    state = sample_initial_data(prob.u0, grid)
    bounds = prob.model.lipschitz_bounds(4.8)
    ts = TimeStepping.from_bounds(grid, bounds, 1.0)
    nxt = step(state, grid, ts, prob.model)
    bad_u = nxt.u.copy()
    bad_u[25] += 0.1
    bad = SolverState(nxt.level, bad_u, nxt.ghost_left, nxt.ghost_right)
    k = discrete_stationary_state(grid, 0.32, "minus", prob.model)
    control = discrete_entropy_residual(state, bad, k, grid, ts, prob.model)
    control_ok = control > entropy_tolerance(4.8)

    passed = runs_ok and control_ok
    verdict(7, "discrete entropy certificate", passed,
            f"max residual={worst:.3e} corrupted control={control:.3e}")
    assert runs_ok, {n: c.value for n, c in entries.items()}
    assert control_ok


def test_criterion_08_flux_equality_and_oracle(benchmark_models):
    results = []
    for name, (prob, grid) in benchmark_models.items():
        rng = np.random.default_rng(SEED)
        eq = check_flux_equality(prob.model, rng, n_trials=10_000)
        oracle = check_oracle_agreement(prob.model, rng, n_trials=200,
                                        n_samples=10_000)
        results.append((name, eq, oracle))
    eq_ok = all(eq.passed and eq.worst <= 1e-12 for _, eq, _ in results)
    oracle_ok = all(o.passed for _, _, o in results)
    passed = eq_ok and oracle_ok
    verdict(8, "flux equality and classical oracle", passed,
            f"max |flux difference|={max(eq.worst for _, eq, _ in results):.3e} "
            f"max oracle excess={max(o.worst for _, _, o in results):.3e}")
    assert eq_ok, [eq.line() for _, eq, _ in results]
    assert oracle_ok, [o.line() for _, _, o in results]


def test_criterion_09_conservation_and_time_continuity(all_runs):
    mass = {name: checks_by_name(res)["mass_balance"]
            for name, res in all_runs.items()}
    tc = {name: checks_by_name(res)["time_continuity"]
          for name, res in all_runs.items()}
    mass_ok = all(c.passed and c.value <= 1e-12 for c in mass.values())
    tc_ok = all(c.passed and c.value == 0 for c in tc.values())
    passed = mass_ok and tc_ok
    verdict(9, "conservation and time continuity", passed,
            f"max mass defect={max(c.value for c in mass.values()):.3e} "
            f"bound violations={sum(int(c.value) for c in tc.values())}")
    assert mass_ok, {n: c.value for n, c in mass.items()}
    assert tc_ok, {n: c.value for n, c in tc.items()}


def test_criterion_10_solution_bound(all_runs):
    entries = {name: (checks_by_name(res)["linf_bound"],
                      res.constants["m_bound"])
               for name, res in all_runs.items()}
    passed = all(c.passed and c.value <= m + 1e-10
                 for c, m in entries.values())
    worst = max(c.value - m for c, m in entries.values())
    bounds = sorted({m for _, m in entries.values()})
    verdict(10, "solution bounded by recorded constant", passed,
            f"max(|u| - M)={worst:.3e} with M per flux {bounds}")
    assert passed, {n: (c.value, m) for n, (c, m) in entries.items()}
