"""Run orchestration: problem assembly, constants, checks, and artifacts.

Each command resolves a RunConfig into a concrete problem (flux model,
initial data, optional exact profile), marches the scheme with a diagnostics
recorder attached, evaluates the invariant checks, and writes CSV/text/plot
artifacts plus a JSON manifest.  Numeric CSV fields use shortest round-trip
formatting so identical config and version give bit-identical files.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .coefficients import SpatialCoefficient
from .config import RunConfig
from .diagnostics import (StepRecorder, entropy_tolerance,
                          time_continuity_bound, total_variation, tv_beta)
from .errors import ConfigError, InvariantViolationError
from .examples import (EXAMPLE_IDS, VALIDATION_FLUX_IDS, degenerate_linear_g,
                       example_problem, trig_composite_model, tv_blowup_model,
                       uniformly_convex_model)
from .flux_model import FluxModel, ShiftBeta, ScaleBeta
from .properties import (check_beta_tvd, check_entropy, check_fixed_points,
                         check_flux_equality, check_l1_contraction,
                         check_monotonicity, check_oracle_agreement)
from .solver import Grid1D, SolverState, TimeStepping, run, sample_initial_data
from .stationary import (compute_alpha_bar, discrete_stationary_state,
                         sup_state_bound)

MASS_TOL = 1e-12
TVD_TOL = 1e-10
LINF_SLACK = 1e-10


# ---------------------------------------------------------------------------
# problem assembly
# ---------------------------------------------------------------------------

@dataclass
class ProblemSetup:
    model: FluxModel
    u0: Callable[[float], float]
    exact: Optional[Callable[[float], float]]
    reference_time: Optional[float]
    x_left: float
    x_right: float


def _table_coefficient(spec: dict, section: str) -> SpatialCoefficient:
    if "breakpoints" not in spec:
        raise ConfigError(f"{section} needs a breakpoints/values table")
    try:
        return SpatialCoefficient(np.asarray(spec["breakpoints"], dtype=float),
                                  np.asarray(spec["values"], dtype=float))
    except Exception as exc:
        raise ConfigError(f"bad {section} table: {exc}") from exc


def _quadratic_shift_model(r: SpatialCoefficient) -> FluxModel:
    return FluxModel(
        g=lambda z: 0.5 * np.square(z),
        beta=ShiftBeta(r),
        z_minus=0.0,
        z_plus=0.0,
        lipschitz_g=lambda p: float(p),
        growth=lambda t: 0.5 * float(t) * float(t),
        g_inverse_minus=lambda alpha: -math.sqrt(2.0 * alpha),
        g_inverse_plus=lambda alpha: math.sqrt(2.0 * alpha),
        name="quadratic-shift",
    )


def _degenerate_linear_shift_model(r: SpatialCoefficient) -> FluxModel:
    return FluxModel(
        g=degenerate_linear_g,
        beta=ShiftBeta(r),
        z_minus=-1.0,
        z_plus=0.0,
        lipschitz_g=lambda p: 1.0,
        growth=lambda t: float(t),
        g_inverse_minus=lambda alpha: -1.0 - alpha,
        g_inverse_plus=lambda alpha: alpha,
        name="degenerate-linear-shift",
    )


def _scale_quadratic_model(s: SpatialCoefficient) -> FluxModel:
    return FluxModel(
        g=lambda z: 0.5 * np.square(z),
        beta=ScaleBeta(s),
        z_minus=0.0,
        z_plus=0.0,
        lipschitz_g=lambda p: float(p),
        growth=lambda t: 0.5 * float(t) * float(t),
        g_inverse_minus=lambda alpha: -math.sqrt(2.0 * alpha),
        g_inverse_plus=lambda alpha: math.sqrt(2.0 * alpha),
        name="scale-quadratic",
    )


def _build_model(flux: dict, min_width: float) -> Tuple[FluxModel, Optional[Tuple[float, float]]]:
    """Model plus a default domain when the family implies one."""
    family = flux["family"]
    if family in EXAMPLE_IDS:
        kwargs = {}
        if family == "paper-ex1":
            if "p" in flux:
                kwargs["p"] = flux["p"]
            if "q" in flux:
                kwargs["q"] = flux["q"]
        prob = example_problem(family, min_width=min_width, **kwargs)
        return prob.model, prob.domain
    if family == "quadratic-shift":
        return _quadratic_shift_model(_table_coefficient(flux, "flux")), None
    if family == "degenerate-linear-shift":
        return _degenerate_linear_shift_model(_table_coefficient(flux, "flux")), None
    if family == "scale-quadratic":
        return _scale_quadratic_model(_table_coefficient(flux, "flux")), None
    if family == "uniformly-convex":
        r = _table_coefficient(flux, "flux") if "breakpoints" in flux else None
        return uniformly_convex_model(r), None
    if family == "tv-blowup":
        return tv_blowup_model(), None
    if family == "trig-composite":
        return trig_composite_model(), None
    raise ConfigError(f"unknown flux family {family!r}")


def _build_u0(initial: dict) -> Callable[[float], float]:
    if "builtin" in initial:
        name = initial["builtin"]
        if name not in EXAMPLE_IDS:
            raise ConfigError(f"unknown builtin initial data {name!r}")
        return example_problem(name).u0
    if "constant" in initial:
        value = float(initial["constant"])
        return lambda x: value
    table = _table_coefficient(initial, "initial_data")
    return lambda x: float(table(x))


def build_problem(config: RunConfig) -> ProblemSetup:
    """Resolve the config into model, initial data, and optional reference."""
    exact = None
    reference_time = None
    domain = None
    if config.reference is not None:
        if config.reference not in EXAMPLE_IDS:
            raise ConfigError(f"unknown reference {config.reference!r} "
                              f"(known: {', '.join(EXAMPLE_IDS)})")
        if config.flux is not None:
            raise ConfigError("give either reference or flux, not both")
        prob = example_problem(config.reference,
                               min_width=config.partition_min_width)
        model, u0, domain = prob.model, prob.u0, prob.domain
        exact, reference_time = prob.exact, prob.reference_time
        if config.initial_data is not None:
            u0 = _build_u0(config.initial_data)
            exact = reference_time = None
    else:
        model, domain = _build_model(config.flux, config.partition_min_width)
        u0 = _build_u0(config.initial_data)
    x_left = config.x_left if config.x_left is not None else domain[0]
    x_right = config.x_right if config.x_right is not None else domain[1]
    if x_left is None or x_right is None:
        raise ConfigError("this flux family needs an explicit domain section")
    return ProblemSetup(model=model, u0=u0, exact=exact,
                        reference_time=reference_time,
                        x_left=float(x_left), x_right=float(x_right))


# ---------------------------------------------------------------------------
# single runs
# ---------------------------------------------------------------------------

@dataclass
class RunCheck:
    name: str
    passed: bool
    value: float
    threshold: float

    def as_dict(self) -> dict:
        return {"passed": bool(self.passed), "value": self.value,
                "threshold": self.threshold}


@dataclass
class RunResult:
    m: int
    grid: Grid1D
    ts: TimeStepping
    constants: dict
    records: list
    final_u: np.ndarray
    checks: List[RunCheck]
    snapshots: list
    l1: Optional[float]
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)


def _snapshot_multiple(snapshot_times: Sequence[float], t_final: float) -> int:
    """Smallest k with every time a multiple of t_final/k (exact landing)."""
    fracs = [t / t_final for t in snapshot_times if 0.0 < t < t_final]
    if not fracs:
        return 1
    for k in range(1, 10_001):
        if all(abs(f * k - round(f * k)) <= 1e-9 * k for f in fracs):
            return k
    return 1


def run_single(config: RunConfig, setup: ProblemSetup, m: int,
               snapshot_times: Sequence[float] = ()) -> RunResult:
    model = setup.model
    grid = Grid1D(setup.x_left, setup.x_right, m)
    state0 = sample_initial_data(setup.u0, grid)
    alpha_bar = compute_alpha_bar(state0, grid, model)
    m_bound = sup_state_bound(grid, alpha_bar, model)
    if alpha_bar == 0.0:
        m_bound = max(m_bound, float(np.max(np.abs(state0.extended()))))
    bounds = model.lipschitz_bounds(m_bound)
    n_multiple = _snapshot_multiple(snapshot_times, config.t_final)
    ts = TimeStepping.from_bounds(grid, bounds, config.t_final,
                                  cfl_safety=config.cfl_safety,
                                  lam=config.lam, n_multiple=n_multiple)

    alphas = sorted({0.0, 0.5 * alpha_bar, alpha_bar})
    stationary = [discrete_stationary_state(grid, a, b, model)
                  for a in alphas for b in ("plus", "minus")]
    um_interior = model.plateau_reps(grid.centers)
    tc_bound = time_continuity_bound(
        ts.lam, bounds, model.spatial.total_variation(),
        total_variation(state0.u), total_variation(um_interior))

    exact = setup.exact if (setup.exact is not None
                            and setup.reference_time is not None
                            and math.isclose(config.t_final,
                                             setup.reference_time)) else None
    recorder = StepRecorder(grid, ts, model, stationary_states=stationary,
                            tc_bound=tc_bound, exact=exact,
                            exact_level=ts.n_steps)
    levels = sorted({int(round(ts.n_steps * t / config.t_final))
                     for t in snapshot_times})
    snapshots: list = []

    def on_snapshot(level: int, t: float, u: np.ndarray) -> None:
        state = SolverState(level, u.copy(), state0.ghost_left,
                            state0.ghost_right)
        snapshots.append((t, total_variation(u), tv_beta(state, grid, model),
                          u.copy()))

    error = None
    final_u = None
    try:
        final, records = run(state0, grid, ts, model, m_bound=m_bound,
                             recorder=recorder, snapshot_levels=levels,
                             on_snapshot=on_snapshot)
        final_u = final.u
    except InvariantViolationError as exc:
        error = str(exc)
        records = recorder.records

    tv_beta0 = (recorder.initial_tv_beta if recorder.initial_tv_beta is not None
                else tv_beta(state0, grid, model))
    constants = {
        "m_bound": m_bound,
        "alpha_bar": alpha_bar,
        "l_g": bounds.L_g,
        "l_beta": bounds.L_beta,
        "l_product": bounds.L,
        "eta_bar": bounds.eta_bar,
        "p_bound": bounds.p_bound,
        "lam": ts.lam,
        "dt": ts.dt,
        "n_steps": ts.n_steps,
        "dx": grid.dx,
        "m_cells": m,
        "k5_proxy": tv_beta0,
        "tc_bound": tc_bound,
        "entropy_tolerance": entropy_tolerance(m_bound),
        "unsampled_intervals": model.spatial.unsampled_interval_count(
            grid.extended_centers),
    }

    checks = []
    if error is not None:
        checks.append(RunCheck("runtime_invariant", False, 1.0, 0.0))
    if recorder.records:
        checks.extend([
            RunCheck("linf_bound", recorder.max_abs_u <= m_bound + LINF_SLACK,
                     recorder.max_abs_u, m_bound + LINF_SLACK),
            RunCheck("beta_tvd", recorder.max_tv_beta_increase <= TVD_TOL,
                     recorder.max_tv_beta_increase, TVD_TOL),
            RunCheck("entropy",
                     recorder.max_entropy_residual <= entropy_tolerance(m_bound),
                     recorder.max_entropy_residual, entropy_tolerance(m_bound)),
            RunCheck("mass_balance", recorder.max_mass_residual <= MASS_TOL,
                     recorder.max_mass_residual, MASS_TOL),
            RunCheck("time_continuity", recorder.tc_failures == 0,
                     float(recorder.tc_failures), 0.0),
            RunCheck("beta_time_continuity",
                     recorder.max_beta_time_sum <= tv_beta0 + TVD_TOL,
                     recorder.max_beta_time_sum, tv_beta0 + TVD_TOL),
        ])

    l1 = records[-1].l1_error if records and records[-1].l1_error is not None \
        else None
    return RunResult(m=m, grid=grid, ts=ts, constants=constants,
                     records=records, final_u=final_u, checks=checks,
                     snapshots=snapshots, l1=l1, error=error)


def _run_sweep(config: RunConfig, setup: ProblemSetup,
               snapshot_times: Sequence[float] = ()) -> List[RunResult]:
    if len(config.m_cells) == 1 or config.threads == 1:
        return [run_single(config, setup, m, snapshot_times)
                for m in config.m_cells]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        futures = [pool.submit(run_single, config, setup, m, snapshot_times)
                   for m in config.m_cells]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _write_text_table(path: str, header: Sequence[str],
                      rows: Sequence[Sequence]) -> None:
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("  ".join(h.rjust(w) for h, w in zip(header, widths))
                     + "\n")
        for row in cells:
            handle.write("  ".join(c.rjust(w) for c, w in zip(row, widths))
                         + "\n")


def write_snapshot_csv(path: str, grid: Grid1D, u: np.ndarray,
                       model: FluxModel,
                       exact: Optional[Callable[[float], float]] = None) -> None:
    beta = np.asarray(model.eval_beta(grid.centers, u), dtype=float)
    header = ["x", "u", "beta"]
    rows = []
    if exact is not None:
        header += ["exact", "abs_error"]
        for x, uj, bj in zip(grid.centers, u, beta):
            ex = float(exact(float(x)))
            rows.append([x, uj, bj, ex, abs(uj - ex)])
    else:
        rows = [[x, uj, bj] for x, uj, bj in zip(grid.centers, u, beta)]
    _write_csv(path, header, rows)


def write_diagnostics_csv(path: str, records: Sequence,
                          include_l1: bool) -> None:
    header = ["n", "t", "tv_u", "tv_beta", "mass", "entropy_residual_max",
              "time_continuity_sum"]
    if include_l1:
        header.append("l1_error")
    rows = []
    for rec in records:
        row = [rec.level, rec.time, rec.tv_u, rec.tv_beta, rec.mass,
               rec.entropy_residual_max, rec.time_continuity_sum]
        if include_l1:
            row.append(rec.l1_error)
        rows.append(row)
    _write_csv(path, header, rows)


def write_plot_data(out_dir: str, grid: Grid1D, u: np.ndarray,
                    exact: Optional[Callable[[float], float]] = None) -> None:
    with open(os.path.join(out_dir, "plot_u.dat"), "w",
              encoding="utf-8") as handle:
        for x, uj in zip(grid.centers, u):
            handle.write(f"{_fmt(x)} {_fmt(uj)}\n")
    if exact is not None:
        with open(os.path.join(out_dir, "plot_exact.dat"), "w",
                  encoding="utf-8") as handle:
            for x in grid.centers:
                handle.write(f"{_fmt(x)} {_fmt(float(exact(float(x))))}\n")


def write_solution_svg(path: str, grid: Grid1D, u: np.ndarray,
                       exact: Optional[Callable[[float], float]] = None,
                       title: str = "") -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    if exact is not None:
        ex = np.array([float(exact(float(x))) for x in grid.centers])
        ax.plot(grid.centers, ex, "-", color="0.35", lw=1.2, label="exact")
    ax.plot(grid.centers, u, ".", color="C0", ms=2.5,
            label=f"numeric M={grid.m_cells}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def write_manifest(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _manifest(command: str, config: RunConfig, results: List[RunResult],
              duration: float, extra_checks: Optional[dict] = None) -> dict:
    checks = {}
    errors = {}
    for res in results:
        prefix = f"M{res.m}." if len(results) > 1 else ""
        for chk in res.checks:
            checks[prefix + chk.name] = chk.as_dict()
        if res.error is not None:
            errors[str(res.m)] = res.error
    if extra_checks:
        checks.update(extra_checks)
    payload = {
        "command": command,
        "version": __version__,
        "config": config.echo(),
        "seed": config.seed,
        "duration_seconds": duration,
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks.values()) if checks else True,
    }
    if errors:
        payload["errors"] = errors
    if len(results) == 1:
        payload["constants"] = results[0].constants
    else:
        payload["runs"] = [res.constants for res in results]
    return payload


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def execute_run(config: RunConfig) -> int:
    started = time.perf_counter()
    setup = build_problem(config)
    want_exact = setup.exact is not None
    results = _run_sweep(config, setup, config.snapshot_times)
    _ensure_dir(config.out_dir)
    for res in results:
        sub = config.out_dir if len(results) == 1 else \
            os.path.join(config.out_dir, f"M{res.m}")
        _ensure_dir(sub)
        include_l1 = any(rec.l1_error is not None for rec in res.records)
        write_diagnostics_csv(os.path.join(sub, "diagnostics.csv"),
                              res.records, include_l1=include_l1)
        if res.final_u is None:
            continue
        final_exact = setup.exact if (want_exact and res.l1 is not None) else None
        write_snapshot_csv(os.path.join(sub, "snapshot_final.csv"), res.grid,
                           res.final_u, setup.model, final_exact)
        for t, _, _, u in res.snapshots:
            if math.isclose(t, config.t_final):
                continue
            write_snapshot_csv(os.path.join(sub, f"snapshot_t{t:g}.csv"),
                               res.grid, u, setup.model)
        write_plot_data(sub, res.grid, res.final_u, final_exact)
        if "plots" in config.formats:
            write_solution_svg(os.path.join(sub, "solution.svg"), res.grid,
                               res.final_u, final_exact,
                               title=setup.model.name)
    duration = time.perf_counter() - started
    manifest = _manifest("run", config, results, duration)
    write_manifest(os.path.join(config.out_dir, "manifest.json"), manifest)
    return 0 if manifest["all_passed"] else 1


def execute_convergence(config: RunConfig) -> int:
    started = time.perf_counter()
    setup = build_problem(config)
    if setup.exact is None or not math.isclose(config.t_final,
                                               setup.reference_time):
        raise ConfigError("convergence needs a reference example with an "
                          "exact solution at t_final")
    results = _run_sweep(config, setup)
    results.sort(key=lambda r: r.m)
    rows = [[res.m, res.l1, res.records[-1].tv_u, res.records[-1].tv_beta]
            for res in results]
    _ensure_dir(config.out_dir)
    _write_csv(os.path.join(config.out_dir, "convergence.csv"),
               ["M", "e_dx", "tv_u", "tv_beta"], rows)
    _write_text_table(os.path.join(config.out_dir, "convergence.txt"),
                      ["M", "e_dx", "TV(u)", "TV(beta)"], rows)
    duration = time.perf_counter() - started
    manifest = _manifest("convergence", config, results, duration)
    write_manifest(os.path.join(config.out_dir, "manifest.json"), manifest)
    return 0 if manifest["all_passed"] else 1


def execute_tv_history(config: RunConfig) -> int:
    started = time.perf_counter()
    setup = build_problem(config)
    if len(config.m_cells) != 1:
        raise ConfigError("tv-history needs a single m_cells value")
    times = config.snapshot_times
    if not times:
        times = tuple(np.linspace(0.0, config.t_final, 7))
    res = run_single(config, setup, config.m_cells[0], times)
    rows = [[t, tvu, tvb] for t, tvu, tvb, _ in res.snapshots]
    _ensure_dir(config.out_dir)
    _write_csv(os.path.join(config.out_dir, "tv_history.csv"),
               ["t", "tv_u", "tv_beta"], rows)
    _write_text_table(os.path.join(config.out_dir, "tv_history.txt"),
                      ["t", "TV(u)", "TV(beta)"], rows)
    tvb_col = [row[2] for row in rows]
    worst = max((b - a for a, b in zip(tvb_col[:-1], tvb_col[1:])),
                default=0.0)
    extra = {"tv_beta_history_monotone": {
        "passed": worst <= TVD_TOL, "value": worst, "threshold": TVD_TOL}}
    duration = time.perf_counter() - started
    manifest = _manifest("tv-history", config, [res], duration, extra)
    write_manifest(os.path.join(config.out_dir, "manifest.json"), manifest)
    return 0 if manifest["all_passed"] else 1


def execute_validate(config: RunConfig, m_cells: int = 50) -> int:
    started = time.perf_counter()
    setup = build_problem(config)
    model = setup.model
    rng = np.random.default_rng(config.seed)
    grid = Grid1D(setup.x_left, setup.x_right, m_cells)

    state0 = sample_initial_data(setup.u0, grid)
    alpha_bar = compute_alpha_bar(state0, grid, model)
    u_range = max(sup_state_bound(grid, alpha_bar, model),
                  float(np.max(np.abs(state0.extended()))))
    sample_xs = np.concatenate([model.spatial.representative_points(),
                                grid.centers])
    report = model.validate_assumptions(sample_xs, u_range)

    property_results = [
        check_fixed_points(model, grid),
        check_beta_tvd(model, grid, rng, n_states=20, n_steps=20),
        check_monotonicity(model, grid, rng, n_pairs=25, n_steps=20),
        check_l1_contraction(model, grid, rng, n_pairs=25, n_steps=20),
        check_entropy(model, grid, rng, n_states=3, n_steps=30),
        check_flux_equality(model, rng, n_trials=2000,
                            x_range=max(abs(setup.x_left), abs(setup.x_right)),
                            u_range=u_range),
        check_oracle_agreement(model, rng, n_trials=50, n_samples=4000,
                               x_range=max(abs(setup.x_left),
                                           abs(setup.x_right)),
                               u_range=u_range),
    ]

    lines = [f"flux model: {model.name}",
             f"u range sampled: [-{u_range:g}, {u_range:g}]",
             "", "structural assumptions:"]
    lines += ["  " + line for line in report.lines()]
    lines += ["", "discrete scheme properties (seeded randomized):"]
    lines += ["  " + res.line() for res in property_results]
    all_passed = report.passed and all(r.passed for r in property_results)
    lines += ["", f"overall: {'PASS' if all_passed else 'FAIL'}"]
    text = "\n".join(lines) + "\n"
    print(text, end="")

    _ensure_dir(config.out_dir)
    with open(os.path.join(config.out_dir, "validate_report.txt"), "w",
              encoding="utf-8") as handle:
        handle.write(text)
    checks = {f"assumption.{c.name}": {"passed": bool(c.passed),
                                       "value": c.worst, "threshold": None}
              for c in report.checks}
    checks.update({f"property.{r.name}": {"passed": bool(r.passed),
                                          "value": r.worst,
                                          "threshold": None}
                   for r in property_results})
    duration = time.perf_counter() - started
    payload = {
        "command": "validate",
        "version": __version__,
        "config": config.echo(),
        "seed": config.seed,
        "duration_seconds": duration,
        "checks": checks,
        "all_passed": all_passed,
    }
    write_manifest(os.path.join(config.out_dir, "manifest.json"), payload)
    return 0 if all_passed else 1
