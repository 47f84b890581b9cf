"""Command-line driver.

    chainwave <command> --config <path> [--out <path>]

Commands: simulate, oracle-compare, bounds-check, asymptotics, growth,
specfun-selftest.  Configs are single JSON files; every tolerance is
explicit in the file (with documented defaults), so a config rerun is
byte-identical.  Exit codes: 0 all checks passed, 1 a check failed,
2 invalid config, 3 quadrature did not converge.

Heavy imports happen inside ``run`` so that CHAINWAVE_THREADS can cap the
BLAS/OpenMP pools before numpy is loaded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

_COMMANDS = (
    "simulate",
    "oracle-compare",
    "bounds-check",
    "asymptotics",
    "growth",
    "specfun-selftest",
)


@dataclass
class RunConfig:
    """Parsed and defaulted run configuration."""

    command: str
    raw: dict[str, Any]
    output_path: str

    @classmethod
    def from_file(cls, path: str | Path, out_override: str | None = None) -> "RunConfig":
        raw = json.loads(Path(path).read_text())
        command = raw.get("command", "")
        output = out_override or raw.get("output_path") or f"{command or 'run'}.csv"
        return cls(command=command, raw=raw, output_path=output)


def _parse_grid(grid_spec, integer: bool = False) -> list:
    if isinstance(grid_spec, list):
        return [int(v) if integer else float(v) for v in grid_spec]
    if isinstance(grid_spec, dict):
        start, stop = float(grid_spec["start"]), float(grid_spec["stop"])
        count = int(grid_spec["count"])
        scale = grid_spec.get("scale", "linear")
        if count < 1:
            raise ValueError("grid count must be >= 1")
        if scale == "linear":
            vals = [start + (stop - start) * i / max(count - 1, 1) for i in range(count)]
        elif scale == "geometric":
            if start <= 0 or stop <= 0:
                raise ValueError("geometric grid requires positive endpoints")
            ratio = (stop / start) ** (1.0 / max(count - 1, 1))
            vals = [start * ratio**i for i in range(count)]
        else:
            raise ValueError(f"unknown grid scale {scale!r}")
        return [int(round(v)) for v in vals] if integer else vals
    raise ValueError("grid must be a list or a {start, stop, count, scale} object")


def validate(config: RunConfig) -> list[str]:
    """All config violations; empty list means the config is runnable."""
    problems: list[str] = []
    raw = config.raw
    if config.command not in _COMMANDS:
        problems.append(
            f"unknown command {config.command!r}; expected one of {', '.join(_COMMANDS)}"
        )
        return problems
    if config.command == "specfun-selftest":
        return problems

    params_raw = raw.get("params", {})
    omega0 = float(params_raw.get("omega0", 0.0))
    omega1 = float(params_raw.get("omega1", 0.0))
    if omega1 <= 0.0:
        problems.append("omega1 must be positive")
    if omega0 < 0.0:
        problems.append("omega0 must be nonnegative")

    if config.command == "growth":
        eps = raw.get("epsilon", 0.4)
        if not 0.0 < float(eps) < 0.5:
            problems.append("epsilon must lie in (0, 1/2)")
        if omega0 != 0.0:
            problems.append("growth requires omega0 = 0 (unpinned chain)")
        return problems

    data = raw.get("initial_data", {})
    has_state = "state" in data
    has_closed = "closed_form" in data
    if has_state == has_closed:
        problems.append("initial_data must contain exactly one of 'state' or 'closed_form'")
    if has_closed and config.command in ("oracle-compare", "bounds-check", "asymptotics"):
        problems.append(
            f"{config.command} requires inline 'state' data (closed forms have "
            "singular or infinite-energy lattice realizations)"
        )
    if has_closed:
        cf = data["closed_form"]
        name = cf.get("name", "")
        if name == "alpha-family":
            if not 0.0 < float(cf.get("alpha", -1.0)) < 0.5:
                problems.append("alpha-family requires alpha in (0, 1/2)")
        elif name == "epsilon-family":
            if not 0.0 < float(cf.get("epsilon", -1.0)) < 0.5:
                problems.append("epsilon-family requires epsilon in (0, 1/2)")
        else:
            problems.append(f"unknown closed form {name!r}")
        if omega0 != 0.0:
            problems.append(
                f"{name or 'closed-form data'} is defined for the unpinned chain; "
                "set omega0 = 0"
            )

    try:
        t_grid = _parse_grid(raw.get("t_grid", []))
        if not t_grid:
            problems.append("t_grid must be non-empty")
    except (KeyError, ValueError) as exc:
        problems.append(f"bad t_grid: {exc}")
        t_grid = []
    try:
        k_grid = _parse_grid(raw.get("k_grid", []), integer=True)
        if not k_grid and config.command in ("simulate", "oracle-compare", "asymptotics"):
            problems.append("k_grid must be non-empty")
    except (KeyError, ValueError) as exc:
        problems.append(f"bad k_grid: {exc}")
        k_grid = []

    solver = raw.get("solver", {})
    mesh = int(solver.get("mesh_points", 64))
    if mesh < 16 or mesh & (mesh - 1):
        problems.append("solver.mesh_points must be a power of two >= 16")
    if float(solver.get("tolerance", 1e-11)) <= 0.0:
        problems.append("solver.tolerance must be positive")

    if config.command == "oracle-compare" and omega1 > 0.0:
        oracle = raw.get("oracle", {})
        if "radius" not in oracle or "dt" not in oracle:
            problems.append("oracle-compare requires oracle.radius and oracle.dt")
        else:
            radius = int(oracle["radius"])
            dt = float(oracle["dt"])
            omega0_prime = math.hypot(omega0, 2.0 * omega1)
            if dt <= 0.0 or dt * omega0_prime > 0.5:
                problems.append(
                    f"oracle.dt violates stability: dt * omega0' must be <= 0.5"
                )
            if t_grid and k_grid:
                k_max = max(abs(k) for k in k_grid)
                t_max = max(t_grid)
                needed = k_max + int(math.ceil(omega1 * t_max)) + 50
                if radius < needed:
                    problems.append(
                        f"oracle.radius {radius} is below the horizon rule; "
                        f"minimal admissible radius is {needed}"
                    )

    if config.command == "asymptotics":
        regime = raw.get("regime", "fixed-k")
        if regime not in ("fixed-k", "ray"):
            problems.append("asymptotics.regime must be 'fixed-k' or 'ray'")
        if regime == "ray" and float(raw.get("beta", 0.0)) <= 0.0:
            problems.append("ray asymptotics requires beta > 0")

    return problems


def _build_params(raw: dict):
    from .model import ChainParams

    p = raw.get("params", {})
    return ChainParams(
        omega0=float(p.get("omega0", 0.0)),
        omega1=float(p["omega1"]),
        spacing=float(p.get("spacing", 1.0)),
    )


def _build_spectrum(raw: dict):
    from . import bounds
    from .model import LatticeState, forward_transform

    data = raw["initial_data"]
    if "state" in data:
        state = LatticeState.from_dict(data["state"])
        return forward_transform(state), state
    cf = data["closed_form"]
    if cf["name"] == "alpha-family":
        return bounds.alpha_spectrum(float(cf["alpha"])), None
    return bounds.epsilon_spectrum(float(cf["epsilon"])), None


def _build_solver_cfg(raw: dict):
    from .solver import SolverConfig

    s = raw.get("solver", {})
    return SolverConfig(
        mesh_points=int(s.get("mesh_points", 64)),
        tolerance=float(s.get("tolerance", 1e-11)),
        max_mesh=int(s.get("max_mesh", 1 << 24)),
    )


def _cmd_simulate(config: RunConfig) -> tuple[list, dict, bool]:
    from .solver import solve_grid

    raw = config.raw
    params = _build_params(raw)
    spectrum, _ = _build_spectrum(raw)
    cfg = _build_solver_cfg(raw)
    times = _parse_grid(raw["t_grid"])
    sites = _parse_grid(raw["k_grid"], integer=True)
    grid = solve_grid(spectrum, params, times, sites, cfg)
    rows = list(grid.rows())
    summary = {
        "max_abs_q": max((abs(r[2]) for r in rows), default=0.0),
        "rows": len(rows),
    }
    return rows, summary, True


def _cmd_oracle_compare(config: RunConfig) -> tuple[list, dict, bool]:
    from .model import LatticeState
    from .oracle import OracleConfig, integrate_snapshots
    from .reports import write_csv
    from .solver import solve_grid

    raw = config.raw
    params = _build_params(raw)
    spectrum, state = _build_spectrum(raw)
    if state is None:
        raise ValueError("oracle-compare requires inline state data")
    cfg = _build_solver_cfg(raw)
    times = sorted(_parse_grid(raw["t_grid"]))
    sites = sorted({int(k) for k in _parse_grid(raw["k_grid"], integer=True)})
    ocfg = OracleConfig(radius=int(raw["oracle"]["radius"]), dt=float(raw["oracle"]["dt"]))
    tol = float(raw.get("tolerances", {}).get("oracle_match", 1e-6))

    grid = solve_grid(spectrum, params, times, sites, cfg)
    snapshots = integrate_snapshots(state, params, times, ocfg)
    rows = []
    worst = 0.0
    oracle_rows = []
    for i, t in enumerate(times):
        snap = snapshots[i]
        for j, k in enumerate(sites):
            exact = float(grid.values[i, j])
            approx = snap.q_at(k)
            worst = max(worst, abs(exact - approx))
            rows.append((t, k, exact))
            oracle_rows.append((t, k, approx))
    oracle_path = Path(config.output_path).with_suffix(".oracle.csv")
    write_csv(oracle_path, ["t", "k", "q"], oracle_rows)
    summary = {"max_residual": worst, "oracle_csv": str(oracle_path), "tolerance": tol}
    return rows, summary, worst <= tol


def _cmd_bounds_check(config: RunConfig) -> tuple[list, dict, bool]:
    from .bounds import energy_sup_bound, sqrt_growth_bound
    from .model import energy
    from .solver import windowed_sup

    raw = config.raw
    params = _build_params(raw)
    spectrum, state = _build_spectrum(raw)
    cfg = _build_solver_cfg(raw)
    times = _parse_grid(raw["t_grid"])
    rows = []
    ok = True
    worst_residual = math.inf
    for t in times:
        m = windowed_sup(spectrum, params, t, cfg)
        if params.pinned:
            if state is None:
                raise ValueError("energy bound requires inline state data")
            bound_name = "energy-sup"
            bound = energy_sup_bound(params, energy(state, params))
        else:
            if state is None:
                raise ValueError("bounds-check requires inline state data")
            bound_name = "sqrt-growth"
            bound = sqrt_growth_bound(t, state.q_norm(), state.p_norm(), params)
        residual = bound - m
        worst_residual = min(worst_residual, residual)
        ok = ok and residual >= -1e-9
        rows.append((t, m, bound_name, bound, residual))
    summary = {"min_bound_margin": worst_residual}
    return rows, summary, ok


def _cmd_asymptotics(config: RunConfig) -> tuple[list, dict, bool]:
    from .asymptotics import (
        classify_ray,
        fit_decay_exponent,
        fixed_k_asymptote_pinned,
        fixed_k_asymptote_unpinned,
        ray_asymptote,
        ray_geometry,
    )
    from .solver import solve_at

    raw = config.raw
    params = _build_params(raw)
    spectrum, _ = _build_spectrum(raw)
    cfg = _build_solver_cfg(raw)
    regime = raw.get("regime", "fixed-k")
    rows = []
    summary: dict[str, Any] = {"regime": regime}
    ok = True

    if regime == "fixed-k":
        times = sorted(_parse_grid(raw["t_grid"]))
        sites = _parse_grid(raw["k_grid"], integer=True)
        predictor = (
            fixed_k_asymptote_pinned if params.pinned else fixed_k_asymptote_unpinned
        )
        label = "fixed-k-pinned" if params.pinned else "fixed-k-unpinned"
        for k in sites:
            scaled = []
            for t in times:
                exact = solve_at(spectrum, params, t, k, cfg)
                pred = predictor(spectrum, params, k, t)
                res = exact - pred
                scaled.append(abs(res) * math.sqrt(t))
                rows.append((label, k, t, exact, pred, res, scaled[-1]))
            ok = ok and scaled[-1] <= scaled[0] + 1e-12
        summary["final_scaled_residual"] = rows[-1][6] if rows else 0.0
    else:
        beta = float(raw["beta"])
        sites = sorted({abs(int(k)) for k in _parse_grid(raw["k_grid"], integer=True)})
        kind = classify_ray(beta, params)
        summary["classification"] = kind
        values = []
        scaled = []
        geo = ray_geometry(beta, params) if kind == "supersonic" else None
        for k in sites:
            t = beta * k
            exact = solve_at(spectrum, params, t, k, cfg)
            pred = ray_asymptote(spectrum, geo, k, params) if geo is not None else 0.0
            res = exact - pred
            values.append(exact)
            scaled.append(abs(res) * math.sqrt(k))
            rows.append((f"ray-{kind}", k, t, exact, pred, res, scaled[-1]))
        if kind == "supersonic":
            ok = scaled[-1] <= scaled[0] + 1e-12
        elif kind == "subsonic":
            floor = float(raw.get("tolerances", {}).get("subsonic_floor", 1e-6))
            ok = abs(values[-1]) <= floor
        else:
            fit = fit_decay_exponent(sites, values)
            summary["fitted_exponent"] = fit.exponent
            summary["r_squared"] = fit.r_squared
            ok = fit.saturated or fit.exponent > 0.0
    return rows, summary, ok


def _cmd_growth(config: RunConfig) -> tuple[list, dict, bool]:
    from .bounds import (
        growth_main_integral_gamma,
        growth_main_integral_quadrature,
    )
    from .specfun import gamma_fn, lower_incomplete_gamma

    raw = config.raw
    params = _build_params(raw)
    eps = float(raw.get("epsilon", 0.4))
    delta = eps + 0.5
    times = sorted(_parse_grid(raw.get("t_grid", [10.0, 100.0, 1000.0])))
    identity_tol = float(raw.get("tolerances", {}).get("identity_rel", 1e-8))
    rows = []
    ok = True
    worst = 0.0
    for t in times:
        lhs = growth_main_integral_quadrature(t, delta)
        rhs = growth_main_integral_gamma(t, delta)
        rel = abs(lhs - rhs) / abs(rhs)
        worst = max(worst, rel)
        ok = ok and rel <= identity_tol
        rows.append((t, delta, lhs, rhs, rel))
    t_limit = float(raw.get("limit_t", 1e6))
    gamma_ratio = lower_incomplete_gamma(delta, math.log(t_limit) / 2.0) / gamma_fn(delta)
    summary: dict[str, Any] = {
        "delta": delta,
        "max_identity_rel_err": worst,
        "gamma_ratio_at_limit_t": gamma_ratio,
        "limit_value": gamma_fn(delta) / math.sqrt(2.0 * params.omega1),
    }

    stress = raw.get("full_chain")
    if stress:
        from .bounds import epsilon_spectrum
        from .solver import SolverConfig, solve_at

        t_stress = float(stress.get("t", 1e6))
        rel_tol = float(stress.get("rel_tol", 0.1))
        cfg = SolverConfig(
            mesh_points=64,
            tolerance=float(stress.get("abs_tol", 1e-2)),
            max_mesh=int(stress.get("max_mesh", 1 << 24)),
        )
        spectrum = epsilon_spectrum(eps)
        q0 = solve_at(spectrum, params, t_stress, 0, cfg)
        ratio = q0 * math.log(t_stress) ** delta / math.sqrt(t_stress)
        target = gamma_fn(delta) / math.sqrt(2.0 * params.omega1)
        rel = abs(ratio - target) / target
        summary["full_chain"] = {
            "t": t_stress,
            "q0": q0,
            "scaled_ratio": ratio,
            "target": target,
            "rel_err": rel,
        }
        ok = ok and rel <= rel_tol
    return rows, summary, ok


def _cmd_specfun_selftest(config: RunConfig) -> tuple[list, dict, bool]:
    from .bounds import alpha_normalization
    from .quadrature import tanh_sinh
    from .specfun import (
        bohmer_quadrature,
        bohmer_sine_integral,
        dirichlet_constant_check,
        gamma_fn,
    )

    import numpy as np

    rows = []

    def check(name: str, value: float, reference: float, tol: float) -> bool:
        err = abs(value - reference)
        rows.append((name, value, reference, err, tol))
        return err <= tol

    ok = check("gamma_half", gamma_fn(0.5), math.sqrt(math.pi), 1e-13)
    ok &= check("dirichlet_pi_half", dirichlet_constant_check(), math.pi / 2.0, 1e-6)
    ok &= check(
        "bohmer_quarter", bohmer_sine_integral(0.25), bohmer_quadrature(0.25), 1e-6
    )

    # beta-identity normalization: quadrature of the defining integral
    # against the closed form for a_alpha
    for alpha in (0.1, 0.25, 0.4):
        integral = 2.0 * tanh_sinh(
            lambda lam: np.sin(lam / 2.0) ** (-2.0 * alpha), 0.0, math.pi,
            tolerance=1e-11,
        )
        ok &= check(
            f"alpha_normalization_{alpha}",
            alpha_normalization(alpha) ** 2 * integral,
            1.0,
            1e-8,
        )
    summary = {"checks": len(rows)}
    return rows, summary, bool(ok)


_HANDLERS = {
    "simulate": (_cmd_simulate, ["t", "k", "q"]),
    "oracle-compare": (_cmd_oracle_compare, ["t", "k", "q"]),
    "bounds-check": (
        _cmd_bounds_check,
        ["t", "M_windowed", "bound_name", "bound_value", "residual"],
    ),
    "asymptotics": (
        _cmd_asymptotics,
        ["regime", "k", "t", "exact", "predicted", "residual", "scaled_residual"],
    ),
    "growth": (_cmd_growth, ["t", "delta", "lhs_quadrature", "rhs_gamma", "rel_err"]),
    "specfun-selftest": (
        _cmd_specfun_selftest,
        ["check", "value", "reference", "abs_err", "tolerance"],
    ),
}


def run(config: RunConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    from .quadrature import ConvergenceError
    from .reports import summary_path_for, write_csv, write_summary

    problems = validate(config)
    if problems:
        for p in problems:
            print(f"config error: {p}", file=sys.stderr)
        return 2

    handler, header = _HANDLERS[config.command]
    try:
        rows, summary, passed = handler(config)
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    summary_out = {
        "command": config.command,
        "params": config.raw.get("params", {}),
        "pass": bool(passed),
        **summary,
    }
    write_csv(config.output_path, header, rows)
    write_summary(summary_path_for(config.output_path), summary_out)
    print(json.dumps(summary_out, sort_keys=True))
    return 0 if passed else 1


def main(argv: list[str] | None = None) -> int:
    threads = os.environ.get("CHAINWAVE_THREADS")
    if threads:
        # must land before numpy initializes its thread pools
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)

    parser = argparse.ArgumentParser(
        prog="chainwave",
        description="Harmonic-chain spectral solver, bound checks and asymptotics",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", default=None, help="override the output CSV path")
    args = parser.parse_args(argv)

    config = RunConfig.from_file(args.config, out_override=args.out)
    if config.raw.get("command") not in (None, args.command):
        print(
            f"config error: config file declares command "
            f"{config.raw.get('command')!r} but {args.command!r} was requested",
            file=sys.stderr,
        )
        return 2
    config.command = args.command
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
