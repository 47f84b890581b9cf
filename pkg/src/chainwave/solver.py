"""Exact evolution of the chain by quadrature of the spectral representation.

Each mode evolves as a harmonic oscillator of frequency omega(lam), so

    q_k(t) = (1/2pi) int_0^{2pi} [Q(lam) cos(t omega) +
                                  P(lam) sin(t omega)/omega] e^{-i k lam} dlam.

Smooth (trig-polynomial or grid) spectra are integrated with the uniform
trapezoid rule, which is spectrally accurate for periodic integrands and
doubles the mesh until two successive values agree; whole site ranges come
out of a single FFT per time slice.  Endpoint-singular closed forms are
routed through the power-graded mesh.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import (
    IMAG_RESIDUE_TOL,
    ChainParams,
    SpectralPair,
    _extract_real,
    dispersion,
)
from .quadrature import ConvergenceError, graded_half_integral, refine_until

#: series/direct switch for sin(t omega)/omega
_SINC_SWITCH = 1e-2
_SINC_TERMS = 8


class EdgeDominanceWarning(UserWarning):
    """Site window too narrow: boundary values are not negligible."""


@dataclass(frozen=True)
class SolverConfig:
    """Mesh controls for the oscillatory quadrature.

    ``mesh_points`` is the floor for the starting mesh (a power of two, so
    coefficient extraction is one FFT); meshes double until two successive
    results differ by less than ``tolerance`` or ``max_mesh`` is hit.
    """

    mesh_points: int = 64
    tolerance: float = 1e-11
    max_mesh: int = 1 << 24

    def __post_init__(self) -> None:
        if self.mesh_points < 16 or self.mesh_points & (self.mesh_points - 1):
            raise ValueError("mesh_points must be a power of two >= 16")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_mesh < self.mesh_points:
            raise ValueError("max_mesh must be >= mesh_points")


@dataclass(frozen=True)
class SolutionGrid:
    """q values on a (times x sites) grid; row-major over times.

    ``p_values`` (momentum companion) is carried only when a caller
    supplies it; no shipped check needs evolved momenta.
    """

    params: ChainParams
    times: tuple[float, ...]
    sites: tuple[int, ...]
    values: np.ndarray
    p_values: np.ndarray | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.times), len(self.sites)):
            raise ValueError("values must have shape (len(times), len(sites))")
        if not np.all(np.isfinite(values)):
            raise ValueError("solution grid contains non-finite values")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def at(self, t_index: int, site: int) -> float:
        return float(self.values[t_index, self.sites.index(site)])

    def rows(self):
        """Yield (t, k, q) in deterministic order: t-major, k ascending."""
        for i, t in enumerate(self.times):
            for j, k in enumerate(self.sites):
                yield t, k, float(self.values[i, j])

    def to_csv(self, path) -> None:
        """Write the grid as ``t,k,q`` rows (deterministic order/format)."""
        from .reports import write_csv

        write_csv(path, ["t", "k", "q"], self.rows())


def sinc_kernel(t: float, omega: float | np.ndarray) -> float | np.ndarray:
    """sin(t omega)/omega, continued through omega = 0 by its power series.

    Below t*omega = 1e-2 an 8-term alternating series in (t omega)^2 is
    used; both branches agree to machine precision at the switch.
    """
    if t < 0.0:
        raise ValueError("sinc_kernel requires t >= 0")
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0.0):
        raise ValueError("sinc_kernel requires omega >= 0")
    z = t * om
    small = z < _SINC_SWITCH
    out = np.empty_like(om)
    if np.any(small):
        z2 = z[small] ** 2
        series = np.zeros_like(z2)
        for m in range(_SINC_TERMS - 1, 0, -1):
            series = (series + (-1.0) ** m / math.factorial(2 * m + 1)) * z2
        out[small] = t * (1.0 + series)
    big = ~small
    if np.any(big):
        out[big] = np.sin(z[big]) / om[big]
    return float(out) if np.isscalar(omega) else out


def evolve_spectrum(spectrum: SpectralPair, params: ChainParams, t: float):
    """Return lam -> Q(lam) cos(t omega) + P(lam) sin(t omega)/omega."""
    if t < 0.0:
        raise ValueError("evolve_spectrum requires t >= 0")

    def evolved(lam: np.ndarray) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        om = dispersion(params, lam)
        return spectrum.Q(lam) * np.cos(t * om) + spectrum.P(lam) * sinc_kernel(t, om)

    return evolved


def mesh_rule(params: ChainParams, t: float, k_max: int) -> int:
    """Power-of-two mesh resolving |k| + t * omega0'/pi oscillations with headroom."""
    budget = 8.0 * (abs(k_max) + t * params.omega0_prime / math.pi + 16.0)
    return 1 << int(math.ceil(math.log2(budget)))


def _mesh_eval(
    spectrum: SpectralPair, params: ChainParams, t: float, n: int
) -> np.ndarray:
    """Evolved spectrum sampled on the uniform n-mesh.

    Trig pairs are synthesized by a zero-padded inverse FFT instead of a
    dense sum; this is exact as long as n exceeds the coefficient span.
    """
    lam = 2.0 * np.pi * np.arange(n) / n
    om = dispersion(params, lam)
    if spectrum.kind == "trig" and len(spectrum.q_coeffs) < n:
        c_q = np.zeros(n, dtype=complex)
        c_p = np.zeros(n, dtype=complex)
        idx = np.mod(np.arange(spectrum.support_min, spectrum.support_min + len(spectrum.q_coeffs)), n)
        np.add.at(c_q, idx, spectrum.q_coeffs)
        np.add.at(c_p, idx, spectrum.p_coeffs)
        q_vals = np.fft.ifft(c_q) * n
        p_vals = np.fft.ifft(c_p) * n
    else:
        q_vals = spectrum.Q(lam)
        p_vals = spectrum.P(lam)
    return q_vals * np.cos(t * om) + p_vals * sinc_kernel(t, om)


def _singular_solve(
    spectrum: SpectralPair,
    params: ChainParams,
    t: float,
    k: int,
    cfg: SolverConfig,
) -> complex:
    """Graded-mesh route for endpoint-singular spectra."""

    def integrand(lam: np.ndarray) -> np.ndarray:
        om = dispersion(params, lam)
        return (
            spectrum.Q(lam) * np.cos(t * om) + spectrum.P(lam) * sinc_kernel(t, om)
        ) * np.exp(-1j * k * lam)

    def at(n: int) -> complex:
        left = graded_half_integral(integrand, n)
        right = graded_half_integral(lambda lam: integrand(2.0 * np.pi - lam), n)
        return (left + right) / (2.0 * np.pi)

    n0 = max(
        cfg.mesh_points,
        1 << int(math.ceil(math.log2(4.0 * (abs(k) + t * params.omega0_prime + 64.0)))),
    )
    return refine_until(at, n0, cfg.tolerance, cfg.max_mesh)


def solve_at(
    spectrum: SpectralPair,
    params: ChainParams,
    t: float,
    k: int,
    cfg: SolverConfig | None = None,
) -> float:
    """q_k(t) with absolute error at the configured tolerance."""
    cfg = cfg or SolverConfig()
    if t < 0.0:
        raise ValueError("solve_at requires t >= 0")
    if spectrum.singular_endpoints:
        value = _singular_solve(spectrum, params, t, k, cfg)
        return _extract_real(value, f"solve_at(k={k}, t={t})")

    def at(n: int) -> complex:
        f = _mesh_eval(spectrum, params, t, n)
        lam = 2.0 * np.pi * np.arange(n) / n
        return complex(np.mean(f * np.exp(-1j * k * lam)))

    n0 = max(cfg.mesh_points, mesh_rule(params, t, abs(k)))
    value = refine_until(at, n0, cfg.tolerance, cfg.max_mesh)
    return _extract_real(value, f"solve_at(k={k}, t={t})")


def solve_grid(
    spectrum: SpectralPair,
    params: ChainParams,
    times,
    sites,
    cfg: SolverConfig | None = None,
) -> SolutionGrid:
    """Solve on a whole (times x sites) grid.

    One mesh evaluation plus one FFT per time slice produces every site at
    once; sites are deduplicated and sorted ascending.
    """
    cfg = cfg or SolverConfig()
    times = [float(t) for t in times]
    sites = sorted({int(k) for k in sites})
    if not times or not sites:
        raise ValueError("times and sites must be non-empty")
    if any(t < 0.0 for t in times):
        raise ValueError("solve_grid requires t >= 0")
    k_max = max(abs(sites[0]), abs(sites[-1]))

    if spectrum.singular_endpoints:
        values = np.empty((len(times), len(sites)))
        for i, t in enumerate(times):
            for j, k in enumerate(sites):
                values[i, j] = solve_at(spectrum, params, t, k, cfg)
        return SolutionGrid(params, tuple(times), tuple(sites), values)

    site_idx = np.asarray(sites)

    def slice_at(t: float):
        def at(n: int) -> np.ndarray:
            if k_max >= n // 2:
                raise ConvergenceError(
                    f"mesh {n} cannot resolve sites up to |k|={k_max}"
                )
            f = _mesh_eval(spectrum, params, t, n)
            coeffs = np.fft.fft(f) / n
            return coeffs[np.mod(site_idx, n)]

        n = max(cfg.mesh_points, mesh_rule(params, t, k_max))
        value = at(n)
        while True:
            if 2 * n > cfg.max_mesh:
                raise ConvergenceError(
                    f"grid solve did not stabilize to {cfg.tolerance:g} "
                    f"within max_mesh={cfg.max_mesh}"
                )
            n *= 2
            refined = at(n)
            if np.max(np.abs(refined - value)) < cfg.tolerance:
                return refined
            value = refined

    values = np.empty((len(times), len(sites)))
    for i, t in enumerate(times):
        row = slice_at(t)
        worst = np.argmax(np.abs(row.imag))
        _extract_real(complex(row[worst]), f"solve_grid(t={t})")
        values[i] = row.real
    return SolutionGrid(params, tuple(times), tuple(sites), values)


def max_norm(grid: SolutionGrid, t_index: int, edge_sites: int = 2) -> float:
    """Windowed sup_k |q_k| at one time slice.

    Warns if the boundary of the site window carries more than 1e-3 of the
    interior maximum, i.e. the window may have clipped the wave front.
    """
    row = np.abs(grid.values[t_index])
    peak = float(np.max(row))
    if peak > 0.0 and len(row) > 2 * edge_sites:
        edge = max(float(np.max(row[:edge_sites])), float(np.max(row[-edge_sites:])))
        if edge > 1e-3 * peak:
            warnings.warn(
                f"window edge value {edge:.3e} exceeds 1e-3 of the interior "
                f"max {peak:.3e} at t={grid.times[t_index]}",
                EdgeDominanceWarning,
                stacklevel=2,
            )
    return peak


def windowed_sup(
    spectrum: SpectralPair,
    params: ChainParams,
    t: float,
    cfg: SolverConfig | None = None,
    window: int | None = None,
) -> float:
    """sup over |k| <= window of |q_k(t)|, window-defaulted past the wave front.

    The fastest mode travels no faster than omega1, so a window of
    1.1 * omega1 * t + 60 sites keeps the boundary values negligible.
    """
    if window is None:
        window = int(math.ceil(1.1 * params.omega1 * t)) + 60
    sites = range(-window, window + 1)
    grid = solve_grid(spectrum, params, [t], sites, cfg)
    return max_norm(grid, 0)
