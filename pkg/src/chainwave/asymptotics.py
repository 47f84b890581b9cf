"""Closed-form long-time and ray asymptotics of the chain, plus the
empirical decay-exponent fits used to verify them.

Three regimes are covered:

* pinned chain, fixed site, t -> infinity: two t^(-1/2) wave trains at
  the band edges omega0 and omega0' = sqrt(omega0^2 + 4 omega1^2);
* unpinned chain, fixed site: a constant plateau P(0)/(2 omega1) plus a
  single t^(-1/2) train at 2 omega1, tied to the Bessel time integral
  int_0^t J_{2k}(2 omega1 s) ds;
* rays t = beta |k|: classified by gamma(beta) = beta^2 omega1^2 - 1 -
  beta omega0 into supersonic (two stationary points, k^(-1/2) amplitude
  with explicit coefficients), critical and subsonic decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChainParams, SpectralPair, _extract_real, dispersion
from .quadrature import gauss_legendre_panels
from .solver import SolverConfig, solve_at
from .specfun import bessel_j

#: |gamma(beta)| below this counts as the critical ray
CRITICAL_TOL = 1e-12

#: residual tolerance for the stationary-phase equation h'(mu) = 0
PHASE_RESIDUAL_TOL = 1e-10


def _require_unpinned(params: ChainParams, what: str) -> None:
    if params.omega0 != 0.0:
        raise ValueError(f"{what} requires omega0 = 0")


def ray_discriminant(beta: float, params: ChainParams) -> float:
    """gamma(beta) = beta^2 omega1^2 - 1 - beta omega0."""
    return beta * beta * params.omega1**2 - 1.0 - beta * params.omega0


def classify_ray(beta: float, params: ChainParams) -> str:
    """Trichotomy on gamma(beta): 'supersonic', 'critical' or 'subsonic'."""
    if beta <= 0.0:
        raise ValueError("classify_ray requires beta > 0")
    gamma = ray_discriminant(beta, params)
    if abs(gamma) <= CRITICAL_TOL:
        return "critical"
    return "supersonic" if gamma > 0.0 else "subsonic"


@dataclass(frozen=True)
class RayGeometry:
    """Stationary-phase data of the phase lam + beta omega(lam) on a
    supersonic ray.

    mu_plus/mu_minus are the critical points in (-pi, 0] (cos mu =
    (1 +/- Delta)/(beta omega1)^2, sin mu <= 0); c_plus/c_minus the
    k^(-1/2) amplitudes; h_plus/h_minus the phase values mu + beta
    omega(mu) entering omega_pm(k) = k h_pm +/- pi/4 sign(k).
    """

    beta: float
    gamma: float
    delta: float
    mu_plus: float
    mu_minus: float
    c_plus: float
    c_minus: float
    omega_mu_plus: float
    omega_mu_minus: float
    h_plus: float
    h_minus: float

    def phase(self, branch: int, k: int) -> float:
        """omega_pm(k) for branch +1/-1; odd in k."""
        h = self.h_plus if branch > 0 else self.h_minus
        return k * h + branch * math.pi / 4.0 * float(np.sign(k))


def _phase_derivative(lam: float, beta: float, params: ChainParams) -> float:
    om = dispersion(params, lam)
    return 1.0 + beta * params.omega1**2 * math.sin(lam) / om


def ray_geometry(beta: float, params: ChainParams) -> RayGeometry:
    """Critical points and amplitudes for a supersonic ray.

    At omega0 = 0 the plus branch degenerates: cos(mu_plus) = 1 exactly,
    omega(mu_plus) = 0 and c_plus = 0, so only mu_minus radiates.
    """
    if classify_ray(beta, params) != "supersonic":
        raise ValueError(f"ray beta={beta} is not supersonic for {params}")
    gamma = ray_discriminant(beta, params)
    b2w2 = beta * beta * params.omega1**2
    delta = math.sqrt((b2w2 - 1.0) ** 2 - (beta * params.omega0) ** 2)

    geometry = {}
    for branch, sign in (("plus", +1.0), ("minus", -1.0)):
        x = (1.0 + sign * delta) / b2w2
        if x >= 1.0 - 1e-14:
            # omega0 = 0 degeneracy: silent branch
            mu, om, c = 0.0, 0.0, 0.0
        else:
            mu = -math.acos(x)
            om = dispersion(params, mu)
            c = 0.5 * math.sqrt(beta * om / (2.0 * math.pi * delta))
            residual = _phase_derivative(mu, beta, params)
            if abs(residual) > PHASE_RESIDUAL_TOL:
                raise ArithmeticError(
                    f"phase derivative residual {residual:.3e} at mu_{branch}"
                )
        geometry[branch] = (mu, om, c)

    mu_p, om_p, c_p = geometry["plus"]
    mu_m, om_m, c_m = geometry["minus"]
    return RayGeometry(
        beta=beta,
        gamma=gamma,
        delta=delta,
        mu_plus=mu_p,
        mu_minus=mu_m,
        c_plus=c_p,
        c_minus=c_m,
        omega_mu_plus=om_p,
        omega_mu_minus=om_m,
        h_plus=mu_p + beta * om_p,
        h_minus=mu_m + beta * om_m,
    )


def phase_second_derivative(geo: RayGeometry, branch: int) -> float:
    """h''(mu_pm) = +/- Delta / (beta omega(mu_pm)); sign pattern +/-1."""
    om = geo.omega_mu_plus if branch > 0 else geo.omega_mu_minus
    if om == 0.0:
        raise ValueError("degenerate branch has no second-derivative value")
    return float(branch) * geo.delta / (geo.beta * om)


def ray_asymptote(
    spectrum: SpectralPair, geo: RayGeometry, k: int, params: ChainParams
) -> float:
    """Leading term of q_k(beta |k|) on a supersonic ray.

    (1/sqrt|k|) (F+[Q] - i F-[P/omega]) with
    F_pm[g] = sum_branches c (g(mu) e^{i omega(k)} +/- g(-mu) e^{-i omega(k)});
    real for Hermitian-symmetric spectra.
    """
    if k == 0:
        raise ValueError("ray_asymptote requires k != 0")
    total = 0.0 + 0.0j
    for branch, mu, om_mu, c in (
        (+1, geo.mu_plus, geo.omega_mu_plus, geo.c_plus),
        (-1, geo.mu_minus, geo.omega_mu_minus, geo.c_minus),
    ):
        if c == 0.0:
            continue
        w = geo.phase(branch, k)
        rot = complex(math.cos(w), math.sin(w))
        q_here, q_there = spectrum.Q(mu), spectrum.Q(-mu)
        p_here, p_there = spectrum.P(mu) / om_mu, spectrum.P(-mu) / om_mu
        total += c * (q_here * rot + q_there * rot.conjugate())
        total += -1j * c * (p_here * rot - p_there * rot.conjugate())
    value = total / math.sqrt(abs(k))
    return _extract_real(value, f"ray_asymptote(k={k})")


def fixed_k_asymptote_pinned(
    spectrum: SpectralPair, params: ChainParams, k: int, t: float
) -> float:
    """Two-band t^(-1/2) asymptote of the pinned chain at a fixed site.

    The band edges radiate with phases t omega0 + pi/4 (acoustic, lam = 0)
    and t omega0' - pi/4 (optical, lam = pi); the internal names avoid the
    frequency symbols so the coupling constant cannot be shadowed.
    """
    if params.omega0 <= 0.0:
        raise ValueError("fixed_k_asymptote_pinned requires omega0 > 0")
    if t <= 0.0:
        raise ValueError("requires t > 0")
    w0 = params.omega0
    w0p = params.omega0_prime
    w1 = params.omega1
    q_bottom = _extract_real(spectrum.Q(0.0), "Q(0)")
    p_bottom = _extract_real(spectrum.P(0.0), "P(0)")
    q_top = _extract_real(spectrum.Q(math.pi), "Q(pi)")
    p_top = _extract_real(spectrum.P(math.pi), "P(pi)")
    c1 = math.sqrt(w0 / (2.0 * math.pi)) / w1 * q_bottom
    s1 = math.sqrt(w0 / (2.0 * math.pi)) / (w1 * w0) * p_bottom
    c2 = math.sqrt(w0p / (2.0 * math.pi)) / w1 * q_top
    s2 = math.sqrt(w0p / (2.0 * math.pi)) / (w1 * w0p) * p_top
    phase_acoustic = t * w0 + math.pi / 4.0
    phase_optical = t * w0p - math.pi / 4.0
    parity = -1.0 if k % 2 else 1.0
    return (
        c1 * math.cos(phase_acoustic)
        + s1 * math.sin(phase_acoustic)
        + parity * (c2 * math.cos(phase_optical) + s2 * math.sin(phase_optical))
    ) / math.sqrt(t)


def fixed_k_asymptote_unpinned(
    spectrum: SpectralPair, params: ChainParams, k: int, t: float
) -> float:
    """Plateau P(0)/(2 omega1) plus the band-top t^(-1/2) train at 2 omega1."""
    _require_unpinned(params, "fixed_k_asymptote_unpinned")
    if t <= 0.0:
        raise ValueError("requires t > 0")
    w1 = params.omega1
    p_bottom = _extract_real(spectrum.P(0.0), "P(0)")
    q_top = _extract_real(spectrum.Q(math.pi), "Q(pi)")
    p_top = _extract_real(spectrum.P(math.pi), "P(pi)")
    c = q_top / math.sqrt(math.pi * w1)
    s = p_top / (2.0 * w1 * math.sqrt(math.pi * w1))
    phase = 2.0 * w1 * t - math.pi / 4.0
    parity = -1.0 if k % 2 else 1.0
    return p_bottom / (2.0 * w1) + parity / math.sqrt(t) * (
        c * math.cos(phase) + s * math.sin(phase)
    )


def bessel_time_integral(k: int, t: float, params: ChainParams) -> float:
    """I_k(t) = int_0^t J_{2k}(2 omega1 s) ds for the unpinned chain.

    Equals the spectral integral
    (1/2pi) int_0^{2pi} sin(t omega)/omega e^{-i k lam} dlam and converges
    to 1/(2 omega1) as t grows.
    """
    _require_unpinned(params, "bessel_time_integral")
    if t < 0.0:
        raise ValueError("requires t >= 0")
    if t == 0.0:
        return 0.0
    n = abs(2 * k)
    panels = int(math.ceil(2.0 * params.omega1 * t / math.pi)) + 8
    return gauss_legendre_panels(
        lambda s: np.asarray(bessel_j(n, 2.0 * params.omega1 * s)),
        0.0,
        t,
        panels,
    )


# --------------------------------------------------------------------------
# residual reports and decay-exponent fits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoteReport:
    """Exact value vs closed-form prediction at one grid point."""

    exact: float
    predicted: float
    residual: float
    scaled_residual: float

    @classmethod
    def make(cls, exact: float, predicted: float, scale: float) -> "AsymptoteReport":
        residual = exact - predicted
        return cls(
            exact=exact,
            predicted=predicted,
            residual=residual,
            scaled_residual=residual * scale,
        )


@dataclass(frozen=True)
class FitResult:
    """Least-squares decay exponent of |values| ~ x^(-exponent)."""

    exponent: float
    r_squared: float
    saturated: bool


NOISE_FLOOR = 1e-13


def fit_decay_exponent(xs, values, noise_floor: float = NOISE_FLOOR) -> FitResult:
    """Log-log least squares; saturated when every |value| is below the floor."""
    xs = np.asarray(xs, dtype=float)
    vals = np.abs(np.asarray(values, dtype=float))
    if len(xs) != len(vals) or len(xs) < 2:
        raise ValueError("need at least two samples")
    if np.all(vals < noise_floor):
        return FitResult(exponent=math.inf, r_squared=1.0, saturated=True)
    keep = vals > noise_floor
    lx = np.log(xs[keep])
    ly = np.log(vals[keep])
    if len(lx) < 2:
        return FitResult(exponent=math.inf, r_squared=1.0, saturated=True)
    design = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    fitted = design @ np.array([slope, intercept])
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return FitResult(exponent=-float(slope), r_squared=r2, saturated=False)


def envelope_decay_exponent(
    xs, values, samples_per_bin: int = 8, noise_floor: float = NOISE_FLOOR
) -> FitResult:
    """Decay exponent of the binned envelope max |values|.

    Oscillatory residuals pass through zero, which wrecks pointwise
    log-log fits; the maximum over bins of consecutive samples tracks the
    envelope instead.  Samples are sorted by x and grouped into bins of
    ``samples_per_bin``.
    """
    xs = np.asarray(xs, dtype=float)
    vals = np.abs(np.asarray(values, dtype=float))
    order = np.argsort(xs)
    xs, vals = xs[order], vals[order]
    centers = []
    peaks = []
    for start in range(0, len(xs), samples_per_bin):
        chunk_x = xs[start : start + samples_per_bin]
        chunk_v = vals[start : start + samples_per_bin]
        if len(chunk_x) < max(2, samples_per_bin // 2):
            break  # partial trailing bin underestimates the envelope
        centers.append(float(np.exp(np.mean(np.log(chunk_x)))))
        peaks.append(float(np.max(chunk_v)))
    if len(centers) < 2:
        raise ValueError("not enough samples for an envelope fit")
    return fit_decay_exponent(centers, peaks, noise_floor)


def spatial_decay_exponent(
    spectrum: SpectralPair,
    params: ChainParams,
    t_fixed: float,
    k_list,
    cfg: SolverConfig | None = None,
) -> float:
    """Fitted exponent of |q_k(t_fixed)| against |k|; inf when saturated.

    Saturation (every sample below the 1e-13 noise floor) is the expected
    outcome for superpolynomially decaying profiles once k leaves the
    wave cone.
    """
    ks = [int(k) for k in k_list]
    if any(k == 0 for k in ks):
        raise ValueError("k_list must avoid 0 for a log-log fit")
    vals = [solve_at(spectrum, params, t_fixed, k, cfg) for k in ks]
    return fit_decay_exponent([abs(k) for k in ks], vals).exponent
