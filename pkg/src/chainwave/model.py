"""Physical parameters, lattice states, spectral pairs and the transforms
between them for the one-dimensional harmonic chain.

Displacements q_k from the equilibrium positions x_k = k a satisfy

    q''_k = -omega0^2 q_k + omega1^2 (q_{k+1} - 2 q_k + q_{k-1}),

whose plane-wave modes e^{i k lam} oscillate at the dispersion frequency
omega(lam) = sqrt(omega0^2 + 4 omega1^2 sin^2(lam/2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import graded_half_integral, refine_until

#: imaginary residue above this fraction of the magnitude trips the
#: Hermitian-symmetry assertion when real values are extracted
IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class ChainParams:
    """Chain frequencies and lattice constant.

    ``spacing`` only enters absolute positions x_k = q_k + k * spacing;
    the dynamics of the deviations q is spacing-free.
    """

    omega0: float
    omega1: float
    spacing: float = 1.0

    def __post_init__(self) -> None:
        if self.omega1 <= 0.0:
            raise ValueError("omega1 must be positive")
        if self.omega0 < 0.0:
            raise ValueError("omega0 must be nonnegative")
        if self.spacing <= 0.0:
            raise ValueError("spacing must be positive")

    @property
    def omega0_prime(self) -> float:
        """Top of the dispersion band, sqrt(omega0^2 + 4 omega1^2)."""
        return math.hypot(self.omega0, 2.0 * self.omega1)

    @property
    def pinned(self) -> bool:
        return self.omega0 > 0.0


def dispersion(params: ChainParams, lam: float | np.ndarray) -> float | np.ndarray:
    """omega(lam) = sqrt(omega0^2 + 4 omega1^2 sin^2(lam/2)).

    Even, 2pi-periodic, increasing on [0, pi] from omega0 to omega0_prime.
    """
    s = np.sin(np.asarray(lam, dtype=float) / 2.0)
    out = np.sqrt(params.omega0**2 + 4.0 * params.omega1**2 * s * s)
    return float(out) if np.isscalar(lam) else out


@dataclass(frozen=True)
class LatticeState:
    """Finitely supported displacement/velocity data on the integer lattice.

    ``q[j]`` and ``p[j]`` live at site ``support_min + j``; both arrays
    are frozen after construction (operations return new states).
    """

    support_min: int
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if q.ndim != 1 or p.ndim != 1 or len(q) != len(p):
            raise ValueError("q and p must be 1-d arrays of equal length")
        if len(q) == 0:
            raise ValueError("state must have at least one site")
        q = q.copy()
        p = p.copy()
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def support_max(self) -> int:
        return self.support_min + len(self.q) - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_max + 1)

    def q_norm(self) -> float:
        return float(np.linalg.norm(self.q))

    def p_norm(self) -> float:
        return float(np.linalg.norm(self.p))

    def q_at(self, k: int) -> float:
        j = k - self.support_min
        return float(self.q[j]) if 0 <= j < len(self.q) else 0.0

    def p_at(self, k: int) -> float:
        j = k - self.support_min
        return float(self.p[j]) if 0 <= j < len(self.p) else 0.0

    def to_dict(self) -> dict:
        return {
            "support_min": int(self.support_min),
            "q": [float(v) for v in self.q],
            "p": [float(v) for v in self.p],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeState":
        return cls(
            support_min=int(data["support_min"]),
            q=np.asarray(data["q"], dtype=float),
            p=np.asarray(data["p"], dtype=float),
        )

    @classmethod
    def single_site(cls, k: int = 0, q: float = 0.0, p: float = 0.0) -> "LatticeState":
        return cls(support_min=k, q=np.array([q]), p=np.array([p]))


@dataclass(frozen=True)
class SpectralPair:
    """2pi-periodic spectral data (Q, P), one of three representations.

    ``kind`` is "trig" (trigonometric polynomial with stored coefficients),
    "closed-form" (named analytic expression), or "grid" (samples on a
    uniform lambda-mesh).  ``singular_endpoints`` marks integrable
    |sin(lam/2)|^(-a) singularities at lam in {0, 2pi}, which routes
    quadrature through the power-graded mesh.
    """

    q_fun: Callable[[np.ndarray], np.ndarray]
    p_fun: Callable[[np.ndarray], np.ndarray]
    kind: str
    singular_endpoints: bool = False
    support_min: int | None = None
    q_coeffs: np.ndarray | None = None
    p_coeffs: np.ndarray | None = None
    grid_q: np.ndarray | None = None
    grid_p: np.ndarray | None = None
    label: str = ""

    def Q(self, lam: float | np.ndarray) -> complex | np.ndarray:
        arr = np.asarray(lam, dtype=float)
        out = np.asarray(self.q_fun(np.atleast_1d(arr)), dtype=complex)
        return complex(out[0]) if arr.ndim == 0 else out

    def P(self, lam: float | np.ndarray) -> complex | np.ndarray:
        arr = np.asarray(lam, dtype=float)
        out = np.asarray(self.p_fun(np.atleast_1d(arr)), dtype=complex)
        return complex(out[0]) if arr.ndim == 0 else out


def _trig_eval(coeffs: np.ndarray, support_min: int) -> Callable[[np.ndarray], np.ndarray]:
    idx = np.arange(support_min, support_min + len(coeffs))

    def evaluate(lam: np.ndarray) -> np.ndarray:
        return np.exp(1j * np.outer(lam, idx)) @ coeffs

    return evaluate


def forward_transform(state: LatticeState) -> SpectralPair:
    """Q(lam) = sum_k q_k e^{i k lam} and likewise P, as a trig polynomial."""
    return SpectralPair(
        q_fun=_trig_eval(state.q, state.support_min),
        p_fun=_trig_eval(state.p, state.support_min),
        kind="trig",
        support_min=state.support_min,
        q_coeffs=state.q,
        p_coeffs=state.p,
        label="trig-polynomial",
    )


def grid_pair(q_samples: np.ndarray, p_samples: np.ndarray) -> SpectralPair:
    """Spectral pair sampled on the uniform mesh lam_j = 2 pi j / N.

    Point evaluation interpolates linearly (periodic); coefficient
    extraction goes through the FFT of the stored samples.
    """
    q_samples = np.asarray(q_samples, dtype=complex)
    p_samples = np.asarray(p_samples, dtype=complex)
    if q_samples.shape != p_samples.shape or q_samples.ndim != 1:
        raise ValueError("grid samples must be 1-d arrays of equal length")
    n = len(q_samples)
    mesh = 2.0 * np.pi * np.arange(n + 1) / n

    def interp(samples: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        wrapped = np.concatenate([samples, samples[:1]])

        def evaluate(lam: np.ndarray) -> np.ndarray:
            lam_mod = np.mod(lam, 2.0 * np.pi)
            re = np.interp(lam_mod, mesh, wrapped.real)
            im = np.interp(lam_mod, mesh, wrapped.imag)
            return re + 1j * im

        return evaluate

    return SpectralPair(
        q_fun=interp(q_samples),
        p_fun=interp(p_samples),
        kind="grid",
        grid_q=q_samples,
        grid_p=p_samples,
        label=f"grid({n})",
    )


def _extract_real(value: complex, context: str) -> float:
    if abs(value.imag) > IMAG_RESIDUE_TOL * (1.0 + abs(value)):
        raise ArithmeticError(
            f"{context}: imaginary residue {value.imag:.3e} exceeds tolerance; "
            "spectral data is not Hermitian-symmetric"
        )
    return value.real


def _fourier_coefficient(
    fun: Callable[[np.ndarray], np.ndarray],
    k: int,
    n_start: int,
    tolerance: float = 1e-12,
    n_max: int = 1 << 22,
) -> complex:
    def at(n: int) -> complex:
        lam = 2.0 * np.pi * np.arange(n) / n
        return complex(np.mean(fun(lam) * np.exp(-1j * k * lam)))

    return refine_until(at, n_start, tolerance, n_max)


def inverse_transform(spectrum: SpectralPair, k: int) -> tuple[float, float]:
    """(q_k, p_k) = (1/2pi) int_0^{2pi} (Q, P)(lam) e^{-i k lam} dlam."""
    if spectrum.kind == "grid":
        n = len(spectrum.grid_q)
        if n <= 2 * abs(k):
            raise ValueError(
                f"grid mesh of {n} points cannot resolve coefficient k={k}"
            )
        qc = np.fft.fft(spectrum.grid_q)[k % n] / n
        pc = np.fft.fft(spectrum.grid_p)[k % n] / n
    elif spectrum.singular_endpoints:
        qc = _singular_coefficient(spectrum.q_fun, k)
        pc = _singular_coefficient(spectrum.p_fun, k)
    else:
        n0 = 1 << max(6, int(math.ceil(math.log2(8.0 * (abs(k) + 16.0)))))
        qc = _fourier_coefficient(spectrum.q_fun, k, n0)
        pc = _fourier_coefficient(spectrum.p_fun, k, n0)
    return (
        _extract_real(qc, f"inverse_transform q_{k}"),
        _extract_real(pc, f"inverse_transform p_{k}"),
    )


def _singular_coefficient(
    fun: Callable[[np.ndarray], np.ndarray],
    k: int,
    tolerance: float = 1e-10,
    n_max: int = 1 << 24,
) -> complex:
    """Coefficient extraction for endpoint-singular spectra.

    Splits [0, 2pi] at pi and applies the graded map from each singular
    endpoint; e^{-ik lam} rides along unchanged.
    """

    def at(n: int) -> complex:
        left = graded_half_integral(
            lambda lam: fun(lam) * np.exp(-1j * k * lam), n
        )
        right = graded_half_integral(
            lambda lam: fun(2.0 * np.pi - lam) * np.exp(-1j * k * (2.0 * np.pi - lam)),
            n,
        )
        return (left + right) / (2.0 * np.pi)

    n0 = 1 << max(10, int(math.ceil(math.log2(8.0 * (abs(k) + 16.0)))))
    return refine_until(at, n0, tolerance, n_max)


def energy(state: LatticeState, params: ChainParams) -> float:
    """H = sum p^2/2 + (omega0^2/2) sum q^2 + (omega1^2/2) sum (q_k - q_{k-1})^2.

    Conserved by the dynamics; bonds to the zero field outside the support
    are included.
    """
    bonds = np.diff(state.q, prepend=0.0, append=0.0)
    return float(
        0.5 * np.sum(state.p**2)
        + 0.5 * params.omega0**2 * np.sum(state.q**2)
        + 0.5 * params.omega1**2 * np.sum(bonds**2)
    )


def displacement_transform(state: LatticeState) -> LatticeState:
    """Bond variables z_k = q_{k+1} - q_k, u_k = p_{k+1} - p_k.

    These satisfy the same unpinned chain dynamics; the support widens
    by one site on the left and sum(u) telescopes to zero.
    """
    z = np.diff(np.concatenate([[0.0], state.q, [0.0]]))
    u = np.diff(np.concatenate([[0.0], state.p, [0.0]]))
    return LatticeState(support_min=state.support_min - 1, q=z, p=u)


def total_velocity_sum(state: LatticeState) -> float:
    """sum_k p_k(0) -- the conserved total momentum of the initial data."""
    return float(np.sum(state.p))
