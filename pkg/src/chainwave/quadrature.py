"""Quadrature kernels shared by the solver and the special functions.

Three families cover every integral in the package:

* uniform trapezoid on the periodic cell [0, 2pi) -- spectrally accurate
  for smooth periodic integrands, refined by mesh doubling;
* power-graded meshes for integrable endpoint singularities of the form
  |sin(lam/2)|^(-a) at lam in {0, 2pi};
* tanh-sinh (double-exponential) rules for non-oscillatory integrals with
  algebraic endpoint singularities, where spectral convergence is wanted
  at modest node counts.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


class ConvergenceError(RuntimeError):
    """Raised when mesh doubling hits its cap before the tolerance is met."""


def refine_until(
    evaluate: Callable[[int], complex],
    n_start: int,
    tolerance: float,
    n_max: int,
) -> complex:
    """Double ``n`` until two successive evaluations agree to ``tolerance``.

    ``evaluate(n)`` must return the quadrature value at resolution ``n``.
    Returns the finer of the last two values.
    """
    value = evaluate(n_start)
    n = n_start
    while 2 * n <= n_max:
        n *= 2
        refined = evaluate(n)
        if abs(refined - value) < tolerance:
            return refined
        value = refined
    raise ConvergenceError(
        f"quadrature did not stabilize to {tolerance:g} within n_max={n_max}"
    )


def periodic_mesh(n: int) -> np.ndarray:
    """Uniform nodes lam_j = 2 pi j / n, j = 0..n-1 (left endpoints)."""
    return 2.0 * np.pi * np.arange(n) / n


def periodic_mean(values: np.ndarray) -> complex:
    """Trapezoid value of (1/2pi) * integral over one period from uniform samples."""
    return complex(np.mean(values))


def graded_mesh(n: int, grade: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and Jacobian for lam = 2 u^grade mapping [0, (pi/2)^(1/grade)] -> [0, pi].

    The map clusters nodes at lam = 0 so that integrands with an
    |sin(lam/2)|^(-a), a < 1/2 singularity become Hoelder-smooth in u.
    Returns ``(u, dlam_du)`` with the u = 0 node included; callers must
    supply the (finite, usually zero) limit of the mapped integrand there.
    """
    length = (np.pi / 2.0) ** (1.0 / grade)
    u = np.linspace(0.0, length, n + 1)
    jac = 2.0 * grade * u ** (grade - 1)
    return u, jac


def graded_half_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    n: int,
    grade: int = 4,
) -> complex:
    """Integrate f(lam) over [0, pi] with the lam = 2 u^grade grading.

    ``integrand`` is evaluated only at lam > 0; the u = 0 contribution is
    taken as zero, valid whenever f(lam) * dlam/du -> 0, which holds for
    every shipped closed form (|sin|^(-a) with a < 1/2 against the
    u^(grade-1) Jacobian).
    """
    u, jac = graded_mesh(n, grade)
    lam = 2.0 * u**grade
    vals = np.zeros(len(u), dtype=complex)
    vals[1:] = integrand(lam[1:]) * jac[1:]
    return complex(np.trapezoid(vals, u))


def tanh_sinh_pairs(level: int, u_max: float = 5.0) -> tuple[np.ndarray, np.ndarray]:
    """Double-exponential node pairs for integrals over (0, 1).

    Returns ``(d, w)`` where ``d[j]`` is the distance of the j-th node
    from its *nearer* endpoint and ``w[j]`` its weight; each entry stands
    for the symmetric pair {d_j, 1 - d_j} except ``d[0] = 1/2`` (the
    center node, to be counted once).  Distances are computed as
    exp(-2s)/(1 + exp(-2s)) rather than (1 - tanh s)/2, which keeps full
    relative precision down to d ~ 1e-100 -- essential when the integrand
    has an endpoint singularity.
    """
    h = u_max / (1 << level)
    u = np.arange(0, (1 << level) + 1) * h
    s = np.pi / 2.0 * np.sinh(u)
    e = np.exp(-2.0 * s)
    d = e / (1.0 + e)
    w = h * np.pi * np.cosh(u) * e / (1.0 + e) ** 2
    keep = (d > 0.0) & (w > 1e-300)
    return d[keep], w[keep]


def tanh_sinh(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tolerance: float = 1e-12,
    max_level: int = 12,
) -> float:
    """Integrate f over (a, b), allowing algebraic endpoint singularities.

    Levels are doubled until two successive values agree to ``tolerance``
    (absolute, scaled by the running magnitude).  The integrand is never
    evaluated at the endpoints themselves.
    """
    scale = b - a
    previous = None
    for level in range(6, max_level + 1):
        d, w = tanh_sinh_pairs(level)
        left = np.sum(f(a + scale * d[1:]) * w[1:])
        right = np.sum(f(b - scale * d[1:]) * w[1:])
        center = f(np.array([a + 0.5 * scale]))[0] * w[0]
        value = float((left + right + center) * scale)
        if previous is not None and abs(value - previous) <= tolerance * max(
            1.0, abs(value)
        ):
            return value
        previous = value
    raise ConvergenceError(
        f"tanh-sinh quadrature did not stabilize to {tolerance:g} "
        f"by level {max_level}"
    )


_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre_panels(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n_panels: int,
    n_nodes: int = 16,
) -> float:
    """Composite Gauss-Legendre rule; panels must resolve the oscillation."""
    if n_nodes not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[n_nodes] = np.polynomial.legendre.leggauss(n_nodes)
    x, w = _LEGENDRE_CACHE[n_nodes]
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(f(nodes.ravel()).reshape(nodes.shape) * w[None, :] * half[:, None]))
