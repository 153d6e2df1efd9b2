"""Observable extraction from grid fields, plus the exponent-hierarchy residual.

Coordinate bookkeeping for density matrices rho(y, z): the physical pair is
tau = (z + y)/2, tau' = (z - y)/2, so d tau d tau' = (1/2) dy dz. Every trace-like
sum below carries that Jacobian 1/2, and the diagonal density lives on the
y = 0 slice with p(tau) = rho(0, 2 tau).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import ComplexField1D, ComplexField2D
from .gaussian import GaussianParams
from .scenario import InvalidParameterError, Scenario


@dataclass
class ObservableSample:
    t: float
    coherence_length: float
    ensemble_width: float
    purity: float
    norm: float                      # trace for rho, L2 norm for wavefunctions
    flags: tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)


def trace_of(f: ComplexField2D) -> complex:
    """Trace = (1/2) * sum_z rho(0, z) dz; y = 0 sits at row n_y // 2."""
    row = f.values[f.grid.n_y // 2, :]
    return complex(0.5 * np.sum(row) * f.grid.axis_z.spacing)


def purity(f: ComplexField2D) -> float:
    """tr(rho^2) = (1/2) * sum |rho|^2 dy dz (hermiticity folds the double trace
    into a plain square sum)."""
    g = f.grid
    val = 0.5 * np.sum(np.abs(f.values) ** 2) * g.axis_y.spacing * g.axis_z.spacing
    return float(val)


def purity_gaussian(p: GaussianParams) -> float:
    """Closed form sqrt(alpha / (alpha + gamma)) for the Gaussian family."""
    return math.sqrt(p.alpha / (p.alpha + p.gamma))


def hermiticity_defect(f: ComplexField2D) -> float:
    """max |rho(-y, z) - conj(rho(y, z))| / max |rho|. The periodic reflection
    maps row i to row (n - i) mod n."""
    refl = np.roll(f.values[::-1, :], 1, axis=0)
    denom = float(np.max(np.abs(f.values)))
    if denom == 0.0:
        return 0.0
    return float(np.max(np.abs(refl - np.conj(f.values))) / denom)


def _curvature_fit(x: np.ndarray, vals: np.ndarray, window: int, center: int) -> tuple[float, float]:
    """Quadratic fit of vals around index center; returns (curvature, linear coef)."""
    half = window // 2
    lo, hi = center - half, center + half + 1
    if lo < 0 or hi > len(vals):
        raise InvalidParameterError("fit_window", "window exceeds the grid")
    coeff = np.polyfit(x[lo:hi] - x[center], vals[lo:hi], 2)
    return 2.0 * float(coeff[0]), float(coeff[1])


def coherence_from_rho(f: ComplexField2D, fit_window: int = 9) -> float:
    """Off-diagonal 1/e scale: fit -ln|rho(y, z_peak)| = const + c y^2 / 2 over
    the central fit_window points and return 1/sqrt(c)."""
    g = f.grid
    iy0 = g.n_y // 2
    iz_peak = int(np.argmax(np.abs(f.values[iy0, :])))
    cut = np.abs(f.values[:, iz_peak])
    if np.min(cut[iy0 - fit_window // 2: iy0 + fit_window // 2 + 1]) <= 0.0:
        raise InvalidParameterError("rho", "vanishing amplitude inside the fit window")
    c, _ = _curvature_fit(g.axis_y.points(), -np.log(cut), fit_window, iy0)
    if c <= 0.0:
        raise InvalidParameterError("rho", f"non-convex log profile (curvature {c:g})")
    return 1.0 / math.sqrt(c)


def ensemble_width_from_rho(f: ComplexField2D) -> float:
    """Std of the diagonal density: second moment of rho(0, z) over z, halved
    (tau = z/2 on the diagonal)."""
    g = f.grid
    z = g.axis_z.points()
    p = np.real(f.values[g.n_y // 2, :])
    w = np.sum(p)
    if w <= 0.0:
        raise InvalidParameterError("rho", "diagonal has no weight")
    mean = np.sum(z * p) / w
    var = np.sum((z - mean) ** 2 * p) / w
    return 0.5 * math.sqrt(max(var, 0.0))


def ensemble_width_from_a(a: ComplexField1D) -> float:
    """Std of |a|^2 over tau."""
    tau = a.grid.points()
    p = np.abs(a.values) ** 2
    w = np.sum(p)
    if w <= 0.0:
        raise InvalidParameterError("a", "field has no weight")
    mean = np.sum(tau * p) / w
    var = np.sum((tau - mean) ** 2 * p) / w
    return math.sqrt(max(var, 0.0))


def fit_gaussian_alpha_beta(a: ComplexField1D, fit_window: int = 9) -> tuple[float, float]:
    """Extract (alpha, beta) from a Gaussian-like wavefunction.

    alpha is half the curvature of -ln|a| at the peak; beta is minus half the
    curvature of the phase relative to the peak (phase taken as
    angle(a / a_peak) so the window never straddles a branch cut).
    """
    g = a.grid
    i0 = int(np.argmax(np.abs(a.values)))
    amp = np.abs(a.values)
    if amp[i0] <= 0.0:
        raise InvalidParameterError("a", "empty field")
    c_amp, _ = _curvature_fit(g.points(), -np.log(np.maximum(amp, 1e-300)), fit_window, i0)
    rel_phase = np.angle(a.values / a.values[i0])
    c_ph, _ = _curvature_fit(g.points(), rel_phase, fit_window, i0)
    return 0.5 * c_amp, -0.5 * c_ph


# ---------------------------------------------------------------------------
# Exponent hierarchy: y-Taylor coefficients of the density-matrix exponent.
#
# Write rho = exp(Q(y, z) + Gth(y, z)) with Q from the wavefunction product and
# Gth from the decoherence kernel, and expand both in y at fixed z:
# Q_n(z) = d^n/dy^n Q|_{y=0}. For the Gaussian family the wavefunction exponent
# is r(tau) = delta/2 - (alpha + i beta) tau^2, which gives
#   Q_0 = delta - alpha z^2 / 2,  Q_1 = -i beta z,  Q_2 = -alpha,  Q_{n>=3} = 0,
#   Gth_2 = -gamma, all other Gth_n = 0.
# Order n of the master equation then reads
#   dQ_n/dt + dGth_n/dt = (2 i hbar/m) [F'_{n+1} + sum_k C(n,k) F_{k+1} F'_{n-k}]
#                          - (2 Lambda/hbar) delta_{n,2}
# with F = Q + Gth and prime = d/dz. The sum closes at n = 2 because every
# higher coefficient vanishes identically for Gaussians.
# ---------------------------------------------------------------------------

_MAX_ORDER = 2


def _q_coeffs(p: GaussianParams, z: np.ndarray) -> list[np.ndarray]:
    """F_n = Q_n + Gth_n for n = 0..3 on the z grid."""
    q0 = p.delta - 0.5 * p.alpha * z * z + 0j
    q1 = -1j * p.beta * z
    q2 = np.full_like(z, -p.alpha - p.gamma, dtype=np.complex128)
    q3 = np.zeros_like(z, dtype=np.complex128)
    return [q0, q1, q2, q3]


def _q_coeffs_dz(p: GaussianParams, z: np.ndarray) -> list[np.ndarray]:
    """d/dz of F_n, analytic (polynomial in z)."""
    d0 = -p.alpha * z + 0j
    d1 = np.full_like(z, -1j * p.beta, dtype=np.complex128)
    d2 = np.zeros_like(z, dtype=np.complex128)
    d3 = np.zeros_like(z, dtype=np.complex128)
    return [d0, d1, d2, d3]


def qseries_residual(
    params_fn: Callable[[float], GaussianParams],
    s: Scenario,
    n: int,
    t: float,
    z_grid: np.ndarray,
    fd_step: float = 1e-4,
    include_source: bool = True,
) -> float:
    """Max-norm residual of hierarchy order n at time t on z_grid.

    Time derivatives come from central differences of params_fn; z derivatives
    are analytic. include_source=False drops the order-2 decoherence source
    (negative control: the residual then sits at 2 Lambda / hbar).
    """
    if not (0 <= n <= _MAX_ORDER):
        raise InvalidParameterError("n", f"order must be in [0, {_MAX_ORDER}]")
    z = np.asarray(z_grid, dtype=float)

    f_plus = _q_coeffs(params_fn(t + fd_step), z)
    f_minus = _q_coeffs(params_fn(t - fd_step), z)
    lhs = (f_plus[n] - f_minus[n]) / (2.0 * fd_step)

    p = params_fn(t)
    f_now = _q_coeffs(p, z)
    f_dz = _q_coeffs_dz(p, z)

    acc = f_dz[n + 1].astype(np.complex128)
    for k in range(n + 1):
        acc = acc + math.comb(n, k) * f_now[k + 1] * f_dz[n - k]
    rhs = (2j * s.hbar / s.m) * acc
    if n == 2 and include_source:
        rhs = rhs - 2.0 * s.lam / s.hbar

    return float(np.max(np.abs(lhs - rhs)))
