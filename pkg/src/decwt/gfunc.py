"""Environment-mode overlap functions and their structural identities.

The conditional environment amplitude used throughout is the Gaussian family

    phi(q, tau) = (2 pi sigma^2)^(-1/4) exp(-q^2/(4 sigma^2) + i q tau s / sigma),
    s = sqrt(gamma_k / hbar),

whose pair overlap reproduces the decoherence kernel:
K(tau, tau') = int conj(phi(q, tau')) phi(q, tau) dq = exp(-(gamma_k/hbar) y^2 / 2).
Because the phase is linear in tau, every tau-derivative is analytic,
d^n phi / d tau^n = (i q s / sigma)^n phi, and the overlap moments

    g_(n,m)(tau) = int (d^n conj phi)(d^m phi) dq

reduce to Gaussian q-moments evaluated here by trapezoid quadrature. The table
obeys, identically in tau:

    g_(0,0) = 1
    d/dtau g_(n,m) = g_(n+1,m) + g_(n,m+1)
    sum_k C(N,k) g_(N-k,k) = 0          (N-th derivative of g_(0,0))
    g_(m,n) = conj(g_(n,m))
    A = -i hbar g_(0,1) real,  Re g_(0,2) = -g_(1,1)

and the kernel's y-expansion at fixed z is generated by the one-sided column:
K = sum_n g_(0,n) y^n / n! + O(y^{N+1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import ComplexField1D
from .scenario import GridSpec1D, InvalidParameterError


@dataclass(frozen=True)
class ConditionalSampler:
    """Gaussian environment-mode family on a q quadrature grid.

    gamma_k is the kernel curvature the family encodes (static per evaluation;
    time dependence enters by rebuilding the sampler at another gamma_k).
    """

    sigma: float
    gamma_k: float
    hbar: float
    q_grid: GridSpec1D

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise InvalidParameterError("sigma", "must be positive")
        if self.gamma_k < 0.0:
            raise InvalidParameterError("gamma_k", "must be >= 0")
        if not (self.hbar > 0.0):
            raise InvalidParameterError("hbar", "must be positive")
        if self.q_grid.extent < 8.0 * self.sigma:
            raise InvalidParameterError("q_grid", "extent must cover >= 8 sigma")

    @property
    def phase_slope(self) -> float:
        return math.sqrt(self.gamma_k / self.hbar)


def sample_phi(cs: ConditionalSampler, tau: np.ndarray) -> np.ndarray:
    """phi on the (q, tau) tensor grid; shape (n_q, n_tau), unit q-norm."""
    q = cs.q_grid.points()[:, None]
    tau = np.asarray(tau, dtype=float)[None, :]
    norm = (2.0 * math.pi * cs.sigma ** 2) ** -0.25
    return norm * np.exp(-q * q / (4.0 * cs.sigma ** 2)
                         + 1j * q * tau * cs.phase_slope / cs.sigma)


def _dphi(cs: ConditionalSampler, phi: np.ndarray, order: int) -> np.ndarray:
    """Analytic tau-derivative: the phase is linear in tau."""
    q = cs.q_grid.points()[:, None]
    return (1j * q * cs.phase_slope / cs.sigma) ** order * phi


def _quad(cs: ConditionalSampler, integrand: np.ndarray) -> np.ndarray:
    """Trapezoid over q (periodic-uniform grid: plain Riemann sum, the
    integrand decays to ~exp(-32) at the boundary)."""
    return np.sum(integrand, axis=0) * cs.q_grid.spacing


def compute_K(cs: ConditionalSampler, tau: np.ndarray, tau_p: np.ndarray) -> np.ndarray:
    """Pair overlap K(tau, tau') by quadrature; broadcasts over both arguments."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    tau_p = np.atleast_1d(np.asarray(tau_p, dtype=float))
    phi = sample_phi(cs, tau)
    phi_p = sample_phi(cs, tau_p)
    # conj(phi(q,tau')) phi(q,tau), contracted over q
    out = np.einsum("qa,qb->ab", np.conj(phi_p), phi) * cs.q_grid.spacing
    return out.T  # rows tau, columns tau'


@dataclass
class GFunctionTable:
    """g_(n,m)(tau) for all n + m <= order, keyed by (n, m)."""

    order: int
    tau: np.ndarray
    entries: dict = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int]) -> np.ndarray:
        return self.entries[key]


def compute_g_table(cs: ConditionalSampler, tau: np.ndarray, order: int) -> GFunctionTable:
    if not (0 <= order <= 4):
        raise InvalidParameterError("order", "supported table orders are 0..4")
    tau = np.asarray(tau, dtype=float)
    phi = sample_phi(cs, tau)
    derivs = [_dphi(cs, phi, n) for n in range(order + 1)]
    table = GFunctionTable(order=order, tau=tau)
    for n in range(order + 1):
        for m in range(order + 1 - n):
            table.entries[(n, m)] = _quad(cs, np.conj(derivs[n]) * derivs[m])
    return table


def _spectral_ddtau(vals: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """d/dtau on a uniform tau grid via FFT (the table entries are smooth and
    constant-in-tau for this family, so this is exact up to round-off)."""
    n = len(tau)
    span = tau[-1] - tau[0] + (tau[1] - tau[0])
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=span / n)
    return np.fft.ifft(1j * k * np.fft.fft(vals))


@dataclass
class IdentityReport:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold


def verify_g_identities(table: GFunctionTable, cs: ConditionalSampler,
                        threshold: float = 1e-8) -> list[IdentityReport]:
    """Residuals of the structural identities; all should sit at quadrature
    round-off for the Gaussian family."""
    out: list[IdentityReport] = []
    g = table.entries
    N = table.order

    out.append(IdentityReport(
        "normalization g_(0,0) = 1",
        float(np.max(np.abs(g[(0, 0)] - 1.0))), threshold))

    # derivative recursion, checked spectrally on the tau grid
    worst = 0.0
    for (n, m), vals in g.items():
        if n + m >= N:
            continue
        lhs = _spectral_ddtau(vals, table.tau)
        worst = max(worst, float(np.max(np.abs(lhs - g[(n + 1, m)] - g[(n, m + 1)]))))
    out.append(IdentityReport("recursion d g_(n,m) = g_(n+1,m) + g_(n,m+1)", worst, threshold))

    worst = 0.0
    for order in range(1, N + 1):
        acc = sum(math.comb(order, k) * g[(order - k, k)] for k in range(order + 1))
        worst = max(worst, float(np.max(np.abs(acc))))
    out.append(IdentityReport("binomial sums over each diagonal", worst, threshold))

    worst = max(
        float(np.max(np.abs(g[(m, n)] - np.conj(g[(n, m)]))))
        for (n, m) in g
    )
    out.append(IdentityReport("conjugate symmetry g_(m,n) = conj g_(n,m)", worst, threshold))

    if N >= 1:
        out.append(IdentityReport(
            "gauge potential -i hbar g_(0,1) real",
            float(np.max(np.abs(np.imag(-1j * g[(0, 1)])))) * cs.hbar, threshold))
    if N >= 2:
        out.append(IdentityReport(
            "Re g_(0,2) = -g_(1,1)",
            float(np.max(np.abs(np.real(g[(0, 2)]) + g[(1, 1)]))), threshold))
    return out


def reconstruct_from_column(table: GFunctionTable) -> dict:
    """Rebuild every entry from the one-sided column {g_(0,k)} and the
    derivative recursion: g_(n+1,m) = d g_(n,m) - g_(n,m+1)."""
    rebuilt = {(0, m): np.array(table.entries[(0, m)]) for m in range(table.order + 1)}
    for n in range(table.order):
        for m in range(table.order - n):
            d = _spectral_ddtau(rebuilt[(n, m)], table.tau)
            rebuilt[(n + 1, m)] = d - rebuilt[(n, m + 1)]
    return rebuilt


def kernel_from_k_derivative(cs: ConditionalSampler, tau0: float, h: float = 1e-5) -> complex:
    """Centered dK/dy at y = 0, z fixed at 2 tau0: equals (i/hbar) A(tau0)."""
    kp = compute_K(cs, np.array([tau0 + 0.5 * h]), np.array([tau0 - 0.5 * h]))[0, 0]
    km = compute_K(cs, np.array([tau0 - 0.5 * h]), np.array([tau0 + 0.5 * h]))[0, 0]
    return complex((kp - km) / (2.0 * h))


@dataclass
class GaugeReport:
    max_psi_deviation: float
    max_gauge_law_residual: float
    potential_before: np.ndarray
    potential_after: np.ndarray


def gauge_transform(a: ComplexField1D, cs: ConditionalSampler,
                    theta: np.ndarray) -> tuple[ComplexField1D, GaugeReport]:
    """Apply a -> a e^{i theta}, phi -> phi e^{-i theta} and report the gauge
    checks: the product a(tau) phi(q, tau) must be pointwise invariant, and the
    induced potential must shift by -hbar d(theta)/d tau.

    theta is sampled on a's tau grid; its derivative is taken with np.gradient
    (exact for the linear phases used as oracles, second order otherwise).
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != a.values.shape:
        raise InvalidParameterError("theta", "must match the tau grid of a")
    tau = a.grid.points()
    phase = np.exp(1j * theta)

    a_new = ComplexField1D(a.values * phase, a.grid, a.t, a.flags)

    phi = sample_phi(cs, tau)
    phi_new = phi * np.conj(phase)[None, :]
    psi_dev = float(np.max(np.abs(a_new.values[None, :] * phi_new
                                  - a.values[None, :] * phi)))

    theta_dot = np.gradient(theta, a.grid.spacing)
    # induced potential from the transformed modes: analytic product rule
    dphi_new = (_dphi(cs, phi, 1) - 1j * theta_dot[None, :] * phi) * np.conj(phase)[None, :]
    g01_before = _quad(cs, np.conj(phi) * _dphi(cs, phi, 1))
    g01_after = _quad(cs, np.conj(phi_new) * dphi_new)
    pot_before = np.real(-1j * cs.hbar * g01_before)
    pot_after = np.real(-1j * cs.hbar * g01_after)
    law = float(np.max(np.abs(pot_after - (pot_before - cs.hbar * theta_dot))))

    return a_new, GaugeReport(psi_dev, law, pot_before, pot_after)
