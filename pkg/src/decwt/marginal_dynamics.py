"""Direct integration of the Gaussian parameter flow.

Two drivers share one fixed-step RK4 core: integrate_closed_system evolves the
full (alpha, beta, gamma) set, integrate_prescribed_gamma freezes the
decoherence coupling to a prescribed gamma_l(t) and evolves only (alpha, beta).
delta never enters a right-hand side: normalization pins exp(delta) =
sqrt(2 alpha / pi), and d(delta)/dt = (2 hbar/m) beta is exactly d(ln alpha)/2
along either flow, so delta is reported analytically from alpha. Fixed step
keeps runs bit-reproducible; no adaptive control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import CubicG, build_cubic, gamma_exact
from .scenario import InvalidParameterError, Scenario


class IntegrationError(RuntimeError):
    """Raised when the state leaves its admissible region (alpha <= 0, NaN)."""

    def __init__(self, t: float, message: str):
        self.t = t
        super().__init__(f"t = {t:g}: {message}")


@dataclass(frozen=True)
class GammaModel:
    """Prescribed decoherence coupling gamma_l(t).

    kinds: 'exact-closure' (quadrature closed form), 'linear-short'
    (2 Lambda (t - t0) / hbar), 'linear-long' (late-time tangent with constant
    offset), 'user' (arbitrary callable).
    """

    kind: str
    scenario: Scenario | None = None
    cubic: CubicG | None = None
    t0: float = 0.0
    const: float = 0.0   # linear-long offset
    slope: float = 0.0   # linear slope in t
    fn: Callable[[float], float] | None = None

    @staticmethod
    def exact_closure(s: Scenario, alpha0: float, beta0: float) -> "GammaModel":
        return GammaModel(kind="exact-closure", scenario=s,
                          cubic=build_cubic(s, alpha0, beta0))

    @staticmethod
    def linear_short(s: Scenario, t0: float = 0.0) -> "GammaModel":
        return GammaModel(kind="linear-short", t0=t0, slope=2.0 * s.lam / s.hbar)

    @staticmethod
    def linear_long(s: Scenario, alpha0: float, beta0: float) -> "GammaModel":
        # Offset c2 m^2 / (16 hbar^2): the residue of the early-time memory in
        # the long-time expansion of the exact quadrature. c2 comes from the
        # same cubic that the closed form uses.
        c2 = build_cubic(s, alpha0, beta0).c2
        const = c2 * s.m * s.m / (16.0 * s.hbar * s.hbar)
        return GammaModel(kind="linear-long", const=const, slope=0.5 * s.lam / s.hbar)

    @staticmethod
    def user(fn: Callable[[float], float]) -> "GammaModel":
        return GammaModel(kind="user", fn=fn)


def gamma_model_eval(gm: GammaModel, t: float) -> float:
    if gm.kind == "exact-closure":
        return float(gamma_exact(gm.cubic, gm.scenario, t))
    if gm.kind == "linear-short":
        return gm.slope * (t - gm.t0)
    if gm.kind == "linear-long":
        return gm.const + gm.slope * t
    if gm.kind == "user":
        return gm.fn(t)
    raise InvalidParameterError("kind", f"unknown gamma model {gm.kind!r}")


@dataclass
class ParamTrajectory:
    """Sampled parameter history, delta = ln(2 alpha / pi) / 2 throughout."""

    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


def _check_state(t: float, alpha: float, beta: float) -> None:
    if not (math.isfinite(alpha) and math.isfinite(beta)) or alpha <= 0.0:
        raise IntegrationError(t, f"state left admissible region (alpha = {alpha!r})")


def _delta_of(alpha: np.ndarray) -> np.ndarray:
    return 0.5 * np.log(2.0 * alpha / math.pi)


def integrate_closed_system(
    s: Scenario,
    alpha0: float,
    beta0: float,
    dt: float,
    t_end: float,
    sample_every: int = 1,
) -> ParamTrajectory:
    """RK4 on the closed (alpha, beta, gamma) flow from gamma(0) = 0."""
    if dt <= 0.0:
        raise InvalidParameterError("dt", "must be positive")
    c_ab = 4.0 * s.hbar / s.m     # alpha coupling
    c_b = 2.0 * s.hbar / s.m      # beta coupling
    c_g = 2.0 * s.lam / s.hbar    # gamma source

    def rhs(a, b, g):
        return (c_ab * a * b,
                c_b * (b * b - a * a - a * g),
                c_ab * b * g + c_g)

    n_steps = int(round(t_end / dt))
    if n_steps < 0:
        raise IntegrationError(0.0, "t_end precedes the start time")
    a, b, g = float(alpha0), float(beta0), 0.0
    if a <= 0.0:
        raise InvalidParameterError("alpha0", "must be positive")

    ts, al, be, ga = [0.0], [a], [b], [g]
    for k in range(n_steps):
        k1 = rhs(a, b, g)
        k2 = rhs(a + 0.5 * dt * k1[0], b + 0.5 * dt * k1[1], g + 0.5 * dt * k1[2])
        k3 = rhs(a + 0.5 * dt * k2[0], b + 0.5 * dt * k2[1], g + 0.5 * dt * k2[2])
        k4 = rhs(a + dt * k3[0], b + dt * k3[1], g + dt * k3[2])
        a += (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        b += (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        g += (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        t = (k + 1) * dt
        _check_state(t, a, b)
        if (k + 1) % sample_every == 0 or k + 1 == n_steps:
            ts.append(t); al.append(a); be.append(b); ga.append(g)

    al = np.array(al)
    return ParamTrajectory(np.array(ts), al, np.array(be), np.array(ga), _delta_of(al))


def integrate_prescribed_gamma(
    s: Scenario,
    alpha0: float,
    beta0: float,
    gm: GammaModel,
    dt: float,
    t_end: float,
    sample_every: int = 1,
) -> ParamTrajectory:
    """RK4 on (alpha, beta) with gamma_l(t) prescribed; the gamma column of the
    result reports gamma_l at the sample times."""
    if dt <= 0.0:
        raise InvalidParameterError("dt", "must be positive")
    if alpha0 <= 0.0:
        raise InvalidParameterError("alpha0", "must be positive")
    c_ab = 4.0 * s.hbar / s.m
    c_b = 2.0 * s.hbar / s.m

    def rhs(t, a, b):
        g = gamma_model_eval(gm, t)
        return c_ab * a * b, c_b * (b * b - a * a - a * g)

    n_steps = int(round(t_end / dt))
    if n_steps < 0:
        raise IntegrationError(0.0, "t_end precedes the start time")
    a, b = float(alpha0), float(beta0)

    ts, al, be, ga = [0.0], [a], [b], [gamma_model_eval(gm, 0.0)]
    for k in range(n_steps):
        t = k * dt
        k1 = rhs(t, a, b)
        k2 = rhs(t + 0.5 * dt, a + 0.5 * dt * k1[0], b + 0.5 * dt * k1[1])
        k3 = rhs(t + 0.5 * dt, a + 0.5 * dt * k2[0], b + 0.5 * dt * k2[1])
        k4 = rhs(t + dt, a + dt * k3[0], b + dt * k3[1])
        a += (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        b += (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        t = (k + 1) * dt
        _check_state(t, a, b)
        if (k + 1) % sample_every == 0 or k + 1 == n_steps:
            ts.append(t); al.append(a); be.append(b); ga.append(gamma_model_eval(gm, t))

    al = np.array(al)
    return ParamTrajectory(np.array(ts), al, np.array(be), np.array(ga), _delta_of(al))
