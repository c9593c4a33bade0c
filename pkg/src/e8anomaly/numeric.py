"""Double-precision theta functions for spot checks of the modular transformation laws.

These use the classical variable ``v`` (not the normalized root) so that the
laws can be checked exactly as they are usually stated.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

__all__ = [
    "ConvergenceError",
    "NumericPoint",
    "LAWS",
    "theta_value",
    "theta_prime_value",
    "numeric_transform_check",
]

PI = cmath.pi
I = 1j
LAWS = ("theta", "theta1", "theta2", "theta3", "theta-prime", "level-two")
_TAIL = 1e-18


class ConvergenceError(ValueError):
    """The product formulas do not converge fast enough at the requested point."""


@dataclass(frozen=True)
class NumericPoint:
    tau: complex
    v: complex = 0.0

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise ValueError("tau must lie in the upper half plane")


def _nome(tau: complex) -> complex:
    return cmath.exp(2 * PI * I * tau)


def _n_factors(tau: complex, v: complex, budget: int, half: bool) -> int:
    """Smallest n with |q^(n - 1/2 or n)| * max|e^(+-2 pi i v)| below the tail bound."""
    aq = abs(_nome(tau))
    if aq >= 1:
        raise ConvergenceError("|q| >= 1")
    grow = max(abs(cmath.exp(2 * PI * I * v)), abs(cmath.exp(-2 * PI * I * v)), 1.0)
    n = 1
    while (aq ** (n - (0.5 if half else 0.0))) * grow >= _TAIL:
        n += 1
        if n > budget:
            raise ConvergenceError(
                f"product needs more than {budget} factors at tau={tau}, v={v}"
            )
    return n


def theta_value(kind: str, v: complex, tau: complex, budget: int = 400) -> complex:
    q = _nome(tau)
    ep = cmath.exp(2 * PI * I * v)
    em = 1 / ep
    q8 = cmath.exp(2 * PI * I * tau / 8)
    half = kind in ("theta2", "theta3")
    n_max = _n_factors(tau, v, budget, half)
    prod = 1.0 + 0j
    for n in range(1, n_max + 1):
        qn = q**n
        if kind == "theta":
            prod *= (1 - qn) * (1 - ep * qn) * (1 - em * qn)
        elif kind == "theta1":
            prod *= (1 - qn) * (1 + ep * qn) * (1 + em * qn)
        else:
            qh = cmath.exp(2 * PI * I * tau * (n - 0.5))
            s = -1 if kind == "theta2" else 1
            prod *= (1 - qn) * (1 + s * ep * qh) * (1 + s * em * qh)
    if kind == "theta":
        return 2 * q8 * cmath.sin(PI * v) * prod
    if kind == "theta1":
        return 2 * q8 * cmath.cos(PI * v) * prod
    return prod


def theta_prime_value(v: complex, tau: complex, budget: int = 400) -> complex:
    """d/dv theta(v, tau) via the logarithmic derivative of the product."""
    q = _nome(tau)
    n_max = _n_factors(tau, v, budget, False)
    if v == 0:
        q8 = cmath.exp(2 * PI * I * tau / 8)
        prod = 1.0 + 0j
        for n in range(1, n_max + 1):
            prod *= (1 - q**n) ** 3
        return 2 * PI * q8 * prod
    ep = cmath.exp(2 * PI * I * v)
    em = 1 / ep
    logd = PI * cmath.cos(PI * v) / cmath.sin(PI * v)
    for n in range(1, n_max + 1):
        qn = q**n
        logd += -2 * PI * I * ep * qn / (1 - ep * qn) + 2 * PI * I * em * qn / (1 - em * qn)
    return theta_value("theta", v, tau, budget) * logd


def _sqrt_tau_over_i(tau: complex) -> complex:
    # principal branch: Re > 0 on the upper half plane
    return cmath.sqrt(tau / I)


def _level_two(which: str, tau: complex, budget: int) -> complex:
    t1 = theta_value("theta1", 0, tau, budget)
    t2 = theta_value("theta2", 0, tau, budget)
    t3 = theta_value("theta3", 0, tau, budget)
    if which == "delta1":
        return (t2**4 + t3**4) / 8
    if which == "eps1":
        return t2**4 * t3**4 / 16
    if which == "delta2":
        return -(t1**4 + t3**4) / 8
    return t1**4 * t3**4 / 16


def numeric_transform_check(law: str, p: NumericPoint, terms: int = 400) -> float:
    """Max of |LHS - RHS| over the T (tau+1) and S (-1/tau) parts of a law."""
    if law not in LAWS:
        raise ValueError(f"unknown law {law!r}")
    tau, v = complex(p.tau), complex(p.v)
    if tau.imag < 1:
        raise ConvergenceError(f"Im tau = {tau.imag} < 1: outside the supported region")
    s_tau = -1 / tau
    root = _sqrt_tau_over_i(tau)
    gauss = cmath.exp(PI * I * tau * v * v)
    e8th = cmath.exp(PI * I / 4)
    th = lambda k, vv, tt: theta_value(k, vv, tt, terms)  # noqa: E731
    if law == "theta":
        r1 = th("theta", v, tau + 1) - e8th * th("theta", v, tau)
        r2 = th("theta", v, s_tau) - (1 / I) * root * gauss * th("theta", tau * v, tau)
    elif law == "theta1":
        r1 = th("theta1", v, tau + 1) - e8th * th("theta1", v, tau)
        r2 = th("theta1", v, s_tau) - root * gauss * th("theta2", tau * v, tau)
    elif law == "theta2":
        r1 = th("theta2", v, tau + 1) - th("theta3", v, tau)
        r2 = th("theta2", v, s_tau) - root * gauss * th("theta1", tau * v, tau)
    elif law == "theta3":
        r1 = th("theta3", v, tau + 1) - th("theta2", v, tau)
        r2 = th("theta3", v, s_tau) - root * gauss * th("theta3", tau * v, tau)
    elif law == "theta-prime":
        r1 = theta_prime_value(v, tau + 1, terms) - e8th * theta_prime_value(v, tau, terms)
        r2 = theta_prime_value(0, s_tau, terms) - (1 / I) * root * tau * theta_prime_value(0, tau, terms)
    else:
        r1 = _level_two("delta2", s_tau, terms) - tau**2 * _level_two("delta1", tau, terms)
        r2 = _level_two("eps2", s_tau, terms) - tau**4 * _level_two("eps1", tau, terms)
    return max(abs(r1), abs(r2))
