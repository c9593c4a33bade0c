"""Normalized Jacobi theta functions, Eisenstein series and the level-2 forms.

Nilpotent arguments are the normalized roots ``z = 2 pi i v``.  With this
substitution ``sin(pi v) = -i sinh(z/2)`` and ``cos(pi v) = cosh(z/2)``, so

    Theta(z)   = 2 q^(1/8) sinh(z/2) prod (1-q^n)(1-e^z q^n)(1-e^-z q^n)    (= i*theta)
    Theta_1(z) = 2 q^(1/8) cosh(z/2) prod (1-q^n)(1+e^z q^n)(1+e^-z q^n)
    Theta_2(z) = prod (1-q^n)(1-e^z q^(n-1/2))(1-e^-z q^(n-1/2))
    Theta_3(z) = prod (1-q^n)(1+e^z q^(n-1/2))(1+e^-z q^(n-1/2))

all with rational q-coefficients.  Paired factors collapse to
``1 +- 2 cosh(z) x + x^2`` so the roots enter only through their squares.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Sequence

from .coeffring import (
    GradedElement,
    Rational,
    Ring,
    RingError,
    RingSpec,
    Root,
    even_series,
)
from .qseries import STEP, QSeries, q_exp

__all__ = [
    "THETA",
    "THETA1",
    "THETA2",
    "THETA3",
    "scalar_ring",
    "phi_series",
    "eisenstein",
    "theta_series",
    "divided_theta",
    "theta_prime_zero",
    "theta_null",
    "level_two_form",
    "theta_root_product",
    "cosh_root",
]

THETA, THETA1, THETA2, THETA3 = "theta", "theta1", "theta2", "theta3"
_KINDS = (THETA, THETA1, THETA2, THETA3)

_SCALARS = Ring(RingSpec("evaluated", 2, ()), _internal=True)


def scalar_ring() -> Ring:
    """Ring with no generators; used for purely rational series."""
    return _SCALARS


def _prec(N: int) -> int:
    if N < 1:
        raise ValueError(f"order must be >= 1, got {N}")
    return STEP * N + 1


def _lift(ring: Ring | None, values: Sequence, prec: int) -> QSeries:
    ring = ring or _SCALARS
    return QSeries.from_rationals(ring, values, prec)


# -- root functions ------------------------------------------------------------------


def cosh_root(root: Root | None, k: int = 1) -> GradedElement | None:
    """cosh(k z) as an even series; ``None`` stands for the root 0."""
    if root is None:
        return None
    ring = root.square.ring
    m = ring.cap // 2 + 1
    return even_series([Rational(k ** (2 * j), factorial(2 * j)) for j in range(m)], root)


def _cosh_half(root: Root) -> GradedElement:
    m = root.square.ring.cap // 2 + 1
    return even_series([Rational(1, 4**j * factorial(2 * j)) for j in range(m)], root)


def _sinhc_half(root: Root) -> GradedElement:
    """sinh(z/2)/(z/2)."""
    m = root.square.ring.cap // 2 + 1
    return even_series([Rational(1, 4**j * factorial(2 * j + 1)) for j in range(m)], root)


def _as_root(z) -> Root | None:
    if z is None or isinstance(z, Root):
        return z
    if isinstance(z, GradedElement):
        if z.is_zero():
            return None
        if z.constant or any(
            not p.is_zero() for p in _nonlinear_parts(z)
        ):
            raise RingError("theta argument must be of pure degree 2")
        return Root(square=z * z, value=z)
    raise TypeError(f"unsupported theta argument {type(z).__name__}")


def _nonlinear_parts(z: GradedElement):
    from .coeffring import graded_part

    for k in range(4, z.ring.top_degree + 1, 2):
        yield graded_part(z, k)


# -- sparse product kernel ----------------------------------------------------------


def _times_pair(cur: list, ring: Ring, e: int, mid: GradedElement | Rational, prec: int) -> list:
    """cur * (1 + mid x + x^2) where x = q^(e/8)."""
    out = list(cur)
    mid_is_elem = isinstance(mid, GradedElement)
    for k in range(prec - 1, e - 1, -1):
        a = cur[k - e]
        if not a.is_zero():
            out[k] = out[k] + (mid * a if mid_is_elem else a.scale(mid))
        if k >= 2 * e:
            b = cur[k - 2 * e]
            if not b.is_zero():
                out[k] = out[k] + b
    return out


def _times_one_minus(cur: list, e: int, prec: int) -> list:
    out = list(cur)
    for k in range(prec - 1, e - 1, -1):
        a = cur[k - e]
        if not a.is_zero():
            out[k] = out[k] - a
    return out


def _theta_body(kind: str, C: GradedElement | None, ring: Ring, prec: int) -> list:
    """Coefficients of the infinite product of ``kind`` (no prefactor)."""
    cur = [ring.zero] * prec
    cur[0] = ring.one
    two_c = C.scale(2) if C is not None else Rational(2)
    if kind in (THETA, THETA1):
        sign = -1 if kind == THETA else 1
        mid = two_c.scale(sign) if isinstance(two_c, GradedElement) else two_c * sign
        n = 1
        while STEP * n < prec:
            cur = _times_one_minus(cur, STEP * n, prec)
            cur = _times_pair(cur, ring, STEP * n, mid, prec)
            n += 1
    else:
        sign = -1 if kind == THETA2 else 1
        mid = two_c.scale(sign) if isinstance(two_c, GradedElement) else two_c * sign
        n = 1
        while STEP * n - STEP // 2 < prec:
            if STEP * n < prec:
                cur = _times_one_minus(cur, STEP * n, prec)
            cur = _times_pair(cur, ring, STEP * n - STEP // 2, mid, prec)
            n += 1
    return cur


def theta_series(kind: str, z, N: int, ring: Ring | None = None) -> QSeries:
    """Theta_kind(z) to order N.

    ``z`` is ``None`` (the zero argument), a :class:`Root`, or a degree-2
    element.  ``Theta`` itself needs the root's value (a full generator);
    use :func:`divided_theta` for even-only roots.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown theta kind {kind!r}")
    root = _as_root(z)
    if root is not None:
        ring = root.square.ring
    ring = ring or _SCALARS
    prec = _prec(N)
    if kind == THETA:
        if root is None:
            return QSeries.zero(ring, prec + 1)
        if root.value is None:
            raise RingError("Theta(z) of an even-only root is not representable; use divided_theta")
        return divided_theta(root, N).scale(root.value)
    C = cosh_root(root)
    body = _theta_body(kind, C, ring, prec)
    if kind == THETA1:
        pre = _cosh_half(root).scale(2) if root is not None else ring.scalar(2)
        return QSeries(ring, [pre * c for c in body], prec).shift(1)
    return QSeries(ring, body, prec)


def divided_theta(z, N: int, ring: Ring | None = None) -> QSeries:
    """Theta(z)/z = q^(1/8) sinhc(z/2) prod(...): an even unit times q^(1/8)."""
    root = _as_root(z)
    if root is not None:
        ring = root.square.ring
    ring = ring or _SCALARS
    prec = _prec(N)
    C = cosh_root(root)
    body = _theta_body(THETA, C, ring, prec)
    pre = _sinhc_half(root) if root is not None else ring.one
    return QSeries(ring, [pre * c for c in body], prec).shift(1)


@lru_cache(maxsize=None)
def _theta_prime_rationals(N: int) -> tuple:
    aux = Ring(RingSpec("symbolic", 2, (_zeta_gen(),)), _internal=True)
    zeta = aux.gen("zeta")
    th = theta_series(THETA, zeta, N)
    key = (1,)
    return tuple(c.data.get(key, Rational(0)) for c in th.coeffs)


def _zeta_gen():
    from .coeffring import Generator, LCLASS

    return Generator("zeta", LCLASS)


def theta_prime_zero(N: int, ring: Ring | None = None) -> QSeries:
    """d/dz Theta at z = 0, read off as the zeta-coefficient of Theta(zeta), zeta^2 = 0."""
    vals = _theta_prime_rationals(N)
    return _lift(ring, vals, len(vals))


@lru_cache(maxsize=None)
def _theta_null_rationals(kind: str, N: int) -> tuple:
    return tuple(theta_series(kind, None, N).rationals())


def theta_null(kind: str, N: int, ring: Ring | None = None) -> QSeries:
    """Theta_j(0, tau) for j = 1, 2, 3."""
    vals = _theta_null_rationals(kind, N)
    return _lift(ring, vals, len(vals))


@lru_cache(maxsize=None)
def _phi_rationals(N: int) -> tuple:
    prec = _prec(N)
    cur = [_SCALARS.zero] * prec
    cur[0] = _SCALARS.one
    for n in range(1, N + 1):
        cur = _times_one_minus(cur, STEP * n, prec)
    return tuple(c.constant for c in cur)


def phi_series(N: int, ring: Ring | None = None) -> QSeries:
    """prod_{n>=1} (1 - q^n) to order N."""
    return _lift(ring, _phi_rationals(N), _prec(N))


def _sigma(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


_EIS = {"E2": (2, -24), "E4": (4, 240), "E6": (6, -504)}


@lru_cache(maxsize=None)
def _eisenstein_rationals(name: str, N: int) -> tuple:
    k, c = _EIS[name]
    vals = [Rational(0)] * _prec(N)
    vals[0] = Rational(1)
    for n in range(1, N + 1):
        vals[STEP * n] = Rational(c * _sigma(n, k - 1))
    return tuple(vals)


def eisenstein(name: str, N: int, ring: Ring | None = None) -> QSeries:
    """E2, E4 or E6 from divisor sums: 1 + c_k sum sigma_{k-1}(n) q^n."""
    if name not in _EIS:
        raise ValueError(f"unknown Eisenstein series {name!r}")
    return _lift(ring, _eisenstein_rationals(name, N), _prec(N))


@lru_cache(maxsize=None)
def _level_two_rationals(which: str, N: int) -> tuple:
    prec = _prec(N)
    t1 = theta_null(THETA1, N) ** 4
    t2 = theta_null(THETA2, N) ** 4
    t3 = theta_null(THETA3, N) ** 4
    if which == "delta1":
        s = (t2 + t3).scale(Rational(1, 8))
    elif which == "eps1":
        s = (t2 * t3).scale(Rational(1, 16))
    elif which == "delta2":
        s = (t1 + t3).scale(Rational(-1, 8))
    elif which == "eps2":
        s = (t1 * t3).scale(Rational(1, 16))
    else:
        raise ValueError(f"unknown level-two form {which!r}")
    return tuple(s.truncate(prec).rationals())


def level_two_form(which: str, N: int, ring: Ring | None = None) -> QSeries:
    """delta1, eps1 (Gamma_0(2)) and delta2, eps2 (Gamma^0(2)) from theta-nulls."""
    vals = _level_two_rationals(which, N)
    return _lift(ring, vals, len(vals))


def theta_root_product(kind: str, roots: Sequence[Root], N: int, ring: Ring) -> QSeries:
    """prod_l Theta_kind(z_l) for kind in theta1/2/3, through power sums of the roots.

    Uses log[(1 + s e^z x)(1 + s e^-z x)/(1 + s x)^2]
          = sum_k (-1)^(k-1) s^k x^k (2 cosh(kz) - 2)/k,
    so only P_k = sum_l (2 cosh(k z_l) - 2) is needed; exp of the nilpotent
    log is finite.
    """
    if kind not in (THETA1, THETA2, THETA3):
        raise ValueError("root products are defined for theta1, theta2, theta3")
    prec = _prec(N)
    base = theta_null(kind, N, ring) ** len(roots)
    if kind == THETA1:
        sign, first, step = 1, STEP, STEP
    else:
        sign, first, step = (-1 if kind == THETA2 else 1), STEP // 2, STEP
    kmax = (prec - 1) // first
    P = {}
    for k in range(1, kmax + 1):
        acc = ring.zero
        for r in roots:
            acc = acc + cosh_root(r, k).scale(2) - 2
        P[k] = acc
    log = [ring.zero] * prec
    e0 = first
    while e0 < prec:
        k = 1
        while k * e0 < prec:
            coef = Rational((-1) ** (k - 1) * sign**k, k)
            log[k * e0] = log[k * e0] + P[k].scale(coef)
            k += 1
        e0 += step
    out = base * q_exp(QSeries(ring, log, prec))
    if kind == THETA1:
        pre = ring.one
        for r in roots:
            pre = pre * _cosh_half(r)
        out = out.scale(pre)
    return out.truncate(base.prec)
