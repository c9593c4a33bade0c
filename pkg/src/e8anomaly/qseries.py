"""Truncated power series in q^(1/8) over a graded coefficient ring."""

from __future__ import annotations

from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .coeffring import GradedElement, Rational, Ring, RingError, as_rational, ring_invert

__all__ = [
    "QSeries",
    "QSeriesError",
    "q_invert",
    "q_divide",
    "q_exp",
    "q_coeff",
    "q_product",
    "STEP",
]

#: Exponent lattice: one index step is q^(1/8).
STEP = 8


class QSeriesError(ValueError):
    pass


class QSeries:
    """``sum_e coeffs[e] q^(e/8)`` known exactly for ``0 <= e < prec``."""

    __slots__ = ("ring", "coeffs", "prec")

    def __init__(self, ring: Ring, coeffs: Sequence[GradedElement], prec: int):
        if len(coeffs) != prec:
            raise QSeriesError("coefficient count must equal precision")
        self.ring = ring
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # -- constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring, prec: int) -> "QSeries":
        return cls(ring, (ring.zero,) * prec, prec)

    @classmethod
    def one(cls, ring: Ring, prec: int) -> "QSeries":
        return cls.monomial(ring, ring.one, 0, prec)

    @classmethod
    def monomial(cls, ring: Ring, c, eighths: int, prec: int) -> "QSeries":
        coeffs = [ring.zero] * prec
        if eighths < prec:
            coeffs[eighths] = c if isinstance(c, GradedElement) else ring.scalar(c)
        return cls(ring, coeffs, prec)

    @classmethod
    def from_rationals(cls, ring: Ring, values: Mapping[int, object] | Sequence, prec: int) -> "QSeries":
        coeffs = [ring.zero] * prec
        items = values.items() if isinstance(values, Mapping) else enumerate(values)
        for e, v in items:
            if e < prec and v:
                coeffs[e] = ring.scalar(v)
        return cls(ring, coeffs, prec)

    @classmethod
    def from_order(cls, ring: Ring, values, order: int) -> "QSeries":
        return cls.from_rationals(ring, values, STEP * order + 1)

    # -- inspection ------------------------------------------------------------------
    @property
    def order(self) -> int:
        """Integer q-powers of guaranteed accuracy."""
        return (self.prec - 1) // STEP

    def valuation(self) -> int:
        for e, c in enumerate(self.coeffs):
            if not c.is_zero():
                return e
        return self.prec

    def rationals(self) -> list[Rational]:
        """Degree-0 parts of every coefficient."""
        return [c.constant for c in self.coeffs]

    def __repr__(self) -> str:
        parts = []
        for e, c in enumerate(self.coeffs):
            if not c.is_zero():
                parts.append(f"({c})q^({e}/8)")
        return " + ".join(parts) + f" + O(q^({self.prec}/8))"

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        p = min(self.prec, other.prec)
        return self.ring is other.ring and self.coeffs[:p] == other.coeffs[:p]

    __hash__ = None  # type: ignore[assignment]

    # -- structural ------------------------------------------------------------------
    def _check(self, other: "QSeries") -> None:
        if other.ring is not self.ring:
            raise RingError("series belong to different rings")

    def truncate(self, prec: int) -> "QSeries":
        prec = min(prec, self.prec)
        return QSeries(self.ring, self.coeffs[:prec], prec)

    def shift(self, eighths: int) -> "QSeries":
        """Multiply by q^(eighths/8); negative shifts require vanishing low terms."""
        if eighths >= 0:
            coeffs = (self.ring.zero,) * eighths + self.coeffs
            return QSeries(self.ring, coeffs, self.prec + eighths)
        k = -eighths
        if any(not c.is_zero() for c in self.coeffs[:k]):
            raise QSeriesError("shift would create negative exponents")
        return QSeries(self.ring, self.coeffs[k:], self.prec - k)

    def map(self, f: Callable[[GradedElement], GradedElement]) -> "QSeries":
        return QSeries(self.ring, [f(c) for c in self.coeffs], self.prec)

    # -- arithmetic --------------------------------------------------------------------
    def __add__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.monomial(self.ring, other, 0, self.prec)
        self._check(other)
        p = min(self.prec, other.prec)
        return QSeries(self.ring, [a + b for a, b in zip(self.coeffs[:p], other.coeffs[:p])], p)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries(self.ring, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.monomial(self.ring, other, 0, self.prec)
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def scale(self, c) -> "QSeries":
        """Multiply every coefficient by a rational or a ring element."""
        if isinstance(c, GradedElement):
            if c.ring is not self.ring:
                raise RingError("scalar belongs to a different ring")
            return QSeries(self.ring, [c * a for a in self.coeffs], self.prec)
        c = as_rational(c)
        return QSeries(self.ring, [a.scale(c) for a in self.coeffs], self.prec)

    def __mul__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        self._check(other)
        va, vb = self.valuation(), other.valuation()
        prec = min(self.prec + vb, other.prec + va)
        zero = self.ring.zero
        out = [zero] * prec
        nza = [(i, c) for i, c in enumerate(self.coeffs) if not c.is_zero()]
        nzb = [(j, c) for j, c in enumerate(other.coeffs) if not c.is_zero()]
        for i, a in nza:
            if i >= prec:
                break
            for j, b in nzb:
                k = i + j
                if k >= prec:
                    break
                out[k] = out[k] + a * b
        return QSeries(self.ring, out, prec)

    def __rmul__(self, other) -> "QSeries":
        return self.scale(other)

    def __pow__(self, k: int) -> "QSeries":
        if k < 0:
            return q_invert(self) ** (-k)
        out = QSeries.one(self.ring, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out


def q_product(items: Iterable[QSeries], ring: Ring, prec: int) -> QSeries:
    out = QSeries.one(ring, prec)
    for s in items:
        out = out * s
    return out


def q_invert(a: QSeries) -> QSeries:
    """Inverse of a series whose q^0 coefficient has a nonzero rational part."""
    if a.prec == 0:
        raise QSeriesError("cannot invert an empty series")
    a0 = a.coeffs[0]
    if not a0.constant:
        raise QSeriesError("leading coefficient is nilpotent or zero")
    inv0 = ring_invert(a0)
    prec = a.prec
    nza = [(k, c) for k, c in enumerate(a.coeffs) if k and not c.is_zero()]
    out = [inv0] + [a.ring.zero] * (prec - 1)
    for n in range(1, prec):
        acc = a.ring.zero
        for k, c in nza:
            if k > n:
                break
            b = out[n - k]
            if not b.is_zero():
                acc = acc + c * b
        if not acc.is_zero():
            out[n] = -(inv0 * acc)
    return QSeries(a.ring, out, prec)


def q_divide(a: QSeries, b: QSeries) -> QSeries:
    """``a / b``; the prefactor q^(v/8) of ``b`` cancels against ``a``."""
    a._check(b)
    vb = b.valuation()
    if vb >= b.prec:
        raise QSeriesError("division by a series that vanishes to its precision")
    if not b.coeffs[vb].constant:
        raise QSeriesError("leading coefficient of divisor is nilpotent")
    va = a.valuation()
    if va < vb:
        raise QSeriesError("division would create negative exponents")
    return a.shift(-vb) * q_invert(b.shift(-vb))


def q_exp(a: QSeries) -> QSeries:
    """Exponential of a series with nilpotent coefficients (finite sum)."""
    for c in a.coeffs:
        if c.constant:
            raise QSeriesError("q_exp requires nilpotent coefficients")
    cap = a.ring.cap
    out = QSeries.one(a.ring, a.prec)
    power = out
    for k in range(1, cap + 1):
        power = power * a
        if all(c.is_zero() for c in power.coeffs):
            break
        out = out + power.scale(Rational(1, factorial(k)))
    return out


def q_coeff(a: QSeries, eighths: int) -> GradedElement:
    if eighths < 0 or eighths >= a.prec:
        raise QSeriesError(f"exponent {eighths}/8 outside known range (< {a.prec}/8)")
    return a.coeffs[eighths]
