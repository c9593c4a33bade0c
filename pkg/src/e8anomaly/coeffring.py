"""Exact rationals and the truncated graded coefficient ring.

Every characteristic form lives in a commutative ring generated by formal
degree-2 classes and truncated above the manifold dimension.  Two backends
share one element type:

* ``evaluated``: the whole ring collapses onto ``Q[t]/(t^(top/2 + 1))``.  A
  root ``w`` of an even-only generator is never materialized; only its square
  ``w^2 = s t^2`` is, with ``s`` the assigned rational.  Full generators are
  mapped to ``a t``.
* ``symbolic``: sparse polynomials in the generators, truncated at total
  cohomological degree ``top``.

All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational

__all__ = [
    "Rational",
    "RingError",
    "MonomialLimitError",
    "Generator",
    "RingSpec",
    "Ring",
    "GradedElement",
    "Root",
    "make_ring",
    "ring_exp",
    "expm1_over",
    "ring_invert",
    "graded_part",
    "power_series",
    "even_series",
    "TANGENT",
    "VROOT",
    "WROOT",
    "LCLASS",
]

ZERO = Rational(0)
ONE = Rational(1)

TANGENT = "tm-root"
VROOT = "v-root"
WROOT = "w-root"
LCLASS = "l-class"
_KINDS = (TANGENT, VROOT, WROOT, LCLASS)
_MODES = ("evaluated", "symbolic")


class RingError(ValueError):
    """Raised on invalid ring construction or an illegal ring operation."""


class MonomialLimitError(RingError):
    """A symbolic computation exceeded the configured monomial budget."""


def as_rational(x) -> Rational:
    if isinstance(x, str):
        return Rational(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Rational(int(x.numerator), int(x.denominator))
    return Rational(x)


@dataclass(frozen=True)
class Generator:
    name: str
    kind: str

    @property
    def parity(self) -> str:
        return "full" if self.kind == LCLASS else "even-only"


@dataclass(frozen=True)
class RingSpec:
    """Construction data for a :class:`Ring`.

    ``assignments`` maps generator names to rationals (evaluated mode only):
    the *square* of an even-only generator, the value of a full one.
    """

    mode: str
    top_degree: int
    generators: tuple[Generator, ...]
    assignments: Mapping[str, object] | None = None
    max_terms: int | None = None


class Ring:
    """Handle tagging every element; two rings are equal only if identical."""

    def __init__(self, spec: RingSpec, _internal: bool = False):
        if spec.mode not in _MODES:
            raise RingError(f"unknown mode {spec.mode!r}")
        if spec.top_degree % 2:
            raise RingError(f"top degree must be even, got {spec.top_degree}")
        if not _internal and spec.top_degree not in (10, 14):
            raise RingError(f"top degree must be 10 or 14, got {spec.top_degree}")
        if spec.top_degree < 2:
            raise RingError("top degree must be positive")
        names = [g.name for g in spec.generators]
        seen = set()
        for g in spec.generators:
            if g.kind not in _KINDS:
                raise RingError(f"unknown generator kind {g.kind!r}")
            if g.name in seen:
                raise RingError(f"duplicate generator name {g.name!r}")
            seen.add(g.name)
        self.spec = spec
        self.mode = spec.mode
        self.top_degree = spec.top_degree
        self.cap = spec.top_degree // 2
        self.generators = tuple(spec.generators)
        self.index = {n: i for i, n in enumerate(names)}
        self.max_terms = spec.max_terms
        self.values: dict[str, Rational] = {}
        if self.mode == "evaluated":
            assignments = spec.assignments or {}
            for g in self.generators:
                if g.name not in assignments:
                    raise RingError(f"missing assignment for generator {g.name!r}")
                self.values[g.name] = as_rational(assignments[g.name])
        self._zero = GradedElement(self, self._zero_data())
        self._one = self.scalar(1)

    def __repr__(self) -> str:
        return f"Ring({self.mode}, top={self.top_degree}, gens={len(self.generators)})"

    def _zero_data(self):
        if self.mode == "evaluated":
            return (ZERO,) * (self.cap + 1)
        return {}

    @property
    def zero(self) -> "GradedElement":
        return self._zero

    @property
    def one(self) -> "GradedElement":
        return self._one

    def scalar(self, c) -> "GradedElement":
        c = as_rational(c)
        if self.mode == "evaluated":
            return GradedElement(self, (c,) + (ZERO,) * self.cap)
        if not c:
            return GradedElement(self, {})
        return GradedElement(self, {(0,) * len(self.generators): c})

    def gen(self, name: str) -> "GradedElement":
        """The degree-2 element of a generator (full generators in evaluated mode)."""
        if name not in self.index:
            raise RingError(f"unknown generator {name!r}")
        if self.mode == "evaluated":
            g = self.generators[self.index[name]]
            if g.parity != "full":
                raise RingError(f"even-only generator {name!r} has no value in evaluated mode")
            data = [ZERO] * (self.cap + 1)
            data[1] = self.values[name]
            return GradedElement(self, tuple(data))
        exps = [0] * len(self.generators)
        exps[self.index[name]] = 1
        return GradedElement(self, {tuple(exps): ONE})

    def root(self, name: str) -> "Root":
        g = self.generators[self.index[name]]
        if g.parity == "full":
            v = self.gen(name)
            return Root(square=v * v, value=v)
        if self.mode == "evaluated":
            data = [ZERO] * (self.cap + 1)
            if self.cap >= 2:
                data[2] = self.values[name]
            return Root(square=GradedElement(self, tuple(data)))
        v = self.gen(name)
        return Root(square=v * v)

    def evaluate(self, x: "GradedElement", target: "Ring") -> "GradedElement":
        """Map a symbolic element into an evaluated ring with the same generators."""
        if self.mode != "symbolic" or target.mode != "evaluated":
            raise RingError("evaluate maps symbolic elements into an evaluated ring")
        if x.ring is not self:
            raise RingError("element belongs to a different ring")
        gens = self.generators
        out = [ZERO] * (target.cap + 1)
        for exps, c in x.data.items():
            term = c
            for g, e in zip(gens, exps):
                if not e:
                    continue
                val = target.values[g.name]
                if g.parity == "full":
                    term *= val**e
                else:
                    if e % 2:
                        raise RingError(f"odd power of even-only generator {g.name!r}")
                    term *= val ** (e // 2)
            d = sum(exps)
            if d <= target.cap:
                out[d] += term
        return GradedElement(target, tuple(out))


def make_ring(spec: RingSpec) -> Ring:
    return Ring(spec)


class GradedElement:
    """Element of a truncated graded ring.  One t-power equals degree 2."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: Ring, data):
        self.ring = ring
        self.data = data

    # -- construction helpers -------------------------------------------------
    def _new(self, data) -> "GradedElement":
        return GradedElement(self.ring, data)

    def _check(self, other: "GradedElement") -> None:
        if other.ring is not self.ring:
            raise RingError("operands belong to different rings")

    def _coerce(self, other) -> "GradedElement":
        if isinstance(other, GradedElement):
            self._check(other)
            return other
        return self.ring.scalar(other)

    # -- arithmetic --------------------------------------------------------------
    def __add__(self, other) -> "GradedElement":
        other = self._coerce(other)
        if self.ring.mode == "evaluated":
            return self._new(tuple(a + b for a, b in zip(self.data, other.data)))
        out = dict(self.data)
        for k, c in other.data.items():
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self) -> "GradedElement":
        if self.ring.mode == "evaluated":
            return self._new(tuple(-a for a in self.data))
        return self._new({k: -c for k, c in self.data.items()})

    def __sub__(self, other) -> "GradedElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GradedElement":
        return self._coerce(other) - self

    def scale(self, c) -> "GradedElement":
        c = as_rational(c)
        if self.ring.mode == "evaluated":
            return self._new(tuple(a * c for a in self.data))
        if not c:
            return self.ring.zero
        return self._new({k: v * c for k, v in self.data.items()})

    def __mul__(self, other) -> "GradedElement":
        if not isinstance(other, GradedElement):
            return self.scale(other)
        self._check(other)
        ring = self.ring
        if ring.mode == "evaluated":
            a, b = self.data, other.data
            n = ring.cap + 1
            out = [ZERO] * n
            nzb = [(j, bj) for j, bj in enumerate(b) if bj]
            for i, ai in enumerate(a):
                if ai:
                    lim = n - i
                    for j, bj in nzb:
                        if j >= lim:
                            break
                        out[i + j] += ai * bj
            return self._new(tuple(out))
        cap = ring.cap
        out: dict = {}
        items_b = [(e, sum(e), c) for e, c in other.data.items()]
        for ea, ca in self.data.items():
            da = sum(ea)
            for eb, db, cb in items_b:
                if da + db > cap:
                    continue
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, ZERO) + ca * cb
        out = {k: v for k, v in out.items() if v}
        if ring.max_terms is not None and len(out) > ring.max_terms:
            raise MonomialLimitError(
                f"symbolic product has {len(out)} monomials (cap {ring.max_terms})"
            )
        return self._new(out)

    def __rmul__(self, other) -> "GradedElement":
        return self.scale(other)

    def __truediv__(self, other) -> "GradedElement":
        if isinstance(other, GradedElement):
            return self * ring_invert(other)
        return self.scale(ONE / as_rational(other))

    def __pow__(self, k: int) -> "GradedElement":
        if k < 0:
            return ring_invert(self) ** (-k)
        out = self.ring.one
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, GradedElement):
            return self.ring is other.ring and self.data == other.data
        try:
            return self == self.ring.scalar(other)
        except (TypeError, ValueError):
            return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    # -- inspection ----------------------------------------------------------------
    def is_zero(self) -> bool:
        if self.ring.mode == "evaluated":
            return not any(self.data)
        return not self.data

    def __bool__(self) -> bool:
        return not self.is_zero()

    @property
    def constant(self) -> Rational:
        """Degree-0 component as a rational."""
        if self.ring.mode == "evaluated":
            return self.data[0]
        return self.data.get((0,) * len(self.ring.generators), ZERO)

    def degree_coefficient(self, k: int) -> Rational:
        """Evaluated mode: the rational multiplying the degree-k component t^(k/2)."""
        if self.ring.mode != "evaluated":
            raise RingError("degree_coefficient requires evaluated mode")
        return self.data[k // 2]

    def top(self) -> "GradedElement":
        return graded_part(self, self.ring.top_degree)

    def terms(self) -> int:
        if self.ring.mode == "evaluated":
            return sum(1 for a in self.data if a)
        return len(self.data)

    def max_abs(self) -> Rational:
        vals = self.data if self.ring.mode == "evaluated" else self.data.values()
        return max((abs(v) for v in vals), default=ZERO)

    def __repr__(self) -> str:
        if self.ring.mode == "evaluated":
            parts = [f"{c}*t^{i}" for i, c in enumerate(self.data) if c]
            return " + ".join(parts) or "0"
        names = [g.name for g in self.ring.generators]
        parts = []
        for exps, c in sorted(self.data.items()):
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class Root:
    """A formal degree-2 root accessed through even functions of it.

    ``value`` is present only for full (l-class) generators; builders of
    even series must use ``square`` exclusively.
    """

    square: GradedElement
    value: GradedElement | None = field(default=None)


def _require_nilpotent(x: GradedElement, what: str) -> None:
    if x.constant:
        raise RingError(f"{what} requires a nilpotent argument (degree-0 part {x.constant})")


def power_series(coeffs: Sequence, x: GradedElement) -> GradedElement:
    """Sum ``coeffs[k] * x**k`` for nilpotent ``x`` (Horner, truncated)."""
    _require_nilpotent(x, "power_series")
    n = min(len(coeffs), x.ring.cap + 1)
    out = x.ring.zero
    for k in range(n - 1, -1, -1):
        out = out * x + as_rational(coeffs[k])
    return out


def even_series(coeffs: Sequence, root: Root) -> GradedElement:
    """Even series ``sum coeffs[m] * w^(2m)`` of a root ``w`` via its square."""
    sq = root.square
    n = min(len(coeffs), sq.ring.cap // 2 + 1)
    return power_series(list(coeffs)[:n], sq)


def ring_exp(x: GradedElement) -> GradedElement:
    _require_nilpotent(x, "ring_exp")
    cap = x.ring.cap
    return power_series([Rational(1, factorial(k)) for k in range(cap + 1)], x)


def expm1_over(x: GradedElement) -> GradedElement:
    """The series ``(e^x - 1)/x`` of a nilpotent class."""
    _require_nilpotent(x, "expm1_over")
    cap = x.ring.cap
    return power_series([Rational(1, factorial(k + 1)) for k in range(cap + 1)], x)


def ring_invert(x: GradedElement) -> GradedElement:
    c = x.constant
    if not c:
        raise RingError("element with zero degree-0 part is not invertible")
    inv_c = ONE / c
    n = x.scale(inv_c) - 1
    cap = x.ring.cap
    geo = power_series([(-1) ** k for k in range(cap + 1)], n)
    return geo.scale(inv_c)


def graded_part(x: GradedElement, k: int) -> GradedElement:
    ring = x.ring
    if k % 2 or k < 0 or k > ring.top_degree:
        raise RingError(f"degree {k} out of range for top degree {ring.top_degree}")
    if ring.mode == "evaluated":
        data = [ZERO] * (ring.cap + 1)
        data[k // 2] = x.data[k // 2]
        return GradedElement(ring, tuple(data))
    d = k // 2
    return GradedElement(ring, {e: c for e, c in x.data.items() if sum(e) == d})


def graded_parts(x: GradedElement) -> Iterator[GradedElement]:
    for k in range(0, x.ring.top_degree + 1, 2):
        yield graded_part(x, k)


def element_sum(items: Iterable[GradedElement], ring: Ring) -> GradedElement:
    out = ring.zero
    for it in items:
        out = out + it
    return out


def element_product(items: Iterable[GradedElement], ring: Ring) -> GradedElement:
    out = ring.one
    for it in items:
        out = out * it
    return out
