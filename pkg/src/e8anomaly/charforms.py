"""Characteristic forms of the geometry and the assembled elliptic-genus series.

Conventions
-----------
Roots are normalized (``w = 2 pi i x``).  For a real bundle with complexified
roots ``+-w`` we take ``p1 = sum w^2``; ``p1(L_R) = c^2`` with ``c`` the
l-class.  The E8 classes enter through ``(1/30) c2(W) = -sum z_l^2``.

Two constructions of each series are provided:

* ``route="theta"``: literal theta-function quotients (module :mod:`thetas`);
* ``route="bundle"``: Chern characters of the symmetric/exterior power
  bundles, expanded with Adams operations,
  ``ch S_t(E) = exp(sum_k t^k ch psi^k E / k)`` and
  ``ch Lambda_t(E) = exp(sum_k (-1)^(k-1) t^k ch psi^k E / k)``.

On the top degree (which is 2 mod 4 for both supported dimensions) the two
agree: the theta route carries ``sinh(c/2)`` where the bundle route carries
``exp(c/2)``, and only the odd part in ``c`` survives.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from math import comb, factorial
from typing import Mapping, Sequence

from .coeffring import (
    LCLASS,
    TANGENT,
    VROOT,
    WROOT,
    GradedElement,
    Generator,
    Rational,
    Ring,
    RingError,
    RingSpec,
    Root,
    element_product,
    element_sum,
    even_series,
    graded_part,
    ring_exp,
)
from .qseries import STEP, QSeries, q_coeff, q_divide, q_exp
from .thetas import (
    THETA1,
    THETA2,
    THETA3,
    cosh_root,
    divided_theta,
    eisenstein,
    theta_null,
    theta_prime_zero,
    theta_root_product,
    theta_series,
)

__all__ = [
    "Geometry",
    "RootBundle",
    "SeriesFamily",
    "FAMILIES",
    "make_geometry",
    "random_geometry",
    "random_assignments",
    "on_shell",
    "bernoulli",
    "ahat_class",
    "ch_character",
    "ch_virtual",
    "anomaly_class",
    "geom_factor",
    "direct_witten_char",
    "direct_q_char",
    "assemble_series",
]

ANOMALY_KINDS = ("A", "A1", "A2", "A3")
VARIANTS = ("triple", "weighted", "single1", "single2", "single3")


# -- geometry --------------------------------------------------------------------------


def geometry_generators(dim: int, lbar: int, n_e8: int) -> tuple[Generator, ...]:
    gens = [Generator(f"x{j}", TANGENT) for j in range(1, dim // 2 + 1)]
    gens.append(Generator("u", LCLASS))
    gens += [Generator(f"y{a}", VROOT) for a in range(1, lbar + 1)]
    for i in range(1, n_e8 + 1):
        gens += [Generator(f"z{i}_{l}", WROOT) for l in range(1, 9)]
    return tuple(gens)


@dataclass(frozen=True, eq=False)
class Geometry:
    """A formal manifold: tangent roots, the l-class, roots of V and of each E8 bundle."""

    dim: int
    lbar: int
    n_e8: int
    order: int
    ring: Ring
    tangent: tuple[Root, ...]
    line: GradedElement
    vroots: tuple[Root, ...]
    e8roots: tuple[tuple[Root, ...], ...]
    assignments: Mapping[str, Rational] = field(default_factory=dict)

    @property
    def top(self) -> int:
        return self.dim

    @property
    def prec(self) -> int:
        return STEP * self.order + 1

    @cached_property
    def line_root(self) -> Root:
        return Root(square=self.line * self.line, value=self.line)

    def with_order(self, order: int) -> "Geometry":
        return replace(self, order=order)


def make_geometry(
    dim: int,
    lbar: int,
    n_e8: int,
    order: int = 5,
    mode: str = "evaluated",
    assignments: Mapping[str, object] | None = None,
    max_terms: int | None = None,
) -> Geometry:
    if dim not in (10, 14):
        raise ValueError(f"dimension must be 10 or 14, got {dim}")
    if n_e8 not in (1, 2):
        raise ValueError(f"number of E8 bundles must be 1 or 2, got {n_e8}")
    if lbar < 0:
        raise ValueError("lbar must be non-negative")
    gens = geometry_generators(dim, lbar, n_e8)
    ring = Ring(RingSpec(mode, dim, gens, assignments if mode == "evaluated" else None, max_terms))
    return Geometry(
        dim=dim,
        lbar=lbar,
        n_e8=n_e8,
        order=order,
        ring=ring,
        tangent=tuple(ring.root(f"x{j}") for j in range(1, dim // 2 + 1)),
        line=ring.gen("u"),
        vroots=tuple(ring.root(f"y{a}") for a in range(1, lbar + 1)),
        e8roots=tuple(
            tuple(ring.root(f"z{i}_{l}") for l in range(1, 9)) for i in range(1, n_e8 + 1)
        ),
        assignments=dict(ring.values),
    )


def _random_value(rng: random.Random) -> Rational:
    num = rng.choice([k for k in range(-9, 10) if k])
    return Rational(num, rng.choice((1, 2, 3)))


def random_assignments(dim: int, lbar: int, n_e8: int, rng: random.Random) -> dict[str, Rational]:
    """Numerators uniform in [-9, 9] \\ {0}, denominators in {1, 2, 3}."""
    return {g.name: _random_value(rng) for g in geometry_generators(dim, lbar, n_e8)}


def random_geometry(dim: int, lbar: int, n_e8: int, order: int, rng: random.Random) -> Geometry:
    return make_geometry(dim, lbar, n_e8, order, "evaluated", random_assignments(dim, lbar, n_e8, rng))


def on_shell(geom: Geometry, kind: str) -> Geometry:
    """Re-solve the first tangent-root square so that the anomaly class ``kind`` vanishes."""
    others = anomaly_class(kind, replace(geom, tangent=(Root(square=geom.ring.zero),) + geom.tangent[1:]))
    new_first = Root(square=-others)
    return replace(geom, tangent=(new_first,) + geom.tangent[1:])


# -- elementary classes -------------------------------------------------------------------


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Rational:
    """Bernoulli numbers with B_1 = -1/2."""
    if n == 0:
        return Rational(1)
    s = Rational(0)
    for k in range(n):
        s += comb(n + 1, k) * bernoulli(k)
    return -s / (n + 1)


def _ahat_coeffs(m: int) -> list[Rational]:
    # (w/2)/sinh(w/2) = sum (2 - 2^(2k)) B_2k w^(2k) / ((2k)! 4^k)
    return [(2 - 2 ** (2 * k)) * bernoulli(2 * k) / (factorial(2 * k) * 4**k) for k in range(m)]


def ahat_class(geom: Geometry) -> GradedElement:
    coeffs = _ahat_coeffs(geom.ring.cap // 2 + 1)
    return element_product((even_series(coeffs, r) for r in geom.tangent), geom.ring)


def exp_half_c(geom: Geometry) -> GradedElement:
    return ring_exp(geom.line.scale(Rational(1, 2)))


def _two_cosh(root: Root, k: int = 1) -> GradedElement:
    return cosh_root(root, k).scale(2)


def _cosh_half_twice(root: Root) -> GradedElement:
    m = root.square.ring.cap // 2 + 1
    return even_series([Rational(2, 4**j * factorial(2 * j)) for j in range(m)], root)


@dataclass(frozen=True)
class RootBundle:
    """Virtual bundle described by roots: ``pairs`` contribute e^w + e^-w, ``lines`` e^w."""

    ring: Ring
    pairs: tuple[Root, ...] = ()
    lines: tuple[GradedElement, ...] = ()
    trivial: int = 0

    @property
    def rank(self) -> int:
        return 2 * len(self.pairs) + len(self.lines) + self.trivial

    def reduced(self) -> "RootBundle":
        return replace(self, trivial=self.trivial - self.rank)

    def adams(self, k: int) -> GradedElement:
        """ch psi^k: replaces every root w by k w."""
        out = self.ring.scalar(self.trivial)
        for r in self.pairs:
            out = out + _two_cosh(r, k)
        for w in self.lines:
            out = out + ring_exp(w.scale(k))
        return out


def ch_virtual(bundle: RootBundle, op: str, k: int = 1) -> GradedElement:
    """Chern characters of operations on a root-described virtual bundle.

    ``op`` is one of ``"ch"``, ``"reduce"``, ``"adams"``, ``"lambda"`` (k <= 3)
    or ``"tensor-square"``.  Exterior powers come from the Newton relations
    between lambda and Adams operations, which hold for virtual elements.
    """
    if op == "ch":
        return bundle.adams(1)
    if op == "reduce":
        return bundle.reduced().adams(1)
    if op == "adams":
        return bundle.adams(k)
    if op == "tensor-square":
        c = bundle.adams(1)
        return c * c
    if op == "lambda":
        s1 = bundle.adams(1)
        if k == 0:
            return bundle.ring.one
        if k == 1:
            return s1
        s2 = bundle.adams(2)
        if k == 2:
            return (s1 * s1 - s2).scale(Rational(1, 2))
        if k == 3:
            s3 = bundle.adams(3)
            return (s1 * s1 * s1 - (s1 * s2).scale(3) + s3.scale(2)).scale(Rational(1, 6))
        raise RingError(f"lambda^{k} is not supported (k <= 3)")
    raise ValueError(f"unknown operation {op!r}")


def tangent_bundle(geom: Geometry) -> RootBundle:
    return RootBundle(geom.ring, pairs=geom.tangent)


def v_bundle(geom: Geometry) -> RootBundle:
    return RootBundle(geom.ring, pairs=geom.vroots)


def lc_bundle(geom: Geometry) -> RootBundle:
    """L_C, the complexification of L_R (roots +-c)."""
    return RootBundle(geom.ring, pairs=(geom.line_root,))


def e8_factor(geom: Geometry, i: int, order: int | None = None, literal: bool = False) -> QSeries:
    """phi^8 ch(V_i) = (1/2)(prod Theta_1(z) + prod Theta_2(z) + prod Theta_3(z))."""
    if not 1 <= i <= geom.n_e8:
        raise ValueError(f"no E8 bundle with index {i}")
    N = order or geom.order
    roots = geom.e8roots[i - 1]
    if literal:
        parts = []
        for kind in (THETA1, THETA2, THETA3):
            s = QSeries.one(geom.ring, STEP * N + 1)
            for r in roots:
                s = s * theta_series(kind, r, N)
            parts.append(s)
    else:
        parts = [theta_root_product(kind, roots, N, geom.ring) for kind in (THETA1, THETA2, THETA3)]
    total = parts[0] + parts[1] + parts[2]
    return total.scale(Rational(1, 2)).truncate(STEP * N + 1)


def ch_w(geom: Geometry, i: int) -> GradedElement:
    """ch(W_i) = (q^1 coefficient of phi^8 ch V_i) + 8."""
    return q_coeff(e8_factor(geom, i, order=1), STEP) + 8


def ch_character(kind: str, geom: Geometry, index: int = 1) -> GradedElement:
    ring = geom.ring
    if kind == "tangent":
        return element_sum((_two_cosh(r) for r in geom.tangent), ring)
    if kind == "V":
        return element_sum((_two_cosh(r) for r in geom.vroots), ring)
    if kind == "L":
        return ring_exp(geom.line)
    if kind == "spinorV":
        return element_product((_cosh_half_twice(r) for r in geom.vroots), ring)
    if kind == "W":
        return ch_w(geom, index)
    raise ValueError(f"unknown bundle kind {kind!r}")


def anomaly_class(kind: str, geom: Geometry) -> GradedElement:
    """A, A1, A2, A3 from p1(M) = sum x^2, p1(L_R) = c^2, p1(V) = sum y^2, c2(W)/30 = -sum z^2."""
    if kind not in ANOMALY_KINDS:
        raise ValueError(f"unknown anomaly kind {kind!r}")
    ring = geom.ring
    p1m = element_sum((r.square for r in geom.tangent), ring)
    p1l = geom.line * geom.line
    p1v = element_sum((r.square for r in geom.vroots), ring)
    n_w = 2 if kind in ("A", "A2") else 1
    if n_w > geom.n_e8:
        raise ValueError(f"anomaly {kind} needs {n_w} E8 bundles")
    c2w = element_sum((r.square for roots in geom.e8roots[:n_w] for r in roots), ring)
    v_coef = 3 if kind in ("A", "A1") else 1
    return p1m - p1l - p1v.scale(v_coef) - c2w


# -- theta-quotient factors ------------------------------------------------------------------


def _theta_nulls_product(geom: Geometry) -> QSeries:
    N, ring = geom.order, geom.ring
    return theta_null(THETA1, N, ring) * theta_null(THETA2, N, ring) * theta_null(THETA3, N, ring)


def witten_tangent(geom: Geometry) -> QSeries:
    """prod_j Theta'(0) / (Theta(x_j)/x_j)."""
    N, ring = geom.order, geom.ring
    tp = theta_prime_zero(N, ring)
    out = QSeries.one(ring, geom.prec)
    for r in geom.tangent:
        out = out * q_divide(tp, divided_theta(r, N))
    return out


def line_factor(geom: Geometry) -> QSeries:
    """Theta(c) / (Theta_1(0) Theta_2(0) Theta_3(0)); the sqrt(-1) is absorbed in Theta."""
    return q_divide(theta_series("theta", geom.line_root, geom.order), _theta_nulls_product(geom))


def _theta_ratio_product(geom: Geometry, kind: str) -> QSeries:
    N, ring = geom.order, geom.ring
    out = QSeries.one(ring, geom.prec)
    null = theta_null(kind, N, ring)
    for r in geom.vroots:
        out = out * q_divide(theta_series(kind, r, N), null)
    return out


def v_factor(geom: Geometry, variant: str) -> QSeries:
    N, ring = geom.order, geom.ring
    two_l = 2**geom.lbar
    if variant == "triple":
        nulls = _theta_nulls_product(geom)
        out = QSeries.one(ring, geom.prec)
        for r in geom.vroots:
            num = theta_series(THETA1, r, N) * theta_series(THETA2, r, N) * theta_series(THETA3, r, N)
            out = out * q_divide(num.scale(2), nulls)
        return out
    if variant == "weighted":
        parts = [_theta_ratio_product(geom, k) for k in (THETA1, THETA2, THETA3)]
        return (parts[0] + parts[1] + parts[2]).scale(two_l)
    if variant in ("single1", "single2", "single3"):
        kind = {"single1": THETA1, "single2": THETA2, "single3": THETA3}[variant]
        out = _theta_ratio_product(geom, kind)
        return out.scale(two_l) if variant == "single1" else out
    raise ValueError(f"unknown V-factor variant {variant!r}")


def geom_factor(kind: str, geom: Geometry, variant: str | None = None, index: int = 1) -> QSeries:
    if kind == "wittenTangent":
        return witten_tangent(geom)
    if kind == "lineBundle":
        return line_factor(geom)
    if kind == "vFactor":
        return v_factor(geom, variant or "triple")
    if kind == "e8Factor":
        return e8_factor(geom, index)
    raise ValueError(f"unknown factor {kind!r}")


# -- bundle-product constructions ----------------------------------------------------------------


def _adams_log(
    geom: Geometry, psi: Sequence[GradedElement], first: int, step: int, sign: int, sym: bool
) -> QSeries:
    """log of prod_n Op_{t_n}(E) with t_n = sign * q^((first + (n-1) step)/8).

    ``psi[k]`` is ch psi^k of the (reduced) bundle E; ``sym`` selects S_t over Lambda_t.
    """
    prec = geom.prec
    ring = geom.ring
    out = [ring.zero] * prec
    e0 = first
    while e0 < prec:
        k = 1
        while k * e0 < prec:
            coef = Rational(sign**k, k) if sym else Rational((-1) ** (k - 1) * sign**k, k)
            out[k * e0] = out[k * e0] + psi[k].scale(coef)
            k += 1
        e0 += step
    return QSeries(ring, out, prec)


def _reduced_adams(bundle: RootBundle, kmax: int) -> list[GradedElement]:
    red = bundle.reduced()
    return [bundle.ring.zero] + [red.adams(k) for k in range(1, kmax + 1)]


def direct_witten_char(geom: Geometry) -> QSeries:
    """A-hat(TM) ch[ (x)_n S_{q^n}(T~_C M) (x)_m Lambda_{-q^m}(L~_C) ]."""
    kmax = geom.order
    psi_t = _reduced_adams(tangent_bundle(geom), kmax)
    psi_l = _reduced_adams(lc_bundle(geom), kmax)
    log = _adams_log(geom, psi_t, STEP, STEP, 1, sym=True) + _adams_log(
        geom, psi_l, STEP, STEP, -1, sym=False
    )
    return q_exp(log).scale(ahat_class(geom))


def direct_q_char(j: int, geom: Geometry) -> QSeries:
    """ch Q_j(V): Delta(V) (x) Lambda_{q^n}, Lambda_{-q^(n-1/2)}, Lambda_{q^(n-1/2)} of V~_C."""
    psi = _reduced_adams(v_bundle(geom), 2 * geom.order)
    if j == 1:
        log = _adams_log(geom, psi, STEP, STEP, 1, sym=False)
        return q_exp(log).scale(ch_character("spinorV", geom))
    if j in (2, 3):
        log = _adams_log(geom, psi, STEP // 2, STEP, -1 if j == 2 else 1, sym=False)
        return q_exp(log)
    raise ValueError(f"Q_j is defined for j = 1, 2, 3, got {j}")


def direct_v_factor(geom: Geometry, variant: str) -> QSeries:
    two_l = 2**geom.lbar
    if variant == "triple":
        return direct_q_char(1, geom) * direct_q_char(2, geom) * direct_q_char(3, geom)
    if variant == "weighted":
        return direct_q_char(1, geom) + (direct_q_char(2, geom) + direct_q_char(3, geom)).scale(two_l)
    if variant in ("single1", "single2", "single3"):
        return direct_q_char(int(variant[-1]), geom)
    raise ValueError(f"unknown V-factor variant {variant!r}")


# -- assembly -----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesFamily:
    """One elliptic-genus series: anomaly twist, E8 multiplicity and V-factor."""

    name: str
    anomaly: str
    n_e8: int
    variant: str
    description: str = ""

    def __post_init__(self):
        if self.anomaly not in ANOMALY_KINDS:
            raise ValueError(f"unknown anomaly kind {self.anomaly!r}")
        if self.variant not in ("triple", "weighted", "single"):
            raise ValueError(f"unknown variant {self.variant!r}")


FAMILIES: dict[str, SeriesFamily] = {
    f.name: f
    for f in (
        SeriesFamily("Q-triple-E8xE8", "A", 2, "triple", "Q1 Q2 Q3 twist, two E8 bundles"),
        SeriesFamily("Q-triple-E8", "A1", 1, "triple", "Q1 Q2 Q3 twist, one E8 bundle"),
        SeriesFamily("Q-weighted-E8xE8", "A2", 2, "weighted", "Q1 + 2^l Q2 + 2^l Q3, two E8 bundles"),
        SeriesFamily("Q-weighted-E8", "A3", 1, "weighted", "Q1 + 2^l Q2 + 2^l Q3, one E8 bundle"),
        SeriesFamily("Q-single-E8", "A3", 1, "single", "single Q_j twist, one E8 bundle"),
        SeriesFamily("Q-single-E8xE8", "A2", 2, "single", "single Q_j twist, two E8 bundles"),
    )
}


def _e2_twist(geom: Geometry, anomaly: GradedElement, e2: QSeries | None) -> QSeries:
    if e2 is None:
        e2 = eisenstein("E2", geom.order, geom.ring)
    return q_exp(e2.scale(anomaly.scale(Rational(1, 24))))


def assemble_series(
    family: SeriesFamily,
    geom: Geometry,
    j: int = 1,
    route: str = "theta",
    graded: bool = True,
    e2: QSeries | None = None,
) -> QSeries:
    """The full family series; ``graded`` applies the top-degree projection per coefficient.

    ``j`` selects Q_j for single-theta families.  ``e2`` overrides the
    Eisenstein series inside the anomaly twist (used for consistency tests).
    """
    if family.n_e8 != geom.n_e8:
        raise ValueError(
            f"family {family.name} needs {family.n_e8} E8 bundles, geometry has {geom.n_e8}"
        )
    variant = family.variant if family.variant != "single" else f"single{j}"
    A = anomaly_class(family.anomaly, geom)
    series = _e2_twist(geom, A, e2)
    if route == "theta":
        series = series * witten_tangent(geom) * line_factor(geom) * v_factor(geom, variant)
    elif route == "bundle":
        series = series.scale(exp_half_c(geom)) * direct_witten_char(geom) * direct_v_factor(geom, variant)
    else:
        raise ValueError(f"unknown route {route!r}")
    for i in range(1, geom.n_e8 + 1):
        series = series * e8_factor(geom, i)
    series = series.truncate(geom.prec)
    if graded:
        series = series.map(lambda c: graded_part(c, geom.top))
    return series
