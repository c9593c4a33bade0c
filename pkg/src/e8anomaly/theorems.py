"""Registry of anomaly-cancellation statements and the drivers that check them.

Every statement is verified through a chain of exact checks carried out on
random rational geometries:

1. the assembled series (theta route) matches its modular-form basis with
   zero residual, and agrees with the bundle route on the top degree;
2. the low q-coefficients of the ungraded bundle series agree, in every
   degree, with the characteristic-form templates they are expanded into;
3. the identity obtained by matching coefficients holds exactly.

Constants are derived from the series and the basis alone; the printed
constants are only compared afterwards (and the printed statement is
evaluated separately, so a misprint shows up as an identity that fails
while the derived one holds).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .charforms import (
    FAMILIES,
    Geometry,
    SeriesFamily,
    ahat_class,
    anomaly_class,
    assemble_series,
    ch_character,
    ch_virtual,
    exp_half_c,
    lc_bundle,
    make_geometry,
    on_shell,
    random_geometry,
    tangent_bundle,
    v_bundle,
)
from .coeffring import (
    GradedElement,
    MonomialLimitError,
    Rational,
    expm1_over,
    graded_part,
    ring_exp,
)
from .modmatch import (
    gamma_leading_matrix,
    match_gamma_upper0,
    match_sl2z,
    sl2z_basis,
    transfer_gamma,
)
from .qseries import STEP, QSeries, q_coeff

__all__ = [
    "TheoremSpec",
    "GammaForm",
    "DerivedIdentity",
    "VerificationReport",
    "RunConfig",
    "REGISTRY",
    "IDS",
    "trial_seed",
    "geometry_for",
    "derive_constants",
    "verify_identity",
    "check_modularity",
    "gamma_weights",
    "run_one",
    "run_all",
    "STATUSES",
]

HALF = STEP // 2


def trial_seed(seed: int, ident: str, trial: int) -> int:
    """Sub-seed: first 8 bytes (big-endian) of sha256("seed/id/trial")."""
    digest = hashlib.sha256(f"{seed}/{ident}/{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _num(x) -> str:
    return str(Fraction(int(x.numerator), int(x.denominator))) if hasattr(x, "numerator") else str(x)


# -- statement shapes ----------------------------------------------------------------------


@dataclass(frozen=True)
class GammaForm:
    """``{B ch Delta}^top = 2^(lbar - p) {B[K + v V~ + g G + l3 L3 + t V~ (x) (S + shift)] + a1 A B + a2 A B V~}^top``.

    ``G = T~ - L~ + sum W + Lambda^2 V~`` and ``S = T~ - L~ + sum W``; B is the
    twisted A-hat form.  ``None`` in a1/a2 means the statement carries no
    anomaly term (it is stated on the constraint surface).
    """

    p: int
    K: Rational
    v: Rational
    g: Rational
    l3: Rational = Rational(0)
    t: Rational = Rational(0)
    shift: Rational = Rational(0)
    a1: Rational | None = None
    a2: Rational | None = None

    def as_dict(self) -> dict:
        out = {"p": self.p, "K": _num(self.K), "v": _num(self.v), "g": _num(self.g),
               "l3": _num(self.l3), "t": _num(self.t), "shift": _num(self.shift)}
        if self.a1 is not None:
            out["a1"] = _num(self.a1)
        if self.a2 is not None:
            out["a2"] = _num(self.a2)
        return out


@dataclass(frozen=True)
class TheoremSpec:
    id: str
    kind: str  # theorem | corollary | modularity
    dim: int
    family: SeriesFamily
    group: str  # SL2Z | Gamma
    weight: int
    constrained: bool
    printed: Mapping[str, object] = field(default_factory=dict)
    description: str = ""

    @property
    def n_e8(self) -> int:
        return self.family.n_e8


def _F(name: str) -> SeriesFamily:
    return FAMILIES[name]


def _spec(ident, kind, dim, fam, group, weight, constrained, printed=None, description=""):
    return TheoremSpec(ident, kind, dim, _F(fam), group, weight, constrained, printed or {}, description)


_R = Rational
REGISTRY: dict[str, TheoremSpec] = {
    s.id: s
    for s in (
        _spec("T2.3", "theorem", 14, "Q-triple-E8xE8", "SL2Z", 14, False,
              {"kappa": _R(8), "multiplier": _R(-24)}, "triple V-twist, two E8 bundles"),
        _spec("C2.4", "corollary", 14, "Q-triple-E8xE8", "SL2Z", 14, True,
              {"shift": _R(-16), "multiplier": _R(-24)}),
        _spec("T2.6", "theorem", 14, "Q-triple-E8", "SL2Z", 10, False,
              {"kappa": _R(256), "multiplier": _R(-264)}, "triple V-twist, one E8 bundle"),
        _spec("C2.7", "corollary", 14, "Q-triple-E8", "SL2Z", 10, True,
              {"shift": _R(-8), "multiplier": _R(-264)}),
        _spec("T2.9", "theorem", 10, "Q-triple-E8", "SL2Z", 8, False,
              {"kappa": _R(-488)}, "triple V-twist, one E8 bundle, dimension 10"),
        _spec("C2.10", "corollary", 10, "Q-triple-E8", "SL2Z", 8, True,
              {"shift": _R(0), "multiplier": _R(488)}),
        _spec("T2.12", "theorem", 14, "Q-weighted-E8xE8", "SL2Z", 14, False,
              {"kappa": _R(8), "reading": "printed"}, "weighted V-twist, two E8 bundles"),
        _spec("C2.13", "corollary", 14, "Q-weighted-E8xE8", "SL2Z", 14, True,
              {"shift": _R(-16), "multiplier": _R(-24), "reading": "printed"}),
        _spec("T2.15", "theorem", 14, "Q-weighted-E8", "SL2Z", 10, False,
              {"kappa": _R(252), "reading": "printed"}, "weighted V-twist, one E8 bundle"),
        _spec("C2.16", "corollary", 14, "Q-weighted-E8", "SL2Z", 10, True,
              {"shift": _R(-8), "multiplier": _R(-264), "reading": "printed"}),
        _spec("C2.18", "corollary", 10, "Q-weighted-E8", "SL2Z", 8, True,
              {"shift": _R(0), "multiplier": _R(488), "reading": "printed"},
              "weighted V-twist, one E8 bundle, dimension 10"),
        _spec("T3.3", "theorem", 10, "Q-single-E8", "Gamma", 8, False,
              {"form": GammaForm(8, _R(-252), _R(-8), _R(1), a1=_R(-1), a2=_R(0))},
              "level-two decomposition, one E8 bundle, dimension 10"),
        _spec("C3.4", "corollary", 10, "Q-single-E8", "Gamma", 8, True,
              {"form": GammaForm(8, _R(-252), _R(-8), _R(1))}),
        _spec("T3.6", "theorem", 14, "Q-single-E8", "Gamma", 10, False,
              {"form": GammaForm(7, _R(144), _R(-16), _R(-1), a1=_R(1), a2=_R(0))},
              "level-two decomposition, one E8 bundle, dimension 14"),
        _spec("C3.7", "corollary", 14, "Q-single-E8", "Gamma", 10, True,
              {"form": GammaForm(7, _R(144), _R(-16), _R(-1))}),
        _spec("T3.9", "theorem", 14, "Q-single-E8xE8", "Gamma", 14, True,
              {"form": GammaForm(11, _R(-3008), _R(301), _R(24), _R(1), _R(1), _R(-16))},
              "level-two decomposition, two E8 bundles, dimension 14"),
        _spec("T3.11", "theorem", 10, "Q-single-E8xE8", "Gamma", 12, True,
              {"form": GammaForm(12, _R(4096), _R(25), _R(0), _R(-1), _R(1), _R(-16))},
              "level-two decomposition, two E8 bundles, dimension 10"),
        _spec("L2.2", "modularity", 14, "Q-triple-E8xE8", "SL2Z", 14, False),
        _spec("L2.5", "modularity", 14, "Q-triple-E8", "SL2Z", 10, False),
        _spec("L2.8", "modularity", 10, "Q-triple-E8", "SL2Z", 8, False),
        _spec("L2.11", "modularity", 14, "Q-weighted-E8xE8", "SL2Z", 14, False),
        _spec("L2.14", "modularity", 14, "Q-weighted-E8", "SL2Z", 10, False),
        _spec("L2.17", "modularity", 10, "Q-weighted-E8", "SL2Z", 8, False),
        _spec("L3.2", "modularity", 10, "Q-single-E8", "Gamma", 8, False),
        _spec("L3.5", "modularity", 14, "Q-single-E8", "Gamma", 10, False),
        _spec("L3.8", "modularity", 14, "Q-single-E8xE8", "Gamma", 14, False),
        _spec("L3.10", "modularity", 10, "Q-single-E8xE8", "Gamma", 12, False),
    )
}
IDS = tuple(REGISTRY)


# -- characteristic-form ingredients --------------------------------------------------------


class Ingredients:
    """All forms entering the statements for one geometry and anomaly kind."""

    def __init__(self, geom: Geometry, anomaly: str):
        self.geom = geom
        self.ring = geom.ring
        self.anomaly = anomaly

    @cached_property
    def A(self) -> GradedElement:
        return anomaly_class(self.anomaly, self.geom)

    @cached_property
    def twist(self) -> GradedElement:
        return ring_exp(self.A.scale(Rational(1, 24)))

    @cached_property
    def twist_m1(self) -> GradedElement:
        """(e^(A/24) - 1)/A = (1/24) (e^x - 1)/x at x = A/24."""
        return expm1_over(self.A.scale(Rational(1, 24))).scale(Rational(1, 24))

    @cached_property
    def B0(self) -> GradedElement:
        return ahat_class(self.geom) * exp_half_c(self.geom)

    @cached_property
    def B(self) -> GradedElement:
        return self.twist * self.B0

    @cached_property
    def spinor(self) -> GradedElement:
        return ch_character("spinorV", self.geom)

    @cached_property
    def Vt(self) -> GradedElement:
        return ch_virtual(v_bundle(self.geom), "reduce")

    @cached_property
    def lam2(self) -> GradedElement:
        return ch_virtual(v_bundle(self.geom).reduced(), "lambda", 2)

    @cached_property
    def lam3(self) -> GradedElement:
        return ch_virtual(v_bundle(self.geom).reduced(), "lambda", 3)

    @cached_property
    def VV(self) -> GradedElement:
        return ch_virtual(v_bundle(self.geom).reduced(), "tensor-square")

    @cached_property
    def S(self) -> GradedElement:
        """ch(T~_C M - L~_C + sum W) for the E8 bundles of the family."""
        out = ch_virtual(tangent_bundle(self.geom), "reduce") - ch_virtual(lc_bundle(self.geom), "reduce")
        for i in range(1, self.geom.n_e8 + 1):
            out = out + ch_character("W", self.geom, i)
        return out

    def top(self, x: GradedElement, drop: int = 0) -> GradedElement:
        return graded_part(x, self.geom.top - drop)

    def scalar(self, c) -> GradedElement:
        return self.ring.scalar(c)


# -- level-one statements ----------------------------------------------------------------------

READINGS = ("derived", "printed")


def _sl2z_D(ing: Ingredients, variant: str, reading: str) -> GradedElement:
    if variant == "triple":
        return ing.spinor
    extra = 2 ** (ing.geom.lbar + 1) if reading == "derived" else 2
    return ing.spinor + extra


def _sl2z_Y(ing: Ingredients, variant: str, reading: str, kappa) -> GradedElement:
    """The bracket multiplying the untwisted A-hat form in the q^1 coefficient."""
    if variant == "triple":
        return ing.spinor * (ing.S + kappa + ing.Vt + ing.lam2.scale(2) - ing.VV)
    lam_coef = 2 ** (ing.geom.lbar + 1) if reading == "derived" else 2
    D = _sl2z_D(ing, variant, reading)
    return (ing.S + kappa) * D + ing.spinor * ing.Vt + ing.lam2.scale(lam_coef)


def _sl2z_readings(variant: str) -> tuple[str, ...]:
    return ("derived",) if variant == "triple" else READINGS


def _sl2z_theorem_sides(ing: Ingredients, variant: str, reading: str, kappa):
    Y = _sl2z_Y(ing, variant, reading, kappa)
    D = _sl2z_D(ing, variant, reading)
    lhs = ing.top(ing.B0 * Y)
    rhs = ing.A * ing.top(ing.twist * ing.B0 * D - ing.twist_m1 * ing.B0 * Y, drop=4)
    return lhs, rhs


def _sl2z_corollary_sides(ing: Ingredients, variant: str, reading: str, shift, multiplier):
    lhs = ing.top(ing.B0 * _sl2z_Y(ing, variant, reading, shift))
    rhs = ing.top(ing.B0 * _sl2z_D(ing, variant, reading)).scale(multiplier)
    return lhs, rhs


# -- level-two statements ------------------------------------------------------------------------


def _gamma_templates(ing: Ingredients, k1) -> list[GradedElement]:
    """The Q_2 coefficients at q^0, q^(1/2), q^1, q^(3/2) as characteristic forms."""
    B, A, Vt = ing.B, ing.A, ing.Vt
    c0 = B
    c12 = -(B * Vt)
    c1 = B * (ing.S + ing.lam2 + k1 - A)
    c32 = B * (-(ing.lam3 + Vt) - Vt * (ing.S + k1) + A * Vt)
    return [c0, c12, c1, c32]


def _gamma_form_rhs(ing: Ingredients, form: GammaForm) -> GradedElement:
    B, A, Vt = ing.B, ing.A, ing.Vt
    inner = (
        ing.scalar(form.K)
        + Vt.scale(form.v)
        + (ing.S + ing.lam2).scale(form.g)
        + ing.lam3.scale(form.l3)
        + (Vt * (ing.S + form.shift)).scale(form.t)
    )
    body = B * inner
    if form.a1:
        body = body + (A * B).scale(form.a1)
    if form.a2:
        body = body + (A * B * Vt).scale(form.a2)
    factor = Rational(2) ** ing.geom.lbar / Rational(2) ** form.p
    return ing.top(body).scale(factor)


def _gamma_beta(weight: int) -> list[Rational]:
    """Constant terms of (8 delta_1)^a eps_1^b: 8^a (1/4)^a (1/16)^b."""
    out = []
    for b in range(weight // 4 + 1):
        a = (weight - 4 * b) // 2
        out.append(Rational(2) ** a / Rational(16) ** b)
    return out


def gamma_weights(weight: int) -> list[Rational]:
    """gamma = beta M^-1, so that sum_r beta_r h_r = sum_k gamma_k (q^(k/2) coefficient)."""
    M = gamma_leading_matrix(weight)
    beta = _gamma_beta(weight)
    n = len(beta)
    gamma = [Rational(0)] * n
    # gamma M = beta, M lower-triangular with unit diagonal: solve from the last column
    for r in range(n - 1, -1, -1):
        acc = beta[r]
        for k in range(r + 1, n):
            acc -= gamma[k] * M[k][r]
        gamma[r] = acc / M[r][r]
    return gamma


def _two_adic(x: Rational) -> int:
    d = int(Fraction(int(x.numerator), int(x.denominator)).denominator)
    e = 0
    while d % 2 == 0:
        d //= 2
        e += 1
    return e


def _form_from_gamma(gamma: list[Rational], k1, constrained: bool) -> GammaForm:
    p = max(_two_adic(g) for g in gamma)
    gp = [g * Rational(2) ** p for g in gamma] + [Rational(0)] * (4 - len(gamma))
    g0, g12, g1, g32 = gp
    return GammaForm(
        p=p,
        K=g0 + g1 * k1,
        v=-g12 - g32,
        g=g1,
        l3=-g32,
        t=-g32,
        shift=Rational(k1),
        a1=None if constrained else -g1,
        a2=None if constrained else g32,
    )


# -- derivation -----------------------------------------------------------------------------------------


@dataclass
class DerivedIdentity:
    id: str
    constants: dict
    reading: str | None
    statement: str
    consistent_readings: tuple[str, ...] = ()


def _series_pair(spec: TheoremSpec, geom: Geometry, j: int = 1):
    """Graded theta-route series and ungraded bundle-route series."""
    theta = assemble_series(spec.family, geom, j=j, route="theta")
    bundle = assemble_series(spec.family, geom, j=j, route="bundle", graded=False)
    return theta, bundle


def _graded(series: QSeries, top: int) -> QSeries:
    return series.map(lambda c: graded_part(c, top))


def _diff_max(a: GradedElement, b: GradedElement) -> Rational:
    d = a - b
    return Rational(0) if d.is_zero() else d.max_abs()


def _sl2z_derive(spec: TheoremSpec, ing: Ingredients, bundle: QSeries):
    variant = spec.family.variant
    mu = sl2z_basis(spec.weight, 1)[1][STEP]
    q0, q1 = q_coeff(bundle, 0), q_coeff(bundle, STEP)
    per_reading = {}
    for reading in _sl2z_readings(variant):
        D = _sl2z_D(ing, variant, reading)
        base = _sl2z_Y(ing, variant, reading, 0).constant
        c0 = (q1.constant - base) / D.constant
        t0 = ing.B * D
        t1 = ing.B * _sl2z_Y(ing, variant, reading, c0) - ing.A * ing.B * D
        resid = max(_diff_max(q0, t0), _diff_max(q1, t1))
        per_reading[reading] = (c0, resid)
    return mu, per_reading


def _sl2z_statement(spec: TheoremSpec, reading: str, kappa, c0, mu) -> str:
    top = spec.dim
    n = spec.n_e8
    W = " + W_i + W_j" if n == 2 else " + W_i"
    if spec.family.variant == "triple":
        D = "ch(Delta(V))"

        def Y(k):
            return f"ch(Delta(V)) ch(T~ - L~ {_signed(k)}{W} + V~ + 2 L2(V~) - V~ (x) V~)"
    else:
        dplus = lam = "2^(l+1)" if reading == "derived" else "2"
        D = f"ch(Delta(V) + {dplus})"

        def Y(k):
            return (f"ch((T~ - L~ {_signed(k)}{W}) (x) (Delta(V) + {dplus})"
                    f" + Delta(V) (x) V~ + {lam} L2(V~))")
    if spec.kind == "theorem":
        return (f"{{Ahat exp(c/2) {Y(kappa)}}}^({top}) = A{{e^(A/24) Ahat exp(c/2) {D}"
                f" - (e^(A/24) - 1)/A Ahat exp(c/2) {Y(kappa)}}}^({top - 4})")
    return f"[A=0] {{Ahat exp(c/2) {Y(c0)}}}^({top}) = {_num(mu)} {{Ahat exp(c/2) {D}}}^({top})"


def _signed(k) -> str:
    k = Rational(k)
    return f"+ {_num(k)}" if k >= 0 else f"- {_num(-k)}"


def _gamma_statement(spec: TheoremSpec, form: GammaForm) -> str:
    top = spec.dim
    W = "W_i + W_j" if spec.n_e8 == 2 else "W_i"
    twist = "" if spec.constrained else "e^(A/24) "
    terms = [_num(form.K), f"{_num(form.v)} V~", f"{_num(form.g)} (T~ - L~ + {W} + L2(V~))"]
    if form.l3:
        terms.append(f"{_num(form.l3)} L3(V~)")
    if form.t:
        terms.append(f"{_num(form.t)} (T~ - L~ {_signed(form.shift)} + {W}) (x) V~")
    extra = ""
    if form.a1:
        extra += f" + {_num(form.a1)} A {twist}Ahat exp(c/2)"
    if form.a2:
        extra += f" + {_num(form.a2)} A {twist}Ahat exp(c/2) ch(V~)"
    pre = "" if not spec.constrained else "[A=0] "
    return (f"{pre}{{{twist}Ahat exp(c/2) ch(Delta(V))}}^({top}) = 2^(l-{form.p})"
            f"{{{twist}Ahat exp(c/2) ch({' + '.join(terms)}){extra}}}^({top})")


def derive_constants(spec: TheoremSpec, geom: Geometry) -> DerivedIdentity:
    """Derive the statement's constants from the series and the basis only."""
    if spec.kind == "modularity":
        raise ValueError("modularity ids carry no constants")
    ing = Ingredients(geom, spec.family.anomaly)
    if spec.group == "SL2Z":
        _, bundle = _series_pair(spec, geom)
        mu, per_reading = _sl2z_derive(spec, ing, bundle)
        consistent = tuple(r for r, (_, res) in per_reading.items() if res == 0)
        reading = consistent[0] if consistent else "derived"
        c0 = per_reading[reading][0]
        kappa = c0 - mu
        consts = {"shift": c0, "multiplier": mu, "kappa": kappa}
        text = _sl2z_statement(spec, reading, kappa, c0, mu)
        return DerivedIdentity(spec.id, consts, reading, text, consistent)
    _, bundle = _series_pair(spec, geom, j=2)
    base = _gamma_templates(ing, 0)[2].constant
    k1 = q_coeff(bundle, STEP).constant - base
    gamma = gamma_weights(spec.weight)
    form = _form_from_gamma(gamma, k1, spec.constrained)
    consts = {"k1": k1, "gamma": tuple(gamma), "form": form}
    return DerivedIdentity(spec.id, consts, None, _gamma_statement(spec, form))


# -- reports ------------------------------------------------------------------------------------------------

STATUSES = ("verified", "verified-with-discrepancy", "failed", "skipped")


@dataclass
class VerificationReport:
    id: str
    kind: str
    status: str
    mode: str
    dim: int
    lbar: int
    n_e8: int
    order: int
    trials_attempted: int
    trials_passed: int
    seeds: list
    residual_summary: dict
    derived_constants: dict
    printed_constants: dict
    agreement: dict
    derived_identity: str = ""
    printed_identity: str = ""
    printed_identity_holds: int | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "mode": self.mode,
            "dim": self.dim,
            "lbar": self.lbar,
            "nE8": self.n_e8,
            "order": self.order,
            "trials": {"attempted": self.trials_attempted, "passed": self.trials_passed, "seeds": self.seeds},
            "residual_summary": self.residual_summary,
            "derived_constants": self.derived_constants,
            "printed_constants": self.printed_constants,
            "agreement": self.agreement,
            "derived_identity": self.derived_identity,
            "printed_identity": self.printed_identity,
            "printed_identity_holds": self.printed_identity_holds,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class RunConfig:
    ids: tuple[str, ...] | None = None
    dim: int | None = None
    n_e8: int | None = None
    lbar: int = 2
    order: int = 5
    mode: str = "evaluated"
    trials: int = 20
    modularity_trials: int = 10
    seed: int = 0
    max_terms: int | None = 200_000

    def as_dict(self) -> dict:
        return {
            "ids": list(self.ids) if self.ids else "all",
            "dim": self.dim,
            "nE8": self.n_e8,
            "lbar": self.lbar,
            "qorder": self.order,
            "mode": self.mode,
            "trials": self.trials,
            "modularity_trials": self.modularity_trials,
            "seed": self.seed,
            "max_terms": self.max_terms,
        }


def geometry_for(spec: TheoremSpec, config: RunConfig, trial: int) -> tuple[Geometry, int | None]:
    """The geometry of one trial: seeded random (evaluated) or fully symbolic."""
    if config.mode == "symbolic":
        if config.lbar > 2:
            raise ValueError("symbolic mode is limited to lbar <= 2")
        geom = make_geometry(spec.dim, config.lbar, spec.n_e8, config.order, "symbolic",
                             max_terms=config.max_terms)
        sub = None
    else:
        sub = trial_seed(config.seed, spec.id, trial)
        geom = random_geometry(spec.dim, config.lbar, spec.n_e8, config.order, random.Random(sub))
    if spec.constrained:
        geom = on_shell(geom, spec.family.anomaly)
    return geom, sub


class _Residuals:
    def __init__(self):
        self.values: dict[str, Rational] = {}

    def add(self, name: str, value) -> None:
        value = Rational(value)
        self.values[name] = max(self.values.get(name, Rational(0)), value)

    def ok(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def merge(self, other: "_Residuals") -> None:
        for k, v in other.values.items():
            self.add(k, v)

    def summary(self) -> dict:
        return {k: _num(v) for k, v in sorted(self.values.items())}


def _match_residual(m) -> Rational:
    return m.residual_max


def _trial_count(spec: TheoremSpec, config: RunConfig) -> int:
    if config.mode == "symbolic":
        return 1
    return config.modularity_trials if spec.kind == "modularity" else config.trials


def check_modularity(spec: TheoremSpec, config: RunConfig) -> VerificationReport:
    """Basis matching, dual-route agreement and (level two) the transfer, per trial."""
    n = _trial_count(spec, config)
    res, seeds, passed = _Residuals(), [], 0
    for trial in range(n):
        geom, sub = geometry_for(spec, config, trial)
        seeds.append(sub)
        trial_res = _Residuals()
        if spec.group == "SL2Z":
            theta, bundle = _series_pair(spec, geom)
            trial_res.add("match", _match_residual(match_sl2z(theta, spec.weight)))
            trial_res.add("dual_oracle", 0 if theta == _graded(bundle, geom.top) else 1)
        else:
            t2, b2 = _series_pair(spec, geom, j=2)
            t1, b1 = _series_pair(spec, geom, j=1)
            m2 = match_gamma_upper0(t2, spec.weight)
            tr = transfer_gamma(t1, m2, geom.lbar)
            trial_res.add("match", _match_residual(m2))
            trial_res.add("transfer", tr.residual_max)
            ok_dual = t2 == _graded(b2, geom.top) and t1 == _graded(b1, geom.top)
            trial_res.add("dual_oracle", 0 if ok_dual else 1)
        passed += 1 if trial_res.ok() else 0
        res.merge(trial_res)
    status = "verified" if passed == n else "failed"
    return VerificationReport(
        spec.id, spec.kind, status, config.mode, spec.dim, config.lbar, spec.n_e8, config.order,
        n, passed, seeds, res.summary(), {"weight": spec.weight, "group": spec.group}, {}, {},
        derived_identity=f"{spec.family.name} is a {spec.group} modular form of weight {spec.weight}",
    )


def _printed_dict(spec: TheoremSpec) -> dict:
    out = {}
    for k, v in spec.printed.items():
        out[k] = v.as_dict() if isinstance(v, GammaForm) else (v if isinstance(v, str) else _num(v))
    return out


def _derived_dict(d: DerivedIdentity) -> dict:
    out = {}
    for k, v in d.constants.items():
        if isinstance(v, GammaForm):
            out[k] = v.as_dict()
        elif isinstance(v, tuple):
            out[k] = [_num(x) for x in v]
        else:
            out[k] = _num(v)
    if d.reading is not None:
        out["reading"] = d.reading
        out["consistent_readings"] = list(d.consistent_readings)
    return out


def _agreement(spec: TheoremSpec, d: DerivedIdentity) -> dict:
    p, c = spec.printed, d.constants
    agree = {}
    if spec.group == "SL2Z":
        if "kappa" in p:
            agree["kappa"] = p["kappa"] == c["kappa"]
        if "multiplier" in p and spec.kind == "theorem":
            agree["multiplier"] = p["multiplier"] == c["multiplier"]
        if spec.kind == "corollary":
            # the on-shell identity {B0 Y(a)} = b {B0 D} holds iff a - b = kappa
            agree["shift_minus_multiplier"] = p["shift"] - p["multiplier"] == c["kappa"]
        if "reading" in p:
            agree["reading"] = p["reading"] in d.consistent_readings
        return agree
    pf: GammaForm = p["form"]
    df: GammaForm = c["form"]
    agree["p"] = pf.p == df.p
    for name in ("K", "v", "g", "l3", "t"):
        agree[name] = getattr(pf, name) == getattr(df, name)
    if pf.t or df.t:
        agree["shift"] = pf.shift == df.shift
    if pf.a1 is not None:
        agree["a1"] = pf.a1 == df.a1
        agree["a2"] = pf.a2 == df.a2
    return agree


def _printed_statement(spec: TheoremSpec) -> str:
    p = spec.printed
    if spec.group == "Gamma":
        return _gamma_statement(spec, p["form"])
    reading = p.get("reading", "derived")
    if spec.kind == "theorem":
        return _sl2z_statement(spec, reading, p["kappa"], None, None)
    return _sl2z_statement(spec, reading, None, p["shift"], p["multiplier"])


def _sides_printed(spec: TheoremSpec, ing: Ingredients):
    p = spec.printed
    if spec.group == "Gamma":
        return ing.top(ing.B * ing.spinor), _gamma_form_rhs(ing, p["form"])
    reading = p.get("reading", "derived")
    if spec.kind == "theorem":
        return _sl2z_theorem_sides(ing, spec.family.variant, reading, p["kappa"])
    return _sl2z_corollary_sides(ing, spec.family.variant, reading, p["shift"], p["multiplier"])


def _one_trial(spec: TheoremSpec, geom: Geometry, derived: DerivedIdentity, res: _Residuals) -> tuple[bool, bool]:
    """Run every check on one geometry into ``res``; returns (all checks ok, printed identity ok)."""
    ing = Ingredients(geom, spec.family.anomaly)
    if spec.group == "SL2Z":
        theta, bundle = _series_pair(spec, geom)
        res.add("match", _match_residual(match_sl2z(theta, spec.weight)))
        res.add("dual_oracle", 0 if theta == _graded(bundle, geom.top) else 1)
        _, per_reading = _sl2z_derive(spec, ing, bundle)
        c0, tres = per_reading[derived.reading]
        res.add("templates", tres)
        res.add("constants", 0 if c0 == derived.constants["shift"] else 1)
        variant = spec.family.variant
        if spec.kind == "theorem":
            lhs, rhs = _sl2z_theorem_sides(ing, variant, derived.reading, derived.constants["kappa"])
        else:
            lhs, rhs = _sl2z_corollary_sides(
                ing, variant, derived.reading, c0, derived.constants["multiplier"]
            )
        res.add("identity", _diff_max(lhs, rhs))
    else:
        t2, b2 = _series_pair(spec, geom, j=2)
        t1, b1 = _series_pair(spec, geom, j=1)
        m2 = match_gamma_upper0(t2, spec.weight)
        tr = transfer_gamma(t1, m2, geom.lbar)
        res.add("match", _match_residual(m2))
        res.add("transfer", tr.residual_max)
        ok_dual = t2 == _graded(b2, geom.top) and t1 == _graded(b1, geom.top)
        res.add("dual_oracle", 0 if ok_dual else 1)
        k1 = derived.constants["k1"]
        templates = _gamma_templates(ing, k1)
        gamma = derived.constants["gamma"]
        tres = _diff_max(q_coeff(b1, 0), ing.B * ing.spinor)
        for k in range(len(gamma)):
            tres = max(tres, _diff_max(q_coeff(b2, HALF * k), templates[k]))
        res.add("templates", tres)
        lhs = ing.top(ing.B * ing.spinor)
        rhs = element_sum_scaled([ing.top(t) for t in templates[: len(gamma)]], gamma, ing)
        rhs = rhs.scale(Rational(2) ** geom.lbar)
        res.add("identity", _diff_max(lhs, rhs))
        res.add("form", _diff_max(rhs, _gamma_form_rhs(ing, derived.constants["form"])))
    pl, pr = _sides_printed(spec, ing)
    return res.ok(), pl == pr


def element_sum_scaled(items, coeffs, ing: Ingredients) -> GradedElement:
    out = ing.ring.zero
    for x, c in zip(items, coeffs):
        out = out + x.scale(c)
    return out


def verify_identity(spec: TheoremSpec, config: RunConfig) -> VerificationReport:
    n = _trial_count(spec, config)
    res, seeds = _Residuals(), []
    passed = printed_ok = 0
    derived: DerivedIdentity | None = None
    for trial in range(n):
        geom, sub = geometry_for(spec, config, trial)
        seeds.append(sub)
        if derived is None:
            derived = derive_constants(spec, geom)
        trial_res = _Residuals()
        ok, pok = _one_trial(spec, geom, derived, trial_res)
        res.merge(trial_res)
        passed += 1 if ok else 0
        printed_ok += 1 if pok else 0
    assert derived is not None
    agreement = _agreement(spec, derived)
    if passed < n:
        status = "failed"
    elif all(agreement.values()):
        status = "verified"
    else:
        status = "verified-with-discrepancy"
    notes = []
    if spec.group == "SL2Z" and "reading" in spec.printed and derived.reading != "printed":
        notes.append("the printed leading term Delta(V) + 2 does not match the expanded series; "
                     "the identity is stated with Delta(V) + 2^(l+1) and coefficient 2^(l+1) on L2(V~)")
    return VerificationReport(
        spec.id, spec.kind, status, config.mode, spec.dim, config.lbar, spec.n_e8, config.order,
        n, passed, seeds, res.summary(), _derived_dict(derived), _printed_dict(spec), agreement,
        derived_identity=derived.statement,
        printed_identity=_printed_statement(spec),
        printed_identity_holds=printed_ok,
        notes=notes,
    )


def _selected(config: RunConfig) -> list[TheoremSpec]:
    ids = config.ids or IDS
    unknown = [i for i in ids if i not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown id(s): {', '.join(unknown)}")
    out = []
    for i in ids:
        s = REGISTRY[i]
        if config.dim is not None and s.dim != config.dim:
            continue
        if config.n_e8 is not None and s.n_e8 != config.n_e8:
            continue
        out.append(s)
    return out


def run_one(spec: TheoremSpec, config: RunConfig) -> VerificationReport:
    try:
        if spec.kind == "modularity":
            return check_modularity(spec, config)
        return verify_identity(spec, config)
    except MonomialLimitError as exc:
        return VerificationReport(
            spec.id, spec.kind, "skipped", config.mode, spec.dim, config.lbar, spec.n_e8,
            config.order, 0, 0, [], {}, {}, _printed_dict(spec) if spec.kind != "modularity" else {},
            {}, notes=[f"monomial limit reached: {exc}"],
        )


def run_all(config: RunConfig) -> list[VerificationReport]:
    return [run_one(s, config) for s in _selected(config)]
