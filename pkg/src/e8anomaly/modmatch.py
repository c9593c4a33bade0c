"""Matching q-series against modular-form bases.

Two kinds of spaces are used:

* full level: the one-dimensional spaces spanned by E4^2, E4 E6 and E4^2 E6
  (weights 8, 10, 14);
* level two (the group with upper-right entry even): polynomials in
  ``8 delta_2`` and ``eps_2`` of the given weight.  The element
  ``(8 delta_2)^a eps_2^b`` starts with ``(-1)^a q^(b/2)``, so the system
  for the coefficients is triangular, with pivots ``+-1``.

All comparisons are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .coeffring import GradedElement, Rational
from .qseries import STEP, QSeries
from .thetas import eisenstein, level_two_form, scalar_ring

__all__ = [
    "ModularMatchError",
    "MatchResult",
    "TransferReport",
    "sl2z_basis",
    "gamma_basis",
    "gamma_leading_matrix",
    "match_sl2z",
    "match_gamma_upper0",
    "transfer_gamma",
]

HALF = STEP // 2

SL2Z_BASES = {8: ("E4^2", ("E4", "E4")), 10: ("E4E6", ("E4", "E6")), 14: ("E4^2E6", ("E4", "E4", "E6"))}
GAMMA_WEIGHTS = (8, 10, 12, 14)


class ModularMatchError(ValueError):
    pass


@dataclass(frozen=True)
class MatchResult:
    group: str
    weight: int
    labels: tuple[str, ...]
    coefficients: tuple[GradedElement, ...]
    residual_max: Rational
    residual_terms: int
    exponents_checked: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.residual_max == 0 and self.residual_terms == 0


@dataclass(frozen=True)
class TransferReport:
    weight: int
    lbar: int
    residual_max: Rational
    residual_terms: int
    exponents_checked: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.residual_max == 0 and self.residual_terms == 0


def _scalar_product(names, N: int) -> list[Rational]:
    ring = scalar_ring()
    out = QSeries.one(ring, STEP * N + 1)
    for n in names:
        out = out * eisenstein(n, N, ring)
    return out.rationals()


@lru_cache(maxsize=None)
def sl2z_basis(weight: int, N: int) -> tuple[str, tuple[Rational, ...]]:
    """Label and coefficients (indexed by eighths) of the level-one basis form."""
    if weight not in SL2Z_BASES:
        raise ModularMatchError(f"level-one matching supports weights 8, 10, 14, not {weight}")
    label, names = SL2Z_BASES[weight]
    return label, tuple(_scalar_product(names, N))


def _gamma_labels(weight: int, level: int) -> list[tuple[str, int, int]]:
    if weight not in GAMMA_WEIGHTS:
        raise ModularMatchError(f"level-two matching supports weights 8, 10, 12, 14, not {weight}")
    d, e = f"8delta{level}", f"eps{level}"
    out = []
    for b in range(weight // 4 + 1):
        a = (weight - 4 * b) // 2
        parts = ([f"({d})^{a}"] if a else []) + ([e if b == 1 else f"{e}^{b}"] if b else [])
        out.append(("".join(parts), a, b))
    return out


@lru_cache(maxsize=None)
def gamma_basis(weight: int, N: int, level: int = 2) -> tuple[tuple[str, tuple[Rational, ...]], ...]:
    """``(8 delta)^a eps^b`` for b = 0..weight//4, with a = (weight - 4b)/2."""
    ring = scalar_ring()
    delta = level_two_form(f"delta{level}", N, ring).scale(8)
    eps = level_two_form(f"eps{level}", N, ring)
    out = []
    for label, a, b in _gamma_labels(weight, level):
        s = (delta**a) * (eps**b)
        out.append((label, tuple(s.rationals())))
    return tuple(out)


def gamma_leading_matrix(weight: int, N: int = 2) -> tuple[tuple[Rational, ...], ...]:
    """Row i, column r: coefficient of q^(i/2) in basis element r."""
    basis = gamma_basis(weight, N)
    n = len(basis)
    return tuple(tuple(basis[r][1][HALF * i] for r in range(n)) for i in range(n))


def _residuals(series: QSeries, model: list[GradedElement]) -> tuple[Rational, int]:
    worst, terms = Rational(0), 0
    for c, m in zip(series.coeffs, model):
        d = c - m
        if not d.is_zero():
            worst = max(worst, d.max_abs())
            terms += d.terms()
    return worst, terms


def _check_lattice(series: QSeries, spacing: int, what: str) -> None:
    for e, c in enumerate(series.coeffs):
        if e % spacing and not c.is_zero():
            raise ModularMatchError(f"{what}: nonzero coefficient at q^({e}/8) off the lattice")


def match_sl2z(series: QSeries, weight: int) -> MatchResult:
    """Write ``series = lambda * basis`` and report the residual through its precision."""
    _check_lattice(series, STEP, "level-one matching")
    label, basis = sl2z_basis(weight, max(series.order, 1))
    lam = series.coeffs[0]
    model = [lam.scale(basis[e]) for e in range(series.prec)]
    worst, terms = _residuals(series, model)
    checked = tuple(range(0, series.prec, STEP))
    return MatchResult("SL2Z", weight, (label,), (lam,), worst, terms, checked)


def match_gamma_upper0(series: QSeries, weight: int) -> MatchResult:
    """Solve for ``h_r`` from the q^0, q^(1/2), ... coefficients, then check the rest."""
    _check_lattice(series, HALF, "level-two matching")
    N = max(series.order, 1)
    basis = gamma_basis(weight, N)
    n = len(basis)
    if HALF * (n - 1) >= series.prec:
        raise ModularMatchError(f"series precision too small for {n} coefficients")
    h: list[GradedElement] = []
    for i in range(n):
        acc = series.coeffs[HALF * i]
        for r in range(i):
            acc = acc - h[r].scale(basis[r][1][HALF * i])
        pivot = basis[i][1][HALF * i]
        h.append(acc.scale(1 / Rational(pivot)))
    model = []
    for e in range(series.prec):
        m = series.ring.zero
        for r in range(n):
            coef = basis[r][1][e]
            if coef:
                m = m + h[r].scale(coef)
        model.append(m)
    worst, terms = _residuals(series, model)
    checked = tuple(range(0, series.prec, HALF))
    labels = tuple(lbl for lbl, _ in basis)
    return MatchResult("Gamma^0(2)", weight, labels, tuple(h), worst, terms, checked)


def transfer_gamma(series_q1: QSeries, match2: MatchResult, lbar: int) -> TransferReport:
    """Compare ``series_q1`` with ``2^lbar sum h_r (8 delta_1)^a eps_1^b``."""
    if match2.group != "Gamma^0(2)":
        raise ModularMatchError("transfer needs a level-two match of the companion series")
    N = max(series_q1.order, 1)
    basis = gamma_basis(match2.weight, N, level=1)
    if len(basis) != len(match2.coefficients):
        raise ModularMatchError("basis size does not match the solved coefficients")
    factor = Rational(2) ** lbar
    model = []
    for e in range(series_q1.prec):
        m = series_q1.ring.zero
        for (_, coeffs), h in zip(basis, match2.coefficients):
            if coeffs[e]:
                m = m + h.scale(coeffs[e] * factor)
        model.append(m)
    worst, terms = _residuals(series_q1, model)
    return TransferReport(match2.weight, lbar, worst, terms, tuple(range(series_q1.prec)))
