import dataclasses
import hashlib
import random

import pytest

from e8anomaly.charforms import make_geometry, random_assignments
from e8anomaly.coeffring import Rational
from e8anomaly.modmatch import gamma_leading_matrix
from e8anomaly.theorems import (
    IDS,
    REGISTRY,
    STATUSES,
    GammaForm,
    RunConfig,
    derive_constants,
    gamma_weights,
    geometry_for,
    run_all,
    run_one,
    trial_seed,
)
from e8anomaly.theorems import Ingredients, _gamma_form_rhs, _selected, _sl2z_theorem_sides

FAST = RunConfig(trials=3, modularity_trials=2)


def test_registry_contents():
    assert len(IDS) == 27
    kinds = [REGISTRY[i].kind for i in IDS]
    assert kinds.count("modularity") == 10
    assert kinds.count("theorem") + kinds.count("corollary") == 17
    for i in IDS:
        s = REGISTRY[i]
        assert s.dim in (10, 14) and s.group in ("SL2Z", "Gamma")
        assert (s.kind == "modularity") == (not s.printed)


def test_selection_filters():
    dim10 = [s.id for s in _selected(RunConfig(dim=10))]
    assert dim10 == ["T2.9", "C2.10", "C2.18", "T3.3", "C3.4", "T3.11", "L2.8", "L2.17", "L3.2", "L3.10"]
    both = _selected(RunConfig(dim=14, n_e8=2))
    assert {s.id for s in both} == {"T2.3", "C2.4", "T2.12", "C2.13", "T3.9", "L2.2", "L2.11", "L3.8"}
    with pytest.raises(KeyError):
        run_all(RunConfig(ids=("T9.9",)))


def test_trial_seed_derivation():
    expected = int.from_bytes(hashlib.sha256(b"0/T2.3/4").digest()[:8], "big")
    assert trial_seed(0, "T2.3", 4) == expected
    assert trial_seed(0, "T2.3", 4) != trial_seed(1, "T2.3", 4)
    g1, s1 = geometry_for(REGISTRY["T2.3"], FAST, 1)
    g2, s2 = geometry_for(REGISTRY["T2.3"], FAST, 1)
    assert s1 == s2 and g1.assignments == g2.assignments


def test_constrained_geometries_are_on_shell():
    from e8anomaly.charforms import anomaly_class

    for i in ("C2.4", "C2.18", "T3.9"):
        spec = REGISTRY[i]
        geom, _ = geometry_for(spec, FAST, 0)
        assert anomaly_class(spec.family.anomaly, geom).is_zero()


def test_gamma_weights_against_hand_solution():
    # gamma M = beta with beta = (2^4, 2^2/16, 1/256) and the weight-8 leading matrix
    assert gamma_weights(8) == [Rational(-7, 8), Rational(1, 32), Rational(1, 256)]
    for w in (10, 12, 14):
        M = gamma_leading_matrix(w)
        g = gamma_weights(w)
        n = len(g)
        for r in range(n):
            b = (w - 4 * r) // 2
            assert sum(g[k] * M[k][r] for k in range(n)) == Rational(2) ** b / Rational(16) ** r


@pytest.mark.parametrize("ident,kappa,mu", [("T2.3", 8, -24), ("T2.6", 256, -264), ("T2.9", -488, 480)])
def test_level_one_constants_are_derived(ident, kappa, mu):
    spec = REGISTRY[ident]
    geom, _ = geometry_for(spec, FAST, 0)
    d = derive_constants(spec, geom)
    assert d.constants["kappa"] == kappa and d.constants["multiplier"] == mu


def test_derivation_ignores_printed_constants():
    for ident in ("T2.3", "T3.6", "C2.16"):
        spec = REGISTRY[ident]
        bogus = dataclasses.replace(spec, printed={})
        geom, _ = geometry_for(spec, FAST, 0)
        assert derive_constants(spec, geom).constants == derive_constants(bogus, geom).constants
    with pytest.raises(ValueError):
        derive_constants(REGISTRY["L2.2"], geom)


@pytest.mark.parametrize("ident,p,k1", [("T3.3", 8, -8), ("T3.6", 7, -8), ("T3.9", 11, -16), ("T3.11", 12, -16)])
def test_level_two_exponent_and_shift(ident, p, k1):
    spec = REGISTRY[ident]
    geom, _ = geometry_for(spec, FAST, 0)
    d = derive_constants(spec, geom)
    assert d.constants["form"].p == p
    assert d.constants["k1"] == k1
    assert (d.constants["form"].a1 is None) == spec.constrained


def test_theorem_verified_and_corollary_coherent():
    t = run_one(REGISTRY["T2.3"], FAST)
    c = run_one(REGISTRY["C2.4"], FAST)
    assert t.status == c.status == "verified"
    assert t.trials_passed == t.trials_attempted == 3
    assert t.printed_identity_holds == 3
    # corollary multiplier equals the theorem's, corollary shift is kappa + multiplier
    kappa = Rational(t.derived_constants["kappa"])
    assert Rational(c.derived_constants["multiplier"]) == Rational(t.derived_constants["multiplier"])
    assert Rational(c.derived_constants["shift"]) - Rational(c.derived_constants["multiplier"]) == kappa


def test_wrong_printed_constant_gives_discrepancy_not_failure():
    spec = REGISTRY["T2.9"]
    wrong = dataclasses.replace(spec, printed={"kappa": Rational(-480)})
    r = run_one(wrong, FAST)
    assert r.status == "verified-with-discrepancy"
    assert r.agreement == {"kappa": False}
    assert r.printed_identity_holds == 0
    assert r.derived_identity


def test_discrepant_level_two_reports():
    r = run_one(REGISTRY["T3.11"], FAST)
    assert r.status == "verified-with-discrepancy"
    assert r.agreement["K"] and r.agreement["p"] and not r.agreement["v"]
    assert r.residual_summary["identity"] == "0" and r.residual_summary["form"] == "0"


def test_weighted_reading_is_reported():
    r = run_one(REGISTRY["T2.12"], FAST)
    assert r.status == "verified-with-discrepancy"
    assert r.derived_constants["reading"] == "derived"
    assert r.agreement == {"kappa": True, "reading": False}
    assert r.notes


def test_modularity_report():
    r = run_one(REGISTRY["L3.10"], FAST)
    assert r.status == "verified"
    assert set(r.residual_summary) == {"match", "transfer", "dual_oracle"}
    assert len(r.seeds) == 2


def test_identity_sides_vanish_at_zero_geometry():
    names = random_assignments(14, 2, 2, random.Random(0))
    g = make_geometry(14, 2, 2, 2, assignments={k: 0 for k in names})
    ing = Ingredients(g, "A")
    lhs, rhs = _sl2z_theorem_sides(ing, "triple", "derived", 8)
    assert lhs.is_zero() and rhs.is_zero()
    assert _gamma_form_rhs(ing, GammaForm(8, Rational(1), Rational(1), Rational(1))).is_zero()


def test_symbolic_mode_small_cases():
    cfg = RunConfig(lbar=0, order=2, mode="symbolic")
    for ident in ("T2.9", "L3.2"):
        r = run_one(REGISTRY[ident], cfg)
        assert r.status == "verified" and r.mode == "symbolic" and r.seeds == [None]
    with pytest.raises(ValueError):
        geometry_for(REGISTRY["T2.9"], dataclasses.replace(cfg, lbar=3), 0)


def test_monomial_cap_gives_skipped():
    cfg = RunConfig(lbar=1, order=2, mode="symbolic", max_terms=50)
    r = run_one(REGISTRY["T2.9"], cfg)
    assert r.status == "skipped" and r.trials_attempted == 0
    assert "monomial limit" in r.notes[0]
    assert r.status in STATUSES


def test_report_dict_keys():
    d = run_one(REGISTRY["C2.10"], FAST).to_dict()
    assert set(d) == {
        "id", "kind", "status", "mode", "dim", "lbar", "nE8", "order", "trials",
        "residual_summary", "derived_constants", "printed_constants", "agreement",
        "derived_identity", "printed_identity", "printed_identity_holds", "notes",
    }
    assert d["printed_constants"] == {"shift": "0", "multiplier": "488"}
