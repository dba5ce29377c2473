"""Catalog oracles: fixed points, derivatives, overflow, semiconjugacy."""

import cmath
import math

import numpy as np
import pytest

import entirelab as el
from entirelab.catalog import MODEL_F1_COEFF, semiconjugacy_residual
from entirelab.errors import OverflowInChainError

ALL_MAPS = [
    el.f1(),
    el.f2(),
    el.f3(),
    el.scaled(1, 0.3 + 0.1j),
    el.scaled(3, 0.25),
    el.lambda_exp(0.25),
    el.model_f1(),
    el.model_f2(),
]

I_PI = 1j * math.pi
TWO_PI_I = 2j * math.pi


def sample_square(n, seed, re_lo=-20.0, re_hi=20.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(re_lo, re_hi, n) + 1j * rng.uniform(-20, 20, n)


# ---- point values ---------------------------------------------------------


def test_f1_repelling_fixed_point():
    m = el.f1()
    assert abs(m.evaluate(I_PI).value - I_PI) < 1e-14
    assert abs(m.derivative(I_PI).value - 2.0) < 1e-14


def test_f2_superattracting_lattice():
    m = el.f2()
    assert abs(m.evaluate(TWO_PI_I).value - TWO_PI_I) < 1e-14
    assert abs(m.derivative(TWO_PI_I).value) < 1e-12
    for c in m.critical_points(range(-5, 6)):
        assert abs(m.derivative(c).value) < 1e-12
        assert abs(m.evaluate(c).value - c) < 1e-12


def test_model_multipliers_exact():
    M1, M2 = el.model_f1(), el.model_f2()
    assert M1.derivative(0).value == MODEL_F1_COEFF
    assert M2.derivative(0).value == math.e
    assert M1.derivative(-1).value == 0
    assert M1.evaluate(-1).value == -math.exp(-2.0)


def test_lambda_exp_value():
    m = el.lambda_exp(0.25)
    assert abs(m.evaluate(1 + 1j).value - 0.25 * cmath.exp(1 + 1j)) == 0.0


# ---- overflow status ------------------------------------------------------


def test_overflow_is_status_not_error():
    r = el.f1().evaluate(-800)
    assert r.status is el.EvalStatus.EXP_OVERFLOW
    assert r.overflow_direction is el.OverflowDirection.POSITIVE_REAL_DOMINANT
    assert not r.finite


def test_overflow_threshold_at_700():
    assert el.f1().evaluate(-699.0).finite
    assert not el.f1().evaluate(-701.0).finite
    assert el.lambda_exp(1.0).evaluate(699.0).finite
    assert not el.lambda_exp(1.0).evaluate(701.0).finite
    assert not el.model_f2().evaluate(701.0).finite


def test_overflow_direction_tracks_phase():
    # e^(-z) spins as Im z moves: at Im z = pi the overflowing term is
    # hugely negative real, so the direction is not PositiveRealDominant.
    r = el.f1().evaluate(-800 + 1j * math.pi)
    assert r.status is el.EvalStatus.EXP_OVERFLOW
    assert r.overflow_direction is el.OverflowDirection.UNKNOWN


# ---- derivative and symmetry invariants -----------------------------------


@pytest.mark.parametrize("m", ALL_MAPS, ids=lambda m: m.map_id())
def test_finite_difference_consistency(m):
    h = 1e-6
    checked = 0
    for z in sample_square(1000, 101):
        z = complex(z)
        if abs(z) > 20:
            z = 20 * z / abs(z)
        vp, vm, d = m.evaluate(z + h), m.evaluate(z - h), m.derivative(z)
        if not (vp.finite and vm.finite and d.finite):
            continue
        fd = (vp.value - vm.value) / (2 * h)
        assert abs(d.value - fd) / max(1.0, abs(d.value)) < 1e-6
        checked += 1
    assert checked > 900


def test_translation_symmetry_f2():
    m = el.f2()
    for z in sample_square(1000, 102, re_lo=-5.0, re_hi=15.0):
        z = complex(z)
        assert abs(m.evaluate(z + TWO_PI_I).value - (m.evaluate(z).value + TWO_PI_I)) <= 1e-12


def test_f3_is_f2_plus_drift():
    m2, m3 = el.f2(), el.f3()
    assert m3.drift_per_iterate == TWO_PI_I
    assert m2.drift_per_iterate == 0
    for z in sample_square(1000, 103, re_lo=-5.0, re_hi=15.0):
        z = complex(z)
        assert abs(m3.evaluate(z).value - (m2.evaluate(z).value + TWO_PI_I)) <= 1e-12


@pytest.mark.parametrize("p", [1, 2, 3])
def test_scaling_is_exact_composition(p):
    lam = 0.3 + 0.1j
    s = el.scaled(p, lam)
    base = {1: el.f1(), 2: el.f2(), 3: el.f3()}[p]
    for z in (0.2 + 0.4j, -1 + 2j, 3 - 0.5j, I_PI):
        assert s.evaluate(z).value == lam * base.evaluate(z).value


@pytest.mark.parametrize("m", ALL_MAPS, ids=lambda m: m.map_id())
def test_scalar_and_array_paths_agree(m):
    zs = sample_square(400, 104)
    va, ok, _ = m.eval_array(zs)
    da, dok = m.deriv_array(zs)
    for z, v, k, dv, dk in zip(zs, va, ok, da, dok):
        sv, sd = m.evaluate(complex(z)), m.derivative(complex(z))
        assert sv.finite == bool(k)
        assert sd.finite == bool(dk)
        if k:
            assert abs(sv.value - v) <= 1e-14 * max(1.0, abs(v))
        if dk:
            assert abs(sd.value - dv) <= 1e-14 * max(1.0, abs(dv))


# ---- singular data --------------------------------------------------------


def test_bounded_singular_set_flags():
    bounded = {m.map_id(): m.singular.bounded_singular_set for m in ALL_MAPS}
    assert bounded == {
        "f1": False,
        "f2": False,
        "f3": False,
        "scaled-f1:0.3,0.1": False,
        "scaled-f3:0.25,0.0": False,
        "lambda-exp:0.25,0.0": True,
        "model-F1": True,
        "model-F2": True,
    }


def test_model_f1_singular_values():
    s = el.model_f1().singular
    assert set(s.known_singular_values) == {0j, complex(-math.exp(-2.0))}
    assert s.asymptotic_values == (0j,)
    assert s.critical_family.kind == "single"
    assert s.critical_family.single_point == -1


def test_lambda_exp_singular_values():
    s = el.lambda_exp(0.25).singular
    assert s.known_singular_values == (0j,)
    assert s.asymptotic_values == (0j,)
    assert s.critical_family is None


def test_f1_critical_values_match_lattice():
    m = el.f1()
    for n, c in zip(range(-2, 3), m.critical_points(range(-2, 3))):
        cv = m.evaluate(c).value
        assert abs(cv - (2.0 + TWO_PI_I * n)) < 1e-12
        assert cv in m.critical_values_near(2.0 + TWO_PI_I * n, 0.1) or \
            any(abs(v - cv) < 1e-12 for v in m.critical_values_near(2.0 + TWO_PI_I * n, 0.1))


def test_critical_probes_above_large_threshold():
    # representation floor: near 2 pi i n with n ~ 1.6e7 the best double
    # keeps |f'| a few 1e-9; polished probes must stay at that floor
    pts = el.f2().critical_points_with_image_above(1e8, count=8)
    assert len(pts) == 8
    for c in pts:
        assert abs(el.f2().evaluate(c).value) > 1e8
        assert abs(el.f2().derivative(c).value) <= 1e-8


def test_sup_modulus_dominates_boundary_samples():
    th = np.linspace(0, 2 * math.pi, 10_000, endpoint=False)
    for m in ALL_MAPS:
        for c, r in ((0j, 0.5), (1 + 1j, 2.0), (-2 + 0j, 1.0)):
            ring = c + r * np.exp(1j * th)
            v, ok, _ = m.eval_array(ring)
            if ok.any():
                assert m.sup_modulus_on_disc(c, r) >= float(np.max(np.abs(v[ok])))


def test_sup_modulus_frozen_values():
    assert 0.303 <= el.model_f1().sup_modulus_on_disc(0, 0.5) <= 0.304
    assert 0.679 <= el.lambda_exp(0.25).sup_modulus_on_disc(0, 1.0) <= 0.680


# ---- semiconjugacy --------------------------------------------------------


def test_semiconjugacy_point_examples():
    assert semiconjugacy_residual(el.f1(), 0.3 + 0.7j) < 1e-10
    assert semiconjugacy_residual(el.f2(), I_PI) < 1e-10
    assert semiconjugacy_residual(el.f3(), 1 + 2j) < 1e-10


def test_semiconjugacy_overflow_chain():
    with pytest.raises(OverflowInChainError):
        semiconjugacy_residual(el.f1(), -800)


def test_semiconjugacy_rejects_wrong_model():
    with pytest.raises(ValueError):
        semiconjugacy_residual(el.f1(), 0.5, model=el.model_f2())
    with pytest.raises(ValueError):
        semiconjugacy_residual(el.lambda_exp(0.25), 0.5)


def test_semiconjugacy_refined_where_doubles_round():
    # at z = -3 + i pi the common value has modulus ~4e9; binary64 noise
    # there is ~1e-6, far above the 1e-10 identity tolerance
    assert semiconjugacy_residual(el.f1(), -3 + I_PI) < 1e-10


def test_semiconjugacy_mostly_tight_on_random_samples():
    kept = good = 0
    for z in sample_square(500, 20260816):
        try:
            r = semiconjugacy_residual(el.f1(), complex(z))
        except OverflowInChainError:
            continue
        kept += 1
        good += r < 1e-10
    assert kept > 400
    assert good / kept >= 0.95


def test_model_for_pairing():
    assert el.model_for(el.f1()).kind is el.MapKind.MODEL_F1
    assert el.model_for(el.f2()).kind is el.MapKind.MODEL_F2
    assert el.model_for(el.f3()).kind is el.MapKind.MODEL_F2
    assert el.model_for(el.model_f1()) is None


# ---- identifiers ----------------------------------------------------------


def test_map_id_round_trip():
    for m in ALL_MAPS:
        again = el.parse_map_id(m.map_id())
        assert again.kind is m.kind
        assert again.lam == m.lam
        assert again.p == m.p


@pytest.mark.parametrize("bad", ["f4", "scaled-f2", "lambda-exp:abc", "", "model-F3",
                                 "scaled-f0:1,0"])
def test_parse_map_id_rejects(bad):
    with pytest.raises(ValueError):
        el.parse_map_id(bad)
