"""Fixed-point continuation, winding numbers, the perturbed-parameter
search, and the zeros of the first catalog map."""

import cmath
import json
import math

import numpy as np
import pytest

import entirelab as el
from entirelab import instability as ins
from entirelab.errors import (
    ContinuationBreakdownError,
    NoRootInDiscError,
    StepLimitExceededError,
    ZeroOnContourError,
)

I_PI = 1j * math.pi
TWO_PI = 2.0 * math.pi

# 40-digit continuation oracles, frozen from an independent solver
PHI_AT_SMALL_PERTURB = -4.9323354442099e-8 + 3.1412785571540501j
MULT_AT_SMALL_PERTURB = 2.0001999999950677 + 0.00031412785571540501j
LAMBDA0_P1 = 1.000249259093132523 + 0.001710260183079557j
LAMBDA0_P3 = 1.000249550744754849 + 0.001390841806760457j
MULT_MOD_P1 = 1.995132743502866
STRIP_ROOT = -2.0528264820715920 + 7.7184137887709178j
TALL_ROOT = -6.9083638930182466 + 1000.5913553649618j


# ---- fixed-point continuation ------------------------------------------


def test_path_at_lambda_one():
    path = ins.continue_fixed_point(1, I_PI, [1.0])
    assert len(path.samples) == 1
    assert abs(path.phi - I_PI) <= 1e-12
    assert abs(path.samples[0].multiplier - 2.0) <= 1e-12


def test_path_to_small_perturbation():
    lams = np.linspace(1.0, 1.0 + 1e-4, 5)
    path = ins.continue_fixed_point(1, I_PI, lams)
    assert abs(path.phi - PHI_AT_SMALL_PERTURB) <= 1e-11
    assert abs(path.samples[-1].multiplier - MULT_AT_SMALL_PERTURB) <= 1e-10


def test_path_invariants_hold_at_every_sample():
    lams = np.linspace(1.0, 1.0 + 5e-4 + 5e-4j, 9)
    path = ins.continue_fixed_point(1, I_PI, lams)
    assert len(path.samples) == 9
    for s in path.samples:
        m = el.scaled(1, s.lam)
        assert abs(m.evaluate(s.location).value - s.location) < 1e-11
        assert abs(s.multiplier) > 1.0


def test_path_consistency_under_refinement():
    coarse = ins.continue_fixed_point(1, I_PI, np.linspace(1.0, 1.0 + 1e-4, 6))
    fine = ins.continue_fixed_point(1, I_PI, np.linspace(1.0, 1.0 + 1e-4, 11))
    assert abs(coarse.phi - fine.phi) < 1e-9


def test_absurd_parameter_jump_breaks_continuation():
    with pytest.raises(ContinuationBreakdownError):
        ins.continue_fixed_point(1, I_PI, [1.0, 100.0])


def test_superattracting_start_breaks_immediately():
    # the p=2 lattice fixed points have multiplier 0, never repelling
    with pytest.raises(ContinuationBreakdownError):
        ins.continue_fixed_point(2, 0j, [1.0])


def test_continuation_guards():
    with pytest.raises(ValueError):
        ins.continue_fixed_point(1, 1.0 + 0j, [1.0])
    with pytest.raises(ValueError):
        ins.continue_fixed_point(1, I_PI, [])


# ---- winding numbers ----------------------------------------------------


def test_winding_simple_zero_inside():
    wr = ins.winding_number(lambda l: l - 1.0, 1.0, 0.01)
    assert wr.winding_number == 1
    assert wr.min_boundary_modulus == pytest.approx(0.01)


def test_winding_double_zero():
    wr = ins.winding_number(lambda l: (l - 1.0) ** 2, 1.0, 0.01)
    assert wr.winding_number == 2


def test_winding_zero_outside():
    wr = ins.winding_number(lambda l: l - 2.0, 1.0, 0.01)
    assert wr.winding_number == 0
    assert wr.min_boundary_modulus > 0.9


def test_winding_zero_on_contour():
    with pytest.raises(ZeroOnContourError):
        ins.winding_number(lambda l: l - 1.01, 1.0, 0.01)


def test_winding_discontinuous_handle_exhausts_steps():
    with pytest.raises(StepLimitExceededError):
        ins.winding_number(lambda l: 1.0 if l.imag >= 0 else -1.0, 0j, 1.0)


def test_winding_guards():
    with pytest.raises(ValueError):
        ins.winding_number(lambda l: l, 0j, -1.0)
    with pytest.raises(ValueError):
        ins.winding_number(lambda l: l, 0j, 1.0, min_steps=2)


def test_winding_additive_over_products():
    rng = np.random.default_rng(7)
    for _ in range(10):
        za = rng.uniform(-0.8, 0.8, 2) + 1j * rng.uniform(-0.8, 0.8, 2)
        zb = rng.uniform(1.5, 3.0, 2) + 1j * rng.uniform(-2.0, 2.0, 2)
        g = lambda l: (l - za[0]) * (l - zb[0])
        h = lambda l: (l - za[1]) * (l - zb[1])
        wg = ins.winding_number(g, 0j, 1.0).winding_number
        wh = ins.winding_number(h, 0j, 1.0).winding_number
        wgh = ins.winding_number(lambda l: g(l) * h(l), 0j, 1.0).winding_number
        assert wg == wh == 1
        assert wgh == wg + wh


def test_winding_counts_every_newton_root():
    # argument principle vs direct refinement on random polynomials
    rng = np.random.default_rng(11)
    for _ in range(10):
        roots = rng.uniform(-0.7, 0.7, 3) + 1j * rng.uniform(-0.7, 0.7, 3)
        coeffs = np.poly(roots)
        g = lambda l: complex(np.polyval(coeffs, l))
        refined = []
        for r in roots:
            z = complex(r) + 1e-3
            for _ in range(60):
                dv = complex(np.polyval(np.polyder(coeffs), z))
                z -= complex(np.polyval(coeffs, z)) / dv
            if abs(z) < 1.0 and all(abs(z - q) > 1e-8 for q in refined):
                refined.append(z)
        w = ins.winding_number(g, 0j, 1.0).winding_number
        assert w >= len(refined)


# ---- instability parameter search ---------------------------------------


@pytest.fixture(scope="module")
def figure_search():
    return ins.find_instability_parameter(1, 1000, 0.01)


def test_figure_parameter_location(figure_search):
    res = figure_search
    assert abs(res.lambda0 - LAMBDA0_P1) <= 1e-9
    assert abs(res.lambda0 - (1.00025 + 0.00171j)) < 5e-4


def test_figure_parameter_certificates(figure_search):
    res = figure_search
    assert res.winding >= 1
    assert res.residual < 1e-8
    assert res.fixed_point_class is el.StabilityClass.REPELLING
    assert abs(abs(res.multiplier) - MULT_MOD_P1) <= 1e-6


def test_figure_parameter_returns_nearest_chain_zero(figure_search):
    # neighbouring chain zeros sit at distances 1.87e-3 and 2.12e-3
    assert abs(figure_search.lambda0 - 1.0) == pytest.approx(1.7283e-3,
                                                             rel=1e-3)


def test_critical_point_lands_on_the_continued_fixed_point(figure_search):
    # two steps of the perturbed map send z_1000 onto a repelling fixed
    # point, so the critical point sits in the chaotic locus
    lam = figure_search.lambda0
    m = el.scaled(1, lam)
    zn = m.critical_points([1000])[0]
    landing = m.evaluate(m.evaluate(zn).value).value
    assert abs(m.evaluate(landing).value - landing) < 1e-8
    assert abs(m.derivative(landing).value) > 1.0


def test_instability_json_round_trip(figure_search):
    blob = json.loads(figure_search.to_json())
    assert blob["p"] == 1 and blob["n"] == 1000
    assert blob["delta"] == pytest.approx(0.01)
    assert blob["winding"] == figure_search.winding
    assert abs(complex(blob["lambda0_re"], blob["lambda0_im"])
               - figure_search.lambda0) == 0.0
    assert blob["residual"] < 1e-8


def test_p3_search_hits_its_own_chain():
    res = ins.find_instability_parameter(3, 1000, 0.01)
    assert abs(res.lambda0 - LAMBDA0_P3) <= 1e-9
    assert res.residual < 1e-8
    assert res.fixed_point_class is el.StabilityClass.REPELLING


def test_tiny_disc_has_no_root():
    # the nearest chain zero lies ~1.7e-3 from 1
    with pytest.raises(NoRootInDiscError):
        ins.find_instability_parameter(1, 1000, 1e-6)


def test_instability_guards():
    with pytest.raises(ValueError):
        ins.find_instability_parameter(2, 1000, 0.01)
    with pytest.raises(ValueError):
        ins.find_instability_parameter(4, 1000, 0.01)
    with pytest.raises(ValueError):
        ins.find_instability_parameter(1, 1000, 0.2)
    with pytest.raises(ValueError):
        ins.find_instability_parameter(1, 1000, 0.0)


def test_small_n_rejected_dynamically():
    # |psi2| cannot reach modulus 10 on the contour for n = 1
    with pytest.raises(ValueError):
        ins.find_instability_parameter(1, 1, 0.01)


# ---- zeros of f1 ---------------------------------------------------------


def test_zeros_in_first_admissible_strip():
    roots = ins.zeros_of_f1((TWO_PI, 2 * TWO_PI))
    assert len(roots) == 1
    assert abs(roots[0] - STRIP_ROOT) <= 1e-8
    m = el.f1()
    assert abs(m.evaluate(roots[0]).value) < 1e-10


def test_zero_near_im_1000_matches_asymptotics():
    roots = ins.zeros_of_f1((995.0, 1005.0))
    assert any(abs(r - TALL_ROOT) <= 1e-7 for r in roots)
    for r in roots:
        assert abs(el.f1().evaluate(r).value) < 1e-10
        assert abs(r.real + math.log(r.imag)) / math.log(r.imag) < 0.1


def test_zeros_two_strips_sorted_and_distinct():
    roots = ins.zeros_of_f1((TWO_PI, 3 * TWO_PI), per_strip=16)
    assert len(roots) == 2
    assert roots[0].imag < roots[1].imag
    assert all(TWO_PI <= r.imag <= 3 * TWO_PI for r in roots)


def test_zeros_guards():
    with pytest.raises(ValueError):
        ins.zeros_of_f1((0.0, 1.0))
    with pytest.raises(ValueError):
        ins.zeros_of_f1((5.0, 10.0))
    with pytest.raises(ValueError):
        ins.zeros_of_f1((TWO_PI, TWO_PI))
    with pytest.raises(ValueError):
        ins.zeros_of_f1((TWO_PI, 2 * TWO_PI), per_strip=0)
