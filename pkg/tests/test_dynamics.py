"""Orbits, fixed points, postsingular orbits, certificates, and the
appendix phenomena checks."""

import cmath
import json
import math

import numpy as np
import pytest

import entirelab as el
from entirelab import dynamics as dy
from entirelab import metrics as mt
from entirelab.errors import NoSampleSatisfiesConstraintError

TWO_PI_I = 2j * math.pi

# attracting fixed point of 0.25 e^x, solved to 30 digits externally
EXP_QUARTER_FIXED = 0.357402956181388903


# ---- iterate ----------------------------------------------------------------


def test_f1_orbit_escapes_right():
    orbit = dy.iterate(el.f1(), 1.0, 200)
    assert orbit.status is dy.OrbitStatus.ESCAPED_RIGHT
    assert orbit.points[-1].real > 50.0


def test_f2_orbit_converges_to_lattice_point():
    orbit = dy.iterate(el.f2(), TWO_PI_I + 0.1, 200)
    assert orbit.status is dy.OrbitStatus.CONVERGED_TO_POINT
    assert abs(orbit.limit - TWO_PI_I) <= 1e-8
    assert orbit.residual < 1e-9


def test_f3_compensated_orbit_converges():
    orbit = dy.iterate(el.f3(), 0.1, 200, drift_compensated=True)
    assert orbit.drift_compensated
    assert orbit.status is dy.OrbitStatus.CONVERGED_TO_POINT
    assert abs(orbit.limit) <= 1e-9


def test_exp_quarter_orbit_limit():
    orbit = dy.iterate(el.lambda_exp(0.25), 0.0, 200)
    assert orbit.status is dy.OrbitStatus.CONVERGED_TO_POINT
    assert abs(orbit.limit - EXP_QUARTER_FIXED) <= 1e-8


def test_orbit_recurrence_invariant():
    m = el.f3()
    orbit = dy.iterate(m, 0.3 + 0.2j, 30, drift_compensated=True)
    drift = m.drift_per_iterate
    for a, b in zip(orbit.points, orbit.points[1:]):
        assert abs(m.evaluate(a).value - drift - b) <= 1e-12
    plain = dy.iterate(el.f1(), 1.0, 30)
    for a, b in zip(plain.points, plain.points[1:]):
        assert abs(el.f1().evaluate(a).value - b) <= 1e-12


def test_orbit_limit_is_fixed():
    orbit = dy.iterate(el.lambda_exp(0.25), 0.0, 200)
    m = el.lambda_exp(0.25)
    assert abs(m.evaluate(orbit.limit).value - orbit.limit) < 1e-9


def test_orbit_budget_and_overflow():
    assert dy.iterate(el.f1(), 1.0, 3).status is \
        dy.OrbitStatus.BUDGET_EXHAUSTED
    o = dy.iterate(el.lambda_exp(1.0), 701.0, 10)
    assert o.status is dy.OrbitStatus.EXP_OVERFLOW
    assert o.points == (701.0 + 0j,)
    with pytest.raises(ValueError):
        dy.iterate(el.f1(), 1.0, 0)


def test_escape_policy_threshold():
    orbit = dy.iterate(el.f1(), 1.0, 200, dy.EscapePolicy(10.0))
    assert orbit.status is dy.OrbitStatus.ESCAPED_RIGHT
    assert orbit.points[-1].real > 10.0
    assert len(orbit.points) < 15


def test_orbit_csv():
    orbit = dy.iterate(el.f1(), 1.0, 5)
    lines = orbit.to_csv().splitlines()
    assert lines[0] == "k,re,im"
    assert len(lines) == len(orbit.points) + 1


def test_drift_identity_between_orbits():
    # f3^n(z) - 2 pi i n stays within 1e-9 of f2^n(z) while finite.  The
    # pair of orbits separates at the Lyapunov rate (the product of the
    # |1 - e^-z| factors along the way), so seeds are drawn where that
    # product stays small: starts right of Re = 25 keep 20 steps in the
    # gently contracting zone Re > 2, and lattice-basin seeds contract
    # from the first step.  Outside those zones binary64 twin orbits
    # blow past any fixed tolerance once e^-z throws them apart.
    rng = np.random.default_rng(20260816)
    far = rng.uniform(25, 45, 60) + 1j * rng.uniform(-20, 20, 60)
    ns = rng.integers(-3, 4, 40)
    basin = (TWO_PI_I * ns
             + 0.3 * np.sqrt(rng.uniform(0, 1, 40))
             * np.exp(2j * math.pi * rng.uniform(0, 1, 40)))
    drift = el.f3().drift_per_iterate
    compared = 0
    for z in np.concatenate([far, basin]):
        a = dy.iterate(el.f3(), complex(z), 20)
        b = dy.iterate(el.f2(), complex(z), 20)
        for k in range(min(len(a.points), len(b.points))):
            assert abs(a.points[k] - k * drift - b.points[k]) <= 1e-9
            compared += 1
    assert compared >= 1000


# ---- fixed points -----------------------------------------------------------


def test_f1_repelling_fixed_point():
    recs = dy.find_fixed_points(el.f1(), [0.05 + 3.0j])
    assert len(recs) == 1
    r = recs[0]
    assert abs(r.location - 1j * math.pi) <= 1e-10
    assert abs(r.multiplier - 2.0) <= 1e-10
    assert r.stability is dy.StabilityClass.REPELLING


def test_f2_superattracting_lattice():
    seeds = [TWO_PI_I * n + 0.3 for n in range(-5, 6)]
    recs = dy.find_fixed_points(el.f2(), seeds)
    assert len(recs) == 11
    assert all(r.stability is dy.StabilityClass.SUPERATTRACTING
               for r in recs)
    locs = sorted(r.location.imag for r in recs)
    for n, im in zip(range(-5, 6), locs):
        assert abs(im - 2 * math.pi * n) <= 1e-8


def test_model_f2_fixed_points():
    recs = dy.find_fixed_points(el.model_f2(), [0.1, -0.9])
    assert len(recs) == 2
    by_loc = {round(r.location.real): r for r in recs}
    assert abs(by_loc[0].multiplier - math.e) <= 1e-10
    assert by_loc[0].stability is dy.StabilityClass.REPELLING
    assert abs(by_loc[-1].multiplier) <= 1e-10
    assert by_loc[-1].stability is dy.StabilityClass.SUPERATTRACTING


def test_fixed_point_invariants_and_dedup():
    m = el.f1()
    recs = dy.find_fixed_points(m, [0.05 + 3.0j, -0.03 + 3.2j])
    assert len(recs) == 1
    r = recs[0]
    assert abs(m.evaluate(r.location).value - r.location) < 1e-10
    assert abs(m.derivative(r.location).value - r.multiplier) <= 1e-10


def test_classification_stable_under_seed_perturbation():
    m = el.f1()
    base = dy.find_fixed_points(m, [0.05 + 3.0j])[0]
    for k in range(6):
        seed = base.location + 1e-3 * cmath.exp(1j * k)
        again = dy.find_fixed_points(m, [seed])[0]
        assert abs(again.location - base.location) <= 1e-8
        assert again.stability is base.stability


def test_nonconvergent_seed_dropped():
    # far right the Newton correction degenerates; no record, no error
    assert dy.find_fixed_points(el.f1(), [30.0]) == []


# ---- postsingular orbits ----------------------------------------------------


def test_model_f1_postsingular_bounded():
    rep = dy.postsingular_orbit(el.model_f1(), 50)
    assert rep.bounded
    assert rep.status is dy.PostsingularStatus.BOUNDED
    assert rep.max_modulus < 0.14
    assert all(abs(z) < 0.14 for z in rep.points)


def test_f1_postsingular_unbounded_metadata():
    rep = dy.postsingular_orbit(el.f1(), 5)
    assert rep.status is dy.PostsingularStatus.FAILED_UNBOUNDED_S
    assert not rep.bounded


def test_exp_quarter_postsingular_limit():
    rep = dy.postsingular_orbit(el.lambda_exp(0.25), 50)
    assert rep.bounded
    assert abs(rep.points[-1] - EXP_QUARTER_FIXED) <= 1e-9
    with pytest.raises(ValueError):
        dy.postsingular_orbit(el.lambda_exp(0.25), 0)


# ---- hyperbolicity certificates ---------------------------------------------


def test_model_f1_certificate():
    cert = dy.certify_hyperbolic(el.model_f1(), [0.5])
    assert cert.status is dy.CertificateStatus.CERTIFIED
    assert 0.303 <= cert.sup_bound <= 0.304
    assert cert.margin > 0
    assert cert.discs == ((0j, 0.5),)
    assert all(abs(v) < 0.5 - 1e-9 for v in cert.singular_values)


def test_exp_quarter_certificate():
    cert = dy.certify_hyperbolic(el.lambda_exp(0.25), [1.0])
    assert cert.status is dy.CertificateStatus.CERTIFIED
    assert 0.679 <= cert.sup_bound <= 0.680


def test_certificate_failures():
    assert dy.certify_hyperbolic(el.f1(), [1.0, 10.0]).status is \
        dy.CertificateStatus.FAILED_UNBOUNDED_S
    cert = dy.certify_hyperbolic(el.model_f2(), [0.5, 1.5, 3.0])
    assert cert.status is dy.CertificateStatus.FAILED_NO_ABSORBING_SET
    with pytest.raises(ValueError):
        dy.certify_hyperbolic(el.model_f1(), [])
    with pytest.raises(ValueError):
        dy.certify_hyperbolic(el.model_f1(), [-0.5])


def test_certificate_soundness_on_boundary():
    cert = dy.certify_hyperbolic(el.model_f1(), [0.5])
    center, radius = cert.discs[0]
    th = np.linspace(0.0, 2 * math.pi, 10_000, endpoint=False)
    vals, ok, _ = el.model_f1().eval_array(center + radius * np.exp(1j * th))
    assert ok.all()
    assert float(np.abs(vals).max()) <= cert.sup_bound + 1e-9


def test_certificate_json():
    doc = json.loads(dy.certify_hyperbolic(el.model_f1(), [0.5]).to_json())
    assert doc["radius"] == 0.5
    assert doc["status"] == "Certified"
    assert 0.303 <= doc["supBound"] <= 0.304
    assert [0.0, 0.0] in doc["singularValues"]
    doc = json.loads(dy.certify_hyperbolic(el.f1(), [1.0]).to_json())
    assert doc["status"] == "FailedUnboundedS"
    assert doc["radius"] is None


# ---- Baker domain check -----------------------------------------------------


def test_baker_report_basics():
    rep = dy.baker_domain_check(el.f1(), 100, extra_points=[1.0, -1.0])
    assert rep.monotone
    assert rep.lower_bound_ok
    assert rep.escape_verified
    assert rep.min_gain > 0
    row_one = next(s for s in rep.samples if s.z == 1.0)
    assert row_one.gain >= 1.0 - math.exp(-1.0)
    row_out = next(s for s in rep.samples if s.z == -1.0)
    assert not row_out.in_domain
    assert rep.to_csv().splitlines()[0] == "re,im,gain,in_domain"


def test_baker_monotone_dense():
    rep = dy.baker_domain_check(el.f1(), 10_000)
    assert len(rep.samples) >= 10_000
    assert rep.monotone
    assert rep.min_gain > 0


def test_baker_interior_orbit_escapes():
    orbit = dy.iterate(el.f1(), 0.01 + 100j, 100)
    assert orbit.status is dy.OrbitStatus.ESCAPED_RIGHT


def test_baker_check_guards():
    with pytest.raises(ValueError):
        dy.baker_domain_check(el.f2())
    with pytest.raises(ValueError):
        dy.baker_domain_check(el.f1(), 2)


# ---- wandering orbit check --------------------------------------------------


@pytest.mark.parametrize("n0,count", [(0, 5), (-3, 6)])
def test_wandering_orbit_identities(n0, count):
    rep = dy.wandering_orbit_check(el.f3(), n0, count)
    assert rep.all_pass
    assert rep.max_step_residual <= 1e-12
    assert len(rep.rows) == count + 1
    assert [r.n for r in rep.rows] == list(range(n0, n0 + count + 1))
    for r in rep.rows:
        assert r.fixed_residual <= 1e-12
        assert r.multiplier_modulus < 1e-8


def test_wandering_perturbed_start_falls_back():
    z0 = TWO_PI_I + 0.05
    orbit = dy.iterate(el.f3(), z0, 200, drift_compensated=True)
    assert orbit.status is dy.OrbitStatus.CONVERGED_TO_POINT
    assert abs(orbit.limit - TWO_PI_I) <= 1e-8


def test_wandering_check_guards():
    with pytest.raises(ValueError):
        dy.wandering_orbit_check(el.f2())
    with pytest.raises(ValueError):
        dy.wandering_orbit_check(el.f3(), 0, 0)
    lines = dy.wandering_orbit_check(el.f3()).to_csv().splitlines()
    assert lines[0] == "n,re,im,step_residual,fixed_residual,multiplier"


# ---- expansion reports ------------------------------------------------------


def test_model_f1_expands_outside_absorbing_disc():
    reg = mt.complement_of_discs([(0j, 0.5)])
    rep = dy.expansion_report(el.model_f1(), reg,
                              mt.hyperbolic_lower_estimate(reg))
    assert rep.sampled_inf > 1.0


def test_exp_quarter_expands_cylindrically():
    reg = mt.exterior_of_radius(1.0)
    rep = dy.expansion_report(el.lambda_exp(0.25), reg, mt.cylindrical(reg))
    assert rep.sampled_inf > 1.0


def test_f1_critical_points_kill_expansion():
    reg = mt.exterior_of_radius(10.0)
    rep = dy.expansion_report(el.f1(), reg, mt.cylindrical(reg))
    assert rep.sampled_inf < 1e-6
    # witness is a lattice critical point inside the region
    assert abs(rep.witness) > 10.0
    assert abs(el.f1().derivative(rep.witness).value) < 1e-10


def test_expansion_region_mismatch():
    with pytest.raises(ValueError):
        dy.expansion_report(el.f1(), mt.exterior_of_radius(10.0),
                            mt.cylindrical())
