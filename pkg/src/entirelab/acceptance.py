"""Self-check suite: twelve numbered criteria over the whole package.

Each criterion is a pure function of the library plus fixed seeds, so a
rerun reproduces the same pass/fail verdicts and the same details
strings byte for byte.  `reproduce_all` writes the summary CSV that the
`report` subcommand exposes; elapsed times are kept on the in-memory
records only, never in the CSV, so the artifact stays deterministic.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import branches, catalog, dynamics, instability, metrics, render
from .errors import OverflowInChainError

TWO_PI = 2.0 * math.pi
TWO_PI_I = 2j * math.pi

SUMMARY_NAME = "acceptance_summary.csv"


@dataclass(frozen=True)
class CriterionResult:
    index: int
    title: str
    passed: bool
    details: str
    elapsed: float


def _fixed_point_identities():
    m2 = catalog.f2()
    lattice = 0.0
    for n in range(-5, 6):
        z = TWO_PI_I * n
        lattice = max(lattice,
                      abs(m2.evaluate(z).value - z),
                      abs(m2.derivative(z).value))
    m1 = catalog.f1()
    z_rep = 1j * math.pi
    fp_err = abs(m1.evaluate(z_rep).value - z_rep)
    mult = m1.derivative(z_rep).value
    cls = dynamics.classify_multiplier(mult)
    ok = (lattice <= 1e-10 and fp_err <= 1e-10
          and abs(mult - 2.0) <= 1e-10
          and cls is dynamics.StabilityClass.REPELLING)
    details = (f"lattice residual {lattice:.3e}, i*pi residual {fp_err:.3e}, "
               f"multiplier error {abs(mult - 2.0):.3e}, class {cls.value}")
    return ok, details


def _semiconjugacy_residuals():
    rng = np.random.default_rng(20260816)
    pts = rng.uniform(-20.0, 20.0, (10_000, 2))
    parts = []
    ok = True
    for m in (catalog.f1(), catalog.f2()):
        good = total = 0
        for x, y in pts:
            try:
                r = catalog.semiconjugacy_residual(m, complex(x, y))
            except OverflowInChainError:
                continue
            total += 1
            good += r < 1e-10
        frac = good / total
        ok = ok and frac >= 0.95
        parts.append(f"{m.map_id()}: {frac:.4f} of {total}")
    return ok, "below 1e-10 on " + "; ".join(parts)


def _eta_scan_dichotomy():
    lam = 0.25
    thresholds = (1e2, 1e4, 1e8)
    grow = metrics.eta_scan(catalog.lambda_exp(lam), thresholds)
    increasing = grow.infima[0] < grow.infima[1] < grow.infima[2]
    rel = max(abs(v - math.log(r / lam)) / math.log(r / lam)
              for v, r in zip(grow.infima, thresholds))
    flat = metrics.eta_scan(catalog.f1(), thresholds)
    worst_flat = max(flat.infima)
    ok = increasing and rel <= 0.10 and worst_flat <= 1e-8
    details = (f"lambda-exp infima {grow.infima[0]:.3f}/"
               f"{grow.infima[1]:.3f}/{grow.infima[2]:.3f} "
               f"(max rel err {rel:.3f}), f1 max infimum {worst_flat:.2e}")
    return ok, details


def _spherical_contraction():
    rep = metrics.spherical_expansion_scan(catalog.lambda_exp(1.0), 1e6)
    val = rep.infima[0]
    w = rep.witnesses[0]
    return val < 1e-6, f"witness value {val:.3e} at {w.real:.3f}{w.imag:+.3f}j"


def _poly_decay_on_curve():
    rep = metrics.poly_decay_scan(catalog.model_f1(), 0j, 0.1, 4.0)
    val = rep.infima[0]
    w = rep.witnesses[0]
    return val < 1e-6, f"witness value {val:.3e} at {w.real:.3f}{w.imag:+.3f}j"


def _hyperbolicity_certificates():
    c1 = dynamics.certify_hyperbolic(catalog.model_f1(), (0.5,))
    c2 = dynamics.certify_hyperbolic(catalog.lambda_exp(0.25), (1.0,))
    c3 = dynamics.certify_hyperbolic(catalog.f1(), (1.0,))
    ok = (c1.status is dynamics.CertificateStatus.CERTIFIED
          and 0.303 <= c1.sup_bound <= 0.304
          and c2.status is dynamics.CertificateStatus.CERTIFIED
          and 0.679 <= c2.sup_bound <= 0.680
          and c3.status is dynamics.CertificateStatus.FAILED_UNBOUNDED_S)
    details = (f"model-F1 {c1.status.value} sup {c1.sup_bound:.6f}, "
               f"lambda-exp(0.25) {c2.status.value} sup {c2.sup_bound:.6f}, "
               f"f1 {c3.status.value}")
    return ok, details


def _branch_obstructions():
    b1 = branches.continue_branch(catalog.lambda_exp(1.0), 0j)
    ok1 = (abs(b1.radius - 1.0) <= 1e-4
           and b1.obstruction is not None
           and b1.obstruction.kind is branches.ObstructionKind.ASYMPTOTIC
           and abs(b1.obstruction.s) <= 1e-9)
    b2 = branches.continue_branch(catalog.model_f1(), 1.0)
    ok2 = (abs(b2.radius - 1.1353) <= 1e-3
           and b2.obstruction is not None
           and b2.obstruction.kind is branches.ObstructionKind.CRITICAL
           and abs(b2.obstruction.s + math.exp(-2.0)) <= 1e-6
           and b2.obstruction.limit is not None
           and abs(b2.obstruction.limit + 1.0) <= 1e-6)
    details = (f"exp radius {b1.radius:.6f} ({b1.obstruction.kind.value}), "
               f"model-F1 radius {b2.radius:.6f} ({b2.obstruction.kind.value},"
               f" limit {b2.obstruction.limit.real:.6f}"
               f"{b2.obstruction.limit.imag:+.1e}j)")
    return ok1 and ok2, details


def _tract_angular_sums():
    tracts = branches.discs_of_univalence(catalog.lambda_exp(1.0), 0j, 0.1, 8)
    sep = branches.boundary_separation(tracts)
    ok = len(tracts) == 8 and sep > 0.0
    parts = []
    floor = 64.0 / TWO_PI
    for x in (1e2, 1e3):
        thetas = [branches.tract_angular_measure(t, x) for t in tracts]
        total = sum(thetas)
        recip = sum(1.0 / th for th in thetas)
        ok = ok and total <= TWO_PI + 1e-9 and recip >= floor
        parts.append(f"x={x:g}: sum {total:.4f}, reciprocal sum {recip:.1f}")
    return ok, f"separation {sep:.3f}; " + "; ".join(parts)


def _instability_search():
    res = instability.find_instability_parameter(1, 1000, 0.01)
    caption = 1.00025 + 0.00171j
    dist = abs(res.lambda0 - caption)
    ok = (res.winding >= 1 and res.residual < 1e-8 and dist < 5e-4
          and res.fixed_point_class is dynamics.StabilityClass.REPELLING)
    details = (f"lambda0 {res.lambda0.real:.8f}{res.lambda0.imag:+.8f}j, "
               f"winding {res.winding}, residual {res.residual:.2e}, "
               f"caption distance {dist:.2e}, class {res.fixed_point_class.value}")
    return ok, details


def _figure_masks_agree():
    vp = (-3.0 - 13.0j, 9.0 + 13.0j)
    cfg2 = render.RasterConfig(map=catalog.f2(),
                               classifier=render.Classifier.FIXED_POINT_BASINS,
                               viewport=vp, width=800, height=800)
    cfg3 = render.RasterConfig(
        map=catalog.f3(),
        classifier=render.Classifier.DRIFT_COMPENSATED_BASINS,
        viewport=vp, width=800, height=800)
    img2 = render.render_raster(cfg2, workers=1)
    img3 = render.render_raster(cfg3, workers=1)
    same2 = np.array_equal(img2.pixels,
                           render.render_raster(cfg2, workers=8).pixels)
    same3 = np.array_equal(img3.pixels,
                           render.render_raster(cfg3, workers=8).pixels)
    agree = float(np.mean(img2.class0_mask() == img3.class0_mask()))
    ok = same2 and same3 and agree >= 0.99
    details = (f"mask agreement {agree:.4f}, worker-count invariance "
               f"{same2 and same3}")
    return ok, details


def _escape_and_wandering():
    orb = dynamics.iterate(catalog.f1(), 1.0 + 0j, 200)
    escaped = orb.status is dynamics.OrbitStatus.ESCAPED_RIGHT
    min_gain = math.inf
    for a, b in zip(orb.points, orb.points[1:]):
        if 1.0 <= a.real <= 50.0:
            min_gain = min(min_gain, (b - a).real)
    rep = dynamics.wandering_orbit_check(catalog.f3(), 0, 6)
    ok = escaped and min_gain >= 0.63 and rep.max_step_residual <= 1e-12
    details = (f"escaped in {len(orb.points) - 1} steps, min Re gain "
               f"{min_gain:.4f}, max step residual {rep.max_step_residual:.2e}")
    return ok, details


def _zero_asymptotics():
    roots = instability.zeros_of_f1((900.0, 1100.0))
    m1 = catalog.f1()
    ok = bool(roots)
    worst_res = worst_rel = 0.0
    for xi in roots:
        worst_res = max(worst_res, abs(m1.evaluate(xi).value))
        worst_rel = max(worst_rel,
                        abs(xi.real + math.log(xi.imag)) / math.log(xi.imag))
    ok = ok and worst_res < 1e-10 and worst_rel < 0.1
    details = (f"{len(roots)} roots, max |f1| {worst_res:.2e}, "
               f"max asymptotic error {worst_rel:.4f}")
    return ok, details


@dataclass(frozen=True)
class CriterionSpec:
    index: int
    slug: str
    title: str
    budget: float  # seconds
    fn: object


ALL_CRITERIA = (
    CriterionSpec(1, "fixed-points", "fixed point identities", 1.0,
                  _fixed_point_identities),
    CriterionSpec(2, "semiconjugacy", "semiconjugacy residuals", 1.0,
                  _semiconjugacy_residuals),
    CriterionSpec(3, "eta-dichotomy", "eta scan dichotomy", 5.0,
                  _eta_scan_dichotomy),
    CriterionSpec(4, "spherical", "spherical contraction witness", 2.0,
                  _spherical_contraction),
    CriterionSpec(5, "poly-decay", "polynomial decay along curve", 5.0,
                  _poly_decay_on_curve),
    CriterionSpec(6, "certificates", "hyperbolicity certificates", 1.0,
                  _hyperbolicity_certificates),
    CriterionSpec(7, "branches", "inverse branch obstructions", 5.0,
                  _branch_obstructions),
    CriterionSpec(8, "tracts", "tract angular measure sums", 10.0,
                  _tract_angular_sums),
    CriterionSpec(9, "instability", "instability parameter search", 60.0,
                  _instability_search),
    CriterionSpec(10, "figure-masks", "basin raster self-consistency", 120.0,
                  _figure_masks_agree),
    CriterionSpec(11, "escape-wandering", "escape and wandering orbits", 1.0,
                  _escape_and_wandering),
    CriterionSpec(12, "zeros", "zero asymptotics in high strips", 2.0,
                  _zero_asymptotics),
)


def run_criterion(spec: CriterionSpec) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        passed, details = spec.fn()
    except Exception as exc:  # a crash is a failed criterion, not a halt
        passed, details = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(spec.index, spec.title, bool(passed), details,
                           time.perf_counter() - t0)


def run_all() -> tuple:
    return tuple(run_criterion(s) for s in ALL_CRITERIA)


def reproduce_all(outdir: str) -> tuple:
    """Run every criterion and write the summary CSV into outdir.

    The CSV carries index, status, title, details and nothing that
    varies between runs; reruns produce identical bytes.
    """
    records = run_all()
    path = os.path.join(outdir, SUMMARY_NAME)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "status", "title", "details"])
        for r in records:
            writer.writerow([r.index, "PASS" if r.passed else "FAIL",
                             r.title, r.details])
    return records
