"""Orbits, fixed points, postsingular sets, and certified absorbing discs."""

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .catalog import EntireMap, MapKind, f2 as _f2
from .errors import NoSampleSatisfiesConstraintError
from .metrics import ConformalMetric, Region, SamplerConfig, _best

log = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-9
ESCAPE_RE = 50.0
DEFAULT_BUDGET = 500


# ---- orbits ------------------------------------------------------------


class OrbitStatus(enum.Enum):
    CONVERGED_TO_POINT = "converged-to-point"
    ESCAPED_RIGHT = "escaped-right"
    EXP_OVERFLOW = "exp-overflow"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class EscapePolicy:
    re_threshold: float = ESCAPE_RE


@dataclass(frozen=True)
class OrbitResult:
    points: tuple
    status: OrbitStatus
    drift_compensated: bool = False
    limit: Optional[complex] = None
    residual: Optional[float] = None

    def to_csv(self) -> str:
        lines = ["k,re,im"]
        for k, z in enumerate(self.points):
            lines.append(f"{k},{z.real!r},{z.imag!r}")
        return "\n".join(lines) + "\n"


def iterate(m: EntireMap, z0, budget: int = DEFAULT_BUDGET,
            policy: EscapePolicy | None = None, *,
            drift_compensated: bool = False) -> OrbitResult:
    """Forward orbit until convergence, right escape, overflow, or budget.

    With drift_compensated the map's drift per iterate is subtracted at
    every step, so the orbit of the drift-free conjugate is returned.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    policy = policy or EscapePolicy()
    drift = m.drift_per_iterate if drift_compensated else 0j
    z = complex(z0)
    pts = [z]
    for _ in range(budget):
        v = m.evaluate(z)
        if not v.finite:
            return OrbitResult(tuple(pts), OrbitStatus.EXP_OVERFLOW,
                               drift_compensated)
        z_next = v.value - drift
        pts.append(z_next)
        if z_next.real > policy.re_threshold:
            return OrbitResult(tuple(pts), OrbitStatus.ESCAPED_RIGHT,
                               drift_compensated)
        if abs(z_next - z) < CONVERGENCE_TOL:
            w = m.evaluate(z_next)
            if w.finite:
                res = abs(w.value - drift - z_next)
                if res < CONVERGENCE_TOL:
                    return OrbitResult(tuple(pts),
                                       OrbitStatus.CONVERGED_TO_POINT,
                                       drift_compensated, limit=z_next,
                                       residual=res)
        z = z_next
    return OrbitResult(tuple(pts), OrbitStatus.BUDGET_EXHAUSTED,
                       drift_compensated)


# ---- fixed points ------------------------------------------------------


class StabilityClass(enum.Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    INDIFFERENT = "indifferent"


def classify_multiplier(multiplier) -> StabilityClass:
    a = abs(multiplier)
    if a < 1e-8:
        return StabilityClass.SUPERATTRACTING
    if a < 1.0 - 1e-8:
        return StabilityClass.ATTRACTING
    if a > 1.0 + 1e-8:
        return StabilityClass.REPELLING
    return StabilityClass.INDIFFERENT


@dataclass(frozen=True)
class FixedPointRecord:
    location: complex
    multiplier: complex
    stability: StabilityClass


def _newton_fixed_point(m, z, max_iter=60):
    for _ in range(max_iter):
        v = m.evaluate(z)
        d = m.derivative(z)
        if not (v.finite and d.finite):
            return None
        g = v.value - z
        dg = d.value - 1.0
        if abs(dg) < 1e-14:
            return None
        step = g / dg
        # halve on overshoot: the e^-z terms build steep walls
        for _ in range(25):
            z_new = z - step
            v_new = m.evaluate(z_new)
            if v_new.finite and abs(v_new.value - z_new) <= abs(g):
                break
            step *= 0.5
        else:
            return None
        done = abs(step) <= 1e-13 * (1.0 + abs(z_new))
        z = z_new
        if done:
            break
    v = m.evaluate(z)
    if v.finite and abs(v.value - z) < 1e-10:
        return z
    return None


def find_fixed_points(m: EntireMap, seeds) -> list:
    """Newton on f(z) - z from each seed; non-convergent seeds are
    logged and dropped, coincident roots deduplicated at 1e-6."""
    records = []
    for seed in seeds:
        z = _newton_fixed_point(m, complex(seed))
        if z is None:
            log.debug("fixed-point seed %s did not converge", seed)
            continue
        if any(abs(z - r.location) < 1e-6 for r in records):
            continue
        mult = m.derivative(z).value
        records.append(FixedPointRecord(z, mult, classify_multiplier(mult)))
    return records


# ---- postsingular orbit -------------------------------------------------


class PostsingularStatus(enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    FAILED_UNBOUNDED_S = "failed-unbounded-s"


@dataclass(frozen=True)
class PostsingularReport:
    status: PostsingularStatus
    points: tuple
    max_modulus: float
    depth: int

    @property
    def bounded(self) -> bool:
        return self.status is PostsingularStatus.BOUNDED


def postsingular_orbit(m: EntireMap, depth: int = 50) -> PostsingularReport:
    """Forward orbits of the known singular values to the given depth."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    sing = m.singular
    if not sing.bounded_singular_set:
        return PostsingularReport(PostsingularStatus.FAILED_UNBOUNDED_S,
                                  (), math.inf, depth)
    pts = []
    for s in sing.known_singular_values:
        z = complex(s)
        pts.append(z)
        for _ in range(depth):
            v = m.evaluate(z)
            if not v.finite:
                return PostsingularReport(PostsingularStatus.UNBOUNDED,
                                          tuple(pts), math.inf, depth)
            z = v.value
            pts.append(z)
    return PostsingularReport(PostsingularStatus.BOUNDED, tuple(pts),
                              max(abs(z) for z in pts), depth)


# ---- hyperbolicity certificates -----------------------------------------


class CertificateStatus(enum.Enum):
    CERTIFIED = "Certified"
    FAILED_UNBOUNDED_S = "FailedUnboundedS"
    FAILED_NO_ABSORBING_SET = "FailedNoAbsorbingSet"


@dataclass(frozen=True)
class HyperbolicityCertificate:
    """Compact absorbing set K with a certified bound on max |f| over K.

    K is kept to a single origin-centered closed disc, where the catalog's
    sup-modulus formulas are exact; the field stays a tuple of discs so a
    union remains representable.
    """

    status: CertificateStatus
    discs: tuple = field(default=())
    sup_bound: float = math.inf
    margin: float = 0.0
    singular_values: tuple = field(default=())

    def to_json(self) -> str:
        return json.dumps({
            "radius": self.discs[0][1] if self.discs else None,
            "supBound": self.sup_bound if math.isfinite(self.sup_bound)
            else None,
            "singularValues": [[v.real, v.imag]
                               for v in self.singular_values],
            "status": self.status.value,
        })


def certify_hyperbolic(m: EntireMap, candidate_radii) -> \
        HyperbolicityCertificate:
    """First candidate disc B(0,r) with sup |f| and all singular values
    inside B(0, r - 1e-9) yields a certificate."""
    sing = m.singular
    values = tuple(complex(v) for v in sing.known_singular_values)
    if not sing.bounded_singular_set:
        return HyperbolicityCertificate(CertificateStatus.FAILED_UNBOUNDED_S,
                                        singular_values=values)
    radii = [float(r) for r in candidate_radii]
    if not radii or any(r <= 0 for r in radii):
        raise ValueError("candidate radii must be positive")
    s_max = max(abs(v) for v in values)
    best = None
    for r in radii:
        sup = m.sup_modulus_on_disc(0j, r)
        reach = max(sup, s_max)
        if best is None or r - reach > best[1]:
            best = (r, r - reach, sup)
        if sup < r - 1e-9 and s_max < r - 1e-9:
            return HyperbolicityCertificate(
                CertificateStatus.CERTIFIED, ((0j, r),), sup, r - reach,
                values)
    return HyperbolicityCertificate(
        CertificateStatus.FAILED_NO_ABSORBING_SET, ((0j, best[0]),),
        best[2], best[1], values)


# ---- appendix phenomena --------------------------------------------------


@dataclass(frozen=True)
class BakerSample:
    z: complex
    gain: float  # Re f(z) - Re z
    in_domain: bool


@dataclass(frozen=True)
class BakerReport:
    samples: tuple
    min_gain: float
    monotone: bool
    lower_bound_ok: bool
    escape_verified: bool

    def to_csv(self) -> str:
        lines = ["re,im,gain,in_domain"]
        for s in self.samples:
            lines.append(f"{s.z.real!r},{s.z.imag!r},{s.gain!r},"
                         f"{int(s.in_domain)}")
        return "\n".join(lines) + "\n"


def baker_domain_check(m: EntireMap, samples: int = 100,
                       extra_points=()) -> BakerReport:
    """Monotone right drift on the closed right half-plane.

    The real part must gain at least 1 - e^(-Re z) per application, and
    orbits from interior samples must reach the right escape status.
    Points with Re z <= 0 are only marked, never claimed.
    """
    if m.kind is not MapKind.F1_FATOU:
        raise ValueError("Baker domain check applies to the first "
                         "perturbed map only")
    if samples < 4:
        raise ValueError("samples must be at least 4")
    side = max(2, int(math.sqrt(samples)))
    res = np.concatenate(([0.0], np.logspace(-2.0, 1.6, side)))
    ims = np.linspace(-100.0, 100.0, side)
    zs = [complex(a, b) for a in res for b in ims]
    zs.extend(complex(p) for p in extra_points)

    rows = []
    for z in zs:
        v = m.evaluate(z)
        gain = v.value.real - z.real if v.finite else math.inf
        rows.append(BakerSample(z, gain, z.real > 0))
    interior = [s for s in rows if s.in_domain]
    boundary_ok = all(
        s.gain >= 1.0 - math.exp(-s.z.real) - 1e-12
        for s in rows if s.z.real >= 0)
    escapes = [iterate(m, s.z, budget=200) for s in interior[:3]]
    return BakerReport(
        samples=tuple(rows),
        min_gain=min(s.gain for s in interior),
        monotone=all(s.gain > 0 for s in interior),
        lower_bound_ok=boundary_ok,
        escape_verified=all(o.status is OrbitStatus.ESCAPED_RIGHT
                            for o in escapes))


@dataclass(frozen=True)
class WanderingRow:
    n: int
    z: complex
    step_residual: float       # |f(z_n) - z_(n+1)|
    fixed_residual: float      # |f2(z_n) - z_n|
    multiplier_modulus: float  # |f2'(z_n)|


@dataclass(frozen=True)
class WanderingReport:
    rows: tuple
    max_step_residual: float
    all_pass: bool

    def to_csv(self) -> str:
        lines = ["n,re,im,step_residual,fixed_residual,multiplier"]
        for r in self.rows:
            lines.append(f"{r.n},{r.z.real!r},{r.z.imag!r},"
                         f"{r.step_residual!r},{r.fixed_residual!r},"
                         f"{r.multiplier_modulus!r}")
        return "\n".join(lines) + "\n"


def wandering_orbit_check(m: EntireMap, n0: int = 0,
                          count: int = 5) -> WanderingReport:
    """The lattice points are an orbit of the drifted map and
    superattracting fixed points of the drift-free one."""
    if m.kind is not MapKind.F3_HERMAN:
        raise ValueError("wandering orbit check applies to the drifted "
                         "map only")
    if count < 1:
        raise ValueError("count must be at least 1")
    base = _f2()
    zs = m.critical_points(range(n0, n0 + count + 2))
    rows = []
    for k, n in enumerate(range(n0, n0 + count + 1)):
        z, z_next = zs[k], zs[k + 1]
        step = abs(m.evaluate(z).value - z_next)
        fixed = abs(base.evaluate(z).value - z)
        mult = abs(base.derivative(z).value)
        rows.append(WanderingRow(n, z, step, fixed, mult))
    worst = max(r.step_residual for r in rows)
    ok = all(r.step_residual <= 1e-12 and r.fixed_residual <= 1e-12
             and r.multiplier_modulus < 1e-8 for r in rows)
    return WanderingReport(tuple(rows), worst, ok)


# ---- expansion report ----------------------------------------------------


@dataclass(frozen=True)
class ExpansionReport:
    sampled_inf: float
    witness: complex
    sample_count: int


def expansion_report(m: EntireMap, w_region: Region,
                     metric: ConformalMetric,
                     sampler: SamplerConfig | None = None) -> ExpansionReport:
    """min of the derivative norm of f from metric to itself over sampled
    z with both z and f(z) in the region."""
    if metric.region != w_region:
        raise ValueError("metric must be defined on the given region")
    sampler = sampler or SamplerConfig()
    zs = [sampler.grid()]
    probes = m.critical_points(range(-12, 13))
    if probes:
        zs.append(np.array(probes, dtype=np.complex128))
    zs = np.concatenate(zs)

    fv, okf, _ = m.eval_array(zs)
    dv, okd = m.deriv_array(zs)
    in_w = w_region.contains_array(zs)
    f_in_w = np.zeros(zs.shape, dtype=bool)
    f_in_w[okf] = w_region.contains_array(fv[okf])
    dens_z, okz = metric.density_array(zs)
    fv_safe = np.where(okf, fv, 1.0)
    dens_f, okdf = metric.density_array(fv_safe)
    mask = okf & okd & okz & okdf & in_w & f_in_w
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q = np.abs(dv) * dens_f / dens_z
    mask = mask & np.isfinite(q)
    best = _best(zs, np.where(mask, q, np.inf), mask)
    if best is None:
        raise NoSampleSatisfiesConstraintError(
            f"no sample of {m.map_id()} stays in the region")
    return ExpansionReport(best[0], best[1], zs.size)
