"""Plane regions, conformal metric densities, and expansion scans.

The metrics are the usual suspects: euclidean, cylindrical |dz|/|z|,
spherical, a polynomially decaying family, exact hyperbolic densities on
the three standard domains, the 1/(2 dist) lower estimate, and pullbacks
sigma(f(z))|f'(z)|.  The scans sample one fixed annular grid (plus targeted
critical-point probes) and report the minimum of an expansion quantity
subject to an image constraint; the reported infimum is an upper bound for
the true one, with the witness attaining it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import EntireMap, OVERFLOW_EXPONENT
from .errors import (
    NoSampleSatisfiesConstraintError,
    NotASingularValueError,
    OutsideRegionError,
    OverflowAtPointError,
)


class RegionKind(enum.Enum):
    WHOLE_PLANE = "whole-plane"
    EXTERIOR_OF_RADIUS = "exterior"
    RIGHT_HALF_PLANE = "right-half-plane"
    UNIT_DISC = "unit-disc"
    COMPLEMENT_OF_DISC_UNION = "complement-of-discs"


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    radius: float = 1.0
    offset: float = 0.0
    discs: tuple = ()

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if self.kind is RegionKind.WHOLE_PLANE:
            return True
        if self.kind is RegionKind.EXTERIOR_OF_RADIUS:
            return abs(z) > self.radius
        if self.kind is RegionKind.RIGHT_HALF_PLANE:
            return z.real > self.offset
        if self.kind is RegionKind.UNIT_DISC:
            return abs(z) < 1.0
        return all(abs(z - c) > r for c, r in self.discs)

    def contains_array(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.kind is RegionKind.WHOLE_PLANE:
            return np.ones(z.shape, dtype=bool)
        if self.kind is RegionKind.EXTERIOR_OF_RADIUS:
            return np.abs(z) > self.radius
        if self.kind is RegionKind.RIGHT_HALF_PLANE:
            return z.real > self.offset
        if self.kind is RegionKind.UNIT_DISC:
            return np.abs(z) < 1.0
        mask = np.ones(z.shape, dtype=bool)
        for c, r in self.discs:
            mask &= np.abs(z - c) > r
        return mask

    def boundary_distance(self, z: complex) -> float:
        z = complex(z)
        if self.kind is RegionKind.WHOLE_PLANE:
            return math.inf
        if self.kind is RegionKind.EXTERIOR_OF_RADIUS:
            return abs(z) - self.radius
        if self.kind is RegionKind.RIGHT_HALF_PLANE:
            return z.real - self.offset
        if self.kind is RegionKind.UNIT_DISC:
            return 1.0 - abs(z)
        return min(abs(z - c) - r for c, r in self.discs)


def whole_plane() -> Region:
    return Region(RegionKind.WHOLE_PLANE)


def exterior_of_radius(radius: float) -> Region:
    if radius <= 0:
        raise ValueError("exterior region needs radius > 0")
    return Region(RegionKind.EXTERIOR_OF_RADIUS, radius=float(radius))


def right_half_plane(offset: float = 0.0) -> Region:
    return Region(RegionKind.RIGHT_HALF_PLANE, offset=float(offset))


def unit_disc() -> Region:
    return Region(RegionKind.UNIT_DISC)


def complement_of_discs(discs) -> Region:
    discs = tuple((complex(c), float(r)) for c, r in discs)
    if any(r <= 0 for _, r in discs):
        raise ValueError("disc radii must be positive")
    return Region(RegionKind.COMPLEMENT_OF_DISC_UNION, discs=discs)


class MetricKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    CYLINDRICAL = "cylindrical"
    SPHERICAL = "spherical"
    POLY_DECAY = "poly-decay"
    HYPERBOLIC_EXACT = "hyperbolic-exact"
    HYPERBOLIC_LOWER_ESTIMATE = "hyperbolic-lower-estimate"
    PULLBACK = "pullback"


_HYPERBOLIC_REGIONS = (RegionKind.UNIT_DISC, RegionKind.RIGHT_HALF_PLANE,
                       RegionKind.EXTERIOR_OF_RADIUS)


@dataclass(frozen=True)
class ConformalMetric:
    """Density rho(z) over a region; lengths are rho(z)|dz|."""

    kind: MetricKind
    region: Region = field(default_factory=whole_plane)
    tau: float = 2.0
    base: "ConformalMetric | None" = None
    map: EntireMap | None = None

    def __post_init__(self):
        if self.kind is MetricKind.HYPERBOLIC_EXACT and \
                self.region.kind not in _HYPERBOLIC_REGIONS:
            raise ValueError("exact hyperbolic density known only on the disc, "
                             "a half-plane, or a disc exterior")
        if self.kind is MetricKind.POLY_DECAY and self.tau <= 0:
            raise ValueError("poly-decay exponent must be positive")
        if self.kind is MetricKind.PULLBACK and (self.base is None or self.map is None):
            raise ValueError("pullback metric needs a base metric and a map")

    def density(self, z: complex) -> float:
        z = complex(z)
        if not self.region.contains(z):
            raise OutsideRegionError(f"{z} is outside the metric's region")
        k = self.kind
        if k is MetricKind.EUCLIDEAN:
            return 1.0
        if k is MetricKind.CYLINDRICAL:
            if z == 0:
                raise OutsideRegionError("cylindrical density is singular at 0")
            return 1.0 / abs(z)
        if k is MetricKind.SPHERICAL:
            return 1.0 / (1.0 + abs(z) ** 2)
        if k is MetricKind.POLY_DECAY:
            return 1.0 / (1.0 + abs(z) ** self.tau)
        if k is MetricKind.HYPERBOLIC_EXACT:
            return self._hyperbolic_density(z)
        if k is MetricKind.HYPERBOLIC_LOWER_ESTIMATE:
            return 1.0 / (2.0 * self.region.boundary_distance(z))
        fz = self.map.evaluate(z)
        if not fz.finite:
            raise OverflowAtPointError(f"pullback map overflowed at {z}")
        d = self.map.derivative(z)
        if not d.finite:
            raise OverflowAtPointError(f"pullback derivative overflowed at {z}")
        return self.base.density(fz.value) * abs(d.value)

    def _hyperbolic_density(self, z: complex) -> float:
        rk = self.region.kind
        if rk is RegionKind.UNIT_DISC:
            return 2.0 / (1.0 - abs(z) ** 2)
        if rk is RegionKind.RIGHT_HALF_PLANE:
            return 1.0 / (z.real - self.region.offset)
        return 1.0 / (abs(z) * (math.log(abs(z)) - math.log(self.region.radius)))

    def density_array(self, z):
        """Vector densities with a validity mask (outside region => False)."""
        z = np.asarray(z, dtype=np.complex128)
        mask = self.region.contains_array(z)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if k is MetricKind.EUCLIDEAN:
                dens = np.ones(z.shape)
            elif k is MetricKind.CYLINDRICAL:
                mask = mask & (np.abs(z) > 0)
                dens = 1.0 / np.abs(np.where(z == 0, 1.0, z))
            elif k is MetricKind.SPHERICAL:
                dens = 1.0 / (1.0 + np.abs(z) ** 2)
            elif k is MetricKind.POLY_DECAY:
                dens = 1.0 / (1.0 + np.abs(z) ** self.tau)
            elif k is MetricKind.HYPERBOLIC_EXACT:
                rk = self.region.kind
                if rk is RegionKind.UNIT_DISC:
                    dens = 2.0 / (1.0 - np.abs(z) ** 2)
                elif rk is RegionKind.RIGHT_HALF_PLANE:
                    dens = 1.0 / (z.real - self.region.offset)
                else:
                    r = np.abs(z)
                    safe = np.where(mask, r, 2.0 * self.region.radius)
                    dens = 1.0 / (safe * (np.log(safe) - math.log(self.region.radius)))
            elif k is MetricKind.HYPERBOLIC_LOWER_ESTIMATE:
                d = np.array([self.region.boundary_distance(complex(v)) for v in z.ravel()])
                dens = 1.0 / (2.0 * d.reshape(z.shape))
            else:
                fv, okf, _ = self.map.eval_array(z)
                dv, okd = self.map.deriv_array(z)
                sub, submask = self.base.density_array(fv)
                mask = mask & okf & okd & submask
                dens = sub * np.abs(dv)
        mask = mask & np.isfinite(dens) & (dens > 0)
        return dens, mask

    @property
    def complete_at_infinity(self) -> bool:
        """Whether paths to infinity have infinite length; asserted, not tested."""
        k = self.kind
        if k in (MetricKind.EUCLIDEAN, MetricKind.CYLINDRICAL):
            return True
        if k is MetricKind.SPHERICAL:
            return False
        if k is MetricKind.POLY_DECAY:
            return self.tau <= 1.0
        if k is MetricKind.HYPERBOLIC_EXACT:
            return self.region.kind is RegionKind.EXTERIOR_OF_RADIUS
        if k is MetricKind.HYPERBOLIC_LOWER_ESTIMATE:
            return self.region.kind is not RegionKind.UNIT_DISC
        return self.base.complete_at_infinity


def euclidean(region: Region | None = None) -> ConformalMetric:
    return ConformalMetric(MetricKind.EUCLIDEAN, region or whole_plane())


def cylindrical(region: Region | None = None) -> ConformalMetric:
    return ConformalMetric(MetricKind.CYLINDRICAL, region or whole_plane())


def spherical(region: Region | None = None) -> ConformalMetric:
    return ConformalMetric(MetricKind.SPHERICAL, region or whole_plane())


def poly_decay(tau: float, region: Region | None = None) -> ConformalMetric:
    return ConformalMetric(MetricKind.POLY_DECAY, region or whole_plane(), tau=float(tau))


def hyperbolic_exact(region: Region) -> ConformalMetric:
    return ConformalMetric(MetricKind.HYPERBOLIC_EXACT, region)


def hyperbolic_lower_estimate(region: Region) -> ConformalMetric:
    return ConformalMetric(MetricKind.HYPERBOLIC_LOWER_ESTIMATE, region)


def pullback(base: ConformalMetric, m: EntireMap,
             region: Region | None = None) -> ConformalMetric:
    return ConformalMetric(MetricKind.PULLBACK, region or whole_plane(),
                           base=base, map=m)


def deriv_norm(m: EntireMap, z: complex, domain_metric: ConformalMetric,
               range_metric: ConformalMetric) -> float:
    """|f'(z)| * rho_range(f(z)) / rho_domain(z)."""
    z = complex(z)
    if not domain_metric.region.contains(z):
        raise OutsideRegionError(f"{z} is outside the domain region")
    fz = m.evaluate(z)
    if not fz.finite:
        raise OverflowAtPointError(f"map overflowed at {z}")
    d = m.derivative(z)
    if not d.finite:
        raise OverflowAtPointError(f"derivative overflowed at {z}")
    if not range_metric.region.contains(fz.value):
        raise OutsideRegionError(f"f({z}) = {fz.value} is outside the range region")
    return abs(d.value) * range_metric.density(fz.value) / domain_metric.density(z)


# ---- scan machinery -------------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    """Exponential annular grid plus targeted critical-point probes."""

    r_min: float = 0.05
    r_max: float = 205.0
    radii_per_octave: int = 8
    angle_count: int = 256
    probe_count: int = 8

    def grid(self):
        octaves = math.log2(self.r_max / self.r_min)
        ks = np.arange(int(octaves * self.radii_per_octave) + 1)
        radii = self.r_min * np.exp2(ks / self.radii_per_octave)
        radii = radii[radii <= self.r_max]
        angles = np.linspace(0.0, 2.0 * math.pi, self.angle_count, endpoint=False)
        return (radii[:, None] * np.exp(1j * angles[None, :])).ravel()


@dataclass(frozen=True)
class ScanReport:
    thresholds: tuple
    infima: tuple
    witnesses: tuple
    sample_count: int

    def to_csv(self) -> str:
        lines = ["R,infimum,witness_re,witness_im,samples"]
        for r, v, w in zip(self.thresholds, self.infima, self.witnesses):
            lines.append(f"{r!r},{v!r},{w.real!r},{w.imag!r},{self.sample_count}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_csv())


def _reduce(points, values):
    """Minimum with a lexicographic tie-break on (value, re, im)."""
    if len(values) == 0:
        return None
    vmin = float(np.min(values))
    cand = points[values == vmin]
    order = np.lexsort((cand.imag, cand.real))
    return vmin, complex(cand[order[0]])


def _best(points, values, mask):
    pts = np.asarray(points)[mask]
    vals = np.asarray(values)[mask]
    return _reduce(pts, vals)


def _check_thresholds(thresholds):
    ts = [float(t) for t in thresholds]
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("thresholds must be positive")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("thresholds must be strictly increasing")
    return ts


def eta_scan(m: EntireMap, thresholds, sampler: SamplerConfig | None = None) -> ScanReport:
    """min |z f'(z)/f(z)| over samples with |f(z)| > R, for each R."""
    sampler = sampler or SamplerConfig()
    ts = _check_thresholds(thresholds)
    zs = sampler.grid()
    fv, okf, _ = m.eval_array(zs)
    dv, okd = m.deriv_array(zs)
    ok = okf & okd & (np.abs(fv) > 0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q = np.abs(zs) * np.abs(dv) / np.abs(fv)
    ok = ok & np.isfinite(q)
    infima, witnesses = [], []
    count = zs.size
    for r_thr in ts:
        pts, vals = [zs], [np.where(ok, q, np.inf)]
        mask = ok & (np.abs(fv) > r_thr)
        for c in m.critical_points_with_image_above(r_thr, sampler.probe_count):
            img, der = m.evaluate(c), m.derivative(c)
            if img.finite and der.finite and abs(img.value) > r_thr and img.value != 0:
                pts.append(np.array([c]))
                vals.append(np.array([abs(c) * abs(der.value) / abs(img.value)]))
                mask = np.concatenate([mask, [True]])
        best = _best(np.concatenate(pts), np.concatenate(vals), mask)
        if best is None:
            raise NoSampleSatisfiesConstraintError(
                f"no sample of {m.map_id()} has |f(z)| > {r_thr}")
        infima.append(best[0])
        witnesses.append(best[1])
    return ScanReport(tuple(ts), tuple(infima), tuple(witnesses), count)


def spherical_expansion_scan(m: EntireMap, r_threshold: float,
                             sampler: SamplerConfig | None = None) -> ScanReport:
    """min |f'(z)| (1+|z|^2)/(1+|f(z)|^2) over samples with |f(z)| > R."""
    sampler = sampler or SamplerConfig()
    r_thr = float(r_threshold)
    if r_thr <= 0:
        raise ValueError("threshold must be positive")
    zs = sampler.grid()
    fv, okf, _ = m.eval_array(zs)
    dv, okd = m.deriv_array(zs)
    ok = okf & okd
    with np.errstate(over="ignore", invalid="ignore"):
        q = np.abs(dv) * (1.0 + np.abs(zs) ** 2) / (1.0 + np.abs(fv) ** 2)
    ok = ok & np.isfinite(q)
    pts, vals = [zs], [np.where(ok, q, np.inf)]
    mask = ok & (np.abs(fv) > r_thr)
    for c in m.critical_points_with_image_above(r_thr, sampler.probe_count):
        img, der = m.evaluate(c), m.derivative(c)
        if img.finite and der.finite and abs(img.value) > r_thr:
            pts.append(np.array([c]))
            vals.append(np.array([abs(der.value) * (1 + abs(c) ** 2)
                                  / (1 + abs(img.value) ** 2)]))
            mask = np.concatenate([mask, [True]])
    best = _best(np.concatenate(pts), np.concatenate(vals), mask)
    if best is None:
        raise NoSampleSatisfiesConstraintError(
            f"no sample of {m.map_id()} has |f(z)| > {r_thr}")
    return ScanReport((r_thr,), (best[0],), (best[1],), zs.size)


def poly_decay_scan(m: EntireMap, s: complex, u_radius: float, tau: float,
                    sampler: SamplerConfig | None = None) -> ScanReport:
    """min (1+|z|^tau) |f'(z)| over samples with f(z) in B(s, u_radius).

    The sample set is the annular grid plus a traced asymptotic curve when s
    is an asymptotic value of the map; the threshold column of the report
    carries u_radius.
    """
    sampler = sampler or SamplerConfig()
    s = complex(s)
    tau = float(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    if u_radius <= 0:
        raise ValueError("u_radius must be positive")
    sing = m.singular
    if not any(abs(s - v) <= 1e-9 for v in sing.known_singular_values):
        raise NotASingularValueError(f"{s} is not a known singular value of {m.map_id()}")
    zs = [sampler.grid()]
    if any(abs(s - a) <= 1e-9 for a in sing.asymptotic_values):
        from .branches import asymptotic_curve_toward
        curve = asymptotic_curve_toward(m, s, 1.25 * sampler.r_max)
        if curve.samples:
            zs.append(np.array(curve.samples))
    zs = np.concatenate(zs)
    fv, okf, _ = m.eval_array(zs)
    dv, okd = m.deriv_array(zs)
    ok = okf & okd
    with np.errstate(over="ignore", invalid="ignore"):
        q = (1.0 + np.abs(zs) ** tau) * np.abs(dv)
    ok = ok & np.isfinite(q)
    mask = ok & (np.abs(fv - s) < u_radius)
    best = _best(zs, np.where(ok, q, np.inf), mask)
    if best is None:
        raise NoSampleSatisfiesConstraintError(
            f"no sample of {m.map_id()} lands in B({s}, {u_radius})")
    return ScanReport((float(u_radius),), (best[0],), (best[1],), zs.size)


def eta_omega_scan(m: EntireMap, omega: Region, thresholds,
                   sampler: SamplerConfig | None = None) -> ScanReport:
    """Restricted eta scan: min over z in Omega with |f(z)| > R of the
    derivative norm from hyperbolic(Omega) to cylindrical."""
    sampler = sampler or SamplerConfig()
    if omega.kind not in _HYPERBOLIC_REGIONS:
        raise ValueError("omega must be the disc, a half-plane, or a disc exterior")
    ts = _check_thresholds(thresholds)
    rho = hyperbolic_exact(omega)
    zs = sampler.grid()
    dens, okr = rho.density_array(zs)
    fv, okf, _ = m.eval_array(zs)
    dv, okd = m.deriv_array(zs)
    ok = okr & okf & okd & (np.abs(fv) > 0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q = np.abs(dv) / (np.abs(fv) * dens)
    ok = ok & np.isfinite(q)
    infima, witnesses = [], []
    for r_thr in ts:
        pts, vals = [zs], [np.where(ok, q, np.inf)]
        mask = ok & (np.abs(fv) > r_thr)
        for c in _omega_probes(m, omega, r_thr, sampler.probe_count):
            img, der = m.evaluate(c), m.derivative(c)
            if not (img.finite and der.finite and abs(img.value) > r_thr):
                continue
            pts.append(np.array([c]))
            vals.append(np.array([abs(der.value) / (abs(img.value) * rho.density(c))]))
            mask = np.concatenate([mask, [True]])
        best = _best(np.concatenate(pts), np.concatenate(vals), mask)
        if best is None:
            raise NoSampleSatisfiesConstraintError(
                f"no sample of {m.map_id()} in omega has |f(z)| > {r_thr}")
        infima.append(best[0])
        witnesses.append(best[1])
    return ScanReport(tuple(ts), tuple(infima), tuple(witnesses), zs.size)


_OMEGA_NUDGE = 1e-3


def _omega_probes(m: EntireMap, omega: Region, r_thr: float, count: int):
    """Critical points moved just inside omega when they sit on its boundary."""
    out = []
    for c in m.critical_points_with_image_above(r_thr, count):
        if omega.contains(c):
            out.append(c)
        elif omega.kind is RegionKind.RIGHT_HALF_PLANE:
            out.append(complex(omega.offset + _OMEGA_NUDGE, c.imag))
    return out
