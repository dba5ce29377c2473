"""Inverse branches over growing discs, obstructions, tracts, curves.

A branch is continued by Newton path-following: grow the image disc
geometrically, extend 64 boundary rays radially, and verify that every
boundary sector closes up (a mismatch is nontrivial monodromy, i.e. a
singular value entered the disc).  Bisection then brackets the maximal
radius, and the obstruction is classified by the order of the monodromy
loop around the located boundary point: a simple critical value gives a
sheet swap that squares to the identity, an asymptotic value never
closes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from mpmath import lambertw

from .catalog import (MODEL_F1_COEFF, TWO_PI, EntireMap, MapKind,
                      scalar_ops)
from .errors import (BudgetExhaustedError, CriticalBasepointError,
                     NotIsolatedSingularValueError, OverflowAtPointError,
                     RadiusTooSmallError, UContainsCriticalValuesError)

_NEWTON_TOL = 1e-12
_DERIV_FLOOR = 1e-10
_CLOSE_TOL = 1e-6
_RAYS = 64
_GROWTH = 1.05
_RAY_UNITS = [cmath.exp(2j * math.pi * j / _RAYS) for j in range(_RAYS)]


class _PathBlocked(Exception):
    """Newton continuation could not follow the requested path."""


class _Steps:
    """Shared step allowance for one continuation run."""

    __slots__ = ("left",)

    def __init__(self, n):
        self.left = int(n)

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExhaustedError("continuation step budget exhausted")


def _newton_to(m, z, w, max_iter=40, deriv_floor=_DERIV_FLOOR, tol=None):
    """Solve f(z) = w from the given seed; the seed must be on the sheet.

    deriv_floor=0.0 admits tract walks, where |f'| decays toward an
    asymptotic value but the step |f - w| / |f'| stays conditioned.
    Such walks must also pass a tol matching their shrinking image
    scale, or the default would accept stale iterates.
    """
    f, df = scalar_ops(m)
    if tol is None:
        tol = _NEWTON_TOL * max(1.0, abs(w))
    for _ in range(max_iter):
        fz, finite = f(z)
        if not finite:
            raise _PathBlocked("overflow on path")
        if abs(fz - w) <= tol:
            return z
        d, finite = df(z)
        if (not finite) or abs(d) <= deriv_floor:
            raise _PathBlocked("derivative floor on path")
        z = z - (fz - w) / d
    raise _PathBlocked("newton stall")


def _walk(m, z, w_from, w_to, steps, deriv_floor=_DERIV_FLOOR, tol=None):
    """Follow the branch along the straight segment w_from -> w_to.

    A step is only attempted while the expected displacement |dw|/|f'|
    stays inside a fixed trust length, keeping Newton in the basin of
    the current sheet.  Two sheet-change symptoms force a refusal: a
    result jumping far beyond the expectation (translation-type sheets,
    which sit far apart), and the derivative turning by more than a
    quarter circle (fold-type sheets near a critical point, which sit
    close together but carry opposite derivatives).  Refusals subdivide.
    """
    _, df = scalar_ops(m)
    t, dt = 0.0, 1.0
    w_cur = w_from
    while True:
        steps.spend()
        last = dt >= 1.0 - t
        w_next = w_to if last else w_from + (t + dt) * (w_to - w_from)
        d, d_finite = df(z)
        scale = max(abs(d) if d_finite else 0.0, 1e-300)
        expected = abs(w_next - w_cur) / scale
        z_new = None
        if expected <= 0.25:
            try:
                z_new = _newton_to(m, z, w_next, deriv_floor=deriv_floor,
                                   tol=tol)
            except _PathBlocked:
                pass
        ok = (z_new is not None
              and abs(z_new - z) <= 8.0 * expected + 1e-9 * (1.0 + abs(z)))
        if ok and d_finite:
            d_new, new_finite = df(z_new)
            ok = new_finite and (d_new * d.conjugate()).real > 0.0
        if not ok:
            dt *= 0.5
            if dt < 2.0 ** -46:
                raise _PathBlocked("segment step underflow")
            continue
        z, w_cur = z_new, w_next
        if last:
            return z
        t += dt
        dt = min(dt * 1.6, 1.0)


def _walk_arc(m, z, center, r, th_from, th_to, steps, sagitta_cap):
    """Follow the branch along a circular arc, by chords short enough
    that the polygon stays within sagitta_cap of the circle."""
    span = th_to - th_from
    if span == 0.0:
        return z
    max_step = math.sqrt(8.0 * sagitta_cap / max(r, 1e-300))
    n = max(1, int(math.ceil(abs(span) / max_step)))
    w_prev = center + r * cmath.exp(1j * th_from)
    for j in range(1, n + 1):
        w_next = center + r * cmath.exp(1j * (th_from + span * j / n))
        z = _walk(m, z, w_prev, w_next, steps)
        w_prev = w_next
    return z


# ---- maximal disc continuation ---------------------------------------


class ObstructionKind(Enum):
    CRITICAL = "critical-obstruction"
    ASYMPTOTIC = "asymptotic-obstruction"


@dataclass(frozen=True)
class Obstruction:
    s: complex
    kind: ObstructionKind
    limit: Optional[complex] = None  # critical point, CRITICAL only


@dataclass(frozen=True)
class BranchState:
    """Inverse branch phi with phi(center) = basepoint, certified
    univalent on the open disc B(center, radius)."""

    map: EntireMap
    basepoint: complex
    center: complex
    radius: float
    obstruction: Optional[Obstruction] = None

    def invert(self, w) -> complex:
        w = complex(w)
        if abs(w - self.center) >= self.radius:
            raise ValueError("point outside the certified disc")
        steps = _Steps(100_000)
        try:
            return _walk(self.map, self.basepoint, self.center, w, steps)
        except _PathBlocked as exc:
            raise BudgetExhaustedError(f"branch inversion failed: {exc}")


def _extend_ring(m, center, ring, r_prev, r_new, steps, sagitta_cap):
    """Push a 64-point boundary ring outward and check sector closure."""
    new_ring = []
    for j, u in enumerate(_RAY_UNITS):
        z = _walk(m, ring[j], center + r_prev * u, center + r_new * u, steps)
        new_ring.append(z)
    sector = TWO_PI / _RAYS
    for j in range(_RAYS):
        th = sector * j
        z = _walk_arc(m, new_ring[j], center, r_new, th, th + sector,
                      steps, sagitta_cap)
        target = new_ring[(j + 1) % _RAYS]
        if abs(z - target) > _CLOSE_TOL * max(1.0, abs(target)):
            raise _PathBlocked(f"sector {j} does not close")
    return new_ring


def _fd_second_derivative(m, z):
    h = 1e-6 * (1.0 + abs(z))
    a = m.derivative(z + h)
    b = m.derivative(z - h)
    if not (a.finite and b.finite):
        raise _PathBlocked("overflow near critical point")
    return (a.value - b.value) / (2.0 * h)


def _polish_critical(m, c):
    """Newton on f' with a finite-difference second derivative.

    Raises unless the iteration genuinely converges: along an escape
    toward an asymptotic value |f'| also decays, but the Newton steps
    never settle there.
    """
    for _ in range(80):
        d = m.derivative(c)
        if not d.finite:
            raise _PathBlocked("overflow near critical point")
        dd = _fd_second_derivative(m, c)
        if abs(dd) < 1e-12:
            raise _PathBlocked("degenerate critical point")
        step = d.value / dd
        c = c - step
        if abs(step) <= 1e-14 * (1.0 + abs(c)):
            return c
    raise _PathBlocked("critical polish did not converge")


def continue_branch(m: EntireMap, z0, max_radius=10.0, *,
                    budget=2_000_000) -> BranchState:
    """Continue the inverse branch through z0 over the largest disc
    around f(z0), bracketing the maximal radius to 1e-6 and classifying
    the blocking boundary point."""
    z0 = complex(z0)
    if max_radius <= 0:
        raise ValueError("max_radius must be positive")
    d0 = m.derivative(z0)
    if (not d0.finite) or abs(d0.value) <= _DERIV_FLOOR:
        raise CriticalBasepointError(
            f"|f'({z0})| <= {_DERIV_FLOOR}; pick a regular basepoint")
    f0 = m.evaluate(z0)
    if not f0.finite:
        raise OverflowAtPointError(f"f({z0}) overflows")
    center = f0.value
    steps = _Steps(budget)

    coarse_cap = 2e-5
    r_lo, ring_lo = 0.0, [z0] * _RAYS
    r = min(max_radius, 1e-4 * (1.0 + abs(center)))
    r_fail = None
    while True:
        try:
            ring = _extend_ring(m, center, ring_lo, r_lo, r, steps,
                                coarse_cap * max(r, 1e-12))
        except _PathBlocked:
            r_fail = r
            break
        r_lo, ring_lo = r, ring
        if r >= max_radius:
            return BranchState(m, z0, center, float(max_radius))
        r = min(r * _GROWTH, max_radius)

    # bisect between the last certified ring and the failure, shrinking
    # the chord sagitta with the bracket so the polygon slack never
    # dominates the 1e-6 resolution
    r_hi = r_fail
    while r_hi - r_lo > 1e-6:
        cap = max(1e-7, 0.02 * (r_hi - r_lo))
        mid = 0.5 * (r_lo + r_hi)
        try:
            ring = _extend_ring(m, center, ring_lo, r_lo, mid, steps,
                                cap * max(mid, 1e-12))
            r_lo, ring_lo = mid, ring
        except _PathBlocked:
            r_hi = mid
    radius = 0.5 * (r_lo + r_hi)

    obstruction = _classify_obstruction(m, center, r_lo, ring_lo, r_hi, steps)
    return BranchState(m, z0, center, radius, obstruction)


def _classify_obstruction(m, center, r_lo, ring_lo, r_hi, steps):
    """Locate the blocking boundary point and classify it.

    On the last certified circle |f'| dips to its minimum at the angle
    of the blocking singular value: like sqrt|w - s| approaching a
    simple critical value, like |w - s| itself inside a logarithmic
    tract.  A golden-section search on |f'| along a circle slightly
    inside the certified one therefore pins the angle while every walk
    stays in univalent territory.  Newton on f' from the dip either
    settles on the critical point or never converges, separating the
    two kinds; the asymptotic case is corroborated by a divergence
    probe toward the boundary point.
    """
    r_star = 0.5 * (r_lo + r_hi)
    # probing slightly inside keeps |f'| bounded away from zero, so
    # walks crossing the dip stay cheap
    r_probe = r_lo * (1.0 - 1e-3)
    cap = 1e-3 * max(r_probe, 1e-9)

    def ring_dip(j):
        d = m.derivative(ring_lo[j])
        return abs(d.value) if d.finite else math.inf

    j0 = min(range(_RAYS), key=ring_dip)
    th_lo = (j0 - 1) * TWO_PI / _RAYS
    th_hi = (j0 + 1) * TWO_PI / _RAYS
    u = _RAY_UNITS[(j0 - 1) % _RAYS]
    anchor = _walk(m, ring_lo[(j0 - 1) % _RAYS],
                   center + r_lo * u, center + r_probe * u, steps)

    cache = {}

    def probe(th):
        if th not in cache:
            z = _walk_arc(m, anchor, center, r_probe, th_lo, th, steps, cap)
            d = m.derivative(z)
            cache[th] = (abs(d.value) if d.finite else math.inf, z)
        return cache[th]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = th_lo, th_hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    g1, _ = probe(x1)
    g2, _ = probe(x2)
    for _ in range(64):
        if b - a <= 1e-12:
            break
        if g1 <= g2:
            b, x2, g2 = x2, x1, g1
            x1 = b - invphi * (b - a)
            g1, _ = probe(x1)
        else:
            a, x1, g1 = x1, x2, g2
            x2 = a + invphi * (b - a)
            g2, _ = probe(x2)
    th_star = 0.5 * (a + b)
    _, z_star = probe(th_star)
    boundary_point = center + r_star * cmath.exp(1j * th_star)

    try:
        c = _polish_critical(m, z_star)
    except _PathBlocked:
        c = None
    if c is not None:
        v = m.evaluate(c)
        dv = m.derivative(c)
        if (v.finite and dv.finite and abs(dv.value) < 1e-8
                and abs(v.value - boundary_point) <= 1e-3 * max(1.0, r_star)):
            return Obstruction(s=v.value, kind=ObstructionKind.CRITICAL,
                               limit=c)

    s = boundary_point
    for a_val in m.singular.asymptotic_values:
        if abs(s - a_val) <= max(1e-4, 1e-4 * r_star):
            s = complex(a_val)
            break
    _confirm_divergence(m, center, z_star, r_probe, th_star, s, steps, cap)
    return Obstruction(s=s, kind=ObstructionKind.ASYMPTOTIC)


def _confirm_divergence(m, center, z, r_in, th, s, steps, cap):
    """Walk radially toward s; |phi| must grow monotonically."""
    direction = (s - center) / abs(s - center)
    w0 = center + r_in * direction
    th0 = cmath.phase(direction)
    th0 += TWO_PI * round((th - th0) / TWO_PI)
    try:
        z = _walk_arc(m, z, center, r_in, th, th0, steps, cap)
        moduli = []
        w = w0
        for _ in range(12):
            w_next = s + (w - s) * 0.5
            z = _walk(m, z, w, w_next, steps, deriv_floor=0.0,
                      tol=_NEWTON_TOL * abs(w_next - s))
            moduli.append(abs(z))
            w = w_next
    except _PathBlocked as exc:
        raise BudgetExhaustedError(f"divergence probe failed: {exc}")
    tail = moduli[-10:]
    if not all(b > a for a, b in zip(tail, tail[1:])):
        raise BudgetExhaustedError(
            "boundary point is neither critical nor divergent")


# ---- asymptotic curves ------------------------------------------------


@dataclass(frozen=True)
class AsymptoticCurve:
    """Preimage of a radius of the disc, running out to infinity while
    f tends to the asymptotic value along a straight segment."""

    samples: tuple
    image_segment: tuple
    target_value: complex

    def to_csv(self) -> str:
        n = max(len(self.samples) - 1, 1)
        lines = ["t,re,im"]
        for k, z in enumerate(self.samples):
            lines.append(f"{k / n!r},{z.real!r},{z.imag!r}")
        return "\n".join(lines) + "\n"


def trace_asymptotic_curve(state: BranchState, target_modulus,
                           *, budget=400_000) -> AsymptoticCurve:
    """Follow the branch along the disc radius toward the asymptotic
    boundary point until |z| >= target_modulus."""
    if state.obstruction is None or state.obstruction.kind is not \
            ObstructionKind.ASYMPTOTIC:
        raise ValueError("branch state has no asymptotic obstruction")
    if target_modulus <= 0:
        raise ValueError("target_modulus must be positive")
    m = state.map
    s = complex(state.obstruction.s)
    steps = _Steps(budget)
    z = state.basepoint
    w = state.center
    zs, ws = [z], [w]
    while abs(z) < target_modulus:
        w_next = s + (w - s) * 0.5
        if w_next == w or w_next == s:
            raise BudgetExhaustedError(
                "image segment exhausted before reaching target modulus")
        try:
            z = _walk(m, z, w, w_next, steps, deriv_floor=0.0,
                      tol=_NEWTON_TOL * abs(w_next - s))
        except _PathBlocked as exc:
            raise BudgetExhaustedError(f"curve tracing blocked: {exc}")
        w = w_next
        if abs(z) > abs(zs[-1]):
            zs.append(z)
            ws.append(w)
    return AsymptoticCurve(samples=tuple(zs),
                           image_segment=(ws[0], ws[-1]),
                           target_value=s)


_CANON_BASEPOINT = {MapKind.LAMBDA_EXP: 0.0 + 0j,
                    MapKind.MODEL_F1: -10.0 + 0j,
                    MapKind.MODEL_F2: -10.0 + 0j}


def asymptotic_curve_toward(m: EntireMap, s, target_modulus) -> AsymptoticCurve:
    """Asymptotic curve toward the asymptotic value s, built by
    continuing the canonical branch that obstructs there."""
    s = complex(s)
    values = m.singular.asymptotic_values
    if not values or min(abs(s - a) for a in values) > 1e-9:
        raise ValueError(f"{s} is not an asymptotic value of {m.map_id()}")
    z0 = _CANON_BASEPOINT[m.kind]
    center = m.evaluate(z0).value
    state = continue_branch(m, z0, max_radius=2.0 * abs(center - s))
    if state.obstruction is None or abs(complex(state.obstruction.s) - s) > \
            1e-6 * (1.0 + abs(s)):
        raise BudgetExhaustedError("canonical branch missed the target value")
    return trace_asymptotic_curve(state, target_modulus)


def decay_along_curve(m: EntireMap, curve: AsymptoticCurve, tau):
    """Tabulate (|z|, (1+|z|^tau)|f'(z)|) along the curve samples."""
    rows = []
    for z in curve.samples:
        d = m.derivative(z)
        g = abs(d.value) if d.finite else math.inf
        rows.append((abs(z), (1.0 + abs(z) ** tau) * g))
    return rows


# ---- tracts over a disc of univalence ---------------------------------


@dataclass(frozen=True)
class DiscOfUnivalence:
    center: complex
    radius: float
    tangency: complex  # the singular value, on the boundary circle

    def contains(self, w) -> bool:
        # tangency-relative quadratic form: |w - c| < r loses to rounding
        # when w sits exponentially close to the tangency point
        v = complex(w) - self.tangency
        d = self.center - self.tangency
        return (v.real * v.real + v.imag * v.imag
                < 2.0 * (v.real * d.real + v.imag * d.imag))


_HORN_KINDS = (MapKind.LAMBDA_EXP, MapKind.MODEL_F1, MapKind.MODEL_F2)


def _horn_log_image(m, z):
    """(log|f(z)|, arg f(z)) for the horn maps, exact far into the tract
    where f itself under- or overflows."""
    if m.kind is MapKind.LAMBDA_EXP:
        return (math.log(abs(m.lam)) + z.real, cmath.phase(m.lam) + z.imag)
    unit = MODEL_F1_COEFF if m.kind is MapKind.MODEL_F1 else math.e
    return (math.log(unit) + math.log(abs(z)) + z.real,
            cmath.phase(z) + z.imag)


@dataclass(frozen=True)
class Tract:
    """One preimage component of the disc of univalence.

    Membership pairs the image test with a horizontal strip around the
    seed; the catalog components repeat by vertical translation, so the
    strip separates them.  For the horn maps with tangency 0 the image
    test runs in log form: w in B  <=>  log|w| < log(2 |d| cos(arg w -
    arg d)) with d the center seen from the tangency, so points whose
    image underflows keep their membership.
    """

    map: EntireMap
    disc: DiscOfUnivalence
    branch_seed: complex
    sampled_boundary: tuple
    min_radius: float

    def contains(self, z) -> bool:
        z = complex(z)
        if abs(z.imag - self.branch_seed.imag) >= math.pi:
            return False
        d = self.disc.center - self.disc.tangency
        if self.map.kind in _HORN_KINDS and self.disc.tangency == 0:
            if z == 0 and self.map.kind is not MapKind.LAMBDA_EXP:
                return False
            logmod, arg = _horn_log_image(self.map, z)
            cosd = math.cos(arg - cmath.phase(d))
            return cosd > 0.0 and logmod < math.log(2.0 * abs(d) * cosd)
        fz = self.map.evaluate(z)
        return fz.finite and self.disc.contains(fz.value)

    def _contains_array(self, z):
        z = np.asarray(z, dtype=np.complex128)
        strip = np.abs(z.imag - self.branch_seed.imag) < math.pi
        d = self.disc.center - self.disc.tangency
        if self.map.kind in _HORN_KINDS and self.disc.tangency == 0:
            if self.map.kind is MapKind.LAMBDA_EXP:
                logmod = math.log(abs(self.map.lam)) + z.real
                arg = cmath.phase(self.map.lam) + z.imag
            else:
                unit = (MODEL_F1_COEFF if self.map.kind is MapKind.MODEL_F1
                        else math.e)
                with np.errstate(divide="ignore"):
                    logmod = math.log(unit) + np.log(np.abs(z)) + z.real
                arg = np.angle(z) + z.imag
                strip = strip & (z != 0)
            cosd = np.cos(arg - cmath.phase(d))
            with np.errstate(divide="ignore", invalid="ignore"):
                inside = (cosd > 0.0) & (logmod
                                         < np.log(2.0 * abs(d) * cosd))
            return inside & strip
        vals, ok, _ = self.map.eval_array(z)
        v = vals - self.disc.tangency
        with np.errstate(invalid="ignore"):
            inside = ok & ((v.real * v.real + v.imag * v.imag)
                           < 2.0 * (v.real * d.real + v.imag * d.imag))
        return inside & strip

    def interior_samples(self, count=100):
        """Preimages of a polar grid in the disc, continued from the seed."""
        n_r = max(2, int(math.ceil(math.sqrt(count))))
        steps = _Steps(200_000)
        out = []
        for i in range(n_r):
            rho = self.disc.radius * 0.88 * (i + 1) / n_r
            for j in range(n_r):
                w = self.disc.center + rho * cmath.exp(2j * math.pi * j / n_r)
                out.append(_walk(self.map, self.branch_seed,
                                 self.disc.center, w, steps))
                if len(out) == count:
                    return out
        return out

    def boundary_csv(self) -> str:
        n = max(len(self.sampled_boundary) - 1, 1)
        lines = ["t,re,im"]
        for k, z in enumerate(self.sampled_boundary):
            lines.append(f"{k / n!r},{z.real!r},{z.imag!r}")
        return "\n".join(lines) + "\n"


def _branch_indices(count, skip_zero):
    out = []
    for j in range(count):
        if skip_zero:
            out.append((j // 2 + 1) * (1 if j % 2 == 0 else -1))
        else:
            out.append(0 if j == 0 else ((j + 1) // 2) * (1 if j % 2 else -1))
    return out


def _tract_seed(m, c_d, k):
    if m.kind is MapKind.LAMBDA_EXP:
        guess = cmath.log(c_d / m.lam) + TWO_PI * 1j * k
    else:
        # model maps: unit * w * e^w = c  <=>  w = W_k(c / unit)
        unit = MODEL_F1_COEFF if m.kind is MapKind.MODEL_F1 else math.e
        guess = complex(lambertw(c_d / unit, k))
    return _newton_to(m, guess, c_d)


def _trace_tract_boundary(m, disc, seed, points=256):
    # the tangency sits on the circle itself; clip a small angular
    # notch around it
    delta = TWO_PI / 512
    th_s = cmath.phase(disc.tangency - disc.center)
    th = np.linspace(th_s + delta, th_s + TWO_PI - delta, points)
    steps = _Steps(400_000)
    targets = disc.center + disc.radius * np.exp(1j * th)
    z = _walk(m, seed, disc.center, complex(targets[0]), steps)
    pts = [z]
    for a, b in zip(targets[:-1], targets[1:]):
        z = _walk(m, z, complex(a), complex(b), steps)
        pts.append(z)
    return pts


def discs_of_univalence(m: EntireMap, s, u_radius, count, *,
                        u_center=None) -> list:
    """count pairwise disjoint tracts over a disc tangent to s inside
    U = B(u_center, u_radius); u_center defaults to s, in which case the
    tangent disc extends in the positive real direction."""
    s = complex(s)
    if count < 1:
        raise ValueError("count must be at least 1")
    if u_radius <= 0:
        raise ValueError("u_radius must be positive")
    values = m.singular.known_singular_values
    if not values or min(abs(s - v) for v in values) > 1e-9:
        raise NotIsolatedSingularValueError(
            f"{s} is not a singular value of {m.map_id()}")
    u_center = s if u_center is None else complex(u_center)
    margin = u_radius - abs(u_center - s)
    if margin <= 0:
        raise ValueError("s must lie inside the disc U")
    bad = m.critical_values_near(u_center, u_radius)
    if bad:
        raise UContainsCriticalValuesError(
            f"critical value {bad[0]} lies inside U around {s}")
    off = u_center - s
    direction = off / abs(off) if off != 0 else 1.0 + 0j
    r_d = 0.5 * margin
    disc = DiscOfUnivalence(center=s + r_d * direction, radius=r_d,
                            tangency=s)
    skip_zero = m.kind in (MapKind.MODEL_F1, MapKind.MODEL_F2)
    tracts = []
    for k in _branch_indices(count, skip_zero):
        seed = _tract_seed(m, disc.center, k)
        boundary = _trace_tract_boundary(m, disc, seed)
        min_r = max(abs(z) for z in boundary) + 1.0
        tracts.append(Tract(map=m, disc=disc, branch_seed=seed,
                            sampled_boundary=tuple(boundary),
                            min_radius=min_r))
    return tracts


def boundary_separation(tracts) -> float:
    """Minimum pairwise distance between tract boundary polylines."""
    best = math.inf
    arrays = [np.asarray(t.sampled_boundary) for t in tracts]
    for i in range(len(arrays)):
        for j in range(i + 1, len(arrays)):
            d = float(np.abs(arrays[i][:, None] - arrays[j][None, :]).min())
            best = min(best, d)
    return best


def tract_angular_measure(tract: Tract, x) -> float:
    """Angular measure of {theta : x e^(i theta) in tract}, sampled at
    resolution 2 pi / 4096 with bisection-refined edges."""
    x = float(x)
    if x < tract.min_radius:
        raise RadiusTooSmallError(
            f"x = {x} is below the tract's inner radius {tract.min_radius}")
    n = 4096
    th = np.linspace(0.0, TWO_PI, n, endpoint=False)
    inside = tract._contains_array(x * np.exp(1j * th))
    if not inside.any():
        return 0.0
    if inside.all():
        return TWO_PI

    def edge(th_out, th_in):
        for _ in range(46):
            mid = 0.5 * (th_out + th_in)
            if tract.contains(x * cmath.exp(1j * mid)):
                th_in = mid
            else:
                th_out = mid
        return 0.5 * (th_out + th_in)

    prev = np.roll(inside, 1)
    entries = np.flatnonzero(inside & ~prev)
    exits = np.flatnonzero(~inside & prev)
    measure = 0.0
    for i in entries:
        start = edge(th[i - 1], th[i])
        # matching exit: first transition at or after the entry sample
        j = exits[exits >= i][0] if (exits >= i).any() else exits[0]
        end = edge(th[j % n], th[j - 1])
        measure += (end - start) % TWO_PI
    return measure
