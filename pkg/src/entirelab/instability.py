"""Parameter-space instability: continued fixed points, winding numbers,
and the perturbed-parameter root search."""

import cmath
import json
import logging
import math
from dataclasses import dataclass

from .catalog import f1 as _f1
from .catalog import scaled
from .dynamics import StabilityClass, classify_multiplier
from .errors import (
    ContinuationBreakdownError,
    NoRootInDiscError,
    OverflowInChainError,
    StepLimitExceededError,
    ZeroOnContourError,
)

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# parabolic guard: the implicit function theorem needs the multiplier
# bounded away from 1
NEUTRAL_GAP = 1e-3
PATH_RESIDUAL_TOL = 1e-11
ROOT_RESIDUAL_TOL = 1e-8


# ---- fixed-point continuation ------------------------------------------


@dataclass(frozen=True)
class PathSample:
    lam: complex
    location: complex
    multiplier: complex


@dataclass(frozen=True)
class FixedPointPath:
    """Repelling fixed point continued along a parameter path.

    Every sample keeps |f_lam(z) - z| below 1e-11 and a multiplier of
    modulus > 1; construction fails rather than produce a sample outside
    that regime.
    """

    p: int
    samples: tuple

    @property
    def phi(self) -> complex:
        return self.samples[-1].location


def _fixed_point_near(m, seed: complex):
    """Newton solve of f(z) = z from seed; (location, multiplier, ok)."""
    z = complex(seed)
    for _ in range(60):
        v = m.evaluate(z)
        d = m.derivative(z)
        if not (v.finite and d.finite) or abs(z) > 1e9:
            return z, 0j, False
        denom = d.value - 1.0
        if abs(denom) < 1e-14:
            return z, d.value, False
        step = (v.value - z) / denom
        z -= step
        if abs(step) <= 1e-14 * (1.0 + abs(z)):
            res = abs(m.evaluate(z).value - z)
            return z, m.derivative(z).value, res < PATH_RESIDUAL_TOL
    return z, 0j, False


def continue_fixed_point(p: int, start_fp: complex, lams) -> FixedPointPath:
    """Continue a repelling fixed point of the lambda=1 map along lams.

    Predictor-corrector with the previous location as the next seed;
    raises ContinuationBreakdownError when the corrector stalls, jumps to
    a different branch, or the multiplier enters B(1, 1e-3) or the closed
    unit disc.
    """
    lams = [complex(l) for l in lams]
    if not lams:
        raise ValueError("parameter path is empty")
    base = scaled(p, 1.0)
    start_fp = complex(start_fp)
    if abs(base.evaluate(start_fp).value - start_fp) > 1e-8:
        raise ValueError(f"{start_fp} is not a fixed point of the base map")
    mult0 = base.derivative(start_fp).value
    if abs(mult0 - 1.0) <= NEUTRAL_GAP:
        raise ValueError("starting multiplier too close to 1 for continuation")

    samples = []
    prev = start_fp
    for lam in lams:
        m = scaled(p, lam)
        z, mult, ok = _fixed_point_near(m, prev)
        if not ok:
            raise ContinuationBreakdownError(
                f"corrector stalled at lambda = {lam}")
        if abs(z - prev) > 1.0:
            raise ContinuationBreakdownError(
                f"corrector jumped branches at lambda = {lam}")
        if abs(mult - 1.0) <= NEUTRAL_GAP:
            raise ContinuationBreakdownError(
                f"multiplier {mult} entered the neutral gap at lambda = {lam}")
        if abs(mult) <= 1.0:
            raise ContinuationBreakdownError(
                f"fixed point no longer repelling at lambda = {lam}")
        samples.append(PathSample(lam, z, mult))
        prev = z
    return FixedPointPath(p, tuple(samples))


# ---- winding numbers ----------------------------------------------------


@dataclass(frozen=True)
class WindingResult:
    center: complex
    radius: float
    winding_number: int
    min_boundary_modulus: float


_MAX_SPLIT_DEPTH = 40


def winding_number(g, center: complex, radius: float,
                   min_steps: int = 64) -> WindingResult:
    """Integer winding of g around 0 along the circle |z - center| = radius.

    Argument increments are tracked adaptively: any segment whose phase
    jump reaches pi/2 is bisected, so the accumulated argument determines
    the winding number unambiguously for continuous nonvanishing g.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if min_steps < 4:
        raise ValueError(f"min_steps must be at least 4, got {min_steps}")
    center = complex(center)

    min_mod = [math.inf]

    def sample(t: float) -> complex:
        v = complex(g(center + radius * cmath.exp(2j * math.pi * t)))
        a = abs(v)
        if a < 1e-12:
            raise ZeroOnContourError(
                f"|g| = {a:.3e} at contour parameter {t}")
        if a < min_mod[0]:
            min_mod[0] = a
        return v

    def accumulate(t1, v1, t2, v2, depth):
        d = cmath.phase(v2 / v1)
        if abs(d) < math.pi / 2.0:
            return d
        if depth >= _MAX_SPLIT_DEPTH:
            raise StepLimitExceededError(
                f"argument tracking stalled near contour parameter {t1}")
        tm = 0.5 * (t1 + t2)
        vm = sample(tm)
        return (accumulate(t1, v1, tm, vm, depth + 1)
                + accumulate(tm, vm, t2, v2, depth + 1))

    ts = [k / min_steps for k in range(min_steps)]
    vs = [sample(t) for t in ts]
    total = 0.0
    for k in range(min_steps):
        t2 = ts[(k + 1) % min_steps] if k + 1 < min_steps else 1.0
        v2 = vs[(k + 1) % min_steps]
        total += accumulate(ts[k], vs[k], t2, v2, 0)
    w = round(total / TWO_PI)
    if abs(total / TWO_PI - w) > 1e-2:
        raise StepLimitExceededError(
            f"accumulated argument {total} is not an integer multiple of 2pi")
    return WindingResult(center, float(radius), int(w), min_mod[0])


# ---- instability parameter search ---------------------------------------


@dataclass(frozen=True)
class InstabilityResult:
    """Parameter lambda0 near 1 for which the critical point z_n = 2 pi i n
    lands, after two steps of lambda*f_p, on the continued repelling fixed
    point."""

    p: int
    n: int
    delta: float
    lambda0: complex
    residual: float
    winding: int
    fixed_point_class: StabilityClass
    multiplier: complex

    def to_json(self) -> str:
        return json.dumps({
            "p": self.p,
            "n": self.n,
            "delta": self.delta,
            "lambda0_re": self.lambda0.real,
            "lambda0_im": self.lambda0.imag,
            "residual": self.residual,
            "winding": self.winding,
        })


class _OverflowOnContour(Exception):
    pass


def _start_fixed_point(p: int) -> complex:
    if p == 1:
        return 1j * math.pi
    # principal solution of e^{-z} = 1 - 2 pi i
    return -cmath.log(1.0 - TWO_PI * 1j)


def _make_g(p: int, zn: complex, start: complex):
    """g(lam) = f_lam^2(z_n) - phi(lam), with phi Newton-continued from
    the base fixed point; also reports max sampled |psi2|."""
    psi2_max = [0.0]

    def g(lam: complex) -> complex:
        m = scaled(p, lam)
        w1 = m.evaluate(zn)
        if not w1.finite:
            raise _OverflowOnContour
        w2 = m.evaluate(w1.value)
        if not w2.finite:
            raise _OverflowOnContour
        if abs(w2.value) > psi2_max[0]:
            psi2_max[0] = abs(w2.value)
        z, mult, ok = _fixed_point_near(m, start)
        if not ok or abs(z - start) > 1.0:
            raise ContinuationBreakdownError(
                f"fixed-point continuation failed at lambda = {lam}")
        return w2.value - z

    return g, psi2_max


def _phi_at(p: int, lam: complex, start: complex):
    m = scaled(p, lam)
    z, mult, ok = _fixed_point_near(m, start)
    if not ok or abs(z - start) > 1.0:
        raise ContinuationBreakdownError(
            f"fixed-point continuation failed at lambda = {lam}")
    return z, mult


def _polish_root(g, seed: complex, radius: float) -> complex | None:
    """Newton on g with a central finite-difference derivative."""
    lam = complex(seed)
    for _ in range(40):
        h = 1e-7 * (1.0 + abs(lam))
        v = g(lam)
        dv = (g(lam + h) - g(lam - h)) / (2.0 * h)
        if abs(dv) == 0.0:
            return None
        step = v / dv
        if abs(step) > 0.5 * radius:
            step *= 0.5 * radius / abs(step)
        lam -= step
        if abs(step) <= 1e-15 * (1.0 + abs(lam)):
            return lam
    return None


def find_instability_parameter(p: int, n: int, delta: float,
                               min_steps: int = 256) -> InstabilityResult:
    """Locate lambda0 in B(1, delta) with f_lam^2(z_n) = phi(lambda0).

    Verifies a positive winding of g on the contour first (the argument
    principle provides the existence certificate), then polishes local
    |g| minima from a deterministic grid and returns the root closest to
    the disc center.  The contour radius shrinks by 0.8 (at most 5 times)
    if an intermediate evaluation overflows; the radius actually used is
    reported as delta.
    """
    if p == 2:
        raise ValueError(
            "p=2 has no repelling fixed point to continue; use p=1 or p=3")
    if p not in (1, 3):
        raise ValueError(f"map index p must be 1 or 3, got {p}")
    if not 0.0 < delta < 0.1:
        raise ValueError(f"delta must lie in (0, 0.1), got {delta}")

    start = _start_fixed_point(p)
    zn = scaled(p, 1.0).critical_points([n])[0]
    g, psi2_max = _make_g(p, zn, start)

    radius = float(delta)
    wr = None
    for _ in range(6):
        psi2_max[0] = 0.0
        try:
            wr = winding_number(g, 1.0 + 0j, radius, min_steps)
            break
        except _OverflowOnContour:
            radius *= 0.8
    if wr is None:
        raise OverflowInChainError(
            "psi2 overflowed on every retried contour radius")
    if psi2_max[0] < 10.0:
        raise ValueError(
            f"n = {n} is too small: max |psi2| on the contour is "
            f"{psi2_max[0]:.3f} < 10")
    if wr.winding_number < 1:
        raise NoRootInDiscError(
            f"winding number 0 on |lambda - 1| = {radius}")

    # deterministic grid over the disc; polish every local |g| minimum.
    # 81 points per side resolves root chains down to spacing ~radius/20
    # (half the grid would alias the Figure-2 chain and polish to the
    # wrong member)
    side = 81
    span = 0.98 * radius
    coords = [-span + 2.0 * span * k / (side - 1) for k in range(side)]
    mods = [[math.inf] * side for _ in range(side)]
    for i, y in enumerate(coords):
        for j, x in enumerate(coords):
            if x * x + y * y <= span * span:
                mods[i][j] = abs(g(complex(1.0 + x, y)))

    roots = []
    for i in range(side):
        for j in range(side):
            m0 = mods[i][j]
            if not math.isfinite(m0):
                continue
            neighbours = []
            if i > 0:
                neighbours.append(mods[i - 1][j])
            if i < side - 1:
                neighbours.append(mods[i + 1][j])
            if j > 0:
                neighbours.append(mods[i][j - 1])
            if j < side - 1:
                neighbours.append(mods[i][j + 1])
            if any(m0 > v for v in neighbours):
                continue
            seed = complex(1.0 + coords[j], coords[i])
            root = _polish_root(g, seed, radius)
            if root is None or abs(root - 1.0) >= radius:
                continue
            if abs(g(root)) >= ROOT_RESIDUAL_TOL:
                continue
            if all(abs(root - r) > 1e-9 for r in roots):
                roots.append(root)

    if not roots:
        raise NoRootInDiscError(
            f"winding {wr.winding_number} > 0 but no refined root "
            f"converged inside |lambda - 1| < {radius}")
    lambda0 = min(roots, key=lambda r: abs(r - 1.0))

    phi, mult = _phi_at(p, lambda0, start)
    stability = classify_multiplier(mult)
    if stability is not StabilityClass.REPELLING:
        raise ContinuationBreakdownError(
            f"continued fixed point at lambda0 is {stability}, not repelling")
    return InstabilityResult(p, int(n), radius, lambda0, abs(g(lambda0)),
                             wr.winding_number, stability, mult)


# ---- zeros of f1 ---------------------------------------------------------


def zeros_of_f1(im_range, per_strip: int = 8) -> list:
    """Newton roots of z + 1 + e^{-z} = 0 with Im in the given range.

    Seeds follow the asymptotic location -log(y) + iy on a grid of
    per_strip points per 2 pi of imaginary width; non-convergent seeds
    are logged and dropped.
    """
    lo, hi = float(im_range[0]), float(im_range[1])
    if lo < TWO_PI or hi <= lo:
        raise ValueError(
            f"im_range must be an interval inside (2 pi, inf), got {im_range}")
    if per_strip < 1:
        raise ValueError(f"per_strip must be positive, got {per_strip}")

    m = _f1()
    count = per_strip * max(1, math.ceil((hi - lo) / TWO_PI))
    roots = []
    for k in range(count):
        y = lo + (k + 0.5) * (hi - lo) / count
        z = complex(-math.log(y), y)
        converged = False
        for _ in range(80):
            v = m.evaluate(z)
            d = m.derivative(z)
            if not (v.finite and d.finite and abs(d.value) > 1e-14):
                break
            step = v.value / d.value
            z -= step
            if abs(step) <= 1e-13 * (1.0 + abs(z)):
                converged = True
                break
        if not converged or abs(m.evaluate(z).value) >= 1e-10:
            log.debug("zero seed at Im = %.3f did not converge", y)
            continue
        if not lo <= z.imag <= hi:
            continue
        if all(abs(z - r) > 1e-6 for r in roots):
            roots.append(z)
    roots.sort(key=lambda r: r.imag)
    return roots
