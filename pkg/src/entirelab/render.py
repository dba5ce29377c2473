"""Deterministic rasterization of per-pixel orbit classifications."""

import colorsys
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .catalog import EntireMap

CONVERGENCE_TOL = 1e-6
ESCAPE_RE = 50.0
DEFAULT_BUDGET = 500
DEFAULT_VIEWPORT = (-3.0 - 13.0j, 9.0 + 13.0j)

# fixed task granularity; workers only change scheduling, never the
# per-block computation, so output bytes are identical for any count
_BLOCK_ROWS = 32

TWO_PI = 2.0 * math.pi


class Classifier(Enum):
    ESCAPE_RIGHT = "EscapeRight"
    FIXED_POINT_BASINS = "FixedPointBasins"
    DRIFT_COMPENSATED_BASINS = "DriftCompensatedBasins"


@dataclass(frozen=True)
class RasterConfig:
    map: EntireMap
    classifier: Classifier
    viewport: tuple = DEFAULT_VIEWPORT
    width: int = 800
    height: int = 800
    budget: int = DEFAULT_BUDGET
    convergence_tol: float = CONVERGENCE_TOL
    escape_re: float = ESCAPE_RE

    def __post_init__(self):
        lo, hi = complex(self.viewport[0]), complex(self.viewport[1])
        if not (lo.real < hi.real and lo.imag < hi.imag):
            raise ValueError(f"degenerate viewport {self.viewport}")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        if self.width * self.height > 10 ** 8:
            raise ValueError("image exceeds the 1e8 pixel bound")
        if self.budget < 1:
            raise ValueError("budget must be positive")


@dataclass(frozen=True, eq=False)
class Image:
    """Row-major class indices; row 0 is the top of the viewport.

    Class 0 marks unresolved pixels (the chaotic-locus approximation),
    classes >= 1 are resolved Fatou classes.
    """

    width: int
    height: int
    pixels: np.ndarray
    map_id: str
    viewport: tuple
    budget: int
    classifier: str

    def class0_mask(self) -> np.ndarray:
        return self.pixels == 0

    def sidecar(self) -> dict:
        lo, hi = self.viewport
        return {
            "map": self.map_id,
            "viewport": [lo.real, lo.imag, hi.real, hi.imag],
            "size": [self.width, self.height],
            "budget": self.budget,
            "classifier": self.classifier,
        }


def basin_class(n: int) -> int:
    """Zigzag index of the lattice point 2 pi i n: 0,1,-1,2,-2 -> 1..5."""
    return 2 * n if n > 0 else 2 * (-n) + 1


def _classify_flat(config: RasterConfig, z0: np.ndarray) -> np.ndarray:
    """Vector classification core shared by classify_pixel and renders."""
    m = config.map
    # int64: deep-left excursions can converge to lattice indices in the
    # tens of thousands, far past narrow unsigned dtypes
    cls = np.zeros(z0.shape, dtype=np.int64)
    active = np.ones(z0.shape, dtype=bool)
    z = z0.astype(np.complex128, copy=True)

    if config.classifier is Classifier.ESCAPE_RIGHT:
        for _ in range(config.budget):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            val, ok, posdom = m.eval_array(z[idx])
            fatou = (ok & (val.real > config.escape_re)) | (~ok & posdom)
            cls[idx[fatou]] = 1
            stop = fatou | ~ok
            active[idx[stop]] = False
            cont = ~stop
            z[idx[cont]] = val[cont]
        return cls

    drift = (m.drift_per_iterate
             if config.classifier is Classifier.DRIFT_COMPENSATED_BASINS
             else 0j)
    for _ in range(config.budget):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        val, ok, _ = m.eval_array(z[idx])
        w = val - drift
        conv = ok & (np.abs(w - z[idx]) <= config.convergence_tol)
        if conv.any():
            n = np.rint(w[conv].imag / TWO_PI).astype(np.int64)
            cls[idx[conv]] = np.where(n > 0, 2 * n, 2 * (-n) + 1)
        stop = conv | ~ok | (ok & (w.real > config.escape_re))
        active[idx[stop]] = False
        cont = ~stop
        z[idx[cont]] = w[cont]
    return cls


def classify_pixel(config: RasterConfig, z: complex) -> int:
    return int(_classify_flat(config, np.array([complex(z)]))[0])


def render_raster(config: RasterConfig, workers: int = 1) -> Image:
    """Classify every pixel center; byte-identical for any worker count."""
    lo, hi = complex(config.viewport[0]), complex(config.viewport[1])
    dx = (hi.real - lo.real) / config.width
    dy = (hi.imag - lo.imag) / config.height
    xs = lo.real + (np.arange(config.width) + 0.5) * dx
    ys = hi.imag - (np.arange(config.height) + 0.5) * dy
    out = np.zeros((config.height, config.width), dtype=np.int64)

    def work(rows):
        r0, r1 = rows
        zz = xs[None, :] + 1j * ys[r0:r1, None]
        block = _classify_flat(config, zz.ravel())
        out[r0:r1] = block.reshape(r1 - r0, config.width)

    blocks = [(r0, min(r0 + _BLOCK_ROWS, config.height))
              for r0 in range(0, config.height, _BLOCK_ROWS)]
    if workers <= 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, blocks))
    return Image(config.width, config.height, out, config.map.map_id(),
                 (lo, hi), config.budget, config.classifier.value)


# ---- export --------------------------------------------------------------


def _gray_payload(pixels: np.ndarray) -> np.ndarray:
    # class 0 -> 255; resolved classes get fixed distinct gray levels
    k = pixels.astype(np.int64)
    gray = 20 + ((k - 1) * 40) % 220
    return np.where(k == 0, 255, gray).astype(np.uint8)


def _palette() -> list:
    flat = [0, 0, 0]
    for k in range(1, 256):
        r, g, b = colorsys.hsv_to_rgb((k * 0.61803398875) % 1.0, 0.55, 0.95)
        flat += [int(255 * r), int(255 * g), int(255 * b)]
    return flat


def write_image(image: Image, path, fmt: str = "pgm") -> None:
    """Write the image plus a JSON sidecar describing its configuration."""
    fmt = fmt.lower()
    if fmt == "pgm":
        payload = _gray_payload(image.pixels)
        with open(path, "wb") as fh:
            fh.write(f"P5\n{image.width} {image.height}\n255\n".encode())
            fh.write(payload.tobytes())
    elif fmt == "png":
        from PIL import Image as PILImage

        indices = np.minimum(image.pixels, 255).astype(np.uint8)
        img = PILImage.fromarray(indices, mode="P")
        img.putpalette(_palette())
        img.save(path, format="PNG")
    else:
        raise ValueError(f"unknown image format {fmt!r}")
    with open(f"{path}.json", "w") as fh:
        json.dump(image.sidecar(), fh, sort_keys=True)
        fh.write("\n")
