"""Synthetic leather-like patch generator and manifest handling.

Produces 400x400 grayscale patches: a smooth grainy background, and for
defective patches 1-3 soft elliptical dark blobs whose bounding-box extents
follow the calibrated five-number summaries in DEFAULT_STATS. Generation is
a pure function of (seed, parameters).
"""

import csv
import math
import os
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np

from .edges import gaussian_blur
from .errors import BadLabelError, DefectTooLargeError
from .image import round_half_away, save_pgm

MM_PER_PIXEL = 0.0375


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def __post_init__(self):
        vals = (self.min, self.q1, self.median, self.q3, self.max)
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"quartile summary must be non-decreasing, got {vals}")


@dataclass(frozen=True)
class DefectStats:
    """Defect bounding-box statistics: x/y extents in pixels, area in px^2."""

    x: FiveNumber
    y: FiveNumber
    area: FiveNumber
    x_mean: float = 21.56
    x_std: float = 8.22
    y_mean: float = 20.86
    y_std: float = 7.58
    area_mean: float = 480.44
    area_std: float = 347.29


DEFAULT_STATS = DefectStats(
    x=FiveNumber(6, 16, 20, 26, 65),
    y=FiveNumber(5, 16, 20, 25, 71),
    area=FiveNumber(30, 272, 396, 575, 3195),
)

# Background texture: value-noise octaves (lattice spacing in pixels,
# relative amplitude), then Gaussian smoothing, normalized to the target
# mean/std. Most variance sits in the coarse octaves so the shading stays
# smooth; the fine octave adds low-amplitude grain.
BACKGROUND_MEAN = 140.0
BACKGROUND_STD = 12.0
BACKGROUND_BLUR_RADIUS = 1.5
NOISE_OCTAVES = ((200, 1.0), (100, 0.4), (25, 0.05))

DIP_RANGE = (30.0, 60.0)
BLOB_RIM = 0.35  # fraction of the radius over which the dip fades out
LATENT_WEIGHT = 0.7  # shared size factor coupling x and y extents


def area_mm2(area_px):
    """Convert a pixel-count area to mm^2 at the fixed capture resolution."""
    if area_px < 0:
        raise ValueError("area must be >= 0")
    return float(area_px) * MM_PER_PIXEL * MM_PER_PIXEL


def _piecewise_uniform(u, summary):
    """Inverse CDF putting exactly a quarter of the mass between breakpoints."""
    br = (summary.min, summary.q1, summary.median, summary.q3, summary.max)
    t = np.clip(u, 0.0, np.nextafter(1.0, 0.0)) * 4.0
    seg = np.minimum(t.astype(np.int64), 3)
    frac = t - seg
    lo = np.array(br[:4])[seg]
    hi = np.array(br[1:])[seg]
    return lo + frac * (hi - lo)


def _norm_cdf(z):
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def sample_extents(rng, stats=DEFAULT_STATS):
    """Draw one (x_extent, y_extent) pair.

    Marginals are piecewise-uniform across the five-number summaries; a
    Gaussian copula with a shared latent factor correlates the two axes
    without disturbing the marginals. Pairs whose bounding-box area exceeds
    the documented maximum are redrawn.
    """
    w = LATENT_WEIGHT
    resid = math.sqrt(1.0 - w * w)
    while True:
        z = rng.standard_normal()
        zx = w * z + resid * rng.standard_normal()
        zy = w * z + resid * rng.standard_normal()
        x = float(_piecewise_uniform(np.array(_norm_cdf(zx)), stats.x))
        y = float(_piecewise_uniform(np.array(_norm_cdf(zy)), stats.y))
        if x * y <= stats.area.max:
            return x, y


def _value_noise(rng, size, spacing):
    """Bilinear interpolation of unit-normal lattice values."""
    nodes = int(math.ceil(size / spacing)) + 2
    grid = rng.standard_normal((nodes, nodes))
    pos = np.arange(size) / spacing
    i0 = np.floor(pos).astype(np.int64)
    f = pos - i0
    g00 = grid[np.ix_(i0, i0)]
    g01 = grid[np.ix_(i0, i0 + 1)]
    g10 = grid[np.ix_(i0 + 1, i0)]
    g11 = grid[np.ix_(i0 + 1, i0 + 1)]
    fx = f[None, :]
    fy = f[:, None]
    return (
        g00 * (1 - fy) * (1 - fx)
        + g01 * (1 - fy) * fx
        + g10 * fy * (1 - fx)
        + g11 * fy * fx
    )


def _background(rng, size):
    field = np.zeros((size, size))
    for spacing, amplitude in NOISE_OCTAVES:
        field += amplitude * _value_noise(rng, size, spacing)
    field = gaussian_blur(field, BACKGROUND_BLUR_RADIUS)
    std = field.std()
    if std > 0:
        field = (field - field.mean()) / std
    return BACKGROUND_MEAN + BACKGROUND_STD * field


def gen_patch(rng, defect, stats=DEFAULT_STATS, size=400):
    """Generate one patch; returns (uint8 image, label).

    Defective patches carry 1-3 soft-edged elliptical dips of 30-60
    intensity levels placed uniformly inside the patch.
    """
    if size < stats.x.max or size < stats.y.max:
        raise DefectTooLargeError(
            f"patch size {size} cannot hold extents up to {stats.x.max}x{stats.y.max}"
        )
    field = _background(rng, size)
    if defect:
        for _ in range(int(rng.integers(1, 4))):
            x_ext, y_ext = sample_extents(rng, stats)
            a, b = x_ext / 2.0, y_ext / 2.0
            cx = rng.uniform(a, size - a)
            cy = rng.uniform(b, size - b)
            dip = rng.uniform(*DIP_RANGE)
            y0 = max(int(math.floor(cy - b)), 0)
            y1 = min(int(math.ceil(cy + b)) + 1, size)
            x0 = max(int(math.floor(cx - a)), 0)
            x1 = min(int(math.ceil(cx + a)) + 1, size)
            yy, xx = np.mgrid[y0:y1, x0:x1]
            r = np.sqrt(((xx - cx) / a) ** 2 + ((yy - cy) / b) ** 2)
            # flat dark core with a smoothstep rim fading to 0 at the boundary
            t = np.clip((1.0 - r) / BLOB_RIM, 0.0, 1.0)
            field[y0:y1, x0:x1] -= dip * t * t * (3.0 - 2.0 * t)
    img = round_half_away(field).clip(0, 255).astype(np.uint8)
    return img, int(bool(defect))


def _patch_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(index))))


def gen_dataset(seed, n, defect_fraction, out_dir, stats=DEFAULT_STATS, size=400):
    """Write n patches plus a manifest CSV; returns the manifest path.

    Exactly round(n * defect_fraction) patches are defective; which indices
    they land on is a seeded shuffle. Each patch derives its own generator
    from (seed, index), so regeneration with the same seed is bit-identical.
    """
    if n < 2:
        raise ValueError("need at least 2 patches")
    if not 0.0 < defect_fraction < 1.0:
        raise ValueError("defect_fraction must lie strictly between 0 and 1")
    os.makedirs(out_dir, exist_ok=True)
    n_defect = round(n * defect_fraction)
    order = np.random.default_rng(np.random.SeedSequence((int(seed), 0xD15C)))
    flags = np.zeros(n, dtype=bool)
    flags[order.permutation(n)[:n_defect]] = True

    width = max(5, len(str(n - 1)))
    rows = []
    for i in range(n):
        img, label = gen_patch(_patch_rng(seed, i), bool(flags[i]), stats=stats, size=size)
        name = f"patch_{i:0{width}d}.pgm"
        save_pgm(os.path.join(out_dir, name), img)
        rows.append((name, label))

    manifest = os.path.join(out_dir, "manifest.csv")
    lines = ["path,label"] + [f"{name},{label}" for name, label in rows]
    from .featureio import atomic_write_text

    atomic_write_text(manifest, "\n".join(lines) + "\n")
    return manifest


def load_manifest(path) -> Tuple[List[str], np.ndarray]:
    """Read a manifest CSV; returns (absolute image paths, labels).

    Every referenced file must exist and labels must be 0 or 1.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    base = os.path.dirname(os.path.abspath(path))
    paths, labels = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["path", "label"]:
            raise BadLabelError(f"{path}: expected header 'path,label'")
        for rec in reader:
            if not rec:
                continue
            rel, raw = rec[0], rec[1]
            if raw not in ("0", "1"):
                raise BadLabelError(f"{path}: label {raw!r} for {rel} (must be 0 or 1)")
            full = rel if os.path.isabs(rel) else os.path.join(base, rel)
            if not os.path.isfile(full):
                raise FileNotFoundError(full)
            paths.append(full)
            labels.append(int(raw))
    return paths, np.array(labels, dtype=np.int64)


def load_stats(path, base=DEFAULT_STATS):
    """Key-value overrides for the extent statistics.

    Lines look like "x.q1 = 16" with axes x|y|area and fields
    min|q1|median|q3|max; '#' starts a comment.
    """
    fields = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            fields[key] = float(value)

    def rebuild(axis, summary):
        kwargs = {}
        for name in ("min", "q1", "median", "q3", "max"):
            k = f"{axis}.{name}"
            if k in fields:
                kwargs[name] = fields.pop(k)
        return replace(summary, **kwargs) if kwargs else summary

    stats = DefectStats(
        x=rebuild("x", base.x),
        y=rebuild("y", base.y),
        area=rebuild("area", base.area),
    )
    if fields:
        raise ValueError(f"{path}: unknown keys {sorted(fields)}")
    return stats
