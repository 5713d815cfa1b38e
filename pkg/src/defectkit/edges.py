"""Edge-detection feature extractors.

Six binary edge-map detectors over 8-bit grayscale patches: prewitt, roberts,
sobel (gradient magnitude thresholding), log (zero crossings), canny and
approxcanny (non-maximum suppression + hysteresis). Each map flattens
row-major into a {0.0, 1.0} feature vector, 1600-long for 40x40 inputs.

Derivative kernels are applied as cross-correlation (no flip), so a vertical
edge that is darker on its right side has direction 0. convolve2d itself is
true convolution (kernel flipped on both axes).
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ImageTooSmallError, InvalidParamsError, KernelTooLargeError
from .image import as_gray

PREWITT_GX = np.array([[1, 0, -1], [1, 0, -1], [1, 0, -1]], dtype=np.float64)
PREWITT_GY = np.array([[1, 1, 1], [0, 0, 0], [-1, -1, -1]], dtype=np.float64)

# Axis-aligned 3x3 difference masks; the second is the first rotated by 90.
ROBERTS_GX = np.array([[0, 0, 0], [-1, 1, 0], [0, 0, 0]], dtype=np.float64)
ROBERTS_GY = np.array([[0, 0, 0], [0, 1, 0], [0, -1, 0]], dtype=np.float64)

# Classical diagonal pair, embedded in odd-sized masks (params.roberts_classic).
ROBERTS_CLASSIC_GX = np.array([[0, 0, 0], [0, 1, 0], [0, 0, -1]], dtype=np.float64)
ROBERTS_CLASSIC_GY = np.array([[0, 0, 0], [0, 0, 1], [0, -1, 0]], dtype=np.float64)

SOBEL_GX = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_GY = np.array([[1, 2, 1], [0, 0, 0], [-1, -2, -1]], dtype=np.float64)

EDGE_METHODS = ("prewitt", "roberts", "sobel", "log", "canny", "approxcanny")

# Largest magnitude a Sobel pair can produce on [0, 255] input; anchors the
# absolute default thresholds of approxcanny.
FULL_SCALE_SOBEL_MAG = math.sqrt(2.0) * 4.0 * 255.0
APPROXCANNY_HIGH_FRACTION = 0.025

_BORDER_PAD = {"replicate": "edge", "zero": "constant"}


class GradientField(NamedTuple):
    magnitude: np.ndarray  # >= 0 everywhere
    direction: np.ndarray  # radians in (-pi, pi]


@dataclass(frozen=True)
class EdgeParams:
    """Tunable constants for detect_edges; defaults follow each method's rule.

    threshold       absolute magnitude cutoff for prewitt/roberts/sobel
                    (default 4 * mean magnitude, per image)
    sigma           Gaussian smoothing width for canny (default sqrt(2))
    log_sigma       LoG kernel width (default 2.0)
    log_threshold   contrast a zero crossing must exceed
                    (default 0.75 * mean |response|, per image)
    low, high       hysteresis thresholds as fractions of the per-image
                    maximum magnitude, in [0, 1] with low < high
    roberts_classic use the diagonal 2x2 roberts pair instead of the
                    axis-aligned masks
    raw_magnitude   edge_features emits pre-threshold response magnitudes
                    instead of binary map bits
    """

    threshold: Optional[float] = None
    sigma: float = math.sqrt(2.0)
    log_sigma: float = 2.0
    log_threshold: Optional[float] = None
    low: Optional[float] = None
    high: Optional[float] = None
    roberts_classic: bool = False
    raw_magnitude: bool = False

    def __post_init__(self):
        if self.sigma <= 0 or self.log_sigma <= 0:
            raise InvalidParamsError("sigma must be positive")
        for name in ("low", "high"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise InvalidParamsError(f"{name} must lie in [0, 1], got {v}")
        if self.low is not None and self.high is not None and self.low >= self.high:
            raise InvalidParamsError(f"low ({self.low}) must be < high ({self.high})")
        if self.threshold is not None and self.threshold < 0:
            raise InvalidParamsError("threshold must be >= 0")
        if self.log_threshold is not None and self.log_threshold < 0:
            raise InvalidParamsError("log_threshold must be >= 0")


def convolve2d(img, kernel, border="replicate"):
    """Same-size true 2D convolution (kernel flipped on both axes).

    border: "replicate" extends edge samples, "zero" pads with zeros.
    The kernel must have odd dimensions and fit inside the image.
    """
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if img.ndim != 2 or kernel.ndim != 2:
        raise ValueError("convolve2d expects 2D arrays")
    kh, kw = kernel.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError(f"kernel dimensions must be odd, got {kh}x{kw}")
    h, w = img.shape
    if kh > h or kw > w:
        raise KernelTooLargeError(f"kernel {kh}x{kw} exceeds image {h}x{w}")
    if border not in _BORDER_PAD:
        raise ValueError(f"border must be one of {sorted(_BORDER_PAD)}")

    ry, rx = kh // 2, kw // 2
    padded = np.pad(img, ((ry, ry), (rx, rx)), mode=_BORDER_PAD[border])
    flipped = kernel[::-1, ::-1]
    out = np.zeros_like(img)
    for i in range(kh):
        for j in range(kw):
            weight = flipped[i, j]
            if weight != 0.0:
                out += weight * padded[i : i + h, j : j + w]
    return out


def correlate2d(img, kernel, border="replicate"):
    """Cross-correlation; convolution with the kernel flipped back."""
    return convolve2d(img, np.asarray(kernel)[::-1, ::-1], border=border)


def _wrap_half_open(theta):
    """Map angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(theta), 2.0 * np.pi)


def _operator_kernels(op, roberts_classic=False):
    if op == "prewitt":
        return PREWITT_GX, PREWITT_GY
    if op == "roberts":
        if roberts_classic:
            return ROBERTS_CLASSIC_GX, ROBERTS_CLASSIC_GY
        return ROBERTS_GX, ROBERTS_GY
    if op == "sobel":
        return SOBEL_GX, SOBEL_GY
    raise ValueError(f"unknown gradient operator {op!r}")


def gradient(img, op, roberts_classic=False):
    """First-order gradient field of a grayscale image.

    Returns GradientField(magnitude, direction) with magnitude
    sqrt(Gx^2 + Gy^2). Direction is atan2(Gy, Gx) in (-pi, pi] for prewitt
    and roberts; the sobel direction carries an extra -3*pi/4 offset.
    """
    img = as_gray(img)
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise ImageTooSmallError(f"gradient needs at least 3x3, got {img.shape}")
    kx, ky = _operator_kernels(op, roberts_classic)
    src = img.astype(np.float64)
    gx = correlate2d(src, kx)
    gy = correlate2d(src, ky)
    mag = np.hypot(gx, gy)
    theta = np.arctan2(gy, gx)
    if op == "sobel":
        theta = theta - 3.0 * np.pi / 4.0
    return GradientField(mag, _wrap_half_open(theta))


def gaussian_kernel1d(sigma):
    """Normalized 1D Gaussian, radius ceil(3*sigma)."""
    r = int(math.ceil(3.0 * sigma))
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img, sigma, border="replicate"):
    """Separable Gaussian smoothing of a 2D float array."""
    k = gaussian_kernel1d(sigma)
    tmp = convolve2d(img, k[None, :], border=border)
    return convolve2d(tmp, k[:, None], border=border)


def _box3(img):
    k = np.full((1, 3), 1.0 / 3.0)
    return convolve2d(convolve2d(img, k), k.T)


def log_kernel(sigma):
    """Laplacian-of-Gaussian kernel, mean-subtracted so the weights sum to 0.

    Side length 2*ceil(3*sigma)+1; entry (x, y) is
    -(1/(pi*sigma^4)) * (1 - (x^2+y^2)/(2*sigma^2)) * exp(-(x^2+y^2)/(2*sigma^2)).
    """
    r = int(math.ceil(3.0 * sigma))
    ax = np.arange(-r, r + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    r2 = xx * xx + yy * yy
    s2 = sigma * sigma
    k = -(1.0 / (np.pi * s2 * s2)) * (1.0 - r2 / (2.0 * s2)) * np.exp(-r2 / (2.0 * s2))
    return k - k.mean()


def _sobel_pair(src):
    """(gx, gy_down): positive gx = brighter right, positive gy_down = brighter below."""
    gx = correlate2d(src, SOBEL_GX)
    gy_down = -correlate2d(src, SOBEL_GY)
    return gx, gy_down


def _nms4(mag, angle_down):
    """Suppress non-maxima along the gradient, quantized to 4 directions.

    angle_down is atan2 in image coordinates (row index increasing downward).
    A pixel survives if its magnitude is >= both neighbors along its
    direction; out-of-bounds neighbors count as 0.
    """
    h, w = mag.shape
    p = np.pad(mag, 1, mode="constant")
    east = p[1 : h + 1, 2:]
    west = p[1 : h + 1, :w]
    south = p[2:, 1 : w + 1]
    north = p[:h, 1 : w + 1]
    se = p[2:, 2:]
    nw = p[:h, :w]
    ne = p[:h, 2:]
    sw = p[2:, :w]

    ori = np.mod(angle_down, np.pi)  # orientation in [0, pi)
    b0 = (ori < np.pi / 8) | (ori >= 7 * np.pi / 8)
    b45 = (ori >= np.pi / 8) & (ori < 3 * np.pi / 8)
    b90 = (ori >= 3 * np.pi / 8) & (ori < 5 * np.pi / 8)
    b135 = (ori >= 5 * np.pi / 8) & (ori < 7 * np.pi / 8)

    keep = np.zeros_like(mag, dtype=bool)
    keep |= b0 & (mag >= east) & (mag >= west)
    keep |= b45 & (mag >= se) & (mag >= nw)
    keep |= b90 & (mag >= north) & (mag >= south)
    keep |= b135 & (mag >= ne) & (mag >= sw)
    return np.where(keep, mag, 0.0)


def _dilate8(mask):
    h, w = mask.shape
    p = np.pad(mask, 1, mode="constant")
    out = np.zeros_like(mask)
    for dy in (0, 1, 2):
        for dx in (0, 1, 2):
            if dy == 1 and dx == 1:
                continue
            out |= p[dy : dy + h, dx : dx + w]
    return out


def _hysteresis(strong, weak, single_pass):
    """Keep strong pixels plus weak pixels connected to them (8-connectivity).

    single_pass only rescues weak pixels directly adjacent to a strong one;
    the full variant propagates through chains of weak pixels.
    """
    result = strong.copy()
    while True:
        grow = _dilate8(result) & weak & ~result
        if not grow.any():
            break
        result |= grow
        if single_pass:
            break
    return result


def _binarize_gradient(img, op, params):
    mag = gradient(img, op, roberts_classic=params.roberts_classic).magnitude
    t = params.threshold if params.threshold is not None else 4.0 * mag.mean()
    return (mag > t).astype(np.uint8), mag


def _detect_log(img, params):
    r = convolve2d(img.astype(np.float64), log_kernel(params.log_sigma))
    if params.log_threshold is not None:
        t = params.log_threshold
    else:
        t = 0.75 * np.abs(r).mean()
    # Zero crossing marked on the non-negative side: pixel >= 0 with a
    # 4-neighbor < 0 and a jump across the crossing exceeding t.
    h, w = r.shape
    p = np.pad(r, 1, mode="edge")
    bits = np.zeros((h, w), dtype=bool)
    for ny, nx in ((0, 1), (2, 1), (1, 0), (1, 2)):
        nb = p[ny : ny + h, nx : nx + w]
        bits |= (r >= 0) & (nb < 0) & ((r - nb) > t)
    return bits.astype(np.uint8), np.abs(r)


def _canny_like(img, params, approx):
    src = img.astype(np.float64)
    smooth = _box3(_box3(src)) if approx else gaussian_blur(src, params.sigma)
    gx, gy_down = _sobel_pair(smooth)
    mag = np.hypot(gx, gy_down)
    nonzero = mag[mag > 0]
    if nonzero.size == 0:
        return np.zeros(img.shape, dtype=np.uint8), mag

    if params.high is not None:
        high = params.high * mag.max()
        low = (params.low if params.low is not None else 0.4 * params.high) * mag.max()
    elif params.low is not None:
        low = params.low * mag.max()
        high = low / 0.4
    elif approx:
        # Fixed absolute default: cheaper than a percentile and deliberately
        # non-adaptive, trading precision on faint detail for speed.
        high = APPROXCANNY_HIGH_FRACTION * FULL_SCALE_SOBEL_MAG
        low = 0.4 * high
    else:
        high = np.percentile(nonzero, 70.0)
        low = 0.4 * high

    suppressed = _nms4(mag, np.arctan2(gy_down, gx))
    strong = suppressed >= high
    weak = (suppressed >= low) & ~strong
    bits = _hysteresis(strong, weak, single_pass=approx)
    return bits.astype(np.uint8), mag


def detect_edges(img, method, params=None):
    """Binary edge map of a grayscale patch.

    method is one of prewitt | roberts | sobel (magnitude thresholding),
    log (zero crossings of the LoG response), canny (Gaussian smoothing,
    Sobel gradient, non-maximum suppression, double threshold, hysteresis)
    or approxcanny (box smoothing, fixed default thresholds, one-pass
    hysteresis). Returns a uint8 array of {0, 1}.
    """
    img = as_gray(img)
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise ImageTooSmallError(f"detect_edges needs at least 3x3, got {img.shape}")
    if params is None:
        params = EdgeParams()
    if method in ("prewitt", "roberts", "sobel"):
        bits, _ = _binarize_gradient(img, method, params)
    elif method == "log":
        bits, _ = _detect_log(img, params)
    elif method in ("canny", "approxcanny"):
        bits, _ = _canny_like(img, params, approx=method == "approxcanny")
    else:
        raise ValueError(f"unknown edge method {method!r}; choose from {EDGE_METHODS}")
    return bits


def edge_features(img, method, params=None):
    """Row-major flattening of the edge map into {0.0, 1.0} features.

    With params.raw_magnitude the pre-threshold response magnitude is
    emitted instead of bits. Length equals width*height (1600 for 40x40).
    """
    img = as_gray(img)
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise ImageTooSmallError(f"edge_features needs at least 3x3, got {img.shape}")
    if params is None:
        params = EdgeParams()
    if not params.raw_magnitude:
        return detect_edges(img, method, params).astype(np.float64).ravel()
    if method in ("prewitt", "roberts", "sobel"):
        _, resp = _binarize_gradient(img, method, params)
    elif method == "log":
        _, resp = _detect_log(img, params)
    elif method in ("canny", "approxcanny"):
        _, resp = _canny_like(img, params, approx=method == "approxcanny")
    else:
        raise ValueError(f"unknown edge method {method!r}; choose from {EDGE_METHODS}")
    return resp.astype(np.float64).ravel()
