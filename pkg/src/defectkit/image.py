"""Grayscale image I/O and geometry.

Images are 2D numpy arrays: uint8 for 8-bit grayscale samples, float64 for
intermediate filter responses. Row-major, origin top-left.
"""

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptDataError, UnsupportedFormatError

# ITU-R BT.601 luma weights for color-to-gray conversion.
LUMA_R, LUMA_G, LUMA_B = 0.299, 0.587, 0.114


def as_gray(img):
    """Validate and return a 2D uint8 grayscale array."""
    a = np.asarray(img)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected non-empty 2D grayscale array, got shape {a.shape}")
    if a.dtype != np.uint8:
        if not (np.issubdtype(a.dtype, np.integer) and a.min() >= 0 and a.max() <= 255):
            raise ValueError("grayscale samples must be integers in [0, 255]")
        a = a.astype(np.uint8)
    return a


def round_half_away(values):
    """Round to nearest integer, halves away from zero (values assumed >= 0)."""
    return np.floor(np.asarray(values) + 0.5)


def rgb_to_gray(rgb):
    """BT.601 luma of an (h, w, 3) uint8 array, rounded to nearest integer."""
    rgb = np.asarray(rgb, dtype=np.float64)
    y = LUMA_R * rgb[..., 0] + LUMA_G * rgb[..., 1] + LUMA_B * rgb[..., 2]
    return round_half_away(y).clip(0, 255).astype(np.uint8)


def _parse_pgm(data, path):
    if len(data) < 2:
        raise CorruptDataError(f"{path}: empty or truncated file")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"{path}: not a P2/P5 PGM file")

    # Header tokens may be interleaved with '#' comments.
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise CorruptDataError(f"{path}: truncated PGM header")
        if data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol < 0:
                raise CorruptDataError(f"{path}: truncated PGM header")
            pos = eol + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise CorruptDataError(f"{path}: malformed PGM header") from exc
    if width < 1 or height < 1:
        raise CorruptDataError(f"{path}: non-positive PGM dimensions")
    if maxval <= 0 or maxval > 255:
        raise UnsupportedFormatError(f"{path}: only 8-bit PGM supported (maxval {maxval})")

    n = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        payload = data[pos : pos + n]
        if len(payload) < n:
            raise CorruptDataError(f"{path}: truncated PGM payload")
        arr = np.frombuffer(payload, dtype=np.uint8, count=n)
    else:
        fields = data[pos:].split()
        if len(fields) < n:
            raise CorruptDataError(f"{path}: truncated PGM payload")
        try:
            arr = np.array([int(f) for f in fields[:n]], dtype=np.int64)
        except ValueError as exc:
            raise CorruptDataError(f"{path}: malformed PGM payload") from exc
        if arr.min() < 0 or arr.max() > maxval:
            raise CorruptDataError(f"{path}: PGM sample out of range")
        arr = arr.astype(np.uint8)
    return arr.reshape(height, width).copy()


def _load_png(path):
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "L":
                return np.asarray(im, dtype=np.uint8).copy()
            if im.mode == "LA":
                return np.asarray(im.convert("LA"))[..., 0].copy()
            if im.mode in ("P", "RGB", "RGBA"):
                rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
                return rgb_to_gray(rgb)
            raise UnsupportedFormatError(f"{path}: unsupported PNG mode {im.mode}")
    except UnidentifiedImageError as exc:
        raise CorruptDataError(f"{path}: unreadable PNG data") from exc


def load_image(path):
    """Load a PGM (P2/P5) or PNG file as a 2D uint8 grayscale array.

    Color inputs are converted with BT.601 luma weights, rounded to the
    nearest integer. Raises FileNotFoundError, UnsupportedFormatError or
    CorruptDataError.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) == 0:
        raise CorruptDataError(f"{path}: empty file")
    if data[:2] in (b"P2", b"P5"):
        return _parse_pgm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise UnsupportedFormatError(f"{path}: unrecognized format (PGM/PNG only)")


def save_pgm(path, img):
    """Write a grayscale array as binary PGM (P5)."""
    img = as_gray(img)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def resize_bilinear(img, out_w, out_h):
    """Resize with bilinear interpolation, sample points at pixel centers.

    Output sample (i, j) reads the source at ((j + 0.5)*w/out_w - 0.5,
    (i + 0.5)*h/out_h - 0.5); interpolated values are rounded half away
    from zero. Resizing to the original size is the identity.
    """
    img = as_gray(img)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"output dimensions must be >= 1, got {out_w}x{out_h}")
    h, w = img.shape
    if (out_h, out_w) == (h, w):
        return img.copy()

    xs = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    ys = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = xs - x0
    fy = ys - y0
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)

    src = img.astype(np.float64)
    top = src[y0c][:, x0c] * (1 - fx) + src[y0c][:, x1c] * fx
    bot = src[y1c][:, x0c] * (1 - fx) + src[y1c][:, x1c] * fx
    out = top * (1 - fy)[:, None] + bot * fy[:, None]
    return round_half_away(out).clip(0, 255).astype(np.uint8)
