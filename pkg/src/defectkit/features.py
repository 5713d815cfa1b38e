"""Statistical texture descriptors: intensity histogram, HOG, uniform LBP.

Fixed lengths for 40x40 inputs: hpiv 256, hog cell 8 -> 576, cell 10 -> 324,
lbp cell 8 -> 1475, cell 16 -> 236, cell 32 -> 59.
"""

import numpy as np

from .errors import IndivisibleCellSizeError
from .image import as_gray

HOG_BINS = 9
HOG_BIN_WIDTH = 180.0 / HOG_BINS  # unsigned orientation, centers at 0,20,...,160
HOG_EPS = 1e-5

LBP_BINS = 59  # 58 uniform patterns + 1 catch-all

# Neighbor p sits at angle 45*p degrees counter-clockwise from east with the
# y axis pointing up, starting at the right neighbor: (row offset, col offset).
LBP_OFFSETS = (
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
)


def hpiv(img):
    """256-bin intensity histogram, raw counts: bin i = #pixels of value i."""
    img = as_gray(img)
    return np.bincount(img.ravel(), minlength=256).astype(np.float64)


def _hog_cell_histograms(img, cell):
    h, w = img.shape
    ncy, ncx = h // cell, w // cell
    src = img.astype(np.float64)

    # [-1 0 1] horizontal kernel and its transpose, replicate border.
    padx = np.pad(src, ((0, 0), (1, 1)), mode="edge")
    pady = np.pad(src, ((1, 1), (0, 0)), mode="edge")
    dx = padx[:, 2:] - padx[:, :-2]
    dy = pady[2:, :] - pady[:-2, :]

    mag = np.hypot(dx, dy)
    ang = np.degrees(np.arctan2(dy, dx)) % 180.0  # unsigned, [0, 180)

    # Split each magnitude between the two nearest bin centers by angle.
    pos = ang / HOG_BIN_WIDTH
    lo = np.floor(pos).astype(np.int64)
    frac = pos - lo
    lo %= HOG_BINS
    hi = (lo + 1) % HOG_BINS

    cy = np.arange(h) // cell
    cx = np.arange(w) // cell
    cell_idx = cy[:, None] * ncx + cx[None, :]
    hists = np.zeros((ncy * ncx, HOG_BINS))
    np.add.at(hists, (cell_idx.ravel(), lo.ravel()), (mag * (1.0 - frac)).ravel())
    np.add.at(hists, (cell_idx.ravel(), hi.ravel()), (mag * frac).ravel())
    return hists.reshape(ncy, ncx, HOG_BINS)


def hog(img, cell):
    """Histogram-of-oriented-gradients descriptor.

    9 orientation bins per cell; 2x2-cell blocks with stride one cell, each
    block L2-normalized (eps added in quadrature); blocks concatenated
    row-major, cells within a block row-major, bins ascending. Image
    dimensions must be divisible by the cell size.
    """
    img = as_gray(img)
    h, w = img.shape
    if h % cell or w % cell:
        raise IndivisibleCellSizeError(f"cell {cell} does not divide image {h}x{w}")
    cells = _hog_cell_histograms(img, cell)
    ncy, ncx = cells.shape[:2]
    if ncy < 2 or ncx < 2:
        raise IndivisibleCellSizeError(f"need a grid of at least 2x2 cells, got {ncy}x{ncx}")

    blocks = []
    for by in range(ncy - 1):
        for bx in range(ncx - 1):
            v = cells[by : by + 2, bx : bx + 2].ravel()
            blocks.append(v / np.sqrt(np.dot(v, v) + HOG_EPS * HOG_EPS))
    return np.concatenate(blocks)


def _uniform_table():
    """Map 8-bit codes to bins: uniform codes (<= 2 circular 0/1 transitions)
    in ascending order take bins 0..57, everything else bin 58."""
    table = np.full(256, LBP_BINS - 1, dtype=np.int64)
    nxt = 0
    for code in range(256):
        transitions = sum(
            ((code >> p) & 1) != ((code >> ((p + 1) % 8)) & 1) for p in range(8)
        )
        if transitions <= 2:
            table[code] = nxt
            nxt += 1
    assert nxt == 58
    return table


LBP_UNIFORM_TABLE = _uniform_table()


def lbp_codes(img, classic_sign=False):
    """Per-pixel 8-neighbor codes, replicate border so every pixel has one.

    Bit p (weight 2^p) compares the center against neighbor p: by default it
    is set when center > neighbor (strict); classic_sign sets it when
    neighbor >= center instead.
    """
    img = as_gray(img)
    src = img.astype(np.int16)
    h, w = src.shape
    p = np.pad(src, 1, mode="edge")
    codes = np.zeros((h, w), dtype=np.int64)
    for bit, (dr, dc) in enumerate(LBP_OFFSETS):
        nb = p[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        if classic_sign:
            on = nb >= src
        else:
            on = src > nb
        codes |= on.astype(np.int64) << bit
    return codes


def lbp(img, cell, classic_sign=False):
    """Uniform LBP descriptor: concatenated per-cell 59-bin histograms.

    The cell grid keeps only complete cells anchored top-left
    (floor(dim/cell) per axis, trailing margins ignored); each cell
    histogram is L2-normalized and cells concatenate row-major.
    """
    img = as_gray(img)
    h, w = img.shape
    ncy, ncx = h // cell, w // cell
    if ncy < 1 or ncx < 1:
        raise IndivisibleCellSizeError(f"cell {cell} exceeds image {h}x{w}")
    bins = LBP_UNIFORM_TABLE[lbp_codes(img, classic_sign=classic_sign)]
    region = bins[: ncy * cell, : ncx * cell]

    out = np.empty((ncy * ncx, LBP_BINS))
    tiles = region.reshape(ncy, cell, ncx, cell).transpose(0, 2, 1, 3)
    for idx, tile in enumerate(tiles.reshape(ncy * ncx, cell * cell)):
        hist = np.bincount(tile, minlength=LBP_BINS).astype(np.float64)
        out[idx] = hist / np.linalg.norm(hist)
    return out.ravel()
