import numpy as np
import pytest

from defectkit.errors import IndivisibleCellSizeError
from defectkit.features import (
    LBP_OFFSETS,
    LBP_UNIFORM_TABLE,
    hog,
    hpiv,
    lbp,
    lbp_codes,
)


# ---------------------------------------------------------------- hpiv


def test_hpiv_constant_image():
    img = np.full((40, 40), 7, dtype=np.uint8)
    h = hpiv(img)
    assert h.shape == (256,)
    assert h[7] == 1600
    assert h.sum() == 1600
    assert (np.delete(h, 7) == 0).all()


def test_hpiv_counts_and_total():
    img = np.array([[0, 0], [255, 1]], dtype=np.uint8)
    h = hpiv(img)
    assert h[0] == 2 and h[1] == 1 and h[255] == 1
    assert h.sum() == 4


def test_hpiv_random_total_and_length():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    h = hpiv(img)
    assert h.shape == (256,)
    assert h.sum() == 1600


def test_hpiv_shift_moves_support():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 200, size=(16, 16), dtype=np.uint8)
    h0 = hpiv(img)
    h1 = hpiv(img + 50)
    assert np.array_equal(h1[50:250], h0[0:200])


def test_hpiv_permutation_invariant():
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, size=(10, 10), dtype=np.uint8)
    shuffled = rng.permutation(img.ravel()).reshape(10, 10)
    assert np.array_equal(hpiv(img), hpiv(shuffled))


# ----------------------------------------------------------------- hog


def hog_oracle(img, cell):
    """Independent per-pixel reimplementation with explicit loops."""
    src = img.astype(np.float64)
    h, w = src.shape
    ncy, ncx = h // cell, w // cell
    cells = np.zeros((ncy, ncx, 9))
    for y in range(h):
        for x in range(w):
            xm, xp = max(x - 1, 0), min(x + 1, w - 1)
            ym, yp = max(y - 1, 0), min(y + 1, h - 1)
            dx = src[y, xp] - src[y, xm]
            dy = src[yp, x] - src[ym, x]
            mag = np.hypot(dx, dy)
            ang = np.degrees(np.arctan2(dy, dx)) % 180.0
            pos = ang / 20.0
            lo = int(np.floor(pos)) % 9
            frac = pos - np.floor(pos)
            cells[y // cell, x // cell, lo] += mag * (1 - frac)
            cells[y // cell, x // cell, (lo + 1) % 9] += mag * frac
    blocks = []
    for by in range(ncy - 1):
        for bx in range(ncx - 1):
            v = cells[by : by + 2, bx : bx + 2].ravel()
            blocks.append(v / np.sqrt(v @ v + 1e-10))
    return np.concatenate(blocks)


@pytest.mark.parametrize("cell,length", [(8, 576), (10, 324)])
def test_hog_lengths(cell, length):
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    assert hog(img, cell).shape == (length,)


def test_hog_constant_image_zero_vector():
    img = np.full((40, 40), 99, dtype=np.uint8)
    assert np.array_equal(hog(img, 8), np.zeros(576))


def test_hog_gain_invariance():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 120, size=(40, 40), dtype=np.uint8)
    a = hog(img, 8)
    b = hog(2 * img, 8)
    assert np.max(np.abs(a - b)) < 1e-9


def test_hog_matches_loop_oracle():
    rng = np.random.default_rng(5)
    img = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
    got = hog(img, 2)
    want = hog_oracle(img, 2)
    assert np.max(np.abs(got - want)) < 1e-12


def test_hog_block_norm_bounded():
    rng = np.random.default_rng(6)
    img = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    v = hog(img, 8)
    for start in range(0, v.size, 36):
        assert np.linalg.norm(v[start : start + 36]) <= 1 + 1e-9


def test_hog_indivisible_cell():
    img = np.zeros((40, 40), dtype=np.uint8)
    with pytest.raises(IndivisibleCellSizeError):
        hog(img, 7)


# ----------------------------------------------------------------- lbp


def code_oracle(center, neighbors):
    """Bit-loop reference: bit p set iff center > neighbor p."""
    code = 0
    for p in range(8):
        if center > neighbors[p]:
            code |= 1 << p
    return code


def transitions(code):
    return sum(((code >> p) & 1) != ((code >> ((p + 1) % 8)) & 1) for p in range(8))


def test_uniform_partition_sizes():
    uniform = [c for c in range(256) if transitions(c) <= 2]
    assert len(uniform) == 58
    assert 256 - len(uniform) == 198
    # table maps uniform codes to 0..57 ascending and the rest to 58
    assert [LBP_UNIFORM_TABLE[c] for c in uniform] == list(range(58))
    for c in range(256):
        if transitions(c) > 2:
            assert LBP_UNIFORM_TABLE[c] == 58


def test_all_256_sign_patterns_reproduce_codes():
    # Build a 3x3 neighborhood realizing each sign pattern: neighbor below
    # center -> bit set (strict center > neighbor comparison).
    for pattern in range(256):
        img = np.zeros((3, 3), dtype=np.uint8)
        img[1, 1] = 100
        for p, (dr, dc) in enumerate(LBP_OFFSETS):
            img[1 + dr, 1 + dc] = 99 if (pattern >> p) & 1 else 101
        codes = lbp_codes(img)
        neighbors = [int(img[1 + dr, 1 + dc]) for dr, dc in LBP_OFFSETS]
        assert codes[1, 1] == code_oracle(100, neighbors)
        assert codes[1, 1] == pattern


def test_center_above_neighbors_is_all_ones():
    img = np.full((3, 3), 5, dtype=np.uint8)
    img[1, 1] = 10
    codes = lbp_codes(img)
    assert codes[1, 1] == 255
    v = lbp(img, 3)
    # code 255 is the largest uniform code -> bin 57; the 8 border pixels
    # compare against replicate padding and all produce code 0 -> bin 0.
    assert v.shape == (59,)
    assert np.isclose(v[57], 1 / np.sqrt(65))
    assert np.isclose(v[0], 8 / np.sqrt(65))
    assert np.isclose(np.linalg.norm(v), 1.0)


def test_constant_image_all_codes_zero():
    img = np.full((40, 40), 31, dtype=np.uint8)
    assert (lbp_codes(img) == 0).all()
    v = lbp(img, 8)
    cells = v.reshape(25, 59)
    assert (cells[:, 0] == 1.0).all()
    assert np.allclose(cells[:, 1:], 0.0)


@pytest.mark.parametrize("cell,length", [(8, 1475), (16, 236), (32, 59)])
def test_lbp_lengths(cell, length):
    rng = np.random.default_rng(7)
    img = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    assert lbp(img, cell).shape == (length,)


def test_lbp_cell32_uses_top_left_cell():
    rng = np.random.default_rng(8)
    img = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    v = lbp(img, 32)
    # Changing only the ignored 8-pixel margins leaves the descriptor alone.
    altered = img.copy()
    altered[33:, :] = rng.integers(0, 256, size=(7, 40), dtype=np.uint8)
    altered[:, 33:] = rng.integers(0, 256, size=(40, 7), dtype=np.uint8)
    assert np.array_equal(v, lbp(altered, 32))


def test_lbp_monotone_transform_invariance():
    rng = np.random.default_rng(9)
    img = rng.integers(0, 128, size=(16, 16), dtype=np.uint8)
    # strictly increasing lookup 0..127 -> sorted distinct values in 0..255
    lut = np.sort(rng.choice(256, size=128, replace=False)).astype(np.uint8)
    mapped = lut[img]
    assert np.array_equal(lbp_codes(img), lbp_codes(mapped))
    assert np.array_equal(lbp(img, 8), lbp(mapped, 8))


def test_lbp_classic_sign_flag():
    img = np.full((3, 3), 5, dtype=np.uint8)
    img[1, 1] = 10
    # classic: bit set iff neighbor >= center -> all zero here
    assert lbp_codes(img, classic_sign=True)[1, 1] == 0
    flat = np.full((3, 3), 9, dtype=np.uint8)
    assert lbp_codes(flat, classic_sign=True)[1, 1] == 255
    assert lbp_codes(flat)[1, 1] == 0


def test_lbp_cell_too_large():
    img = np.zeros((16, 16), dtype=np.uint8)
    with pytest.raises(IndivisibleCellSizeError):
        lbp(img, 17)
