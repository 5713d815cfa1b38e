import io

import numpy as np
import pytest
from PIL import Image

from defectkit.errors import CorruptDataError, UnsupportedFormatError
from defectkit.image import load_image, resize_bilinear, rgb_to_gray, save_pgm


def write_p5(path, arr):
    save_pgm(path, np.asarray(arr, dtype=np.uint8))


def test_p5_roundtrip(tmp_path):
    img = np.array([[0, 255], [128, 64]], dtype=np.uint8)
    path = tmp_path / "a.pgm"
    write_p5(path, img)
    loaded = load_image(path)
    assert loaded.dtype == np.uint8
    assert np.array_equal(loaded, img)


def test_p2_with_comments(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P2\n# comment line\n2 2\n255\n0 255\n128 64\n")
    assert np.array_equal(load_image(path), [[0, 255], [128, 64]])


def test_red_pixel_png_luma(tmp_path):
    # round(0.299 * 255) = 76
    path = tmp_path / "red.png"
    Image.fromarray(np.full((1, 1, 3), (255, 0, 0), dtype=np.uint8)).save(path)
    assert load_image(path)[0, 0] == 76


def test_rgb_to_gray_weights():
    px = np.array([[[10, 20, 30]]], dtype=np.uint8)
    # 0.299*10 + 0.587*20 + 0.114*30 = 18.15 -> 18
    assert rgb_to_gray(px)[0, 0] == 18


def test_gray_png_passthrough(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(9, 7), dtype=np.uint8)
    path = tmp_path / "g.png"
    Image.fromarray(img, mode="L").save(path)
    assert np.array_equal(load_image(path), img)


def test_empty_file_is_corrupt(tmp_path):
    path = tmp_path / "empty.pgm"
    path.write_bytes(b"")
    with pytest.raises(CorruptDataError):
        load_image(path)


def test_truncated_p5_payload(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(CorruptDataError):
        load_image(path)


def test_unknown_magic(tmp_path):
    path = tmp_path / "x.bin"
    path.write_bytes(b"GIF89a whatever")
    with pytest.raises(UnsupportedFormatError):
        load_image(path)


def test_sixteen_bit_pgm_rejected(tmp_path):
    path = tmp_path / "deep.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(UnsupportedFormatError):
        load_image(path)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_image("/nonexistent/nope.pgm")


def test_resize_identity_bit_exact():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    out = resize_bilinear(img, 40, 40)
    assert np.array_equal(out, img)


@pytest.mark.parametrize("shape", [(3, 5), (40, 40), (7, 2)])
@pytest.mark.parametrize("target", [(4, 4), (11, 3), (40, 40)])
def test_resize_constant_stays_constant(shape, target):
    img = np.full(shape, 77, dtype=np.uint8)
    out = resize_bilinear(img, *target)
    assert out.shape == (target[1], target[0])
    assert (out == 77).all()


def test_resize_2x1_hand_oracle():
    # Sample centers at x = -0.25, 0.25, 0.75, 1.25 over sources [0, 255]:
    # clamp, then 0, 0.25*255=63.75->64, 0.75*255=191.25->191, 255.
    img = np.array([[0, 255]], dtype=np.uint8)
    out = resize_bilinear(img, 4, 1)
    assert out.tolist() == [[0, 64, 191, 255]]


def test_resize_roundtrip_constant_exact():
    img = np.full((10, 10), 201, dtype=np.uint8)
    up = resize_bilinear(img, 20, 20)
    down = resize_bilinear(up, 10, 10)
    assert np.array_equal(down, img)


def test_resize_rejects_zero_dims():
    img = np.zeros((4, 4), dtype=np.uint8)
    with pytest.raises(ValueError):
        resize_bilinear(img, 0, 4)


def test_resize_range_preserved():
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, size=(13, 17), dtype=np.uint8)
    out = resize_bilinear(img, 40, 40)
    assert out.min() >= 0 and out.max() <= 255
    assert out.min() >= img.min() and out.max() <= img.max()
