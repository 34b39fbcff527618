import numpy as np
import pytest

from dehaze.image import (
    DegenerateImageError,
    ImageFormatError,
    load_image,
    load_map,
    quantize,
    save_image,
    save_map,
    to_gray,
    white_balance,
)


def write_ppm(path, pixels, maxval=255):
    h, w, _ = pixels.shape
    header = f"P6\n{w} {h}\n{maxval}\n".encode()
    dtype = ">u2" if maxval > 255 else np.uint8
    path.write_bytes(header + np.asarray(pixels, dtype=dtype).tobytes())


def test_load_ppm_extremes(tmp_path):
    p = tmp_path / "a.ppm"
    write_ppm(p, np.array([[[255, 255, 255], [0, 0, 0]]]))
    img = load_image(p)
    assert img.shape == (1, 2, 3)
    np.testing.assert_array_equal(img, [[[1, 1, 1], [0, 0, 0]]])


def test_load_ppm_16bit(tmp_path):
    p = tmp_path / "b.ppm"
    write_ppm(p, np.array([[[65535, 32768, 0]]]), maxval=65535)
    np.testing.assert_allclose(load_image(p), [[[1.0, 32768 / 65535, 0.0]]])


def test_load_png_mid_gray(tmp_path):
    p = tmp_path / "g.png"
    save_image(np.full((5, 7, 3), 128 / 255), p)
    img = load_image(p)
    assert img.shape == (5, 7, 3)
    np.testing.assert_allclose(img, 128 / 255)
    assert abs(img[0, 0, 0] - 0.50196) < 1e-5


def test_load_16bit_png_keeps_precision(tmp_path):
    import cv2

    raw = np.array([[[1000, 30000, 65535]]], dtype=np.uint16)
    p = tmp_path / "d.png"
    cv2.imwrite(str(p), raw[..., ::-1])
    np.testing.assert_allclose(load_image(p), raw / 65535.0)


def test_truncated_png_is_io_error(tmp_path):
    p = tmp_path / "t.png"
    save_image(np.random.default_rng(0).uniform(size=(32, 32, 3)), p)
    data = p.read_bytes()
    p.write_bytes(data[: len(data) // 2])
    with pytest.raises(OSError):
        load_image(p)


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(OSError):
        load_image(tmp_path / "nope.png")


def test_unsupported_format_names_it(tmp_path):
    p = tmp_path / "x.jpg"
    p.write_bytes(b"\xff\xd8\xff\xe0" + b"\0" * 32)
    with pytest.raises(ImageFormatError, match="JPEG"):
        load_image(p)


def test_save_load_roundtrip_within_quantum(tmp_path, rng):
    img = rng.uniform(size=(17, 23, 3))
    p = tmp_path / "r.png"
    save_image(img, p)
    assert np.abs(load_image(p) - img).max() <= 1 / 255


def test_save_zeros_is_black(tmp_path):
    p = tmp_path / "z.png"
    save_image(np.zeros((4, 4, 3)), p)
    assert np.all(load_image(p) == 0)


def test_save_to_directory_fails(tmp_path):
    with pytest.raises(OSError):
        save_image(np.zeros((2, 2, 3)), tmp_path)


def test_save_load_save_is_byte_identical(tmp_path, rng):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    save_image(rng.uniform(size=(9, 11, 3)), a)
    save_image(load_image(a), b)
    assert a.read_bytes() == b.read_bytes()


def test_quantize_rounds_half_up():
    np.testing.assert_array_equal(quantize(np.array([0.5 / 255, 1.5 / 255, 1.0, 0.0])), [1, 2, 255, 0])


def test_save_map_roundtrip(tmp_path):
    p = tmp_path / "m.png"
    m = np.linspace(0, 1, 12).reshape(3, 4)
    save_map(m, p)
    assert np.abs(load_map(p) - m).max() <= 0.5 / 255 + 1e-12


def test_load_map_npy_exact(tmp_path):
    m = np.random.default_rng(2).uniform(size=(3, 5))
    np.save(tmp_path / "t.npy", m)
    np.testing.assert_array_equal(load_map(tmp_path / "t.npy"), m)


@pytest.mark.parametrize(
    "rgb, expected",
    [((1, 1, 1), 1.0), ((1, 0, 0), 0.299), ((0.5, 0.5, 0.5), 0.5)],
)
def test_to_gray(rgb, expected):
    img = np.broadcast_to(np.array(rgb, dtype=float), (3, 4, 3))
    np.testing.assert_allclose(to_gray(img), expected, atol=1e-12)


def test_white_balance_gray_is_identity(rng):
    v = rng.uniform(0.1, 0.9, (8, 8, 1))
    img = np.repeat(v, 3, axis=2)
    np.testing.assert_allclose(white_balance(img), img, atol=1e-9)


def test_white_balance_constant():
    img = np.broadcast_to([0.2, 0.4, 0.6], (4, 4, 3))
    np.testing.assert_allclose(white_balance(img), 0.4, atol=1e-12)


def test_white_balance_black_raises():
    with pytest.raises(DegenerateImageError):
        white_balance(np.zeros((3, 3, 3)))


def test_white_balance_equalizes_means_and_is_idempotent(rng):
    img = rng.uniform(0.1, 0.5, (16, 16, 3)) * [1.0, 0.8, 0.6]
    once = white_balance(img)
    means = once.reshape(-1, 3).mean(axis=0)
    assert np.ptp(means) < 1e-6
    np.testing.assert_allclose(white_balance(once), once, atol=1e-6)


def test_operations_preserve_shape(rng):
    img = rng.uniform(size=(7, 5, 3))
    assert white_balance(img).shape == img.shape
    assert to_gray(img).shape == (7, 5)
