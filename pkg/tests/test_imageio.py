import numpy as np
import pytest
from PIL import Image

from hiercrypt.errors import ImageFormatError
from hiercrypt.imageio import read_image, read_pgm, write_image, write_mask, write_pgm


@pytest.fixture
def img():
    return np.random.default_rng(3).integers(0, 256, (13, 17)).astype(np.uint8)


@pytest.mark.parametrize("ext", [".pgm", ".png"])
def test_round_trip(tmp_path, img, ext):
    path = tmp_path / f"x{ext}"
    write_image(path, img)
    assert np.array_equal(read_image(path), img)


def test_pgm_layout(tmp_path, img):
    path = tmp_path / "x.pgm"
    write_pgm(path, img)
    data = path.read_bytes()
    assert data.startswith(b"P5\n17 13\n255\n")
    assert data[len(b"P5\n17 13\n255\n") :] == img.tobytes()


def test_pgm_with_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n3 2\n# depth\n255\n" + bytes(range(6)))
    assert read_pgm(path).tolist() == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize(
    "payload",
    [b"P2\n2 2\n255\n0 0 0 0", b"P5\n2 2\n65535\n" + bytes(8), b"P5\n2 2\n255\n\x00\x00", b"P5\n2"],
)
def test_bad_pgm(tmp_path, payload):
    path = tmp_path / "bad.pgm"
    path.write_bytes(payload)
    with pytest.raises(ImageFormatError):
        read_pgm(path)


def test_color_png_rejected(tmp_path):
    path = tmp_path / "rgb.png"
    Image.new("RGB", (4, 4)).save(path)
    with pytest.raises(ImageFormatError):
        read_image(path)


def test_unknown_extension(tmp_path, img):
    with pytest.raises(ImageFormatError):
        write_image(tmp_path / "x.bmp", img)


def test_mask_export(tmp_path):
    mask = np.array([[True, False], [False, True]])
    write_mask(tmp_path / "m.pgm", mask)
    assert read_image(tmp_path / "m.pgm").tolist() == [[255, 0], [0, 255]]
