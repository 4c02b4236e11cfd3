"""8-bit grayscale image files: binary PGM (P5) and PNG."""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np

from .errors import ImageFormatError
from .partition import as_image

_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise ImageFormatError(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise ImageFormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: empty image {width}x{height}")
    if not 0 < maxval < 256:
        raise ImageFormatError(f"{path}: only 8-bit PGM is supported (maxval {maxval})")
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ImageFormatError(f"{path}: expected {width * height} pixel bytes, found {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, img) -> None:
    img = as_image(img)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(img).tobytes())


def read_png(path) -> np.ndarray:
    from PIL import Image

    try:
        with Image.open(path) as im:
            if im.mode != "L":
                raise ImageFormatError(f"{path}: PNG must be 8-bit grayscale, got mode {im.mode}")
            return np.array(im, dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise ImageFormatError(f"{path}: cannot read PNG ({exc})") from None


def write_png(path, img) -> None:
    from PIL import Image

    Image.fromarray(as_image(img), mode="L").save(path, format="PNG")


def _kind(path) -> str:
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".pgm", ".pnm"):
        return "pgm"
    if ext == ".png":
        return "png"
    raise ImageFormatError(f"{path}: unsupported image extension {ext!r} (use .pgm or .png)")


def read_image(path) -> np.ndarray:
    """Read a grayscale image, dispatching on the file extension."""
    if _kind(path) == "pgm":
        return read_pgm(path)
    return read_png(path)


def write_image(path, img) -> None:
    if _kind(path) == "pgm":
        write_pgm(path, img)
    else:
        write_png(path, img)


def write_mask(path, mask) -> None:
    """Export a boolean mask as an image with values {0, 255}."""
    write_image(path, np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8))
