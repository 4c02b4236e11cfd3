"""Statistical and cryptanalytic evaluation of cryptograms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .chaos import Key
from .errors import DegenerateSampleError, ImageFormatError
from .hierarchy import CannyParams, decrypt_image, encrypt_content
from .partition import as_image, split_planes

DIRECTIONS = ("horizontal", "vertical", "diagonal")
_OFFSETS = {"horizontal": (0, 1), "vertical": (1, 0), "diagonal": (1, 1)}


def _same_shape(c1, c2) -> tuple[np.ndarray, np.ndarray]:
    a = as_image(c1)
    b = as_image(c2)
    if a.shape != b.shape:
        raise ImageFormatError(f"image dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def npcr(c1, c2) -> float:
    """Percentage of pixel positions at which the two images differ."""
    a, b = _same_shape(c1, c2)
    return 100.0 * np.count_nonzero(a != b) / a.size


def uaci(c1, c2) -> float:
    """Mean absolute pixel difference as a percentage of 255."""
    a, b = _same_shape(c1, c2)
    diff = np.abs(a.astype(np.int64) - b.astype(np.int64))
    return 100.0 * float(diff.sum()) / (255.0 * a.size)


def psnr(reference, test) -> float:
    a, b = _same_shape(reference, test)
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(255.0**2 / mse))


@dataclass(frozen=True)
class DiffResult:
    npcr: float
    uaci: float


def flip_bit(img, index: int, bit: int) -> np.ndarray:
    img = as_image(img)
    if not 0 <= index < img.size:
        raise IndexError(f"pixel index {index} outside image of {img.size} pixels")
    if not 0 <= bit < 8:
        raise ValueError(f"bit {bit} outside [0, 8)")
    out = img.copy().ravel()
    out[index] ^= np.uint8(1 << bit)
    return out.reshape(img.shape)


def differential_test(
    img,
    key: Key,
    flip: tuple[int, int] | None,
    params: CannyParams = CannyParams(),
) -> DiffResult:
    """NPCR/UACI between the cryptograms of ``img`` and ``img`` with one bit flipped.

    ``flip`` is ``(pixel_index, bit)``; ``None`` compares the image with itself.
    """
    img = as_image(img)
    c1 = encrypt_content(img >> 1, params.mask(img), key)
    if flip is None:
        return DiffResult(npcr(c1, c1), uaci(c1, c1))
    other = flip_bit(img, *flip)
    c2 = encrypt_content(other >> 1, params.mask(other), key)
    return DiffResult(npcr(c1, c2), uaci(c1, c2))


def random_flips(shape, count: int, seed: int, bits: Sequence[int] = range(1, 8)) -> list[tuple[int, int]]:
    """Seeded (pixel, bit) flip locations. Bit 0 is excluded by default since
    the plaintext LSB plane is discarded by the cipher."""
    rng = np.random.default_rng(seed)
    size = int(np.prod(shape))
    bits = list(bits)
    return [(int(rng.integers(size)), int(bits[rng.integers(len(bits))])) for _ in range(count)]


def pearson(x, y) -> float:
    """Correlation coefficient with population (1/N) moments."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError("x and y must be non-empty 1-D samples of equal length")
    n = x.size
    ex = x.sum() / n
    ey = y.sum() / n
    dx = ((x - ex) ** 2).sum() / n
    dy = ((y - ey) ** 2).sum() / n
    if dx == 0 or dy == 0:
        raise DegenerateSampleError("correlation is undefined for a constant sample")
    cov = ((x - ex) * (y - ey)).sum() / n
    return float(cov / (np.sqrt(dx) * np.sqrt(dy)))


@dataclass(frozen=True)
class CorrResult:
    direction: str
    r: float
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)


def adjacent_pairs(img, direction: str, n_pairs: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``n_pairs`` (pixel, neighbour) pairs; diagonal means down-right."""
    img = as_image(img)
    if direction not in _OFFSETS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    dr, dc = _OFFSETS[direction]
    h, w = img.shape
    rows, cols = h - dr, w - dc
    if rows < 1 or cols < 1:
        raise ImageFormatError(f"{h}x{w} image has no {direction} neighbours")
    rng = np.random.default_rng(seed)
    available = rows * cols
    picks = rng.choice(available, size=n_pairs, replace=n_pairs > available)
    r, c = np.divmod(picks, cols)
    return img[r, c], img[r + dr, c + dc]


def correlation(img, direction: str, n_pairs: int = 2500, seed: int = 0) -> CorrResult:
    x, y = adjacent_pairs(img, direction, n_pairs, seed)
    return CorrResult(direction, pearson(x, y), x, y)


@dataclass(frozen=True)
class HistogramResult:
    counts: np.ndarray
    chi2: float
    dof: int
    p_value: float

    def is_uniform(self, alpha: float = 0.01) -> bool:
        return self.p_value > alpha


def histogram(img, alphabet: int = 256) -> HistogramResult:
    """Bin counts and a chi-square test against the uniform distribution.

    Use ``alphabet=128`` on ``cryptogram >> 1`` for the content planes.
    """
    arr = np.asarray(img).ravel()
    if arr.size == 0:
        raise ImageFormatError("empty image")
    if arr.min() < 0 or arr.max() >= alphabet:
        raise ImageFormatError(f"values outside [0, {alphabet})")
    counts = np.bincount(arr.astype(np.int64), minlength=alphabet)
    expected = arr.size / alphabet
    chi2 = float(((counts - expected) ** 2).sum() / expected)
    dof = alphabet - 1
    return HistogramResult(counts, chi2, dof, float(stats.chi2.sf(chi2, dof)))


# Key-sensitivity perturbations: 1e-10 on each sub-key's x0, then the same
# at 1e-15.
COARSE_DELTAS = [
    ("K1", "sk1", "x0", 1e-10),
    ("K2", "sk2", "x0", 1e-10),
    ("K3", "sk3", "x0", 1e-10),
]
FINE_DELTAS = [(f"{label}'", sk, f, 1e-15) for label, sk, f, _ in COARSE_DELTAS]


@dataclass(frozen=True)
class SensitivityRow:
    label: str
    subkey: str
    field: str
    epsilon: float
    perturbed_subset: str
    npcr_contour: float | None
    npcr_region: float | None
    npcr_all: float
    uaci_all: float
    mask_error: float


def _subset_npcr(a: np.ndarray, b: np.ndarray, sel: np.ndarray) -> float | None:
    n = int(sel.sum())
    if n == 0:
        return None
    return 100.0 * np.count_nonzero(a[sel] != b[sel]) / n


def key_sensitivity_suite(
    img,
    key: Key,
    deltas: Sequence[tuple[str, str, str, float]] = COARSE_DELTAS + FINE_DELTAS,
    params: CannyParams = CannyParams(),
) -> list[SensitivityRow]:
    """Decrypt the ``key`` cryptogram with each perturbed key.

    NPCR compares bits 1-7 of the wrong-key decryption with the plaintext,
    per subset of the true mask. A wrong sk3 garbles the mask, so its
    perturbed subset is the whole image.
    """
    img = as_image(img)
    mask = params.mask(img)
    msb7, _ = split_planes(img)
    cryptogram = encrypt_content(msb7, mask, key)
    rows = []
    for label, sk, fld, eps in deltas:
        wrong = key.perturbed(sk, fld, eps)
        dec = decrypt_image(cryptogram, wrong)
        got = dec >> 1
        rows.append(
            SensitivityRow(
                label=label,
                subkey=sk,
                field=fld,
                epsilon=eps,
                perturbed_subset={"sk1": "contour", "sk2": "region", "sk3": "all"}[sk],
                npcr_contour=_subset_npcr(got, msb7, mask),
                npcr_region=_subset_npcr(got, msb7, ~mask),
                npcr_all=npcr(got, msb7),
                uaci_all=uaci(dec & 0xFE, img & 0xFE),
                mask_error=100.0 * float(np.mean((dec & 1).astype(bool) != mask)),
            )
        )
    return rows


@dataclass(frozen=True)
class AttackResult:
    keystream: np.ndarray = field(repr=False)
    recovered: np.ndarray = field(repr=False)
    source_recovered: bool
    npcr: float | None
    uaci: float | None

    @property
    def succeeded(self) -> bool | None:
        """True if the target plaintext was recovered exactly; None without truth."""
        return None if self.npcr is None else self.npcr == 0.0


def keystream_attack(plain, cipher, target, truth=None) -> AttackResult:
    """Known-plaintext attack that models the cipher as a per-pixel XOR.

    The keystream estimate ``plain ^ cipher`` is applied to ``target``; with
    ``truth`` (the target's plaintext) the result is scored by NPCR/UACI.
    """
    plain, cipher = _same_shape(plain, cipher)
    _, target = _same_shape(plain, target)
    keystream = plain ^ cipher
    recovered = target ^ keystream
    source_ok = bool(np.array_equal(cipher ^ keystream, plain))
    if truth is None:
        return AttackResult(keystream, recovered, source_ok, None, None)
    return AttackResult(keystream, recovered, source_ok, npcr(recovered, truth), uaci(recovered, truth))


def xor_stub_encrypt(img, seed: int = 0) -> np.ndarray:
    """A deliberately weak cipher (fixed per-position XOR pad) used to check
    that the attack harness can break what it should."""
    img = as_image(img)
    pad = np.random.default_rng(seed).integers(0, 256, size=img.shape, dtype=np.uint8)
    return img ^ pad
