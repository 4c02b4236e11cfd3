"""Hierarchical image encryption with the edge mask carried in the LSB plane.

Cryptogram layout (same shape as the plaintext)::

    bits 1-7  content: contour pixels under sk1, region pixels under sk2,
              then an sk3-keyed two-pass diffusion over the whole plane
    bit 0     the dilated Canny mask, encrypted under sk3

Decryption reads the mask first (needs sk3 only), splits the content with
it, and decrypts each subset with its own sub-key. The decrypted image keeps
the original bits 1-7 and carries the mask as a watermark in bit 0; the
plaintext's own LSB plane is not recoverable.

The diffusion layer only depends on sk3 and public ciphertext, so holding sk1
alone never requires sk2 and vice versa.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .chaos import Key, SubKey
from .errors import AccessError
from .lut_cipher import decrypt_sequence, decrypt_two_pass, encrypt_sequence, encrypt_two_pass
from .partition import (
    CANNY_HIGH,
    CANNY_LOW,
    CANNY_SIGMA,
    DILATE_RADIUS,
    Partition,
    as_image,
    edge_mask,
    merge_planes,
    partition_content,
    split_planes,
    unpartition,
)

CONTENT_ALPHABET = 128
MASK_ALPHABET = 2
SUBKEY_NAMES = ("sk1", "sk2", "sk3")


@dataclass(frozen=True)
class CannyParams:
    sigma: float = CANNY_SIGMA
    low: float = CANNY_LOW
    high: float = CANNY_HIGH
    radius: int = DILATE_RADIUS

    def mask(self, img) -> np.ndarray:
        return edge_mask(img, self.sigma, self.low, self.high, self.radius)


@dataclass(frozen=True)
class AccessRights:
    has_sk1: bool = False
    has_sk2: bool = False
    has_sk3: bool = False

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "AccessRights":
        names = {n.strip().lower() for n in names if n.strip()}
        unknown = names - set(SUBKEY_NAMES)
        if unknown:
            raise ValueError(f"unknown sub-key name(s): {', '.join(sorted(unknown))}")
        return cls(*(n in names for n in SUBKEY_NAMES))

    @classmethod
    def parse(cls, text: str) -> "AccessRights":
        return cls.from_names(text.split(","))

    def names(self) -> list[str]:
        return [n for n, held in zip(SUBKEY_NAMES, (self.has_sk1, self.has_sk2, self.has_sk3)) if held]

    def select(self, key: Key) -> dict[str, SubKey]:
        return {n: getattr(key, n) for n in self.names()}


def diffusion_subkey(sk3: SubKey) -> SubKey:
    """sk3 with its two orbits swapped, so the diffusion layer and the mask
    cipher do not share a table/mask role on the same orbit."""
    return SubKey(sk3.x0_xor, sk3.mu0_xor, sk3.x0, sk3.mu0)


def _mask_whitening(content: np.ndarray) -> np.ndarray:
    # Ties the LSB plane to the final content ciphertext so a content change
    # also scrambles bit 0.
    return (content.ravel() & 1).astype(np.int64)


def encrypt_content(msb7, mask, key: Key) -> np.ndarray:
    """Encrypt seven-bit content with a known mask; returns the cryptogram."""
    msb7 = np.asarray(msb7)
    mask = np.asarray(mask, dtype=bool)
    h, w = msb7.shape
    part = partition_content(msb7, mask)
    layered = Partition(
        part.contour_index,
        encrypt_sequence(key.sk1, part.contour_values, CONTENT_ALPHABET).astype(np.uint8),
        part.region_index,
        encrypt_sequence(key.sk2, part.region_values, CONTENT_ALPHABET).astype(np.uint8),
    )
    inner = unpartition(layered, w, h)
    content = encrypt_two_pass(diffusion_subkey(key.sk3), inner.ravel(), CONTENT_ALPHABET)
    mask_bits = mask.ravel().astype(np.int64) ^ _mask_whitening(content)
    lsb = encrypt_sequence(key.sk3, mask_bits, MASK_ALPHABET)
    return merge_planes(content.reshape(h, w), lsb.reshape(h, w))


def encrypt_image(img, key: Key, params: CannyParams = CannyParams()) -> np.ndarray:
    img = as_image(img)
    mask = params.mask(img)
    msb7, _ = split_planes(img)
    return encrypt_content(msb7, mask, key)


def _open(cryptogram, sk3: SubKey) -> tuple[np.ndarray, np.ndarray]:
    """Recover the mask and the pre-diffusion content (sub-cipher ciphertext)."""
    cryptogram = as_image(cryptogram)
    h, w = cryptogram.shape
    content, lsb = split_planes(cryptogram)
    mask_bits = decrypt_sequence(sk3, lsb.ravel(), MASK_ALPHABET) ^ _mask_whitening(content)
    inner = decrypt_two_pass(diffusion_subkey(sk3), content.ravel(), CONTENT_ALPHABET)
    return mask_bits.astype(bool).reshape(h, w), inner.astype(np.uint8).reshape(h, w)


def recover_mask(cryptogram, sk3: SubKey) -> np.ndarray:
    return _open(cryptogram, sk3)[0]


def decrypt_partial(cryptogram, held: Mapping[str, SubKey]) -> np.ndarray:
    """Decrypt the subsets whose sub-keys are held; others stay ciphered.

    ``held`` maps sub-key names ("sk1", "sk2", "sk3") to sub-keys. sk3 is
    mandatory since the mask locates both subsets.
    """
    rights = AccessRights.from_names(held.keys())
    if not rights.has_sk3:
        raise AccessError("sk3 is required: the mask sub-key locates the contour and region subsets")
    mask, inner = _open(cryptogram, held["sk3"])
    h, w = inner.shape
    part = partition_content(inner, mask)
    contour = part.contour_values
    region = part.region_values
    if rights.has_sk1:
        contour = decrypt_sequence(held["sk1"], contour, CONTENT_ALPHABET).astype(np.uint8)
    if rights.has_sk2:
        region = decrypt_sequence(held["sk2"], region, CONTENT_ALPHABET).astype(np.uint8)
    msb7 = unpartition(Partition(part.contour_index, contour, part.region_index, region), w, h)
    return merge_planes(msb7, mask.astype(np.uint8))


def decrypt_image(cryptogram, key: Key) -> np.ndarray:
    return decrypt_partial(cryptogram, {"sk1": key.sk1, "sk2": key.sk2, "sk3": key.sk3})
