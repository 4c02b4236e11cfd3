"""Hierarchical chaotic image encryption with an embedded edge-mask watermark."""

from .chaos import REFERENCE_KEY, ChaosStream, Key, SubKey, make_stream, parse_key, random_key, serialize_key
from .errors import AccessError, DomainError, HierCryptError, ImageFormatError, KeyFormatError
from .hierarchy import AccessRights, CannyParams, decrypt_image, decrypt_partial, encrypt_image

__all__ = [
    "REFERENCE_KEY",
    "AccessError",
    "AccessRights",
    "CannyParams",
    "ChaosStream",
    "DomainError",
    "HierCryptError",
    "ImageFormatError",
    "Key",
    "KeyFormatError",
    "SubKey",
    "decrypt_image",
    "decrypt_partial",
    "encrypt_image",
    "make_stream",
    "parse_key",
    "random_key",
    "serialize_key",
]
