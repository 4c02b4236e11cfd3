"""Logistic-map keystreams and the hierarchical key.

Every value is computed in binary64 with the fixed order ``mu * (x * (1 - x))``
so that a key reproduces the same keystream on any IEEE-754 platform.
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import astuple, dataclass, fields
from typing import Sequence

import numpy as np
from numba import njit

from .errors import DomainError, KeyFormatError

DEFAULT_BURN_IN = 1000
MU_MIN = 3.57  # exclusive; below this the map is not chaotic
MU_MAX = 4.0

SUBKEY_SIZE = 32
KEY_SIZE = 3 * SUBKEY_SIZE
_SUBKEY_STRUCT = struct.Struct("<4d")

# Key space as counted by treating each parameter as a free 64-bit word.
KEY_SPACE_BITS = 3 * 4 * 64


def _check_x(name: str, x: float) -> None:
    if not (math.isfinite(x) and 0.0 < x < 1.0):
        raise DomainError(f"{name}={x!r} must lie strictly inside (0, 1)")


def _check_mu(name: str, mu: float) -> None:
    if not (math.isfinite(mu) and MU_MIN < mu <= MU_MAX):
        raise DomainError(f"{name}={mu!r} must lie in ({MU_MIN}, {MU_MAX}]")


@dataclass(frozen=True)
class SubKey:
    """Parameters of one sub-cryptosystem: a LUT orbit and an XOR-mask orbit."""

    x0: float
    mu0: float
    x0_xor: float
    mu0_xor: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, float):
                try:
                    v = float(v)
                except (TypeError, ValueError):
                    raise DomainError(f"{f.name}={v!r} is not a real number") from None
                object.__setattr__(self, f.name, v)
        _check_x("x0", self.x0)
        _check_mu("mu0", self.mu0)
        _check_x("x0_xor", self.x0_xor)
        _check_mu("mu0_xor", self.mu0_xor)

    def to_bytes(self) -> bytes:
        return _SUBKEY_STRUCT.pack(*astuple(self))

    @classmethod
    def from_bytes(cls, data: bytes) -> "SubKey":
        if len(data) != SUBKEY_SIZE:
            raise KeyFormatError(f"sub-key needs {SUBKEY_SIZE} bytes, got {len(data)}")
        return cls(*_SUBKEY_STRUCT.unpack(data))

    def replace(self, **changes: float) -> "SubKey":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return SubKey(**values)


@dataclass(frozen=True)
class Key:
    """The hierarchical key: contour (sk1), region (sk2) and mask (sk3) sub-keys."""

    sk1: SubKey
    sk2: SubKey
    sk3: SubKey

    def subkeys(self) -> tuple[SubKey, SubKey, SubKey]:
        return (self.sk1, self.sk2, self.sk3)

    def values(self) -> tuple[float, ...]:
        return tuple(v for sk in self.subkeys() for v in astuple(sk))

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Key":
        values = list(values)
        if len(values) != 12:
            raise KeyFormatError(f"a key has 12 parameters, got {len(values)}")
        subkeys = []
        for i in range(3):
            try:
                subkeys.append(SubKey(*values[4 * i : 4 * i + 4]))
            except DomainError as exc:
                field = str(exc).split("=", 1)[0]
                raise KeyFormatError(f"sk{i + 1}.{exc}", field=f"sk{i + 1}.{field}") from None
        return cls(*subkeys)

    def perturbed(self, subkey: str, field: str, epsilon: float) -> "Key":
        """Copy of the key with ``epsilon`` added to one field of one sub-key."""
        if subkey not in ("sk1", "sk2", "sk3"):
            raise ValueError(f"unknown sub-key {subkey!r}")
        sk = getattr(self, subkey)
        changed = sk.replace(**{field: getattr(sk, field) + epsilon})
        parts = {"sk1": self.sk1, "sk2": self.sk2, "sk3": self.sk3}
        parts[subkey] = changed
        return Key(**parts)


def serialize_key(key: Key) -> bytes:
    """Twelve little-endian binary64 values, sub-key by sub-key."""
    return b"".join(sk.to_bytes() for sk in key.subkeys())


def parse_key(data: bytes) -> Key:
    if len(data) != KEY_SIZE:
        raise KeyFormatError(f"key must be exactly {KEY_SIZE} bytes, got {len(data)}")
    values = struct.unpack("<12d", data)
    return Key.from_values(values)


def parse_key_text(text: str) -> Key:
    """Parse the 12-number plain-text key form (whitespace or comma separated)."""
    tokens = text.replace(",", " ").split()
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise KeyFormatError(f"invalid key text: {exc}") from None
    return Key.from_values(values)


def format_key_text(key: Key) -> str:
    return " ".join(repr(v) for v in key.values())


def lyapunov_exponent(mu: float, x0: float = 0.3, n: int = 20_000, burn_in: int = DEFAULT_BURN_IN) -> float:
    """Orbit-average of log|f'(x)|; <= 0 inside periodic windows of the map."""
    v = make_stream(x0, mu, burn_in).take(n)
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(np.abs(mu * (1.0 - 2.0 * v)))))


# Random keys avoid the periodic windows and weakly mixing banded regimes
# scattered through (3.57, 4].
MIN_RANDOM_LYAPUNOV = 0.2


def random_key(rng: random.Random | None = None) -> Key:
    """Draw a key with every parameter uniform over its valid range.

    Control parameters whose Lyapunov exponent falls below
    ``MIN_RANDOM_LYAPUNOV`` are redrawn. Uses OS entropy unless a seeded
    ``rng`` is supplied (tests).
    """
    rng = rng or random.SystemRandom()

    def draw_x() -> float:
        while True:
            v = rng.uniform(0.0, 1.0)
            if 0.0 < v < 1.0:
                return v

    def draw_mu() -> float:
        while True:
            v = rng.uniform(MU_MIN, MU_MAX)
            if MU_MIN < v <= MU_MAX and lyapunov_exponent(v) >= MIN_RANDOM_LYAPUNOV:
                return v

    def sub() -> SubKey:
        return SubKey(draw_x(), draw_mu(), draw_x(), draw_mu())

    return Key(sub(), sub(), sub())


# Fixed reference key used for the golden vectors and the evaluation battery.
REFERENCE_KEY = Key(
    SubKey(0.45, 3.801, 0.4003, 3.6701),
    SubKey(0.25, 3.8, 0.4, 3.67),
    SubKey(0.51, 3.805, 0.401, 3.77),
)


def logistic_step(x: float, mu: float) -> float:
    if not (math.isfinite(x) and 0.0 <= x <= 1.0):
        raise DomainError(f"state x={x!r} outside [0, 1]")
    if not (math.isfinite(mu) and 0.0 < mu <= 4.0):
        raise DomainError(f"control parameter mu={mu!r} outside (0, 4]")
    return mu * (x * (1.0 - x))


@njit(cache=True)
def _orbit(x, mu, n):
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        x = mu * (x * (1.0 - x))
        out[i] = x
    return out


def quantize(values, alphabet: int):
    """Map reals in [0, 1] to symbols ``floor(x * alphabet)``, clamping 1.0."""
    arr = np.floor(np.asarray(values, dtype=np.float64) * alphabet).astype(np.int64)
    return np.minimum(arr, alphabet - 1)


class ChaosStream:
    """A logistic-map orbit emitted one value at a time.

    Not safe to share between threads while iterating.
    """

    __slots__ = ("x", "mu", "emitted")

    def __init__(self, x: float, mu: float):
        self.x = float(x)
        self.mu = float(mu)
        self.emitted = 0

    def __repr__(self):
        return f"ChaosStream(x={self.x!r}, mu={self.mu!r}, emitted={self.emitted})"

    def next_value(self) -> float:
        self.x = logistic_step(self.x, self.mu)
        self.emitted += 1
        return self.x

    def next_symbol(self, alphabet: int) -> int:
        if alphabet < 2:
            raise DomainError(f"alphabet must be >= 2, got {alphabet}")
        return min(int(math.floor(self.next_value() * alphabet)), alphabet - 1)

    def take(self, n: int) -> np.ndarray:
        """Next ``n`` values as a float64 array (same values as ``next_value``)."""
        x, mu = self.x, self.mu
        if n and not (0.0 <= x <= 1.0 and 0.0 < mu <= 4.0):
            logistic_step(x, mu)  # raises
        out = _orbit(x, mu, n)
        if n:
            self.x = float(out[-1])
        self.emitted += n
        return out

    def symbols(self, n: int, alphabet: int) -> np.ndarray:
        return quantize(self.take(n), alphabet)


def make_stream(x0: float, mu: float, burn_in: int = DEFAULT_BURN_IN) -> ChaosStream:
    """Stream positioned after ``burn_in`` discarded iterations."""
    _check_x("x0", x0)
    _check_mu("mu", mu)
    if burn_in < 0:
        raise ValueError("burn_in must be non-negative")
    s = ChaosStream(x0, mu)
    s.take(burn_in)
    s.emitted = 0
    return s


def key_streams(sk: SubKey, burn_in: int = DEFAULT_BURN_IN) -> tuple[ChaosStream, ChaosStream]:
    """The (LUT, XOR) stream pair of a sub-key."""
    return make_stream(sk.x0, sk.mu0, burn_in), make_stream(sk.x0_xor, sk.mu0_xor, burn_in)

