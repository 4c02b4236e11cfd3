"""Dynamic chaotic look-up-table cipher with ciphertext feedback.

One sub-key drives two logistic orbits: the ``(x0, mu0)`` orbit builds the
substitution table (rebuilt every ``period`` symbols) and the
``(x0_xor, mu0_xor)`` orbit supplies a per-symbol XOR mask. A symbol is
encrypted as::

    c = table[p ^ k ^ c_prev]

with ``c_prev`` the previous ciphertext symbol (0 at the start). The alphabet
must be a power of two so the XOR stays inside it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .chaos import DEFAULT_BURN_IN, ChaosStream, SubKey, key_streams
from .errors import DomainError

DEFAULT_PERIOD = 256


@dataclass(frozen=True)
class Lut:
    table: np.ndarray
    inverse: np.ndarray

    @property
    def alphabet(self) -> int:
        return len(self.table)

    def is_bijection(self) -> bool:
        n = self.alphabet
        idx = np.arange(n)
        return (
            np.array_equal(np.sort(self.table), idx)
            and np.array_equal(self.inverse[self.table], idx)
            and np.array_equal(self.table[self.inverse], idx)
        )


def lut_from_draws(draws: Sequence[float]) -> Lut:
    """``table[i]`` is the rank of draw ``i``; ties keep draw order."""
    draws = np.asarray(draws, dtype=np.float64)
    order = np.argsort(draws, kind="stable")
    table = np.empty(len(draws), dtype=np.int64)
    table[order] = np.arange(len(draws))
    return Lut(table=table, inverse=order.astype(np.int64))


def build_lut(stream: ChaosStream, alphabet: int) -> Lut:
    return lut_from_draws(stream.take(alphabet))


def build_luts(stream: ChaosStream, alphabet: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` consecutive tables as (count, alphabet) arrays; same as
    calling :func:`build_lut` ``count`` times."""
    draws = stream.take(count * alphabet).reshape(count, alphabet)
    order = np.argsort(draws, axis=1, kind="stable")
    tables = np.empty_like(order)
    np.put_along_axis(tables, order, np.arange(alphabet)[None, :], axis=1)
    return tables, order


@njit(cache=True)
def _chain(src, ks, luts, fb, count, period, decrypt):
    n = len(src)
    out = np.empty(n, dtype=np.int64)
    block = 0
    for j in range(n):
        lut = luts[block]
        if decrypt:
            c = src[j]
            out[j] = lut[c] ^ ks[j] ^ fb
        else:
            c = lut[src[j] ^ ks[j] ^ fb]
            out[j] = c
        fb = c
        count += 1
        if count % period == 0:
            block += 1
    return out, fb


def _check_alphabet(alphabet: int) -> None:
    if alphabet < 2 or alphabet & (alphabet - 1) or alphabet > 256:
        raise DomainError(f"alphabet must be a power of two in [2, 256], got {alphabet}")


class CipherState:
    """Synchronized encrypt/decrypt state for one sub-key.

    Encrypt and decrypt states evolve identically when fed the same
    ciphertext, so one class serves both directions.
    """

    def __init__(
        self,
        lut_stream: ChaosStream,
        xor_stream: ChaosStream,
        alphabet: int,
        period: int = DEFAULT_PERIOD,
    ):
        _check_alphabet(alphabet)
        if period < 1:
            raise ValueError("period must be positive")
        self.key_stream = lut_stream
        self.xor_stream = xor_stream
        self.alphabet = alphabet
        self.period = period
        self.feedback = 0
        self.count = 0
        self.rebuilds = 0
        self.lut = build_lut(lut_stream, alphabet)

    @classmethod
    def from_subkey(
        cls,
        sk: SubKey,
        alphabet: int,
        burn_in: int = DEFAULT_BURN_IN,
        period: int = DEFAULT_PERIOD,
    ) -> "CipherState":
        lut_stream, xor_stream = key_streams(sk, burn_in)
        return cls(lut_stream, xor_stream, alphabet, period)

    def _advance(self) -> None:
        self.count += 1
        if self.count % self.period == 0:
            self.lut = build_lut(self.key_stream, self.alphabet)
            self.rebuilds += 1

    def _check(self, v: int, what: str) -> None:
        if not 0 <= v < self.alphabet:
            raise DomainError(f"{what} symbol {v} outside [0, {self.alphabet})")

    def encrypt_symbol(self, p: int) -> int:
        self._check(p, "plaintext")
        k = self.xor_stream.next_symbol(self.alphabet)
        c = int(self.lut.table[p ^ k ^ self.feedback])
        self.feedback = c
        self._advance()
        return c

    def decrypt_symbol(self, c: int) -> int:
        self._check(c, "ciphertext")
        k = self.xor_stream.next_symbol(self.alphabet)
        p = int(self.lut.inverse[c]) ^ k ^ self.feedback
        self.feedback = c
        self._advance()
        return p

    def skip(self, n: int) -> None:
        """Advance both streams as if ``n`` symbols had been processed."""
        self.xor_stream.take(n)
        rebuilds = (self.count + n) // self.period - self.count // self.period
        if rebuilds:
            tables, inverses = build_luts(self.key_stream, self.alphabet, rebuilds)
            self.lut = Lut(tables[-1], inverses[-1])
            self.rebuilds += rebuilds
        self.count += n

    def _run(self, data, decrypt: bool) -> np.ndarray:
        data = np.asarray(data, dtype=np.int64).ravel()
        n = len(data)
        if n and (data.min() < 0 or data.max() >= self.alphabet):
            bad = int(data[(data < 0) | (data >= self.alphabet)][0])
            raise DomainError(f"symbol {bad} outside [0, {self.alphabet})")
        ks = self.xor_stream.symbols(n, self.alphabet)
        rebuilds = (self.count + n) // self.period - self.count // self.period
        tables, inverses = build_luts(self.key_stream, self.alphabet, rebuilds)
        tables = np.concatenate([self.lut.table[None, :], tables])
        inverses = np.concatenate([self.lut.inverse[None, :], inverses])
        out, self.feedback = _chain(
            data, ks, inverses if decrypt else tables, self.feedback, self.count, self.period, decrypt
        )
        self.count += n
        if rebuilds:
            self.lut = Lut(tables[-1], inverses[-1])
            self.rebuilds += rebuilds
        return out

    def encrypt_many(self, data) -> np.ndarray:
        """Bulk ``encrypt_symbol``; identical output and final state."""
        return self._run(data, decrypt=False)

    def decrypt_many(self, data) -> np.ndarray:
        return self._run(data, decrypt=True)


def encrypt_sequence(
    sk: SubKey,
    data,
    alphabet: int,
    burn_in: int = DEFAULT_BURN_IN,
    period: int = DEFAULT_PERIOD,
) -> np.ndarray:
    return CipherState.from_subkey(sk, alphabet, burn_in, period).encrypt_many(data)


def decrypt_sequence(
    sk: SubKey,
    data,
    alphabet: int,
    burn_in: int = DEFAULT_BURN_IN,
    period: int = DEFAULT_PERIOD,
) -> np.ndarray:
    return CipherState.from_subkey(sk, alphabet, burn_in, period).decrypt_many(data)


def encrypt_two_pass(sk: SubKey, data, alphabet: int, burn_in: int = DEFAULT_BURN_IN) -> np.ndarray:
    """Forward pass, then a backward pass over the reversed result.

    The forward chain carries a change at position ``j`` to the last symbol,
    and the backward chain starts there, so every output symbol depends on
    every input symbol. The backward pass restarts its feedback at 0 and
    continues the same keystreams.
    """
    state = CipherState.from_subkey(sk, alphabet, burn_in)
    forward = state.encrypt_many(data)
    state.feedback = 0
    return state.encrypt_many(forward[::-1])[::-1]


def decrypt_two_pass(sk: SubKey, data, alphabet: int, burn_in: int = DEFAULT_BURN_IN) -> np.ndarray:
    data = np.asarray(data, dtype=np.int64).ravel()
    n = len(data)
    back = CipherState.from_subkey(sk, alphabet, burn_in)
    back.skip(n)
    back.feedback = 0
    forward = back.decrypt_many(data[::-1])[::-1]
    return CipherState.from_subkey(sk, alphabet, burn_in).decrypt_many(forward)
