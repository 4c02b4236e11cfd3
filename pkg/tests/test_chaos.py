import math
import random
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiercrypt.chaos import (
    KEY_SIZE,
    KEY_SPACE_BITS,
    MIN_RANDOM_LYAPUNOV,
    REFERENCE_KEY,
    ChaosStream,
    Key,
    SubKey,
    format_key_text,
    logistic_step,
    lyapunov_exponent,
    make_stream,
    parse_key,
    parse_key_text,
    quantize,
    random_key,
    serialize_key,
)
from hiercrypt.errors import DomainError, KeyFormatError

# First 64 XOR-stream symbols (alphabet 256, burn-in 1000) of the reference key,
# frozen from a plain-Python loop of x = mu * (x * (1 - x)).
GOLDEN_XOR_SYMBOLS = {
    "sk1": [217, 118, 233, 74, 194, 172, 206, 145, 230, 84, 207, 143, 231, 81, 204, 152, 226, 95, 219, 114, 232, 79, 200, 158, 221, 109, 229, 85, 209, 139, 232, 77, 197, 165, 214, 126, 234, 71, 188, 182, 192, 175, 203, 153, 225, 99, 222, 105, 227, 91, 216, 123, 234, 72, 189, 179, 196, 167, 212, 133, 234, 72, 190, 178],
    "sk2": [220, 111, 230, 83, 206, 147, 229, 87, 210, 136, 233, 74, 193, 173, 205, 149, 228, 91, 215, 124, 234, 71, 189, 180, 194, 171, 208, 142, 231, 80, 202, 155, 224, 102, 225, 99, 223, 105, 227, 92, 217, 120, 234, 73, 191, 176, 201, 157, 222, 107, 228, 89, 213, 128, 234, 71, 188, 182, 192, 175, 203, 154, 225, 99],
    "sk3": [103, 232, 81, 208, 144, 237, 66, 184, 193, 178, 204, 155, 229, 88, 218, 120, 240, 54, 162, 223, 106, 234, 74, 199, 166, 219, 117, 239, 57, 168, 217, 124, 241, 53, 158, 227, 95, 225, 100, 230, 87, 217, 123, 241, 53, 158, 227, 96, 226, 99, 229, 90, 221, 113, 238, 62, 177, 205, 153, 231, 83, 212, 136, 240],
}


def python_orbit(x, mu, n):
    out = []
    for _ in range(n):
        x = mu * (x * (1.0 - x))
        out.append(x)
    return out


valid_x = st.floats(min_value=1e-9, max_value=1 - 1e-9)
valid_mu = st.floats(min_value=3.5700001, max_value=4.0)
subkeys = st.builds(SubKey, valid_x, valid_mu, valid_x, valid_mu)
keys = st.builds(Key, subkeys, subkeys, subkeys)


class TestLogisticStep:
    def test_zero_is_fixed(self):
        assert logistic_step(0.0, 3.8) == 0.0

    def test_maximum(self):
        assert logistic_step(0.5, 4.0) == 1.0

    def test_reference_value(self):
        # 3.801 * 0.45 * 0.55 by hand
        assert logistic_step(0.45, 3.801) == pytest.approx(0.9407475, abs=1e-15)

    def test_operation_order(self):
        x, mu = 0.123456789, 3.9
        assert logistic_step(x, mu) == mu * (x * (1.0 - x))

    @pytest.mark.parametrize("x, mu", [(-0.1, 3.8), (1.1, 3.8), (0.5, 0.0), (0.5, 4.1), (math.nan, 3.8), (0.5, math.inf)])
    def test_domain(self, x, mu):
        with pytest.raises(DomainError):
            logistic_step(x, mu)


class TestStream:
    def test_burn_in_zero(self):
        s = make_stream(0.45, 3.801, burn_in=0)
        assert s.emitted == 0
        assert s.next_value() == pytest.approx(0.9407475, abs=1e-15)
        assert s.emitted == 1

    def test_burn_in_one(self):
        s = make_stream(0.45, 3.801, burn_in=1)
        assert s.next_value() == logistic_step(logistic_step(0.45, 3.801), 3.801)

    def test_degenerate_orbit(self):
        s = ChaosStream(0.5, 4.0)
        s.take(2)
        assert s.x == 0.0
        assert s.next_value() == 0.0

    def test_make_stream_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            make_stream(0.5, 3.5)
        with pytest.raises(DomainError):
            make_stream(1.0, 3.9)

    def test_symbol_examples(self):
        assert make_stream(0.45, 3.801, burn_in=0).next_symbol(256) == 240
        top = ChaosStream(0.5, 4.0)  # next value is exactly 1.0
        assert top.next_symbol(256) == 255
        bottom = ChaosStream(0.0, 3.9)
        assert bottom.next_symbol(2) == 0

    def test_quantize_clamps(self):
        assert quantize([0.0, 0.5, 0.999999, 1.0], 128).tolist() == [0, 64, 127, 127]

    def test_bulk_matches_scalar_path(self):
        # the compiled orbit must agree bit-for-bit with the scalar recurrence
        a = make_stream(0.3141592653, 3.99, burn_in=17)
        b = make_stream(0.3141592653, 3.99, burn_in=17)
        bulk = a.take(5000)
        scalar = [b.next_value() for _ in range(5000)]
        assert bulk.tolist() == scalar
        assert a.x == b.x and a.emitted == b.emitted

    @pytest.mark.parametrize("name", ["sk1", "sk2", "sk3"])
    def test_golden_keystream(self, name):
        sk = getattr(REFERENCE_KEY, name)
        s = make_stream(sk.x0_xor, sk.mu0_xor)
        assert s.symbols(64, 256).tolist() == GOLDEN_XOR_SYMBOLS[name]

    def test_golden_independent_route(self):
        sk = REFERENCE_KEY.sk1
        orbit = python_orbit(sk.x0_xor, sk.mu0_xor, 1064)[1000:]
        assert [min(math.floor(v * 256), 255) for v in orbit] == GOLDEN_XOR_SYMBOLS["sk1"]


class TestProperties:
    @pytest.mark.parametrize("mu", [3.5700001, 3.67, 3.801, 3.9, 4.0])
    def test_orbit_confinement(self, mu):
        rs = random.Random(int(mu * 1e6))
        for _ in range(3):
            v = make_stream(rs.uniform(1e-6, 1 - 1e-6), mu, burn_in=0).take(1_000_000)
            assert v.min() >= 0.0 and v.max() <= 1.0

    def test_determinism(self):
        a = make_stream(0.7, 3.93).symbols(100_000, 256)
        b = make_stream(0.7, 3.93).symbols(100_000, 256)
        assert np.array_equal(a, b)

    @pytest.mark.xfail(
        strict=True,
        reason="mu=3.801 lies in a 4-band chaotic window (Lyapunov ~0.06): about one perturbed "
        "orbit in four stays phase-locked in the same band and differs by only a few symbols",
    )
    def test_sensitivity_reference_mu(self):
        rs = random.Random(99)
        for _ in range(10):
            x0 = rs.uniform(0.05, 0.95)
            a = make_stream(x0, 3.801).symbols(10_000, 256)
            b = make_stream(x0 + 1e-10, 3.801).symbols(10_000, 256)
            assert np.mean(a != b) >= 0.99

    @pytest.mark.parametrize("mu", [3.7, 3.77, 3.8, 3.805, 3.99])  # above band merging (~3.679)
    def test_sensitivity(self, mu):
        # A 1e-10 nudge must decorrelate the orbit as fully as an unrelated start
        # point would; the invariant density is not flat, so even unrelated
        # streams agree on ~1-2% of symbols.
        rs = random.Random(99)
        for _ in range(10):
            x0 = rs.uniform(0.05, 0.95)
            a = make_stream(x0, mu).symbols(10_000, 256)
            b = make_stream(x0 + 1e-10, mu).symbols(10_000, 256)
            unrelated = make_stream(rs.uniform(0.05, 0.95), mu).symbols(10_000, 256)
            baseline = np.mean(a != unrelated)
            assert np.mean(a != b) >= 0.97
            assert abs(np.mean(a != b) - baseline) < 0.006

    def test_reference_mu_band_locking(self):
        # the perturbed orbit settles into one of four band phases of the original
        o = make_stream(0.45, 3.801).take(4000)
        a = make_stream(0.45 + 1e-10, 3.801).take(4000)
        gaps = [np.abs(o[s:] - a[: len(a) - s]).mean() for s in range(4)]
        gaps += [np.abs(o[: len(o) - s] - a[s:]).mean() for s in range(1, 4)]
        assert min(gaps) < 0.01

    def test_lyapunov(self):
        assert lyapunov_exponent(4.0) == pytest.approx(math.log(2), abs=0.02)
        assert lyapunov_exponent(3.83) < 0  # period-3 window
        assert 0 < lyapunov_exponent(3.801) < 0.1

    def test_random_keys_avoid_windows(self):
        rs = random.Random(3)
        for _ in range(20):
            k = random_key(rs)
            for sk in k.subkeys():
                assert lyapunov_exponent(sk.mu0) >= MIN_RANDOM_LYAPUNOV


class TestKeys:
    def test_reference_round_trip(self):
        data = serialize_key(REFERENCE_KEY)
        assert len(data) == KEY_SIZE == 96
        assert parse_key(data) == REFERENCE_KEY
        assert serialize_key(parse_key(data)) == data

    def test_layout(self):
        data = serialize_key(REFERENCE_KEY)
        assert struct.unpack("<12d", data) == REFERENCE_KEY.values()
        assert REFERENCE_KEY.values()[:4] == (0.45, 3.801, 0.4003, 3.6701)

    def test_short_input(self):
        with pytest.raises(KeyFormatError):
            parse_key(b"\x00" * 95)

    def test_out_of_range_field(self):
        values = list(REFERENCE_KEY.values())
        values[0] = 1.5
        with pytest.raises(KeyFormatError) as exc:
            parse_key(struct.pack("<12d", *values))
        assert exc.value.field == "sk1.x0"
        assert "x0" in str(exc.value)

    def test_mu_out_of_range(self):
        values = list(REFERENCE_KEY.values())
        values[5] = 4.5
        with pytest.raises(KeyFormatError) as exc:
            Key.from_values(values)
        assert exc.value.field == "sk2.mu0"

    def test_text_form(self):
        assert parse_key_text(format_key_text(REFERENCE_KEY)) == REFERENCE_KEY
        assert parse_key_text("0.45, 3.801, 0.4003, 3.6701 0.25 3.8 0.4 3.67\n0.51 3.805 0.401 3.77") == REFERENCE_KEY
        with pytest.raises(KeyFormatError):
            parse_key_text("0.45 3.801")

    def test_key_space(self):
        assert KEY_SPACE_BITS == 3 * 256

    def test_perturbed(self):
        k = REFERENCE_KEY.perturbed("sk2", "x0", 1e-10)
        assert k.sk2.x0 == 0.25 + 1e-10
        assert k.sk1 == REFERENCE_KEY.sk1 and k.sk3 == REFERENCE_KEY.sk3

    def test_random_keys_round_trip(self):
        rs = random.Random(7)
        for _ in range(1000):
            k = random_key(rs)
            assert parse_key(serialize_key(k)) == k

    def test_random_keys_distinct(self):
        assert random_key() != random_key()

    @given(keys)
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, k):
        assert parse_key(serialize_key(k)) == k
