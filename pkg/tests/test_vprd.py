import struct
import zlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from seqvpr.descriptor import DescriptorSet
from seqvpr.errors import FormatError, LoadError
from seqvpr.vprd import (
    decode_descriptor_set, encode_descriptor_set, load_descriptor_set, store_descriptor_set,
)


def test_round_trip_3x4(tmp_path):
    d = DescriptorSet("hog", 99, np.arange(12, dtype=np.float32).reshape(3, 4) / 7)
    p = tmp_path / "d.vprd"
    store_descriptor_set(d, p)
    back = load_descriptor_set(p)
    assert back.technique == "hog" and back.source_level == 99
    assert np.array_equal(back.vectors, d.vectors)


def test_layout():
    d = DescriptorSet("ab", 7, np.ones((2, 3), np.float32))
    raw = encode_descriptor_set(d)
    assert raw[:4] == b"VPRD"
    assert struct.unpack_from("<IH", raw, 4) == (1, 2)
    assert raw[10:12] == b"ab"
    assert struct.unpack_from("<HII", raw, 12) == (7, 2, 3)
    payload = raw[22:22 + 24]
    assert np.frombuffer(payload, "<f4").tolist() == [1.0] * 6
    assert struct.unpack("<I", raw[-4:])[0] == zlib.crc32(payload)
    assert len(raw) == 22 + 24 + 4


def test_declared_210_rows_but_209_present():
    d = DescriptorSet("NetVLAD", 0, np.zeros((210, 8), np.float32))
    raw = encode_descriptor_set(d)
    header_len = 4 + 6 + len("NetVLAD") + 10
    payload = raw[header_len:-4]
    shortened = raw[:header_len] + payload[: 209 * 8 * 4] + struct.pack("<I", zlib.crc32(payload[: 209 * 8 * 4]))
    with pytest.raises(FormatError, match="count mismatch") as exc:
        decode_descriptor_set(shortened)
    assert exc.value.offset == header_len
    assert "209" in str(exc.value)


def test_bad_magic():
    with pytest.raises(FormatError) as exc:
        decode_descriptor_set(b"VPRX" + b"\0" * 30)
    assert exc.value.offset == 0


def test_truncated_header():
    raw = encode_descriptor_set(DescriptorSet("hog", 0, np.zeros((1, 1), np.float32)))
    for cut in (3, 8, 12, 15):
        with pytest.raises(FormatError):
            decode_descriptor_set(raw[:cut])


def test_crc_mismatch():
    raw = bytearray(encode_descriptor_set(DescriptorSet("hog", 0, np.ones((2, 2), np.float32))))
    raw[-6] ^= 0xFF
    with pytest.raises(FormatError, match="CRC"):
        decode_descriptor_set(bytes(raw))


def test_missing_file(tmp_path):
    with pytest.raises(LoadError):
        load_descriptor_set(tmp_path / "none.vprd")


def test_store_is_deterministic(tmp_path):
    d = DescriptorSet("hog", 3, np.random.default_rng(0).normal(size=(5, 9)))
    assert encode_descriptor_set(d) == encode_descriptor_set(d)


@settings(max_examples=50)
@given(
    st.text(max_size=20),
    st.integers(0, 99),
    arrays(np.float32, st.tuples(st.integers(0, 6), st.integers(1, 6)),
           elements=st.floats(-1e6, 1e6, width=32)),
)
def test_round_trip_lossless(name, level, vectors):
    d = DescriptorSet(name, level, vectors)
    back = decode_descriptor_set(encode_descriptor_set(d))
    assert back.technique == name and back.source_level == level
    assert back.vectors.shape == vectors.shape
    assert back.vectors.tobytes() == vectors.tobytes()
