"""VPRD binary descriptor files.

Layout (little-endian)::

    magic       4 bytes  b"VPRD"
    version     u32      1
    name_len    u16
    technique   name_len bytes, UTF-8
    level       u16      compression level of the source images
    count       u32
    dim         u32
    payload     count * dim float32, row-major
    crc         u32      zlib.crc32 of the payload bytes

Nothing may follow the CRC.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .descriptor import DescriptorSet
from .errors import FormatError, LoadError

MAGIC = b"VPRD"
VERSION = 1


def encode_descriptor_set(d: DescriptorSet) -> bytes:
    name = d.technique.encode("utf-8")
    if len(name) > 0xFFFF:
        raise ValueError("technique name too long")
    payload = np.ascontiguousarray(d.vectors, dtype="<f4").tobytes()
    count, dim = d.vectors.shape
    header = (
        MAGIC
        + struct.pack("<IH", VERSION, len(name))
        + name
        + struct.pack("<HII", d.source_level, count, dim)
    )
    return header + payload + struct.pack("<I", zlib.crc32(payload))


def decode_descriptor_set(data: bytes, role="query") -> DescriptorSet:
    def take(offset, n, what):
        if offset + n > len(data):
            raise FormatError(f"truncated {what}: need {n} bytes, have {len(data) - offset}", offset)
        return data[offset : offset + n], offset + n

    raw, off = take(0, 4, "magic")
    if raw != MAGIC:
        raise FormatError(f"bad magic {raw!r}", 0)
    raw, off = take(off, 6, "header")
    version, name_len = struct.unpack("<IH", raw)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    raw, off = take(off, name_len, "technique name")
    try:
        technique = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("technique name is not UTF-8", off - name_len) from exc
    raw, off = take(off, 10, "header")
    level, count, dim = struct.unpack("<HII", raw)
    if dim == 0:
        raise FormatError("dim must be positive", off - 4)

    payload_start = off
    expected = count * dim * 4
    available = len(data) - payload_start - 4
    if available != expected:
        rows = max(available, 0) / (dim * 4)
        raise FormatError(
            f"count mismatch: header declares {count} rows of dim {dim} "
            f"({expected} payload bytes) but file holds {rows:g} rows",
            payload_start,
        )
    payload = data[payload_start : payload_start + expected]
    (crc,) = struct.unpack("<I", data[payload_start + expected :])
    if crc != zlib.crc32(payload):
        raise FormatError("CRC32 mismatch", payload_start + expected)
    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    return DescriptorSet(technique, level, vectors.astype(np.float32), role)


def store_descriptor_set(d: DescriptorSet, path) -> None:
    Path(path).write_bytes(encode_descriptor_set(d))


def load_descriptor_set(path, role="query") -> DescriptorSet:
    path = Path(path)
    if not path.is_file():
        raise LoadError(path)
    return decode_descriptor_set(path.read_bytes(), role)
