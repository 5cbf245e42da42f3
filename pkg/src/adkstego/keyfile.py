"""Binary sidecar holding the per-window side information.

Layout, little-endian::

    0   magic "ADKS"
    4   version (u8, = 1)
    5   cover_channels (u8)
    6   cover_width (u32)
    10  cover_height (u32)
    14  k_min (u8, 1 = adaptive)
    15  secret_channels (u8)
    16  secret_width (u32)
    20  secret_height (u32)
    24  records: k (u8), nf (u16); channel-major, windows row-major
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import KeyFileError

MAGIC = b"ADKS"
VERSION = 1
HEADER = struct.Struct("<4sBBIIBBII")
RECORD_DTYPE = np.dtype([("k", "u1"), ("nf", "<u2")])

assert HEADER.size == 24 and RECORD_DTYPE.itemsize == 3


@dataclass(eq=False)
class StegoKey:
    cover_width: int
    cover_height: int
    cover_channels: int
    k_min: int
    secret_width: int
    secret_height: int
    secret_channels: int
    ks: np.ndarray
    nfs: np.ndarray

    def __post_init__(self):
        self.ks = np.asarray(self.ks, dtype=np.uint8)
        self.nfs = np.asarray(self.nfs, dtype=np.uint16)

    @property
    def window_count(self) -> int:
        return (self.cover_width // 8) * (self.cover_height // 8) * self.cover_channels

    @property
    def secret_bytes(self) -> int:
        return self.secret_width * self.secret_height * self.secret_channels

    @property
    def records(self):
        from .core import WindowRecord

        return [WindowRecord(int(k), int(nf)) for k, nf in zip(self.ks, self.nfs)]

    def slot_counts(self) -> np.ndarray:
        k = self.ks.astype(np.int64)
        return 64 - k * k

    def validate(self) -> None:
        if self.cover_channels not in (1, 3):
            raise KeyFileError(f"cover_channels must be 1 or 3, got {self.cover_channels}")
        if self.secret_bytes and self.secret_channels not in (1, 3):
            raise KeyFileError(f"secret_channels must be 1 or 3, got {self.secret_channels}")
        if self.cover_width % 8 or self.cover_height % 8:
            raise KeyFileError("cover dimensions are not multiples of 8")
        if not 1 <= self.k_min <= 8:
            raise KeyFileError(f"k_min {self.k_min} outside 1..8")
        if self.ks.shape != (self.window_count,) or self.nfs.shape != (self.window_count,):
            raise KeyFileError(
                f"record count {self.ks.size} does not match geometry ({self.window_count} expected)"
            )
        if self.ks.size:
            if self.ks.min() < 1 or self.ks.max() > 8:
                raise KeyFileError("record k outside 1..8")
            if self.nfs.min() < 1:
                raise KeyFileError("record nf is zero")
            if np.any(self.nfs[self.ks == 8] != 1):
                raise KeyFileError("record with k=8 must have nf=1")
            if self.ks.min() < self.k_min:
                raise KeyFileError("record k below the key's k_min")

    def to_bytes(self) -> bytes:
        self.validate()
        header = HEADER.pack(
            MAGIC, VERSION, self.cover_channels, self.cover_width, self.cover_height,
            self.k_min, self.secret_channels, self.secret_width, self.secret_height,
        )
        recs = np.empty(self.ks.size, dtype=RECORD_DTYPE)
        recs["k"] = self.ks
        recs["nf"] = self.nfs
        return header + recs.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "StegoKey":
        if len(data) < HEADER.size:
            raise KeyFileError(f"truncated header ({len(data)} of {HEADER.size} bytes)")
        magic, version, cc, cw, ch, k_min, sc, sw, sh = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise KeyFileError(f"bad magic {magic!r}")
        if version != VERSION:
            raise KeyFileError(f"unsupported version {version}")
        n = (cw // 8) * (ch // 8) * cc
        body = data[HEADER.size:]
        want = n * RECORD_DTYPE.itemsize
        if len(body) < want:
            raise KeyFileError(f"truncated record section ({len(body)} of {want} bytes)")
        if len(body) > want:
            raise KeyFileError(f"{len(body) - want} trailing bytes after record section")
        recs = np.frombuffer(body, dtype=RECORD_DTYPE)
        key = cls(cw, ch, cc, k_min, sw, sh, sc, recs["k"].copy(), recs["nf"].copy())
        key.validate()
        return key

    def __eq__(self, other):
        if not isinstance(other, StegoKey):
            return NotImplemented
        return (
            (self.cover_width, self.cover_height, self.cover_channels, self.k_min,
             self.secret_width, self.secret_height, self.secret_channels)
            == (other.cover_width, other.cover_height, other.cover_channels, other.k_min,
                other.secret_width, other.secret_height, other.secret_channels)
            and np.array_equal(self.ks, other.ks)
            and np.array_equal(self.nfs, other.nfs)
        )


def write_key(key: StegoKey, path) -> None:
    data = key.to_bytes()
    try:
        with open(os.fspath(path), "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise KeyFileError(f"cannot write key file {path}: {exc}") from exc


def read_key(path) -> StegoKey:
    try:
        with open(os.fspath(path), "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise KeyFileError(f"cannot read key file {path}: {exc}") from exc
    return StegoKey.from_bytes(data)
