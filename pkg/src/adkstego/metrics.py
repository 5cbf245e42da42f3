"""Stego-image quality (MSE / PSNR) and payload accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

MAX_INTENSITY = 255.0


def _planes(img):
    return np.asarray(getattr(img, "planes", img), dtype=np.float64)


def mse(a, b) -> float:
    """Mean squared error with all channels pooled into a single mean."""
    pa, pb = _planes(a), _planes(b)
    if pa.shape != pb.shape:
        raise GeometryError(f"geometry mismatch: {pa.shape} vs {pb.shape}")
    if pa.size == 0:
        return 0.0
    d = pa - pb
    return float(np.mean(d * d))


def psnr_from_mse(value: float) -> float:
    if value <= 0:
        return math.inf
    return 20.0 * math.log10(MAX_INTENSITY / math.sqrt(value))


def psnr(a, b) -> float:
    """PSNR in dB against a peak of 255; ``math.inf`` for identical images."""
    return psnr_from_mse(mse(a, b))


def capacity_bpp(key) -> float:
    """Embeddable bits per cover pixel: one 8-bit secret byte per L-region slot."""
    slots = int(key.slot_counts().sum())
    return slots * 8 / (key.cover_width * key.cover_height)


@dataclass
class EmbedReport:
    capacity_bpp: float
    mse: float
    psnr_db: float
    k_histogram: dict = field(default_factory=dict)
    payload_bytes_used: int = 0

    def to_dict(self) -> dict:
        return {
            "capacity_bpp": self.capacity_bpp,
            "mse": self.mse,
            "psnr_db": "inf" if math.isinf(self.psnr_db) else self.psnr_db,
            "k_histogram": {str(k): int(v) for k, v in sorted(self.k_histogram.items())},
            "payload_bytes_used": self.payload_bytes_used,
        }


def k_histogram(ks) -> dict:
    counts = np.bincount(np.asarray(ks, dtype=np.int64), minlength=9)
    return {k: int(counts[k]) for k in range(1, 9)}
