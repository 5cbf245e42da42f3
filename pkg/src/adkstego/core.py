"""Embedding and extraction.

Every 8x8 window of every channel is transformed, quantized with the
quality-50 JPEG luminance table, and the side ``k`` of the largest fully
non-zero top-left block of quantized coefficients is found (raised to the
policy's ``k_min``). The ``k x k`` block keeps the cover's unquantized
coefficients; the other ``64 - k*k`` positions (the L-region) are overwritten
with secret bytes scaled into ``[0, nf]``, where ``nf`` is the ceiling of the
largest replaced coefficient magnitude.

Windows are processed channel by channel, row-major inside a channel. Secret
bytes are the secret image flattened row-major with channels interleaved per
pixel, and are assigned to slots by a prefix sum over per-window slot counts,
so the result does not depend on how the windows are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, GeometryError, KeyFileError
from .keyfile import StegoKey
from .metrics import EmbedReport, capacity_bpp, k_histogram, mse, psnr_from_mse
from .pixel_io import PlaneImage, check_windowable
from .transform import N, forward_dct, inverse_dct, merge_windows, split_windows

JPEG_Q50 = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)
JPEG_Q50.setflags(write=False)

DRY_RUN_SEED = 20170101


def _l_masks() -> np.ndarray:
    u = np.arange(N)[:, None]
    v = np.arange(N)[None, :]
    return np.stack([~((u < k) & (v < k)) for k in range(N + 1)])


# L_MASKS[k] is True on the L-region of a window whose dominant block is k x k.
L_MASKS = _l_masks()
L_MASKS.setflags(write=False)
# Flat row-major slot positions of the L-region for each k.
SLOT_POSITIONS = [np.flatnonzero(L_MASKS[k]) for k in range(N + 1)]


@dataclass(frozen=True)
class KPolicy:
    """Floor on the retained block size; ``k_min=1`` is fully adaptive."""

    k_min: int = 1

    def __post_init__(self):
        if not isinstance(self.k_min, (int, np.integer)) or not 1 <= self.k_min <= N:
            raise ValueError(f"k_min must be an integer in 1..{N}, got {self.k_min!r}")

    @classmethod
    def parse(cls, text: str) -> "KPolicy":
        t = text.strip().lower()
        if t in ("a", "adaptive"):
            return cls(1)
        try:
            return cls(int(t))
        except ValueError:
            raise ValueError(f"invalid k_min {text!r}; use 'a' or an integer 1..{N}") from None

    @property
    def label(self) -> str:
        return "adaptive" if self.k_min == 1 else f"k_min={self.k_min}"


ADAPTIVE = KPolicy(1)


@dataclass(frozen=True)
class WindowRecord:
    k: int
    nf: int

    def __post_init__(self):
        if not 1 <= self.k <= N:
            raise ValueError(f"k must be in 1..{N}, got {self.k}")
        if self.nf < 1:
            raise ValueError(f"nf must be >= 1, got {self.nf}")
        if self.k == N and self.nf != 1:
            raise ValueError("a window with k=8 carries no payload and must have nf=1")

    @property
    def slots(self) -> int:
        return N * N - self.k * self.k


def round_half_away(x):
    """Round to nearest integer, ties away from zero (float result)."""
    x = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def _div_round_half_away(num, den):
    # exact integer rounding of num/den for den > 0
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    mag = (2 * np.abs(num) + den) // (2 * den)
    return np.sign(num) * mag


def quantize(c, q=JPEG_Q50) -> np.ndarray:
    return round_half_away(np.asarray(c, dtype=np.float64) / q).astype(np.int64)


def dominant_block_size(d, policy: KPolicy = ADAPTIVE):
    """Side of the largest fully non-zero top-left square, floored at 1 and at ``k_min``.

    Accepts one ``(8, 8)`` window (returns ``int``) or a stack (returns an array).
    """
    nz = np.asarray(d) != 0
    k0 = np.zeros(nz.shape[:-2], dtype=np.int64)
    for k in range(1, N + 1):
        # squares are nested, so counting the full ones gives the largest
        k0 += nz[..., :k, :k].all(axis=(-2, -1))
    k = np.clip(np.maximum(k0, policy.k_min), 1, N)
    return int(k) if k.ndim == 0 else k


def compute_nf(c, k):
    """Ceiling of the largest replaced coefficient magnitude, at least 1."""
    c = np.abs(np.asarray(c, dtype=np.float64))
    k = np.asarray(k, dtype=np.int64)
    peak = np.where(L_MASKS[k], c, 0.0).max(axis=(-2, -1))
    nf = np.maximum(np.ceil(peak), 1).astype(np.int64)
    nf = np.where(k == N, 1, nf)
    return int(nf) if nf.ndim == 0 else nf


def normalize_pixel(si, nf):
    """Scale an 8-bit value into ``[0, nf]``: ``round(si * nf / 255)``."""
    out = _div_round_half_away(np.asarray(si, dtype=np.int64) * nf, 255)
    return int(out) if out.ndim == 0 else out


def denormalize_pixel(nsi, nf):
    """Snap an extracted coefficient to its integer code and rescale to 8 bits."""
    code = round_half_away(nsi).astype(np.int64)
    out = np.clip(_div_round_half_away(code * 255, nf), 0, 255)
    return int(out) if out.ndim == 0 else out.astype(np.uint8)


def _fill_l_regions(flat, ks, nfs, offsets, payload):
    """Overwrite the L-region of each flattened window in place."""
    n_payload = payload.size
    for kval in range(1, N):
        sel = np.flatnonzero(ks == kval)
        if sel.size == 0:
            continue
        pos = SLOT_POSITIONS[kval]
        idx = offsets[sel, None] + np.arange(pos.size)[None, :]
        valid = idx < n_payload
        codes = np.zeros(idx.shape, dtype=np.int64)
        if valid.any():
            nf = np.broadcast_to(nfs[sel, None], idx.shape)
            codes[valid] = normalize_pixel(payload[idx[valid]], nf[valid])
        flat[sel[:, None], pos[None, :]] = codes


def _as_bytes_array(payload) -> np.ndarray:
    if isinstance(payload, (bytes, bytearray, memoryview)):
        return np.frombuffer(payload, dtype=np.uint8)
    return np.asarray(payload, dtype=np.uint8).reshape(-1)


def embed_window(cover_c, payload=b"", policy: KPolicy = ADAPTIVE, q=JPEG_Q50):
    """Embed into a single coefficient window.

    Returns ``(modified, WindowRecord, consumed)``. ``payload`` supplies the
    next bytes of the secret stream; unused slots are set to 0.
    """
    c = np.asarray(cover_c, dtype=np.float64)
    k = dominant_block_size(quantize(c, q), policy)
    nf = compute_nf(c, k)
    data = _as_bytes_array(payload)
    slots = N * N - k * k
    used = min(slots, data.size)
    flat = c.reshape(1, N * N).copy()
    _fill_l_regions(flat, np.array([k]), np.array([nf]), np.array([0]), data[:used])
    return flat.reshape(N, N), WindowRecord(k, nf), used


def _chunks(n: int, workers: int):
    workers = max(1, min(int(workers), n or 1))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def _run(fn, ranges, workers):
    if workers <= 1 or len(ranges) <= 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))


def _plane_windows(planes: np.ndarray) -> np.ndarray:
    return np.concatenate([split_windows(p) for p in planes]) if len(planes) else np.empty((0, N, N))


def _planes_from_windows(windows: np.ndarray, channels: int, height: int, width: int) -> np.ndarray:
    per = (height // N) * (width // N)
    return np.stack([merge_windows(windows[c * per:(c + 1) * per], height, width) for c in range(channels)])


def plan_windows(cover: PlaneImage, policy: KPolicy = ADAPTIVE, q=JPEG_Q50, workers: int = 1):
    """Return cover coefficients plus per-window ``k`` and ``nf`` in processing order."""
    check_windowable(cover)
    windows = _plane_windows(cover.planes.astype(np.float64))
    n = windows.shape[0]
    coeffs = np.empty_like(windows)
    ks = np.empty(n, dtype=np.int64)
    nfs = np.empty(n, dtype=np.int64)

    def work(a, b):
        c = forward_dct(windows[a:b])
        coeffs[a:b] = c
        ks[a:b] = dominant_block_size(quantize(c, q), policy)
        nfs[a:b] = compute_nf(c, ks[a:b])

    _run(work, _chunks(n, workers), workers)
    return coeffs, ks, nfs


def capacity_slots(cover: PlaneImage, policy: KPolicy = ADAPTIVE, q=JPEG_Q50) -> int:
    _, ks, _ = plan_windows(cover, policy, q)
    return int((N * N - ks * ks).sum())


def secret_payload(secret: PlaneImage) -> np.ndarray:
    """Row-major pixels, channels interleaved per pixel."""
    return secret.to_hwc().reshape(-1)


def embed_planes(cover: PlaneImage, payload, policy: KPolicy = ADAPTIVE, q=JPEG_Q50, workers: int = 1):
    """Embed a byte payload and return real-valued stego planes (no spatial rounding).

    Returns ``(planes, ks, nfs)`` where ``planes`` has shape ``(C, H, W)``.
    """
    payload = _as_bytes_array(payload)
    coeffs, ks, nfs = plan_windows(cover, policy, q, workers)
    slots = N * N - ks * ks
    available = int(slots.sum())
    if payload.size > available:
        raise CapacityError(available, int(payload.size))
    offsets = np.concatenate([[0], np.cumsum(slots)[:-1]]).astype(np.int64)
    n = coeffs.shape[0]
    flat = coeffs.reshape(n, N * N)
    spatial = np.empty_like(coeffs)

    def work(a, b):
        _fill_l_regions(flat[a:b], ks[a:b], nfs[a:b], offsets[a:b], payload)
        spatial[a:b] = inverse_dct(coeffs[a:b])

    _run(work, _chunks(n, workers), workers)
    planes = _planes_from_windows(spatial, cover.channels, cover.height, cover.width)
    return planes, ks, nfs


def to_uint8(planes: np.ndarray) -> np.ndarray:
    return np.clip(round_half_away(planes), 0, 255).astype(np.uint8)


def _make_key(cover: PlaneImage, secret_geometry, policy: KPolicy, ks, nfs) -> StegoKey:
    sw, sh, sc = secret_geometry
    return StegoKey(cover.width, cover.height, cover.channels, policy.k_min, sw, sh, sc, ks, nfs)


def embed_image(cover: PlaneImage, secret: PlaneImage, policy: KPolicy = ADAPTIVE, *,
                q=JPEG_Q50, workers: int = 1):
    """Hide ``secret`` in ``cover``. Returns ``(stego, key, report)``."""
    payload = secret_payload(secret)
    planes, ks, nfs = embed_planes(cover, payload, policy, q, workers)
    stego = PlaneImage(to_uint8(planes))
    key = _make_key(cover, (secret.width, secret.height, secret.channels), policy, ks, nfs)
    err = mse(cover, stego)
    report = EmbedReport(
        capacity_bpp=capacity_bpp(key),
        mse=err,
        psnr_db=psnr_from_mse(err),
        k_histogram=k_histogram(ks),
        payload_bytes_used=int(payload.size),
    )
    return stego, key, report


def dry_run(cover: PlaneImage, policy: KPolicy = ADAPTIVE, seed: int = DRY_RUN_SEED, *,
            q=JPEG_Q50, workers: int = 1) -> EmbedReport:
    """Embed a seeded pseudo-random payload that fills every slot and report the result."""
    _, ks, _ = plan_windows(cover, policy, q, workers)
    total = int((N * N - ks * ks).sum())
    payload = np.random.default_rng(seed).integers(0, 256, size=total, dtype=np.uint8)
    planes, ks, nfs = embed_planes(cover, payload, policy, q, workers)
    err = mse(cover.planes, to_uint8(planes))
    key = _make_key(cover, (0, 0, 1), policy, ks, nfs)
    return EmbedReport(capacity_bpp(key), err, psnr_from_mse(err), k_histogram(ks), total)


def extract_planes(planes, key: StegoKey, workers: int = 1) -> np.ndarray:
    """Recover the secret byte stream from stego planes (uint8 or real-valued)."""
    key.validate()
    planes = np.asarray(planes, dtype=np.float64)
    if planes.shape != (key.cover_channels, key.cover_height, key.cover_width):
        raise GeometryError(
            f"stego geometry {planes.shape[2] if planes.ndim == 3 else '?'}x"
            f"{planes.shape[1] if planes.ndim == 3 else '?'}x{planes.shape[0]} does not match key "
            f"{key.cover_width}x{key.cover_height}x{key.cover_channels}"
        )
    ks = key.ks.astype(np.int64)
    nfs = key.nfs.astype(np.int64)
    slots = N * N - ks * ks
    need = key.secret_bytes
    if need > int(slots.sum()):
        raise KeyFileError(f"key declares {need} secret bytes but only {int(slots.sum())} slots exist")
    offsets = np.concatenate([[0], np.cumsum(slots)[:-1]]).astype(np.int64)
    windows = _plane_windows(planes)
    out = np.zeros(need, dtype=np.uint8)
    # only windows holding payload bytes need a transform
    last = int(np.searchsorted(offsets, need, side="left")) if need else 0

    def work(a, b):
        c = forward_dct(windows[a:b]).reshape(b - a, N * N)
        for kval in range(1, N):
            sel = np.flatnonzero(ks[a:b] == kval)
            if sel.size == 0:
                continue
            pos = SLOT_POSITIONS[kval]
            idx = offsets[a + sel, None] + np.arange(pos.size)[None, :]
            valid = idx < need
            if not valid.any():
                continue
            vals = c[sel[:, None], pos[None, :]]
            nf = np.broadcast_to(nfs[a + sel, None], idx.shape)
            out[idx[valid]] = denormalize_pixel(vals[valid], nf[valid])

    _run(work, _chunks(last, workers), workers)
    return out


def extract_image(stego: PlaneImage, key: StegoKey, workers: int = 1) -> PlaneImage:
    data = extract_planes(stego.planes, key, workers)
    channels = key.secret_channels or 1
    return PlaneImage.from_hwc(data.reshape(key.secret_height, key.secret_width, channels))


def bytes_per_window(key: StegoKey) -> np.ndarray:
    """Window index that carries each secret byte, in payload order."""
    slots = key.slot_counts()
    return np.repeat(np.arange(slots.size), slots)[: key.secret_bytes]


def recovery_bound(nf) -> np.ndarray:
    """Worst-case scale-and-back error for a window scale: ``ceil(255 / (2 nf))``."""
    nf = np.asarray(nf, dtype=np.int64)
    return -(-255 // (2 * nf))


__all__ = [
    "ADAPTIVE",
    "DRY_RUN_SEED",
    "JPEG_Q50",
    "KPolicy",
    "WindowRecord",
    "bytes_per_window",
    "capacity_slots",
    "compute_nf",
    "denormalize_pixel",
    "dominant_block_size",
    "dry_run",
    "embed_image",
    "embed_planes",
    "embed_window",
    "extract_image",
    "extract_planes",
    "normalize_pixel",
    "plan_windows",
    "quantize",
    "recovery_bound",
    "round_half_away",
    "secret_payload",
    "to_uint8",
]
