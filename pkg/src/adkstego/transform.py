"""Orthonormal 8x8 2-D DCT-II and its inverse.

The basis matrix ``B[u, x] = sqrt(2/N) * C(u) * cos(pi * u * (2x + 1) / 2N)``
with ``C(0) = 1/sqrt(2)`` gives ``F = B @ f @ B.T``, which is the textbook
double sum with the ``2/N * C(u) * C(v)`` prefactor split across the two
axes. All functions accept a single ``(8, 8)`` window or any stack
``(..., 8, 8)`` of windows.
"""

from __future__ import annotations

import numpy as np

N = 8


def _basis(n: int = N) -> np.ndarray:
    u = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    b = np.sqrt(2.0 / n) * np.cos(np.pi * u * (2 * x + 1) / (2 * n))
    b[0, :] /= np.sqrt(2.0)
    return b


BASIS = _basis()
BASIS.setflags(write=False)


def forward_dct(windows) -> np.ndarray:
    w = np.asarray(windows, dtype=np.float64)
    if w.shape[-2:] != (N, N):
        raise ValueError(f"expected trailing shape ({N}, {N}), got {w.shape}")
    return BASIS @ w @ BASIS.T


def inverse_dct(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.float64)
    if c.shape[-2:] != (N, N):
        raise ValueError(f"expected trailing shape ({N}, {N}), got {c.shape}")
    return BASIS.T @ c @ BASIS


def split_windows(plane: np.ndarray) -> np.ndarray:
    """``(H, W)`` plane -> ``(H/8 * W/8, 8, 8)`` windows in row-major window order."""
    h, w = plane.shape
    return (
        plane.reshape(h // N, N, w // N, N)
        .swapaxes(1, 2)
        .reshape(-1, N, N)
    )


def merge_windows(windows: np.ndarray, height: int, width: int) -> np.ndarray:
    """Inverse of :func:`split_windows`."""
    return (
        windows.reshape(height // N, width // N, N, N)
        .swapaxes(1, 2)
        .reshape(height, width)
    )
