"""Lossless image I/O as per-channel 8-bit planes.

Only PNG (8-bit gray/RGB) and binary PNM (P5/P6) are accepted. Lossy
containers are refused on both read and write because recompression destroys
the embedded coefficients.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import GeometryError, ImageFormatError, LossyContainerError

WINDOW = 8

LOSSY_FORMATS = {"JPEG", "MPO", "WEBP", "JPEG2000", "HEIF", "AVIF"}
LOSSY_SUFFIXES = {".jpg", ".jpeg", ".jpe", ".jfif", ".webp", ".jp2", ".j2k", ".heic", ".avif"}
WRITE_SUFFIXES = {".png", ".pgm", ".ppm", ".pnm"}


@dataclass(frozen=True, eq=False)
class PlaneImage:
    """An image stored as a ``(channels, height, width)`` uint8 array."""

    planes: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.planes)
        if p.ndim != 3:
            raise GeometryError(f"planes must be 3-D (channels, height, width), got shape {p.shape}")
        if p.shape[0] not in (1, 3):
            raise GeometryError(f"channels must be 1 or 3, got {p.shape[0]}")
        if p.dtype != np.uint8:
            if not np.issubdtype(p.dtype, np.integer):
                raise GeometryError(f"samples must be integers, got dtype {p.dtype}")
            if p.size and (p.min() < 0 or p.max() > 255):
                raise GeometryError("samples must lie in [0, 255]")
            p = p.astype(np.uint8)
        p = np.ascontiguousarray(p)
        p.setflags(write=False)
        object.__setattr__(self, "planes", p)

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @classmethod
    def from_hwc(cls, array) -> "PlaneImage":
        """Build from a ``(H, W)`` or ``(H, W, C)`` array as produced by PIL/numpy."""
        a = np.asarray(array)
        if a.ndim == 2:
            a = a[:, :, None]
        return cls(np.moveaxis(a, -1, 0))

    def to_hwc(self) -> np.ndarray:
        return np.ascontiguousarray(np.moveaxis(self.planes, 0, -1))

    def __eq__(self, other):
        if not isinstance(other, PlaneImage):
            return NotImplemented
        return self.planes.shape == other.planes.shape and bool(np.array_equal(self.planes, other.planes))

    def __repr__(self):
        return f"PlaneImage(width={self.width}, height={self.height}, channels={self.channels})"


def load_image(path) -> PlaneImage:
    path = os.fspath(path)
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt in LOSSY_FORMATS:
                raise LossyContainerError(f"{path}: lossy container ({fmt}) cannot carry stego data")
            if fmt not in ("PNG", "PPM"):
                raise ImageFormatError(f"{path}: unsupported format {fmt}")
            if im.mode == "P":
                # palette expansion is exact, not a colour-space conversion
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
            if im.mode not in ("L", "RGB"):
                raise ImageFormatError(f"{path}: unsupported pixel mode {im.mode}; need 8-bit gray or RGB")
            data = np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: unrecognised image file") from exc
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot read image ({exc})") from exc
    return PlaneImage.from_hwc(data)


def check_output_path(path, channels: int) -> str:
    """Validate that ``path`` names a lossless container able to hold ``channels``."""
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    if suffix in LOSSY_SUFFIXES:
        raise LossyContainerError(f"{path}: refusing to write a lossy container")
    if suffix not in WRITE_SUFFIXES:
        raise ImageFormatError(f"{path}: unsupported output format {suffix or '(none)'}")
    if suffix == ".pgm" and channels != 1:
        raise ImageFormatError(f"{path}: PGM holds 1 channel, image has {channels}")
    if suffix == ".ppm" and channels != 3:
        raise ImageFormatError(f"{path}: PPM holds 3 channels, image has {channels}")
    return suffix


def save_image(img: PlaneImage, path) -> None:
    path = os.fspath(path)
    suffix = check_output_path(path, img.channels)

    hwc = img.to_hwc()
    pil = Image.fromarray(hwc[:, :, 0] if img.channels == 1 else hwc)
    try:
        if suffix == ".png":
            pil.save(path, format="PNG", optimize=False, compress_level=6)
        else:
            pil.save(path, format="PPM")
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot write image ({exc})") from exc


def check_windowable(img: PlaneImage) -> None:
    if img.width % WINDOW:
        raise GeometryError(f"width {img.width} is not a multiple of {WINDOW}")
    if img.height % WINDOW:
        raise GeometryError(f"height {img.height} is not a multiple of {WINDOW}")


def crop_to_multiple_of_8(img: PlaneImage) -> PlaneImage:
    """Trim the right and bottom edges so both sides are multiples of 8."""
    h = img.height - img.height % WINDOW
    w = img.width - img.width % WINDOW
    if h == 0 or w == 0:
        raise GeometryError(f"image {img.width}x{img.height} is smaller than one {WINDOW}x{WINDOW} window")
    return PlaneImage(img.planes[:, :h, :w])
