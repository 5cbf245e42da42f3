"""Adaptive dominant-block DCT image steganography.

A secret image is hidden in a cover image by keeping, in every 8x8 DCT
window, the largest fully non-zero top-left block of quantized coefficients
and overwriting the remaining L-shaped region with scaled secret pixels.
"""

from .core import (
    JPEG_Q50,
    KPolicy,
    WindowRecord,
    compute_nf,
    denormalize_pixel,
    dominant_block_size,
    embed_image,
    embed_window,
    extract_image,
    normalize_pixel,
    quantize,
)
from .errors import (
    CapacityError,
    GeometryError,
    ImageFormatError,
    KeyFileError,
    LossyContainerError,
    StegoError,
)
from .keyfile import StegoKey, read_key, write_key
from .metrics import EmbedReport, capacity_bpp, mse, psnr
from .pixel_io import PlaneImage, check_windowable, load_image, save_image
from .transform import forward_dct, inverse_dct

__version__ = "0.1.0"

__all__ = [
    "JPEG_Q50",
    "CapacityError",
    "EmbedReport",
    "GeometryError",
    "ImageFormatError",
    "KPolicy",
    "KeyFileError",
    "LossyContainerError",
    "PlaneImage",
    "StegoError",
    "StegoKey",
    "WindowRecord",
    "capacity_bpp",
    "check_windowable",
    "compute_nf",
    "denormalize_pixel",
    "dominant_block_size",
    "embed_image",
    "embed_window",
    "extract_image",
    "forward_dct",
    "inverse_dct",
    "load_image",
    "mse",
    "normalize_pixel",
    "psnr",
    "quantize",
    "read_key",
    "save_image",
    "write_key",
]
