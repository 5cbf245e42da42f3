"""Operation counts of a fast N x N 2-D DCT and the cost of multi-size transforms.

A competing scheme transforms the cover at several large window sizes to pick
the best one; this module tallies what that costs on top of the single 8x8
pass used here.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

COMPARED_SIZES = (64, 128, 256)


def _log2_exact(n: int) -> int:
    if not isinstance(n, int) or n < 8 or n & (n - 1):
        raise ValueError(f"window size must be a power of two >= 8, got {n!r}")
    return n.bit_length() - 1


def _as_int(value: Fraction) -> int:
    if value.denominator != 1:
        raise ArithmeticError(f"operation count {value} is not an integer")
    return value.numerator


def dct_mults(n: int) -> int:
    """Multiplications: n^2/2 log2 n + n^2/3 - 2n + 8/3."""
    m = _log2_exact(n)
    return _as_int(Fraction(n * n * m, 2) + Fraction(n * n, 3) - 2 * n + Fraction(8, 3))


def dct_adds(n: int) -> int:
    """Additions: 5 n^2/2 log2 n + n^2/3 - 6n + 62/3."""
    m = _log2_exact(n)
    return _as_int(Fraction(5 * n * n * m, 2) + Fraction(n * n, 3) - 6 * n + Fraction(62, 3))


@dataclass(frozen=True)
class CostRow:
    window_size: int
    windows: int
    adds_per_window: int
    mults_per_window: int
    total_adds: int
    total_mults: int


@dataclass(frozen=True)
class CostTable:
    image_size: int
    corrected_windows: bool
    rows: tuple
    total_adds: int
    total_mults: int

    def to_dict(self) -> dict:
        return {
            "image_size": self.image_size,
            "corrected_windows": self.corrected_windows,
            "rows": [asdict(r) for r in self.rows],
            "total_adds": self.total_adds,
            "total_mults": self.total_mults,
        }

    def format_text(self) -> str:
        head = ("window", "windows", "adds/window", "mults/window", "total adds", "total mults")
        lines = [head] + [
            (f"{r.window_size}x{r.window_size}", str(r.windows), str(r.adds_per_window),
             str(r.mults_per_window), str(r.total_adds), str(r.total_mults))
            for r in self.rows
        ]
        lines.append(("total", "", "", "", str(self.total_adds), str(self.total_mults)))
        widths = [max(len(row[i]) for row in lines) for i in range(len(head))]
        return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in lines)


def extra_cost_table(image_size: int = 512, corrected_windows: bool = False) -> CostTable:
    """Cost of transforming a square image at 64, 128 and 256 window sizes.

    By default the window count per size is ``image_size // n``, the linear
    count used in the published comparison. ``corrected_windows=True`` uses
    the true tiling count ``(image_size // n) ** 2``.
    """
    if not isinstance(image_size, int) or image_size <= 0 or image_size % max(COMPARED_SIZES):
        raise ValueError(f"image size must be a positive multiple of {max(COMPARED_SIZES)}, got {image_size!r}")
    rows = []
    for n in COMPARED_SIZES:
        windows = image_size // n
        if corrected_windows:
            windows *= windows
        adds, mults = dct_adds(n), dct_mults(n)
        rows.append(CostRow(n, windows, adds, mults, windows * adds, windows * mults))
    return CostTable(
        image_size=image_size,
        corrected_windows=corrected_windows,
        rows=tuple(rows),
        total_adds=sum(r.total_adds for r in rows),
        total_mults=sum(r.total_mults for r in rows),
    )
