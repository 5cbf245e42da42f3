"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 capacity error, 4 format/geometry
error, 5 key error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import __version__
from .core import DRY_RUN_SEED, KPolicy, dry_run, embed_image, extract_image, secret_payload
from .costmodel import extra_cost_table
from .errors import CapacityError, StegoError
from .keyfile import read_key, write_key
from .metrics import mse, psnr_from_mse
from .pixel_io import (
    PlaneImage,
    WRITE_SUFFIXES,
    check_output_path,
    check_windowable,
    crop_to_multiple_of_8,
    load_image,
    save_image,
)

EXIT_USAGE = 2


@dataclass
class CoverChoice:
    path: str
    policy: KPolicy
    capacity_bpp: float
    psnr_db: float

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "k_min": self.policy.k_min,
            "policy": self.policy.label,
            "capacity_bpp": self.capacity_bpp,
            "psnr_db": _num(self.psnr_db),
        }


def _num(x: float):
    return "inf" if math.isinf(x) else x


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.4f}"


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _print_table(header, rows) -> None:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)))


def parse_sweep(text: str) -> list:
    try:
        return [KPolicy.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_policy(text: str) -> KPolicy:
    try:
        return KPolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_cover(path, crop: bool) -> PlaneImage:
    img = load_image(path)
    if crop:
        img = crop_to_multiple_of_8(img)
    check_windowable(img)
    return img


def cmd_embed(args) -> int:
    cover = _load_cover(args.cover, args.crop_to_multiple_of_8)
    secret = load_image(args.secret)
    check_output_path(args.stego, cover.channels)
    stego, key, report = embed_image(cover, secret, args.kmin, workers=args.workers)
    save_image(stego, args.stego)
    write_key(key, args.key)
    _print_json(report.to_dict())
    return 0


def cmd_extract(args) -> int:
    key = read_key(args.key)
    stego = load_image(args.stego)
    secret = extract_image(stego, key, workers=args.workers)
    check_output_path(args.out, secret.channels)
    save_image(secret, args.out)
    out = {
        "secret_width": secret.width,
        "secret_height": secret.height,
        "secret_channels": secret.channels,
    }
    if args.reference:
        ref = load_image(args.reference)
        err = mse(ref, secret)
        out["recovery_mse"] = err
        out["recovery_psnr_db"] = _num(psnr_from_mse(err))
    _print_json(out)
    return 0


def analyze_cover(cover: PlaneImage, sweep, seed: int = DRY_RUN_SEED, workers: int = 1) -> list:
    rows = []
    for policy in sweep:
        rep = dry_run(cover, policy, seed, workers=workers)
        rows.append({
            "policy": policy.label,
            "k_min": policy.k_min,
            "capacity_bpp": rep.capacity_bpp,
            "mse": rep.mse,
            "psnr_db": rep.psnr_db,
            "k_histogram": rep.k_histogram,
        })
    return rows


def cmd_analyze(args) -> int:
    cover = _load_cover(args.cover, args.crop_to_multiple_of_8)
    rows = analyze_cover(cover, args.kmin_sweep, args.seed, args.workers)
    if args.json:
        _print_json({
            "cover": args.cover,
            "seed": args.seed,
            "rows": [
                dict(r, psnr_db=_num(r["psnr_db"]), k_histogram={str(k): v for k, v in r["k_histogram"].items()})
                for r in rows
            ],
        })
    else:
        print(f"cover: {args.cover}  ({cover.width}x{cover.height}x{cover.channels})  seed: {args.seed}")
        _print_table(
            ("policy", "capacity_bpp", "psnr_db"),
            [(r["policy"], f"{r['capacity_bpp']:.4f}", _fmt(r["psnr_db"])) for r in rows],
        )
    return 0


def list_covers(directory) -> list:
    names = sorted(os.listdir(directory))
    return [os.path.join(directory, n) for n in names if os.path.splitext(n)[1].lower() in WRITE_SUFFIXES]


def select_cover(paths, sweep, *, min_bpp=None, secret_bytes=None, seed=DRY_RUN_SEED,
                 crop=False, workers=1, log=None):
    """Evaluate every (cover, policy) pair and return ``(best, candidates)``.

    A pair is feasible when its capacity meets ``min_bpp`` or holds
    ``secret_bytes``. The best pair has the highest PSNR; ties go to the
    lexicographically first path, then the larger ``k_min``.
    """
    candidates = []
    for path in paths:
        try:
            cover = _load_cover(path, crop)
        except StegoError as exc:
            if log:
                log(f"skipping {path}: {exc}")
            continue
        for policy in sweep:
            rep = dry_run(cover, policy, seed, workers=workers)
            if secret_bytes is not None:
                feasible = rep.payload_bytes_used >= secret_bytes
            else:
                feasible = rep.capacity_bpp >= min_bpp
            candidates.append((CoverChoice(path, policy, rep.capacity_bpp, rep.psnr_db), feasible))
    feasible = [c for c, ok in candidates if ok]
    if not feasible:
        return None, candidates
    best = min(feasible, key=lambda c: (-c.psnr_db, c.path, -c.policy.k_min))
    return best, candidates


def cmd_select_cover(args) -> int:
    paths = list_covers(args.covers)
    secret_bytes = None
    if args.secret:
        secret_bytes = int(secret_payload(load_image(args.secret)).size)
    best, candidates = select_cover(
        paths, args.kmin_sweep, min_bpp=args.min_bpp, secret_bytes=secret_bytes, seed=args.seed,
        crop=args.crop_to_multiple_of_8, workers=args.workers, log=lambda m: print(m, file=sys.stderr),
    )
    if args.json:
        _print_json({
            "seed": args.seed,
            "requirement": {"min_bpp": args.min_bpp, "secret_bytes": secret_bytes},
            "candidates": [dict(c.to_dict(), feasible=ok) for c, ok in candidates],
            "choice": best.to_dict() if best else None,
        })
    else:
        _print_table(
            ("cover", "policy", "capacity_bpp", "psnr_db", "feasible"),
            [(c.path, c.policy.label, f"{c.capacity_bpp:.4f}", _fmt(c.psnr_db), "yes" if ok else "no")
             for c, ok in candidates],
        )
        if best:
            print(f"choice: {best.path} with {best.policy.label} "
                  f"({best.capacity_bpp:.4f} bpp, {_fmt(best.psnr_db)} dB)")
    if best is None:
        print("error: no feasible cover meets the requirement", file=sys.stderr)
        return CapacityError.exit_code
    return 0


def cmd_costs(args) -> int:
    try:
        table = extra_cost_table(args.image_size, corrected_windows=args.corrected_windows)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        _print_json(table.to_dict())
    else:
        print(table.format_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adkstego", description="Adaptive dominant-block DCT steganography")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, crop=True):
        sp.add_argument("--workers", type=int, default=1, help="threads for window processing")
        if crop:
            sp.add_argument("--crop-to-multiple-of-8", action="store_true",
                            help="trim right/bottom edges of the cover to a multiple of 8")

    e = sub.add_parser("embed", help="hide a secret image in a cover image")
    e.add_argument("--cover", required=True)
    e.add_argument("--secret", required=True)
    e.add_argument("--stego", required=True, help="output stego image (.png/.ppm/.pgm)")
    e.add_argument("--key", required=True, help="output key file")
    e.add_argument("--kmin", type=parse_policy, default=KPolicy(1), help="'a' (adaptive) or 1..8")
    common(e)
    e.set_defaults(func=cmd_embed)

    x = sub.add_parser("extract", help="recover the secret image")
    x.add_argument("--stego", required=True)
    x.add_argument("--key", required=True)
    x.add_argument("--out", required=True)
    x.add_argument("--reference", help="original secret, to report recovery PSNR")
    common(x, crop=False)
    x.set_defaults(func=cmd_extract)

    a = sub.add_parser("analyze", help="capacity/PSNR for a sweep of k_min policies")
    a.add_argument("--cover", required=True)
    a.add_argument("--kmin-sweep", type=parse_sweep, default=parse_sweep("a,2,3,4"))
    a.add_argument("--seed", type=int, default=DRY_RUN_SEED)
    a.add_argument("--json", action="store_true")
    common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("select-cover", help="pick the cover/policy with best PSNR at a required capacity")
    s.add_argument("--covers", required=True, help="directory of candidate covers")
    req = s.add_mutually_exclusive_group(required=True)
    req.add_argument("--secret")
    req.add_argument("--min-bpp", type=float)
    s.add_argument("--kmin-sweep", type=parse_sweep, default=parse_sweep("a,2,3,4"))
    s.add_argument("--seed", type=int, default=DRY_RUN_SEED)
    s.add_argument("--json", action="store_true")
    common(s)
    s.set_defaults(func=cmd_select_cover)

    c = sub.add_parser("costs", help="extra 2-D DCT cost of multi-size window search")
    c.add_argument("--image-size", type=int, default=512)
    c.add_argument("--corrected-windows", action="store_true",
                   help="count (size/N)^2 windows instead of size/N")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_costs)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StegoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
