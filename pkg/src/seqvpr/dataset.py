"""Dataset loading: image traverses, ground truth, and synthetic fixtures.

A traverse is a directory of sequentially named PNG/JPEG frames. Ground
truth maps each query index to an inclusive range of acceptable reference
indices, either read from a CSV file or generated for index-aligned
traverses with a frame tolerance.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

import numpy as np
from PIL import Image

if TYPE_CHECKING:
    from .descriptor import DescriptorSet

DEFAULT_EXTENSIONS = frozenset({"png", "jpg", "jpeg"})

DEFAULT_GT_TOLERANCE = 2


@dataclass(frozen=True)
class ImageSet:
    """An ordered traverse of 8-bit grayscale frames."""

    frames: list[np.ndarray]
    source_paths: list[str]

    def __post_init__(self):
        if len(self.frames) == 0:
            raise ValueError("ImageSet requires at least one frame")
        if len(self.frames) != len(self.source_paths):
            raise ValueError("frames and source_paths must have equal length")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class GroundTruth:
    """Per-query inclusive reference ranges [lo_i, hi_i].

    ``tolerance`` is the frame tolerance used to build aligned ground
    truth; it is None for ranges loaded from a file.
    """

    lo: np.ndarray
    hi: np.ndarray
    num_refs: int
    tolerance: int | None = None

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.int64)
        hi = np.asarray(self.hi, dtype=np.int64)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-D arrays of equal length")
        if np.any(lo < 0) or np.any(hi >= self.num_refs):
            raise ValueError("ground-truth range outside [0, num_refs)")
        if np.any(hi < lo):
            raise ValueError("ground-truth range has hi < lo")
        if self.tolerance is not None and self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")

    def __len__(self) -> int:
        return len(self.lo)

    def entry(self, query_index: int) -> tuple[int, int]:
        return int(self.lo[query_index]), int(self.hi[query_index])


def _natural_key(name: str) -> tuple:
    """Sort key treating digit runs as numbers, so img2 precedes img10."""
    parts = re.split(r"(\d+)", name)
    return tuple(int(p) if p.isdigit() else p for p in parts)


def load_image_set(
    directory: str | Path,
    extensions: Iterable[str] = DEFAULT_EXTENSIONS,
) -> ImageSet:
    """Load every matching image in ``directory`` as 8-bit grayscale.

    Frames are ordered by numeric-aware filename sort, which is stable
    across runs and filesystems.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"image directory not found: {directory}")
    suffixes = {"." + e.lower().lstrip(".") for e in extensions}
    paths = sorted(
        (p for p in directory.iterdir() if p.suffix.lower() in suffixes),
        key=lambda p: _natural_key(p.name),
    )
    if not paths:
        raise ValueError(f"no frames in {directory}")
    frames = []
    for path in paths:
        try:
            with Image.open(path) as img:
                # PIL "L" conversion applies the ITU-R BT.601 luma weights.
                arr = np.asarray(img.convert("L"), dtype=np.uint8)
        except Exception as exc:
            raise ValueError(f"cannot decode image {path}: {exc}") from exc
        frames.append(arr)
    return ImageSet(frames=frames, source_paths=[str(p) for p in paths])


def load_ground_truth(
    csv_path: str | Path,
    num_queries: int,
    num_refs: int,
) -> GroundTruth:
    """Read ``query_index,ref_lo,ref_hi`` rows; the header row is optional.

    Every query index in [0, num_queries) must appear exactly once.
    """
    csv_path = Path(csv_path)
    if not csv_path.is_file():
        raise FileNotFoundError(f"ground-truth file not found: {csv_path}")
    lo = np.full(num_queries, -1, dtype=np.int64)
    hi = np.full(num_queries, -1, dtype=np.int64)
    seen = np.zeros(num_queries, dtype=bool)
    with open(csv_path, newline="", encoding="utf-8") as fh:
        for row_num, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip() != ""]
            if not cells:
                continue
            if row_num == 1 and not cells[0].lstrip("-").isdigit():
                continue  # header
            if len(cells) != 3:
                raise ValueError(f"{csv_path}:{row_num}: expected 3 columns, got {len(cells)}")
            try:
                q, r_lo, r_hi = (int(c) for c in cells)
            except ValueError as exc:
                raise ValueError(f"{csv_path}:{row_num}: non-integer value") from exc
            if not 0 <= q < num_queries:
                raise ValueError(f"{csv_path}:{row_num}: query index {q} out of range")
            if seen[q]:
                raise ValueError(f"{csv_path}:{row_num}: duplicate query index {q}")
            if not (0 <= r_lo < num_refs and 0 <= r_hi < num_refs):
                raise ValueError(f"{csv_path}:{row_num}: reference range out of range")
            if r_hi < r_lo:
                raise ValueError(f"{csv_path}:{row_num}: hi {r_hi} < lo {r_lo}")
            seen[q] = True
            lo[q], hi[q] = r_lo, r_hi
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise ValueError(f"{csv_path}: missing entry for query index {missing}")
    return GroundTruth(lo=lo, hi=hi, num_refs=num_refs, tolerance=None)


def aligned_ground_truth(num_queries: int, num_refs: int, tolerance: int) -> GroundTruth:
    """Ground truth for index-aligned traverses: entry i = [i-T, i+T] clipped."""
    if num_queries > num_refs:
        raise ValueError("aligned ground truth requires num_queries <= num_refs")
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    idx = np.arange(num_queries, dtype=np.int64)
    lo = np.maximum(0, idx - tolerance)
    hi = np.minimum(num_refs - 1, idx + tolerance)
    return GroundTruth(lo=lo, hi=hi, num_refs=num_refs, tolerance=tolerance)


def write_ground_truth_csv(gt: GroundTruth, csv_path: str | Path) -> None:
    """Write ground truth in the same CSV layout ``load_ground_truth`` reads."""
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["query_index", "ref_lo", "ref_hi"])
        for i in range(len(gt)):
            writer.writerow([i, int(gt.lo[i]), int(gt.hi[i])])


def generate_synthetic(
    num_places: int,
    dim: int,
    noise_sigma: float,
    seed: int,
) -> tuple["DescriptorSet", "DescriptorSet", GroundTruth]:
    """Build a desk-scale descriptor dataset with known ground truth.

    Reference descriptor i is the one-hot basis vector e_i; query i is
    e_i plus per-component Gaussian noise, L2-normalized. Ground truth is
    index-aligned with tolerance 0, so with zero noise every query's own
    reference is its unique best cosine match.
    """
    from .descriptor import DescriptorSet

    if dim < num_places:
        raise ValueError(f"dim ({dim}) must be >= num_places ({num_places})")
    if num_places < 1:
        raise ValueError("num_places must be >= 1")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")

    refs = np.zeros((num_places, dim), dtype=np.float32)
    refs[np.arange(num_places), np.arange(num_places)] = 1.0

    rng = np.random.default_rng(seed)
    queries = refs.astype(np.float64) + rng.normal(0.0, noise_sigma, size=(num_places, dim))
    norms = np.linalg.norm(queries, axis=1, keepdims=True)
    queries = (queries / norms).astype(np.float32)

    gt = aligned_ground_truth(num_places, num_places, tolerance=0)
    query_set = DescriptorSet.from_matrix(queries, encode_time_per_frame=0.0,
                                          technique_name="synthetic")
    ref_set = DescriptorSet.from_matrix(refs, encode_time_per_frame=0.0,
                                        technique_name="synthetic")
    return query_set, ref_set, gt
