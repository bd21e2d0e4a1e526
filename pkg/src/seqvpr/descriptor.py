"""Per-frame feature vectors.

Two sources are supported: a built-in whole-image HOG encoder, and import
of externally precomputed descriptors (binary SVPR1 file plus a JSON
manifest carrying the technique name and its per-frame encoding time).

SVPR1 layout, all little-endian:

    magic   5 bytes  b"SVPR1"
    count   u32      number of vectors N
    dim     u32      vector length D
    payload N*D float32 values, row-major
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from PIL import Image

if TYPE_CHECKING:
    from .dataset import ImageSet

SVPR1_MAGIC = b"SVPR1"
_HEADER = struct.Struct("<5sII")


@dataclass(frozen=True)
class Descriptor:
    """A fixed-length feature vector with its cached Euclidean norm."""

    values: np.ndarray
    l2_norm: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> "Descriptor":
        values = np.ascontiguousarray(values, dtype=np.float32)
        if values.ndim != 1:
            raise ValueError("descriptor values must be a 1-D vector")
        if not np.isfinite(values).all():
            raise ValueError("descriptor contains non-finite values")
        norm = float(np.linalg.norm(values.astype(np.float64)))
        return cls(values=values, l2_norm=norm)

    def __len__(self) -> int:
        return len(self.values)


class DescriptorSet:
    """Ordered descriptors of uniform dimensionality, stored as one matrix.

    ``encode_time_per_frame`` is the mean seconds spent encoding one
    frame: measured for HOG sets, taken from the manifest for imports.
    """

    def __init__(self, matrix: np.ndarray, norms: np.ndarray,
                 encode_time_per_frame: float, technique_name: str):
        if matrix.ndim != 2 or matrix.shape[0] < 1:
            raise ValueError("descriptor matrix must be 2-D and non-empty")
        if encode_time_per_frame < 0:
            raise ValueError("encode_time_per_frame must be >= 0")
        self.matrix = matrix
        self.norms = norms
        self.encode_time_per_frame = float(encode_time_per_frame)
        self.technique_name = technique_name

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, encode_time_per_frame: float,
                    technique_name: str) -> "DescriptorSet":
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        if not np.isfinite(matrix).all():
            raise ValueError("descriptor matrix contains non-finite values")
        norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
        return cls(matrix, norms, encode_time_per_frame, technique_name)

    @classmethod
    def from_descriptors(cls, descriptors: list[Descriptor], encode_time_per_frame: float,
                         technique_name: str) -> "DescriptorSet":
        dims = {len(d) for d in descriptors}
        if len(dims) != 1:
            raise ValueError(f"descriptors have mixed dimensionality: {sorted(dims)}")
        matrix = np.stack([d.values for d in descriptors])
        norms = np.array([d.l2_norm for d in descriptors], dtype=np.float64)
        return cls(matrix, norms, encode_time_per_frame, technique_name)

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, index: int) -> Descriptor:
        return Descriptor(values=self.matrix[index], l2_norm=float(self.norms[index]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class HogParams:
    """Whole-image HOG configuration.

    Defaults: 512x512 resize, 16 px cells, 2x2-cell blocks at 1-cell
    stride, 9 unsigned orientation bins, per-block L2 normalization with
    epsilon 1e-5. Frozen so encodings are reproducible.
    """

    resize_to: tuple[int, int] = (512, 512)  # (width, height)
    cell: int = 16
    block: int = 2
    block_stride: int = 1
    bins: int = 9
    block_norm_eps: float = 1e-5

    def __post_init__(self):
        w, h = self.resize_to
        if w <= 0 or h <= 0 or self.cell <= 0 or self.bins <= 0:
            raise ValueError("resize dims, cell size and bins must be positive")
        if w % self.cell or h % self.cell:
            raise ValueError("resize dims must be divisible by the cell size")
        if self.block < 1 or self.block_stride < 1:
            raise ValueError("block and block_stride must be >= 1")
        if self.block > min(w, h) // self.cell:
            raise ValueError("block does not fit within the cell grid")

    @property
    def cells_x(self) -> int:
        return self.resize_to[0] // self.cell

    @property
    def cells_y(self) -> int:
        return self.resize_to[1] // self.cell

    @property
    def blocks_x(self) -> int:
        return (self.cells_x - self.block) // self.block_stride + 1

    @property
    def blocks_y(self) -> int:
        return (self.cells_y - self.block) // self.block_stride + 1

    @property
    def descriptor_length(self) -> int:
        return self.blocks_y * self.blocks_x * self.block * self.block * self.bins


def _centered_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """[-1, 0, 1] gradients in x and y with replicate borders."""
    gx = np.empty_like(img)
    gx[:, 1:-1] = img[:, 2:] - img[:, :-2]
    gx[:, 0] = img[:, 1] - img[:, 0]
    gx[:, -1] = img[:, -1] - img[:, -2]
    gy = np.empty_like(img)
    gy[1:-1, :] = img[2:, :] - img[:-2, :]
    gy[0, :] = img[1, :] - img[0, :]
    gy[-1, :] = img[-1, :] - img[-2, :]
    return gx, gy


def encode_hog(image: np.ndarray, params: HogParams = HogParams()) -> Descriptor:
    """Encode one grayscale frame as a whole-image HOG descriptor.

    Pipeline: bilinear resize to ``params.resize_to``, centered-difference
    gradients, magnitude-weighted votes into unsigned orientation bins per
    cell, then concatenation of L2-normalized block histograms in
    row-major block order (cells row-major within each block). The result
    is a pure function of the pixel data and parameters.
    """
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("expected a 2-D grayscale image")
    if image.size == 0:
        raise ValueError("degenerate image with 0 pixels")
    if image.dtype != np.uint8:
        raise ValueError("expected an 8-bit grayscale image")

    w, h = params.resize_to
    if image.shape != (h, w):
        image = np.asarray(Image.fromarray(image).resize((w, h), Image.BILINEAR))

    img = image.astype(np.float64)
    gx, gy = _centered_gradients(img)
    magnitude = np.hypot(gx, gy)
    # Unsigned orientation in [0, 180); bin width is 180/bins degrees.
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    bin_index = np.minimum((angle * params.bins / 180.0).astype(np.intp), params.bins - 1)

    cy, cx, c = params.cells_y, params.cells_x, params.cell
    cell_hist = np.empty((cy, cx, params.bins), dtype=np.float64)
    for b in range(params.bins):
        votes = np.where(bin_index == b, magnitude, 0.0)
        cell_hist[:, :, b] = votes.reshape(cy, c, cx, c).sum(axis=(1, 3))

    windows = np.lib.stride_tricks.sliding_window_view(
        cell_hist, (params.block, params.block), axis=(0, 1)
    )[::params.block_stride, ::params.block_stride]
    # windows: (blocks_y, blocks_x, bins, block, block) -> row-major cells, bins last
    blocks = np.transpose(windows, (0, 1, 3, 4, 2)).reshape(
        params.blocks_y, params.blocks_x, params.block * params.block * params.bins
    )
    ssq = np.sum(blocks * blocks, axis=2, keepdims=True)
    blocks = blocks / np.sqrt(ssq + params.block_norm_eps**2)
    return Descriptor.from_values(blocks.ravel().astype(np.float32))


def encode_set(images: "ImageSet", params: HogParams = HogParams(),
               technique_name: str = "HOG") -> DescriptorSet:
    """HOG-encode every frame, measuring the mean wall time per frame."""
    if len(images) == 0:
        raise ValueError("cannot encode an empty image set")
    start = time.perf_counter()
    descriptors = [encode_hog(frame, params) for frame in images.frames]
    elapsed = time.perf_counter() - start
    return DescriptorSet.from_descriptors(
        descriptors,
        encode_time_per_frame=elapsed / len(images),
        technique_name=technique_name,
    )


def write_matrix_svpr1(path: str | Path, matrix: np.ndarray) -> None:
    """Write a 2-D float32 matrix in the SVPR1 binary format."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    if matrix.ndim != 2:
        raise ValueError("SVPR1 stores 2-D matrices")
    n, d = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SVPR1_MAGIC, n, d))
        fh.write(matrix.astype("<f4", copy=False).tobytes())


def read_matrix_svpr1(path: str | Path) -> np.ndarray:
    """Read an SVPR1 file back into an (N, D) float32 matrix."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, n, d = _HEADER.unpack_from(raw)
    if magic != SVPR1_MAGIC:
        raise ValueError(f"{path}: magic mismatch (got {magic!r})")
    expected = _HEADER.size + n * d * 4
    if len(raw) != expected:
        raise ValueError(f"{path}: size mismatch (expected {expected} bytes, got {len(raw)})")
    values = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    return values.reshape(n, d).copy()


def export_descriptors(data_path: str | Path, descriptors: DescriptorSet,
                       manifest_path: str | Path | None = None) -> None:
    """Write a DescriptorSet as SVPR1 data plus its JSON manifest."""
    write_matrix_svpr1(data_path, descriptors.matrix)
    if manifest_path is not None:
        manifest = {
            "technique_name": descriptors.technique_name,
            "encode_time_per_frame_sec": descriptors.encode_time_per_frame,
        }
        Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def import_descriptors(data_path: str | Path, manifest_path: str | Path) -> DescriptorSet:
    """Load precomputed descriptors with their manifest.

    The manifest must carry ``technique_name`` and a non-negative
    ``encode_time_per_frame_sec``; vector norms are computed on load.
    """
    matrix = read_matrix_svpr1(data_path)
    if not np.isfinite(matrix).all():
        raise ValueError(f"{data_path}: non-finite descriptor values")
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{manifest_path}: invalid JSON: {exc}") from exc
    try:
        name = manifest["technique_name"]
        encode_time = float(manifest["encode_time_per_frame_sec"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{manifest_path}: missing or malformed manifest field: {exc}") from exc
    if encode_time < 0:
        raise ValueError(f"{manifest_path}: negative encode_time_per_frame_sec")
    return DescriptorSet.from_matrix(matrix, encode_time_per_frame=encode_time,
                                     technique_name=str(name))
