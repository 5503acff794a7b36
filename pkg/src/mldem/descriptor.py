"""Grid-of-histogram descriptors: extraction, kernel smoothing, and file I/O.

A descriptor divides an image into a regular grid of blocks and stores one
N-bin orientation histogram per block, together with the number of pixels
that contributed to each block. Descriptor files are line-oriented text:

    HGD1 <count> <S1> <S2> <N>
    # <label> <total_count>
    <n(k)> <b_1> ... <b_N>        (S1*S2 lines per record, row-major blocks)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .image import TWO_PI, GrayImage, compute_gradients

HISTOGRAM_SUM_TOL = 1e-9

_MAGIC = "HGD1"


class DescriptorFormatError(ValueError):
    """Raised for malformed descriptor files; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def validate_histogram(h, bins: int | None = None) -> np.ndarray:
    """Check a histogram (non-negative, unit sum) and return it as a float array."""
    arr = np.asarray(h, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"histogram must be 1-D, got shape {arr.shape}")
    if bins is not None and arr.shape[0] != bins:
        raise ValueError(f"expected {bins} bins, got {arr.shape[0]}")
    if np.any(arr < 0):
        raise ValueError("histogram bins must be non-negative")
    total = float(arr.sum())
    if abs(total - 1.0) > HISTOGRAM_SUM_TOL:
        raise ValueError(f"histogram bins must sum to 1 (got {total!r})")
    return arr


@dataclass(frozen=True, eq=False)
class SmoothingKernel:
    """Circular column-stochastic kernel mixed into histograms before distances.

    Mixing a strictly positive kernel guarantees every smoothed bin is
    positive, which keeps the logarithms in the histogram distances finite.
    """

    size: int
    sigma: float
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (self.size, self.size):
            raise ValueError(f"kernel weights must be {self.size}x{self.size}")
        if np.any(w < 0):
            raise ValueError("kernel weights must be non-negative")
        sums = w.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > HISTOGRAM_SUM_TOL):
            raise ValueError("kernel columns must sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def is_identity(self) -> bool:
        return self.sigma == 0.0


def build_smoothing_kernel(n_bins: int, sigma: float) -> SmoothingKernel:
    """Gaussian kernel over circular bin distance, columns normalized to sum 1.

    weights[i][j] is proportional to exp(-d(i,j)^2 / (2 sigma^2)) with
    d(i,j) = min(|i-j|, N-|i-j|). sigma = 0 yields the identity matrix.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be positive")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0.0:
        return SmoothingKernel(n_bins, 0.0, np.eye(n_bins))
    idx = np.arange(n_bins)
    diff = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(diff, n_bins - diff)
    w = np.exp(-(dist.astype(np.float64) ** 2) / (2.0 * sigma * sigma))
    w /= w.sum(axis=0, keepdims=True)
    return SmoothingKernel(n_bins, float(sigma), w)


def smooth(h, kernel: SmoothingKernel) -> np.ndarray:
    """Apply the kernel to one histogram: out[i] = sum_j weights[i][j] * h[j]."""
    arr = np.asarray(h, dtype=np.float64)
    if arr.shape != (kernel.size,):
        raise ValueError(f"histogram has {arr.shape[0]} bins, kernel expects {kernel.size}")
    return kernel.weights @ arr


@dataclass(frozen=True, eq=False)
class GridDescriptor:
    """S1 x S2 grid of N-bin histograms plus per-block sample counts.

    Attributes:
        label: class identifier.
        rows, cols: grid dimensions (S1, S2).
        bins: histogram bins per block (N).
        histograms: (rows*cols, bins) array, blocks in row-major order.
        block_counts: (rows*cols,) contributing-sample count per block.
        total_count: sum of block_counts.
    """

    label: int
    rows: int
    cols: int
    bins: int
    histograms: np.ndarray
    block_counts: np.ndarray
    total_count: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.bins < 1:
            raise ValueError("rows, cols and bins must be positive")
        hists = np.array(self.histograms, dtype=np.float64)
        k = self.rows * self.cols
        if hists.shape != (k, self.bins):
            raise ValueError(
                f"histograms must have shape ({k}, {self.bins}), got {hists.shape}"
            )
        if np.any(hists < 0):
            raise ValueError("histogram bins must be non-negative")
        sums = hists.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > HISTOGRAM_SUM_TOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ValueError(f"block {bad} histogram sums to {sums[bad]!r}, not 1")
        counts = np.array(self.block_counts, dtype=np.int64)
        if counts.shape != (k,):
            raise ValueError(f"block_counts must have shape ({k},), got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("block_counts must be non-negative")
        if int(counts.sum()) != int(self.total_count):
            raise ValueError(
                f"total_count {self.total_count} != sum of block_counts {int(counts.sum())}"
            )
        hists.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "histograms", hists)
        object.__setattr__(self, "block_counts", counts)
        object.__setattr__(self, "total_count", int(self.total_count))

    @property
    def num_blocks(self) -> int:
        return self.rows * self.cols

    def block(self, s1: int, s2: int) -> np.ndarray:
        """Histogram of block (s1, s2), 0-based row/column indices."""
        return self.histograms[s1 * self.cols + s2]

    def smoothed(self, kernel: SmoothingKernel) -> "GridDescriptor":
        """Return a copy with every block histogram smoothed by the kernel."""
        if kernel.size != self.bins:
            raise ValueError(f"kernel size {kernel.size} != descriptor bins {self.bins}")
        if kernel.is_identity:
            return self
        return GridDescriptor(
            label=self.label,
            rows=self.rows,
            cols=self.cols,
            bins=self.bins,
            histograms=self.histograms @ kernel.weights.T,
            block_counts=self.block_counts,
            total_count=self.total_count,
        )


def smooth_descriptors(
    descriptors: Sequence[GridDescriptor], kernel: SmoothingKernel
) -> list[GridDescriptor]:
    """Smooth every descriptor in a set with the same kernel."""
    return [d.smoothed(kernel) for d in descriptors]


def extract_descriptor(
    img: GrayImage,
    rows: int = 10,
    cols: int = 10,
    bins: int = 8,
    weighted: bool = True,
    kernel: SmoothingKernel | None = None,
    label: int = 0,
) -> GridDescriptor:
    """Extract the grid-of-histograms descriptor of a grayscale image.

    The image is partitioned into a rows x cols grid with block boundaries
    at floor(s * height / rows) and floor(s * width / cols). Each block
    accumulates an orientation histogram over its pixels with non-zero
    gradient magnitude (bin index floor(orientation * bins / (2*pi)),
    weight = magnitude when `weighted` else 1), then L1-normalizes it.
    Blocks with no contributing pixels get the uniform histogram. When a
    kernel is given, smoothing is applied once here and the result stored.

    Args:
        img: source image.
        rows, cols: grid dimensions.
        bins: orientation bins per block.
        weighted: weight votes by gradient magnitude.
        kernel: optional smoothing kernel (size must equal `bins`).
        label: class label to attach.

    Raises:
        ValueError: if the grid is finer than the image ("grid too fine").
    """
    if rows < 1 or cols < 1 or bins < 1:
        raise ValueError("rows, cols and bins must be positive")
    if kernel is not None and kernel.size != bins:
        raise ValueError(f"kernel size {kernel.size} != bins {bins}")
    row_edges = [(s * img.height) // rows for s in range(rows + 1)]
    col_edges = [(s * img.width) // cols for s in range(cols + 1)]
    if any(b - a < 1 for a, b in zip(row_edges, row_edges[1:])) or any(
        b - a < 1 for a, b in zip(col_edges, col_edges[1:])
    ):
        raise ValueError(
            f"grid too fine: {rows}x{cols} blocks do not fit a "
            f"{img.width}x{img.height} image"
        )

    mag, ori = compute_gradients(img)
    bin_idx = np.minimum((ori * (bins / TWO_PI)).astype(np.int64), bins - 1)

    k = rows * cols
    hists = np.empty((k, bins), dtype=np.float64)
    counts = np.empty(k, dtype=np.int64)
    for b1 in range(rows):
        r0, r1 = row_edges[b1], row_edges[b1 + 1]
        for b2 in range(cols):
            c0, c1 = col_edges[b2], col_edges[b2 + 1]
            m = mag[r0:r1, c0:c1]
            sel = m > 0
            idx = bin_idx[r0:r1, c0:c1][sel]
            w = m[sel] if weighted else np.ones(idx.shape[0])
            hist = np.bincount(idx, weights=w, minlength=bins)
            total = hist.sum()
            if total > 0:
                hist = hist / total
            else:
                hist = np.full(bins, 1.0 / bins)
            if kernel is not None and not kernel.is_identity:
                hist = kernel.weights @ hist
            blk = b1 * cols + b2
            hists[blk] = hist
            counts[blk] = int(np.count_nonzero(sel))
    return GridDescriptor(
        label=label,
        rows=rows,
        cols=cols,
        bins=bins,
        histograms=hists,
        block_counts=counts,
        total_count=int(counts.sum()),
    )


def write_descriptors(stream: TextIO, descriptors: Sequence[GridDescriptor]) -> None:
    """Write descriptors to an open text stream in the HGD1 format."""
    if descriptors:
        first = descriptors[0]
        rows, cols, bins = first.rows, first.cols, first.bins
        for d in descriptors:
            if (d.rows, d.cols, d.bins) != (rows, cols, bins):
                raise ValueError("all descriptors in a file must share grid and bins")
    else:
        rows = cols = bins = 1
    stream.write(f"{_MAGIC} {len(descriptors)} {rows} {cols} {bins}\n")
    for d in descriptors:
        stream.write(f"# {d.label} {d.total_count}\n")
        for blk in range(d.num_blocks):
            vals = " ".join(repr(v) for v in d.histograms[blk])
            stream.write(f"{int(d.block_counts[blk])} {vals}\n")


def save_descriptors(path, descriptors: Sequence[GridDescriptor]) -> None:
    """Save a descriptor set to a file (see module docstring for the format)."""
    with open(path, "w", encoding="utf-8") as fh:
        write_descriptors(fh, descriptors)


def parse_descriptor_block(lines: Sequence[str], offset: int = 0) -> tuple[list[GridDescriptor], int]:
    """Parse an HGD1 block starting at `lines[offset]`.

    Returns the descriptors and the index of the first unconsumed line.
    Line numbers in errors are 1-based over the full `lines` sequence.
    """
    def err(i: int, msg: str) -> DescriptorFormatError:
        return DescriptorFormatError(i + 1, msg)

    if offset >= len(lines):
        raise err(offset, "missing descriptor header")
    header = lines[offset].split()
    if len(header) != 5 or header[0] != _MAGIC:
        raise err(offset, f"malformed header (expected '{_MAGIC} count S1 S2 N')")
    try:
        count, rows, cols, bins = (int(tok) for tok in header[1:])
    except ValueError:
        raise err(offset, "malformed header (non-integer field)") from None
    if count < 0 or rows < 1 or cols < 1 or bins < 1:
        raise err(offset, "malformed header (non-positive dimensions)")

    k = rows * cols
    pos = offset + 1
    out: list[GridDescriptor] = []
    for _ in range(count):
        if pos >= len(lines):
            raise err(pos, "unexpected end of file inside record")
        rec = lines[pos].split()
        if len(rec) != 3 or rec[0] != "#":
            raise err(pos, "expected record header '# <label> <total_count>'")
        try:
            label, total = int(rec[1]), int(rec[2])
        except ValueError:
            raise err(pos, "record header fields must be integers") from None
        pos += 1
        hists = np.empty((k, bins), dtype=np.float64)
        counts = np.empty(k, dtype=np.int64)
        for blk in range(k):
            if pos >= len(lines):
                raise err(pos, "unexpected end of file inside record")
            fields = lines[pos].split()
            if len(fields) != bins + 1:
                raise err(pos, f"expected {bins + 1} values, got {len(fields)}")
            try:
                counts[blk] = int(fields[0])
                hists[blk] = [float(v) for v in fields[1:]]
            except ValueError:
                raise err(pos, "non-numeric value in block line") from None
            if counts[blk] < 0:
                raise err(pos, "block sample count must be non-negative")
            if np.any(hists[blk] < 0):
                raise err(pos, "histogram bins must be non-negative")
            s = float(hists[blk].sum())
            if abs(s - 1.0) > HISTOGRAM_SUM_TOL:
                raise err(pos, f"histogram does not sum to 1 (got {s!r})")
            pos += 1
        if int(counts.sum()) != total:
            raise err(pos - 1, f"total_count {total} != sum of block counts {int(counts.sum())}")
        out.append(
            GridDescriptor(
                label=label,
                rows=rows,
                cols=cols,
                bins=bins,
                histograms=hists,
                block_counts=counts,
                total_count=total,
            )
        )
    return out, pos


def load_descriptors(path) -> list[GridDescriptor]:
    """Load a descriptor set saved by `save_descriptors`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    descs, pos = parse_descriptor_block(lines, 0)
    while pos < len(lines) and not lines[pos].strip():
        pos += 1
    if pos != len(lines):
        raise DescriptorFormatError(pos + 1, "trailing content after last record")
    return descs
