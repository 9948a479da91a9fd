"""Block-motion feature extraction from grayscale frame pairs.

A frame pair is reduced to a coarse grid of blocks, each carrying two
features: a motion *density* (dimensionless magnitude in [0, 1]) and an
8-bin histogram of quantized motion directions. Densities are means over
the block's pixels of ``|curr - prev| * gradient magnitude`` (both
normalized), so a block full of unchanged pixels scores exactly zero.

Direction is the angle of the spatial gradient oriented along the apparent
motion: the gradient of the mean frame, sign-corrected by the temporal
difference, so a bright object moving right votes into the 0-degree bin on
both its leading and trailing edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidParameterError, RejectedInputError

N_DIR_BINS = 8

# Peak response of a 3x3 Sobel pair on 8-bit input: (4*255, 4*255).
_SOBEL_MAX = 4.0 * math.sqrt(2.0) * 255.0


@dataclass(frozen=True)
class GrayFrame:
    """Single grayscale frame, row-major luminance in [0, 255]."""

    pixels: np.ndarray
    timestamp_ms: int = 0

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise RejectedInputError(f"expected 2-D pixel array, got shape {px.shape}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass
class MotionBlock:
    """Per-block motion features: scalar density plus 8 direction bins."""

    density: float = 0.0
    dir_hist: np.ndarray = field(default_factory=lambda: np.zeros(N_DIR_BINS))

    def __post_init__(self) -> None:
        h = np.asarray(self.dir_hist, dtype=np.float64)
        if h.shape != (N_DIR_BINS,):
            raise RejectedInputError(f"dir_hist must have {N_DIR_BINS} bins, got {h.shape}")
        self.dir_hist = h

    def dominant_direction(self) -> int:
        """Argmax bin index; ties resolve to the lowest index."""
        return int(np.argmax(self.dir_hist))


@dataclass
class MotionFrame:
    """Grid of block-motion features at one instant.

    ``density`` has shape (grid_h, grid_w); ``dir_hist`` has shape
    (grid_h, grid_w, 8). Blocks are addressed as (bx, by) with bx the
    column index.
    """

    density: np.ndarray
    dir_hist: np.ndarray
    timestamp_ms: int = 0

    def __post_init__(self) -> None:
        d = np.asarray(self.density, dtype=np.float64)
        h = np.asarray(self.dir_hist, dtype=np.float64)
        if d.ndim != 2 or d.size == 0:
            raise RejectedInputError(f"density must be a non-empty 2-D grid, got shape {d.shape}")
        if h.shape != d.shape + (N_DIR_BINS,):
            raise RejectedInputError(
                f"dir_hist shape {h.shape} does not match density grid {d.shape}"
            )
        self.density = d
        self.dir_hist = h

    @classmethod
    def zeros(cls, grid_w: int, grid_h: int, timestamp_ms: int = 0) -> "MotionFrame":
        if grid_w < 1 or grid_h < 1:
            raise InvalidParameterError("grid dimensions must be positive")
        return cls(
            density=np.zeros((grid_h, grid_w)),
            dir_hist=np.zeros((grid_h, grid_w, N_DIR_BINS)),
            timestamp_ms=timestamp_ms,
        )

    @property
    def grid_w(self) -> int:
        return self.density.shape[1]

    @property
    def grid_h(self) -> int:
        return self.density.shape[0]

    @property
    def n_blocks(self) -> int:
        return self.density.size

    def block(self, bx: int, by: int) -> MotionBlock:
        return MotionBlock(float(self.density[by, bx]), self.dir_hist[by, bx].copy())

    def copy(self) -> "MotionFrame":
        return MotionFrame(self.density.copy(), self.dir_hist.copy(), self.timestamp_ms)

    def same_grid(self, other: "MotionFrame") -> bool:
        return self.density.shape == other.density.shape


def _sobel(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel gradients with edge-replicated borders.

    Returns (gx, gy) where gy is positive toward increasing row index.
    """
    p = np.pad(img, 1, mode="edge")
    gx = (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]) - (
        p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2]
    )
    gy = (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]) - (
        p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:]
    )
    return gx, gy


def extract_motion(
    prev: GrayFrame,
    curr: GrayFrame,
    block_size: int = 16,
    noise_floor: float = 8.0,
) -> MotionFrame:
    """Reduce a frame pair to block-motion features.

    Parameters
    ----------
    prev, curr : GrayFrame
        Consecutive frames of identical dimensions.
    block_size : int
        Block edge in pixels. Edge blocks narrower than this are averaged
        over their actual pixel count.
    noise_floor : float
        Per-pixel |curr - prev| below this contributes nothing.

    Returns
    -------
    MotionFrame
        One block per ceil(h/bs) x ceil(w/bs) cell; density and histogram
        entries are non-negative, and a block with zero density has an
        all-zero histogram.
    """
    if block_size < 1:
        raise InvalidParameterError(f"block_size must be >= 1, got {block_size}")
    if noise_floor < 0:
        raise InvalidParameterError(f"noise_floor must be >= 0, got {noise_floor}")
    if prev.pixels.shape != curr.pixels.shape:
        raise RejectedInputError(
            f"frame dimensions differ: {prev.pixels.shape} vs {curr.pixels.shape}"
        )

    p = prev.pixels.astype(np.float64)
    c = curr.pixels.astype(np.float64)
    h, w = c.shape

    signed = c - p
    diff = np.abs(signed)
    diff[diff < noise_floor] = 0.0

    gx, gy = _sobel((p + c) * 0.5)
    gmag = np.hypot(gx, gy)
    # Per-pixel weight in [0, 1]; zero wherever either factor vanishes.
    weight = (diff / 255.0) * (gmag / _SOBEL_MAX)

    grid_h = -(-h // block_size)
    grid_w = -(-w // block_size)
    brow = np.arange(h) // block_size
    bcol = np.arange(w) // block_size
    flat = (brow[:, None] * grid_w + bcol[None, :]).ravel()

    counts = np.bincount(flat, minlength=grid_h * grid_w).astype(np.float64)
    density = np.bincount(flat, weights=weight.ravel(), minlength=grid_h * grid_w)
    density = (density / counts).reshape(grid_h, grid_w)

    # Motion direction: gradient of the mean frame, sign-corrected by the
    # temporal difference (y measured upward, i.e. toward decreasing rows).
    moving = weight.ravel() > 0.0
    hist = np.zeros(grid_h * grid_w * N_DIR_BINS)
    if moving.any():
        vx = (-np.sign(signed) * gx).ravel()[moving]
        vy = (np.sign(signed) * gy).ravel()[moving]
        ang = np.arctan2(vy, vx)
        bins = np.round(ang / (math.pi / 4.0)).astype(np.int64) % N_DIR_BINS
        idx = flat[moving] * N_DIR_BINS + bins
        hist = np.bincount(idx, weights=weight.ravel()[moving], minlength=hist.size)
    dir_hist = hist.reshape(grid_h, grid_w, N_DIR_BINS) / counts.reshape(grid_h, grid_w, 1)

    return MotionFrame(density=density, dir_hist=dir_hist, timestamp_ms=curr.timestamp_ms)


def aggregate_minute(frames: Sequence[MotionFrame]) -> MotionFrame:
    """Per-block arithmetic mean of a minute's worth of motion frames.

    The output timestamp is the first frame's minute boundary.
    """
    if len(frames) == 0:
        raise InvalidParameterError("cannot aggregate an empty frame sequence")
    first = frames[0]
    for f in frames[1:]:
        if not first.same_grid(f):
            raise RejectedInputError(
                f"mixed grids in aggregate: {first.density.shape} vs {f.density.shape}"
            )
    density = np.mean(np.stack([f.density for f in frames]), axis=0)
    dir_hist = np.mean(np.stack([f.dir_hist for f in frames]), axis=0)
    minute_start = first.timestamp_ms // 60_000 * 60_000
    return MotionFrame(density=density, dir_hist=dir_hist, timestamp_ms=minute_start)


# ---------------------------------------------------------------------------
# Interchange: JSON-lines and PGM
# ---------------------------------------------------------------------------

def motion_to_json(frame: MotionFrame, band: str | None = None) -> str:
    """One JSON line: {"t", "gw", "gh", "blocks": [[density, [h0..h7]], ...]}.

    Field order is fixed; floats keep full precision. ``band`` appends a
    band label for filtered streams.
    """
    blocks = [
        [float(frame.density[by, bx]), [float(v) for v in frame.dir_hist[by, bx]]]
        for by in range(frame.grid_h)
        for bx in range(frame.grid_w)
    ]
    obj: dict = {"t": frame.timestamp_ms, "gw": frame.grid_w, "gh": frame.grid_h, "blocks": blocks}
    if band is not None:
        obj["band"] = band
    return json.dumps(obj, separators=(",", ":"))


def motion_from_json(line: str) -> tuple[MotionFrame, str | None]:
    """Inverse of :func:`motion_to_json`; returns (frame, band-or-None)."""
    obj = json.loads(line)
    gw, gh = int(obj["gw"]), int(obj["gh"])
    blocks = obj["blocks"]
    if len(blocks) != gw * gh:
        raise RejectedInputError(f"expected {gw * gh} blocks, got {len(blocks)}")
    density = np.empty((gh, gw))
    hist = np.empty((gh, gw, N_DIR_BINS))
    for i, (d, bins) in enumerate(blocks):
        by, bx = divmod(i, gw)
        density[by, bx] = d
        hist[by, bx] = bins
    frame = MotionFrame(density=density, dir_hist=hist, timestamp_ms=int(obj["t"]))
    return frame, obj.get("band")


def write_jsonl(path: str | Path, frames: Iterable[MotionFrame]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(motion_to_json(frame) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> Iterator[MotionFrame]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield motion_from_json(line)[0]


def write_pgm(path: str | Path, frame: GrayFrame) -> None:
    """Binary (P5) PGM, maxval 255, no comment lines."""
    px = np.clip(np.round(frame.pixels), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode("ascii"))
        fh.write(px.tobytes())


def read_pgm(path: str | Path, timestamp_ms: int = 0) -> GrayFrame:
    with open(path, "rb") as fh:
        data = fh.read()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise RejectedInputError(f"not a binary PGM (magic {fields[0]!r})")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval > 255:
        raise RejectedInputError(f"16-bit PGM unsupported (maxval {maxval})")
    pos += 1  # single whitespace after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise RejectedInputError("PGM raster truncated")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayFrame(pixels=pixels.copy(), timestamp_ms=timestamp_ms)
