"""Long-term activity statistics per minute of day.

One store per camera holds 1440 slots, one per minute of day. Each slot
keeps an EMA of the per-minute motion aggregate (density plus direction
bins), an EMA of the squared density deviation, and a day counter. Updates
arrive once per slot per day; the EMA constant is parameterized by a
10%-decay span in days.

The first observation of a slot initializes the mean directly instead of
blending with the all-zero prior, avoiding a multi-day warm-up bias.

File format (little-endian): magic ``ISO1``, version u16, decay span f64,
length-prefixed camera id, grid dims u16 x2, then 1440 slots of
(density mean f64[gh*gw], direction bins f64[gh*gw*8], density variance
f64[gh*gw], days u32), closed by a CRC32 trailer over everything before
it. Writes go to a temp file renamed into place, so readers never observe
a partial store.
"""

from __future__ import annotations

import struct
import zlib
from io import BytesIO
from pathlib import Path
from tempfile import NamedTemporaryFile

import numpy as np

from .errors import InvalidParameterError, RejectedInputError, StoreLoadError
from .filters import alpha_from_decay
from .motion import N_DIR_BINS, MotionFrame

MINUTES_PER_DAY = 1440

_MAGIC = b"ISO1"
_VERSION = 1


def minute_of_day(timestamp_ms: int) -> int:
    return (timestamp_ms // 60_000) % MINUTES_PER_DAY


class IsochronalStore:
    """Per-minute-of-day motion statistics for one camera."""

    def __init__(self, camera_id: str, grid_w: int, grid_h: int, t_l2_days: float = 10.0):
        if grid_w < 1 or grid_h < 1:
            raise InvalidParameterError("grid dimensions must be positive")
        self.camera_id = camera_id
        self.grid_w = grid_w
        self.grid_h = grid_h
        self.t_l2_days = float(t_l2_days)
        self.alpha_l2 = alpha_from_decay(1.0, self.t_l2_days)
        self._mean_density = np.zeros((MINUTES_PER_DAY, grid_h, grid_w))
        self._mean_hist = np.zeros((MINUTES_PER_DAY, grid_h, grid_w, N_DIR_BINS))
        self._var = np.zeros((MINUTES_PER_DAY, grid_h, grid_w))
        self._days = np.zeros(MINUTES_PER_DAY, dtype=np.uint32)

    # ------------------------------------------------------------------ update

    def _check_minute(self, minute: int) -> None:
        if not 0 <= minute < MINUTES_PER_DAY:
            raise InvalidParameterError(
                f"minute-of-day must lie in [0, {MINUTES_PER_DAY - 1}], got {minute}"
            )

    def update(self, minute: int, sample: MotionFrame) -> None:
        """Blend one per-minute aggregate into the slot's statistics.

        Callers feed at most one sample per slot per day.
        """
        self._check_minute(minute)
        if (sample.grid_h, sample.grid_w) != (self.grid_h, self.grid_w):
            raise RejectedInputError(
                f"sample grid {(sample.grid_h, sample.grid_w)} does not match "
                f"store grid {(self.grid_h, self.grid_w)}"
            )
        a = self.alpha_l2
        if self._days[minute] == 0:
            self._mean_density[minute] = sample.density
            self._mean_hist[minute] = sample.dir_hist
            self._var[minute] = 0.0
        else:
            self._mean_density[minute] = (
                a * self._mean_density[minute] + (1.0 - a) * sample.density
            )
            self._mean_hist[minute] = a * self._mean_hist[minute] + (1.0 - a) * sample.dir_hist
            dev = sample.density - self._mean_density[minute]
            self._var[minute] = a * self._var[minute] + (1.0 - a) * dev * dev
        self._days[minute] += 1

    # ------------------------------------------------------------------ query

    def query(self, minute: int) -> tuple[MotionFrame, np.ndarray, int]:
        """Immutable snapshot: (mean frame, per-block density std, days seen)."""
        self._check_minute(minute)
        mean = MotionFrame(
            density=self._mean_density[minute].copy(),
            dir_hist=self._mean_hist[minute].copy(),
            timestamp_ms=minute * 60_000,
        )
        std = np.sqrt(self._var[minute])
        return mean, std, int(self._days[minute])

    def scalar_stats(self, minute: int) -> tuple[float, float, int]:
        """Block-averaged (mean activity, std, days) for threshold checks."""
        self._check_minute(minute)
        return (
            float(self._mean_density[minute].mean()),
            float(np.sqrt(self._var[minute]).mean()),
            int(self._days[minute]),
        )

    def binarize(self, epsilon: float = 1e-3) -> np.ndarray:
        """Time-collapsed support mask: per block, 1 iff any minute's mean
        density exceeds ``epsilon``."""
        if epsilon < 0:
            raise InvalidParameterError(f"epsilon must be >= 0, got {epsilon}")
        return (self._mean_density.max(axis=0) > epsilon).astype(np.uint8)

    def minute_curve(self) -> np.ndarray:
        """Block-averaged mean activity per minute, shape (1440,)."""
        return self._mean_density.mean(axis=(1, 2))

    def profile_csv(self) -> str:
        """Plot-ready per-minute profile: minute,mean_activity,std_activity."""
        std_curve = np.sqrt(self._var).mean(axis=(1, 2))
        lines = ["minute,mean_activity,std_activity"]
        for m, (mean, std) in enumerate(zip(self.minute_curve(), std_curve)):
            lines.append(f"{m},{float(mean)!r},{float(std)!r}")
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------ persistence

    def save(self, path: str | Path) -> None:
        buf = BytesIO()
        buf.write(_MAGIC)
        buf.write(struct.pack("<H", _VERSION))
        buf.write(struct.pack("<d", self.t_l2_days))
        cam = self.camera_id.encode("utf-8")
        buf.write(struct.pack("<H", len(cam)))
        buf.write(cam)
        buf.write(struct.pack("<HH", self.grid_w, self.grid_h))
        for m in range(MINUTES_PER_DAY):
            buf.write(self._mean_density[m].astype("<f8").tobytes())
            buf.write(self._mean_hist[m].astype("<f8").tobytes())
            buf.write(self._var[m].astype("<f8").tobytes())
            buf.write(struct.pack("<I", int(self._days[m])))
        payload = buf.getvalue()
        crc = zlib.crc32(payload) & 0xFFFFFFFF

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with NamedTemporaryFile(dir=path.parent, delete=False) as tmp:
            tmp.write(payload)
            tmp.write(struct.pack("<I", crc))
            tmp_path = Path(tmp.name)
        tmp_path.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "IsochronalStore":
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise StoreLoadError(f"cannot read store file {path}: {exc}") from exc
        if len(data) < len(_MAGIC) + 2 + 4:
            raise StoreLoadError(f"store file {path} is truncated")
        payload, trailer = data[:-4], data[-4:]
        (crc_stored,) = struct.unpack("<I", trailer)
        if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
            raise StoreLoadError(f"checksum mismatch in store file {path}")

        buf = BytesIO(payload)
        if buf.read(4) != _MAGIC:
            raise StoreLoadError(f"bad magic in store file {path}")
        (version,) = struct.unpack("<H", buf.read(2))
        if version != _VERSION:
            raise StoreLoadError(f"unsupported store version {version} in {path}")
        (t_l2_days,) = struct.unpack("<d", buf.read(8))
        (cam_len,) = struct.unpack("<H", buf.read(2))
        camera_id = buf.read(cam_len).decode("utf-8")
        grid_w, grid_h = struct.unpack("<HH", buf.read(4))

        store = cls(camera_id, grid_w, grid_h, t_l2_days)
        n = grid_w * grid_h
        expected = buf.getbuffer().nbytes - buf.tell()
        needed = MINUTES_PER_DAY * (8 * n * (2 + N_DIR_BINS) + 4)
        if expected != needed:
            raise StoreLoadError(
                f"store file {path} has {expected} payload bytes, expected {needed}"
            )
        for m in range(MINUTES_PER_DAY):
            store._mean_density[m] = np.frombuffer(buf.read(8 * n), dtype="<f8").reshape(
                grid_h, grid_w
            )
            store._mean_hist[m] = np.frombuffer(
                buf.read(8 * n * N_DIR_BINS), dtype="<f8"
            ).reshape(grid_h, grid_w, N_DIR_BINS)
            store._var[m] = np.frombuffer(buf.read(8 * n), dtype="<f8").reshape(grid_h, grid_w)
            (store._days[m],) = struct.unpack("<I", buf.read(4))
        return store

    # ------------------------------------------------------------------ comparison

    def equals(self, other: "IsochronalStore") -> bool:
        return (
            self.camera_id == other.camera_id
            and self.grid_w == other.grid_w
            and self.grid_h == other.grid_h
            and self.t_l2_days == other.t_l2_days
            and np.array_equal(self._mean_density, other._mean_density)
            and np.array_equal(self._mean_hist, other._mean_hist)
            and np.array_equal(self._var, other._var)
            and np.array_equal(self._days, other._days)
        )
