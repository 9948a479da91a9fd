"""Per-camera processing pipeline: filter cascade, isochronal learning,
and event gating glued into one ingest loop.

One pipeline owns one camera's mutable state (single writer); its outputs
are immutable snapshots. The isochronal store receives one aggregate per
completed minute, accumulated as a running sum so frame rate does not
affect memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config
from .events import ActivityEvent, EventGate
from .filters import BandOutputs, BandParams, CascadeFilter
from .isochron import IsochronalStore, minute_of_day
from .motion import N_DIR_BINS, MotionFrame


@dataclass
class IngestResult:
    bands: BandOutputs
    decision: int
    activity: float
    closed_event: ActivityEvent | None = None


def band_params_from_config(config: Config) -> BandParams:
    f = config.filter
    return BandParams(
        t_l1_s=f.t_l1_s,
        t_l2_days=f.t_l2_days,
        t_s1_s=f.t_s1_s,
        t_s2_s=f.t_s2_s,
        frame_rate=f.frame_rate,
        shortterm_rate=f.shortterm_rate,
    )


@dataclass
class _MinuteAccumulator:
    """Running sum of the noise-free band over the current minute."""

    minute: int | None = None
    density: np.ndarray | None = None
    hist: np.ndarray | None = None
    count: int = 0

    def add(self, frame: MotionFrame) -> None:
        if self.density is None:
            self.density = frame.density.copy()
            self.hist = frame.dir_hist.copy()
        else:
            self.density = self.density + frame.density
            self.hist = self.hist + frame.dir_hist
        self.count += 1

    def aggregate(self) -> MotionFrame:
        assert self.density is not None and self.count > 0
        return MotionFrame(
            density=self.density / self.count,
            dir_hist=self.hist / self.count,
            timestamp_ms=(self.minute or 0) * 60_000,
        )

    def reset(self, minute: int, grid_w: int, grid_h: int) -> None:
        self.minute = minute
        self.density = np.zeros((grid_h, grid_w))
        self.hist = np.zeros((grid_h, grid_w, N_DIR_BINS))
        self.count = 0


class CameraPipeline:
    """Single-camera ingest loop over motion frames."""

    def __init__(
        self,
        camera_id: str,
        grid_w: int,
        grid_h: int,
        config: Config,
        store: IsochronalStore | None = None,
    ):
        self.camera_id = camera_id
        self.grid_w = grid_w
        self.grid_h = grid_h
        self.params = band_params_from_config(config)
        self.cascade = CascadeFilter(grid_w, grid_h, self.params)
        self.store = store or IsochronalStore(
            camera_id, grid_w, grid_h, t_l2_days=config.filter.t_l2_days
        )
        ev = config.events
        self.gate = EventGate(
            camera_id,
            k_sigma=ev.k_sigma,
            cooldown_s=ev.cooldown_s,
            min_threshold=ev.min_threshold,
            min_days=ev.min_days,
            decision_rate_hz=config.filter.shortterm_rate,
        )
        self.events: list[ActivityEvent] = []
        self.frames_ingested = 0
        self.last_bands: BandOutputs | None = None
        self._acc = _MinuteAccumulator()
        self._ticks = 0
        self._last_decision = 0
        self._last_activity = 0.0

    def ingest(self, frame: MotionFrame) -> IngestResult:
        minute = minute_of_day(frame.timestamp_ms)
        if self._acc.minute is None:
            self._acc.reset(minute, self.grid_w, self.grid_h)
        elif minute != self._acc.minute:
            self._flush_minute()
            self._acc.reset(minute, self.grid_w, self.grid_h)

        bands = self.cascade.step(frame)
        self._acc.add(bands.m_l1)
        self._ticks += 1
        self.frames_ingested += 1
        self.last_bands = bands

        closed = None
        if self._ticks % self.params.stride == 0:
            stats = self.store.scalar_stats(minute)
            decision, closed = self.gate.step(
                bands.m_s1, bands.m_s2, stats, frame.timestamp_ms
            )
            if closed is not None:
                self.events.append(closed)
            self._last_decision = decision
            self._last_activity = float(
                np.maximum(bands.m_s1.density, bands.m_s2.density).mean()
            )
        return IngestResult(
            bands=bands,
            decision=self._last_decision,
            activity=self._last_activity,
            closed_event=closed,
        )

    def _flush_minute(self) -> None:
        if self._acc.count > 0 and self._acc.minute is not None:
            self.store.update(self._acc.minute, self._acc.aggregate())

    def finish(self) -> None:
        """Flush the partial minute and close any open event."""
        self._flush_minute()
        self._acc = _MinuteAccumulator()
        tail = self.gate.flush()
        if tail is not None:
            self.events.append(tail)
