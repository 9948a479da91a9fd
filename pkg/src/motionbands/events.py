"""Activity-event gating and the hybrid throughput/energy model.

The gate turns the two short-term bands into a scalar activity sample (per
block, the larger of in-place and moving density; then the block mean) and
fires when that sample exceeds the learned per-minute mean plus a chosen
number of standard deviations. While a store has seen fewer than
``min_days`` days the learned spread is unreliable, so a fixed threshold
floor takes over.

Consecutive firings belong to one event; an event closes only after
``cooldown_s`` of consecutive quiet decisions, which keeps brief dips from
fragmenting a single burst of activity. A closed event's duration covers
its last positive decision's full tick.

Gating exists to spend expensive per-frame detection only where it pays:
the pipeline invokes the detector once per event onset (optionally
re-invoking every N seconds during long events) and reports exact counts,
which feed the energy model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidParameterError, RejectedInputError
from .filters import BandOutputs
from .isochron import IsochronalStore, minute_of_day

BAND_IN_PLACE = "in-place"
BAND_MOVING = "moving"
BAND_BOTH = "both"


@dataclass
class ActivityEvent:
    """One gated activity interval with its trigger context."""

    camera_id: str
    start_ms: int
    end_ms: int | None  # None while the event is still open
    peak: float
    band: str
    threshold_mean: float
    threshold_std: float
    k_sigma: float

    @property
    def duration_ms(self) -> int:
        if self.end_ms is None:
            return 0
        return self.end_ms - self.start_ms

    def to_json_obj(self) -> dict:
        return {
            "cam": self.camera_id,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "peak": self.peak,
            "band": self.band,
        }


class DetectorStub:
    """Deterministic stand-in for a heavyweight object detector.

    Costs ``frame_cost`` frames per invocation and reports the block mask
    of planted actors when simulator ground truth is attached, otherwise an
    empty mask. Stateless between invocations.
    """

    def __init__(self, frame_cost: int = 1, ground_truth=None):
        if frame_cost < 1:
            raise InvalidParameterError("frame_cost must be >= 1")
        self.frame_cost = frame_cost
        self._truth = ground_truth

    def detect(self, timestamp_ms: int, grid_w: int, grid_h: int) -> np.ndarray:
        mask = np.zeros((grid_h, grid_w), dtype=bool)
        if self._truth is not None:
            for bx, by in self._truth.active_blocks(timestamp_ms):
                if 0 <= bx < grid_w and 0 <= by < grid_h:
                    mask[by, bx] = True
        return mask


def scalar_activity(m_s1, m_s2) -> float:
    """Block mean of the per-block max of the two short-term densities."""
    if m_s1.density.shape != m_s2.density.shape:
        raise RejectedInputError(
            f"band grids differ: {m_s1.density.shape} vs {m_s2.density.shape}"
        )
    return float(np.maximum(m_s1.density, m_s2.density).mean())


class EventGate:
    """Stateful threshold gate over a per-camera band stream."""

    def __init__(
        self,
        camera_id: str,
        k_sigma: float = 2.0,
        cooldown_s: float = 3.0,
        min_threshold: float = 0.02,
        min_days: int = 3,
        decision_rate_hz: float = 1.0,
    ):
        if k_sigma < 0:
            raise InvalidParameterError("k_sigma must be >= 0")
        if cooldown_s < 0:
            raise InvalidParameterError("cooldown_s must be >= 0")
        if decision_rate_hz <= 0:
            raise InvalidParameterError("decision_rate_hz must be > 0")
        self.camera_id = camera_id
        self.k_sigma = k_sigma
        self.min_threshold = min_threshold
        self.min_days = min_days
        self.tick_ms = int(round(1000.0 / decision_rate_hz))
        self.cooldown_ticks = int(np.ceil(cooldown_s * decision_rate_hz))
        self._open: ActivityEvent | None = None
        self._quiet_run = 0
        self._last_hit_ms = 0

    def threshold(self, mean: float, std: float, days: int) -> float:
        if days < self.min_days:
            return self.min_threshold
        return mean + self.k_sigma * std

    def step(
        self,
        m_s1,
        m_s2,
        stats: tuple[float, float, int],
        timestamp_ms: int,
    ) -> tuple[int, ActivityEvent | None]:
        """One gate decision. Returns (0/1, event closed by this step)."""
        mean, std, days = stats
        a = scalar_activity(m_s1, m_s2)
        fired = a > self.threshold(mean, std, days)

        closed: ActivityEvent | None = None
        if fired:
            self._quiet_run = 0
            self._last_hit_ms = timestamp_ms
            if self._open is None:
                s1m = float(m_s1.density.mean())
                s2m = float(m_s2.density.mean())
                if s1m > s2m:
                    band = BAND_IN_PLACE
                elif s2m > s1m:
                    band = BAND_MOVING
                else:
                    band = BAND_BOTH
                self._open = ActivityEvent(
                    camera_id=self.camera_id,
                    start_ms=timestamp_ms,
                    end_ms=None,
                    peak=a,
                    band=band,
                    threshold_mean=mean,
                    threshold_std=std,
                    k_sigma=self.k_sigma,
                )
            else:
                self._open.peak = max(self._open.peak, a)
        elif self._open is not None:
            self._quiet_run += 1
            if self._quiet_run >= self.cooldown_ticks:
                closed = self._close()
        return (1 if fired else 0), closed

    def _close(self) -> ActivityEvent:
        event = self._open
        assert event is not None
        # The last positive decision's tick belongs to the event.
        event.end_ms = self._last_hit_ms + self.tick_ms
        self._open = None
        self._quiet_run = 0
        return event

    def flush(self) -> ActivityEvent | None:
        """Close any event still open at end of stream."""
        if self._open is None:
            return None
        return self._close()


@dataclass
class GateReport:
    """Outcome of running the gate over a band stream."""

    events: list[ActivityEvent]
    detector_invocations: int
    frames_processed: int
    decisions: int = 0
    detections: list[tuple[int, int]] = field(default_factory=list)  # (t_ms, hits)


def gate_pipeline(
    band_stream: Iterable[BandOutputs] | Iterator[BandOutputs],
    store: IsochronalStore,
    detector: DetectorStub,
    k_sigma: float = 2.0,
    cooldown_s: float = 3.0,
    min_threshold: float = 0.02,
    min_days: int = 3,
    decision_rate_hz: float = 1.0,
    reinvoke_every_s: float = 0.0,
) -> GateReport:
    """Run event gating over a time-aligned band stream.

    The detector runs once per event onset; ``reinvoke_every_s`` > 0 adds
    periodic re-invocation while an event stays open (off by default).
    """
    gate = EventGate(
        store.camera_id,
        k_sigma=k_sigma,
        cooldown_s=cooldown_s,
        min_threshold=min_threshold,
        min_days=min_days,
        decision_rate_hz=decision_rate_hz,
    )
    events: list[ActivityEvent] = []
    detections: list[tuple[int, int]] = []
    invocations = 0
    frames = 0
    decisions = 0
    in_event = False
    last_invoke_ms = 0

    for bands in band_stream:
        t = bands.timestamp_ms
        stats = store.scalar_stats(minute_of_day(t))
        decision, closed = gate.step(bands.m_s1, bands.m_s2, stats, t)
        frames += 1
        decisions += decision
        if closed is not None:
            events.append(closed)
            in_event = False
        if decision:
            invoke = False
            if not in_event:
                in_event = True
                invoke = True
            elif reinvoke_every_s > 0 and t - last_invoke_ms >= reinvoke_every_s * 1000.0:
                invoke = True
            if invoke:
                mask = detector.detect(t, bands.m_s1.grid_w, bands.m_s1.grid_h)
                detections.append((t, int(mask.sum())))
                invocations += 1
                last_invoke_ms = t

    tail = gate.flush()
    if tail is not None:
        events.append(tail)
    return GateReport(
        events=events,
        detector_invocations=invocations,
        frames_processed=frames,
        decisions=decisions,
        detections=detections,
    )


def duty_cycle(events: Iterable[ActivityEvent], workday_h: float) -> float:
    """Fraction of the workday covered by closed events."""
    if workday_h <= 0:
        raise InvalidParameterError("workday_h must be > 0")
    total_ms = sum(e.duration_ms for e in events if e.end_ms is not None)
    return total_ms / (workday_h * 3600.0 * 1000.0)


# ---------------------------------------------------------------------------
# Energy model
# ---------------------------------------------------------------------------

ENERGY_MODES = ("activity", "hybrid", "continuous")


@dataclass(frozen=True)
class EnergyModel:
    """Power/throughput inputs for the workload energy estimate.

    ``activity_power_w`` is the total draw of running activity filtering
    for the whole camera set; the detector terms scale per camera.
    """

    activity_power_w: float
    detector_power_w: float
    detector_fps: float
    cameras: int = 1
    workday_h: float = 10.0

    def __post_init__(self) -> None:
        for name in ("activity_power_w", "detector_power_w", "detector_fps", "workday_h"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0")
        if self.cameras < 1:
            raise InvalidParameterError("cameras must be >= 1")


def energy_estimate(model: EnergyModel, mode: str, events_per_camera_day: float = 300.0) -> float:
    """Watt-hours per workday for one operating mode.

    * ``activity``: filtering only.
    * ``hybrid``: filtering plus one detector frame per event.
    * ``continuous``: filtering plus the detector running all day on every
      camera.
    """
    if events_per_camera_day < 0:
        raise InvalidParameterError("events_per_camera_day must be >= 0")
    base = model.activity_power_w * model.workday_h
    if mode == "activity":
        return base
    if mode == "hybrid":
        detector_hours = model.cameras * events_per_camera_day / model.detector_fps / 3600.0
        return base + detector_hours * model.detector_power_w
    if mode == "continuous":
        return base + model.cameras * model.detector_power_w * model.workday_h
    raise InvalidParameterError(f"unknown mode {mode!r}; expected one of {ENERGY_MODES}")


def energy_csv(models: list[EnergyModel], events_per_camera_day: float = 300.0) -> str:
    """Energy table, one row per (mode, camera count)."""
    lines = ["detection,cameras,cpus,gpus,energy_wh"]
    for model in models:
        gpus = {"activity": 0, "hybrid": 1, "continuous": model.cameras}
        for mode in ENERGY_MODES:
            wh = energy_estimate(model, mode, events_per_camera_day)
            lines.append(f"{mode},{model.cameras},1,{gpus[mode]},{wh!r}")
    return "\n".join(lines) + "\n"
