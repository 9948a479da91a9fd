"""Temporal filter primitives and the four-band cascade.

All IIR stages are first-order exponential moving averages parameterized by
a 10%-decay duration: alpha = 0.1 ** (1 / (rate * duration)), so an impulse
fed into the filter decays to 10% of its value after ``rate * duration``
zero-input samples.

Band structure, from one motion stream:

* noise-free activity: high-pass at a long constant, realized as
  ``x - lowpass(x)``, removing continuous in-place "stationary motion
  noise" (flashing lights, foliage);
* short-term in-place activity: low-pass of the noise-free band, updated at
  a reduced rate (default 1/s) on the mean of the elapsed samples;
* short-term moving activity: band-pass realized as the in-place band's
  complement followed by a short FIR mean.

The cascade reuses the in-place low-pass output for the band-pass high
side; ``ReferenceFilter`` computes the identical bands with five
independent filter applications and an extra state frame, for cost
comparison. Counters tally architectural filter applications per
fully-updated tick (including the isochronal stage applied downstream):
4 per tick for the cascade against 5 for the reference, and 2 persistent
short-term state frames against 3.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, RejectedInputError
from .motion import N_DIR_BINS, MotionBlock, MotionFrame

CASCADE_MULTIPLIES_PER_TICK = 4
REFERENCE_MULTIPLIES_PER_TICK = 5
CASCADE_STATE_FRAMES = 2
REFERENCE_STATE_FRAMES = 3


def alpha_from_decay(rate_r: float, duration_t: float) -> float:
    """Filter coefficient for a 10%-decay duration of ``duration_t``.

    ``rate_r`` is samples per time unit and ``duration_t`` the decay span
    in the same unit (seconds for chronological stages, days for the
    isochronal stage).
    """
    if rate_r <= 0:
        raise InvalidParameterError(f"rate must be > 0, got {rate_r}")
    if duration_t <= 0:
        raise InvalidParameterError(f"duration must be > 0, got {duration_t}")
    return 0.1 ** (1.0 / (rate_r * duration_t))


@dataclass(frozen=True)
class DecaySpec:
    """Sampling rate, 10%-decay duration, and the derived coefficient."""

    rate_r: float
    duration_t: float
    alpha: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", alpha_from_decay(self.rate_r, self.duration_t))


@dataclass(frozen=True)
class BandParams:
    """Time constants for the four bands plus the two update rates.

    Durations are seconds except ``t_l2_days``. Defaults match a factory
    deployment: 30-minute noise-removal span, 10-day isochronal span, 20 s
    in-place span, 1 s moving-band FIR window, 30 fps input, 1 Hz
    short-term updates.
    """

    t_l1_s: float = 1800.0
    t_l2_days: float = 10.0
    t_s1_s: float = 20.0
    t_s2_s: float = 1.0
    frame_rate: float = 30.0
    shortterm_rate: float = 1.0

    def __post_init__(self) -> None:
        for name in ("t_l1_s", "t_l2_days", "t_s1_s", "t_s2_s", "frame_rate", "shortterm_rate"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0")
        if self.t_s1_s <= self.t_s2_s:
            raise InvalidParameterError(
                f"moving band is empty: t_s1_s ({self.t_s1_s}) must exceed t_s2_s ({self.t_s2_s})"
            )
        if self.t_l1_s <= self.t_s1_s:
            raise InvalidParameterError(
                f"band ordering violated: t_l1_s ({self.t_l1_s}) must exceed t_s1_s ({self.t_s1_s})"
            )
        stride = self.frame_rate / self.shortterm_rate
        if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
            raise InvalidParameterError(
                f"frame_rate ({self.frame_rate}) must be an integer multiple of "
                f"shortterm_rate ({self.shortterm_rate})"
            )

    @property
    def alpha_l1(self) -> float:
        return alpha_from_decay(self.frame_rate, self.t_l1_s)

    @property
    def alpha_s1(self) -> float:
        return alpha_from_decay(self.shortterm_rate, self.t_s1_s)

    @property
    def alpha_l2(self) -> float:
        # Isochronal stage: 1 sample per day.
        return alpha_from_decay(1.0, self.t_l2_days)

    @property
    def stride(self) -> int:
        return int(round(self.frame_rate / self.shortterm_rate))

    @property
    def fir_window(self) -> int:
        return int(math.ceil(self.shortterm_rate * self.t_s2_s))


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameterError(f"alpha must lie in [0, 1], got {alpha}")


def ema_step(state: MotionBlock, x: MotionBlock, alpha: float) -> MotionBlock:
    """One EMA update, component-wise over density and all direction bins.

    The returned block is both the filter output and the next state.
    """
    _check_alpha(alpha)
    return MotionBlock(
        density=alpha * state.density + (1.0 - alpha) * x.density,
        dir_hist=alpha * state.dir_hist + (1.0 - alpha) * x.dir_hist,
    )


def highpass_step(state: MotionBlock, x: MotionBlock, alpha: float) -> MotionBlock:
    """High-pass complement ``x - ema_step(state, x, alpha)``, floored at 0.

    The caller advances the shared low-pass state with :func:`ema_step`.
    """
    lp = ema_step(state, x, alpha)
    return MotionBlock(
        density=max(0.0, x.density - lp.density),
        dir_hist=np.maximum(0.0, x.dir_hist - lp.dir_hist),
    )


# ---------------------------------------------------------------------------
# Streaming band extraction
# ---------------------------------------------------------------------------

@dataclass
class BandOutputs:
    """Immutable per-tick snapshot of the three chronological bands."""

    m_l1: MotionFrame
    m_s1: MotionFrame
    m_s2: MotionFrame

    @property
    def timestamp_ms(self) -> int:
        return self.m_l1.timestamp_ms


def _stack(frame: MotionFrame) -> np.ndarray:
    """(gh, gw, 9) feature tensor: density channel followed by 8 bins."""
    return np.concatenate([frame.density[..., None], frame.dir_hist], axis=2)


def _unstack(arr: np.ndarray, timestamp_ms: int) -> MotionFrame:
    density = arr[..., 0].copy()
    hist = arr[..., 1:].copy()
    density.flags.writeable = False
    hist.flags.writeable = False
    return MotionFrame(density=density, dir_hist=hist, timestamp_ms=timestamp_ms)


class _BandFilterBase:
    """Shared stream plumbing for the cascade and reference filters."""

    multiplies_per_tick = 0
    state_frames = 0

    def __init__(self, grid_w: int, grid_h: int, params: BandParams):
        if grid_w < 1 or grid_h < 1:
            raise InvalidParameterError("grid dimensions must be positive")
        self.params = params
        self._shape = (grid_h, grid_w, 1 + N_DIR_BINS)
        self._lp_l1 = np.zeros(self._shape)
        self._lp_s1 = np.zeros(self._shape)
        self._fir: deque[np.ndarray] = deque(maxlen=params.fir_window)
        self._acc = np.zeros(self._shape)
        self._acc_n = 0
        self._tick = 0
        self._m_s1 = np.zeros(self._shape)
        self._m_s2 = np.zeros(self._shape)
        self.multiplies = 0

    def _check(self, frame: MotionFrame) -> None:
        if (frame.grid_h, frame.grid_w) != self._shape[:2]:
            raise RejectedInputError(
                f"frame grid {(frame.grid_h, frame.grid_w)} does not match "
                f"filter grid {self._shape[:2]}"
            )

    def _band_hp(self, st_input: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def step(self, frame: MotionFrame) -> BandOutputs:
        """Advance one frame-rate tick; short-term bands update on the
        reduced-rate ticks and are carried in between."""
        self._check(frame)
        x = _stack(frame)

        a1 = self.params.alpha_l1
        self._lp_l1 = a1 * self._lp_l1 + (1.0 - a1) * x
        m_l1 = np.maximum(0.0, x - self._lp_l1)

        self._acc += m_l1
        self._acc_n += 1
        self._tick += 1
        if self._tick % self.params.stride == 0:
            st_input = self._acc / self._acc_n
            as1 = self.params.alpha_s1
            self._lp_s1 = as1 * self._lp_s1 + (1.0 - as1) * st_input
            self._m_s1 = self._lp_s1
            self._fir.append(self._band_hp(st_input))
            self._m_s2 = np.maximum(0.0, np.mean(np.stack(self._fir), axis=0))
            self._acc = np.zeros(self._shape)
            self._acc_n = 0
            self.multiplies += self.multiplies_per_tick

        t = frame.timestamp_ms
        return BandOutputs(
            m_l1=_unstack(m_l1, t),
            m_s1=_unstack(self._m_s1, t),
            m_s2=_unstack(self._m_s2, t),
        )


class CascadeFilter(_BandFilterBase):
    """Band extraction reusing the in-place low-pass for the band-pass
    high side: 4 filter applications per fully-updated tick, 2 persistent
    short-term state frames."""

    multiplies_per_tick = CASCADE_MULTIPLIES_PER_TICK
    state_frames = CASCADE_STATE_FRAMES

    def _band_hp(self, st_input: np.ndarray) -> np.ndarray:
        return st_input - self._lp_s1


class ReferenceFilter(_BandFilterBase):
    """Non-cascaded variant: the band-pass high side runs its own low-pass
    with a third state frame. Outputs match :class:`CascadeFilter` exactly
    for identical input streams."""

    multiplies_per_tick = REFERENCE_MULTIPLIES_PER_TICK
    state_frames = REFERENCE_STATE_FRAMES

    def __init__(self, grid_w: int, grid_h: int, params: BandParams):
        super().__init__(grid_w, grid_h, params)
        self._lp_bp = np.zeros(self._shape)

    def _band_hp(self, st_input: np.ndarray) -> np.ndarray:
        as1 = self.params.alpha_s1
        self._lp_bp = as1 * self._lp_bp + (1.0 - as1) * st_input
        return st_input - self._lp_bp


def counters_csv(filters: dict[str, _BandFilterBase]) -> str:
    """Counter report, one row per implementation: impl,multiplies,state_frames."""
    lines = ["impl,multiplies,state_frames"]
    for name, f in filters.items():
        lines.append(f"{name},{f.multiplies},{f.state_frames}")
    return "\n".join(lines) + "\n"
