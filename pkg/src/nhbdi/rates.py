"""Piecewise rate functions built from constant and raised-cosine segments.

Every rate curve used by the model (infection rate, recovery rate, arrival
rate) is a contiguous chain of segments starting at ``t = 0`` and ending in an
unbounded constant tail.  Within a segment the rate is either constant or a
half-period cosine that moves smoothly between two levels, so integrals and
suprema are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import ConfigError, DomainError

__all__ = [
    "Constant",
    "RaisedCosine",
    "Segment",
    "RateFunction",
]


@dataclass(frozen=True)
class Constant:
    level: float


@dataclass(frozen=True)
class RaisedCosine:
    """Half cosine from ``from_level`` at the segment start to ``to_level`` at its end."""

    from_level: float
    to_level: float


Shape = Union[Constant, RaisedCosine]


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    shape: Shape

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def value(self, t):
        """Evaluate the segment formula at ``t`` (scalar or array), ignoring bounds."""
        shape = self.shape
        if isinstance(shape, Constant):
            if np.ndim(t):
                return np.full(np.shape(t), float(shape.level))
            return float(shape.level)
        theta = np.pi * (np.asarray(t, dtype=float) - self.t_start) / self.duration
        half = 0.5 * (shape.from_level - shape.to_level)
        out = shape.to_level + half * (1.0 + np.cos(theta))
        return out if np.ndim(out) else float(out)

    def integral(self, a, b):
        """Exact integral of the segment formula over ``[a, b]``."""
        shape = self.shape
        if isinstance(shape, Constant):
            return shape.level * (np.asarray(b, dtype=float) - a)
        d = self.duration
        half = 0.5 * (shape.from_level - shape.to_level)
        # linear part plus the sinusoidal antiderivative
        mean = shape.to_level + half
        sin_b = np.sin(np.pi * (np.asarray(b, dtype=float) - self.t_start) / d)
        sin_a = np.sin(np.pi * (np.asarray(a, dtype=float) - self.t_start) / d)
        return mean * (np.asarray(b, dtype=float) - a) + half * d / np.pi * (sin_b - sin_a)

    def endpoint_levels(self) -> tuple[float, float]:
        if isinstance(self.shape, Constant):
            return self.shape.level, self.shape.level
        return self.shape.from_level, self.shape.to_level


@dataclass(frozen=True)
class RateFunction:
    """Nonnegative piecewise rate (per day) on ``[0, inf)``.

    Segments are half-open ``[t_start, t_end)``; evaluation exactly at a join
    uses the segment on the right.  Integrals do not depend on that choice.
    """

    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ConfigError("a rate function needs at least one segment")
        if segs[0].t_start != 0.0:
            raise ConfigError(f"first segment must start at t=0, got {segs[0].t_start}")
        for i, seg in enumerate(segs):
            if not seg.t_end > seg.t_start:
                raise ConfigError(f"segment {i} has non-positive duration [{seg.t_start}, {seg.t_end})")
            levels = seg.endpoint_levels()
            if min(levels) < 0 or not all(math.isfinite(x) for x in levels):
                raise ConfigError(f"segment {i} has a negative or non-finite level {levels}")
            if i + 1 < len(segs) and segs[i + 1].t_start != seg.t_end:
                raise ConfigError(
                    f"segments {i} and {i + 1} are not contiguous ({seg.t_end} != {segs[i + 1].t_start})"
                )
        last = segs[-1]
        if math.isfinite(last.t_end):
            raise ConfigError("the last segment must be unbounded (t_end = inf)")
        if not isinstance(last.shape, Constant):
            raise ConfigError("the unbounded last segment must be constant")
        for i, seg in enumerate(segs[:-1]):
            if not math.isfinite(seg.t_end):
                raise ConfigError(f"only the last segment may be unbounded (segment {i})")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, level: float) -> "RateFunction":
        return cls((Segment(0.0, math.inf, Constant(float(level))),))

    @classmethod
    def step(cls, level0: float, level1: float, t1: float, delay: float = 0.0) -> "RateFunction":
        """``level0`` until ``t1``, then a raised-cosine move to ``level1`` lasting ``delay`` days.

        ``delay = 0`` gives an abrupt jump at ``t1``.
        """
        if t1 <= 0:
            raise ConfigError("transition time must be positive")
        if delay < 0:
            raise ConfigError("delay must be nonnegative")
        segs = [Segment(0.0, float(t1), Constant(float(level0)))]
        if delay > 0:
            segs.append(Segment(float(t1), float(t1 + delay), RaisedCosine(float(level0), float(level1))))
        segs.append(Segment(float(t1 + delay), math.inf, Constant(float(level1))))
        return cls(tuple(segs))

    # -- structure --------------------------------------------------------------

    @property
    def starts(self) -> np.ndarray:
        return np.array([s.t_start for s in self.segments])

    @property
    def joins(self) -> tuple[float, ...]:
        """Interior segment boundaries."""
        return tuple(s.t_end for s in self.segments[:-1])

    @property
    def is_zero(self) -> bool:
        return all(max(s.endpoint_levels()) == 0.0 for s in self.segments)

    @property
    def is_constant(self) -> bool:
        levels = {lv for s in self.segments for lv in s.endpoint_levels()}
        return len(levels) == 1

    def segment_index(self, t):
        """Index of the segment containing ``t`` (right-continuous at joins)."""
        idx = np.searchsorted(self.starts, t, side="right") - 1
        return idx if np.ndim(idx) else int(idx)

    # -- evaluation ---------------------------------------------------------------

    def eval(self, t, segment=None):
        """Rate at time ``t`` (scalar or array).

        ``segment`` forces the formula of a given segment index (array-aligned with
        ``t``); used by quadrature to take one-sided values at a jump.
        """
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError("rate functions are defined for t >= 0 only")
        if arr.ndim == 0 and segment is None:
            return float(self.segments[self.segment_index(float(arr))].value(float(arr)))
        idx = self.segment_index(arr) if segment is None else np.asarray(segment)
        out = np.empty(arr.shape)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.value(arr[mask])
        return out if out.ndim else float(out)

    __call__ = eval

    def integrate(self, t0: float, t1: float) -> float:
        """Exact ``int_{t0}^{t1} r(u) du``."""
        if t0 < 0:
            raise DomainError(f"t0 must be >= 0, got {t0}")
        if t0 > t1:
            raise DomainError(f"t0 > t1 ({t0} > {t1})")
        total = 0.0
        for seg in self.segments:
            a = max(seg.t_start, t0)
            b = min(seg.t_end, t1)
            if b > a:
                total += float(seg.integral(a, b))
        return total

    def antiderivative(self, t):
        """``int_0^t r(u) du`` for an array of times, vectorised."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError("rate functions are defined for t >= 0 only")
        base = np.zeros(len(self.segments))
        for i, seg in enumerate(self.segments[:-1]):
            base[i + 1] = base[i] + float(seg.integral(seg.t_start, seg.t_end))
        idx = np.atleast_1d(self.segment_index(arr))
        flat = np.atleast_1d(arr)
        out = np.empty(flat.shape)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = base[i] + seg.integral(seg.t_start, flat[mask])
        return out.reshape(arr.shape) if arr.ndim else float(out[0])

    def sup_on(self, t0: float, t1: float) -> float:
        """Exact supremum over ``[t0, t1]``; each segment is monotone, so endpoints suffice."""
        return self._extreme(t0, t1, max)

    def inf_on(self, t0: float, t1: float) -> float:
        return self._extreme(t0, t1, min)

    def _extreme(self, t0, t1, pick):
        if t0 < 0:
            raise DomainError(f"t0 must be >= 0, got {t0}")
        if t0 > t1:
            raise DomainError(f"t0 > t1 ({t0} > {t1})")
        vals = []
        for seg in self.segments:
            if seg.t_end < t0 or seg.t_start > t1:
                continue
            if seg.t_end == t0 and t1 > t0:
                continue
            a = max(seg.t_start, t0)
            b = min(seg.t_end, t1)
            vals.append(float(seg.value(a)))
            if math.isfinite(b):
                vals.append(float(seg.value(b)))
        return pick(vals)

    def with_delay(self, delay: float) -> "RateFunction":
        """Rewrite the single level transition so that it takes ``delay`` days.

        Works on curves of the form constant -> (raised cosine) -> constant, which is
        how the decree scenarios are written.
        """
        levels = [s for s in self.segments]
        if len(levels) == 2 and all(isinstance(s.shape, Constant) for s in levels):
            t1 = levels[0].t_end
        elif (
            len(levels) == 3
            and isinstance(levels[0].shape, Constant)
            and isinstance(levels[1].shape, RaisedCosine)
            and isinstance(levels[2].shape, Constant)
        ):
            t1 = levels[1].t_start
        else:
            raise ConfigError("delay override needs a constant -> (raised cosine) -> constant curve")
        return RateFunction.step(levels[0].shape.level, levels[-1].shape.level, t1, delay)
