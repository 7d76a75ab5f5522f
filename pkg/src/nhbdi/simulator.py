"""Exact Monte Carlo sample paths of the birth-death-immigration chain.

Paths are generated by thinning.  Time is cut into windows of length at most
``sc.window`` that never cross a rate join, so every rate is monotone or constant
on a window and its supremum is the larger endpoint value.  Inside a window
candidate events arrive at the constant majorant rate
``k (sup lambda + sup mu) + sup nu``; a single uniform picks birth, death,
arrival or rejection.  The majorant is refreshed after every accepted event.

Every path ``i`` of an ensemble draws from its own PCG64 stream seeded from
``(master_seed, i)``, so results do not depend on the number of threads and path
``i`` can be replayed alone with :func:`simulate_path`.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum

import numba as nb
import numpy as np

from .exceptions import SimulationError
from .pmf import worker_count
from .rates import Constant, RateFunction
from .scenario import Scenario

__all__ = [
    "EventKind",
    "EventLog",
    "EmpiricalSummary",
    "simulate_path",
    "run_ensemble",
    "derive_path_seed",
    "empirical_pmf_distance",
    "MAX_EVENTS",
]

MAX_EVENTS = 100_000_000
_CHUNK = 64


class EventKind(IntEnum):
    BIRTH = 0
    DEATH = 1
    ARRIVAL = 2


def _rate_rows(rate: RateFunction) -> np.ndarray:
    """Rows ``[t_start, t_end, from, to, kind]``; kind 0 is constant, 1 raised cosine."""
    rows = []
    for seg in rate.segments:
        if isinstance(seg.shape, Constant):
            rows.append([seg.t_start, seg.t_end, seg.shape.level, seg.shape.level, 0.0])
        else:
            rows.append([seg.t_start, seg.t_end, seg.shape.from_level, seg.shape.to_level, 1.0])
    return np.array(rows, dtype=float)


@nb.njit(inline="always")
def _seg_val(R, j, t):
    if R[j, 4] == 0.0:
        return R[j, 2]
    th = math.pi * (t - R[j, 0]) / (R[j, 1] - R[j, 0])
    return R[j, 3] + 0.5 * (R[j, 2] - R[j, 3]) * (1.0 + math.cos(th))


@nb.njit(inline="always")
def _seg_find(R, j, t):
    while j < R.shape[0] - 1 and t >= R[j, 1]:
        j += 1
    return j


@nb.njit(nogil=True, cache=True)
def _path_kernel(L, M, V, i0, horizon, window, absorbing, max_events, gen,
                 snap_t, snap_out, day_inf, day_rec, log_t, log_kind, log_state):
    """Simulate one path on ``[0, horizon]``.

    Returns ``(final state, first extinction time or inf, events, status)``;
    status 1 means the event budget ran out.
    """
    k = i0
    t = 0.0
    nev = 0
    n_snap = snap_t.shape[0]
    n_days = day_inf.shape[0]
    n_log = log_t.shape[0]
    si = 0
    t_ext = 0.0 if k == 0 else math.inf
    jl = 0
    jm = 0
    jv = 0
    day = 0
    day_end = 1.0
    while t < horizon:
        if absorbing and k == 0:
            break
        jl = _seg_find(L, jl, t)
        jm = _seg_find(M, jm, t)
        jv = _seg_find(V, jv, t)
        wend = min(t + window, horizon, L[jl, 1], M[jm, 1], V[jv, 1])
        const = L[jl, 4] == 0.0 and M[jm, 4] == 0.0 and V[jv, 4] == 0.0
        sl = max(_seg_val(L, jl, t), _seg_val(L, jl, wend))
        sm = max(_seg_val(M, jm, t), _seg_val(M, jm, wend))
        sv = max(_seg_val(V, jv, t), _seg_val(V, jv, wend))
        while True:
            bound = k * (sl + sm) + sv
            if bound <= 0.0:
                t = wend
                break
            tau = t + gen.standard_exponential() / bound
            if tau >= wend:
                t = wend
                break
            t = tau
            if const:
                l = sl
                m = sm
                v = sv
            else:
                l = _seg_val(L, jl, t)
                m = _seg_val(M, jm, t)
                v = _seg_val(V, jv, t)
            u = gen.random() * bound
            if u < k * l:
                kind = 0
            elif u < k * (l + m):
                kind = 1
            elif u < k * (l + m) + v:
                kind = 2
            else:
                continue
            while si < n_snap and snap_t[si] < t:
                snap_out[si] = k
                si += 1
            if kind == 1:
                k -= 1
            else:
                k += 1
            if t > day_end:
                day = int(math.ceil(t)) - 1
                day_end = day + 1.0
            if day < n_days:
                if kind == 1:
                    day_rec[day] += 1
                else:
                    day_inf[day] += 1
            if nev < n_log:
                log_t[nev] = t
                log_kind[nev] = kind
                log_state[nev] = k
            nev += 1
            if k == 0 and t_ext == math.inf:
                t_ext = t
            if nev >= max_events:
                return k, t_ext, nev, 1
            if absorbing and k == 0:
                break
    while si < n_snap:
        snap_out[si] = k
        si += 1
    return k, t_ext, nev, 0


def derive_path_seed(master_seed: int, index: int) -> int:
    """64-bit seed of path ``index``, independent of how paths are scheduled."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True, eq=False)
class EventLog:
    """One sample path: event times, kinds and the state just after each event."""

    i0: int
    horizon: float
    times: np.ndarray
    kinds: np.ndarray
    states: np.ndarray
    final_state: int
    extinction_time: float
    seed: int

    def __len__(self):
        return len(self.times)

    def events(self):
        for t, kind, state in zip(self.times, self.kinds, self.states):
            yield float(t), EventKind(int(kind)), int(state)

    def counts(self) -> dict:
        return {kind.name.lower(): int(np.sum(self.kinds == kind)) for kind in EventKind}

    def state_at(self, t: float) -> int:
        """State after all events at times ``<= t``."""
        idx = int(np.searchsorted(self.times, t, side="right"))
        return self.i0 if idx == 0 else int(self.states[idx - 1])

    def conserved(self) -> bool:
        """``I = I0 + arrivals + births - deaths`` at every event, and the state never goes negative."""
        step = np.where(self.kinds == EventKind.DEATH, -1, 1)
        rebuilt = self.i0 + np.cumsum(step)
        return bool(np.array_equal(rebuilt, self.states) and np.all(self.states >= 0)
                    and (len(self) == 0 or self.states[-1] == self.final_state))


def _kernel_args(sc: Scenario):
    return _rate_rows(sc.lam), _rate_rows(sc.mu), _rate_rows(sc.nu), sc.nu.is_zero


def simulate_path(sc: Scenario, path_seed: int, horizon: float | None = None,
                  max_events: int = MAX_EVENTS, capacity: int = 4096) -> EventLog:
    """Simulate and log one path with an explicit 64-bit seed."""
    horizon = sc.t_end if horizon is None else float(horizon)
    L, M, V, absorbing = _kernel_args(sc)
    empty_f = np.zeros(0)
    empty_i = np.zeros(0, dtype=np.int64)
    while True:
        gen = np.random.Generator(np.random.PCG64(path_seed))
        log_t = np.empty(capacity)
        log_kind = np.empty(capacity, dtype=np.int8)
        log_state = np.empty(capacity, dtype=np.int64)
        k, t_ext, nev, status = _path_kernel(
            L, M, V, sc.i0, horizon, sc.window, absorbing, max_events, gen,
            empty_f, empty_i, empty_i, empty_i, log_t, log_kind, log_state,
        )
        if status:
            raise SimulationError(f"path exceeded {max_events} events before t={horizon}")
        if nev <= capacity:
            break
        capacity = nev  # replay the same stream into a large enough buffer
    return EventLog(sc.i0, horizon, log_t[:nev], log_kind[:nev], log_state[:nev], int(k), float(t_ext), int(path_seed))


@dataclass(frozen=True, eq=False)
class EmpiricalSummary:
    """Ensemble statistics.

    ``snapshots[j, i]`` is the state of path ``i`` at ``snapshot_times[j]``;
    ``daily_infections[i, d]`` and ``daily_recoveries[i, d]`` count events of
    path ``i`` on day ``d + 1`` (the interval ``(d, d + 1]``).
    """

    replications: int
    horizon: float
    master_seed: int
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    final_states: np.ndarray
    extinction_times: np.ndarray
    events: np.ndarray
    daily_infections: np.ndarray | None = None
    daily_recoveries: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def _snap_index(self, t: float) -> int:
        idx = np.flatnonzero(self.snapshot_times == t)
        if len(idx) == 0:
            raise ValueError(f"t={t} is not a snapshot time of this ensemble {list(self.snapshot_times)}")
        return int(idx[0])

    def states_at(self, t: float) -> np.ndarray:
        return self.snapshots[self._snap_index(t)]

    def empirical_pmf(self, t: float) -> np.ndarray:
        x = self.states_at(t)
        return np.bincount(x) / len(x)

    def extinction_fraction(self, t: float | None = None) -> float:
        """Fraction of paths at 0 at ``t`` (default: the horizon)."""
        x = self.final_states if t is None else self.states_at(t)
        return float(np.mean(x == 0))

    def daily_stats(self, which: str = "recoveries") -> dict:
        """Per-day mean, sd, standard error and 5/50/95% quantiles."""
        data = {"infections": self.daily_infections, "recoveries": self.daily_recoveries}[which]
        if data is None:
            raise ValueError("daily counts were not kept for this ensemble")
        n = data.shape[0]
        mean = data.mean(axis=0)
        sd = data.std(axis=0, ddof=1) if n > 1 else np.zeros(data.shape[1])
        q05, q50, q95 = np.quantile(data, [0.05, 0.5, 0.95], axis=0)
        return {"day": np.arange(1, data.shape[1] + 1), "mean": mean, "sd": sd,
                "se": sd / math.sqrt(n), "q05": q05, "q50": q50, "q95": q95}


def run_ensemble(sc: Scenario, snapshot_times=None, replications: int | None = None,
                 horizon: float | None = None, threads: int | None = None,
                 keep_daily: bool = True, max_events: int = MAX_EVENTS) -> EmpiricalSummary:
    """Simulate ``replications`` independent paths and collect snapshots and daily counts."""
    reps = sc.replications if replications is None else int(replications)
    horizon = sc.t_end if horizon is None else float(horizon)
    snaps = np.sort(np.asarray([] if snapshot_times is None else snapshot_times, dtype=float))
    if np.any(snaps < 0) or np.any(snaps > horizon):
        raise ValueError("snapshot times must lie in [0, horizon]")
    L, M, V, absorbing = _kernel_args(sc)
    n_days = int(math.floor(horizon)) if keep_daily else 0
    snap_out = np.zeros((len(snaps), reps), dtype=np.int32)
    day_inf = np.zeros((reps, n_days), dtype=np.int32)
    day_rec = np.zeros((reps, n_days), dtype=np.int32)
    finals = np.zeros(reps, dtype=np.int64)
    t_ext = np.zeros(reps)
    events = np.zeros(reps, dtype=np.int64)
    empty_f = np.zeros(0)
    empty_i8 = np.zeros(0, dtype=np.int8)
    empty_i = np.zeros(0, dtype=np.int64)

    def run_chunk(lo):
        col = np.empty(len(snaps), dtype=np.int64)
        inf_row = np.zeros(n_days, dtype=np.int64)
        rec_row = np.zeros(n_days, dtype=np.int64)
        for i in range(lo, min(lo + _CHUNK, reps)):
            gen = np.random.Generator(np.random.PCG64(derive_path_seed(sc.master_seed, i)))
            inf_row[:] = 0
            rec_row[:] = 0
            k, te, nev, status = _path_kernel(
                L, M, V, sc.i0, horizon, sc.window, absorbing, max_events, gen,
                snaps, col, inf_row, rec_row, empty_f, empty_i8, empty_i,
            )
            if status:
                raise SimulationError(f"path {i} exceeded {max_events} events before t={horizon}")
            snap_out[:, i] = col
            if n_days:
                day_inf[i] = inf_row
                day_rec[i] = rec_row
            finals[i], t_ext[i], events[i] = k, te, nev

    starts = range(0, reps, _CHUNK)
    workers = min(threads or worker_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [pool.submit(run_chunk, lo) for lo in starts]:
                fut.result()
    else:
        for lo in starts:
            run_chunk(lo)
    return EmpiricalSummary(
        reps, horizon, sc.master_seed, snaps, snap_out, finals, t_ext, events,
        day_inf if keep_daily else None, day_rec if keep_daily else None,
    )


def empirical_pmf_distance(summary: EmpiricalSummary, reference) -> float:
    """Total variation between the ensemble at ``reference.t`` and a reference law.

    ``reference`` is a :class:`~nhbdi.pmf.PmfSlice` (``p``, ``tail``) or an oracle
    :class:`~nhbdi.oracle.TruncatedDistribution` (``q``, ``leaked``).  States
    beyond the reference support are pooled into one tail bucket.
    """
    if hasattr(reference, "p"):
        p, tail = reference.p, reference.tail
    else:
        p, tail = reference.q, reference.leaked
    emp = summary.empirical_pmf(reference.t)
    K = len(p) - 1
    head = np.zeros(K + 1)
    n = min(len(emp), K + 1)
    head[:n] = emp[:n]
    emp_tail = float(emp[K + 1:].sum())
    return 0.5 * (float(np.abs(head - p).sum()) + abs(emp_tail - tail))
