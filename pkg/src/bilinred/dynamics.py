"""Simulation of bilinear systems and Chen-Fliess evaluation.

Both the state equation and the iterated integrals are integrated with the
classical fixed-step RK4 scheme on a grid that is refined inside every input
segment, so no step straddles a switching time. Inside a segment the input is
evaluated with that segment's own expressions, including at its right end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .automata import determinize
from .errors import CapacityError, DimensionError, DivergenceError, PreconditionError
from .signals import PiecewiseSignal, sup_norm_estimate
from .system import BilinearSystem, Word, check_word, max_matrix_norm, series_coefficient

DIVERGENCE_THRESHOLD = 1e12
WORD_BUDGET = 200_000
DEFAULT_TRUNCATION = 8


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    outputs: np.ndarray
    states: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.times) != len(self.outputs):
            raise DimensionError("outputs must have one row per time")

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def truncated(self, count: int) -> "Trajectory":
        states = None if self.states is None else self.states[:count]
        return Trajectory(self.times[:count], self.outputs[:count], states)


@dataclass(frozen=True, eq=False)
class IntegralTable:
    word: Word
    times: np.ndarray
    values: np.ndarray


def default_dt(sys: BilinearSystem, u: PiecewiseSignal) -> float:
    R_hat = sup_norm_estimate(u, 200)
    return min(1e-3, 0.01 / (max_matrix_norm(sys) * (1.0 + R_hat)))


def time_grid(u: PiecewiseSignal, T: float, dt: float) -> list[tuple]:
    """Per-segment sub-grids ``(segment, times)`` covering ``[0, T]``."""
    if T <= 0 or dt <= 0:
        raise PreconditionError("T and dt must be positive")
    if T > u.horizon * (1 + 1e-12):
        raise PreconditionError(f"signal horizon {u.horizon} shorter than T={T}")
    out = []
    for seg in u.segments:
        a = seg.t_start
        if a >= T:
            break
        b = min(seg.t_end, T)
        steps = max(1, math.ceil((b - a) / dt - 1e-9))
        out.append((seg, np.linspace(a, b, steps + 1)))
    return out


def _integrate(rhs: Callable, z0: np.ndarray, u: PiecewiseSignal, T: float, dt: float,
               observe: Callable, keep_states: bool = True):
    """RK4 for ``z' = rhs(z, ubar)`` with ``ubar = (1, u_1, ..., u_m)``.

    Returns ``(times, observations, states)``. Raises :class:`DivergenceError`
    (carrying everything up to the last good step) once ``|z|`` exceeds the
    divergence threshold or stops being finite.
    """
    times = [0.0]
    z = np.array(z0, dtype=float)
    obs = [observe(z)]
    states = [z.copy()] if keep_states else None

    def partial():
        st = np.array(states) if keep_states else None
        return np.array(times), np.array(obs), st

    for seg, ts in time_grid(u, T, dt):
        h = ts[1] - ts[0]
        # stage inputs at t, t + h/2, t + h for every step in this segment
        u_left = seg.values(ts[:-1])
        u_mid = seg.values(ts[:-1] + h / 2)
        u_right = seg.values(ts[1:])
        ones = np.ones((len(ts) - 1, 1))
        u_left = np.hstack([ones, u_left])
        u_mid = np.hstack([ones, u_mid])
        u_right = np.hstack([ones, u_right])
        for k in range(len(ts) - 1):
            k1 = rhs(z, u_left[k])
            k2 = rhs(z + (h / 2) * k1, u_mid[k])
            k3 = rhs(z + (h / 2) * k2, u_mid[k])
            k4 = rhs(z + h * k3, u_right[k])
            z = z + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            norm = np.linalg.norm(z)
            if not np.isfinite(norm) or norm > DIVERGENCE_THRESHOLD:
                raise DivergenceError(float(ts[k + 1]), partial())
            times.append(float(ts[k + 1]))
            obs.append(observe(z))
            if keep_states:
                states.append(z.copy())
    return partial()


def simulate(sys: BilinearSystem, u: PiecewiseSignal, T: float, dt: Optional[float] = None,
             keep_states: bool = True) -> Trajectory:
    """Integrate ``x' = (A_0 + sum_i u_i A_i) x`` from ``x0`` on ``[0, T]``.

    On divergence the raised :class:`DivergenceError` carries the partial
    :class:`Trajectory`.
    """
    if u.m != sys.m:
        raise DimensionError(f"signal has {u.m} channels, system expects {sys.m}")
    if dt is None:
        dt = default_dt(sys, u)
    stack = np.array(sys.A) if sys.n else np.zeros((sys.m + 1, 0, 0))
    C = sys.C

    def rhs(x, ubar):
        return ubar @ (stack @ x)

    try:
        times, ys, xs = _integrate(rhs, sys.x0, u, T, dt, lambda x: C @ x, keep_states)
    except DivergenceError as err:
        times, ys, xs = err.trajectory
        err.trajectory = Trajectory(times, ys.reshape(len(times), sys.p), xs)
        raise
    return Trajectory(times, ys.reshape(len(times), sys.p), xs)


def _prefix_closure(words: Iterable[Word]) -> list[Word]:
    closed = {()}
    for w in words:
        for k in range(1, len(w) + 1):
            closed.add(tuple(w[:k]))
    return sorted(closed, key=lambda w: (len(w), w))


def _integral_values(u: PiecewiseSignal, words: Sequence[Word], T: float, dt: float):
    """Integrate every iterated integral indexed by the prefix closure of
    ``words``: ``V_eps = 1`` and ``d/dt V_{vq} = u_q V_v``."""
    closure = _prefix_closure(words)
    if len(closure) > WORD_BUDGET:
        raise CapacityError(f"{len(closure)} words exceed the budget of {WORD_BUDGET}",
                            WORD_BUDGET)
    index = {w: i for i, w in enumerate(closure)}
    parent = np.array([index[w[:-1]] if w else 0 for w in closure])
    # symbol slot m+1 is a constant zero so that V_eps stays at 1
    symbol = np.array([w[-1] if w else u.m + 1 for w in closure])
    z0 = np.zeros(len(closure))
    z0[0] = 1.0

    def rhs(z, ubar):
        return np.append(ubar, 0.0)[symbol] * z[parent]

    times, vals, _ = _integrate(rhs, z0, u, T, dt, lambda z: z.copy(), keep_states=False)
    return times, vals, index


def iterated_integrals(u: PiecewiseSignal, words: Sequence[Iterable[int]], T: float,
                       dt: float = 1e-3) -> list[IntegralTable]:
    """Tables of ``V_w[u](t)`` on the simulation grid, one per requested word."""
    words = [check_word(w, u.m) for w in words]
    times, vals, index = _integral_values(u, words, T, dt)
    return [IntegralTable(w, times, vals[:, index[w]]) for w in words]


def all_words(m: int, L: int) -> list[Word]:
    count = sum((m + 1) ** k for k in range(L + 1))
    if count > WORD_BUDGET:
        raise CapacityError(f"{count} words up to length {L} exceed the budget of {WORD_BUDGET}",
                            WORD_BUDGET)
    level, out = [()], []
    for _ in range(L + 1):
        out.extend(level)
        level = [w + (q,) for w in level for q in range(m + 1)]
    return out


def fliess_truncated(sys: BilinearSystem, u: PiecewiseSignal, T: float, dt: float = 1e-3,
                     L: int = DEFAULT_TRUNCATION) -> Trajectory:
    """Output of the Fliess series truncated to words of length <= L."""
    if L < 0:
        raise PreconditionError("truncation depth must be >= 0")
    if u.m != sys.m:
        raise DimensionError(f"signal has {u.m} channels, system expects {sys.m}")
    words = all_words(sys.m, L)
    coeffs = np.array([series_coefficient(sys, w) for w in words]).reshape(len(words), sys.p)
    times, vals, index = _integral_values(u, words, T, dt)
    cols = [index[w] for w in words]
    return Trajectory(times, vals[:, cols] @ coeffs)


def verify_annihilation(u: PiecewiseSignal, gamma, L: int, T: float,
                        dt: float = 1e-3) -> float:
    """Largest ``|V_v[u](t)|`` over words v outside gamma with ``|v| <= L`` and
    grid times ``t <= T``; zero means u looks annihilating up to depth L."""
    if L < 1:
        raise PreconditionError("depth must be >= 1")
    d = determinize(gamma)
    outside = [w for w in all_words(u.m, L) if not d.accepts(w)]
    if not outside:
        return 0.0
    _, vals, index = _integral_values(u, outside, T, dt)
    return float(np.max(np.abs(vals[:, [index[w] for w in outside]])))


def annihilation_witness(u: PiecewiseSignal, gamma, L: int, T: float, dt: float = 1e-3):
    """``(value, word)`` for the largest integral outside gamma, or ``(0.0, None)``."""
    d = determinize(gamma)
    outside = [w for w in all_words(u.m, L) if not d.accepts(w)]
    if not outside:
        return 0.0, None
    _, vals, index = _integral_values(u, outside, T, dt)
    peaks = np.max(np.abs(vals[:, [index[w] for w in outside]]), axis=0)
    k = int(np.argmax(peaks))
    return float(peaks[k]), outside[k]


def compare_outputs(a: Trajectory, b: Trajectory) -> tuple[float, float, float]:
    """``(max_abs, l2, argmax_t)`` of the pointwise output error ``|y_a - y_b|``.

    ``l2`` is the trapezoidal ``sqrt(int |y_a - y_b|^2 dt)``.
    """
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-12):
        raise DimensionError("trajectories live on different time grids")
    err = output_error(a, b)
    k = int(np.argmax(err))
    l2 = math.sqrt(float(trapezoid(err ** 2, a.times))) if len(err) > 1 else 0.0
    return float(err[k]), l2, float(a.times[k])


def output_error(a: Trajectory, b: Trajectory) -> np.ndarray:
    return np.linalg.norm(np.asarray(a.outputs) - np.asarray(b.outputs), axis=1)
