"""Bilinear systems, word products, generating-series coefficients and the
scalar error-bound formulas.

A bilinear system with ``m`` inputs is

    x'(t) = A_0 x(t) + sum_{i=1}^m u_i(t) A_i x(t),   x(0) = x0,
    y(t)  = C x(t).

Words are tuples of integers over the alphabet Q = {0, ..., m}. For a word
``w = (q_1, ..., q_k)`` the associated matrix is ``A_{q_k} ... A_{q_1}``; the
first symbol acts first. That ordering lives in :func:`word_matrix` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AlphabetError, DimensionError

Word = tuple[int, ...]

EPSILON: Word = ()

# substituted for a zero growth rate or zero gain; the error bounds need K, R > 0
_FLOOR = np.finfo(float).eps


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BilinearSystem:
    """Immutable bilinear system ``(p, m, n, {A_q}, C, x0)``.

    Parameters
    ----------
    A : sequence of m+1 square matrices
        ``A[0]`` is the drift, ``A[q]`` multiplies input channel ``q``.
    C : (p, n) array
    x0 : (n,) array
    """

    A: tuple[np.ndarray, ...]
    C: np.ndarray
    x0: np.ndarray

    def __init__(self, A: Sequence, C, x0):
        x0 = _frozen(x0).reshape(-1)
        n = x0.shape[0]
        mats = tuple(_frozen(np.reshape(a, (n, n)) if np.size(a) == 0 else a) for a in A)
        C = _frozen(C)
        if C.ndim == 1:
            C = _frozen(C.reshape(1, -1))
        if len(mats) < 2:
            raise DimensionError("need at least A_0 and one input matrix (m >= 1)")
        if C.ndim != 2 or C.shape[1] != n or C.shape[0] < 1:
            raise DimensionError(f"C must be p x {n} with p >= 1, got {C.shape}")
        for q, a in enumerate(mats):
            if a.shape != (n, n):
                raise DimensionError(f"A_{q} must be {n} x {n}, got {a.shape}")
        for arr in (*mats, C, x0):
            if not np.all(np.isfinite(arr)):
                raise ValueError("system matrices must be finite")
        object.__setattr__(self, "A", mats)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "x0", x0)

    @property
    def n(self) -> int:
        return self.x0.shape[0]

    @property
    def m(self) -> int:
        return len(self.A) - 1

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def __repr__(self):
        return f"BilinearSystem(p={self.p}, m={self.m}, n={self.n})"

    def allclose(self, other: "BilinearSystem", atol=1e-12) -> bool:
        if (self.p, self.m, self.n) != (other.p, other.m, other.n):
            return False
        pairs = list(zip(self.A, other.A)) + [(self.C, other.C), (self.x0, other.x0)]
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in pairs)


@dataclass(frozen=True)
class GrowthConstants:
    """Constants with ``||c(w)|| <= K * R**len(w)`` for every word."""

    K: float
    R: float


@dataclass(frozen=True)
class Lemma1Constants:
    """Certificate ``||c_f(w) - c(w)|| <= K_gamma * M_gamma**(len(w) - N_gamma)``
    for words outside the selection."""

    K_gamma: float
    M_gamma: float
    N_gamma: int


def parse_word(text: str) -> Word:
    """Parse ``"123"``, ``"1 2 3"``, ``"1.2.3"`` or ``"eps"``/``""`` into a word."""
    text = text.strip()
    if text in ("", "eps", "ε"):
        return EPSILON
    if any(c in text for c in " .,"):
        parts = text.replace(",", " ").replace(".", " ").split()
        return tuple(int(s) for s in parts)
    if not text.isdigit():
        raise ValueError(f"not a word: {text!r}")
    return tuple(int(c) for c in text)


def format_word(w: Iterable[int]) -> str:
    w = tuple(w)
    if not w:
        return "eps"
    if all(q < 10 for q in w):
        return "".join(str(q) for q in w)
    # a trailing dot keeps a lone multi-digit symbol from reading as several
    return ".".join(str(q) for q in w) + ("." if len(w) == 1 else "")


def check_word(w: Iterable[int], m: int) -> Word:
    w = tuple(int(q) for q in w)
    for q in w:
        if not 0 <= q <= m:
            raise AlphabetError(f"symbol {q} outside alphabet {{0..{m}}}")
    return w


def word_matrix(sys: BilinearSystem, w: Iterable[int]) -> np.ndarray:
    """Return ``A_w = A_{q_k} ... A_{q_1}`` for ``w = q_1 ... q_k``.

    The empty word gives the identity.
    """
    w = check_word(w, sys.m)
    out = np.eye(sys.n)
    for q in w:
        out = sys.A[q] @ out
    return out


def series_coefficient(sys: BilinearSystem, w: Iterable[int]) -> np.ndarray:
    """Generating-series coefficient ``c(w) = C A_w x0`` as a length-p vector."""
    return sys.C @ (word_matrix(sys, w) @ sys.x0)


def spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def max_matrix_norm(sys: BilinearSystem) -> float:
    """``M_A = max_q ||A_q||`` (induced 2-norm), floored away from zero."""
    return max(max(spectral_norm(a) for a in sys.A), _FLOOR)


def growth_constants(sys: BilinearSystem) -> GrowthConstants:
    K = spectral_norm(sys.C) * float(np.linalg.norm(sys.x0))
    return GrowthConstants(K=max(K, _FLOOR), R=max_matrix_norm(sys))


def lemma1_constants(sys_f: BilinearSystem, sys_red: BilinearSystem,
                     N_gamma: int) -> Lemma1Constants:
    """Constants bounding the coefficient mismatch outside a selection.

    ``sys_f`` realizes the target map, ``sys_red`` is the partial realization
    and ``N_gamma`` the largest N such that every word of length <= N is in the
    selection. A lower bound for N_gamma also gives a valid certificate.
    """
    if sys_f.p != sys_red.p or sys_f.m != sys_red.m:
        raise DimensionError(
            f"p/m mismatch: ({sys_f.p}, {sys_f.m}) vs ({sys_red.p}, {sys_red.m})")
    N = int(N_gamma)
    if N < 0:
        raise ValueError("N_gamma must be nonnegative")
    gf = growth_constants(sys_f)
    M_A = max_matrix_norm(sys_red)
    gain = spectral_norm(sys_red.C) * float(np.linalg.norm(sys_red.x0))
    K_prime = max(gain * M_A ** N, gf.K * gf.R ** N)
    return Lemma1Constants(K_gamma=2.0 * K_prime, M_gamma=max(gf.R, M_A), N_gamma=N)


def theorem2_bound(consts: Lemma1Constants, m: int, R: float, t: float) -> float:
    """A-priori output error bound at time ``t`` for inputs with sup-norm < R.

    Returns ``K_gamma * ((m+1)^2 K)^N_gamma * exp(M_gamma (m+1)^2 K)`` with
    ``K = max(R, t)``; ``inf`` on overflow.
    """
    if R < 0 or t < 0:
        raise ValueError("R and t must be nonnegative")
    scale = (m + 1) ** 2 * float(max(R, t))
    try:
        poly = scale ** int(consts.N_gamma)
        value = float(consts.K_gamma) * poly * math.exp(float(consts.M_gamma) * scale)
    except OverflowError:
        return math.inf
    return value if math.isfinite(value) else math.inf
