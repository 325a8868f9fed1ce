"""Reachability/unobservability spaces over word selections and projection
based reduced models.

Spaces for length-bounded selections come from a plain Krylov-like sweep;
spaces for selections given by a co-reachable NDFA come from a per-state
fixed point. Reduced models use transposes of orthonormal bases as the
left/right inverses, so any two runs produce identical matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import subspace_angles

from .automata import Ndfa, accepted_words, is_co_reachable
from .errors import ConvergenceError, DimensionError, PreconditionError
from .system import BilinearSystem, Word, series_coefficient

# Relative singular-value cutoff used when no tolerance is given. The bare
# max(n, k) * eps cutoff lets roundoff directions survive in the fixed-point
# iterations; this floor keeps ranks stable.
DEFAULT_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis of a subspace of R^n, stored as an n x r matrix."""

    basis: np.ndarray

    @property
    def r(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True, eq=False)
class ReductionResult:
    reduced: BilinearSystem
    projector: np.ndarray
    kind: str
    iterations: int = 0


def auto_tol(shape) -> float:
    return max(max(shape) * np.finfo(float).eps, DEFAULT_RTOL)


def orth(M, tol: Optional[float] = None) -> Subspace:
    """Orthonormal basis of the column space of ``M`` via SVD.

    Singular values above ``tol * sigma_max`` count towards the rank. Each
    basis column is signed so its first largest-magnitude entry is positive.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    n = M.shape[0]
    if M.shape[1] == 0 or n == 0:
        return Subspace(np.zeros((n, 0)))
    if tol is None:
        tol = auto_tol(M.shape)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0.0:
        return Subspace(np.zeros((n, 0)))
    r = int(np.sum(s > tol * s[0]))
    V = U[:, :r].copy()
    pivots = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivots, np.arange(r)])
    signs[signs == 0] = 1.0
    return Subspace(V * signs)


def _empty(n: int) -> np.ndarray:
    return np.zeros((n, 0))


def reach_space_depth(sys: BilinearSystem, N: int, tol: Optional[float] = None) -> Subspace:
    """Basis of span{A_w x0 : |w| <= N}."""
    if N < 0:
        raise ValueError("N must be >= 0")
    U0 = sys.x0.reshape(-1, 1)
    V = orth(U0, tol).basis
    for _ in range(N):
        V = orth(np.hstack([U0] + [A @ V for A in sys.A]), tol).basis
    return Subspace(V)


def unobs_space_depth(sys: BilinearSystem, N: int, tol: Optional[float] = None) -> np.ndarray:
    """Orthonormal-row W with ker W = intersection of ker(C A_w) over |w| <= N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    U0 = sys.C.T
    V = orth(U0, tol).basis
    for _ in range(N):
        V = orth(np.hstack([U0] + [A.T @ V for A in sys.A]), tol).basis
    return V.T


def _check_automaton(sys: BilinearSystem, aut: Ndfa):
    if aut.alphabet_size != sys.m + 1:
        raise DimensionError(
            f"automaton alphabet has {aut.alphabet_size} symbols, system has {sys.m + 1}")
    if not is_co_reachable(aut) and aut.final_states:
        raise PreconditionError("automaton must be co-reachable; trim it with co_reachable()")


def _iteration_cap(sys: BilinearSystem, aut: Ndfa) -> int:
    return sys.n * aut.num_states + 1


def reach_space_auto(sys: BilinearSystem, aut: Ndfa,
                     tol: Optional[float] = None) -> tuple[Subspace, int]:
    """Basis of span{A_w x0 : w in L(aut)} and the number of sweeps used.

    Every state keeps a basis of the vectors A_w x0 over words leading to it;
    a sweep pulls in A_q V_{s'} along each transition s' -q-> s until no rank
    changes. The answer is the span of the final-state bases.
    """
    _check_automaton(sys, aut)
    n = sys.n
    if not aut.final_states:
        return Subspace(_empty(n)), 0
    V = {s: _empty(n) for s in range(aut.num_states)}
    V[aut.initial_state] = orth(sys.x0, tol).basis
    cap = _iteration_cap(sys, aut)
    for it in range(1, cap + 1):
        old = dict(V)
        for s in range(aut.num_states):
            blocks = [old[s]]
            for q, src in aut.predecessors.get(s, ()):
                if old[src].shape[1]:
                    blocks.append(sys.A[q] @ old[src])
            V[s] = orth(np.hstack(blocks), tol).basis
        if all(V[s].shape[1] == old[s].shape[1] for s in V):
            finals = [V[f] for f in sorted(aut.final_states)]
            return orth(np.hstack(finals), tol), it
    raise ConvergenceError(f"per-state ranks still changing after {cap} sweeps")


def unobs_space_auto(sys: BilinearSystem, aut: Ndfa,
                     tol: Optional[float] = None) -> tuple[np.ndarray, int]:
    """Orthonormal-row W with ker W = intersection of ker(C A_w) over w in L(aut),
    plus the number of sweeps used."""
    _check_automaton(sys, aut)
    n = sys.n
    if not aut.final_states:
        return np.zeros((0, n)), 0
    # row spaces are kept as column bases of their transposes
    W = {s: _empty(n) for s in range(aut.num_states)}
    for f in aut.final_states:
        W[f] = orth(sys.C.T, tol).basis
    cap = _iteration_cap(sys, aut)
    succ = aut.successors
    for it in range(1, cap + 1):
        old = dict(W)
        for s in range(aut.num_states):
            blocks = [old[s]]
            for q in range(aut.alphabet_size):
                for dst in succ.get((s, q), ()):
                    if old[dst].shape[1]:
                        blocks.append(sys.A[q].T @ old[dst])
            W[s] = orth(np.hstack(blocks), tol).basis
        if all(W[s].shape[1] == old[s].shape[1] for s in W):
            return W[aut.initial_state].T, it
    raise ConvergenceError(f"per-state ranks still changing after {cap} sweeps")


def reduce_by_reachability(sys: BilinearSystem, V, iterations: int = 0) -> ReductionResult:
    """Project onto Im V: ``A_q -> V^T A_q V``, ``C -> C V``, ``x0 -> V^T x0``."""
    V = V.basis if isinstance(V, Subspace) else np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != sys.n:
        raise DimensionError(f"projector must have {sys.n} rows")
    if V.shape[1] == 0:
        raise PreconditionError("cannot reduce onto the zero subspace")
    red = BilinearSystem([V.T @ A @ V for A in sys.A], sys.C @ V, V.T @ sys.x0)
    return ReductionResult(red, V, "reachability", iterations)


def reduce_by_observability(sys: BilinearSystem, W, iterations: int = 0) -> ReductionResult:
    """Project along ker W: ``A_q -> W A_q W^T``, ``C -> C W^T``, ``x0 -> W x0``."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] != sys.n:
        raise DimensionError(f"projector must have {sys.n} columns")
    if W.shape[0] == 0:
        raise PreconditionError("cannot reduce with an empty row basis")
    red = BilinearSystem([W @ A @ W.T for A in sys.A], sys.C @ W.T, W @ sys.x0)
    return ReductionResult(red, W, "observability", iterations)


def verify_partial_realization(original: BilinearSystem, reduced: BilinearSystem, gamma,
                               depth: int, budget: int = 200_000) -> tuple[float, Optional[Word]]:
    """Largest coefficient mismatch ``|c(w) - c_red(w)|`` over accepted words of
    length <= depth, with the word attaining it (None if gamma has no such word)."""
    if original.p != reduced.p or original.m != reduced.m:
        raise DimensionError("systems differ in p or m")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    worst, worst_word = 0.0, None
    for w in accepted_words(gamma, depth, budget):
        dev = float(np.linalg.norm(series_coefficient(original, w) - series_coefficient(reduced, w)))
        if worst_word is None or dev > worst:
            worst, worst_word = dev, w
    return worst, worst_word


def principal_angles(A, B) -> np.ndarray:
    """Principal angles between column spaces (radians, descending); a rank
    mismatch yields a pi/2 angle."""
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if A.shape[1] == 0 and B.shape[1] == 0:
        return np.zeros(0)
    if A.shape[1] != B.shape[1] or A.shape[1] == 0 or B.shape[1] == 0:
        return np.array([np.pi / 2])
    return subspace_angles(A, B)
