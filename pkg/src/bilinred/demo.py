"""Small worked instance and random instance generators.

The demo is a 4-state, 3-input system together with a staircase selection
that admits the switching order 1 -> 2 -> 3, restarting after a 0. Text
copies of all demo objects ship in ``bilinred/data``.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .automata import Ndfa, co_reachable, switching_automaton
from .signals import PiecewiseSignal, consistent_input
from .system import BilinearSystem

DATA_FILES = {
    "system": "demo_system.txt",
    "selection": "demo_selection.txt",
    "consistent_input": "demo_input_consistent.txt",
    "switching_input": "demo_input_switching.txt",
    "chain3": "chain3_m3.txt",
}


def demo_system() -> BilinearSystem:
    A0 = np.diag([0.0, 0.0, -1.0, 0.0])
    A1 = np.zeros((4, 4))
    A1[2, 0] = 1.0
    A2 = np.zeros((4, 4))
    A2[0, 3] = 10.0
    A3 = np.array([[0.0, 1.0, 0.0, 0.0],
                   [-3.0, -0.1, 0.0, 0.0],
                   [0.0, 0.0, 2.0, 0.0],
                   [0.0, 0.0, 0.0, -1.0]])
    return BilinearSystem([A0, A1, A2, A3], [[1.0, 0.0, 1.0, 0.0]], [0.0, 0.0, 0.0, 1.0])


def demo_selection() -> Ndfa:
    return switching_automaton(3, restart=True)


def demo_consistent_input(T: float = 10.0) -> PiecewiseSignal:
    """Channels 1, 2, 3 in turn, a rest until 6.1, then channels 2 and 3 again.

    The rest covers [5, 6.1) so the segments tile the horizon.
    """
    c = "cos(pi*t)+2"
    return consistent_input((1, 2, 3, 0, 2, 3), (0.1, 0.2, 5.0, 6.1, 6.2, T),
                            [c, c, c, "0", c, c], 3)


def demo_switching_input(T: float = 10.0) -> PiecewiseSignal:
    """Channel 2, then 1, then 3: the order the selection forbids."""
    s = "sin(pi*t)+2"
    return consistent_input((2, 1, 3), (0.5, 1.0, T), [s, s, s], 3)


def data_path(name: str):
    return resources.files("bilinred") / "data" / DATA_FILES[name]


# --- random instances -------------------------------------------------------

def random_system(rng: np.random.Generator, n: int, m: int, p: int = 1,
                  scale: float = 1.0) -> BilinearSystem:
    A = [scale * rng.standard_normal((n, n)) / np.sqrt(n) for _ in range(m + 1)]
    return BilinearSystem(A, rng.standard_normal((p, n)), rng.standard_normal(n))


def random_automaton(rng: np.random.Generator, num_states: int, m: int,
                     density: float = 0.35, all_final: bool = False) -> Ndfa:
    """Random co-reachable NDFA with a nonempty language.

    With ``all_final`` every state is final, so the language is prefix closed
    and contains the empty word.
    """
    while True:
        trans = [(s, q, t) for s in range(num_states) for q in range(m + 1)
                 for t in range(num_states) if rng.random() < density]
        if all_final:
            finals = range(num_states)
        else:
            finals = [s for s in range(num_states) if rng.random() < 0.5]
        a = co_reachable(Ndfa(num_states, m + 1, trans, finals, 0))
        if a.final_states:
            return a


def hidden_invariant_system(rng: np.random.Generator, n: int = 200, m: int = 4,
                            k: int = 9) -> BilinearSystem:
    """Random stable system whose reachable set from x0 lies in a hidden
    k-dimensional subspace shared by all A_q (mixed by a random rotation)."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = []
    for q in range(m + 1):
        M = 0.5 * rng.standard_normal((n, n)) / np.sqrt(n)
        M[k:, :k] = 0.0
        if q == 0:
            M -= 0.5 * np.eye(n)
        A.append(Q @ M @ Q.T)
    x0 = Q[:, :k] @ rng.standard_normal(k)
    C = rng.standard_normal((1, n)) / np.sqrt(n)
    return BilinearSystem(A, C, x0)


def staircase_input(m: int, dwell: float = 10.0, expr: str = "cos(pi*t)") -> PiecewiseSignal:
    """``u = expr * e_i`` on ``[(i-1) dwell, i dwell)`` for i = 1..m."""
    word = tuple(range(1, m + 1))
    return consistent_input(word, [dwell * i for i in word], [expr] * m, m)
