"""Finite automata over the input alphabet {0, ..., m}.

Selections of words are handled as regular languages given by NDFAs. Symbols
are integers ``0 .. alphabet_size-1`` and states are integers
``0 .. num_states-1``. Language operations go through total DFAs built by
subset construction.

Shortest words are found breadth first with symbols tried in increasing
order, so every witness is the smallest word in length-then-lex order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional

from .errors import AlphabetError, CapacityError, PreconditionError
from .system import Word

DFA_STATE_CAP = 65536


@dataclass(frozen=True)
class Ndfa:
    num_states: int
    alphabet_size: int
    transitions: frozenset
    final_states: frozenset
    initial_state: int = 0

    def __init__(self, num_states, alphabet_size, transitions, final_states,
                 initial_state=0):
        trans = frozenset((int(s), int(q), int(t)) for s, q, t in transitions)
        finals = frozenset(int(s) for s in final_states)
        if num_states < 1:
            raise ValueError("an automaton needs at least one state")
        if alphabet_size < 1:
            raise ValueError("alphabet must be nonempty")
        for s, q, t in trans:
            if not (0 <= s < num_states and 0 <= t < num_states):
                raise ValueError(f"transition ({s}, {q}, {t}) uses an unknown state")
            if not 0 <= q < alphabet_size:
                raise AlphabetError(f"transition ({s}, {q}, {t}) uses symbol {q}")
        if not 0 <= initial_state < num_states:
            raise ValueError(f"initial state {initial_state} out of range")
        if not all(0 <= s < num_states for s in finals):
            raise ValueError("final states out of range")
        object.__setattr__(self, "num_states", int(num_states))
        object.__setattr__(self, "alphabet_size", int(alphabet_size))
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "final_states", finals)
        object.__setattr__(self, "initial_state", int(initial_state))

    @cached_property
    def successors(self) -> dict:
        """``(state, symbol) -> sorted tuple of targets``."""
        out: dict = {}
        for s, q, t in sorted(self.transitions):
            out.setdefault((s, q), []).append(t)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def predecessors(self) -> dict:
        """``state -> sorted tuple of (symbol, source)``."""
        out: dict = {}
        for s, q, t in sorted(self.transitions):
            out.setdefault(t, []).append((q, s))
        return {k: tuple(v) for k, v in out.items()}

    def step(self, states: Iterable[int], q: int) -> frozenset:
        succ = self.successors
        return frozenset(t for s in states for t in succ.get((s, q), ()))


@dataclass(frozen=True)
class Dfa:
    """Total DFA; ``delta[s][q]`` is the successor of state ``s`` on ``q``."""

    num_states: int
    alphabet_size: int
    delta: tuple
    final_states: frozenset
    initial_state: int = 0

    def run(self, w: Iterable[int], start: Optional[int] = None) -> int:
        s = self.initial_state if start is None else start
        for q in w:
            if not 0 <= q < self.alphabet_size:
                raise AlphabetError(f"symbol {q} outside alphabet of size {self.alphabet_size}")
            s = self.delta[s][q]
        return s

    def accepts(self, w: Iterable[int]) -> bool:
        return self.run(w) in self.final_states

    @cached_property
    def live_states(self) -> frozenset:
        """States from which some final state is reachable."""
        rev: dict = {}
        for s, row in enumerate(self.delta):
            for t in row:
                rev.setdefault(t, set()).add(s)
        seen = set(self.final_states)
        todo = list(seen)
        while todo:
            t = todo.pop()
            for s in rev.get(t, ()):
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
        return frozenset(seen)


@dataclass(frozen=True)
class ClosureReport:
    """Outcome of a prefix/suffix closure check.

    On failure ``witness`` is an accepted word and ``missing`` is one of its
    prefixes (suffixes) that the language rejects.
    """

    closed: bool
    witness: Optional[Word] = None
    missing: Optional[Word] = field(default=None)


# --- constructors -----------------------------------------------------------

def empty_automaton(alphabet_size: int) -> Ndfa:
    """Canonical empty-language automaton: one non-final state with self-loops."""
    return Ndfa(1, alphabet_size, [(0, q, 0) for q in range(alphabet_size)], [], 0)


def universal_automaton(alphabet_size: int) -> Ndfa:
    return Ndfa(1, alphabet_size, [(0, q, 0) for q in range(alphabet_size)], [0], 0)


def chain_automaton(N: int, m: int) -> Ndfa:
    """Automaton accepting exactly the words of length <= N over {0..m}."""
    if N < 0 or m < 1:
        raise ValueError("need N >= 0 and m >= 1")
    trans = [(i, q, i + 1) for i in range(N) for q in range(m + 1)]
    return Ndfa(N + 1, m + 1, trans, range(N + 1), 0)


def finite_automaton(words: Iterable[Iterable[int]], m: int) -> Ndfa:
    """Trie automaton accepting exactly the given finite set of words."""
    nodes = {(): 0}
    trans = []
    finals = set()
    for w in sorted({tuple(w) for w in words}, key=lambda w: (len(w), w)):
        for k in range(1, len(w) + 1):
            if w[:k] not in nodes:
                nodes[w[:k]] = len(nodes)
                trans.append((nodes[w[:k - 1]], w[k - 1], nodes[w[:k]]))
        finals.add(nodes[w])
    return Ndfa(len(nodes), m + 1, trans, finals, 0)


def switching_automaton(m: int, restart: bool = True) -> Ndfa:
    """The staircase selection used in the examples.

    States ``1..m`` (stored as ``0..m-1``), all final, start in 1. Symbol 0
    moves from i to any j >= i; symbol q moves from any i <= q to q. With
    ``restart`` the extra 0-transition from the last state back to 1 is added.
    Needs m >= 2 for ``restart`` to differ from the plain staircase.
    """
    trans = []
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            trans.append((i - 1, 0, j - 1))
    if restart:
        trans.append((m - 1, 0, 0))
    for q in range(1, m + 1):
        for i in range(1, q + 1):
            trans.append((i - 1, q, q - 1))
    return Ndfa(m, m + 1, trans, range(m), 0)


def consistent_word_automaton(word: Iterable[int], m: int) -> Ndfa:
    """NDFA for {0,q_1}* {0,q_2}* ... {0,q_k}*.

    State ``i`` means "currently inside block i"; a symbol may be consumed by
    the current block or by any later block that admits it.
    """
    word = tuple(word)
    if not word:
        raise PreconditionError("switching word must be nonempty")
    for q in word:
        if not 0 <= q <= m:
            raise AlphabetError(f"symbol {q} outside alphabet {{0..{m}}}")
    k = len(word)
    trans = set()
    for i in range(k):
        for j in range(i, k):
            trans.add((i, 0, j))
            trans.add((i, word[j], j))
    return Ndfa(k, m + 1, trans, range(k), 0)


# --- membership and trimming -----------------------------------------------

def accepts(a: Ndfa, w: Iterable[int]) -> bool:
    current = frozenset([a.initial_state])
    for q in w:
        if not 0 <= q < a.alphabet_size:
            raise AlphabetError(f"symbol {q} outside alphabet of size {a.alphabet_size}")
        current = a.step(current, q)
        if not current:
            return False
    return bool(current & a.final_states)


def _renumber(a: Ndfa, keep: set) -> Ndfa:
    order = sorted(keep)
    index = {s: i for i, s in enumerate(order)}
    trans = [(index[s], q, index[t]) for s, q, t in a.transitions if s in keep and t in keep]
    finals = [index[s] for s in a.final_states if s in keep]
    return Ndfa(len(order), a.alphabet_size, trans, finals, index[a.initial_state])


def is_co_reachable(a: Ndfa) -> bool:
    return len(_co_reachable_states(a)) == a.num_states


def _co_reachable_states(a: Ndfa) -> set:
    seen = set(a.final_states)
    todo = list(seen)
    while todo:
        t = todo.pop()
        for _, s in a.predecessors.get(t, ()):
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def co_reachable(a: Ndfa) -> Ndfa:
    """Drop every state that cannot reach a final state."""
    keep = _co_reachable_states(a)
    if a.initial_state not in keep:
        return empty_automaton(a.alphabet_size)
    if len(keep) == a.num_states:
        return a
    return _renumber(a, keep)


def reverse(a: Ndfa) -> Ndfa:
    """Automaton for the mirror language ``{reversed(w) : w in L(a)}``.

    A fresh start state (index ``num_states``) copies the reversed transitions
    leaving every old final state; the old initial state becomes the only
    final state.
    """
    start = a.num_states
    trans = {(t, q, s) for s, q, t in a.transitions}
    for s, q, t in a.transitions:
        if t in a.final_states:
            trans.add((start, q, s))
    finals = {a.initial_state}
    if a.initial_state in a.final_states:
        finals.add(start)
    return Ndfa(a.num_states + 1, a.alphabet_size, trans, finals, start)


# --- DFA algorithms ---------------------------------------------------------

def determinize(a: Ndfa, cap: int = DFA_STATE_CAP) -> Dfa:
    """Subset construction. The empty subset, if reached, is the sink."""
    start = frozenset([a.initial_state])
    index = {start: 0}
    subsets = [start]
    delta = []
    i = 0
    while i < len(subsets):
        row = []
        for q in range(a.alphabet_size):
            nxt = a.step(subsets[i], q)
            if nxt not in index:
                if len(subsets) >= cap:
                    raise CapacityError(f"determinization exceeds the state cap of {cap}", cap)
                index[nxt] = len(subsets)
                subsets.append(nxt)
            row.append(index[nxt])
        delta.append(tuple(row))
        i += 1
    finals = frozenset(k for k, sub in enumerate(subsets) if sub & a.final_states)
    return Dfa(len(subsets), a.alphabet_size, tuple(delta), finals, 0)


def _as_dfa(a) -> Dfa:
    return a if isinstance(a, Dfa) else determinize(a)


def complement(d: Dfa) -> Dfa:
    finals = frozenset(range(d.num_states)) - d.final_states
    return Dfa(d.num_states, d.alphabet_size, d.delta, finals, d.initial_state)


def intersect(d1: Dfa, d2: Dfa, cap: int = DFA_STATE_CAP) -> Dfa:
    """Product automaton restricted to reachable pairs."""
    if d1.alphabet_size != d2.alphabet_size:
        raise AlphabetError(
            f"alphabet sizes differ: {d1.alphabet_size} vs {d2.alphabet_size}")
    start = (d1.initial_state, d2.initial_state)
    index = {start: 0}
    pairs = [start]
    delta = []
    i = 0
    while i < len(pairs):
        s1, s2 = pairs[i]
        row = []
        for q in range(d1.alphabet_size):
            nxt = (d1.delta[s1][q], d2.delta[s2][q])
            if nxt not in index:
                if len(pairs) >= cap:
                    raise CapacityError(f"product exceeds the state cap of {cap}", cap)
                index[nxt] = len(pairs)
                pairs.append(nxt)
            row.append(index[nxt])
        delta.append(tuple(row))
        i += 1
    finals = frozenset(k for k, (s1, s2) in enumerate(pairs)
                       if s1 in d1.final_states and s2 in d2.final_states)
    return Dfa(len(pairs), d1.alphabet_size, tuple(delta), finals, 0)


def _shortest_paths(d: Dfa, start: int) -> dict:
    """BFS tree: state -> smallest (length-lex) word leading to it from ``start``."""
    words = {start: ()}
    todo = deque([start])
    while todo:
        s = todo.popleft()
        for q in range(d.alphabet_size):
            t = d.delta[s][q]
            if t not in words:
                words[t] = words[s] + (q,)
                todo.append(t)
    return words


def shortest_accepted(d: Dfa, start: Optional[int] = None) -> Optional[Word]:
    """Smallest accepted word in length-then-lex order, or None if L(d) is empty."""
    s0 = d.initial_state if start is None else start
    words = {s0: ()}
    todo = deque([s0])
    while todo:
        s = todo.popleft()
        if s in d.final_states:
            return words[s]
        for q in range(d.alphabet_size):
            t = d.delta[s][q]
            if t not in words:
                words[t] = words[s] + (q,)
                todo.append(t)
    return None


def is_empty(d: Dfa) -> bool:
    return shortest_accepted(d) is None


def includes(sub, sup) -> Optional[Word]:
    """Return None if L(sub) is contained in L(sup), else a shortest word of
    L(sub) missing from L(sup)."""
    d_sub, d_sup = _as_dfa(sub), _as_dfa(sup)
    if d_sub.alphabet_size != d_sup.alphabet_size:
        raise AlphabetError(
            f"alphabet sizes differ: {d_sub.alphabet_size} vs {d_sup.alphabet_size}")
    return shortest_accepted(intersect(d_sub, complement(d_sup)))


def equivalent(a, b) -> bool:
    return includes(a, b) is None and includes(b, a) is None


# --- closure checks ---------------------------------------------------------

def is_prefix_closed(a) -> ClosureReport:
    """Decide prefix closure on the trimmed DFA.

    A language is prefix closed iff every reachable state that can still reach
    a final state is itself final.
    """
    d = _as_dfa(a)
    paths = _shortest_paths(d, d.initial_state)
    bad = sorted((s for s in paths if s in d.live_states and s not in d.final_states),
                 key=lambda s: (len(paths[s]), paths[s]))
    if not bad:
        return ClosureReport(True)
    s = bad[0]
    prefix = paths[s]
    return ClosureReport(False, prefix + shortest_accepted(d, start=s), prefix)


def is_suffix_closed(a: Ndfa) -> ClosureReport:
    """Prefix test on the mirror automaton, witnesses mapped back."""
    if isinstance(a, Dfa):
        raise TypeError("suffix closure check expects an Ndfa")
    rep = is_prefix_closed(reverse(a))
    if rep.closed:
        return rep
    return ClosureReport(False, rep.witness[::-1], rep.missing[::-1])


# --- selection statistics ---------------------------------------------------

class AtLeast(int):
    """Integer lower bound returned when a search hit its cap."""

    def __repr__(self):
        return f"AtLeast({int(self)})"

    def __str__(self):
        return f">={int(self)}"


def max_uniform_depth(a, cap: int = 25) -> int:
    """Largest N such that every word of length <= N is accepted.

    Returns ``AtLeast(cap)`` if no word of length <= cap is rejected.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    d = _as_dfa(a)
    if d.initial_state not in d.final_states:
        raise PreconditionError("selection must contain the empty word")
    rejected = shortest_accepted(complement(d))
    if rejected is None or len(rejected) - 1 >= cap:
        return AtLeast(cap)
    return len(rejected) - 1


def in_consistent_set(gamma, word: Iterable[int]) -> bool:
    """True iff every block interleaving v_1...v_k, v_i in {0,q_i}*, lies in gamma."""
    d = _as_dfa(gamma)
    auto = consistent_word_automaton(word, d.alphabet_size - 1)
    return includes(auto, d) is None


def consistency_witness(gamma, word: Iterable[int]) -> Optional[Word]:
    """Shortest block interleaving of ``word`` that gamma rejects, if any."""
    d = _as_dfa(gamma)
    return includes(consistent_word_automaton(word, d.alphabet_size - 1), d)


# --- enumeration ------------------------------------------------------------

def iter_words(alphabet_size: int, max_len: int) -> Iterator[Word]:
    """All words of length <= max_len in length-then-lex order."""
    level = [()]
    for _ in range(max_len + 1):
        yield from level
        level = [w + (q,) for w in level for q in range(alphabet_size)]


def accepted_words(a, max_len: int, budget: Optional[int] = None) -> list[Word]:
    """Accepted words of length <= max_len in length-then-lex order.

    Branches that can no longer reach a final state are pruned. ``budget``
    bounds the number of words visited.
    """
    d = _as_dfa(a)
    live = d.live_states
    out = []
    level = [((), d.initial_state)] if d.initial_state in live else []
    visited = 0
    for _ in range(max_len + 1):
        nxt = []
        for w, s in level:
            visited += 1
            if budget is not None and visited > budget:
                raise CapacityError(f"word enumeration exceeds the budget of {budget}", budget)
            if s in d.final_states:
                out.append(w)
            for q in range(d.alphabet_size):
                t = d.delta[s][q]
                if t in live:
                    nxt.append((w + (q,), t))
        level = nxt
    return out
