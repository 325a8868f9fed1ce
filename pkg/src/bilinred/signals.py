"""Piecewise multichannel input signals.

Each segment ``[t_start, t_end)`` carries one scalar expression per channel.
Expressions use a small grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | atom
    atom   := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := 'cos' | 'sin' | 'exp'

Expressions evaluate elementwise on numpy arrays of times.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ExpressionError, PreconditionError
from .system import Word, check_word

_FUNCS = {"cos": np.cos, "sin": np.sin, "exp": np.exp}
_CONSTS = {"pi": math.pi}


class Expr:
    def __call__(self, t):
        return self.evaluate(t)


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def evaluate(self, t):
        return np.zeros_like(t, dtype=float) + self.value

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Const(Expr):
    name: str

    def evaluate(self, t):
        return np.zeros_like(t, dtype=float) + _CONSTS[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Time(Expr):
    def evaluate(self, t):
        return np.asarray(t, dtype=float) + 0.0

    def __str__(self):
        return "t"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def evaluate(self, t):
        return -self.arg.evaluate(t)

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, t):
        a, b = self.left.evaluate(t), self.right.evaluate(t)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if np.any(b == 0):
            raise ExpressionError(f"division by zero in {self}")
        return a / b

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def evaluate(self, t):
        return _FUNCS[self.func](self.arg.evaluate(t))

    def __str__(self):
        return f"{self.func}({self.arg})"


_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_]\w*")


def _tokenize(src: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            break
        if m := _NUMBER.match(src, pos):
            tokens.append(("num", m.group(0), pos))
        elif m := _NAME.match(src, pos):
            tokens.append(("name", m.group(0), pos))
        elif src[pos] in "+-*/()":
            tokens.append(("op", src[pos], pos))
            pos += 1
            continue
        else:
            raise ExpressionError(f"unexpected character {src[pos]!r}", pos)
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind != "op":
            what = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {text!r}, found {what}", pos)

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return Neg(inner) if val == "-" else inner
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "t":
                return Time()
            if val in _CONSTS:
                return Const(val)
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ExpressionError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {what}", pos)


def parse_expression(src: str) -> Expr:
    return _Parser(src).parse()


def _as_expr(e) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, (int, float)):
        return Num(float(e))
    return parse_expression(e)


ZERO = Num(0.0)


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    exprs: tuple

    def values(self, t) -> np.ndarray:
        """Channel values at times ``t``; shape ``(len(t), m)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.exprs:
            return np.zeros((t.size, 0))
        return np.stack([np.broadcast_to(e.evaluate(t), t.shape) for e in self.exprs], axis=1)


@dataclass(frozen=True)
class PiecewiseSignal:
    """Input signal on ``[0, T]`` made of right-open segments."""

    m: int
    segments: tuple

    def __post_init__(self):
        segs = tuple(
            s if isinstance(s, Segment)
            else Segment(float(s[0]), float(s[1]), tuple(_as_expr(e) for e in s[2]))
            for s in self.segments)
        if not segs:
            raise ValueError("a signal needs at least one segment")
        if segs[0].t_start != 0.0:
            raise ValueError("first segment must start at 0")
        for a, b in zip(segs, segs[1:]):
            if a.t_end != b.t_start:
                raise ValueError(f"segments must be contiguous: {a.t_end} != {b.t_start}")
        for s in segs:
            if not s.t_end > s.t_start:
                raise ValueError(f"empty segment [{s.t_start}, {s.t_end})")
            if len(s.exprs) != self.m:
                raise ValueError(f"segment has {len(s.exprs)} channels, expected {self.m}")
        object.__setattr__(self, "segments", segs)

    @property
    def horizon(self) -> float:
        return self.segments[-1].t_end

    def segment_index(self, t: float) -> int:
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        starts = [s.t_start for s in self.segments]
        return int(np.searchsorted(starts, t, side="right")) - 1

    def restrict(self, T: float) -> "PiecewiseSignal":
        """Same signal on the shorter horizon ``[0, T]``."""
        if not 0 < T <= self.horizon:
            raise ValueError(f"T={T} outside (0, {self.horizon}]")
        segs = []
        for s in self.segments:
            if s.t_start >= T:
                break
            segs.append(Segment(s.t_start, min(s.t_end, T), s.exprs))
        return PiecewiseSignal(self.m, tuple(segs))


def eval_signal(u: PiecewiseSignal, t: float) -> np.ndarray:
    """Value ``u(t)``; the last segment also covers ``t = T``."""
    seg = u.segments[u.segment_index(t)]
    return seg.values(t)[0]


def zero_signal(m: int, T: float) -> PiecewiseSignal:
    return PiecewiseSignal(m, ((0.0, T, (ZERO,) * m),))


def consistent_input(word: Sequence[int], boundaries: Sequence[float],
                     scalar_exprs: Sequence, m: int) -> PiecewiseSignal:
    """Switching input ``u(s) = u_i(s) e_{q_i}`` on ``[t_{i-1}, t_i)``.

    ``boundaries`` are ``t_1 < ... < t_k = T`` with ``t_0 = 0``; symbol 0
    gives the all-zero vector.
    """
    word = check_word(word, m)
    if len(word) != len(boundaries) or len(word) != len(scalar_exprs):
        raise PreconditionError("word, boundaries and expressions must have equal length")
    if not word:
        raise PreconditionError("word must be nonempty")
    edges = [0.0] + [float(b) for b in boundaries]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise PreconditionError("boundaries must be strictly increasing and positive")
    segs = []
    for i, q in enumerate(word):
        exprs = [ZERO] * m
        if q:
            exprs[q - 1] = _as_expr(scalar_exprs[i])
        segs.append(Segment(edges[i], edges[i + 1], tuple(exprs)))
    return PiecewiseSignal(m, tuple(segs))


def switching_word(u: PiecewiseSignal, probes: int = 16) -> Word:
    """Recover the switching sequence of a signal with at most one active channel
    per segment; raises if a segment drives two channels."""
    word = []
    for seg in u.segments:
        ts = np.linspace(seg.t_start, seg.t_end, probes)
        vals = seg.values(ts)
        active = [j + 1 for j in range(u.m) if np.any(vals[:, j] != 0)]
        if len(active) > 1:
            raise PreconditionError(
                f"segment [{seg.t_start}, {seg.t_end}) drives channels {active}")
        word.append(active[0] if active else 0)
    return tuple(word)


def sup_norm_estimate(u: PiecewiseSignal, samples_per_segment: int = 1000) -> float:
    """Largest Euclidean norm of ``u`` on a uniform grid per segment (segment
    end points included, using the segment's own expressions)."""
    if samples_per_segment < 2:
        raise ValueError("need at least 2 samples per segment")
    best = 0.0
    for seg in u.segments:
        vals = seg.values(np.linspace(seg.t_start, seg.t_end, samples_per_segment))
        if vals.size:
            best = max(best, float(np.max(np.linalg.norm(vals, axis=1))))
    return best
