"""Plain-text file formats for systems, automata and signals, plus CSV output.

System file::

    bilinear p m n
    A 0
    <n rows of n numbers>
    ...
    A m
    <n rows>
    C
    <p rows of n numbers>
    x0
    <n rows of one number>

Automaton file::

    ndfa <states> <alphabet size>
    initial <s>
    final <s1> <s2> ...
    trans <src> <symbol> <dst>      (one line per transition)

Signal file::

    signal <m> <T>
    seg <t_start> <t_end>
    <m lines, one expression per channel>
    ...

``#`` starts a comment anywhere on a line. Numbers are written with 17
significant digits so that write-then-read is exact.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .automata import Ndfa
from .errors import BilinredError
from .signals import PiecewiseSignal, Segment, parse_expression
from .system import BilinearSystem

PathLike = Union[str, Path]


class FormatError(BilinredError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _lines(text: str):
    """Yield ``(line_number, content)`` of non-blank lines with comments stripped."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _floats(line: str, no: int, count: int) -> list[float]:
    try:
        vals = [float(tok) for tok in line.split()]
    except ValueError as err:
        raise FormatError(str(err), no) from None
    if len(vals) != count:
        raise FormatError(f"expected {count} numbers, found {len(vals)}", no)
    return vals


# --- systems ----------------------------------------------------------------

def system_to_text(sys: BilinearSystem) -> str:
    out = [f"bilinear {sys.p} {sys.m} {sys.n}"]
    for q, A in enumerate(sys.A):
        out.append(f"A {q}")
        out.extend(" ".join(fmt(v) for v in row) for row in A)
    out.append("C")
    if sys.n:
        out.extend(" ".join(fmt(v) for v in row) for row in sys.C)
    out.append("x0")
    out.extend(fmt(v) for v in sys.x0)
    return "\n".join(out) + "\n"


def parse_system(text: str) -> BilinearSystem:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty system file")
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 4 or parts[0] != "bilinear":
        raise FormatError("header must be 'bilinear p m n'", no)
    try:
        p, m, n = (int(v) for v in parts[1:])
    except ValueError:
        raise FormatError("p, m, n must be integers", no) from None
    pos = 1

    def block(label, rows, cols):
        nonlocal pos
        if pos >= len(lines) or lines[pos][1].split() != label.split():
            found = lines[pos][1] if pos < len(lines) else "end of file"
            raise FormatError(f"expected block '{label}', found {found!r}",
                              lines[pos][0] if pos < len(lines) else None)
        pos += 1
        if cols == 0:
            # zero-width rows are blank lines, which the reader skips
            return np.zeros((rows, 0))
        data = []
        for _ in range(rows):
            if pos >= len(lines):
                raise FormatError(f"block '{label}' is truncated")
            data.append(_floats(lines[pos][1], lines[pos][0], cols))
            pos += 1
        return np.array(data, dtype=float).reshape(rows, cols)

    A = [block(f"A {q}", n, n) for q in range(m + 1)]
    C = block("C", p, n)
    x0 = block("x0", n, 1).reshape(n)
    if pos != len(lines):
        raise FormatError("trailing content", lines[pos][0])
    return BilinearSystem(A, C, x0)


def read_system(path: PathLike) -> BilinearSystem:
    return parse_system(Path(path).read_text(encoding="utf-8"))


def write_system(sys: BilinearSystem, path: PathLike) -> None:
    Path(path).write_text(system_to_text(sys), encoding="utf-8")


# --- automata ---------------------------------------------------------------

def automaton_to_text(a: Ndfa) -> str:
    out = [f"ndfa {a.num_states} {a.alphabet_size}", f"initial {a.initial_state}",
           " ".join(["final"] + [str(s) for s in sorted(a.final_states)])]
    out.extend(f"trans {s} {q} {t}" for s, q, t in sorted(a.transitions))
    return "\n".join(out) + "\n"


def parse_automaton(text: str) -> Ndfa:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty automaton file")
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "ndfa":
        raise FormatError("header must be 'ndfa states alphabet'", no)
    try:
        num, alpha = int(parts[1]), int(parts[2])
        initial, finals, trans = None, None, []
        for no, line in lines[1:]:
            key, *rest = line.split()
            if key == "initial" and len(rest) == 1:
                initial = int(rest[0])
            elif key == "final":
                finals = [int(v) for v in rest]
            elif key == "trans" and len(rest) == 3:
                trans.append(tuple(int(v) for v in rest))
            else:
                raise FormatError(f"unrecognised line {line!r}", no)
    except ValueError as err:
        raise FormatError(str(err), no) from None
    if initial is None or finals is None:
        raise FormatError("automaton needs 'initial' and 'final' lines")
    return Ndfa(num, alpha, trans, finals, initial)


def read_automaton(path: PathLike) -> Ndfa:
    return parse_automaton(Path(path).read_text(encoding="utf-8"))


def write_automaton(a: Ndfa, path: PathLike) -> None:
    Path(path).write_text(automaton_to_text(a), encoding="utf-8")


# --- signals ----------------------------------------------------------------

def signal_to_text(u: PiecewiseSignal) -> str:
    out = [f"signal {u.m} {fmt(u.horizon)}"]
    for seg in u.segments:
        out.append(f"seg {fmt(seg.t_start)} {fmt(seg.t_end)}")
        out.extend(str(e) for e in seg.exprs)
    return "\n".join(out) + "\n"


def parse_signal(text: str) -> PiecewiseSignal:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty signal file")
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "signal":
        raise FormatError("header must be 'signal m T'", no)
    m, T = int(parts[1]), float(parts[2])
    segs = []
    pos = 1
    while pos < len(lines):
        no, line = lines[pos]
        bits = line.split()
        if bits[0] != "seg" or len(bits) != 3:
            raise FormatError(f"expected 'seg t_start t_end', found {line!r}", no)
        t0, t1 = _floats(" ".join(bits[1:]), no, 2)
        exprs = []
        for k in range(m):
            if pos + 1 + k >= len(lines):
                raise FormatError("segment has too few channel expressions", no)
            e_no, src = lines[pos + 1 + k]
            try:
                exprs.append(parse_expression(src))
            except BilinredError as err:
                raise FormatError(str(err), e_no) from None
        segs.append(Segment(t0, t1, tuple(exprs)))
        pos += 1 + m
    try:
        u = PiecewiseSignal(m, tuple(segs))
    except ValueError as err:
        raise FormatError(str(err)) from None
    if u.horizon != T:
        raise FormatError(f"segments end at {u.horizon}, header says T={T}")
    return u


def read_signal(path: PathLike) -> PiecewiseSignal:
    return parse_signal(Path(path).read_text(encoding="utf-8"))


def write_signal(u: PiecewiseSignal, path: PathLike) -> None:
    Path(path).write_text(signal_to_text(u), encoding="utf-8")


# --- CSV --------------------------------------------------------------------

def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
