"""Command-line front end.

Subcommands::

    bilinred reduce   SYSTEM AUTOMATON [--mode reach|obs]
    bilinred simulate SYSTEM SIGNAL [--states]
    bilinred compare  SYSTEM_A SYSTEM_B SIGNAL [--automaton AUTOMATON]
    bilinred check    AUTOMATON (--word W | --signal SIGNAL)
    bilinred coeffs   SYSTEM [--automaton AUTOMATON]
    bilinred demo-files

Results go to ``--out`` (default: current directory). Exit codes: 0 success,
2 parse error, 3 precondition or closure refusal, 4 capacity or convergence
failure, 5 divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import automata as fa
from .demo import DATA_FILES, data_path
from .dynamics import all_words, annihilation_witness, compare_outputs, output_error, simulate
from .errors import (AlphabetError, CapacityError, ConvergenceError, DimensionError,
                     DivergenceError, ExpressionError, PreconditionError)
from .io import (FormatError, fmt, read_automaton, read_signal, read_system, write_csv,
                 write_system)
from .reduction import (reduce_by_observability, reduce_by_reachability, reach_space_auto,
                        unobs_space_auto, verify_partial_realization)
from .signals import PiecewiseSignal, sup_norm_estimate, switching_word
from .system import (BilinearSystem, format_word, lemma1_constants, parse_word,
                     series_coefficient, theorem2_bound)

EXIT_OK, EXIT_PARSE, EXIT_REFUSED, EXIT_CAPACITY, EXIT_DIVERGED = 0, 2, 3, 4, 5

# the sampled sup-norm is a lower estimate; inflate it before using it as a bound
SUP_NORM_INFLATION = 1.05


@dataclass
class RunConfig:
    dt: float = 1e-3
    horizon: Optional[float] = None
    truncation: int = 6
    depth: int = 5
    cap: int = 25
    out: Path = Path(".")

    def __post_init__(self):
        self.out = Path(self.out)
        if self.dt <= 0 or (self.horizon is not None and self.horizon <= 0):
            raise PreconditionError("dt and horizon must be positive")
        if self.truncation < 1 or self.depth < 1 or self.cap < 1:
            raise PreconditionError("truncation, depth and cap must be positive")

    def horizon_for(self, u: PiecewiseSignal) -> float:
        return u.horizon if self.horizon is None else self.horizon


class Refusal(PreconditionError):
    """A closure or consistency check rejected the inputs."""


# --- operations (library level) ---------------------------------------------

def selection_depth(aut: fa.Ndfa, cap: int) -> int:
    """Uniform depth of the selection, 0 when it lacks the empty word."""
    if not fa.accepts(aut, ()):
        return 0
    return fa.max_uniform_depth(aut, cap)


def reduce_system(sys: BilinearSystem, aut: fa.Ndfa, mode: str = "reach",
                  config: Optional[RunConfig] = None):
    """Reduce ``sys`` over the selection ``aut``; returns ``(result, report)``."""
    config = config or RunConfig()
    if aut.alphabet_size != sys.m + 1:
        raise DimensionError(
            f"automaton alphabet size {aut.alphabet_size} does not match m+1={sys.m + 1}")
    if mode == "reach":
        closure = fa.is_prefix_closed(aut)
        kind = "prefix"
    elif mode == "obs":
        closure = fa.is_suffix_closed(aut)
        kind = "suffix"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not closure.closed:
        raise Refusal(f"selection is not {kind} closed: accepts {format_word(closure.witness)} "
                      f"but rejects {format_word(closure.missing)}")
    trimmed = fa.co_reachable(aut)
    if mode == "reach":
        V, iterations = reach_space_auto(sys, trimmed)
        result = reduce_by_reachability(sys, V, iterations)
    else:
        W, iterations = unobs_space_auto(sys, trimmed)
        result = reduce_by_observability(sys, W, iterations)
    dev, worst = verify_partial_realization(sys, result.reduced, aut, config.depth)
    n_gamma = selection_depth(aut, config.cap)
    report = {
        "mode": mode,
        "original_order": sys.n,
        "reduced_order": result.reduced.n,
        "iterations": iterations,
        "verification_depth": config.depth,
        "max_coefficient_deviation": dev,
        "worst_word": None if worst is None else format_word(worst),
        "N_gamma": int(n_gamma),
        "N_gamma_capped": isinstance(n_gamma, fa.AtLeast),
    }
    return result, report


@dataclass
class Comparison:
    times: np.ndarray
    error: np.ndarray
    bound: np.ndarray
    max_abs: float
    l2: float
    argmax_t: float
    R: float
    diverged_at: Optional[float] = None

    def summary(self) -> dict:
        return {
            "max_abs": self.max_abs, "l2": self.l2, "argmax_t": self.argmax_t,
            "R": self.R, "bound_at_end": float(self.bound[-1]),
            "final_time": float(self.times[-1]), "diverged_at": self.diverged_at,
        }


def compare_systems(sys_a: BilinearSystem, sys_b: BilinearSystem, u: PiecewiseSignal,
                    config: Optional[RunConfig] = None,
                    selection: Optional[fa.Ndfa] = None) -> Comparison:
    """Simulate both systems and tabulate ``|y_a - y_b|`` with the a-priori bound.

    ``sys_a`` plays the original, ``sys_b`` the partial realization. If either
    simulation diverges, both trajectories are cut at the last common time.
    """
    config = config or RunConfig()
    if sys_a.p != sys_b.p or sys_a.m != sys_b.m:
        raise DimensionError("systems differ in p or m")
    T = config.horizon_for(u)
    diverged_at = None
    trajs = []
    for s in (sys_a, sys_b):
        try:
            trajs.append(simulate(s, u, T, config.dt, keep_states=False))
        except DivergenceError as err:
            diverged_at = err.time if diverged_at is None else min(diverged_at, err.time)
            trajs.append(err.trajectory)
    k = min(len(t.times) for t in trajs)
    a, b = trajs[0].truncated(k), trajs[1].truncated(k)
    max_abs, l2, argmax_t = compare_outputs(a, b)
    N = selection_depth(selection, config.cap) if selection is not None else 0
    consts = lemma1_constants(sys_a, sys_b, N)
    R = SUP_NORM_INFLATION * sup_norm_estimate(u.restrict(T), 1000)
    bound = np.array([theorem2_bound(consts, sys_a.m, R, t) for t in a.times])
    return Comparison(a.times, output_error(a, b), bound, max_abs, l2, argmax_t, R, diverged_at)


def check_consistency(aut: fa.Ndfa, word=None, signal: Optional[PiecewiseSignal] = None,
                      config: Optional[RunConfig] = None) -> dict:
    """Consistency verdict for a switching word, or for the word read off a
    signal together with its largest iterated integral outside the selection."""
    config = config or RunConfig()
    if (word is None) == (signal is None):
        raise ValueError("give exactly one of word or signal")
    if signal is not None:
        word = switching_word(signal)
    word = tuple(word)
    witness = fa.consistency_witness(aut, word)
    out = {"word": format_word(word), "consistent": witness is None,
           "witness": None if witness is None else format_word(witness)}
    if signal is not None:
        T = config.horizon_for(signal)
        value, bad = annihilation_witness(signal, aut, config.depth, T, config.dt)
        out.update(residual=value, residual_word=None if bad is None else format_word(bad),
                   residual_depth=config.depth)
    return out


def coefficient_table(sys: BilinearSystem, aut: Optional[fa.Ndfa], depth: int):
    """Rows ``(word, c(w))`` for accepted words up to ``depth``, length-then-lex."""
    if aut is None:
        words = all_words(sys.m, depth)
    else:
        if aut.alphabet_size != sys.m + 1:
            raise DimensionError("automaton alphabet does not match the system")
        words = fa.accepted_words(aut, depth, budget=200_000)
    return [(w, series_coefficient(sys, w)) for w in words]


# --- command handlers -------------------------------------------------------

def _json_safe(value):
    # strict JSON has no infinities; write them as strings
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def _write_json(path: Path, data: dict):
    clean = {k: _json_safe(v) for k, v in data.items()}
    path.write_text(json.dumps(clean, indent=2, sort_keys=True, allow_nan=False) + "\n",
                    encoding="utf-8")


def cmd_reduce(args, config: RunConfig) -> int:
    sys_ = read_system(args.system)
    aut = read_automaton(args.automaton)
    result, report = reduce_system(sys_, aut, args.mode, config)
    config.out.mkdir(parents=True, exist_ok=True)
    write_system(result.reduced, config.out / "reduced.txt")
    _write_json(config.out / "reduce_report.json", report)
    print(f"order {report['original_order']} -> {report['reduced_order']} "
          f"({report['iterations']} sweeps), max coefficient deviation "
          f"{report['max_coefficient_deviation']:.3e} up to depth {config.depth}, "
          f"N_gamma {report['N_gamma']}")
    return EXIT_OK


def cmd_simulate(args, config: RunConfig) -> int:
    sys_ = read_system(args.system)
    u = read_signal(args.signal)
    status = EXIT_OK
    try:
        traj = simulate(sys_, u, config.horizon_for(u), config.dt, keep_states=args.states)
    except DivergenceError as err:
        traj = err.trajectory
        print(f"diverged at t={err.time:.6g}; writing partial trajectory", file=sys.stderr)
        status = EXIT_DIVERGED
    header = ["t"] + [f"y{i + 1}" for i in range(sys_.p)]
    cols = [traj.times[:, None], traj.outputs]
    if args.states:
        header += [f"x{i + 1}" for i in range(sys_.n)]
        cols.append(traj.states)
    config.out.mkdir(parents=True, exist_ok=True)
    write_csv(config.out / "trajectory.csv", header, np.hstack(cols).tolist())
    return status


def cmd_compare(args, config: RunConfig) -> int:
    sys_a, sys_b = read_system(args.system_a), read_system(args.system_b)
    u = read_signal(args.signal)
    selection = read_automaton(args.automaton) if args.automaton else None
    cmp = compare_systems(sys_a, sys_b, u, config, selection)
    config.out.mkdir(parents=True, exist_ok=True)
    write_csv(config.out / "compare.csv", ["t", "error", "bound"],
              zip(cmp.times.tolist(), cmp.error.tolist(), cmp.bound.tolist()))
    _write_json(config.out / "compare_summary.json", cmp.summary())
    print(f"max |y_a - y_b| = {cmp.max_abs:.3e} at t={cmp.argmax_t:.4g}, L2 = {cmp.l2:.3e}")
    if cmp.diverged_at is not None:
        print(f"diverged at t={cmp.diverged_at:.6g}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_check(args, config: RunConfig) -> int:
    aut = read_automaton(args.automaton)
    if args.signal:
        verdict = check_consistency(aut, signal=read_signal(args.signal), config=config)
    else:
        verdict = check_consistency(aut, word=parse_word(args.word), config=config)
    print(json.dumps(verdict, sort_keys=True))
    return EXIT_OK


def cmd_coeffs(args, config: RunConfig) -> int:
    sys_ = read_system(args.system)
    aut = read_automaton(args.automaton) if args.automaton else None
    rows = coefficient_table(sys_, aut, config.depth)
    config.out.mkdir(parents=True, exist_ok=True)
    write_csv(config.out / "coeffs.csv", ["word"] + [f"c{i + 1}" for i in range(sys_.p)],
              ([format_word(w)] + [fmt(v) for v in c] for w, c in rows))
    return EXIT_OK


def cmd_demo_files(args, config: RunConfig) -> int:
    config.out.mkdir(parents=True, exist_ok=True)
    for name in DATA_FILES:
        target = config.out / DATA_FILES[name]
        target.write_text(data_path(name).read_text(encoding="utf-8"), encoding="utf-8")
        print(target)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dt", type=float, default=1e-3, help="RK4 step (default 1e-3)")
    common.add_argument("--horizon", type=float, default=None,
                        help="final time (default: the signal's horizon)")
    common.add_argument("--depth", type=int, default=5,
                        help="word length for coefficient checks (default 5)")
    common.add_argument("--truncation", type=int, default=6,
                        help="Fliess truncation depth (default 6)")
    common.add_argument("--cap", type=int, default=25, help="search cap for N_gamma")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")

    parser = argparse.ArgumentParser(prog="bilinred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="reduce a system over a selection")
    p.add_argument("system")
    p.add_argument("automaton")
    p.add_argument("--mode", choices=["reach", "obs"], default="reach")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", parents=[common], help="simulate a system")
    p.add_argument("system")
    p.add_argument("signal")
    p.add_argument("--states", action="store_true", help="also write state columns")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[common], help="compare two systems' outputs")
    p.add_argument("system_a")
    p.add_argument("system_b")
    p.add_argument("signal")
    p.add_argument("--automaton", help="selection used for N_gamma in the error bound")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check", parents=[common], help="consistency of a word or signal")
    p.add_argument("automaton")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--word")
    group.add_argument("--signal")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("coeffs", parents=[common], help="tabulate series coefficients")
    p.add_argument("system")
    p.add_argument("--automaton", help="restrict to accepted words")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("demo-files", parents=[common], help="write the demo input files")
    p.set_defaults(func=cmd_demo_files)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(dt=args.dt, horizon=args.horizon, truncation=args.truncation,
                           depth=args.depth, cap=args.cap, out=args.out)
        return args.func(args, config)
    except (FormatError, ExpressionError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, DimensionError, AlphabetError) as err:
        print(f"refused: {err}", file=sys.stderr)
        return EXIT_REFUSED
    except (CapacityError, ConvergenceError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except DivergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
