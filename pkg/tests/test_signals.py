import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bilinred.errors import AlphabetError, ExpressionError, PreconditionError
from bilinred.signals import (PiecewiseSignal, Segment, consistent_input, eval_signal,
                              parse_expression, sup_norm_estimate, switching_word, zero_signal)


class TestParser:
    @pytest.mark.parametrize("src, t, value", [
        ("cos(pi*t)+2", 0.0, 3.0),
        ("0", 1.7, 0.0),
        ("1 - 2 - 3", 0.0, -4.0),
        ("2*3+4", 0.0, 10.0),
        ("2*(3+4)", 0.0, 14.0),
        ("8/4/2", 0.0, 1.0),
        ("-t*2", 3.0, -6.0),
        ("--t", 3.0, 3.0),
        ("exp(t) * sin(t)", 0.5, math.exp(0.5) * math.sin(0.5)),
        (" 1.5e2 + .5 ", 0.0, 150.5),
    ])
    def test_values(self, src, t, value):
        assert float(parse_expression(src).evaluate(np.array([t]))[0]) == pytest.approx(value)

    @pytest.mark.parametrize("src, pos", [("2*t*(1-t", 8), ("cos t", 4), ("1 +", 3),
                                          ("2 $ 3", 2), ("(1))", 3)])
    def test_syntax_errors_carry_position(self, src, pos):
        with pytest.raises(ExpressionError, match=f"position {pos}"):
            parse_expression(src)

    def test_unknown_identifier(self):
        with pytest.raises(ExpressionError, match="unknown identifier 'tan'"):
            parse_expression("tan(t)")

    def test_division_by_zero(self):
        with pytest.raises(ExpressionError):
            parse_expression("1/(t-1)").evaluate(np.array([0.0, 1.0]))

    def test_vectorized(self):
        t = np.linspace(0, 1, 7)
        assert np.allclose(parse_expression("t*t").evaluate(t), t ** 2)
        assert parse_expression("2").evaluate(t).shape == t.shape


def expressions():
    leaf = st.one_of(st.floats(0, 100, allow_nan=False).map(repr), st.just("t"),
                     st.just("pi"))

    def extend(children):
        binary = st.tuples(children, st.sampled_from("+-*"), children).map(
            lambda x: f"({x[0]} {x[1]} {x[2]})")
        unary = children.map(lambda e: f"-{e}")
        calls = st.tuples(st.sampled_from(["cos", "sin"]), children).map(
            lambda x: f"{x[0]}({x[1]})")
        return st.one_of(binary, unary, calls)

    return st.recursive(leaf, extend, max_leaves=8)


@settings(max_examples=100)
@given(expressions())
def test_print_parse_round_trip(src):
    e = parse_expression(src)
    again = parse_expression(str(e))
    t = np.random.default_rng(0).uniform(-3, 3, 100)
    assert np.allclose(e.evaluate(t), again.evaluate(t), rtol=1e-12, atol=1e-12)
    assert str(again) == str(e)


class TestSignals:
    def test_consistent_u_values(self, consistent_u):
        assert np.allclose(eval_signal(consistent_u, 0.05), [math.cos(0.05 * math.pi) + 2, 0, 0])
        assert np.allclose(eval_signal(consistent_u, 0.15), [0, math.cos(0.15 * math.pi) + 2, 0])
        assert np.allclose(eval_signal(consistent_u, 5.5), [0, 0, 0])
        assert np.allclose(eval_signal(consistent_u, 10.0), [0, 0, math.cos(10 * math.pi) + 2])
        assert consistent_u.horizon == 10.0

    def test_switching_u_values(self, switching_u):
        assert np.allclose(eval_signal(switching_u, 0.25), [0, math.sin(0.25 * math.pi) + 2, 0])
        assert np.allclose(eval_signal(switching_u, 0.5), [math.sin(0.5 * math.pi) + 2, 0, 0])

    def test_zero_signal(self):
        u = zero_signal(3, 2.0)
        for t in (0.0, 1.3, 2.0):
            assert np.array_equal(eval_signal(u, t), np.zeros(3))

    def test_outside_horizon(self, consistent_u):
        with pytest.raises(ValueError):
            eval_signal(consistent_u, 10.5)
        with pytest.raises(ValueError):
            eval_signal(consistent_u, -0.1)

    def test_invalid_partitions(self):
        one = ("1",)
        with pytest.raises(ValueError):
            PiecewiseSignal(1, ((0.5, 1.0, one),))
        with pytest.raises(ValueError):
            PiecewiseSignal(1, ((0.0, 1.0, one), (1.5, 2.0, one)))
        with pytest.raises(ValueError):
            PiecewiseSignal(1, ((0.0, 1.0, one), (1.0, 1.0, one)))
        with pytest.raises(ValueError):
            PiecewiseSignal(2, ((0.0, 1.0, one),))

    def test_partition_property(self, consistent_u, rng):
        for t in rng.uniform(0, consistent_u.horizon, 1000):
            owners = [s for s in consistent_u.segments if s.t_start <= t < s.t_end]
            assert len(owners) == 1
            assert consistent_u.segments[consistent_u.segment_index(t)] is owners[0]

    def test_restrict(self, consistent_u):
        u = consistent_u.restrict(5.5)
        assert u.horizon == 5.5 and len(u.segments) == 4
        assert np.array_equal(eval_signal(u, 0.15), eval_signal(consistent_u, 0.15))


class TestConsistentInput:
    def test_demo_prefix(self, consistent_u):
        u = consistent_input((1, 2, 3), (0.1, 0.2, 5.0), ["cos(pi*t)+2"] * 3, 3)
        for seg_a, seg_b in zip(u.segments, consistent_u.segments[:3]):
            assert (seg_a.t_start, seg_a.t_end) == (seg_b.t_start, seg_b.t_end)
            assert [str(e) for e in seg_a.exprs] == [str(e) for e in seg_b.exprs]

    def test_zero_symbol(self):
        u = consistent_input((0,), (1.0,), ["1"], 2)
        assert np.array_equal(eval_signal(u, 0.5), [0.0, 0.0])

    def test_channel_two(self):
        u = consistent_input((2,), (2.0,), ["t"], 3)
        assert np.allclose(eval_signal(u, 1.5), [0, 1.5, 0])

    def test_errors(self):
        with pytest.raises(PreconditionError):
            consistent_input((1, 2), (1.0,), ["1"], 2)
        with pytest.raises(PreconditionError):
            consistent_input((1, 2), (1.0, 1.0), ["1", "1"], 2)
        with pytest.raises(AlphabetError):
            consistent_input((3,), (1.0,), ["1"], 2)

    def test_one_active_channel(self, consistent_u, rng):
        word = switching_word(consistent_u)
        assert word == (1, 2, 3, 0, 2, 3)
        for t in rng.uniform(0, 10, 500):
            v = eval_signal(consistent_u, t)
            active = np.flatnonzero(v)
            q = word[consistent_u.segment_index(t)]
            assert len(active) <= 1
            if len(active):
                assert active[0] + 1 == q

    def test_switching_word_rejects_mixed(self):
        u = PiecewiseSignal(2, ((0.0, 1.0, ("1", "1")),))
        with pytest.raises(PreconditionError):
            switching_word(u)


class TestSupNorm:
    def test_constant(self):
        assert sup_norm_estimate(PiecewiseSignal(2, ((0.0, 1.0, ("3", "4")),)), 10) == 5.0

    def test_consistent_u(self, consistent_u):
        assert abs(sup_norm_estimate(consistent_u, 1000) - 3.0) <= 1e-3

    def test_zero(self):
        assert sup_norm_estimate(zero_signal(2, 1.0)) == 0.0

    def test_samples(self):
        with pytest.raises(ValueError):
            sup_norm_estimate(zero_signal(1, 1.0), 1)

    def test_segment_tuple_form(self):
        u = PiecewiseSignal(1, ((0.0, 1.0, ("t",)),))
        assert isinstance(u.segments[0], Segment)
