import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bilinred import automata as fa
from bilinred.demo import random_automaton
from bilinred.errors import AlphabetError, CapacityError, PreconditionError

from oracles import all_words, block_interleavings, brute_uniform_depth, language, nfa_accepts


@st.composite
def ndfas(draw, max_states=6, max_m=3):
    k = draw(st.integers(1, max_states))
    m = draw(st.integers(1, max_m))
    triples = [(s, q, t) for s in range(k) for q in range(m + 1) for t in range(k)]
    trans = draw(st.lists(st.sampled_from(triples), max_size=3 * k * (m + 1), unique=True))
    finals = draw(st.lists(st.integers(0, k - 1), unique=True))
    return fa.Ndfa(k, m + 1, trans, finals, draw(st.integers(0, k - 1)))


def words_up_to(a, L):
    return list(all_words(a.alphabet_size, L))


class TestConstruction:
    def test_validation(self):
        with pytest.raises(ValueError):
            fa.Ndfa(0, 2, [], [])
        with pytest.raises(ValueError):
            fa.Ndfa(2, 2, [(0, 0, 5)], [])
        with pytest.raises(AlphabetError):
            fa.Ndfa(2, 2, [(0, 2, 1)], [])
        with pytest.raises(ValueError):
            fa.Ndfa(2, 2, [], [3])

    def test_demo_selection_shape(self, demo_gamma):
        assert demo_gamma.num_states == 3 and demo_gamma.alphabet_size == 4
        assert demo_gamma.final_states == {0, 1, 2}
        expected = ({(i, 0, j) for i in range(3) for j in range(i, 3)} | {(2, 0, 0)}
                    | {(i, q, q - 1) for q in (1, 2, 3) for i in range(q)})
        assert demo_gamma.transitions == expected


class TestAccepts:
    @pytest.mark.parametrize("word, ok", [((), True), ((2, 1), False), ((1, 2, 3), True),
                                          ((1, 2, 3, 0, 2, 3), True), ((3, 2), False),
                                          ((0, 0, 0, 1), True)])
    def test_demo(self, demo_gamma, word, ok):
        assert fa.accepts(demo_gamma, word) is ok

    def test_alphabet(self, demo_gamma):
        with pytest.raises(AlphabetError):
            fa.accepts(demo_gamma, (4,))

    @settings(max_examples=40, deadline=None)
    @given(ndfas())
    def test_matches_oracle(self, a):
        for w in words_up_to(a, 4):
            assert fa.accepts(a, w) == nfa_accepts(a, w)


class TestDeterminize:
    @settings(max_examples=40, deadline=None)
    @given(ndfas())
    def test_preserves_membership(self, a):
        d = fa.determinize(a)
        for w in words_up_to(a, 5 if a.alphabet_size <= 3 else 4):
            assert d.accepts(w) == nfa_accepts(a, w)

    def test_deterministic_input(self):
        a = fa.Ndfa(2, 2, [(0, 0, 1), (1, 1, 0)], [1])
        d = fa.determinize(a)
        assert d.num_states <= 3
        assert d.accepts((0,)) and d.accepts((0, 1, 0)) and not d.accepts((1,))

    def test_demo_exhaustive(self, demo_gamma):
        d = fa.determinize(demo_gamma)
        for w in all_words(4, 6):
            assert d.accepts(w) == nfa_accepts(demo_gamma, w)

    def test_empty_language(self):
        d = fa.determinize(fa.empty_automaton(3))
        assert fa.is_empty(d)
        assert not any(d.accepts(w) for w in all_words(3, 3))

    def test_cap(self):
        # the "k-th symbol from the end is 1" language needs 2^k DFA states
        k = 6
        trans = [(0, 0, 0), (0, 1, 0), (0, 1, 1)]
        trans += [(i, q, i + 1) for i in range(1, k) for q in (0, 1)]
        a = fa.Ndfa(k + 1, 2, trans, [k])
        with pytest.raises(CapacityError):
            fa.determinize(a, cap=16)
        assert fa.determinize(a).num_states >= 2 ** k


class TestLanguageOps:
    @settings(max_examples=30, deadline=None)
    @given(ndfas(max_states=4, max_m=2))
    def test_complement_and_intersection(self, a):
        d = fa.determinize(a)
        cc = fa.complement(fa.complement(d))
        both = fa.intersect(d, fa.complement(d))
        assert fa.is_empty(both)
        for w in words_up_to(a, 5):
            assert cc.accepts(w) == d.accepts(w)
            assert fa.complement(d).accepts(w) != d.accepts(w)

    def test_intersect_alphabet_mismatch(self):
        with pytest.raises(AlphabetError):
            fa.intersect(fa.determinize(fa.universal_automaton(2)),
                         fa.determinize(fa.universal_automaton(3)))

    def test_shortest_rejected_of_demo(self, demo_gamma):
        w = fa.shortest_accepted(fa.complement(fa.determinize(demo_gamma)))
        assert w == (2, 1)

    @settings(max_examples=30, deadline=None)
    @given(ndfas(max_states=4, max_m=2))
    def test_shortest_is_length_lex_first(self, a):
        found = fa.shortest_accepted(fa.determinize(a))
        accepted = sorted(language(a, 6), key=lambda w: (len(w), w))
        if found is None:
            assert not accepted
        elif accepted and len(accepted[0]) <= 6:
            assert found == accepted[0]

    def test_includes(self, demo_gamma):
        c2, c3 = fa.chain_automaton(2, 2), fa.chain_automaton(3, 2)
        assert fa.includes(demo_gamma, demo_gamma) is None
        assert fa.includes(c2, c3) is None
        w = fa.includes(c3, c2)
        assert w is not None and len(w) == 3 and not fa.accepts(c2, w)
        assert fa.equivalent(demo_gamma, fa.determinize(demo_gamma))
        assert not fa.equivalent(c2, c3)


class TestCoReachable:
    def test_dead_state_removed(self):
        a = fa.Ndfa(3, 2, [(0, 0, 1), (0, 1, 2), (2, 1, 2)], [1])
        b = fa.co_reachable(a)
        assert b.num_states == 2 and fa.is_co_reachable(b) and not fa.is_co_reachable(a)
        assert language(a, 4) == language(b, 4)

    def test_demo_unchanged(self, demo_gamma):
        b = fa.co_reachable(demo_gamma)
        assert b.num_states == 3 and fa.equivalent(b, demo_gamma)

    def test_no_finals(self):
        b = fa.co_reachable(fa.Ndfa(2, 2, [(0, 0, 1)], []))
        assert not b.final_states and fa.is_empty(fa.determinize(b))

    @settings(max_examples=40, deadline=None)
    @given(ndfas())
    def test_property(self, a):
        b = fa.co_reachable(a)
        assert fa.is_co_reachable(b) or not b.final_states
        assert language(a, 4) == language(b, 4)


class TestClosure:
    def test_finite_examples(self):
        assert fa.is_prefix_closed(fa.finite_automaton([(), (0,), (0, 1)], 1)).closed
        rep = fa.is_prefix_closed(fa.finite_automaton([(1,)], 1))
        assert not rep.closed and rep.witness == (1,) and rep.missing == ()

    def test_demo_is_column_and_row_selection(self, demo_gamma):
        assert fa.is_prefix_closed(demo_gamma).closed
        assert fa.is_suffix_closed(demo_gamma).closed

    def test_suffix_witness(self):
        a = fa.finite_automaton([(), (0,), (0, 1)], 1)
        rep = fa.is_suffix_closed(a)
        assert not rep.closed
        assert fa.accepts(a, rep.witness) and not fa.accepts(a, rep.missing)
        assert rep.witness[-len(rep.missing):] == rep.missing if rep.missing else True

    @settings(max_examples=60, deadline=None)
    @given(ndfas(max_states=4, max_m=2))
    def test_against_enumeration(self, a):
        L = language(a, 6)
        short = {w for w in L if len(w) <= 5}
        prefix_ok = all(w[:k] in L for w in short for k in range(len(w)))
        suffix_ok = all(w[k:] in L for w in short for k in range(1, len(w) + 1))
        rep = fa.is_prefix_closed(a)
        if not prefix_ok:
            assert not rep.closed
        if not rep.closed:
            assert nfa_accepts(a, rep.witness) and not nfa_accepts(a, rep.missing)
            assert rep.witness[:len(rep.missing)] == rep.missing
        srep = fa.is_suffix_closed(a)
        if not suffix_ok:
            assert not srep.closed
        if not srep.closed:
            assert nfa_accepts(a, srep.witness) and not nfa_accepts(a, srep.missing)
            assert srep.witness[len(srep.witness) - len(srep.missing):] == srep.missing
        assert srep.closed == fa.is_prefix_closed(fa.reverse(a)).closed

    def test_reverse_language(self):
        a = fa.finite_automaton([(0, 1), (1, 1, 0)], 1)
        r = fa.reverse(a)
        assert language(r, 4) == {w[::-1] for w in language(a, 4)}


class TestUniformDepth:
    @pytest.mark.parametrize("N, m", [(N, m) for N in range(6) for m in (1, 2, 3)])
    def test_chain(self, N, m):
        assert fa.max_uniform_depth(fa.chain_automaton(N, m)) == N

    def test_demo(self, demo_gamma):
        assert fa.max_uniform_depth(demo_gamma) == 1
        assert brute_uniform_depth(demo_gamma, 5) == 1

    def test_full_language_capped(self):
        N = fa.max_uniform_depth(fa.universal_automaton(3), cap=7)
        assert isinstance(N, fa.AtLeast) and N == 7 and str(N) == ">=7"

    def test_needs_empty_word(self):
        with pytest.raises(PreconditionError):
            fa.max_uniform_depth(fa.finite_automaton([(1,)], 1))
        with pytest.raises(ValueError):
            fa.max_uniform_depth(fa.universal_automaton(2), cap=0)

    def test_random_against_brute_force(self, rng):
        for _ in range(30):
            a = random_automaton(rng, int(rng.integers(1, 4)), 1, density=0.6, all_final=True)
            N = fa.max_uniform_depth(a, cap=6)
            assert int(N) == brute_uniform_depth(a, 6)


class TestChain:
    def test_zero(self):
        assert language(fa.chain_automaton(0, 2), 3) == {()}

    def test_two(self):
        assert language(fa.chain_automaton(2, 1), 3) == set(all_words(2, 2))


class TestConsistency:
    def test_single_block(self):
        a = fa.consistent_word_automaton((1,), 2)
        for w in [(), (0,), (1,), (0, 1), (1, 0)]:
            assert fa.accepts(a, w)
        assert not fa.accepts(a, (2,))

    def test_two_blocks(self):
        a = fa.consistent_word_automaton((1, 2), 2)
        assert fa.accepts(a, (0, 1, 0, 2)) and not fa.accepts(a, (2, 1))

    def test_one_symbol_language(self):
        a = fa.consistent_word_automaton((3,), 3)
        assert language(a, 4) == set(itertools.chain.from_iterable(
            itertools.product((0, 3), repeat=k) for k in range(5)))

    def test_language_matches_definition(self):
        word = (2, 0, 1)
        a = fa.consistent_word_automaton(word, 2)
        assert language(a, 5) == block_interleavings(word, 5)

    def test_empty_word_rejected(self):
        with pytest.raises(PreconditionError):
            fa.consistent_word_automaton((), 2)

    def test_demo_words(self, demo_gamma):
        assert fa.in_consistent_set(demo_gamma, (1, 2, 3))
        assert not fa.in_consistent_set(demo_gamma, (2, 1))
        assert fa.consistency_witness(demo_gamma, (2, 1)) == (2, 1)
        assert fa.in_consistent_set(fa.universal_automaton(4), (3, 1, 2))

    def test_zero_block_may_be_empty(self, demo_gamma):
        # blocks may be empty, so 1230 23 also admits 1 2 3 2 ... which jumps back
        assert fa.consistency_witness(demo_gamma, (1, 2, 3, 0, 2, 3)) == (3, 2)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(0, 2), min_size=1, max_size=3), ndfas(max_states=3, max_m=2))
    def test_verdict_against_interleavings(self, word, gamma):
        if gamma.alphabet_size != 3:
            return
        verdict = fa.in_consistent_set(gamma, word)
        inter = block_interleavings(tuple(word), 5)
        if verdict:
            assert all(nfa_accepts(gamma, v) for v in inter)
        else:
            w = fa.consistency_witness(gamma, word)
            assert not nfa_accepts(gamma, w)
            if len(w) <= 5:
                assert w in inter


class TestEnumeration:
    def test_iter_words_order(self):
        assert list(fa.iter_words(2, 2)) == [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]

    def test_accepted_words(self, demo_gamma):
        words = fa.accepted_words(demo_gamma, 4)
        assert words == sorted(words, key=lambda w: (len(w), w))
        assert set(words) == language(demo_gamma, 4)

    def test_budget(self):
        with pytest.raises(CapacityError):
            fa.accepted_words(fa.universal_automaton(4), 10, budget=1000)
