import random

import pytest

from alquant import automata as au, oracle
from alquant.errors import AlphabetMismatch, ParseError, UnknownState, UnknownVariable
from alquant.generators import random_corpus, random_safety_formula
from alquant.parser import parse_ltl
from alquant.textformat import read_automaton
from alquant.translate import translate_to_asa


def test_post_sets_fig1(fig1):
    q0, q1 = fig1.state("q0"), fig1.state("q1")
    assert au.post_sets(fig1, q0) == {frozenset([q0, q1])}
    # q1 has models without states: the single successor set is empty
    assert au.post_sets(fig1, q1) == {frozenset()}
    assert au.reachable_states(fig1, q0) == {q0, q1}


def test_lookup_errors(fig1):
    with pytest.raises(UnknownState):
        fig1.state("nope")
    with pytest.raises(UnknownVariable):
        fig1.alphabet_var("z")


def test_reader_rejects_letters_outside_alphabet():
    with pytest.raises(ParseError):
        read_automaton("alphabet a\nstates q\ninitial q\nstate q: b & q\n")


def test_emptiness_agrees_with_oracle():
    rng = random.Random(1)
    for _ in range(80):
        f = random_safety_formula(rng, depth=4, size=rng.randint(2, 10))
        A = translate_to_asa(f, ["a", "b", "c"])
        assert au.is_empty(A) == oracle.determinize(A).is_empty(), f


@pytest.mark.parametrize("text,empty", [
    ("G a & G !a", True),
    ("G (a & X !a)", True),
    ("G (X a | X !a)", False),
    ("false", True),
    ("true", False),
])
def test_emptiness_known(text, empty):
    assert au.is_empty(translate_to_asa(parse_ltl(text))) == empty


def test_letter_independent_fast_path_matches_subset_search():
    rng = random.Random(2)
    for f in random_corpus(30, seed=9):
        A = translate_to_asa(f)
        for v in A.alphabet:
            B = au.statewise_exists(A, v)
            for w in B.alphabet:
                C = au.statewise_forall(B, w)
                assert au.is_empty(C) == au.SubsetGraph(C, project=True).explore(
                    frozenset([C.initial])).productive().isdisjoint({frozenset([C.initial])})


def test_nondeterminize_preserves_language():
    for f in random_corpus(25, seed=4):
        A = translate_to_asa(f)
        N = au.nondeterminize(A)
        assert N.is_nondeterministic()
        assert oracle.equivalent(A, N)


def test_statewise_exists_is_exact_on_universal_free_automaton():
    # G (a | b) reads a at one vertex per level; no two branches share a level
    A = translate_to_asa(parse_ltl("G (a | b)"))
    S = au.statewise_exists(A, "a")
    assert oracle.equivalent(S, oracle.exact_exists(A, "a"))


def test_statewise_exists_overapproximates_in_general(fig1):
    S = au.statewise_exists(fig1, "a")
    X = oracle.exact_exists(fig1, "a")
    assert oracle.includes(X, S)
    assert not oracle.includes(S, X)


def test_accepts_lasso_matches_ltl():
    rng = random.Random(8)
    for _ in range(50):
        f = random_safety_formula(rng, depth=3, size=rng.randint(2, 9))
        A = translate_to_asa(f, ["a", "b"] if "c" not in repr(f) else ["a", "b", "c"])
        for w in oracle.sample_lassos(A.alphabet, 2, 3, 8, seed=3):
            assert au.accepts_lasso(A, w) == oracle.eval_ltl_on_lasso(f, w)


def test_lasso_outside_alphabet(fig1):
    from alquant.boolfun import VarKind
    c = fig1.manager.mk_var(VarKind.ALPHABET, "c")
    with pytest.raises(AlphabetMismatch):
        au.accepts_lasso(fig1, au.LassoWord((), (frozenset([c]),)))


def test_prune_unreachable():
    A = read_automaton("alphabet a\nstates q r\ninitial q\nstate q: a & q\nstate r: !a\n")
    P = au.prune_unreachable(A)
    assert [s.name for s in P.states] == ["q"]
    assert oracle.equivalent(A, P)


def test_shape_predicates(fig1, fig2):
    assert fig1.is_universal() and not fig1.is_nondeterministic()
    assert not fig2.is_universal()
    A = read_automaton("alphabet a\nstates q r\ninitial q\nstate q: (a & q) | (!a & r)\nstate r: r\n")
    assert A.is_universal() and A.is_nondeterministic()
