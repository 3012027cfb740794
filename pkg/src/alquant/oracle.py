"""Exact, explicit-letter reference procedures.

Everything here enumerates letters one by one and determinises outright,
which is exactly the cost the compilation pipeline avoids.  It is meant for
ground truth on small automata (a handful of letters, about a dozen states)
and for nothing else.

Letters in this module are frozensets of variable *names*, so automata from
different managers can be compared.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from . import ltl
from .automata import AlternatingAutomaton, LassoWord, State, accepts_lasso
from .boolfun import Literal, VarKind
from .errors import AlphabetMismatch, BranchBlowupLimit, SubsetBlowupLimit

NameLetter = FrozenSet[str]
SINK = -1
DEFAULT_LIMIT = 200_000


def letters_over(names: Sequence[str]) -> List[NameLetter]:
    names = sorted(names)
    return [frozenset(n for n, b in zip(names, bits) if b)
            for bits in itertools.product((False, True), repeat=len(names))]


@dataclass
class ExplicitDSA:
    """Deterministic safety automaton with an implicit rejecting sink.

    ``trans[d][k]`` is the successor of state ``d`` on ``letters[k]``;
    ``SINK`` (-1) rejects.  ``initial == SINK`` means the empty language.
    """

    alphabet: Tuple[str, ...]
    letters: List[NameLetter]
    trans: List[List[int]]
    initial: int
    labels: Optional[List[object]] = None

    def __len__(self):
        return len(self.trans)

    def step(self, d: int, letter: NameLetter) -> int:
        if d == SINK:
            return SINK
        return self.trans[d][self.letters.index(letter)]

    def accepts(self, stem: Sequence[NameLetter], loop: Sequence[NameLetter]) -> bool:
        d = self.initial
        for a in stem:
            d = self.step(d, a)
        seen = set()
        while d != SINK and d not in seen:
            seen.add(d)
            for a in loop:
                d = self.step(d, a)
                if d == SINK:
                    return False
        return d != SINK

    def is_empty(self) -> bool:
        return self.initial == SINK or self.initial not in _dsa_productive(self)


def _dsa_productive(D: ExplicitDSA):
    alive = set(range(len(D.trans)))
    changed = True
    while changed:
        changed = False
        for d in list(alive):
            if not any(t in alive for t in D.trans[d]):
                alive.discard(d)
                changed = True
    return alive


# -- views: uniform nondeterministic access to both automaton kinds ---------------

class _AltView:
    """Subsets of states of an alternating automaton, read letter by letter."""

    def __init__(self, A: AlternatingAutomaton):
        self.A = A
        self.m = A.manager
        self.alphabet = tuple(sorted(v.label for v in A.alphabet))
        self._conj: Dict[FrozenSet[State], int] = {}
        self._succ: Dict[Tuple[FrozenSet[State], NameLetter], List[FrozenSet[State]]] = {}

    def start(self):
        return frozenset([self.A.initial])

    def successors(self, S: FrozenSet[State], letter: NameLetter) -> List[FrozenSet[State]]:
        key = (S, letter)
        out = self._succ.get(key)
        if out is not None:
            return out
        m = self.m
        node = self._conj.get(S)
        if node is None:
            node = 1
            for q in sorted(S):
                node = m._and(node, self.A.delta[q].node)
            self._conj[S] = node
        levels = {v.index: (v.label in letter) for v in self.A.alphabet}
        node = m._restrict(node, levels, {})
        if node == 0:
            out = []
        else:
            out = sorted((frozenset(self.A._by_index[i] for i, b in cube) for cube in m._primes(node)),
                         key=lambda X: (len(X), sorted(s.id for s in X)))
        self._succ[key] = out
        return out


class _DsaView:
    def __init__(self, D: ExplicitDSA):
        self.D = D
        self.alphabet = D.alphabet

    def start(self):
        return self.D.initial

    def successors(self, d: int, letter: NameLetter) -> List[int]:
        t = self.D.step(d, letter)
        return [] if t == SINK else [t]


def _view(X):
    if isinstance(X, AlternatingAutomaton):
        return _AltView(X)
    if isinstance(X, ExplicitDSA):
        return _DsaView(X)
    raise TypeError(f"cannot view {type(X).__name__} as an automaton")


def _minimize(sets: Iterable[FrozenSet]) -> FrozenSet[FrozenSet]:
    """Antichain of the inclusion-minimal sets."""
    ordered = sorted(set(sets), key=len)
    keep: List[FrozenSet] = []
    for s in ordered:
        if not any(k <= s for k in keep):
            keep.append(s)
    return frozenset(keep)


class _DetView:
    """Subset construction on top of a view; a dead macro-state is the empty set."""

    def __init__(self, view, antichain: bool):
        self.view = view
        self.antichain = antichain

    def start(self):
        s = self.view.start()
        if isinstance(self.view, _DsaView) and s == SINK:
            return frozenset()
        return frozenset([s])

    def step(self, D: FrozenSet, letter: NameLetter) -> FrozenSet:
        out = set()
        for s in D:
            out.update(self.view.successors(s, letter))
        return _minimize(out) if self.antichain else frozenset(out)


def determinize(A: AlternatingAutomaton, limit: int = DEFAULT_LIMIT) -> ExplicitDSA:
    """Language-equal deterministic safety automaton over explicit letters."""
    view = _AltView(A)
    det = _DetView(view, antichain=True)
    letters = letters_over(view.alphabet)
    return _explore(det, letters, view.alphabet, limit)


def _explore(det, letters, alphabet, limit) -> ExplicitDSA:
    start = det.start()
    if not start:
        return ExplicitDSA(tuple(alphabet), letters, [], SINK, [])
    index = {start: 0}
    order = [start]
    trans: List[List[int]] = []
    k = 0
    while k < len(order):
        D = order[k]
        k += 1
        row = []
        for a in letters:
            T = det.step(D, a)
            if not T:
                row.append(SINK)
                continue
            j = index.get(T)
            if j is None:
                if len(order) >= limit:
                    raise SubsetBlowupLimit(limit)
                j = len(order)
                index[T] = j
                order.append(T)
            row.append(j)
        trans.append(row)
    return ExplicitDSA(tuple(alphabet), letters, trans, 0, order)


class _ProjectDet:
    """Deterministic view of the quantified language of a DSA."""

    def __init__(self, D: ExplicitDSA, p: str, universal: bool):
        self.D = D
        self.p = p
        self.universal = universal

    def start(self):
        if self.D.initial == SINK:
            return frozenset()
        return frozenset([self.D.initial])

    def step(self, S: FrozenSet[int], letter: NameLetter) -> FrozenSet[int]:
        out = set()
        for d in S:
            for ext in (letter, letter | {self.p}):
                t = self.D.step(d, ext)
                if t == SINK:
                    if self.universal:
                        return frozenset()
                else:
                    out.add(t)
        return frozenset(out)


def quantify_dsa(D: ExplicitDSA, name: str, universal: bool, limit: int = DEFAULT_LIMIT) -> ExplicitDSA:
    """Exact quantification of letter *name* on a deterministic automaton."""
    if name not in D.alphabet:
        raise AlphabetMismatch(f"{name} is not in the alphabet")
    rest = tuple(n for n in D.alphabet if n != name)
    return _explore(_ProjectDet(D, name, universal), letters_over(rest), rest, limit)


def _quantify(A: AlternatingAutomaton, p, universal: bool, limit: int) -> ExplicitDSA:
    name = A.alphabet_var(p).label
    return quantify_dsa(determinize(A, limit), name, universal, limit)


def solve_qptl(phi, limit: int = DEFAULT_LIMIT) -> str:
    """Reference verdict: determinise once, then quantify explicitly innermost-first."""
    from .translate import translate_qptl

    D = determinize(translate_qptl(phi), limit)
    for quant, v in reversed(phi.prefix):
        D = quantify_dsa(D, v, quant == "forall", limit)
    return "UNSAT" if D.is_empty() else "SAT"


def exact_exists(A: AlternatingAutomaton, p, limit: int = DEFAULT_LIMIT) -> ExplicitDSA:
    """Deterministic automaton for the words having some extension by *p* in L(A)."""
    return _quantify(A, p, False, limit)


def exact_forall(A: AlternatingAutomaton, p, limit: int = DEFAULT_LIMIT) -> ExplicitDSA:
    """Deterministic automaton for the words all of whose extensions by *p* are in L(A)."""
    return _quantify(A, p, True, limit)


# -- inclusion -------------------------------------------------------------------

Automaton = Union[AlternatingAutomaton, ExplicitDSA]


def _productive(view, letters, limit) -> Tuple[set, Dict]:
    start = view.start()
    if isinstance(view, _DsaView) and start == SINK:
        return set(), {}
    succ: Dict = {}
    order = [start]
    seen = {start}
    k = 0
    while k < len(order):
        s = order[k]
        k += 1
        edges = []
        for a in letters:
            for t in view.successors(s, a):
                edges.append((a, t))
                if t not in seen:
                    if len(seen) >= limit:
                        raise SubsetBlowupLimit(limit)
                    seen.add(t)
                    order.append(t)
        succ[s] = edges
    alive = set(seen)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for _, t in succ[s]):
                alive.discard(s)
                changed = True
    return alive, succ


def counterexample(A: Automaton, B: Automaton, limit: int = DEFAULT_LIMIT):
    """A lasso ``(stem, loop)`` of name letters in L(A) but not in L(B), or None."""
    va, vb = _view(A), _view(B)
    if set(va.alphabet) != set(vb.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {sorted(va.alphabet)} vs {sorted(vb.alphabet)}")
    letters = letters_over(va.alphabet)
    alive, succ = _productive(va, letters, limit)
    start_a = va.start()
    if start_a not in alive:
        return None
    det = _DetView(vb, antichain=isinstance(vb, _AltView))
    start = (start_a, det.start())
    parent = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        a, b = node
        if not b:
            stem = []
            cur = node
            while parent[cur] is not None:
                cur, letter = parent[cur]
                stem.append(letter)
            stem.reverse()
            prefix, loop = _productive_loop(a, alive, succ)
            return tuple(stem + prefix), tuple(loop)
        for letter, t in succ[a]:
            if t not in alive:
                continue
            nb = det.step(b, letter)
            nxt = (t, nb)
            if nxt not in parent:
                if len(parent) >= limit:
                    raise SubsetBlowupLimit(limit)
                parent[nxt] = (node, letter)
                todo.append(nxt)
    return None


def _productive_loop(a, alive, succ):
    path = []
    index = {}
    cur = a
    while cur not in index:
        index[cur] = len(path)
        letter, nxt = next((l, t) for l, t in succ[cur] if t in alive)
        path.append(letter)
        cur = nxt
    k = index[cur]
    return path[:k], path[k:]


def includes(A: Automaton, B: Automaton, limit: int = DEFAULT_LIMIT) -> bool:
    """``L(A)`` is a subset of ``L(B)``."""
    return counterexample(A, B, limit) is None


def equivalent(A: Automaton, B: Automaton, limit: int = DEFAULT_LIMIT) -> bool:
    return includes(A, B, limit) and includes(B, A, limit)


def to_lasso(manager, stem: Sequence[NameLetter], loop: Sequence[NameLetter]) -> LassoWord:
    return LassoWord.from_labels(manager, stem, loop)


def accepts(X: Automaton, w: LassoWord) -> bool:
    if isinstance(X, ExplicitDSA):
        names = lambda l: frozenset(v.label for v in l)
        return X.accepts([names(l) for l in w.stem], [names(l) for l in w.loop])
    return accepts_lasso(X, w)


# -- LTL semantics on lassos -------------------------------------------------------

def eval_ltl_on_lasso(phi: ltl.Formula, w: LassoWord) -> bool:
    """Truth of *phi* at position 0 of ``stem . loop^omega`` (full LTL)."""
    return _eval(phi, w)[0]


def _eval(f: ltl.Formula, w: LassoWord) -> List[bool]:
    n = len(w)
    nxt = [w.successor(i) for i in range(n)]
    if isinstance(f, ltl.Const):
        return [f.value] * n
    if isinstance(f, ltl.Var):
        return [any(v.label == f.name for v in w.letter(i)) for i in range(n)]
    if isinstance(f, ltl.Not):
        return [not x for x in _eval(f.arg, w)]
    if isinstance(f, ltl.Next):
        a = _eval(f.arg, w)
        return [a[nxt[i]] for i in range(n)]
    if isinstance(f, ltl.Binary):
        l, r = _eval(f.left, w), _eval(f.right, w)
        if isinstance(f, ltl.And):
            return [x and y for x, y in zip(l, r)]
        if isinstance(f, ltl.Or):
            return [x or y for x, y in zip(l, r)]
        if isinstance(f, ltl.Implies):
            return [(not x) or y for x, y in zip(l, r)]
        if isinstance(f, ltl.Iff):
            return [x == y for x, y in zip(l, r)]
        if isinstance(f, ltl.Until):
            return _fix(n, nxt, lambda i, s: r[i] or (l[i] and s[nxt[i]]), False)
        if isinstance(f, ltl.WeakUntil):
            return _fix(n, nxt, lambda i, s: r[i] or (l[i] and s[nxt[i]]), True)
        if isinstance(f, ltl.Release):
            return _fix(n, nxt, lambda i, s: r[i] and (l[i] or s[nxt[i]]), True)
    if isinstance(f, ltl.Globally):
        a = _eval(f.arg, w)
        return _fix(n, nxt, lambda i, s: a[i] and s[nxt[i]], True)
    if isinstance(f, ltl.Finally):
        a = _eval(f.arg, w)
        return _fix(n, nxt, lambda i, s: a[i] or s[nxt[i]], False)
    raise TypeError(f"not a formula: {f!r}")


def _fix(n, nxt, step, greatest: bool) -> List[bool]:
    s = [greatest] * n
    while True:
        t = [step(i, s) for i in range(n)]
        if t == s:
            return s
        s = t


# -- sampling ----------------------------------------------------------------------

def sample_lassos(alphabet, stem_max: int, loop_max: int, n: int, seed: int) -> List[LassoWord]:
    """Deterministic pseudorandom lassos over VarIds; starts with the constant ones."""
    if n < 1:
        raise ValueError("n must be at least 1")
    alphabet = sorted(alphabet)
    full = frozenset(alphabet)
    out = [LassoWord((), (frozenset(),))]
    if n > 1:
        out.append(LassoWord((), (full,)))
    rng = random.Random(seed)
    while len(out) < n:
        stem = tuple(frozenset(v for v in alphabet if rng.random() < 0.5)
                     for _ in range(rng.randint(0, stem_max)))
        loop = tuple(frozenset(v for v in alphabet if rng.random() < 0.5)
                     for _ in range(rng.randint(1, max(1, loop_max))))
        out.append(LassoWord(stem, loop))
    return out[:n]


def quantified_membership(A: AlternatingAutomaton, p, w: LassoWord, universal: bool,
                          periods: Sequence[int] = (1, 2)) -> bool:
    """Definition-level check: extend *w* by every *p*-labelling of the given periods.

    Only labellings with the same stem and a loop of ``k * |loop|`` letters are
    tried, which is a consistency check rather than a decision procedure.
    """
    pv = A.alphabet_var(p)
    results = []
    for k in periods:
        stem, loop = w.stem, w.loop * k
        positions = len(stem) + len(loop)
        for bits in itertools.product((False, True), repeat=positions):
            letters = [l | {pv} if b else l for l, b in zip(stem + loop, bits)]
            ext = LassoWord(tuple(letters[:len(stem)]), tuple(letters[len(stem):]))
            ok = accepts_lasso(A, ext)
            if universal and not ok:
                return False
            if not universal and ok:
                return True
    return universal


# -- bounded unfoldings --------------------------------------------------------------

@dataclass(frozen=True)
class UnfoldingSlice:
    """Levels ``0..depth`` of an unfolding prefix.

    ``levels[i]`` holds the state vertices and the literal vertices at time
    ``i``; ``edges`` lists ``(i, source, target)`` triples.  ``violation`` is
    the first level holding both ``p`` and ``!p``, or None.
    """

    depth: int
    levels: Tuple[Tuple[FrozenSet[State], FrozenSet[Literal]], ...]
    edges: Tuple[Tuple[int, object, object], ...]
    violation: Optional[int]


def _model_parts(A: AlternatingAutomaton, q: State):
    m = A.manager
    f = A.delta[q]
    out = []
    if f.is_false:
        return out
    for cube in sorted(m._primes(f.node)):
        states = frozenset(A._by_index[i] for i, b in cube if m.vars[i].kind is VarKind.STATE)
        lits = frozenset(Literal(m.vars[i], b) for i, b in cube if m.vars[i].kind is VarKind.ALPHABET)
        out.append((states, lits))
    return out


def _minimal_hitting_sets(family: List[FrozenSet[State]]) -> List[FrozenSet[State]]:
    family = [X for X in family if X]
    if not family:
        return [frozenset()]
    universe = sorted(frozenset().union(*family))
    hits = []
    for r in range(1, len(universe) + 1):
        for combo in itertools.combinations(universe, r):
            H = frozenset(combo)
            if all(H & X for X in family) and not any(h <= H for h in hits):
                hits.append(H)
    return hits


def enumerate_unfoldings(A: AlternatingAutomaton, mode: str, p, depth: int,
                         limit: int = 100_000) -> Iterator[UnfoldingSlice]:
    """All distinct depth-bounded unfolding prefixes.

    Existential mode resolves each vertex to one minimal model.  Universal
    mode resolves each vertex to a minimal hitting set of the state parts of
    its minimal models (models without states need no hit) and keeps the
    literals of every model.
    """
    if mode not in ("existential", "universal", "exists", "forall"):
        raise ValueError(f"unknown mode {mode!r}")
    universal = mode in ("universal", "forall")
    pv = A.alphabet_var(p)
    parts = {q: _model_parts(A, q) for q in A.states}
    options = {}
    for q, ms in parts.items():
        if universal:
            lits = frozenset().union(*(l for _, l in ms)) if ms else frozenset()
            options[q] = [(H, lits, tuple(H)) for H in _minimal_hitting_sets([s for s, _ in ms])]
        else:
            options[q] = [(s, l, tuple(s) + tuple(l)) for s, l in ms]
    count = [0]

    def violation(lits):
        return Literal(pv, True) in lits and Literal(pv, False) in lits

    def rec(levels, edges, first_violation):
        i = len(levels) - 1
        if i == depth:
            count[0] += 1
            if count[0] > limit:
                raise BranchBlowupLimit(limit)
            yield UnfoldingSlice(depth, tuple(levels), tuple(edges), first_violation)
            return
        states = sorted(levels[-1][0])
        if any(not options[q] for q in states):
            return  # a vertex with no model cannot be resolved
        seen = set()
        for choice in itertools.product(*(options[q] for q in states)):
            nxt_states = frozenset().union(*(c[0] for c in choice)) if choice else frozenset()
            nxt_lits = frozenset().union(*(c[1] for c in choice)) if choice else frozenset()
            key = (nxt_states, nxt_lits, tuple(c[2] for c in choice))
            if key in seen:
                continue
            seen.add(key)
            new_edges = [(i, q, t) for q, c in zip(states, choice) for t in sorted(c[0])]
            new_edges += [(i, q, l) for q, c in zip(states, choice) for l in sorted(c[1])]
            fv = first_violation
            if fv is None and violation(nxt_lits):
                fv = i + 1
            yield from rec(levels + [(nxt_states, nxt_lits)], edges + new_edges, fv)

    yield from rec([(frozenset([A.initial]), frozenset())], [], None)


def unfolding_violation(A: AlternatingAutomaton, mode: str, p, depth: int, limit: int = 100_000):
    """The first violating slice, or None."""
    for s in enumerate_unfoldings(A, mode, p, depth, limit):
        if s.violation is not None:
            return s
    return None
