"""Alternating safety automata with symbolic transition functions.

Each state's transition is one :class:`~alquant.boolfun.Function` over the
alphabet variables and the state variables.  Acceptance is always safety:
every state is accepting, so a word is accepted iff some run tree is infinite
on every branch or ends in leaves whose literals hold.

Automata are immutable.  Operations never mutate their input; they may be
called from several threads only if the underlying manager is confined to one
of them (managers are not synchronised).
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from . import boolfun as bf
from .boolfun import Function, Literal, Manager, VarId, VarKind
from .errors import AlphabetMismatch, SubsetBlowupLimit, UnknownState, UnknownVariable

DEFAULT_SUBSET_LIMIT = 100_000


class Origin(enum.Enum):
    FORMULA = "formula"
    MACRO = "macro"
    SUBSET = "subset"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class State:
    """A state together with the state variable that names it in transitions."""

    var: VarId
    origin: Origin = field(default=Origin.SYNTHETIC, compare=False)
    members: FrozenSet["State"] = field(default=frozenset(), compare=False)

    @property
    def id(self) -> int:
        return self.var.index

    @property
    def name(self) -> str:
        return self.var.label

    def __lt__(self, other):
        return self.var.index < other.var.index

    def __str__(self):
        return self.var.label

    def __repr__(self):
        return f"State({self.var.label!r})"


def new_state(manager: Manager, label: str, origin=Origin.SYNTHETIC, members=frozenset()) -> State:
    return State(manager.mk_var(VarKind.STATE, label), origin, frozenset(members))


def set_label(states: Iterable[State], sep: str = ",") -> str:
    return "{" + sep.join(s.name for s in sorted(states)) + "}"


Letter = FrozenSet[VarId]


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``stem . loop^omega``."""

    stem: Tuple[Letter, ...]
    loop: Tuple[Letter, ...]

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(frozenset(l) for l in self.stem))
        object.__setattr__(self, "loop", tuple(frozenset(l) for l in self.loop))
        if not self.loop:
            raise ValueError("the loop of a lasso word must be nonempty")

    @classmethod
    def from_labels(cls, manager: Manager, stem: Sequence[Iterable[str]], loop: Sequence[Iterable[str]]):
        def letter(names):
            return frozenset(manager.alphabet_var(n) for n in names)

        return cls(tuple(letter(l) for l in stem), tuple(letter(l) for l in loop))

    def __len__(self):
        return len(self.stem) + len(self.loop)

    def letter(self, i: int) -> Letter:
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def successor(self, i: int) -> int:
        """Next position in the folded lasso of length ``len(self)``."""
        return i + 1 if i + 1 < len(self) else len(self.stem)

    def variables(self) -> FrozenSet[VarId]:
        out = frozenset()
        for l in self.stem + self.loop:
            out |= l
        return out

    def restrict_to(self, alphabet: Iterable[VarId]) -> "LassoWord":
        keep = frozenset(alphabet)
        return LassoWord(tuple(l & keep for l in self.stem), tuple(l & keep for l in self.loop))

    def __str__(self):
        def show(l):
            return "{" + ",".join(v.label for v in sorted(l)) + "}"

        stem = " ".join(show(l) for l in self.stem)
        loop = " ".join(show(l) for l in self.loop)
        return (stem + " " if stem else "") + f"({loop})^w"


class AlternatingAutomaton:
    """``(alphabet, states, initial, delta)`` with safety acceptance (F = Q)."""

    acceptance = "safety"

    def __init__(self, manager: Manager, alphabet: Iterable[VarId], states: Iterable[State],
                 initial: State, delta: Mapping[State, Function], check: bool = True):
        self.manager = manager
        self.alphabet: Tuple[VarId, ...] = tuple(sorted(set(alphabet)))
        self.states: Tuple[State, ...] = tuple(states)
        self.initial = initial
        self.delta: Dict[State, Function] = dict(delta)
        self._by_index: Dict[int, State] = {s.var.index: s for s in self.states}
        self._post: Dict[State, FrozenSet[FrozenSet[State]]] = {}
        if check:
            self._validate()

    def _validate(self) -> None:
        if len(self._by_index) != len(self.states):
            raise ValueError("duplicate states")
        if self.initial not in self._by_index.values():
            raise UnknownState(self.initial)
        alphabet = set(self.alphabet)
        for v in alphabet:
            if v.kind is not VarKind.ALPHABET:
                raise ValueError(f"{v.label} is not an alphabet variable")
        for s in self.states:
            if s not in self.delta:
                raise ValueError(f"state {s.name} has no transition")
            f = self.delta[s]
            if f.manager is not self.manager:
                raise ValueError("transition built in a different manager")
            for v in bf.support(f):
                if v.kind is VarKind.ALPHABET:
                    if v not in alphabet:
                        raise AlphabetMismatch(f"{s.name} reads {v.label}, which is not in the alphabet")
                elif v.index not in self._by_index:
                    raise UnknownState(f"{s.name} refers to unknown state variable {v.label}")
            bf.check_state_positive(f)

    def state(self, key) -> State:
        """Look up a state by State, name or id."""
        if isinstance(key, State):
            if key.var.index in self._by_index:
                return self._by_index[key.var.index]
        elif isinstance(key, int):
            if key in self._by_index:
                return self._by_index[key]
        else:
            for s in self.states:
                if s.name == key:
                    return s
        raise UnknownState(key)

    def state_of_var(self, v: VarId) -> State:
        return self._by_index[v.index]

    def alphabet_var(self, key) -> VarId:
        if isinstance(key, VarId):
            if key in self.alphabet:
                return key
        else:
            for v in self.alphabet:
                if v.label == key:
                    return v
        raise UnknownVariable(key)

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return f"<AlternatingAutomaton |Q|={len(self.states)} alphabet={[v.label for v in self.alphabet]}>"

    def with_delta(self, delta: Mapping[State, Function], alphabet=None) -> "AlternatingAutomaton":
        return AlternatingAutomaton(self.manager, self.alphabet if alphabet is None else alphabet,
                                    self.states, self.initial, delta, check=False)

    def _letter_cofactors(self):
        # shapes are judged per letter: (a & q) | (!a & r) picks one state per letter
        m = self.manager
        for q in self.states:
            f = self.delta[q]
            letters = [v for v in bf.support(f) if v.kind is VarKind.ALPHABET]
            for bits in itertools.product((False, True), repeat=len(letters)):
                g = bf.restrict(f, dict(zip(letters, bits)))
                yield [] if g.is_false else m._primes(g.node)

    def is_nondeterministic(self) -> bool:
        return all(len(c) <= 1 for cubes in self._letter_cofactors() for c in cubes)

    def is_universal(self) -> bool:
        return all(len(cubes) <= 1 for cubes in self._letter_cofactors())


# -- accessors ---------------------------------------------------------------

def post_sets(A: AlternatingAutomaton, q) -> FrozenSet[FrozenSet[State]]:
    """State parts of the minimal models of the transition of *q*."""
    q = A.state(q)
    cached = A._post.get(q)
    if cached is not None:
        return cached
    out = set()
    f = A.delta[q]
    if not f.is_false:
        for cube in A.manager._primes(f.node):
            out.add(frozenset(A._by_index[i] for i, b in cube if i in A._by_index))
    result = frozenset(out)
    A._post[q] = result
    return result


def sorted_post_sets(A: AlternatingAutomaton, q) -> List[FrozenSet[State]]:
    return sorted(post_sets(A, q), key=lambda X: (len(X), sorted(s.id for s in X)))


def literals_of(A: AlternatingAutomaton, q, p) -> FrozenSet[Literal]:
    """Literals over *p* occurring in some minimal model of the transition of *q*."""
    q = A.state(q)
    p = A.alphabet_var(p)
    f = A.delta[q]
    out = set()
    if not f.is_false:
        for cube in A.manager._primes(f.node):
            for i, b in cube:
                if i == p.index:
                    out.add(Literal(p, b))
    return frozenset(out)


def reachable_states(A: AlternatingAutomaton, q) -> FrozenSet[State]:
    """Reflexive-transitive closure of the successor relation."""
    q = A.state(q)
    seen = {q}
    todo = [q]
    while todo:
        s = todo.pop()
        for X in post_sets(A, s):
            for t in X:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    return frozenset(seen)


# -- state-wise quantification --------------------------------------------------

def statewise_exists(A: AlternatingAutomaton, p) -> AlternatingAutomaton:
    p = A.alphabet_var(p)
    delta = {q: bf.exists_var(f, p) for q, f in A.delta.items()}
    return A.with_delta(delta, [v for v in A.alphabet if v != p])


def statewise_forall(A: AlternatingAutomaton, p) -> AlternatingAutomaton:
    p = A.alphabet_var(p)
    delta = {q: bf.forall_var(f, p) for q, f in A.delta.items()}
    return A.with_delta(delta, [v for v in A.alphabet if v != p])


def prune_unreachable(A: AlternatingAutomaton) -> AlternatingAutomaton:
    keep = reachable_states(A, A.initial)
    if len(keep) == len(A.states):
        return A
    states = [s for s in A.states if s in keep]
    return AlternatingAutomaton(A.manager, A.alphabet, states, A.initial,
                                {s: A.delta[s] for s in states}, check=False)


# -- subset constructions ---------------------------------------------------------

class SubsetGraph:
    """Lazy subset construction shared by nondeterminisation and emptiness.

    A subset S is a conjunction of states; its successors are read off the
    prime implicants of the conjunction of their transitions.  With
    ``project=True`` the alphabet is quantified away first, which is all that
    emptiness needs.
    """

    def __init__(self, A: AlternatingAutomaton, project: bool, limit: int = DEFAULT_SUBSET_LIMIT):
        self.A = A
        self.project = project
        self.limit = limit
        self.edges: Dict[FrozenSet[State], List[Tuple[Tuple, FrozenSet[State]]]] = {}
        self.order: List[FrozenSet[State]] = []

    def _successors(self, S: FrozenSet[State]):
        A = self.A
        m = A.manager
        node = bf.TRUE
        for q in sorted(S):
            node = m._and(node, A.delta[q].node)
            if node == bf.FALSE:
                return []
        if self.project:
            levels = frozenset(v.index for v in A.alphabet)
            if levels:
                node = m._quant(node, levels, True)
        out = []
        for cube in m._primes(node):
            letters = tuple((i, b) for i, b in cube if i not in A._by_index)
            succ = frozenset(A._by_index[i] for i, b in cube if i in A._by_index)
            out.append((letters, succ))
        out.sort(key=lambda e: (sorted(s.id for s in e[1]), e[0]))
        return out

    def explore(self, start: FrozenSet[State]) -> "SubsetGraph":
        todo = deque([start])
        if start not in self.edges:
            self.edges[start] = None
            self.order.append(start)
        while todo:
            S = todo.popleft()
            if self.edges.get(S) is not None:
                continue
            succ = self._successors(S)
            self.edges[S] = succ
            for _, T in succ:
                if T not in self.edges:
                    if len(self.edges) >= self.limit:
                        raise SubsetBlowupLimit(self.limit)
                    self.edges[T] = None
                    self.order.append(T)
                    todo.append(T)
        return self

    def productive(self) -> Set[FrozenSet[State]]:
        """Greatest set of subsets that all have a successor inside the set."""
        preds: Dict[FrozenSet[State], List[FrozenSet[State]]] = {S: [] for S in self.edges}
        count: Dict[FrozenSet[State], int] = {}
        for S, succ in self.edges.items():
            targets = {T for _, T in succ}
            count[S] = len(targets)
            for T in targets:
                preds[T].append(S)
        alive = set(self.edges)
        dead = deque(S for S, c in count.items() if c == 0)
        while dead:
            T = dead.popleft()
            if T not in alive:
                continue
            alive.discard(T)
            for S in preds[T]:
                if S in alive:
                    count[S] -= 1
                    if count[S] == 0:
                        dead.append(S)
        return alive


def nondeterminize(A: AlternatingAutomaton, limit: int = DEFAULT_SUBSET_LIMIT) -> AlternatingAutomaton:
    """Subset construction; no obligation set is needed because F = Q.

    States of the result are the subsets reachable from ``{q0}``; the empty
    subset loops on itself and accepts everything.
    """
    graph = SubsetGraph(A, project=False, limit=limit).explore(frozenset([A.initial]))
    m = A.manager
    names = {S: new_state(m, set_label(S), Origin.SUBSET, S) for S in graph.order}
    delta = {}
    for S in graph.order:
        f = m.false
        for letters, T in graph.edges[S]:
            cube = m.conj(m.literal(Literal(m.vars[i], b)) for i, b in letters)
            f = f | (cube & m.var(names[T].var))
        delta[names[S]] = f
    states = [names[S] for S in graph.order]
    return AlternatingAutomaton(m, A.alphabet, states, names[graph.order[0]], delta, check=False)


def _letter_independent(A: AlternatingAutomaton) -> bool:
    alphabet = {v.index for v in A.alphabet}
    return all(not (A.manager._support(f.node) & alphabet) for f in A.delta.values())


def _statewise_gfp(A: AlternatingAutomaton) -> Set[State]:
    # Without letters, branches of a run tree never have to agree with each
    # other, so each state can be judged on its own.
    alive = set(reachable_states(A, A.initial))
    changed = True
    while changed:
        changed = False
        for q in sorted(alive):
            assignment = {s.var: (s in alive) for s in A.states}
            if not bf.evaluate(A.delta[q], assignment):
                alive.discard(q)
                changed = True
    return alive


def is_empty(A: AlternatingAutomaton, limit: int = DEFAULT_SUBSET_LIMIT) -> bool:
    """Decide ``L(A) = {}`` via subset productivity."""
    if _letter_independent(A):
        return A.initial not in _statewise_gfp(A)
    graph = SubsetGraph(A, project=True, limit=limit)
    start = frozenset([A.initial])
    graph.explore(start)
    return start not in graph.productive()


# -- membership -----------------------------------------------------------------

def accepts_lasso(A: AlternatingAutomaton, w: LassoWord) -> bool:
    """Membership of ``stem . loop^omega`` as a greatest fixpoint over (state, position)."""
    alphabet = set(A.alphabet)
    extra = w.variables() - alphabet
    if extra:
        raise AlphabetMismatch("lasso mentions variables outside the alphabet: "
                               + ", ".join(sorted(v.label for v in extra)))
    n = len(w)
    m = A.manager
    cof = []
    for i in range(n):
        letter = w.letter(i)
        levels = {v.index: (v in letter) for v in A.alphabet}
        memo = {}
        cof.append({q: m._restrict(A.delta[q].node, levels, memo) for q in A.states})
    alive = [set(A.states) for _ in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            nxt = alive[w.successor(i)]
            values = {s.var.index: (s in nxt) for s in A.states}
            for q in list(alive[i]):
                node = cof[i][q]
                while node > bf.TRUE:
                    node = m._hi[node] if values.get(m._level[node], False) else m._lo[node]
                if node == bf.FALSE:
                    alive[i].discard(q)
                    changed = True
    return A.initial in alive[0]
