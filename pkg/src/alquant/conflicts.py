"""Conflict detection for existential and universal quantification of a letter.

Two fixpoint algorithms over-approximate the states that must be merged
before state-wise quantification becomes exact; two product constructions
decide the underlying pairwise conflict relation exactly.

Labels are sets of literal sets over ``{p, !p}``: ``l[q, i]`` collects, per
resolution of the relevant choices, the ``p``-literals that can be read
``i`` steps below ``q``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from .automata import AlternatingAutomaton, State, literals_of, post_sets, reachable_states, set_label, sorted_post_sets
from .boolfun import Literal, VarId, VarKind

Label = FrozenSet[FrozenSet[Literal]]
LabelMap = Dict[Tuple[State, int], Label]


@dataclass
class ConflictReport:
    conflict_set: FrozenSet[State]
    iterations: int
    label_history: LabelMap = field(repr=False)
    mode: str = "exists"

    def labels_at(self, i: int) -> Dict[State, Label]:
        return {q: l for (q, j), l in self.label_history.items() if j == i}

    def __str__(self):
        return set_label(self.conflict_set, ", ")


def _initial_labels(A: AlternatingAutomaton, p: VarId) -> Dict[State, Label]:
    return {q: frozenset([literals_of(A, q, p)]) for q in A.states}


def _flatten(labels: Dict[State, Label], X: Iterable[State]) -> FrozenSet[Literal]:
    out = set()
    for q in X:
        for u in labels[q]:
            out |= u
    return frozenset(out)


def _run(A: AlternatingAutomaton, p, universal: bool) -> ConflictReport:
    p = A.alphabet_var(p)
    states = sorted(A.states)
    posts = {q: sorted_post_sets(A, q) for q in states}
    reach = {}

    def reach_of(q):
        if q not in reach:
            reach[q] = reachable_states(A, q)
        return reach[q]

    current = _initial_labels(A, p)
    history: LabelMap = {(q, 0): current[q] for q in states}
    seen = {tuple(current[q] for q in states): 0}
    confs: Set[State] = set()
    i = 0
    while True:
        i += 1
        prev = current
        if universal:
            current = {q: frozenset([frozenset().union(*(_flatten(prev, X) for X in posts[q]))])
                       for q in states}
        else:
            current = {q: frozenset(_flatten(prev, X) for X in posts[q]) for q in states}
        for q in states:
            history[(q, i)] = current[q]
        for q in states:
            for a, b in _candidate_pairs(posts[q], universal):
                if prev[a] != prev[b]:
                    confs |= reach_of(a) | reach_of(b) | {a, b}
        key = tuple(current[q] for q in states)
        if key in seen:
            break
        seen[key] = i
    return ConflictReport(frozenset(confs), i, history, "forall" if universal else "exists")


def _candidate_pairs(posts: List[FrozenSet[State]], universal: bool):
    """Pairs of successors the conflict test compares for one state."""
    if universal:
        for k, X in enumerate(posts):
            for Y in posts[k + 1:]:
                for a in sorted(X):
                    for b in sorted(Y):
                        if a != b:
                            yield a, b
    else:
        for X in posts:
            members = sorted(X)
            for k, a in enumerate(members):
                for b in members[k + 1:]:
                    yield a, b


def existential_conflicts(A: AlternatingAutomaton, p) -> ConflictReport:
    """Existential fixpoint: successors reached conjunctively with differing labels."""
    return _run(A, p, universal=False)


def universal_conflicts(A: AlternatingAutomaton, p) -> ConflictReport:
    """Universal fixpoint: successors in distinct minimal models with differing labels."""
    return _run(A, p, universal=True)


def conflicts(A: AlternatingAutomaton, p, mode: str) -> ConflictReport:
    if mode == "exists":
        return existential_conflicts(A, p)
    if mode == "forall":
        return universal_conflicts(A, p)
    raise ValueError(f"unknown mode {mode!r}")


# -- exact pairwise deciders -----------------------------------------------------

def _models(A: AlternatingAutomaton, q: State, p: VarId):
    """Minimal models as tuples of tokens: states, or the p-literals as booleans."""
    m = A.manager
    f = A.delta[q]
    out = []
    if f.is_false:
        return out
    for cube in m._primes(f.node):
        tokens = []
        for i, b in cube:
            if i == p.index:
                tokens.append(b)
            elif m.vars[i].kind is VarKind.STATE:
                tokens.append(A._by_index[i])
        out.append(tuple(tokens))
    return out


class _PairProduct:
    """Synchronous two-token walk through the unfolding of an automaton.

    Tokens sitting on the same state are the same vertex of the unfolding.
    Existentially such a vertex resolves to one minimal model, so both tokens
    pick from it; universally the tokens may split only across distinct
    models.  Tokens on different states choose independently.  A *clash* is a
    step where one token reads ``p`` and the other ``!p``.
    """

    def __init__(self, A: AlternatingAutomaton, p, universal: bool):
        self.A = A
        self.p = A.alphabet_var(p)
        self.universal = universal
        self.models = {q: _models(A, q, self.p) for q in A.states}
        self.succ: Dict[Tuple[State, State], Set[Tuple[State, State]]] = {}
        self.clash: Set[Tuple[State, State]] = set()
        # only pairs reachable from the initial pair are ever expanded
        self.reachable = self._forward((A.initial, A.initial))
        self.bad = self._backward()

    def _choices(self, a: State, b: State):
        if a != b:
            for X in self.models[a]:
                for Y in self.models[b]:
                    yield X, Y
        elif self.universal:
            ms = self.models[a]
            for X in ms:
                yield X, X
            for k, X in enumerate(ms):
                for Y in ms[k + 1:]:
                    yield X, Y
                    yield Y, X
        else:
            for X in self.models[a]:
                yield X, X

    def _expand(self, a: State, b: State):
        out = set()
        clash = False
        same_vertex = a == b
        for X, Y in self._choices(a, b):
            together = same_vertex and X is Y
            for x in X:
                for y in Y:
                    if universal_split_blocked(together, self.universal, x, y):
                        continue
                    if isinstance(x, bool) or isinstance(y, bool):
                        if isinstance(x, bool) and isinstance(y, bool) and x != y:
                            clash = True
                        continue
                    out.add((x, y))
        self.succ[(a, b)] = out
        if clash:
            self.clash.add((a, b))

    def _forward(self, start):
        seen = {start}
        todo = [start]
        while todo:
            s = todo.pop()
            self._expand(*s)
            for t in self.succ[s]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    def _backward(self):
        preds: Dict[Tuple[State, State], List] = {k: [] for k in self.succ}
        for s, ts in self.succ.items():
            for t in ts:
                preds[t].append(s)
        bad = set(self.clash)
        todo = list(bad)
        while todo:
            t = todo.pop()
            for s in preds[t]:
                if s not in bad:
                    bad.add(s)
                    todo.append(s)
        return bad

    def in_conflict(self, q: State, r: State) -> bool:
        # Conflicts relate two distinct states; a clash below a single state
        # either runs through a distinct pair or sits inside its own transition.
        return q != r and (q, r) in self.reachable and (q, r) in self.bad

    def all_pairs(self) -> Set[Tuple[State, State]]:
        return {pr for pr in self.reachable if pr in self.bad and pr[0] != pr[1]}


def universal_split_blocked(together: bool, universal: bool, x, y) -> bool:
    # A universal vertex keeps both tokens on one model only if they stay
    # together; two different members of one model are a conjunctive split.
    return universal and together and x != y


def pair_existential_conflict(A: AlternatingAutomaton, q, r, p) -> bool:
    return _PairProduct(A, p, universal=False).in_conflict(A.state(q), A.state(r))


def pair_universal_conflict(A: AlternatingAutomaton, q, r, p) -> bool:
    return _PairProduct(A, p, universal=True).in_conflict(A.state(q), A.state(r))


def conflicting_pairs(A: AlternatingAutomaton, p, mode: str) -> Set[Tuple[State, State]]:
    """Every ordered pair the exact decider flags, in one product construction."""
    if mode not in ("exists", "forall"):
        raise ValueError(f"unknown mode {mode!r}")
    return _PairProduct(A, p, universal=(mode == "forall")).all_pairs()


# -- rendering -------------------------------------------------------------------

def label_string(label: Label) -> str:
    if not label:
        return "{}"
    inner = sorted("{" + ",".join(str(l) for l in sorted(u)) + "}" for u in label)
    return "{" + ",".join(inner) + "}"


def trace_table(report: ConflictReport) -> str:
    """Label history as a table: one row per state, one column per iteration."""
    states = sorted({q for q, _ in report.label_history})
    cols = range(report.iterations + 1)
    header = ["state"] + [f"i={i}" for i in cols]
    rows = [[q.name] + [label_string(report.label_history[(q, i)]) for i in cols] for q in states]
    widths = [max(len(r[k]) for r in [header] + rows) for k in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n"
