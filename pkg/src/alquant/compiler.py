"""Knowledge compilation over a conflict set and the QPTL pipeline.

Existential compilation merges conflict states that are reached
conjunctively into macro-states standing for their conjunction; universal
compilation merges states reached through different choices into
macro-states standing for their disjunction.  After compilation, state-wise
quantification of the letter is exact, which gives quantifier elimination
without complementation.

Macro-states are built lazily from the initial state, so only reachable
subsets of the conflict set are ever materialised.
"""

from __future__ import annotations

import itertools
import sys
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from . import automata as au
from . import boolfun as bf
from .automata import AlternatingAutomaton, Origin, State, new_state, set_label
from .boolfun import Function, VarKind
from .conflicts import conflicting_pairs, existential_conflicts, universal_conflicts
from .errors import MacroBlowupLimit

UNIVERSAL_CONSTRUCTIONS = ("dual", "disjunctive")
SUBSET_ENUMERATIONS = ("cover", "primes", "assignments")


@dataclass
class CompilationConfig:
    max_macro_states: int = 10_000
    prune_each_round: bool = True
    pairwise_refine: bool = False
    # "dual": conjunction over subsets of macro-or-cofactor clauses.
    # "disjunctive": disjunction over subsets with disjunctive macro bodies.
    universal_construction: str = "dual"
    subset_limit: int = au.DEFAULT_SUBSET_LIMIT
    merge_equal_states: bool = False
    # Close the fixpoint's conflict set under the exact pairwise deciders;
    # the fixpoints alone can miss clashes between equally labelled states.
    decider_closure: bool = True
    # "cover": M-parts of an irredundant prime cover (dually, of the prime
    # implicates); "primes": of all prime implicants; "assignments": every
    # full assignment to the M-support.
    subset_enumeration: str = "cover"

    def __post_init__(self):
        if self.max_macro_states < 1:
            raise ValueError("max_macro_states must be at least 1")
        if self.universal_construction not in UNIVERSAL_CONSTRUCTIONS:
            raise ValueError(f"unknown universal construction {self.universal_construction!r}")
        if self.subset_enumeration not in SUBSET_ENUMERATIONS:
            raise ValueError(f"unknown subset enumeration {self.subset_enumeration!r}")


class _Builder:
    """Shared worklist for both compilations."""

    def __init__(self, A: AlternatingAutomaton, M: Iterable[State], cfg: CompilationConfig,
                 body: Callable[[FrozenSet[State]], Function]):
        self.A = A
        self.m = A.manager
        self.M = frozenset(A.state(q) for q in M)
        self.cfg = cfg
        self.body = body
        self.macros: Dict[FrozenSet[State], State] = {}
        self.names = {s.name for s in A.states}
        self.states: List[State] = []
        self.delta: Dict[State, Function] = {}
        self.todo = deque()
        self.seen = set()
        self.m_levels = {q.var.index: q for q in self.M}

    def macro(self, X: FrozenSet[State]) -> State:
        s = self.macros.get(X)
        if s is None:
            if len(self.macros) >= self.cfg.max_macro_states:
                raise MacroBlowupLimit(self.cfg.max_macro_states)
            name = set_label(X)
            while name in self.names:
                name += "'"
            self.names.add(name)
            s = new_state(self.m, name, Origin.MACRO, X)
            self.macros[X] = s
            self.todo.append(s)
            self.states.append(s)
        return s

    def plain(self, q: State) -> State:
        if q not in self.seen:
            self.seen.add(q)
            self.states.append(q)
            self.todo.append(q)
        return q

    def m_support(self, f: Function) -> List[State]:
        return [self.m_levels[i] for i in sorted(self.m._support(f.node)) if i in self.m_levels]

    def cofactor(self, f: Function, true_set: Iterable[State], false_set: Iterable[State]) -> Function:
        levels = {q.var.index: True for q in true_set}
        levels.update({q.var.index: False for q in false_set})
        return Function(self.m, self.m._restrict(f.node, levels, {}))

    def touch(self, f: Function) -> None:
        """Queue the plain states a finished transition refers to."""
        for i in sorted(self.m._support(f.node)):
            v = self.m.vars[i]
            if v.kind is VarKind.STATE and i in self.A._by_index and i not in self.m_levels:
                self.plain(self.A._by_index[i])

    def run(self, transition: Callable[[Function], Function]) -> AlternatingAutomaton:
        A = self.A
        q0 = A.initial
        initial = self.macro(frozenset([q0])) if q0 in self.M else self.plain(q0)
        while self.todo:
            s = self.todo.popleft()
            g = A.delta[s] if s.var.index in A._by_index else self.body(s.members)
            f = transition(g)
            self.touch(f)
            self.delta[s] = f
        return AlternatingAutomaton(self.m, A.alphabet, self.states, initial, self.delta, check=False)


def _candidate_subsets(b: _Builder, f: Function, dual: bool = False):
    """(true part, false part) pairs of M-subsets worth a macro in the transition *f*.

    With "assignments" every full assignment to the M-support is produced.
    With "primes" only the M-parts of the prime implicants of *f* (of its
    negation when *dual*): transitions are positive in the states, so any
    other subset contributes a disjunct (dually a clause) already implied by
    the rest.  "cover" goes one step further and keeps an irredundant subset
    of the primes, dropping consensus terms such as ``q1 & q2`` in
    ``(q1 & x) | (q2 & !x)``.
    """
    S = frozenset(b.m_support(f))
    if b.cfg.subset_enumeration == "assignments" or not S:
        order = sorted(S)
        for bits in itertools.product((False, True), repeat=len(order)):
            T = frozenset(q for q, v in zip(order, bits) if v)
            yield T, S - T
        return
    node = b.m._not(f.node) if dual else f.node
    if node == bf.FALSE:
        return
    cubes = b.m._primes(node)
    if b.cfg.subset_enumeration == "cover":
        cubes = _irredundant(b, cubes)
    seen = set()
    for cube in cubes:
        T = frozenset(b.m_levels[i] for i, _ in cube if i in b.m_levels)
        if T not in seen:
            seen.add(T)
            yield T, S - T


def _irredundant(b: _Builder, cubes):
    """Greedily drop primes implied by the others, those with most M-states first."""
    m = b.m
    nodes = [bf.FALSE] * len(cubes)
    for k, cube in enumerate(cubes):
        n = bf.TRUE
        for i, v in sorted(cube, reverse=True):
            n = m._mk(i, bf.FALSE, n) if v else m._mk(i, n, bf.FALSE)
        nodes[k] = n
    alive = set(range(len(cubes)))
    order = sorted(alive, key=lambda k: (-sum(1 for i, _ in cubes[k] if i in b.m_levels), -len(cubes[k]), k))
    for k in order:
        rest = bf.FALSE
        for j in alive:
            if j != k:
                rest = m._or(rest, nodes[j])
        if m._implies_cube(cubes[k], rest):
            alive.discard(k)
    return [cubes[k] for k in sorted(alive)]


def compile_exists(A: AlternatingAutomaton, M: Iterable[State],
                   cfg: Optional[CompilationConfig] = None) -> AlternatingAutomaton:
    """Merge conflict states reached conjunctively into conjunctive macro-states."""
    cfg = cfg or CompilationConfig()
    M = frozenset(A.state(q) for q in M)
    if not M:
        return A
    m = A.manager

    def body(X):
        return m.conj(A.delta[q] for q in sorted(X))

    b = _Builder(A, M, cfg, body)

    def transition(g: Function) -> Function:
        kept: List[Tuple[FrozenSet[State], Function]] = []
        for T, F in sorted(_candidate_subsets(b, g), key=lambda e: (len(e[0]), sorted(e[0]))):
            c = b.cofactor(g, T, F)
            if c.is_false:
                continue
            # a smaller macro with the same residue accepts at least as much
            if any(U < T and c == d for U, d in kept):
                continue
            kept.append((T, c))
        out = m.false
        for T, c in kept:
            out = out | ((m.var(b.macro(T).var) & c) if T else c)
        return out

    return b.run(transition)


def compile_forall(A: AlternatingAutomaton, M: Iterable[State],
                   cfg: Optional[CompilationConfig] = None) -> AlternatingAutomaton:
    """Merge conflict states reached through different choices into disjunctive macro-states."""
    cfg = cfg or CompilationConfig()
    M = frozenset(A.state(q) for q in M)
    if not M:
        return A
    m = A.manager

    def body(X):
        return m.disj(A.delta[q] for q in sorted(X))

    b = _Builder(A, M, cfg, body)

    def dual(g: Function) -> Function:
        # g equals the conjunction over T of (OR T) | g[T -> 0, rest -> 1]
        kept: List[Tuple[FrozenSet[State], Function]] = []
        for T, F in sorted(_candidate_subsets(b, g, dual=True), key=lambda e: (len(e[0]), sorted(e[0]))):
            c = b.cofactor(g, F, T)
            if c.is_true:
                continue
            if any(U < T and c == d for U, d in kept):
                continue
            kept.append((T, c))
        out = m.true
        for T, c in kept:
            out = out & ((m.var(b.macro(T).var) | c) if T else c)
        return out

    def disjunctive(g: Function) -> Function:
        kept: List[Tuple[FrozenSet[State], Function]] = []
        cands = sorted(_candidate_subsets(b, g), key=lambda e: (-len(e[0]), sorted(e[0])))
        cofs = {T: b.cofactor(g, T, F) for T, F in cands}
        for T, F in cands:
            c = cofs[T]
            if c.is_false:
                continue
            if T and (cofs.get(frozenset()) == c or any(T < U and c == d for U, d in kept)):
                continue
            kept.append((T, c))
        out = m.false
        for T, c in kept:
            out = out | ((m.var(b.macro(T).var) & c) if T else c)
        return out

    return b.run(dual if cfg.universal_construction == "dual" else disjunctive)


# -- quantifier elimination --------------------------------------------------------

@dataclass
class RoundStats:
    quantifier: str
    variable: str
    statesBefore: int
    conflictSetSize: int
    macroStatesCreated: int
    statesAfter: int
    wallMillis: float
    functionNodePeak: int


@dataclass
class RunStats:
    perRound: List[RoundStats] = field(default_factory=list)
    verdict: Optional[str] = None
    totalMillis: float = 0.0

    def to_json(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d["totalMillis"] = 0.0
            for r in d["perRound"]:
                r["wallMillis"] = 0.0
        return d


RUN_STATS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "RunStats",
    "type": "object",
    "required": ["perRound", "verdict", "totalMillis"],
    "additionalProperties": False,
    "properties": {
        "verdict": {"enum": ["SAT", "UNSAT"]},
        "totalMillis": {"type": "number", "minimum": 0},
        "perRound": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["quantifier", "variable", "statesBefore", "conflictSetSize",
                             "macroStatesCreated", "statesAfter", "wallMillis", "functionNodePeak"],
                "properties": {
                    "quantifier": {"enum": ["exists", "forall"]},
                    "variable": {"type": "string"},
                    "statesBefore": {"type": "integer", "minimum": 0},
                    "conflictSetSize": {"type": "integer", "minimum": 0},
                    "macroStatesCreated": {"type": "integer", "minimum": 0},
                    "statesAfter": {"type": "integer", "minimum": 0},
                    "wallMillis": {"type": "number", "minimum": 0},
                    "functionNodePeak": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


def _closure_can_grow(A: AlternatingAutomaton, p, M) -> bool:
    # a pair adds states only through a successor outside M whose subtree reads p
    pv = A.alphabet_var(p)
    outside = {q for q in A.states if q not in M}
    if not outside:
        return False
    succ = set()
    for q in A.states:
        for X in au.post_sets(A, q):
            succ |= X & outside
    reads = {q for q in A.states if pv.index in A.manager._support(A.delta[q].node)}
    return any(au.reachable_states(A, q) & reads for q in succ)


def conflict_set(A: AlternatingAutomaton, quant: str, p, cfg: CompilationConfig) -> FrozenSet[State]:
    report = existential_conflicts(A, p) if quant == "exists" else universal_conflicts(A, p)
    M = report.conflict_set
    closure = cfg.decider_closure and _closure_can_grow(A, p, M)
    if not (closure or cfg.pairwise_refine):
        return M
    pairs = conflicting_pairs(A, p, quant)
    if closure:
        for a, b in pairs:
            if not (a in M and b in M):
                M = M | au.reachable_states(A, a) | au.reachable_states(A, b)
    if cfg.pairwise_refine:
        M = frozenset(q for pr in pairs for q in pr) & M
    return M


def compile_for(A: AlternatingAutomaton, quant: str, p, cfg: Optional[CompilationConfig] = None):
    """Conflict analysis followed by the matching compilation; returns (automaton, M)."""
    cfg = cfg or CompilationConfig()
    if quant not in ("exists", "forall"):
        raise ValueError(f"unknown quantifier {quant!r}")
    M = conflict_set(A, quant, p, cfg)
    C = compile_exists(A, M, cfg) if quant == "exists" else compile_forall(A, M, cfg)
    return C, M


def eliminate_quantifier(A: AlternatingAutomaton, quant: str, p,
                         cfg: Optional[CompilationConfig] = None,
                         stats: Optional[RunStats] = None) -> AlternatingAutomaton:
    """Exact ``exists p`` / ``forall p`` of the language of *A*."""
    cfg = cfg or CompilationConfig()
    start = time.perf_counter()
    pv = A.alphabet_var(p)
    before = len(A.states)
    C, M = compile_for(A, quant, pv, cfg)
    out = au.statewise_exists(C, pv) if quant == "exists" else au.statewise_forall(C, pv)
    if cfg.merge_equal_states:
        out = merge_equal_states(out)
    if cfg.prune_each_round:
        out = au.prune_unreachable(out)
    if stats is not None:
        stats.perRound.append(RoundStats(
            quantifier=quant, variable=pv.label, statesBefore=before, conflictSetSize=len(M),
            macroStatesCreated=sum(1 for s in C.states if s.origin is Origin.MACRO and s not in A.states),
            statesAfter=len(out.states), wallMillis=round((time.perf_counter() - start) * 1000, 3),
            functionNodePeak=A.manager.peak_nodes))
    return out


def merge_equal_states(A: AlternatingAutomaton) -> AlternatingAutomaton:
    """Identify states whose transitions are the same function, to a fixpoint."""
    m = A.manager
    while True:
        rep: Dict[int, State] = {}
        mapping = {}
        for s in A.states:
            r = rep.setdefault(A.delta[s].node, s)
            if r != s:
                mapping[s.var] = r.var
        if not mapping:
            return A
        keep = [s for s in A.states if s.var not in mapping]
        delta = {s: bf.rename(A.delta[s], mapping) for s in keep}
        initial = A.state_of_var(mapping.get(A.initial.var, A.initial.var))
        A = AlternatingAutomaton(m, A.alphabet, keep, initial, delta, check=False)


def solve_qptl(phi, cfg: Optional[CompilationConfig] = None, manager=None):
    """Decide satisfiability of a prenex safety QPTL formula; returns (verdict, RunStats)."""
    from .translate import translate_qptl

    cfg = cfg or CompilationConfig()
    # diagram operations recurse once per variable level
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    start = time.perf_counter()
    stats = RunStats()
    A = translate_qptl(phi, manager)
    for quant, v in reversed(phi.prefix):
        A = eliminate_quantifier(A, quant, v, cfg, stats)
    empty = au.is_empty(A, cfg.subset_limit)
    stats.verdict = "UNSAT" if empty else "SAT"
    stats.totalMillis = round((time.perf_counter() - start) * 1000, 3)
    return stats.verdict, stats
