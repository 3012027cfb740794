"""Reduced ordered decision diagrams over typed variables.

Every transition function, cofactor and quantified formula in the toolkit is a
:class:`Function` living in a :class:`Manager`.  Nodes are hash-consed, so two
functions are equal exactly when their handles are equal.

The variable order is the allocation order and is never changed.  Alphabet and
state variables are interleaved in whatever order they are created.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import EmptyFunction, ManagerMismatch, NotStatePositive

FALSE = 0
TRUE = 1
_TERMINAL_LEVEL = 1 << 60

Cube = Tuple[Tuple[int, bool], ...]


class VarKind(enum.Enum):
    ALPHABET = "alphabet"
    STATE = "state"


@dataclass(frozen=True)
class VarId:
    index: int
    kind: VarKind = field(compare=False)
    label: str = field(compare=False)

    def __lt__(self, other):
        return self.index < other.index

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"VarId({self.index}, {self.kind.value}, {self.label!r})"


@dataclass(frozen=True)
class Literal:
    var: VarId
    positive: bool = True

    def __neg__(self):
        return Literal(self.var, not self.positive)

    def __lt__(self, other):
        return (self.var.index, not self.positive) < (other.var.index, not other.positive)

    def __str__(self):
        return self.var.label if self.positive else "!" + self.var.label


@dataclass(frozen=True)
class LiteralSet:
    """A conjunction of literals; free variables are simply absent."""

    positives: FrozenSet[VarId] = frozenset()
    negatives: FrozenSet[VarId] = frozenset()

    def __post_init__(self):
        if self.positives & self.negatives:
            raise ValueError("a literal set may not contain both polarities of a variable")
        if any(v.kind is VarKind.STATE for v in self.negatives):
            raise NotStatePositive("state variables may only occur positively")

    def literals(self) -> List[Literal]:
        lits = [Literal(v, True) for v in self.positives]
        lits += [Literal(v, False) for v in self.negatives]
        return sorted(lits)

    def states(self) -> FrozenSet[VarId]:
        return frozenset(v for v in self.positives if v.kind is VarKind.STATE)

    def letter_literals(self) -> List[Literal]:
        return [l for l in self.literals() if l.var.kind is VarKind.ALPHABET]

    def __len__(self):
        return len(self.positives) + len(self.negatives)

    def __str__(self):
        lits = self.literals()
        if not lits:
            return "true"
        return " & ".join(str(l) for l in lits)


class Function:
    """Handle to a node of a manager.  Equality is functional equivalence."""

    __slots__ = ("manager", "node")

    def __init__(self, manager: "Manager", node: int):
        self.manager = manager
        self.node = node

    def _check(self, other: "Function") -> None:
        if not isinstance(other, Function) or other.manager is not self.manager:
            raise ManagerMismatch("operands belong to different managers")

    def __and__(self, other):
        self._check(other)
        return Function(self.manager, self.manager._and(self.node, other.node))

    def __or__(self, other):
        self._check(other)
        return Function(self.manager, self.manager._or(self.node, other.node))

    def __xor__(self, other):
        self._check(other)
        m = self.manager
        return Function(m, m._or(m._and(self.node, m._not(other.node)),
                                 m._and(m._not(self.node), other.node)))

    def __invert__(self):
        return Function(self.manager, self.manager._not(self.node))

    def implies(self, other):
        return ~self | other

    def iff(self, other):
        return ~(self ^ other)

    def __eq__(self, other):
        return isinstance(other, Function) and other.manager is self.manager and other.node == self.node

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.node)

    def __bool__(self):
        raise TypeError("use is_true/is_false to test a Boolean function")

    @property
    def is_true(self) -> bool:
        return self.node == TRUE

    @property
    def is_false(self) -> bool:
        return self.node == FALSE

    def __repr__(self):
        return f"Function({dnf_string(self)})"

    def __str__(self):
        return dnf_string(self)


class Manager:
    """Node store, variable table and operation caches.

    A manager is single-threaded; share handles only within one manager.
    """

    def __init__(self):
        self._level: List[int] = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo: List[int] = [FALSE, TRUE]
        self._hi: List[int] = [FALSE, TRUE]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self.vars: List[VarId] = []
        self._alphabet_by_label: Dict[str, VarId] = {}
        self._and_cache: Dict[Tuple[int, int], int] = {}
        self._or_cache: Dict[Tuple[int, int], int] = {}
        self._not_cache: Dict[int, int] = {}
        self._quant_cache: Dict[Tuple[str, int, FrozenSet[int]], int] = {}
        self._primes_cache: Dict[int, List[Cube]] = {}
        self._support_cache: Dict[int, FrozenSet[int]] = {}
        self.peak_nodes = 2

    # -- variables ---------------------------------------------------------

    def mk_var(self, kind: VarKind, label: str) -> VarId:
        v = VarId(len(self.vars), VarKind(kind), label)
        self.vars.append(v)
        return v

    def alphabet_var(self, label: str) -> VarId:
        """Return the alphabet variable called *label*, creating it on first use."""
        v = self._alphabet_by_label.get(label)
        if v is None:
            v = self.mk_var(VarKind.ALPHABET, label)
            self._alphabet_by_label[label] = v
        return v

    def lookup_alphabet(self, label: str) -> Optional[VarId]:
        return self._alphabet_by_label.get(label)

    def var(self, v: VarId) -> Function:
        return Function(self, self._mk(v.index, FALSE, TRUE))

    def literal(self, lit: Literal) -> Function:
        f = self.var(lit.var)
        return f if lit.positive else ~f

    @property
    def true(self) -> Function:
        return Function(self, TRUE)

    @property
    def false(self) -> Function:
        return Function(self, FALSE)

    def conj(self, fs: Iterable[Function]) -> Function:
        node = TRUE
        for f in fs:
            node = self._and(node, f.node)
        return Function(self, node)

    def disj(self, fs: Iterable[Function]) -> Function:
        node = FALSE
        for f in fs:
            node = self._or(node, f.node)
        return Function(self, node)

    def cube(self, literals: Iterable[Literal]) -> Function:
        return self.conj(self.literal(l) for l in literals)

    def from_literal_set(self, ls: LiteralSet) -> Function:
        return self.cube(ls.literals())

    @property
    def node_count(self) -> int:
        return len(self._level)

    # -- core --------------------------------------------------------------

    def _mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._level)
            self._level.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = node
            if node + 1 > self.peak_nodes:
                self.peak_nodes = node + 1
        return node

    def _not(self, f: int) -> int:
        if f <= TRUE:
            return 1 - f
        r = self._not_cache.get(f)
        if r is None:
            r = self._mk(self._level[f], self._not(self._lo[f]), self._not(self._hi[f]))
            self._not_cache[f] = r
            self._not_cache[r] = f
        return r

    def _and(self, f: int, g: int) -> int:
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (f, g)
        r = self._and_cache.get(key)
        if r is not None:
            return r
        lf, lg = self._level[f], self._level[g]
        level = min(lf, lg)
        f0, f1 = (self._lo[f], self._hi[f]) if lf == level else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if lg == level else (g, g)
        r = self._mk(level, self._and(f0, g0), self._and(f1, g1))
        self._and_cache[key] = r
        return r

    def _or(self, f: int, g: int) -> int:
        if f == TRUE or g == TRUE:
            return TRUE
        if f == FALSE:
            return g
        if g == FALSE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (f, g)
        r = self._or_cache.get(key)
        if r is not None:
            return r
        lf, lg = self._level[f], self._level[g]
        level = min(lf, lg)
        f0, f1 = (self._lo[f], self._hi[f]) if lf == level else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if lg == level else (g, g)
        r = self._mk(level, self._or(f0, g0), self._or(f1, g1))
        self._or_cache[key] = r
        return r

    def _restrict(self, f: int, assignment: Mapping[int, bool], memo: Dict[int, int]) -> int:
        if f <= TRUE:
            return f
        r = memo.get(f)
        if r is not None:
            return r
        level = self._level[f]
        value = assignment.get(level)
        if value is None:
            r = self._mk(level, self._restrict(self._lo[f], assignment, memo),
                         self._restrict(self._hi[f], assignment, memo))
        elif value:
            r = self._restrict(self._hi[f], assignment, memo)
        else:
            r = self._restrict(self._lo[f], assignment, memo)
        memo[f] = r
        return r

    def _quant(self, f: int, levels: FrozenSet[int], existential: bool) -> int:
        if f <= TRUE:
            return f
        key = ("e" if existential else "a", f, levels)
        r = self._quant_cache.get(key)
        if r is not None:
            return r
        level = self._level[f]
        lo = self._quant(self._lo[f], levels, existential)
        hi = self._quant(self._hi[f], levels, existential)
        if level in levels:
            r = self._or(lo, hi) if existential else self._and(lo, hi)
        else:
            r = self._mk(level, lo, hi)
        self._quant_cache[key] = r
        return r

    def _support(self, f: int) -> FrozenSet[int]:
        if f <= TRUE:
            return frozenset()
        r = self._support_cache.get(f)
        if r is None:
            r = self._support(self._lo[f]) | self._support(self._hi[f]) | {self._level[f]}
            self._support_cache[f] = r
        return r

    def _implies_cube(self, cube: Cube, g: int) -> bool:
        """Does the conjunction *cube* imply *g*?"""
        node = g
        # walk down g following the cube; variables of g outside the cube must not matter
        assignment = dict(cube)
        return self._restrict(node, assignment, {}) == TRUE

    def _primes(self, f: int) -> List[Cube]:
        if f == FALSE:
            return []
        if f == TRUE:
            return [()]
        r = self._primes_cache.get(f)
        if r is not None:
            return r
        level = self._level[f]
        f0, f1 = self._lo[f], self._hi[f]
        both = self._and(f0, f1)
        r = list(self._primes(both))
        for c in self._primes(f0):
            if not self._implies_cube(c, f1):
                r.append(((level, False),) + c)
        for c in self._primes(f1):
            if not self._implies_cube(c, f0):
                r.append(((level, True),) + c)
        self._primes_cache[f] = r
        return r

    def _rename(self, f: int, mapping: Mapping[int, int], memo: Dict[int, int]) -> int:
        if f <= TRUE:
            return f
        r = memo.get(f)
        if r is not None:
            return r
        level = self._level[f]
        target = mapping.get(level, level)
        x = self._mk(target, FALSE, TRUE)
        lo = self._rename(self._lo[f], mapping, memo)
        hi = self._rename(self._hi[f], mapping, memo)
        r = self._or(self._and(x, hi), self._and(self._not(x), lo))
        memo[f] = r
        return r

    def _sat_assignments(self, f: int, levels: List[int], i: int) -> Iterator[Dict[int, bool]]:
        # full assignments over `levels` (sorted) such that f is not false
        if f == FALSE:
            return
        if i == len(levels):
            yield {}
            return
        level = levels[i]
        top = self._level[f]
        if top < level:
            raise ValueError("function depends on a variable outside the enumerated set")
        if top == level:
            lo, hi = self._lo[f], self._hi[f]
        else:
            lo = hi = f
        for value, child in ((False, lo), (True, hi)):
            for rest in self._sat_assignments(child, levels, i + 1):
                rest[level] = value
                yield rest

    def clear_caches(self) -> None:
        self._and_cache.clear()
        self._or_cache.clear()
        self._quant_cache.clear()


# -- public operations -------------------------------------------------------

def mk_var(manager: Manager, kind, label: str) -> VarId:
    return manager.mk_var(kind, label)


_BINARY = {"and", "or", "implies", "iff", "xor"}


def apply(op: str, f: Function, g: Optional[Function] = None) -> Function:
    """Combine functions with one of ``and or not implies iff xor``."""
    if op == "not":
        if g is not None:
            raise ValueError("'not' takes a single operand")
        return ~f
    if op not in _BINARY:
        raise ValueError(f"unknown operator {op!r}")
    if g is None:
        raise ValueError(f"{op!r} needs two operands")
    f._check(g)
    if op == "and":
        return f & g
    if op == "or":
        return f | g
    if op == "implies":
        return f.implies(g)
    if op == "iff":
        return f.iff(g)
    return f ^ g


def restrict(f: Function, assignment: Mapping[VarId, bool]) -> Function:
    """Cofactor of *f* with the given variables fixed."""
    if not assignment:
        return f
    levels = {v.index: bool(b) for v, b in assignment.items()}
    return Function(f.manager, f.manager._restrict(f.node, levels, {}))


def exists_var(f: Function, v: VarId) -> Function:
    return exists_vars(f, [v])


def forall_var(f: Function, v: VarId) -> Function:
    return forall_vars(f, [v])


def exists_vars(f: Function, vs: Iterable[VarId]) -> Function:
    levels = frozenset(v.index for v in vs)
    if not levels:
        return f
    return Function(f.manager, f.manager._quant(f.node, levels, True))


def forall_vars(f: Function, vs: Iterable[VarId]) -> Function:
    levels = frozenset(v.index for v in vs)
    if not levels:
        return f
    return Function(f.manager, f.manager._quant(f.node, levels, False))


def support(f: Function) -> FrozenSet[VarId]:
    m = f.manager
    return frozenset(m.vars[i] for i in m._support(f.node))


def rename(f: Function, mapping: Mapping[VarId, VarId]) -> Function:
    """Substitute variables by variables (a simultaneous renaming)."""
    levels = {a.index: b.index for a, b in mapping.items() if a.index != b.index}
    if not levels:
        return f
    return Function(f.manager, f.manager._rename(f.node, levels, {}))


def evaluate(f: Function, assignment: Mapping[VarId, bool]) -> bool:
    """Evaluate with every support variable assigned (missing ones read as false)."""
    m = f.manager
    node = f.node
    values = {v.index: bool(b) for v, b in assignment.items()}
    while node > TRUE:
        node = m._hi[node] if values.get(m._level[node], False) else m._lo[node]
    return node == TRUE


def prime_cubes(f: Function) -> List[Cube]:
    """Prime implicants as raw ``((index, polarity), ...)`` tuples, sorted."""
    return sorted(f.manager._primes(f.node), key=lambda c: (len(c), c))


def minimal_models(f: Function) -> FrozenSet[LiteralSet]:
    """All prime implicants of *f*.

    Each returned literal set implies *f*, none of its literals can be
    dropped, and their disjunction is *f*.
    """
    if f.is_false:
        raise EmptyFunction("the constant false function has no models")
    m = f.manager
    out = []
    for cube in m._primes(f.node):
        pos = frozenset(m.vars[i] for i, b in cube if b)
        neg = frozenset(m.vars[i] for i, b in cube if not b)
        out.append(LiteralSet(pos, neg))
    return frozenset(out)


def is_state_positive(f: Function) -> bool:
    m = f.manager
    for v in support(f):
        if v.kind is not VarKind.STATE:
            continue
        lo = restrict(f, {v: False})
        hi = restrict(f, {v: True})
        if not (lo & ~hi).is_false:
            return False
    return True


def check_state_positive(f: Function) -> Function:
    if not is_state_positive(f):
        raise NotStatePositive(f"transition {dnf_string(f)} mentions a state negatively")
    return f


def sat_assignments(f: Function, vs: Iterable[VarId]) -> Iterator[Dict[VarId, bool]]:
    """Full assignments to *vs* under which *f* is not false.

    *f* must not depend on variables outside *vs*.
    """
    m = f.manager
    levels = sorted({v.index for v in vs})
    for a in m._sat_assignments(f.node, levels, 0):
        yield {m.vars[i]: b for i, b in sorted(a.items())}


def cube_string(cube: Iterable[Literal]) -> str:
    lits = [str(l) for l in sorted(cube)]
    return " & ".join(lits) if lits else "true"


def dnf_string(f: Function, name=None) -> str:
    """Render *f* as the disjunction of its prime implicants.

    Golden-test surface: cubes are ordered by size then variable index and
    literals by variable index.  *name* maps a VarId to its printed form.
    """
    if f.is_false:
        return "false"
    if f.is_true:
        return "true"
    m = f.manager
    name = name or (lambda v: v.label)
    cubes = prime_cubes(f)
    parts = []
    for cube in cubes:
        lits = [(name(m.vars[i]) if b else "!" + name(m.vars[i])) for i, b in cube]
        parts.append(" & ".join(lits))
    if len(parts) == 1:
        return parts[0]
    return " | ".join(f"({p})" if " & " in p else p for p in parts)
