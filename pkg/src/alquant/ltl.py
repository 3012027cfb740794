"""Formula trees for prenex QPTL and negation normal form.

Nodes are frozen dataclasses, so structurally identical subformulas compare
and hash equal; the translation relies on this to share states.  Source spans
ride along for error messages but take no part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from .errors import UnsupportedFragment

Span = Optional[Tuple[int, int]]


@dataclass(frozen=True)
class Formula:
    span: Span = field(default=None, compare=False, repr=False, kw_only=True)

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Unary(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class Not(Unary):
    symbol = "!"


class Next(Unary):
    symbol = "X"


class Globally(Unary):
    symbol = "G"


class Finally(Unary):
    symbol = "F"


class And(Binary):
    symbol = "&"


class Or(Binary):
    symbol = "|"


class Implies(Binary):
    symbol = "->"


class Iff(Binary):
    symbol = "<->"


class Until(Binary):
    symbol = "U"


class WeakUntil(Binary):
    symbol = "W"


class Release(Binary):
    symbol = "R"


TRUE = Const(True)
FALSE = Const(False)

TEMPORAL = (Next, Globally, Finally, Until, WeakUntil, Release)


@dataclass(frozen=True)
class QptlFormula:
    """Quantifier prefix (outermost first) and quantifier-free body."""

    prefix: Tuple[Tuple[str, str], ...]
    body: Formula

    def __post_init__(self):
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise ValueError("bound variables must be distinct")
        for q, _ in self.prefix:
            if q not in ("exists", "forall"):
                raise ValueError(f"unknown quantifier {q!r}")

    def bound(self) -> List[str]:
        return [v for _, v in self.prefix]

    def free(self) -> List[str]:
        bound = set(self.bound())
        return [v for v in variables(self.body) if v not in bound]

    def alphabet(self) -> List[str]:
        """Bound variables outermost first, then free variables by first occurrence."""
        out = self.bound()
        out += [v for v in variables(self.body) if v not in out]
        return out

    def __str__(self):
        head = "".join(f"{q} {v}. " for q, v in self.prefix)
        return head + to_text(self.body)


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def variables(f: Formula) -> List[str]:
    """Atomic propositions in order of first occurrence."""
    seen = []
    for g in walk(f):
        if isinstance(g, Var) and g.name not in seen:
            seen.append(g.name)
    return seen


def temporal_depth(f: Formula) -> int:
    kids = f.children()
    inner = max((temporal_depth(k) for k in kids), default=0)
    return inner + (1 if isinstance(f, TEMPORAL) else 0)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Until: 5, WeakUntil: 5, Release: 5}


def to_text(f: Formula) -> str:
    """Concrete syntax accepted by the parser."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Unary):
        inner = to_text(f.arg)
        if isinstance(f.arg, Binary):
            inner = f"({inner})"
        sep = "" if isinstance(f, Not) else " "
        return f"{f.symbol}{sep}{inner}"
    prec = _PREC[type(f)]

    def side(g, right):
        text = to_text(g)
        if isinstance(g, Binary):
            gp = _PREC[type(g)]
            # & and | associate to the left when parsed
            same_assoc = not right and type(g) is type(f) and type(f) in (And, Or)
            if gp < prec or (gp == prec and not same_assoc):
                return f"({text})"
        return text

    return f"{side(f.left, False)} {f.symbol} {side(f.right, True)}"


# -- negation normal form ----------------------------------------------------------

def _unsupported(op: str, f: Formula):
    raise UnsupportedFragment(f"operator {op} leaves the safety fragment", f.span)


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations to the atoms; only safety operators may remain.

    Raises UnsupportedFragment if an F or U would survive (possibly after
    dualising G, W or R under a negation).
    """
    sp = f.span
    if isinstance(f, Const):
        return Const(f.value != negate, span=sp)
    if isinstance(f, Var):
        return Not(f, span=sp) if negate else f
    if isinstance(f, Not):
        return to_nnf(f.arg, not negate)
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(to_nnf(f.left, negate), to_nnf(f.right, negate), span=sp)
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(to_nnf(f.left, negate), to_nnf(f.right, negate), span=sp)
    if isinstance(f, Implies):
        if negate:
            return And(to_nnf(f.left), to_nnf(f.right, True), span=sp)
        return Or(to_nnf(f.left, True), to_nnf(f.right), span=sp)
    if isinstance(f, Iff):
        l, r = to_nnf(f.left), to_nnf(f.right)
        nl, nr = to_nnf(f.left, True), to_nnf(f.right, True)
        if negate:
            return Or(And(l, nr, span=sp), And(nl, r, span=sp), span=sp)
        return Or(And(l, r, span=sp), And(nl, nr, span=sp), span=sp)
    if isinstance(f, Next):
        return Next(to_nnf(f.arg, negate), span=sp)
    if isinstance(f, Globally):
        if negate:
            _unsupported("F", f)
        return Globally(to_nnf(f.arg), span=sp)
    if isinstance(f, Finally):
        if not negate:
            _unsupported("F", f)
        return Globally(to_nnf(f.arg, True), span=sp)
    if isinstance(f, Until):
        if not negate:
            _unsupported("U", f)
        return Release(to_nnf(f.left, True), to_nnf(f.right, True), span=sp)
    if isinstance(f, WeakUntil):
        if negate:
            _unsupported("U", f)
        return WeakUntil(to_nnf(f.left), to_nnf(f.right), span=sp)
    if isinstance(f, Release):
        if negate:
            _unsupported("U", f)
        return Release(to_nnf(f.left), to_nnf(f.right), span=sp)
    raise TypeError(f"not a formula: {f!r}")


_SAFE_NNF = (Const, Var, And, Or, Next, Globally, WeakUntil, Release)


def check_safety_nnf(f: Formula) -> None:
    for g in walk(f):
        if isinstance(g, Not):
            if not isinstance(g.arg, Var):
                raise UnsupportedFragment("negation above an atom; convert to NNF first", g.span)
        elif not isinstance(g, _SAFE_NNF):
            raise UnsupportedFragment(f"operator {getattr(g, 'symbol', type(g).__name__)} "
                                      "leaves the safety fragment", g.span)


def is_safety_nnf(f: Formula) -> bool:
    try:
        check_safety_nnf(f)
    except UnsupportedFragment:
        return False
    return True
