"""Line-oriented automaton text format, DOT export and isomorphism.

Format::

    # comment
    alphabet a b
    states q0 q1 "{q0,q1}"
    initial q0
    state q0: a & q0 & q1
    state q1: !a | b

Names that are not plain identifiers are written in double quotes.  Each
transition is printed as the disjunction of its prime implicants, so the
output is canonical for a fixed variable order.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple

from . import boolfun as bf
from . import ltl
from .automata import AlternatingAutomaton, State, new_state
from .boolfun import Manager, VarId, VarKind
from .errors import ParseError
from .parser import IDENT_RE, KEYWORDS, parse_ltl, tokenize


def quote(name: str) -> str:
    if IDENT_RE.fullmatch(name) and name not in KEYWORDS:
        return name
    return f'"{name}"'


def _namer(v: VarId) -> str:
    return quote(v.label)


def write_automaton(A: AlternatingAutomaton) -> str:
    lines = [
        "alphabet" + "".join(" " + quote(v.label) for v in A.alphabet),
        "states" + "".join(" " + quote(s.name) for s in A.states),
        "initial " + quote(A.initial.name),
    ]
    for s in A.states:
        lines.append(f"state {quote(s.name)}: {bf.dnf_string(A.delta[s], _namer)}")
    return "\n".join(lines) + "\n"


def _names(rest: str, lineno: int) -> List[str]:
    out = []
    for t in tokenize(rest, quoted=True):
        if t.kind == "eof":
            break
        if t.kind not in ("ident", "kw"):
            raise ParseError(f"expected a name, found {t.value!r}", lineno, t.col)
        out.append(t.value)
    return out


def read_automaton(text: str, manager: Optional[Manager] = None) -> AlternatingAutomaton:
    m = manager if manager is not None else Manager()
    alphabet: List[str] = []
    state_names: List[str] = []
    initial = None
    bodies: Dict[str, Tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "alphabet":
            alphabet = _names(rest, lineno)
        elif head == "states":
            state_names = _names(rest, lineno)
        elif head == "initial":
            names = _names(rest, lineno)
            if len(names) != 1:
                raise ParseError("initial takes exactly one state", lineno, 1)
            initial = names[0]
        elif head == "state":
            name_part, sep, body = rest.partition(":")
            if not sep:
                raise ParseError("expected ':' after the state name", lineno, len(head) + 2)
            names = _names(name_part, lineno)
            if len(names) != 1:
                raise ParseError("expected a single state name", lineno, len(head) + 2)
            if names[0] in bodies:
                raise ParseError(f"state {names[0]} defined twice", lineno, 1)
            bodies[names[0]] = (body, lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, 1)
    if initial is None:
        raise ParseError("missing 'initial' line")
    if len(set(state_names)) != len(state_names):
        raise ParseError("duplicate state name")
    clash = set(alphabet) & set(state_names)
    if clash:
        raise ParseError("names used both as letter and state: " + ", ".join(sorted(clash)))
    letters = {n: m.alphabet_var(n) for n in alphabet}
    states = {n: new_state(m, n) for n in state_names}
    if initial not in states:
        raise ParseError(f"initial state {initial} is not declared")
    delta = {}
    for n, s in states.items():
        if n not in bodies:
            raise ParseError(f"state {n} has no transition")
        body, lineno = bodies[n]
        try:
            f = parse_ltl(body, quoted=True)
        except ParseError as e:
            raise ParseError(f"in transition of {n}: {e}", lineno) from None
        delta[s] = _to_function(m, f, letters, states, lineno)
    return AlternatingAutomaton(m, letters.values(), states.values(), states[initial], delta)


def _to_function(m: Manager, f: ltl.Formula, letters, states, lineno):
    if isinstance(f, ltl.Const):
        return m.true if f.value else m.false
    if isinstance(f, ltl.Var):
        if f.name in letters:
            return m.var(letters[f.name])
        if f.name in states:
            return m.var(states[f.name].var)
        raise ParseError(f"unknown name {f.name}", lineno)
    if isinstance(f, ltl.Not):
        return ~_to_function(m, f.arg, letters, states, lineno)
    if isinstance(f, (ltl.And, ltl.Or, ltl.Implies, ltl.Iff)):
        l = _to_function(m, f.left, letters, states, lineno)
        r = _to_function(m, f.right, letters, states, lineno)
        if isinstance(f, ltl.And):
            return l & r
        if isinstance(f, ltl.Or):
            return l | r
        if isinstance(f, ltl.Implies):
            return l.implies(r)
        return l.iff(r)
    raise ParseError(f"temporal operator {f.symbol} in a transition", lineno)


# -- DOT ----------------------------------------------------------------------------

def to_dot(A: AlternatingAutomaton, name: str = "A") -> str:
    """Graphviz rendering; conjunctive successor sets fan out from a point node."""
    m = A.manager
    ids = {s: f"s{i}" for i, s in enumerate(A.states)}
    out = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point];']
    for s in A.states:
        out.append(f'  {ids[s]} [label="{_esc(s.name)}"];')
    out.append(f"  init -> {ids[A.initial]};")
    uses_true = False
    fan = 0
    for s in A.states:
        f = A.delta[s]
        if f.is_false:
            continue
        for cube in bf.prime_cubes(f):
            letters = [(m.vars[i].label if b else "!" + m.vars[i].label)
                       for i, b in cube if m.vars[i].kind is VarKind.ALPHABET]
            succ = [A.state_of_var(m.vars[i]) for i, b in cube if m.vars[i].kind is VarKind.STATE]
            label = _esc(" & ".join(letters) or "true")
            if not succ:
                uses_true = True
                out.append(f'  {ids[s]} -> accept [label="{label}"];')
            elif len(succ) == 1:
                out.append(f'  {ids[s]} -> {ids[succ[0]]} [label="{label}"];')
            else:
                node = f"c{fan}"
                fan += 1
                out.append(f"  {node} [shape=point];")
                out.append(f'  {ids[s]} -> {node} [label="{label}", arrowhead=none];')
                for t in succ:
                    out.append(f"  {node} -> {ids[t]};")
    if uses_true:
        out.append('  accept [label="true", shape=plaintext];')
    out.append("}")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


# -- isomorphism ----------------------------------------------------------------------

def _cubes(A: AlternatingAutomaton, s: State):
    """Prime implicants as (letter literals, successor states)."""
    m = A.manager
    out = []
    f = A.delta[s]
    if f.is_false:
        return out
    for cube in bf.prime_cubes(f):
        lits = frozenset((m.vars[i].label, b) for i, b in cube if m.vars[i].kind is VarKind.ALPHABET)
        succ = frozenset(A.state_of_var(m.vars[i]) for i, b in cube if m.vars[i].kind is VarKind.STATE)
        out.append((lits, succ))
    return out


def isomorphism(A: AlternatingAutomaton, B: AlternatingAutomaton) -> Optional[Dict[State, State]]:
    """A bijection of states mapping A onto B, or None.

    Letters are matched by name; states may be renamed freely.  Works across
    managers.
    """
    if sorted(v.label for v in A.alphabet) != sorted(v.label for v in B.alphabet):
        return None
    if len(A.states) != len(B.states):
        return None
    ca = {s: _cubes(A, s) for s in A.states}
    cb = {s: _cubes(B, s) for s in B.states}

    def sig(cubes):
        return tuple(sorted((tuple(sorted(l)), len(X)) for l, X in cubes))

    sa = {s: sig(c) for s, c in ca.items()}
    sb = {s: sig(c) for s, c in cb.items()}
    if sorted(sa.values()) != sorted(sb.values()):
        return None

    def consistent(mapping, s):
        image = {(l, frozenset(mapping[t] for t in X)) for l, X in ca[s]
                 if all(t in mapping for t in X)}
        target = set((l, X) for l, X in cb[mapping[s]])
        if not image <= target:
            return False
        if len(image) == len(ca[s]):
            return image == target
        return True

    # breadth-first from the initial state gives early pruning
    order = [A.initial]
    for s in order:
        for _, X in ca[s]:
            for t in sorted(X):
                if t not in order:
                    order.append(t)
    order += [s for s in A.states if s not in order]
    mapping: Dict[State, State] = {}
    used = set()

    def extend(k):
        if k == len(order):
            return all(consistent(mapping, s) for s in A.states)
        s = order[k]
        candidates = [B.initial] if s == A.initial else [t for t in B.states if t != B.initial]
        for t in candidates:
            if t in used or sa[s] != sb[t]:
                continue
            mapping[s] = t
            used.add(t)
            if all(consistent(mapping, u) for u in mapping) and extend(k + 1):
                return True
            del mapping[s]
            used.discard(t)
        return False

    return dict(mapping) if extend(0) else None


def isomorphic(A: AlternatingAutomaton, B: AlternatingAutomaton) -> bool:
    return isomorphism(A, B) is not None
