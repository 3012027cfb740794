"""Linear translation of safety LTL into alternating safety automata.

Every temporal subformula that is reached through a next-step obligation gets
one state; the input formula itself is the initial state.  The symbolic
expansion of a formula describes what must hold now and which states must
take over from the next letter on::

    D(lit)     = lit
    D(f & g)   = D(f) & D(g)          D(f | g) = D(f) | D(g)
    D(X f)     = state(f)
    D(G f)     = D(f) & state(G f)
    D(f W g)   = D(g) | (D(f) & state(f W g))
    D(f R g)   = D(g) & (D(f) | state(f R g))

and the transition of ``state(r)`` is ``D(r)``.  Structurally equal
subformulas share their state, which keeps the automaton linear in the
formula.
"""

from __future__ import annotations

import re
from collections import deque
from typing import Dict, Iterable, Optional

from . import ltl
from .automata import AlternatingAutomaton, Origin, State, new_state
from .boolfun import Function, Manager
from .errors import AlphabetMismatch


def _state_prefix(alphabet: Iterable[str]) -> str:
    names = set(alphabet)
    prefix = "q"
    while any(re.fullmatch(re.escape(prefix) + r"\d+", n) for n in names):
        prefix += "q"
    return prefix


def translate_to_asa(phi: ltl.Formula, alphabet: Optional[Iterable[str]] = None,
                     manager: Optional[Manager] = None) -> AlternatingAutomaton:
    """Alternating safety automaton accepting exactly the models of *phi*.

    *alphabet* lists the atomic propositions (defaults to those of *phi*);
    its variables are allocated in the given order before any state.
    """
    phi = ltl.to_nnf(phi)
    ltl.check_safety_nnf(phi)
    used = ltl.variables(phi)
    names = list(alphabet) if alphabet is not None else used
    missing = [v for v in used if v not in names]
    if missing:
        raise AlphabetMismatch("formula uses variables outside the alphabet: " + ", ".join(missing))
    m = manager if manager is not None else Manager()
    letters = {n: m.alphabet_var(n) for n in names}
    prefix = _state_prefix(names)

    states: Dict[ltl.Formula, State] = {}
    todo = deque()

    def state(f: ltl.Formula) -> State:
        s = states.get(f)
        if s is None:
            s = new_state(m, f"{prefix}{len(states)}", Origin.FORMULA)
            states[f] = s
            todo.append(f)
        return s

    def expand(f: ltl.Formula) -> Function:
        if isinstance(f, ltl.Const):
            return m.true if f.value else m.false
        if isinstance(f, ltl.Var):
            return m.var(letters[f.name])
        if isinstance(f, ltl.Not):
            return ~m.var(letters[f.arg.name])
        if isinstance(f, ltl.And):
            return expand(f.left) & expand(f.right)
        if isinstance(f, ltl.Or):
            return expand(f.left) | expand(f.right)
        if isinstance(f, ltl.Next):
            return m.var(state(f.arg).var)
        if isinstance(f, ltl.Globally):
            return expand(f.arg) & m.var(state(f).var)
        if isinstance(f, ltl.WeakUntil):
            return expand(f.right) | (expand(f.left) & m.var(state(f).var))
        if isinstance(f, ltl.Release):
            return expand(f.right) & (expand(f.left) | m.var(state(f).var))
        raise TypeError(f"unexpected node {f!r}")

    initial = state(phi)
    delta = {}
    while todo:
        f = todo.popleft()
        delta[states[f]] = expand(f)
    return AlternatingAutomaton(m, letters.values(), list(states.values()), initial, delta)


def translate_qptl(phi: ltl.QptlFormula, manager: Optional[Manager] = None) -> AlternatingAutomaton:
    return translate_to_asa(phi.body, phi.alphabet(), manager)
