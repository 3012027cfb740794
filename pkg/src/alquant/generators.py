"""Seeded instance generators: random safety formulas, synthesis-style
templates, scalability families and the bundled benchmark suite."""

from __future__ import annotations

import random
from typing import List, Optional, Sequence, Tuple

from . import ltl

VARS = ("a", "b", "c")


def random_safety_formula(rng: random.Random, names: Sequence[str] = VARS, depth: int = 4,
                          size: int = 7) -> ltl.Formula:
    """Random formula in safety NNF with temporal depth at most *depth*."""

    def atom():
        v = ltl.Var(rng.choice(list(names)))
        return ltl.Not(v) if rng.random() < 0.4 else v

    def gen(budget, d):
        if budget <= 1:
            return atom()
        ops = ["and", "or"]
        if d > 0:
            ops += ["X", "X", "G", "W", "R"]
        op = rng.choice(ops)
        if op == "X":
            return ltl.Next(gen(budget - 1, d - 1))
        if op == "G":
            return ltl.Globally(gen(budget - 1, d - 1))
        left = rng.randint(1, budget - 1)
        l, r = (gen(left, d - 1), gen(budget - left, d - 1)) if op in ("W", "R") \
            else (gen(left, d), gen(budget - left, d))
        return {"and": ltl.And, "or": ltl.Or, "W": ltl.WeakUntil, "R": ltl.Release}[op](l, r)

    return gen(size, depth)


def random_corpus(n: int, seed: int, names: Sequence[str] = VARS, max_states: int = 12,
                  depth: int = 4, min_size: int = 4, max_size: int = 9) -> List[ltl.Formula]:
    """*n* distinct formulas mentioning at least two variables whose automata stay small."""
    from .translate import translate_to_asa

    rng = random.Random(seed)
    out, seen = [], set()
    while len(out) < n:
        f = random_safety_formula(rng, names, depth, rng.randint(min_size, max_size))
        if f in seen or len(ltl.variables(f)) < 2 or ltl.temporal_depth(f) > depth:
            continue
        if len(translate_to_asa(f).states) > max_states:
            continue
        seen.add(f)
        out.append(f)
    return out


def random_qptl(rng: random.Random, names: Sequence[str] = VARS, depth: int = 4) -> ltl.QptlFormula:
    body = random_safety_formula(rng, names, depth, rng.randint(4, 9))
    used = ltl.variables(body)
    bound = [v for v in used if rng.random() < 0.7]
    rng.shuffle(bound)
    return ltl.QptlFormula(tuple((rng.choice(("exists", "forall")), v) for v in bound), body)


# -- synthesis-style templates: forall inputs. exists outputs. body ---------------------

TEMPLATES: List[Tuple[str, str]] = [
    ("buffer", "forall i. exists o. G (X o <-> i)"),
    ("buffer_future", "forall i. exists o. G (o <-> X i)"),
    ("copy", "forall i. exists o. G (o <-> i)"),
    ("negate", "forall i. exists o. G (o <-> !i)"),
    ("arbiter", "forall r1. forall r2. exists g1. exists g2. "
                "G (!(g1 & g2) & (r1 -> g1 | X g1) & (r2 -> g2 | X g2))"),
    ("mutex_grant", "forall r. exists g1. exists g2. G (!(g1 & g2) & (r -> g1 | g2))"),
    ("toggle", "forall i. exists o. G ((o -> X !o) & (!o -> X o))"),
    ("latch", "forall s. forall r. exists q. G ((s & !r -> X q) & (r -> X !q) & (!s & !r -> (q <-> X q)))"),
    ("hold", "forall i. exists o. G (i -> o) & G (o -> X o)"),
    ("impossible_predict", "forall i. exists o. G (o <-> X i) & G (X o <-> i)"),
    ("safety_monitor", "forall e. exists alarm. G (e -> alarm) & G (alarm -> X alarm | e)"),
    ("counter2", "forall t. exists b0. exists b1. G ((t -> (X b0 <-> !b0)) & (!t -> (X b0 <-> b0)) "
                 "& (t & b0 -> (X b1 <-> !b1)) & (!(t & b0) -> (X b1 <-> b1)))"),
]


def bench_instances(seed: int = 7) -> List[Tuple[str, str]]:
    """The 20 bundled benchmark instances as ``(name, qptl text)``."""
    out = list(TEMPLATES)
    rng = random.Random(seed)
    k = 0
    while len(out) < 20:
        phi = random_qptl(rng)
        if not phi.prefix:
            continue
        out.append((f"random{k:02d}", str(phi)))
        k += 1
    return out


# -- scalability family -------------------------------------------------------------

def scalability_formula(n: int, k: int = 3) -> str:
    """Delayed replay of one of *k* inputs, with two quantifier alternations.

    ``forall i0..ik-1. exists o. forall e.`` and a disjunction of *k* branches,
    branch ``j`` asking ``o`` to replay ``ij`` with an ``n``-step delay unless
    ``e`` holds.  The branches share their delay chains, so the translated
    automaton has ``2n + k + 1`` states.
    """
    def nexts(f):
        return "X " * n + f

    ins = " ".join(f"forall i{j}." for j in range(k))
    branches = " | ".join(f"(G ((i{j} -> {nexts('o')}) & (!i{j} -> {nexts('!o')}) | e))"
                          for j in range(k))
    return f"{ins} exists o. forall e. {branches}"


SCALABILITY_PARAMS = [(6, 3), (7, 3), (8, 3), (9, 3), (10, 3), (6, 4), (7, 4), (8, 4), (9, 4), (10, 4)]


def scalability_instances() -> List[Tuple[str, str]]:
    return [(f"replay{k}_{n:02d}", scalability_formula(n, k)) for n, k in SCALABILITY_PARAMS]
