import random

from alquant import ltl
from alquant.cli import bundled
from alquant.generators import (SCALABILITY_PARAMS, bench_instances, random_corpus, random_qptl,
                                random_safety_formula, scalability_formula, scalability_instances)
from alquant.parser import parse_qptl
from alquant.translate import translate_qptl, translate_to_asa


def test_random_formulas_are_safety_and_bounded():
    rng = random.Random(0)
    for _ in range(200):
        f = random_safety_formula(rng, depth=4, size=rng.randint(1, 12))
        assert ltl.is_safety_nnf(f)
        assert ltl.temporal_depth(f) <= 4


def test_corpus_respects_limits():
    corpus = random_corpus(50, seed=2024)
    assert len(set(corpus)) == 50
    for f in corpus:
        assert 2 <= len(ltl.variables(f)) <= 3
        assert ltl.temporal_depth(f) <= 4
        assert len(translate_to_asa(f).states) <= 12
    assert corpus == random_corpus(50, seed=2024)


def test_random_qptl_is_prenex():
    rng = random.Random(1)
    for _ in range(50):
        phi = random_qptl(rng)
        assert parse_qptl(str(phi)) == phi or parse_qptl(str(phi)).prefix == phi.prefix


def test_scalability_shape():
    for (n, k), (name, text) in zip(SCALABILITY_PARAMS, scalability_instances()):
        phi = parse_qptl(text)
        quants = [q for q, _ in phi.prefix]
        alternations = sum(1 for x, y in zip(quants, quants[1:]) if x != y)
        assert alternations == 2
        assert len(translate_qptl(phi).states) == 2 * n + k + 1 >= 15
        assert name == f"replay{k}_{n:02d}"
    assert "X X X o" in scalability_formula(3, 1)


def test_bundled_files_match_generators():
    for directory, instances in (("bench", bench_instances()), ("scalability", scalability_instances())):
        for name, text in instances:
            assert (bundled(directory) / f"{name}.qptl").read_text().strip() == text
    assert len(bench_instances()) == 20
