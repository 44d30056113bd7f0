"""The ten acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line; the lines are repeated together in
the terminal summary.
"""

import itertools
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from encoding_corpus import requests, sweep
from syllog.decider import decide_sat, decide_sat_h
from syllog.encodings import encode, holds
from syllog.formulas import conjoin, conjuncts, parse, size
from syllog.generators import random_h_formula
from syllog.hfragment import flat_bound, flatten_h, recognize_h
from syllog.normalizer import make_conjunction
from syllog.relativizer import bound
from syllog.restriction import SCHEMA, is_3lqsr
from syllog.s5 import (
    AXIOMS, UNSATISFIABLE, MNot, decide_s5, enumerate_modal, random_modal, s5_oracle, translate_s5,
)
from syllog.selftest import (
    suite_bound, suite_decider_oracle, suite_distinguish, suite_flat_atoms, suite_rebind_individuals,
    suite_rebind_sets, suite_normalizer, suite_relativization,
)

SEED = 0
S5_SEED = 0
H_SEED = 0


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _s5_corpus():
    rng = random.Random(S5_SEED)
    return {
        "enumerated": list(enumerate_modal(("p", "q"), 3)),
        "axioms": list(AXIOMS.values()),
        "random": [random_modal(rng, depth=4) for _ in range(200)],
    }


def test_criterion_1_relativization():
    t = time.perf_counter()
    r = suite_relativization(seed=SEED, count=1000)
    dt = time.perf_counter() - t
    report(1, r.cases >= 1000 and r.failures == 0 and dt < 120,
           f"{r.cases} pairs, {r.failures} failures, {dt:.1f}s (limit 120s)")


def test_criterion_2_bound():
    r = suite_bound(seed=SEED, count=1000)
    psi = make_conjunction(conjuncts(parse(
        "x in X & X in A & (forall Z)(Z in A -> (forall z)(z in Z -> z in Y))")))
    worked = bound(psi)
    report(2, r.cases >= 1000 and r.failures == 0 and worked == 4,
           f"{r.cases} cases, {r.failures} over the bound, max |D*|/bound {r.extra['max_ratio']}, "
           f"worked instance {worked} (want 4)")


@pytest.mark.parametrize("suite", [suite_flat_atoms, suite_rebind_individuals, suite_rebind_sets],
                         ids=["flat_atoms", "rebind_individuals", "rebind_sets"])
def test_criterion_3_invariance_suites(suite):
    t = time.perf_counter()
    r = suite(seed=SEED, count=1000)
    dt = time.perf_counter() - t
    report(3, r.cases >= 1000 and r.failures == 0 and dt < 60,
           f"{r.name}: {r.cases} instances, {r.failures} violations, {dt:.1f}s (limit 60s)")


def test_criterion_4_decider_oracle():
    t = time.perf_counter()
    r = suite_decider_oracle(seed=SEED, count=500, max_bound=3)
    dt = time.perf_counter() - t
    report(4, r.cases >= 500 and r.failures == 0 and dt < 300,
           f"{r.cases} formulas, {r.failures} disagreements, verdicts {r.extra['verdicts']}, "
           f"{dt:.1f}s (limit 300s)")


def test_criterion_5_distinguish():
    r = suite_distinguish(seed=SEED, count=1000)
    report(5, r.cases >= 1000 and r.failures == 0,
           f"{r.cases} cases, {r.failures} unseparated pairs or oversize outputs")


def test_criterion_6_restriction_certification():
    reqs = requests()
    outside = [r.kind for r in reqs if not is_3lqsr(encode(r)).member]
    schema_kinds = [r for r in reqs if r.kind in ("powerset", "3lssp-powerset", "pow-le-h")]
    uncertified = [r.kind for r in schema_kinds
                   if not all(e.verdict == SCHEMA for e in is_3lqsr(encode(r)).entries)]
    report(6, not outside and not uncertified,
           f"{len(reqs)} encodings, {len(outside)} outside the fragment, "
           f"{len(schema_kinds) - len(uncertified)}/{len(schema_kinds)} powerset-style certified by schema")


@pytest.mark.slow
def test_criterion_7_encoding_fidelity():
    t = time.perf_counter()
    total = bad = 0
    worst = []
    for r in requests():
        cases, b = sweep(encode(r), lambda M, r=r: holds(r, M), max_n=3)
        total += cases
        bad += b
        if b:
            worst.append(r.kind)
    dt = time.perf_counter() - t
    report(7, bad == 0 and dt < 300,
           f"{len(requests())} encodings, {total} interpretations, {bad} disagreements "
           f"{worst[:3]}, {dt:.1f}s (limit 300s)")


def test_criterion_8_s5():
    t = time.perf_counter()
    corpus = _s5_corpus()
    counts = {}
    bad = unknown = 0
    for name, fs in corpus.items():
        counts[name] = len(fs)
        for f in fs:
            status, _ = decide_s5(f)
            if status == "unknown":
                unknown += 1
            elif status != s5_oracle(f)[0]:
                bad += 1
    # each axiom instance is valid: its negation has no model
    axioms_valid = all(decide_s5(MNot(f))[0] == UNSATISFIABLE for f in corpus["axioms"])
    dt = time.perf_counter() - t
    report(8, bad == 0 and unknown == 0 and axioms_valid and dt < 600,
           f"{counts}, {bad} disagreements, {unknown} unknown, axioms valid: {axioms_valid}, "
           f"{dt:.1f}s (limit 600s)")



def _deletion_mutants(f):
    """Drop one top-level clause at a time: xi_U, xi_pi, psi_1, then the
    chi block (chi_1 together with the translation)."""
    cs = conjuncts(f)
    clauses = [cs[0], cs[1], cs[2], conjoin(cs[3:])]
    return [conjoin(clauses[:i] + clauses[i + 1:]) for i in range(len(clauses))]


def _flatten_ratio(f, h, limit=32):
    n = size(f)
    return max(hs.size() for hs in itertools.islice(flatten_h(f, h), limit)) / n


def test_criterion_9_bounded_prefix():
    t = time.perf_counter()
    corpus = _s5_corpus()
    bundles = {name: [translate_s5(phi).formula() for phi in fs] for name, fs in corpus.items()}
    all_bundles = [f for fs in bundles.values() for f in fs]
    rejected = sum(not recognize_h(f, 3).shape_ok for f in all_bundles)
    mutants = [m for f in all_bundles for m in _deletion_mutants(f)]
    accepted_mutants = sum(recognize_h(m, 3).shape_ok for m in mutants)

    # flattening ratio, reported per corpus group; stable means the groups agree within 1.5x
    c = {name: round(max(_flatten_ratio(f, 3) for f in fs), 3) for name, fs in bundles.items()}
    rng = random.Random(H_SEED)
    h_corpus = [(random_h_formula(rng, h=h), h) for h in (2, 3) for _ in range(100)]
    c["random-h"] = round(max(_flatten_ratio(f, h) for f, h in h_corpus), 3)
    stable = max(c.values()) <= 1.5 * min(c.values())

    # both deciders on every bundle, and on random formulas whose branch bound is at most 12
    compared = disagree = 0
    for f in all_bundles:
        compared += 1
        disagree += decide_sat_h(f, 3).status != decide_sat(f, method="ground").status
    small = [(f, h) for f, h in h_corpus if flat_bound(f)["bound"] <= 12]
    for f, h in small:
        compared += 1
        disagree += decide_sat_h(f, h).status != decide_sat(f, method="ground").status
    dt = time.perf_counter() - t
    report(9, rejected == 0 and accepted_mutants == 0 and stable and disagree == 0,
           f"{len(all_bundles)} bundles, {rejected} rejected; {len(mutants)} deletion mutants, "
           f"{accepted_mutants} accepted; flattening c={max(c.values())} per group {c}; "
           f"{compared} decided both ways ({len(small)} random), {disagree} disagreements, {dt:.1f}s")


def test_criterion_10_normalizer():
    r = suite_normalizer(seed=SEED, count=500, max_n=3)
    report(10, r.cases >= 500 and r.failures == 0,
           f"{r.cases} formulas, {r.failures} bounded-satisfiability mismatches, {r.seconds:.1f}s")
