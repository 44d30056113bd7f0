"""Independent brute-force satisfiability check for small domains.

Shares nothing with the decider beyond the satisfaction relation: no
normalization, no bound, no symmetry breaking.  Individuals and sets are
enumerated outright; collections are built membership bit by membership
bit with three-valued pruning.
"""

from __future__ import annotations

import itertools

from .formulas import Formula, free_vars
from .semantics import Interpretation, _ev3, evaluate

__all__ = ["brute_force_sat", "models"]


def models(f: Formula, n: int, first_only: bool = True):
    """Yield interpretations over {0..n-1} (restricted to the free
    variables of f) that satisfy f."""
    fv = free_vars(f)
    xs = sorted(v for v in fv if v.sort == 0)
    Xs = sorted(v for v in fv if v.sort == 1)
    As = sorted(v for v in fv if v.sort == 2)
    full = (1 << n) - 1
    nsub = 1 << n
    for vals0 in itertools.product(range(n), repeat=len(xs)):
        e0 = dict(zip(xs, vals0))
        for vals1 in itertools.product(range(nsub), repeat=len(Xs)):
            e1 = {X: (full, m) for X, m in zip(Xs, vals1)}
            e2 = {A: (set(), set()) for A in As}
            if _ev3(f, n, e0, e1, e2) is False:
                continue
            slots = [(A, U) for A in As for U in range(nsub)]
            for m2 in _collections(f, n, e0, e1, e2, slots, 0):
                M = Interpretation(n, dict(e0), {X: m for X, (_, m) in e1.items()}, m2)
                assert evaluate(M, f)
                yield M
                if first_only:
                    return


def _collections(f, n, e0, e1, e2, slots, i):
    r = _ev3(f, n, e0, e1, e2)
    if r is False:
        return
    if i == len(slots) or r is True:
        # remaining undecided slots may be anything; leave them out
        yield {A: frozenset(ins) for A, (ins, _) in e2.items()}
        if r is True or i == len(slots):
            return
    A, U = slots[i]
    ins, outs = e2[A]
    for put_in in (False, True):
        (ins if put_in else outs).add(U)
        yield from _collections(f, n, e0, e1, e2, slots, i + 1)
        (ins if put_in else outs).discard(U)


def brute_force_sat(f: Formula, max_n: int = 3):
    """``(True, model)`` if some interpretation with domain size at most
    ``max_n`` satisfies f, else ``(False, None)``."""
    for n in range(1, max_n + 1):
        for M in models(f, n):
            return True, M
    return False, None
