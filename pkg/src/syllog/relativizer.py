"""Relativization of an interpretation to a finite sub-universe.

``relativize`` restricts a model to a subset ``D*`` of its domain:
individuals falling outside are sent to a designated ``d*``, sets are
intersected with ``D*``, and collections are cut down to subsets of
``D*`` and then corrected so that the image of each set variable in
``V1'`` belongs to the image of a collection exactly when the original
set did.  ``build_d_star`` picks a ``D*`` small enough for the
small-model bound and large enough for the relativized model to still
satisfy a given normalized conjunction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .formulas import render, substitute
from .normalizer import NormalizedConjunction
from .semantics import Interpretation, _ev, evaluate

__all__ = [
    "DomainWitnessSet", "RelConfig", "distinguish", "build_d_star",
    "relativize", "bound", "bound_terms", "PreconditionError",
]


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Provenance:
    kind: str  # individual-image | delta1-separator | phi-counterexample | seed
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"kind": self.kind, **self.detail}


@dataclass
class DomainWitnessSet:
    elements: list
    provenance: dict  # element -> list of Provenance

    def to_json(self) -> dict:
        return {"elements": list(self.elements),
                "provenance": {str(u): [p.to_json() for p in self.provenance[u]]
                               for u in self.elements}}


@dataclass(frozen=True)
class RelConfig:
    v1_prime: frozenset
    d_star: int | None = None  # None: least element of D*


def distinguish(M: Interpretation, w1) -> list:
    """Elements separating every pair of set variables with different
    values; at most ``len(w1) - 1`` of them.

    Keeps the partition of ``w1`` induced by the elements chosen so far;
    while some block holds two different sets, the least element of their
    symmetric difference splits it.
    """
    w1 = sorted(set(w1))
    chosen: list = []
    while True:
        blocks: dict = {}
        for X in w1:
            key = tuple(M.m1[X] >> u & 1 for u in chosen)
            blocks.setdefault(key, []).append(X)
        split = None
        for key in sorted(blocks):
            members = blocks[key]
            base = M.m1[members[0]]
            for Y in members[1:]:
                if M.m1[Y] != base:
                    split = base ^ M.m1[Y]
                    break
            if split is not None:
                break
        if split is None:
            return sorted(chosen)
        chosen.append((split & -split).bit_length() - 1)


def _first_falsifier(M: Interpretation, zs, body, e1_extra):
    n = M.domain_size
    e0 = dict(M.m0)
    e1 = dict(M.m1)
    e1.update(e1_extra)
    for tup in itertools.product(range(n), repeat=len(zs)):
        for z, u in zip(zs, tup):
            e0[z] = u
        if not _ev(body, n, e0, e1, M.m2):
            return tup
    return None


def build_d_star(M: Interpretation, psi: NormalizedConjunction, check: bool = True) -> DomainWitnessSet:
    """Construct D* for a model M of psi, recording why each element is there."""
    if check and not evaluate(M, psi.formula()):
        raise PreconditionError("the interpretation does not satisfy the conjunction")
    inv = psi.inventory
    prov: dict = {}

    def add(u, p):
        prov.setdefault(u, [])
        if p not in prov[u]:
            prov[u].append(p)

    for x in sorted(inv.free0):
        add(M.m0[x], Provenance("individual-image", {"variable": x.name}))
    for u in distinguish(M, inv.free1):
        add(u, Provenance("delta1-separator"))
    w1 = sorted(inv.free1)
    for entry in psi.phi_set:
        atom, args = entry.atom, entry.args
        for tup in itertools.product(w1, repeat=len(args)):
            extra = {Z: M.m1[X] for Z, X in zip(args, tup)}
            bad = _first_falsifier(M, atom.bound, atom.body, extra)
            if bad is None:
                continue
            inst = render(substitute(atom, dict(zip(args, tup))))
            for pos, u in enumerate(bad):
                add(u, Provenance("phi-counterexample",
                                  {"phi": render(atom), "tuple": [X.name for X in tup],
                                   "instance": inst, "position": pos}))
    if not prov:
        add(0, Provenance("seed"))
    return DomainWitnessSet(sorted(prov), prov)


def relativize(M: Interpretation, d_star_set, cfg: RelConfig):
    """Relativized interpretation over D*, re-indexed to 0..|D*|-1.

    Returns ``(interpretation, index_map)`` where ``index_map[u]`` is the
    new index of the source element ``u``.
    """
    ds = sorted(set(d_star_set))
    if not ds or any(not (0 <= u < M.domain_size) for u in ds):
        raise PreconditionError("D* must be a nonempty subset of the domain")
    d = ds[0] if cfg.d_star is None else cfg.d_star
    if d not in ds:
        raise PreconditionError("d* must belong to D*")
    index = {u: i for i, u in enumerate(ds)}
    dmask = 0
    for u in ds:
        dmask |= 1 << u

    def squeeze(mask):
        out = 0
        for u, i in index.items():
            if mask >> u & 1:
                out |= 1 << i
        return out

    m0 = {x: index[u] if u in index else index[d] for x, u in M.m0.items()}
    m1 = {X: squeeze(s & dmask) for X, s in M.m1.items()}
    v1 = [X for X in cfg.v1_prime if X in M.m1]
    images = {squeeze(M.m1[X] & dmask) for X in v1}
    m2 = {}
    for A, coll in M.m2.items():
        kept = {squeeze(s) for s in coll if s & ~dmask == 0} - images
        kept |= {squeeze(M.m1[X] & dmask) for X in v1 if M.m1[X] in coll}
        m2[A] = frozenset(kept)
    return Interpretation(len(ds), m0, m1, m2), index


def bound_terms(psi: NormalizedConjunction) -> dict:
    inv = psi.inventory
    w0, w1, phi = len(inv.free0), len(inv.free1), len(psi.phi_set)
    max_m, max_n = psi.max_m, psi.max_n
    witness = (w1 ** max_m) * max_n * phi if phi else 0
    value = max(1, w0 + max(w1 - 1, 0) + witness)
    return {"w0": w0, "w1": w1, "phi": phi, "max_m": max_m, "max_n": max_n, "bound": value}


def bound(psi: NormalizedConjunction) -> int:
    """Small-model bound: |W0| + |W1| - 1 + |W1|^maxm * maxn * |Phi|, at least 1."""
    return bound_terms(psi)["bound"]
