"""Simulation and bisimulation of enrichments.

A relation between two enrichments over one base relates only objects
of equal extent.  It is a simulation when every hom out of a related
source object is dominated by the join of the homs out of its partners;
a bisimulation when the inverse is a simulation as well.  The largest
such relations are greatest fixed points of a refinement operator and
equal the union of all relations passing the direct check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    EndpointMismatch,
    ExtentMismatch,
    InternalAssertion,
    NotABisimulation,
    NotBisimilar,
    NotLocallyDistributive,
    UnknownObject,
)
from .vcat import VCategory, VFunctor, pullback, require_same_base, validate_vfunctor


class SimRelation:
    """A set of extent-matching object pairs between two enrichments."""

    def __init__(self, left: VCategory, right: VCategory, pairs: Iterable[tuple[int, int]]):
        require_same_base(left, right)
        self.left = left
        self.right = right
        self.pairs = frozenset(pairs)
        for a, b in self.pairs:
            if not (0 <= a < left.n_objects and 0 <= b < right.n_objects):
                raise UnknownObject(f"pair ({a},{b}) out of range")
            if left.extents[a] != right.extents[b]:
                raise ExtentMismatch(
                    f"pair ({left.objects[a]},{right.objects[b]}) mixes extents"
                )
        self.refinement_trace: list[tuple[int, str, str]] = []

    @classmethod
    def from_names(cls, left: VCategory, right: VCategory, named_pairs) -> "SimRelation":
        return cls(
            left,
            right,
            [
                (left.object_index(a), right.object_index(b))
                for a, b in named_pairs
            ],
        )

    @classmethod
    def diagonal(cls, a: VCategory) -> "SimRelation":
        return cls(a, a, [(i, i) for i in range(a.n_objects)])

    @classmethod
    def full(cls, left: VCategory, right: VCategory) -> "SimRelation":
        """All extent-matching pairs: the starting point of refinement."""
        return cls(
            left,
            right,
            [
                (a, b)
                for a in range(left.n_objects)
                for b in range(right.n_objects)
                if left.extents[a] == right.extents[b]
            ],
        )

    def inverse(self) -> "SimRelation":
        return SimRelation(self.right, self.left, [(b, a) for a, b in self.pairs])

    def compose(self, other: "SimRelation") -> "SimRelation":
        if self.right is not other.left:
            raise EndpointMismatch("inner endpoints do not match")
        return SimRelation(
            self.left,
            other.right,
            {(a, c) for a, b in self.pairs for b2, c in other.pairs if b == b2},
        )

    def union(self, other: "SimRelation") -> "SimRelation":
        if self.left is not other.left or self.right is not other.right:
            raise EndpointMismatch("union needs identical endpoints")
        return SimRelation(self.left, self.right, self.pairs | other.pairs)

    def total_on_left(self) -> bool:
        return {a for a, _ in self.pairs} == set(range(self.left.n_objects))

    def total_on_right(self) -> bool:
        return {b for _, b in self.pairs} == set(range(self.right.n_objects))

    def pairs_named(self) -> list[tuple[str, str]]:
        return sorted(
            (self.left.objects[a], self.right.objects[b]) for a, b in self.pairs
        )

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return (
            isinstance(other, SimRelation)
            and self.left is other.left
            and self.right is other.right
            and self.pairs == other.pairs
        )

    def __hash__(self):
        return hash((id(self.left), id(self.right), self.pairs))

    def __repr__(self):
        return f"SimRelation({sorted(self.pairs)})"


@dataclass
class SimulationCheck:
    """Verdict with the first violating triple, if any."""

    ok: bool
    counterexample: Optional[tuple[str, str, str]] = None
    direction: str = "forward"

    def __bool__(self):
        return self.ok


def _partner_joins(left: VCategory, right: VCategory, pairs) -> dict:
    """For each left object a', the right partners of a' under the relation."""
    partners: dict[int, list[int]] = {}
    for a, b in pairs:
        partners.setdefault(a, []).append(b)
    return partners


def _sim_holds_at(left, right, partners, a, b, cache) -> Optional[int]:
    """First left object a' violating the condition at (a,b), else None."""
    for ap in range(left.n_objects):
        lat = left.hom_lattice(a, ap)
        key = (ap, b)
        if key not in cache:
            cache[key] = lat.join(
                right.hom(b, bp) for bp in partners.get(ap, ())
            )
        if not lat.leq(left.hom(a, ap), cache[key]):
            return ap
    return None


def is_simulation(r: SimRelation) -> SimulationCheck:
    """Direct check of the simulation condition at every pair."""
    partners = _partner_joins(r.left, r.right, r.pairs)
    cache: dict = {}
    for a, b in sorted(r.pairs):
        ap = _sim_holds_at(r.left, r.right, partners, a, b, cache)
        if ap is not None:
            return SimulationCheck(
                False,
                (r.left.objects[a], r.right.objects[b], r.left.objects[ap]),
            )
    return SimulationCheck(True)


def is_bisimulation(r: SimRelation) -> SimulationCheck:
    fwd = is_simulation(r)
    if not fwd:
        return fwd
    bwd = is_simulation(r.inverse())
    if not bwd:
        return SimulationCheck(False, bwd.counterexample, "backward")
    return SimulationCheck(True)


def _refine(left: VCategory, right: VCategory, bisim: bool) -> SimRelation:
    """Greatest fixed point of the refinement operator from the full
    extent-matching relation.  Relations passing the direct check are
    exactly the post-fixed points, so the result is their union."""
    pairs = set(SimRelation.full(left, right).pairs)
    trace: list[tuple[int, str, str]] = []
    round_no = 0
    while True:
        round_no += 1
        partners = _partner_joins(left, right, pairs)
        co_partners = _partner_joins(right, left, {(b, a) for a, b in pairs})
        cache: dict = {}
        co_cache: dict = {}
        removed = []
        for a, b in pairs:
            bad = _sim_holds_at(left, right, partners, a, b, cache) is not None
            if not bad and bisim:
                bad = (
                    _sim_holds_at(right, left, co_partners, b, a, co_cache)
                    is not None
                )
            if bad:
                removed.append((a, b))
        if not removed:
            break
        for a, b in removed:
            pairs.discard((a, b))
            trace.append((round_no, left.objects[a], right.objects[b]))
    out = SimRelation(left, right, pairs)
    out.refinement_trace = sorted(trace)
    return out


def largest_simulation(left: VCategory, right: VCategory) -> SimRelation:
    return _refine(left, right, bisim=False)


def largest_bisimulation(left: VCategory, right: VCategory) -> SimRelation:
    return _refine(left, right, bisim=True)


def simulates(left: VCategory, right: VCategory) -> bool:
    """Whether the right enrichment simulates the left one (total on left)."""
    return largest_simulation(left, right).total_on_left()


def bisimilar(left: VCategory, right: VCategory) -> bool:
    r = largest_bisimulation(left, right)
    return r.total_on_left() and r.total_on_right()


def is_functional_bisimulation(f: VFunctor) -> bool:
    """A functor whose target homs equal the fiberwise joins of source homs."""
    if validate_vfunctor(f):
        return False
    a, b = f.source, f.target
    preimages: dict[int, list[int]] = {}
    for x, y in enumerate(f.mapping):
        preimages.setdefault(y, []).append(x)
    for x in range(a.n_objects):
        for yp in range(b.n_objects):
            lat = b.hom_lattice(f(x), yp)
            joined = lat.join(a.hom(x, xp) for xp in preimages.get(yp, ()))
            if b.hom(f(x), yp) != joined:
                return False
    return True


def is_od(f: VFunctor) -> bool:
    """Functional bisimulations that are surjective on objects."""
    return f.is_surjective() and is_functional_bisimulation(f)


class BisimEquivalence:
    """A partition of an enrichment's objects that is a bisimulation."""

    def __init__(self, carrier: VCategory, blocks: list[list[int]]):
        self.carrier = carrier
        seen = sorted(i for block in blocks for i in block)
        if seen != list(range(carrier.n_objects)):
            raise ValueError("blocks do not partition the objects")
        self.blocks = sorted([sorted(b) for b in blocks], key=lambda b: b[0])
        self.block_of = [0] * carrier.n_objects
        for bi, block in enumerate(self.blocks):
            for i in block:
                self.block_of[i] = bi
        rel = self.as_relation()
        check = is_bisimulation(rel)
        if not check:
            raise NotABisimulation(
                f"partition is not a bisimulation: {check.counterexample}"
            )

    def as_relation(self) -> SimRelation:
        return SimRelation(
            self.carrier,
            self.carrier,
            [
                (i, j)
                for block in self.blocks
                for i in block
                for j in block
            ],
        )

    def __repr__(self):
        return f"BisimEquivalence({self.blocks})"


def _closure_blocks(n: int, pairs: Iterable[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def equivalence_closure(r: SimRelation) -> BisimEquivalence:
    """Reflexive-symmetric-transitive closure of a bisimulation on one
    enrichment, returned as a partition.  The closure is itself a
    bisimulation (it is a union of composites of bisimulations); this is
    re-verified when the partition is built."""
    if r.left is not r.right:
        raise EndpointMismatch("closure needs a relation on a single enrichment")
    check = is_bisimulation(r)
    if not check:
        raise NotABisimulation(f"input relation fails at {check.counterexample}")
    return BisimEquivalence(r.left, _closure_blocks(r.left.n_objects, r.pairs))


def quotient(a: VCategory, e: BisimEquivalence) -> tuple[VCategory, VFunctor]:
    """Collapse a bisimulation equivalence into a new enrichment.

    The hom from one block to another is the join of the carrier's homs
    from the block's least representative into the whole target block;
    the join is independent of the representative, which is asserted
    over all of them.
    """
    if e.carrier is not a:
        raise NotABisimulation("the equivalence does not live on this enrichment")
    base = a.base
    names = [f"[{a.objects[block[0]]}]" for block in e.blocks]
    extents = []
    for block in e.blocks:
        exts = {a.extents[i] for i in block}
        if len(exts) != 1:
            raise InternalAssertion("equivalence class mixes extents")
        extents.append(exts.pop())
    homs = []
    for bi, block_i in enumerate(e.blocks):
        row = []
        for bj, block_j in enumerate(e.blocks):
            lat = base.hom(extents[bi], extents[bj])
            rep = block_i[0]
            value = lat.join(a.hom(rep, bp) for bp in block_j)
            for other in block_i[1:]:
                alt = lat.join(a.hom(other, bp) for bp in block_j)
                if alt != value:
                    raise InternalAssertion(
                        "quotient hom depends on the representative at "
                        f"({names[bi]},{names[bj]})"
                    )
            row.append(value)
        homs.append(row)
    quo = VCategory(base, names, extents, homs)
    q = VFunctor(a, quo, [e.block_of[i] for i in range(a.n_objects)])
    return quo, q


def cospan_witness(
    a: VCategory, b: VCategory, r: SimRelation
) -> tuple[VFunctor, VFunctor]:
    """Two surjective functional bisimulations into a common quotient.

    The linking relation generates matching equivalences on both sides;
    both quotients are built, their matched class homs are checked equal,
    and the second leg lands in the first quotient through that matching.
    """
    if r.left is not a or r.right is not b:
        raise EndpointMismatch("the relation does not link these enrichments")
    check = is_bisimulation(r)
    if not check:
        raise NotABisimulation(f"relation fails at {check.counterexample}")
    if not (r.total_on_left() and r.total_on_right()):
        raise NotBisimilar("the relation is not total on both sides")

    na, nb = a.n_objects, b.n_objects
    blocks_ab = _closure_blocks(na + nb, [(x, na + y) for x, y in r.pairs])
    blocks_a = [sorted(i for i in blk if i < na) for blk in blocks_ab]
    blocks_b = [sorted(i - na for i in blk if i >= na) for blk in blocks_ab]
    if any(not ba or not bb for ba, bb in zip(blocks_a, blocks_b)):
        raise InternalAssertion("a linked class misses one side")

    ea = BisimEquivalence(a, blocks_a)
    eb = BisimEquivalence(b, blocks_b)
    qa_cat, qa = quotient(a, ea)
    qb_cat, qb = quotient(b, eb)

    # blocks of ea/eb are sorted by least member; recover the matching
    a_block_to_class = {min(ba): ci for ci, ba in enumerate(blocks_a)}
    class_to_qb = {}
    for ci, bb in enumerate(blocks_b):
        class_to_qb[ci] = eb.block_of[bb[0]]
    match = {}  # qa block index -> qb block index
    for qa_idx, block in enumerate(ea.blocks):
        ci = a_block_to_class[block[0]]
        match[qa_idx] = class_to_qb[ci]
    for qa_idx, qb_idx in match.items():
        for qa_jdx, qb_jdx in match.items():
            if qa_cat.hom(qa_idx, qa_jdx) != qb_cat.hom(qb_idx, qb_jdx):
                raise InternalAssertion(
                    "matched quotient classes disagree on homs"
                )
            if qa_cat.extents[qa_idx] != qb_cat.extents[qb_idx]:
                raise InternalAssertion("matched quotient classes mix extents")

    inverse_match = {v: k for k, v in match.items()}
    leg_b = VFunctor(b, qa_cat, [inverse_match[qb(i)] for i in range(nb)])
    return qa, leg_b


def span_witness(a: VCategory, b: VCategory) -> tuple[VFunctor, VFunctor]:
    """Projections of the pullback of the cospan witnesses.

    Needs every hom lattice of the base distributive: that is what makes
    pulling back preserve surjective functional bisimulations.
    """
    if not a.base.is_locally_distributive():
        raise NotLocallyDistributive("the base has a non-distributive hom")
    require_same_base(a, b)
    r = largest_bisimulation(a, b)
    if not (r.total_on_left() and r.total_on_right()):
        raise NotBisimilar("the enrichments are not bisimilar")
    f, g = cospan_witness(a, b, r)
    _, to_a, to_b = pullback(f, g)
    return to_a, to_b


def compose_relations(r: SimRelation, s: SimRelation) -> SimRelation:
    return r.compose(s)


def inverse_relation(r: SimRelation) -> SimRelation:
    return r.inverse()


def union_relations(r: SimRelation, s: SimRelation) -> SimRelation:
    return r.union(s)
