"""Finite quantaloids: hom lattices, join-preserving composition, units.

A quantaloid here is a finite object set with a complete lattice of
arrows between each ordered pair, an associative composition that
preserves joins in each argument separately, and identity arrows.
One-object quantaloids are quantales.  The standard bases (relations,
powersets of hom-sets, truncated word languages, metric grids) are
provided as builders; user-supplied bases come in as explicit tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

from .errors import (
    BadGrid,
    NotComposable,
    SizeLimit,
    UnknownObject,
)
from .lattice import (
    DEFAULT_ENUM_CAP,
    Lattice,
    PowersetLattice,
    TableLattice,
)

INF = float("inf")


@dataclass(frozen=True)
class QuantaloidElement:
    """An arrow of a quantaloid: a value in hom(source, target)."""

    source: int
    target: int
    value: Any


class Quantaloid:
    """Interface for finite quantaloids with opaque hom elements."""

    def __init__(self, objects: list[str]):
        self.objects = list(objects)
        self._hom_cache: dict[tuple[int, int], Lattice] = {}

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    def object_index(self, name: str) -> int:
        try:
            return self.objects.index(name)
        except ValueError:
            raise UnknownObject(f"no object named {name!r}") from None

    def check_object(self, u: int) -> None:
        if not 0 <= u < len(self.objects):
            raise UnknownObject(f"object index {u} out of range")

    def hom(self, u: int, v: int) -> Lattice:
        self.check_object(u)
        self.check_object(v)
        key = (u, v)
        if key not in self._hom_cache:
            self._hom_cache[key] = self._make_hom(u, v)
        return self._hom_cache[key]

    def _make_hom(self, u: int, v: int) -> Lattice:
        raise NotImplementedError

    def compose(self, u: int, v: int, w: int, f, g):
        """Raw composite of ``f`` in hom(u,v) with ``g`` in hom(v,w)."""
        raise NotImplementedError

    def unit(self, u: int):
        raise NotImplementedError

    def element(self, source: int, target: int, value) -> QuantaloidElement:
        self.hom(source, target).check_element(value)
        return QuantaloidElement(source, target, value)

    def is_locally_distributive(self) -> bool:
        return all(
            self.hom(u, v).is_distributive()
            for u in range(self.n_objects)
            for v in range(self.n_objects)
        )

    def __repr__(self):
        return f"{type(self).__name__}({self.objects})"


class TableQuantaloid(Quantaloid):
    """Quantaloid given by explicit hom lattices and dense tensor tables."""

    def __init__(
        self,
        objects: list[str],
        homs: dict[tuple[int, int], TableLattice],
        tensor_tables: dict[tuple[int, int, int], list[list[int]]],
        units: list[int],
    ):
        super().__init__(objects)
        self._homs = dict(homs)
        self._tables = dict(tensor_tables)
        self._units = list(units)
        self.notes: list[str] = []

    def _make_hom(self, u, v):
        try:
            return self._homs[(u, v)]
        except KeyError:
            raise UnknownObject(f"no hom lattice for pair ({u},{v})") from None

    def compose(self, u, v, w, f, g):
        self.hom(u, v).check_element(f)
        self.hom(v, w).check_element(g)
        return self._tables[(u, v, w)][f][g]

    def unit(self, u):
        self.check_object(u)
        return self._units[u]


class RelQuantaloid(Quantaloid):
    """Sets, with binary relations ordered by inclusion as arrows."""

    def __init__(self, sets: list[list], names: list[str] | None = None):
        super().__init__(names or [f"X{i}" for i in range(len(sets))])
        self.sets = [list(s) for s in sets]

    def _make_hom(self, u, v):
        return PowersetLattice(itertools.product(self.sets[u], self.sets[v]))

    def compose(self, u, v, w, f, g):
        self.hom(u, v).check_element(f)
        self.hom(v, w).check_element(g)
        return frozenset(
            (x, z) for x, y in f for y2, z in g if y == y2
        )

    def unit(self, u):
        return frozenset((x, x) for x in self.sets[u])


class LanguageQuantale(Quantaloid):
    """Sets of words of length at most ``k`` under truncated concatenation.

    One object; elements are frozensets of words (tuples of symbols) and
    composition concatenates pointwise, discarding words longer than
    ``k``.  Both bracketings of a triple give the words of the full
    concatenation that fit, so truncation keeps composition associative.
    The unit is the singleton empty word.
    """

    def __init__(self, alphabet: Iterable[str], k: int, max_words: int = 1 << 20):
        super().__init__(["*"])
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet contains duplicates")
        self.k = int(k)
        if self.k < 0:
            raise ValueError("k must be >= 0")
        n_words = sum(len(self.alphabet) ** i for i in range(self.k + 1))
        if n_words > max_words:
            raise SizeLimit(f"{n_words} words exceed the cap {max_words}")
        self.words = [
            word
            for length in range(self.k + 1)
            for word in itertools.product(self.alphabet, repeat=length)
        ]

    def _make_hom(self, u, v):
        return PowersetLattice(self.words)

    def truncate(self, words: Iterable[tuple]) -> frozenset:
        return frozenset(w for w in words if len(w) <= self.k)

    def compose(self, u, v, w, f, g):
        self.hom(0, 0).check_element(f)
        self.hom(0, 0).check_element(g)
        k = self.k
        return frozenset(a + b for a in f for b in g if len(a) + len(b) <= k)

    def unit(self, u):
        return frozenset({()})

    def path_homs(
        self, n_vertices: int, edges: list[tuple[int, int, frozenset]]
    ) -> list[list[frozenset]]:
        """Hom table of the free enrichment on a labelled graph.

        Dynamic programming on word length: level 0 seeds the empty word
        on the diagonal, every edge extends lower levels by its labels,
        and empty-word labels propagate within a level until stable.
        This equals the generic ascending closure but never concatenates
        two large languages.
        """
        k = self.k
        levels: list[list[list[set]]] = [
            [[set() for _ in range(n_vertices)] for _ in range(n_vertices)]
            for _ in range(k + 1)
        ]
        for a in range(n_vertices):
            levels[0][a][a].add(())
        eps_edges = [(s, t) for s, t, lab in edges if () in lab]
        pos_edges = [
            (s, t, word) for s, t, lab in edges for word in lab if 0 < len(word) <= k
        ]
        for level in range(k + 1):
            cur = levels[level]
            changed = True
            while changed:
                changed = False
                for s, t in eps_edges:
                    for a in range(n_vertices):
                        new = cur[a][s] - cur[a][t]
                        if new:
                            cur[a][t] |= new
                            changed = True
            for s, t, word in pos_edges:
                nxt = level + len(word)
                if nxt > k:
                    continue
                for a in range(n_vertices):
                    for w in cur[a][s]:
                        levels[nxt][a][t].add(w + word)
        return [
            [
                frozenset().union(*(levels[l][a][b] for l in range(k + 1)))
                for b in range(n_vertices)
            ]
            for a in range(n_vertices)
        ]


class MetricQuantale(TableQuantaloid):
    """One object; distances on a finite grid with truncated addition.

    The lattice order is the reversed numeric order, so the join of a
    set of distances is their numeric minimum.  Composition adds and
    rounds up to the next grid point, saturating at infinity.
    """

    def __init__(self, grid):
        grid = list(grid)
        if not grid or grid[0] != 0 or grid[-1] != INF:
            raise BadGrid("grid must start at 0 and end with infinity")
        if any(not grid[i] < grid[i + 1] for i in range(len(grid) - 1)):
            raise BadGrid("grid must be strictly ascending")
        if any(g != INF and g < 0 for g in grid):
            raise BadGrid("grid values must be nonnegative")
        self.grid = grid
        n = len(grid)
        names = ["inf" if g == INF else str(g) for g in grid]
        # reversed numeric order: larger distances sit lower
        lat = TableLattice(
            names, [(i, j) for i in range(n) for j in range(n) if grid[j] <= grid[i]]
        )

        def round_up(x):
            for idx, g in enumerate(grid):
                if g >= x:
                    return idx
            return n - 1

        def add(i, j):
            if grid[i] == INF or grid[j] == INF:
                return n - 1
            return round_up(grid[i] + grid[j])

        table = [[add(i, j) for j in range(n)] for i in range(n)]
        super().__init__(["*"], {(0, 0): lat}, {(0, 0, 0): table}, [0])
        for i, j, l in itertools.product(range(n), repeat=3):
            if table[table[i][j]][l] != table[i][table[j][l]]:
                self.notes.append(
                    "rounding breaks associativity at "
                    f"({names[i]},{names[j]},{names[l]})"
                )
                break


def grid_value(text: str):
    """Parse one metric grid entry; 'inf' means infinity."""
    if text in ("inf", "Infinity", "oo"):
        return INF
    frac = Fraction(text)
    return int(frac) if frac.denominator == 1 else frac


def tensor(q: Quantaloid, f: QuantaloidElement, g: QuantaloidElement) -> QuantaloidElement:
    """Composite arrow ``f`` then ``g`` (diagrammatic order)."""
    if f.target != g.source:
        raise NotComposable(
            f"cannot compose {f.source}->{f.target} with {g.source}->{g.target}"
        )
    value = q.compose(f.source, f.target, g.target, f.value, g.value)
    return QuantaloidElement(f.source, g.target, value)


def residual(
    q: Quantaloid,
    side: str,
    f: QuantaloidElement,
    h: QuantaloidElement,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> QuantaloidElement:
    """Largest ``g`` with ``f . g <= h`` (right) or ``g . f <= h`` (left).

    These exist because composition preserves joins in each argument;
    the defining inequality is asserted on the result.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if side == "right":
        if f.source != h.source:
            raise NotComposable("right residual needs f and h out of one object")
        u, v, w = f.source, f.target, h.target
        hom = q.hom(v, w)
        out_hom = q.hom(u, w)
        if isinstance(hom, PowersetLattice):
            value = frozenset(
                y
                for y in hom.universe
                if out_hom.leq(q.compose(u, v, w, f.value, frozenset({y})), h.value)
            )
        else:
            hom.ensure_enumerable(enum_cap)
            value = hom.join(
                g
                for g in hom.elements()
                if out_hom.leq(q.compose(u, v, w, f.value, g), h.value)
            )
        assert out_hom.leq(q.compose(u, v, w, f.value, value), h.value)
        return QuantaloidElement(v, w, value)
    if f.target != h.target:
        raise NotComposable("left residual needs f and h into one object")
    u, v, w = h.source, f.source, f.target
    hom = q.hom(u, v)
    out_hom = q.hom(u, w)
    if isinstance(hom, PowersetLattice):
        value = frozenset(
            y
            for y in hom.universe
            if out_hom.leq(q.compose(u, v, w, frozenset({y}), f.value), h.value)
        )
    else:
        hom.ensure_enumerable(enum_cap)
        value = hom.join(
            g
            for g in hom.elements()
            if out_hom.leq(q.compose(u, v, w, g, f.value), h.value)
        )
    assert out_hom.leq(q.compose(u, v, w, value, f.value), h.value)
    return QuantaloidElement(u, v, value)


@dataclass
class QuantaloidReport:
    """Outcome of validating a quantaloid."""

    violations: list[str]
    hom_distributive: dict[tuple[int, int], bool]
    notes: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_quantaloid(
    q: Quantaloid, enum_cap: int = DEFAULT_ENUM_CAP
) -> QuantaloidReport:
    """Exhaustively check units, associativity and join preservation.

    Hom lattices too large to enumerate are reported as violations: a
    base that cannot be checked is not certified.
    """
    violations: list[str] = []
    distributive: dict[tuple[int, int], bool] = {}
    notes = list(getattr(q, "notes", []))
    n = q.n_objects
    if n == 0:
        violations.append("quantaloid has no objects")
    pairs = [(u, v) for u in range(n) for v in range(n)]
    for u, v in pairs:
        hom = q.hom(u, v)
        try:
            hom.ensure_enumerable(enum_cap)
        except SizeLimit:
            violations.append(
                f"hom {q.objects[u]},{q.objects[v]} too large to validate"
            )
            continue
        problems = hom.validate()
        for msg in problems:
            violations.append(f"hom {q.objects[u]},{q.objects[v]}: {msg}")
        distributive[(u, v)] = hom.is_distributive() if not problems else False
    if violations:
        return QuantaloidReport(violations, distributive, notes)

    for u in range(n):
        if not q.hom(u, u).has_element(q.unit(u)):
            violations.append(f"unit of {q.objects[u]} is not in its hom")
    if violations:
        return QuantaloidReport(violations, distributive, notes)

    # closure and unit laws
    for u, v in pairs:
        hom = q.hom(u, v)
        for f in hom.elements():
            if not hom.has_element(q.compose(u, u, v, q.unit(u), f)):
                violations.append(f"composite leaves hom {u},{v}")
            if q.compose(u, u, v, q.unit(u), f) != f:
                violations.append(
                    f"left unit law fails at {f!r} in hom {q.objects[u]},{q.objects[v]}"
                )
            if q.compose(u, v, v, f, q.unit(v)) != f:
                violations.append(
                    f"right unit law fails at {f!r} in hom {q.objects[u]},{q.objects[v]}"
                )

    # join preservation in each argument (empty and binary joins suffice
    # for finite lattices)
    for u, v, w in itertools.product(range(n), repeat=3):
        h_uv, h_vw, h_uw = q.hom(u, v), q.hom(v, w), q.hom(u, w)
        bot_vw, bot_uv, bot_uw = h_vw.bottom, h_uv.bottom, h_uw.bottom
        for f in h_uv.elements():
            if q.compose(u, v, w, f, bot_vw) != bot_uw:
                violations.append(f"tensor does not annihilate bottom ({u},{v},{w})")
                break
        for g in h_vw.elements():
            if q.compose(u, v, w, bot_uv, g) != bot_uw:
                violations.append(f"bottom does not annihilate tensor ({u},{v},{w})")
                break
        for f in h_uv.elements():
            for g1, g2 in itertools.combinations_with_replacement(
                h_vw.elements(), 2
            ):
                lhs = q.compose(u, v, w, f, h_vw.join([g1, g2]))
                rhs = h_uw.join(
                    [q.compose(u, v, w, f, g1), q.compose(u, v, w, f, g2)]
                )
                if lhs != rhs:
                    violations.append(
                        f"tensor not join-preserving on the right ({u},{v},{w})"
                    )
                    break
            else:
                continue
            break
        for g in h_vw.elements():
            for f1, f2 in itertools.combinations_with_replacement(
                h_uv.elements(), 2
            ):
                lhs = q.compose(u, v, w, h_uv.join([f1, f2]), g)
                rhs = h_uw.join(
                    [q.compose(u, v, w, f1, g), q.compose(u, v, w, f2, g)]
                )
                if lhs != rhs:
                    violations.append(
                        f"tensor not join-preserving on the left ({u},{v},{w})"
                    )
                    break
            else:
                continue
            break

    # associativity over all composable triples
    for u, v, w, t in itertools.product(range(n), repeat=4):
        for f in q.hom(u, v).elements():
            for g in q.hom(v, w).elements():
                fg = q.compose(u, v, w, f, g)
                for h in q.hom(w, t).elements():
                    if q.compose(u, w, t, fg, h) != q.compose(
                        u, v, t, f, q.compose(v, w, t, g, h)
                    ):
                        violations.append(
                            f"associativity fails at objects ({u},{v},{w},{t})"
                        )
                        break
                else:
                    continue
                break
            else:
                continue
            break

    return QuantaloidReport(violations, distributive, notes)


def build_rel_quantaloid(
    sets: list[list], names: list[str] | None = None, max_pairs: int = 12
) -> RelQuantaloid:
    """Relations between the given finite sets, ordered by inclusion."""
    if not sets:
        raise ValueError("need at least one set")
    for a in sets:
        for b in sets:
            if len(a) * len(b) > max_pairs:
                raise SizeLimit(
                    f"hom powerset would have 2^{len(a) * len(b)} elements"
                )
    return RelQuantaloid(sets, names)


def build_powerset_quantaloid(cat, max_morphisms: int = 12) -> Quantaloid:
    """Powersets of the hom-sets of a finite category, composed pointwise."""
    from .cts import PowersetCatQuantaloid  # deferred: cts builds on this module

    for c in range(len(cat.objects)):
        for d in range(len(cat.objects)):
            if len(cat.hom_morphisms(c, d)) > max_morphisms:
                raise SizeLimit("hom powerset too large")
    return PowersetCatQuantaloid(cat)


def build_language_quantale(
    alphabet: Iterable[str], k: int, max_words: int = 1 << 20
) -> LanguageQuantale:
    """Truncated word languages over ``alphabet`` with cutoff ``k``."""
    return LanguageQuantale(alphabet, k, max_words)


def build_metric_quantale(grid) -> MetricQuantale:
    """Distances on an ascending grid from 0 to infinity."""
    return MetricQuantale(grid)


def build_unit_quantaloid() -> TableQuantaloid:
    """One object, one arrow: the unit for pasting enrichments."""
    lat = TableLattice(["*"], [(0, 0)])
    return TableQuantaloid(["*"], {(0, 0): lat}, {(0, 0, 0): [[0]]}, [0])


def build_boolean_quantale() -> TableQuantaloid:
    """Truth values: one object, elements 0 <= 1, meet as composition."""
    lat = TableLattice.boolean()
    table = [[0, 0], [0, 1]]
    return TableQuantaloid(["*"], {(0, 0): lat}, {(0, 0, 0): table}, [1])
