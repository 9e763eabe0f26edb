"""
Finite simplicial complexes: canonical storage, the read-only view protocol,
and the set-level operations (induced subcomplex, link, cone, join, removal).
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Protocol,
    Sequence,
    Set,
    Tuple,
    Union,
    runtime_checkable,
)

import numpy as np

from .errors import ComplexInputError

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

FORMAT_VERSION = 1

# induced() on at most this many vertices grows X_U by membership queries
SMALL_INDUCED = 12


def make_simplex(vertices: Iterable[int]) -> Simplex:
    """Canonical simplex: nonempty, strictly increasing integer ids."""
    try:
        items = [int(v) for v in vertices]
    except (TypeError, ValueError) as e:
        raise ComplexInputError(f"simplex vertices must be integers: {e}") from e
    if not items:
        raise ComplexInputError("a simplex is a nonempty vertex set")
    simplex = tuple(sorted(items))
    if len(set(simplex)) != len(simplex):
        raise ComplexInputError(f"repeated vertex in simplex {list(items)}")
    return simplex


def dim(simplex: Simplex) -> int:
    return len(simplex) - 1


def boundary(simplex: Simplex) -> Iterator[Simplex]:
    """Codimension-one faces (nothing for a vertex)."""
    if len(simplex) > 1:
        yield from combinations(simplex, len(simplex) - 1)


def faces(simplex: Simplex, proper: bool = False) -> Iterator[Simplex]:
    """All nonempty faces, smallest first."""
    top = len(simplex) - 1 if proper else len(simplex)
    for k in range(1, top + 1):
        yield from combinations(simplex, k)


@runtime_checkable
class ComplexView(Protocol):
    """Read-only membership interface shared by stored complexes and oracles."""

    @property
    def vertex_count(self) -> int: ...

    @property
    def dim_cap(self) -> int: ...

    def vertices(self) -> Iterable[int]: ...

    def has_vertex(self, v: int) -> bool: ...

    def contains(self, simplex: Simplex) -> bool: ...

    def sample_vertex(self, rng: np.random.Generator) -> int: ...


@dataclass(frozen=True)
class ExplicitComplex:
    """Stored downward-closed complex, truncated at ``dim_cap``.

    ``simplices[d]`` holds the d-dimensional simplices; the tuple always has
    ``dim_cap + 1`` entries.
    """

    vertex_set: FrozenSet[int]
    simplices: Tuple[FrozenSet[Simplex], ...]
    dim_cap: int

    @classmethod
    def build(
        cls, vertex_set: Iterable[int], simplices: Iterable[Simplex], dim_cap: int
    ) -> "ExplicitComplex":
        """Assemble from an already downward-closed simplex collection."""
        if dim_cap < 0:
            raise ComplexInputError("dim_cap must be non-negative")
        buckets: List[Set[Simplex]] = [set() for _ in range(dim_cap + 1)]
        verts = frozenset(int(v) for v in vertex_set)
        for v in verts:
            buckets[0].add((v,))
        for simplex in simplices:
            d = len(simplex) - 1
            if d <= dim_cap:
                buckets[d].add(simplex)
        return cls(verts, tuple(frozenset(b) for b in buckets), dim_cap)

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_set)

    @cached_property
    def sorted_vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.vertex_set))

    @property
    def dimension(self) -> int:
        """Largest dimension with a stored simplex (-1 when empty)."""
        for d in range(self.dim_cap, -1, -1):
            if self.simplices[d]:
                return d
        return -1

    def vertices(self) -> Tuple[int, ...]:
        return self.sorted_vertices

    def has_vertex(self, v: int) -> bool:
        return v in self.vertex_set

    def contains(self, simplex: Simplex) -> bool:
        d = len(simplex) - 1
        if d < 0 or d > self.dim_cap:
            return False
        return simplex in self.simplices[d]

    def sample_vertex(self, rng: np.random.Generator) -> int:
        if not self.vertex_set:
            raise ComplexInputError("cannot sample a vertex of the empty complex")
        return self.sorted_vertices[int(rng.integers(len(self.sorted_vertices)))]

    def iter_simplices(self, min_dim: int = 0) -> Iterator[Simplex]:
        """All simplices in (dimension, lexicographic) order."""
        for d in range(min_dim, self.dim_cap + 1):
            yield from sorted(self.simplices[d])

    def f_vector(self) -> Tuple[int, ...]:
        counts = [len(level) for level in self.simplices]
        while counts and counts[-1] == 0:
            counts.pop()
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * f for d, f in enumerate(self.f_vector()))

    def facets(self) -> List[Simplex]:
        """Maximal simplices, sorted."""
        result: List[Simplex] = []
        for d in range(self.dim_cap + 1):
            covered: Set[Simplex] = set()
            if d < self.dim_cap:
                for upper in self.simplices[d + 1]:
                    covered.update(boundary(upper))
            result.extend(s for s in self.simplices[d] if s not in covered)
        return sorted(result)

    def skeleton(self, k: int) -> "ExplicitComplex":
        k = min(k, self.dim_cap)
        return ExplicitComplex(self.vertex_set, self.simplices[: k + 1], k)

    def is_downward_closed(self) -> bool:
        for d in range(1, self.dim_cap + 1):
            lower = self.simplices[d - 1]
            for simplex in self.simplices[d]:
                if any(face not in lower for face in boundary(simplex)):
                    return False
        return all((v,) in self.simplices[0] for v in self.vertex_set) and all(
            s[0] in self.vertex_set for s in self.simplices[0]
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "version": FORMAT_VERSION,
            "vertices": list(self.sorted_vertices),
            "facets": [list(f) for f in self.facets()],
            "dim_cap": self.dim_cap,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "ExplicitComplex":
        if not isinstance(data, dict) or data.get("version") != FORMAT_VERSION:
            raise ComplexInputError(
                f"unsupported complex format (expected version {FORMAT_VERSION})"
            )
        try:
            vertices = [int(v) for v in data["vertices"]]  # type: ignore[union-attr]
            facets = [make_simplex(f) for f in data["facets"]]  # type: ignore[union-attr]
            dim_cap = int(data["dim_cap"])  # type: ignore[arg-type]
        except (KeyError, TypeError, ValueError) as e:
            raise ComplexInputError(f"malformed complex document: {e}") from e
        if any(v < 0 for v in vertices):
            raise ComplexInputError("vertex ids must be unsigned integers")
        return from_facets(vertices, facets, dim_cap)

    @classmethod
    def from_json(cls, text: str) -> "ExplicitComplex":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ComplexInputError(f"invalid complex JSON: {e}") from e
        return cls.from_dict(data)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExplicitComplex":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ComplexInputError(f"cannot read complex file {path}: {e}") from e
        return cls.from_json(text)


@dataclass(frozen=True)
class RemovalFamily:
    """A set of simplices to delete together with their cofaces."""

    simplices: FrozenSet[Simplex]

    @classmethod
    def of(cls, members: Iterable[Iterable[int]]) -> "RemovalFamily":
        return cls(frozenset(make_simplex(m) for m in members))

    @property
    def count(self) -> int:
        return len(self.simplices)

    @property
    def total_dim(self) -> int:
        return sum(len(s) - 1 for s in self.simplices)

    @property
    def weight(self) -> int:
        """|F| + dim(F), the quantity the resilience bound is stated in."""
        return self.count + self.total_dim

    def a_i(self) -> Tuple[int, ...]:
        """Number of i-dimensional members for i = 0..max."""
        if not self.simplices:
            return ()
        counts = [0] * max(len(s) for s in self.simplices)
        for s in self.simplices:
            counts[len(s) - 1] += 1
        return tuple(counts)

    def sorted_members(self) -> List[Simplex]:
        return sorted(self.simplices, key=lambda s: (len(s), s))


def _grow(
    base: Sequence[int], member: Callable[[Simplex], bool], dim_cap: int
) -> List[Simplex]:
    """Level-wise enumeration of a downward-closed family over ``base``."""
    base = sorted(base)
    level: List[Simplex] = [(v,) for v in base]
    found: List[Simplex] = list(level)
    for _ in range(dim_cap):
        present = set(level)
        nxt: List[Simplex] = []
        for simplex in level:
            start = simplex[-1]
            for u in base:
                if u <= start:
                    continue
                candidate = simplex + (u,)
                if all(face in present for face in boundary(candidate)) and member(
                    candidate
                ):
                    nxt.append(candidate)
        if not nxt:
            break
        found.extend(nxt)
        level = nxt
    return found


def from_facets(
    vertex_set: Iterable[int], facets: Iterable[Iterable[int]], dim_cap: int
) -> ExplicitComplex:
    """Smallest complex containing the facets and all listed vertices."""
    verts = frozenset(int(v) for v in vertex_set)
    closure: Set[Simplex] = set()
    for raw in facets:
        facet = make_simplex(raw)
        missing = [v for v in facet if v not in verts]
        if missing:
            raise ComplexInputError(f"facet {list(facet)} uses unknown vertices {missing}")
        for k in range(2, min(len(facet), dim_cap + 1) + 1):
            closure.update(combinations(facet, k))
    return ExplicitComplex.build(verts, closure, dim_cap)


def full_simplex(vertices: Iterable[int], dim_cap: int) -> ExplicitComplex:
    verts = sorted(set(int(v) for v in vertices))
    return from_facets(verts, [verts] if verts else [], dim_cap)


def cycle_graph(n: int, dim_cap: int = 1) -> ExplicitComplex:
    """The n-cycle 0-1-...-(n-1)-0 as a 1-dimensional complex."""
    if n < 3:
        raise ComplexInputError("a cycle needs at least 3 vertices")
    return from_facets(range(n), [(i, (i + 1) % n) for i in range(n)], dim_cap)


def _check_vertices(X: ComplexView, U: Iterable[int]) -> List[int]:
    verts = sorted(set(int(u) for u in U))
    unknown = [u for u in verts if not X.has_vertex(u)]
    if unknown:
        raise ComplexInputError(f"vertices {unknown} are not in the complex")
    return verts


def induced(X: ComplexView, U: Iterable[int]) -> ExplicitComplex:
    """X_U: all simplices of X whose vertices lie in U."""
    verts = _check_vertices(X, U)
    if isinstance(X, ExplicitComplex) and len(verts) > SMALL_INDUCED:
        allowed = set(verts)
        kept = [
            s
            for level in X.simplices[1:]
            for s in level
            if all(v in allowed for v in s)
        ]
        return ExplicitComplex.build(verts, kept, X.dim_cap)
    return ExplicitComplex.build(verts, _grow(verts, X.contains, X.dim_cap), X.dim_cap)


def link(X: ComplexView, v: int) -> ExplicitComplex:
    """lk_X(v): simplices not containing v whose union with v lies in X."""
    if not X.has_vertex(v):
        raise ComplexInputError(f"vertex {v} is not in the complex")
    cap = max(X.dim_cap - 1, 0)
    if isinstance(X, ExplicitComplex):
        kept: List[Simplex] = []
        for level in X.simplices[1:]:
            for s in level:
                if v in s:
                    kept.append(tuple(u for u in s if u != v))
        verts = [s[0] for s in kept if len(s) == 1]
        return ExplicitComplex.build(verts, kept, cap)

    def with_v(s: Simplex) -> bool:
        return X.contains(tuple(sorted(s + (v,))))

    neighbours = [u for u in X.vertices() if u != v and with_v((u,))]
    return ExplicitComplex.build(neighbours, _grow(neighbours, with_v, cap), cap)


def cone(X: ExplicitComplex, apex: int, dim_cap: Optional[int] = None) -> ExplicitComplex:
    """apex * X."""
    if apex in X.vertex_set:
        raise ComplexInputError(f"apex {apex} already belongs to the complex")
    cap = X.dim_cap + 1 if dim_cap is None else dim_cap
    simplices: List[Simplex] = list(X.iter_simplices())
    simplices.extend(tuple(sorted(s + (apex,))) for s in X.iter_simplices())
    return ExplicitComplex.build(X.vertex_set | {apex}, simplices, cap)


def join(X: ExplicitComplex, Y: ExplicitComplex, dim_cap: Optional[int] = None) -> ExplicitComplex:
    """X * Y on disjoint vertex sets."""
    overlap = X.vertex_set & Y.vertex_set
    if overlap:
        raise ComplexInputError(f"join needs disjoint vertex sets, shared {sorted(overlap)}")
    cap = X.dim_cap + Y.dim_cap + 1 if dim_cap is None else dim_cap
    left = list(X.iter_simplices())
    right = list(Y.iter_simplices())
    simplices: List[Simplex] = left + right
    for s in left:
        for t in right:
            if len(s) + len(t) <= cap + 1:
                simplices.append(tuple(sorted(s + t)))
    return ExplicitComplex.build(X.vertex_set | Y.vertex_set, simplices, cap)


def remove_family(
    X: ExplicitComplex, family: RemovalFamily, strict: bool = True
) -> ExplicitComplex:
    """Delete every member of the family together with all its cofaces."""
    members = set()
    for s in family.simplices:
        if X.contains(s):
            members.add(s)
        elif strict:
            raise ComplexInputError(f"{list(s)} is not a simplex of the complex")
    sizes = sorted({len(s) for s in members})

    def doomed(simplex: Simplex) -> bool:
        return any(
            face in members
            for k in sizes
            if k <= len(simplex)
            for face in combinations(simplex, k)
        )

    kept = [s for s in X.iter_simplices(min_dim=1) if not doomed(s)]
    verts = [v for v in X.vertex_set if (v,) not in members]
    return ExplicitComplex.build(verts, kept, X.dim_cap)


def antichain_reduce(family: RemovalFamily) -> RemovalFamily:
    """Drop members that have a proper face already in the family."""
    members = family.simplices
    kept = frozenset(
        s for s in members if not any(face in members for face in faces(s, proper=True))
    )
    return RemovalFamily(kept)


def external_faces(X: ExplicitComplex, d: int) -> List[Simplex]:
    """E(Y) in dimension d: missing simplices whose whole boundary is present."""
    if d < 1:
        raise ComplexInputError("external faces are defined for d >= 1")
    if d - 1 > X.dim_cap:
        return []
    lower = X.simplices[d - 1]
    present = X.simplices[d] if d <= X.dim_cap else frozenset()
    if d == 1:
        verts = X.sorted_vertices
        return [
            (a, b) for a, b in combinations(verts, 2) if (a, b) not in present
        ]
    # a candidate extends a (d-1)-face by a larger common neighbour
    neighbours: Dict[int, Set[int]] = {v: set() for v in X.vertex_set}
    for a, b in X.simplices[1]:
        neighbours[a].add(b)
        neighbours[b].add(a)
    result: List[Simplex] = []
    for base in sorted(lower):
        common = set.intersection(*(neighbours[v] for v in base))
        for u in sorted(w for w in common if w > base[-1]):
            candidate = base + (u,)
            if candidate in present:
                continue
            if all(face in lower for face in boundary(candidate)):
                result.append(candidate)
    return result
