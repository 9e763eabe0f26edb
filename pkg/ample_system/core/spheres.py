"""
Triangulated 2-spheres and the degree-sum audit used when embedding links.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from .errors import ComplexInputError

logger = logging.getLogger(__name__)

Triangle = Tuple[int, int, int]
MAX_PAIR_DEGREE = 11


@dataclass(frozen=True)
class SphereTriangulation:
    triangles: Tuple[Triangle, ...]

    @classmethod
    def of(cls, triangles) -> "SphereTriangulation":
        normalized = []
        for t in triangles:
            tri = tuple(sorted(int(v) for v in t))
            if len(tri) != 3 or len(set(tri)) != 3:
                raise ComplexInputError(f"{list(t)} is not a triangle")
            normalized.append(tri)
        return cls(tuple(sorted(normalized)))

    @property
    def vertices(self) -> List[int]:
        return sorted({v for t in self.triangles for v in t})

    def edges(self) -> Counter:
        return Counter(
            e for a, b, c in self.triangles for e in ((a, b), (a, c), (b, c))
        )

    def degrees(self) -> Dict[int, int]:
        degree: Dict[int, int] = defaultdict(int)
        for a, b in self.edges():
            degree[a] += 1
            degree[b] += 1
        return dict(degree)

    def graph(self) -> nx.Graph:
        return nx.Graph(list(self.edges()))

    def vertex_link(self, v: int) -> nx.Graph:
        """Edges opposite v in the triangles through v."""
        return nx.Graph([tuple(u for u in t if u != v) for t in self.triangles if v in t])

    def check(self) -> List[str]:
        failures = []
        if len(set(self.triangles)) != len(self.triangles):
            failures.append("repeated triangle")
        bad = [list(e) for e, uses in self.edges().items() if uses != 2]
        if bad:
            failures.append(f"edges not in exactly two triangles: {bad[:5]}")
        if self.triangles and not nx.is_connected(self.graph()):
            failures.append("not connected")
        pinched = [v for v in self.vertices if not _is_single_cycle(self.vertex_link(v))]
        if pinched:
            failures.append(f"vertex links that are not a single cycle: {pinched[:5]}")
        v, e, f = len(self.vertices), len(self.edges()), len(self.triangles)
        if v - e + f != 2:
            failures.append(f"V - E + F = {v - e + f}")
        return failures

    def to_dict(self) -> Dict[str, Any]:
        return {"triangles": [list(t) for t in self.triangles]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SphereTriangulation":
        try:
            return cls.of(data["triangles"])
        except (KeyError, TypeError) as e:
            raise ComplexInputError(f"malformed sphere: {e}") from e


@dataclass
class SphereAudit:
    vertices: int
    faces: int
    degree_sum: Fraction
    pair: Optional[Tuple[int, int]]
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "vertices": self.vertices,
            "faces": self.faces,
            "degree_sum": str(self.degree_sum),
            "pair": list(self.pair) if self.pair else None,
            "failures": self.failures,
        }


def sphere_audit(sphere: SphereTriangulation) -> SphereAudit:
    """Check sum(1 - d_v/6) = 2, F = 2V - 4 and find adjacent vertices of degree <= 11."""
    failures = sphere.check()
    degrees = sphere.degrees()
    v, f = len(sphere.vertices), len(sphere.triangles)
    total = sum((1 - Fraction(d, 6) for d in degrees.values()), Fraction(0))
    if total != 2:
        failures.append(f"degree sum {total} != 2")
    if f != 2 * v - 4:
        failures.append(f"F = {f} but 2V - 4 = {2 * v - 4}")
    pair = next(
        (
            e
            for e in sorted(sphere.edges())
            if degrees[e[0]] <= MAX_PAIR_DEGREE and degrees[e[1]] <= MAX_PAIR_DEGREE
        ),
        None,
    )
    if pair is None:
        failures.append(f"no adjacent pair with degrees <= {MAX_PAIR_DEGREE}")
    return SphereAudit(v, f, total, pair, failures)


def tetrahedron() -> SphereTriangulation:
    return SphereTriangulation.of([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def octahedron() -> SphereTriangulation:
    return SphereTriangulation.of(
        [(x, y, z) for x in (0, 1) for y in (2, 3) for z in (4, 5)]
    )


def icosahedron() -> SphereTriangulation:
    """Apex 0, upper ring 1-5, lower ring 6-10, apex 11."""
    upper = [1, 2, 3, 4, 5]
    lower = [6, 7, 8, 9, 10]
    triangles = []
    for i in range(5):
        j = (i + 1) % 5
        triangles.append((0, upper[i], upper[j]))
        triangles.append((upper[i], upper[j], lower[i]))
        triangles.append((upper[j], lower[i], lower[j]))
        triangles.append((11, lower[i], lower[j]))
    return SphereTriangulation.of(triangles)


def double_pyramid(k: int) -> SphereTriangulation:
    """Suspension of a k-gon; the apexes k and k+1 have degree k."""
    if k < 3:
        raise ComplexInputError("double pyramid needs k >= 3")
    triangles = []
    for i in range(k):
        j = (i + 1) % k
        triangles.append((i, j, k))
        triangles.append((i, j, k + 1))
    return SphereTriangulation.of(triangles)


def _is_single_cycle(graph: nx.Graph) -> bool:
    return (
        graph.number_of_nodes() >= 3
        and all(d == 2 for _, d in graph.degree())
        and nx.is_connected(graph)
    )


def _link_cycle(triangles: List[Triangle], v: int) -> List[int]:
    opposite = nx.Graph([tuple(u for u in t if u != v) for t in triangles if v in t])
    start = min(opposite.nodes)
    return [u for u, _ in nx.find_cycle(opposite, start)]


def random_sphere(splits: int, rng: np.random.Generator) -> SphereTriangulation:
    """Grow a sphere from the tetrahedron by random vertex splits."""
    triangles = [tuple(t) for t in tetrahedron().triangles]
    fresh = 4
    for _ in range(splits):
        vertices = sorted({u for t in triangles for u in t})
        v = vertices[int(rng.integers(len(vertices)))]
        cycle = _link_cycle(triangles, v)
        d = len(cycle)
        a = int(rng.integers(d))
        length = int(rng.integers(1, d))
        arc = [cycle[(a + k) % d] for k in range(length + 1)]
        moved = {tuple(sorted((v, arc[k], arc[k + 1]))) for k in range(length)}
        triangles = [t for t in triangles if t not in moved]
        for k in range(length):
            triangles.append(tuple(sorted((fresh, arc[k], arc[k + 1]))))
        triangles.append(tuple(sorted((v, fresh, arc[0]))))
        triangles.append(tuple(sorted((v, fresh, arc[-1]))))
        fresh += 1
    return SphereTriangulation.of(triangles)
