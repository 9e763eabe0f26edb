"""
Constructive topology on ample complexes: filling simplicial loops by discs,
cone points for null-homotopies, and GF(2) Betti numbers.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import ceil
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .ampleness import AmpleChallenge, find_witness
from .errors import AmpleError, BudgetExceededError, ComplexInputError, WitnessNotFoundError
from .simplex_core import ComplexView, ExplicitComplex, Simplex, boundary, induced

logger = logging.getLogger(__name__)

Triangle = Tuple[int, int, int]


@dataclass(frozen=True)
class SimplicialLoop:
    """Cyclic vertex sequence with consecutive vertices joined by edges."""

    vertices: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> List[Tuple[int, int]]:
        n = len(self.vertices)
        return [tuple(sorted((self.vertices[i], self.vertices[(i + 1) % n]))) for i in range(n)]  # type: ignore[misc]

    def validate(self, X: ComplexView) -> None:
        if len(self.vertices) < 3:
            raise ComplexInputError("a loop needs at least 3 vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise ComplexInputError("loop vertices must be distinct")
        for a, b in self.edges():
            if not X.contains((a, b)):
                raise ComplexInputError(f"loop step {a}-{b} is not an edge")


@dataclass
class DiscCertificate:
    """Abstract triangulated disc bounded by the loop, with its map into X.

    Boundary vertices keep their own ids; fresh internal vertices are -1, -2, ...
    """

    boundary: Tuple[int, ...]
    triangles: List[Triangle] = field(default_factory=list)
    mapping: Dict[int, int] = field(default_factory=dict)
    cone_at_three: bool = False

    @property
    def internal_vertices(self) -> List[int]:
        return sorted((v for v in self.mapping if v < 0), reverse=True)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "boundary": list(self.boundary),
            "triangles": [list(t) for t in self.triangles],
            "map": {str(k): v for k, v in sorted(self.mapping.items())},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscCertificate":
        try:
            boundary_ids = tuple(int(v) for v in data["boundary"])
            triangles = [tuple(sorted(int(v) for v in t)) for t in data["triangles"]]
            mapping = {int(k): int(v) for k, v in data["map"].items()}
        except (KeyError, TypeError, ValueError) as e:
            raise ComplexInputError(f"malformed disc certificate: {e}") from e
        internal = [v for v in mapping if v < 0]
        return cls(
            boundary_ids,
            triangles,  # type: ignore[arg-type]
            mapping,
            cone_at_three=len(boundary_ids) == 3 and len(internal) == 1,
        )


def fill_bounds(length: int, r: int, cone_at_three: bool = False) -> Tuple[int, int]:
    """(internal vertices, triangles) allowed for a loop of the given length."""
    if length == 3 and cone_at_three:
        return 1, 3
    steps = ceil((length - 3) / (r - 3))
    return steps, steps * (r - 1) + 1


def _arc_pattern(U: Sequence[int], cyclic: bool) -> List[Simplex]:
    pattern: List[Simplex] = [(u,) for u in U]
    steps = len(U) if cyclic else len(U) - 1
    for k in range(steps):
        pattern.append(tuple(sorted((U[k], U[(k + 1) % len(U)]))))
    return pattern


def _cones(X: ComplexView, v: int, path: Sequence[int], cyclic: bool) -> bool:
    for u in path:
        if not X.contains(tuple(sorted((u, v)))):
            return False
    steps = len(path) if cyclic else len(path) - 1
    for k in range(steps):
        if not X.contains(tuple(sorted((path[k], path[(k + 1) % len(path)], v)))):
            return False
    return True


def find_cone_vertex(
    X: ComplexView,
    path: Sequence[int],
    cyclic: bool,
    avoid: Sequence[int],
    witness_mode: str,
    search: str,
    rng: Optional[np.random.Generator],
    trials: int,
) -> Optional[int]:
    if witness_mode == "exact":
        challenge = AmpleChallenge.of(path, _arc_pattern(path, cyclic))
        return find_witness(X, challenge, search=search, rng=rng, trials=trials, exclude=avoid)
    if witness_mode != "cone":
        raise ComplexInputError(f"unknown witness mode '{witness_mode}'")
    skip = set(avoid) | set(path)
    if search == "exhaustive":
        return next((v for v in X.vertices() if v not in skip and _cones(X, v, path, cyclic)), None)
    if search == "sampled":
        if rng is None:
            raise ComplexInputError("sampled search needs a random generator")
        for _ in range(trials):
            v = X.sample_vertex(rng)
            if v not in skip and _cones(X, v, path, cyclic):
                return v
        return None
    raise ComplexInputError(f"unknown search policy '{search}'")


def fill_loop(
    X: ComplexView,
    loop: SimplicialLoop,
    r: int,
    witness_mode: str = "cone",
    search: str = "exhaustive",
    rng: Optional[np.random.Generator] = None,
    trials: int = 200_000,
) -> DiscCertificate:
    """Shrink the loop by coning off arcs of r vertices, then cone what remains."""
    if r < 4:
        raise ComplexInputError("disc filling needs r >= 4")
    loop.validate(X)
    cert = DiscCertificate(boundary=loop.vertices)
    cert.mapping = {v: v for v in loop.vertices}
    current = list(loop.vertices)
    fresh = -1

    def target(ids: Sequence[int]) -> List[int]:
        return [cert.mapping[a] for a in ids]

    while len(current) > r:
        arc = current[:r]
        images = target(arc)
        avoid = target(current)
        w = find_cone_vertex(X, images, False, avoid, witness_mode, search, rng, trials)
        if w is None:
            raise WitnessNotFoundError(
                "no cone vertex for arc",
                challenge={"arc": images, "cyclic": False, "avoid": avoid, "mode": witness_mode},
            )
        cert.mapping[fresh] = w
        for k in range(r - 1):
            cert.triangles.append(tuple(sorted((arc[k], arc[k + 1], fresh))))  # type: ignore[arg-type]
        current = [arc[0], fresh] + current[r - 1 :]
        logger.debug("arc %s coned by %d, loop length now %d", images, w, len(current))
        fresh -= 1

    images = target(current)
    if len(current) == 3 and X.contains(tuple(sorted(images))):
        cert.triangles.append(tuple(sorted(current)))  # type: ignore[arg-type]
    else:
        w = find_cone_vertex(X, images, True, images, witness_mode, search, rng, trials)
        if w is None:
            raise WitnessNotFoundError(
                "no cone vertex for the final loop",
                challenge={"arc": images, "cyclic": True, "avoid": images, "mode": witness_mode},
            )
        cert.mapping[fresh] = w
        n = len(current)
        for k in range(n):
            cert.triangles.append(tuple(sorted((current[k], current[(k + 1) % n], fresh))))  # type: ignore[arg-type]
        cert.cone_at_three = len(loop) == 3

    failures = validate_certificate(X, cert, r)
    if failures:
        raise AmpleError(f"constructed disc failed its own check: {failures}")
    return cert


def _is_cycle(edges: List[Tuple[int, int]]) -> bool:
    graph = nx.Graph(edges)
    return graph.number_of_nodes() >= 3 and nx.is_connected(graph) and all(
        d == 2 for _, d in graph.degree()
    )


def _is_path(edges: List[Tuple[int, int]]) -> bool:
    graph = nx.Graph(edges)
    if graph.number_of_nodes() < 2 or not nx.is_connected(graph):
        return False
    degrees = sorted(d for _, d in graph.degree())
    return degrees.count(1) == 2 and all(d in (1, 2) for d in degrees)


def validate_certificate(X: ComplexView, cert: DiscCertificate, r: Optional[int] = None) -> List[str]:
    """Every failed invariant, by name; empty when the certificate is sound."""
    failures: List[str] = []
    triangles = [tuple(sorted(t)) for t in cert.triangles]
    if any(len(set(t)) != 3 for t in triangles):
        return ["degenerate triangle"]
    if len(set(triangles)) != len(triangles):
        failures.append("repeated triangle")

    loop = SimplicialLoop(cert.boundary)
    boundary_edges = set(loop.edges())
    edge_use = Counter(e for t in triangles for e in boundary(t))
    for edge, uses in edge_use.items():
        expected = 1 if edge in boundary_edges else 2
        if uses != expected:
            failures.append(f"edge {list(edge)} lies in {uses} triangles")
    for edge in boundary_edges:
        if edge not in edge_use:
            failures.append(f"boundary edge {list(edge)} is not covered")

    vertices = {v for t in triangles for v in t}
    if set(cert.boundary) - vertices:
        failures.append("boundary vertex missing from the disc")
    skeleton = nx.Graph(list(edge_use))
    if vertices and not nx.is_connected(skeleton):
        failures.append("disc is not connected")
    euler = len(vertices) - len(edge_use) + len(triangles)
    if euler != 1:
        failures.append(f"euler characteristic {euler} != 1")
    on_boundary = set(cert.boundary)
    for v in vertices:
        link_edges = [tuple(u for u in t if u != v) for t in triangles if v in t]
        ok = _is_path(link_edges) if v in on_boundary else _is_cycle(link_edges)  # type: ignore[arg-type]
        if not ok:
            failures.append(f"link of {v} is not a {'path' if v in on_boundary else 'cycle'}")

    missing = vertices - set(cert.mapping)
    if missing:
        failures.append(f"unmapped vertices {sorted(missing)}")
        return failures
    for t in triangles:
        image = tuple(sorted(cert.mapping[v] for v in t))
        if len(set(image)) != 3 or not X.contains(image):
            failures.append(f"image {list(image)} of {list(t)} is not a triangle of X")

    if r is not None:
        internal_cap, triangle_cap = fill_bounds(len(cert.boundary), r, cert.cone_at_three)
        internal = sum(1 for v in vertices if v not in on_boundary)
        if internal > internal_cap:
            failures.append(f"{internal} internal vertices exceed {internal_cap}")
        if len(triangles) > triangle_cap:
            failures.append(f"{len(triangles)} triangles exceed {triangle_cap}")
    return failures


def cone_point(
    X: ComplexView,
    W: Sequence[int],
    r: Optional[int] = None,
    search: str = "exhaustive",
    rng: Optional[np.random.Generator] = None,
    trials: int = 200_000,
) -> int:
    """A vertex outside W whose link contains all of X_W."""
    W = sorted(set(W))
    if r is not None and len(W) > r:
        raise ComplexInputError(f"|W| = {len(W)} exceeds r = {r}")
    full = induced(X, W)
    challenge = AmpleChallenge(tuple(W), full)
    v = find_witness(X, challenge, search=search, rng=rng, trials=trials)
    if v is None:
        raise WitnessNotFoundError("no cone point", challenge=challenge.to_dict())
    return v


def random_loop(
    X: ComplexView,
    length: int,
    rng: np.random.Generator,
    restarts: int = 1_000,
    draws: int = 100_000,
) -> SimplicialLoop:
    """A loop of distinct vertices built by a random walk and closed at the end."""
    if length < 3:
        raise ComplexInputError("loops have length >= 3")
    for _ in range(restarts):
        walk = [X.sample_vertex(rng)]
        budget = draws
        while len(walk) < length and budget > 0:
            budget -= 1
            v = X.sample_vertex(rng)
            if v in walk or not X.contains(tuple(sorted((walk[-1], v)))):
                continue
            if len(walk) == length - 1 and not X.contains(tuple(sorted((walk[0], v)))):
                continue
            walk.append(v)
        if len(walk) == length:
            return SimplicialLoop(tuple(walk))
    raise BudgetExceededError("loop_trials", restarts, f"no loop of length {length}")


# Homology over GF(2)


def _rank_gf2(rows: List[int]) -> int:
    pivots: Dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top in pivots:
                row ^= pivots[top]
            else:
                pivots[top] = row
                break
    return len(pivots)


def boundary_rank(X: ExplicitComplex, k: int) -> int:
    """Rank of the boundary map from k-chains to (k-1)-chains."""
    if k <= 0 or k > X.dim_cap:
        return 0
    lower = {s: i for i, s in enumerate(sorted(X.simplices[k - 1]))}
    rows = []
    for simplex in X.simplices[k]:
        bits = 0
        for face in boundary(simplex):
            bits |= 1 << lower[face]
        rows.append(bits)
    return _rank_gf2(rows)


def betti_gf2(X: ExplicitComplex, max_dim: Optional[int] = None, max_cells: int = 50_000_000) -> Tuple[int, ...]:
    """Betti numbers b_0..b_max_dim with GF(2) coefficients."""
    top = X.dimension if max_dim is None else max_dim
    if top < 0:
        return ()
    f = [len(X.simplices[d]) if d <= X.dim_cap else 0 for d in range(top + 2)]
    cells = sum(f[k] * f[k - 1] for k in range(1, top + 2))
    if cells > max_cells:
        raise BudgetExceededError("max_rank_cells", max_cells, f"{cells} boundary entries")
    ranks = [boundary_rank(X, k) for k in range(top + 2)]
    return tuple(f[k] - ranks[k] - ranks[k + 1] for k in range(top + 1))


def hollow_triangle() -> ExplicitComplex:
    return ExplicitComplex.build((0, 1, 2), list(combinations((0, 1, 2), 2)), 2)
