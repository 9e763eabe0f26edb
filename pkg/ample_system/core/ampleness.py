"""
r-ampleness: witness search, exhaustive and sampled verification, embedding
extension, vertex-count bounds and resilience guarantees.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .dedekind import binomial_lower_bound, dedekind_reduced
from .errors import BudgetExceededError, ComplexInputError, WitnessNotFoundError
from .seeding import derive_rng
from .settings import Settings
from .simplex_core import (
    ComplexView,
    ExplicitComplex,
    RemovalFamily,
    Simplex,
    antichain_reduce,
    boundary,
    from_facets,
    full_simplex,
    induced,
    link,
)

logger = logging.getLogger(__name__)

SubcomplexKey = FrozenSet[Simplex]


@dataclass(frozen=True)
class AmpleChallenge:
    """One instance of the extension property: pattern A over the vertex set U."""

    U: Tuple[int, ...]
    A: ExplicitComplex

    @classmethod
    def of(cls, U: Sequence[int], simplices: Sequence[Simplex]) -> "AmpleChallenge":
        members = sorted(set(tuple(sorted(s)) for s in simplices), key=lambda s: (len(s), s))
        verts = sorted({v for s in members for v in s})
        cap = max(len(U) - 1, 0)
        return cls(tuple(sorted(U)), from_facets(verts, members, cap))

    @property
    def key(self) -> SubcomplexKey:
        return frozenset(self.A.iter_simplices())

    def validate(self, X: ComplexView) -> None:
        """Reject patterns that are not subcomplexes of X_U."""
        if len(set(self.U)) != len(self.U):
            raise ComplexInputError("challenge vertices must be distinct")
        for u in self.U:
            if not X.has_vertex(u):
                raise ComplexInputError(f"challenge vertex {u} is not in the complex")
        allowed = set(self.U)
        for simplex in self.A.iter_simplices():
            if not set(simplex) <= allowed or not X.contains(simplex):
                raise ComplexInputError(
                    f"pattern simplex {list(simplex)} is not a simplex of X_U"
                )

    def to_dict(self) -> Dict[str, Any]:
        return {"U": list(self.U), "A_facets": [list(f) for f in self.A.facets()]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AmpleChallenge":
        try:
            U = [int(u) for u in data["U"]]
            facets = [tuple(int(v) for v in f) for f in data["A_facets"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ComplexInputError(f"malformed challenge: {e}") from e
        closure = {face for f in facets for face in _all_faces(tuple(sorted(f)))}
        return cls.of(U, sorted(closure))


def _all_faces(simplex: Simplex) -> Iterator[Simplex]:
    for k in range(1, len(simplex) + 1):
        yield from combinations(simplex, k)


@dataclass
class AmpleReport:
    """Verdict of an ampleness check."""

    r: int
    mode: str
    verdict: str
    challenges: int = 0
    witness_scans: int = 0
    counterexample: Optional[AmpleChallenge] = None
    seed: Optional[int] = None
    trials: Optional[int] = None
    unresolved: int = 0
    elapsed_ms: float = 0.0

    @property
    def is_ample(self) -> bool:
        return self.verdict == "ample"

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "r": self.r,
            "mode": self.mode,
            "verdict": self.verdict,
            "challenges": self.challenges,
        }
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample.to_dict()
        if self.mode == "sampled":
            data["seed"] = self.seed
            data["trials"] = self.trials
            data["unresolved"] = self.unresolved
        if timing:
            data["ms"] = round(self.elapsed_ms, 3)
        return data


@dataclass(frozen=True)
class EmbeddingPair:
    """A complex A, an induced subcomplex B and an embedding of B into X."""

    A: ExplicitComplex
    B: ExplicitComplex
    f_B: Dict[int, int]


@dataclass(frozen=True)
class VertexBound:
    r: int
    exact: Optional[int]
    binomial: int


@dataclass(frozen=True)
class ResilienceGuarantee:
    r: int
    weight: int
    k_min: Optional[int]
    level: Optional[int]
    connected: bool = False
    simply_connected: bool = False
    two_connected: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "weight": self.weight,
            "k_min": self.k_min,
            "level": self.level,
            "connected": self.connected,
            "simply_connected": self.simply_connected,
            "two_connected": self.two_connected,
        }


# Subcomplex enumeration


def enumerate_subcomplexes(
    X_U: ExplicitComplex, required: Sequence[Simplex] = ()
) -> Iterator[SubcomplexKey]:
    """Every downward-closed subfamily of X_U containing ``required``.

    Simplices are decided in (size, lexicographic) order so that all faces of
    a simplex are decided before it; the excluded branch is explored first.
    """
    order = list(X_U.iter_simplices())
    forced = set(required)
    chosen: List[Simplex] = []
    chosen_set = set()

    def walk(idx: int) -> Iterator[SubcomplexKey]:
        if idx == len(order):
            yield frozenset(chosen_set)
            return
        simplex = order[idx]
        if simplex not in forced:
            yield from walk(idx + 1)
        if all(face in chosen_set for face in boundary(simplex)):
            chosen.append(simplex)
            chosen_set.add(simplex)
            yield from walk(idx + 1)
            chosen.pop()
            chosen_set.discard(simplex)

    yield from walk(0)


def _as_complex(key: SubcomplexKey, cap: int) -> ExplicitComplex:
    verts = [s[0] for s in key if len(s) == 1]
    return ExplicitComplex.build(verts, key, cap)


def link_signature(X: ComplexView, X_U: ExplicitComplex, v: int) -> SubcomplexKey:
    """lk_X(v) ∩ X_U, grown level by level from the vertices of U."""
    found = set()
    for simplex in X_U.iter_simplices():
        if any(face not in found for face in boundary(simplex)):
            continue
        if X.contains(tuple(sorted(simplex + (v,)))):
            found.add(simplex)
    return frozenset(found)


def _matches(X: ComplexView, X_U: ExplicitComplex, v: int, target: SubcomplexKey) -> bool:
    for simplex in X_U.iter_simplices():
        inside = X.contains(tuple(sorted(simplex + (v,))))
        if inside != (simplex in target):
            return False
    return True


# Witness search


def find_witness(
    X: ComplexView,
    challenge: AmpleChallenge,
    search: str = "exhaustive",
    rng: Optional[np.random.Generator] = None,
    trials: int = 200_000,
    exclude: Sequence[int] = (),
    max_scans: Optional[int] = None,
) -> Optional[int]:
    """A vertex v outside U whose link meets X_U exactly in A, or None.

    Exhaustive search scans vertices in ascending order; sampled search draws
    ``trials`` vertices from ``rng``.
    """
    challenge.validate(X)
    X_U = induced(X, challenge.U)
    target = challenge.key
    skip = set(challenge.U) | set(exclude)
    if search == "exhaustive":
        scans = 0
        for v in X.vertices():
            if v in skip:
                continue
            scans += 1
            if max_scans is not None and scans > max_scans:
                raise BudgetExceededError("max_witness_scans", max_scans)
            if _matches(X, X_U, v, target):
                return v
        return None
    if search == "sampled":
        if rng is None:
            raise ComplexInputError("sampled witness search needs a random generator")
        for _ in range(trials):
            v = X.sample_vertex(rng)
            if v not in skip and _matches(X, X_U, v, target):
                return v
        return None
    raise ComplexInputError(f"unknown search policy '{search}'")


# Exhaustive verification


def _u_subsets(vertices: Sequence[int], r: int) -> Iterator[Tuple[int, ...]]:
    for k in range(1, r + 1):
        yield from combinations(vertices, k)


@dataclass
class _ChunkResult:
    challenges: int = 0
    scans: int = 0
    counterexample: Optional[Tuple[Tuple[int, ...], SubcomplexKey]] = None


def _verify_chunk(
    X: ComplexView, subsets: Sequence[Tuple[int, ...]], scan_limit: int
) -> _ChunkResult:
    """Cover every pattern over each U; record the first uncovered one."""
    result = _ChunkResult()
    vertices = list(X.vertices())
    for U in subsets:
        X_U = induced(X, U)
        patterns = list(enumerate_subcomplexes(X_U))
        result.challenges += len(patterns)
        pending = set(patterns)
        members = set(U)
        for v in vertices:
            if not pending:
                break
            if v in members:
                continue
            result.scans += 1
            if result.scans > scan_limit:
                raise BudgetExceededError("max_witness_scans", scan_limit)
            pending.discard(link_signature(X, X_U, v))
        if pending and result.counterexample is None:
            first = next(p for p in patterns if p in pending)
            result.counterexample = (U, first)
    return result


def _chunks(items: List[Tuple[int, ...]], count: int) -> List[List[Tuple[int, ...]]]:
    size = max(1, -(-len(items) // count))
    return [items[i : i + size] for i in range(0, len(items), size)]


def _verify_exhaustive(X: ComplexView, r: int, settings: Settings, workers: int) -> AmpleReport:
    budgets = settings.budgets
    n = X.vertex_count
    planned = sum(comb(n, k) for k in range(1, r + 1))
    if planned > budgets.max_subsets:
        raise BudgetExceededError(
            "max_subsets", budgets.max_subsets, f"{planned} vertex subsets at r={r}, n={n}"
        )
    subsets = list(_u_subsets(list(X.vertices()), r))
    if workers > 1 and len(subsets) > workers:
        parts = _chunks(subsets, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(_verify_chunk, [X] * len(parts), parts, [budgets.max_witness_scans] * len(parts))
            )
    else:
        results = [_verify_chunk(X, subsets, budgets.max_witness_scans)]

    # the empty U is satisfied by any vertex of a nonempty complex
    challenges = 1 + sum(res.challenges for res in results)
    scans = sum(res.scans for res in results)
    if challenges > budgets.max_challenges:
        raise BudgetExceededError("max_challenges", budgets.max_challenges)
    if scans > budgets.max_witness_scans:
        raise BudgetExceededError("max_witness_scans", budgets.max_witness_scans)
    failure = next((res.counterexample for res in results if res.counterexample), None)
    report = AmpleReport(r=r, mode="exhaustive", verdict="ample", challenges=challenges, witness_scans=scans)
    if failure is not None:
        U, key = failure
        report.verdict = "counterexample"
        report.counterexample = AmpleChallenge(U, _as_complex(key, max(len(U) - 1, 0)))
    return report


# Sampled verification


def random_challenge(
    X: ComplexView, r: int, rng: np.random.Generator, max_draws: int = 10_000
) -> AmpleChallenge:
    """|U| uniform in 1..r, then U, then A uniform among subcomplexes of X_U."""
    size = int(rng.integers(1, r + 1))
    if size > X.vertex_count:
        size = X.vertex_count
    chosen: List[int] = []
    draws = 0
    while len(chosen) < size:
        draws += 1
        if draws > max_draws:
            raise BudgetExceededError("vertex_draws", max_draws)
        v = X.sample_vertex(rng)
        if v not in chosen:
            chosen.append(v)
    U = tuple(sorted(chosen))
    X_U = induced(X, U)
    patterns = list(enumerate_subcomplexes(X_U))
    key = patterns[int(rng.integers(len(patterns)))]
    return AmpleChallenge(U, _as_complex(key, max(len(U) - 1, 0)))


def _verify_sampled(X: ComplexView, r: int, settings: Settings, seed: int, trials: int) -> AmpleReport:
    sampling = settings.sampling
    rescan_limit = settings.budgets.max_witness_scans
    report = AmpleReport(r=r, mode="sampled", verdict="not-refuted", seed=seed, trials=trials)
    for index in range(trials):
        rng = derive_rng(seed, "verify", index)
        challenge = random_challenge(X, r, rng)
        report.challenges += 1
        found = find_witness(X, challenge, search="sampled", rng=rng, trials=sampling.witness_trials)
        report.witness_scans += sampling.witness_trials if found is None else 1
        if found is not None:
            continue
        if X.vertex_count > rescan_limit:
            logger.info("challenge %s unresolved (view too large to rescan)", challenge.to_dict())
            report.unresolved += 1
            continue
        # a sampled miss is only reported after an exhaustive rescan confirms it
        if find_witness(X, challenge, search="exhaustive") is None:
            report.verdict = "counterexample"
            report.counterexample = challenge
            return report
    return report


def verify_ample(
    X: ComplexView,
    r: int,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: Optional[int] = None,
    settings: Optional[Settings] = None,
    workers: Optional[int] = None,
) -> AmpleReport:
    """Check r-ampleness exhaustively or refute it by sampling."""
    settings = settings or Settings()
    if r < 0:
        raise ComplexInputError("level r must be non-negative")
    if X.vertex_count == 0:
        raise ComplexInputError("ampleness is checked on nonempty complexes")
    if X.dim_cap < r:
        logger.debug("dim_cap %d < r=%d: missing cofaces count as absent", X.dim_cap, r)
    started = time.perf_counter()
    if mode == "exhaustive":
        report = _verify_exhaustive(X, r, settings, workers or settings.parallel.workers)
    elif mode == "sampled":
        report = _verify_sampled(X, r, settings, seed, trials or settings.sampling.trials)
    else:
        raise ComplexInputError(f"unknown verification mode '{mode}'")
    report.elapsed_ms = (time.perf_counter() - started) * 1000.0
    logger.info(
        "verify r=%d mode=%s verdict=%s challenges=%d (%.1f ms)",
        r, mode, report.verdict, report.challenges, report.elapsed_ms,
    )
    return report


def first_counterexample(X: ExplicitComplex, r: int) -> Optional[AmpleChallenge]:
    """Stop at the first challenge with no witness."""
    vertices = list(X.vertices())
    for U in _u_subsets(vertices, r):
        X_U = induced(X, U)
        patterns = list(enumerate_subcomplexes(X_U))
        pending = set(patterns)
        for v in vertices:
            if not pending:
                break
            if v not in U:
                pending.discard(link_signature(X, X_U, v))
        if pending:
            key = next(p for p in patterns if p in pending)
            return AmpleChallenge(U, _as_complex(key, max(len(U) - 1, 0)))
    return None


# Links of simplices


def simplex_link(X: ExplicitComplex, sigma: Simplex) -> ExplicitComplex:
    """lk_X(σ): simplices τ disjoint from σ with τ ∪ σ in X."""
    sigma = tuple(sorted(sigma))
    if not X.contains(sigma):
        raise ComplexInputError(f"{list(sigma)} is not a simplex of the complex")
    if len(sigma) == 1:
        return link(X, sigma[0])
    own = set(sigma)
    kept = [
        tuple(v for v in s if v not in own)
        for s in X.iter_simplices(min_dim=len(sigma))
        if own <= set(s)
    ]
    verts = [s[0] for s in kept if len(s) == 1]
    return ExplicitComplex.build(verts, kept, max(X.dim_cap - len(sigma), 0))


def link_reports(X: ExplicitComplex, r: int, k: int = 0, settings: Optional[Settings] = None) -> Dict[Simplex, AmpleReport]:
    """Verify every k-simplex link at level r-k-1."""
    level = r - k - 1
    if level < 0:
        raise ComplexInputError(f"level r-k-1 = {level} is negative")
    reports = {}
    for sigma in sorted(X.simplices[k]):
        lk = simplex_link(X, sigma)
        if lk.vertex_count == 0:
            reports[sigma] = AmpleReport(
                r=level, mode="exhaustive", verdict="counterexample",
                counterexample=AmpleChallenge.of((), ()),
            )
            continue
        reports[sigma] = verify_ample(lk, level, settings=settings, workers=1)
    return reports


# Embeddings


def _check_embedding(X: ComplexView, domain: ExplicitComplex, f: Dict[int, int]) -> None:
    images = [f[v] for v in domain.vertices()]
    if len(set(images)) != len(images):
        raise ComplexInputError("embedding map is not injective")
    for v in images:
        if not X.has_vertex(v):
            raise ComplexInputError(f"embedding image {v} is not in the complex")
    verts = list(domain.vertices())
    for k in range(2, min(len(verts), domain.dim_cap + 1) + 1):
        for sigma in combinations(verts, k):
            image = tuple(sorted(f[v] for v in sigma))
            if X.contains(image) != domain.contains(sigma):
                raise ComplexInputError(f"map is not an embedding on {list(sigma)}")


def extend_embedding(X: ComplexView, pair: EmbeddingPair) -> Dict[int, int]:
    """Extend f_B to an embedding of A, one cone vertex at a time."""
    if set(pair.B.vertices()) - set(pair.A.vertices()):
        raise ComplexInputError("B must be a subcomplex of A")
    if pair.B != induced(pair.A, pair.B.vertices()):
        raise ComplexInputError("B must be the induced subcomplex of A on its vertices")
    if set(pair.f_B) != set(pair.B.vertices()):
        raise ComplexInputError("f_B must be defined exactly on V(B)")
    _check_embedding(X, pair.B, pair.f_B)

    f = dict(pair.f_B)
    for a in pair.A.vertices():
        if a in f:
            continue
        domain = sorted(f)
        U = tuple(sorted(f[w] for w in domain))
        pattern: List[Simplex] = []
        for k in range(1, len(domain) + 1):
            for sigma in combinations(domain, k):
                if pair.A.contains(tuple(sorted(sigma + (a,)))):
                    pattern.append(tuple(sorted(f[w] for w in sigma)))
        challenge = AmpleChallenge.of(U, pattern)
        v = find_witness(X, challenge)
        if v is None:
            raise WitnessNotFoundError(
                f"no witness while embedding vertex {a}", challenge=challenge.to_dict()
            )
        logger.debug("embedding %d -> %d", a, v)
        f[a] = v
    return f


def embed_complex(X: ComplexView, A: ExplicitComplex) -> Dict[int, int]:
    """Embed A as an induced subcomplex, starting from its least vertex."""
    if A.vertex_count == 0:
        return {}
    first = A.vertices()[0]
    start = next(iter(X.vertices()))
    B = induced(A, [first])
    return extend_embedding(X, EmbeddingPair(A, B, {first: start}))


# Counting bounds


def min_vertex_bound(r: int, max_k: int = 6) -> VertexBound:
    """Lower bounds M'(r)+r and 2^C(r, r//2)+r on the vertices of an r-ample complex."""
    if r < 1:
        raise ComplexInputError("vertex bounds are stated for r >= 1")
    binomial = binomial_lower_bound(r) + r
    try:
        exact: Optional[int] = dedekind_reduced(r, max_k=max_k) + r
    except BudgetExceededError:
        logger.warning("M'(%d) beyond budget; reporting the binomial bound only", r)
        exact = None
    return VertexBound(r=r, exact=exact, binomial=binomial)


def binomial_resilience_bound(k: int) -> int:
    """2^C(k, k//2) + k, a computable lower bound for M'(k) + k."""
    return binomial_lower_bound(k) + k


def resilience_guarantee(r: int, family: RemovalFamily, max_k: int = 6) -> ResilienceGuarantee:
    """Ampleness level guaranteed after removing the family.

    The level is r - k for the least k with |F| + dim(F) < M'(k) + k. Past the
    enumeration budget M'(k) is replaced by its binomial lower bound.
    """
    reduced = antichain_reduce(family)
    weight = reduced.weight
    k_min: Optional[int] = None
    for k in range(0, r + 1):
        if k <= max_k:
            threshold = dedekind_reduced(k, max_k=max_k) + k
        else:
            threshold = binomial_resilience_bound(k)
        if weight < threshold:
            k_min = k
            break
    if k_min is None:
        return ResilienceGuarantee(r=r, weight=weight, k_min=None, level=None)
    level = r - k_min
    return ResilienceGuarantee(
        r=r,
        weight=weight,
        k_min=k_min,
        level=level,
        connected=level >= 2,
        simply_connected=level >= 4,
        two_connected=level >= 18,
    )


@dataclass
class SmallAmpleSearch:
    """Outcome of searching all complexes on few labelled vertices."""

    r: int
    max_vertices: int
    checked: Dict[int, int] = field(default_factory=dict)
    example: Optional[ExplicitComplex] = None


def smallest_ample_search(r: int, max_vertices: int) -> SmallAmpleSearch:
    """Look for an r-ample complex on at most ``max_vertices`` labelled vertices.

    Only the r-skeleton matters, so complexes are enumerated up to dimension r.
    """
    if r < 1:
        raise ComplexInputError("search level must be at least 1")
    outcome = SmallAmpleSearch(r=r, max_vertices=max_vertices)
    for k in range(1, max_vertices + 1):
        ambient = full_simplex(range(k), r)
        vertices = [(v,) for v in range(k)]
        checked = 0
        for key in enumerate_subcomplexes(ambient, required=vertices):
            checked += 1
            candidate = ExplicitComplex.build(range(k), key, r)
            if first_counterexample(candidate, r) is None:
                outcome.example = candidate
                outcome.checked[k] = checked
                return outcome
        outcome.checked[k] = checked
        logger.info("no %d-ample complex on %d vertices (%d checked)", r, k, checked)
    return outcome
