"""
Paley-type complexes over prime fields: the Paley graph, the 13-vertex torus
example, the Iterated Paley complex X_{n,p}, and the witness solver that
realises any prescribed link pattern over a small vertex set.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .ampleness import AmpleChallenge, enumerate_subcomplexes, find_witness
from .errors import (
    AmpleError,
    BudgetExceededError,
    ComplexInputError,
    FieldRangeError,
    TrialBudgetError,
    UnsatisfiableLevelError,
)
from .finite_field import (
    MODULUS_LIMIT,
    FieldCtx,
    in_window,
    index_in_q,
    index_mod_p,
    is_prime_u64,
    next_prime_in_ap,
)
from .seeding import derive_rng
from .settings import Settings
from .simplex_core import ExplicitComplex, Simplex, from_facets, induced

logger = logging.getLogger(__name__)

_X_BATCH = 4096


def paley_graph(q: int) -> ExplicitComplex:
    """Graph on F_q joining i and j when i - j is a nonzero square."""
    if q < 5 or q >= MODULUS_LIMIT or not is_prime_u64(q):
        raise ComplexInputError(f"q = {q} must be a prime >= 5")
    if q % 4 != 1:
        raise ComplexInputError(f"q = {q} must be 1 mod 4 for a symmetric adjacency")
    squares = sorted({b * b % q for b in range(1, q)})
    edges = [(i, (i + s) % q) for i in range(q) for s in squares if i < (i + s) % q]
    return from_facets(range(q), edges, 1)


def example13() -> ExplicitComplex:
    """Paley graph of order 13 with the triangles {i, i+1, i+4} filled."""
    graph = paley_graph(13)
    triangles = [(i, (i + 1) % 13, (i + 4) % 13) for i in range(13)]
    return from_facets(range(13), list(graph.facets()) + triangles, 2)


def _distinct(ctx: FieldCtx, sigma: Iterable[int]) -> Tuple[int, ...]:
    values = tuple(int(v) % ctx.n for v in sigma)
    if not values:
        raise ComplexInputError("a simplex is a nonempty vertex set")
    if len(set(values)) != len(values):
        raise ComplexInputError(f"repeated field element in {list(values)}")
    return values


def alpha_index(ctx: FieldCtx, sigma: Iterable[int]) -> int:
    """Coset class of the pairwise-difference product; 0 for a singleton."""
    values = _distinct(ctx, sigma)
    total = 0
    for a, b in combinations(values, 2):
        total += index_mod_p(ctx, a - b)
    return total % ctx.p


def hnp_has_hyperedge(ctx: FieldCtx, sigma: Iterable[int]) -> bool:
    values = _distinct(ctx, sigma)
    if len(values) == 1:
        return True
    return index_in_q(ctx, alpha_index(ctx, values))


def xnp_contains(ctx: FieldCtx, sigma: Iterable[int], max_size: int = 12) -> bool:
    """Every nonempty subset is a hyperedge.

    Subset classes are accumulated over bitmasks from the pair classes, so
    each of the 2^k - 1 subsets costs one addition per new pair.
    """
    values = _distinct(ctx, sigma)
    k = len(values)
    if k > max_size:
        raise BudgetExceededError("max_simplex_size", max_size, f"simplex of size {k}")
    if k == 1:
        return True
    pair = [[0] * k for _ in range(k)]
    for i, j in combinations(range(k), 2):
        c = index_mod_p(ctx, values[i] - values[j])
        pair[i][j] = pair[j][i] = c
    alpha = [0] * (1 << k)
    for mask in range(1, 1 << k):
        top = mask.bit_length() - 1
        rest = mask ^ (1 << top)
        acc = alpha[rest]
        bits = rest
        while bits:
            low = (bits & -bits).bit_length() - 1
            acc += pair[top][low]
            bits &= bits - 1
        alpha[mask] = acc % ctx.p
        if rest and not index_in_q(ctx, alpha[mask]):
            return False
    return True


@dataclass(frozen=True)
class XnpOracle:
    """X_{n,p} as a membership oracle on F_n."""

    ctx: FieldCtx
    dim_cap: int
    max_size: int = 12

    @property
    def vertex_count(self) -> int:
        return self.ctx.n

    def vertices(self) -> Iterable[int]:
        return range(self.ctx.n)

    def has_vertex(self, v: int) -> bool:
        return 0 <= v < self.ctx.n

    def sample_vertex(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.ctx.n))

    def contains(self, simplex: Simplex) -> bool:
        if not simplex or len(simplex) > self.dim_cap + 1:
            return False
        if not all(0 <= v < self.ctx.n for v in simplex) or len(set(simplex)) != len(simplex):
            return False
        return xnp_contains(self.ctx, simplex, self.max_size)

    def spec(self) -> str:
        return f"xnp:n={self.ctx.n},p={self.ctx.p},g={self.ctx.g},dim={self.dim_cap}"


def affine_image(ctx: FieldCtx, sigma: Iterable[int], a: int, b: int) -> Simplex:
    """x -> a x + b with a in H."""
    if a % ctx.n == 0 or index_mod_p(ctx, a) != 0:
        raise ComplexInputError(f"{a} is not in the subgroup H")
    return tuple(sorted((a * v + b) % ctx.n for v in sigma))


# Witness solver


def _subsets(U: Sequence[int]) -> List[Simplex]:
    return [s for k in range(1, len(U) + 1) for s in combinations(U, k)]


@dataclass
class WitnessProblem:
    """Realise the pattern Y over U: find x with σ ∪ {x} a hyperedge iff σ ∈ Y.

    ``U`` is kept in ascending order; that order drives the induction.
    """

    ctx: FieldCtx
    U: Tuple[int, ...]
    Y: FrozenSet[Simplex]
    xi: List[int] = field(default_factory=list)
    delta: Dict[Simplex, int] = field(default_factory=dict)
    alpha: Dict[Simplex, int] = field(default_factory=dict)

    @classmethod
    def create(cls, ctx: FieldCtx, U: Iterable[int], Y: Iterable[Iterable[int]]) -> "WitnessProblem":
        verts = tuple(sorted(_distinct(ctx, U)))
        members = frozenset(tuple(sorted(int(v) % ctx.n for v in s)) for s in Y)
        allowed = set(verts)
        for s in members:
            if not s or not set(s) <= allowed:
                raise ComplexInputError(f"pattern member {list(s)} is not a nonempty subset of U")
        problem = cls(ctx, verts, members)
        problem.alpha = {s: alpha_index(ctx, s) for s in _subsets(verts)}
        return problem

    @property
    def r(self) -> int:
        return len(self.U)

    def top(self, sigma: Simplex) -> int:
        return self.U.index(sigma[-1])


@dataclass
class SolveResult:
    x: int
    xi: List[int]
    trace: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"x": self.x, "xi": list(self.xi), "trace": self.trace}


def _wanted(problem: WitnessProblem, sigma: Simplex, value: int) -> bool:
    """Solver target: a nonzero square for members of Y, a non-square otherwise."""
    value %= problem.ctx.p
    if value == 0:
        return False
    return (value in problem.ctx.residues) == (sigma in problem.Y)


def forbidden_values(problem: WitnessProblem, level: int, xi: Sequence[int]) -> Set[int]:
    """ξ-values at ``level`` that would make two δ's with a common later top coincide."""
    p = problem.ctx.p
    U = problem.U
    u_level = U[level]
    blocked: Set[int] = set()
    for i in range(level + 1, len(U)):
        lower = U[:i]
        family = [tuple(sorted(s + (U[i],))) for k in range(0, i + 1) for s in combinations(lower, k)]
        for sigma in family:
            if u_level not in sigma:
                continue
            for other in family:
                diff = set(sigma) ^ set(other)
                if not diff or max(diff) != u_level:
                    continue
                only_sigma = [v for v in sigma if v not in other and v != u_level]
                only_other = [v for v in other if v not in sigma]
                value = (
                    problem.alpha[other]
                    + sum(xi[U.index(v)] for v in only_other)
                    - problem.alpha[sigma]
                    - sum(xi[U.index(v)] for v in only_sigma)
                )
                blocked.add(value % p)
    return blocked


def _level_candidates(problem: WitnessProblem, level: int, xi: Sequence[int]) -> List[int]:
    U = problem.U
    top = U[level]
    constrained = [
        tuple(sorted(s + (top,)))
        for k in range(0, level + 1)
        for s in combinations(U[:level], k)
    ]
    deltas = {
        sigma: (problem.alpha[sigma] + sum(xi[U.index(v)] for v in sigma if v != top)) % problem.ctx.p
        for sigma in constrained
    }
    blocked = forbidden_values(problem, level, xi)
    return [
        value
        for value in range(problem.ctx.p)
        if value not in blocked and all(_wanted(problem, s, value + d) for s, d in deltas.items())
    ]


def _assign_exponents(problem: WitnessProblem, trace: Dict[str, Any]) -> List[int]:
    """Depth-first over levels, candidates ascending."""
    r = problem.r
    xi: List[int] = []
    stack: List[List[int]] = []
    stuck = 0
    backtracks = 0
    while len(xi) < r:
        level = len(xi)
        if len(stack) == level:
            stack.append(_level_candidates(problem, level, xi))
            trace["candidates"].append(len(stack[-1]))
        options = stack[level]
        if options:
            xi.append(options.pop(0))
            continue
        stuck = max(stuck, level + 1)
        stack.pop()
        if not xi:
            raise UnsatisfiableLevelError(stuck)
        xi.pop()
        backtracks += 1
    trace["backtracks"] = backtracks
    return xi


def _x_matches(ctx: FieldCtx, U: Sequence[int], xi: Sequence[int], x: int) -> bool:
    for u, target in zip(U, xi):
        if x == u or ctx.indexer.index(x - u) != target:
            return False
    return True


def solve_witness(
    problem: WitnessProblem,
    x_search: str = "auto",
    seed: int = 0,
    challenge_id: int = 0,
    max_trials: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> SolveResult:
    """Choose ξ level by level, then locate x with (x - u_i) in g^{ξ_i} H."""
    settings = settings or Settings()
    ctx = problem.ctx
    if problem.r < 1:
        raise ComplexInputError("the witness problem needs a nonempty U")
    if problem.r > settings.solver.max_r:
        raise BudgetExceededError("solver.max_r", settings.solver.max_r, f"r={problem.r}")

    trace: Dict[str, Any] = {"candidates": [], "backtracks": 0, "x_trials": 0}
    xi = _assign_exponents(problem, trace)
    problem.xi = xi
    problem.delta = {
        sigma: (problem.alpha[sigma] + sum(xi[problem.U.index(v)] for v in sigma[:-1])) % ctx.p
        for sigma in _subsets(problem.U)
    }

    if x_search == "auto":
        x_search = "exhaustive" if ctx.n <= settings.field.exhaustive_x_cap else "sampled"
    x: Optional[int] = None
    if x_search == "exhaustive":
        for candidate in range(ctx.n):
            trace["x_trials"] += 1
            if _x_matches(ctx, problem.U, xi, candidate):
                x = candidate
                break
        if x is None:
            raise UnsatisfiableLevelError(problem.r + 1, "no field element realises the exponents")
    elif x_search == "sampled":
        limit = max_trials or settings.field.x_trials_factor * ctx.p ** problem.r
        rng = derive_rng(seed, "solve", challenge_id)
        while x is None and trace["x_trials"] < limit:
            batch = rng.integers(0, ctx.n, size=min(_X_BATCH, limit - trace["x_trials"]))
            for candidate in batch.tolist():
                trace["x_trials"] += 1
                if _x_matches(ctx, problem.U, xi, candidate):
                    x = candidate
                    break
        if x is None:
            raise TrialBudgetError("max_trials", limit, "x-search exhausted")
    else:
        raise ComplexInputError(f"unknown x-search '{x_search}'")

    _check_solution(problem, x)
    trace["delta"] = {",".join(map(str, s)): d for s, d in sorted(problem.delta.items())}
    logger.debug("solved U=%s with x=%d after %d trials", problem.U, x, trace["x_trials"])
    return SolveResult(x=x, xi=list(xi), trace=trace)


def _check_solution(problem: WitnessProblem, x: int) -> None:
    ctx = problem.ctx
    for u, target in zip(problem.U, problem.xi):
        if index_mod_p(ctx, x - u) != target:
            raise AmpleError(f"coset condition fails at u={u}")
    for sigma in _subsets(problem.U):
        total = problem.alpha[sigma] + sum(problem.xi[problem.U.index(v)] for v in sigma)
        if index_in_q(ctx, total) != (sigma in problem.Y):
            raise AmpleError(f"pattern condition fails at {list(sigma)}")


def challenge_check(
    ctx: FieldCtx,
    U: Iterable[int],
    Y: Iterable[Iterable[int]],
    x: int,
    semantics: str = "auto",
    max_size: int = 12,
) -> bool:
    """Re-check a witness by raw membership, independent of the solver."""
    verts = tuple(sorted(_distinct(ctx, U)))
    x %= ctx.n
    if x in verts:
        raise ComplexInputError("the witness must lie outside U")
    members = frozenset(tuple(sorted(int(v) % ctx.n for v in s)) for s in Y)
    if semantics == "auto":
        closed = all(face in members for s in members for face in _subsets(s))
        inside = all(xnp_contains(ctx, s, max_size) for s in members)
        semantics = "subcomplex" if closed and inside else "hypergraph"
    for sigma in _subsets(verts):
        extended = tuple(sorted(sigma + (x,)))
        if semantics == "subcomplex":
            present = xnp_contains(ctx, extended, max_size)
        elif semantics == "hypergraph":
            present = hnp_has_hyperedge(ctx, extended)
        else:
            raise ComplexInputError(f"unknown semantics '{semantics}'")
        if present != (sigma in members):
            return False
    return True


@dataclass(frozen=True)
class CertifiedParams:
    r: int
    p: int
    n: int
    g: int
    lower: int
    in_window: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "p": self.p,
            "n": self.n,
            "g": self.g,
            "lower": self.lower,
            "in_window": self.in_window,
        }


def certified_params(r: int, settings: Optional[Settings] = None) -> CertifiedParams:
    """Least prime p in (2^(2^r+2r), 2^(2^r+2r+1)), then the least prime n = 1 mod p above r^2 p^(2r)."""
    settings = settings or Settings()
    if r < 1:
        raise ComplexInputError("r must be at least 1")
    low = 1 << ((1 << r) + 2 * r)
    p = low + 1
    while not is_prime_u64(p):
        p += 1
    if p >= 2 * low:
        raise AmpleError(f"no prime in ({low}, {2 * low})")
    lower = r * r * p ** (2 * r)
    if lower >= MODULUS_LIMIT:
        bits = lower.bit_length() + 1
        raise FieldRangeError(f"r={r} requires ~{bits}-bit modulus", required_bits=bits)
    n = next_prime_in_ap(p, lower)
    ctx = FieldCtx.create(n, p, factor_limit=settings.budgets.factor_trial_limit)
    return CertifiedParams(r=r, p=p, n=n, g=ctx.g, lower=lower, in_window=in_window(p, lower, n))


def random_problem(ctx: FieldCtx, r: int, rng: np.random.Generator) -> WitnessProblem:
    """r distinct random field elements and a random family of their subsets."""
    if r > ctx.n:
        raise ComplexInputError("r exceeds the field size")
    chosen: List[int] = []
    while len(chosen) < r:
        v = int(rng.integers(ctx.n))
        if v not in chosen:
            chosen.append(v)
    U = sorted(chosen)
    subsets = _subsets(U)
    keep = rng.integers(0, 2, size=len(subsets))
    Y = [s for s, flag in zip(subsets, keep.tolist()) if flag]
    return WitnessProblem.create(ctx, U, Y)


@dataclass
class ExploreSummary:
    """Solver outcomes against brute-force witnesses below the certified thresholds."""

    n: int
    p: int
    r: int
    trials: int
    solved: int = 0
    solver_failed_witness_exists: int = 0
    no_witness: int = 0
    cases: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p": self.p,
            "r": self.r,
            "trials": self.trials,
            "solved": self.solved,
            "solver_failed_witness_exists": self.solver_failed_witness_exists,
            "no_witness": self.no_witness,
            "cases": self.cases,
        }


def explore(ctx: FieldCtx, r: int, trials: int, seed: int = 0, settings: Optional[Settings] = None) -> ExploreSummary:
    """Compare the solver with exhaustive witness search on random subcomplex patterns."""
    settings = settings or Settings()
    oracle = XnpOracle(ctx, dim_cap=r + 1, max_size=settings.budgets.max_simplex_size)
    summary = ExploreSummary(n=ctx.n, p=ctx.p, r=r, trials=trials)
    for index in range(trials):
        rng = derive_rng(seed, "explore", index)
        chosen: List[int] = []
        while len(chosen) < r:
            v = int(rng.integers(ctx.n))
            if v not in chosen:
                chosen.append(v)
        U = tuple(sorted(chosen))
        patterns = list(enumerate_subcomplexes(induced(oracle, U)))
        key = patterns[int(rng.integers(len(patterns)))]
        Y = sorted(key, key=lambda s: (len(s), s))
        problem = WitnessProblem.create(ctx, U, Y)
        try:
            result = solve_witness(problem, x_search="exhaustive", settings=settings)
            summary.solved += 1
            status = "solved"
            x: Optional[int] = result.x
        except (UnsatisfiableLevelError, TrialBudgetError):
            x = find_witness(oracle, AmpleChallenge.of(U, Y))
            if x is None:
                summary.no_witness += 1
                status = "no_witness"
            else:
                summary.solver_failed_witness_exists += 1
                status = "solver_failed_witness_exists"
        summary.cases.append({"U": list(U), "Y": [list(s) for s in Y], "status": status, "x": x})
    return summary
