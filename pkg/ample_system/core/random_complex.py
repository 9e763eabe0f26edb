"""
Random simplicial complexes in the lower model: a stored sampler, an implicit
hash oracle with the same coins, and the closed-form probability estimates.
"""

import hashlib
import logging
import math
import struct
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import ComplexInputError
from .simplex_core import ExplicitComplex, Simplex, external_faces

logger = logging.getLogger(__name__)

_TWO_64 = 1 << 64


@dataclass(frozen=True)
class ProbProfile:
    """Face probabilities: ``p_vertex`` for vertices, ``p`` (or ``per_dim``) above.

    ``per_dim[d - 1]`` overrides ``p`` for d-dimensional faces. ``medial`` is the
    lower bound of the window [medial, 1 - medial] every face probability must
    respect when set; ``mu`` records the shift the profile was derived from.
    """

    p_vertex: float = 1.0
    p: float = 0.5
    per_dim: Tuple[float, ...] = ()
    medial: Optional[float] = None
    mu: Optional[float] = None

    def __post_init__(self) -> None:
        for value in (self.p_vertex, self.p, *self.per_dim):
            if not 0.0 <= value <= 1.0:
                raise ComplexInputError(f"probability {value} outside [0, 1]")
        if self.medial is not None and not self.is_medial():
            raise ComplexInputError(
                f"face probabilities leave the medial window [{self.medial}, {1 - self.medial}]"
            )

    def p_of(self, simplex: Simplex) -> float:
        d = len(simplex) - 1
        if d == 0:
            return self.p_vertex
        if d - 1 < len(self.per_dim):
            return self.per_dim[d - 1]
        return self.p

    def is_medial(self) -> bool:
        if self.medial is None:
            return False
        low, high = self.medial, 1.0 - self.medial
        return all(low <= value <= high for value in (self.p, *self.per_dim))


def coin(simplex: Simplex, seed: int, probability: float) -> bool:
    """Keyed BLAKE2b coin over (dimension as <I, sorted ids as <Q each)."""
    payload = struct.pack("<I", len(simplex) - 1) + struct.pack(f"<{len(simplex)}Q", *simplex)
    digest = hashlib.blake2b(payload, digest_size=8, key=struct.pack("<Q", seed)).digest()
    return int.from_bytes(digest, "little") < int(probability * _TWO_64)


def sample_explicit(n: int, profile: ProbProfile, dim_cap: int, seed: int) -> ExplicitComplex:
    """Skeleton-by-skeleton sample on vertex candidates 0..n-1."""
    if dim_cap < 0:
        raise ComplexInputError("dim_cap must be non-negative")
    vertices = [v for v in range(n) if coin((v,), seed, profile.p_vertex)]
    simplices: List[Simplex] = []
    current = ExplicitComplex.build(vertices, simplices, dim_cap)
    for k in range(dim_cap):
        added = [s for s in external_faces(current, k + 1) if coin(s, seed, profile.p_of(s))]
        logger.debug("dimension %d: %d external faces kept", k + 1, len(added))
        if not added:
            break
        simplices.extend(added)
        current = ExplicitComplex.build(vertices, simplices, dim_cap)
    return current


@dataclass(frozen=True)
class HashComplexOracle:
    """Implicit lower-model complex on all n vertices.

    σ is present iff every face of dimension >= 1 passes its coin.
    """

    n: int
    profile: ProbProfile
    dim_cap: int
    seed: int

    def __post_init__(self) -> None:
        if self.profile.p_vertex != 1.0:
            raise ComplexInputError("the hash oracle needs p_vertex = 1")
        if self.n < 1:
            raise ComplexInputError("the hash oracle needs n >= 1")

    @property
    def vertex_count(self) -> int:
        return self.n

    def vertices(self) -> Iterable[int]:
        return range(self.n)

    def has_vertex(self, v: int) -> bool:
        return 0 <= v < self.n

    def sample_vertex(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.n))

    def contains(self, simplex: Simplex) -> bool:
        size = len(simplex)
        if size == 0 or size > self.dim_cap + 1:
            return False
        if not all(0 <= v < self.n for v in simplex):
            return False
        for k in range(2, size + 1):
            for face in combinations(simplex, k):
                if not coin(face, self.seed, self.profile.p_of(face)):
                    return False
        return True

    def spec(self) -> str:
        return f"hash:n={self.n},p={self.profile.p!r},dim={self.dim_cap},seed={self.seed}"


def oracle_contains(oracle: HashComplexOracle, simplex: Iterable[int]) -> bool:
    return oracle.contains(tuple(sorted(simplex)))


def lower_measure_probability(Y: ExplicitComplex, n: int, profile: ProbProfile) -> float:
    """P(Y) = prod over faces of p_σ times prod over external faces of (1 - p_σ)."""
    if any(v < 0 or v >= n for v in Y.vertex_set):
        raise ComplexInputError("complex vertices must lie in 0..n-1")
    factors: List[float] = []
    for simplex in Y.iter_simplices():
        factors.append(profile.p_of(simplex))
    for v in range(n):
        if v not in Y.vertex_set:
            factors.append(1.0 - profile.p_vertex)
    for d in range(1, Y.dim_cap + 1):
        factors.extend(1.0 - profile.p_of(s) for s in external_faces(Y, d))
    if any(f == 0.0 for f in factors):
        return 0.0
    log_terms = [math.log(f) for f in factors]
    return math.exp(math.fsum(log_terms))


@dataclass(frozen=True)
class BoundValue:
    log_value: float
    value: float


def _log_tail(n: int, r: int, p: float) -> float:
    power = p ** (2 ** r)
    if power >= 1.0:
        return -math.inf
    return (n - r) * math.log1p(-power)


def _check_bound_args(n: int, r: int, p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ComplexInputError("p must lie strictly between 0 and 1")
    if n <= r:
        raise ComplexInputError("need n > r")


def bound_not_ample(n: int, r: int, p: float) -> BoundValue:
    """Upper bound n^r 2^(2^r) (1 - p^(2^r))^(n - r) on P(not r-ample)."""
    _check_bound_args(n, r, p)
    log_value = math.fsum([r * math.log(n), (2 ** r) * math.log(2.0), _log_tail(n, r, p)])
    value = 1.0 if log_value >= 0.0 else math.exp(log_value)
    return BoundValue(log_value, value)


def bound_not_ample_sum(n: int, r: int, p: float) -> BoundValue:
    """Sharper form with sum_{j <= r} C(n, j) in place of n^r."""
    _check_bound_args(n, r, p)
    subsets = sum(comb(n, j) for j in range(0, r + 1))
    log_value = math.fsum([math.log(subsets), (2 ** r) * math.log(2.0), _log_tail(n, r, p)])
    value = 1.0 if log_value >= 0.0 else math.exp(log_value)
    return BoundValue(log_value, value)


def existence_threshold(r: int) -> int:
    """n0 = r 2^r 2^(2^r); above it an r-ample complex exists (r >= 5)."""
    if r < 1:
        raise ComplexInputError("r must be at least 1")
    if r < 5:
        logger.info("existence threshold for r=%d is informational (guarantee needs r >= 5)", r)
    return r * (1 << r) * (1 << (1 << r))


def existence_inequality(n: int, r: int, p: float) -> bool:
    """n p^(2^r) - r ln n > 2^r ln 2 + r p^(2^r)."""
    power = p ** (2 ** r)
    return n * power - r * math.log(n) > (2 ** r) * math.log(2.0) + r * power


def p_from_mu(n: int, r: int, mu: float) -> float:
    """Solve p^(2^r) = (r ln n + mu) / n for p."""
    ratio = (r * math.log(n) + mu) / n
    if not 0.0 < ratio < 1.0:
        raise ComplexInputError(f"(r ln n + mu)/n = {ratio} must lie in (0, 1)")
    return ratio ** (2.0 ** -r)


def mu_from_p(n: int, r: int, p: float) -> float:
    return n * p ** (2 ** r) - r * math.log(n)
