"""
Multiplicative characters of prime fields and exact audits of the Weil bound
and of the coset-intersection count behind the witness solver.

Sums of m-th roots of unity are carried as integer count vectors indexed by
the exponent; two vectors denote the same number iff they agree modulo the
m-th cyclotomic polynomial.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Poly, cyclotomic_poly, symbols

from .errors import BudgetExceededError, ComplexInputError
from .finite_field import CosetIndexer, find_primitive_root, is_prime_u64
from .seeding import derive_rng

logger = logging.getLogger(__name__)

# exponent symbol for chi(0) = 0
ZERO = -1

_X = symbols("x")
_ROW_BLOCK = 64


@dataclass(frozen=True)
class CharCtx:
    """Character of order m on F_q: chi(alpha^k) = omega^(k mod m)."""

    q: int
    m: int
    alpha: int
    indexer: CosetIndexer

    @classmethod
    def create(cls, q: int, m: int, alpha: Optional[int] = None, max_q: int = 1_000_000) -> "CharCtx":
        if q > max_q:
            raise BudgetExceededError("charsum_max_q", max_q, f"q={q}")
        if q == 2 or not is_prime_u64(q):
            raise ComplexInputError(f"q = {q} must be an odd prime")
        if m < 2 or (q - 1) % m:
            raise ComplexInputError(f"m = {m} must be > 1 and divide q - 1")
        alpha = find_primitive_root(q) if alpha is None else alpha
        return cls(q, m, alpha, CosetIndexer(q, m, alpha))

    @cached_property
    def table(self) -> np.ndarray:
        """chi exponent of every field element (ZERO at 0)."""
        out = np.full(self.q, ZERO, dtype=np.int64)
        value = 1
        for k in range(self.q - 1):
            out[value] = k % self.m
            value = value * self.alpha % self.q
        return out

    def shifted(self, c: int) -> np.ndarray:
        """chi exponents of x - c for x = 0..q-1."""
        return self.table[(np.arange(self.q, dtype=np.int64) - c) % self.q]


def chi_exponent(ctx: CharCtx, x: int) -> int:
    x %= ctx.q
    if x == 0:
        return ZERO
    return ctx.indexer.index(x)


# exact arithmetic in Z[omega]


def cyclotomic_reduce(vector: Sequence[int], m: int) -> Tuple[int, ...]:
    """Canonical coefficients of sum_t vector[t] omega^t modulo Phi_m."""
    poly = Poly(list(reversed([int(v) for v in vector])), _X)
    remainder = poly.rem(Poly(cyclotomic_poly(m, _X), _X))
    coeffs = [int(c) for c in reversed(remainder.all_coeffs())]
    degree = Poly(cyclotomic_poly(m, _X), _X).degree()
    coeffs += [0] * (degree - len(coeffs))
    return tuple(coeffs[:degree])


def same_value(a: Sequence[int], b: Sequence[int], m: int) -> bool:
    return cyclotomic_reduce(a, m) == cyclotomic_reduce(b, m)


def magnitude(vector: Sequence[int], m: int) -> float:
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    return float(abs(np.dot(np.asarray(vector, dtype=np.float64), roots)))


# Weil bound


@dataclass(frozen=True)
class WeilAudit:
    roots: Tuple[int, ...]
    multiplicities: Tuple[int, ...]
    vector: Tuple[int, ...]
    magnitude: float
    bound: float
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "roots": list(self.roots),
            "multiplicities": list(self.multiplicities),
            "magnitude": self.magnitude,
            "bound": self.bound,
            "holds": self.holds,
        }


def character_sum_vector(ctx: CharCtx, roots: Sequence[int], multiplicities: Sequence[int]) -> np.ndarray:
    """sum_x chi(prod (x - c_i)^(j_i)) as counts per power of omega."""
    total = np.zeros(ctx.q, dtype=np.int64)
    valid = np.ones(ctx.q, dtype=bool)
    for c, j in zip(roots, multiplicities):
        if j % ctx.m == 0:
            continue
        shifted = ctx.shifted(c)
        valid &= shifted != ZERO
        total += j * shifted
    return np.bincount(total[valid] % ctx.m, minlength=ctx.m)


def weil_sum(ctx: CharCtx, roots: Sequence[int], multiplicities: Sequence[int], tolerance: float = 1e-6) -> WeilAudit:
    """|sum_x chi(f(x))| against (d - 1) sqrt(q) for f = prod (x - c_i)^(j_i)."""
    roots = tuple(int(c) % ctx.q for c in roots)
    mults = tuple(int(j) for j in multiplicities)
    if len(roots) != len(mults) or not roots:
        raise ComplexInputError("need one multiplicity per root")
    if len(set(roots)) != len(roots):
        raise ComplexInputError("roots must be distinct")
    if any(not 0 <= j < ctx.m for j in mults):
        raise ComplexInputError(f"multiplicities must lie in [0, {ctx.m})")
    if all(j == 0 for j in mults):
        raise ComplexInputError("f is an m-th power")
    d = sum(1 for j in mults if j)
    vector = character_sum_vector(ctx, roots, mults)
    size = magnitude(vector, ctx.m)
    bound = (d - 1) * math.sqrt(ctx.q)
    return WeilAudit(roots, mults, tuple(int(v) for v in vector), size, bound, size <= bound + tolerance)


# Coset intersection count


@dataclass(frozen=True)
class CosetInstance:
    """Conditions x - c_i in alpha^(t_i) A for i = 1..d."""

    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ComplexInputError("an instance needs d >= 1 conditions")
        shifts = [c for c, _ in self.pairs]
        if len(set(shifts)) != len(shifts):
            raise ComplexInputError("shift points must be distinct")

    @property
    def d(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class CosetAudit:
    instance: CosetInstance
    N: int
    bound: float
    bound_holds: bool
    direct_sum: int
    expansion_agrees: bool
    upper_bracket: bool
    lower_bracket: bool
    s_values_ok: bool

    @property
    def holds(self) -> bool:
        return (
            self.bound_holds
            and self.expansion_agrees
            and self.upper_bracket
            and self.lower_bracket
            and self.s_values_ok
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": [c for c, _ in self.instance.pairs],
            "t": [t for _, t in self.instance.pairs],
            "N": self.N,
            "bound": self.bound,
            "slack": self.N - self.bound,
            "bound_holds": self.bound_holds,
            "sum_S": self.direct_sum,
            "expansion_agrees": self.expansion_agrees,
            "bracket_holds": self.upper_bracket and self.lower_bracket,
            "s_values_ok": self.s_values_ok,
        }


def count_bound_holds(N: int, q: int, m: int, d: int) -> bool:
    """N >= q/m^d - (d-1) sqrt(q) - d/m, decided in exact arithmetic."""
    # N - q/m^d + d/m >= -(d-1) sqrt(q)
    slack = Fraction(N) - Fraction(q, m ** d) + Fraction(d, m)
    if slack >= 0:
        return True
    return slack * slack <= (d - 1) ** 2 * q


def _expansion_vector(ctx: CharCtx, shifted: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """sum_x S(x) expanded over all exponent tuples J in [0, m)^d."""
    d = shifted.shape[0]
    zero = shifted == ZERO
    relative = np.where(zero, 0, shifted - targets[:, None])
    rows = np.array(list(product(range(ctx.m), repeat=d)), dtype=np.int64)
    counts = np.zeros(ctx.m, dtype=np.int64)
    for start in range(0, len(rows), _ROW_BLOCK):
        J = rows[start : start + _ROW_BLOCK]
        exponents = (J @ relative) % ctx.m
        # chi(0)^j vanishes unless j = 0
        blocked = ((J != 0).astype(np.int64) @ zero.astype(np.int64)) > 0
        counts += np.bincount(exponents[~blocked], minlength=ctx.m)
    return counts


def coset_count(ctx: CharCtx, instance: CosetInstance) -> CosetAudit:
    """Brute-force N, the exact lower bound, and both evaluations of sum S(x)."""
    q, m, d = ctx.q, ctx.m, instance.d
    shifted = np.stack([ctx.shifted(c) for c, _ in instance.pairs])
    targets = np.array([t % m for _, t in instance.pairs], dtype=np.int64)
    matches = shifted == targets[:, None]
    zero = shifted == ZERO
    N = int(np.count_nonzero(matches.all(axis=0)))

    # S(x): m per matching condition, 1 where x = c_i, 0 on any mismatch
    mismatch = ~(matches | zero)
    s_values = np.where(mismatch.any(axis=0), 0, m ** matches.sum(axis=0))
    direct = int(s_values.sum())
    at_roots = zero.any(axis=0)
    s_ok = bool(
        np.all(s_values[matches.all(axis=0)] == m ** d)
        and np.all(s_values[~at_roots & ~matches.all(axis=0)] == 0)
        and np.all(s_values[at_roots] <= m ** (d - 1))
    )

    expansion = _expansion_vector(ctx, shifted, targets)
    direct_vector = [direct] + [0] * (m - 1)
    agrees = same_value(expansion.tolist(), direct_vector, m)

    upper = abs(direct) <= N * m ** d + d * m ** (d - 1)
    shortfall = direct - q
    reach = (m ** d - 1) * (d - 1)
    lower = shortfall >= 0 or shortfall * shortfall <= reach * reach * q

    bound = q / m ** d - (d - 1) * math.sqrt(q) - d / m
    return CosetAudit(
        instance=instance,
        N=N,
        bound=bound,
        bound_holds=count_bound_holds(N, q, m, d),
        direct_sum=direct,
        expansion_agrees=agrees,
        upper_bracket=upper,
        lower_bracket=lower,
        s_values_ok=s_ok,
    )


# Random instances


def _distinct_points(q: int, d: int, rng: np.random.Generator) -> List[int]:
    if d > q:
        raise ComplexInputError("more points requested than field elements")
    return [int(c) for c in rng.choice(q, size=d, replace=False)]


def random_instance(ctx: CharCtx, d: int, rng: np.random.Generator) -> CosetInstance:
    points = _distinct_points(ctx.q, d, rng)
    exps = rng.integers(0, ctx.m, size=d).tolist()
    return CosetInstance(tuple(zip(points, (int(t) for t in exps))))


def random_weil_polynomial(ctx: CharCtx, max_degree: int, rng: np.random.Generator) -> Tuple[List[int], List[int]]:
    """Distinct roots with multiplicities in [1, m): never an m-th power."""
    d = int(rng.integers(1, max_degree + 1))
    roots = _distinct_points(ctx.q, d, rng)
    mults = rng.integers(1, ctx.m, size=d).tolist()
    return roots, [int(j) for j in mults]


@dataclass
class AuditSummary:
    q: int
    m: int
    d: int
    trials: int
    coset_violations: int = 0
    weil_violations: int = 0
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return self.coset_violations == 0 and self.weil_violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "m": self.m,
            "d": self.d,
            "trials": self.trials,
            "coset_violations": self.coset_violations,
            "weil_violations": self.weil_violations,
            "rows": self.rows,
        }


def audit_batch(q: int, m: int, d: int, trials: int, seed: int = 0, max_q: int = 1_000_000) -> AuditSummary:
    """Random coset instances with d conditions plus random Weil polynomials of degree <= d+1."""
    ctx = CharCtx.create(q, m, max_q=max_q)
    summary = AuditSummary(q=q, m=m, d=d, trials=trials)
    for index in range(trials):
        rng = derive_rng(seed, f"charsum:{q}:{m}:{d}", index)
        audit = coset_count(ctx, random_instance(ctx, d, rng))
        roots, mults = random_weil_polynomial(ctx, min(d + 1, 4), rng)
        weil = weil_sum(ctx, roots, mults)
        if not audit.holds:
            summary.coset_violations += 1
        if not weil.holds:
            summary.weil_violations += 1
        row = audit.to_dict()
        row["weil"] = weil.to_dict()
        summary.rows.append(row)
    logger.info(
        "charsum audit q=%d m=%d d=%d: %d coset / %d weil violations",
        q, m, d, summary.coset_violations, summary.weil_violations,
    )
    return summary
