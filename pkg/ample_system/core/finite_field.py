"""
Prime-field arithmetic for the Paley-type constructions: 64-bit primality,
primitive roots, order-m coset indices and the set Q_{n,p}.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from .errors import BudgetExceededError, ComplexInputError, FieldRangeError

logger = logging.getLogger(__name__)

MODULUS_LIMIT = 1 << 63
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_DLOG_BLOCK = 4096


def _check_modulus(n: int) -> None:
    if n < 2 or n >= MODULUS_LIMIT:
        raise FieldRangeError(f"modulus {n} outside [2, 2^63)", required_bits=max(n.bit_length(), 2))


def mulmod(a: int, b: int, n: int) -> int:
    _check_modulus(n)
    return (a * b) % n


def powmod(a: int, b: int, n: int) -> int:
    _check_modulus(n)
    if b < 0:
        raise ComplexInputError("negative exponents are not supported")
    return pow(a % n, b, n)


def is_prime_u64(n: int) -> bool:
    """Deterministic Miller-Rabin; the fixed base set is exact below 3.3e24."""
    if n >= 1 << 64:
        raise FieldRangeError(f"{n} exceeds 64 bits", required_bits=n.bit_length())
    if n < 2:
        return False
    for q in MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize_trial(n: int, limit: int = 100_000_000) -> Dict[int, int]:
    """Prime factorization by trial division, stopping once the cofactor is prime."""
    if n < 1:
        raise ComplexInputError("can only factor positive integers")
    factors: Dict[int, int] = {}
    divisions = 0
    remaining = n
    d = 2
    prime_cofactor = remaining > 1 and is_prime_u64(remaining)
    while remaining > 1 and not prime_cofactor and d * d <= remaining:
        divisions += 1
        if divisions > limit:
            raise BudgetExceededError("factor_trial_limit", limit, f"factoring {n}")
        if remaining % d == 0:
            while remaining % d == 0:
                factors[d] = factors.get(d, 0) + 1
                remaining //= d
            prime_cofactor = remaining > 1 and is_prime_u64(remaining)
        d = 3 if d == 2 else d + 2
    if remaining > 1:
        factors[remaining] = factors.get(remaining, 0) + 1
    return factors


def has_full_order(g: int, n: int, prime_factors: List[int]) -> bool:
    return g % n != 0 and all(pow(g, (n - 1) // q, n) != 1 for q in prime_factors)


def find_primitive_root(n: int, limit: int = 100_000_000) -> int:
    """Least generator of the multiplicative group mod the odd prime n."""
    _check_modulus(n)
    if n == 2 or not is_prime_u64(n):
        raise ComplexInputError(f"{n} is not an odd prime")
    primes = sorted(factorize_trial(n - 1, limit))
    g = 2
    while not has_full_order(g, n, primes):
        g += 1
    return g


def next_prime_in_ap(p: int, lower: int) -> int:
    """Least prime n = p*k + 1 with n > lower."""
    if lower >= MODULUS_LIMIT:
        raise FieldRangeError(f"search start {lower} exceeds 2^63", required_bits=lower.bit_length() + 1)
    k = max(1, -(-lower // p))
    while True:
        candidate = p * k + 1
        if candidate >= MODULUS_LIMIT:
            raise FieldRangeError("prime search left the 63-bit range", required_bits=64)
        if is_prime_u64(candidate):
            if not in_window(p, lower, candidate):
                logger.warning("prime %d for p=%d lies outside (lower, sqrt(p)*lower)", candidate, p)
            return candidate
        k += 1


def in_window(p: int, lower: int, n: int) -> bool:
    """lower < n < sqrt(p) * lower, compared exactly."""
    return lower < n and n * n < p * lower * lower


class CosetIndexer:
    """Index of x in F_q^* / (F_q^*)^m relative to the generator g."""

    def __init__(self, q: int, m: int, g: int):
        if m < 1 or (q - 1) % m:
            raise ComplexInputError(f"order {m} must divide q - 1 = {q - 1}")
        self.q = q
        self.m = m
        self.g = g
        self.cofactor = (q - 1) // m
        root = pow(g, self.cofactor, q)
        self.roots: Tuple[int, ...] = tuple(pow(root, j, q) for j in range(m))
        if len(set(self.roots)) != m:
            raise ComplexInputError(f"{g} does not generate F_{q}^*")
        self.lookup: Dict[int, int] = {w: j for j, w in enumerate(self.roots)}

    def index(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ComplexInputError("0 has no coset index")
        return self.lookup[pow(x, self.cofactor, self.q)]


@dataclass(frozen=True)
class FieldCtx:
    """F_n with primitive root g and the index-p subgroup H = <g^p>."""

    n: int
    p: int
    g: int
    indexer: CosetIndexer
    residues: FrozenSet[int]
    dlog_cap: int

    @classmethod
    def create(
        cls,
        n: int,
        p: int,
        g: Optional[int] = None,
        dlog_cap: int = 1 << 24,
        factor_limit: int = 100_000_000,
    ) -> "FieldCtx":
        _check_modulus(n)
        if n == 2 or not is_prime_u64(n):
            raise ComplexInputError(f"n = {n} must be an odd prime")
        if p == 2 or not is_prime_u64(p):
            raise ComplexInputError(f"p = {p} must be an odd prime")
        if (n - 1) % p:
            raise ComplexInputError(f"p = {p} must divide n - 1 = {n - 1}")
        if g is None:
            g = find_primitive_root(n, factor_limit)
        else:
            primes = sorted(factorize_trial(n - 1, factor_limit))
            if not has_full_order(g, n, primes):
                raise ComplexInputError(f"g = {g} is not a primitive root mod {n}")
        residues = frozenset(b * b % p for b in range(1, p))
        logger.debug("field ctx n=%d p=%d g=%d", n, p, g)
        return cls(n, p, g, CosetIndexer(n, p, g), residues, dlog_cap)

    @property
    def subgroup_order(self) -> int:
        return (self.n - 1) // self.p

    @property
    def q_size(self) -> int:
        """|Q_{n,p}| = (p + 1)(n - 1) / (2p)."""
        return (self.p + 1) * self.subgroup_order // 2

    @cached_property
    def dlog_table(self) -> np.ndarray:
        """Full discrete-log table, filled block by block."""
        if self.n > self.dlog_cap:
            raise BudgetExceededError("dlog_cap", self.dlog_cap, f"n = {self.n}")
        n = self.n
        table = np.full(n, -1, dtype=np.int64)
        block = min(_DLOG_BLOCK, n - 1)
        steps = np.empty(block, dtype=np.int64)
        acc = 1
        for k in range(block):
            steps[k] = acc
            acc = acc * self.g % n
        stride = acc
        base = 1
        offsets = np.arange(block, dtype=np.int64)
        for start in range(0, n - 1, block):
            count = min(block, n - 1 - start)
            values = (steps[:count] * base) % n
            table[values] = start + offsets[:count]
            base = base * stride % n
        return table

    def spec(self) -> str:
        return f"field:n={self.n},p={self.p},g={self.g}"


def index_mod_p(ctx: FieldCtx, x: int, method: str = "subgroup") -> int:
    """The j in F_p with x in g^j H."""
    x %= ctx.n
    if x == 0:
        raise ComplexInputError("index_mod_p is undefined at 0")
    if method == "subgroup":
        return ctx.indexer.index(x)
    if method == "dlog":
        return int(ctx.dlog_table[x]) % ctx.p
    raise ComplexInputError(f"unknown index method '{method}'")


def index_in_q(ctx: FieldCtx, j: int) -> bool:
    """Whether the coset class j is 0 or a quadratic residue mod p."""
    j %= ctx.p
    return j == 0 or j in ctx.residues


def in_Qnp(ctx: FieldCtx, x: int) -> bool:
    return index_in_q(ctx, index_mod_p(ctx, x))


def q_elements(ctx: FieldCtx) -> List[int]:
    """Q_{n,p} listed (small fields only)."""
    return [x for x in range(1, ctx.n) if in_Qnp(ctx, x)]


def q_degree(ctx: FieldCtx, c: int, brute_cap: int = 1 << 20) -> int:
    """|{x : x - c in Q_{n,p}}|; brute force on small fields, coset count above.

    Above ``brute_cap`` one neighbour candidate c + g^j per coset class is
    tested; membership is constant on each coset c + g^j H.
    """
    c %= ctx.n
    if ctx.n <= brute_cap:
        return sum(1 for x in range(ctx.n) if x != c and in_Qnp(ctx, x - c))
    classes = 0
    step = 1
    for _ in range(ctx.p):
        if in_Qnp(ctx, (c + step) % ctx.n - c):
            classes += 1
        step = step * ctx.g % ctx.n
    return classes * ctx.subgroup_order
