"""
Counting simplicial complexes on k labelled vertices (reduced Dedekind numbers).

A downward-closed family of subsets of [k] is stored as a 2^k-bit mask whose
bit s is set when the subset with bitmask s belongs to the family.
"""

import logging
from functools import lru_cache
from math import comb
from typing import List, Tuple

import numpy as np

from .errors import BudgetExceededError, ComplexInputError

logger = logging.getLogger(__name__)

# M'(k) for small k, used as a cross-check of the enumeration.
CLOSED_TABLE = {0: 1, 1: 2, 2: 5, 3: 19}

# Largest k whose downsets are listed explicitly; k = LISTED_K + 1 is counted.
LISTED_K = 5


@lru_cache(maxsize=None)
def downsets(k: int) -> Tuple[int, ...]:
    """All downward-closed families of subsets of [k], as bitmasks.

    A family D splits on the last variable into D0 (subsets without it) and
    D1 (subsets with it, variable removed); D is closed iff both halves are
    closed and D1 is contained in D0.
    """
    if k < 0:
        raise ComplexInputError("k must be non-negative")
    if k == 0:
        return (0, 1)
    smaller = downsets(k - 1)
    shift = 1 << (k - 1)
    result: List[int] = []
    for low in smaller:
        for high in smaller:
            if high & ~low == 0:
                result.append(low | (high << shift))
    return tuple(result)


def _count_by_pairs(k: int) -> int:
    """Number of downsets of 2^[k] without listing them (k = LISTED_K + 1)."""
    masks = np.array(downsets(k - 1), dtype=np.uint64)
    total = 0
    for low in masks:
        total += int(np.count_nonzero((masks & ~low) == 0))
    return total


def dedekind_number(k: int, max_k: int = 6) -> int:
    """M(k): number of downsets of the Boolean lattice on k elements."""
    if k < 0:
        raise ComplexInputError("k must be non-negative")
    if k > max_k or k > LISTED_K + 1:
        raise BudgetExceededError("max_dedekind_k", min(max_k, LISTED_K + 1), f"k={k}")
    if k <= LISTED_K:
        return len(downsets(k))
    logger.info("counting downsets of 2^[%d] by pairs", k)
    return _count_by_pairs(k)


def dedekind_reduced(k: int, max_k: int = 6, method: str = "enumerate") -> int:
    """M'(k): simplicial complexes on k labelled vertices, empty complex included."""
    if method == "table":
        if k not in CLOSED_TABLE:
            raise ComplexInputError(f"no closed-form value for k={k}")
        return CLOSED_TABLE[k]
    if method != "enumerate":
        raise ComplexInputError(f"unknown method '{method}'")
    # the empty downset has no counterpart; every other one contains the empty set
    return dedekind_number(k, max_k) - 1


def count_antichains(k: int) -> int:
    """Antichains of the Boolean lattice on k elements, by direct search.

    Independent of :func:`downsets`; equals M(k).
    """
    if k < 0 or k > LISTED_K:
        raise BudgetExceededError("antichain_k", LISTED_K, f"k={k}")
    elements = list(range(1 << k))

    def comparable(a: int, b: int) -> bool:
        return a & b == a or a & b == b

    def extend(start: int, chosen: List[int]) -> int:
        total = 1
        for idx in range(start, len(elements)):
            candidate = elements[idx]
            if all(not comparable(candidate, c) for c in chosen):
                chosen.append(candidate)
                total += extend(idx + 1, chosen)
                chosen.pop()
        return total

    return extend(0, [])


def binomial_lower_bound(k: int) -> int:
    """2^C(k, floor(k/2)): complexes spanned by the middle layer alone."""
    return 1 << comb(k, k // 2)
