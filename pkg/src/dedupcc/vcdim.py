"""VC-dimension bounds for clustering classes over the pair space.

A class of clusterings acts on unordered pairs as 0/1 functions (co-clustered
or not).  For a class of s flat clusterings the VC dimension of that function
family is at most the smallest n with B_floor(sqrt(n)) >= s, where B is the
Bell number.  For a class of s trees (each contributing all its prunings)
the bound is n^2 for the smallest n such that every point set larger than n
has strictly more pair-partitions, n! / (floor(n/2)! * 2^floor(n/2)) of
them, than the class has trees.  Everything here is exact big-integer
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import factorial, isqrt
from typing import Optional

from .core import ClusteringClass, enumerate_prunings, pruning_to_clustering
from .errors import PairSetTooLargeError, ParameterError

BELL_MAX_N = 30
PAIRINGS_MAX_N = 20


def bell_number(n: int) -> int:
    """Number of set partitions of n elements, via the Bell triangle."""
    if not 0 <= n <= BELL_MAX_N:
        raise ParameterError(f"bell_number supports 0 <= n <= {BELL_MAX_N}, got {n}")
    if n == 0:
        return 1
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[-1]


def max_tree_pairings(n: int) -> int:
    """n! / (floor(n/2)! * 2^floor(n/2)): matchings a single tree can realize."""
    if not 1 <= n <= PAIRINGS_MAX_N:
        raise ParameterError(
            f"max_tree_pairings supports 1 <= n <= {PAIRINGS_MAX_N}, got {n}"
        )
    half = n // 2
    return factorial(n) // (factorial(half) * 2**half)


def g_flat(s: int) -> int:
    """Smallest n with bell_number(floor(sqrt(n))) >= s."""
    if s < 1:
        raise ParameterError(f"class size must be at least 1, got {s}")
    if s > bell_number(BELL_MAX_N):
        raise ParameterError(f"class size {s} beyond the supported Bell range")
    n = 0
    while bell_number(isqrt(n)) < s:
        n += 1
    return n


def g_tree(s: int) -> int:
    """n*n for the smallest n with max_tree_pairings(n + 1) > s.

    The bound rests on a pigeonhole over pair-partitions: a point set of any
    size above n admits strictly more pairings than the class has trees, and
    each tree realizes at most one pairing, so some pairing goes unrealized.
    The inequality must be strict and must hold at n + 1 (pairing counts
    repeat between odd sizes and their even successors, so ">= s at n" alone
    says nothing about larger sets).
    """
    if s < 1:
        raise ParameterError(f"class size must be at least 1, got {s}")
    if s >= max_tree_pairings(PAIRINGS_MAX_N):
        raise ParameterError(f"class size {s} beyond the supported pairing range")
    n = 1
    while max_tree_pairings(n + 1) <= s:
        n += 1
    return n * n


def class_vc_bound(cls: ClusteringClass) -> int:
    """Bound for a mixed class: flat and tree bounds joined by a union step.

    A pure class uses its own bound directly; mixing adds the two bounds plus
    one, the standard cost of a union of two function families.
    """
    s, r = len(cls.flats), len(cls.trees)
    if r == 0:
        return g_flat(s)
    if s == 0:
        return g_tree(r)
    return g_flat(s) + g_tree(r) + 1


SHATTER_MAX_PAIRS = 16


def _member_labelings(cls: ClusteringClass, pair_set) -> set:
    """Distinct 0/1 label vectors the class realizes on the given pairs."""
    labelings = set()
    for flat in cls.flats:
        labelings.add(tuple(flat.same(x, y) for x, y in pair_set))
    for tree in cls.trees:
        for frontier in enumerate_prunings(tree):
            member = pruning_to_clustering(tree, frontier)
            labelings.add(tuple(member.same(x, y) for x, y in pair_set))
    return labelings


def shatter_check(cls: ClusteringClass, pair_set) -> int:
    """1 iff every labeling of the pair set is realized by some class member."""
    pairs = list(pair_set)
    if len(pairs) > SHATTER_MAX_PAIRS:
        raise PairSetTooLargeError(
            f"shatter_check enumerates at most {SHATTER_MAX_PAIRS} pairs, got {len(pairs)}"
        )
    return 1 if len(_member_labelings(cls, pairs)) == 2 ** len(pairs) else 0


def find_largest_shattered(cls: ClusteringClass, pair_universe, cap: Optional[int] = None):
    """Exhaustive search for the largest shattered subset of the pair universe.

    Returns (size, witness).  Only sensible on tiny domains.  The class's
    distinct labelings over the whole universe are collected once; a size k
    is impossible outright when 2^k exceeds their number, and candidate
    subsets are checked by projecting those labelings.  The search walks
    sizes upward and stops at the first size with no shattered set.
    """
    universe = list(pair_universe)
    labelings = list(_member_labelings(cls, universe))
    best_size, witness = 0, ()
    limit = len(universe) if cap is None else min(cap, len(universe))
    for size in range(1, limit + 1):
        want = 2**size
        if want > len(labelings):
            break
        found = None
        for idx in combinations(range(len(universe)), size):
            seen = set()
            for lab in labelings:
                seen.add(tuple(lab[i] for i in idx))
                if len(seen) == want:
                    break
            if len(seen) == want:
                found = tuple(universe[i] for i in idx)
                break
        if found is None:
            break
        best_size, witness = size, found
    return best_size, witness


@dataclass(frozen=True)
class VcReport:
    class_kind: str
    s: int
    bound: int
    shatter_witness: Optional[tuple] = None

    def as_json(self) -> dict:
        return {
            "class_kind": self.class_kind,
            "s": self.s,
            "bound": self.bound,
            "shatter_witness": (
                [list(p) for p in self.shatter_witness]
                if self.shatter_witness is not None
                else None
            ),
        }


def vc_report(class_kind: str, s: int) -> VcReport:
    if class_kind == "flat":
        return VcReport(class_kind="flat", s=s, bound=g_flat(s))
    if class_kind == "tree":
        return VcReport(class_kind="tree", s=s, bound=g_tree(s))
    raise ParameterError(f"class kind must be flat or tree, got {class_kind!r}")
