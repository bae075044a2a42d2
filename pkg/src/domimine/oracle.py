"""Exhaustive reference miners, written straight from the definitions.

Every subset of the items occurring in the database is generated and tested,
so these are only usable on small universes. They share nothing with the
search engine beyond the dataset kernels.
"""

from __future__ import annotations

from itertools import combinations

from .dataset import MiningInstance, support
from .engine import Solution

__all__ = ["UniverseTooLarge", "MAX_UNIVERSE", "brute_frequent", "brute_generators", "brute_closed"]

MAX_UNIVERSE = 24


class UniverseTooLarge(ValueError):
    pass


def _feasible(instance: MiningInstance, itemset: frozenset[int], supp: int) -> bool:
    if supp < instance.theta:
        return False
    if sum(instance.meta.values[i] for i in itemset) < instance.min_value:
        return False
    return instance.max_cost is None or sum(instance.meta.costs[i] for i in itemset) <= instance.max_cost


def _all_supports(instance: MiningInstance) -> dict[frozenset[int], int]:
    universe = instance.db.used_items
    if len(universe) > MAX_UNIVERSE:
        raise UniverseTooLarge(f"{len(universe)} items exceed the exhaustive limit of {MAX_UNIVERSE}")
    out = {}
    for k in range(len(universe) + 1):
        for combo in combinations(universe, k):
            s = frozenset(combo)
            out[s] = support(instance.db, s)
    return out


def brute_frequent(instance: MiningInstance) -> list[Solution]:
    """Every itemset with support >= theta that meets both side constraints."""
    return [
        Solution(s, n, len(s)) for s, n in _all_supports(instance).items() if _feasible(instance, s, n)
    ]


def _by_support(sets: dict[frozenset[int], int]) -> dict[int, list[frozenset[int]]]:
    groups: dict[int, list[frozenset[int]]] = {}
    for s, n in sets.items():
        groups.setdefault(n, []).append(s)
    return groups


def brute_generators(instance: MiningInstance, semantics: str = "feasible", check: str = "all") -> list[Solution]:
    """Frequent itemsets with no proper subset of equal support.

    ``semantics="feasible"`` only lets subsets that are themselves solutions
    disqualify a set, which is what blocking constraints built from found
    solutions can express. ``semantics="pure"`` is the textbook definition,
    where any subset counts. Under "pure", ``check="immediate"`` looks at the
    subsets one item smaller only, which suffices because support is
    anti-monotone.
    """
    supports = _all_supports(instance)
    feasible = {s: n for s, n in supports.items() if _feasible(instance, s, n)}
    groups = _by_support(feasible)
    out = []
    for s, n in feasible.items():
        if semantics == "pure":
            if check == "immediate":
                subsets = (s - {i} for i in s)
            else:
                subsets = (frozenset(c) for k in range(len(s)) for c in combinations(sorted(s), k))
            witnessed = any(supports[y] == n for y in subsets)
        elif semantics == "feasible":
            witnessed = any(y < s for y in groups[n])
        else:
            raise ValueError(f"unknown semantics {semantics!r}")
        if not witnessed:
            out.append(Solution(s, n, len(s)))
    return out


def brute_closed(instance: MiningInstance, semantics: str = "feasible") -> list[Solution]:
    """Frequent itemsets with no proper superset of equal support (see ``brute_generators``)."""
    supports = _all_supports(instance)
    feasible = {s: n for s, n in supports.items() if _feasible(instance, s, n)}
    groups = _by_support(feasible)
    universe = instance.db.used_items
    out = []
    for s, n in feasible.items():
        if semantics == "pure":
            witnessed = any(supports[s | {i}] == n for i in universe if i not in s)
        elif semantics == "feasible":
            witnessed = any(s < y for y in groups[n])
        else:
            raise ValueError(f"unknown semantics {semantics!r}")
        if not witnessed:
            out.append(Solution(s, n, len(s)))
    return out
