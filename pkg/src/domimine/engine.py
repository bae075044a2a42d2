"""Depth-first itemset enumeration under frequency, side and blocking constraints.

The search walks the set-enumeration tree over the frequent items. For an
item order ``i_0 < i_1 < ...`` every node ``P`` is visited before its
children, and the children ``P + a`` are tried from the largest item ``a``
down, each keeping only the items after ``a`` as its tail. This visits
itemsets in the same order as a binary search over item-inclusion variables
that tries ``exclude`` before ``include`` at every item, so a set is always
reached before any of its supersets.

Covers are Python integers used as bitsets over transactions; itemsets are
bitsets over item ids while searching.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .dataset import MiningInstance
from .model_dsl import (
    BlockingConstraint,
    Compare,
    EvalContext,
    Expr,
    Implies,
    IntLit,
    Not,
    SetLit,
    Var,
    compile_expr,
)

__all__ = [
    "Solution",
    "SearchConfig",
    "SearchStats",
    "SearchTimeout",
    "BlockStore",
    "enumerate_solutions",
    "level_bounds",
    "check_blocking",
    "items_mask",
    "mask_items",
]

BRANCH_ORDERS = ("default", "level_first")


@dataclass(frozen=True)
class Solution:
    itemset: frozenset[int]
    support: int
    level: int = 0

    def __str__(self):
        return "{" + ",".join(map(str, sorted(self.itemset))) + f"}}:{self.support}"


@dataclass
class SearchStats:
    nodes: int = 0
    solutions: int = 0
    active_blocks: int = 0
    wall_time: float = 0.0


class SearchTimeout(RuntimeError):
    def __init__(self, stats: SearchStats | None = None):
        super().__init__("search deadline exceeded")
        self.stats = stats


def items_mask(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << i
    return mask


def mask_items(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


class _SetFamily:
    """Item sets stored as per-item bitsets over entry indices.

    Containment queries then cost one big-integer operation per item instead
    of one subset test per stored set.
    """

    __slots__ = ("all", "by_item", "by_origin", "size")

    def __init__(self):
        self.all = 0
        self.by_item: dict[int, int] = {}
        self.by_origin: dict[int, int] = {}
        self.size = 0

    def add(self, s_mask: int, origin_mask: int) -> None:
        bit = 1 << self.size
        self.size += 1
        self.all |= bit
        by_item = self.by_item
        rest = s_mask
        while rest:
            low = rest & -rest
            rest ^= low
            i = low.bit_length() - 1
            by_item[i] = by_item.get(i, 0) | bit
        self.by_origin[origin_mask] = self.by_origin.get(origin_mask, 0) | bit

    def _drop(self, hits: int, exclude: int | None) -> int:
        if exclude is not None and hits:
            hits &= ~self.by_origin.get(exclude, 0)
        return hits

    def has_subset_of(self, mask: int, exclude: int | None = None) -> bool:
        """Some stored S with S subseteq mask."""
        outside = 0
        for i, bits in self.by_item.items():
            if not mask >> i & 1:
                outside |= bits
        return self._drop(self.all & ~outside, exclude) != 0

    def has_superset_of(self, mask: int, exclude: int | None = None) -> bool:
        """Some stored S with mask subseteq S."""
        hits = self.all
        by_item = self.by_item
        rest = mask
        while rest and hits:
            low = rest & -rest
            rest ^= low
            hits &= by_item.get(low.bit_length() - 1, 0)
        return self._drop(hits, exclude) != 0


class BlockStore:
    """Blocking constraints, indexed for fast rejection of candidates.

    Blocks of the two shapes produced by the built-in subset/superset
    relations are recognised after substitution and grouped by the support
    they forbid:

    * ``(S subsetEq itemset) -> (support != s)`` forbids supersets of S with support s
    * ``(itemset subsetEq S) -> (support != s)`` forbids subsets of S with support s
    * ``!(S subsetEq itemset)`` and ``!(itemset subsetEq S)`` forbid regardless of support

    Anything else is compiled and evaluated as is.
    """

    def __init__(self, ctx: EvalContext | None = None, blocks: Iterable[BlockingConstraint] = ()):
        self.ctx = ctx or EvalContext()
        self.blocks: list[BlockingConstraint] = []
        # forbidden support (None: any) -> sets S
        self._above: dict[int | None, _SetFamily] = {}
        self._below: dict[int | None, _SetFamily] = {}
        self._generic: list[tuple[Callable, frozenset | None]] = []
        for b in blocks:
            self.add(b)

    def __len__(self) -> int:
        return len(self.blocks)

    def add(self, block: BlockingConstraint) -> None:
        self.blocks.append(block)
        origin = getattr(block.origin, "itemset", None)
        origin_mask = -1 if origin is None else items_mask(origin)
        form = _fast_form(block.body)
        if form is None:
            self._generic.append((compile_expr(block.body, self.ctx), None if origin is None else frozenset(origin)))
            return
        direction, s_mask, supp = form
        table = self._above if direction == "above" else self._below
        family = table.get(supp)
        if family is None:
            family = table[supp] = _SetFamily()
        family.add(s_mask, origin_mask)

    @property
    def has_above(self) -> bool:
        return bool(self._above)

    @property
    def has_any_above(self) -> bool:
        """Some superset block forbids regardless of support."""
        return None in self._above

    def forbids(self, mask: int, supp: int, itemset: frozenset[int] | None = None, exclude: int | None = None) -> bool:
        """True when some block evaluates false on the candidate.

        ``exclude`` skips blocks originating from the solution with that item mask.
        """
        above = self._above
        if above:
            family = above.get(supp)
            if family is not None and family.has_subset_of(mask, exclude):
                return True
            family = above.get(None)
            if family is not None and family.has_subset_of(mask, exclude):
                return True
        below = self._below
        if below:
            family = below.get(supp)
            if family is not None and family.has_superset_of(mask, exclude):
                return True
            family = below.get(None)
            if family is not None and family.has_superset_of(mask, exclude):
                return True
        if self._generic:
            if itemset is None:
                itemset = mask_items(mask)
            skip = None if exclude is None else mask_items(exclude)
            for fn, origin in self._generic:
                if (skip is None or origin != skip) and not fn(itemset, supp):
                    return True
        return False

    def above_kind(self, mask: int, supp: int) -> int:
        """2 if a superset block forbids every extension of ``mask``, 1 if only
        extensions keeping support ``supp``, else 0."""
        family = self._above.get(None)
        if family is not None and family.has_subset_of(mask):
            return 2
        family = self._above.get(supp)
        if family is not None and family.has_subset_of(mask):
            return 1
        return 0


def _premise(e: Expr) -> tuple[str, int] | None:
    match e:
        case Compare("subsetEq", SetLit(s), Var("itemset")) | Compare("supsetEq", Var("itemset"), SetLit(s)):
            return "above", items_mask(s)
        case Compare("subsetEq", Var("itemset"), SetLit(s)) | Compare("supsetEq", SetLit(s), Var("itemset")):
            return "below", items_mask(s)
    return None


def _forbidden_support(e: Expr) -> int | None:
    match e:
        case Compare("!=", Var("support"), IntLit(s)) | Compare("!=", IntLit(s), Var("support")):
            return s
        case Not(Compare("=", Var("support"), IntLit(s)) | Compare("=", IntLit(s), Var("support"))):
            return s
    return None


def _fast_form(body: Expr) -> tuple[str, int, int | None] | None:
    match body:
        case Not(inner):
            p = _premise(inner)
            if p is not None:
                return p[0], p[1], None
        case Implies(left, right):
            p = _premise(left)
            s = _forbidden_support(right)
            if p is not None and s is not None:
                return p[0], p[1], s
    return None


def check_blocking(
    blocks: Sequence[BlockingConstraint] | BlockStore,
    itemset: Iterable[int],
    supp: int,
    instance: MiningInstance | None = None,
) -> bool:
    """True iff every block holds on the candidate (it is dominated by none)."""
    if not isinstance(blocks, BlockStore):
        ctx = EvalContext.from_instance(instance) if instance is not None else None
        blocks = BlockStore(ctx, blocks)
    itemset = frozenset(itemset)
    return not blocks.forbids(items_mask(itemset), supp, itemset)


@dataclass
class SearchConfig:
    branch_order: str = "default"
    fixed_level: int | None = None
    blocking: BlockStore | Sequence[BlockingConstraint] = ()
    max_solutions: int | None = None
    # cardinality direction used by level_first
    level_direction: str = "ascending"
    # extra side constraints, checked on complete candidates
    constraints: Sequence[Expr] = ()
    # value recorded as Solution.level; |itemset| when None
    level_expr: Expr | None = None
    prune: bool = True
    deadline: float | None = None

    def __post_init__(self):
        if self.branch_order not in BRANCH_ORDERS:
            raise ValueError(f"branch_order must be one of {BRANCH_ORDERS}")
        if self.level_direction not in ("ascending", "descending"):
            raise ValueError("level_direction must be ascending or descending")


def level_bounds(instance: MiningInstance) -> tuple[int, int]:
    """Interval holding the cardinality of every solution of the instance."""
    db = instance.db
    widest = max(len(t) for t in db.transactions)
    frequent = sum(1 for c in db.cover_bits if c.bit_count() >= instance.theta)
    return 0, min(widest, frequent)


class _Stop(Exception):
    pass


def enumerate_solutions(
    instance: MiningInstance, config: SearchConfig | None = None
) -> tuple[list[Solution], SearchStats]:
    """All itemsets meeting frequency, side, level and blocking constraints, in search order."""
    config = config or SearchConfig()
    started = time.perf_counter()
    db = instance.db
    n_items = db.n_items
    if config.fixed_level is not None and not 0 <= config.fixed_level <= n_items:
        raise ValueError(f"fixed_level {config.fixed_level} outside [0, {n_items}]")

    ctx = EvalContext.from_instance(instance)
    store = config.blocking if isinstance(config.blocking, BlockStore) else BlockStore(ctx, config.blocking)
    checks = [compile_expr(c, ctx) for c in config.constraints]
    level_fn = compile_expr(config.level_expr, ctx) if config.level_expr is not None else None

    theta = instance.theta
    min_value = instance.min_value
    max_cost = float("inf") if instance.max_cost is None else instance.max_cost
    prune = config.prune
    values, costs = instance.meta.values, instance.meta.costs

    if prune:
        order = [i for i in range(n_items) if db.cover_bits[i].bit_count() >= theta]
    else:
        order = list(range(n_items))
    m = len(order)
    bits = [1 << i for i in order]
    cov = [db.cover_bits[i] for i in order]
    vals = [values[i] for i in order]
    csts = [costs[i] for i in order]
    suffix = [0] * (m + 1)
    for idx in range(m - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + vals[idx]

    stats = SearchStats(active_blocks=len(store))
    solutions: list[Solution] = []
    limit = config.max_solutions
    deadline = config.deadline
    above = prune and store.has_above

    def accept(mask: int, supp: int, value: int, cost: int) -> None:
        if supp < theta or value < min_value or cost > max_cost:
            return
        itemset = None
        if checks:
            itemset = mask_items(mask)
            for f in checks:
                if not f(itemset, supp):
                    return
        if len(store) and store.forbids(mask, supp, itemset):
            return
        if itemset is None:
            itemset = mask_items(mask)
        level = level_fn(itemset, supp) if level_fn is not None else len(itemset)
        solutions.append(Solution(itemset, supp, level))
        if limit is not None and len(solutions) >= limit:
            raise _Stop

    def visit(k: int | None, mask: int, cover: int, supp: int, depth: int, start: int, value: int, cost: int) -> None:
        stats.nodes += 1
        if deadline is not None and not stats.nodes & 0x3FF and time.monotonic() > deadline:
            raise SearchTimeout(stats)
        if k is None or depth == k:
            accept(mask, supp, value, cost)
            if k is not None:
                return
        if above:
            # no remaining item shrinks the cover: every extension keeps this support
            keeps = True
            for j in range(start, m):
                if cover & ~cov[j]:
                    keeps = False
                    break
            kind = store.above_kind(mask, supp) if keeps or store.has_any_above else 0
            if kind == 2 or (kind == 1 and keeps):
                return
        top = m - 1
        if prune and k is not None:
            top = min(top, m - (k - depth))
        for idx in range(top, start - 1, -1):
            c2 = cover & cov[idx]
            s2 = c2.bit_count()
            v2 = value + vals[idx]
            k2 = cost + csts[idx]
            if prune and (s2 < theta or k2 > max_cost or v2 + suffix[idx + 1] < min_value):
                continue
            visit(k, mask | bits[idx], c2, s2, depth + 1, idx + 1, v2, k2)

    def run(k: int | None) -> None:
        if prune and (value_unreachable or (k is not None and k > m)):
            return
        visit(k, 0, db.all_bits, db.n_transactions, 0, 0, 0, 0)

    value_unreachable = suffix[0] < min_value
    try:
        if config.fixed_level is not None:
            run(config.fixed_level)
        elif config.branch_order == "level_first":
            lo, hi = level_bounds(instance) if prune else (0, m)
            levels = range(lo, hi + 1)
            for k in reversed(levels) if config.level_direction == "descending" else levels:
                run(k)
        else:
            run(None)
    except _Stop:
        pass
    except SearchTimeout:
        stats.solutions = len(solutions)
        stats.wall_time = time.perf_counter() - started
        raise
    stats.solutions = len(solutions)
    stats.wall_time = time.perf_counter() - started
    return solutions, stats
