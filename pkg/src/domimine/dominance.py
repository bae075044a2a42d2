"""Dominance-driven search loops.

``run_cdp`` asks the engine for one solution at a time and posts that
solution's blocking constraint before the next call. ``run_cdpi`` uses the
model's incomparability function to split the search into levels: each level
is one call that enumerates every solution on it, and only then are the
blocking constraints of the whole level posted. Solutions sharing a level
cannot dominate each other, so nothing is lost by delaying their blocks.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .dataset import MiningInstance
from .engine import (
    BlockStore,
    SearchConfig,
    SearchTimeout,
    Solution,
    enumerate_solutions,
    items_mask,
    level_bounds,
)
from .model_dsl import (
    Arith,
    BUILTIN_TASKS,
    Card,
    Compare,
    DominanceRelation,
    DslError,
    EvalContext,
    Expr,
    Ident,
    IntLit,
    ModelSpec,
    Neg,
    SetLit,
    Sum,
    Var,
    builtin_model,
    substitute_solution,
)

__all__ = [
    "RunResult",
    "DominanceError",
    "MODES",
    "run_cdp",
    "run_cdpi",
    "run_enumeration",
    "run_mode",
    "post_filter",
]

log = logging.getLogger(__name__)

MODES = ("cdp-default", "cdp-level", "cdpi")
CARDINALITY = Card(Var("itemset"))


class DominanceError(RuntimeError):
    pass


@dataclass
class RunResult:
    solutions: list[Solution]
    n_dominated_emitted: int = 0
    calls: int = 0
    blocks_total: int = 0
    time: float = 0.0
    nodes: int = 0
    mode: str = ""
    non_dominated: list[Solution] = field(default_factory=list)
    timed_out: bool = False


def _native_constraints() -> tuple[Expr, ...]:
    return builtin_model("frequent").side_constraints


_NATIVE = _native_constraints()


def _extra_constraints(model: ModelSpec) -> list[Expr]:
    # min_value / max_cost over values / costs are enforced natively by the engine
    return [c for c in model.side_constraints if c not in _NATIVE]


def _level_plan(instance: MiningInstance, model: ModelSpec) -> tuple[list[int], Expr | None]:
    """Levels to visit, in order, and the level body (None when it is plain cardinality)."""
    inc = model.require_incomparability()
    lo, hi = level_bounds(instance)
    body = inc.body
    if body != CARDINALITY:
        lo, hi = _int_range(body, instance, lo, hi)
    levels = list(range(lo, hi + 1))
    if inc.direction == "descending":
        levels.reverse()
    return levels, (None if body == CARDINALITY else body)


def _int_range(e: Expr, instance: MiningInstance, card_lo: int, card_hi: int) -> tuple[int, int]:
    """Interval bound of an integer expression over all candidate itemsets."""
    ctx = EvalContext.from_instance(instance)
    match e:
        case IntLit(v):
            return v, v
        case Ident(name):
            v = ctx.constants.get(name)
            if v is None or v == float("inf"):
                raise DslError(f"cannot bound parameter {name!r} in incomparability function")
            return int(v), int(v)
        case Var("support"):
            return instance.theta, instance.db.n_transactions
        case Card(Var("itemset")):
            return card_lo, card_hi
        case Card(SetLit(items)):
            return len(items), len(items)
        case Sum(_, Var("itemset"), array):
            w = ctx.arrays[array]
            return sum(x for x in w if x < 0), sum(x for x in w if x > 0)
        case Arith(op, left, right):
            a, b = _int_range(left, instance, card_lo, card_hi)
            c, d = _int_range(right, instance, card_lo, card_hi)
            return (a + c, b + d) if op == "+" else (a - d, b - c)
        case Neg(arg):
            a, b = _int_range(arg, instance, card_lo, card_hi)
            return -b, -a
    raise DslError(f"cannot bound incomparability function term {type(e).__name__}")


def _deadline(timeout: float | None) -> float | None:
    return None if timeout is None else time.monotonic() + timeout


def _expired(deadline: float | None) -> bool:
    # searches only poll the clock every few hundred nodes; short calls need this check too
    return deadline is not None and time.monotonic() > deadline


def _finish(result: RunResult, rel: DominanceRelation | None, instance: MiningInstance) -> RunResult:
    if rel is None:
        result.non_dominated = list(result.solutions)
    else:
        result.non_dominated = post_filter(result.solutions, rel, instance)
    result.n_dominated_emitted = len(result.solutions) - len(result.non_dominated)
    return result


def run_cdp(
    instance: MiningInstance,
    model: ModelSpec,
    order: str = "default",
    timeout: float | None = None,
) -> RunResult:
    """Find one solution per call and block what it dominates, until a call finds nothing.

    ``order="level_first"`` decides cardinality before items, in the direction
    of the model's incomparability function when it has one.
    """
    if model.dominance is None:
        raise DominanceError("CDP needs a dominance_relation")
    rel = model.dominance
    ctx = EvalContext.from_instance(instance)
    store = BlockStore(ctx)
    extra = _extra_constraints(model)
    inc = model.incomparability
    direction = inc.direction if inc is not None else "ascending"
    level_expr = inc.body if inc is not None else None
    deadline = _deadline(timeout)
    result = RunResult([], mode="cdp-default" if order == "default" else "cdp-level")
    seen: set[frozenset[int]] = set()
    while True:
        if _expired(deadline):
            result.timed_out = True
            break
        config = SearchConfig(
            branch_order=order,
            blocking=store,
            max_solutions=1,
            level_direction=direction,
            constraints=extra,
            level_expr=level_expr,
            deadline=deadline,
        )
        result.calls += 1
        result.blocks_total += len(store)
        try:
            found, stats = enumerate_solutions(instance, config)
        except SearchTimeout as exc:
            result.timed_out = True
            result.time += exc.stats.wall_time if exc.stats else 0.0
            break
        result.time += stats.wall_time
        result.nodes += stats.nodes
        if not found:
            break
        sol = found[0]
        if sol.itemset in seen:
            raise DominanceError(f"dominance relation does not block its own solution {sol}; CDP would not terminate")
        seen.add(sol.itemset)
        result.solutions.append(sol)
        store.add(substitute_solution(rel, sol))
    return _finish(result, rel, instance)


def run_cdpi(instance: MiningInstance, model: ModelSpec, timeout: float | None = None) -> RunResult:
    """Enumerate each incomparability level in one call; post its blocks once the level is done."""
    levels, body = _level_plan(instance, model)
    rel = model.dominance
    ctx = EvalContext.from_instance(instance)
    store = BlockStore(ctx)
    extra = _extra_constraints(model)
    deadline = _deadline(timeout)
    result = RunResult([], mode="cdpi")
    for v in levels:
        if _expired(deadline):
            result.timed_out = True
            break
        constraints = extra if body is None else [*extra, Compare("=", body, IntLit(v))]
        config = SearchConfig(
            fixed_level=v if body is None else None,
            blocking=store,
            constraints=constraints,
            level_expr=body,
            deadline=deadline,
        )
        result.calls += 1
        result.blocks_total += len(store)
        try:
            found, stats = enumerate_solutions(instance, config)
        except SearchTimeout as exc:
            result.timed_out = True
            result.time += exc.stats.wall_time if exc.stats else 0.0
            break
        result.time += stats.wall_time
        result.nodes += stats.nodes
        log.debug("level %d: %d solutions, %d active blocks", v, len(found), len(store))
        result.solutions.extend(found)
        for sol in found:
            store.add(substitute_solution(rel, sol))
    return _finish(result, rel, instance)


def run_enumeration(instance: MiningInstance, model: ModelSpec, timeout: float | None = None) -> RunResult:
    """Plain enumeration in one call, for models without a dominance relation."""
    config = SearchConfig(constraints=_extra_constraints(model), deadline=_deadline(timeout))
    result = RunResult([], mode="enum", calls=1)
    try:
        found, stats = enumerate_solutions(instance, config)
    except SearchTimeout as exc:
        result.timed_out = True
        result.time = exc.stats.wall_time if exc.stats else 0.0
        return _finish(result, None, instance)
    result.solutions, result.time, result.nodes = found, stats.wall_time, stats.nodes
    return _finish(result, model.dominance, instance)


def run_mode(instance: MiningInstance, model: ModelSpec, mode: str, timeout: float | None = None) -> RunResult:
    if mode == "cdp-default":
        return run_cdp(instance, model, "default", timeout)
    if mode == "cdp-level":
        return run_cdp(instance, model, "level_first", timeout)
    if mode == "cdpi":
        return run_cdpi(instance, model, timeout)
    if mode == "enum":
        return run_enumeration(instance, model, timeout)
    raise ValueError(f"unknown mode {mode!r}")


def post_filter(
    solutions: list[Solution], rel: DominanceRelation, instance: MiningInstance | None = None
) -> list[Solution]:
    """Drop every solution dominated by another one in the list; order is kept.

    A dominates B when A's blocking constraint is false on B and A != B.
    """
    ctx = EvalContext.from_instance(instance) if instance is not None else EvalContext()
    store = BlockStore(ctx)
    for sol in solutions:
        store.add(substitute_solution(rel, sol))
    kept = []
    for sol in solutions:
        mask = items_mask(sol.itemset)
        if not store.forbids(mask, sol.support, sol.itemset, exclude=mask):
            kept.append(sol)
    return kept


def task_model(task: str) -> ModelSpec:
    if task not in BUILTIN_TASKS:
        raise DslError(f"unknown task {task!r}")
    return builtin_model(task)
