"""Shared instance builders and the acceptance-line recorder."""

from __future__ import annotations

import contextlib
import random

from domimine.dataset import MiningInstance, TransactionDb, generate_item_meta, make_instance

TINY_TXS = [{1, 2}, {1, 2}, {1, 3}]

# (criterion, "PASS"/"FAIL", detail), printed at the end of the session
ACCEPTANCE: list[tuple[str, str, str]] = []


def tiny_db() -> TransactionDb:
    return TransactionDb.from_transactions(TINY_TXS)


def tiny_instance(theta: int = 2) -> MiningInstance:
    db = tiny_db()
    return MiningInstance(db, generate_item_meta(db, 0), 100 * theta / db.n_transactions, theta)


def random_instance(seed: int) -> MiningInstance:
    """3-12 items, 5-40 transactions, random density, frequency and side thresholds."""
    rng = random.Random(seed)
    n_items = rng.randint(3, 12)
    n_tx = rng.randint(5, 40)
    density = rng.uniform(0.2, 0.8)
    txs = [{i for i in range(n_items) if rng.random() < density} for _ in range(n_tx)]
    db = TransactionDb.from_transactions(txs, n_items=n_items)
    meta = generate_item_meta(db, seed)
    freq = rng.randint(1, 100)
    min_value = rng.choice([0, 0, rng.randint(0, sum(meta.values))])
    max_cost = rng.choice([None, None, rng.randint(0, sum(meta.costs))])
    return make_instance(db, meta, freq, min_value, max_cost)


def key(solutions) -> list[tuple[tuple[int, ...], int]]:
    """Order-free comparison form of a solution list."""
    return sorted((tuple(sorted(s.itemset)), s.support) for s in solutions)


@contextlib.contextmanager
def criterion(name: str, detail: str = ""):
    """Record one acceptance line: PASS when the block completes, FAIL when it raises."""
    notes: list[str] = [detail] if detail else []
    try:
        yield notes
    except BaseException as exc:
        ACCEPTANCE.append((name, "FAIL", "; ".join([*notes, f"{type(exc).__name__}: {exc}"])))
        raise
    ACCEPTANCE.append((name, "PASS", "; ".join(notes)))
