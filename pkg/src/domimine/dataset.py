"""Transaction databases, support kernels and side-constraint metadata.

Databases are read from the CP4IM text layout: one transaction per line,
whitespace-separated non-negative integer item ids. Covers are kept both as
frozensets of transaction indices and as integer bitsets, the latter being
what the search engine intersects.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, TextIO

__all__ = [
    "DatasetError",
    "EmptyDatabase",
    "MalformedToken",
    "ItemOutOfRange",
    "TransactionDb",
    "DbStats",
    "ItemMeta",
    "MiningInstance",
    "parse_transaction_db",
    "load_transaction_db",
    "format_transaction_db",
    "dense_remap",
    "support",
    "db_stats",
    "generate_item_meta",
    "read_item_meta",
    "write_item_meta",
    "make_instance",
    "random_thresholds",
    "bundled_dataset",
]

META_VALUE_MAX = 5


class DatasetError(ValueError):
    pass


class EmptyDatabase(DatasetError):
    pass


class MalformedToken(DatasetError):
    def __init__(self, line: int, token: str):
        super().__init__(f"line {line}: malformed item id {token!r}")
        self.line = line
        self.token = token


class ItemOutOfRange(DatasetError):
    pass


@dataclass(frozen=True)
class TransactionDb:
    """Immutable horizontal database with per-item vertical covers."""

    transactions: tuple[frozenset[int], ...]
    n_items: int
    covers: tuple[frozenset[int], ...] = field(repr=False, compare=False)

    @classmethod
    def from_transactions(cls, transactions: Iterable[Iterable[int]], n_items: int | None = None) -> TransactionDb:
        txs = tuple(frozenset(t) for t in transactions)
        if not txs:
            raise EmptyDatabase("database has no transactions")
        seen = max((max(t) for t in txs if t), default=-1)
        if any(i < 0 for t in txs for i in t):
            raise ItemOutOfRange("negative item id")
        if n_items is None:
            n_items = seen + 1
        elif seen >= n_items:
            raise ItemOutOfRange(f"item {seen} outside universe of {n_items} items")
        covers: list[set[int]] = [set() for _ in range(n_items)]
        for tid, t in enumerate(txs):
            for i in t:
                covers[i].add(tid)
        return cls(txs, n_items, tuple(frozenset(c) for c in covers))

    @property
    def n_transactions(self) -> int:
        return len(self.transactions)

    @cached_property
    def cover_bits(self) -> tuple[int, ...]:
        """Covers as bitsets, bit ``t`` set when transaction ``t`` holds the item."""
        return tuple(sum(1 << t for t in c) for c in self.covers)

    @cached_property
    def all_bits(self) -> int:
        return (1 << self.n_transactions) - 1

    @cached_property
    def used_items(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.covers) if c)

    def item_support(self, item: int) -> int:
        return len(self.covers[item])


@dataclass(frozen=True)
class DbStats:
    n_transactions: int
    n_items: int
    density: float

    def __str__(self) -> str:
        return f"{self.n_transactions} transactions, {self.n_items} items, density {round(100 * self.density)}%"


@dataclass(frozen=True)
class ItemMeta:
    """Per-item weights used by the min-value and max-cost side constraints."""

    values: tuple[int, ...]
    costs: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        if len(self.values) != len(self.costs):
            raise ValueError("values and costs must have equal length")
        if any(v < 0 for v in self.values) or any(c < 0 for c in self.costs):
            raise ValueError("item values and costs must be non-negative")


@dataclass(frozen=True)
class MiningInstance:
    db: TransactionDb
    meta: ItemMeta
    freq_pct: float
    theta: int
    min_value: int = 0
    max_cost: int | None = None  # None: unbounded

    def __post_init__(self):
        if not 1 <= self.theta <= self.db.n_transactions:
            raise ValueError(f"theta={self.theta} outside [1, {self.db.n_transactions}]")
        if self.min_value < 0 or (self.max_cost is not None and self.max_cost < 0):
            raise ValueError("side-constraint thresholds must be non-negative")
        if len(self.meta.values) < self.db.n_items:
            raise ValueError("item metadata does not cover every item")

    @property
    def label(self) -> str:
        return f"{self.freq_pct:g}"


def parse_transaction_db(text: str | TextIO) -> TransactionDb:
    if not isinstance(text, str):
        text = text.read()
    transactions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        items = set()
        for tok in tokens:
            if not tok.isdigit():
                raise MalformedToken(lineno, tok)
            items.add(int(tok))
        transactions.append(items)
    if not transactions:
        raise EmptyDatabase("no non-blank lines in input")
    return TransactionDb.from_transactions(transactions)


def load_transaction_db(path: str | Path) -> TransactionDb:
    with open(path, encoding="utf-8") as fh:
        return parse_transaction_db(fh)


def format_transaction_db(db: TransactionDb) -> str:
    return "".join(" ".join(map(str, sorted(t))) + "\n" for t in db.transactions)


def dense_remap(db: TransactionDb) -> tuple[TransactionDb, tuple[int, ...]]:
    """Renumber used items to 0..k-1; returns the new db and new-id -> old-id."""
    old_ids = db.used_items
    new_of = {old: new for new, old in enumerate(old_ids)}
    txs = [{new_of[i] for i in t} for t in db.transactions]
    return TransactionDb.from_transactions(txs, n_items=len(old_ids)), old_ids


def support(db: TransactionDb, itemset: Iterable[int]) -> int:
    bits = db.all_bits
    for i in itemset:
        if not 0 <= i < db.n_items:
            raise ItemOutOfRange(f"item {i} outside [0, {db.n_items})")
        bits &= db.cover_bits[i]
    return bits.bit_count()


def db_stats(db: TransactionDb) -> DbStats:
    # density over the dense universe of items that actually occur
    n_items = len(db.used_items)
    filled = sum(len(t) for t in db.transactions)
    return DbStats(db.n_transactions, n_items, filled / (db.n_transactions * n_items) if n_items else 0.0)


def generate_item_meta(db: TransactionDb, seed: int) -> ItemMeta:
    rng = random.Random(seed)
    values = tuple(rng.randint(0, META_VALUE_MAX) for _ in range(db.n_items))
    costs = tuple(rng.randint(0, META_VALUE_MAX) for _ in range(db.n_items))
    return ItemMeta(values, costs, seed)


def read_item_meta(source: str | Path | TextIO, n_items: int) -> ItemMeta:
    """Read an ``item,value,cost`` CSV sidecar; unlisted items get weight 0."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return read_item_meta(fh, n_items)
    values = [0] * n_items
    costs = [0] * n_items
    reader = csv.DictReader(source)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["item", "value", "cost"]:
        raise DatasetError("metadata CSV must have header item,value,cost")
    for row in reader:
        item = int(row["item"])
        if not 0 <= item < n_items:
            raise ItemOutOfRange(f"metadata for unknown item {item}")
        values[item] = int(row["value"])
        costs[item] = int(row["cost"])
    return ItemMeta(tuple(values), tuple(costs))


def write_item_meta(meta: ItemMeta, dest: str | Path | TextIO | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["item", "value", "cost"])
    for i, (v, c) in enumerate(zip(meta.values, meta.costs)):
        writer.writerow([i, v, c])
    text = buf.getvalue()
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    elif dest is not None:
        dest.write(text)
    return text


def make_instance(
    db: TransactionDb,
    meta: ItemMeta | None = None,
    freq_pct: float = 50,
    min_value: int = 0,
    max_cost: int | None = None,
    seed: int = 0,
) -> MiningInstance:
    """Build an instance; theta is the ceiling of ``freq_pct`` percent of the transactions."""
    if not 0 <= freq_pct <= 100:
        raise ValueError(f"frequency {freq_pct} not a percentage")
    if meta is None:
        meta = generate_item_meta(db, seed)
    # exact rational arithmetic: 10% of 30 must give 3, not 4
    theta = -(-Fraction(str(freq_pct)) * db.n_transactions // 100)
    theta = max(1, int(theta))
    return MiningInstance(db, meta, freq_pct, theta, min_value, max_cost)


def random_thresholds(meta: ItemMeta, seed: int) -> tuple[int, int]:
    """Draw (min_value, max_cost) uniformly between 0 and the largest attainable sums."""
    rng = random.Random(seed)
    return rng.randint(0, sum(meta.values)), rng.randint(0, sum(meta.costs))


def bundled_dataset(name: str) -> Path:
    """Path of a dataset shipped in ``domimine/data`` (``zoo``, ``vote``, ``lymph_onehot``, ...)."""
    path = Path(__file__).parent / "data" / f"{name}.txt"
    if not path.exists():
        raise FileNotFoundError(path)
    return path


def onehot_transactions(rows: Sequence[Sequence[str]]) -> tuple[list[set[int]], list[tuple[int, str]]]:
    """One item per (attribute, value) pair, values sorted per attribute.

    Returns the transactions and, per item id, the (attribute index, value) it encodes.
    """
    if not rows:
        return [], []
    n_attr = len(rows[0])
    items: list[tuple[int, str]] = []
    item_of: dict[tuple[int, str], int] = {}
    for a in range(n_attr):
        for v in sorted({r[a] for r in rows}):
            item_of[(a, v)] = len(items)
            items.append((a, v))
    return [{item_of[(a, r[a])] for a in range(n_attr)} for r in rows], items
