"""Rebuild the bundled one-hot datasets from UCI tables in Orange ``.tab`` format.

The Orange 2.7.8 source distribution on PyPI ships ``zoo.tab``, ``voting.tab``
and ``lymphography.tab`` under ``Orange/datasets``. Class and meta columns are
dropped; every remaining (attribute, value) pair becomes one item, with
missing values ("?" or blank) treated as a value of their own.

    python scripts/binarize_uci.py path/to/Orange/datasets src/domimine/data
"""

import csv
import sys
from pathlib import Path

from domimine.dataset import TransactionDb, format_transaction_db, onehot_transactions

TABLES = {"zoo": "zoo.tab", "vote": "voting.tab", "lymph_onehot": "lymphography.tab"}


def read_tab(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    flags = rows[2] + [""] * (len(rows[0]) - len(rows[2]))
    keep = [i for i, f in enumerate(flags) if f.strip() not in ("class", "meta")]
    data = [r + [""] * (len(rows[0]) - len(r)) for r in rows[3:] if any(x.strip() for x in r)]
    return [[r[i].strip() or "?" for i in keep] for r in data]


def main(src, dest):
    for name, table in TABLES.items():
        txs, _ = onehot_transactions(read_tab(Path(src) / table))
        db = TransactionDb.from_transactions(txs)
        (Path(dest) / f"{name}.txt").write_text(format_transaction_db(db), encoding="utf-8")
        print(name, db.n_transactions, db.n_items)


if __name__ == "__main__":
    main(*sys.argv[1:3])
