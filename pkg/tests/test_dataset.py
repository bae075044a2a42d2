import io
from itertools import combinations
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from domimine.dataset import (
    EmptyDatabase,
    ItemMeta,
    ItemOutOfRange,
    MalformedToken,
    MiningInstance,
    TransactionDb,
    bundled_dataset,
    db_stats,
    dense_remap,
    format_transaction_db,
    generate_item_meta,
    load_transaction_db,
    make_instance,
    onehot_transactions,
    parse_transaction_db,
    random_thresholds,
    read_item_meta,
    support,
    write_item_meta,
)

DATA = Path(__file__).parent / "data"


def scan_support(db, itemset):
    """Horizontal count, independent of the cover bitsets."""
    s = set(itemset)
    return sum(1 for t in db.transactions if s <= t)


transactions = st.lists(st.frozensets(st.integers(0, 9), max_size=8), min_size=1, max_size=25)


class TestParse:
    def test_small_file(self):
        db = parse_transaction_db("1 2\n1 3\n2 3\n")
        assert db.n_transactions == 3
        assert db.n_items == 4
        assert db.covers[0] == frozenset()
        assert db.covers[3] == {1, 2}

    def test_blank_lines_and_duplicates(self):
        db = parse_transaction_db("\n3 3 1\n\n   \n1\n")
        assert db.transactions == (frozenset({1, 3}), frozenset({1}))

    def test_stream_input(self):
        assert parse_transaction_db(io.StringIO("0 1\n")).n_items == 2

    @pytest.mark.parametrize("text", ["", "\n\n", "   \n"])
    def test_empty(self, text):
        with pytest.raises(EmptyDatabase):
            parse_transaction_db(text)

    @pytest.mark.parametrize("text,line,token", [("1 2\n1 x\n", 2, "x"), ("-1\n", 1, "-1"), ("1\n\n2.5\n", 3, "2.5")])
    def test_malformed(self, text, line, token):
        with pytest.raises(MalformedToken) as info:
            parse_transaction_db(text)
        assert info.value.line == line
        assert info.value.token == token

    def test_negative_ids_rejected_programmatically(self):
        with pytest.raises(ItemOutOfRange):
            TransactionDb.from_transactions([{0, -2}])

    def test_universe_too_small(self):
        with pytest.raises(ItemOutOfRange):
            TransactionDb.from_transactions([{4}], n_items=3)

    def test_round_trip_bundled(self, tmp_path):
        db = load_transaction_db(bundled_dataset("zoo"))
        path = tmp_path / "zoo.txt"
        path.write_text(format_transaction_db(db))
        assert load_transaction_db(path) == db

    # an empty transaction prints as a blank line, which the format skips
    @given(st.lists(st.frozensets(st.integers(0, 9), min_size=1, max_size=8), min_size=1, max_size=25))
    def test_round_trip(self, txs):
        db = TransactionDb.from_transactions(txs)
        assert parse_transaction_db(format_transaction_db(db)) == db


class TestSupport:
    @pytest.mark.parametrize(
        "itemset,expected",
        [((), 3), ((1,), 3), ((2,), 2), ((1, 2), 2), ((3,), 1), ((2, 3), 0)],
    )
    def test_tiny(self, tiny, itemset, expected):
        assert scan_support(tiny, itemset) == expected
        assert support(tiny, itemset) == expected

    def test_out_of_range(self, tiny):
        with pytest.raises(ItemOutOfRange):
            support(tiny, {7})

    def test_views_agree(self, tiny):
        for i in range(tiny.n_items):
            assert tiny.covers[i] == {t for t, tx in enumerate(tiny.transactions) if i in tx}
            assert tiny.cover_bits[i] == sum(1 << t for t in tiny.covers[i])

    @settings(max_examples=60)
    @given(transactions, st.frozensets(st.integers(0, 9), max_size=4), st.frozensets(st.integers(0, 9), max_size=4))
    def test_anti_monotone_and_horizontal(self, txs, x, extra):
        db = TransactionDb.from_transactions(txs, n_items=10)
        y = x | extra
        assert support(db, x) == scan_support(db, x)
        assert support(db, y) == scan_support(db, y)
        assert support(db, x) >= support(db, y)


class TestStats:
    def test_tiny_density(self, tiny):
        # items 1..3 used; item 0 does not count towards the universe
        stats = db_stats(tiny)
        assert (stats.n_transactions, stats.n_items) == (3, 3)
        assert stats.density == pytest.approx(6 / 9)

    def test_full_incidence(self):
        assert db_stats(TransactionDb.from_transactions([{0, 1, 2}])).density == 1.0

    def test_zoo(self):
        stats = db_stats(load_transaction_db(bundled_dataset("zoo")))
        assert str(stats) == "101 transactions, 36 items, density 44%"

    def test_dense_remap(self, tiny):
        dense, old = dense_remap(tiny)
        assert old == (1, 2, 3)
        assert dense.n_items == 3
        for combo in [(1,), (1, 2), (2, 3)]:
            new = [old.index(i) for i in combo]
            assert support(dense, new) == support(tiny, combo)
        assert db_stats(dense) == db_stats(tiny)


class TestMeta:
    def test_deterministic(self, tiny):
        assert generate_item_meta(tiny, 42) == generate_item_meta(tiny, 42)

    @given(st.integers(0, 10_000))
    def test_range(self, seed):
        meta = generate_item_meta(TransactionDb.from_transactions([set(range(30))]), seed)
        assert all(0 <= v <= 5 for v in meta.values + meta.costs)

    def test_frozen_fixture(self):
        db = TransactionDb.from_transactions([set(range(1000))])
        one = read_item_meta(DATA / "meta_1000_seed1.csv", 1000)
        two = read_item_meta(DATA / "meta_1000_seed2.csv", 1000)
        assert one.values != two.values or one.costs != two.costs
        for seed, fixture in ((1, one), (2, two)):
            meta = generate_item_meta(db, seed)
            assert (meta.values, meta.costs) == (fixture.values, fixture.costs)

    def test_csv_round_trip(self, tiny):
        meta = generate_item_meta(tiny, 3)
        text = write_item_meta(meta)
        back = read_item_meta(io.StringIO(text), tiny.n_items)
        assert (back.values, back.costs) == (meta.values, meta.costs)

    def test_csv_bad_header(self):
        with pytest.raises(ValueError):
            read_item_meta(io.StringIO("id,v,c\n0,1,1\n"), 1)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            ItemMeta((1, -1), (0, 0))


class TestInstance:
    @pytest.mark.parametrize("freq,n,theta", [(10, 30, 3), (50, 3, 2), (50, 101, 51), (0, 10, 1), (100, 7, 7), (33, 3, 1)])
    def test_theta_ceiling(self, freq, n, theta):
        db = TransactionDb.from_transactions([{0}] * n)
        # reference: smallest integer t with t >= freq% of n
        expected = next(t for t in range(n + 1) if 100 * t >= freq * n)
        assert make_instance(db, freq_pct=freq).theta == max(1, expected) == theta

    def test_invalid_thresholds(self, tiny):
        meta = generate_item_meta(tiny, 0)
        with pytest.raises(ValueError):
            MiningInstance(tiny, meta, 50, 2, min_value=-1)
        with pytest.raises(ValueError):
            MiningInstance(tiny, meta, 50, 0)
        with pytest.raises(ValueError):
            make_instance(tiny, meta, 150)

    def test_random_thresholds_bounded(self, tiny):
        meta = generate_item_meta(tiny, 0)
        for seed in range(20):
            mv, mc = random_thresholds(meta, seed)
            assert 0 <= mv <= sum(meta.values)
            assert 0 <= mc <= sum(meta.costs)


def test_onehot_encoding():
    rows = [("a", "x"), ("b", "x"), ("a", "y")]
    txs, items = onehot_transactions(rows)
    assert items == [(0, "a"), (0, "b"), (1, "x"), (1, "y")]
    assert txs == [{0, 2}, {1, 2}, {0, 3}]


def test_all_subsets_match_scan(tiny):
    for k in range(4):
        for combo in combinations(range(4), k):
            assert support(tiny, combo) == scan_support(tiny, combo)
