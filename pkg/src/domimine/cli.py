"""``mine``: run strategy matrices over datasets and write one CSV row per run.

Each (dataset, frequency, seed) triple is one mining instance; every
requested mode runs on it and produces a row. Rows are optionally checked
against the exhaustive oracle or against each other.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .dataset import (
    DatasetError,
    ItemMeta,
    TransactionDb,
    bundled_dataset,
    db_stats,
    generate_item_meta,
    load_transaction_db,
    make_instance,
    random_thresholds,
    read_item_meta,
)
from .dominance import MODES, RunResult, run_mode
from .engine import Solution
from .model_dsl import BUILTIN_TASKS, DslError, ModelSpec, builtin_model, check_model, parse_model
from .oracle import MAX_UNIVERSE, brute_closed, brute_frequent, brute_generators

log = logging.getLogger("domimine")

CSV_HEADER = ("instance", "mode", "nb_sols", "time_s", "blocks", "calls", "dominated_emitted", "verified")
ORACLES = {"generator": brute_generators, "closed": brute_closed, "frequent": brute_frequent}

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class BenchRow:
    instance: str
    mode: str
    nb_sols: int
    time_s: float
    blocks: int
    calls: int
    dominated_emitted: int
    verified: str = "skipped"  # yes | no | skipped
    timed_out: bool = False
    failed: bool = False

    def cells(self) -> list[str]:
        if self.failed:
            t = "!"
        else:
            t = f"{self.time_s:.3f}" + ("*" if self.timed_out else "")
        return [
            self.instance,
            self.mode,
            str(self.nb_sols),
            t,
            str(self.blocks),
            str(self.calls),
            str(self.dominated_emitted),
            self.verified,
        ]

    @classmethod
    def from_cells(cls, cells: Sequence[str]) -> BenchRow:
        instance, mode, nb, t, blocks, calls, dom, verified = cells
        failed = t == "!"
        timed_out = t.endswith("*")
        time_s = 0.0 if failed else float(t.rstrip("*"))
        return cls(instance, mode, int(nb), time_s, int(blocks), int(calls), int(dom), verified, timed_out, failed)


def write_rows(rows: Sequence[BenchRow], out: io.TextIOBase) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())


def read_rows(text: str) -> list[BenchRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [BenchRow.from_cells(r) for r in reader if r]


@dataclass(frozen=True)
class InstanceJob:
    """Everything one worker needs to run all modes on one instance."""

    label: str
    db: TransactionDb | None
    meta: ItemMeta | None
    freq: float
    min_value: int
    max_cost: int | None
    model: ModelSpec
    task: str | None  # built-in task the model equals, if any
    modes: tuple[str, ...]
    verify: str
    timeout: float | None
    drop_empty: bool
    error: str | None = None


def _key(sols: Sequence[Solution]) -> list[tuple[tuple[int, ...], int]]:
    return sorted((tuple(sorted(s.itemset)), s.support) for s in sols)


def _drop_empty(sols: list[Solution], drop: bool) -> list[Solution]:
    return [s for s in sols if s.itemset] if drop else sols


def run_instance(job: InstanceJob) -> list[BenchRow]:
    if job.error is not None or job.db is None:
        log.error("%s: %s", job.label, job.error)
        return [BenchRow(job.label, mode, 0, 0.0, 0, 0, 0, "skipped", failed=True) for mode in job.modes]
    meta = job.meta if job.meta is not None else generate_item_meta(job.db, 0)
    instance = make_instance(job.db, meta, job.freq, job.min_value, job.max_cost)
    results: list[RunResult] = []
    for mode in job.modes:
        res = run_mode(instance, job.model, mode, job.timeout)
        log.info(
            "%s %s: %d solutions (%d emitted), %d calls, %.3fs%s",
            job.label,
            mode,
            len(res.non_dominated),
            len(res.solutions),
            res.calls,
            res.time,
            " (timed out)" if res.timed_out else "",
        )
        results.append(res)

    finals = [_drop_empty(r.non_dominated, job.drop_empty) for r in results]
    verdicts = ["skipped"] * len(results)
    if job.verify == "oracle":
        if job.task is None:
            log.warning("%s: oracle only covers the built-in tasks; skipping verification", job.label)
        elif len(job.db.used_items) > MAX_UNIVERSE:
            log.warning("%s: %d items is too many for the oracle", job.label, len(job.db.used_items))
        else:
            want = _key(_drop_empty(ORACLES[job.task](instance), job.drop_empty))
            verdicts = [
                "skipped" if r.timed_out else ("yes" if _key(f) == want else "no") for r, f in zip(results, finals)
            ]
    elif job.verify == "cross":
        done = [(r, _key(f)) for r, f in zip(results, finals) if not r.timed_out]
        agree = all(k == done[0][1] for _, k in done) if done else False
        if len(done) >= 2:
            verdicts = ["skipped" if r.timed_out else ("yes" if agree else "no") for r in results]

    rows = []
    for mode, res, final, v in zip(job.modes, results, finals, verdicts):
        if v == "no":
            log.error("%s %s: solution set disagrees with the reference", job.label, mode)
        rows.append(
            BenchRow(
                job.label,
                mode,
                len(final),
                res.time,
                res.blocks_total,
                res.calls,
                res.n_dominated_emitted,
                v,
                timed_out=res.timed_out,
            )
        )
    return rows


def run_benchmark(jobs: Sequence[InstanceJob], n_workers: int = 1) -> list[BenchRow]:
    """Run every job; rows come back in job order whatever the completion order."""
    if n_workers <= 1 or len(jobs) <= 1:
        per_job = [run_instance(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            per_job = list(pool.map(run_instance, jobs))
    return [row for rows in per_job for row in rows]


def _resolve_data(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    try:
        return bundled_dataset(path.stem)
    except FileNotFoundError:
        return path


def _freq_label(freq: float) -> str:
    return f"{freq:g}"


def _split_modes(values: list[str] | None, task: str | None, model: ModelSpec) -> tuple[str, ...]:
    if values is None:
        return ("enum",) if model.dominance is None else MODES
    modes = tuple(m.strip() for v in values for m in v.split(",") if m.strip())
    if not modes:
        raise UsageError("empty mode list")
    for m in modes:
        if m not in MODES and m != "enum":
            raise UsageError(f"unknown mode {m!r}; choose from {', '.join(MODES)}")
        if m in MODES and model.dominance is None:
            raise UsageError(f"mode {m} needs a dominance relation; the {task or 'given'} model has none")
        if m == "cdpi" and model.incomparability is None:
            raise UsageError("mode cdpi needs an incomparability_function in the model")
    return modes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mine", description="Dominance-based itemset mining benchmarks.")
    p.add_argument("--data", action="append", default=[], metavar="FILE", help="transaction file (repeatable)")
    p.add_argument("--meta", metavar="FILE", help="item,value,cost CSV; overrides --seed")
    p.add_argument("--seed", type=int, nargs="+", action="extend", help="metadata seeds (default 0)")
    p.add_argument(
        "--freq", type=float, nargs="+", action="extend", metavar="PCT", help="minimum frequency in percent (default 50)"
    )
    p.add_argument("--min-value", type=int, default=0)
    p.add_argument("--max-cost", type=int, default=None, help="default: unbounded")
    p.add_argument("--random-thresholds", type=int, metavar="SEED", help="draw min-value and max-cost per instance")
    p.add_argument("--task", choices=sorted(BUILTIN_TASKS), default=None, help="built-in model (default generator)")
    p.add_argument("--model", metavar="FILE", help="model file in the constraint language")
    p.add_argument("--mode", action="append", default=None, help="comma-separated: " + ", ".join(MODES))
    p.add_argument("--verify", choices=("oracle", "cross", "off"), default="off")
    p.add_argument("--out", metavar="FILE", help="CSV destination (default stdout)")
    p.add_argument("--stats", nargs="+", metavar="FILE", help="print dataset statistics and exit")
    p.add_argument("--timeout", type=float, default=None, metavar="S", help="per-run time limit")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-empty-itemset", action="store_true", help="leave the empty itemset out of reported counts")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _load_meta(path: str, db: TransactionDb) -> ItemMeta:
    return read_item_meta(path, db.n_items)


def plan_jobs(args: argparse.Namespace) -> list[InstanceJob]:
    if args.model and args.task:
        raise UsageError("give either --task or --model, not both")
    if args.model:
        try:
            model = parse_model(Path(args.model).read_text(encoding="utf-8"))
            check_model(model)
        except OSError as exc:
            raise UsageError(f"cannot read model: {exc}") from exc
        except DslError as exc:
            raise UsageError(f"invalid model {args.model}: {exc}") from exc
        task = next((t for t in BUILTIN_TASKS if builtin_model(t) == model), None)
    else:
        task = args.task or "generator"
        model = builtin_model(task)
    modes = _split_modes(args.mode, task, model)
    args.seed = args.seed or [0]
    args.freq = args.freq or [50.0]
    if not args.data:
        raise UsageError("no --data given")
    if any(f < 0 or f > 100 for f in args.freq):
        raise UsageError("--freq must lie in [0, 100]")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")

    jobs = []
    for name in args.data:
        path = _resolve_data(name)
        db = None
        error = None
        try:
            db = load_transaction_db(path)
        except (OSError, DatasetError) as exc:
            error = f"cannot load {name}: {exc}"
        seeds = ["meta"] if args.meta else args.seed
        for freq in args.freq:
            for seed in seeds:
                label = f"{path.stem}_{_freq_label(freq)}" + (f"_s{seed}" if seed != "meta" else f"_{Path(args.meta).stem}")
                meta = None
                min_value, max_cost = args.min_value, args.max_cost
                job_error = error
                if db is not None:
                    try:
                        meta = _load_meta(args.meta, db) if args.meta else generate_item_meta(db, seed)
                    except (OSError, ValueError) as exc:
                        job_error = f"cannot load metadata: {exc}"
                    if meta is not None and args.random_thresholds is not None:
                        min_value, max_cost = random_thresholds(meta, args.random_thresholds)
                jobs.append(
                    InstanceJob(
                        label,
                        db if job_error is None else None,
                        meta,
                        freq,
                        min_value,
                        max_cost,
                        model,
                        task,
                        modes,
                        args.verify,
                        args.timeout,
                        args.no_empty_itemset,
                        job_error,
                    )
                )
    return jobs


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )

    if args.stats:
        status = EXIT_OK
        for name in args.stats:
            try:
                print(db_stats(load_transaction_db(_resolve_data(name))))
            except (OSError, DatasetError) as exc:
                print(f"mine: cannot load {name}: {exc}", file=sys.stderr)
                status = EXIT_USAGE
        return status

    try:
        jobs = plan_jobs(args)
    except UsageError as exc:
        print(f"mine: {exc}", file=sys.stderr)
        return EXIT_USAGE

    rows = run_benchmark(jobs, args.jobs)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_rows(rows, fh)
    else:
        write_rows(rows, sys.stdout)
    return EXIT_MISMATCH if any(r.verified == "no" for r in rows) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
