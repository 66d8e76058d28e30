"""Scoring against ground truth plus the benchmark, sweep, and scaling fits.

On-disk corpus layout: one directory per mutant bundle containing
``source.html.json``, ``mutant.html.json`` (JSON tree schema, signatures
included) and ``mutations.json`` (the mutation log). Benchmarks time the
matching pipeline only (index, similarity, graph, search); parsing and
scoring are excluded.
"""

from __future__ import annotations

import csv
import math
import signal
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .baselines import TedCostConfig, ted_match
from .graph import Matching
from .mutate import MutationLog, ground_truth, mutation_log_from_json, mutation_log_to_json
from .pipeline import match_trees
from .similarity import SftmParams
from .tree import FormatError, LabeledTree, parse_tree_json, serialize_tree_json

SOURCE_FILE = "source.html.json"
MUTANT_FILE = "mutant.html.json"
LOG_FILE = "mutations.json"

CSV_COLUMNS = (
    "page,algorithm,n_nodes,mutation_ratio,elapsed_s,mismatch,no_match,"
    "successful,rate,optimal_rate,alpha,seed,timeout"
).split(",")

ALGORITHMS = ("similarity", "ted")

DEFAULT_TIMEOUT_S = 450.0


class CorpusError(ValueError):
    """A mutant bundle is missing files or does not parse."""


class Degenerate(ValueError):
    """Regression input carries no size variation."""


@dataclass
class QualityReport:
    """Per-pair matching quality relative to the signature ground truth."""

    page: str = ""
    algorithm: str = ""
    mutation_ratio: float = 0.0
    mismatch: int = 0
    no_match: int = 0
    successful: int = 0
    successful_match_rate: float = 0.0
    optimal_rate: float = 1.0
    elapsed: float = 0.0


def score_matching(
    matching: Matching, truth: Iterable[tuple[int, int]], d_size: int
) -> QualityReport:
    """Count, per source node: right partner, wrong partner, or no partner."""
    expected = dict(truth)
    actual = dict(matching.pairs)
    successful = 0
    mismatch = 0
    for n, m in actual.items():
        if expected.get(n) == m:
            successful += 1
        else:
            mismatch += 1
    no_match = d_size - successful - mismatch
    return QualityReport(
        mismatch=mismatch,
        no_match=no_match,
        successful=successful,
        successful_match_rate=successful / d_size if d_size else 0.0,
    )


def optimal_rate(d_size: int, log: MutationLog) -> float:
    """Best achievable rate given how many source nodes were removed."""
    return (d_size - len(log.removed_signatures)) / d_size if d_size else 0.0


# ---------------------------------------------------------------------------
# Mutant bundles on disk

@dataclass
class MutantBundle:
    name: str
    source: LabeledTree
    mutant: LabeledTree
    log: MutationLog


def write_bundle(
    directory: Path, source: LabeledTree, mutant: LabeledTree, log: MutationLog
) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / SOURCE_FILE).write_text(serialize_tree_json(source), encoding="utf-8")
    (directory / MUTANT_FILE).write_text(serialize_tree_json(mutant), encoding="utf-8")
    (directory / LOG_FILE).write_text(mutation_log_to_json(log), encoding="utf-8")


def load_bundle(directory: Path) -> MutantBundle:
    directory = Path(directory)
    try:
        source = parse_tree_json((directory / SOURCE_FILE).read_text(encoding="utf-8"))
        mutant = parse_tree_json((directory / MUTANT_FILE).read_text(encoding="utf-8"))
        log = mutation_log_from_json((directory / LOG_FILE).read_text(encoding="utf-8"))
    except (OSError, FormatError, KeyError, ValueError) as exc:
        raise CorpusError(f"bad bundle {directory}: {exc}") from exc
    return MutantBundle(name=directory.name, source=source, mutant=mutant, log=log)


def discover_bundles(corpus_dir: Path) -> list[Path]:
    corpus_dir = Path(corpus_dir)
    return sorted(p.parent for p in corpus_dir.glob(f"**/{LOG_FILE}"))


# ---------------------------------------------------------------------------
# Benchmark rows

@dataclass
class BenchRow:
    """One CSV row; quality fields are None for timeout rows."""

    page: str
    algorithm: str
    n_nodes: int
    mutation_ratio: float
    elapsed_s: float
    mismatch: int | None
    no_match: int | None
    successful: int | None
    rate: float | None
    optimal_rate: float | None
    alpha: float
    seed: int
    timeout: bool


class _TimeoutExpired(Exception):
    pass


def _run_with_timeout(fn, timeout_s: float | None):
    """Run ``fn`` with a wall-clock cap; needs the main thread (signal-based).

    Returns (result, elapsed, timed_out); off the main thread the cap is not
    enforced.
    """
    use_alarm = (
        timeout_s is not None
        and hasattr(signal, "setitimer")
        and threading.current_thread() is threading.main_thread()
    )
    start = time.perf_counter()
    if not use_alarm:
        result = fn()
        return result, time.perf_counter() - start, False

    def handler(signum, frame):
        raise _TimeoutExpired()

    previous = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, timeout_s)
    try:
        result = fn()
        return result, time.perf_counter() - start, False
    except _TimeoutExpired:
        return None, time.perf_counter() - start, True
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0.0)
        signal.signal(signal.SIGALRM, previous)


def evaluate_pair(
    bundle: MutantBundle,
    algorithm: str,
    params: SftmParams,
    timeout_s: float | None = DEFAULT_TIMEOUT_S,
) -> BenchRow:
    """Match one (source, mutant) pair and score it; timing covers matching only."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; use one of {ALGORITHMS}")
    truth = ground_truth(bundle.source, bundle.mutant)
    d_size = len(bundle.source)

    if algorithm == "ted":
        task = lambda: ted_match(bundle.source, bundle.mutant, TedCostConfig())
    else:
        task = lambda: match_trees(bundle.source, bundle.mutant, params)

    matching, elapsed, timed_out = _run_with_timeout(task, timeout_s)

    if timed_out:
        return BenchRow(
            page=bundle.log.source_page or bundle.name,
            algorithm=algorithm,
            n_nodes=d_size,
            mutation_ratio=bundle.log.ratio,
            elapsed_s=elapsed,
            mismatch=None,
            no_match=None,
            successful=None,
            rate=None,
            optimal_rate=None,
            alpha=params.alpha,
            seed=params.seed,
            timeout=True,
        )

    report = score_matching(matching, truth, d_size)
    return BenchRow(
        page=bundle.log.source_page or bundle.name,
        algorithm=algorithm,
        n_nodes=d_size,
        mutation_ratio=bundle.log.ratio,
        elapsed_s=elapsed,
        mismatch=report.mismatch,
        no_match=report.no_match,
        successful=report.successful,
        rate=report.successful_match_rate,
        optimal_rate=optimal_rate(d_size, bundle.log),
        alpha=params.alpha,
        seed=params.seed,
        timeout=False,
    )


def _bench_task(args: tuple[str, str, SftmParams, float | None]) -> BenchRow:
    directory, algorithm, params, timeout_s = args
    return evaluate_pair(load_bundle(Path(directory)), algorithm, params, timeout_s)


def run_benchmark(
    corpus_dir: Path,
    params: SftmParams,
    algorithms: Sequence[str] = ("similarity",),
    timeout_s: float | None = DEFAULT_TIMEOUT_S,
    jobs: int = 1,
    skip_malformed: bool = False,
    warn=None,
) -> list[BenchRow]:
    """Evaluate every bundle under ``corpus_dir`` with every algorithm.

    Malformed bundles raise :class:`CorpusError` unless ``skip_malformed``,
    in which case they are reported through ``warn`` and skipped.
    """
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}; use one of {ALGORITHMS}")
    rows: list[BenchRow] = []
    directories = discover_bundles(corpus_dir)

    loadable: list[Path] = []
    for directory in directories:
        try:
            load_bundle(directory)
        except CorpusError as exc:
            if not skip_malformed:
                raise
            if warn is not None:
                warn(str(exc))
            continue
        loadable.append(directory)

    tasks = [
        (str(directory), algorithm, params, timeout_s)
        for directory in loadable
        for algorithm in algorithms
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_task, tasks, chunksize=1))
    else:
        rows = [_bench_task(task) for task in tasks]
    return rows


# ---------------------------------------------------------------------------
# Alpha sensitivity sweep

@dataclass
class SweepRow:
    alpha: float
    pairs: int
    mean_rate: float
    mean_elapsed_s: float


def sensitivity_sweep(
    corpus_dir: Path,
    alphas: Sequence[float],
    params: SftmParams,
    timeout_s: float | None = None,
) -> list[SweepRow]:
    """Mean match rate and mean elapsed time per threshold exponent."""
    directories = discover_bundles(corpus_dir)
    bundles = [load_bundle(d) for d in directories]
    if not bundles:
        return []
    rows: list[SweepRow] = []
    for alpha in alphas:
        swept = replace(params, alpha=alpha)
        rates = []
        times = []
        for bundle in bundles:
            row = evaluate_pair(bundle, "similarity", swept, timeout_s)
            if row.timeout:
                continue
            rates.append(row.rate)
            times.append(row.elapsed_s)
        count = len(rates)
        rows.append(
            SweepRow(
                alpha=alpha,
                pairs=count,
                mean_rate=sum(rates) / count if count else 0.0,
                mean_elapsed_s=sum(times) / count if count else 0.0,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Scaling regression

def scaling_fit(rows: Sequence[BenchRow]) -> tuple[float, float, float]:
    """Least squares of elapsed seconds against n*ln(n); returns (slope,
    intercept, r_squared)."""
    xs = [row.n_nodes * math.log(row.n_nodes) for row in rows]
    ys = [row.elapsed_s for row in rows]
    n = len(xs)
    if n == 0 or min(xs) == max(xs):
        raise Degenerate("need at least two distinct sizes for a fit")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r_squared


# ---------------------------------------------------------------------------
# CSV output

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_bench_csv(rows: Sequence[BenchRow], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    _cell(v)
                    for v in (
                        row.page, row.algorithm, row.n_nodes, row.mutation_ratio,
                        row.elapsed_s, row.mismatch, row.no_match, row.successful,
                        row.rate, row.optimal_rate, row.alpha, row.seed, row.timeout,
                    )
                ]
            )


def write_sweep_csv(rows: Sequence[SweepRow], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["alpha", "pairs", "mean_rate", "mean_elapsed_s"])
        for row in rows:
            writer.writerow(
                [_cell(row.alpha), row.pairs, _cell(row.mean_rate), _cell(row.mean_elapsed_s)]
            )
