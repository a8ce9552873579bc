"""Worker process: claim jobs, run the kernel, publish results.

One worker is one single-threaded process; parallelism comes from pointing
several workers at the same queue root.
"""

from __future__ import annotations

import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import jobqueue
from .distkernel import JobSpec, mc_dist
from .graph import Graph, degree_sort, load_dimacs
from .jobqueue import JobResultRecord, QueueError, QueueLayout

REREAD_NEVER = "never"


@dataclass
class WorkerConfig:
    worker_id: str
    graph_path: Path
    queue_root: Path
    reread_best_seconds: float | None = None  # None: read once per job
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not self.worker_id:
            raise ValueError("worker id must be non-empty")
        if self.reread_best_seconds is not None and self.reread_best_seconds <= 0:
            raise ValueError("re-read interval must be positive")


@dataclass
class WorkerSummary:
    jobs: int = 0
    nodes: int = 0
    wall_ms: int = 0


def run_job(
    g: Graph,
    t: int,
    c: int,
    worker_id: str,
    f: int,
    order: list[int] | None = None,
    refresher=None,
    not_before_unix_ms: int = 0,
) -> JobResultRecord:
    """Run one job against incumbent c and package the result.

    not_before_unix_ms clamps the start timestamp so consecutive jobs from
    one (serial) worker stay monotone despite wall-clock jitter.
    """
    spec = JobSpec(t=t, n=g.n, f=f, c=c)
    started = max(int(time.time() * 1000), not_before_unix_ms)
    t0 = time.monotonic()
    clique, ctx = mc_dist(g, spec, order=order, refresher=refresher)
    wall_ms = max(1, int((time.monotonic() - t0) * 1000))
    finished = max(started, int(time.time() * 1000))
    omega = len(clique)
    return JobResultRecord(
        t=t,
        omega=omega,
        clique=[v + 1 for v in clique],
        nodes=ctx.nodes,
        wall_ms=wall_ms,
        worker=worker_id,
        started_unix_ms=started,
        finished_unix_ms=finished,
    )


def worker_loop(config: WorkerConfig, log=sys.stdout) -> WorkerSummary:
    """Drain the queue: claim, run, publish, propose the new best; repeat.

    The graph is read and degree-sorted once. Exits once a full pass over
    all shards finds nothing to claim.
    """
    layout = jobqueue.open_queue(config.queue_root)
    meta = jobqueue.read_meta(layout)
    g = load_dimacs(config.graph_path)
    if g.n != meta.n:
        raise QueueError(
            f"graph has {g.n} vertices but queue was initialized for n={meta.n}"
        )
    order = degree_sort(g)
    shard_order = list(jobqueue.SHARDS)
    random.Random(config.rng_seed).shuffle(shard_order)
    summary = WorkerSummary()
    last_finished = 0
    while True:
        t = jobqueue.claim_job(layout, shard_order)
        if t is None:
            break
        c = jobqueue.read_best(layout)
        refresher = None
        if config.reread_best_seconds is not None:
            refresher = _periodic_refresher(layout, config.reread_best_seconds)
        record = run_job(
            g,
            t,
            c,
            config.worker_id,
            meta.f,
            order=order,
            refresher=refresher,
            not_before_unix_ms=last_finished,
        )
        last_finished = record.finished_unix_ms
        jobqueue.publish_result(layout, record)
        if record.omega > 0:
            jobqueue.update_best(layout, record.omega)
        summary.jobs += 1
        summary.nodes += record.nodes
        summary.wall_ms += record.wall_ms
        print(
            f"job={record.t} omega={record.omega} nodes={record.nodes} "
            f"wall_ms={record.wall_ms} best_in={c}",
            file=log,
            flush=True,
        )
    return summary


def _periodic_refresher(layout: QueueLayout, interval_seconds: float):
    """Callback raising ctx.best_size from the shared best file at most once
    per interval; invoked by the kernel between depth-1 branches."""
    last = time.monotonic()

    def refresh(ctx) -> None:
        nonlocal last
        now = time.monotonic()
        if now - last < interval_seconds:
            return
        last = now
        current = jobqueue.read_best(layout)
        if current > ctx.best_size:
            ctx.best_size = current

    return refresh
