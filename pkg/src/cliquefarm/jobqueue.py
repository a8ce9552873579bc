"""Directory-backed job queue shared by worker processes.

Layout under the queue root:

    meta                 key=value: graph name, n, split factor f
    best                 current incumbent size, ASCII decimal + newline
    best.lock            advisory lock file guarding best
    best.log             one line per accepted best write (audit trail)
    pending/00..99/<t>   unclaimed jobs, sharded by the last two digits of t
    pending/<shard>.lock one advisory lock per shard
    running/<t>          claimed jobs
    results/<t>          finished jobs, serialized JobResultRecord

Coordination relies only on advisory flock and same-filesystem atomic
rename, so any number of worker processes may share the root.
"""

from __future__ import annotations

import fcntl
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

SHARDS = [f"{i:02d}" for i in range(100)]


class QueueError(Exception):
    """Queue protocol violation or unusable queue state."""


@contextmanager
def locked(path: Path, exclusive: bool) -> Iterator[None]:
    """Hold an advisory flock on `path` (created if absent) for the block."""
    fd = os.open(path, os.O_RDWR | os.O_CREAT, 0o644)
    try:
        fcntl.flock(fd, fcntl.LOCK_EX if exclusive else fcntl.LOCK_SH)
        yield
    finally:
        fcntl.flock(fd, fcntl.LOCK_UN)
        os.close(fd)


def shard_of(t: int) -> str:
    """Shard name: last two decimal digits of t, zero-padded."""
    return f"{t % 100:02d}"


@dataclass(frozen=True)
class QueueLayout:
    root: Path

    @property
    def meta_path(self) -> Path:
        return self.root / "meta"

    @property
    def best_path(self) -> Path:
        return self.root / "best"

    @property
    def best_lock(self) -> Path:
        return self.root / "best.lock"

    @property
    def best_log(self) -> Path:
        return self.root / "best.log"

    @property
    def pending_dir(self) -> Path:
        return self.root / "pending"

    @property
    def running_dir(self) -> Path:
        return self.root / "running"

    @property
    def results_dir(self) -> Path:
        return self.root / "results"

    def shard_dir(self, shard: str) -> Path:
        return self.pending_dir / shard

    def shard_lock(self, shard: str) -> Path:
        return self.pending_dir / f"{shard}.lock"


@dataclass
class QueueMeta:
    graph: str
    n: int
    f: int

    @property
    def job_count(self) -> int:
        return self.f * self.n


@dataclass
class JobResultRecord:
    """What one finished job reports back.

    omega == 0 with an empty clique means the job found nothing better than
    its injected bound; otherwise omega == len(clique) and the clique is an
    ascending 1-based vertex list.
    """

    t: int
    omega: int
    clique: list[int]
    nodes: int
    wall_ms: int
    worker: str
    started_unix_ms: int
    finished_unix_ms: int

    def __post_init__(self) -> None:
        if self.clique and self.omega != len(self.clique):
            raise QueueError(
                f"omega {self.omega} != clique size {len(self.clique)} for job {self.t}"
            )
        if self.finished_unix_ms < self.started_unix_ms:
            raise QueueError(f"job {self.t} finished before it started")
        if self.nodes < 1:
            raise QueueError(f"job {self.t} reports {self.nodes} nodes")

    def to_text(self) -> str:
        lines = [
            f"t={self.t}",
            f"omega={self.omega}",
            "clique=" + " ".join(str(v) for v in self.clique),
            f"nodes={self.nodes}",
            f"wall_ms={self.wall_ms}",
            f"worker={self.worker}",
            f"started_unix_ms={self.started_unix_ms}",
            f"finished_unix_ms={self.finished_unix_ms}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "JobResultRecord":
        kv = _parse_kv(text)
        try:
            clique = [int(v) for v in kv["clique"].split()] if kv["clique"] else []
            return cls(
                t=int(kv["t"]),
                omega=int(kv["omega"]),
                clique=clique,
                nodes=int(kv["nodes"]),
                wall_ms=int(kv["wall_ms"]),
                worker=kv["worker"],
                started_unix_ms=int(kv["started_unix_ms"]),
                finished_unix_ms=int(kv["finished_unix_ms"]),
            )
        except KeyError as exc:
            raise QueueError(f"result record missing key {exc}") from exc
        except ValueError as exc:
            raise QueueError(f"result record has a bad value: {exc}") from exc


def _parse_kv(text: str) -> dict[str, str]:
    kv = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise QueueError(f"bad key=value line: {line!r}")
        kv[key] = value
    return kv


def init_queue(root, graph_name: str, n: int, f: int) -> QueueLayout:
    """Create the queue directory tree and all f*n pending job files."""
    root = Path(root)
    if root.exists() and any(root.iterdir()):
        raise QueueError(f"queue root {root} exists and is not empty")
    if n < 1 or f < 1:
        raise QueueError(f"need n >= 1 and f >= 1, got n={n} f={f}")
    layout = QueueLayout(root=root)
    for shard in SHARDS:
        layout.shard_dir(shard).mkdir(parents=True)
        layout.shard_lock(shard).touch()
    layout.running_dir.mkdir()
    layout.results_dir.mkdir()
    layout.best_lock.touch()
    layout.best_path.write_text("0\n", encoding="ascii")
    layout.meta_path.write_text(
        f"graph={graph_name}\nn={n}\nf={f}\n", encoding="ascii"
    )
    for t in range(f * n):
        (layout.shard_dir(shard_of(t)) / str(t)).touch()
    return layout


def open_queue(root) -> QueueLayout:
    root = Path(root)
    layout = QueueLayout(root=root)
    if not layout.meta_path.is_file():
        raise QueueError(f"{root} is not an initialized queue (no meta file)")
    return layout


def read_meta(layout: QueueLayout) -> QueueMeta:
    kv = _parse_kv(layout.meta_path.read_text(encoding="ascii"))
    try:
        return QueueMeta(graph=kv["graph"], n=int(kv["n"]), f=int(kv["f"]))
    except (KeyError, ValueError) as exc:
        raise QueueError(f"bad meta file: {exc}") from exc


def claim_job(layout: QueueLayout, shard_order: Sequence[str]) -> int | None:
    """Claim one pending job, visiting shards in the given order.

    Takes the shard's exclusive lock before picking, and moves the job file
    to running/ by atomic rename. Returns None when every shard was empty at
    visit time.
    """
    if sorted(shard_order) != SHARDS:
        raise QueueError("shard_order must be a permutation of the 100 shards")
    for shard in shard_order:
        shard_dir = layout.shard_dir(shard)
        if not os.listdir(shard_dir):
            continue
        with locked(layout.shard_lock(shard), exclusive=True):
            names = os.listdir(shard_dir)
            if not names:
                continue
            t = min(int(name) for name in names)
            dest = layout.running_dir / str(t)
            os.rename(shard_dir / str(t), dest)
            os.utime(dest)  # rename keeps the old mtime; staleness counts from claim
        return t
    return None


def read_best(layout: QueueLayout) -> int:
    """Current incumbent size, read under a shared lock."""
    with locked(layout.best_lock, exclusive=False):
        raw = layout.best_path.read_text(encoding="ascii")
    try:
        value = int(raw.strip())
    except ValueError:
        raise QueueError(f"corrupt best file: {raw!r}")
    if value < 0:
        raise QueueError(f"corrupt best file: negative value {value}")
    return value


def update_best(layout: QueueLayout, candidate: int) -> tuple[bool, int]:
    """Propose a new incumbent; returns (wrote, value now in the file).

    Two-phase: a shared-lock read rejects non-improving candidates cheaply;
    only a strict improvement takes the exclusive lock, re-compares (the
    value may have moved in between) and writes. The shared lock is fully
    released before the exclusive one is requested, so no deadlock.
    """
    if candidate < 0:
        raise QueueError(f"candidate must be >= 0, got {candidate}")
    current = read_best(layout)
    if candidate <= current:
        return False, current
    with locked(layout.best_lock, exclusive=True):
        raw = layout.best_path.read_text(encoding="ascii")
        current = int(raw.strip())
        if candidate <= current:
            return False, current
        layout.best_path.write_text(f"{candidate}\n", encoding="ascii")
        with open(layout.best_log, "a", encoding="ascii") as fh:
            fh.write(f"{int(time.time() * 1000)} {candidate}\n")
        return True, candidate


def read_best_log(layout: QueueLayout) -> list[int]:
    """Accepted incumbent values in write order (empty if never improved)."""
    if not layout.best_log.exists():
        return []
    values = []
    for line in layout.best_log.read_text(encoding="ascii").splitlines():
        if line.strip():
            values.append(int(line.split()[1]))
    return values


def publish_result(layout: QueueLayout, record: JobResultRecord) -> None:
    """Write the record into the running job file and move it to results/."""
    running = layout.running_dir / str(record.t)
    if not running.exists():
        raise QueueError(
            f"job {record.t} is not in running/ (double publish or never claimed)"
        )
    running.write_text(record.to_text(), encoding="ascii")
    os.rename(running, layout.results_dir / str(record.t))


def requeue_stale(layout: QueueLayout, grace_seconds: int) -> list[int]:
    """Move jobs stuck in running/ longer than the grace back to pending."""
    if grace_seconds <= 0:
        raise QueueError(f"grace must be positive, got {grace_seconds}")
    now = time.time()
    moved = []
    for name in os.listdir(layout.running_dir):
        path = layout.running_dir / name
        try:
            age = now - path.stat().st_mtime
        except FileNotFoundError:
            continue  # finished while we were scanning
        if age > grace_seconds:
            t = int(name)
            os.rename(path, layout.shard_dir(shard_of(t)) / name)
            moved.append(t)
    return sorted(moved)


@dataclass
class CollectSummary:
    complete: bool
    missing: list[int]
    best_omega: int
    best_clique: list[int]
    records: list[JobResultRecord]
    errors: list[str] = field(default_factory=list)


def collect_results(layout: QueueLayout, expected_count: int | None = None) -> CollectSummary:
    """Parse every result record and pick the best.

    Best = highest omega, preferring records with a non-empty clique, ties
    broken by lowest job id. Unparseable files are reported in `errors`, not
    fatal.
    """
    if expected_count is None:
        expected_count = read_meta(layout).job_count
    records = []
    errors = []
    for name in sorted(os.listdir(layout.results_dir), key=int):
        path = layout.results_dir / name
        try:
            record = JobResultRecord.from_text(path.read_text(encoding="ascii"))
        except (QueueError, OSError, UnicodeDecodeError) as exc:
            errors.append(f"{name}: {exc}")
            continue
        if record.t != int(name):
            errors.append(f"{name}: record claims job id {record.t}")
            continue
        records.append(record)
    present = {r.t for r in records}
    missing = [t for t in range(expected_count) if t not in present]
    best_omega, best_clique = 0, []
    for record in sorted(records, key=lambda r: (-r.omega, not r.clique, r.t)):
        best_omega, best_clique = record.omega, list(record.clique)
        break
    return CollectSummary(
        complete=not missing,
        missing=missing,
        best_omega=best_omega,
        best_clique=best_clique,
        records=records,
        errors=errors,
    )
