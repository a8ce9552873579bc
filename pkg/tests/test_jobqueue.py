import multiprocessing as mp
import os
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquefarm.jobqueue import (
    SHARDS,
    JobResultRecord,
    QueueError,
    claim_job,
    collect_results,
    init_queue,
    open_queue,
    publish_result,
    read_best,
    read_best_log,
    read_meta,
    requeue_stale,
    shard_of,
    update_best,
)


def make_record(t=0, omega=3, clique=(1, 2, 5), **overrides):
    kwargs = dict(
        t=t,
        omega=omega,
        clique=list(clique),
        nodes=10,
        wall_ms=4,
        worker="w0",
        started_unix_ms=1000,
        finished_unix_ms=1004,
    )
    kwargs.update(overrides)
    return JobResultRecord(**kwargs)


class TestSharding:
    def test_last_two_digits(self):
        assert shard_of(1234) == "34"
        assert shard_of(7) == "07"
        assert shard_of(0) == "00"
        assert shard_of(100) == "00"


class TestInit:
    def test_layout_and_job_count(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=450, f=8)
        files = [
            name
            for shard in SHARDS
            for name in os.listdir(layout.shard_dir(shard))
        ]
        assert len(files) == 3600
        assert read_best(layout) == 0
        meta = read_meta(layout)
        assert (meta.graph, meta.n, meta.f) == ("toy", 450, 8)

    def test_tiny_queue(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=8)
        found = sorted(
            int(name)
            for shard in SHARDS
            for name in os.listdir(layout.shard_dir(shard))
        )
        assert found == list(range(8))

    def test_jobs_land_in_their_shard(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=30, f=8)
        assert (layout.shard_dir("34") / "134").exists()
        assert (layout.shard_dir("07") / "7").exists()

    def test_refuses_non_empty_root(self, tmp_path):
        root = tmp_path / "q"
        root.mkdir()
        (root / "junk").touch()
        with pytest.raises(QueueError, match="not empty"):
            init_queue(root, "toy", n=5, f=8)

    def test_open_requires_meta(self, tmp_path):
        with pytest.raises(QueueError, match="no meta"):
            open_queue(tmp_path)


class TestClaim:
    def test_empty_queue_returns_none(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=1)
        assert claim_job(layout, SHARDS) == 0
        assert claim_job(layout, SHARDS) is None

    def test_single_job_moves_to_running(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=8)
        # delete everything except job 5 so it is the only claimable job
        for t in range(8):
            if t != 5:
                os.unlink(layout.shard_dir(shard_of(t)) / str(t))
        assert claim_job(layout, SHARDS) == 5
        assert os.listdir(layout.running_dir) == ["5"]
        pending = sum(len(os.listdir(layout.shard_dir(s))) for s in SHARDS)
        assert pending == 0

    def test_bad_shard_order_rejected(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=1)
        with pytest.raises(QueueError, match="permutation"):
            claim_job(layout, SHARDS[:50])

    def test_conservation(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=4, f=8)
        claimed = []
        for _ in range(10):
            claimed.append(claim_job(layout, SHARDS))
        pending = sum(len(os.listdir(layout.shard_dir(s))) for s in SHARDS)
        running = len(os.listdir(layout.running_dir))
        assert pending + running == 32
        assert running == 10
        assert len(set(claimed)) == 10


def _claim_one(root, out_queue):
    layout = open_queue(root)
    out_queue.put(claim_job(layout, SHARDS))


class TestClaimRace:
    def test_two_claimers_one_job(self, tmp_path):
        # repeat the race; exactly one claimer may win each time
        for trial in range(20):
            root = tmp_path / f"q{trial}"
            layout = init_queue(root, "toy", n=1, f=1)
            out = mp.Queue()
            procs = [mp.Process(target=_claim_one, args=(root, out)) for _ in range(2)]
            for p in procs:
                p.start()
            results = [out.get(timeout=10) for _ in procs]
            for p in procs:
                p.join()
            assert sorted(results, key=lambda x: (x is None, x)) == [0, None]


class TestBest:
    def test_fresh_queue_reads_zero(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        assert read_best(layout) == 0

    def test_update_and_read(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        assert update_best(layout, 27) == (True, 27)
        assert read_best(layout) == 27

    def test_non_improving_rejected(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        update_best(layout, 10)
        assert update_best(layout, 8) == (False, 10)
        assert update_best(layout, 10) == (False, 10)  # ties rejected too
        assert update_best(layout, 12) == (True, 12)

    def test_log_records_accepted_writes(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        for v in (3, 1, 5, 5, 9):
            update_best(layout, v)
        assert read_best_log(layout) == [3, 5, 9]

    def test_readers_share_the_lock(self, tmp_path):
        # a held shared lock must not block other readers, only writers
        from cliquefarm.jobqueue import locked

        root = tmp_path / "q"
        layout = init_queue(root, "toy", n=2, f=8)
        update_best(layout, 7)
        out = mp.Queue()

        def reader():
            out.put(read_best(open_queue(root)))

        with locked(layout.best_lock, exclusive=False):
            procs = [mp.Process(target=reader) for _ in range(8)]
            for p in procs:
                p.start()
            values = [out.get(timeout=10) for _ in procs]
            for p in procs:
                p.join()
        assert values == [7] * 8

    def test_corrupt_best_is_hard_error(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        layout.best_path.write_text("not a number\n")
        with pytest.raises(QueueError, match="corrupt"):
            read_best(layout)


def _updater(root, values):
    layout = open_queue(root)
    for v in values:
        update_best(layout, v)


class TestBestConcurrency:
    def test_final_is_max_and_trace_increasing(self, tmp_path):
        import random

        root = tmp_path / "q"
        layout = init_queue(root, "toy", n=2, f=8)
        rng = random.Random(0)
        all_values = []
        procs = []
        for _ in range(8):
            values = [rng.randint(1, 1000) for _ in range(50)]
            all_values.extend(values)
            procs.append(mp.Process(target=_updater, args=(root, values)))
        for p in procs:
            p.start()
        for p in procs:
            p.join()
        assert read_best(layout) == max(all_values)
        trace = read_best_log(layout)
        assert trace == sorted(set(trace))  # strictly increasing
        assert trace[-1] == max(all_values)


class TestPublish:
    def test_publish_then_collect(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=8)
        t = claim_job(layout, SHARDS)
        publish_result(layout, make_record(t=t))
        assert os.listdir(layout.running_dir) == []
        assert str(t) in os.listdir(layout.results_dir)

    def test_double_publish_errors(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=8)
        t = claim_job(layout, SHARDS)
        publish_result(layout, make_record(t=t))
        with pytest.raises(QueueError, match="double publish"):
            publish_result(layout, make_record(t=t))

    def test_publish_unclaimed_errors(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=1, f=8)
        with pytest.raises(QueueError):
            publish_result(layout, make_record(t=3))

    @settings(max_examples=50, deadline=None)
    @given(
        t=st.integers(0, 10**6),
        clique=st.lists(st.integers(1, 10**4), unique=True).map(sorted),
        nodes=st.integers(1, 2**62),
        wall_ms=st.integers(0, 10**9),
        worker=st.text(
            alphabet=st.characters(min_codepoint=33, max_codepoint=126), min_size=1
        ).filter(lambda s: "=" not in s),
        started=st.integers(0, 2**52),
        duration=st.integers(0, 10**9),
    )
    def test_record_round_trip(self, t, clique, nodes, wall_ms, worker, started, duration):
        record = JobResultRecord(
            t=t,
            omega=len(clique),
            clique=clique,
            nodes=nodes,
            wall_ms=wall_ms,
            worker=worker,
            started_unix_ms=started,
            finished_unix_ms=started + duration,
        )
        assert JobResultRecord.from_text(record.to_text()) == record

    def test_record_rejects_inconsistent_omega(self):
        with pytest.raises(QueueError, match="omega"):
            make_record(omega=2, clique=[1, 2, 3])

    def test_record_rejects_time_travel(self):
        with pytest.raises(QueueError, match="finished before"):
            make_record(started_unix_ms=10, finished_unix_ms=5)


class TestRequeue:
    def test_nothing_running(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        assert requeue_stale(layout, 1) == []

    def test_fresh_job_within_grace(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        claim_job(layout, SHARDS)
        assert requeue_stale(layout, 60) == []

    def test_stale_job_goes_home(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        t = claim_job(layout, SHARDS)
        old = time.time() - 120
        os.utime(layout.running_dir / str(t), (old, old))
        assert requeue_stale(layout, 60) == [t]
        assert (layout.shard_dir(shard_of(t)) / str(t)).exists()

    def test_grace_must_be_positive(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        with pytest.raises(QueueError):
            requeue_stale(layout, 0)


class TestCollect:
    def _publish_all(self, layout, count, omega_of=lambda t: 0):
        for _ in range(count):
            t = claim_job(layout, SHARDS)
            omega = omega_of(t)
            clique = list(range(1, omega + 1))
            publish_result(
                layout,
                make_record(t=t, omega=omega, clique=clique, worker=f"w{t % 3}"),
            )

    def test_all_present(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        self._publish_all(layout, 16)
        summary = collect_results(layout)
        assert summary.complete
        assert summary.missing == []

    def test_one_missing_is_named(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        self._publish_all(layout, 15)
        summary = collect_results(layout)
        assert not summary.complete
        assert len(summary.missing) == 1

    def test_best_prefers_max_omega_lowest_t(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        self._publish_all(layout, 16, omega_of=lambda t: 4 if t in (5, 9) else 0)
        summary = collect_results(layout)
        assert summary.best_omega == 4
        assert summary.best_clique == [1, 2, 3, 4]

    def test_unparseable_record_reported_not_fatal(self, tmp_path):
        layout = init_queue(tmp_path / "q", "toy", n=2, f=8)
        self._publish_all(layout, 16)
        (layout.results_dir / "3").write_text("garbage\n")
        summary = collect_results(layout)
        assert summary.errors
        assert not summary.complete
        assert 3 in summary.missing
