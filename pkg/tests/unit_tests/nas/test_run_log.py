from datetime import datetime, timezone
from pathlib import Path

import pytest
from freezegun import freeze_time

from floodcast.errors import SchemaMismatchError
from floodcast.model import CHAMPION
from floodcast.nas import RUN_LOG_FILE, RunLogStore
from tests.unit_tests.nas.sample_records import record


def test_log_path(tmp_path: Path) -> None:
    assert RunLogStore(tmp_path).path == tmp_path / RUN_LOG_FILE
    assert RunLogStore(tmp_path / "x.jsonl").path == tmp_path / "x.jsonl"


def test_mset_and_mget(tmp_path: Path) -> None:
    store = RunLogStore(tmp_path)
    store.mset([("a", record("a")), ("b", record("b", 0.05))])
    a, missing, b = store.mget(["a", "zz", "b"])
    assert missing is None
    assert a is not None and a.mae_m == 0.03
    assert b is not None and b.config == CHAMPION
    with pytest.raises(ValueError):
        store.mset([("c", record("d"))])


def test_last_line_wins(tmp_path: Path) -> None:
    store = RunLogStore(tmp_path)
    store.append(record("a", status="failed", error={"error": "NonFiniteLoss"}))
    store.append(record("b"))
    store.append(record("a", 0.02))
    assert len(store.path.read_text().splitlines()) == 3
    assert [r.run_id for r in store.records()] == ["a", "b"]
    assert store.records()[0].mae_m == 0.02
    assert store.completed() == ["a", "b"]


def test_mdelete_and_keys(tmp_path: Path) -> None:
    store = RunLogStore(tmp_path)
    store.mset([(k, record(k)) for k in ("gru-1", "gru-2", "lstm-1")])
    assert list(store.yield_keys(prefix="gru")) == ["gru-1", "gru-2"]
    store.mdelete(["gru-2"])
    assert list(store.yield_keys()) == ["gru-1", "lstm-1"]
    assert len(store.path.read_text().splitlines()) == 2


def test_corrupt_line(tmp_path: Path) -> None:
    store = RunLogStore(tmp_path)
    store.append(record("a"))
    with store.path.open("a") as f:
        f.write('{"run_id": "broken"}\n')
    with pytest.raises(SchemaMismatchError, match=":2:"):
        store.records()


@freeze_time("2024-03-01 12:00:00")
def test_finished_at_and_wall_time(tmp_path: Path) -> None:
    first = record("a", wall_time_s=12.5)
    assert first.finished_at == datetime(2024, 3, 1, 12, tzinfo=timezone.utc)
    store = RunLogStore(tmp_path)
    store.append(first)
    loaded = store.records()[0]
    assert loaded.finished_at == first.finished_at
    second = record("a", wall_time_s=99.0, finished_at=datetime(2030, 1, 1))
    assert loaded.without_wall_time() == second.without_wall_time()


def test_recompute() -> None:
    assert record("a", 0.04).recompute() == pytest.approx((0.04, 0.08))
