"""Append-only JSON-lines log of search runs.

``RunLogStore`` speaks the key/value ``BaseStore`` protocol keyed by run id.
Every ``mset`` appends whole lines; a later line for a run id replaces the
earlier one when the log is read back.
"""
import logging
import os
import tempfile
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import (
    Any,
    Dict,
    Iterator,
    List,
    Literal,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from langchain_core.stores import BaseStore
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from floodcast.errors import IoFailureError, SchemaMismatchError
from floodcast.eval import FoldScores
from floodcast.model import ArchConfig

logger = logging.getLogger(__name__)

RUN_LOG_FILE = "runs.jsonl"
# Fields that vary between otherwise identical runs
WALL_TIME_FIELDS = ("wall_time_s", "finished_at")


class FoldRecord(FoldScores):
    val_mae: float
    best_epoch: int


class RunRecord(BaseModel):
    """One architecture trained over every fold of the rotation."""

    model_config = ConfigDict(frozen=True)

    run_id: str
    config: ArchConfig
    status: Literal["ok", "failed"]
    seed: int
    n_params: int
    folds: List[FoldRecord] = Field(default_factory=list)
    mae_m: Optional[float] = None
    rmse_m: Optional[float] = None
    error: Optional[Dict[str, str]] = None
    wall_time_s: float = 0.0
    finished_at: datetime = Field(
        default_factory=lambda: datetime.now(tz=timezone.utc)
    )

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def recompute(self) -> Tuple[float, float]:
        """Aggregate MAE and RMSE rebuilt from the per-fold event scores."""
        per_fold = [f.aggregate() for f in self.folds]
        n = len(per_fold)
        return (
            sum(m for m, _ in per_fold) / n,
            sum(r for _, r in per_fold) / n,
        )

    def without_wall_time(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude=set(WALL_TIME_FIELDS))


class RunLogStore(BaseStore[str, RunRecord]):
    """Run records persisted in one JSON-lines file."""

    def __init__(self, path: Union[str, Path]):
        path = Path(path)
        self.path = path if path.suffix else path / RUN_LOG_FILE
        self._lock = threading.Lock()

    def _read(self) -> Dict[str, RunRecord]:
        records: Dict[str, RunRecord] = {}
        if not self.path.exists():
            return records
        with self.path.open() as f:
            for n, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = RunRecord.model_validate_json(line)
                except ValidationError as e:
                    raise SchemaMismatchError(
                        f"{self.path}:{n}: not a run record"
                    ) from e
                records[record.run_id] = record
        return records

    def _append(self, lines: List[str]) -> None:
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as f:
                f.write("".join(lines))
                f.flush()
                os.fsync(f.fileno())
        except OSError as e:
            raise IoFailureError(f"cannot append to {self.path}: {e}") from e

    def mget(self, keys: Sequence[str]) -> List[Optional[RunRecord]]:
        with self._lock:
            records = self._read()
        return [records.get(key) for key in keys]

    def mset(self, key_value_pairs: Sequence[Tuple[str, RunRecord]]) -> None:
        lines = []
        for key, record in key_value_pairs:
            if key != record.run_id:
                raise ValueError(f"key {key!r} differs from run id {record.run_id!r}")
            lines.append(record.model_dump_json() + "\n")
        with self._lock:
            self._append(lines)

    def mdelete(self, keys: Sequence[str]) -> None:
        """Rewrite the log without ``keys``, atomically."""
        drop = set(keys)
        with self._lock:
            kept = [r for k, r in self._read().items() if k not in drop]
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".jsonl")
                with os.fdopen(fd, "w") as f:
                    f.writelines(r.model_dump_json() + "\n" for r in kept)
                os.replace(tmp, self.path)
            except OSError as e:
                raise IoFailureError(f"cannot rewrite {self.path}: {e}") from e

    def yield_keys(self, *, prefix: Optional[str] = None) -> Iterator[str]:
        with self._lock:
            keys = list(self._read())
        for key in keys:
            if prefix is None or key.startswith(prefix):
                yield key

    def append(self, record: RunRecord) -> None:
        self.mset([(record.run_id, record)])

    def records(self) -> List[RunRecord]:
        """Latest record of every run, in first-logged order."""
        with self._lock:
            return list(self._read().values())

    def completed(self) -> List[str]:
        """Run ids with a successful record."""
        return [r.run_id for r in self.records() if r.ok]
