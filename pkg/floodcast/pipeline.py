"""Pipeline settings and the data wiring shared by the commands.

Settings come from built-in defaults, overridden by a JSON file, overridden
by command-line flags. ``FLOODCAST_DATA_DIR`` supplies the data directory
when neither sets it.
"""
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from floodcast.data_store import (
    WEATHER_COLUMNS,
    WEATHER_FILE,
    FloodDataset,
    load_relational,
    load_table,
)
from floodcast.errors import ConfigInvalidError, CoverageGapError, MissingFileError
from floodcast.features import (
    AttachDepths,
    EventFeatureTable,
    EventTransformer,
    EventTransformerPipeline,
    RestrictSegments,
    build_event_table,
    tables_from_weather,
)
from floodcast.model import CHAMPION, ArchConfig, TrainConfig
from floodcast.synth_hydro import select_flood_prone

logger = logging.getLogger(__name__)

DATA_DIR_ENV = "FLOODCAST_DATA_DIR"
PREPARED_DIR = "prepared"


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    data_dir: Optional[Path] = None
    seed: int = 0
    n_segments: int = Field(default=50, gt=0)
    n_gauges: int = Field(default=5, gt=0)
    bounds_m: Tuple[float, float] = (5000.0, 5000.0)
    n_events: int = Field(default=16, gt=0)
    test_fraction: float = Field(default=0.25, gt=0, lt=1)
    include_short_event: bool = False
    idw_power: float = Field(default=2.0, gt=0)
    arch: ArchConfig = CHAMPION
    train: TrainConfig = TrainConfig()
    grid: str = "mini"
    flood_prone: Optional[int] = Field(default=None, gt=0)
    workers: int = Field(default=1, gt=0)

    def require_data_dir(self) -> Path:
        if self.data_dir is None:
            raise ConfigInvalidError(
                f"no data directory: pass --data-dir or set {DATA_DIR_ENV}"
            )
        if not self.data_dir.is_dir():
            raise MissingFileError(f"data directory {self.data_dir} does not exist")
        return self.data_dir


def _merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> PipelineConfig:
    """Defaults < JSON file < ``overrides``; ``None`` overrides are ignored."""
    environ = os.environ if environ is None else environ
    raw: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise MissingFileError(f"no config file {path}")
        try:
            raw = PipelineConfig.model_validate_json(path.read_text()).model_dump(
                exclude_unset=True
            )
        except ValidationError as e:
            raise ConfigInvalidError(f"{path}: {e}") from e
    raw = _merge(raw, {k: v for k, v in (overrides or {}).items() if v is not None})
    if raw.get("data_dir") is None and environ.get(DATA_DIR_ENV):
        raw["data_dir"] = environ[DATA_DIR_ENV]
    try:
        return PipelineConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigInvalidError(str(e)) from e


def tides(dataset: FloodDataset) -> Dict[str, Any]:
    return {event_id: s.tide for event_id, s in dataset.series.items()}


def feature_tables(
    dataset: FloodDataset,
    data_dir: Path,
    idw_power: float = 2.0,
    from_raw: bool = False,
) -> List[EventFeatureTable]:
    """Unscaled tables of the usable events.

    The weather of ``prepare`` is preferred, then the weather written with the
    data, else (or with ``from_raw``) the features are derived from the raw rain.
    """
    events = [e for e in dataset.events if e.usable]
    for path in (data_dir / PREPARED_DIR / WEATHER_FILE, data_dir / WEATHER_FILE):
        if path.is_file() and not from_raw:
            logger.debug("Reading features from %s", path)
            weather = load_table(path, WEATHER_COLUMNS)
            return tables_from_weather(weather, events, dataset.area, tides(dataset))
    return [
        build_event_table(dataset.series[e.event_id], dataset.area, power=idw_power)
        for e in events
    ]


def load_tables(
    config: PipelineConfig, with_depths: bool = True
) -> Tuple[FloodDataset, Dict[str, EventFeatureTable]]:
    """The dataset and its usable events, keyed by event.

    Without ``with_depths`` the tables carry no target, and a dataset lacking
    depths loads unless ``flood_prone`` needs them to pick segments.
    """
    data_dir = config.require_data_dir()
    dataset = load_relational(data_dir)
    needs_depths = with_depths or config.flood_prone is not None
    if dataset.depths is None and needs_depths:
        raise CoverageGapError(f"{data_dir} holds no depths")
    segment_ids = None
    if config.flood_prone is not None:
        assert dataset.depths is not None
        segment_ids = select_flood_prone(
            dataset.depths, config.flood_prone, dataset.events
        )
        logger.info("Flood-prone segments: %s", segment_ids)
    steps: List[EventTransformer] = [RestrictSegments(segment_ids)]
    if with_depths:
        assert dataset.depths is not None
        steps.insert(0, AttachDepths(dataset.depths))
    pipeline = EventTransformerPipeline(steps)
    tables = pipeline.lazy_transform_events(
        feature_tables(dataset, data_dir, config.idw_power)
    )
    return dataset, {t.event_id: t for t in tables}
