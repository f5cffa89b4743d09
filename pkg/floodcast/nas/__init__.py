from .grid import GRID_AXES, PRESETS, GridSpec, enumerate_grid, grid_preset, run_id
from .run_log import RUN_LOG_FILE, WALL_TIME_FIELDS, FoldRecord, RunLogStore, RunRecord
from .search import (
    DISTRIBUTION_FILE,
    EXPORT_COLUMNS,
    TOP_RUNS_FILE,
    export_runs,
    mae_distribution,
    run_search,
    runs_frame,
    select_champion,
)

__all__ = [
    "DISTRIBUTION_FILE",
    "EXPORT_COLUMNS",
    "GRID_AXES",
    "PRESETS",
    "RUN_LOG_FILE",
    "TOP_RUNS_FILE",
    "WALL_TIME_FIELDS",
    "FoldRecord",
    "GridSpec",
    "RunLogStore",
    "RunRecord",
    "enumerate_grid",
    "export_runs",
    "grid_preset",
    "mae_distribution",
    "run_id",
    "run_search",
    "runs_frame",
    "select_champion",
]
