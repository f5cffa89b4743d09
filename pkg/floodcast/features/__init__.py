from .event_transformer import (
    ApplyScaler,
    AttachDepths,
    AttachStaticAndTide,
    EventTransformer,
    EventTransformerPipeline,
    RestrictSegments,
)
from .feature_table import (
    ALL_FEATURES,
    FEATURE_COLUMNS,
    KEY_COLUMNS,
    RAINFALL_FEATURES,
    SPATIAL_FEATURES,
    TARGET_COLUMN,
    EventFeatureTable,
    Feature,
    temporal_features,
)
from .idw import IdwInterpolator, idw_interpolate
from .rainfall import (
    attach_static_and_tide,
    build_event_table,
    derive_rainfall_features,
    event_summary,
    hourly_aggregates,
    tables_from_weather,
    weather_frame,
)
from .scaler import Scaler, apply_scaler, fit_scaler, invert_scaler

__all__ = [
    "ALL_FEATURES",
    "FEATURE_COLUMNS",
    "KEY_COLUMNS",
    "RAINFALL_FEATURES",
    "SPATIAL_FEATURES",
    "TARGET_COLUMN",
    "ApplyScaler",
    "AttachDepths",
    "AttachStaticAndTide",
    "EventFeatureTable",
    "EventTransformer",
    "EventTransformerPipeline",
    "Feature",
    "IdwInterpolator",
    "RestrictSegments",
    "Scaler",
    "apply_scaler",
    "attach_static_and_tide",
    "build_event_table",
    "derive_rainfall_features",
    "event_summary",
    "fit_scaler",
    "hourly_aggregates",
    "idw_interpolate",
    "invert_scaler",
    "temporal_features",
    "tables_from_weather",
    "weather_frame",
]
