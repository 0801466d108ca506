"""AIS trajectory preprocessing and future location prediction."""

from flpxr._core import (  # noqa: F401
    FEATURE_NAMES,
    AisRecord,
    CategoryEncoder,
    ColumnMapping,
    GbdtModel,
    GbdtParams,
    GeoPoint,
    HorizonReport,
    HorizonSet,
    HorizonStat,
    IngestStats,
    KinematicPoint,
    Poi,
    PoiIndex,
    PrepConfig,
    PrepStats,
    SplitConfig,
    TrainInfo,
    TrainingExample,
    Trip,
    build_training_set,
    chronological_split,
    destination_point,
    displacement_error_m,
    evaluate,
    extract_features,
    fit,
    group_by_vessel,
    haversine_m,
    initial_bearing_deg,
    lerp_point,
    load_ais_csv,
    load_model,
    load_poi_csv,
    load_vessel_types,
    model_size_bytes,
    persistence_baseline,
    position_at,
    predict_delta,
    predict_position,
    prepare_trips,
    read_trips_csv,
    save_model,
    speed_knots,
    write_trips_csv,
)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
