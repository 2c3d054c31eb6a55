from .harness import (
    CSV_HEADER,
    ConfigError,
    Dataset,
    ExperimentConfig,
    SweepRow,
    build_model_grid,
    config_from_json,
    empirical_risk_profile,
    load_config,
    load_image_pools,
    run_sweep,
    summarize,
    synthetic_dataset,
    write_csv,
)
from .hog import hog
from .idx import ingest_idx, read_images, read_labels
from .pca import Projection, pca_fit, pca_project

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "Dataset",
    "ExperimentConfig",
    "Projection",
    "SweepRow",
    "build_model_grid",
    "config_from_json",
    "empirical_risk_profile",
    "hog",
    "ingest_idx",
    "load_config",
    "load_image_pools",
    "pca_fit",
    "pca_project",
    "read_images",
    "read_labels",
    "run_sweep",
    "summarize",
    "synthetic_dataset",
    "write_csv",
]
