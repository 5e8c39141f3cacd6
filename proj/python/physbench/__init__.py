"""Datasets, metrics and baselines of the physics video benchmark."""

from ._core import (
    DATASETS,
    FRAME_SIZE,
    PROBE_BETA,
    SCHEMA_VERSION,
    TASKS,
    Dataset,
    DatasetError,
    DegenerateLabels,
    Error,
    FormatError,
    InvalidInput,
    InvalidTask,
    IoError,
    MissingFrameError,
    NumericFailure,
    SchemaVersionError,
    SimulationFailure,
    baseline_report,
    dataset_of,
    frames_per_video,
    generate,
    generate_video,
    grid_population_std,
    input_frames,
    l1,
    label_grid,
    normalize_labels,
    optimal_constant,
    psnr,
    read_pgm,
    score,
    score_rollout,
    smooth_l1,
    ssim,
    ssim_loss,
    tasks_of,
    write_frames,
)

__all__ = [name for name in dir() if not name.startswith("_")]
