//! Pipelines, presets, grid sweeps and model persistence.

mod bundle;
mod config;
mod grid;
mod pipeline;
mod presets;
mod sweep;

pub use bundle::{load_model, save_model, FORMAT_VERSION};
pub use config::{ClassifierKind, PipelineConfig};
pub use grid::{enumerate_grid, GridSpec, DEFAULT_GRID_CAP};
pub use pipeline::{compare_classifiers, run_pipeline, Pipeline};
pub use presets::{preset, PRESET_NAMES};
pub use sweep::{sweep, SweepEntry, SweepResult};
