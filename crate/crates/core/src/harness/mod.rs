//! Monte Carlo experiment harness.

pub mod output;
pub mod spec;
pub mod sweep;
pub mod trial;

pub use output::{format_g, render_csv, render_lattice_csv, summary_table, write_csv, CSV_HEADER};
pub use spec::{scene_from_config, ExperimentSpec, FusionMode, Geometry, Metric, SweepPoint};
pub use sweep::{aggregate, run_geometry_sweep, run_point, run_sweep, ResultRow};
pub use trial::{ModeErrors, PointContext, TrialErrors, TrialRun};
