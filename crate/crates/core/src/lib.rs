//! Symbol-level multi-station cooperative sensing for OFDM ISAC.
//!
//! Each base station turns its echo into a coarse range/radial-velocity
//! estimate and two compressed feature vectors. A fusion center combines
//! the feature vectors of all stations on local lattices to estimate the
//! target location and velocity vector. A data-level maximum-likelihood
//! baseline and a Monte Carlo harness are included for comparison.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.

mod chirp;
pub mod config_file;
pub mod echo;
pub mod error;
pub mod fusion;
pub mod geometry;
pub mod harness;
pub mod mle;
pub mod ofdm;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod theory;

pub use echo::{synthesize_echo, true_radial_velocity, EchoSymbolMatrix, Scenario};
pub use error::{Error, Result};
pub use fusion::{EstimationResult, FusionSettings};
pub use geometry::Vec2;
pub use ofdm::OfdmConfig;
pub use preprocess::{coarse_estimate, RangeDopplerSearch, SearchGrid};
pub use report::BsReport;
pub use scalar::{Real, SPEED_OF_LIGHT};

pub type OfdmConfigF64 = OfdmConfig<f64>;
pub type OfdmConfigF32 = OfdmConfig<f32>;
pub type ScenarioF64 = Scenario<f64>;
pub type ScenarioF32 = Scenario<f32>;
pub type EchoF64 = EchoSymbolMatrix<f64>;
pub type EchoF32 = EchoSymbolMatrix<f32>;
pub type SearchGridF64 = SearchGrid<f64>;
pub type SearchGridF32 = SearchGrid<f32>;
pub type BsReportF64 = BsReport<f64>;
pub type BsReportF32 = BsReport<f32>;
pub type Point = Vec2<f64>;
pub type FusionSettingsF64 = FusionSettings<f64>;
pub type EstimationResultF64 = EstimationResult<f64>;
