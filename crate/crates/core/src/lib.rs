//! Selection-valid inference for sequential regression procedures.
//!
//! The crate provides forward stepwise selection with six per-step p-value
//! methods (naive, exact max-|t| by simulation, Bonferroni, Scheffé, F-test of
//! the remaining variation and the gap statistic `t_max (t_max - t_2nd)`),
//! a LARS/lasso path with a knot-spacing significance test, a pairs bootstrap
//! that aggregates lasso p-value sequences, and a simulation harness for the
//! null laws these tests rely on.
//!
//! All noise-model statistics share a single error-scale estimate taken from
//! the full model (intercept plus every predictor). Submodels never refit it.
//!
//! ```no_run
//! use postsel_core::{data, stepwise};
//!
//! let ds = data::load_csv("winequality-red.csv", &data::LoadOptions::new("quality")).unwrap();
//! let table = stepwise::run_stepwise(&ds, &stepwise::StepwiseConfig::default()).unwrap();
//! for rec in &table.records {
//!     println!("{:>2} {:<22} {:8.4}", rec.step, rec.name, rec.t_selected);
//! }
//! ```

pub mod bootstrap;
pub mod data;
pub mod dists;
pub mod error;
pub mod lasso;
pub mod linalg;
pub mod linmodel;
pub mod nullsim;
pub mod rng;
pub mod stats;
pub mod stepwise;

pub use bootstrap::{BootstrapConfig, BootstrapSummary};
pub use data::{Dataset, LoadOptions};
pub use error::{Error, Result};
pub use lasso::{LassoPath, LassoStepPValue, Reference};
pub use linmodel::{ActiveSet, AdjustedPredictor, SigmaEstimate};
pub use nullsim::NullSimReport;
pub use rng::RngStream;
pub use stepwise::{Method, StepRecord, StepwiseConfig, StepwiseTable};
