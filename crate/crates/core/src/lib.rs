pub mod analytic;
pub mod asymptotics;
pub mod cli;
pub mod corpus;
pub mod equivalence;
pub mod error;
pub mod means;
pub mod quadrature;
pub mod report;
pub mod weights;

pub use analytic::{AnalyticFunction, ClosedForm, Complex, DiscPoint, FunctionSpec};
pub use error::{Error, Result};
pub use means::{MeanValue, QuadratureConfig, SpaceSpec};
pub use asymptotics::{ExponentFit, GridKind, MeanProfile, Verdict};
pub use weights::{Weight, WeightClassification, WeightForm};
