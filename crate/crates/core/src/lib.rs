//! Component importance measures for binary coherent reliability systems.
//!
//! The crate covers measures at a fixed instant (Birnbaum, risk
//! achievement/reduction, covariance and information importance) and
//! measures built from component lifetime distributions (L1- and
//! L∞-covariance importance, Natvig's measure for exponential lifetimes),
//! together with exact-enumeration and Monte Carlo oracles.

pub mod binary;
pub mod certificates;
pub mod continuous;
pub mod entropy;
pub mod lifetime;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod error;
pub mod generate;
pub mod reliability;
pub mod report;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use reliability::ProbabilityVector;
pub use report::ImportanceReport;
pub use structure::StructureFunction;
