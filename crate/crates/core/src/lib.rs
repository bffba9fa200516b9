//! Valuation classes over a finite item set, exhaustive class checkers, and
//! learners for them from samples, prices and value queries.

pub mod distribution;
pub mod error;
pub mod ext_f64;
pub mod harness;
pub mod hypothesis;
pub mod instances;
pub mod itemset;
pub mod learners;
pub mod linsep;
pub mod oracles;
pub mod price_learning;
pub mod query_learners;
pub mod subsets;
pub mod valuation;

pub use error::{Error, Result};
pub use hypothesis::Hypothesis;
pub use itemset::ItemSet;
pub use learners::Sample;
pub use valuation::{SetFunction, Valuation};
