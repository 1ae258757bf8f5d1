//! Exact majority search under a counting equality oracle.
//!
//! Balls are indexed `0..n`; the only way to learn about colors is
//! [`oracle::CountingOracle::cmp`], which counts every call. Algorithms return
//! an [`answer::Answer`] together with a [`certify::Certificate`] that
//! [`certify::audit`] checks against the recorded transcript.

pub mod answer;
pub mod bench;
pub mod certify;
pub mod classic;
pub mod error;
pub mod instance;
pub mod lab;
pub mod oracle;
pub mod randomized;
pub mod rng;

pub use answer::Answer;
pub use certify::{audit, Certificate};
pub use error::{Error, Result};
pub use instance::{DistributionSpec, Instance};
pub use oracle::{ComparisonRecord, CountingOracle};
pub use randomized::Params;
pub use rng::RandomStream;
