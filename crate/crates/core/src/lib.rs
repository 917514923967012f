//! Key predistribution schemes for sensor networks built from the duals of
//! PBIB designs (`lambda_1 = 0, lambda_2 = 1`) and BIB designs
//! (`lambda = 1`).
//!
//! A scheme with threshold `q = t` takes `t` dual designs; each node holds
//! the union of one block from every dual, and two nodes communicate
//! directly when they share at least `q` keys. Because node association
//! factorises into block association, connectivity (`Pr_1`, `Pr_2`) and
//! resiliency (`fail(s)`) follow from small per-design tables.
//!
//! ```
//! use kps_core::{fixtures::toy_kps, metrics, Exact};
//!
//! let kps = toy_kps();
//! assert_eq!((kps.n(), kps.k()), (54, 7));
//! let pr1: Exact = metrics::pr1(&kps);
//! assert_eq!(kps_core::scalar::render_rational(&pr1, 4), "0.6981");
//! ```

mod bits;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod kps;
pub mod metrics;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod scheme;
pub mod sharedkey;
pub mod spec;
pub mod tables;

pub use design::{BlockDesign, DualDesign, Role};
pub use error::{Error, Result};
pub use kps::{AssocTuple, KeyId, Kps, NodeId};
pub use metrics::{BetaMode, FailMode};
pub use scalar::Scalar;
pub use scheme::{AssociationScheme, LatinSquare};

/// Exact evaluation scalar.
pub type Exact = num_rational::BigRational;
/// Floating-point evaluation scalar.
pub type Float = f64;
/// `fail(s)` evaluated exactly.
pub type ExactFail = metrics::Fail<Exact>;
/// `fail(s)` evaluated in floating point.
pub type FloatFail = metrics::Fail<Float>;
