//! Computational experiments on multiplicative-semigroup actions on the
//! circle: exact semigroup enumeration and density profiles, exact-query
//! measure models, information-function entropy estimation, the
//! collision/reconstruction rigidity pipeline, Weyl-sum equidistribution
//! statistics, and an iterative construction of a positive-density semigroup
//! with a non-equidistributed orbit. All certificates are exact rational or
//! certified-interval inequalities.

pub mod angle;
pub mod arith;
pub mod entropy;
pub mod equidist;
pub mod error;
pub mod measure;
pub mod nazarov;
pub mod rigidity;
pub mod semigroup;
pub mod trig;

pub use error::{Error, Result};
