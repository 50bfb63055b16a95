//! Weight configurations, the L-series and the ring the asymptotic
//! coefficients live in.

mod gn;
mod lambda;

pub use gn::{Expansion, GnBasis, GnElement};
pub use lambda::{LambdaConfig, LambdaSpec};
