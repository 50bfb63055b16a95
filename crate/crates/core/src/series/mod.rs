//! Truncated q-series, their z-graded extension, and differential operators.

mod laurent;
mod operator;
mod qseries;
mod qzseries;

pub use laurent::{zq_laurent_expand, ZLaurent};
pub use operator::{apply_layer, DiffOperator, DifferentialRing, EulerSeriesRing, RationalFunctionRing};
pub use qseries::QSeries;
pub use qzseries::{Mismatch, QZSeries};
