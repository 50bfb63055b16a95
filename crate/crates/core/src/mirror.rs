use num_bigint::BigInt;

use crate::error::Result;
use crate::scalars::FieldScalar;
use crate::series::QSeries;

/// The local P^1 mirror map `Q(q) = q · exp(2 Σ_{d≥1} (2d-1)!/(d!)^2 q^d)`
/// through `q^order`.
pub fn mirror_map(order: usize) -> Result<QSeries> {
    let trunc = order.saturating_sub(1);
    let mut exponent = vec![FieldScalar::zero()];
    let mut fact = BigInt::from(1);
    let mut odd_fact = BigInt::from(1); // (2d-1)!
    for d in 1..=trunc {
        fact *= d;
        if d > 1 {
            odd_fact *= BigInt::from(2 * d - 2) * BigInt::from(2 * d - 1);
        }
        exponent.push(FieldScalar::rational(BigInt::from(2) * &odd_fact, &fact * &fact)?);
    }
    let e = QSeries::new(exponent, trunc).exp()?;
    Ok(times_q(&e))
}

/// `q · a`, one order longer than `a`.
fn times_q(a: &QSeries) -> QSeries {
    let mut coeffs = vec![FieldScalar::zero()];
    coeffs.extend(a.coeffs().iter().cloned());
    QSeries::new(coeffs, a.trunc() + 1)
}
