use serde::{Deserialize, Serialize};

use super::QSeries;
use crate::error::{Error, Result};
use crate::scalars::{FieldScalar, Poly};

/// A window `[zmin, zmin + len)` of a Laurent expansion in z.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZLaurent {
    pub zmin: i64,
    pub coeffs: Vec<FieldScalar>,
}

impl ZLaurent {
    /// Zero window covering `[zmin, zmax]`.
    pub fn zero(zmin: i64, zmax: i64) -> Self {
        let len = (zmax - zmin + 1).max(0) as usize;
        ZLaurent {
            zmin,
            coeffs: vec![FieldScalar::zero(); len],
        }
    }

    pub fn zmax(&self) -> i64 {
        self.zmin + self.coeffs.len() as i64 - 1
    }

    /// Zero outside the stored window.
    pub fn coeff(&self, e: i64) -> FieldScalar {
        if e < self.zmin {
            return FieldScalar::zero();
        }
        self.coeffs
            .get((e - self.zmin) as usize)
            .cloned()
            .unwrap_or_else(FieldScalar::zero)
    }

    pub fn add_at(&mut self, e: i64, c: &FieldScalar) {
        if e >= self.zmin && e <= self.zmax() {
            let k = (e - self.zmin) as usize;
            self.coeffs[k] = &self.coeffs[k] + c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldScalar::is_zero)
    }

    /// Product with a z-polynomial, kept on the same window. Exact because the
    /// polynomial only raises exponents.
    pub fn mul_poly(&self, p: &Poly) -> ZLaurent {
        let mut out = ZLaurent {
            zmin: self.zmin,
            coeffs: vec![FieldScalar::zero(); self.coeffs.len()],
        };
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in p.coeffs().iter().enumerate() {
                let k = i + j;
                if k >= out.coeffs.len() {
                    break;
                }
                if !b.is_zero() {
                    out.coeffs[k] = &out.coeffs[k] + &(a * b);
                }
            }
        }
        out
    }

    /// Product of two windows, restricted to `[zmin, zmax]`. Exact only when
    /// both factors are exact on every exponent that can contribute.
    pub fn mul(&self, other: &ZLaurent, zmin: i64, zmax: i64) -> ZLaurent {
        let mut out = ZLaurent::zero(zmin, zmax);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    let e = self.zmin + other.zmin + (i + j) as i64;
                    out.add_at(e, &(a * b));
                }
            }
        }
        out
    }
}

/// Laurent expansion of `num/den` around z = 0 on the window
/// `[-pole_bound, z_max]`.
pub fn zq_laurent_expand(num: &Poly, den: &Poly, pole_bound: i64, z_max: i64) -> Result<ZLaurent> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut out = ZLaurent::zero(-pole_bound, z_max);
    if num.is_zero() {
        return Ok(out);
    }
    let (vn, vd) = (num.valuation(), den.valuation());
    let lead = vn as i64 - vd as i64;
    if -lead > pole_bound {
        return Err(Error::PoleBound {
            found: -lead,
            bound: pole_bound,
        });
    }
    if z_max < lead {
        return Ok(out);
    }
    let prec = (z_max - lead) as usize;
    let unit = QSeries::from_poly(&den.shift_down(vd), prec);
    let quotient = QSeries::from_poly(&num.shift_down(vn), prec).checked_div(&unit)?;
    for (k, c) in quotient.coeffs().iter().enumerate() {
        out.add_at(lead + k as i64, c);
    }
    Ok(out)
}
