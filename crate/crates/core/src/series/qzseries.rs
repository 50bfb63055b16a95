use serde::{Deserialize, Serialize};

use super::ZLaurent;
use crate::error::{Error, Result};
use crate::scalars::FieldScalar;

/// Truncated series in q whose q^d coefficient is a z-Laurent window
/// `[-d, zmax]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QZSeries {
    zmax: i64,
    rows: Vec<ZLaurent>,
}

/// One entry where two bi-graded series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub d: usize,
    pub z: i64,
    pub lhs: FieldScalar,
    pub rhs: FieldScalar,
}

impl QZSeries {
    pub fn zero(trunc: usize, zmax: i64) -> Self {
        QZSeries {
            zmax,
            rows: (0..=trunc).map(|d| ZLaurent::zero(-(d as i64), zmax)).collect(),
        }
    }

    pub fn one(trunc: usize, zmax: i64) -> Self {
        let mut s = Self::zero(trunc, zmax);
        s.rows[0].add_at(0, &FieldScalar::one());
        s
    }

    /// Re-windows every row onto `[-d, zmax]`; fails if a row carries a
    /// nonzero coefficient below `z^{-d}`.
    pub fn from_rows(rows: Vec<ZLaurent>, zmax: i64) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (d, row) in rows.into_iter().enumerate() {
            let bound = -(d as i64);
            if let Some(k) = row.coeffs.iter().position(|c| !c.is_zero()) {
                let e = row.zmin + k as i64;
                if e < bound {
                    return Err(Error::PoleBound {
                        found: -e,
                        bound: d as i64,
                    });
                }
            }
            let mut w = ZLaurent::zero(bound, zmax);
            for (k, c) in row.coeffs.iter().enumerate() {
                w.add_at(row.zmin + k as i64, c);
            }
            out.push(w);
        }
        if out.is_empty() {
            return Err(Error::Domain("a bi-graded series needs at least one row".into()));
        }
        Ok(QZSeries { zmax, rows: out })
    }

    pub fn trunc(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn zmax(&self) -> i64 {
        self.zmax
    }

    pub fn rows(&self) -> &[ZLaurent] {
        &self.rows
    }

    pub fn row(&self, d: usize) -> &ZLaurent {
        &self.rows[d]
    }

    pub fn coeff(&self, d: usize, z: i64) -> FieldScalar {
        self.rows.get(d).map(|r| r.coeff(z)).unwrap_or_else(FieldScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(ZLaurent::is_zero)
    }

    /// First disagreement scanning rows in order, with exponents of row d
    /// restricted to `[-d, window(d)]`.
    pub fn first_mismatch(&self, other: &QZSeries, window: impl Fn(usize) -> i64) -> Option<Mismatch> {
        let rows = self.trunc().min(other.trunc());
        for d in 0..=rows {
            for z in -(d as i64)..=window(d) {
                let (lhs, rhs) = (self.coeff(d, z), other.coeff(d, z));
                if lhs != rhs {
                    return Some(Mismatch { d, z, lhs, rhs });
                }
            }
        }
        None
    }

    pub fn add(&self, other: &QZSeries) -> QZSeries {
        let zmax = self.zmax.min(other.zmax);
        let trunc = self.trunc().min(other.trunc());
        let rows = (0..=trunc)
            .map(|d| {
                let mut w = ZLaurent::zero(-(d as i64), zmax);
                for z in -(d as i64)..=zmax {
                    w.add_at(z, &(&self.coeff(d, z) + &other.coeff(d, z)));
                }
                w
            })
            .collect();
        QZSeries { zmax, rows }
    }
}

#[derive(Serialize, Deserialize)]
struct RowJson {
    d: usize,
    zmin: i64,
    coeffs: Vec<FieldScalar>,
}

#[derive(Serialize, Deserialize)]
struct QZSeriesJson {
    trunc: usize,
    zmax: i64,
    rows: Vec<RowJson>,
}

impl Serialize for QZSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QZSeriesJson {
            trunc: self.trunc(),
            zmax: self.zmax,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(d, r)| RowJson {
                    d,
                    zmin: r.zmin,
                    coeffs: r.coeffs.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QZSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = QZSeriesJson::deserialize(d)?;
        if raw.rows.len() != raw.trunc + 1 || raw.rows.iter().enumerate().any(|(d, r)| r.d != d) {
            return Err(serde::de::Error::custom("rows must be listed for d = 0..=trunc in order"));
        }
        let rows = raw
            .rows
            .into_iter()
            .map(|r| ZLaurent {
                zmin: r.zmin,
                coeffs: r.coeffs,
            })
            .collect();
        QZSeries::from_rows(rows, raw.zmax).map_err(serde::de::Error::custom)
    }
}
