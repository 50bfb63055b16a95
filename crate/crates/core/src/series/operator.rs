//! Differential operators `Σ z^a c_{a,p} D^p` over a differential ring.
//!
//! Composition applies the Leibniz rule `D^p ∘ c = Σ_t C(p,t) (D^t c) D^{p-t}`;
//! z is a central parameter.

use std::collections::BTreeMap;

use super::QSeries;
use crate::scalars::{FieldScalar, RationalFunction};

/// A commutative ring with a derivation, as seen by [`DiffOperator`].
pub trait DifferentialRing {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn scalar(&self, c: &FieldScalar) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn derive(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn one(&self) -> Self::Elem {
        self.scalar(&FieldScalar::one())
    }
}

/// Truncated q-series with the Euler derivation `D = q d/dq`.
#[derive(Clone, Debug)]
pub struct EulerSeriesRing {
    pub trunc: usize,
}

impl DifferentialRing for EulerSeriesRing {
    type Elem = QSeries;

    fn zero(&self) -> QSeries {
        QSeries::zero(self.trunc)
    }
    fn scalar(&self, c: &FieldScalar) -> QSeries {
        QSeries::constant(c.clone(), self.trunc)
    }
    fn add(&self, a: &QSeries, b: &QSeries) -> QSeries {
        a + b
    }
    fn neg(&self, a: &QSeries) -> QSeries {
        -a
    }
    fn mul(&self, a: &QSeries, b: &QSeries) -> QSeries {
        a * b
    }
    fn derive(&self, a: &QSeries) -> QSeries {
        a.euler_d()
    }
    fn is_zero(&self, a: &QSeries) -> bool {
        a.is_zero()
    }
}

/// Rational functions of one variable x with the derivation `g(x) d/dx`
/// (plain `d/dx` when `g = 1`).
#[derive(Clone, Debug)]
pub struct RationalFunctionRing {
    pub factor: RationalFunction,
}

impl RationalFunctionRing {
    pub fn plain() -> Self {
        RationalFunctionRing {
            factor: RationalFunction::one(),
        }
    }
}

impl DifferentialRing for RationalFunctionRing {
    type Elem = RationalFunction;

    fn zero(&self) -> RationalFunction {
        RationalFunction::zero()
    }
    fn scalar(&self, c: &FieldScalar) -> RationalFunction {
        RationalFunction::constant(c.clone())
    }
    fn add(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a + b
    }
    fn neg(&self, a: &RationalFunction) -> RationalFunction {
        -a
    }
    fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a * b
    }
    fn derive(&self, a: &RationalFunction) -> RationalFunction {
        &self.factor * &a.derivative()
    }
    fn is_zero(&self, a: &RationalFunction) -> bool {
        a.is_zero()
    }
}

/// Terms keyed by `(z power, D power)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOperator<E> {
    terms: BTreeMap<(u32, u32), E>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> DiffOperator<E> {
    pub fn zero() -> Self {
        DiffOperator {
            terms: BTreeMap::new(),
        }
    }

    pub fn term<R: DifferentialRing<Elem = E>>(ring: &R, z_pow: u32, d_pow: u32, coeff: E) -> Self {
        let mut op = Self::zero();
        op.accumulate(ring, (z_pow, d_pow), coeff);
        op
    }

    /// Multiplication by a ring element.
    pub fn multiplication<R: DifferentialRing<Elem = E>>(ring: &R, coeff: E) -> Self {
        Self::term(ring, 0, 0, coeff)
    }

    pub fn identity<R: DifferentialRing<Elem = E>>(ring: &R) -> Self {
        Self::term(ring, 0, 0, ring.one())
    }

    /// The derivation itself.
    pub fn derivation<R: DifferentialRing<Elem = E>>(ring: &R) -> Self {
        Self::term(ring, 0, 1, ring.one())
    }

    /// The constant `c z^k`.
    pub fn z_scalar<R: DifferentialRing<Elem = E>>(ring: &R, c: &FieldScalar, k: u32) -> Self {
        Self::term(ring, k, 0, ring.scalar(c))
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), E> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate<R: DifferentialRing<Elem = E>>(&mut self, ring: &R, key: (u32, u32), c: E) {
        if ring.is_zero(&c) {
            return;
        }
        match self.terms.remove(&key) {
            Some(old) => {
                let sum = ring.add(&old, &c);
                if !ring.is_zero(&sum) {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add<R: DifferentialRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(ring, *k, c.clone());
        }
        out
    }

    pub fn neg<R: DifferentialRing<Elem = E>>(&self, ring: &R) -> Self {
        DiffOperator {
            terms: self.terms.iter().map(|(k, c)| (*k, ring.neg(c))).collect(),
        }
    }

    pub fn sub<R: DifferentialRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn scale<R: DifferentialRing<Elem = E>>(&self, ring: &R, c: &FieldScalar) -> Self {
        let s = ring.scalar(c);
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.accumulate(ring, *k, ring.mul(&s, v));
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose<R: DifferentialRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let max_p = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        // derivatives D^t c of every coefficient of `other`, up to the order of `self`
        let derived: BTreeMap<(u32, u32), Vec<E>> = other
            .terms
            .iter()
            .map(|(k, c)| {
                let mut ds = vec![c.clone()];
                for _ in 0..max_p {
                    let next = ring.derive(ds.last().unwrap());
                    ds.push(next);
                }
                (*k, ds)
            })
            .collect();
        let mut out = Self::zero();
        for (&(a, p), c) in &self.terms {
            for (&(b, r), ds) in &derived {
                let mut binom = FieldScalar::one();
                for t in 0..=p {
                    if t > 0 {
                        binom = &(&binom * &FieldScalar::from_int((p - t + 1) as i64))
                            / &FieldScalar::from_int(t as i64);
                    }
                    if ring.is_zero(&ds[t as usize]) {
                        continue;
                    }
                    let coeff = ring.mul(&ring.mul(c, &ds[t as usize]), &ring.scalar(&binom));
                    out.accumulate(ring, (a + b, p - t + r), coeff);
                }
            }
        }
        out
    }

    /// Applies the operator to a ring element; the result is a z-polynomial
    /// with ring-element coefficients.
    pub fn apply<R: DifferentialRing<Elem = E>>(&self, ring: &R, x: &E) -> BTreeMap<u32, E> {
        let max_p = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut ds = vec![x.clone()];
        for _ in 0..max_p {
            let next = ring.derive(ds.last().unwrap());
            ds.push(next);
        }
        let mut out: BTreeMap<u32, E> = BTreeMap::new();
        for (&(a, p), c) in &self.terms {
            let v = ring.mul(c, &ds[p as usize]);
            let slot = out.entry(a).or_insert_with(|| ring.zero());
            *slot = ring.add(slot, &v);
        }
        out.retain(|_, v| !ring.is_zero(v));
        out
    }

    /// The coefficient of `z^m`, as a list of `(D power, coefficient)`.
    pub fn layer(&self, m: u32) -> BTreeMap<u32, E> {
        self.terms
            .iter()
            .filter(|(k, _)| k.0 == m)
            .map(|(k, c)| (k.1, c.clone()))
            .collect()
    }

    pub fn max_z(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }
}

/// Applies one z-layer (a plain differential operator) to an element.
pub fn apply_layer<R: DifferentialRing>(ring: &R, layer: &BTreeMap<u32, R::Elem>, x: &R::Elem) -> R::Elem {
    let max_p = layer.keys().copied().max().unwrap_or(0);
    let mut ds = vec![x.clone()];
    for _ in 0..max_p {
        let next = ring.derive(ds.last().unwrap());
        ds.push(next);
    }
    let mut acc = ring.zero();
    for (p, c) in layer {
        acc = ring.add(&acc, &ring.mul(c, &ds[*p as usize]));
    }
    acc
}
