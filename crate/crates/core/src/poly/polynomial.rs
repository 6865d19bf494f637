use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Exponent, PolyError};

/// Sparse real polynomial in `n` variables.
///
/// Terms are kept in graded-lex order and exact zeros are never stored.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::zero(n), c);
        p
    }

    /// The polynomial `x_var`.
    pub fn var(n: usize, var: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::unit(n, var, 1), 1.0);
        p
    }

    pub fn monomial(exponent: Exponent, coefficient: f64) -> Self {
        let mut p = Self::zero(exponent.n());
        p.add_term(exponent, coefficient);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Exponent, f64)>,
    {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.n() != n {
                return Err(PolyError::DimensionMismatch { expected: n, found: e.n() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// `(x_1^2 + ... + x_n^2)^k`.
    pub fn squared_norm_power(n: usize, k: u32) -> Self {
        let mut sq = Self::zero(n);
        for i in 0..n {
            sq.add_term(Exponent::unit(n, i, 2), 1.0);
        }
        let mut out = Self::constant(n, 1.0);
        for _ in 0..k {
            out = out.mul(&sq).expect("same variable count");
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest total degree among stored terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, e: &Exponent) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|e| e.degree() == d)
    }

    /// Adds `c * x^e` in place, dropping the term if it cancels to exactly zero.
    pub fn add_term(&mut self, e: Exponent, c: f64) {
        debug_assert_eq!(e.n(), self.n);
        if c == 0.0 {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(self.terms.iter().map(|(e, c)| c * e.eval(x)).sum())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_same_n(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), c * v);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_same_n(other)?;
        let mut out = Polynomial::zero(self.n);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                out.add_term(ea.product(eb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Largest absolute coefficient of `self - other`.
    pub fn max_coefficient_gap(&self, other: &Polynomial) -> Result<f64, PolyError> {
        let diff = self.sub(other)?;
        Ok(diff.terms.values().fold(0.0, |m, c| m.max(c.abs())))
    }

    fn check_same_n(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.n != other.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if e.degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn eval_examples() {
        let p = x(2, 0).mul(&x(2, 0)).unwrap().add(&x(2, 1).mul(&x(2, 1)).unwrap()).unwrap();
        assert_eq!(p.eval(&[0.0, 0.0]).unwrap(), 0.0);
        let q = Polynomial::monomial(Exponent::new(vec![4]), 2.0);
        assert_eq!(q.eval(&[1.0]).unwrap(), 2.0);
        let motzkin = Polynomial::from_terms(
            2,
            [
                (Exponent::new(vec![4, 2]), 1.0),
                (Exponent::new(vec![2, 4]), 1.0),
                (Exponent::new(vec![2, 2]), -3.0),
                (Exponent::new(vec![0, 0]), 1.0),
            ],
        )
        .unwrap();
        assert_eq!(motzkin.eval(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let p = x(2, 0);
        assert!(matches!(p.eval(&[1.0]), Err(PolyError::DimensionMismatch { .. })));
    }

    #[test]
    fn difference_of_squares() {
        let a = x(2, 0).add(&x(2, 1)).unwrap();
        let b = x(2, 0).sub(&x(2, 1)).unwrap();
        let prod = a.mul(&b).unwrap();
        let expected = Polynomial::from_terms(
            2,
            [(Exponent::new(vec![2, 0]), 1.0), (Exponent::new(vec![0, 2]), -1.0)],
        )
        .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn cancellation_gives_empty_map() {
        let p = x(3, 0).add(&Polynomial::constant(3, 2.5)).unwrap();
        let z = p.add(&p.scale(-1.0)).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn binomial_square() {
        let one_plus_x = Polynomial::constant(1, 1.0).add(&x(1, 0)).unwrap();
        let sq = one_plus_x.mul(&one_plus_x).unwrap();
        assert_eq!(sq.coefficient(&Exponent::new(vec![0])), 1.0);
        assert_eq!(sq.coefficient(&Exponent::new(vec![1])), 2.0);
        assert_eq!(sq.coefficient(&Exponent::new(vec![2])), 1.0);
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn mismatched_dimensions() {
        assert!(x(2, 0).add(&x(3, 0)).is_err());
        assert!(x(2, 0).mul(&x(3, 0)).is_err());
    }

    #[test]
    fn squared_norm_power_expands() {
        let p = Polynomial::squared_norm_power(2, 2);
        assert_eq!(p.coefficient(&Exponent::new(vec![4, 0])), 1.0);
        assert_eq!(p.coefficient(&Exponent::new(vec![2, 2])), 2.0);
        assert!(p.is_homogeneous());
        assert_eq!(p.degree(), 4);
    }
}
