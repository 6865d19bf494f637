use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial `x^alpha`.
///
/// Ordered graded-lexicographically: lower total degree first, and within a
/// degree the lexicographically larger vector first, so the basis reads
/// `1, x1, x2, ..., x1^2, x1*x2, ...`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct Exponent {
    powers: Vec<u32>,
    degree: u32,
}

impl Exponent {
    pub fn new(powers: Vec<u32>) -> Self {
        let degree = powers.iter().sum();
        Self { powers, degree }
    }

    pub fn zero(n: usize) -> Self {
        Self { powers: vec![0; n], degree: 0 }
    }

    /// `x_var^power` in `n` variables.
    pub fn unit(n: usize, var: usize, power: u32) -> Self {
        let mut powers = vec![0; n];
        powers[var] = power;
        Self { powers, degree: power }
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn n(&self) -> usize {
        self.powers.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Exponent of the product `x^self * x^other`.
    pub fn product(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.n(), other.n());
        let powers: Vec<u32> = self.powers.iter().zip(&other.powers).map(|(a, b)| a + b).collect();
        Exponent { powers, degree: self.degree + other.degree }
    }

    /// Indices of variables with a positive power.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.powers.iter().enumerate().filter(|(_, &a)| a > 0).map(|(i, _)| i)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.powers
            .iter()
            .zip(x)
            .filter(|(&a, _)| a > 0)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(powers: Vec<u32>) -> Self {
        Exponent::new(powers)
    }
}

impl From<Exponent> for Vec<u32> {
    fn from(e: Exponent) -> Self {
        e.powers
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.powers.cmp(&self.powers))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &a) in self.powers.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if a == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, a)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.powers)
    }
}

/// Ordered list of distinct exponents spanning a monomial vector `z(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialBasis {
    entries: Vec<Exponent>,
}

impl MonomialBasis {
    /// Builds a basis from arbitrary exponents, sorting and dropping duplicates.
    pub fn new(mut entries: Vec<Exponent>) -> Self {
        entries.sort();
        entries.dedup();
        Self { entries }
    }

    pub fn entries(&self) -> &[Exponent] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of variables, or 0 for an empty basis.
    pub fn n(&self) -> usize {
        self.entries.first().map_or(0, Exponent::n)
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.iter().map(Exponent::degree).max().unwrap_or(0)
    }

    pub fn index_of(&self, e: &Exponent) -> Option<usize> {
        self.entries.binary_search(e).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Exponent> {
        self.entries.iter()
    }
}

/// All exponents in `n` variables with total degree exactly `d`, in basis order.
pub fn monomials_of_degree(n: usize, d: u32) -> MonomialBasis {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    compositions(&mut current, 0, d, &mut out);
    // compositions are produced in descending lex order, which is basis order
    MonomialBasis { entries: out }
}

/// All exponents in `n` variables with total degree at most `d`; there are
/// `C(n + d, d)` of them.
pub fn monomials_up_to(n: usize, d: u32) -> MonomialBasis {
    let mut entries = Vec::new();
    for deg in 0..=d {
        entries.extend(monomials_of_degree(n, deg).entries);
    }
    MonomialBasis { entries }
}

/// Monomials of degree at most `d` that only involve the variables in `vars`,
/// embedded in `n`-variable exponents.
pub fn monomials_in_vars(n: usize, vars: &[usize], d: u32) -> MonomialBasis {
    let local = monomials_up_to(vars.len(), d);
    let entries = local
        .entries
        .into_iter()
        .map(|e| {
            let mut powers = vec![0; n];
            for (k, &v) in vars.iter().enumerate() {
                powers[v] = e.powers[k];
            }
            Exponent::new(powers)
        })
        .collect();
    MonomialBasis::new(entries)
}

fn compositions(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Exponent>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Exponent::new(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(Exponent::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        compositions(current, pos + 1, remaining - a, out);
    }
    current[pos] = 0;
}

/// Binomial coefficient as `u64`; exact for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
