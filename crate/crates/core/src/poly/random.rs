use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{monomials_of_degree, monomials_up_to, Exponent, Polynomial};

/// Random unconstrained test polynomial `p0(x) + sum_i x_i^(2d)`, where `p0`
/// has a standard-normal coefficient on every monomial of degree below `2d`.
///
/// The pure powers make the polynomial coercive, so its minimum exists.
pub fn random_pop_instance(n: usize, d: u32, seed: u64) -> Polynomial {
    assert!(n >= 1 && d >= 1, "random_pop_instance needs n >= 1 and d >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Polynomial::zero(n);
    for e in monomials_up_to(n, 2 * d - 1).iter() {
        let c: f64 = StandardNormal.sample(&mut rng);
        p.add_term(e.clone(), c);
    }
    for i in 0..n {
        p.add_term(Exponent::unit(n, i, 2 * d), 1.0);
    }
    p
}

/// Random form of exact degree `degree` with standard-normal coefficients on
/// every monomial of that degree.
pub fn random_form(n: usize, degree: u32, seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Polynomial::zero(n);
    for e in monomials_of_degree(n, degree).iter() {
        let c: f64 = StandardNormal.sample(&mut rng);
        p.add_term(e.clone(), c);
    }
    p
}
