use nalgebra::{DMatrix, SymmetricEigen};

use super::program::{matrix_to_svec, svec_to_matrix, Cone};

/// Euclidean projection of `v` onto `cone`.
///
/// Panics if `v.len() != cone.dim()`.
pub fn project_cone(v: &[f64], cone: &Cone) -> Vec<f64> {
    let mut out = v.to_vec();
    project_in_place(&mut out, cone);
    out
}

pub(crate) fn project_in_place(v: &mut [f64], cone: &Cone) {
    assert_eq!(v.len(), cone.dim(), "vector length does not match {} cone", cone.name());
    match *cone {
        Cone::Zero(_) => v.iter_mut().for_each(|x| *x = 0.0),
        Cone::Free(_) => {}
        Cone::NonNeg(_) => v.iter_mut().for_each(|x| *x = x.max(0.0)),
        Cone::Soc(_) => project_soc(v),
        Cone::RotSoc(_) => project_rotsoc(v),
        Cone::Psd(side) => project_psd(v, side),
    }
}

/// `v = (t, u)`, cone `|u| <= t`.
fn project_soc(v: &mut [f64]) {
    let t = v[0];
    let norm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= t {
        return;
    }
    if norm <= -t {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let scale = 0.5 * (t + norm);
    v[0] = scale;
    let f = scale / norm;
    v[1..].iter_mut().for_each(|x| *x *= f);
}

// (a, b, u) with 2ab >= |u|^2 maps to the ordinary cone through
// t = (a+b)/sqrt2, s = (a-b)/sqrt2, which is orthogonal.
fn project_rotsoc(v: &mut [f64]) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = (v[0], v[1]);
    v[0] = r * (a + b);
    v[1] = r * (a - b);
    project_soc(v);
    let (t, s) = (v[0], v[1]);
    v[0] = r * (t + s);
    v[1] = r * (t - s);
}

fn project_psd(v: &mut [f64], side: usize) {
    match side {
        0 => {}
        1 => v[0] = v[0].max(0.0),
        _ => {
            let m = svec_to_matrix(v, side);
            let eig = SymmetricEigen::new(m);
            if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
                return;
            }
            let clamped = eig.eigenvalues.map(|l| l.max(0.0));
            let q = &eig.eigenvectors;
            let p: DMatrix<f64> = q * DMatrix::from_diagonal(&clamped) * q.transpose();
            matrix_to_svec(&p, v);
        }
    }
}

/// Distance from `v` to `cone`.
pub fn cone_distance(v: &[f64], cone: &Cone) -> f64 {
    let p = project_cone(v, cone);
    v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Distance from `v` to the product cone `cones`, blockwise.
pub fn product_distance(v: &[f64], cones: &[Cone]) -> f64 {
    let mut off = 0;
    let mut sq = 0.0;
    for c in cones {
        let d = cone_distance(&v[off..off + c.dim()], c);
        sq += d * d;
        off += c.dim();
    }
    sq.sqrt()
}
