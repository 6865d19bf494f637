use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LiftError;
use crate::poly::{Exponent, Polynomial};

/// Rows are pairs `i1 < i2` (1-based, lexicographic), columns `j = 1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackMatrix {
    pub k: usize,
    pub rows: Vec<(usize, usize)>,
    pub entries: Vec<Vec<i64>>,
}

impl SlackMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.k
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.nrows(), self.k, |r, c| self.entries[r][c] as f64)
    }

    /// One line per pair: `i1,i2,S[.,1],...,S[.,k]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i1,i2");
        for j in 1..=self.k {
            out.push_str(&format!(",j{j}"));
        }
        out.push('\n');
        for ((i1, i2), row) in self.rows.iter().zip(&self.entries) {
            out.push_str(&format!("{i1},{i2}"));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

fn pairs(k: usize) -> Vec<(usize, usize)> {
    (1..=k).flat_map(|i1| (i1 + 1..=k).map(move |i2| (i1, i2))).collect()
}

/// `S[{i1,i2}, j] = ((i1 - i2)(i1 - j)(i2 - j))^2`.
pub fn slack_matrix(k: usize) -> Result<SlackMatrix, LiftError> {
    if k < 2 {
        return Err(LiftError::TooSmall(k));
    }
    let rows = pairs(k);
    let entries = rows
        .iter()
        .map(|&(i1, i2)| {
            (1..=k)
                .map(|j| {
                    let (a, b, c) = (i1 as i64, i2 as i64, j as i64);
                    let v = (a - b) * (a - c) * (b - c);
                    v * v
                })
                .collect()
        })
        .collect();
    Ok(SlackMatrix { k, rows, entries })
}

/// Coefficients `c_0..c_4` of `((i1 - i2)(i1 - t)(i2 - t))^2`.
pub fn pair_square_coefficients(i1: i64, i2: i64) -> [i64; 5] {
    let d = (i1 - i2) * (i1 - i2);
    // (i1 - t)(i2 - t) = p + q t + t^2
    let (p, q) = (i1 * i2, -(i1 + i2));
    [d * p * p, d * 2 * p * q, d * (q * q + 2 * p), d * 2 * q, d]
}

/// The points `v_{i1,i2}` of the cone of nonnegative quartics, in slack row order.
pub fn pair_square_points(k: usize) -> Vec<Polynomial> {
    pairs(k)
        .into_iter()
        .map(|(i1, i2)| {
            let c = pair_square_coefficients(i1 as i64, i2 as i64);
            let terms = (0..5).map(|e| (Exponent::new(vec![e as u32]), c[e] as f64));
            Polynomial::from_terms(1, terms).expect("univariate terms")
        })
        .collect()
}

/// Moment vector `(1, t, t^2, t^3, t^4)`.
pub fn dual_point(t: f64) -> [f64; 5] {
    [1.0, t, t * t, t * t * t, t * t * t * t]
}

fn quartic_coefficients(v: &Polynomial, index: usize) -> Result<[f64; 5], LiftError> {
    if v.n() != 1 || v.degree() > 4 {
        return Err(LiftError::NotQuartic { index });
    }
    let mut c = [0.0; 5];
    for (e, x) in v.terms() {
        c[e.powers()[0] as usize] = x;
    }
    Ok(c)
}

fn as_integer(x: f64) -> Option<i128> {
    (x.fract() == 0.0 && x.abs() < 1e15).then_some(x as i128)
}

/// `S[r, c] = <ls[c], vs[r]>`, the coefficient pairing of a quartic with a
/// moment vector. Integral inputs are paired in exact integer arithmetic.
///
/// Each quartic is sampled for nonnegativity down to `-tol` before pairing.
pub fn slack_from_cone_points(vs: &[Polynomial], ls: &[[f64; 5]], tol: f64) -> Result<DMatrix<f64>, LiftError> {
    let coeffs: Vec<[f64; 5]> = vs.iter().enumerate().map(|(i, v)| quartic_coefficients(v, i)).collect::<Result<_, _>>()?;
    let reach = ls.iter().map(|l| l[1].abs()).fold(1.0, f64::max) + 1.0;
    for (index, c) in coeffs.iter().enumerate() {
        for s in 0..=400 {
            let t = -reach + 2.0 * reach * s as f64 / 400.0;
            let value = c.iter().rev().fold(0.0, |acc, &x| acc * t + x);
            if value < -tol {
                return Err(LiftError::NegativeSample { index, t, value });
            }
        }
    }
    let exact: Option<(Vec<Vec<i128>>, Vec<Vec<i128>>)> = (|| {
        let ci = coeffs.iter().map(|c| c.iter().map(|&x| as_integer(x)).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>()?;
        let li = ls.iter().map(|l| l.iter().map(|&x| as_integer(x)).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>()?;
        Some((ci, li))
    })();
    let mut s = DMatrix::zeros(vs.len(), ls.len());
    for r in 0..vs.len() {
        for c in 0..ls.len() {
            let value = match &exact {
                Some((ci, li)) => ci[r].iter().zip(&li[c]).map(|(a, b)| a * b).sum::<i128>() as f64,
                None => coeffs[r].iter().zip(&ls[c]).map(|(a, b)| a * b).sum(),
            };
            if value < -tol {
                return Err(LiftError::NegativeEntry { row: r, col: c, value });
            }
            s[(r, c)] = value;
        }
    }
    Ok(s)
}
