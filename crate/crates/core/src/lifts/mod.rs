//! Slack matrices of the cone of nonnegative univariate quartics and checks of
//! claimed factorizations through products of 2x2 PSD cones.

mod factorization;
mod slack;

use thiserror::Error;

pub use factorization::{verify_s2_factorization, FactorSide, S2Report, S2Violation, S2Witness};
pub use slack::{dual_point, pair_square_coefficients, pair_square_points, slack_from_cone_points, slack_matrix, SlackMatrix};

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("slack matrices need k >= 2, got {0}")]
    TooSmall(usize),
    #[error("cone point {index} is not a univariate polynomial of degree at most 4")]
    NotQuartic { index: usize },
    #[error("cone point {index} is negative at t = {t} (value {value:.3e})")]
    NegativeSample { index: usize, t: f64, value: f64 },
    #[error("pairing ({row}, {col}) is negative: {value:.3e}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
}
