//! Four small reference data sets of bivariate intervals and the printed
//! three-decimal variance/covariance table computed from them.

use crate::interval::{validate_sample, BivariateIntervalSample};

/// Rows are `(c, d, a, b)`: `x = [c, d]`, `y = [a, b]`.
const SET_1: [[f64; 4]; 3] = [
    [1.0, 4.0, 6.0, 7.0],
    [2.0, 7.0, 6.0, 9.0],
    [1.0, 5.0, 5.0, 8.0],
];

const SET_2: [[f64; 4]; 3] = [
    [3.0, 7.0, 6.0, 12.0],
    [1.0, 8.0, 3.0, 15.0],
    [2.0, 15.0, 3.0, 22.0],
];

const SET_3: [[f64; 4]; 4] = [
    [5.0, 9.0, 3.0, 4.0],
    [4.0, 8.0, 1.0, 6.0],
    [4.0, 10.0, 2.0, 5.0],
    [3.0, 7.0, 2.0, 4.0],
];

// Classical points.
const SET_4: [[f64; 4]; 3] = [
    [4.0, 4.0, 3.0, 3.0],
    [5.0, 5.0, 6.0, 6.0],
    [3.0, 3.0, 5.0, 5.0],
];

/// Raw `(c, d, a, b)` rows of reference set `index` (1 to 4).
pub fn reference_rows(index: usize) -> Option<Vec<[f64; 4]>> {
    match index {
        1 => Some(SET_1.to_vec()),
        2 => Some(SET_2.to_vec()),
        3 => Some(SET_3.to_vec()),
        4 => Some(SET_4.to_vec()),
        _ => None,
    }
}

pub fn reference_set(index: usize) -> Option<BivariateIntervalSample> {
    reference_rows(index).map(|rows| validate_sample(&rows).expect("reference data are valid"))
}

/// All four reference sets, in order.
pub fn reference_sets() -> Vec<BivariateIntervalSample> {
    (1..=4).filter_map(reference_set).collect()
}

/// Printed 3-decimal variances: `Var(Y^c), Var(Y^r), sum, Var(Y)` per set.
pub const PRINTED_VARIANCES_Y: [[f64; 4]; 4] = [
    [0.222, 0.889, 1.111, 0.750],
    [2.722, 28.222, 30.944, 17.750],
    [0.047, 2.188, 2.234, 0.859],
    [1.556, 0.000, 1.556, 1.556],
];

/// Printed 3-decimal covariances: `Cov(Y^c,X^c), Cov(Y^r,X^r), sum, Cov(Y,X)` per set.
pub const PRINTED_COVARIANCES: [[f64; 4]; 4] = [
    [0.389, 0.667, 1.056, 1.222],
    [2.917, 19.667, 22.583, 12.778],
    [0.156, 0.125, 0.281, 1.198],
    [0.333, 0.000, 0.333, 0.333],
];
