//! Principal components of p-variable interval data.
//!
//! The covariance matrix is assembled pairwise from the overall bivariate
//! estimators, diagonalized with cyclic Jacobi rotations, and each
//! observation's hyper-rectangle is projected onto the eigenvectors to give
//! one interval per component (vertex projection).

#![allow(clippy::needless_range_loop)]

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::overall_estimates;
use crate::interval::{BivariateIntervalObs, BivariateIntervalSample, InternalModel, Interval};

/// Dense row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

/// Maximum number of full Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Largest dimension accepted by [`project_intervals_by_enumeration`].
pub const MAX_ENUMERATION_DIM: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateIntervalSample {
    observations: Vec<Vec<Interval>>,
    modes: Option<Vec<Vec<f64>>>,
}

impl MultivariateIntervalSample {
    pub fn new(observations: Vec<Vec<Interval>>) -> Result<Self> {
        Self::build(observations, None)
    }

    /// With a most-likely value per interval (used by the Pert model).
    pub fn with_modes(observations: Vec<Vec<Interval>>, modes: Vec<Vec<f64>>) -> Result<Self> {
        if modes.len() != observations.len() {
            return Err(Error::InvalidParams("one mode row per observation required".into()));
        }
        Self::build(observations, Some(modes))
    }

    fn build(observations: Vec<Vec<Interval>>, modes: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(Error::EmptySample(observations.len()));
        }
        let p = observations[0].len();
        if p < 2 {
            return Err(Error::TooFewVariables(p));
        }
        for (i, row) in observations.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Ragged {
                    row: i + 1,
                    expected: p,
                    found: row.len(),
                });
            }
        }
        if let Some(modes) = &modes {
            for (i, (row, m)) in observations.iter().zip(modes).enumerate() {
                if m.len() != p {
                    return Err(Error::Ragged {
                        row: i + 1,
                        expected: p,
                        found: m.len(),
                    });
                }
                for (iv, &mode) in row.iter().zip(m) {
                    if !iv.contains(mode) {
                        return Err(Error::ModeOutOfRange {
                            mode,
                            lower: iv.lower(),
                            upper: iv.upper(),
                        }
                        .at_row(i + 1));
                    }
                }
            }
        }
        Ok(Self { observations, modes })
    }

    pub fn p(&self) -> usize {
        self.observations[0].len()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Vec<Interval>] {
        &self.observations
    }

    pub fn modes(&self) -> Option<&[Vec<f64>]> {
        self.modes.as_deref()
    }

    /// The bivariate sample formed by variables `j` and `k`.
    pub fn pair(&self, j: usize, k: usize) -> Result<BivariateIntervalSample> {
        let obs = self
            .observations
            .iter()
            .enumerate()
            .map(|(i, row)| match &self.modes {
                Some(m) => BivariateIntervalObs::with_modes(row[j], row[k], m[i][j], m[i][k]),
                None => Ok(BivariateIntervalObs::new(row[j], row[k])),
            })
            .collect::<Result<Vec<_>>>()?;
        BivariateIntervalSample::new(obs)
    }
}

/// Overall means of each variable under `model`.
pub fn symbolic_means(sample: &MultivariateIntervalSample, model: InternalModel, nu: u32) -> Result<Vec<f64>> {
    (0..sample.p())
        .map(|j| Ok(overall_estimates(&sample.pair(j, j)?, model, nu)?.mean_x))
        .collect()
}

/// `S[j][k]` is the overall covariance of variables `j` and `k`; pairing a
/// variable with itself gives its overall variance.
pub fn symbolic_cov_matrix(
    sample: &MultivariateIntervalSample,
    model: InternalModel,
    nu: u32,
) -> Result<Matrix> {
    let p = sample.p();
    let mut s = vec![vec![0.0; p]; p];
    for j in 0..p {
        for k in j..p {
            let v = overall_estimates(&sample.pair(j, k)?, model, nu)?.cov_xy;
            s[j][k] = v;
            s[k][j] = v;
        }
    }
    Ok(s)
}

fn max_abs_entry(s: &Matrix) -> f64 {
    s.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn check_symmetric(s: &Matrix) -> Result<usize> {
    let p = s.len();
    if p == 0 || s.iter().any(|r| r.len() != p) {
        return Err(Error::BadMatrix);
    }
    if s.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::BadMatrix);
    }
    let tol = 1e-12 * max_abs_entry(s);
    for j in 0..p {
        for k in 0..j {
            if (s[j][k] - s[k][j]).abs() > tol {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(p)
}

/// Eigenvalues in descending order and the matching unit eigenvectors,
/// `vectors[k]` belonging to `values[k]`. Each vector is signed so that its
/// largest-magnitude entry (first one on ties) is positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver for symmetric matrices. Stops once every
/// off-diagonal entry is below `1e-12` times the largest entry of `s`.
pub fn jacobi_eigen(s: &Matrix) -> Result<Eigen> {
    let p = check_symmetric(s)?;
    let mut a = s.clone();
    // Symmetrize exactly so rotations act on a symmetric array.
    for j in 0..p {
        for k in 0..j {
            let m = 0.5 * (a[j][k] + a[k][j]);
            a[j][k] = m;
            a[k][j] = m;
        }
    }
    let mut v: Matrix = (0..p)
        .map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = 1e-12 * max_abs_entry(s);
    let off_max = |a: &Matrix| {
        let mut m = 0.0_f64;
        for j in 0..p {
            for k in j + 1..p {
                m = m.max(a[j][k].abs());
            }
        }
        m
    };

    let mut sweeps = 0;
    while off_max(&a) > tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for q in 0..p {
            for r in q + 1..p {
                let apq = a[q][r];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[r][r] - a[q][q]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..p {
                    let (akq, akr) = (a[k][q], a[k][r]);
                    a[k][q] = c * akq - sn * akr;
                    a[k][r] = sn * akq + c * akr;
                }
                for k in 0..p {
                    let (aqk, ark) = (a[q][k], a[r][k]);
                    a[q][k] = c * aqk - sn * ark;
                    a[r][k] = sn * aqk + c * ark;
                }
                a[q][r] = 0.0;
                a[r][q] = 0.0;
                for row in v.iter_mut() {
                    let (vq, vr) = (row[q], row[r]);
                    row[q] = c * vq - sn * vr;
                    row[r] = sn * vq + c * vr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = v.iter().map(|row| row[col]).collect();
            let mut lead = 0;
            for (i, x) in vec.iter().enumerate() {
                if x.abs() > vec[lead].abs() {
                    lead = i;
                }
            }
            if vec[lead] < 0.0 {
                vec.iter_mut().for_each(|x| *x = -*x);
            }
            vec
        })
        .collect();
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

fn centred_bounds(row: &[Interval], centre: &[f64], scale: &[f64]) -> Vec<(f64, f64)> {
    row.iter()
        .zip(centre.iter().zip(scale))
        .map(|(iv, (&m, &s))| ((iv.lower() - m) / s, (iv.upper() - m) / s))
        .collect()
}

fn sign_rule(bounds: &[(f64, f64)], loading: &[f64]) -> Result<Interval> {
    let (mut lo, mut hi) = (0.0, 0.0);
    for (&(l, u), &w) in bounds.iter().zip(loading) {
        if w >= 0.0 {
            lo += w * l;
            hi += w * u;
        } else {
            lo += w * u;
            hi += w * l;
        }
    }
    Interval::new(lo, hi)
}

/// Component intervals: for each observation and each vector, the range of
/// the projection of the (centred, scaled) hyper-rectangle. Computed from the
/// signs of the loadings, which is exact because a linear map attains its
/// extremes at vertices.
pub fn project_intervals(
    sample: &MultivariateIntervalSample,
    vectors: &[Vec<f64>],
    centre: &[f64],
    scale: Option<&[f64]>,
) -> Result<Vec<Vec<Interval>>> {
    let p = sample.p();
    check_projection_inputs(p, vectors, centre, scale)?;
    let ones = vec![1.0; p];
    let scale = scale.unwrap_or(&ones);
    sample
        .observations()
        .iter()
        .map(|row| {
            let bounds = centred_bounds(row, centre, scale);
            vectors.iter().map(|v| sign_rule(&bounds, v)).collect()
        })
        .collect()
}

fn check_projection_inputs(
    p: usize,
    vectors: &[Vec<f64>],
    centre: &[f64],
    scale: Option<&[f64]>,
) -> Result<()> {
    if centre.len() != p || vectors.iter().any(|v| v.len() != p) || scale.is_some_and(|s| s.len() != p) {
        return Err(Error::BadMatrix);
    }
    if scale.is_some_and(|s| s.iter().any(|&x| x.is_nan() || x <= 0.0)) {
        return Err(Error::InvalidParams("scaling factors must be positive".into()));
    }
    Ok(())
}

/// Same as [`project_intervals`] by visiting all `2^p` vertices.
pub fn project_intervals_by_enumeration(
    sample: &MultivariateIntervalSample,
    vectors: &[Vec<f64>],
    centre: &[f64],
    scale: Option<&[f64]>,
) -> Result<Vec<Vec<Interval>>> {
    let p = sample.p();
    if p > MAX_ENUMERATION_DIM {
        return Err(Error::TooManyVertices { p });
    }
    check_projection_inputs(p, vectors, centre, scale)?;
    let ones = vec![1.0; p];
    let scale = scale.unwrap_or(&ones);
    sample
        .observations()
        .iter()
        .map(|row| {
            let bounds = centred_bounds(row, centre, scale);
            vectors
                .iter()
                .map(|v| {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for mask in 0u32..(1u32 << p) {
                        let proj: f64 = bounds
                            .iter()
                            .zip(v)
                            .enumerate()
                            .map(|(j, (&(l, u), &w))| w * if mask >> j & 1 == 1 { u } else { l })
                            .sum();
                        lo = lo.min(proj);
                        hi = hi.max(proj);
                    }
                    Interval::new(lo, hi)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcResult {
    /// The matrix that was diagonalized (covariance or correlation).
    pub matrix: Matrix,
    pub means: Vec<f64>,
    /// Standard deviations used for scaling when the correlation matrix was
    /// requested.
    pub scales: Option<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// Eigenvalue over trace; all zero when the trace is zero.
    pub inertia: Vec<f64>,
    pub pc_intervals: Vec<Vec<Interval>>,
}

/// Full pipeline: matrix, eigen-decomposition, component intervals.
pub fn symbolic_pca(
    sample: &MultivariateIntervalSample,
    model: InternalModel,
    nu: u32,
    correlation: bool,
) -> Result<PcResult> {
    let cov = symbolic_cov_matrix(sample, model, nu)?;
    let means = symbolic_means(sample, model, nu)?;
    let p = sample.p();
    let (matrix, scales) = if correlation {
        let sd: Vec<f64> = (0..p).map(|j| cov[j][j].sqrt()).collect();
        if let Some(j) = sd.iter().position(|&s| s.is_nan() || s <= 0.0) {
            return Err(Error::InvalidParams(format!(
                "variable {} has zero variance; correlation matrix undefined",
                j + 1
            )));
        }
        let r = (0..p)
            .map(|j| (0..p).map(|k| cov[j][k] / (sd[j] * sd[k])).collect())
            .collect();
        (r, Some(sd))
    } else {
        (cov, None)
    };
    let eigen = jacobi_eigen(&matrix)?;
    let trace: f64 = eigen.values.iter().sum();
    let inertia = eigen
        .values
        .iter()
        .map(|&l| if trace > 0.0 { l / trace } else { 0.0 })
        .collect();
    let pc_intervals = project_intervals(sample, &eigen.vectors, &means, scales.as_deref())?;
    Ok(PcResult {
        matrix,
        means,
        scales,
        eigenvalues: eigen.values,
        eigenvectors: eigen.vectors,
        inertia,
        pc_intervals,
    })
}
