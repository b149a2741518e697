//! Between-interval, within-interval and overall estimators, together with
//! the empirical interval statistics they reproduce.
//!
//! All variances use divisor `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::internal::{realize_sample, ThetaRealization};
use crate::interval::{BivariateIntervalSample, InternalModel};

/// Whether the between correlation could be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoStatus {
    Defined,
    /// At least one between variance is zero; `rho_hat` is NaN.
    UndefinedZeroVariance,
}

/// MLEs of the bivariate normal governing the internal means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetweenEstimates {
    pub mu_x_hat: f64,
    pub mu_y_hat: f64,
    pub sigma2_x_hat: f64,
    pub sigma2_y_hat: f64,
    pub sigma_xy_hat: f64,
    pub rho_hat: f64,
    pub rho_status: RhoStatus,
}

/// MLEs of the Wishart scale governing the internal variations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WithinEstimates {
    pub gamma1_hat: f64,
    pub gamma2_hat: f64,
    pub gamma3_hat: f64,
    pub nu: u32,
}

/// Mean, variance and covariance of the de-aggregated variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverallMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

/// A `(var_x, var_y, cov_xy)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMoments {
    pub x: f64,
    pub y: f64,
    pub xy: f64,
}

impl std::ops::Add for SecondMoments {
    type Output = SecondMoments;

    fn add(self, rhs: Self) -> Self {
        SecondMoments {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            xy: self.xy + rhs.xy,
        }
    }
}

/// Overall second moments split into the within-interval and
/// between-interval contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub mean_x: f64,
    pub mean_y: f64,
    pub within: SecondMoments,
    pub between: SecondMoments,
}

impl Decomposition {
    pub fn overall(&self) -> OverallMoments {
        let total = self.within + self.between;
        OverallMoments {
            mean_x: self.mean_x,
            mean_y: self.mean_y,
            var_x: total.x,
            var_y: total.y,
            cov_xy: total.xy,
        }
    }
}

pub fn between_mles(thetas: &[ThetaRealization]) -> Result<BetweenEstimates> {
    let n = thetas.len();
    if n < 2 {
        return Err(Error::EmptySample(n));
    }
    let nf = n as f64;
    let mu_x = thetas.iter().map(|t| t.theta1_x()).sum::<f64>() / nf;
    let mu_y = thetas.iter().map(|t| t.theta1_y()).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for t in thetas {
        let dx = t.theta1_x() - mu_x;
        let dy = t.theta1_y() - mu_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (rho_hat, rho_status) = if sxx > 0.0 && syy > 0.0 {
        ((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0), RhoStatus::Defined)
    } else {
        (f64::NAN, RhoStatus::UndefinedZeroVariance)
    };
    Ok(BetweenEstimates {
        mu_x_hat: mu_x,
        mu_y_hat: mu_y,
        sigma2_x_hat: sxx / nf,
        sigma2_y_hat: syy / nf,
        sigma_xy_hat: sxy / nf,
        rho_hat,
        rho_status,
    })
}

pub fn within_mles(thetas: &[ThetaRealization], nu: u32) -> Result<WithinEstimates> {
    if thetas.is_empty() {
        return Err(Error::EmptySample(0));
    }
    if nu <= 2 {
        return Err(Error::InvalidParams(format!("nu = {nu} must exceed 2")));
    }
    let scale = thetas.len() as f64 * nu as f64;
    Ok(WithinEstimates {
        gamma1_hat: thetas.iter().map(|t| t.theta2_x()).sum::<f64>() / scale,
        gamma2_hat: thetas.iter().map(|t| t.theta2_y()).sum::<f64>() / scale,
        gamma3_hat: thetas.iter().map(|t| t.theta2_xy()).sum::<f64>() / scale,
        nu,
    })
}

/// Splits the overall moments into within and between parts.
///
/// The between part is the divisor-`n` covariance of the internal means. The
/// within part is the average realized internal variation, except for the
/// uniform model where the width-squared sum is divided by `nu` instead of
/// 12 (so the two coincide at `nu = 12`).
pub fn decompose(
    sample: &BivariateIntervalSample,
    model: InternalModel,
    nu: u32,
) -> Result<Decomposition> {
    let thetas = realize_sample(sample, model)?;
    let between = between_mles(&thetas)?;
    let within = within_mles(&thetas, nu)?;
    let factor = match model {
        InternalModel::Uniform => 12.0,
        InternalModel::Triangular | InternalModel::Pert => nu as f64,
    };
    Ok(Decomposition {
        mean_x: between.mu_x_hat,
        mean_y: between.mu_y_hat,
        within: SecondMoments {
            x: factor * within.gamma1_hat,
            y: factor * within.gamma2_hat,
            xy: factor * within.gamma3_hat,
        },
        between: SecondMoments {
            x: between.sigma2_x_hat,
            y: between.sigma2_y_hat,
            xy: between.sigma_xy_hat,
        },
    })
}

/// Overall mean, variance and covariance estimators in their closed forms.
///
/// * Uniform: `(1/(nu n)) sum width^2` plus the between variance of the
///   midpoints, and the analogous cross-product form for the covariance.
/// * Triangular: `(1/(24 n)) sum [7 c'^2 + 10 c'd' + 7 d'^2]` with centred
///   endpoints, and the `7, 5, 5, 7` weighting for the covariance.
/// * Pert: `(1/(7 n)) sum (m_i - c_i)(d_i - m_i)` plus the between variance of
///   the Pert means; the covariance averages the two mixed products over 14.
pub fn overall_estimates(
    sample: &BivariateIntervalSample,
    model: InternalModel,
    nu: u32,
) -> Result<OverallMoments> {
    if nu <= 2 {
        return Err(Error::InvalidParams(format!("nu = {nu} must exceed 2")));
    }
    match model {
        InternalModel::Uniform => Ok(uniform_overall(sample, nu as f64)),
        InternalModel::Triangular => Ok(triangular_overall(sample)),
        InternalModel::Pert => pert_overall(sample),
    }
}

fn midpoint_means(sample: &BivariateIntervalSample) -> (f64, f64) {
    let n = sample.len() as f64;
    let mx = sample.iter().map(|o| o.x().lower() + o.x().upper()).sum::<f64>() / (2.0 * n);
    let my = sample.iter().map(|o| o.y().lower() + o.y().upper()).sum::<f64>() / (2.0 * n);
    (mx, my)
}

fn uniform_overall(sample: &BivariateIntervalSample, nu: f64) -> OverallMoments {
    let n = sample.len() as f64;
    let (mx, my) = midpoint_means(sample);
    let (mut wxx, mut wyy, mut wxy) = (0.0, 0.0, 0.0);
    let (mut bxx, mut byy, mut bxy) = (0.0, 0.0, 0.0);
    for o in sample.iter() {
        let (dx, dy) = (o.x().width(), o.y().width());
        wxx += dx * dx;
        wyy += dy * dy;
        wxy += dx * dy;
        let cx = (o.x().lower() + o.x().upper()) / 2.0 - mx;
        let cy = (o.y().lower() + o.y().upper()) / 2.0 - my;
        bxx += cx * cx;
        byy += cy * cy;
        bxy += cx * cy;
    }
    OverallMoments {
        mean_x: mx,
        mean_y: my,
        var_x: wxx / (nu * n) + bxx / n,
        var_y: wyy / (nu * n) + byy / n,
        cov_xy: wxy / (nu * n) + bxy / n,
    }
}

fn triangular_overall(sample: &BivariateIntervalSample) -> OverallMoments {
    let n = sample.len() as f64;
    let (mx, my) = midpoint_means(sample);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for o in sample.iter() {
        let (c, d) = (o.x().lower() - mx, o.x().upper() - mx);
        let (a, b) = (o.y().lower() - my, o.y().upper() - my);
        sxx += 7.0 * c * c + 10.0 * c * d + 7.0 * d * d;
        syy += 7.0 * a * a + 10.0 * a * b + 7.0 * b * b;
        sxy += 7.0 * a * c + 5.0 * a * d + 5.0 * b * c + 7.0 * b * d;
    }
    OverallMoments {
        mean_x: mx,
        mean_y: my,
        var_x: sxx / (24.0 * n),
        var_y: syy / (24.0 * n),
        cov_xy: sxy / (24.0 * n),
    }
}

fn pert_overall(sample: &BivariateIntervalSample) -> Result<OverallMoments> {
    let n = sample.len() as f64;
    let mut means = Vec::with_capacity(sample.len());
    for (i, o) in sample.iter().enumerate() {
        let (c, d, a, b) = (o.x().lower(), o.x().upper(), o.y().lower(), o.y().upper());
        let (mx, my) = (o.resolved_mode_x(), o.resolved_mode_y());
        for (lo, hi, m) in [(c, d, mx), (a, b, my)] {
            if !(lo <= m && m <= hi) {
                return Err(Error::ModeOutOfRange {
                    mode: m,
                    lower: lo,
                    upper: hi,
                }
                .at_row(i + 1));
            }
        }
        means.push((
            ((c + 4.0 * mx + d) / 6.0).clamp(c, d),
            ((a + 4.0 * my + b) / 6.0).clamp(a, b),
        ));
    }
    let mu_x = means.iter().map(|m| m.0).sum::<f64>() / n;
    let mu_y = means.iter().map(|m| m.1).sum::<f64>() / n;
    let (mut wxx, mut wyy, mut wxy) = (0.0, 0.0, 0.0);
    let (mut bxx, mut byy, mut bxy) = (0.0, 0.0, 0.0);
    for (o, &(ex, ey)) in sample.iter().zip(&means) {
        let (lx, rx) = ((ex - o.x().lower()).max(0.0), (o.x().upper() - ex).max(0.0));
        let (ly, ry) = ((ey - o.y().lower()).max(0.0), (o.y().upper() - ey).max(0.0));
        wxx += lx * rx;
        wyy += ly * ry;
        wxy += lx * ry + ly * rx;
        let (cx, cy) = (ex - mu_x, ey - mu_y);
        bxx += cx * cx;
        byy += cy * cy;
        bxy += cx * cy;
    }
    Ok(OverallMoments {
        mean_x: mu_x,
        mean_y: mu_y,
        var_x: wxx / (7.0 * n) + bxx / n,
        var_y: wyy / (7.0 * n) + byy / n,
        cov_xy: wxy / (14.0 * n) + bxy / n,
    })
}

/// Empirical interval statistics under uniform spread: the mean of the
/// midpoints, the variance `(1/(3n)) sum (a^2 + ab + b^2) - mean^2`, and the
/// covariance with endpoint weights `2, 1, 1, 2` over `6n`.
pub fn empirical_stats(sample: &BivariateIntervalSample) -> OverallMoments {
    let n = sample.len() as f64;
    let (mx, my) = midpoint_means(sample);
    let (mut qx, mut qy, mut sxy) = (0.0, 0.0, 0.0);
    for o in sample.iter() {
        let (c, d) = (o.x().lower(), o.x().upper());
        let (a, b) = (o.y().lower(), o.y().upper());
        qx += c * c + c * d + d * d;
        qy += a * a + a * b + b * b;
        let (a, b, c, d) = (a - my, b - my, c - mx, d - mx);
        sxy += 2.0 * a * c + a * d + b * c + 2.0 * b * d;
    }
    OverallMoments {
        mean_x: mx,
        mean_y: my,
        var_x: qx / (3.0 * n) - mx * mx,
        var_y: qy / (3.0 * n) - my * my,
        cov_xy: sxy / (6.0 * n),
    }
}

/// Centred-endpoint forms `(1/(3n)) sum [c'^2 + c'd' + d'^2]` for the
/// variances and the `2, 1, 1, 2` form for the covariance.
pub fn centered_endpoint_stats(sample: &BivariateIntervalSample) -> OverallMoments {
    let n = sample.len() as f64;
    let (mx, my) = midpoint_means(sample);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for o in sample.iter() {
        let (c, d) = (o.x().lower() - mx, o.x().upper() - mx);
        let (a, b) = (o.y().lower() - my, o.y().upper() - my);
        sxx += c * c + c * d + d * d;
        syy += a * a + a * b + b * b;
        sxy += 2.0 * a * c + a * d + b * c + 2.0 * b * d;
    }
    OverallMoments {
        mean_x: mx,
        mean_y: my,
        var_x: sxx / (3.0 * n),
        var_y: syy / (3.0 * n),
        cov_xy: sxy / (6.0 * n),
    }
}

/// Relative discrepancy between two moment sets. Variances are compared
/// relative to their magnitude, covariances relative to
/// `sqrt(var_x * var_y)`, which bounds them.
pub fn relative_discrepancy(lhs: &OverallMoments, rhs: &OverallMoments) -> f64 {
    let rel = |a: f64, b: f64, scale: f64| {
        let diff = (a - b).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / scale.max(f64::MIN_POSITIVE)
        }
    };
    let var_scale = |a: f64, b: f64| a.abs().max(b.abs());
    let cov_scale = (lhs.var_x.abs() * lhs.var_y.abs()).sqrt()
        .max((rhs.var_x.abs() * rhs.var_y.abs()).sqrt())
        .max(lhs.cov_xy.abs())
        .max(rhs.cov_xy.abs());
    [
        rel(lhs.var_x, rhs.var_x, var_scale(lhs.var_x, rhs.var_x)),
        rel(lhs.var_y, rhs.var_y, var_scale(lhs.var_y, rhs.var_y)),
        rel(lhs.cov_xy, rhs.cov_xy, cov_scale),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Maximum relative discrepancy among three routes to the same moments:
/// the uniform overall estimators at `nu = 12`, the empirical statistics and
/// the centred-endpoint forms.
pub fn check_empirical_identity(sample: &BivariateIntervalSample) -> f64 {
    let mle = uniform_overall(sample, 12.0);
    let empirical = empirical_stats(sample);
    let centred = centered_endpoint_stats(sample);
    relative_discrepancy(&mle, &empirical)
        .max(relative_discrepancy(&mle, &centred))
        .max(relative_discrepancy(&empirical, &centred))
}

/// Classical statistics of centres and widths next to the symbolic ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterRangeRow {
    pub center: f64,
    pub range: f64,
    pub sum: f64,
    pub symbolic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterRangeStats {
    pub var_x: CenterRangeRow,
    pub var_y: CenterRangeRow,
    pub cov_xy: CenterRangeRow,
}

/// Divisor-`n` variances and covariance of interval centres `(lo + hi)/2`
/// and ranges `hi - lo`, their sums, and the empirical symbolic values.
pub fn center_range_stats(sample: &BivariateIntervalSample) -> CenterRangeStats {
    let centers: Vec<(f64, f64)> = sample
        .iter()
        .map(|o| (o.x().midpoint(), o.y().midpoint()))
        .collect();
    let ranges: Vec<(f64, f64)> = sample
        .iter()
        .map(|o| (o.x().width(), o.y().width()))
        .collect();
    let (cxx, cyy, cxy) = classical_moments(&centers);
    let (rxx, ryy, rxy) = classical_moments(&ranges);
    let symbolic = empirical_stats(sample);
    let row = |center: f64, range: f64, symbolic: f64| CenterRangeRow {
        center,
        range,
        sum: center + range,
        symbolic,
    };
    CenterRangeStats {
        var_x: row(cxx, rxx, symbolic.var_x),
        var_y: row(cyy, ryy, symbolic.var_y),
        cov_xy: row(cxy, rxy, symbolic.cov_xy),
    }
}

/// Divisor-`n` `(var_x, var_y, cov_xy)` of paired points.
pub fn classical_moments(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut acc = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        acc.0 += dx * dx;
        acc.1 += dy * dy;
        acc.2 += dx * dy;
    }
    (acc.0 / n, acc.1 / n, acc.2 / n)
}
