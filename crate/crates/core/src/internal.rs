//! Realizations of the internal parameters of an interval observation.
//!
//! Every interval maps to an internal mean pair `theta1 = (x, y)` and an
//! internal variation triple `theta2 = (var_x, var_y, cov_xy)`; the shape of
//! the assumed within-interval distribution fixes the map.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{BivariateIntervalObs, BivariateIntervalSample, InternalModel};

/// Internal mean pair and internal variation triple of one observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRealization {
    theta1_x: f64,
    theta1_y: f64,
    theta2_x: f64,
    theta2_y: f64,
    theta2_xy: f64,
}

impl ThetaRealization {
    /// Fails unless all entries are finite and both internal variances are
    /// non-negative. The cross term is not bounded here: Pert realizations
    /// with off-centre modes can exceed `sqrt(theta2_x * theta2_y)`.
    pub fn new(
        theta1_x: f64,
        theta1_y: f64,
        theta2_x: f64,
        theta2_y: f64,
        theta2_xy: f64,
    ) -> Result<Self> {
        let all = [theta1_x, theta1_y, theta2_x, theta2_y, theta2_xy];
        if let Some(column) = all.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { column });
        }
        if theta2_x < 0.0 || theta2_y < 0.0 {
            return Err(Error::InvalidParams(
                "internal variances must be non-negative".into(),
            ));
        }
        Ok(Self {
            theta1_x,
            theta1_y,
            theta2_x,
            theta2_y,
            theta2_xy,
        })
    }

    pub fn theta1_x(&self) -> f64 {
        self.theta1_x
    }
    pub fn theta1_y(&self) -> f64 {
        self.theta1_y
    }
    pub fn theta2_x(&self) -> f64 {
        self.theta2_x
    }
    pub fn theta2_y(&self) -> f64 {
        self.theta2_y
    }
    pub fn theta2_xy(&self) -> f64 {
        self.theta2_xy
    }

    /// `theta2_x * theta2_y - theta2_xy^2`.
    pub fn theta2_det(&self) -> f64 {
        self.theta2_x * self.theta2_y - self.theta2_xy * self.theta2_xy
    }

    /// Cauchy-Schwarz bound `theta2_xy^2 <= theta2_x * theta2_y`, with a
    /// relative allowance for rounding in products that are equal in exact
    /// arithmetic.
    pub fn within_closed_support(&self) -> bool {
        let bound = self.theta2_x * self.theta2_y;
        self.theta2_xy * self.theta2_xy <= bound * (1.0 + 4.0 * f64::EPSILON)
    }

    /// Strict interior of the Wishart support.
    pub fn in_open_support(&self) -> bool {
        self.theta2_x > 0.0 && self.theta2_y > 0.0 && self.theta2_det() > 0.0
    }

    pub fn is_degenerate(&self) -> bool {
        self.theta2_x == 0.0 && self.theta2_y == 0.0 && self.theta2_xy == 0.0
    }
}

/// Uniform spread: midpoints and `width^2 / 12`.
pub fn realize_uniform(obs: &BivariateIntervalObs) -> ThetaRealization {
    symmetric(obs, 12.0)
}

/// Symmetric triangular spread peaked at the midpoint: `width^2 / 24`.
pub fn realize_triangular(obs: &BivariateIntervalObs) -> ThetaRealization {
    symmetric(obs, 24.0)
}

fn symmetric(obs: &BivariateIntervalObs, divisor: f64) -> ThetaRealization {
    let (wx, wy) = (obs.x().width(), obs.y().width());
    ThetaRealization {
        theta1_x: obs.x().midpoint(),
        theta1_y: obs.y().midpoint(),
        theta2_x: wx * wx / divisor,
        theta2_y: wy * wy / divisor,
        theta2_xy: wx * wy / divisor,
    }
}

/// Pert spread with mean `(lo + 4 m + hi) / 6` and variance
/// `(mean - lo)(hi - mean) / 7`. The cross term averages the two mixed
/// products, divided by 14. Absent modes resolve to midpoints.
pub fn realize_pert(obs: &BivariateIntervalObs) -> Result<ThetaRealization> {
    let (x, y) = (obs.x(), obs.y());
    let (mx, my) = (obs.resolved_mode_x(), obs.resolved_mode_y());
    for (interval, mode) in [(x, mx), (y, my)] {
        if !interval.contains(mode) {
            return Err(Error::ModeOutOfRange {
                mode,
                lower: interval.lower(),
                upper: interval.upper(),
            });
        }
    }
    let (c, d, a, b) = (x.lower(), x.upper(), y.lower(), y.upper());
    // Rounding can push the mean a hair outside the interval (or off a
    // degenerate one); clamp so the spread terms stay non-negative.
    let mean_x = ((c + 4.0 * mx + d) / 6.0).clamp(c, d);
    let mean_y = ((a + 4.0 * my + b) / 6.0).clamp(a, b);
    let (lx, rx) = (mean_x - c, d - mean_x);
    let (ly, ry) = (mean_y - a, b - mean_y);
    Ok(ThetaRealization {
        theta1_x: mean_x,
        theta1_y: mean_y,
        theta2_x: lx * rx / 7.0,
        theta2_y: ly * ry / 7.0,
        theta2_xy: (lx * ry + ly * rx) / 14.0,
    })
}

pub fn realize(obs: &BivariateIntervalObs, model: InternalModel) -> Result<ThetaRealization> {
    match model {
        InternalModel::Uniform => Ok(realize_uniform(obs)),
        InternalModel::Triangular => Ok(realize_triangular(obs)),
        InternalModel::Pert => realize_pert(obs),
    }
}

/// Realizes every observation of a sample, in order.
pub fn realize_sample(
    sample: &BivariateIntervalSample,
    model: InternalModel,
) -> Result<Vec<ThetaRealization>> {
    sample
        .iter()
        .enumerate()
        .map(|(i, obs)| realize(obs, model).map_err(|e| e.at_row(i + 1)))
        .collect()
}
