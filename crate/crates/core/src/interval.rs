//! Interval observations, samples, internal-distribution models and the
//! eight-parameter model vector.

use serde::Serialize;

use crate::error::{Error, Result};

/// Degrees of freedom used when none is given. At this value the overall
/// uniform-model estimators coincide with the empirical interval statistics.
pub const DEFAULT_NU: u32 = 12;

/// A closed interval `[lower, upper]`. `lower == upper` is a classical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() {
            return Err(Error::NonFinite { column: 0 });
        }
        if !upper.is_finite() {
            return Err(Error::NonFinite { column: 1 });
        }
        if lower > upper {
            return Err(Error::InvalidInterval { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// Degenerate interval `[value, value]`.
    pub fn point(value: f64) -> Result<Self> {
        Self::new(value, value)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// One bivariate observation: `x = [c, d]`, `y = [a, b]`, with optional
/// most-likely values used by the Pert model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BivariateIntervalObs {
    x: Interval,
    y: Interval,
    mode_x: Option<f64>,
    mode_y: Option<f64>,
}

impl BivariateIntervalObs {
    pub fn new(x: Interval, y: Interval) -> Self {
        Self {
            x,
            y,
            mode_x: None,
            mode_y: None,
        }
    }

    pub fn with_modes(x: Interval, y: Interval, mode_x: f64, mode_y: f64) -> Result<Self> {
        check_mode(&x, mode_x)?;
        check_mode(&y, mode_y)?;
        Ok(Self {
            x,
            y,
            mode_x: Some(mode_x),
            mode_y: Some(mode_y),
        })
    }

    /// Builds from endpoints in `(c, d, a, b)` order.
    pub fn from_endpoints(c: f64, d: f64, a: f64, b: f64) -> Result<Self> {
        let x = Interval::new(c, d).map_err(|e| shift_column(e, 0))?;
        let y = Interval::new(a, b).map_err(|e| shift_column(e, 2))?;
        Ok(Self::new(x, y))
    }

    pub fn x(&self) -> &Interval {
        &self.x
    }

    pub fn y(&self) -> &Interval {
        &self.y
    }

    pub fn mode_x(&self) -> Option<f64> {
        self.mode_x
    }

    pub fn mode_y(&self) -> Option<f64> {
        self.mode_y
    }

    /// Mode of `x`, falling back to the midpoint.
    pub fn resolved_mode_x(&self) -> f64 {
        self.mode_x.unwrap_or_else(|| self.x.midpoint())
    }

    pub fn resolved_mode_y(&self) -> f64 {
        self.mode_y.unwrap_or_else(|| self.y.midpoint())
    }

    pub fn has_modes(&self) -> bool {
        self.mode_x.is_some() && self.mode_y.is_some()
    }

    pub fn is_degenerate(&self) -> bool {
        self.x.is_degenerate() && self.y.is_degenerate()
    }

    /// Endpoints as `[c, d, a, b]`, followed by the modes when present.
    pub fn to_row(&self) -> Vec<f64> {
        let mut row = vec![self.x.lower, self.x.upper, self.y.lower, self.y.upper];
        if let (Some(mx), Some(my)) = (self.mode_x, self.mode_y) {
            row.push(mx);
            row.push(my);
        }
        row
    }
}

fn check_mode(interval: &Interval, mode: f64) -> Result<()> {
    if !mode.is_finite() {
        return Err(Error::NonFinite { column: 4 });
    }
    if !interval.contains(mode) {
        return Err(Error::ModeOutOfRange {
            mode,
            lower: interval.lower,
            upper: interval.upper,
        });
    }
    Ok(())
}

fn shift_column(err: Error, offset: usize) -> Error {
    match err {
        Error::NonFinite { column } => Error::NonFinite {
            column: column + offset,
        },
        other => other,
    }
}

/// An ordered sample of at least two bivariate interval observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BivariateIntervalSample {
    observations: Vec<BivariateIntervalObs>,
}

impl BivariateIntervalSample {
    pub fn new(observations: Vec<BivariateIntervalObs>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(Error::EmptySample(observations.len()));
        }
        Ok(Self { observations })
    }

    pub fn observations(&self) -> &[BivariateIntervalObs] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BivariateIntervalObs> {
        self.observations.iter()
    }

    /// True when every observation carries both modes.
    pub fn has_modes(&self) -> bool {
        self.observations.iter().all(BivariateIntervalObs::has_modes)
    }

    pub fn is_classical(&self) -> bool {
        self.observations
            .iter()
            .all(BivariateIntervalObs::is_degenerate)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.observations.iter().map(|o| o.to_row()).collect()
    }
}

/// Builds a validated sample from rows of `(c, d, a, b)` or
/// `(c, d, a, b, mode_x, mode_y)`. Row numbers in errors are 1-based.
pub fn validate_sample<R: AsRef<[f64]>>(rows: &[R]) -> Result<BivariateIntervalSample> {
    let observations = rows
        .iter()
        .enumerate()
        .map(|(i, row)| parse_row(row.as_ref()).map_err(|e| e.at_row(i + 1)))
        .collect::<Result<Vec<_>>>()?;
    BivariateIntervalSample::new(observations)
}

fn parse_row(row: &[f64]) -> Result<BivariateIntervalObs> {
    if row.len() != 4 && row.len() != 6 {
        return Err(Error::RowLength(row.len()));
    }
    if let Some(column) = row.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { column });
    }
    let obs = BivariateIntervalObs::from_endpoints(row[0], row[1], row[2], row[3])?;
    if row.len() == 6 {
        BivariateIntervalObs::with_modes(obs.x, obs.y, row[4], row[5])
    } else {
        Ok(obs)
    }
}

/// Assumed spread of the micro-data inside each interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InternalModel {
    #[default]
    Uniform,
    /// Symmetric triangular with the peak at the midpoint.
    Triangular,
    /// Pert with per-observation modes; absent modes resolve to midpoints.
    Pert,
}

impl InternalModel {
    pub fn name(&self) -> &'static str {
        match self {
            InternalModel::Uniform => "uniform",
            InternalModel::Triangular => "triangular",
            InternalModel::Pert => "pert",
        }
    }
}

impl std::str::FromStr for InternalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(InternalModel::Uniform),
            "triangular" => Ok(InternalModel::Triangular),
            "pert" => Ok(InternalModel::Pert),
            other => Err(Error::InvalidParams(format!("unknown internal model `{other}`"))),
        }
    }
}

/// Model parameters: bivariate normal for the internal means
/// `(mu_x, mu_y, sigma2_x, sigma2_y, rho)`, bivariate Wishart scale
/// `[[gamma1, gamma3], [gamma3, gamma2]]` with `nu` degrees of freedom for the
/// internal variations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauParams {
    mu_x: f64,
    mu_y: f64,
    sigma2_x: f64,
    sigma2_y: f64,
    rho: f64,
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    nu: u32,
}

impl TauParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu_x: f64,
        mu_y: f64,
        sigma2_x: f64,
        sigma2_y: f64,
        rho: f64,
        gamma1: f64,
        gamma2: f64,
        gamma3: f64,
        nu: u32,
    ) -> Result<Self> {
        let values = [mu_x, mu_y, sigma2_x, sigma2_y, rho, gamma1, gamma2, gamma3];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if sigma2_x <= 0.0 || sigma2_y <= 0.0 {
            return Err(Error::InvalidParams("variances must be positive".into()));
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidParams(format!("rho = {rho} is not in (-1, 1)")));
        }
        if gamma1 <= 0.0 || gamma2 <= 0.0 {
            return Err(Error::InvalidParams("gamma1 and gamma2 must be positive".into()));
        }
        if gamma1 * gamma2 - gamma3 * gamma3 <= 0.0 || gamma3.abs() >= (gamma1 * gamma2).sqrt() {
            return Err(Error::InvalidParams(format!(
                "Wishart scale is not positive definite: gamma1*gamma2 - gamma3^2 = {}",
                gamma1 * gamma2 - gamma3 * gamma3
            )));
        }
        if nu <= 2 {
            return Err(Error::InvalidParams(format!("nu = {nu} must exceed 2")));
        }
        Ok(Self {
            mu_x,
            mu_y,
            sigma2_x,
            sigma2_y,
            rho,
            gamma1,
            gamma2,
            gamma3,
            nu,
        })
    }

    /// Same as [`TauParams::new`] but with the between covariance
    /// `sigma_xy` in place of `rho`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_covariance(
        mu_x: f64,
        mu_y: f64,
        sigma2_x: f64,
        sigma2_y: f64,
        sigma_xy: f64,
        gamma1: f64,
        gamma2: f64,
        gamma3: f64,
        nu: u32,
    ) -> Result<Self> {
        if sigma2_x <= 0.0 || sigma2_y <= 0.0 {
            return Err(Error::InvalidParams("variances must be positive".into()));
        }
        let rho = sigma_xy / (sigma2_x * sigma2_y).sqrt();
        Self::new(mu_x, mu_y, sigma2_x, sigma2_y, rho, gamma1, gamma2, gamma3, nu)
    }

    /// Negatively correlated scenario with a near-singular internal scale.
    pub fn table2() -> Self {
        Self::from_covariance(-2.0, 3.0, 1.5, 2.5, -1.75, 1.25, 2.5, -1.75, DEFAULT_NU)
            .expect("reference parameters are valid")
    }

    /// Positively correlated scenario with the nominal internal scale `(7, 5, -2)`.
    pub fn table1_stated() -> Self {
        Self::from_covariance(1.0, 5.0, 4.0, 3.0, 2.0, 7.0, 5.0, -2.0, DEFAULT_NU)
            .expect("reference parameters are valid")
    }

    pub fn with_gammas(&self, gamma1: f64, gamma2: f64, gamma3: f64) -> Result<Self> {
        Self::new(
            self.mu_x,
            self.mu_y,
            self.sigma2_x,
            self.sigma2_y,
            self.rho,
            gamma1,
            gamma2,
            gamma3,
            self.nu,
        )
    }

    pub fn with_nu(&self, nu: u32) -> Result<Self> {
        Self::new(
            self.mu_x,
            self.mu_y,
            self.sigma2_x,
            self.sigma2_y,
            self.rho,
            self.gamma1,
            self.gamma2,
            self.gamma3,
            nu,
        )
    }

    pub fn mu_x(&self) -> f64 {
        self.mu_x
    }
    pub fn mu_y(&self) -> f64 {
        self.mu_y
    }
    pub fn sigma2_x(&self) -> f64 {
        self.sigma2_x
    }
    pub fn sigma2_y(&self) -> f64 {
        self.sigma2_y
    }
    pub fn sigma_x(&self) -> f64 {
        self.sigma2_x.sqrt()
    }
    pub fn sigma_y(&self) -> f64 {
        self.sigma2_y.sqrt()
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    /// Between covariance `rho * sigma_x * sigma_y`.
    pub fn sigma_xy(&self) -> f64 {
        self.rho * (self.sigma2_x * self.sigma2_y).sqrt()
    }
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }
    pub fn gamma3(&self) -> f64 {
        self.gamma3
    }
    pub fn nu(&self) -> u32 {
        self.nu
    }
    /// Determinant of the Wishart scale, `gamma1*gamma2 - gamma3^2`.
    pub fn scale_det(&self) -> f64 {
        self.gamma1 * self.gamma2 - self.gamma3 * self.gamma3
    }
}
