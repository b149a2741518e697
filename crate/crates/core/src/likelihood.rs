//! Interval log-likelihood: bivariate normal for the internal means times a
//! bivariate Wishart for the internal variations.
//!
//! Gradients are taken with respect to
//! `(mu_x, mu_y, sigma_x, sigma_y, rho, gamma1, gamma2, gamma3)`, i.e. the
//! standard deviations rather than the variances.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::estimators::{between_mles, within_mles};
use crate::error::{Error, Result};
use crate::internal::ThetaRealization;
use crate::interval::TauParams;

/// Relative step used by [`fd_gradient`].
pub const FD_RELATIVE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct GradientVector {
    pub d_mu_x: f64,
    pub d_mu_y: f64,
    pub d_sigma_x: f64,
    pub d_sigma_y: f64,
    pub d_rho: f64,
    pub d_gamma1: f64,
    pub d_gamma2: f64,
    pub d_gamma3: f64,
}

impl GradientVector {
    pub const LABELS: [&'static str; 8] = [
        "mu_x", "mu_y", "sigma_x", "sigma_y", "rho", "gamma1", "gamma2", "gamma3",
    ];

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.d_mu_x,
            self.d_mu_y,
            self.d_sigma_x,
            self.d_sigma_y,
            self.d_rho,
            self.d_gamma1,
            self.d_gamma2,
            self.d_gamma3,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self {
            d_mu_x: a[0],
            d_mu_y: a[1],
            d_sigma_x: a[2],
            d_sigma_y: a[3],
            d_rho: a[4],
            d_gamma1: a[5],
            d_gamma2: a[6],
            d_gamma3: a[7],
        }
    }

    /// Same gradient with the two scale components expressed per unit of
    /// variance: `d/d(sigma^2) = d/d(sigma) / (2 sigma)`.
    pub fn in_variance_coords(&self, params: &TauParams) -> [f64; 8] {
        let mut a = self.to_array();
        a[2] /= 2.0 * params.sigma_x();
        a[3] /= 2.0 * params.sigma_y();
        a
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Log density of the bivariate normal at `(theta1_x, theta1_y)`.
pub fn bvn_logpdf(theta1_x: f64, theta1_y: f64, params: &TauParams) -> f64 {
    let (sx, sy, rho) = (params.sigma_x(), params.sigma_y(), params.rho());
    let zx = (theta1_x - params.mu_x()) / sx;
    let zy = (theta1_y - params.mu_y()) / sy;
    let one_m = 1.0 - rho * rho;
    let quad = (zx * zx + zy * zy - 2.0 * rho * zx * zy) / one_m;
    -(2.0 * PI).ln() - sx.ln() - sy.ln() - 0.5 * one_m.ln() - 0.5 * quad
}

/// `ln(2^nu sqrt(pi) Gamma(nu/2) Gamma((nu-1)/2))`, the 2x2 Wishart normalizer
/// without the scale determinant.
pub fn wishart_log_normalizer(nu: u32) -> f64 {
    let nu = nu as f64;
    nu * std::f64::consts::LN_2 + 0.5 * PI.ln() + ln_gamma(nu / 2.0) + ln_gamma((nu - 1.0) / 2.0)
}

/// `tr(Gamma^{-1} Theta2)` for the 2x2 scale in `params`.
fn scaled_trace(t2x: f64, t2y: f64, t2xy: f64, params: &TauParams) -> f64 {
    let (g1, g2, g3) = (params.gamma1(), params.gamma2(), params.gamma3());
    (g2 * t2x + g1 * t2y - 2.0 * g3 * t2xy) / params.scale_det()
}

/// Log density of the bivariate Wishart at `(theta2_x, theta2_y, theta2_xy)`.
pub fn wishart_logpdf(theta2: (f64, f64, f64), params: &TauParams) -> Result<f64> {
    let (tx, ty, txy) = theta2;
    let det = tx * ty - txy * txy;
    if !(tx > 0.0 && ty > 0.0 && det > 0.0) || !txy.is_finite() {
        return Err(Error::OutOfSupport { index: 0 });
    }
    let nu = params.nu() as f64;
    Ok(-0.5 * nu * params.scale_det().ln() + 0.5 * (nu - 3.0) * det.ln()
        - 0.5 * scaled_trace(tx, ty, txy, params)
        - wishart_log_normalizer(params.nu()))
}

fn check_support(thetas: &[ThetaRealization]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::EmptySample(0));
    }
    for (index, t) in thetas.iter().enumerate() {
        if t.theta2_x() == 0.0 || t.theta2_y() == 0.0 {
            return Err(Error::DegenerateTheta { index });
        }
        if !t.in_open_support() {
            return Err(Error::OutOfSupport { index });
        }
    }
    Ok(())
}

/// Full log-likelihood with all normalizing constants. Every internal
/// variation must lie strictly inside the Wishart support.
pub fn loglik(thetas: &[ThetaRealization], params: &TauParams) -> Result<f64> {
    check_support(thetas)?;
    let mut total = 0.0;
    for (index, t) in thetas.iter().enumerate() {
        total += bvn_logpdf(t.theta1_x(), t.theta1_y(), params);
        total += wishart_logpdf((t.theta2_x(), t.theta2_y(), t.theta2_xy()), params)
            .map_err(|_| Error::OutOfSupport { index })?;
    }
    Ok(total)
}

fn check_kernel_inputs(thetas: &[ThetaRealization]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::EmptySample(0));
    }
    if thetas.iter().all(ThetaRealization::is_degenerate) {
        return Err(Error::DegenerateTheta { index: 0 });
    }
    Ok(())
}

/// Parameter-dependent part of the log-likelihood (drops `-n ln 2 pi`,
/// the Wishart normalizer and the `ln det Theta2` term). Differs from
/// [`loglik`] by a constant in the parameters, and stays defined when the
/// realized variations sit on the support boundary.
pub fn loglik_kernel(thetas: &[ThetaRealization], params: &TauParams) -> Result<f64> {
    check_kernel_inputs(thetas)?;
    let s = Sums::new(thetas, params);
    let n = thetas.len() as f64;
    let (sx, sy, rho) = (params.sigma_x(), params.sigma_y(), params.rho());
    let one_m = 1.0 - rho * rho;
    let quad = s.xx / (sx * sx) + s.yy / (sy * sy) - 2.0 * rho * s.xy / (sx * sy);
    let nu = params.nu() as f64;
    Ok(-n * sx.ln() - n * sy.ln() - 0.5 * n * one_m.ln() - quad / (2.0 * one_m)
        - 0.5 * n * nu * params.scale_det().ln()
        - 0.5 * scaled_trace(s.t2x, s.t2y, s.t2xy, params))
}

struct Sums {
    dx: f64,
    dy: f64,
    xx: f64,
    yy: f64,
    xy: f64,
    t2x: f64,
    t2y: f64,
    t2xy: f64,
}

impl Sums {
    fn new(thetas: &[ThetaRealization], params: &TauParams) -> Self {
        let mut s = Sums {
            dx: 0.0,
            dy: 0.0,
            xx: 0.0,
            yy: 0.0,
            xy: 0.0,
            t2x: 0.0,
            t2y: 0.0,
            t2xy: 0.0,
        };
        for t in thetas {
            let ex = t.theta1_x() - params.mu_x();
            let ey = t.theta1_y() - params.mu_y();
            s.dx += ex;
            s.dy += ey;
            s.xx += ex * ex;
            s.yy += ey * ey;
            s.xy += ex * ey;
            s.t2x += t.theta2_x();
            s.t2y += t.theta2_y();
            s.t2xy += t.theta2_xy();
        }
        s
    }
}

/// Analytic gradient of the log-likelihood in all eight parameters.
///
/// Fails when the sample is empty or every internal variation is zero. The
/// `ln det Theta2` term carries no parameters, so observations on the
/// support boundary are admitted here even though [`loglik`] rejects them.
pub fn loglik_gradient(thetas: &[ThetaRealization], params: &TauParams) -> Result<GradientVector> {
    check_kernel_inputs(thetas)?;
    let s = Sums::new(thetas, params);
    let n = thetas.len() as f64;
    let nu = params.nu() as f64;
    let (sx, sy, rho) = (params.sigma_x(), params.sigma_y(), params.rho());
    let one_m = 1.0 - rho * rho;
    let (g1, g2, g3) = (params.gamma1(), params.gamma2(), params.gamma3());
    let g = params.scale_det();
    let g_sq = g * g;

    let d_mu_x = (s.dx / (sx * sx) - rho * s.dy / (sx * sy)) / one_m;
    let d_mu_y = (s.dy / (sy * sy) - rho * s.dx / (sx * sy)) / one_m;
    let d_sigma_x = -n / sx
        + (2.0 * s.xx / (sx * sx * sx) - 2.0 * rho * s.xy / (sx * sx * sy)) / (2.0 * one_m);
    let d_sigma_y = -n / sy
        + (2.0 * s.yy / (sy * sy * sy) - 2.0 * rho * s.xy / (sx * sy * sy)) / (2.0 * one_m);
    let d_rho = n * rho / one_m - rho / (one_m * one_m) * (s.xx / (sx * sx) + s.yy / (sy * sy))
        + (1.0 + rho * rho) / (one_m * one_m) * s.xy / (sx * sy);

    let d_gamma1 = -n * nu * g2 / (2.0 * g) + g2 * g2 / (2.0 * g_sq) * s.t2x
        - (g - g1 * g2) / (2.0 * g_sq) * s.t2y
        - g2 * g3 / g_sq * s.t2xy;
    let d_gamma2 = -n * nu * g1 / (2.0 * g) - (g - g1 * g2) / (2.0 * g_sq) * s.t2x
        + g1 * g1 / (2.0 * g_sq) * s.t2y
        - g1 * g3 / g_sq * s.t2xy;
    let d_gamma3 = n * nu * g3 / g - g2 * g3 / g_sq * s.t2x - g1 * g3 / g_sq * s.t2y
        + (g + 2.0 * g3 * g3) / g_sq * s.t2xy;

    Ok(GradientVector {
        d_mu_x,
        d_mu_y,
        d_sigma_x,
        d_sigma_y,
        d_rho,
        d_gamma1,
        d_gamma2,
        d_gamma3,
    })
}

/// Parameters in gradient coordinates (standard deviations, not variances).
pub fn to_sd_coords(params: &TauParams) -> [f64; 8] {
    [
        params.mu_x(),
        params.mu_y(),
        params.sigma_x(),
        params.sigma_y(),
        params.rho(),
        params.gamma1(),
        params.gamma2(),
        params.gamma3(),
    ]
}

pub fn from_sd_coords(coords: [f64; 8], nu: u32) -> Result<TauParams> {
    if coords[2] <= 0.0 || coords[3] <= 0.0 {
        return Err(Error::InvalidParams("standard deviations must be positive".into()));
    }
    TauParams::new(
        coords[0],
        coords[1],
        coords[2] * coords[2],
        coords[3] * coords[3],
        coords[4],
        coords[5],
        coords[6],
        coords[7],
        nu,
    )
}

/// Central finite-difference gradient of [`loglik_kernel`] with per-parameter
/// step `h = FD_RELATIVE_STEP * max(|p|, 1)`, halved until both probe points
/// are valid parameters. The differences at `h` and `h / 2` are combined by
/// one Richardson step, which keeps the truncation error negligible close to
/// the boundary of the scale domain where the kernel is strongly curved.
pub fn fd_gradient(thetas: &[ThetaRealization], params: &TauParams) -> Result<GradientVector> {
    check_kernel_inputs(thetas)?;
    let base = to_sd_coords(params);
    let nu = params.nu();
    let mut out = [0.0; 8];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut h = FD_RELATIVE_STEP * base[i].abs().max(1.0);
        let mut probe = None;
        for _ in 0..40 {
            let mut up = base;
            let mut down = base;
            up[i] += h;
            down[i] -= h;
            if let (Ok(pu), Ok(pd)) = (from_sd_coords(up, nu), from_sd_coords(down, nu)) {
                probe = Some((pu, pd, up[i] - down[i]));
                break;
            }
            h /= 2.0;
        }
        let (pu, pd, span) = probe.ok_or_else(|| {
            Error::InvalidParams(format!("no valid finite-difference step for {}", GradientVector::LABELS[i]))
        })?;
        let coarse = (loglik_kernel(thetas, &pu)? - loglik_kernel(thetas, &pd)?) / span;
        let mut up = base;
        let mut down = base;
        up[i] += h / 2.0;
        down[i] -= h / 2.0;
        let fine = (loglik_kernel(thetas, &from_sd_coords(up, nu)?)?
            - loglik_kernel(thetas, &from_sd_coords(down, nu)?)?)
            / (up[i] - down[i]);
        *slot = (4.0 * fine - coarse) / 3.0;
    }
    Ok(GradientVector::from_array(out))
}

/// Per-component `|a - b| / max(|a|, |b|, 1)`, maximized.
pub fn max_relative_error(a: &GradientVector, b: &GradientVector) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Closed-form MLE of all eight parameters from theta data, with `nu` fixed.
pub fn closed_form_mle(thetas: &[ThetaRealization], nu: u32) -> Result<TauParams> {
    let between = between_mles(thetas)?;
    let within = within_mles(thetas, nu)?;
    TauParams::new(
        between.mu_x_hat,
        between.mu_y_hat,
        between.sigma2_x_hat,
        between.sigma2_y_hat,
        between.rho_hat,
        within.gamma1_hat,
        within.gamma2_hat,
        within.gamma3_hat,
        nu,
    )
}
