//! Seeded generation of samples from the model and the replication study.
//!
//! Random streams: every replication owns a ChaCha8 generator seeded with
//! the study seed and switched to stream `(n << 32) | r` for sample size `n`
//! and replication index `r`. Normal variates come from the ziggurat sampler
//! of `rand_distr`. Reports therefore depend only on `(seed, config)` and not
//! on how replications are scheduled across threads.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{g_plugin, g_theoretical, GVector, PluginInput};
use crate::error::{Error, Result};
use crate::internal::ThetaRealization;
use crate::interval::{
    BivariateIntervalObs, BivariateIntervalSample, InternalModel, Interval, TauParams,
};

pub type SimRng = ChaCha8Rng;

/// Generator for replication `r` at sample size `n`.
pub fn replication_rng(seed: u64, n: usize, r: usize) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | (r as u64 & 0xffff_ffff));
    rng
}

/// Draws the internal mean pair from `N2(mu, Sigma)` through the
/// lower-triangular factor of the 2x2 covariance.
pub fn sample_bvn_pair<R: Rng + ?Sized>(params: &TauParams, rng: &mut R) -> (f64, f64) {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let rho = params.rho();
    let x = params.mu_x() + params.sigma_x() * z1;
    let y = params.mu_y() + params.sigma_y() * (rho * z1 + (1.0 - rho * rho).sqrt() * z2);
    (x, y)
}

/// Cholesky factor `(l11, l21, l22)` of `[[g1, g3], [g3, g2]]`.
fn scale_cholesky(gamma: (f64, f64, f64)) -> Result<(f64, f64, f64)> {
    let (g1, g2, g3) = gamma;
    if !(g1 > 0.0 && g2 > 0.0) || g1 * g2 - g3 * g3 <= 0.0 {
        return Err(Error::InvalidParams("Wishart scale is not positive definite".into()));
    }
    let l11 = g1.sqrt();
    let l21 = g3 / l11;
    let l22 = (g2 - l21 * l21).sqrt();
    Ok((l11, l21, l22))
}

/// Wishart`(nu, Gamma)` draw as the sum of `nu` outer products of
/// `N2(0, Gamma)` vectors. Returns `(w11, w22, w12)`.
pub fn sample_wishart<R: Rng + ?Sized>(
    nu: u32,
    gamma: (f64, f64, f64),
    rng: &mut R,
) -> Result<(f64, f64, f64)> {
    if nu < 2 {
        return Err(Error::InvalidParams(format!("nu = {nu} must be at least 2")));
    }
    let factor = scale_cholesky(gamma)?;
    Ok(wishart_with_factor(nu, factor, rng))
}

fn wishart_with_factor<R: Rng + ?Sized>(
    nu: u32,
    (l11, l21, l22): (f64, f64, f64),
    rng: &mut R,
) -> (f64, f64, f64) {
    let (mut w11, mut w22, mut w12) = (0.0, 0.0, 0.0);
    for _ in 0..nu {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let u = l11 * z1;
        let v = l21 * z1 + l22 * z2;
        w11 += u * u;
        w22 += v * v;
        w12 += u * v;
    }
    (w11, w22, w12)
}

fn draw_one<R: Rng + ?Sized>(
    params: &TauParams,
    factor: (f64, f64, f64),
    rng: &mut R,
) -> ((f64, f64), (f64, f64, f64)) {
    let means = sample_bvn_pair(params, rng);
    let w = wishart_with_factor(params.nu(), factor, rng);
    (means, w)
}

/// `n` internal realizations: means from the bivariate normal, variations a
/// full Wishart draw (so `E theta2 = nu Gamma`).
pub fn generate_theta_sample<R: Rng + ?Sized>(
    n: usize,
    params: &TauParams,
    rng: &mut R,
) -> Vec<ThetaRealization> {
    let factor = scale_cholesky((params.gamma1(), params.gamma2(), params.gamma3()))
        .expect("TauParams guarantees a positive definite scale");
    (0..n)
        .map(|_| {
            let ((x, y), (w11, w22, w12)) = draw_one(params, factor, rng);
            ThetaRealization::new(x, y, w11, w22, w12).expect("draws are finite")
        })
        .collect()
}

/// `n` interval observations centred at bivariate normal draws with widths
/// `sqrt(w11)` and `sqrt(w22)` from a Wishart draw. The off-diagonal of the
/// draw is discarded. Consumes the generator exactly like
/// [`generate_theta_sample`].
pub fn generate_interval_sample<R: Rng + ?Sized>(
    n: usize,
    params: &TauParams,
    rng: &mut R,
) -> Result<BivariateIntervalSample> {
    let factor = scale_cholesky((params.gamma1(), params.gamma2(), params.gamma3()))?;
    let observations = (0..n)
        .map(|_| {
            let ((x, y), (w11, w22, _)) = draw_one(params, factor, rng);
            let (hx, hy) = (w11.sqrt() / 2.0, w22.sqrt() / 2.0);
            Ok(BivariateIntervalObs::new(
                Interval::new(x - hx, x + hx)?,
                Interval::new(y - hy, y + hy)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    BivariateIntervalSample::new(observations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GenerationLevel {
    /// Estimators see the internal realizations directly.
    #[default]
    Theta,
    /// Estimators see generated intervals under the uniform model.
    Interval,
}

impl std::str::FromStr for GenerationLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "theta" => Ok(GenerationLevel::Theta),
            "interval" => Ok(GenerationLevel::Interval),
            other => Err(Error::InvalidConfig(format!("unknown generation level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub params: TauParams,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub level: GenerationLevel,
}

impl StudyConfig {
    pub fn new(
        params: TauParams,
        sample_sizes: Vec<usize>,
        replications: usize,
        seed: u64,
        level: GenerationLevel,
    ) -> Result<Self> {
        let config = Self {
            params,
            sample_sizes,
            replications,
            seed,
            level,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        if self.replications > u32::MAX as usize {
            return Err(Error::InvalidConfig("too many replications".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes given".into()));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!("sample size {n} is below 2")));
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys: `mu_x`,
    /// `mu_y`, `sigma2_x`, `sigma2_y`, one of `sigma_xy` or `rho`, `gamma1`,
    /// `gamma2`, `gamma3`, `nu` (default 12), `sample_sizes` (comma
    /// separated), `replications`, `seed`, `level` (`theta` or `interval`).
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut kv = std::collections::BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            if kv.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        const KNOWN: [&str; 14] = [
            "mu_x", "mu_y", "sigma2_x", "sigma2_y", "sigma_xy", "rho", "gamma1", "gamma2",
            "gamma3", "nu", "sample_sizes", "replications", "seed", "level",
        ];
        if let Some(k) = kv.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown key `{k}`")));
        }
        let real = |k: &str| -> Result<f64> {
            kv.get(k)
                .ok_or_else(|| Error::InvalidConfig(format!("missing key `{k}`")))?
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("`{k}` is not a number")))
        };
        let integer = |k: &str| -> Result<Option<u64>> {
            kv.get(k)
                .map(|v| {
                    v.parse::<u64>()
                        .map_err(|_| Error::InvalidConfig(format!("`{k}` is not a non-negative integer")))
                })
                .transpose()
        };
        let nu = match integer("nu")? {
            Some(v) => u32::try_from(v).map_err(|_| Error::InvalidConfig("nu too large".into()))?,
            None => crate::interval::DEFAULT_NU,
        };
        let (mu_x, mu_y, s2x, s2y) = (real("mu_x")?, real("mu_y")?, real("sigma2_x")?, real("sigma2_y")?);
        let (g1, g2, g3) = (real("gamma1")?, real("gamma2")?, real("gamma3")?);
        let params = match (kv.contains_key("sigma_xy"), kv.contains_key("rho")) {
            (true, false) => {
                TauParams::from_covariance(mu_x, mu_y, s2x, s2y, real("sigma_xy")?, g1, g2, g3, nu)
            }
            (false, true) => TauParams::new(mu_x, mu_y, s2x, s2y, real("rho")?, g1, g2, g3, nu),
            _ => {
                return Err(Error::InvalidConfig(
                    "give exactly one of `sigma_xy` or `rho`".into(),
                ))
            }
        }
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let sample_sizes = kv
            .get("sample_sizes")
            .ok_or_else(|| Error::InvalidConfig("missing key `sample_sizes`".into()))?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidConfig(format!("bad sample size `{}`", s.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        let replications = integer("replications")?
            .ok_or_else(|| Error::InvalidConfig("missing key `replications`".into()))?
            as usize;
        let seed = integer("seed")?.unwrap_or(0);
        let level = kv
            .get("level")
            .map(|v| v.parse())
            .transpose()?
            .unwrap_or_default();
        Self::new(params, sample_sizes, replications, seed, level)
    }

    /// Inverse of [`StudyConfig::from_kv_str`].
    pub fn to_kv_string(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        for (k, v) in [
            ("mu_x", p.mu_x()),
            ("mu_y", p.mu_y()),
            ("sigma2_x", p.sigma2_x()),
            ("sigma2_y", p.sigma2_y()),
            ("rho", p.rho()),
            ("gamma1", p.gamma1()),
            ("gamma2", p.gamma2()),
            ("gamma3", p.gamma3()),
        ] {
            let _ = writeln!(out, "{k} = {v:?}");
        }
        let sizes: Vec<String> = self.sample_sizes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "nu = {}", p.nu());
        let _ = writeln!(out, "sample_sizes = {}", sizes.join(", "));
        let _ = writeln!(out, "replications = {}", self.replications);
        let _ = writeln!(out, "seed = {}", self.seed);
        let level = match self.level {
            GenerationLevel::Theta => "theta",
            GenerationLevel::Interval => "interval",
        };
        let _ = writeln!(out, "level = {level}");
        out
    }
}

/// Replication means and standard deviations at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyCell {
    pub n: usize,
    pub mean: [f64; 10],
    pub sd: [f64; 10],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub theoretical: GVector,
    pub cells: Vec<StudyCell>,
}

/// One replication: generate, estimate, evaluate the plug-in `g`.
pub fn run_replication(config: &StudyConfig, n: usize, r: usize) -> Result<GVector> {
    let mut rng = replication_rng(config.seed, n, r);
    let nu = config.params.nu();
    match config.level {
        GenerationLevel::Theta => {
            let thetas = generate_theta_sample(n, &config.params, &mut rng);
            g_plugin(PluginInput::Thetas(&thetas), nu)
        }
        GenerationLevel::Interval => {
            let sample = generate_interval_sample(n, &config.params, &mut rng)?;
            g_plugin(PluginInput::Sample(&sample, InternalModel::Uniform), nu)
        }
    }
}

/// Runs every replication for every sample size. Replications run in
/// parallel; results are collected by index and folded serially.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.sample_sizes.len());
    for &n in &config.sample_sizes {
        let draws = (0..config.replications)
            .into_par_iter()
            .map(|r| run_replication(config, n, r))
            .collect::<Result<Vec<_>>>()?;
        cells.push(summarize(n, &draws));
    }
    Ok(StudyReport {
        config: config.clone(),
        theoretical: g_theoretical(&config.params),
        cells,
    })
}

fn summarize(n: usize, draws: &[GVector]) -> StudyCell {
    let b = draws.len() as f64;
    let mut mean = [0.0; 10];
    let mut sd = [0.0; 10];
    for k in 0..10 {
        let m = draws.iter().map(|g| g.get(k)).sum::<f64>() / b;
        mean[k] = m;
        sd[k] = if draws.len() > 1 {
            let ss: f64 = draws.iter().map(|g| (g.get(k) - m).powi(2)).sum();
            (ss / (b - 1.0)).sqrt()
        } else {
            0.0
        };
    }
    StudyCell { n, mean, sd }
}
