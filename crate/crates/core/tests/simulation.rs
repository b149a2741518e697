use symint_core::estimators::decompose;
use symint_core::simulate::{
    generate_interval_sample, generate_theta_sample, replication_rng, run_study, sample_bvn_pair,
    sample_wishart, GenerationLevel, StudyConfig,
};
use symint_core::{InternalModel, TauParams};

#[test]
fn wishart_moments() {
    let mut rng = replication_rng(2024, 7, 7);
    let draws = 100_000;
    let (nu, g) = (12u32, (7.0, 5.0, -2.0));
    let mut sum = [0.0; 3];
    let mut sq11 = 0.0;
    for _ in 0..draws {
        let (a, b, c) = sample_wishart(nu, g, &mut rng).unwrap();
        sum[0] += a;
        sum[1] += b;
        sum[2] += c;
        sq11 += a * a;
    }
    let m = sum.map(|s| s / draws as f64);
    let var11 = sq11 / draws as f64 - m[0] * m[0];
    assert!((m[0] / 84.0 - 1.0).abs() < 0.02);
    assert!((m[1] / 60.0 - 1.0).abs() < 0.02);
    assert!((m[2] / -24.0 - 1.0).abs() < 0.02);
    assert!((var11 / (2.0 * 12.0 * 49.0) - 1.0).abs() < 0.05);
}

#[test]
fn bvn_moments() {
    let p = TauParams::table2();
    let mut rng = replication_rng(3, 1, 1);
    let m = 100_000;
    let pts: Vec<(f64, f64)> = (0..m).map(|_| sample_bvn_pair(&p, &mut rng)).collect();
    let (vx, vy, cxy) = symint_core::estimators::classical_moments(&pts);
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    assert!((mx + 2.0).abs() < 0.02);
    assert!((vx / 1.5 - 1.0).abs() < 0.02);
    assert!((vy / 2.5 - 1.0).abs() < 0.02);
    assert!((cxy / -1.75 - 1.0).abs() < 0.03);
}

#[test]
fn theta_level_mean_variation_is_nu_gamma() {
    let p = TauParams::table2();
    let thetas = generate_theta_sample(50_000, &p, &mut replication_rng(9, 50_000, 0));
    let m = thetas.iter().map(|t| t.theta2_x()).sum::<f64>() / thetas.len() as f64;
    assert!((m / (12.0 * p.gamma1()) - 1.0).abs() < 0.02);
}

#[test]
fn interval_level_uniform_variance_at_twelve() {
    // Widths are sqrt(w11), so the uniform within term estimates gamma1.
    let p = TauParams::table2();
    let s = generate_interval_sample(50_000, &p, &mut replication_rng(10, 50_000, 0)).unwrap();
    let o = decompose(&s, InternalModel::Uniform, 12).unwrap().overall();
    assert!((o.var_x / (p.gamma1() + p.sigma2_x()) - 1.0).abs() < 0.03);
    assert!((o.var_y / (p.gamma2() + p.sigma2_y()) - 1.0).abs() < 0.03);
}

#[test]
fn studies_are_reproducible() {
    let cfg = StudyConfig::new(TauParams::table2(), vec![20, 40], 25, 77, GenerationLevel::Interval).unwrap();
    let a = run_study(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.cells.len(), 2);
    let other = StudyConfig { seed: 78, ..cfg };
    assert_ne!(run_study(&other).unwrap().cells, a.cells);
}

#[test]
fn zero_replications_rejected() {
    assert!(StudyConfig::new(TauParams::table2(), vec![50], 0, 1, GenerationLevel::Theta).is_err());
}
