//! Independent eigenvalue oracle: Householder reduction to tridiagonal form,
//! then bisection on the Sturm count of the characteristic polynomial's
//! leading principal minors.

/// Diagonal and sub-diagonal of an orthogonally similar tridiagonal matrix.
pub fn tridiagonalize(s: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = s.len();
    let mut a: Vec<Vec<f64>> = s.to_vec();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let sign = if a[k + 1][k] < 0.0 { -1.0 } else { 1.0 };
        let alpha = -sign * alpha_sq.sqrt();
        let mut v = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = a[i][k];
        }
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // A <- H A H with H = I - 2 v v^T / |v|^2.
        let p: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum::<f64>() * 2.0 / vnorm_sq).collect();
        let kappa: f64 = (0..n).map(|i| v[i] * p[i]).sum::<f64>() / vnorm_sq;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kappa * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let d = (0..n).map(|i| a[i][i]).collect();
    let e = (1..n).map(|i| a[i][i - 1]).collect();
    (d, e)
}

/// Number of eigenvalues strictly below `x`.
pub fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in descending order.
pub fn eigenvalues(s: &[Vec<f64>]) -> Vec<f64> {
    let n = s.len();
    let (d, e) = tridiagonalize(s);
    let radius = (0..n)
        .map(|i| {
            let l = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < n { e[i].abs() } else { 0.0 };
            (d[i] - l - r, d[i] + l + r)
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (lo, hi)| (acc.0.min(lo), acc.1.max(hi)));
    let (lo, hi) = (radius.0 - 1e-9, radius.1 + 1e-9);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest: smallest x with count_below(x) > k.
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if count_below(&d, &e, m) > k {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.reverse();
    out
}
