#![allow(dead_code)]

/// Explicit leapfrog for u_tt = u_xx + lam(t) f(x) on a uniform grid,
/// zero Dirichlet and initial data. Returns u(., t_final) on the grid.
pub fn leapfrog_wave(
    f: impl Fn(f64) -> f64,
    lam: impl Fn(f64) -> f64,
    n_cells: usize,
    t_final: f64,
) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / n_cells as f64;
    let steps = (2.0 * t_final / h).ceil() as usize;
    let dt = t_final / steps as f64;
    let x: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
    let fx: Vec<f64> = x.iter().map(|&v| f(v)).collect();
    let mut prev = vec![0.0; n_cells + 1];
    // u(dt) = dt^2 / 2 u_tt(0) + dt^3 / 6 u_ttt(0), u_ttt(0) = lam'(0) f
    let dl = (lam(1e-6) - lam(-1e-6)) / 2e-6;
    let mut cur: Vec<f64> = fx.iter().map(|v| (0.5 * dt * dt * lam(0.0) + dt.powi(3) / 6.0 * dl) * v).collect();
    cur[0] = 0.0;
    cur[n_cells] = 0.0;
    let r = (dt / h).powi(2);
    for n in 1..steps {
        let t = n as f64 * dt;
        let mut next = vec![0.0; n_cells + 1];
        for i in 1..n_cells {
            next[i] = 2.0 * cur[i] - prev[i] + r * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) + dt * dt * lam(t) * fx[i];
        }
        prev = cur;
        cur = next;
    }
    (x, cur)
}

/// Piecewise-linear interpolation of (xs, ys) at x.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let j = xs.partition_point(|&v| v < x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    ys[j - 1] + (ys[j] - ys[j - 1]) * (x - x0) / (x1 - x0)
}

/// Relative L2 difference with lumped weights on the nodes of `xs`.
pub fn rel_l2(xs: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..xs.len() - 1 {
        let w = 0.5 * (xs[i + 1] - xs[i - 1]);
        num += w * (a[i] - b[i]).powi(2);
        den += w * b[i].powi(2);
    }
    (num / den).sqrt()
}
