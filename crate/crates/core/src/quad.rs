//! Composite Gauss rules for integrands with algebraic endpoint weights
//! x^{pl} (1 - x)^{pr} on [0, 1].
//!
//! Interior panels use Gauss-Legendre with the weight multiplied in; the two
//! end panels use Gauss-Jacobi so the weight is integrated exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::{GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};

/// Points per panel.
pub const GAUSS_POINTS: usize = 16;

type Rule = Arc<Vec<(f64, f64)>>;

/// Gauss-Legendre nodes/weights on [0, 1].
pub fn legendre01(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| {
            let gl = GaussLegendre::new(n).expect("Gauss-Legendre degree");
            let mut v: Vec<(f64, f64)> = gl.iter().map(|(x, w)| ((x + 1.0) / 2.0, w / 2.0)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(v)
        })
        .clone()
}

/// Nodes/weights for int_0^1 s^p g(s) ds (p > -1).
pub fn jacobi01(n: usize, p: f64) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if p == 0.0 {
        return legendre01(n);
    }
    cache
        .lock()
        .unwrap()
        .entry((n, p.to_bits()))
        .or_insert_with(|| {
            // weight (1+x)^p on [-1, 1]; s = (1+x)/2
            let gj = GaussJacobi::new(n, 0.0, p).expect("Gauss-Jacobi parameters");
            let scale = 0.5f64.powf(p + 1.0);
            let mut v: Vec<(f64, f64)> = gj.iter().map(|(x, w)| ((x + 1.0) / 2.0, w * scale)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(v)
        })
        .clone()
}

/// Breakpoints graded (exponent 3) toward both ends, `m` panels per half.
pub fn graded_breaks(m: usize) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=m).map(|i| 0.5 * (i as f64 / m as f64).powi(3)).collect();
    for i in (0..m).rev() {
        b.push(1.0 - b[i]);
    }
    b
}

/// Quadrature nodes for int_0^1 x^{pl} (1-x)^{pr} g(x) dx over the given
/// breakpoints (which must start at 0 and end at 1), each panel split into
/// `subdiv` equal pieces.
pub fn weighted_rule(breaks: &[f64], subdiv: usize, pl: f64, pr: f64) -> Vec<(f64, f64)> {
    let gl = legendre01(GAUSS_POINTS);
    let gjl = jacobi01(GAUSS_POINTS, pl);
    let gjr = jacobi01(GAUSS_POINTS, pr);
    let mut panels = Vec::with_capacity(breaks.len() * subdiv);
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / subdiv as f64;
        for j in 0..subdiv {
            panels.push((w[0] + j as f64 * h, if j + 1 == subdiv { w[1] } else { w[0] + (j + 1) as f64 * h }));
        }
    }
    let np = panels.len();
    let mut out = Vec::with_capacity(np * GAUSS_POINTS);
    for (i, &(a, b)) in panels.iter().enumerate() {
        let h = b - a;
        if i == 0 && pl != 0.0 {
            let s = h.powf(pl + 1.0);
            for &(t, w) in gjl.iter() {
                let x = a + h * t;
                out.push((x, s * w * (1.0 - x).powf(pr)));
            }
        } else if i + 1 == np && pr != 0.0 {
            let s = h.powf(pr + 1.0);
            for &(t, w) in gjr.iter() {
                // t measures distance from the right end
                let x = b - h * t;
                out.push((x, s * w * x.powf(pl)));
            }
        } else {
            for &(t, w) in gl.iter() {
                let x = a + h * t;
                out.push((x, h * w * x.powf(pl) * (1.0 - x).powf(pr)));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_level: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_level: 7 }
    }
}

/// Repeatedly doubles the rule until two successive vector-valued estimates
/// agree. `estimate(level)` evaluates the rule at a given refinement level.
pub fn refine_until<T, F>(opts: &AdaptiveOptions, mut estimate: F) -> Result<Vec<T>>
where
    T: Copy + Into<num_complex::Complex64>,
    F: FnMut(usize) -> Result<Vec<T>>,
{
    let mut prev = estimate(0)?;
    for level in 1..=opts.max_level {
        let cur = estimate(level)?;
        let ok = cur.iter().zip(&prev).all(|(&c, &p)| {
            let (c, p): (num_complex::Complex64, num_complex::Complex64) = (c.into(), p.into());
            (c - p).norm() <= opts.abs_tol + opts.rel_tol * c.norm()
        });
        if ok {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure(format!("no convergence after {} refinements", opts.max_level)))
}
