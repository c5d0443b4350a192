//! Forward solvers: the eigenfunction (Duhamel) series and the graded-mesh
//! finite element scheme with Grunwald-Letnikov time stepping.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mlf::{reciprocal_gamma, MittagLeffler};
use crate::problem::{Intensity, ObservationTrace, ProblemSpec, Source, SpatialMesh, TimeGrid};
use crate::quad::{legendre01, refine_until, weighted_rule, AdaptiveOptions};
use crate::spectral::{project_source, EigenSystem, Eigenfunctions, ModalCoeff, ZeroKind};

/// Relative size of the last mode band above which the series is flagged.
pub const TRUNCATION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    Spectral,
    Discrete,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolutionMeta {
    pub n_modes: Option<usize>,
    pub n_cells: usize,
    pub n_steps: usize,
    /// max |Im u| / max |u| (spectral route).
    pub imag_residue: f64,
    /// ||contribution of the last mode band|| / ||u|| (spectral route).
    pub tail_ratio: f64,
}

/// Nodal field u(x_i, t_k), boundary nodes included; `values[k][i]`.
#[derive(Clone, Debug)]
pub struct ForwardSolution {
    pub route: Route,
    pub mesh: SpatialMesh,
    pub grid: TimeGrid,
    pub values: Vec<Vec<f64>>,
    pub meta: SolutionMeta,
}

impl ForwardSolution {
    /// TruncationWarning if the last mode band is not negligible.
    pub fn check_truncation(&self) -> Result<()> {
        if self.meta.tail_ratio > TRUNCATION_TOL {
            return Err(Error::TruncationWarning { ratio: self.meta.tail_ratio });
        }
        Ok(())
    }

    /// Space-time L2 norm with lumped spatial weights.
    pub fn l2_norm(&self) -> f64 {
        let w = self.mesh.lumped_weights();
        let mut s = 0.0;
        for row in &self.values {
            for (i, wi) in w.iter().enumerate() {
                s += wi * row[i + 1] * row[i + 1];
            }
        }
        (s * self.grid.tau).sqrt()
    }

    /// ||self - other|| / ||other|| in the space-time lumped L2 norm.
    pub fn relative_difference(&self, other: &ForwardSolution) -> Result<f64> {
        if self.mesh.nodes != other.mesh.nodes || self.grid != other.grid {
            return Err(Error::InvalidInput("solutions live on different grids".into()));
        }
        let w = self.mesh.lumped_weights();
        let (mut num, mut den) = (0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            for (i, wi) in w.iter().enumerate() {
                num += wi * (a[i + 1] - b[i + 1]).powi(2);
                den += wi * b[i + 1] * b[i + 1];
            }
        }
        Ok((num / den).sqrt())
    }

    /// Spatial relative L2 difference at time index k.
    pub fn relative_difference_at(&self, other: &ForwardSolution, k: usize) -> Result<f64> {
        if self.mesh.nodes != other.mesh.nodes || self.grid != other.grid || k > self.grid.n_steps {
            return Err(Error::InvalidInput("solutions live on different grids".into()));
        }
        let w = self.mesh.lumped_weights();
        let (a, b) = (&self.values[k], &other.values[k]);
        let (mut num, mut den) = (0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            num += wi * (a[i + 1] - b[i + 1]).powi(2);
            den += wi * b[i + 1] * b[i + 1];
        }
        Ok((num / den).sqrt())
    }

    /// Field CSV with columns x, t, u.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,t,u\n");
        for (k, row) in self.values.iter().enumerate() {
            let t = self.grid.t(k);
            for (x, u) in self.mesh.nodes.iter().zip(row) {
                s.push_str(&format!("{x:e},{t:e},{u:e}\n"));
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Duhamel coefficients

/// int_0^t lambda(t-s) s^{alpha-1} E_{alpha,alpha}(lambda_n s^alpha) ds by graded
/// composite Gauss rules (Gauss-Jacobi on the singular panel), refined until
/// successive levels agree to `quad_tol`.
pub fn duhamel_coefficient(alpha: f64, lambda_n: C64, intensity: &Intensity, t: f64, quad_tol: f64) -> Result<C64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("t = {t} must be non-negative")));
    }
    if t == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let ml = MittagLeffler::new(alpha, alpha)?;
    let opts = AdaptiveOptions { abs_tol: 1e-300, rel_tol: quad_tol, max_level: 9 };
    // s = t x, weight x^{alpha-1}, breaks graded toward x = 0
    let scale = t.powf(alpha);
    let v = refine_until(&opts, |level| {
        let m = 4 << level;
        let breaks: Vec<f64> = (0..=m).map(|i| (i as f64 / m as f64).powi(3)).collect();
        let rule = weighted_rule(&breaks, 1, alpha - 1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in rule {
            let s = t * x;
            acc += w * intensity.eval(t - s) * ml.eval(lambda_n * s.powf(alpha))?;
        }
        Ok(vec![acc * scale])
    })?;
    Ok(v[0])
}

/// Product-integration weights on the uniform grid s_j = j tau: with lambda
/// interpolated linearly on each cell,
/// c(t_k) = sum_{j<k} a_j lambda(t_k - s_j) + b_j lambda(t_k - s_{j+1}).
pub fn duhamel_weights(alpha: f64, lambda_n: C64, tau: f64, n_cells: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    let g = MittagLeffler::new(alpha, alpha)?;
    let e1 = MittagLeffler::new(alpha, alpha + 1.0)?;
    let e2 = MittagLeffler::new(alpha, alpha + 2.0)?;
    // G1(s) = int_0^s g,  G2(s) = int_0^s G1
    let g1 = |s: f64| -> Result<C64> { Ok(s.powf(alpha) * e1.eval(lambda_n * s.powf(alpha))?) };
    let g2 = |s: f64| -> Result<C64> { Ok(s.powf(alpha + 1.0) * e2.eval(lambda_n * s.powf(alpha))?) };
    let gl = legendre01(6);
    let cells: Vec<(C64, C64)> = (0..n_cells)
        .into_par_iter()
        .map(|j| -> Result<(C64, C64)> {
            let a = j as f64 * tau;
            let b = a + tau;
            if j < 8 {
                let i0 = g1(b)? - g1(a)?;
                let i1 = tau * g1(b)? - (g2(b)? - g2(a)?);
                let bw = i1 / tau;
                Ok((i0 - bw, bw))
            } else {
                let (mut wa, mut wb) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for &(x, w) in gl.iter() {
                    let s = a + tau * x;
                    let v = w * tau * s.powf(alpha - 1.0) * g.eval(lambda_n * s.powf(alpha))?;
                    wa += v * (1.0 - x);
                    wb += v * x;
                }
                Ok((wa, wb))
            }
        })
        .collect::<Result<_>>()?;
    Ok(cells.into_iter().unzip())
}

/// Duhamel coefficients c(t_k), k = 0..=n_steps, for intensity samples on the grid.
pub fn duhamel_on_grid(alpha: f64, lambda_n: C64, lam: &[f64], grid: &TimeGrid) -> Result<Vec<C64>> {
    let n = grid.n_steps;
    if lam.len() != n + 1 {
        return Err(Error::InvalidInput("intensity samples do not match the grid".into()));
    }
    let (wa, wb) = duhamel_weights(alpha, lambda_n, grid.tau, n)?;
    Ok((0..=n)
        .into_par_iter()
        .map(|k| {
            let mut c = C64::new(0.0, 0.0);
            for j in 0..k {
                c += wa[j] * lam[k - j] + wb[j] * lam[k - j - 1];
            }
            c
        })
        .collect())
}

fn check_conjugate_symmetric(system: &EigenSystem, coeffs: &[ModalCoeff]) -> Result<()> {
    for c in coeffs {
        let p = system.pair(c.n)?;
        if p.kind == ZeroKind::Complex {
            let partner = coeffs.iter().find(|d| d.n == -c.n);
            let ok = partner.is_some_and(|d| (d.value - c.value.conj()).norm() <= 1e-12 * c.value.norm().max(1e-300));
            if !ok {
                return Err(Error::InvalidInput(format!("coefficient of mode {} lacks its conjugate partner", c.n)));
            }
        } else if c.value.im.abs() > 1e-12 * c.value.norm() {
            return Err(Error::InvalidInput(format!("real mode {} has a complex coefficient", c.n)));
        }
    }
    Ok(())
}

fn check_orders(spec: &ProblemSpec, system: &EigenSystem) -> Result<()> {
    if (system.beta - spec.beta).abs() > 1e-14 {
        return Err(Error::InvalidInput(format!(
            "eigensystem beta {} differs from problem beta {}",
            system.beta, spec.beta
        )));
    }
    Ok(())
}

/// Per-mode Duhamel coefficients over the grid, keyed like `coeffs`.
fn mode_histories(
    spec: &ProblemSpec,
    system: &EigenSystem,
    coeffs: &[ModalCoeff],
    grid: &TimeGrid,
) -> Result<Vec<Vec<C64>>> {
    let lam = spec.intensity.sample(&grid.times());
    // one Duhamel pass per representative; conjugate modes reuse it (real intensity)
    let mut reps: Vec<usize> = coeffs.iter().map(|c| c.n.unsigned_abs() as usize).collect();
    reps.sort_unstable();
    reps.dedup();
    let hist: Vec<(usize, Vec<C64>)> = reps
        .iter()
        .map(|&r| Ok((r, duhamel_on_grid(spec.alpha, system.lambda(r as i64)?, &lam, grid)?)))
        .collect::<Result<_>>()?;
    coeffs
        .iter()
        .map(|c| {
            let h = &hist.iter().find(|(r, _)| *r == c.n.unsigned_abs() as usize).unwrap().1;
            Ok(if c.n < 0 { h.iter().map(|v| v.conj()).collect() } else { h.clone() })
        })
        .collect()
}

/// w = L^{-1} f for the Dirichlet problem D^b w = f: w = I^b f - (I^b f)(1) x^{b-1}.
/// Since L X_n = lambda_n X_n this is the limit of sum f_n X_n / lambda_n.
pub fn static_solution(beta: f64, source: &Source, xs: &[f64]) -> Result<Vec<f64>> {
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(Error::InvalidInput(format!("beta = {beta} outside (1, 2]")));
    }
    let rg = reciprocal_gamma(C64::new(beta, 0.0)).re;
    // I^b f(x) = x^b / Gamma(b) int_0^1 (1-u)^{b-1} f(x u) du
    let frac_int = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let mut breaks = vec![0.0];
        if let Some(bp) = source.breakpoints() {
            breaks.extend(bp.iter().map(|b| b / x).filter(|&u| u > 1e-12 && u < 1.0 - 1e-12));
        } else {
            breaks.extend([0.25, 0.5, 0.75]);
        }
        breaks.push(1.0);
        let rule = weighted_rule(&breaks, 2, 0.0, beta - 1.0);
        let v: f64 = rule.iter().map(|&(u, w)| w * source.eval(x * u)).sum();
        x.powf(beta) * rg * v
    };
    let at_one = frac_int(1.0);
    Ok(xs.iter().map(|&x| frac_int(x) - at_one * x.powf(beta - 1.0)).collect())
}

/// u(x_i, t_k) = sum over |n| <= n_modes of c_n(t_k) f_n X_n(x_i).
///
/// The sum is rearranged as -lambda(t) w(x) + sum f_n (c_n(t) + lambda(t)/lambda_n) X_n(x)
/// with w from `static_solution`: the same series, but the quasi-static part that
/// converges slowly near x = 0 is summed in closed form.
pub fn solve_spectral(
    spec: &ProblemSpec,
    system: &EigenSystem,
    n_modes: usize,
    mesh: &SpatialMesh,
    grid: &TimeGrid,
) -> Result<ForwardSolution> {
    check_orders(spec, system)?;
    let coeffs = project_source(system, &spec.source, n_modes)?;
    let w = static_solution(spec.beta, &spec.source, &mesh.nodes)?;
    spectral_field(spec, system, &coeffs, mesh, grid, n_modes, Some(&w))
}

/// Plain truncated sum with given modal coefficients.
pub fn solve_spectral_coeffs(
    spec: &ProblemSpec,
    system: &EigenSystem,
    coeffs: &[ModalCoeff],
    mesh: &SpatialMesh,
    grid: &TimeGrid,
    n_modes: usize,
) -> Result<ForwardSolution> {
    spectral_field(spec, system, coeffs, mesh, grid, n_modes, None)
}

fn spectral_field(
    spec: &ProblemSpec,
    system: &EigenSystem,
    coeffs: &[ModalCoeff],
    mesh: &SpatialMesh,
    grid: &TimeGrid,
    n_modes: usize,
    static_part: Option<&[f64]>,
) -> Result<ForwardSolution> {
    check_orders(spec, system)?;
    check_conjugate_symmetric(system, coeffs)?;
    let mut hist = mode_histories(spec, system, coeffs, grid)?;
    let lam = spec.intensity.sample(&grid.times());
    if static_part.is_some() {
        for (c, h) in coeffs.iter().zip(hist.iter_mut()) {
            let l = system.lambda(c.n)?;
            for (hk, lk) in h.iter_mut().zip(&lam) {
                *hk += *lk / l;
            }
        }
    }
    let ef = Eigenfunctions::new(system)?;
    let nx = mesh.nodes.len();
    let m = coeffs.len();
    // X[mode][node] scaled by f_n
    let xs: Vec<Vec<C64>> = coeffs
        .iter()
        .map(|c| {
            let l = system.lambda(c.n)?;
            mesh.nodes.iter().map(|&x| Ok(c.value * ef.primal(l, x)?)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let band_start = n_modes - (n_modes / 10).max(1);
    let in_band: Vec<bool> = coeffs.iter().map(|c| c.n.unsigned_abs() as usize > band_start).collect();
    let rows: Vec<(Vec<f64>, f64, f64, f64)> = (0..=grid.n_steps)
        .into_par_iter()
        .map(|k| {
            let mut row: Vec<C64> = match static_part {
                Some(w) => w.iter().map(|v| C64::new(-lam[k] * v, 0.0)).collect(),
                None => vec![C64::new(0.0, 0.0); nx],
            };
            let mut band = vec![C64::new(0.0, 0.0); nx];
            for j in 0..m {
                let c = hist[j][k];
                let target = if in_band[j] { &mut band } else { &mut row };
                for (r, x) in target.iter_mut().zip(&xs[j]) {
                    *r += c * x;
                }
            }
            let mut im: f64 = 0.0;
            let mut band_sq = 0.0;
            let mut vals = Vec::with_capacity(nx);
            for i in 0..nx {
                let u = row[i] + band[i];
                im = im.max(u.im.abs());
                band_sq += band[i].norm_sqr();
                vals.push(u.re);
            }
            // boundary values are zero by construction; remove rounding
            vals[0] = 0.0;
            vals[nx - 1] = 0.0;
            let sq: f64 = vals.iter().map(|v| v * v).sum();
            (vals, im, band_sq, sq)
        })
        .collect();
    let mut values = Vec::with_capacity(rows.len());
    let (mut im_max, mut band_sq, mut sq, mut u_max) = (0.0f64, 0.0, 0.0, 0.0f64);
    for (v, im, b, s) in rows {
        im_max = im_max.max(im);
        band_sq += b;
        sq += s;
        u_max = v.iter().fold(u_max, |a, x| a.max(x.abs()));
        values.push(v);
    }
    let meta = SolutionMeta {
        n_modes: Some(n_modes),
        n_cells: mesh.n_cells,
        n_steps: grid.n_steps,
        imag_residue: if u_max > 0.0 { im_max / u_max } else { 0.0 },
        tail_ratio: if sq > 0.0 { (band_sq / sq).sqrt() } else { 0.0 },
    };
    Ok(ForwardSolution { route: Route::Spectral, mesh: mesh.clone(), grid: *grid, values, meta })
}

/// phi(t_k) = sum_n c_n(t_k) f_n E_{beta,beta-1}(lambda_n).
pub fn observe_flux_spectral(
    spec: &ProblemSpec,
    system: &EigenSystem,
    coeffs: &[ModalCoeff],
    grid: &TimeGrid,
) -> Result<ObservationTrace> {
    check_orders(spec, system)?;
    check_conjugate_symmetric(system, coeffs)?;
    let hist = mode_histories(spec, system, coeffs, grid)?;
    let mut phi = vec![0.0; grid.n_steps + 1];
    for (c, h) in coeffs.iter().zip(&hist) {
        let p = system.pair(c.n)?;
        let d = if c.n < 0 { p.deriv_at_lambda.conj() } else { p.deriv_at_lambda };
        for (v, hk) in phi.iter_mut().zip(h) {
            *v += (hk * c.value * d).re;
        }
    }
    phi[0] = 0.0;
    Ok(ObservationTrace::clean(*grid, phi))
}

// ---------------------------------------------------------------------------
// Finite elements

/// Stiffness S (S_ij = -int I^{2-beta} phi_j' phi_i') and mass M on the interior hats.
#[derive(Clone, Debug)]
pub struct FemOperators {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

/// (y + h)^p - y^p without cancellation.
fn pow_diff(y: f64, h: f64, p: f64) -> f64 {
    if y > 0.0 {
        y.powf(p) * (p * (h / y).ln_1p()).exp_m1()
    } else {
        h.powf(p)
    }
}

pub fn assemble_fractional_stiffness(beta: f64, mesh: &SpatialMesh) -> Result<FemOperators> {
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(Error::InvalidInput(format!("beta = {beta} must lie in (1, 2]")));
    }
    let x = &mesh.nodes;
    let n = mesh.n_cells;
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let p = 3.0 - beta;
    let gam = crate::dd::Dd::recip_gamma(crate::dd::Dd::new(4.0 - beta)).to_f64();
    let gl = legendre01(10);
    // G[q][c] = int over cell q of I^{2-beta} 1_{cell c}, times Gamma(4-beta); zero for q < c
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let mut col = vec![0.0; n];
            col[c] = h[c].powf(p);
            if c + 1 < n {
                let q = c + 1;
                col[q] = (h[c] + h[q]).powf(p) - h[c].powf(p) - h[q].powf(p);
            }
            for q in c + 2..n {
                let y = x[q] - x[c + 1];
                col[q] = if y < 4.0 * h[c] {
                    // F(y+a+b) - F(y+a) - F(y+b) + F(y), F(z) = z^p
                    pow_diff(y + h[c], h[q], p) - pow_diff(y, h[q], p)
                } else {
                    // int_0^{h_c} p [(y+s+h_q)^{p-1} - (y+s)^{p-1}] ds
                    gl.iter().map(|&(t, w)| w * h[c] * p * pow_diff(y + t * h[c], h[q], p - 1.0)).sum()
                };
            }
            col
        })
        .collect();
    // hat j (node j = 1..n-1): slope 1/h_{j-1} on cell j-1, -1/h_j on cell j
    let ni = n - 1;
    let mut s = DMatrix::<f64>::zeros(ni, ni);
    for jj in 0..ni {
        let j = jj + 1;
        let slopes = [(j - 1, 1.0 / h[j - 1]), (j, -1.0 / h[j])];
        for ii in 0..ni {
            let i = ii + 1;
            let test = [(i - 1, 1.0 / h[i - 1]), (i, -1.0 / h[i])];
            let mut v = 0.0;
            for &(cq, dq) in &test {
                for &(cp, dp) in &slopes {
                    v += dq * cols[cp][cq] * dp;
                }
            }
            s[(ii, jj)] = -v * gam;
        }
    }
    let mut m = DMatrix::<f64>::zeros(ni, ni);
    for jj in 0..ni {
        let j = jj + 1;
        m[(jj, jj)] = (h[j - 1] + h[j]) / 3.0;
        if jj + 1 < ni {
            m[(jj, jj + 1)] = h[j] / 6.0;
            m[(jj + 1, jj)] = h[j] / 6.0;
        }
    }
    Ok(FemOperators { stiffness: s, mass: m })
}

/// Grunwald-Letnikov weights w_j = (-1)^j binom(alpha, j).
pub fn gl_weights(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = vec![1.0; n + 1];
    for j in 1..=n {
        w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / j as f64);
    }
    w
}

/// Factorized (w_0 tau^{-alpha} M - S) with the history weights.
pub struct TimeStepper {
    tau_a: f64,
    weights: Vec<f64>,
    mass: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl TimeStepper {
    pub fn new(alpha: f64, grid: &TimeGrid, ops: &FemOperators) -> Result<Self> {
        let tau_a = grid.tau.powf(-alpha);
        let weights = gl_weights(alpha, grid.n_steps);
        let system = &ops.mass * (weights[0] * tau_a) - &ops.stiffness;
        let inverse = system
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::SingularSystem("time-stepping matrix is singular".into()))?;
        Ok(TimeStepper { tau_a, weights, mass: ops.mass.clone(), inverse })
    }

    /// u^0 = 0 and (w_0 tau^{-a} M - S) u^k = rhs(k) - tau^{-a} M sum_{j=1..k} w_j u^{k-j}.
    pub fn march(&self, n_steps: usize, rhs: impl Fn(usize) -> DVector<f64>) -> Result<Vec<DVector<f64>>> {
        Ok(self.march_with(n_steps, &rhs, &self.inverse))
    }

    /// Same recursion with the transposed system matrix (used for adjoint flux weights).
    pub fn march_transpose(&self, n_steps: usize, rhs: impl Fn(usize) -> DVector<f64>) -> Result<Vec<DVector<f64>>> {
        Ok(self.march_with(n_steps, &rhs, &self.inverse.transpose()))
    }

    fn march_with(&self, n_steps: usize, rhs: &dyn Fn(usize) -> DVector<f64>, inv: &DMatrix<f64>) -> Vec<DVector<f64>> {
        let n = self.mass.nrows();
        // columns are u^0 .. u^K; the history sum is one gemv per step
        let mut u = DMatrix::<f64>::zeros(n, n_steps + 1);
        let first = rhs(0);
        if first.iter().any(|v| *v != 0.0) {
            // a nonzero rhs at k = 0 is an impulse; the history sum is empty
            u.set_column(0, &(inv * first));
        }
        let mut wr = DVector::<f64>::zeros(n_steps);
        for k in 1..=n_steps {
            for i in 0..k {
                wr[i] = self.weights[k - i];
            }
            let hv = u.columns(0, k) * wr.rows(0, k);
            let b = rhs(k) - tridiag_mul(&self.mass, &hv) * self.tau_a;
            u.set_column(k, &(inv * b));
        }
        u.column_iter().map(|c| c.into_owned()).collect()
    }
}

/// M v for the tridiagonal mass matrix.
fn tridiag_mul(m: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(n, |i, _| {
        let mut s = m[(i, i)] * v[i];
        if i > 0 {
            s += m[(i, i - 1)] * v[i - 1];
        }
        if i + 1 < n {
            s += m[(i, i + 1)] * v[i + 1];
        }
        s
    })
}

/// Marches the FE scheme with load M lambda(t_k) f_nodal and zero initial data.
pub fn time_march_discrete(
    spec: &ProblemSpec,
    ops: &FemOperators,
    mesh: &SpatialMesh,
    grid: &TimeGrid,
    f_nodal: &[f64],
) -> Result<ForwardSolution> {
    let ni = mesh.n_interior();
    if f_nodal.len() != ni || ops.mass.nrows() != ni {
        return Err(Error::InvalidInput("nodal source does not match the mesh".into()));
    }
    let stepper = TimeStepper::new(spec.alpha, grid, ops)?;
    let load = &ops.mass * DVector::from_column_slice(f_nodal);
    let lam = spec.intensity.sample(&grid.times());
    let u = stepper.march(grid.n_steps, |k| if k == 0 { DVector::zeros(ni) } else { &load * lam[k] })?;
    let values = u
        .iter()
        .map(|v| {
            let mut row = Vec::with_capacity(ni + 2);
            row.push(0.0);
            row.extend(v.iter());
            row.push(0.0);
            row
        })
        .collect();
    let meta = SolutionMeta { n_cells: mesh.n_cells, n_steps: grid.n_steps, ..Default::default() };
    Ok(ForwardSolution { route: Route::Discrete, mesh: mesh.clone(), grid: *grid, values, meta })
}

/// Convenience: assemble, sample the source at the nodes and march.
pub fn solve_discrete(spec: &ProblemSpec, mesh: &SpatialMesh, grid: &TimeGrid) -> Result<ForwardSolution> {
    let ops = assemble_fractional_stiffness(spec.beta, mesh)?;
    time_march_discrete(spec, &ops, mesh, grid, &spec.source.interior(mesh))
}

/// How u_x(1, t) is read off the nodal field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxStencil {
    /// Derivative at x_N of the quadratic through the last three nodes.
    #[default]
    ThreePoint,
    /// (u_N - u_{N-1}) / (x_N - x_{N-1}).
    LastCell,
}

impl FluxStencil {
    /// Weights on (u_{N-2}, u_{N-1}, u_N).
    pub fn weights(&self, mesh: &SpatialMesh) -> (f64, f64, f64) {
        let n = mesh.n_cells;
        let (x0, x1, x2) = (mesh.nodes[n - 2], mesh.nodes[n - 1], mesh.nodes[n]);
        match self {
            FluxStencil::ThreePoint => (
                (x2 - x1) / ((x0 - x1) * (x0 - x2)),
                (x2 - x0) / ((x1 - x0) * (x1 - x2)),
                (2.0 * x2 - x0 - x1) / ((x2 - x0) * (x2 - x1)),
            ),
            FluxStencil::LastCell => (0.0, -1.0 / (x2 - x1), 1.0 / (x2 - x1)),
        }
    }

    /// Stencil as a vector over the interior nodes (u_N = 0).
    pub fn vector(&self, mesh: &SpatialMesh) -> DVector<f64> {
        let ni = mesh.n_interior();
        let (a, b, _) = self.weights(mesh);
        let mut c = DVector::zeros(ni);
        if ni >= 2 {
            c[ni - 2] = a;
        }
        c[ni - 1] += b;
        c
    }
}

pub fn observe_flux_discrete(sol: &ForwardSolution, mesh: &SpatialMesh) -> Result<ObservationTrace> {
    observe_flux_discrete_with(sol, mesh, FluxStencil::default())
}

pub fn observe_flux_discrete_with(
    sol: &ForwardSolution,
    mesh: &SpatialMesh,
    stencil: FluxStencil,
) -> Result<ObservationTrace> {
    if sol.mesh.nodes != mesh.nodes {
        return Err(Error::InvalidInput("solution is not on this mesh".into()));
    }
    let n = mesh.n_cells;
    let (a, b, c) = stencil.weights(mesh);
    let phi = sol.values.iter().map(|row| a * row[n - 2] + b * row[n - 1] + c * row[n]).collect();
    Ok(ObservationTrace::clean(sol.grid, phi))
}

/// Relative L2 distance of two traces on the same grid.
pub fn trace_difference(a: &ObservationTrace, b: &ObservationTrace) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::InvalidInput("traces live on different grids".into()));
    }
    let num: f64 = a.phi.iter().zip(&b.phi).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.phi.iter().map(|y| y * y).sum();
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_weights_sum_to_zero_in_the_limit() {
        // sum_j w_j = 0 for alpha > 0 (binomial series of (1-1)^alpha)
        let w = gl_weights(1.5, 20000);
        assert!(w.iter().sum::<f64>().abs() < 1e-5);
        assert_eq!(w[1], -1.5);
    }

    #[test]
    fn classical_stiffness_at_beta_two() {
        let mesh = SpatialMesh::uniform(5).unwrap();
        let ops = assemble_fractional_stiffness(2.0, &mesh).unwrap();
        let h = 0.2;
        for i in 0..4 {
            assert_relative_eq!(ops.stiffness[(i, i)], -2.0 / h, max_relative = 1e-13);
            if i + 1 < 4 {
                assert_relative_eq!(ops.stiffness[(i, i + 1)], 1.0 / h, max_relative = 1e-13);
                assert_relative_eq!(ops.stiffness[(i + 1, i)], 1.0 / h, max_relative = 1e-13);
            }
            if i + 2 < 4 {
                assert!(ops.stiffness[(i, i + 2)].abs() < 1e-13);
            }
        }
    }

    #[test]
    fn mass_rows_are_hat_masses() {
        let mesh = SpatialMesh::graded(7, 2.0).unwrap();
        let ops = assemble_fractional_stiffness(1.4, &mesh).unwrap();
        let w = mesh.lumped_weights();
        for (i, wi) in w.iter().enumerate().take(6) {
            let s: f64 = ops.mass.row(i).iter().sum();
            // rows of interior hats touching the boundary miss the boundary hat's share
            let missing = if i == 0 { mesh.nodes[1] / 6.0 } else { 0.0 }
                + if i == 5 { (mesh.nodes[7] - mesh.nodes[6]) / 6.0 } else { 0.0 };
            assert_relative_eq!(s + missing, *wi, max_relative = 1e-13);
        }
    }

    #[test]
    fn pow_diff_is_accurate() {
        assert_relative_eq!(pow_diff(1e6, 1.0, 0.5), (1e6f64 + 1.0).sqrt() - 1e3, max_relative = 1e-9);
        assert_relative_eq!(pow_diff(0.0, 2.0, 0.5), 2f64.sqrt());
    }

    #[test]
    fn duhamel_zero_time() {
        let v = duhamel_coefficient(1.5, C64::new(-5.0, 1.0), &Intensity::Exp2, 0.0, 1e-10).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn stencils_exact_for_linear_fields() {
        let mesh = SpatialMesh::graded(6, 3.0).unwrap();
        let grid = TimeGrid::new(1.0, 0.5).unwrap();
        let c = 2.5;
        let row: Vec<f64> = mesh.nodes.iter().map(|x| c * (1.0 - x)).collect();
        let sol = ForwardSolution {
            route: Route::Discrete,
            mesh: mesh.clone(),
            grid,
            values: vec![row.clone(), row.clone(), row],
            meta: SolutionMeta::default(),
        };
        for st in [FluxStencil::ThreePoint, FluxStencil::LastCell] {
            let tr = observe_flux_discrete_with(&sol, &mesh, st).unwrap();
            for v in tr.phi {
                assert_relative_eq!(v, -c, max_relative = 1e-12);
            }
        }
    }
}
