//! Observation operator, noise, Tikhonov regularization and the modal
//! (bi-orthogonal) reconstruction.

use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::{assemble_fractional_stiffness, duhamel_on_grid, FluxStencil, TimeStepper};
use crate::problem::{Intensity, ObservationTrace, ProblemSpec, Provenance, SpatialMesh, TimeGrid};
use crate::spectral::{EigenSystem, Eigenfunctions, ModalCoeff, ZeroKind};

/// Dense map from interior nodal source values to the flux trace.
#[derive(Clone, Debug)]
pub struct ForwardMap {
    pub matrix: DMatrix<f64>,
    pub mesh: SpatialMesh,
    pub grid: TimeGrid,
    pub stencil: FluxStencil,
    /// Hash of the inputs that determine the matrix.
    pub key: String,
}

impl ForwardMap {
    /// Wraps an explicit matrix (columns must match the mesh interior).
    pub fn from_matrix(matrix: DMatrix<f64>, mesh: SpatialMesh, grid: TimeGrid) -> Result<Self> {
        if matrix.ncols() != mesh.n_interior() || matrix.nrows() != grid.n_steps + 1 {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                grid.n_steps + 1,
                mesh.n_interior()
            )));
        }
        Ok(ForwardMap { matrix, mesh, grid, stencil: FluxStencil::default(), key: String::new() })
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.matrix.ncols() {
            return Err(Error::InvalidInput("source vector does not match the map".into()));
        }
        Ok((&self.matrix * DVector::from_column_slice(f)).iter().copied().collect())
    }

    const MAGIC: &'static [u8; 8] = b"FSAMAP1\n";

    /// Binary cache: magic, key, rows, cols, column-major little-endian f64.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(96 + 8 * self.matrix.len());
        buf.extend_from_slice(Self::MAGIC);
        buf.extend_from_slice(self.key.as_bytes());
        buf.extend_from_slice(&(self.matrix.nrows() as u64).to_le_bytes());
        buf.extend_from_slice(&(self.matrix.ncols() as u64).to_le_bytes());
        for v in self.matrix.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        crate::experiment::write_atomic(path, &buf)
    }

    /// Loads a cached matrix; None if the file is absent or was built for other inputs.
    pub fn load(path: &Path, key: &str) -> Result<Option<DMatrix<f64>>> {
        let mut f = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        let mut buf = Vec::new();
        f.read_to_end(&mut buf).map_err(|e| Error::io(path, e))?;
        let head = 8 + key.len();
        if buf.len() < head + 16 || &buf[..8] != Self::MAGIC || &buf[8..head] != key.as_bytes() {
            return Ok(None);
        }
        let rows = u64::from_le_bytes(buf[head..head + 8].try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(buf[head + 8..head + 16].try_into().unwrap()) as usize;
        let data = &buf[head + 16..];
        if data.len() != 8 * rows * cols {
            return Ok(None);
        }
        let vals: Vec<f64> = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Some(DMatrix::from_vec(rows, cols, vals)))
    }
}

/// Hash of (alpha, beta, mesh, grid, intensity samples, stencil).
pub fn forward_map_key(spec: &ProblemSpec, mesh: &SpatialMesh, grid: &TimeGrid, stencil: FluxStencil) -> String {
    let mut h = Sha256::new();
    h.update(spec.alpha.to_le_bytes());
    h.update(spec.beta.to_le_bytes());
    for x in &mesh.nodes {
        h.update(x.to_le_bytes());
    }
    h.update((grid.n_steps as u64).to_le_bytes());
    h.update(grid.tau.to_le_bytes());
    for v in spec.intensity.sample(&grid.times()) {
        h.update(v.to_le_bytes());
    }
    h.update([stencil as u8]);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn build_forward_matrix(spec: &ProblemSpec, mesh: &SpatialMesh, grid: &TimeGrid) -> Result<ForwardMap> {
    build_forward_matrix_with(spec, mesh, grid, FluxStencil::default())
}

/// Row k of A is sum_{j<k} lambda(t_{k-j}) (M v_j)^T where v_j solves the
/// transposed stepping recursion started from the flux stencil. One march
/// gives every column at once.
pub fn build_forward_matrix_with(
    spec: &ProblemSpec,
    mesh: &SpatialMesh,
    grid: &TimeGrid,
    stencil: FluxStencil,
) -> Result<ForwardMap> {
    let ops = assemble_fractional_stiffness(spec.beta, mesh)?;
    let stepper = TimeStepper::new(spec.alpha, grid, &ops)?;
    let c = stencil.vector(mesh);
    let ni = mesh.n_interior();
    let v = stepper.march_transpose(grid.n_steps, |k| if k == 0 { c.clone() } else { DVector::zeros(ni) })?;
    let r: Vec<DVector<f64>> = v.par_iter().map(|vj| &ops.mass * vj).collect();
    let lam = spec.intensity.sample(&grid.times());
    let kk = grid.n_steps;
    let rows: Vec<Vec<f64>> = (0..=kk)
        .into_par_iter()
        .map(|k| {
            let mut row = vec![0.0; ni];
            for j in 0..k {
                let l = lam[k - j];
                for (a, b) in row.iter_mut().zip(r[j].iter()) {
                    *a += l * b;
                }
            }
            row
        })
        .collect();
    let matrix = DMatrix::from_fn(kk + 1, ni, |i, j| rows[i][j]);
    let key = forward_map_key(spec, mesh, grid, stencil);
    Ok(ForwardMap { matrix, mesh: mesh.clone(), grid: *grid, stencil, key })
}

/// As `build_forward_matrix_with`, reusing `<dir>/A-<key>.bin` when present.
pub fn build_forward_matrix_cached(
    spec: &ProblemSpec,
    mesh: &SpatialMesh,
    grid: &TimeGrid,
    stencil: FluxStencil,
    dir: &Path,
) -> Result<ForwardMap> {
    let key = forward_map_key(spec, mesh, grid, stencil);
    let path = dir.join(format!("A-{}.bin", &key[..16]));
    if let Some(matrix) = ForwardMap::load(&path, &key)? {
        return Ok(ForwardMap { matrix, mesh: mesh.clone(), grid: *grid, stencil, key });
    }
    let map = build_forward_matrix_with(spec, mesh, grid, stencil)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    map.save(&path)?;
    Ok(map)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// z_k (1 + eta_k)
    #[default]
    Relative,
    /// z_k + eta_k max|z|
    Absolute,
}

/// Multiplicative uniform noise on [-delta, delta] from a seeded ChaCha8 stream.
pub fn add_noise(trace: &ObservationTrace, delta: f64, seed: u64) -> Result<ObservationTrace> {
    add_noise_with(trace, delta, seed, NoiseModel::Relative)
}

pub fn add_noise_with(trace: &ObservationTrace, delta: f64, seed: u64, model: NoiseModel) -> Result<ObservationTrace> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("delta = {delta} must be non-negative")));
    }
    if delta == 0.0 {
        return Ok(trace.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = trace.phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let phi = trace
        .phi
        .iter()
        .map(|&z| {
            let eta: f64 = rng.gen_range(-delta..=delta);
            match model {
                NoiseModel::Relative => z * (1.0 + eta),
                NoiseModel::Absolute => z + eta * scale,
            }
        })
        .collect();
    Ok(ObservationTrace { grid: trace.grid, phi, provenance: Provenance::Noisy { delta, seed } })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuChoice {
    Fixed(f64),
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TikhonovConfig {
    pub nu: NuChoice,
    pub nu_min: f64,
    pub nu_max: f64,
    pub nu_count: usize,
    /// Noise level assumed by the discrepancy rule.
    pub delta_estimate: f64,
    pub margin: f64,
    /// Noise norm bound = factor * delta * ||z||. 1 is the worst case of bounded relative noise;
    /// 1/sqrt(3) (the RMS of uniform noise) leaves no slack and under-regularizes on some seeds.
    pub noise_norm_factor: f64,
}

impl Default for TikhonovConfig {
    fn default() -> Self {
        TikhonovConfig {
            nu: NuChoice::Auto,
            nu_min: 1e-12,
            nu_max: 1e-2,
            nu_count: 40,
            delta_estimate: 0.0,
            margin: 1.01,
            noise_norm_factor: 1.0,
        }
    }
}

impl TikhonovConfig {
    pub fn fixed(nu: f64) -> Self {
        TikhonovConfig { nu: NuChoice::Fixed(nu), ..Default::default() }
    }

    pub fn auto(delta_estimate: f64) -> Self {
        TikhonovConfig { delta_estimate, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if let NuChoice::Fixed(nu) = self.nu {
            if !(nu > 0.0) {
                return Err(Error::InvalidInput(format!("nu = {nu} must be positive")));
            }
        }
        if !(self.nu_min > 0.0 && self.nu_max > self.nu_min && self.nu_count >= 2) {
            return Err(Error::InvalidInput("nu grid needs 0 < nu_min < nu_max and at least two points".into()));
        }
        if !(self.delta_estimate >= 0.0) {
            return Err(Error::InvalidInput("delta_estimate must be non-negative".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (self.nu_min.ln(), self.nu_max.ln());
        let last = self.nu_count - 1;
        // endpoints exact, so a saturated choice reports nu_max itself
        (0..self.nu_count)
            .map(|i| match i {
                0 => self.nu_min,
                i if i == last => self.nu_max,
                i => (a + (b - a) * i as f64 / last as f64).exp(),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tikhonov,
    SpectralModes,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub method: Method,
    /// Interior mesh nodes.
    pub x: Vec<f64>,
    pub f_hat: Vec<f64>,
    #[serde(skip)]
    pub modal: Option<Vec<ModalCoeff>>,
    pub nu_used: Option<f64>,
    pub residual_norm: f64,
    pub error_vs_truth: Option<f64>,
    pub imag_residue: f64,
    pub n_modes_used: Option<usize>,
}

impl ReconstructionResult {
    /// Records the relative lumped-L2 error against nodal truth values.
    pub fn record_error(&mut self, mesh: &SpatialMesh, f_true: &[f64]) -> Result<f64> {
        let e = relative_error(mesh, &self.f_hat, f_true)?;
        self.error_vs_truth = Some(e);
        Ok(e)
    }
}

/// sqrt(sum w_i (a_i - b_i)^2 / sum w_i b_i^2) over interior nodes, w the lumped masses.
pub fn relative_error(mesh: &SpatialMesh, f_hat: &[f64], f_true: &[f64]) -> Result<f64> {
    let w = mesh.lumped_weights();
    if f_hat.len() != w.len() || f_true.len() != w.len() {
        return Err(Error::InvalidInput("vectors do not match the mesh interior".into()));
    }
    let num: f64 = w.iter().zip(f_hat.iter().zip(f_true)).map(|(w, (a, b))| w * (a - b).powi(2)).sum();
    let den: f64 = w.iter().zip(f_true).map(|(w, b)| w * b * b).sum();
    if den == 0.0 {
        return Err(Error::InvalidInput("reference source vanishes".into()));
    }
    Ok((num / den).sqrt())
}

fn check_dims(map: &ForwardMap, z: &ObservationTrace) -> Result<()> {
    if z.phi.len() != map.matrix.nrows() {
        return Err(Error::InvalidInput(format!(
            "trace has {} samples, map expects {}",
            z.phi.len(),
            map.matrix.nrows()
        )));
    }
    Ok(())
}

/// Thin SVD of A with the data projected on the left singular vectors.
struct Spectrum {
    sigma: Vec<f64>,
    v: DMatrix<f64>,
    beta: Vec<f64>,
    /// ||z||^2 - ||U^T z||^2, the part of z outside range(A).
    outside: f64,
    z_norm: f64,
}

impl Spectrum {
    fn new(a: &DMatrix<f64>, z: &[f64]) -> Result<Self> {
        let svd = a.clone().svd(true, true);
        let u = svd.u.ok_or_else(|| Error::SingularSystem("SVD failed".into()))?;
        let v = svd.v_t.ok_or_else(|| Error::SingularSystem("SVD failed".into()))?.transpose();
        let zv = DVector::from_column_slice(z);
        let beta: Vec<f64> = (u.transpose() * &zv).iter().copied().collect();
        let z2 = zv.norm_squared();
        let outside = (z2 - beta.iter().map(|b| b * b).sum::<f64>()).max(0.0);
        Ok(Spectrum { sigma: svd.singular_values.iter().copied().collect(), v, beta, outside, z_norm: z2.sqrt() })
    }

    /// (residual norm, solution norm) of the Tikhonov solution for nu.
    fn curve(&self, nu: f64) -> (f64, f64) {
        let (mut r2, mut s2) = (self.outside, 0.0);
        for (s, b) in self.sigma.iter().zip(&self.beta) {
            let d = s * s + nu;
            r2 += (nu / d * b).powi(2);
            s2 += (s / d * b).powi(2);
        }
        (r2.sqrt(), s2.sqrt())
    }

    fn solution(&self, nu: f64) -> DVector<f64> {
        let coef: Vec<f64> = self.sigma.iter().zip(&self.beta).map(|(s, b)| s / (s * s + nu) * b).collect();
        &self.v * DVector::from_vec(coef)
    }
}

/// nu by the discrepancy principle (largest grid nu with residual within
/// margin * factor * delta * ||z||); for delta = 0 the grid minimum when z is
/// already matched there, otherwise the L-curve corner.
pub fn choose_nu(map: &ForwardMap, z: &ObservationTrace, config: &TikhonovConfig) -> Result<f64> {
    config.validate()?;
    check_dims(map, z)?;
    let sp = Spectrum::new(&map.matrix, &z.phi)?;
    choose_nu_from(&sp, config)
}

fn choose_nu_from(sp: &Spectrum, config: &TikhonovConfig) -> Result<f64> {
    let grid = config.grid();
    let pts: Vec<(f64, f64)> = grid.iter().map(|&nu| sp.curve(nu)).collect();
    if sp.z_norm == 0.0 {
        return Ok(grid[0]);
    }
    if config.delta_estimate > 0.0 {
        let bound = config.margin * config.noise_norm_factor * config.delta_estimate * sp.z_norm;
        return grid.iter().zip(&pts).rev().find(|(_, (r, _))| *r <= bound).map(|(nu, _)| *nu).ok_or_else(|| {
            Error::SelectionFailed(format!(
                "no nu in [{:e}, {:e}] meets the discrepancy bound {:e} (smallest residual {:e})",
                config.nu_min, config.nu_max, bound, pts[0].0
            ))
        });
    }
    if pts[0].0 <= 1e-8 * sp.z_norm {
        return Ok(grid[0]);
    }
    // L-curve: maximum signed curvature of (log residual, log norm) over log nu
    let lx: Vec<f64> = pts.iter().map(|p| p.0.max(1e-300).ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.max(1e-300).ln()).collect();
    let mut best: Option<(usize, f64)> = None;
    for i in 1..grid.len() - 1 {
        let (dx, dy) = (0.5 * (lx[i + 1] - lx[i - 1]), 0.5 * (ly[i + 1] - ly[i - 1]));
        let (ddx, ddy) = (lx[i + 1] - 2.0 * lx[i] + lx[i - 1], ly[i + 1] - 2.0 * ly[i] + ly[i - 1]);
        let den = (dx * dx + dy * dy).powf(1.5);
        if den == 0.0 {
            continue;
        }
        let k = (dx * ddy - dy * ddx) / den;
        if k.is_finite() && best.is_none_or(|(_, b)| k > b) {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| grid[i]).ok_or_else(|| Error::SelectionFailed("L-curve has no corner on the grid".into()))
}

/// f = (A^T A + nu I)^{-1} A^T z by Cholesky.
pub fn tikhonov_solve(map: &ForwardMap, z: &ObservationTrace, config: &TikhonovConfig) -> Result<ReconstructionResult> {
    config.validate()?;
    check_dims(map, z)?;
    let a = &map.matrix;
    let sp = Spectrum::new(a, &z.phi)?;
    let nu = match config.nu {
        NuChoice::Fixed(nu) => nu,
        NuChoice::Auto => choose_nu_from(&sp, config)?,
    };
    let smax = sp.sigma.iter().fold(0.0f64, |m, s| m.max(*s));
    let smin = if a.ncols() > a.nrows() { 0.0 } else { sp.sigma.iter().fold(f64::INFINITY, |m, s| m.min(*s)) };
    let cond = (smax * smax + nu) / (smin * smin + nu);
    if !(cond < 1.0 / f64::EPSILON) {
        return Err(Error::IllConditioned { cond });
    }
    let zv = DVector::from_column_slice(&z.phi);
    let atz = a.transpose() * &zv;
    let mut normal = a.transpose() * a;
    for i in 0..normal.nrows() {
        normal[(i, i)] += nu;
    }
    let f = match normal.clone().cholesky() {
        Some(ch) => ch.solve(&atz),
        // rounding can spoil positivity when nu is tiny; the SVD form is equivalent
        None => sp.solution(nu),
    };
    let residual_norm = (a * &f - zv).norm();
    Ok(ReconstructionResult {
        method: Method::Tikhonov,
        x: map.mesh.interior().to_vec(),
        f_hat: f.iter().copied().collect(),
        modal: None,
        nu_used: Some(nu),
        residual_norm,
        error_vs_truth: None,
        imag_residue: 0.0,
        n_modes_used: None,
    })
}

/// Lower-triangular trapezoid discretization of (K phi)(t) = int_0^t lambda(t-s) phi(s) ds
/// on the grid nodes t_0..t_n of [0, 1]. Row 0 vanishes.
#[derive(Clone, Debug)]
pub struct TimeConvolutionOperator {
    pub matrix: DMatrix<f64>,
    pub grid: TimeGrid,
}

impl TimeConvolutionOperator {
    /// (K phi)(t_k) for phi sampled at t_0..t_n.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(phi)).iter().copied().collect()
    }

    /// The block acting on t_1..t_n; exact for functions vanishing at t = 0
    /// and invertible when lambda(0) != 0.
    pub fn interior(&self) -> DMatrix<f64> {
        let n = self.grid.n_steps;
        self.matrix.view((1, 1), (n, n)).into_owned()
    }

    /// Trapezoid weights of t_1..t_n (t_0 carries no mass for functions vanishing there).
    pub fn weights(&self) -> Vec<f64> {
        let n = self.grid.n_steps;
        (1..=n).map(|k| if k == n { 0.5 * self.grid.tau } else { self.grid.tau }).collect()
    }
}

/// Grid restricted to [0, 1] (requires T >= 1).
pub fn unit_grid(grid: &TimeGrid) -> Result<TimeGrid> {
    let n = (1.0 / grid.tau).round() as usize;
    if (n as f64 * grid.tau - 1.0).abs() > 1e-9 || n > grid.n_steps {
        return Err(Error::InvalidInput(format!(
            "grid with tau = {} and T = {} does not contain [0, 1]",
            grid.tau,
            grid.t_final()
        )));
    }
    Ok(TimeGrid { n_steps: n, tau: grid.tau })
}

pub fn build_time_convolution(intensity: &Intensity, grid: &TimeGrid) -> Result<TimeConvolutionOperator> {
    let g = unit_grid(grid)?;
    let lam = intensity.sample(&g.times());
    let lmax = lam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(lam[0].abs() > 1e-10 * lmax.max(f64::MIN_POSITIVE)) {
        return Err(Error::SingularIntensity(lam[0]));
    }
    let n = g.n_steps;
    let tau = g.tau;
    // row k, column j <= k: tau lambda(t_k - t_j), halved at j = 0 and j = k
    let matrix = DMatrix::from_fn(n + 1, n + 1, |k, j| {
        if k == 0 || j > k {
            0.0
        } else if j == k || j == 0 {
            0.5 * tau * lam[k - j]
        } else {
            tau * lam[k - j]
        }
    });
    Ok(TimeConvolutionOperator { matrix, grid: g })
}

/// Modal reconstruction for alpha = beta: Z_n solves the weighted adjoint
/// system K^T W Z_n = W Y_n with Y_n(t) = conj X_n(1 - t), then
/// f_n = <phi, Z_n> / (<X_n, Y_n> E_{alpha,alpha-1}(lambda_n)).
///
/// The continuous pairing is replaced by its discrete counterpart: with
/// c_m = K X_m (the exact Duhamel coefficient) and D_nm = <c_m, Z_n>, the
/// products a_m = f_m E_{alpha,alpha-1}(lambda_m) solve D a = (<phi, Z_n>)_n.
/// D tends to diag <X_n, Y_n> as tau -> 0, but unlike the pairing it stays
/// consistent with the trapezoid discretization when <X_n, Y_n> is tiny.
/// Modes whose denominator |<X_n, Y_n> E_{alpha,alpha-1}(lambda_n)| falls
/// below delta ||phi|| are dropped.
pub fn reconstruct_modes(
    spec: &ProblemSpec,
    phi: &ObservationTrace,
    system: &EigenSystem,
    k: &TimeConvolutionOperator,
    n_modes: usize,
    delta: f64,
    mesh: &SpatialMesh,
) -> Result<ReconstructionResult> {
    if (spec.alpha - spec.beta).abs() > 1e-12 {
        return Err(Error::OrderMismatch { alpha: spec.alpha, beta: spec.beta });
    }
    if (system.beta - spec.beta).abs() > 1e-14 {
        return Err(Error::InvalidInput("eigensystem order differs from the problem".into()));
    }
    if n_modes > system.len() {
        return Err(Error::InvalidInput(format!("{n_modes} modes requested from a system of {}", system.len())));
    }
    let n = k.grid.n_steps;
    if phi.grid.tau != k.grid.tau || phi.phi.len() < n + 1 {
        return Err(Error::InvalidInput("trace grid does not match the convolution operator".into()));
    }
    let data = &phi.phi[1..=n];
    let w = k.weights();
    let phi_norm = data.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
    let ef = Eigenfunctions::new(system)?;
    let times: Vec<f64> = (1..=n).map(|j| k.grid.t(j)).collect();
    let kin = k.interior();
    let kt = kin.transpose();

    let lam = spec.intensity.sample(&k.grid.times());
    // kept modes (conjugates included), their Z_n and c_n = K X_n on t_1..t_n
    let mut modes: Vec<(i64, C64)> = Vec::new();
    let mut zs: Vec<Vec<C64>> = Vec::new();
    let mut cs: Vec<Vec<C64>> = Vec::new();
    let mut used = 0;
    for rep in 1..=n_modes as i64 {
        let p = system.pair(rep)?;
        let denom = p.pairing * p.deriv_at_lambda;
        if delta > 0.0 && denom.norm() < delta * phi_norm {
            break;
        }
        used = rep as usize;
        let y: Vec<C64> = times.iter().map(|&t| ef.adjoint(p.lambda, t)).collect::<Result<_>>()?;
        let solve = |b: Vec<f64>| -> Result<Vec<f64>> {
            let z = kt
                .solve_upper_triangular(&DVector::from_vec(b))
                .ok_or_else(|| Error::SingularIntensity(2.0 * kin[(0, 0)] / k.grid.tau))?;
            Ok(z.iter().zip(&w).map(|(v, w)| v / w).collect())
        };
        let zr = solve(y.iter().zip(&w).map(|(v, w)| w * v.re).collect())?;
        let zi = solve(y.iter().zip(&w).map(|(v, w)| w * v.im).collect())?;
        let z: Vec<C64> = zr.iter().zip(&zi).map(|(a, b)| C64::new(*a, *b)).collect();
        let c: Vec<C64> = duhamel_on_grid(spec.alpha, p.lambda, &lam, &k.grid)?[1..].to_vec();
        modes.push((rep, p.deriv_at_lambda));
        if p.kind == ZeroKind::Complex {
            modes.push((-rep, p.deriv_at_lambda.conj()));
            zs.push(z.clone());
            cs.push(c.clone());
            zs.push(z.iter().map(|v| v.conj()).collect());
            cs.push(c.iter().map(|v| v.conj()).collect());
        } else {
            zs.push(z);
            cs.push(c);
        }
    }
    // <u, v>_W = sum w u conj(v)
    let ip = |u: &dyn Fn(usize) -> C64, v: &[C64]| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += w[j] * u(j) * v[j].conj();
        }
        acc
    };
    let m = modes.len();
    let mut coeffs = Vec::with_capacity(m);
    if m > 0 {
        let d = DMatrix::from_fn(m, m, |i, j| ip(&|t| cs[j][t], &zs[i]));
        let b = DVector::from_fn(m, |i, _| ip(&|t| C64::new(data[t], 0.0), &zs[i]));
        let a =
            d.lu().solve(&b).ok_or_else(|| Error::SingularSystem("discrete modal Gram matrix is singular".into()))?;
        let mut i = 0;
        while i < m {
            let (rep, deriv) = modes[i];
            let mut fnv = a[i] / deriv;
            if i + 1 < m && modes[i + 1].0 == -rep {
                // symmetrize the conjugate pair
                fnv = 0.5 * (fnv + (a[i + 1] / modes[i + 1].1).conj());
                coeffs.push(ModalCoeff { n: rep, value: fnv });
                coeffs.push(ModalCoeff { n: -rep, value: fnv.conj() });
                i += 2;
            } else {
                fnv.im = 0.0;
                coeffs.push(ModalCoeff { n: rep, value: fnv });
                i += 1;
            }
        }
    }

    let x = mesh.interior().to_vec();
    let mut f_hat = Vec::with_capacity(x.len());
    let mut im_max: f64 = 0.0;
    let mut re_max: f64 = 0.0;
    for &xi in &x {
        let mut s = C64::new(0.0, 0.0);
        for c in &coeffs {
            s += c.value * ef.primal(system.lambda(c.n)?, xi)?;
        }
        im_max = im_max.max(s.im.abs());
        re_max = re_max.max(s.re.abs());
        f_hat.push(s.re);
    }

    // residual of the modal model: K sum f_n E'(lambda_n) X_n(t) against the data
    let mut model = vec![0.0; n];
    for c in &coeffs {
        let p = system.pair(c.n)?;
        let d = if c.n < 0 { p.deriv_at_lambda.conj() } else { p.deriv_at_lambda };
        let l = system.lambda(c.n)?;
        for (m, &t) in model.iter_mut().zip(&times) {
            *m += (c.value * d * ef.primal(l, t)?).re;
        }
    }
    let kphi: Vec<f64> = (&kin * DVector::from_vec(model)).iter().copied().collect();
    let residual_norm = kphi.iter().zip(data).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();

    Ok(ReconstructionResult {
        method: Method::SpectralModes,
        x,
        f_hat,
        modal: Some(coeffs),
        nu_used: None,
        residual_norm,
        error_vs_truth: None,
        imag_residue: if re_max > 0.0 { im_max / re_max } else { 0.0 },
        n_modes_used: Some(used),
    })
}

/// Writes `x, f_true, f_hat...` rows.
pub fn reconstruction_csv(x: &[f64], f_true: &[f64], columns: &[(&str, &[f64])]) -> String {
    let mut s = String::from("x,f_true");
    for (name, _) in columns {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for i in 0..x.len() {
        s.push_str(&format!("{},{}", x[i], f_true[i]));
        for (_, col) in columns {
            s.push_str(&format!(",{}", col[i]));
        }
        s.push('\n');
    }
    s
}
