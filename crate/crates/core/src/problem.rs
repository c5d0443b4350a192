//! Problem data shared by the forward and inverse solvers.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Piecewise-linear interpolant through sorted samples; constant outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidInput("samples need matching lengths and at least two points".into()));
        }
        if !x.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("sample abscissae must be strictly increasing".into()));
        }
        if !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("samples must be finite".into()));
        }
        Ok(Samples { x, y })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (x, y) = (&self.x, &self.y);
        if t <= x[0] {
            return y[0];
        }
        if t >= x[x.len() - 1] {
            return y[y.len() - 1];
        }
        let i = x.partition_point(|&v| v <= t) - 1;
        let s = (t - x[i]) / (x[i + 1] - x[i]);
        y[i] + s * (y[i + 1] - y[i])
    }
}

/// Time intensity lambda(t).
#[derive(Clone)]
pub enum Intensity {
    /// 2 e^t
    Exp2,
    /// 5 sin t
    Sin5,
    Constant(f64),
    Samples(Samples),
    Func(RealFn),
}

impl Intensity {
    pub fn func(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Intensity::Func(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Intensity::Exp2 => 2.0 * t.exp(),
            Intensity::Sin5 => 5.0 * t.sin(),
            Intensity::Constant(c) => *c,
            Intensity::Samples(s) => s.eval(t),
            Intensity::Func(f) => f(t),
        }
    }

    pub fn sample(&self, t: &[f64]) -> Vec<f64> {
        t.iter().map(|&t| self.eval(t)).collect()
    }
}

impl fmt::Debug for Intensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intensity::Exp2 => write!(f, "Exp2"),
            Intensity::Sin5 => write!(f, "Sin5"),
            Intensity::Constant(c) => write!(f, "Constant({c})"),
            Intensity::Samples(s) => write!(f, "Samples({} points)", s.x.len()),
            Intensity::Func(_) => write!(f, "Func"),
        }
    }
}

/// Spatial source f(x).
#[derive(Clone)]
pub enum Source {
    Zero,
    /// x (1 - x)
    Poly1,
    /// x^2 (1 - x)
    Poly2,
    /// x^4 (1 - x)
    Poly4,
    Samples(Samples),
    Func(RealFn),
}

impl Source {
    pub fn func(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Source::Func(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Poly1 => x * (1.0 - x),
            Source::Poly2 => x * x * (1.0 - x),
            Source::Poly4 => x.powi(4) * (1.0 - x),
            Source::Samples(s) => s.eval(x),
            Source::Func(f) => f(x),
        }
    }

    /// Values at the interior nodes of a mesh.
    pub fn interior(&self, mesh: &SpatialMesh) -> Vec<f64> {
        mesh.interior().iter().map(|&x| self.eval(x)).collect()
    }

    /// Breakpoints where the source may have kinks.
    pub fn breakpoints(&self) -> Option<&[f64]> {
        match self {
            Source::Samples(s) => Some(&s.x),
            _ => None,
        }
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => write!(f, "Zero"),
            Source::Poly1 => write!(f, "Poly1"),
            Source::Poly2 => write!(f, "Poly2"),
            Source::Poly4 => write!(f, "Poly4"),
            Source::Samples(s) => write!(f, "Samples({} points)", s.x.len()),
            Source::Func(_) => write!(f, "Func"),
        }
    }
}

/// Orders, horizon and data of the initial-boundary value problem.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub beta: f64,
    pub t_final: f64,
    pub intensity: Intensity,
    pub source: Source,
}

impl ProblemSpec {
    pub fn new(alpha: f64, beta: f64, t_final: f64, intensity: Intensity, source: Source) -> Result<Self> {
        let mut bad = Vec::new();
        if !(alpha > 1.0 && alpha <= 2.0) {
            bad.push(format!("alpha = {alpha} must lie in (1, 2]"));
        }
        if !(beta > 1.0 && beta <= 2.0) {
            bad.push(format!("beta = {beta} must lie in (1, 2]"));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            bad.push(format!("T = {t_final} must be positive"));
        }
        if !bad.is_empty() {
            return Err(Error::ValidationError(bad));
        }
        Ok(ProblemSpec { alpha, beta, t_final, intensity, source })
    }

    pub fn with_source(&self, source: Source) -> Self {
        ProblemSpec { source, ..self.clone() }
    }
}

/// Nodes x_i = (i/N)^g on [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialMesh {
    pub n_cells: usize,
    pub grading: f64,
    pub nodes: Vec<f64>,
}

impl SpatialMesh {
    pub fn graded(n_cells: usize, grading: f64) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidInput("mesh needs at least two cells".into()));
        }
        if !(grading >= 1.0) {
            return Err(Error::InvalidInput(format!("grading exponent {grading} must be >= 1")));
        }
        let nodes = (0..=n_cells).map(|i| (i as f64 / n_cells as f64).powf(grading)).collect();
        Ok(SpatialMesh { n_cells, grading, nodes })
    }

    pub fn uniform(n_cells: usize) -> Result<Self> {
        Self::graded(n_cells, 1.0)
    }

    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.n_cells]
    }

    pub fn n_interior(&self) -> usize {
        self.n_cells - 1
    }

    /// Lumped mass weights (x_{i+1} - x_{i-1}) / 2 of the interior nodes.
    pub fn lumped_weights(&self) -> Vec<f64> {
        self.nodes.windows(3).map(|w| 0.5 * (w[2] - w[0])).collect()
    }
}

/// Uniform grid t_k = k tau, k = 0..=n_steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub n_steps: usize,
    pub tau: f64,
}

impl TimeGrid {
    pub fn new(t_final: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && t_final > 0.0) {
            return Err(Error::InvalidInput("time step and horizon must be positive".into()));
        }
        let n = (t_final / tau).round();
        if (n * tau - t_final).abs() > 1e-9 * t_final {
            return Err(Error::InvalidInput(format!("tau = {tau} does not divide T = {t_final}")));
        }
        Ok(TimeGrid { n_steps: n as usize, tau })
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.tau
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.t(k)).collect()
    }

    pub fn t_final(&self) -> f64 {
        self.n_steps as f64 * self.tau
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Clean,
    Noisy { delta: f64, seed: u64 },
}

/// Flux samples phi(t_k) = u_x(1, t_k).
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationTrace {
    pub grid: TimeGrid,
    pub phi: Vec<f64>,
    pub provenance: Provenance,
}

impl ObservationTrace {
    pub fn clean(grid: TimeGrid, phi: Vec<f64>) -> Self {
        ObservationTrace { grid, phi, provenance: Provenance::Clean }
    }

    /// Every `ratio`-th sample, on the grid with step ratio * tau.
    pub fn subsample(&self, ratio: usize) -> Result<Self> {
        if ratio == 0 || !self.grid.n_steps.is_multiple_of(ratio) {
            return Err(Error::InvalidInput(format!("cannot subsample {} steps by {ratio}", self.grid.n_steps)));
        }
        let grid = TimeGrid { n_steps: self.grid.n_steps / ratio, tau: self.grid.tau * ratio as f64 };
        let phi = self.phi.iter().step_by(ratio).copied().collect();
        Ok(ObservationTrace { grid, phi, provenance: self.provenance })
    }

    pub fn norm(&self) -> f64 {
        self.phi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
