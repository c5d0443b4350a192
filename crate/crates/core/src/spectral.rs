//! Eigenvalues of the fractional Dirichlet problem (zeros of E_{beta,beta}),
//! eigenfunctions X_n, adjoint eigenfunctions Y_n and modal projections.
//!
//! Zeros are stored as representatives with Im >= 0, ordered by modulus. A
//! real zero is its own conjugate; a complex representative n also stands for
//! the mode -n with eigenvalue conj(lambda_n).

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlf::{reciprocal_gamma, MittagLeffler};
use crate::problem::Source;
use crate::quad::{graded_breaks, refine_until, weighted_rule, AdaptiveOptions};

pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroKind {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    /// Representative index n >= 1.
    pub index: usize,
    pub lambda: C64,
    pub kind: ZeroKind,
    /// <X_n, Y_n> = E_{beta,beta-1}(lambda) / (beta lambda).
    pub pairing: C64,
    /// E_{beta,beta-1}(lambda_n), the flux factor X_n'(1).
    pub deriv_at_lambda: C64,
    /// |E_{beta,beta}(lambda_n)|.
    pub residual: f64,
}

/// Argument-principle count on the circle |z| = radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub radius: f64,
    pub winding: i64,
    pub expected: i64,
    /// Zeros added by the tile search after the first count disagreed.
    pub recovered: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub beta: f64,
    pub zero_tol: f64,
    pub pairs: Vec<EigenPair>,
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    Primal,
    Adjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMethod {
    ClosedForm,
    Quadrature,
}

/// Modal coefficient for signed mode index n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModalCoeff {
    pub n: i64,
    pub value: C64,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// E_{beta,beta}.
    pub fn ml(&self) -> Result<MittagLeffler> {
        MittagLeffler::new(self.beta, self.beta)
    }

    pub fn pair(&self, n: i64) -> Result<&EigenPair> {
        let k = n.unsigned_abs() as usize;
        if n == 0 || k > self.pairs.len() {
            return Err(Error::InvalidInput(format!("mode {n} outside the computed system of {}", self.pairs.len())));
        }
        Ok(&self.pairs[k - 1])
    }

    pub fn lambda(&self, n: i64) -> Result<C64> {
        let l = self.pair(n)?.lambda;
        Ok(if n < 0 { l.conj() } else { l })
    }

    /// Distinct modes of the first `n_reps` representatives: +n, and -n for complex ones.
    pub fn modes(&self, n_reps: usize) -> Vec<i64> {
        let mut out = Vec::new();
        for p in self.pairs.iter().take(n_reps) {
            out.push(p.index as i64);
            if p.kind == ZeroKind::Complex {
                out.push(-(p.index as i64));
            }
        }
        out
    }

    /// Number of distinct zeros among the first `n_reps` representatives.
    pub fn zero_count(&self, n_reps: usize) -> usize {
        self.modes(n_reps).len()
    }

    /// Checks the relations of the eigenvalue lemma: sector, strict ordering,
    /// simple zeros. Returns the list of violations.
    pub fn lemma_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let b = self.beta;
        for p in &self.pairs {
            if b < 2.0 && !(p.lambda.arg().abs() > b * PI / 2.0) {
                v.push(format!("n={}: |arg lambda| = {} not above beta pi/2", p.index, p.lambda.arg().abs()));
            }
            if !(p.deriv_at_lambda.norm() > self.zero_tol) {
                v.push(format!("n={}: E_(beta,beta-1)(lambda) vanishes", p.index));
            }
            if !(p.residual <= self.zero_tol) {
                v.push(format!("n={}: residual {:e} above zero_tol", p.index, p.residual));
            }
        }
        for w in self.pairs.windows(2) {
            if !(w[1].lambda.norm() > w[0].lambda.norm()) {
                v.push(format!("moduli not increasing at n={}", w[1].index));
            }
        }
        v
    }

    pub fn to_json(&self) -> String {
        let doc = EigenDoc {
            beta: self.beta,
            zero_tol: self.zero_tol,
            pairs: self
                .pairs
                .iter()
                .map(|p| PairDoc {
                    n: p.index,
                    lambda_re: p.lambda.re,
                    lambda_im: p.lambda.im,
                    pairing_re: p.pairing.re,
                    pairing_im: p.pairing.im,
                    deriv_re: p.deriv_at_lambda.re,
                    deriv_im: p.deriv_at_lambda.im,
                    residual: p.residual,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("eigensystem serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: EigenDoc = serde_json::from_str(s).map_err(|e| Error::ParseError {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        let pairs = doc
            .pairs
            .into_iter()
            .map(|p| EigenPair {
                index: p.n,
                lambda: C64::new(p.lambda_re, p.lambda_im),
                kind: if p.lambda_im == 0.0 { ZeroKind::Real } else { ZeroKind::Complex },
                pairing: C64::new(p.pairing_re, p.pairing_im),
                deriv_at_lambda: C64::new(p.deriv_re, p.deriv_im),
                residual: p.residual,
            })
            .collect();
        Ok(EigenSystem { beta: doc.beta, zero_tol: doc.zero_tol, pairs, certificate: None })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

#[derive(Serialize, Deserialize)]
struct EigenDoc {
    beta: f64,
    zero_tol: f64,
    pairs: Vec<PairDoc>,
}

#[derive(Serialize, Deserialize)]
struct PairDoc {
    n: usize,
    lambda_re: f64,
    lambda_im: f64,
    pairing_re: f64,
    pairing_im: f64,
    deriv_re: f64,
    deriv_im: f64,
    residual: f64,
}

struct ZeroFinder {
    beta: f64,
    ml: MittagLeffler,
}

/// Polar rectangle r in [r0, r1], theta in [t0, t1].
#[derive(Clone, Copy, Debug)]
struct Tile {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
}

impl Tile {
    fn contains(&self, z: C64) -> bool {
        let r = z.norm();
        let mut a = z.arg();
        if a < self.t0 {
            a += 2.0 * PI;
        }
        r > self.r0 && r < self.r1 && a > self.t0 && a < self.t1
    }
}

impl ZeroFinder {
    fn f(&self, z: C64) -> Result<C64> {
        self.ml.eval(z)
    }

    fn newton(&self, z0: C64) -> Option<C64> {
        let mut z = z0;
        for _ in 0..NEWTON_MAX_ITER {
            let f = self.ml.eval(z).ok()?;
            let d = self.ml.deriv(z).ok()?;
            if d.norm() == 0.0 || !d.is_finite() {
                return None;
            }
            let mut step = f / d;
            // keep the iterate from jumping across several zeros
            let cap = 0.25 * z.norm().max(1.0);
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            z -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                return Some(z);
            }
        }
        // accept a converged iterate that stalled at rounding level
        let f = self.ml.eval(z).ok()?;
        let d = self.ml.deriv(z).ok()?;
        if (f / d).norm() <= 1e-12 * z.norm().max(1.0) {
            Some(z)
        } else {
            None
        }
    }

    /// Real zeros in [-rho_hi^beta, -rho_lo^beta] by a sign scan uniform in rho.
    fn real_zeros(&self, rho_lo: f64, rho_hi: f64, h: f64) -> Result<Vec<C64>> {
        let g = |rho: f64| -> Result<f64> { self.ml.eval_real(-rho.powf(self.beta)) };
        let mut out = Vec::new();
        let mut r0 = rho_lo;
        let mut g0 = g(r0)?;
        while r0 < rho_hi {
            let r1 = (r0 + h).min(rho_hi);
            let g1 = g(r1)?;
            if g0 == 0.0 {
                out.push(C64::new(-r0.powf(self.beta), 0.0));
            } else if g0 * g1 < 0.0 {
                let (mut a, mut b, mut ga) = (r0, r1, g0);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let gm = g(m)?;
                    if gm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if (gm < 0.0) == (ga < 0.0) {
                        a = m;
                        ga = gm;
                    } else {
                        b = m;
                    }
                }
                let x = -(0.5 * (a + b)).powf(self.beta);
                let z = self.newton(C64::new(x, 0.0)).unwrap_or(C64::new(x, 0.0));
                out.push(C64::new(z.re, 0.0));
            }
            r0 = r1;
            g0 = g1;
        }
        Ok(out)
    }

    /// Complex zeros from the balance (1/b) w^{1-b} e^w = z^{-2}/Gamma(-b), w = z^{1/b}.
    fn complex_candidates(&self, k_max: usize) -> Vec<C64> {
        let b = self.beta;
        let c = b * reciprocal_gamma(C64::new(-b, 0.0));
        if c.norm() == 0.0 {
            return Vec::new();
        }
        let lc = c.ln();
        let found: Vec<Option<C64>> = (1..=k_max)
            .into_par_iter()
            .map(|k| {
                let shift = C64::new(0.0, 2.0 * PI * k as f64);
                let mut w = lc + shift;
                for _ in 0..100 {
                    w = lc - (b + 1.0) * w.ln() + shift;
                }
                let z0 = (b * w.ln()).exp();
                let z0 = if z0.im < 0.0 { z0.conj() } else { z0 };
                self.newton(z0)
            })
            .collect();
        found.into_iter().flatten().collect()
    }

    /// Total change of arg f along a closed polyline-with-arcs path, in turns.
    fn winding(&self, path: &dyn Fn(f64) -> C64, n0: usize) -> Result<f64> {
        let mut total = 0.0;
        let mut s0 = 0.0;
        let mut f0 = self.f(path(0.0))?;
        for i in 1..=n0 {
            let s1 = i as f64 / n0 as f64;
            let f1 = self.f(path(s1))?;
            total += self.segment_arg(path, s0, s1, f0, f1, 0)?;
            s0 = s1;
            f0 = f1;
        }
        Ok(total / (2.0 * PI))
    }

    fn segment_arg(&self, path: &dyn Fn(f64) -> C64, s0: f64, s1: f64, f0: C64, f1: C64, depth: usize) -> Result<f64> {
        if f0.norm() == 0.0 || f1.norm() == 0.0 {
            return Err(Error::ZeroFindingFailed("contour passes through a zero".into()));
        }
        // difference of arguments; f1 / f0 would overflow for large |f|
        let mut d = f1.arg() - f0.arg();
        if d > PI {
            d -= 2.0 * PI;
        } else if d <= -PI {
            d += 2.0 * PI;
        }
        if d.abs() < PI / 4.0 {
            return Ok(d);
        }
        if depth > 40 {
            return Err(Error::ZeroFindingFailed("argument change unresolved on contour".into()));
        }
        let sm = 0.5 * (s0 + s1);
        let fm = self.f(path(sm))?;
        Ok(self.segment_arg(path, s0, sm, f0, fm, depth + 1)? + self.segment_arg(path, sm, s1, fm, f1, depth + 1)?)
    }

    fn circle_count(&self, radius: f64) -> Result<i64> {
        let rho = radius.powf(1.0 / self.beta);
        let n0 = 64 + (16.0 * rho) as usize;
        let path = |s: f64| C64::from_polar(radius, 2.0 * PI * s);
        let w = self.winding(&path, n0)?;
        let k = w.round();
        if (w - k).abs() > 0.05 {
            return Err(Error::ZeroFindingFailed(format!("non-integer winding {w} at radius {radius}")));
        }
        Ok(k as i64)
    }

    fn tile_count(&self, t: &Tile) -> Result<i64> {
        let rho = t.r1.powf(1.0 / self.beta);
        let n_edge = 16 + (8.0 * rho) as usize;
        // edges: ray t0 outward, arc r1, ray t1 inward, arc r0 back
        let path = |s: f64| -> C64 {
            let u = 4.0 * s;
            if u < 1.0 {
                C64::from_polar(t.r0 + (t.r1 - t.r0) * u, t.t0)
            } else if u < 2.0 {
                C64::from_polar(t.r1, t.t0 + (t.t1 - t.t0) * (u - 1.0))
            } else if u < 3.0 {
                C64::from_polar(t.r1 - (t.r1 - t.r0) * (u - 2.0), t.t1)
            } else {
                C64::from_polar(t.r0, t.t1 - (t.t1 - t.t0) * (u - 3.0).min(1.0))
            }
        };
        let w = self.winding(&path, 4 * n_edge)?;
        let k = w.round();
        if (w - k).abs() > 0.05 {
            return Err(Error::ZeroFindingFailed(format!("non-integer winding {w} on tile {t:?}")));
        }
        Ok(k as i64)
    }

    fn known_in(t: &Tile, known: &[C64]) -> i64 {
        let mut c = 0;
        for z in known {
            if t.contains(*z) {
                c += 1;
            }
            if z.im != 0.0 && t.contains(z.conj()) {
                c += 1;
            }
        }
        c
    }

    /// Recursively searches a tile whose winding count exceeds the known zeros.
    fn tile_search(&self, t: Tile, known: &mut Vec<C64>, depth: usize) -> Result<()> {
        let count = self.tile_count(&t)?;
        let have = Self::known_in(&t, known);
        if count == have {
            return Ok(());
        }
        if count < have {
            return Err(Error::ZeroFindingFailed(format!("tile {t:?} holds {count} zeros but {have} were located")));
        }
        if depth > 30 {
            return Err(Error::ZeroFindingFailed(format!("tile search exhausted near {t:?}")));
        }
        let center = C64::from_polar(0.5 * (t.r0 + t.r1), 0.5 * (t.t0 + t.t1));
        if let Some(z) = self.newton(center) {
            let z = normalize(z);
            if !known.iter().any(|k| same_zero(*k, z)) {
                known.push(z);
                return self.tile_search(t, known, depth + 1);
            }
        }
        // split slightly off-center so edges avoid symmetric zero positions
        let rm = t.r0 + 0.4937 * (t.r1 - t.r0);
        let tm = t.t0 + 0.5113 * (t.t1 - t.t0);
        for sub in [
            Tile { r0: t.r0, r1: rm, t0: t.t0, t1: tm },
            Tile { r0: rm, r1: t.r1, t0: t.t0, t1: tm },
            Tile { r0: t.r0, r1: rm, t0: tm, t1: t.t1 },
            Tile { r0: rm, r1: t.r1, t0: tm, t1: t.t1 },
        ] {
            self.tile_search(sub, known, depth + 1)?;
        }
        Ok(())
    }
}

fn normalize(z: C64) -> C64 {
    let z = if z.im < 0.0 { z.conj() } else { z };
    if z.im.abs() <= 1e-12 * z.norm() {
        C64::new(z.re, 0.0)
    } else {
        z
    }
}

fn same_zero(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-7 * a.norm().max(1.0)
}

fn multiplicity(z: C64) -> i64 {
    if z.im == 0.0 {
        1
    } else {
        2
    }
}

/// The first `n_modes` zeros of E_{beta,beta} in the closed upper half-plane,
/// ordered by modulus, with an argument-principle completeness certificate.
pub fn find_eigenvalues(beta: f64, n_modes: usize, zero_tol: f64) -> Result<EigenSystem> {
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(Error::InvalidInput(format!("beta = {beta} must lie in (1, 2]")));
    }
    if n_modes == 0 {
        return Err(Error::InvalidInput("n_modes must be at least 1".into()));
    }
    if !(zero_tol > 0.0) {
        return Err(Error::InvalidInput("zero_tol must be positive".into()));
    }
    let finder = ZeroFinder { beta, ml: MittagLeffler::new(beta, beta)? };
    // scan step in rho: the real-axis oscillation has period 2 pi / sin(pi / beta)
    let h = (0.05 * 2.0 * PI / (PI / beta).sin()).min(0.1);
    let mut zeros: Vec<C64> = Vec::new();
    let mut rho_done = 0.0;
    let mut rho_max: f64 = 8.0 * (n_modes as f64 + 2.0);
    let mut k_done = 0;
    loop {
        zeros.extend(finder.real_zeros(rho_done, rho_max, h)?);
        rho_done = rho_max;
        let k_max = (1.3 * rho_max / (2.0 * PI)) as usize + 2;
        if k_max > k_done {
            for z in finder.complex_candidates(k_max) {
                let z = normalize(z);
                if z.norm() > 0.0 && !zeros.iter().any(|k| same_zero(*k, z)) {
                    zeros.push(z);
                }
            }
            k_done = k_max;
        }
        dedupe(&mut zeros);
        let limit = rho_max.powf(beta);
        let inside = zeros.iter().filter(|z| z.norm() < limit).count();
        if inside > n_modes {
            break;
        }
        rho_max *= 1.5;
        if rho_max > 2000.0 {
            return Err(Error::ZeroFindingFailed(format!("could not locate {n_modes} zeros")));
        }
    }
    zeros.sort_by(|a, b| a.norm().total_cmp(&b.norm()));

    let mut recovered = 0;
    let mut certificate = None;
    for _attempt in 0..6 {
        zeros.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        let radius = 0.5 * (zeros[n_modes - 1].norm() + zeros[n_modes].norm());
        let expected: i64 = zeros.iter().filter(|z| z.norm() < radius).map(|z| multiplicity(*z)).sum();
        let winding = finder.circle_count(radius)?;
        if winding == expected {
            certificate = Some(Certificate { radius, winding, expected, recovered });
            break;
        }
        if winding < expected {
            return Err(Error::ZeroFindingFailed(format!(
                "winding count {winding} below the {expected} located zeros inside |z| = {radius}"
            )));
        }
        // tile the disc (upper half plus a sliver below the negative axis)
        let before = zeros.len();
        let n_ann = 8;
        let eps = 0.1;
        for i in 0..n_ann {
            let r0 = radius * (i as f64 / n_ann as f64).powf(beta.min(1.5));
            let r1 = radius * ((i + 1) as f64 / n_ann as f64).powf(beta.min(1.5));
            let t = Tile { r0: if i == 0 { 0.0 } else { r0 }, r1, t0: -eps, t1: PI + eps };
            finder.tile_search(t, &mut zeros, 0)?;
        }
        dedupe(&mut zeros);
        recovered += zeros.len().saturating_sub(before);
        if zeros.len() == before {
            return Err(Error::ZeroFindingFailed(format!(
                "winding count {winding} but only {expected} zeros located inside |z| = {radius}"
            )));
        }
    }
    let certificate =
        certificate.ok_or_else(|| Error::ZeroFindingFailed("completeness certificate did not settle".into()))?;

    let ml1 = MittagLeffler::new(beta, beta - 1.0)?;
    let mut pairs = Vec::with_capacity(n_modes);
    for (i, &z) in zeros.iter().take(n_modes).enumerate() {
        let e1 = ml1.eval(z)?;
        let residual = finder.ml.eval(z)?.norm();
        if residual > zero_tol {
            return Err(Error::ZeroFindingFailed(format!("zero {i} at {z} has residual {residual:e}")));
        }
        pairs.push(EigenPair {
            index: i + 1,
            lambda: z,
            kind: if z.im == 0.0 { ZeroKind::Real } else { ZeroKind::Complex },
            pairing: e1 / (beta * z),
            deriv_at_lambda: e1,
            residual,
        });
    }
    let sys = EigenSystem { beta, zero_tol, pairs, certificate: Some(certificate) };
    let bad = sys.lemma_violations();
    if !bad.is_empty() {
        return Err(Error::ZeroFindingFailed(bad.join("; ")));
    }
    Ok(sys)
}

fn dedupe(zeros: &mut Vec<C64>) {
    let mut out: Vec<C64> = Vec::with_capacity(zeros.len());
    for &z in zeros.iter() {
        if !out.iter().any(|k| same_zero(*k, z)) {
            out.push(z);
        }
    }
    *zeros = out;
}

/// Batch evaluator for X_n / Y_n.
pub struct Eigenfunctions {
    beta: f64,
    ml: MittagLeffler,
}

impl Eigenfunctions {
    pub fn new(system: &EigenSystem) -> Result<Self> {
        Ok(Eigenfunctions { beta: system.beta, ml: system.ml()? })
    }

    /// E_{beta,beta}(lambda x^beta), i.e. X_n(x) / x^{beta-1}.
    pub fn reduced(&self, lambda: C64, x: f64) -> Result<C64> {
        self.ml.eval(lambda * x.powf(self.beta))
    }

    pub fn primal(&self, lambda: C64, x: f64) -> Result<C64> {
        if x == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(x.powf(self.beta - 1.0) * self.reduced(lambda, x)?)
    }

    pub fn adjoint(&self, lambda: C64, x: f64) -> Result<C64> {
        if x == 1.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok((1.0 - x).powf(self.beta - 1.0) * self.reduced(lambda.conj(), 1.0 - x)?)
    }
}

/// X_n(x) = x^{beta-1} E(lambda_n x^beta) or Y_n(x) = (1-x)^{beta-1} E(conj lambda_n (1-x)^beta).
pub fn eval_eigenfunction(system: &EigenSystem, n: i64, kind: FunctionKind, x: f64) -> Result<C64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("x = {x} outside [0, 1]")));
    }
    let lambda = system.lambda(n)?;
    let ef = Eigenfunctions::new(system)?;
    match kind {
        FunctionKind::Primal => ef.primal(lambda, x),
        FunctionKind::Adjoint => ef.adjoint(lambda, x),
    }
}

fn pairing_opts() -> AdaptiveOptions {
    AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_level: 7 }
}

/// Matrix G[i][j] = <X_{modes[i]}, Y_{modes[j]}> = int_0^1 X_i conj(Y_j) dx (row-major).
pub fn pairing_matrix(system: &EigenSystem, modes: &[i64]) -> Result<Vec<C64>> {
    let beta = system.beta;
    let lambdas: Vec<C64> = modes.iter().map(|&n| system.lambda(n)).collect::<Result<_>>()?;
    let ml = system.ml()?;
    let m = modes.len();
    // X_i conj(Y_j) = x^{b-1} (1-x)^{b-1} E(l_i x^b) E(l_j (1-x)^b)
    refine_until(&pairing_opts(), |level| {
        let rule = weighted_rule(&graded_breaks(8 << level), 1, beta - 1.0, beta - 1.0);
        rule.par_chunks(64)
            .map(|chunk| -> Result<Vec<C64>> {
                let mut acc = vec![C64::new(0.0, 0.0); m * m];
                let mut p = vec![C64::new(0.0, 0.0); m];
                let mut q = vec![C64::new(0.0, 0.0); m];
                for &(x, w) in chunk {
                    let xb = x.powf(beta);
                    let yb = (1.0 - x).powf(beta);
                    for i in 0..m {
                        p[i] = ml.eval(lambdas[i] * xb)?;
                        q[i] = ml.eval(lambdas[i] * yb)?;
                    }
                    for i in 0..m {
                        let pw = p[i] * w;
                        for j in 0..m {
                            acc[i * m + j] += pw * q[j];
                        }
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
            .map(sum_in_order)
    })
}

/// Adds chunk partial sums in a fixed order so results do not depend on thread scheduling.
fn sum_in_order(parts: Vec<Vec<C64>>) -> Vec<C64> {
    let mut it = parts.into_iter();
    let mut acc = it.next().unwrap_or_default();
    for p in it {
        for (x, y) in acc.iter_mut().zip(p) {
            *x += y;
        }
    }
    acc
}

/// <X_n, Y_n> by the closed form E_{beta,beta-1}(lambda)/(beta lambda) or by quadrature.
pub fn mode_pairing(system: &EigenSystem, n: i64, method: PairingMethod) -> Result<C64> {
    let p = system.pair(n)?;
    match method {
        PairingMethod::ClosedForm => Ok(if n < 0 { p.pairing.conj() } else { p.pairing }),
        PairingMethod::Quadrature => Ok(pairing_matrix(system, &[n])?[0]),
    }
}

fn source_rule(source: &Source, level: usize, pr: f64) -> Vec<(f64, f64)> {
    match source.breakpoints() {
        Some(xs) => {
            let mut b: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect();
            b.insert(0, 0.0);
            b.push(1.0);
            weighted_rule(&b, 1 << level, 0.0, pr)
        }
        None => weighted_rule(&graded_breaks(8 << level), 1, 0.0, pr),
    }
}

/// f_n = <f, Y_n> / <X_n, Y_n> for the modes of the first `n_reps` representatives.
pub fn project_source(system: &EigenSystem, source: &Source, n_reps: usize) -> Result<Vec<ModalCoeff>> {
    if n_reps > system.len() {
        return Err(Error::InvalidInput(format!("{n_reps} modes requested from a system of {}", system.len())));
    }
    let beta = system.beta;
    let reps: Vec<i64> = (1..=n_reps as i64).collect();
    let lambdas: Vec<C64> = reps.iter().map(|&n| system.lambda(n)).collect::<Result<_>>()?;
    let ml = system.ml()?;
    let m = reps.len();
    // <f, Y_n> = int f(x) (1-x)^{b-1} E(lambda_n (1-x)^b) dx
    let inner = refine_until(&pairing_opts(), |level| {
        let rule = source_rule(source, level, beta - 1.0);
        rule.par_chunks(64)
            .map(|chunk| -> Result<Vec<C64>> {
                let mut acc = vec![C64::new(0.0, 0.0); m];
                for &(x, w) in chunk {
                    let fx = source.eval(x);
                    if fx == 0.0 {
                        continue;
                    }
                    let yb = (1.0 - x).powf(beta);
                    for i in 0..m {
                        acc[i] += w * fx * ml.eval(lambdas[i] * yb)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
            .map(sum_in_order)
    })?;
    let mut out = Vec::new();
    for (k, &n) in reps.iter().enumerate() {
        let p = system.pair(n)?;
        let mut fnv = inner[k] / p.pairing;
        if p.kind == ZeroKind::Real {
            fnv.im = 0.0;
        }
        out.push(ModalCoeff { n, value: fnv });
        if p.kind == ZeroKind::Complex {
            out.push(ModalCoeff { n: -n, value: fnv.conj() });
        }
    }
    Ok(out)
}

/// Partial sum sum_n f_n X_n(x) (real part).
pub fn modal_sum(system: &EigenSystem, coeffs: &[ModalCoeff], x: f64) -> Result<f64> {
    let ef = Eigenfunctions::new(system)?;
    let mut s = C64::new(0.0, 0.0);
    for c in coeffs {
        s += c.value * ef.primal(system.lambda(c.n)?, x)?;
    }
    Ok(s.re)
}

/// Admissible set U_{M,gamma}: |f_n| |n|^gamma <= M.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSourceConfig {
    pub m: f64,
    pub decay_exponent: f64,
}

impl AdmissibleSourceConfig {
    pub fn new(m: f64, decay_exponent: f64) -> Result<Self> {
        if !(m > 0.0) || !(decay_exponent >= 0.0) {
            return Err(Error::InvalidInput("admissible set needs M > 0 and gamma >= 0".into()));
        }
        Ok(AdmissibleSourceConfig { m, decay_exponent })
    }

    /// Largest |f_n| |n|^gamma / M over the coefficients; <= 1 means admissible.
    pub fn violation_ratio(&self, coeffs: &[ModalCoeff]) -> f64 {
        coeffs
            .iter()
            .map(|c| c.value.norm() * (c.n.unsigned_abs() as f64).powf(self.decay_exponent) / self.m)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classical_limit() {
        let sys = find_eigenvalues(2.0, 5, DEFAULT_ZERO_TOL).unwrap();
        for (i, p) in sys.pairs.iter().enumerate() {
            let n = (i + 1) as f64;
            assert_relative_eq!(p.lambda.re, -n * n * PI * PI, max_relative = 1e-12);
            assert_eq!(p.kind, ZeroKind::Real);
            let want = if i % 2 == 0 { 1.0 } else { -1.0 } / (2.0 * n * n * PI * PI);
            assert_relative_eq!(p.pairing.re, want, max_relative = 1e-10);
        }
        let x = eval_eigenfunction(&sys, 1, FunctionKind::Primal, 0.5).unwrap();
        assert_relative_eq!(x.re, 1.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let sys = find_eigenvalues(1.5, 4, DEFAULT_ZERO_TOL).unwrap();
        let back = EigenSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back.pairs, sys.pairs);
        assert!(matches!(EigenSystem::from_json("{\"beta\": 1.5,"), Err(Error::ParseError { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(find_eigenvalues(1.0, 3, 1e-10).is_err());
        assert!(find_eigenvalues(1.5, 0, 1e-10).is_err());
    }

    #[test]
    fn admissible_ratio() {
        let a = AdmissibleSourceConfig::new(2.0, 1.0).unwrap();
        let c = [ModalCoeff { n: 1, value: C64::new(1.0, 0.0) }, ModalCoeff { n: -3, value: C64::new(0.0, 1.0) }];
        assert_relative_eq!(a.violation_ratio(&c), 1.5);
        assert!(AdmissibleSourceConfig::new(0.0, 1.0).is_err());
    }
}
