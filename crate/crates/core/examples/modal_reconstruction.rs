//! Modal source recovery for alpha = beta: synthetic data from three
//! eigenfunctions, then reconstruct the coefficients.

use fracsource::forward::observe_flux_spectral;
use fracsource::inverse::{build_time_convolution, reconstruct_modes};
use fracsource::problem::{Intensity, ProblemSpec, Source, SpatialMesh, TimeGrid};
use fracsource::spectral::{find_eigenvalues, ModalCoeff, DEFAULT_ZERO_TOL};
use num_complex::Complex64 as C64;

fn main() -> fracsource::Result<()> {
    let sys = find_eigenvalues(1.5, 20, DEFAULT_ZERO_TOL)?;
    let spec = ProblemSpec::new(1.5, 1.5, 1.0, Intensity::Exp2, Source::Poly1)?;
    let grid = TimeGrid::new(1.0, 2e-3)?;
    let mesh = SpatialMesh::graded(250, 4.0)?;

    // a real source needs conjugate coefficients on conjugate modes
    let mut truth = vec![ModalCoeff { n: 1, value: C64::new(1.0, 0.0) }];
    for (n, v) in [(3i64, C64::new(-0.4, 0.0)), (6, C64::new(0.3, -0.2))] {
        truth.push(ModalCoeff { n, value: v });
        if sys.pair(n)?.kind == fracsource::spectral::ZeroKind::Complex {
            truth.push(ModalCoeff { n: -n, value: v.conj() });
        }
    }
    let phi = observe_flux_spectral(&spec, &sys, &truth, &grid)?;
    let k = build_time_convolution(&spec.intensity, &grid)?;
    let r = reconstruct_modes(&spec, &phi, &sys, &k, 8, 0.0, &mesh)?;
    let modal = r.modal.clone().unwrap_or_default();
    for c in &truth {
        let got = modal.iter().find(|m| m.n == c.n).map(|m| m.value).unwrap_or_default();
        println!(
            "n = {:>2}: true {:+.6}  recovered {:+.6}  rel err {:.1e}",
            c.n,
            c.value,
            got,
            (got - c.value).norm() / c.value.norm()
        );
    }
    Ok(())
}
