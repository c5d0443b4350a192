//! Forward problem two ways: eigenfunction expansion with Duhamel
//! coefficients versus the graded-mesh FE / Grunwald-Letnikov scheme.
//! Coarser than the reference grid so it runs in a few seconds.

use fracsource::forward::{observe_flux_discrete, solve_discrete, solve_spectral, trace_difference};
use fracsource::problem::{Intensity, ProblemSpec, Source, SpatialMesh, TimeGrid};
use fracsource::spectral::{find_eigenvalues, DEFAULT_ZERO_TOL};

fn main() -> fracsource::Result<()> {
    let spec = ProblemSpec::new(1.5, 1.5, 1.0, Intensity::Exp2, Source::Poly1)?;
    let sys = find_eigenvalues(1.5, 40, DEFAULT_ZERO_TOL)?;
    for (cells, tau) in [(100, 4e-3), (200, 2e-3), (400, 1e-3)] {
        let mesh = SpatialMesh::graded(cells, 4.0)?;
        let grid = TimeGrid::new(1.0, tau)?;
        let fem = solve_discrete(&spec, &mesh, &grid)?;
        let spectral = solve_spectral(&spec, &sys, 40, &mesh, &grid)?;
        let flux = trace_difference(&observe_flux_discrete(&fem, &mesh)?, &observe_flux_discrete(&spectral, &mesh)?)?;
        println!(
            "cells {cells:>4} tau {tau:.0e}: relative L2 difference {:.3e} (flux {:.3e}), tail ratio {:.1e}",
            fem.relative_difference(&spectral)?,
            flux,
            spectral.meta.tail_ratio
        );
    }
    Ok(())
}
