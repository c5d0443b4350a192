//! Recover f(x) from noisy flux data u_x(1, t): data from the fine grid,
//! inversion on the coarse grid, nu by the discrepancy rule.

use fracsource::forward::{observe_flux_discrete, solve_discrete};
use fracsource::inverse::{add_noise, build_forward_matrix, tikhonov_solve, TikhonovConfig};
use fracsource::problem::{Intensity, ProblemSpec, Source, SpatialMesh, TimeGrid};

fn main() -> fracsource::Result<()> {
    let fine_mesh = SpatialMesh::graded(1000, 4.0)?;
    let fine_grid = TimeGrid::new(1.0, 5e-4)?;
    let mesh = SpatialMesh::graded(250, 4.0)?;
    let grid = TimeGrid::new(1.0, 2e-3)?;
    for (name, source) in [("x(1-x)", Source::Poly1), ("x^2(1-x)", Source::Poly2), ("x^4(1-x)", Source::Poly4)] {
        let spec = ProblemSpec::new(1.5, 1.5, 1.0, Intensity::Exp2, source)?;
        let data = observe_flux_discrete(&solve_discrete(&spec, &fine_mesh, &fine_grid)?, &fine_mesh)?.subsample(4)?;
        let map = build_forward_matrix(&spec, &mesh, &grid)?;
        let f_true = spec.source.interior(&mesh);
        for delta in [0.02, 0.05] {
            let z = add_noise(&data, delta, 1)?;
            let mut r = tikhonov_solve(&map, &z, &TikhonovConfig::auto(delta))?;
            r.record_error(&mesh, &f_true)?;
            println!(
                "{name:>9} delta {delta}: nu {:.2e}, relative L2 error {:.4}",
                r.nu_used.unwrap_or(f64::NAN),
                r.error_vs_truth.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
