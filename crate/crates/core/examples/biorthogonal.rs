//! Primal/adjoint eigenfunctions, their pairing matrix and the modal
//! expansion of a source.

use fracsource::problem::Source;
use fracsource::spectral::{
    find_eigenvalues, modal_sum, mode_pairing, pairing_matrix, project_source, PairingMethod, DEFAULT_ZERO_TOL,
};

fn main() -> fracsource::Result<()> {
    let sys = find_eigenvalues(1.5, 30, DEFAULT_ZERO_TOL)?;
    let modes = sys.modes(5);
    let g = pairing_matrix(&sys, &modes)?;
    let m = modes.len();
    let mut cross: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                cross = cross.max(g[i * m + j].norm());
            }
        }
    }
    println!("modes {modes:?}\nmax off-diagonal |<X_n, Y_m>| = {cross:.2e}");

    for n in [1i64, 3, 5] {
        let a = mode_pairing(&sys, n, PairingMethod::ClosedForm)?;
        let b = mode_pairing(&sys, n, PairingMethod::Quadrature)?;
        println!("n = {n}: closed form {a:.10e}, quadrature {b:.10e}, rel diff {:.1e}", (a - b).norm() / a.norm());
    }

    // x(1-x): partial sums converge slowly near x = 0, where every X_n ~ x^{b-1}
    for reps in [10, 20, 30] {
        let coeffs = project_source(&sys, &Source::Poly1, reps)?;
        let v: Vec<String> = [0.3, 0.5, 0.9]
            .iter()
            .map(|&x| Ok(format!("{:.5} (exact {:.5})", modal_sum(&sys, &coeffs, x)?, x * (1.0 - x))))
            .collect::<fracsource::Result<_>>()?;
        println!("{reps:>2} representatives: {}", v.join(", "));
    }
    Ok(())
}
