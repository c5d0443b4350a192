//! Evaluate E_{a,b}(z) across both branches and compare with closed forms.
//!
//!     cargo run --release --example mittag_leffler

use fracsource::mlf::{Branch, MittagLeffler};
use num_complex::Complex64 as C64;

fn main() -> fracsource::Result<()> {
    let e11 = MittagLeffler::new(1.0, 1.0)?;
    let e21 = MittagLeffler::new(2.0, 1.0)?;
    println!("{:>22} {:>10} {:>12} {:>12}", "z", "branch", "rel err exp", "rel err cosh");
    for z in [C64::new(0.5, 0.5), C64::new(-20.0, 3.0), C64::new(60.0, -10.0), C64::new(-300.0, 40.0)] {
        let b = match e11.branch(z) {
            Branch::Series => "series",
            Branch::Asymptotic => "asymptotic",
        };
        let r1 = (e11.eval(z)? - z.exp()).norm() / z.exp().norm();
        let c = z.sqrt().cosh();
        let r2 = (e21.eval(z)? - c).norm() / c.norm();
        println!("{:>22} {:>10} {:>12.2e} {:>12.2e}", format!("{z:.1}"), b, r1, r2);
    }

    // the orders used by the solvers
    let e = MittagLeffler::new(1.5, 1.5)?;
    for x in [-1.0, -10.0, -100.0] {
        let z = C64::new(x, 0.0);
        println!("E_1.5,1.5({x}) = {:.12e}   d/dz = {:.6e}", e.eval(z)?.re, e.deriv(z)?.re);
    }
    Ok(())
}
