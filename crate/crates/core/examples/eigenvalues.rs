//! Zeros of E_{b,b}: the eigenvalues of the fractional Dirichlet problem,
//! with the argument-principle count and a JSON cache.
//!
//!     cargo run --release --example eigenvalues -- 1.7 20

use fracsource::spectral::{find_eigenvalues, EigenSystem, ZeroKind, DEFAULT_ZERO_TOL};

fn main() -> fracsource::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let beta: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.5);
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(15);

    let sys = find_eigenvalues(beta, n, DEFAULT_ZERO_TOL)?;
    println!("beta = {beta}: {} representatives, {} zeros counting conjugates", sys.len(), sys.zero_count(sys.len()));
    for p in &sys.pairs {
        let kind = if p.kind == ZeroKind::Real { "real" } else { "pair" };
        println!(
            "{:>3} {:>5} lambda = {:>+.6e} {:>+.6e}i   |lambda|/n^beta = {:.4}   residual {:.1e}",
            p.index,
            kind,
            p.lambda.re,
            p.lambda.im,
            p.lambda.norm() / (p.index as f64).powf(beta),
            p.residual
        );
    }
    if let Some(c) = &sys.certificate {
        println!("winding number {} on |z| = {:.2} (expected {})", c.winding, c.radius, c.expected);
    }
    let bad = sys.lemma_violations();
    println!("sector/ordering violations: {}", bad.len());

    let json = sys.to_json();
    let back = EigenSystem::from_json(&json)?;
    assert_eq!(back.pairs.len(), sys.pairs.len());
    println!("cache is {} bytes", json.len());
    Ok(())
}
