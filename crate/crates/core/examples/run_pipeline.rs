//! Full experiment: config, fine-grid data, noise, both reconstructions,
//! persisted CSV/JSON and a gnuplot script. Same as `fracsource run`.
//!
//!     cargo run --release --example run_pipeline -- configs/example1.json /tmp/ex1

use std::path::PathBuf;

use fracsource::experiment::{emit_plot_script, load_config, persist_results, run_experiment};

fn main() -> fracsource::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let cfg_path =
        PathBuf::from(args.get(1).map_or(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/example1.json"), |s| s));
    let out = args.get(2).map_or_else(|| std::env::temp_dir().join("fracsource-example1"), PathBuf::from);

    let cfg = load_config(&cfg_path)?;
    let mut outcome = run_experiment(&cfg)?;
    let files = persist_results(&mut outcome, &out)?;
    let script = emit_plot_script(&outcome.manifest, &out)?;
    for m in &outcome.manifest.metrics {
        println!("{:?}: relative L2 error {:?}", m.method, m.relative_l2_error);
    }
    for f in &outcome.manifest.failures {
        println!("{:?} failed ({}): {}", f.method, f.kind, f.message);
    }
    for t in &outcome.manifest.timings {
        println!("  {:<16} {:>8.3} s", t.stage, t.seconds);
    }
    println!("wrote {} files and {}", files.len(), script.display());
    Ok(())
}
