//! Exact-support rate as the errors move into the high-leverage block, and as
//! the sample count grows. Pass a trial count to override the default of 20.

use sitl1::harness::{run_experiment, run_snbr_sweep, ExperimentConfig};

fn main() {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let base = ExperimentConfig { trials, ..ExperimentConfig::default() };
    println!("t_fraction  sit   lad   reweighted");
    for t in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
        let cfg = ExperimentConfig { t_fraction: t, ..base.clone() };
        let out = run_experiment(&cfg).unwrap();
        let rates: Vec<String> = out.summary.iter().map(|s| format!("{:.2}", s.exact_rate)).collect();
        println!("{t:<10}  {}", rates.join("  "));
    }
    println!("\nsnbr  exact  per-entry");
    for p in run_snbr_sweep(&base, &[5, 10, 20, 40, 80, 160]).unwrap() {
        println!("{:<4}  {:.2}   {:.3}", p.snbr, p.exact_rate, p.per_entry_accuracy);
    }
}
