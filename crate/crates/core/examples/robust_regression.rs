//! Line fitting with 20 outliers among 52 points, on the uniform and the
//! tailored design.

use sitl1::harness::{run_experiment, ExperimentConfig, Method};

fn main() {
    for (name, eps) in [("regression-uniform", 0.3), ("regression-tailored", 1.8)] {
        let cfg = ExperimentConfig {
            name: name.into(),
            noise_std: 0.1,
            eps,
            snbr: 80,
            trials: 20,
            methods: vec![Method::Sit, Method::Lad, Method::Reweighted],
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&cfg).unwrap();
        println!("{name}");
        for s in &out.summary {
            println!(
                "  {:<10} exact {:.2}  per-entry {:.3}  mean |x - x0| {:.3}",
                s.method.as_str(),
                s.exact_rate,
                s.per_entry_accuracy,
                s.mean_x_error
            );
        }
    }
}
