//! Command-line front end. Matrices and vectors are plain headerless CSV.
//! Exit codes: 0 success, 2 bad input or configuration, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sitl1::harness::{
    read_matrix_csv, read_vector_csv, run_example_3_1, run_experiment, write_vector_csv, ExperimentConfig, HarnessError,
};
use sitl1::oracle::{l0_oracle, DEFAULT_CAP};
use sitl1::sit::{detect, recover_underdetermined, Detection, Problem};
use sitl1::SolverConfig;

#[derive(Parser)]
#[command(name = "sitl1", version, about = "Sparsest error detection by randomised SIT-l1 minimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect the sparsest error in y = A x + e.
    Detect {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 100)]
        snbr: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// BPDN radius; 0 solves basis pursuit.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Write the detected error vector here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparsest e with F e = y_tilde for a wide F.
    Recover {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 100)]
        snbr: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact minimum-l0 errors by enumerating row subsets.
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Run an experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reproduce the three-row worked example.
    Example31,
}

fn print_detection(d: &Detection) {
    let support: Vec<String> = d.support.iter().map(|i| (i + 1).to_string()).collect();
    println!("support (1-based): [{}]", support.join(", "));
    println!("l0: {}", d.l0_count);
    println!("lambda: {}", d.lambda);
    println!("x_hat: {:?}", d.x_hat.as_slice());
    println!("solver status: {:?}", d.report.status);
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let solver = SolverConfig::default();
    match cli.command {
        Command::Detect { matrix, y, snbr, eps, seed, sigma, out } => {
            let p = Problem::new(read_matrix_csv(&matrix)?, read_vector_csv(&y)?)?;
            let d = detect(&p, snbr, eps, seed, &solver, sigma)?;
            print_detection(&d);
            if let Some(out) = out {
                write_vector_csv(&out, &d.e_scaled)?;
            }
        }
        Command::Recover { f, y, snbr, eps, seed, out } => {
            let d = recover_underdetermined(&read_matrix_csv(&f)?, &read_vector_csv(&y)?, snbr, eps, seed, &solver)?;
            let support: Vec<String> = d.support.iter().map(|i| (i + 1).to_string()).collect();
            println!("support (1-based): [{}]", support.join(", "));
            println!("l0: {}", d.l0_count);
            println!("e: {:?}", d.e_scaled.as_slice());
            if let Some(out) = out {
                write_vector_csv(&out, &d.e_scaled)?;
            }
        }
        Command::Oracle { matrix, y, cap } => {
            let p = Problem::new(read_matrix_csv(&matrix)?, read_vector_csv(&y)?)?;
            let res = l0_oracle(&p, cap)?;
            println!("min l0: {}", res.min_l0);
            println!("subsets solved: {}", res.enumerated);
            for s in &res.solutions {
                let support: Vec<String> = s.support.iter().map(|i| (i + 1).to_string()).collect();
                println!("support [{}] x {:?}", support.join(", "), s.x.as_slice());
            }
        }
        Command::Experiment { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", config.display())))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let out = run_experiment(&cfg)?;
            println!("experiment,method,trials,exact_rate,per_entry_accuracy,oracle_exact_rate,failures");
            for s in &out.summary {
                let oracle = s.oracle_exact_rate.map_or(String::new(), |r| format!("{r:.4}"));
                println!(
                    "{},{},{},{:.4},{:.4},{},{}",
                    s.experiment,
                    s.method.as_str(),
                    s.trials,
                    s.exact_rate,
                    s.per_entry_accuracy,
                    oracle,
                    s.failures
                );
            }
        }
        Command::Example31 => {
            let rep = run_example_3_1()?;
            for c in &rep.checks {
                println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let passed = rep.checks.iter().filter(|c| c.pass).count();
            println!("{passed}/{} checks passed in {:.3} s", rep.checks.len(), rep.elapsed.as_secs_f64());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
