//! Command-line interface for the detection toolkit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gausdet::bounds::{beta_bounds, Mu0Method};
use gausdet::hypotheses::read_pair;
use gausdet::lrtest::{calibrate_threshold, estimate_beta, estimate_log_beta_is};
use gausdet::maximalset::{f_report, membership};
use gausdet::pdlinalg::DEFAULT_PD_TOL;
use gausdet::scenarios::{run_scenario_to_dir, ExperimentConfig};
use gausdet::Error;

#[derive(Parser)]
#[command(
    name = "gausdet",
    about = "Likelihood-ratio detection of Gaussian signals in white noise: \
             threshold calibration, error-probability estimation, divergence \
             bounds, and the replaceable-set membership oracle",
    version
)]
struct Cli {
    /// Worker threads for Monte Carlo commands (0 = library default).
    /// Results are byte-identical for any worker count.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the acceptance threshold at a target false-alarm level.
    /// Prints `gamma,value,log_value,std_err,n_samples,seed` where the
    /// estimate columns re-check the achieved level at the threshold.
    Calibrate {
        /// Pair file: `mean a_1 .. a_n` line, then the matrix block.
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Estimate the miss probability of the detector built for `--decision`
    /// when the data follow `--truth`. Prints
    /// `value,log_value,std_err,n_samples,seed`.
    Beta {
        #[arg(long)]
        decision: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Acceptance threshold in nats (often negative).
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Use the null-proposal log-scale estimator instead of plain
        /// Monte Carlo (required when the probability is exponentially
        /// small).
        #[arg(long)]
        importance: bool,
    },
    /// Decide whether a candidate pair belongs to the replaceable set of a
    /// reference pair at the given slack.
    Membership {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        cand: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
        #[arg(long, default_value_t = DEFAULT_PD_TOL)]
        pd_tol: f64,
        /// Emit the report as JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Print `ln f` for a candidate against a reference.
    Fvalue {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        cand: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PD_TOL)]
        pd_tol: f64,
    },
    /// Two-sided bounds on the log miss probability. Prints
    /// `kl,lower_log_beta,upper_log_beta,mu0,mu0_method,alpha`.
    Bounds {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// mu0 route: lemma1 | empirical | chebyshev
        #[arg(long)]
        mu0: String,
        /// Moment exponent for the lemma1 route.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Constant for the chebyshev route.
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        /// Samples for the empirical route.
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a scenario config and write exponent.csv, replacement.csv, and
    /// membership.csv. Exits with code 2 when an in-run invariant check
    /// fails.
    Scenario {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Calibrate {
            pair,
            alpha,
            samples,
            seed,
        } => {
            let pair = read_pair(&pair)?;
            let th = calibrate_threshold(&pair, alpha, samples, seed)?;
            println!("gamma,value,log_value,std_err,n_samples,seed");
            println!("{},{}", th.gamma, th.achieved_alpha.csv_row());
        }
        Command::Beta {
            decision,
            truth,
            gamma,
            samples,
            seed,
            importance,
        } => {
            let decision = read_pair(&decision)?;
            let truth = read_pair(&truth)?;
            println!("value,log_value,std_err,n_samples,seed");
            if importance {
                let e = estimate_log_beta_is(&decision, &truth, gamma, samples, seed)?;
                println!(
                    "{},{},{},{},{}",
                    e.value, e.log_value, e.std_err, e.n_samples, e.seed
                );
            } else {
                let e = estimate_beta(&decision, &truth, gamma, samples, seed)?;
                println!("{}", e.csv_row());
            }
        }
        Command::Membership {
            reference,
            cand,
            slack,
            pd_tol,
            json,
        } => {
            let reference = read_pair(&reference)?;
            let cand = read_pair(&cand)?;
            let verdict = membership(&reference, &cand, slack, pd_tol)?;
            let report = f_report(&reference, &cand, pd_tol)?;
            if json {
                println!(
                    "{{\"status\":\"{}\",\"log_f\":{},\"k\":{},\"b_pd\":{},\"slack_used\":{}}}",
                    verdict.status,
                    json_num(verdict.log_f),
                    report.k.map_or("null".into(), |k| k.to_string()),
                    report.b_pd,
                    verdict.slack_used
                );
            } else {
                println!("{} log_f={} slack={}", verdict.status, verdict.log_f, verdict.slack_used);
                println!("status,log_f,k,b_pd,slack_used");
                println!(
                    "{},{},{},{},{}",
                    verdict.status,
                    verdict.log_f,
                    report.k.map_or(String::from(""), |k| k.to_string()),
                    report.b_pd,
                    verdict.slack_used
                );
            }
        }
        Command::Fvalue {
            reference,
            cand,
            pd_tol,
        } => {
            let reference = read_pair(&reference)?;
            let cand = read_pair(&cand)?;
            println!("{}", f_report(&reference, &cand, pd_tol)?.log_f);
        }
        Command::Bounds {
            pair,
            alpha,
            mu0,
            p,
            c,
            samples,
            seed,
        } => {
            let pair = read_pair(&pair)?;
            let method = match mu0.as_str() {
                "lemma1" => Mu0Method::Lemma1 { p },
                "empirical" => Mu0Method::Empirical {
                    n_samples: samples,
                    seed,
                },
                "chebyshev" => Mu0Method::Chebyshev { c },
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown mu0 route `{other}` (expected lemma1 | empirical | chebyshev)"
                    )))
                }
            };
            let b = beta_bounds(&pair, alpha, &method)?;
            println!("kl,lower_log_beta,upper_log_beta,mu0,mu0_method,alpha");
            println!("{}", b.csv_row());
        }
        Command::Scenario { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::parse(&text)?;
            let outcome = run_scenario_to_dir(&cfg, &out)?;
            if outcome.violations > 0 {
                eprintln!("{} invariant violation(s) detected", outcome.violations);
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// JSON has no infinity literal; emit a string for the infinite branch.
fn json_num(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        format!("\"{x}\"")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    let body = move || match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    };
    if workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(body)
    } else {
        body()
    }
}
