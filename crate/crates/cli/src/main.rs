//! `tfq`: runs the verification experiments and writes reports.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::Parser;
use tfq_core::verify::{list_experiments, run_experiment, ExperimentReport, RunContext};

use config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "tfq",
    version,
    about = "Run time-frequency verification experiments"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, env = "TFQ_CONFIG")]
    config: Option<PathBuf>,
    /// Experiment id to run (repeatable); the default suite runs otherwise.
    #[arg(long = "experiment", env = "TFQ_EXPERIMENTS", value_delimiter = ',')]
    experiments: Vec<String>,
    /// Parameter override `key=value` for the selected experiments.
    #[arg(long = "param")]
    params: Vec<String>,
    /// List experiments and their parameters.
    #[arg(long)]
    list: bool,
    #[arg(long, env = "TFQ_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "TFQ_OUTPUT_DIR")]
    out: Option<PathBuf>,
    /// json, csv or both.
    #[arg(long, env = "TFQ_FORMAT")]
    format: Option<String>,
    /// Experiments run concurrently.
    #[arg(long, env = "TFQ_JOBS")]
    jobs: Option<usize>,
    #[arg(long, env = "TFQ_GRID_N")]
    grid_n: Option<usize>,
    #[arg(long, env = "TFQ_GRID_L")]
    grid_l: Option<f64>,
    #[arg(long, env = "TFQ_LATTICE_A")]
    lattice_a: Option<usize>,
    #[arg(long, env = "TFQ_LATTICE_B")]
    lattice_b: Option<usize>,
    /// Record wall-clock time in `runtime_ms` (reports are then not reproducible byte for byte).
    #[arg(long)]
    timings: bool,
}

fn print_list() {
    let ctx = RunContext::default();
    for e in list_experiments() {
        println!("{}", e.id);
        println!("    {}", e.claim);
        for p in e.params {
            let default = tfq_core::verify::Params::resolve(&[*p], &Default::default(), &ctx)
                .ok()
                .and_then(|r| r.as_map().get(p.name).cloned())
                .unwrap_or_default();
            if p.help.is_empty() {
                println!("    --param {}={default}", p.name);
            } else {
                println!("    --param {}={default}  ({})", p.name, p.help);
            }
        }
    }
}

type Outcome = Result<ExperimentReport, String>;

fn run_all(cfg: &RunConfig, timings: bool) -> Vec<Outcome> {
    let n = cfg.experiments.len();
    let slots: Vec<Mutex<Option<Outcome>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.min(n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let req = &cfg.experiments[i];
                let start = Instant::now();
                let out = run_experiment(req, &cfg.context)
                    .map(|mut r| {
                        if timings {
                            r.runtime_ms = start.elapsed().as_millis() as u64;
                        }
                        r
                    })
                    .map_err(|e| format!("{}: {e}", req.instance_id()));
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("slot lock")
                .expect("every slot filled")
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        print_list();
        return ExitCode::SUCCESS;
    }
    let over = Overrides {
        grid_n: cli.grid_n,
        grid_l: cli.grid_l,
        lattice_a: cli.lattice_a,
        lattice_b: cli.lattice_b,
        seed: cli.seed,
        output_dir: cli.out,
        format: cli.format,
        jobs: cli.jobs,
        experiments: cli.experiments,
        params: cli.params,
    };
    let cfg = match RunConfig::build(cli.config.as_deref(), over) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcomes = run_all(&cfg, cli.timings);
    let mut reports = Vec::new();
    let mut config_errors = 0;
    for o in outcomes {
        match o {
            Ok(r) => {
                let status = if r.pass { "PASS" } else { "FAIL" };
                let failures = r.failures();
                if failures.is_empty() {
                    println!("{status}  {}", r.experiment_id);
                } else {
                    println!("{status}  {}  [{}]", r.experiment_id, failures.join(", "));
                }
                reports.push(r);
            }
            Err(e) => {
                eprintln!("config error: {e}");
                config_errors += 1;
            }
        }
    }
    if let Err(e) = output::write_all(&cfg.output_dir, &reports, cfg.formats, cfg.context.seed) {
        eprintln!("cannot write reports to {}: {e}", cfg.output_dir.display());
        return ExitCode::from(2);
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    println!(
        "{passed}/{} passed; reports in {}",
        reports.len(),
        cfg.output_dir.display()
    );
    if config_errors > 0 {
        ExitCode::from(2)
    } else if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
