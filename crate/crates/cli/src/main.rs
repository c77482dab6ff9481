use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use fotune::frac::oustaloup_ct;
use fotune::io::{self, OUTCOME_FILE};
use fotune::lti::step_response_from_t;
use fotune::pipeline::{
    collect_closed_loop_data, compare_report, evaluate_controller, tune_fr, tune_sim,
    ControllerMetrics,
};
use fotune::{Criterion, Error, TuningConfig, TuningOutcome};

#[derive(Parser)]
#[command(
    name = "fotune",
    version,
    about = "Data-driven FO-PID tuning by ITAE/IAE minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the closed-loop step experiment with phi0 and record (u, y).
    SimulateData {
        /// `full`, `reduced`, or a plant file.
        #[arg(long)]
        plant: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tune from one recorded data set (no plant model involved).
    Tune {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "itae")]
        criterion: Criterion,
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Tune by simulating the closed loop on a plant or model.
    TuneSim {
        #[arg(long)]
        plant: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "itae")]
        criterion: Criterion,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print step-response metrics of one controller on a plant.
    Evaluate {
        #[arg(long)]
        plant: String,
        /// kfp,kfi,kfd,lambda,mu
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate several tuning outcomes on one plant side by side.
    Compare {
        /// Report directories written by `tune` / `tune-sim`.
        #[arg(long, num_args = 1.., required = true)]
        outcomes: Vec<PathBuf>,
        #[arg(long)]
        plant: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frequency sweep of the Oustaloup approximation of s^gamma.
    FreqResponse {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_OTHER: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_OPTIMIZER: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DataInvalid(_) | Error::InvalidSequence(_) => EXIT_DATA,
        Error::NoFeasible { .. } => EXIT_OPTIMIZER,
        Error::Dataset { source, .. } => exit_code(source),
        _ => EXIT_OTHER,
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<TuningConfig> {
    match path {
        Some(p) => io::load_config(p).with_context(|| format!("reading config {}", p.display())),
        None => Ok(TuningConfig::default()),
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn metrics_line(m: &ControllerMetrics) -> String {
    let ts = m
        .settling_time
        .map_or_else(|| "n/a".to_string(), |t| format!("{t:.3} s"));
    format!(
        "ITAE {:.6}\nIAE {:.6}\novershoot {:.3} %\nsettling time {}\nsteady-state error {:.3e}\nstable {}",
        m.itae, m.iae, m.overshoot_pct, ts, m.steady_state_error, m.stable
    )
}

fn outcome_summary(o: &TuningOutcome) -> String {
    let p = o.phi_star;
    format!(
        "strategy {}\ncriterion {:?}\nphi* kfp={} kfi={} kfd={} lambda={} mu={}\nobjective at phi* {:.9e}\nobjective at phi0 {:.9e}\nevaluations {}\n",
        o.strategy,
        o.criterion,
        p.k_fp,
        p.k_fi,
        p.k_fd,
        p.lambda,
        p.mu,
        o.objective_value,
        o.objective_at_phi0,
        o.trace.evaluations()
    )
}

fn write_outcome(dir: &Path, o: &TuningOutcome, setpoint: f64) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join(OUTCOME_FILE), &io::outcome_to_json(o)?)?;
    let y = step_response_from_t(&o.t_est, setpoint);
    write(
        &dir.join("step.csv"),
        &io::step_csv(&o.t_est.times(), setpoint, y.values()),
    )?;
    write(&dir.join("trace.csv"), &io::trace_csv(&o.trace))?;
    write(&dir.join("report.txt"), &outcome_summary(o))?;
    Ok(())
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::SimulateData { plant, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let plant = io::resolve_plant(&plant)?;
            let data = collect_closed_loop_data(&plant, &cfg.phi0, &cfg)?;
            io::write_data(&out, &data)?;
            println!("wrote {} samples to {}", data.horizon(), out.display());
        }
        Command::Tune {
            data,
            config,
            criterion,
            out,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.criterion = criterion;
            // A malformed data file is a data problem, not a usage one.
            let record = io::read_data(&data).map_err(|e| match e {
                Error::Parse(m) => Error::DataInvalid(m),
                other => other,
            })?;
            let outcome = tune_fr(&record, &cfg)?;
            write_outcome(&out, &outcome, cfg.setpoint)?;
            print!("{}", outcome_summary(&outcome));
        }
        Command::TuneSim {
            plant,
            config,
            criterion,
            out,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.criterion = criterion;
            let plant = io::resolve_plant(&plant)?;
            let outcome = tune_sim(&plant, &cfg)?;
            write_outcome(&out, &outcome, cfg.setpoint)?;
            print!("{}", outcome_summary(&outcome));
        }
        Command::Evaluate { plant, phi, config } => {
            let cfg = load_config(config.as_deref())?;
            let plant = io::resolve_plant(&plant)?;
            let phi = io::parse_phi(&phi)?;
            let ev = evaluate_controller(&plant, &phi, &cfg)?;
            println!("plant {}\nphi {}", fotune::Plant::label(&plant), phi);
            println!("{}", metrics_line(&ev.metrics));
        }
        Command::Compare {
            outcomes,
            plant,
            config,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let plant = io::resolve_plant(&plant)?;
            let mut loaded = Vec::with_capacity(outcomes.len());
            for dir in &outcomes {
                let path = dir.join(OUTCOME_FILE);
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                loaded.push(io::outcome_from_json(&text)?);
            }
            let report = compare_report(&loaded, &plant, &cfg)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let table = report.to_table();
            write(&out.join("comparison.txt"), &table)?;
            write(&out.join("responses.csv"), &report.responses_csv())?;
            print!("{table}");
        }
        Command::FreqResponse {
            gamma,
            config,
            points,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let filter = oustaloup_ct(gamma, &cfg.oustaloup)?;
            let (lo, hi) = (cfg.oustaloup.omega_low, cfg.oustaloup.omega_high);
            write(&out, &io::freq_response_csv(&filter, lo, hi, points))?;
            println!("wrote {points} points to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(EXIT_OTHER, exit_code);
            ExitCode::from(code)
        }
    }
}
