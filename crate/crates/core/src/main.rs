use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use secure_swipt::baselines::run_scheme;
use secure_swipt::channel::generate_channel_set;
use secure_swipt::harness::{
    emit_outputs, run_batch, run_single, runtime_vs_k, summarize, sweep_power, Axis, ExperimentConfig, Outcome,
};
use secure_swipt::model::{audit, secrecy_rate, BeamformingSolution};
use secure_swipt::sca::{build_subproblem, initialize, InitOutcome, ScaConfig, SubproblemLayout, AUDIT_TOL};
use secure_swipt::Result;

#[derive(Parser)]
#[command(name = "secure-swipt", version, about = "Secure SWIPT beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every scheme on one channel realisation, or on `--trials` of them.
    Run(Common),
    /// Secrecy rate against the power budget.
    SweepPower(Common),
    /// Wall time of the proposed scheme against the number of energy receivers.
    RuntimeVsK(Common),
    /// Audit a solution file, or every scheme's solution, on one realisation.
    Audit {
        #[command(flatten)]
        common: Common,
        /// JSON file holding a beamforming solution.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of proposed, no_an, zf.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    eh_mode: Option<String>,
    #[arg(long)]
    objective_mode: Option<String>,
    /// Order of the exponential approximation.
    #[arg(long)]
    q: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write one JSON trace per SCA run.
    #[arg(long)]
    traces: bool,
    /// Write the first subproblem in sparse triplet form and its variable map.
    #[arg(long)]
    dump_program: bool,
    /// Extra `key=value` assignments, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("run.seed", self.seed.map(|v| v.to_string())),
            ("run.trials", self.trials.map(|v| v.to_string())),
            ("run.out", self.out.as_ref().map(|p| p.display().to_string())),
            ("run.schemes", self.scheme.clone()),
            ("sca.eh_mode", self.eh_mode.clone()),
            ("sca.objective_mode", self.objective_mode.clone()),
            ("sca.q", self.q.map(|v| v.to_string())),
            ("run.jobs", self.jobs.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if self.traces {
            cfg.traces = true;
        }
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_rows(outcome: &Outcome) {
    println!(
        "{:>10} {:>6} {:>9} {:>15} {:>9} {:>12} {:>6}",
        "value", "seed", "scheme", "status", "feasible", "rate", "iters"
    );
    for r in &outcome.rows {
        println!(
            "{:>10} {:>6} {:>9} {:>15} {:>9} {:>12.6} {:>6}",
            r.sweep_value, r.seed, r.scheme, r.status, r.feasible, r.secrecy_rate, r.iterations
        );
    }
}

fn finish(command: &str, cfg: &ExperimentConfig, outcome: &Outcome) -> Result<()> {
    let summary = summarize(command, cfg, outcome);
    emit_outputs(&cfg.out, &summary, outcome)?;
    for a in &summary.aggregates {
        let mean = a.mean_rate.map_or("-".to_string(), |m| format!("{m:.4} ± {:.4}", a.stderr_rate.unwrap_or(0.0)));
        println!(
            "{} = {:>5}  {:>9}  feasible {:>3}/{:<3}  rate {}  (all rows {:.4} ± {:.4})",
            a.axis.as_str(),
            a.sweep_value,
            a.scheme,
            a.feasible,
            a.trials,
            mean,
            a.mean_rate_all,
            a.stderr_rate_all
        );
    }
    for t in summary.timings.iter().filter(|t| t.axis == Axis::K) {
        println!("K = {}  median wall time {:.3} s", t.sweep_value, t.median_wall_time_s);
    }
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn dump_program(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    let net = cfg.base_network();
    let ch = generate_channel_set(&net, cfg.seed)?;
    let layout = SubproblemLayout::new(net.m, net.k, net.n_m, net.n_f, cfg.sca.q, true);
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("variable_map.txt"), layout.variable_map())?;
    if let InitOutcome::Feasible { point, .. } = initialize(&ch, &net)? {
        let sp = build_subproblem(&ch, &net, &point, &cfg.sca, true)?;
        std::fs::write(dir.join("subproblem_0.txt"), sp.program.to_triplet_text())?;
    }
    Ok(())
}

fn audit_command(cfg: &ExperimentConfig, solution: Option<&Path>) -> Result<()> {
    let net = cfg.base_network();
    let ch = generate_channel_set(&net, cfg.seed)?;
    let report = |name: &str, sol: &BeamformingSolution| -> Result<()> {
        let a = audit(sol, &ch, &net, AUDIT_TOL)?;
        println!(
            "{name}: feasible {}  worst violation {:.3e}  secrecy rate {:.6}",
            a.feasible,
            a.worst_violation,
            secrecy_rate(sol, &ch, &net)
        );
        println!("{}", serde_json::to_string_pretty(&a)?);
        Ok(())
    };
    match solution {
        Some(p) => {
            let sol: BeamformingSolution = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            report(&p.display().to_string(), &sol)
        }
        None => {
            let scfg: &ScaConfig = &cfg.sca;
            for &scheme in &cfg.schemes {
                let (res, _) = run_scheme(scheme, &ch, &net, scfg)?;
                match &res.solution {
                    Some(sol) => report(scheme.as_str(), sol)?,
                    None => println!("{scheme}: no solution ({})", res.message.as_deref().unwrap_or("infeasible")),
                }
            }
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.load()?;
            if c.dump_program {
                dump_program(&cfg, &cfg.out)?;
            }
            let outcome = if c.trials.is_some() {
                run_batch(&cfg)?
            } else {
                run_single(&cfg, &cfg.base_network(), &cfg.schemes, Axis::Single, cfg.p_th_dbm, cfg.seed)?
            };
            print_rows(&outcome);
            finish("run", &cfg, &outcome)
        }
        Command::SweepPower(c) => {
            let cfg = c.load()?;
            finish("sweep-power", &cfg, &sweep_power(&cfg)?)
        }
        Command::RuntimeVsK(c) => {
            let cfg = c.load()?;
            finish("runtime-vs-k", &cfg, &runtime_vs_k(&cfg)?)
        }
        Command::Audit { common, solution } => audit_command(&common.load()?, solution.as_deref()),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
