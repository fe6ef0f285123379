//! Reproducible experiment runner: every verification in the library is a
//! subcommand with config-file + flag configuration, machine-readable
//! JSON/CSV outputs, and deterministic results for a fixed
//! (seed, steps, samples, workers) tuple.
//!
//! Exit codes: 0 all verdicts pass, 2 at least one verdict failed,
//! 3 runtime error.

use clap::{Parser, Subcommand};
use ymloop_cli::checks;
use ymloop_cli::config::ExperimentConfig;
use ymloop_cli::report::{self, Record};

#[derive(Parser)]
#[command(name = "ymloop", version, about = "Verification runner for the ymloop library")]
struct Cli {
    /// Flat key=value configuration file (precedence: CLI > file > defaults).
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Structure group: u1 or su2.
    #[arg(long, global = true)]
    group: Option<String>,

    /// Lattice / path steps N.
    #[arg(long = "steps", global = true)]
    steps: Option<usize>,

    /// Monte-Carlo samples M.
    #[arg(long = "samples", global = true)]
    samples: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Logical shard count (results are reproducible per worker count).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory for JSON and CSV records.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Tolerance override KEY=VAL (repeatable), e.g. semigroup=1e-6.
    #[arg(long = "tolerance", global = true, value_name = "KEY=VAL")]
    tolerance: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Heat-kernel semigroup, restriction, and normalization checks.
    HeatCheck,
    /// Ito-map heat-kernel marginals at N and 2N.
    BmCheck,
    /// Bridge pinning, midpoint marginal, winding sectors.
    BridgeCheck,
    /// Flat Cameron-Martin reweighting vs shifted characteristic function.
    CmFlat,
    /// Loop-group Cameron-Martin change of variables and unit mass.
    CmLoop,
    /// Exact link-form gauge invariance and sampled-field orders.
    GaugeCov,
    /// Gauge-representation unitarity and composition residuals.
    GgvUnitarity,
    /// Reduction identity: closed forms and Monte Carlo.
    ReduceVerify,
    /// Gauge invariance of the reduced form.
    GaugeInv,
    /// Resolution of identity over the phase-space measure.
    Resolution,
    /// Classical limit of coherent-state overlaps.
    ClassicalLimit,
    /// Compact-group projection oracle.
    CompactOracle,
    /// Run every check; aggregate verdicts without short-circuiting.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::HeatCheck => "heat-check",
            Command::BmCheck => "bm-check",
            Command::BridgeCheck => "bridge-check",
            Command::CmFlat => "cm-flat",
            Command::CmLoop => "cm-loop",
            Command::GaugeCov => "gauge-cov",
            Command::GgvUnitarity => "ggv-unitarity",
            Command::ReduceVerify => "reduce-verify",
            Command::GaugeInv => "gauge-inv",
            Command::Resolution => "resolution",
            Command::ClassicalLimit => "classical-limit",
            Command::CompactOracle => "compact-oracle",
            Command::All => "all",
        }
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        cfg.load_file(path)?;
    }
    if let Some(g) = &cli.group {
        cfg.apply("group", g, "cli")?;
    }
    if let Some(v) = cli.steps {
        cfg.apply("steps", &v.to_string(), "cli")?;
    }
    if let Some(v) = cli.samples {
        cfg.apply("samples", &v.to_string(), "cli")?;
    }
    if let Some(v) = cli.seed {
        cfg.apply("seed", &v.to_string(), "cli")?;
    }
    if let Some(v) = cli.workers {
        cfg.apply("workers", &v.to_string(), "cli")?;
    }
    if let Some(v) = &cli.out {
        cfg.out_dir = v.clone();
    }
    for t in &cli.tolerance {
        let Some((k, v)) = t.split_once('=') else {
            anyhow::bail!("--tolerance expects KEY=VAL, got {t:?}");
        };
        cfg.apply(&format!("tolerance.{k}"), v, "cli")?;
    }
    cfg.group_spec()?;
    Ok(cfg)
}

fn print_records(name: &str, records: &[Record]) -> bool {
    let mut ok = true;
    for r in records {
        let status = if r.verdict { "pass" } else { "FAIL" };
        println!(
            "[{status}] {name}/{}: value {:+.6e}{:+.6e}i deviation {:.3e} tolerance {:.3e}",
            r.case, r.value_re, r.value_im, r.deviation, r.tolerance
        );
        ok &= r.verdict;
    }
    ok
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    let cfg = build_config(&cli)?;

    let mut all_pass = true;
    match cli.command {
        Command::All => {
            let groups = checks::run_all(&cfg)?;
            let mut summary = Vec::new();
            for (name, records) in &groups {
                all_pass &= print_records(name, records);
                report::write_check_outputs(&cfg.out_dir, name, &cfg, records)?;
                summary.extend(records.iter().cloned());
            }
            report::write_summary(&cfg.out_dir, &summary)?;
        }
        cmd => {
            let records = match cmd {
                Command::HeatCheck => checks::heat_check(&cfg)?,
                Command::BmCheck => checks::bm_check(&cfg)?,
                Command::BridgeCheck => checks::bridge_check(&cfg)?,
                Command::CmFlat => checks::cm_flat(&cfg)?,
                Command::CmLoop => checks::cm_loop(&cfg)?,
                Command::GaugeCov => checks::gauge_cov(&cfg)?,
                Command::GgvUnitarity => checks::ggv_unitarity(&cfg)?,
                Command::ReduceVerify => {
                    checks::dump_fields(&cfg)?;
                    checks::reduce_verify(&cfg)?
                }
                Command::GaugeInv => checks::gauge_inv(&cfg)?,
                Command::Resolution => checks::resolution(&cfg)?,
                Command::ClassicalLimit => checks::classical_limit(&cfg)?,
                Command::CompactOracle => checks::compact_oracle_check(&cfg)?,
                Command::All => unreachable!(),
            };
            all_pass &= print_records(cmd.name(), &records);
            report::write_check_outputs(&cfg.out_dir, cmd.name(), &cfg, &records)?;
        }
    }
    Ok(if all_pass { 0 } else { 2 })
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(3);
        }
    }
}
