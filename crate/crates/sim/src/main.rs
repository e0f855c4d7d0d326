use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use squint_core::EvalModel;
use squint_sim::config::LoadedScenario;
use squint_sim::output::OutputDir;
use squint_sim::{data, run, Result, SimError};

/// Beam-squint experiments for phased arrays, true-time-delay arrays and
/// dielectric lens antennas.
#[derive(Debug, Parser)]
#[command(name = "squint", version)]
struct Cli {
    /// Scenario file (JSON, schema version "1").
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `outputs.dir` in the scenario.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reserved. Every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// AD, PD, HPBW and BF gain ratio per AoD and frequency.
    SquintTable,
    /// BF gain ratio curves across the band.
    GainRatio,
    /// Receiver-grid simulation with best-beam selection.
    Sls,
    /// List bundled materials.
    Materials,
    /// Dump one beam pattern.
    Pattern {
        #[arg(long)]
        antenna: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        aod: f64,
        #[arg(long, default_value = "EM1")]
        eval_model: EvalModel,
    },
}

fn load(cli: &Cli) -> Result<(LoadedScenario, OutputDir)> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| SimError::config("--config", "this subcommand needs a scenario file"))?;
    let sc = LoadedScenario::from_path(path)?;
    let dir = match &cli.out {
        Some(d) => d.clone(),
        None => sc.base_dir.join(&sc.spec.outputs.dir),
    };
    let out = OutputDir::create(&dir, &sc.spec.outputs.formats)?;
    Ok((sc, out))
}

fn report(cli: &Cli, out: &OutputDir, summary: serde_json::Value) {
    if cli.json {
        let files: Vec<&str> = out.files().collect();
        let v = serde_json::json!({ "out_dir": out.dir(), "files": files, "summary": summary });
        println!("{}", serde_json::to_string_pretty(&v).unwrap());
    } else {
        for f in out.files() {
            println!("wrote {}", out.dir().join(f).display());
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Materials => {
            let rows = data::describe_materials();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                print!("{}", data::format_material_table(&rows));
            }
        }
        Command::SquintTable => {
            let (sc, mut out) = load(cli)?;
            let reports = run::run_squint_table(&sc)?;
            out.write_squint(&reports)?;
            out.write_manifest(&sc, "squint-table")?;
            let summary = reports
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "antenna": r.antenna,
                        "eval_model": r.eval_model.as_str(),
                        "max_abs_ad_deg": r.max_abs_ad(),
                        "max_abs_pd_db": r.max_abs_pd(),
                    })
                })
                .collect();
            report(cli, &out, serde_json::Value::Array(summary));
        }
        Command::GainRatio => {
            let (sc, mut out) = load(cli)?;
            let curves = run::run_gain_ratio(&sc)?;
            out.write_gain_ratio(&curves)?;
            out.write_manifest(&sc, "gain-ratio")?;
            report(cli, &out, serde_json::json!({ "curves": curves.len() }));
        }
        Command::Sls => {
            let (sc, mut out) = load(cli)?;
            let runs = run::run_sls(&sc)?;
            out.write_sls(&sc.spec.name, &runs)?;
            out.write_manifest(&sc, "sls")?;
            let summary = runs
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "antenna": r.antenna,
                        "eval_model": r.eval_model.as_str(),
                        "median_se": r.result.median_se(),
                        "median_degradation_db": r.result.median_degradation_db(),
                    })
                })
                .collect();
            if !cli.json {
                for r in &runs {
                    println!(
                        "{:<12} {}  median SE {:.4} bit/s/Hz  degradation {:.3} dB",
                        r.antenna,
                        r.eval_model,
                        r.result.median_se(),
                        r.result.median_degradation_db()
                    );
                }
            }
            report(cli, &out, serde_json::Value::Array(summary));
        }
        Command::Pattern {
            antenna,
            aod,
            eval_model,
        } => {
            let (sc, mut out) = load(cli)?;
            let (_, pattern) = run::run_pattern(&sc, antenna.as_deref(), *aod, *eval_model)?;
            out.write_pattern(&pattern)?;
            out.write_manifest(&sc, "pattern")?;
            report(cli, &out, serde_json::Value::Null);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
