//! `qscs`: run experiment configs and plot their datasets.
//!
//! ```text
//! qscs crb     --config crb.json [--seed 3] [--out results/]
//! qscs recover --config sweep.json --trials 20 --quantizer sign --tol 1e-5
//! qscs mmv     --kind mmv_sweep --trials 10
//! qscs plot    --input results/crb_vs_snr.csv --style crb --out crb.svg
//! ```
//!
//! Exit codes: 0 success, 1 error, 3 when more than 20% of the solves did not
//! converge (outputs are still written).

use clap::{Args, Parser, Subcommand};
use qscs::quantization::QuantizerChoice;
use qscs_experiments::{emit_plot, run, Dataset, ExperimentConfig, ExperimentKind, PlotStyle, MAX_UNCONVERGED_FRACTION};
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qscs", version, about = "Quantized spectral compressed sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cramér-Rao bound curves (crb_vs_snr, crb_fixed_bits)
    Crb(RunArgs),
    /// Single-snapshot recovery (lambda_curve, dual_poly_demo, error_vs_m, error_vs_k, mse_vs_crb)
    Recover(RunArgs),
    /// Multi-snapshot recovery (mmv_sweep)
    Mmv(RunArgs),
    /// Render a CSV dataset as SVG
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment kind when no config file is given (or to override it)
    #[arg(long)]
    kind: Option<ExperimentKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use only this quantizer: none, sign or lloyd:<bits>
    #[arg(long)]
    quantizer: Option<QuantizerChoice>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Write binary dumps of every trial's measurements and estimate
    #[arg(long)]
    dump_measurements: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// JSON file with `input`, `style` and `output` keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// crb[:param], lambda, dual_poly, error_vs_m[:metric], error_vs_k[:metric], mse_vs_crb, mmv[:metric]
    #[arg(long)]
    style: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PlotConfig {
    input: Option<PathBuf>,
    style: Option<String>,
    output: Option<PathBuf>,
}

fn build_config(verb: &str, args: RunArgs) -> Result<ExperimentConfig, String> {
    let mut config = match (&args.config, args.kind) {
        (Some(path), _) => ExperimentConfig::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => return Err("either --config or --kind is required".into()),
    };
    if let Some(kind) = args.kind {
        config.experiment_kind = kind;
    }
    if config.experiment_kind.verb() != verb {
        return Err(format!(
            "experiment kind {} runs under `qscs {}`, not `qscs {verb}`",
            config.experiment_kind,
            config.experiment_kind.verb()
        ));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = Some(trials);
    }
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(q) = args.quantizer {
        config.quantizers = Some(vec![q]);
    }
    if let Some(tol) = args.tol {
        config.solver.tol = tol;
    }
    if let Some(max_iter) = args.max_iter {
        config.solver.max_iter = max_iter;
    }
    if let Some(rho) = args.rho {
        config.solver.rho = rho;
    }
    config.dump_measurements |= args.dump_measurements;
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn run_verb(verb: &str, args: RunArgs) -> Result<ExitCode, String> {
    let config = build_config(verb, args)?;
    let output = run(&config).map_err(|e| e.to_string())?;
    let paths = output.write(&config.output_dir).map_err(|e| e.to_string())?;
    for p in &paths {
        println!("wrote {}", p.display());
    }
    if output.solves > 0 {
        println!(
            "{} solves, {} unconverged ({:.1}%)",
            output.solves,
            output.unconverged,
            100.0 * output.unconverged_fraction()
        );
    }
    if output.unconverged_fraction() > MAX_UNCONVERGED_FRACTION {
        eprintln!("error: more than {:.0}% of the solves did not converge", 100.0 * MAX_UNCONVERGED_FRACTION);
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_plot(args: PlotArgs) -> Result<ExitCode, String> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str::<PlotConfig>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => PlotConfig::default(),
    };
    let input = args.input.or(file.input).ok_or("--input is required")?;
    let style: PlotStyle = args.style.or(file.style).ok_or("--style is required")?.parse().map_err(|e| format!("{e}"))?;
    let output = args.out.or(file.output).unwrap_or_else(|| input.with_extension("svg"));
    let data = Dataset::read(&input).map_err(|e| format!("{}: {e}", input.display()))?;
    let svg = emit_plot(&data, &style).map_err(|e| e.to_string())?;
    std::fs::write(&output, svg).map_err(|e| format!("{}: {e}", output.display()))?;
    println!("wrote {}", output.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Crb(a) => run_verb("crb", a),
        Command::Recover(a) => run_verb("recover", a),
        Command::Mmv(a) => run_verb("mmv", a),
        Command::Plot(a) => run_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
