use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wpsd::experiment::file_stem;
use wpsd::formats::{
    comparison_to_json, psd_to_csv, psd_to_json, read_metrics, read_signal, write_signal,
};
use wpsd::{
    parse_band, run_experiment, sweep, Error, EstimatorSpec, ExperimentConfig, Result, ScenarioSpec,
};
use wpsd_core::compare;

/// Spectral estimation experiments: periodogram family, multitaper and
/// wavelet-packet PSD.
#[derive(Parser)]
#[command(name = "wpsd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a source signal and write it as `index,value` CSV.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Run estimators on a signal and write `psd_<desc>.csv`/`.json` files.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Signal CSV to analyze instead of synthesizing one.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Full experiment: source, estimators, metrics, comparison, manifest.
    Run {
        #[command(flatten)]
        common: Common,
        /// Estimator graded against the others (defaults to the deepest WP).
        #[arg(long)]
        baseline: Option<String>,
    },
    /// One experiment per parameter value plus `sweep_summary.csv`.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        baseline: Option<String>,
        /// depth, segment_len, max_lag or k.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Grade saved `metrics_*.json` reports against a baseline.
    Compare {
        /// Metrics JSON files.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Estimator description of the baseline report.
        #[arg(long)]
        baseline: String,
        /// Directory for comparison.txt/.json (printed only when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// single_tone[:nu0=..,amplitude=..,phase=..,noise=..],
    /// partial_band[:lo=..,hi=..,power=..,noise=..] or custom:path=<csv>.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// method:key=val,... (periodogram, welch, bt, mtse, wp); repeatable.
    #[arg(long)]
    estimator: Vec<String>,
    /// kind:lo:hi with kind pass or stop; repeatable.
    #[arg(long)]
    band: Vec<String>,
    /// Output file (generate) or directory (other commands).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config or manifest; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn config(&self, baseline: Option<&String>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::defaults_for(ScenarioSpec::single_tone()),
        };
        if let Some(s) = &self.scenario {
            cfg.scenario = s.parse()?;
        }
        if let Some(n) = self.length {
            cfg.length = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if !self.estimator.is_empty() {
            cfg.estimators = self
                .estimator
                .iter()
                .map(|e| e.parse())
                .collect::<Result<Vec<EstimatorSpec>>>()?;
        }
        if !self.band.is_empty() {
            cfg.bands = self
                .band
                .iter()
                .map(|b| parse_band(b))
                .collect::<Result<_>>()?;
        }
        if let Some(b) = baseline {
            cfg.baseline = Some(b.clone());
        }
        if let Some(out) = &self.out {
            cfg.output_dir = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.output_dir
        .clone()
        .ok_or_else(|| Error::Config("--out is required".into()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common } => {
            let cfg = common.config(None)?;
            let signal = cfg.scenario.build_signal(cfg.length, cfg.seed)?;
            let out = out_dir(&cfg)?;
            write_signal(&out, &signal)?;
            println!("wrote {} samples to {}", signal.len(), out.display());
        }
        Command::Estimate { common, input } => {
            let cfg = common.config(None)?;
            let signal = match &input {
                Some(p) => read_signal(p)?,
                None => cfg.scenario.build_signal(cfg.length, cfg.seed)?,
            };
            let out = out_dir(&cfg)?;
            // Compute everything first so a failing estimator leaves no files.
            let estimates = cfg
                .estimators
                .iter()
                .map(|e| e.estimate(&signal))
                .collect::<Result<Vec<_>>>()?;
            fs::create_dir_all(&out).map_err(|source| Error::Io {
                path: out.clone(),
                source,
            })?;
            for est in &estimates {
                let stem = file_stem(est.estimator_desc());
                write(&out.join(format!("psd_{stem}.csv")), &psd_to_csv(est))?;
                write(&out.join(format!("psd_{stem}.json")), &psd_to_json(est))?;
                println!("{}: integral {:.6}", est.estimator_desc(), est.integral());
            }
        }
        Command::Run { common, baseline } => {
            let cfg = common.config(baseline.as_ref())?;
            let out = out_dir(&cfg)?;
            let bundle = run_experiment(&cfg, &out)?;
            print!("{}", bundle.outcome.comparison.render_text());
            println!("wrote {} files to {}", bundle.files.len(), out.display());
        }
        Command::Sweep {
            common,
            baseline,
            param,
            values,
        } => {
            let cfg = common.config(baseline.as_ref())?;
            let out = out_dir(&cfg)?;
            let bundles = sweep(&cfg, &param, &values, &out)?;
            println!(
                "wrote {} sub-bundles and sweep_summary.csv to {}",
                bundles.len(),
                out.display()
            );
        }
        Command::Compare {
            reports,
            baseline,
            out,
        } => {
            let reports = reports
                .iter()
                .map(|p| read_metrics(p))
                .collect::<Result<Vec<_>>>()?;
            let table = compare(&reports, &baseline)?;
            let text = table.render_text();
            print!("{text}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                write(&dir.join("comparison.txt"), &text)?;
                write(&dir.join("comparison.json"), &comparison_to_json(&table))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Every error variant already renders its cause.
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
