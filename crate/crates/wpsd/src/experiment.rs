//! Experiment configuration, all-or-nothing artifact bundles and sweeps.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wpsd_core::metrics::{compare, evaluate, Scenario};
use wpsd_core::{
    make_partial_band, make_tone, make_white_noise, BandKind, BandSpec, BoundaryMode, Comparison,
    MetricsReport, PsdEstimate, Signal,
};

use crate::error::{io_err, json_err, Error, Result};
use crate::estimator::EstimatorSpec;
use crate::formats::{
    comparison_to_csv, comparison_to_json, metric_values, metrics_to_json, psd_to_csv, read_signal,
    write_file, METRIC_COLUMNS,
};
use crate::params::Params;

/// Default variance of the white-noise floor added to synthetic sources.
pub const DEFAULT_NOISE: f64 = 1e-3;
/// Smallest accepted signal length.
pub const MIN_LENGTH: usize = 64;
/// Parameters accepted by [`sweep`].
pub const SWEEP_PARAMS: [&str; 4] = ["depth", "segment_len", "max_lag", "k"];

const NOISE_STREAM: u64 = 0x6A09_E667_F3BC_C908;

/// Source of the analyzed signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    SingleTone {
        nu0: f64,
        amplitude: f64,
        phase: f64,
        noise: f64,
    },
    PartialBand {
        lo: f64,
        hi: f64,
        power: f64,
        noise: f64,
    },
    /// Samples read from a signal CSV file.
    Custom { path: PathBuf },
}

impl ScenarioSpec {
    pub fn single_tone() -> Self {
        Self::SingleTone {
            nu0: 0.5,
            amplitude: 1.0,
            phase: 0.0,
            noise: DEFAULT_NOISE,
        }
    }

    pub fn partial_band() -> Self {
        Self::PartialBand {
            lo: 0.25,
            hi: 0.75,
            power: 1.0,
            noise: DEFAULT_NOISE,
        }
    }

    /// Deterministic source plus a seeded white-noise floor (`noise` is its
    /// variance; 0 disables it).
    pub fn build_signal(&self, length: usize, seed: u64) -> Result<Signal> {
        let (clean, noise) = match self {
            Self::SingleTone {
                nu0,
                amplitude,
                phase,
                noise,
            } => (make_tone(length, *nu0, *amplitude, *phase)?, *noise),
            Self::PartialBand {
                lo,
                hi,
                power,
                noise,
            } => (make_partial_band(length, *lo, *hi, *power, seed)?, *noise),
            Self::Custom { path } => {
                let s = read_signal(path)?;
                if s.len() != length {
                    return Err(Error::Config(format!(
                        "{} holds {} samples but length is {length}",
                        path.display(),
                        s.len()
                    )));
                }
                return Ok(s);
            }
        };
        if noise < 0.0 || !noise.is_finite() {
            return Err(Error::Config(format!(
                "noise variance {noise} must be >= 0"
            )));
        }
        if noise == 0.0 {
            return Ok(clean);
        }
        let floor = make_white_noise(length, noise, seed ^ NOISE_STREAM)?;
        let samples = clean
            .samples()
            .iter()
            .zip(floor.samples())
            .map(|(a, b)| a + b)
            .collect();
        let desc = format!("{}+noise(sigma2={noise})", clean.source_desc());
        Ok(Signal::new(samples, desc, seed)?)
    }

    pub fn metrics_scenario(&self) -> Scenario {
        match *self {
            Self::SingleTone { nu0, .. } => Scenario::SingleTone { nu0 },
            Self::PartialBand { lo, hi, .. } => Scenario::PartialBand { lo, hi },
            Self::Custom { .. } => Scenario::Custom,
        }
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SingleTone {
                nu0,
                amplitude,
                phase,
                noise,
            } => write!(
                f,
                "single_tone:nu0={nu0},amplitude={amplitude},phase={phase},noise={noise}"
            ),
            Self::PartialBand {
                lo,
                hi,
                power,
                noise,
            } => write!(
                f,
                "partial_band:lo={lo},hi={hi},power={power},noise={noise}"
            ),
            Self::Custom { path } => write!(f, "custom:path={}", path.display()),
        }
    }
}

impl FromStr for ScenarioSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Params::parse(s)?;
        let spec = match p.name.replace('-', "_").as_str() {
            "single_tone" | "singletone" | "tone" => Self::SingleTone {
                nu0: p.take_or(&["nu0", "freq"], 0.5)?,
                amplitude: p.take_or(&["amplitude", "a"], 1.0)?,
                phase: p.take_or(&["phase"], 0.0)?,
                noise: p.take_or(&["noise"], DEFAULT_NOISE)?,
            },
            "partial_band" | "partialband" | "band" => Self::PartialBand {
                lo: p.take_or(&["lo"], 0.25)?,
                hi: p.take_or(&["hi"], 0.75)?,
                power: p.take_or(&["power"], 1.0)?,
                noise: p.take_or(&["noise"], DEFAULT_NOISE)?,
            },
            "custom" => Self::Custom {
                path: p.take::<PathBuf>(&["path", "file"])?.ok_or_else(|| {
                    Error::Format("custom scenario needs path=<signal.csv>".into())
                })?,
            },
            other => {
                return Err(Error::Format(format!(
                    "unknown scenario `{other}` (expected single_tone, partial_band or custom)"
                )))
            }
        };
        p.finish()?;
        Ok(spec)
    }
}

/// `kind:lo:hi` with kind one of pass, stop, custom.
pub fn parse_band(text: &str) -> Result<BandSpec> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [kind, lo, hi] = parts[..] else {
        return Err(Error::Format(format!("band `{text}`: expected kind:lo:hi")));
    };
    let kind = match kind.to_ascii_lowercase().as_str() {
        "pass" | "passband" => BandKind::Passband,
        "stop" | "stopband" => BandKind::Stopband,
        "custom" => BandKind::Custom,
        other => {
            return Err(Error::Format(format!(
                "band `{text}`: unknown kind `{other}`"
            )))
        }
    };
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::Format(format!("band `{text}`: `{v}` is not a number")))
    };
    Ok(BandSpec::new(num(lo)?, num(hi)?, kind)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub length: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub bands: Vec<BandSpec>,
    /// Estimator (spec text or description) the others are graded against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    /// Where the bundle goes. Not echoed into manifests, so that bundles do
    /// not depend on their location.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Estimator set of the reference comparison: periodogram, Welch 64/50%
    /// Hamming, multitaper NW=4 K=7, and db8 wavelet packets at J=5 and J=8.
    pub fn defaults_for(scenario: ScenarioSpec) -> Self {
        Self {
            scenario,
            length: 12800,
            seed: 42,
            estimators: default_estimators(),
            bands: Vec::new(),
            baseline: None,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.estimators.is_empty() {
            return Err(Error::Config("at least one estimator is required".into()));
        }
        if self.length < MIN_LENGTH {
            return Err(Error::Config(format!(
                "length {} is below the minimum of {MIN_LENGTH}",
                self.length
            )));
        }
        let mut seen = BTreeSet::new();
        for e in &self.estimators {
            if !seen.insert(e.to_string()) {
                return Err(Error::Config(format!("estimator `{e}` listed twice")));
            }
        }
        if let Some(b) = &self.baseline {
            if self.baseline_index_by_name(b).is_none() {
                return Err(Error::Config(format!(
                    "baseline `{b}` is not among the estimators"
                )));
            }
        }
        Ok(())
    }

    fn baseline_index_by_name(&self, name: &str) -> Option<usize> {
        let parsed = name.parse::<EstimatorSpec>().ok();
        self.estimators
            .iter()
            .position(|e| Some(e) == parsed.as_ref() || e.to_string() == name)
    }

    /// Explicit baseline, else the deepest wavelet-packet estimator (first
    /// on ties), else the first estimator.
    pub fn baseline_index(&self) -> usize {
        if let Some(i) = self
            .baseline
            .as_deref()
            .and_then(|b| self.baseline_index_by_name(b))
        {
            return i;
        }
        let mut best: Option<(usize, u32)> = None;
        for (i, e) in self.estimators.iter().enumerate() {
            if let EstimatorSpec::Wp { depth, .. } = e {
                if best.is_none_or(|(_, d)| *depth > d) {
                    best = Some((i, *depth));
                }
            }
        }
        best.map(|(i, _)| i).unwrap_or(0)
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        // Manifests embed the config under `config`.
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err(path))?;
        let value = match value.get("config") {
            Some(inner) if value.get("files").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(json_err(path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text, path)
    }
}

pub fn default_estimators() -> Vec<EstimatorSpec> {
    use wpsd_core::WindowKind;
    vec![
        EstimatorSpec::Periodogram {
            window: WindowKind::Rectangular,
            nfft: None,
        },
        EstimatorSpec::Welch {
            segment: 64,
            overlap: 0.5,
            window: WindowKind::Hamming,
            nfft: None,
        },
        EstimatorSpec::Mtse {
            nw: 4.0,
            k: 7,
            nfft: None,
        },
        EstimatorSpec::wp("db8", 5, BoundaryMode::ZeroPad),
        EstimatorSpec::wp("db8", 8, BoundaryMode::ZeroPad),
    ]
}

/// Everything computed by one experiment, before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub signal: Signal,
    pub estimates: Vec<PsdEstimate>,
    pub reports: Vec<MetricsReport>,
    pub comparison: Comparison,
}

/// Estimates, metrics and comparison without touching the filesystem.
pub fn evaluate_config(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let signal = config.scenario.build_signal(config.length, config.seed)?;
    let scenario = config.scenario.metrics_scenario();
    let mut estimates = Vec::with_capacity(config.estimators.len());
    let mut reports = Vec::with_capacity(config.estimators.len());
    for spec in &config.estimators {
        let est = spec.estimate(&signal)?;
        let report =
            evaluate(&est, &scenario, &config.bands).map_err(|source| Error::Estimator {
                spec: spec.to_string(),
                source,
            })?;
        estimates.push(est);
        reports.push(report);
    }
    let mut descs = BTreeSet::new();
    for est in &estimates {
        if !descs.insert(file_stem(est.estimator_desc())) {
            return Err(Error::Config(format!(
                "two estimators share the file name `{}`",
                file_stem(est.estimator_desc())
            )));
        }
    }
    let baseline = reports[config.baseline_index()].estimator_desc.clone();
    let comparison = compare(&reports, &baseline)?;
    Ok(Outcome {
        signal,
        estimates,
        reports,
        comparison,
    })
}

/// File-name-safe form of an estimator description.
pub fn file_stem(desc: &str) -> String {
    let mut out = String::with_capacity(desc.len());
    for c in desc.chars() {
        let c = if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
            c
        } else {
            '_'
        };
        if !(c == '_' && out.ends_with('_')) {
            out.push(c);
        }
    }
    out.trim_matches('_').to_string()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub baseline: String,
    pub config: ExperimentConfig,
    pub files: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Written bundle: its directory and the computed results.
#[derive(Debug)]
pub struct Bundle {
    pub dir: PathBuf,
    pub outcome: Outcome,
    pub files: Vec<String>,
}

fn bundle_files(config: &ExperimentConfig, outcome: &Outcome) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for (est, report) in outcome.estimates.iter().zip(&outcome.reports) {
        let stem = file_stem(est.estimator_desc());
        files.push((format!("psd_{stem}.csv"), psd_to_csv(est).into_bytes()));
        files.push((
            format!("metrics_{stem}.json"),
            metrics_to_json(report).into_bytes(),
        ));
    }
    files.push((
        "comparison.txt".into(),
        outcome.comparison.render_text().into_bytes(),
    ));
    files.push((
        "comparison.json".into(),
        comparison_to_json(&outcome.comparison).into_bytes(),
    ));
    files.push((
        "comparison.csv".into(),
        comparison_to_csv(&outcome.comparison).into_bytes(),
    ));
    files.sort_by(|a, b| a.0.cmp(&b.0));
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        baseline: outcome.comparison.baseline.clone(),
        config: config.clone(),
        files: files
            .iter()
            .map(|(name, bytes)| ManifestEntry {
                name: name.clone(),
                sha256: sha256_hex(bytes),
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("plain data serializes") + "\n";
    files.push(("manifest.json".into(), text.into_bytes()));
    files
}

/// Creates a staging directory next to `out`; `commit` moves it into place.
struct Staging {
    dir: tempfile::TempDir,
    out: PathBuf,
}

impl Staging {
    fn new(out: &Path) -> Result<Self> {
        if out.exists() {
            let empty = out.is_dir() && fs::read_dir(out).map_err(io_err(out))?.next().is_none();
            if !empty {
                return Err(Error::Config(format!(
                    "output directory {} already exists and is not empty",
                    out.display()
                )));
            }
        }
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(io_err(&parent))?;
        let dir = tempfile::Builder::new()
            .prefix(".wpsd-staging-")
            .tempdir_in(&parent)
            .map_err(io_err(&parent))?;
        Ok(Self {
            dir,
            out: out.to_path_buf(),
        })
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn commit(self) -> Result<()> {
        if self.out.exists() {
            fs::remove_dir(&self.out).map_err(io_err(&self.out))?;
        }
        let staged = self.dir.keep();
        fs::rename(&staged, &self.out).map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            Error::Io {
                path: self.out.clone(),
                source: e,
            }
        })
    }
}

fn write_bundle(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<()> {
    for (name, bytes) in files {
        write_file(&dir.join(name), bytes)?;
    }
    Ok(())
}

/// Runs every estimator, then writes the whole bundle to `out` or nothing.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<Bundle> {
    let outcome = evaluate_config(config)?;
    let files = bundle_files(config, &outcome);
    let staging = Staging::new(out)?;
    write_bundle(staging.path(), &files)?;
    staging.commit()?;
    Ok(Bundle {
        dir: out.to_path_buf(),
        outcome,
        files: files.into_iter().map(|(n, _)| n).collect(),
    })
}

/// Applies one sweep value to every estimator that has the parameter.
pub fn sweep_config(
    config: &ExperimentConfig,
    param: &str,
    value: f64,
) -> Result<ExperimentConfig> {
    let param = param.to_ascii_lowercase();
    if !SWEEP_PARAMS.contains(&param.as_str()) {
        return Err(Error::Config(format!(
            "cannot sweep `{param}` (expected one of {})",
            SWEEP_PARAMS.join(", ")
        )));
    }
    let mut touched = false;
    let mut out = config.clone();
    for e in &mut out.estimators {
        if let Some(updated) = e.with_param(&param, value) {
            *e = updated;
            touched = true;
        } else if e.with_param(&param, 1.0).is_some() {
            return Err(Error::Config(format!(
                "`{param}` needs a non-negative integer, got {value}"
            )));
        }
    }
    if !touched {
        return Err(Error::Config(format!(
            "no estimator has parameter `{param}`"
        )));
    }
    // The baseline follows its estimator through the sweep.
    if let Some(b) = &config.baseline {
        if let Some(i) = config.baseline_index_by_name(b) {
            out.baseline = Some(out.estimators[i].to_string());
        }
    }
    // Estimators that differed only in the swept parameter collapse into one.
    let mut seen = Vec::new();
    out.estimators.retain(|e| {
        let text = e.to_string();
        let fresh = !seen.contains(&text);
        seen.push(text);
        fresh
    });
    Ok(out)
}

/// One sub-bundle per value plus `sweep_summary.csv`; aborts (writing
/// nothing) on the first failing value.
pub fn sweep(
    config: &ExperimentConfig,
    param: &str,
    values: &[f64],
    out: &Path,
) -> Result<Vec<Bundle>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|v| sweep_config(config, param, *v))
        .collect::<Result<Vec<_>>>()?;
    let staging = Staging::new(out)?;
    let mut bundles = Vec::new();
    let mut header = vec![
        "parameter".to_string(),
        "value".into(),
        "estimator_desc".into(),
    ];
    header.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (value, cfg) in values.iter().zip(&configs) {
        let sub = format!("{param}_{value}");
        let bundle = run_experiment(cfg, &staging.path().join(&sub))?;
        for r in &bundle.outcome.reports {
            let mut row = vec![
                param.to_string(),
                value.to_string(),
                r.estimator_desc.clone(),
            ];
            row.extend(
                metric_values(r)
                    .into_iter()
                    .map(|v| v.map(|v| v.to_string()).unwrap_or_default()),
            );
            rows.push(row);
        }
        bundles.push(Bundle {
            dir: out.join(&sub),
            ..bundle
        });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in &rows {
        w.write_record(r).expect("in-memory write");
    }
    let summary = w.into_inner().expect("in-memory flush");
    write_file(&staging.path().join("sweep_summary.csv"), &summary)?;
    staging.commit()?;
    Ok(bundles)
}

/// Checks every manifest checksum against the files on disk.
pub fn verify_bundle(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(json_err(&path))?;
    for entry in &manifest.files {
        let p = dir.join(&entry.name);
        let bytes = fs::read(&p).map_err(io_err(&p))?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(Error::Format(format!(
                "checksum mismatch for {}",
                p.display()
            )));
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_text_round_trip() {
        for text in [
            "single_tone:nu0=0.5,amplitude=1,phase=0,noise=0.001",
            "partial_band:lo=0.25,hi=0.75,power=1,noise=0",
            "custom:path=sig.csv",
        ] {
            let s: ScenarioSpec = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert_eq!(
            "tone".parse::<ScenarioSpec>().unwrap(),
            ScenarioSpec::single_tone()
        );
        assert!("custom".parse::<ScenarioSpec>().is_err());
        assert!("chirp".parse::<ScenarioSpec>().is_err());
    }

    #[test]
    fn bands_parse() {
        let b = parse_band("pass:0.3:0.7").unwrap();
        assert_eq!((b.lo, b.hi, b.kind), (0.3, 0.7, BandKind::Passband));
        assert!(parse_band("pass:0.7:0.3").is_err());
        assert!(parse_band("pass:0.3").is_err());
        assert!(parse_band("side:0.1:0.2").is_err());
    }

    #[test]
    fn file_stems() {
        assert_eq!(
            file_stem("wp(filter=db8,J=5,boundary=zeropad)"),
            "wp_filter_db8_J_5_boundary_zeropad"
        );
        assert_eq!(
            file_stem("mtse(NW=4,K=7,nfft=16384)"),
            "mtse_NW_4_K_7_nfft_16384"
        );
    }

    #[test]
    fn baseline_choice() {
        let mut c = ExperimentConfig::defaults_for(ScenarioSpec::single_tone());
        assert_eq!(c.baseline_index(), 4);
        c.baseline = Some("wp:depth=5".into());
        assert_eq!(c.baseline_index(), 3);
        c.estimators.truncate(2);
        c.baseline = None;
        assert_eq!(c.baseline_index(), 0);
        c.baseline = Some("wp:depth=5".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::defaults_for(ScenarioSpec::partial_band());
        c.validate().unwrap();
        c.length = 32;
        assert!(c.validate().is_err());
        c.length = 128;
        c.estimators.push(c.estimators[0].clone());
        assert!(c.validate().is_err());
        c.estimators.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn noise_floor_is_seeded() {
        let sc = ScenarioSpec::single_tone();
        let a = sc.build_signal(256, 1).unwrap();
        let b = sc.build_signal(256, 1).unwrap();
        let c = sc.build_signal(256, 2).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_ne!(a.samples(), c.samples());
        let clean = ScenarioSpec::SingleTone {
            nu0: 0.5,
            amplitude: 1.0,
            phase: 0.0,
            noise: 0.0,
        };
        assert_eq!(
            clean.build_signal(8, 3).unwrap().samples(),
            &[1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0]
        );
    }

    #[test]
    fn sweep_config_updates_matching_estimators() {
        let c = ExperimentConfig::defaults_for(ScenarioSpec::partial_band());
        let s = sweep_config(&c, "depth", 7.0).unwrap();
        let depths: Vec<u32> = s
            .estimators
            .iter()
            .filter_map(|e| match e {
                EstimatorSpec::Wp { depth, .. } => Some(*depth),
                _ => None,
            })
            .collect();
        assert_eq!(depths, [7]);
        assert_eq!(s.estimators.len(), 4);
        s.validate().unwrap();
        assert!(sweep_config(&c, "max_lag", 8.0).is_err());
        assert!(sweep_config(&c, "colour", 1.0).is_err());
        assert!(sweep_config(&c, "depth", 2.5).is_err());
    }
}
