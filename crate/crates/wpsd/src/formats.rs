//! On-disk formats: signal CSV, PSD CSV/JSON, taper CSV, filter coefficient
//! files, metrics and comparison tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wpsd_core::metrics::Metric;
use wpsd_core::multitaper::TaperSet;
use wpsd_core::wpt::{parse_coefficients, BUILTIN_FILTERS};
use wpsd_core::{Comparison, FilterPair, MetricsReport, PsdEstimate, Signal};

use crate::error::{csv_err, io_err, json_err, Error, Result};

/// Paraunitarity tolerance for coefficient files.
pub const FILE_FILTER_TOLERANCE: f64 = 1e-6;

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn parse_f64(field: &str, what: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Format(format!("record {line}: `{field}` is not a number ({what})")))
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str], path: &Path) -> Result<()> {
    let header = reader.headers().map_err(csv_err(path))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::Format(format!(
            "{}: expected header `{}`, found `{}`",
            path.display(),
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

pub fn signal_to_csv(signal: &Signal) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in signal.samples().iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

/// Parses `index,value` rows; indices must run 0, 1, 2, … .
pub fn signal_from_csv(text: &str, path: &Path) -> Result<Signal> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, &["index", "value"], path)?;
    let mut samples = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let idx = parse_f64(&rec[0], "index", line)?;
        if idx != samples.len() as f64 {
            return Err(Error::Format(format!(
                "{}: record {line} has index {idx}, expected {}",
                path.display(),
                samples.len()
            )));
        }
        samples.push(parse_f64(&rec[1], "value", line)?);
    }
    let desc = format!("csv({})", path.display());
    Ok(Signal::new(samples, desc, 0)?)
}

pub fn write_signal(path: &Path, signal: &Signal) -> Result<()> {
    fs::write(path, signal_to_csv(signal)).map_err(io_err(path))
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    signal_from_csv(&text, path)
}

/// `freq,density` rows preceded by `# key: value` comment lines.
pub fn psd_to_csv(est: &PsdEstimate) -> String {
    let mut out = format!(
        "# estimator_desc: {}\n# bin_width: {}\n# analyzed_power: {}\n# clamped_bins: {}\nfreq,density\n",
        est.estimator_desc(),
        est.bin_width(),
        est.analyzed_power(),
        est.clamped_bins()
    );
    for (f, v) in est.freqs().iter().zip(est.values()) {
        out.push_str(&format!("{f},{v}\n"));
    }
    out
}

pub fn psd_from_csv(text: &str, path: &Path) -> Result<PsdEstimate> {
    let mut desc = None;
    let mut width = None;
    let mut power = 0.0;
    let mut clamped = 0usize;
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let Some((key, value)) = line.trim_start_matches('#').split_once(':') else {
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "estimator_desc" => desc = Some(value.to_string()),
            "bin_width" => width = Some(parse_f64(value, "bin_width", 0)?),
            "analyzed_power" => power = parse_f64(value, "analyzed_power", 0)?,
            "clamped_bins" => {
                clamped = value
                    .parse()
                    .map_err(|_| Error::Format(format!("bad clamped_bins `{value}`")))?
            }
            _ => {}
        }
    }
    let mut reader = csv_reader(text);
    check_header(&mut reader, &["freq", "density"], path)?;
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        freqs.push(parse_f64(&rec[0], "freq", line)?);
        values.push(parse_f64(&rec[1], "density", line)?);
    }
    let width = match width {
        Some(w) => w,
        None if freqs.len() >= 2 => freqs[1] - freqs[0],
        None => return Err(Error::Format(format!("{}: no bin width", path.display()))),
    };
    let desc = desc.unwrap_or_else(|| "unknown".to_string());
    Ok(PsdEstimate::new(freqs, values, width, desc, power)?.with_clamped_bins(clamped))
}

#[derive(Debug, Serialize, Deserialize)]
struct PsdRecord {
    estimator_desc: String,
    bin_width: f64,
    analyzed_power: f64,
    clamped_bins: usize,
    freq: Vec<f64>,
    density: Vec<f64>,
}

pub fn psd_to_json(est: &PsdEstimate) -> String {
    let rec = PsdRecord {
        estimator_desc: est.estimator_desc().to_string(),
        bin_width: est.bin_width(),
        analyzed_power: est.analyzed_power(),
        clamped_bins: est.clamped_bins(),
        freq: est.freqs().to_vec(),
        density: est.values().to_vec(),
    };
    serde_json::to_string_pretty(&rec).expect("plain data serializes") + "\n"
}

pub fn psd_from_json(text: &str, path: &Path) -> Result<PsdEstimate> {
    let rec: PsdRecord = serde_json::from_str(text).map_err(json_err(path))?;
    Ok(PsdEstimate::new(
        rec.freq,
        rec.density,
        rec.bin_width,
        rec.estimator_desc,
        rec.analyzed_power,
    )?
    .with_clamped_bins(rec.clamped_bins))
}

pub fn write_psd(path: &Path, est: &PsdEstimate) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        psd_to_json(est)
    } else {
        psd_to_csv(est)
    };
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_psd(path: &Path) -> Result<PsdEstimate> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    if path.extension().is_some_and(|e| e == "json") {
        psd_from_json(&text, path)
    } else {
        psd_from_csv(&text, path)
    }
}

/// One taper per column (`taper_0`, `taper_1`, …), one sample per row.
pub fn tapers_to_csv(set: &TaperSet) -> String {
    let eig: Vec<String> = set.eigenvalues().iter().map(|v| v.to_string()).collect();
    let mut out = format!(
        "# nw: {}\n# eigenvalues: {}\n",
        set.time_bandwidth(),
        eig.join(" ")
    );
    let header: Vec<String> = (0..set.count()).map(|k| format!("taper_{k}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for n in 0..set.taper_len() {
        let row: Vec<String> = set.tapers().iter().map(|t| t[n].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads tapers back; concentrations are recomputed from the samples.
pub fn tapers_from_csv(text: &str, path: &Path) -> Result<TaperSet> {
    let nw = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.trim_start_matches('#').trim().strip_prefix("nw:"))
        .map(|v| parse_f64(v.trim(), "nw", 0))
        .next()
        .ok_or_else(|| Error::Format(format!("{}: missing `# nw:` line", path.display())))??;
    let mut reader = csv_reader(text);
    let k = reader.headers().map_err(csv_err(path))?.len();
    let mut tapers = vec![Vec::new(); k];
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        for (t, field) in tapers.iter_mut().zip(rec.iter()) {
            t.push(parse_f64(field, "taper", line)?);
        }
    }
    Ok(TaperSet::custom(tapers, nw)?)
}

/// A built-in name (`haar`, `db1`..`db15`) or a path to a coefficient file.
pub fn load_filter(name_or_path: &str) -> Result<FilterPair> {
    let lower = name_or_path.to_ascii_lowercase();
    if lower == "db1" || BUILTIN_FILTERS.contains(&lower.as_str()) {
        return Ok(FilterPair::builtin(&lower)?);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::Format(format!(
            "`{name_or_path}` is neither a built-in filter ({}) nor an existing file",
            BUILTIN_FILTERS.join(", ")
        )));
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let h = parse_coefficients(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name_or_path.to_string());
    Ok(FilterPair::from_lowpass(name, h, FILE_FILTER_TOLERANCE)?)
}

/// Scalar columns of [`MetricsReport`], in CSV order.
pub const METRIC_COLUMNS: [&str; 11] = [
    "mean_pass",
    "var_pass",
    "mean_pass_db",
    "var_pass_db",
    "mean_stop",
    "var_stop",
    "mean_stop_db",
    "var_stop_db",
    "sidelobe_suppression_db",
    "transition_width",
    "main_lobe_width",
];

pub fn metric_values(r: &MetricsReport) -> [Option<f64>; 11] {
    [
        r.mean_pass,
        r.var_pass,
        r.mean_pass_db,
        r.var_pass_db,
        r.mean_stop,
        r.var_stop,
        r.mean_stop_db,
        r.var_stop_db,
        r.sidelobe_suppression_db,
        r.transition_width,
        r.main_lobe_width,
    ]
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// One row per report; metrics that do not apply are left empty.
pub fn metrics_to_csv(reports: &[MetricsReport]) -> String {
    let mut header = vec!["estimator_desc".to_string(), "scenario".to_string()];
    header.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row = vec![r.estimator_desc.clone(), r.scenario.clone()];
            row.extend(metric_values(r).into_iter().map(opt));
            row
        })
        .collect();
    csv_string(&header, &rows)
}

pub fn metrics_to_json(report: &MetricsReport) -> String {
    serde_json::to_string_pretty(report).expect("plain data serializes") + "\n"
}

pub fn read_metrics(path: &Path) -> Result<MetricsReport> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(json_err(path))
}

pub fn comparison_to_json(c: &Comparison) -> String {
    serde_json::to_string_pretty(c).expect("plain data serializes") + "\n"
}

/// Grade symbols, one row per comparand.
pub fn comparison_to_csv(c: &Comparison) -> String {
    let mut header = vec!["estimator_desc".to_string()];
    header.extend(c.columns.iter().map(|m: &Metric| m.title().to_string()));
    let rows: Vec<Vec<String>> = c
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.estimator_desc.clone()];
            row.extend(r.cells.iter().map(|cell| cell.grade.symbol().to_string()));
            row
        })
        .collect();
    csv_string(&header, &rows)
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents).map_err(io_err(path))
}
