//! Quality metrics for PSD estimates and the cross-estimator grading table.
//!
//! Measurement conventions:
//! - band statistics use the bins whose grid frequency falls in the band,
//!   unbiased sample variance, and a dB copy floored at -200 dB;
//! - the main lobe around a peak extends to the first local minimum on each
//!   side; sidelobe suppression compares the peak with the largest value
//!   outside it;
//! - resolution is the -3 dB width of the contiguous run of bins around the
//!   peak;
//! - transition width is measured on a 5-bin median-smoothed copy between the
//!   last -3 dB passband point and the first point within +3 dB of the
//!   stopband level, searched within ±0.125 of the nominal edge.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fourier::PsdEstimate;

/// dB floor for zero densities.
pub const DB_FLOOR: f64 = -200.0;
/// Cap returned by [`sidelobe_suppression`] when nothing lies outside the main lobe.
pub const SUPPRESSION_CAP_DB: f64 = 200.0;
/// Search half-window around a nominal band edge.
pub const EDGE_SEARCH: f64 = 0.125;
/// Allowed distance between the global maximum and the caller's hint.
pub const PEAK_TOLERANCE: f64 = 0.05;

pub fn to_db(v: f64) -> f64 {
    if v > 0.0 {
        (10.0 * v.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BandKind {
    Passband,
    Stopband,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandSpec {
    pub lo: f64,
    pub hi: f64,
    pub kind: BandKind,
}

impl BandSpec {
    pub fn new(lo: f64, hi: f64, kind: BandKind) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(invalid(
                "band",
                format!("need 0 <= lo < hi <= 1, got [{lo}, {hi}]"),
            ));
        }
        Ok(Self { lo, hi, kind })
    }

    pub fn contains(&self, f: f64) -> bool {
        self.lo <= f && f <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandStats {
    pub mean: f64,
    pub variance: f64,
    pub mean_db: f64,
    pub variance_db: f64,
    pub bins: usize,
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Mean and unbiased variance of the densities in `band`.
pub fn band_stats(est: &PsdEstimate, band: &BandSpec) -> Result<BandStats> {
    band_stats_union(est, core::slice::from_ref(band))
}

/// Like [`band_stats`] over the union of several bands.
pub fn band_stats_union(est: &PsdEstimate, bands: &[BandSpec]) -> Result<BandStats> {
    let selected: Vec<f64> = est
        .freqs()
        .iter()
        .zip(est.values())
        .filter(|(f, _)| bands.iter().any(|b| b.contains(**f)))
        .map(|(_, v)| *v)
        .collect();
    if selected.len() < 2 {
        let (lo, hi) = bands
            .iter()
            .fold((1.0f64, 0.0f64), |(lo, hi), b| (lo.min(b.lo), hi.max(b.hi)));
        return Err(Error::BandTooNarrow {
            lo,
            hi,
            bins: selected.len(),
        });
    }
    let (mean, variance) = mean_var(&selected);
    let db: Vec<f64> = selected.iter().map(|&v| to_db(v)).collect();
    let (mean_db, variance_db) = mean_var(&db);
    Ok(BandStats {
        mean,
        variance,
        mean_db,
        variance_db,
        bins: selected.len(),
    })
}

fn peak_index(est: &PsdEstimate, peak_hint: f64) -> Result<usize> {
    let (idx, _) = est
        .values()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("estimate has at least two points");
    let found = est.freqs()[idx];
    if (found - peak_hint).abs() > PEAK_TOLERANCE {
        return Err(Error::PeakNotNearHint {
            hint: peak_hint,
            found,
            tolerance: PEAK_TOLERANCE,
        });
    }
    Ok(idx)
}

/// Inclusive index range of the main lobe: from the peak outwards while the
/// density keeps strictly decreasing.
pub fn main_lobe(values: &[f64], peak: usize) -> (usize, usize) {
    let mut lo = peak;
    while lo > 0 && values[lo - 1] < values[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < values.len() && values[hi + 1] < values[hi] {
        hi += 1;
    }
    (lo, hi)
}

/// `10·log10(peak / max outside the main lobe)`, capped at +200 dB.
pub fn sidelobe_suppression(est: &PsdEstimate, peak_hint: f64) -> Result<f64> {
    let peak = peak_index(est, peak_hint)?;
    let values = est.values();
    let (lo, hi) = main_lobe(values, peak);
    let outside = values[..lo]
        .iter()
        .chain(&values[hi + 1..])
        .fold(0.0f64, |a, &v| a.max(v));
    let top = values[peak];
    if outside <= 0.0 || top <= 0.0 {
        return Ok(SUPPRESSION_CAP_DB);
    }
    Ok((10.0 * (top / outside).log10()).min(SUPPRESSION_CAP_DB))
}

/// Width of the contiguous run of bins around the peak at or above half the
/// peak density, as `bins × bin_width`.
pub fn main_lobe_width(est: &PsdEstimate, peak_hint: f64) -> Result<f64> {
    let peak = peak_index(est, peak_hint)?;
    let values = est.values();
    let half = values[peak] * 0.5;
    let mut lo = peak;
    while lo > 0 && values[lo - 1] >= half {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < values.len() && values[hi + 1] >= half {
        hi += 1;
    }
    Ok((hi - lo + 1) as f64 * est.bin_width())
}

/// Running median over `width` points (shrinking at the ends).
pub fn median_smooth(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let mut buf = Vec::with_capacity(width);
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            buf.clear();
            buf.extend_from_slice(&values[lo..hi]);
            buf.sort_by(f64::total_cmp);
            let m = buf.len();
            if m % 2 == 1 {
                buf[m / 2]
            } else {
                0.5 * (buf[m / 2 - 1] + buf[m / 2])
            }
        })
        .collect()
}

/// Distance between the -3 dB passband point and the +3 dB-above-stopband
/// point around `nominal_edge`. `None` when either crossing is missing within
/// ±0.125 of the edge. Which side is the passband is detected from the data.
pub fn transition_width(
    est: &PsdEstimate,
    nominal_edge: f64,
    pass_ref: f64,
    stop_ref: f64,
) -> Result<Option<f64>> {
    if !(pass_ref > stop_ref && stop_ref > 0.0) {
        return Err(invalid(
            "pass_ref/stop_ref",
            format!("need pass_ref > stop_ref > 0, got {pass_ref} and {stop_ref}"),
        ));
    }
    if !(nominal_edge > 0.0 && nominal_edge < 1.0) {
        return Err(invalid(
            "nominal_edge",
            format!("{nominal_edge} outside (0, 1)"),
        ));
    }
    let smooth = median_smooth(est.values(), 5);
    let freqs = est.freqs();
    let window: Vec<usize> = (0..freqs.len())
        .filter(|&i| (freqs[i] - nominal_edge).abs() <= EDGE_SEARCH)
        .collect();
    if window.is_empty() {
        return Ok(None);
    }
    let side_mean = |left: bool| {
        let vals: Vec<f64> = window
            .iter()
            .filter(|&&i| {
                if left {
                    freqs[i] < nominal_edge
                } else {
                    freqs[i] > nominal_edge
                }
            })
            .map(|&i| smooth[i])
            .collect();
        if vals.is_empty() {
            0.0
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };
    let pass_on_left = side_mean(true) >= side_mean(false);
    let pass_thr = pass_ref * 10f64.powf(-0.3);
    let stop_thr = stop_ref * 10f64.powf(0.3);

    // Walk from the passband side toward the stopband side.
    let path: Vec<usize> = if pass_on_left {
        window.clone()
    } else {
        window.iter().rev().copied().collect()
    };
    let Some(p) = path.iter().rposition(|&i| smooth[i] >= pass_thr) else {
        return Ok(None);
    };
    let Some(q) = path[p + 1..].iter().position(|&i| smooth[i] <= stop_thr) else {
        return Ok(None);
    };
    let (a, b) = (path[p], path[p + 1 + q]);
    Ok(Some((freqs[a] - freqs[b]).abs()))
}

/// Which measurement scenario a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scenario {
    SingleTone {
        nu0: f64,
    },
    PartialBand {
        lo: f64,
        hi: f64,
    },
    /// Bands come entirely from the caller.
    Custom,
}

/// Inset between the true band edges and the bands used for statistics.
pub const BAND_INSET: f64 = 0.05;
/// Half-width excluded from the single-tone stopband around the tone.
pub const TONE_EXCLUSION: f64 = 0.1;

impl Scenario {
    pub fn label(&self) -> String {
        match self {
            Scenario::SingleTone { nu0 } => format!("single_tone(nu0={nu0})"),
            Scenario::PartialBand { lo, hi } => format!("partial_band(lo={lo},hi={hi})"),
            Scenario::Custom => "custom".into(),
        }
    }

    /// Default passband used for statistics, if the scenario has one.
    pub fn passband(&self) -> Option<BandSpec> {
        match *self {
            Scenario::PartialBand { lo, hi } => {
                BandSpec::new(lo + BAND_INSET, hi - BAND_INSET, BandKind::Passband).ok()
            }
            _ => None,
        }
    }

    /// Default stopbands used for statistics (empty pieces are dropped).
    pub fn stopbands(&self) -> Vec<BandSpec> {
        let (a, b) = match *self {
            Scenario::SingleTone { nu0 } => (nu0 - TONE_EXCLUSION, nu0 + TONE_EXCLUSION),
            Scenario::PartialBand { lo, hi } => (lo - BAND_INSET, hi + BAND_INSET),
            Scenario::Custom => return Vec::new(),
        };
        let mut out = Vec::new();
        if a > 0.0 {
            out.extend(BandSpec::new(0.0, a, BandKind::Stopband));
        }
        if b < 1.0 {
            out.extend(BandSpec::new(b, 1.0, BandKind::Stopband));
        }
        out
    }

    /// Nominal band edges at which transition widths are measured.
    fn edges(&self, passbands: &[BandSpec]) -> Vec<f64> {
        let raw: Vec<f64> = match *self {
            Scenario::SingleTone { .. } => Vec::new(),
            Scenario::PartialBand { lo, hi } => vec![lo, hi],
            Scenario::Custom => passbands.iter().flat_map(|b| [b.lo, b.hi]).collect(),
        };
        raw.into_iter().filter(|e| *e > 0.0 && *e < 1.0).collect()
    }
}
/// Scalar metrics of one estimate. Metrics that do not apply to the
/// scenario, or could not be measured, are `None`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub estimator_desc: String,
    pub scenario: String,
    pub mean_pass: Option<f64>,
    pub var_pass: Option<f64>,
    pub mean_pass_db: Option<f64>,
    pub var_pass_db: Option<f64>,
    pub mean_stop: Option<f64>,
    pub var_stop: Option<f64>,
    pub mean_stop_db: Option<f64>,
    pub var_stop_db: Option<f64>,
    pub sidelobe_suppression_db: Option<f64>,
    pub transition_width: Option<f64>,
    pub main_lobe_width: Option<f64>,
    pub notes: String,
}

impl MetricsReport {
    fn empty(est: &PsdEstimate, scenario: &Scenario) -> Self {
        Self {
            estimator_desc: est.estimator_desc().to_string(),
            scenario: scenario.label(),
            mean_pass: None,
            var_pass: None,
            mean_pass_db: None,
            var_pass_db: None,
            mean_stop: None,
            var_stop: None,
            mean_stop_db: None,
            var_stop_db: None,
            sidelobe_suppression_db: None,
            transition_width: None,
            main_lobe_width: None,
            notes: String::new(),
        }
    }
}

/// Measures every metric that applies to `scenario`. Bands in `bands`
/// replace the scenario defaults of the same kind (`Custom` bands are
/// ignored).
pub fn evaluate(
    est: &PsdEstimate,
    scenario: &Scenario,
    bands: &[BandSpec],
) -> Result<MetricsReport> {
    let pick = |kind: BandKind| -> Vec<BandSpec> {
        bands.iter().filter(|b| b.kind == kind).copied().collect()
    };
    let mut passbands = pick(BandKind::Passband);
    if passbands.is_empty() {
        passbands.extend(scenario.passband());
    }
    let mut stopbands = pick(BandKind::Stopband);
    if stopbands.is_empty() {
        stopbands = scenario.stopbands();
    }
    if passbands.is_empty() && stopbands.is_empty() {
        return Err(invalid("bands", "no passband or stopband to measure"));
    }

    let mut report = MetricsReport::empty(est, scenario);
    let mut notes: Vec<String> = Vec::new();

    let stop = if stopbands.is_empty() {
        None
    } else {
        Some(band_stats_union(est, &stopbands)?)
    };
    if let Some(st) = &stop {
        report.mean_stop = Some(st.mean);
        report.var_stop = Some(st.variance);
        report.mean_stop_db = Some(st.mean_db);
        report.var_stop_db = Some(st.variance_db);
    }

    if let Scenario::SingleTone { nu0 } = *scenario {
        report.sidelobe_suppression_db = Some(sidelobe_suppression(est, nu0)?);
        report.main_lobe_width = Some(main_lobe_width(est, nu0)?);
        notes.push("sidelobe: peak vs largest value outside the main lobe".into());
    }

    if !passbands.is_empty() {
        let pass = band_stats_union(est, &passbands)?;
        report.mean_pass = Some(pass.mean);
        report.var_pass = Some(pass.variance);
        report.mean_pass_db = Some(pass.mean_db);
        report.var_pass_db = Some(pass.variance_db);

        if let Some(st) = &stop {
            let stop_max = est
                .freqs()
                .iter()
                .zip(est.values())
                .filter(|(f, _)| stopbands.iter().any(|b| b.contains(**f)))
                .fold(0.0f64, |a, (_, v)| a.max(*v));
            report.sidelobe_suppression_db = Some(if stop_max > 0.0 && pass.mean > 0.0 {
                (10.0 * (pass.mean / stop_max).log10()).min(SUPPRESSION_CAP_DB)
            } else {
                SUPPRESSION_CAP_DB
            });
            notes.push("sidelobe: passband mean vs stopband maximum".into());

            let stop_ref = st.mean.max(1e-20);
            if pass.mean > stop_ref {
                let widths: Vec<f64> = scenario
                    .edges(&passbands)
                    .into_iter()
                    .map(|e| transition_width(est, e, pass.mean, stop_ref))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect();
                if widths.is_empty() {
                    notes.push("transition: no crossing found near any edge".into());
                } else {
                    report.transition_width =
                        Some(widths.iter().sum::<f64>() / widths.len() as f64);
                }
            }
        }
    }
    report.notes = notes.join("; ");
    Ok(report)
}

/// Outcome of one comparison cell, from the baseline's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Grade {
    /// Baseline better by more than the margin.
    Better,
    /// Baseline worse by more than the margin.
    Worse,
    Similar,
    NotApplicable,
}

impl Grade {
    pub fn symbol(self) -> &'static str {
        match self {
            Grade::Better => "+",
            Grade::Worse => "-",
            Grade::Similar => "≈",
            Grade::NotApplicable => "n/a",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Grade::Better => Grade::Worse,
            Grade::Worse => Grade::Better,
            other => other,
        }
    }
}

/// Ratio threshold for variances and widths.
pub const RATIO_MARGIN: f64 = 2.0;
/// Difference threshold for dB-valued metrics.
pub const DB_MARGIN: f64 = 3.0;

/// Table columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Metric {
    SidelobeSuppression,
    VariancePass,
    TransitionBand,
    VarianceStop,
    MeanStopPower,
    FrequencyResolution,
}

impl Metric {
    pub fn title(self) -> &'static str {
        match self {
            Metric::SidelobeSuppression => "Side lobe Suppression",
            Metric::VariancePass => "Variance in pass band",
            Metric::TransitionBand => "Transition Band",
            Metric::VarianceStop => "Variance in stop band",
            Metric::MeanStopPower => "Mean Power in Stop band",
            Metric::FrequencyResolution => "Frequency Resolution",
        }
    }

    /// Column layout used for each scenario.
    pub fn columns(scenario: &str) -> &'static [Metric] {
        if scenario.starts_with("single_tone") {
            &[
                Metric::MeanStopPower,
                Metric::VarianceStop,
                Metric::FrequencyResolution,
                Metric::SidelobeSuppression,
            ]
        } else if scenario.starts_with("partial_band") {
            &[
                Metric::SidelobeSuppression,
                Metric::VariancePass,
                Metric::TransitionBand,
                Metric::VarianceStop,
            ]
        } else {
            &[
                Metric::SidelobeSuppression,
                Metric::VariancePass,
                Metric::TransitionBand,
                Metric::VarianceStop,
                Metric::MeanStopPower,
                Metric::FrequencyResolution,
            ]
        }
    }

    /// Value the grade is based on. Variances are taken from the dB-domain
    /// densities.
    pub fn value(self, r: &MetricsReport) -> Option<f64> {
        match self {
            Metric::SidelobeSuppression => r.sidelobe_suppression_db,
            Metric::VariancePass => r.var_pass_db,
            Metric::TransitionBand => r.transition_width,
            Metric::VarianceStop => r.var_stop_db,
            Metric::MeanStopPower => r.mean_stop_db,
            Metric::FrequencyResolution => r.main_lobe_width,
        }
    }

    /// Grades `baseline` against `other`, together with the measured margin
    /// (ratio `other/baseline` for lower-is-better ratios, dB difference
    /// otherwise; positive margins favour the baseline).
    pub fn grade(self, baseline: &MetricsReport, other: &MetricsReport) -> (Grade, Option<f64>) {
        let (Some(b), Some(o)) = (self.value(baseline), self.value(other)) else {
            return (Grade::NotApplicable, None);
        };
        let margin = match self {
            Metric::SidelobeSuppression => b - o,
            Metric::MeanStopPower => o - b,
            Metric::VariancePass
            | Metric::VarianceStop
            | Metric::TransitionBand
            | Metric::FrequencyResolution => {
                // Log-ratio expressed in dB so that 2x ≈ 3.01 dB.
                if b <= 0.0 && o <= 0.0 {
                    0.0
                } else if b <= 0.0 {
                    f64::INFINITY
                } else if o <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    10.0 * (o / b).log10()
                }
            }
        };
        let threshold = match self {
            Metric::SidelobeSuppression | Metric::MeanStopPower => DB_MARGIN,
            _ => 10.0 * RATIO_MARGIN.log10(),
        };
        let grade = if margin > threshold {
            Grade::Better
        } else if margin < -threshold {
            Grade::Worse
        } else {
            Grade::Similar
        };
        (grade, Some(margin))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub grade: Grade,
    /// Margin in dB favouring the baseline when positive.
    pub margin_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub estimator_desc: String,
    pub cells: Vec<Cell>,
}

/// Baseline-versus-rest grading table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub scenario: String,
    pub baseline: String,
    pub columns: Vec<Metric>,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, desc: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.estimator_desc == desc)
    }

    pub fn cell(&self, desc: &str, metric: Metric) -> Option<&Cell> {
        let col = self.columns.iter().position(|m| *m == metric)?;
        self.row(desc).map(|r| &r.cells[col])
    }

    /// Plain-text table: one row per comparand, one column per metric.
    pub fn render_text(&self) -> String {
        let mut header: Vec<String> = vec!["Estimation Methods".into()];
        header.extend(self.columns.iter().map(|m| m.title().to_string()));
        let mut rows: Vec<Vec<String>> = vec![header];
        for r in &self.rows {
            let mut line = vec![r.estimator_desc.clone()];
            line.extend(r.cells.iter().map(|c| match c.margin_db {
                Some(m) if m.is_finite() => format!("{} ({m:+.1} dB)", c.grade.symbol()),
                _ => c.grade.symbol().to_string(),
            }));
            rows.push(line);
        }
        let ncol = rows[0].len();
        let widths: Vec<usize> = (0..ncol)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!("scenario: {}\nbaseline: {}\n", self.scenario, self.baseline);
        for (i, r) in rows.iter().enumerate() {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| {
                    let pad = w - s.chars().count();
                    let mut s = s.clone();
                    s.extend(core::iter::repeat_n(' ', pad));
                    s
                })
                .collect();
            out.push_str(cells.join(" | ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                out.push_str(&rule.join("-+-"));
                out.push('\n');
            }
        }
        out
    }
}

/// Grades the baseline estimate against every other report. All reports
/// must share a scenario.
pub fn compare(reports: &[MetricsReport], baseline: &str) -> Result<Comparison> {
    let base = reports
        .iter()
        .find(|r| r.estimator_desc == baseline)
        .ok_or_else(|| Error::MissingBaseline(baseline.to_string()))?;
    if let Some(other) = reports.iter().find(|r| r.scenario != base.scenario) {
        return Err(Error::MixedScenarios {
            first: base.scenario.clone(),
            other: other.scenario.clone(),
        });
    }
    let columns = Metric::columns(&base.scenario).to_vec();
    let rows = reports
        .iter()
        .filter(|r| r.estimator_desc != baseline)
        .map(|r| ComparisonRow {
            estimator_desc: r.estimator_desc.clone(),
            cells: columns
                .iter()
                .map(|m| {
                    let (grade, margin_db) = m.grade(base, r);
                    Cell { grade, margin_db }
                })
                .collect(),
        })
        .collect();
    Ok(Comparison {
        scenario: base.scenario.clone(),
        baseline: baseline.to_string(),
        columns,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(values: Vec<f64>) -> PsdEstimate {
        let n = values.len();
        let width = 1.0 / (n - 1) as f64;
        let freqs = (0..n).map(|k| k as f64 * width).collect();
        PsdEstimate::new(freqs, values, width, "test", 0.0).unwrap()
    }

    #[test]
    fn band_stats_simple_cases() {
        let e = est(vec![1.0; 11]);
        let s = band_stats(&e, &BandSpec::new(0.2, 0.6, BandKind::Passband).unwrap()).unwrap();
        assert_eq!((s.mean, s.variance), (1.0, 0.0));

        let e = est(vec![0.0, 1.0, 3.0, 0.0, 0.0]);
        let s = band_stats(&e, &BandSpec::new(0.2, 0.6, BandKind::Custom).unwrap()).unwrap();
        assert_eq!((s.mean, s.variance, s.bins), (2.0, 2.0, 2));

        let err = band_stats(&e, &BandSpec::new(0.2, 0.3, BandKind::Custom).unwrap()).unwrap_err();
        assert!(matches!(err, Error::BandTooNarrow { bins: 1, .. }));
        assert!(BandSpec::new(0.5, 0.5, BandKind::Custom).is_err());
    }

    #[test]
    fn db_floor() {
        assert_eq!(to_db(0.0), DB_FLOOR);
        assert_eq!(to_db(1e-30), DB_FLOOR);
        assert!((to_db(100.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn sidelobe_definitions() {
        let mut v = vec![0.0; 21];
        v[10] = 1.0;
        assert_eq!(
            sidelobe_suppression(&est(v), 0.5).unwrap(),
            SUPPRESSION_CAP_DB
        );

        // Peak at bin 1, descending to a local minimum at bin 3.
        let v = vec![0.0, 1.0, 0.1, 0.01, 0.05, 0.02, 0.03, 0.0, 0.0];
        let e = est(v);
        assert_eq!(main_lobe(e.values(), 1), (0, 3));
        let s = sidelobe_suppression(&e, 0.125).unwrap();
        assert!((s - 10.0 * (1.0f64 / 0.05).log10()).abs() < 1e-12);

        assert!(matches!(
            sidelobe_suppression(&e, 0.9),
            Err(Error::PeakNotNearHint { .. })
        ));
    }

    #[test]
    fn main_lobe_width_counts_half_power_bins() {
        let v = vec![0.0, 0.1, 0.6, 1.0, 0.5, 0.4, 0.0, 0.0, 0.0];
        let e = est(v);
        assert!((main_lobe_width(&e, 0.375).unwrap() - 3.0 * e.bin_width()).abs() < 1e-15);
    }

    #[test]
    fn brick_wall_transition_is_one_bin() {
        let mut v = vec![0.01; 101];
        for x in v.iter_mut().take(51) {
            *x = 1.0;
        }
        let e = est(v);
        let w = transition_width(&e, 0.5, 1.0, 0.01).unwrap().unwrap();
        assert!((w - e.bin_width()).abs() < 1e-12);
        // Rising edge.
        let mut v = vec![0.01; 101];
        for x in v.iter_mut().skip(50) {
            *x = 1.0;
        }
        let e = est(v);
        let w = transition_width(&e, 0.5, 1.0, 0.01).unwrap().unwrap();
        assert!((w - e.bin_width()).abs() < 1e-12);
        // Flat: no crossings.
        assert_eq!(
            transition_width(&est(vec![1.0; 101]), 0.5, 1.0, 0.01).unwrap(),
            None
        );
        assert!(transition_width(&e, 0.5, 0.01, 1.0).is_err());
    }

    #[test]
    fn evaluate_brick_wall_estimate() {
        // Density 2 on [0.25, 0.75], 0.001 elsewhere.
        let v: Vec<f64> = (0..=200)
            .map(|k| if (50..=150).contains(&k) { 2.0 } else { 1e-3 })
            .collect();
        let e = est(v);
        let sc = Scenario::PartialBand { lo: 0.25, hi: 0.75 };
        let r = evaluate(&e, &sc, &[]).unwrap();
        assert_eq!(r.mean_pass, Some(2.0));
        assert_eq!(r.var_pass, Some(0.0));
        assert!((r.mean_stop.unwrap() - 1e-3).abs() < 1e-15);
        assert!((r.sidelobe_suppression_db.unwrap() - 10.0 * 2000f64.log10()).abs() < 1e-9);
        assert!((r.transition_width.unwrap() - e.bin_width()).abs() < 1e-12);
        assert_eq!(r.main_lobe_width, None);

        // Overriding the passband narrows the statistics.
        let narrow = [BandSpec::new(0.4, 0.5, BandKind::Passband).unwrap()];
        let r = evaluate(&e, &sc, &narrow).unwrap();
        assert_eq!(r.mean_pass, Some(2.0));
        assert!(evaluate(&e, &Scenario::Custom, &[]).is_err());
        let r = evaluate(&e, &Scenario::Custom, &narrow).unwrap();
        assert_eq!(r.mean_stop, None);
    }

    fn report(desc: &str, scenario: &str, var: f64, side: f64) -> MetricsReport {
        MetricsReport {
            estimator_desc: desc.into(),
            scenario: scenario.into(),
            mean_pass: Some(1.0),
            var_pass: Some(var),
            mean_pass_db: Some(0.0),
            var_pass_db: Some(var),
            mean_stop: Some(0.1),
            var_stop: Some(var),
            mean_stop_db: Some(-10.0),
            var_stop_db: Some(var),
            sidelobe_suppression_db: Some(side),
            transition_width: Some(0.01),
            main_lobe_width: None,
            notes: String::new(),
        }
    }

    #[test]
    fn comparison_grades() {
        let reports = [
            report("wp", "partial_band", 1.0, 30.0),
            report("same", "partial_band", 1.0, 30.0),
            report("noisy", "partial_band", 5.0, 20.0),
            report("smooth", "partial_band", 0.1, 31.0),
        ];
        let c = compare(&reports, "wp").unwrap();
        assert!(c
            .row("same")
            .unwrap()
            .cells
            .iter()
            .all(|c| c.grade == Grade::Similar));
        assert_eq!(
            c.cell("noisy", Metric::VariancePass).unwrap().grade,
            Grade::Better
        );
        assert_eq!(
            c.cell("noisy", Metric::SidelobeSuppression).unwrap().grade,
            Grade::Better
        );
        assert_eq!(
            c.cell("smooth", Metric::VarianceStop).unwrap().grade,
            Grade::Worse
        );
        assert_eq!(
            c.cell("smooth", Metric::SidelobeSuppression).unwrap().grade,
            Grade::Similar
        );
        assert!(c.render_text().contains("Variance in pass band"));

        assert!(matches!(
            compare(&reports, "nope"),
            Err(Error::MissingBaseline(_))
        ));
        let mixed = [report("wp", "a", 1.0, 1.0), report("x", "b", 1.0, 1.0)];
        assert!(matches!(
            compare(&mixed, "wp"),
            Err(Error::MixedScenarios { .. })
        ));
    }
}
