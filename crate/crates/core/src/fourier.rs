//! Periodogram family estimators sharing one normalization.
//!
//! Every estimate is one-sided on `[0, 1]` with interior bins doubled, and
//! scaled by `U = Σ w[n]²` so that white noise of variance σ² has expected
//! density σ² regardless of the taper. With that scaling the bin-width sum of
//! the density equals the taper-weighted power `Σ (w·x)² / U` of the analyzed
//! block, which is the plain mean power for a rectangular window.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::signals::{make_window, Signal, Window, WindowKind};

/// A one-sided density estimate on a Nyquist-normalized grid.
///
/// `values[k]` is power per unit normalized frequency at `freqs[k]`; each
/// point represents a bin of width `bin_width`, so `integral()` is
/// `Σ values · bin_width`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PsdEstimate {
    freqs: Vec<f64>,
    values: Vec<f64>,
    bin_width: f64,
    estimator_desc: String,
    analyzed_power: f64,
    clamped_bins: usize,
}

impl PsdEstimate {
    pub fn new(
        freqs: Vec<f64>,
        values: Vec<f64>,
        bin_width: f64,
        estimator_desc: impl Into<String>,
        analyzed_power: f64,
    ) -> Result<Self> {
        if freqs.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "values",
                got: values.len(),
                expected: freqs.len(),
            });
        }
        if freqs.len() < 2 {
            return Err(invalid("freqs", "an estimate needs at least 2 grid points"));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("freqs", "grid must be strictly ascending"));
        }
        if freqs[0] < 0.0 || freqs[freqs.len() - 1] > 1.0 {
            return Err(invalid("freqs", "grid must lie within [0, 1]"));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid(
                "values",
                format!(
                    "density {} at index {i} is negative or non-finite",
                    values[i]
                ),
            ));
        }
        if !(bin_width > 0.0 && bin_width <= 1.0) {
            return Err(invalid("bin_width", format!("{bin_width} outside (0, 1]")));
        }
        Ok(Self {
            freqs,
            values,
            bin_width,
            estimator_desc: estimator_desc.into(),
            analyzed_power,
            clamped_bins: 0,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn estimator_desc(&self) -> &str {
        &self.estimator_desc
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Power the estimate accounts for: `integral()` reproduces it up to
    /// round-off (and up to clamping, for Blackman-Tukey).
    pub fn analyzed_power(&self) -> f64 {
        self.analyzed_power
    }

    /// Number of negative densities zeroed (Blackman-Tukey only).
    pub fn clamped_bins(&self) -> usize {
        self.clamped_bins
    }

    /// `Σ values · bin_width`
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_width
    }

    /// Records how many bins were clamped from negative values to zero.
    pub fn with_clamped_bins(mut self, clamped: usize) -> Self {
        self.clamped_bins = clamped;
        self
    }

    pub fn with_desc(mut self, desc: impl Into<String>) -> Self {
        self.estimator_desc = desc.into();
        self
    }
}

/// Folds a full `|X_k|²`-style spectrum of length `nfft` onto the one-sided
/// grid `ν_k = 2k/nfft`, dividing by `2·norm` and doubling interior bins.
pub(crate) fn one_sided(power: &[f64], norm: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let nfft = power.len();
    let half = nfft / 2;
    let width = 2.0 / nfft as f64;
    let mut freqs = Vec::with_capacity(half + 1);
    let mut values = Vec::with_capacity(half + 1);
    for (k, &p) in power.iter().enumerate().take(half + 1) {
        let edge = k == 0 || (nfft.is_multiple_of(2) && k == half);
        let fold = if edge { 1.0 } else { 2.0 };
        freqs.push(k as f64 * width);
        values.push(fold * p / (2.0 * norm));
    }
    (freqs, values, width)
}

fn check_nfft(nfft: usize, len: usize) -> Result<()> {
    if nfft < len {
        return Err(invalid(
            "nfft",
            format!("{nfft} is shorter than the block length {len}"),
        ));
    }
    if nfft < 2 {
        return Err(invalid("nfft", "must be at least 2"));
    }
    Ok(())
}

// Windowed periodogram of one block: (values, weighted power) on the shared grid.
fn block_periodogram(x: &[f64], window: &[f64], nfft: usize) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let u: f64 = window.iter().map(|w| w * w).sum();
    let tapered: Vec<f64> = x.iter().zip(window).map(|(x, w)| x * w).collect();
    let power_in: f64 = tapered.iter().map(|v| v * v).sum::<f64>() / u;
    let spectrum = fft::dft_padded(&tapered, nfft);
    let power: Vec<f64> = spectrum.iter().map(|c| c.norm_sqr()).collect();
    let (freqs, values, width) = one_sided(&power, u);
    (freqs, values, width, power_in)
}

/// Windowed periodogram, `|DFT(w⊙x)|² / Σw²` on an `nfft`-point grid.
pub fn periodogram(signal: &Signal, window: &Window, nfft: usize) -> Result<PsdEstimate> {
    let n = signal.len();
    if window.len() != n {
        return Err(Error::LengthMismatch {
            what: "window",
            got: window.len(),
            expected: n,
        });
    }
    check_nfft(nfft, n)?;
    if window.energy() <= 0.0 {
        return Err(invalid("window", "window has zero energy"));
    }
    let (freqs, values, width, power) =
        block_periodogram(signal.samples(), window.coefficients(), nfft);
    PsdEstimate::new(
        freqs,
        values,
        width,
        format!("periodogram(window={},nfft={nfft})", window.kind().name()),
        power,
    )
}

/// Number of full segments Welch averages over; partial tails are dropped.
pub fn welch_segment_count(len: usize, segment_len: usize, hop: usize) -> usize {
    if segment_len > len || hop == 0 {
        0
    } else {
        (len - segment_len) / hop + 1
    }
}

/// Hop size implied by `segment_len` and `overlap_fraction`; must be a
/// positive integer.
pub fn welch_hop(segment_len: usize, overlap_fraction: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(invalid(
            "overlap_fraction",
            format!("{overlap_fraction} outside [0, 1)"),
        ));
    }
    let hop = segment_len as f64 * (1.0 - overlap_fraction);
    let rounded = libm_round(hop);
    if (hop - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(invalid(
            "overlap_fraction",
            format!("hop {hop} = segment_len·(1-overlap) is not a positive integer"),
        ));
    }
    Ok(rounded as usize)
}

fn libm_round(x: f64) -> f64 {
    num_traits::Float::round(x)
}

/// Welch average of windowed periodograms over overlapping segments.
pub fn welch(
    signal: &Signal,
    segment_len: usize,
    overlap_fraction: f64,
    window_kind: WindowKind,
    nfft: usize,
) -> Result<PsdEstimate> {
    let n = signal.len();
    if segment_len < 2 {
        return Err(invalid("segment_len", "must be at least 2"));
    }
    if segment_len > n {
        return Err(invalid(
            "segment_len",
            format!("{segment_len} exceeds the signal length {n}"),
        ));
    }
    let hop = welch_hop(segment_len, overlap_fraction)?;
    check_nfft(nfft, segment_len)?;
    let window = make_window(window_kind, segment_len)?;
    let segments = welch_segment_count(n, segment_len, hop);

    let x = signal.samples();
    let mut acc: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    let mut power_acc = 0.0;
    for s in 0..segments {
        let block = &x[s * hop..s * hop + segment_len];
        let (freqs, values, width, power) = block_periodogram(block, window.coefficients(), nfft);
        power_acc += power;
        match acc.as_mut() {
            None => acc = Some((freqs, values, width)),
            Some((_, sum, _)) => {
                for (a, v) in sum.iter_mut().zip(&values) {
                    *a += v;
                }
            }
        }
    }
    let (freqs, mut values, width) = acc.expect("at least one segment");
    let k = segments as f64;
    for v in &mut values {
        *v /= k;
    }
    PsdEstimate::new(
        freqs,
        values,
        width,
        format!(
            "welch(segment={segment_len},overlap={overlap_fraction},window={},nfft={nfft},K={segments})",
            window_kind.name()
        ),
        power_acc / k,
    )
}

/// Biased autocorrelation `r(k) = (1/N) Σ x[n] x[n+k]` for `k = 0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let size = crate::next_pow2(2 * n);
    let spectrum = fft::dft_padded(x, size);
    let power: Vec<num_complex::Complex64> = spectrum
        .iter()
        .map(|c| num_complex::Complex64::new(c.norm_sqr(), 0.0))
        .collect();
    let r = fft::idft(&power);
    r.iter()
        .take(max_lag + 1)
        .map(|c| c.re / n as f64)
        .collect()
}

/// Blackman-Tukey estimate: Fourier transform of the lag-windowed biased
/// autocorrelation, on `next_pow2(2·max_lag + 1)` points. Negative densities
/// are set to zero and counted in [`PsdEstimate::clamped_bins`].
pub fn blackman_tukey(
    signal: &Signal,
    max_lag: usize,
    lag_window_kind: WindowKind,
) -> Result<PsdEstimate> {
    let n = signal.len();
    if max_lag == 0 || max_lag >= n {
        return Err(invalid(
            "max_lag",
            format!("{max_lag} must be in 1..{n} (signal length)"),
        ));
    }
    let r = autocorrelation(signal.samples(), max_lag);
    let lag_window = make_window(lag_window_kind, 2 * max_lag + 1)?;
    let lw = &lag_window.coefficients()[max_lag..];

    let nfft = crate::next_pow2(2 * max_lag + 1);
    let mut seq = alloc::vec![0.0; nfft];
    seq[0] = r[0] * lw[0];
    for k in 1..=max_lag {
        let v = r[k] * lw[k];
        seq[k] = v;
        seq[nfft - k] = v;
    }
    let spectrum = fft::dft(&seq);
    let real: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let (freqs, mut values, width) = one_sided(&real, 1.0);
    let mut clamped = 0;
    for v in &mut values {
        if *v < 0.0 {
            *v = 0.0;
            clamped += 1;
        }
    }
    let mut est = PsdEstimate::new(
        freqs,
        values,
        width,
        format!(
            "blackman_tukey(max_lag={max_lag},lag_window={},nfft={nfft},clamped={clamped})",
            lag_window_kind.name()
        ),
        r[0] * lw[0],
    )?;
    est.clamped_bins = clamped;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{make_tone, make_white_noise};

    fn rect(n: usize) -> Window {
        make_window(WindowKind::Rectangular, n).unwrap()
    }

    #[test]
    fn eight_sample_tone_density() {
        // |Σ cos(πn/2) e^{-jπn/2}|² = 16; one-sided, doubled, over 2U = 16 → 2.0,
        // and 2.0 × bin width 0.25 is the tone power 0.5.
        let s = make_tone(8, 0.5, 1.0, 0.0).unwrap();
        let p = periodogram(&s, &rect(8), 8).unwrap();
        assert_eq!(p.freqs(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!((p.values()[2] - 2.0).abs() < 1e-12);
        assert!((p.values()[2] * p.bin_width() - 0.5).abs() < 1e-12);
        assert!((p.integral() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_gives_zero_estimates() {
        let s = Signal::new(alloc::vec![0.0; 64], "zeros", 0).unwrap();
        assert!(periodogram(&s, &rect(64), 64)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert!(blackman_tukey(&s, 8, WindowKind::Hamming)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert!(welch(&s, 16, 0.5, WindowKind::Hann, 16)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn argument_errors() {
        let s = make_white_noise(64, 1.0, 3).unwrap();
        assert!(periodogram(&s, &rect(32), 64).is_err());
        assert!(periodogram(&s, &rect(64), 32).is_err());
        assert!(welch(&s, 128, 0.5, WindowKind::Hamming, 128).is_err());
        assert!(welch(&s, 16, 0.99, WindowKind::Hamming, 16).is_err());
        assert!(welch(&s, 16, 1.0, WindowKind::Hamming, 16).is_err());
        assert!(welch(&s, 16, 0.3, WindowKind::Hamming, 16).is_err());
        assert!(blackman_tukey(&s, 64, WindowKind::Hamming).is_err());
        assert!(blackman_tukey(&s, 0, WindowKind::Hamming).is_err());
    }

    #[test]
    fn welch_counts() {
        assert_eq!(welch_segment_count(12800, 64, 32), 399);
        assert_eq!(welch_segment_count(128, 64, 32), 3);
        let s = make_white_noise(128, 1.0, 1).unwrap();
        let w = welch(&s, 64, 0.5, WindowKind::Hamming, 64).unwrap();
        assert!(w.estimator_desc().contains("K=3"));
    }

    #[test]
    fn single_segment_welch_is_the_windowed_periodogram() {
        let s = make_white_noise(256, 1.0, 7).unwrap();
        let w = welch(&s, 256, 0.5, WindowKind::Hann, 512).unwrap();
        let p = periodogram(&s, &make_window(WindowKind::Hann, 256).unwrap(), 512).unwrap();
        assert_eq!(w.values(), p.values());
        assert_eq!(w.freqs(), p.freqs());
    }

    #[test]
    fn full_lag_blackman_tukey_equals_periodogram() {
        let s = make_white_noise(100, 1.0, 11).unwrap();
        let bt = blackman_tukey(&s, 99, WindowKind::Rectangular).unwrap();
        let nfft = crate::next_pow2(199);
        let p = periodogram(&s, &rect(100), nfft).unwrap();
        assert_eq!(bt.len(), p.len());
        for (a, b) in bt.values().iter().zip(p.values()) {
            assert!((a - b).abs() <= 1e-9 * b.max(1e-12), "{a} vs {b}");
        }
    }

    #[test]
    fn autocorrelation_matches_direct_sum() {
        let s = make_white_noise(50, 1.0, 5).unwrap();
        let x = s.samples();
        let r = autocorrelation(x, 10);
        for k in 0..=10 {
            let direct: f64 = (0..50 - k).map(|n| x[n] * x[n + k]).sum::<f64>() / 50.0;
            assert!((r[k] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn circular_shift_keeps_bin_centred_peak() {
        let n = 256;
        let s = make_tone(n, 0.25, 1.0, 0.0).unwrap();
        let mut shifted = s.samples().to_vec();
        shifted.rotate_left(37);
        let t = Signal::new(shifted, "shifted", 0).unwrap();
        let a = periodogram(&s, &rect(n), n).unwrap();
        let b = periodogram(&t, &rect(n), n).unwrap();
        let k = n / 8;
        assert!((a.values()[k] - b.values()[k]).abs() <= 1e-9);
    }

    #[test]
    fn integral_contract_for_each_estimator() {
        for seed in 0..20 {
            let s = make_white_noise(500, 2.0, seed).unwrap();
            let ests = [
                periodogram(&s, &rect(500), 512).unwrap(),
                periodogram(&s, &make_window(WindowKind::Blackman, 500).unwrap(), 1024).unwrap(),
                welch(&s, 64, 0.5, WindowKind::Hamming, 64).unwrap(),
            ];
            for e in &ests {
                assert!((e.integral() - e.analyzed_power()).abs() <= 1e-6 * e.analyzed_power());
            }
            assert!((ests[0].analyzed_power() - s.mean_power()).abs() <= 1e-12 * s.mean_power());
            let bt = blackman_tukey(&s, 31, WindowKind::Hamming).unwrap();
            assert!((bt.analyzed_power() - s.mean_power()).abs() <= 1e-12);
            assert!((bt.integral() - s.mean_power()).abs() <= 1e-3 * s.mean_power());
        }
    }
}
