//! Test sources and taper windows.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::fft;

/// A finite real sample sequence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Signal {
    samples: Vec<f64>,
    source_desc: String,
    seed: u64,
}

impl Signal {
    /// Wraps raw samples. At least two samples are required and all must be finite.
    pub fn new(samples: Vec<f64>, source_desc: impl Into<String>, seed: u64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid(
                "samples",
                format!("need at least 2, got {}", samples.len()),
            ));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(invalid("samples", format!("non-finite value at index {i}")));
        }
        Ok(Self {
            samples,
            source_desc: source_desc.into(),
            seed,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn source_desc(&self) -> &str {
        &self.source_desc
    }

    /// PRNG seed the samples were drawn with (0 for deterministic sources).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mean power `Σx²/N`.
    pub fn mean_power(&self) -> f64 {
        mean_power(&self.samples)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

pub(crate) fn mean_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// `amplitude · cos(π·nu0·n + phase)`, `nu0` in Nyquist-normalized units.
pub fn make_tone(length: usize, nu0: f64, amplitude: f64, phase: f64) -> Result<Signal> {
    if length < 2 {
        return Err(invalid("length", "must be at least 2"));
    }
    if !(nu0 > 0.0 && nu0 < 1.0) {
        return Err(invalid("nu0", format!("{nu0} is outside (0, 1)")));
    }
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(invalid(
            "amplitude",
            format!("{amplitude} is not a positive number"),
        ));
    }
    if !phase.is_finite() {
        return Err(invalid("phase", "must be finite"));
    }
    let samples = (0..length)
        .map(|n| amplitude * tone_cos(nu0, n, phase))
        .collect();
    Signal::new(
        samples,
        format!("tone(nu0={nu0},amplitude={amplitude},phase={phase})"),
        0,
    )
}

// cos(π·nu0·n + phase) with the argument reduced modulo 2 before scaling by
// π, so that rational nu0 (e.g. 0.5) land on exact multiples of π/2.
fn tone_cos(nu0: f64, n: usize, phase: f64) -> f64 {
    let turns = (nu0 * n as f64) % 2.0;
    if phase == 0.0 {
        let quarter = turns * 2.0;
        if quarter == quarter.round() {
            return [1.0, 0.0, -1.0, 0.0][(quarter as usize) % 4];
        }
    }
    (PI * turns + phase).cos()
}

/// Band-limited Gaussian noise with an exact brick-wall spectrum.
///
/// Seeded white Gaussian noise is transformed, every bin whose normalized
/// frequency lies outside `[band_lo, band_hi]` is zeroed (mirrored bins
/// included, so the result stays real), transformed back and scaled to mean
/// power `target_power`. The generator is ChaCha20 seeded with `seed`.
pub fn make_partial_band(
    length: usize,
    band_lo: f64,
    band_hi: f64,
    target_power: f64,
    seed: u64,
) -> Result<Signal> {
    if length < 2 {
        return Err(invalid("length", "must be at least 2"));
    }
    if !(0.0 <= band_lo && band_lo < band_hi && band_hi <= 1.0) {
        return Err(invalid(
            "band",
            format!("need 0 <= lo < hi <= 1, got [{band_lo}, {band_hi}]"),
        ));
    }
    let bin = 2.0 / length as f64;
    if band_hi - band_lo < bin {
        return Err(invalid(
            "band",
            format!("width {} is below one DFT bin ({bin})", band_hi - band_lo),
        ));
    }
    if !(target_power > 0.0) || !target_power.is_finite() {
        return Err(invalid("target_power", "must be a positive number"));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut spectrum: Vec<Complex64> = (0..length)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();
    fft::transform(&mut spectrum, false);
    for (k, v) in spectrum.iter_mut().enumerate() {
        let folded = k.min(length - k);
        let nu = folded as f64 * bin;
        if nu < band_lo || nu > band_hi {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let time = fft::idft(&spectrum);
    let mut samples: Vec<f64> = time.iter().map(|c| c.re).collect();

    let power = mean_power(&samples);
    if !(power > 0.0) {
        return Err(Error::InvalidArgument {
            name: "band",
            reason: format!("no DFT bin of length {length} falls inside [{band_lo}, {band_hi}]"),
        });
    }
    let scale = (target_power / power).sqrt();
    for s in &mut samples {
        *s *= scale;
    }
    Signal::new(
        samples,
        format!("partial_band(lo={band_lo},hi={band_hi},power={target_power})"),
        seed,
    )
}

/// White Gaussian noise with variance `sigma2` (ChaCha20, seeded).
pub fn make_white_noise(length: usize, sigma2: f64, seed: u64) -> Result<Signal> {
    if length < 2 {
        return Err(invalid("length", "must be at least 2"));
    }
    if !(sigma2 > 0.0) {
        return Err(invalid("sigma2", "must be positive"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let sd = sigma2.sqrt();
    let samples = (0..length)
        .map(|_| sd * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();
    Signal::new(samples, format!("white_noise(sigma2={sigma2})"), seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum WindowKind {
    Rectangular,
    Hamming,
    Hann,
    Blackman,
}

impl WindowKind {
    pub const ALL: [WindowKind; 4] = [
        WindowKind::Rectangular,
        WindowKind::Hamming,
        WindowKind::Hann,
        WindowKind::Blackman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Hamming => "hamming",
            WindowKind::Hann => "hann",
            WindowKind::Blackman => "blackman",
        }
    }
}

impl core::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rectangular" | "rect" | "boxcar" => Ok(WindowKind::Rectangular),
            "hamming" => Ok(WindowKind::Hamming),
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "blackman" => Ok(WindowKind::Blackman),
            other => Err(Error::Parse(format!("unknown window `{other}`"))),
        }
    }
}

/// Symmetric taper (denominator `L-1`), unnormalized: peak value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    coefficients: Vec<f64>,
}

impl Window {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `Σ w[n]²`
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|w| w * w).sum()
    }
}

pub fn make_window(kind: WindowKind, length: usize) -> Result<Window> {
    if length < 2 {
        return Err(invalid("length", "window needs at least 2 points"));
    }
    let denom = (length - 1) as f64;
    // Evaluate on the first half and mirror so the window is exactly symmetric.
    let eval = |n: usize| -> f64 {
        let x = 2.0 * PI * n as f64 / denom;
        match kind {
            WindowKind::Rectangular => 1.0,
            WindowKind::Hamming => 0.54 - 0.46 * x.cos(),
            WindowKind::Hann => 0.5 - 0.5 * x.cos(),
            WindowKind::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
        }
    };
    let mut coefficients = alloc::vec![0.0; length];
    for n in 0..length.div_ceil(2) {
        let v = if 2 * n == length - 1 {
            1.0
        } else {
            eval(n).clamp(0.0, 1.0)
        };
        coefficients[n] = v;
        coefficients[length - 1 - n] = v;
    }
    Ok(Window { kind, coefficients })
}
