use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::signals::Signal;

use super::filters::FilterPair;

/// How an analysis stage extends its input past the ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BoundaryMode {
    /// Circular extension; each stage exactly halves the length.
    Periodic,
    /// Zero extension with full linear convolution; the signal is first
    /// padded with zeros to a multiple of `2^J`.
    ZeroPad,
}

impl BoundaryMode {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryMode::Periodic => "periodic",
            BoundaryMode::ZeroPad => "zeropad",
        }
    }
}

impl core::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" | "per" => Ok(BoundaryMode::Periodic),
            "zeropad" | "zero" | "zpd" => Ok(BoundaryMode::ZeroPad),
            other => Err(Error::Parse(format!("unknown boundary mode `{other}`"))),
        }
    }
}

/// One filter-and-decimate stage.
///
/// Periodic: `approx[k] = Σ_n h[n] x[(2k+n) mod len]`, likewise `detail`
/// with `g`. ZeroPad: the full linear convolution `h * x` (length
/// `len + L - 1`) keeps its even-indexed outputs, `ceil((len+L-1)/2)` values.
pub fn analysis_step(
    input: &[f64],
    filters: &FilterPair,
    mode: BoundaryMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = filters.lowpass();
    let g = filters.highpass();
    let len = input.len();
    let taps = h.len();
    match mode {
        BoundaryMode::Periodic => {
            if len == 0 || !len.is_multiple_of(2) {
                return Err(invalid(
                    "input",
                    format!("periodic analysis needs an even, nonzero length (got {len})"),
                ));
            }
            let half = len / 2;
            let mut approx = vec![0.0; half];
            let mut detail = vec![0.0; half];
            for k in 0..half {
                let (mut a, mut d) = (0.0, 0.0);
                let mut idx = (2 * k) % len;
                for n in 0..taps {
                    a += h[n] * input[idx];
                    d += g[n] * input[idx];
                    idx += 1;
                    if idx == len {
                        idx = 0;
                    }
                }
                approx[k] = a;
                detail[k] = d;
            }
            Ok((approx, detail))
        }
        BoundaryMode::ZeroPad => {
            if len == 0 {
                return Err(invalid("input", "empty input"));
            }
            let out_len = (len + taps - 1).div_ceil(2);
            let mut approx = vec![0.0; out_len];
            let mut detail = vec![0.0; out_len];
            // Output k correlates h with x starting at 2k - (L-1).
            for k in 0..out_len {
                let start = 2 * k as isize - (taps as isize - 1);
                let n_lo = (-start).max(0) as usize;
                let n_hi = ((len as isize - start).min(taps as isize)).max(0) as usize;
                let (mut a, mut d) = (0.0, 0.0);
                for n in n_lo..n_hi {
                    let x = input[(start + n as isize) as usize];
                    a += h[n] * x;
                    d += g[n] * x;
                }
                approx[k] = a;
                detail[k] = d;
            }
            Ok((approx, detail))
        }
    }
}

/// Adjoint of [`analysis_step`], which for a paraunitary pair is its inverse.
/// `out_len` is the length of the stage input being rebuilt.
pub fn synthesis_step(
    approx: &[f64],
    detail: &[f64],
    filters: &FilterPair,
    mode: BoundaryMode,
    out_len: usize,
) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::LengthMismatch {
            what: "detail",
            got: detail.len(),
            expected: approx.len(),
        });
    }
    let h = filters.lowpass();
    let g = filters.highpass();
    let taps = h.len();
    let mut out = vec![0.0; out_len];
    match mode {
        BoundaryMode::Periodic => {
            if out_len != 2 * approx.len() {
                return Err(Error::LengthMismatch {
                    what: "periodic synthesis output",
                    got: out_len,
                    expected: 2 * approx.len(),
                });
            }
            for k in 0..approx.len() {
                let mut idx = 2 * k;
                for n in 0..taps {
                    out[idx] += h[n] * approx[k] + g[n] * detail[k];
                    idx += 1;
                    if idx == out_len {
                        idx = 0;
                    }
                }
            }
        }
        BoundaryMode::ZeroPad => {
            let expected = (out_len + taps - 1).div_ceil(2);
            if approx.len() != expected {
                return Err(Error::LengthMismatch {
                    what: "zero-padded coefficients",
                    got: approx.len(),
                    expected,
                });
            }
            for k in 0..approx.len() {
                let start = 2 * k as isize - (taps as isize - 1);
                let n_lo = (-start).max(0) as usize;
                let n_hi = ((out_len as isize - start).min(taps as isize)).max(0) as usize;
                for n in n_lo..n_hi {
                    out[(start + n as isize) as usize] += h[n] * approx[k] + g[n] * detail[k];
                }
            }
        }
    }
    Ok(out)
}

/// Full uniform wavelet-packet tree: `2^depth` leaves in filter-path order
/// (at each stage bit 0 selects the lowpass branch; the first stage is the
/// most significant bit).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WpTree {
    depth: u32,
    leaves: Vec<Vec<f64>>,
    boundary_mode: BoundaryMode,
    analyzed_length: usize,
    padded_length: usize,
    filter_name: String,
    filter_len: usize,
}

impl WpTree {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaves(&self) -> &[Vec<f64>] {
        &self.leaves
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.boundary_mode
    }

    /// Length of the signal handed to [`wp_decompose`].
    pub fn analyzed_length(&self) -> usize {
        self.analyzed_length
    }

    /// Length after zero padding (equal to `analyzed_length` when periodic).
    pub fn padded_length(&self) -> usize {
        self.padded_length
    }

    pub fn filter_name(&self) -> &str {
        &self.filter_name
    }

    /// `Σ_leaves Σ_k s²`
    pub fn energy(&self) -> f64 {
        self.leaves.iter().flatten().map(|s| s * s).sum()
    }

    /// Same shape with every coefficient replaced by `f(leaf, k, value)`.
    pub fn map_coefficients(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (leaf, coeffs) in out.leaves.iter_mut().enumerate() {
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c = f(leaf, k, *c);
            }
        }
        out
    }
}

/// Deepest periodic decomposition of a length-`len` signal for which every
/// stage input is at least as long as the filter.
pub fn max_periodic_depth(len: usize, filter_len: usize) -> u32 {
    let mut depth = 0;
    while len.is_multiple_of(1usize << (depth + 1)) && len >> depth >= filter_len {
        depth += 1;
    }
    depth
}

const MAX_DEPTH: u32 = 24;

pub fn wp_decompose(
    signal: &Signal,
    filters: &FilterPair,
    depth: u32,
    mode: BoundaryMode,
) -> Result<WpTree> {
    let len = signal.len();
    if depth == 0 || depth > MAX_DEPTH {
        return Err(invalid("depth", format!("{depth} outside 1..={MAX_DEPTH}")));
    }
    let leaves_count = 1usize << depth;
    let taps = filters.len();

    let padded: Vec<f64> = match mode {
        BoundaryMode::Periodic => {
            let max_depth = max_periodic_depth(len, taps);
            if !len.is_multiple_of(leaves_count) {
                return Err(Error::InfeasibleDepth {
                    depth,
                    length: len,
                    max_depth,
                    reason: "periodic mode needs the length divisible by 2^depth",
                });
            }
            if (len >> (depth - 1)) < taps {
                return Err(Error::InfeasibleDepth {
                    depth,
                    length: len,
                    max_depth,
                    reason: "last-stage input would be shorter than the filter",
                });
            }
            signal.samples().to_vec()
        }
        BoundaryMode::ZeroPad => {
            let mut x = signal.samples().to_vec();
            x.resize(len.div_ceil(leaves_count) * leaves_count, 0.0);
            x
        }
    };
    let padded_length = padded.len();

    let mut level = vec![padded];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in &level {
            let (a, d) = analysis_step(node, filters, mode)?;
            next.push(a);
            next.push(d);
        }
        level = next;
    }

    Ok(WpTree {
        depth,
        leaves: level,
        boundary_mode: mode,
        analyzed_length: len,
        padded_length,
        filter_name: String::from(filters.name()),
        filter_len: taps,
    })
}

/// Inverts [`wp_decompose`], returning the (padded) signal.
pub fn wp_reconstruct(tree: &WpTree, filters: &FilterPair) -> Result<Signal> {
    if filters.len() != tree.filter_len {
        return Err(Error::LengthMismatch {
            what: "filter",
            got: filters.len(),
            expected: tree.filter_len,
        });
    }
    // Node lengths per level, root first.
    let mut lengths = vec![tree.padded_length];
    for _ in 0..tree.depth {
        let prev = *lengths.last().unwrap();
        lengths.push(match tree.boundary_mode {
            BoundaryMode::Periodic => prev / 2,
            BoundaryMode::ZeroPad => (prev + filters.len() - 1).div_ceil(2),
        });
    }
    let mut level: Vec<Vec<f64>> = tree.leaves.clone();
    for j in (0..tree.depth as usize).rev() {
        let out_len = lengths[j];
        level = level
            .chunks(2)
            .map(|pair| synthesis_step(&pair[0], &pair[1], filters, tree.boundary_mode, out_len))
            .collect::<Result<Vec<_>>>()?;
    }
    let samples = level.pop().expect("root node");
    Signal::new(
        samples,
        format!("wp_reconstruct(filter={},J={})", filters.name(), tree.depth),
        0,
    )
}
