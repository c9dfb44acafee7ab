//! Slepian (DPSS) tapers and the Thomson multitaper estimator.
//!
//! Tapers come from the symmetric tridiagonal matrix that commutes with the
//! time-frequency concentration operator: its top eigenvalues are found by
//! Sturm-sequence bisection and the eigenvectors by inverse iteration. The
//! concentrations reported alongside are computed from the sinc kernel itself.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::fourier::{autocorrelation, one_sided, PsdEstimate};
use crate::signals::Signal;

/// Orthonormal tapers (rows) with their band concentrations.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaperSet {
    tapers: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    time_bandwidth: f64,
}

const ORTHO_TOL: f64 = 1e-9;

impl TaperSet {
    /// Builds a set from arbitrary orthonormal tapers. Concentrations within
    /// half-bandwidth `time_bandwidth / M` are computed for each taper.
    pub fn custom(tapers: Vec<Vec<f64>>, time_bandwidth: f64) -> Result<Self> {
        let m = tapers.first().map_or(0, Vec::len);
        if tapers.is_empty() || m < 2 {
            return Err(invalid("tapers", "need at least one taper of length >= 2"));
        }
        if let Some(bad) = tapers.iter().find(|t| t.len() != m) {
            return Err(Error::LengthMismatch {
                what: "taper",
                got: bad.len(),
                expected: m,
            });
        }
        if !(time_bandwidth > 0.0 && time_bandwidth < m as f64 / 2.0) {
            return Err(invalid(
                "time_bandwidth",
                format!("{time_bandwidth} outside (0, M/2)"),
            ));
        }
        for (k, a) in tapers.iter().enumerate() {
            for (l, b) in tapers.iter().enumerate().skip(k) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                if (dot - target).abs() > ORTHO_TOL {
                    return Err(invalid(
                        "tapers",
                        format!("tapers {k} and {l} have inner product {dot}"),
                    ));
                }
            }
        }
        let w = time_bandwidth / m as f64;
        let eigenvalues = tapers.iter().map(|t| concentration(t, w)).collect();
        Ok(Self {
            tapers,
            eigenvalues,
            time_bandwidth,
        })
    }

    pub fn tapers(&self) -> &[Vec<f64>] {
        &self.tapers
    }

    /// Fraction of each taper's energy inside `|f| <= W` (cycles/sample).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn time_bandwidth(&self) -> f64 {
        self.time_bandwidth
    }

    pub fn count(&self) -> usize {
        self.tapers.len()
    }

    pub fn taper_len(&self) -> usize {
        self.tapers[0].len()
    }

    /// Same tapers in a different order; `order` must be a permutation.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let k = self.count();
        let mut seen = vec![false; k];
        if order.len() != k
            || order
                .iter()
                .any(|&i| i >= k || core::mem::replace(&mut seen[i], true))
        {
            return Err(invalid("order", "not a permutation of the taper indices"));
        }
        Ok(Self {
            tapers: order.iter().map(|&i| self.tapers[i].clone()).collect(),
            eigenvalues: order.iter().map(|&i| self.eigenvalues[i]).collect(),
            time_bandwidth: self.time_bandwidth,
        })
    }
}

/// `qᵀ A q` for the sinc kernel `A[n][m] = sin(2πW(n-m)) / (π(n-m))`, via the
/// taper's autocorrelation.
fn concentration(taper: &[f64], w: f64) -> f64 {
    let m = taper.len();
    let r = autocorrelation(taper, m - 1);
    let scale = m as f64;
    let mut acc = 2.0 * w * r[0] * scale;
    for (tau, &rt) in r.iter().enumerate().skip(1) {
        let t = tau as f64;
        acc += 2.0 * rt * scale * (2.0 * PI * w * t).sin() / (PI * t);
    }
    acc
}

/// The `k` leading discrete prolate spheroidal sequences of length `m` with
/// time-bandwidth product `nw`.
///
/// Each taper has unit norm and its first non-negligible sample positive.
pub fn dpss(m: usize, nw: f64, k: usize) -> Result<TaperSet> {
    if k == 0 {
        return Err(invalid("K", "at least one taper is required"));
    }
    if !(nw > 0.0) {
        return Err(invalid("NW", "must be positive"));
    }
    if nw >= m as f64 / 2.0 {
        return Err(invalid(
            "NW",
            format!("{nw} must be below M/2 = {}", m as f64 / 2.0),
        ));
    }
    if k as f64 > 2.0 * nw {
        return Err(invalid(
            "K",
            format!(
                "{k} tapers exceed 2·NW = {}; the extra tapers are poorly concentrated",
                2.0 * nw
            ),
        ));
    }
    if m < k {
        return Err(invalid(
            "M",
            format!("{m} is shorter than the taper count {k}"),
        ));
    }

    let w = nw / m as f64;
    let cos_w = (2.0 * PI * w).cos();
    let diag: Vec<f64> = (0..m)
        .map(|n| {
            let c = (m as f64 - 1.0 - 2.0 * n as f64) / 2.0;
            c * c * cos_w
        })
        .collect();
    // off[n] couples rows n and n+1.
    let off: Vec<f64> = (1..m).map(|n| n as f64 * (m - n) as f64 / 2.0).collect();

    let mut tapers: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let lambda = kth_largest_eigenvalue(&diag, &off, j);
        let mut v = inverse_iteration(&diag, &off, lambda, &tapers);
        fix_sign(&mut v);
        tapers.push(v);
    }

    let eigenvalues: Vec<f64> = tapers.iter().map(|t| concentration(t, w)).collect();
    Ok(TaperSet {
        tapers,
        eigenvalues,
        time_bandwidth: nw,
    })
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 {
            f64::EPSILON * (off[i - 1].abs() + 1.0)
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

// Index `j` counted from the top (j = 0 is the largest eigenvalue).
fn kth_largest_eigenvalue(diag: &[f64], off: &[f64], j: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius =
            if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    let target = n - 1 - j; // eigenvalue with exactly `target` others below it
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T - shift·I) y = b` by Gaussian elimination with partial pivoting.
fn tridiagonal_solve(diag: &[f64], off: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Row i after pivoting holds up to three nonzeros: u0 (col i), u1 (i+1), u2 (i+2).
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut rhs = b.to_vec();

    let tiny = f64::EPSILON * diag.iter().fold(1.0f64, |a, d| a.max(d.abs()));
    let mut cur0 = diag[0] - shift;
    let mut cur1 = if n > 1 { off[0] } else { 0.0 };
    let mut cur2 = 0.0;
    for i in 0..n {
        if i + 1 < n {
            let sub = off[i];
            let next0 = diag[i + 1] - shift;
            let next1 = if i + 2 < n { off[i + 1] } else { 0.0 };
            if sub.abs() > cur0.abs() {
                // Swap rows i and i+1.
                let factor = cur0 / sub;
                u0[i] = sub;
                u1[i] = next0;
                u2[i] = next1;
                let r_i = rhs[i];
                rhs[i] = rhs[i + 1];
                rhs[i + 1] = r_i - factor * rhs[i];
                cur0 = cur1 - factor * next0;
                cur1 = cur2 - factor * next1;
                cur2 = 0.0;
            } else {
                let pivot = if cur0 == 0.0 { tiny } else { cur0 };
                let factor = sub / pivot;
                u0[i] = pivot;
                u1[i] = cur1;
                u2[i] = cur2;
                rhs[i + 1] -= factor * rhs[i];
                cur0 = next0 - factor * cur1;
                cur1 = next1 - factor * cur2;
                cur2 = 0.0;
            }
        } else {
            u0[i] = if cur0 == 0.0 { tiny } else { cur0 };
            u1[i] = 0.0;
            u2[i] = 0.0;
        }
    }

    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * y[i + 2];
        }
        y[i] = s / u0[i];
    }
    y
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
        for (x, y) in v.iter_mut().zip(b) {
            *x -= dot * y;
        }
    }
}

fn inverse_iteration(diag: &[f64], off: &[f64], lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
    let n = diag.len();
    // Deterministic start with components along both symmetric and
    // antisymmetric eigenvectors.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (i as f64 / n as f64) + 0.25 * ((i * 7919) % 13) as f64 / 13.0)
        .collect();
    orthogonalize(&mut v, previous);
    normalize(&mut v);
    for _ in 0..4 {
        let mut y = tridiagonal_solve(diag, off, lambda, &v);
        orthogonalize(&mut y, previous);
        normalize(&mut y);
        v = y;
    }
    // Second pass restores orthogonality lost to round-off.
    orthogonalize(&mut v, previous);
    normalize(&mut v);
    v
}

fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * peak) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Thomson multitaper estimate: mean of the eigenspectra
/// `|DFT(q_k ⊙ x, nfft)|²`, with the shared one-sided normalization.
///
/// Per-bin terms are summed in ascending order, so the result does not depend
/// on the order of the tapers.
pub fn mtse(signal: &Signal, tapers: &TaperSet, nfft: usize) -> Result<PsdEstimate> {
    let m = signal.len();
    if tapers.taper_len() != m {
        return Err(Error::LengthMismatch {
            what: "taper",
            got: tapers.taper_len(),
            expected: m,
        });
    }
    if nfft < m {
        return Err(invalid(
            "nfft",
            format!("{nfft} is shorter than the signal length {m}"),
        ));
    }
    let x = signal.samples();
    let k = tapers.count();

    let mut eigenspectra: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut powers: Vec<f64> = Vec::with_capacity(k);
    for q in tapers.tapers() {
        let tapered: Vec<f64> = x.iter().zip(q).map(|(a, b)| a * b).collect();
        powers.push(tapered.iter().map(|v| v * v).sum());
        let spectrum = fft::dft_padded(&tapered, nfft);
        eigenspectra.push(spectrum.iter().map(|c| c.norm_sqr()).collect());
    }

    let mut terms = vec![0.0; k];
    let averaged: Vec<f64> = (0..nfft)
        .map(|bin| {
            for (t, s) in terms.iter_mut().zip(&eigenspectra) {
                *t = s[bin];
            }
            terms.sort_by(f64::total_cmp);
            terms.iter().sum::<f64>() / k as f64
        })
        .collect();
    powers.sort_by(f64::total_cmp);
    let power = powers.iter().sum::<f64>() / k as f64;

    let (freqs, values, width) = one_sided(&averaged, 1.0);
    PsdEstimate::new(
        freqs,
        values,
        width,
        format!("mtse(NW={},K={k},nfft={nfft})", tapers.time_bandwidth()),
        power,
    )
}
