use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Names accepted by [`FilterPair::builtin`].
pub const BUILTIN_FILTERS: [&str; 15] = [
    "haar", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "db9", "db10", "db11", "db12", "db13",
    "db14", "db15",
];

/// Tolerance every shipped filter meets.
pub const BUILTIN_TOLERANCE: f64 = 1e-9;

/// Orthogonal two-channel analysis pair.
///
/// The highpass is the alternating flip of the lowpass,
/// `g[n] = (-1)^n h[L-1-n]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterPair {
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
    name: String,
}

impl FilterPair {
    /// Builds the pair from lowpass coefficients, checking `Σh = √2` and
    /// double-shift orthonormality to within `tolerance`.
    pub fn from_lowpass(
        name: impl Into<String>,
        lowpass: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self> {
        let name = name.into();
        let len = lowpass.len();
        if len < 2 || !len.is_multiple_of(2) {
            return Err(Error::NotParaunitary {
                name,
                reason: format!("filter length {len} is not even and >= 2"),
            });
        }
        if lowpass.iter().any(|c| !c.is_finite()) {
            return Err(Error::NotParaunitary {
                name,
                reason: "non-finite coefficient".into(),
            });
        }
        let sum: f64 = lowpass.iter().sum();
        if (sum - SQRT_2).abs() > tolerance {
            return Err(Error::NotParaunitary {
                name,
                reason: format!("coefficient sum {sum} differs from sqrt(2)"),
            });
        }
        let (shift, residual) = worst_shift_residual(&lowpass);
        if residual > tolerance {
            return Err(Error::NotParaunitary {
                name,
                reason: format!(
                    "double-shift orthonormality residual {residual:e} at shift k={shift}"
                ),
            });
        }
        let highpass = alternating_flip(&lowpass);
        Ok(Self {
            lowpass,
            highpass,
            name,
        })
    }

    /// `haar` (alias `db1`) or `db2`..`db15`.
    pub fn builtin(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        let order = match lower.as_str() {
            "haar" | "db1" => 1,
            other => other
                .strip_prefix("db")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|n| (2..=15).contains(n))
                .ok_or_else(|| invalid("filter", format!("unknown built-in filter `{name}`")))?,
        };
        let label = if order == 1 {
            "haar".to_string()
        } else {
            lower
        };
        Self::from_lowpass(label, daubechies_lowpass(order), BUILTIN_TOLERANCE)
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Largest `|Σ_n h[n] h[n-2k] - δ_k0|` over all shifts.
    pub fn orthonormality_residual(&self) -> f64 {
        worst_shift_residual(&self.lowpass).1
    }
}

fn alternating_flip(h: &[f64]) -> Vec<f64> {
    let len = h.len();
    (0..len)
        .map(|n| {
            if n % 2 == 0 {
                h[len - 1 - n]
            } else {
                -h[len - 1 - n]
            }
        })
        .collect()
}

fn worst_shift_residual(h: &[f64]) -> (usize, f64) {
    let len = h.len();
    let mut worst = (0, 0.0);
    for k in 0..len.div_ceil(2) {
        let dot: f64 = (2 * k..len).map(|n| h[n] * h[n - 2 * k]).sum();
        let target = if k == 0 { 1.0 } else { 0.0 };
        let r = (dot - target).abs();
        if r > worst.1 {
            worst = (k, r);
        }
    }
    worst
}

/// Parses a coefficient file: one real per line, `#` starts a comment.
pub fn parse_coefficients(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: `{body}` is not a number", lineno + 1)))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse("no coefficients found".into()));
    }
    Ok(out)
}

/// Extremal-phase Daubechies lowpass with `order` vanishing moments
/// (length `2·order`), normalized to `Σh = √2`.
///
/// Spectral factorization: the half-band polynomial
/// `P(y) = Σ_{k<p} C(p-1+k, k) y^k`, `y = sin²(ω/2)`, is factored; each root
/// `y_i` maps to the pair `z, 1/z` solving `z + 1/z = 2 - 4y_i`, of which the
/// root inside the unit circle is kept.
pub fn daubechies_lowpass(order: usize) -> Vec<f64> {
    assert!(order >= 1, "order must be at least 1");
    let p = order;
    let coeffs: Vec<f64> = (0..p).map(|k| binomial(p - 1 + k, k)).collect();
    let mut y_roots = polynomial_roots(&coeffs);
    y_roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));

    // Q(w) = (1 + w)^p Π (w - z_i), ascending powers.
    let mut q = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..p {
        q = poly_mul_linear(&q, Complex64::new(1.0, 0.0));
    }
    for y in y_roots {
        let b = Complex64::new(1.0, 0.0) - y * 2.0;
        let disc = (b * b - 1.0).sqrt();
        let (z1, z2) = (b + disc, b - disc);
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        q = poly_mul_linear(&q, -z);
    }
    let mut h: Vec<f64> = q.iter().rev().map(|c| c.re).collect();
    let sum: f64 = h.iter().sum();
    for c in &mut h {
        *c *= SQRT_2 / sum;
    }
    h
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// Multiplies an ascending-coefficient polynomial by (w + c).
fn poly_mul_linear(p: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (i, &a) in p.iter().enumerate() {
        out[i] += a * c;
        out[i + 1] += a;
    }
    out
}

fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// Roots of a real polynomial given in ascending coefficients, by
/// Aberth-Ehrlich iteration followed by Newton polishing.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let radius = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (v, d) = eval_with_derivative(coeffs, roots[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (roots[i] - roots[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            roots[i] -= step;
            max_step = max_step.max(step.norm() / roots[i].norm().max(1.0));
        }
        if max_step < 1e-16 {
            break;
        }
    }
    for r in &mut roots {
        for _ in 0..3 {
            let (v, d) = eval_with_derivative(coeffs, *r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= v / d;
        }
        // Real polynomial: snap numerically real roots onto the axis.
        if r.im.abs() < 1e-14 * r.norm().max(1.0) {
            r.im = 0.0;
        }
    }
    roots
}
