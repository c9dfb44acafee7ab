//! Discrete Fourier transform.
//!
//! Power-of-two lengths use an iterative radix-2 Cooley-Tukey kernel; every
//! other length goes through Bluestein's chirp-z reformulation on top of it.
//! Forward transforms are unscaled, inverse transforms carry the `1/N`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Forward DFT of a real sequence, `X[k] = Σ x[n] e^{-j2πkn/N}`.
pub fn dft(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform(&mut buf, false);
    buf
}

/// Forward DFT of `samples` zero-padded to `nfft` points.
///
/// Panics if `nfft < samples.len()`.
pub fn dft_padded(samples: &[f64], nfft: usize) -> Vec<Complex64> {
    assert!(nfft >= samples.len(), "nfft shorter than input");
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for (b, &x) in buf.iter_mut().zip(samples) {
        b.re = x;
    }
    transform(&mut buf, false);
    buf
}

/// Inverse DFT, `x[n] = (1/N) Σ X[k] e^{+j2πkn/N}`.
pub fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    transform(&mut buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// In-place unscaled transform of any length.
pub fn transform(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, inverse);
    } else {
        bluestein(buf, inverse);
    }
}

fn radix2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();

    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    // Twiddles evaluated directly (no recurrence) to keep round-off at one ulp.
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| {
            let angle = sign * 2.0 * PI * k as f64 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = if inverse { 1.0 } else { -1.0 };

    // n² mod 2n keeps the chirp phase argument small and exact.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let angle = sign * PI * k2 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = buf[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        let c = chirp[k].conj();
        b[k] = c;
        b[m - k] = c;
    }

    radix2(&mut a, false);
    radix2(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    radix2(&mut a, true);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        buf[k] = a[k] * scale * chirp[k];
    }
}
