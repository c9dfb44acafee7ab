//! Spectral estimation on finite real sequences.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only the numerical
//! parts: signal synthesis, the Fourier family of estimators (periodogram,
//! Blackman-Tukey, Welch), Thomson multitaper with Slepian tapers, a
//! wavelet-packet PSD estimator built on paraunitary two-channel filter banks,
//! and the metrics used to compare all of them.
//!
//! Frequencies are normalized so that `1.0` is Nyquist (π rad/sample). Every
//! estimate is one-sided on `[0, 1]` and its bin-width sum equals the power of
//! the analyzed sequence.
#![no_std]

extern crate alloc;

mod error;
pub mod fft;
pub mod fourier;
pub mod metrics;
pub mod multitaper;
pub mod signals;
pub mod wpt;

pub use error::{Error, Result};
pub use fourier::{blackman_tukey, periodogram, welch, PsdEstimate};
pub use metrics::{
    compare, evaluate, BandKind, BandSpec, Comparison, Grade, Metric, MetricsReport, Scenario,
};
pub use multitaper::{dpss, mtse, TaperSet};
pub use signals::{
    make_partial_band, make_tone, make_white_noise, make_window, Signal, Window, WindowKind,
};
pub use wpt::{
    gray_order, wp_decompose, wp_psd, wp_reconstruct, BoundaryMode, FilterPair, WpPsd, WpTree,
};

/// Smallest power of two that is `>= n` (and at least 1).
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}
