//! Estimator specifications and their dispatch onto the core estimators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wpsd_core::{
    blackman_tukey, dpss, make_window, mtse, next_pow2, periodogram, welch, wp_decompose, wp_psd,
    BoundaryMode, PsdEstimate, Signal, WindowKind,
};

use crate::error::{Error, Result};
use crate::formats::load_filter;
use crate::params::Params;

/// Smallest FFT size used when `nfft` is not given.
pub const MIN_NFFT: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EstimatorSpec {
    Periodogram {
        window: WindowKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nfft: Option<usize>,
    },
    Welch {
        segment: usize,
        overlap: f64,
        window: WindowKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nfft: Option<usize>,
    },
    BlackmanTukey {
        max_lag: usize,
        window: WindowKind,
    },
    Mtse {
        nw: f64,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nfft: Option<usize>,
    },
    Wp {
        filter: String,
        depth: u32,
        boundary: BoundaryMode,
    },
}

/// FFT size used when none is given: `max(256, next power of two ≥ len)`.
pub fn default_nfft(len: usize) -> usize {
    next_pow2(len).max(MIN_NFFT)
}

impl EstimatorSpec {
    pub fn wp(filter: &str, depth: u32, boundary: BoundaryMode) -> Self {
        Self::Wp {
            filter: filter.to_string(),
            depth,
            boundary,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            Self::Periodogram { .. } => "periodogram",
            Self::Welch { .. } => "welch",
            Self::BlackmanTukey { .. } => "bt",
            Self::Mtse { .. } => "mtse",
            Self::Wp { .. } => "wp",
        }
    }

    pub fn is_wp(&self) -> bool {
        matches!(self, Self::Wp { .. })
    }

    /// Runs the estimator. Errors carry the spec text.
    pub fn estimate(&self, signal: &Signal) -> Result<PsdEstimate> {
        let n = signal.len();
        let run = || -> wpsd_core::Result<PsdEstimate> {
            match self {
                Self::Periodogram { window, nfft } => {
                    let w = make_window(*window, n)?;
                    periodogram(signal, &w, nfft.unwrap_or_else(|| default_nfft(n)))
                }
                Self::Welch {
                    segment,
                    overlap,
                    window,
                    nfft,
                } => welch(
                    signal,
                    *segment,
                    *overlap,
                    *window,
                    nfft.unwrap_or_else(|| default_nfft(*segment)),
                ),
                Self::BlackmanTukey { max_lag, window } => {
                    blackman_tukey(signal, *max_lag, *window)
                }
                Self::Mtse { nw, k, nfft } => {
                    let tapers = dpss(n, *nw, *k)?;
                    mtse(signal, &tapers, nfft.unwrap_or_else(|| default_nfft(n)))
                }
                Self::Wp { .. } => unreachable!(),
            }
        };
        let wrap = |source| Error::Estimator {
            spec: self.to_string(),
            source,
        };
        match self {
            Self::Wp {
                filter,
                depth,
                boundary,
            } => {
                let filters = load_filter(filter).map_err(|e| match e {
                    Error::Core(source) => wrap(source),
                    other => other,
                })?;
                let tree = wp_decompose(signal, &filters, *depth, *boundary).map_err(wrap)?;
                wp_psd(&tree).as_estimate().map_err(wrap)
            }
            _ => run().map_err(wrap),
        }
    }

    /// Sets the named sweep parameter if this estimator has it.
    pub fn with_param(&self, param: &str, value: f64) -> Option<Self> {
        let as_count = || (value >= 0.0 && value.fract() == 0.0).then_some(value as usize);
        let mut out = self.clone();
        match (&mut out, param) {
            (Self::Wp { depth, .. }, "depth") => *depth = as_count()? as u32,
            (Self::Welch { segment, .. }, "segment_len") => *segment = as_count()?,
            (Self::BlackmanTukey { max_lag, .. }, "max_lag") => *max_lag = as_count()?,
            (Self::Mtse { k, .. }, "k") => *k = as_count()?,
            _ => return None,
        }
        Some(out)
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nfft = |n: &Option<usize>| n.map(|n| format!(",nfft={n}")).unwrap_or_default();
        match self {
            Self::Periodogram { window, nfft: n } => {
                write!(f, "periodogram:window={}{}", window.name(), nfft(n))
            }
            Self::Welch {
                segment,
                overlap,
                window,
                nfft: n,
            } => write!(
                f,
                "welch:segment={segment},overlap={overlap},window={}{}",
                window.name(),
                nfft(n)
            ),
            Self::BlackmanTukey { max_lag, window } => {
                write!(f, "bt:max_lag={max_lag},window={}", window.name())
            }
            Self::Mtse { nw, k, nfft: n } => write!(f, "mtse:nw={nw},k={k}{}", nfft(n)),
            Self::Wp {
                filter,
                depth,
                boundary,
            } => write!(
                f,
                "wp:filter={filter},depth={depth},boundary={}",
                boundary.name()
            ),
        }
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Params::parse(s)?;
        let spec = match p.name.as_str() {
            "periodogram" | "pgram" => Self::Periodogram {
                window: p.take_or(&["window", "w"], WindowKind::Rectangular)?,
                nfft: p.take(&["nfft"])?,
            },
            "welch" => Self::Welch {
                segment: p.take_or(&["segment", "segment_len", "seg"], 64)?,
                overlap: p.take_or(&["overlap"], 0.5)?,
                window: p.take_or(&["window", "w"], WindowKind::Hamming)?,
                nfft: p.take(&["nfft"])?,
            },
            "bt" | "blackman_tukey" | "blackman-tukey" => Self::BlackmanTukey {
                max_lag: p.take_or(&["max_lag", "lag", "l"], 64)?,
                window: p.take_or(&["window", "w"], WindowKind::Hamming)?,
            },
            "mtse" | "multitaper" => Self::Mtse {
                nw: p.take_or(&["nw"], 4.0)?,
                k: p.take_or(&["k"], 7)?,
                nfft: p.take(&["nfft"])?,
            },
            "wp" | "wavelet_packet" => Self::Wp {
                filter: p.take_or(&["filter", "f"], "db8".to_string())?,
                depth: p.take_or(&["depth", "j"], 5)?,
                boundary: p.take_or(&["boundary", "mode"], BoundaryMode::ZeroPad)?,
            },
            other => {
                return Err(Error::Format(format!(
                    "unknown estimator `{other}` (expected periodogram, welch, bt, mtse or wp)"
                )))
            }
        };
        p.finish()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_text_and_json() {
        for text in [
            "periodogram:window=hann",
            "periodogram:window=rectangular,nfft=12800",
            "welch:segment=64,overlap=0.5,window=hamming",
            "bt:max_lag=32,window=blackman",
            "mtse:nw=2.5,k=4,nfft=1024",
            "wp:filter=db15,depth=8,boundary=periodic",
        ] {
            let spec: EstimatorSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<EstimatorSpec>(&json).unwrap(), spec);
        }
        let spec: EstimatorSpec = "wp".parse().unwrap();
        assert_eq!(spec, EstimatorSpec::wp("db8", 5, BoundaryMode::ZeroPad));
        assert!("wp:depth=5,colour=red".parse::<EstimatorSpec>().is_err());
        assert!("ar:order=4".parse::<EstimatorSpec>().is_err());
    }

    #[test]
    fn errors_name_the_estimator() {
        let s = wpsd_core::make_tone(12800, 0.5, 1.0, 0.0).unwrap();
        let spec = EstimatorSpec::wp("db8", 10, BoundaryMode::Periodic);
        let err = spec.estimate(&s).unwrap_err().to_string();
        assert!(
            err.contains("wp:filter=db8,depth=10,boundary=periodic"),
            "{err}"
        );
        assert!(err.contains("divis"), "{err}");
    }

    #[test]
    fn sweep_parameters() {
        let wp = EstimatorSpec::wp("db8", 5, BoundaryMode::ZeroPad);
        assert_eq!(
            wp.with_param("depth", 8.0),
            Some(EstimatorSpec::wp("db8", 8, BoundaryMode::ZeroPad))
        );
        assert_eq!(wp.with_param("k", 3.0), None);
        assert_eq!(wp.with_param("depth", 2.5), None);
    }
}
