use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::fourier::PsdEstimate;

use super::order::gray_order;
use super::transform::WpTree;

/// Band powers from a wavelet-packet tree, in ascending-frequency order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WpPsd {
    leaf_powers: Vec<f64>,
    leaf_width: f64,
    estimator_desc: String,
}

impl WpPsd {
    /// Power in each band: leaf energy over the padded sample count.
    pub fn leaf_powers(&self) -> &[f64] {
        &self.leaf_powers
    }

    /// Normalized width `1 / 2^J` of every band.
    pub fn leaf_width(&self) -> f64 {
        self.leaf_width
    }

    pub fn total_power(&self) -> f64 {
        self.leaf_powers.iter().sum()
    }

    /// Densities `P_m / width`.
    pub fn densities(&self) -> Vec<f64> {
        self.leaf_powers
            .iter()
            .map(|p| p / self.leaf_width)
            .collect()
    }

    pub fn estimator_desc(&self) -> &str {
        &self.estimator_desc
    }

    /// Piecewise-constant estimate sampled at the band centres.
    pub fn as_estimate(&self) -> Result<PsdEstimate> {
        let bands = self.leaf_powers.len();
        let freqs = (0..bands)
            .map(|m| (m as f64 + 0.5) * self.leaf_width)
            .collect();
        PsdEstimate::new(
            freqs,
            self.densities(),
            self.leaf_width,
            self.estimator_desc.clone(),
            self.total_power(),
        )
    }
}

/// Leaf energies `E_m = Σ s_m[k]²`, powers `P_m = E_m / N'` and densities
/// `P_m · 2^J`, reordered from filter-path to frequency order.
pub fn wp_psd(tree: &WpTree) -> WpPsd {
    let n = tree.padded_length() as f64;
    let leaves = tree.leaves();
    let leaf_powers = gray_order(tree.depth())
        .into_iter()
        .map(|leaf| leaves[leaf].iter().map(|s| s * s).sum::<f64>() / n)
        .collect();
    WpPsd {
        leaf_powers,
        leaf_width: 1.0 / leaves.len() as f64,
        estimator_desc: format!(
            "wp(filter={},J={},boundary={})",
            tree.filter_name(),
            tree.depth(),
            tree.boundary_mode().name()
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{make_tone, make_white_noise};
    use crate::wpt::{wp_decompose, BoundaryMode, FilterPair};

    #[test]
    fn powers_sum_to_padded_mean_power() {
        let f = FilterPair::builtin("db8").unwrap();
        let x = make_white_noise(1000, 1.0, 8).unwrap();
        let t = wp_decompose(&x, &f, 5, BoundaryMode::ZeroPad).unwrap();
        let psd = wp_psd(&t);
        let padded_power = x.samples().iter().map(|v| v * v).sum::<f64>() / 1024.0;
        assert!((psd.total_power() - padded_power).abs() <= 1e-9 * padded_power);
        let est = psd.as_estimate().unwrap();
        assert!((est.integral() - padded_power).abs() <= 1e-9 * padded_power);
        assert_eq!(est.len(), 32);
        assert!(est.estimator_desc().contains("zeropad"));
    }

    #[test]
    fn tone_lands_in_its_band() {
        let f = FilterPair::builtin("db8").unwrap();
        let x = make_tone(4096, 0.3125, 1.0, 0.0).unwrap();
        let t = wp_decompose(&x, &f, 3, BoundaryMode::Periodic).unwrap();
        let psd = wp_psd(&t);
        assert!(psd.leaf_powers()[2] >= 0.8 * psd.total_power());
    }
}
