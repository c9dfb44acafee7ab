use proptest::prelude::*;
use wpsd_core::metrics::{band_stats, sidelobe_suppression};
use wpsd_core::wpt::BUILTIN_FILTERS;
use wpsd_core::{
    compare, dpss, evaluate, gray_order, make_tone, make_white_noise, make_window, mtse,
    periodogram, welch, wp_decompose, wp_psd, wp_reconstruct, BandKind, BandSpec, BoundaryMode,
    FilterPair, Metric, PsdEstimate, Scenario, Signal, WindowKind,
};

fn scaled(est: &PsdEstimate, c: f64) -> PsdEstimate {
    PsdEstimate::new(
        est.freqs().to_vec(),
        est.values().iter().map(|v| v * c).collect(),
        est.bin_width(),
        est.estimator_desc(),
        est.analyzed_power() * c,
    )
    .unwrap()
}

fn window_kind() -> impl Strategy<Value = WindowKind> {
    prop_oneof![
        Just(WindowKind::Rectangular),
        Just(WindowKind::Hann),
        Just(WindowKind::Hamming),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodogram_integral_is_analyzed_power(
        len in 16usize..600,
        pad in 0u32..3,
        kind in window_kind(),
        seed in any::<u64>(),
    ) {
        let s = make_white_noise(len, 1.0, seed).unwrap();
        let nfft = len.next_power_of_two() << pad;
        let w = make_window(kind, len).unwrap();
        let est = periodogram(&s, &w, nfft).unwrap();
        let weighted: f64 = s.samples().iter().zip(w.coefficients()).map(|(x, w)| (x * w).powi(2)).sum();
        let norm: f64 = w.coefficients().iter().map(|w| w * w).sum();
        let expected = weighted / norm;
        prop_assert!((est.integral() - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn welch_integral_is_mean_segment_power(
        segs in 2usize..20,
        seed in any::<u64>(),
    ) {
        let seg = 32;
        let len = seg / 2 * (segs + 1);
        let s = make_white_noise(len, 1.0, seed).unwrap();
        let est = welch(&s, seg, 0.5, WindowKind::Hann, 64).unwrap();
        prop_assert!((est.integral() - est.analyzed_power()).abs() <= 1e-9 * est.analyzed_power());
    }

    #[test]
    fn wp_preserves_energy_and_inverts(
        filter in 0usize..BUILTIN_FILTERS.len(),
        depth in 1u32..6,
        blocks in 1usize..4,
        seed in any::<u64>(),
    ) {
        let f = FilterPair::builtin(BUILTIN_FILTERS[filter]).unwrap();
        let len = 1024 * blocks;
        let s = make_white_noise(len, 2.0, seed).unwrap();
        let tree = wp_decompose(&s, &f, depth, BoundaryMode::Periodic).unwrap();
        let e: f64 = s.samples().iter().map(|v| v * v).sum();
        prop_assert!((tree.energy() - e).abs() <= 1e-10 * e);
        let back = wp_reconstruct(&tree, &f).unwrap();
        for (a, b) in back.samples().iter().zip(s.samples()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        let psd = wp_psd(&tree);
        prop_assert!((psd.total_power() - e / len as f64).abs() <= 1e-10 * e);
    }

    #[test]
    fn gray_order_is_a_bijection(depth in 1u32..12) {
        let mut order = gray_order(depth);
        prop_assert_eq!(order.len(), 1usize << depth);
        order.sort_unstable();
        prop_assert!(order.iter().enumerate().all(|(i, v)| i == *v));
    }

    #[test]
    fn compare_is_antisymmetric(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let scenario = Scenario::PartialBand { lo: 0.25, hi: 0.75 };
        let report = |seed: u64, nfft: usize, desc: &str| {
            let s = make_white_noise(512, 1.0, seed).unwrap();
            let w = make_window(WindowKind::Hann, 512).unwrap();
            let est = periodogram(&s, &w, nfft).unwrap().with_desc(desc);
            evaluate(&est, &scenario, &[]).unwrap()
        };
        let a = report(seed_a, 512, "a");
        let b = report(seed_b, 1024, "b");
        for m in Metric::columns(&a.scenario) {
            let (g_ab, m_ab) = m.grade(&a, &b);
            let (g_ba, m_ba) = m.grade(&b, &a);
            prop_assert_eq!(g_ab, g_ba.flipped());
            match (m_ab, m_ba) {
                (Some(x), Some(y)) => prop_assert!((x + y).abs() <= 1e-9),
                (None, None) => {}
                _ => prop_assert!(false, "margin present on one side only"),
            }
        }
        let table = compare(&[a.clone(), b.clone()], "a").unwrap();
        prop_assert_eq!(table.rows.len(), 1);
    }

    #[test]
    fn sidelobe_suppression_ignores_scale(
        seed in any::<u64>(),
        log_scale in -6.0f64..6.0,
    ) {
        let noise = make_white_noise(256, 1e-3, seed).unwrap();
        let tone = make_tone(256, 0.5, 1.0, 0.0).unwrap();
        let samples = tone.samples().iter().zip(noise.samples()).map(|(a, b)| a + b).collect();
        let s = Signal::new(samples, "tone+noise", seed).unwrap();
        let tapers = dpss(256, 3.0, 5).unwrap();
        let est = mtse(&s, &tapers, 1024).unwrap();
        let c = 10f64.powf(log_scale);
        let a = sidelobe_suppression(&est, 0.5).unwrap();
        let b = sidelobe_suppression(&scaled(&est, c), 0.5).unwrap();
        prop_assert!((a - b).abs() <= 1e-8);
    }

    #[test]
    fn band_stats_scale_like_the_estimate(
        seed in any::<u64>(),
        log_scale in -4.0f64..4.0,
        lo in 0.0f64..0.5,
        width in 0.05f64..0.5,
    ) {
        let s = make_white_noise(300, 1.0, seed).unwrap();
        let w = make_window(WindowKind::Rectangular, 300).unwrap();
        let est = periodogram(&s, &w, 512).unwrap();
        let band = BandSpec::new(lo, lo + width, BandKind::Passband).unwrap();
        let c = 10f64.powf(log_scale);
        let a = band_stats(&est, &band).unwrap();
        let b = band_stats(&scaled(&est, c), &band).unwrap();
        prop_assert_eq!(a.bins, b.bins);
        prop_assert!((b.mean - c * a.mean).abs() <= 1e-9 * c * a.mean);
        prop_assert!((b.variance - c * c * a.variance).abs() <= 1e-9 * c * c * a.variance.max(1e-300));
        prop_assert!((b.mean_db - a.mean_db - 10.0 * log_scale).abs() <= 1e-8);
        prop_assert!((b.variance_db - a.variance_db).abs() <= 1e-8);
    }

    #[test]
    fn mtse_is_independent_of_taper_order(seed in any::<u64>(), rot in 1usize..5) {
        let s = make_white_noise(128, 1.0, seed).unwrap();
        let set = dpss(128, 3.0, 5).unwrap();
        let order: Vec<usize> = (0..5).map(|i| (i + rot) % 5).collect();
        let a = mtse(&s, &set, 256).unwrap();
        let b = mtse(&s, &set.reordered(&order).unwrap(), 256).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }
}

#[test]
fn signal_rejects_non_finite_samples() {
    assert!(Signal::new(vec![0.0, f64::NAN], "x", 0).is_err());
}
