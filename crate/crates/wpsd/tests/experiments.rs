use std::fs;

use wpsd::{evaluate_config, run_experiment, EstimatorSpec, ExperimentConfig, ScenarioSpec};
use wpsd_core::{Grade, Metric};

fn cell(cfg: &ExperimentConfig, row: &str, metric: Metric) -> Grade {
    let table = evaluate_config(cfg).unwrap().comparison;
    let desc = table
        .rows
        .iter()
        .map(|r| r.estimator_desc.clone())
        .find(|d| d.starts_with(row))
        .unwrap();
    table.cell(&desc, metric).unwrap().grade
}

#[test]
fn default_tone_bundle_has_five_estimates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tone");
    let cfg = ExperimentConfig::defaults_for(ScenarioSpec::single_tone());
    let bundle = run_experiment(&cfg, &out).unwrap();
    let names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let psd = names.iter().filter(|n| n.starts_with("psd_")).count();
    let metrics = names.iter().filter(|n| n.starts_with("metrics_")).count();
    assert_eq!((psd, metrics), (5, 5));
    for f in ["comparison.txt", "comparison.json", "manifest.json"] {
        assert!(names.iter().any(|n| n == f), "{f} missing");
    }
    assert_eq!(bundle.outcome.comparison.rows.len(), 4);
}

#[test]
fn periodic_depth_ten_on_12800_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::defaults_for(ScenarioSpec::single_tone());
    cfg.estimators = vec![
        "periodogram".parse().unwrap(),
        "wp:depth=10,boundary=periodic".parse().unwrap(),
    ];
    let out = tmp.path().join("bad");
    let err = run_experiment(&cfg, &out).unwrap_err().to_string();
    assert!(err.contains("1024") || err.contains("divis"), "{err}");
    assert!(!out.exists());
}

#[test]
fn deep_wp_beats_periodogram_on_passband_variance() {
    let mut cfg = ExperimentConfig::defaults_for(ScenarioSpec::partial_band());
    cfg.estimators = vec![
        "periodogram".parse().unwrap(),
        "wp:filter=db8,depth=11".parse().unwrap(),
    ];
    assert_eq!(
        cell(&cfg, "periodogram", Metric::VariancePass),
        Grade::Better
    );
}

#[test]
fn wp_resolves_the_tone_better_than_welch() {
    let cfg = ExperimentConfig::defaults_for(ScenarioSpec::single_tone());
    assert_eq!(
        cell(&cfg, "welch", Metric::FrequencyResolution),
        Grade::Better
    );
}

#[test]
fn welch_transition_band_is_similar() {
    let cfg = ExperimentConfig::defaults_for(ScenarioSpec::partial_band());
    assert_eq!(cell(&cfg, "welch", Metric::TransitionBand), Grade::Similar);
}

#[test]
fn estimator_text_round_trips_through_display() {
    for text in [
        "periodogram:window=hann,nfft=1024",
        "welch:segment=128,overlap=0.25,window=rectangular",
        "bt:max_lag=32,window=hamming",
        "mtse:nw=3,k=5",
        "wp:filter=haar,depth=3,boundary=periodic",
    ] {
        let spec: EstimatorSpec = text.parse().unwrap();
        let again: EstimatorSpec = spec.to_string().parse().unwrap();
        assert_eq!(spec, again, "{text}");
    }
}
