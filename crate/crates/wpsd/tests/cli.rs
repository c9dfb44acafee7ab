use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wpsd::formats::{psd_from_csv, read_metrics, signal_from_csv};
use wpsd::verify_bundle;

fn wpsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = wpsd(args);
    assert!(
        out.status.success(),
        "wpsd {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_writes_requested_length() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sig.csv");
    ok(&[
        "generate",
        "--scenario",
        "partial_band",
        "--length",
        "1024",
        "--seed",
        "3",
        "--out",
        p(&out),
    ]);
    let s = signal_from_csv(&fs::read_to_string(&out).unwrap(), &out).unwrap();
    assert_eq!(s.len(), 1024);
}

#[test]
fn estimate_from_input_file() {
    let tmp = tempfile::tempdir().unwrap();
    let sig = tmp.path().join("sig.csv");
    ok(&[
        "generate",
        "--scenario",
        "single_tone:nu0=0.25",
        "--length",
        "2048",
        "--out",
        p(&sig),
    ]);
    let dir = tmp.path().join("psd");
    ok(&[
        "estimate",
        "--input",
        p(&sig),
        "--estimator",
        "periodogram:window=hann",
        "--estimator",
        "wp:filter=db4,depth=4,boundary=periodic",
        "--out",
        p(&dir),
    ]);
    let mut names: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4, "{names:?}");
    let csv = names
        .iter()
        .find(|n| n.starts_with("psd_periodogram") && n.ends_with(".csv"))
        .unwrap();
    let est = psd_from_csv(&fs::read_to_string(dir.join(csv)).unwrap(), &dir.join(csv)).unwrap();
    let peak = est
        .values()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert!((est.freqs()[peak] - 0.25).abs() < 0.01);
}

#[test]
fn run_writes_verifiable_bundle_and_compare_reproduces_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let stdout = ok(&[
        "run",
        "--scenario",
        "partial_band",
        "--length",
        "4096",
        "--estimator",
        "periodogram",
        "--estimator",
        "welch:segment=64,overlap=0.5",
        "--estimator",
        "wp:filter=db8,depth=5",
        "--out",
        p(&dir),
    ]);
    assert!(
        stdout.contains("baseline: wp(filter=db8,J=5,boundary=zeropad)"),
        "{stdout}"
    );
    let manifest = verify_bundle(&dir).unwrap();
    assert_eq!(manifest.seed, 42);

    let reports: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let n = p.file_name().unwrap().to_string_lossy();
            n.starts_with("metrics_") && n.ends_with(".json")
        })
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    assert_eq!(reports.len(), 3);
    for r in &reports {
        read_metrics(Path::new(r)).unwrap();
    }
    let cmp_dir = tmp.path().join("cmp");
    let mut args = vec![
        "compare",
        "--baseline",
        "wp(filter=db8,J=5,boundary=zeropad)",
        "--out",
        p(&cmp_dir),
    ];
    args.extend(reports.iter().map(String::as_str));
    ok(&args);
    assert_eq!(
        fs::read_to_string(cmp_dir.join("comparison.txt")).unwrap(),
        fs::read_to_string(dir.join("comparison.txt")).unwrap()
    );
}

#[test]
fn run_from_manifest_config() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&[
        "run",
        "--scenario",
        "single_tone",
        "--length",
        "2048",
        "--estimator",
        "mtse",
        "--estimator",
        "wp:depth=4",
        "--out",
        p(&a),
    ]);
    ok(&[
        "run",
        "--config",
        p(&a.join("manifest.json")),
        "--out",
        p(&b),
    ]);
    assert_eq!(
        fs::read(a.join("manifest.json")).unwrap(),
        fs::read(b.join("manifest.json")).unwrap()
    );
}

#[test]
fn sweep_writes_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sweep");
    ok(&[
        "sweep",
        "--scenario",
        "partial_band",
        "--length",
        "2048",
        "--estimator",
        "periodogram",
        "--estimator",
        "wp:depth=3",
        "--param",
        "depth",
        "--values",
        "3,4,5",
        "--out",
        p(&dir),
    ]);
    let summary = fs::read_to_string(dir.join("sweep_summary.csv")).unwrap();
    assert!(summary.starts_with("parameter,value,estimator_desc"));
    assert_eq!(summary.lines().count(), 1 + 3 * 2);
}

#[test]
fn bad_estimator_fails_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let out = wpsd(&[
        "run",
        "--scenario",
        "partial_band",
        "--length",
        "1024",
        "--estimator",
        "periodogram",
        "--estimator",
        "wp:depth=40",
        "--out",
        p(&dir),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!dir.exists());
    let leftovers = fs::read_dir(tmp.path()).unwrap().count();
    assert_eq!(leftovers, 0);
}

#[test]
fn unknown_estimator_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wpsd(&[
        "estimate",
        "--estimator",
        "welch:segmnt=64",
        "--out",
        p(&tmp.path().join("x")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("segmnt"));
}
