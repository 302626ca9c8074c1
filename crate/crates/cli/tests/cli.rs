use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "[grid]\nL = 20.0\nn = 240\n\n[campaign]\nt = [0.1, 0.2, 0.5, 1.0]\nx = [-1.0, 0.0, 1.0]\n";

fn heatbound(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatbound"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn heatbound")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn certify_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out = heatbound(dir.path(), &["--config", &config, "--out", "run", "certify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("certificates: 12 rows"), "{stdout}");

    let run = dir.path().join("run");
    let csv = fs::read_to_string(run.join("campaign.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(csv.starts_with(heatbound::report::CSV_HEADER));
    assert!(run.join("campaign.json").exists());
    assert!(run.join("plots/kernel_x00.dat").exists());
    assert!(run.join("plots/profile_t03.dat").exists());

    let out = heatbound(dir.path(), &["--out", "run", "report"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = fs::read_to_string(run.join("summary.txt")).unwrap();
    assert_eq!(summary, String::from_utf8(out.stdout).unwrap());
    // Re-rendering the stored report gives the summary printed by certify.
    assert_eq!(summary, stdout);
}

#[test]
fn formats_restrict_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("csv-only.toml");
    fs::write(&path, format!("{SMALL}\n[output]\nformats = [\"csv\"]\n")).unwrap();
    let out = heatbound(dir.path(), &["--config", path.to_str().unwrap(), "--out", "o", "certify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("o/campaign.csv").exists());
    assert!(!dir.path().join("o/campaign.json").exists());
    assert!(!dir.path().join("o/plots").exists());
}

#[test]
fn report_without_campaign_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = heatbound(dir.path(), &["--out", "nowhere", "report"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nowhere/campaign.json"), "{err}");
}

#[test]
fn bad_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.toml", "[grid]\nwidth = 3\n", "width"),
        ("order.toml", "[problem]\nN = 4\nm = 2\n", "2m > N"),
        ("hyp.toml", "[hypothesis]\nsigma = 1.0\n", "hypothesis"),
    ];
    for (name, body, needle) in cases {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        let out = heatbound(dir.path(), &["--config", path.to_str().unwrap(), "certify"]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(needle), "{name}: {err}");
    }
    let out = heatbound(dir.path(), &["--config", "missing.toml", "certify"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heatbound(dir.path(), &["--threads", "0", "lemmas"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn weak_hypothesis_leaves_rows_unchecked() {
    // A fixed envelope far below the kernel: no row has a valid envelope.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weak.toml");
    fs::write(&path, format!("{SMALL}\n[hypothesis]\nsigma = 1e-3\nmu = 0.5\nlambda = 0.2\n")).unwrap();
    let out = heatbound(dir.path(), &["--config", path.to_str().unwrap(), "--out", "o", "certify"]);
    let code = out.status.code();
    let csv = fs::read_to_string(dir.path().join("o/campaign.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false,envelope-history")), "{csv}");
    // Unchecked rows are not failures.
    assert_eq!(code, Some(0));
}

#[test]
fn lemmas_kernel_fit() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out = heatbound(dir.path(), &["--out", "o", "--seed", "3", "lemmas"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("gamma-lemma: 1900 points, 0 violations"), "{stdout}");
    assert!(stdout.contains("p <= alpha*s: 0"));
    let lemmas = fs::read_to_string(dir.path().join("o/lemmas.csv")).unwrap();
    assert_eq!(lemmas.lines().count(), 1 + 1900 + 972);

    let out = heatbound(dir.path(), &["--config", &config, "--out", "o", "kernel"]);
    assert_eq!(out.status.code(), Some(0));
    let kernel = fs::read_to_string(dir.path().join("o/kernel.csv")).unwrap();
    assert_eq!(kernel.lines().next(), Some("t,x,k_numeric,reference"));
    assert_eq!(kernel.lines().count(), 13);

    let out = heatbound(dir.path(), &["--config", &config, "--out", "o", "fit"]);
    assert_eq!(out.status.code(), Some(0));
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/envelope.json")).unwrap()).unwrap();
    assert!(fit["hypothesis"]["sigma"].as_f64().unwrap() > 0.0);
    assert_eq!(fit["samples"].as_u64(), Some(12));
}

#[test]
fn harmonic_kernel_has_reference_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.toml");
    fs::write(
        &path,
        "[problem]\nm = 1\npotential = \"harmonic\"\n\n[grid]\nL = 10.0\nn = 600\n\n[campaign]\nt = [0.2, 1.0]\nx = [0.0]\n",
    )
    .unwrap();
    let out = heatbound(dir.path(), &["--config", path.to_str().unwrap(), "--out", "o", "kernel"]);
    assert_eq!(out.status.code(), Some(0));
    let kernel = fs::read_to_string(dir.path().join("o/kernel.csv")).unwrap();
    for line in kernel.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(((cols[2] - cols[3]) / cols[3]).abs() < 1e-3, "{line}");
    }
}
