use std::path::Path;
use std::process::{Command, Output};

fn speclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(args)
        .env_remove("SPECLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

const SMALL_SCAN: &str =
    "experiment = \"gap-scan\"\nseed = 11\nsamples = 3\n[model]\nn = 4\nm = [2, 4]\n";

#[test]
fn presets_list_has_seven_entries() {
    let out = speclab(&["presets", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names = text.lines().filter(|l| !l.starts_with(' ')).count();
    assert_eq!(names, 7, "{text}");
    assert!(text.contains("gap-scan"));
}

#[test]
fn presets_show_prints_toml() {
    let out = speclab(&["presets", "show", "decay"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("experiment = \"decay\""));
    assert_eq!(speclab(&["presets", "show", "nope"]).status.code(), Some(2));
}

#[test]
fn validate_reports_field_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "experiment = \"baker-spectrum\"\n[model]\nn = 10\nk = 4\nl = 1\nm = 2\n",
    );
    let out = speclab(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("K must divide N"));

    let cfg = write_config(
        dir.path(),
        "shift.toml",
        "experiment = \"baker-spectrum\"\n[model]\nn = 32\nk = 4\nl = 8\nm = 2\ndelta = 0.3333333333333333\nshift_mode = \"top\"\n",
    );
    let out = speclab(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("NΔ/2 must be integer"));
}

#[test]
fn validate_echoes_defaults() {
    let out = speclab(&["validate", "gap-scan"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("via_bloch = true"), "{text}");
    assert!(text.contains("bins = 50"), "{text}");
}

#[test]
fn run_writes_contracted_columns_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scan.toml", SMALL_SCAN);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out_a = speclab(&[
        "run",
        &cfg,
        "--out-dir",
        a.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(
        out_a.status.success(),
        "{}",
        String::from_utf8_lossy(&out_a.stderr)
    );
    let out_b = speclab(&[
        "run",
        &cfg,
        "--out-dir",
        b.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(out_b.status.success());

    assert_eq!(
        header(&a.join("spectra.csv")),
        "run_id,eig_index,re,im,is_leading,is_real_flag"
    );
    assert!(header(&a.join("summary.csv")).starts_with("run_id,model,N,M,K,L,delta,gamma,R,N_R"));
    for f in ["spectra.csv", "summary.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f} differs");
        assert!(!x.contains(&b'\r'));
        let text = String::from_utf8(x).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"));
    }
    let meta: String = std::fs::read_to_string(a.join("meta.json")).unwrap();
    assert!(meta.contains("\"seed\": 11"));
    assert!(meta.contains("\"rng\": \"chacha8\""));
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scan.toml", SMALL_SCAN);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(speclab(&["run", &cfg, "--out-dir", a.to_str().unwrap()])
        .status
        .success());
    assert!(speclab(&[
        "run",
        &cfg,
        "--out-dir",
        b.to_str().unwrap(),
        "--seed",
        "12"
    ])
    .status
    .success());
    assert_ne!(
        std::fs::read(a.join("spectra.csv")).unwrap(),
        std::fs::read(b.join("spectra.csv")).unwrap()
    );
}

#[test]
fn threads_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scan.toml", SMALL_SCAN);
    let out = Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args([
            "run",
            &cfg,
            "--out-dir",
            dir.path().join("o").to_str().unwrap(),
        ])
        .env("SPECLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let meta = std::fs::read_to_string(dir.path().join("o/meta.json")).unwrap();
    assert!(meta.contains("\"threads\": 2"));
}

#[test]
fn failed_runs_give_nonzero_exit_and_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "decay.toml",
        "experiment = \"decay\"\n[model]\nensemble = \"external_fields\"\nn = 3\nm = 1\n[dynamics]\nsteps = 5\nstates = 2\n",
    );
    let o = dir.path().join("o");
    let out = speclab(&["run", &cfg, "--out-dir", o.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let summary = std::fs::read_to_string(o.join("summary.csv")).unwrap();
    assert!(summary
        .lines()
        .nth(1)
        .unwrap()
        .contains("error: degenerate"));
}

#[test]
fn missing_config_is_invalid() {
    assert_eq!(
        speclab(&["run", "/nonexistent/config.toml"]).status.code(),
        Some(2)
    );
}
