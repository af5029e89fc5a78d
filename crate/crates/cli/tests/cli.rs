use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn hcontact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcontact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    hcontact(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn cubic_profile_passes() {
    let tmp = TempDir::new().unwrap();
    let o = run("check-profile", &configs().join("cubic.toml"), tmp.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
    assert!(tmp.path().join("admissibility.json").exists());
}

#[test]
fn crossing_profile_fails_with_exit_one() {
    let tmp = TempDir::new().unwrap();
    let o = run("check-profile", &configs().join("affine_counterexample.toml"), tmp.path(), &[]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL"));
}

#[test]
fn empty_window_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "empty.toml", "[profile]\nname = \"cubic\"\nwindow = [1.0, 1.0]\n");
    assert_eq!(code(&run("check-profile", &cfg, tmp.path(), &[])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&hcontact(&["frobnicate"])), 2);
    assert_eq!(code(&hcontact(&["area"])), 2);
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.toml");
    assert_eq!(code(&run("area", &missing, tmp.path(), &[])), 2);
    let cfg = write_config(&tmp, "typo.toml", "[profile]\nname = \"cubic\"\nwindow = [-1.0, 1.0]\nwindw = 3\n");
    assert_eq!(code(&run("area", &cfg, tmp.path(), &[])), 2);
}

#[test]
fn oversized_field_is_a_degeneracy() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "huge.toml",
        r#"
[profile]
name = "plane(1)"
window = [-30.0, 30.0]

[fields]
random = 0

[[fields.explicit]]
name = "huge"
v1 = [{ amplitude = 1000.0, eta_c = 0.5, tau_c = 0.5, w_eta = 0.25, w_tau = 0.25 }]
"#,
    );
    let o = run("variation", &cfg, tmp.path(), &["--cells", "16"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("DEGENERATE"));
}

#[test]
fn zero_field_gives_zero_variations() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "zero.toml",
        r#"
[profile]
name = "ramp(1)"
window = [-30.0, 30.0]

[fields]
random = 0

[[fields.explicit]]
name = "zero"
"#,
    );
    let o = run("variation", &cfg, tmp.path(), &["--cells", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(tmp.path().join("variation.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    for col in ["first_analytic", "first_fd", "second_analytic", "second_fd"] {
        let i = header.iter().position(|h| *h == col).unwrap_or_else(|| panic!("column {col}"));
        assert_eq!(row[i].parse::<f64>().unwrap(), 0.0, "{col}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = configs().join("ramp.toml");
    for sub in ["check-profile", "area", "variation", "lift"] {
        for dir in [&a, &b] {
            let o = run(sub, &cfg, dir.path(), &["--cells", "16", "--seed", "7"]);
            assert_eq!(code(&o), 0, "{sub}: {}", String::from_utf8_lossy(&o.stdout));
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 6, "{names:?}");
    for name in names {
        let (x, y) = (fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
        assert!(x == y, "{name:?} differs between runs");
    }
}

#[test]
fn seed_changes_random_fields() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = configs().join("plane.toml");
    run("variation", &cfg, a.path(), &["--cells", "16", "--seed", "1"]);
    run("variation", &cfg, b.path(), &["--cells", "16", "--seed", "2"]);
    let x = fs::read(a.path().join("variation.csv")).unwrap();
    let y = fs::read(b.path().join("variation.csv")).unwrap();
    assert_ne!(x, y);
}
