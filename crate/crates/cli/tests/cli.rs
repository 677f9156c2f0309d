use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_magnonet"))
}

fn reference_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn field(row: &[String], i: usize) -> f64 {
    row[i].parse().unwrap()
}

fn run_to_file(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let out = dir.path().join(name);
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    full.extend(["--out", out_str]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(out).unwrap()
}

#[test]
fn every_command_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = reference_config();
    let cfg = cfg.to_str().unwrap();
    for cmd in [
        vec!["transfer", cfg],
        vec!["entangle", cfg],
        vec!["validate", cfg],
        vec!["qle", cfg],
    ] {
        let a = run_to_file(&dir, "a.csv", &cmd);
        let b = run_to_file(&dir, "b.csv", &cmd);
        assert_eq!(a.as_bytes(), b.as_bytes(), "{cmd:?}");
        assert!(a.starts_with("# tool: magnonet "));
        assert!(a.contains("# config_sha256: "));
        assert!(!a.contains('\r'));
    }
}

#[test]
fn transfer_reference_rows() {
    let cfg = reference_config();
    let o = run(&["transfer", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("state,S,W,T,F_engine,F_closed,abs_diff"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "fock_1");
    assert!((field(&rows[0], 4) - 0.16).abs() < 0.005);
    assert!(field(&rows[0], 6) < 1e-8);
}

#[test]
fn lossless_transfer_gives_sw_powers() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.toml",
        "[fiber]\nlength_km = 0.0\n\n[[states]]\nkind = \"fock\"\nn = 2\n\n[[states]]\nkind = \"fock\"\nn = 3\n",
    );
    let text = run_to_file(&dir, "t.csv", &["transfer", cfg.to_str().unwrap()]);
    for (row, n) in data_rows(&text).iter().zip([2, 3]) {
        let (s, w, t) = (field(row, 1), field(row, 2), field(row, 3));
        assert_eq!(t, 1.0);
        assert!((field(row, 5) - (s * w).powi(n)).abs() < 1e-10);
    }
}

#[test]
fn validate_reports_unit_transmittance_for_zero_fiber() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[fiber]\nlength_km = 0.0\n");
    let text = run_to_file(&dir, "v.csv", &["validate", cfg.to_str().unwrap()]);
    let rows = data_rows(&text);
    assert!(rows.iter().all(|r| r[1] == "true"));
    let t = rows.iter().find(|r| r[0] == "fiber_transmittance").unwrap();
    assert_eq!(t[2], "1");
}

#[test]
fn entangle_reference_and_zero_squeezing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[entangle]\nw = 1.0\n");
    let text = run_to_file(&dir, "e.csv", &["entangle", cfg.to_str().unwrap()]);
    let row = &data_rows(&text)[0];
    assert!((field(row, 2) - 0.78).abs() < 0.01);
    assert!((field(row, 3) - field(row, 2)).abs() < 1e-3);

    let cfg = write(&dir, "z.toml", "[entangle]\nr = 0.0\n");
    let text = run_to_file(&dir, "z.csv", &["entangle", cfg.to_str().unwrap()]);
    let row = &data_rows(&text)[0];
    assert_eq!(field(row, 2), 0.0);
    assert_eq!(field(row, 3), 0.0);
}

#[test]
fn small_truncation_at_large_squeezing_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[entangle]\nr = 1.2\n");
    let o = run(&["entangle", cfg.to_str().unwrap(), "--truncation", "8"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("leak"), "{err}");
}

#[test]
fn malformed_config_exits_2_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[fiber]\nattenuation_db_km = 0.2\n");
    let o = run(&["transfer", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("attenuation_db_km"));

    let cfg = write(&dir, "n.toml", "[mechanical]\ngamma_over_2pi_hz = -1.0\n");
    assert_eq!(run(&["transfer", cfg.to_str().unwrap()]).status.code(), Some(2));

    let o = run(&["transfer", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig5_grid_shape_and_order() {
    let dir = TempDir::new().unwrap();
    let text = run_to_file(&dir, "f.csv", &["fig5"]);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4 * 31);
    let ws: Vec<f64> = rows.iter().map(|r| field(r, 1)).collect();
    for (block, w) in [1.0, 0.8, 0.5, 0.2].iter().enumerate() {
        for (i, row) in rows[block * 31..(block + 1) * 31].iter().enumerate() {
            assert_eq!(ws[block * 31 + i], *w);
            assert!((field(row, 0) - 0.05 * i as f64).abs() < 1e-12);
        }
    }
    for row in &rows[..31] {
        assert!((field(row, 2) - 2.0 * field(row, 0)).abs() < 1e-11);
    }
}

#[test]
fn qle_error_grows_with_coupling() {
    let cfg = reference_config();
    let o = run(&["qle", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&String::from_utf8(o.stdout).unwrap());
    let errs: Vec<f64> = rows.iter().map(|r| field(r, 3)).collect();
    assert_eq!(errs.len(), 3);
    assert!(errs[0] < errs[1] && errs[1] < errs[2], "{errs:?}");
}
