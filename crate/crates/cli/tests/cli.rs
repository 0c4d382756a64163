use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn latosc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latosc"))
        .args(args)
        .env("LATOSC_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Column names and data rows of an output file.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let cols = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (cols, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (cols, rows) = read_csv(path);
    let i = cols.iter().position(|c| c == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn file(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn spectrum_site_and_kspace_agree() {
    let dir = TempDir::new().unwrap();
    for rep in ["site", "kspace"] {
        let out = latosc(
            dir.path(),
            &["spectrum", "--gamma-d", "500", "--rep", rep, "--n-eigs", "12"],
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let site = column(&file(&dir, "spectrum_site.csv"), "N_tilde");
    let k = column(&file(&dir, "spectrum_kspace.csv"), "N_tilde");
    assert_eq!(site.len(), 12);
    assert!(site[0] <= 1e-6);
    for (a, b) in site.iter().zip(&k) {
        assert!((a - b).abs() <= 1e-4, "{a} vs {b}");
    }
}

#[test]
fn missing_argument_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = latosc(dir.path(), &["spectrum", "--gamma-d", "500"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(
        code(&latosc(dir.path(), &["spectrum", "--gamma-d", "-1", "--rep", "site"])),
        2
    );
}

#[test]
fn scattering_curves() {
    let dir = TempDir::new().unwrap();
    let out = latosc(
        dir.path(),
        &["scattering", "--v0", "0.001,0.5,1,1.5", "--n-theta", "64"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let path = file(&dir, "scattering.csv");
    let theta = column(&path, "theta0_over_pi");
    let a = column(&path, "a_bar");
    let v0 = column(&path, "v0");
    let origin: Vec<(f64, f64)> = theta
        .iter()
        .zip(&a)
        .zip(&v0)
        .filter(|((t, _), _)| **t == 0.0)
        .map(|((_, a), v)| (*v, *a))
        .collect();
    assert_eq!(origin.len(), 4);
    assert!((origin[1].1 + (-2.0f64).exp()).abs() <= 1e-8, "{:?}", origin[1]);
    assert!(origin.windows(2).all(|w| w[1].1 > w[0].1), "{origin:?}");

    let lam = column(&file(&dir, "scattering_inset.csv"), "lambda_L");
    let inset = column(&file(&dir, "scattering_inset.csv"), "a_bar_at_0");
    for (l, a) in lam.iter().zip(&inset) {
        assert!((a + (-2.0 * l).exp()).abs() <= 1e-9);
    }
}

#[test]
fn empty_depth_list_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&latosc(dir.path(), &["scattering", "--v0"])), 2);
    assert_eq!(code(&latosc(dir.path(), &["scattering", "--v0", ""])), 2);
}

#[test]
fn two_body_profile_is_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = latosc(
        dir.path(),
        &["manybody", "--n", "2", "--lambda", "1", "--method", "quad"],
    );
    assert_eq!(code(&out), 0);
    let path = file(&dir, "manybody_n2_quad_radial.csv");
    for (d, r) in column(&path, "delta").iter().zip(column(&path, "rho_hat")) {
        assert!((r - (2.0 * (d.cos() - 1.0)).exp()).abs() <= 1e-12);
    }
    let (cols, _) = read_csv(&file(&dir, "manybody_n2_quad.csv"));
    assert!(!cols.iter().any(|c| c == "stderr"));
}

#[test]
fn quadrature_rejects_five_particles() {
    let dir = TempDir::new().unwrap();
    let out = latosc(
        dir.path(),
        &["manybody", "--n", "5", "--lambda", "1", "--method", "quad"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn monte_carlo_is_deterministic_and_matches_quadrature() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["manybody", "--n", "4", "--lambda", "1", "--method", "mc", "--seed", "7"];
    assert_eq!(code(&latosc(a.path(), &args)), 0);
    assert_eq!(code(&latosc(b.path(), &args)), 0);
    for name in ["manybody_n4_mc.csv", "manybody_n4_mc_radial.csv"] {
        assert_eq!(
            std::fs::read(file(&a, name)).unwrap(),
            std::fs::read(file(&b, name)).unwrap()
        );
    }

    // Cell-averaged quadrature, the like-for-like comparison with a histogram.
    let cfg = a.path().join("refine.cfg");
    std::fs::write(&cfg, "quad_refine = 5\n").unwrap();
    let out = latosc(
        a.path(),
        &[
            "manybody",
            "--n",
            "4",
            "--lambda",
            "1",
            "--method",
            "quad",
            "--config",
            cfg.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0);
    let q = column(&file(&a, "manybody_n4_quad.csv"), "rho");
    let m = column(&file(&a, "manybody_n4_mc.csv"), "rho");
    let s = column(&file(&a, "manybody_n4_mc.csv"), "stderr");
    let (qs, ms): (f64, f64) = (q.iter().sum(), m.iter().sum());
    let ok = q
        .iter()
        .zip(&m)
        .zip(&s)
        .filter(|((q, m), s)| (*q / qs - *m / ms).abs() <= 3.0 * **s / ms)
        .count();
    assert!(ok as f64 >= 0.99 * q.len() as f64, "{ok} of {}", q.len());
}

#[test]
fn verify_default_passes() {
    let dir = TempDir::new().unwrap();
    let out = latosc(dir.path(), &["verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let (_, rows) = read_csv(&file(&dir, "verify.csv"));
    assert!(rows.iter().all(|r| r[4] != "FAIL"));
}

#[test]
fn verify_reports_printed_coefficient_failure() {
    let dir = TempDir::new().unwrap();
    let out = latosc(dir.path(), &["verify", "--suite", "manybody", "--coeff-c", "2"]);
    assert_eq!(code(&out), 1);
    let (_, rows) = read_csv(&file(&dir, "verify.csv"));
    let ann: Vec<&Vec<String>> = rows.iter().filter(|r| r[1].starts_with("annihilation")).collect();
    assert!(!ann.is_empty());
    for r in ann {
        assert_eq!(r[4], "FAIL");
        assert!(r[2].parse::<f64>().unwrap() > 1e-8);
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("coeff_c = 2"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&latosc(dir.path(), &["verify", "--suite", "everything"])), 2);
}

#[test]
fn header_reproduces_output() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# coarse\nk_points = 512\nn_theta = 32\n").unwrap();
    let args = ["scattering", "--v0", "0.5", "--config", cfg.to_str().unwrap()];
    assert_eq!(code(&latosc(dir.path(), &args)), 0);
    let first = std::fs::read(file(&dir, "scattering.csv")).unwrap();

    let again = TempDir::new().unwrap();
    let src = file(&dir, "scattering.csv");
    let args = ["scattering", "--v0", "0.5", "--config", src.to_str().unwrap()];
    assert_eq!(code(&latosc(again.path(), &args)), 0);
    assert_eq!(std::fs::read(file(&again, "scattering.csv")).unwrap(), first);
    assert!(String::from_utf8_lossy(&first).contains("#! k_points = 512"));
}

#[test]
fn bad_config_reports_line() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "seed = 1\nwarp_factor = 9\n").unwrap();
    let out = latosc(dir.path(), &["angular", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("warp_factor"), "{err}");
}

#[test]
fn plot_script_is_optional() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&latosc(dir.path(), &["groundstate", "--gamma-d", "50"])), 0);
    assert!(!file(&dir, "groundstate.gp").exists());
    assert_eq!(
        code(&latosc(dir.path(), &["groundstate", "--gamma-d", "50", "--emit-plot"])),
        0
    );
    let gp = std::fs::read_to_string(file(&dir, "groundstate.gp")).unwrap();
    assert!(gp.contains("'groundstate.csv'"));
}

#[test]
fn coherent_table_has_seeded_rows() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&latosc(dir.path(), &["coherent", "--gamma-d", "500"])), 0);
    let r = column(&file(&dir, "coherent_defined.csv"), "residual");
    assert_eq!(r.len(), 20);
    assert!(r.iter().all(|x| *x <= 1e-8));
    let out = latosc(
        dir.path(),
        &[
            "coherent",
            "--gamma-d",
            "500",
            "--kind",
            "eigenstate",
            "--alpha",
            "1.5,0",
        ],
    );
    assert_eq!(code(&out), 2);
}
