use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn pdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdm")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const OSCILLATOR: &str = "[mass]\nfamily = constant\nvalue = 1\n[potential]\nexpr = r^2\n[solver]\nr_max = 8\nn_max = 3\n";
const PCT: &str = "[mass]\nfamily = power_law\ncoeff = 1\nexponent = 2\n[problem]\nd = 3\nell = 1\n[solver]\nr_max = 5\nn_max = 3\n";

#[test]
fn solve_both_solvers_agree() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "osc.ini", OSCILLATOR);
    let out = dir.path().join("spectrum.csv");
    let run = pdm(&["solve", s(&cfg), "--solver", "both", "--out", s(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(table[0], ["n_r", "E", "solver", "node_count", "est_error"]);
    assert_eq!(table.len(), 9);
    for n in 0..4 {
        let shoot: f64 = table[1 + n][1].parse().unwrap();
        let fd: f64 = table[5 + n][1].parse().unwrap();
        let exact = 4.0 * n as f64 + 3.0;
        assert!((shoot - exact).abs() / exact < 1e-3 && (fd - exact).abs() / exact < 1e-3);
        assert_eq!(table[1 + n][3], n.to_string());
    }
}

#[test]
fn output_is_deterministic_and_jobs_do_not_reorder() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "osc.ini", OSCILLATOR);
    let a = pdm(&["solve", s(&cfg)]);
    let b = pdm(&["--jobs", "2", "solve", s(&cfg)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let no_mass = write(&dir, "a.ini", "[potential]\nexpr = r^2\n");
    let run = pdm(&["solve", s(&no_mass)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("[mass]"));
    let unknown = write(&dir, "b.ini", &format!("{OSCILLATOR}[solver]\nstep = 2\n"));
    let run = pdm(&["solve", s(&unknown)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("step"));
    assert_eq!(pdm(&["solve", "/nonexistent/file.ini"]).status.code(), Some(2));
}

#[test]
fn pct_prediction_matches_numerics() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "pct.ini", PCT);
    let out = dir.path().join("pct.csv");
    let run = pdm(&["pct", s(&cfg), "--reference", "oscillator:k=1", "--out", s(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(table[0], ["n_r", "E_predicted", "E_shooting", "E_fd", "rel_dev"]);
    for row in &table[1..] {
        assert!(row[4].parse::<f64>().unwrap() <= 5e-3);
    }
    let mapping = rows(&fs::read_to_string(dir.path().join("pct_mapping.csv")).unwrap());
    assert_eq!(mapping[0], ["r", "Z", "U_d", "V_eff"]);
    // Z = r²/2 for m = r²
    let last = &mapping[mapping.len() - 1];
    let (r, z): (f64, f64) = (last[0].parse().unwrap(), last[1].parse().unwrap());
    assert!((z - r * r / 2.0).abs() < 1e-9);
}

#[test]
fn pct_complex_lambda_exits_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.ini", &PCT.replace("ell = 1", "ell = 0"));
    let run = pdm(&["pct", s(&cfg)]);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("complex effective angular momentum"));
}

#[test]
fn pct_inverse_square_reports_shift() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "[mass]\nfamily = power_law\ncoeff = 1\nexponent = -2\n[potential]\nexpr = ln(r)^2\n[solver]\nr_min = {}\nr_max = {}\nn_max = 2\n",
        (-8f64).exp(),
        8f64.exp()
    );
    let cfg = write(&dir, "inv.ini", &text);
    let run = pdm(&["pct", s(&cfg), "--reference", "oscillator:k=1"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stderr).contains("U_tilde_d = 2.00000000000e0 (exact 2)"));
    let table = rows(&String::from_utf8(run.stdout).unwrap());
    for (n, row) in table[1..].iter().enumerate() {
        assert_eq!(row[1].parse::<f64>().unwrap(), (2 * n + 3) as f64);
        assert!(row[4].parse::<f64>().unwrap() <= 5e-3);
    }
    let excited = write(&dir, "inv2.ini", &text.replace("[solver]", "[problem]\nell = 2\n[solver]"));
    let run = pdm(&["pct", s(&excited), "--reference", "oscillator:k=1"]);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("s-state"));
}

#[test]
fn effpot_orderings() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "e.ini", "[mass]\nexpr = 1 + r^2\n[potential]\nexpr = r^2\n[solver]\nr_min = 0.5\nr_max = 3\n");
    let flat = write(&dir, "f.ini", OSCILLATOR);
    let run = pdm(&["effpot", s(&flat), "--points", "5"]);
    for row in &rows(&String::from_utf8(run.stdout).unwrap())[1..] {
        assert_eq!(row[1], row[2]);
    }
    let mm = pdm(&["effpot", s(&cfg), "--ordering", "mm"]);
    let custom = pdm(&["effpot", s(&cfg), "--ordering", "custom:-0.25,-0.5"]);
    assert!(mm.status.success());
    assert_eq!(mm.stdout, custom.stdout);

    let run = pdm(&["effpot", s(&cfg), "--ordering", "mm", "--ordering", "zhu_kroemer", "--points", "11"]);
    let table = rows(&String::from_utf8(run.stdout).unwrap());
    assert_eq!(table[0], ["r", "V", "Vtilde_mm", "Vtilde_zhu_kroemer", "zhu_kroemer_minus_mm"]);
    for row in &table[1..] {
        let r: f64 = row[0].parse().unwrap();
        let (m, m1, m2) = (1.0 + r * r, 2.0 * r, 2.0);
        let expected = 0.25 * m2 / (m * m) - 5.0 / 16.0 * m1 * m1 / (m * m * m);
        let got: f64 = row[4].parse().unwrap();
        assert!((got - expected).abs() < 1e-6 * expected.abs().max(1.0), "{got} vs {expected}");
    }
}

#[test]
fn verify_operator_reports_second_order() {
    let dir = TempDir::new().unwrap();
    for n in ["1000", "50"] {
        let cfg = write(&dir, "op.ini", &format!("[mass]\nexpr = 1 + x^2\nvar = x\ndomain = -inf, inf\n[operator]\ngrid_n = {n}\n"));
        let run = pdm(&["verify-operator", s(&cfg)]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        let table = rows(&String::from_utf8(run.stdout).unwrap());
        assert_eq!(table[0], ["test_name", "grid_N", "residual_inf", "observed_order"]);
        let factorized: Vec<_> = table.iter().filter(|r| r[0] == "factorized_vs_pi_squared_plus_v").collect();
        let order: f64 = factorized[2][3].parse().unwrap();
        assert!((order - 2.0).abs() < 0.2, "{order}");
    }
}

#[test]
fn orderings_catalog() {
    let run = pdm(&["orderings"]);
    let table = rows(&String::from_utf8(run.stdout).unwrap());
    assert_eq!(table.len(), 6);
    assert_eq!(table[5], ["mm", "-1/4", "-1/2", "-1/4", "1/4", "7/16"]);
}

#[test]
fn bundled_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let cases: [(&str, &[&str]); 5] = [
        ("oscillator.ini", &["solve"]),
        ("coulomb.ini", &["solve"]),
        ("power_law_pct.ini", &["pct", "--reference", "oscillator:k=1"]),
        ("inverse_square.ini", &["pct"]),
        ("operator.ini", &["verify-operator"]),
    ];
    for (file, args) in cases {
        let path = dir.join(file);
        let mut full: Vec<&str> = args[..1].to_vec();
        full.push(s(&path));
        full.extend(&args[1..]);
        let run = pdm(&full);
        assert!(run.status.success(), "{file}: {}", String::from_utf8_lossy(&run.stderr));
    }
}
