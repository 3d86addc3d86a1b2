use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orthoalign::kernels::{read_matrix_file, write_matrix_file};
use orthoalign::polar::check_aligned;
use orthoalign::sampling::{gaussian_matrix, random_orthonormal, rng_for};
use orthoalign::{align, DenseMatrix, OrthonormalBasis};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthoalign"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn angles_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    write_matrix_file(&x, &DenseMatrix::from_row_slice(2, 1, &[1.0, 0.0])).unwrap();
    write_matrix_file(&y, &DenseMatrix::from_row_slice(2, 1, &[0.6, 0.8])).unwrap();

    let out = bin(&["angles", "--x", s(&x), "--y", s(&y)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,sine,cosine");
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(f[0], "1");
    assert!((f[1].parse::<f64>().unwrap() - 0.8).abs() < 1e-15);
    assert!((f[2].parse::<f64>().unwrap() - 0.6).abs() < 1e-15);
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("norm,spectral,"));

    let out = bin(&["angles", "--x", s(&x), "--y", s(&y), "--norm", "trace"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn angles_rejects_non_orthonormal_input() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    write_matrix_file(&x, &DenseMatrix::from_row_slice(2, 1, &[1.0, 1.0])).unwrap();
    let out = bin(&["angles", "--x", s(&x), "--y", s(&x)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("orthonormal"));
}

#[test]
fn align_writes_aligned_basis_and_set() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_for(5, 0);
    let x0 = random_orthonormal(9, 4, &mut rng);
    let mut d = gaussian_matrix(9, 4, &mut rng);
    d.column_mut(3).fill(0.0);
    d.column_mut(2).fill(0.0);
    let xp = dir.path().join("x.txt");
    let dp = dir.path().join("d.txt");
    write_matrix_file(&xp, x0.matrix()).unwrap();
    write_matrix_file(&dp, &d).unwrap();

    let out = bin(&["align", "--x", s(&xp), "--d", s(&dp), "--emit-set"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let aligned = orthoalign::kernels::read_matrix(out.stdout.as_slice()).unwrap();
    let aligned = OrthonormalBasis::new(aligned).unwrap();
    check_aligned(&aligned, &d).unwrap();
    let (lib, _) = align(&x0, &d).unwrap();
    assert!((aligned.matrix() - lib.matrix()).amax() < 1e-15);

    let base = read_matrix_file(dir.path().join("x.txt.base.txt")).unwrap();
    let fl = read_matrix_file(dir.path().join("x.txt.freedom_left.txt")).unwrap();
    let fr = read_matrix_file(dir.path().join("x.txt.freedom_right.txt")).unwrap();
    assert_eq!((fl.ncols(), fr.ncols()), (2, 2));
    assert!((base + fl * fr.transpose() - aligned.matrix()).amax() < 1e-14);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("x.txt.set.json")).unwrap()).unwrap();
    assert_eq!(meta["r"], 2);
}

#[test]
fn bounds_json_has_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_for(6, 0);
    let x0 = random_orthonormal(10, 3, &mut rng);
    let d = gaussian_matrix(10, 3, &mut rng);
    let xt0 = OrthonormalBasis::from_span(&(x0.matrix() + gaussian_matrix(10, 3, &mut rng) * 1e-4)).unwrap();
    let (x, _) = align(&x0, &d).unwrap();
    let (xt, _) = align(&xt0, &d).unwrap();
    for (name, m) in [("x", x.matrix()), ("xt", xt.matrix()), ("d", &d)] {
        write_matrix_file(dir.path().join(format!("{name}.txt")), m).unwrap();
    }
    let p = |n: &str| dir.path().join(format!("{n}.txt")).to_str().unwrap().to_string();

    let out = bin(&["bounds", "--x", &p("x"), "--xt", &p("xt"), "--d", &p("d"), "--norm", "frobenius", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for field in [
        "kind", "regime", "r", "k", "sigma_r", "sigma_r_tilde", "d_norm", "sin_theta",
        "sin_theta_truncated", "eta", "xi", "xi_sharpened", "measured", "slack",
    ] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
    assert_eq!(v["kind"], "frobenius");
    assert_eq!(v["regime"], "full_rank");
    assert!(v["measured"].as_f64().unwrap() <= v["xi"].as_f64().unwrap());

    let out = bin(&["bounds", "--x", &p("x"), "--xt", &p("xt"), "--d", &p("d"), "--norm", "all", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);

    // x0 itself is generally not aligned
    let x0p = dir.path().join("x0.txt");
    write_matrix_file(&x0p, &(-x.matrix())).unwrap();
    let out = bin(&["bounds", "--x", s(&x0p), "--xt", &p("xt"), "--d", &p("d")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_writes_outputs_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig2");
    let out = bin(&["experiment", "--figure", "2", "--n", "32", "--k", "4", "--points", "6", "--seed", "3", "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6 * 3);
    for n in ["spectral", "frobenius", "trace"] {
        assert!(out_dir.join(format!("sweep_{n}.svg")).exists());
    }

    let cfg = out_dir.join("config.json");
    let again = dir.path().join("again");
    let out = bin(&["experiment", "--custom", s(&cfg), "--out", s(&again)]);
    assert!(out.status.success());
    assert_eq!(csv, fs::read_to_string(again.join("sweep.csv")).unwrap());
}

#[test]
fn experiment_rejects_bad_arguments() {
    assert!(!bin(&["experiment", "--figure", "4"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["experiment", "--figure", "1", "--n", "36", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
