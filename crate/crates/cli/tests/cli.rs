use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wfr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfr"))
        .args(args)
        .output()
        .expect("spawn wfr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn labels(p: &Path) -> Vec<i32> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

fn gen(dir: &TempDir, family: &str, n: &str, seed: &str) -> PathBuf {
    let out = path(dir, &format!("{family}_{n}_{seed}.csv"));
    let r = wfr(&[
        "gen",
        "--family",
        family,
        "--n",
        n,
        "--seed",
        seed,
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    out
}

fn fit(input: &Path, extra: &[&str], dir: &TempDir) -> (Output, PathBuf, PathBuf) {
    let l = path(dir, "labels.csv");
    let m = path(dir, "model.json");
    let mut args = vec![
        "fit",
        "--input",
        s(input),
        "--labels-out",
        s(&l),
        "--model-out",
        s(&m),
    ];
    args.extend_from_slice(extra);
    (wfr(&args), l, m)
}

#[test]
fn auto_fit_recovers_two_spirals() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_spirals", "500", "42");
    let diag = path(&dir, "diag.csv");
    let (r, l, m) = fit(
        &data,
        &["--auto-threshold", "--diagnostics-out", s(&diag)],
        &dir,
    );
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let mut distinct: Vec<i32> = labels(&l).into_iter().filter(|&x| x >= 0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    assert_eq!(distinct, vec![0, 1]);
    assert!(m.exists());
    let d = fs::read_to_string(diag).unwrap();
    assert!(d.starts_with("tau,num_clusters,s1,s2,total\n"));
    assert_eq!(d.lines().count(), 102);

    let r = wfr(&["eval", "--pred", s(&l), "--truth", s(&data)]);
    assert_eq!(code(&r), 0);
    let text = String::from_utf8(r.stdout).unwrap();
    let ari: f64 = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("ari=")
        .unwrap()
        .parse()
        .unwrap();
    assert!(ari >= 0.99, "{text}");
}

#[test]
fn threshold_out_of_range_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_moons", "50", "1");
    let (r, _, _) = fit(&data, &["--threshold", "1.01"], &dir);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("[0, 1]"));
    let (r, _, _) = fit(&data, &[], &dir);
    assert_eq!(code(&r), 2, "a threshold mode is required");
    let (r, _, _) = fit(&data, &["--threshold", "0.5", "--auto-threshold"], &dir);
    assert_eq!(code(&r), 2);
    let (r, _, _) = fit(
        &data,
        &["--threshold", "0.5", "--resemblance", "manhattan"],
        &dir,
    );
    assert_eq!(code(&r), 2);
}

#[test]
fn zero_threshold_gives_one_family() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_circles", "200", "3");
    let (r, l, _) = fit(&data, &["--threshold", "0", "--outliers", "none"], &dir);
    assert_eq!(code(&r), 0);
    assert!(labels(&l).iter().all(|&x| x == 0));
}

#[test]
fn predict_on_training_set_reproduces_labels() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_moons", "300", "5");
    let (r, l, m) = fit(&data, &["--auto-threshold", "--resemblance", "rbf"], &dir);
    assert_eq!(code(&r), 0);
    let out = path(&dir, "pred.csv");
    let r = wfr(&[
        "predict",
        "--model",
        s(&m),
        "--input",
        s(&data),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    for (a, b) in labels(&l).iter().zip(labels(&out)) {
        if *a >= 0 {
            assert_eq!(*a, b);
        }
    }
}

#[test]
fn predict_far_point_and_empty_input() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_moons", "100", "7");
    let (_, _, m) = fit(&data, &["--auto-threshold"], &dir);
    let test = path(&dir, "far.csv");
    fs::write(&test, "x0,x1\n1000,1000\n").unwrap();
    let out = path(&dir, "pred.csv");
    let r = wfr(&[
        "predict",
        "--model",
        s(&m),
        "--input",
        s(&test),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&r), 0);
    assert_eq!(labels(&out), vec![-1]);

    fs::write(&test, "").unwrap();
    let r = wfr(&[
        "predict",
        "--model",
        s(&m),
        "--input",
        s(&test),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&r), 0);
    assert!(labels(&out).is_empty());
}

#[test]
fn predict_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_moons", "100", "7");
    let (_, _, m) = fit(&data, &["--auto-threshold"], &dir);
    let test = path(&dir, "wide.csv");
    fs::write(&test, "1,2,3\n").unwrap();
    let out = path(&dir, "pred.csv");
    let r = wfr(&[
        "predict",
        "--model",
        s(&m),
        "--input",
        s(&test),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&r), 1);

    let bad = path(&dir, "bad.json");
    fs::write(&bad, "{\n  \"format\": \"wfr-model\",\n  \"version\": \n").unwrap();
    let r = wfr(&[
        "predict",
        "--model",
        s(&bad),
        "--input",
        s(&data),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&r), 1);
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn gen_is_deterministic_and_validated() {
    let dir = TempDir::new().unwrap();
    let a = fs::read(gen(&dir, "two_moons", "100", "7")).unwrap();
    let other = TempDir::new().unwrap();
    let b = fs::read(gen(&other, "two_moons", "100", "7")).unwrap();
    assert_eq!(a, b);

    let blobs = gen(&dir, "gaussian_blobs", "500", "0");
    let mut truth = labels(&blobs);
    truth.sort_unstable();
    truth.dedup();
    assert_eq!(truth, vec![0, 1, 2]);

    let out = path(&dir, "x.csv");
    let r = wfr(&[
        "gen",
        "--family",
        "two_spirals",
        "--n",
        "0",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&r), 2);
    let r = wfr(&["gen", "--family", "three_spirals", "--out", s(&out)]);
    assert_eq!(code(&r), 2);
}

#[test]
fn eval_reports_ari() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.csv");
    let b = path(&dir, "b.csv");
    fs::write(&a, "label\n0\n0\n1\n1\n").unwrap();
    fs::write(&b, "label\n0\n0\n0\n1\n").unwrap();
    let r = wfr(&["eval", "--pred", s(&a), "--truth", s(&a)]);
    assert_eq!(code(&r), 0);
    assert!(String::from_utf8_lossy(&r.stdout).starts_with("ari=1\n"));
    // of the 6 pairs: 1 together in both, 2 apart in both, 3 disagree; ARI 0
    let r = wfr(&["eval", "--pred", s(&a), "--truth", s(&b)]);
    assert_eq!(code(&r), 0);
    assert!(String::from_utf8_lossy(&r.stdout).starts_with("ari=0\n"));

    fs::write(&b, "label\n0\n0\n0\n").unwrap();
    let r = wfr(&["eval", "--pred", s(&a), "--truth", s(&b)]);
    assert_eq!(code(&r), 1);
}

#[test]
fn plot_writes_one_marker_per_point() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "two_moons", "60", "2");
    let (_, l, _) = fit(&data, &["--auto-threshold"], &dir);
    let svg = path(&dir, "plot.svg");
    let r = wfr(&[
        "plot",
        "--input",
        s(&data),
        "--labels",
        s(&l),
        "--out",
        s(&svg),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("class=\"point").count(), 60);

    let short = path(&dir, "short.csv");
    fs::write(&short, "label\n0\n1\n").unwrap();
    let r = wfr(&[
        "plot",
        "--input",
        s(&data),
        "--labels",
        s(&short),
        "--out",
        s(&svg),
    ]);
    assert_eq!(code(&r), 1);

    let empty = path(&dir, "empty.csv");
    fs::write(&empty, "x0,x1\n").unwrap();
    let r = wfr(&[
        "plot",
        "--input",
        s(&empty),
        "--labels",
        s(&short),
        "--out",
        s(&svg),
    ]);
    assert_eq!(code(&r), 1);
}
