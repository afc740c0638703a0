use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn klsm(args: &[&str]) -> Output {
    klsm_env(args, &[])
}

fn klsm_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_klsm"));
    cmd.args(args).env_remove("KLSM_CACHE_DIR").env_remove("KLSM_THREADS").env_remove("KLSM_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run klsm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn sum_examples() {
    let o = klsm(&["sum", "--kind", "eta", "-m", "1", "-n", "1", "-c", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value = 0.707106781187 + 0.707106781187i"), "{}", stdout(&o));
    assert!(stdout(&o).contains("modulus Q = 24"));

    let o = klsm(&["sum", "--kind", "classical", "-m", "0", "-n", "0", "-c", "6"]);
    assert!(stdout(&o).contains("value = 2.000000000000 + 0.000000000000i"));

    let o = klsm(&["sum", "--kind", "eta", "-m", "1", "-n", "1", "-c", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("c must be a positive integer"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(klsm(&["sum", "--kind", "nope", "-m", "1", "-n", "1", "-c", "3"]).status.code(), Some(1));
    assert_eq!(klsm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(klsm(&["sum", "-m", "1"]).status.code(), Some(1));
    assert_eq!(klsm(&["transform", "--a", "5", "--x", "10", "-T", "5"]).status.code(), Some(1));
    let o = klsm(&["verify", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown verification suite"));
    assert_eq!(klsm(&["--help"]).status.code(), Some(0));
}

#[test]
fn negative_indices_parse() {
    let o = klsm(&["sum", "-m", "-5", "-n", "7", "-c", "30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], -5);
    assert_eq!(v["modulus"], 720);
}

#[test]
fn scan_labels_and_determinism() {
    let args = ["scan", "-m", "1", "-n", "1", "--x-min", "10", "--x-max", "3000", "--checkpoints", "12"];
    let a = klsm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(stderr(&a).contains("main-term regime"), "{}", stderr(&a));
    assert!(stdout(&a).starts_with("x,re,im,abs,terms\n"));
    assert_eq!(stdout(&a).lines().count(), 13);
    let b = klsm(&args);
    assert_eq!(a.stdout, b.stdout);
    for t in ["1", "4"] {
        let mut with_threads = args.to_vec();
        with_threads.extend(["--threads", t]);
        assert_eq!(klsm(&with_threads).stdout, a.stdout, "threads={t}");
    }
    let c = klsm(&["scan", "-m", "4", "-n", "4", "--x-min", "10", "--x-max", "500", "--checkpoints", "4"]);
    assert!(stderr(&c).contains("cancellation regime"));
}

#[test]
fn scan_json_mirrors_csv() {
    let base = ["scan", "-m", "1", "-n", "-1", "--x-min", "2", "--x-max", "100", "--checkpoints", "5"];
    let csv = stdout(&klsm(&base));
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&klsm(&json_args))).unwrap();
    let lines: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), lines.len());
    for (row, line) in rows.iter().zip(&lines) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(row.as_object().unwrap().len(), 5);
        // the default serde_json float parser may be off by one ulp
        let want = cells[1].parse::<f64>().unwrap();
        assert!((row["re"].as_f64().unwrap() - want).abs() <= 2.0 * f64::EPSILON * want.abs());
        assert_eq!(row["terms"].as_u64().unwrap(), cells[4].parse::<u64>().unwrap());
    }
}

#[test]
fn cache_hit_matches_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["scan", "-m", "4", "-n", "6", "--x-min", "5", "--x-max", "1500", "--checkpoints", "6"];
    let plain = klsm(&args);
    let mut cached = args.to_vec();
    cached.extend(["--cache-dir", d]);
    let first = klsm(&cached);
    let second = klsm(&cached);
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);
    assert!(dir.path().join("eta_4_6.klsm").exists());
}

#[test]
fn env_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let conf = dir.path().join("klsm.conf");
    fs::write(&conf, "# settings\nformat = json\nthreads = 2\n").unwrap();
    let conf_s = conf.to_str().unwrap();
    let args = ["presets", "-m", "2", "-n", "3", "--config", conf_s];

    let o = klsm(&args);
    assert!(stdout(&o).trim_start().starts_with('['), "config format applies");
    let mut flagged = args.to_vec();
    flagged.extend(["--format", "csv"]);
    assert!(stdout(&klsm(&flagged)).starts_with("name,value,formula"), "flag beats config");

    let o = klsm_env(
        &["scan", "-m", "2", "-n", "3", "--x-min", "2", "--x-max", "50", "--checkpoints", "3"],
        &[("KLSM_CACHE_DIR", cache.to_str().unwrap()), ("KLSM_CONFIG", conf_s)],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(cache.join("eta_2_3.klsm").exists(), "env cache dir used");
    assert!(stdout(&o).trim_start().starts_with('['), "config read through KLSM_CONFIG");

    fs::write(&conf, "cache_dir = /nonexistent/should/not/be/used\n").unwrap();
    let other = dir.path().join("other");
    let o = klsm_env(
        &["scan", "-m", "2", "-n", "5", "--x-min", "2", "--x-max", "50", "--checkpoints", "3", "--config", conf_s],
        &[("KLSM_CACHE_DIR", other.to_str().unwrap())],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(other.join("eta_2_5.klsm").exists(), "env beats config");
}

#[test]
fn io_errors_exit_three() {
    let o = klsm(&["presets", "-m", "1", "-n", "1", "--config", "/nonexistent/klsm.conf"]);
    assert_eq!(o.status.code(), Some(3));
    let f = tempfile::NamedTempFile::new().unwrap();
    let o = klsm(&["scan", "-m", "1", "-n", "1", "--x-max", "20", "--x-min", "2", "--cache-dir", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn transform_csv_and_empty_grid() {
    let o = klsm(&["transform", "--kind", "hat", "--a", "5", "--x", "10", "-T", "3", "--r="]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "r,re,im,abs,quad_error\n");
    let o = klsm(&["transform", "--a", "5", "--x", "10", "-T", "3", "--r-min", "8", "--r-max", "4", "--format", "json"]);
    assert_eq!(stdout(&o).trim(), "[]");
    let o = klsm(&["transform", "--kind", "phi", "--a", "5", "--x", "10", "-T", "3", "--r-max", "16", "--fit"]);
    assert_eq!(stdout(&o).lines().count(), 6);
    assert!(stderr(&o).contains("slope"));
}

#[test]
fn presets_examples() {
    let out = stdout(&klsm(&["presets", "-m", "2", "-n", "-3", "--x", "1e6"]));
    let row = |name: &str| -> f64 {
        out.lines().find(|l| l.starts_with(name)).unwrap().split(',').nth(1).unwrap().parse().unwrap()
    };
    // m̃ñ = (2 − 23/24)(−3 − 23/24) = −2375/576
    assert!((row("mixed_sign_cutoff") - (2375.0f64 / 576.0).powf(38.0 / 77.0)).abs() < 1e-12);
    assert_eq!(row("smoothing_width"), 1e4);
    let out = stdout(&klsm(&["presets", "-m", "2", "-n", "3"]));
    let v: f64 = out.lines().find(|l| l.starts_with("positive_cutoff")).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 4.0 * std::f64::consts::PI * (25.0f64 * 49.0 / 576.0).sqrt()).abs() < 1e-12);
}

#[test]
fn rademacher_and_hecke_commands() {
    let o = klsm(&["rademacher", "--n-max", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n,p_exact,estimate,N,residual\n"));
    assert!(stdout(&o).lines().any(|l| l.starts_with("40,37338,")));
    assert!(stderr(&o).contains("rounding failures: 0"));

    let o = klsm(&["hecke", "--series", "eta", "--len", "10"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..4], &["n,value", "1,1", "2,-1", "3,-1"]);
    assert_eq!(klsm(&["hecke", "--index", "6"]).status.code(), Some(1));
}

#[test]
fn verify_suites() {
    let o = klsm(&["verify", "rademacher"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("max |p_est - p_exact|, n ≤ 500"));
    let o = klsm(&["verify", "all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows.len() > 30);
    assert!(rows.iter().all(|r| r["passed"] == true));
}

/// Flip one bit of the stored real part at `c`.
fn corrupt(path: &Path, c: u64) {
    let mut bytes = fs::read(path).unwrap();
    let at = 23 + 24 * (c as usize - 1) + 8;
    bytes[at] ^= 1;
    fs::write(path, bytes).unwrap();
}

#[test]
fn corrupted_cache_record_fails_kloosterman_suite() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = klsm(&["scan", "-m", "3", "-n", "-7", "--x-min", "2", "--x-max", "3000", "--checkpoints", "4", "--cache-dir", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let clean = klsm(&["verify", "kloosterman", "--cache-dir", d]);
    assert_eq!(clean.status.code(), Some(0), "{}", stdout(&clean));
    assert!(stdout(&clean).contains("cache audit eta m=3 n=-7"));

    // c derived from the default seed
    let c = 1 + 20821 % 3000;
    corrupt(&dir.path().join("eta_3_-7.klsm"), c);
    let bad = klsm(&["verify", "kloosterman", "--cache-dir", d]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains(&format!("mismatch at c = [{c}]")), "{}", stdout(&bad));
    assert!(stderr(&bad).contains("verification failed"));
}
