use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blackstock"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn body(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("# created"))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn preset_toml(name: &str) -> String {
    let o = run(&["preset", name]);
    assert_eq!(code(&o), 0);
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn spectrum_minimum_real_part() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["spectrum", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&dir.path().join("spectrum.csv"));
    assert_eq!(header, ["mode_index", "lambda", "re_mu1", "im_mu1", "re_mu2", "im_mu2", "mu3"]);
    let min = rows
        .iter()
        .flat_map(|r| [r[2], r[4], r[6]])
        .fold(f64::INFINITY, f64::min);
    assert!((min - 0.5).abs() < 1e-14, "{min}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("omega0.json")).unwrap()).unwrap();
    assert_eq!(report["omega0"].as_f64(), Some(0.5));
    assert!(report["metadata"]["scenario_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn compat_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for (preset, want) in [
        ("dirichlet-baseline", 0),
        ("neumann-meanzero", 0),
        ("incompatible-data", 2),
    ] {
        let out = dir.path().join(preset);
        let o = run(&["compat-check", "--preset", preset, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), want, "{preset}: {}", String::from_utf8_lossy(&o.stderr));
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("compat.json")).unwrap()).unwrap();
        assert_eq!(report["passed"].as_bool(), Some(want == 0));
    }
}

#[test]
fn incompatible_data_blocks_simulation_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let toml = preset_toml("incompatible-data").replace("horizon = 30.0", "horizon = 1.0");
    let path = dir.path().join("s.toml");
    fs::write(&path, toml).unwrap();
    let s = path.to_str().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert_eq!(code(&run(&["simulate", "--linear", "--scenario", s, "--out", out])), 2);
    assert_eq!(
        code(&run(&["simulate", "--linear", "--scenario", s, "--out", out, "--force"])),
        0
    );
}

#[test]
fn nonlinear_simulation_then_decay_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--nonlinear", "--preset", "nonlinear-small", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(header.last().map(String::as_str), Some("guard_min"));
    assert!(rows.iter().all(|r| r[7] > 0.99));
    let o = run(&["decay", "--preset", "nonlinear-small", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("decay.json")).unwrap()).unwrap();
    assert_eq!(report["comparison"]["verdict"], "PASS");
    let rate = report["fit"]["rate"].as_f64().unwrap();
    assert!((rate - 0.5).abs() < 0.025, "{rate}");
    let (header, rows) = csv_rows(&dir.path().join("decay_fit.csv"));
    assert_eq!(header, ["t", "log_norm", "fitted"]);
    assert!(rows.iter().all(|r| r[1].is_finite() && r[1] - r[2] < 0.5));
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    assert!(((first[2] - last[2]) / (last[0] - first[0]) - rate).abs() < 1e-9);
}

#[test]
fn large_amplitude_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let toml = preset_toml("nonlinear-small").replace("amplitude = 0.001", "amplitude = 3.0");
    let path = dir.path().join("big.toml");
    fs::write(&path, toml).unwrap();
    let o = run(&[
        "simulate",
        "--nonlinear",
        "--scenario",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("guard"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let toml = preset_toml("neumann-meanzero").replace("horizon = 30.0", "horizon = 2.0");
    let path = dir.path().join("s.toml");
    fs::write(&path, toml).unwrap();
    let s = path.to_str().unwrap();
    let mut bodies = Vec::new();
    for run_id in ["one", "two"] {
        let out = dir.path().join(run_id);
        let out = out.to_str().unwrap();
        for cmd in [
            vec!["simulate", "--linear"],
            vec!["simulate", "--nonlinear"],
        ] {
            let mut args = cmd.clone();
            args.extend(["--scenario", s, "--out", out, "--seed", "7"]);
            assert_eq!(code(&run(&args)), 0);
            bodies.push(body(&Path::new(out).join("trajectory.csv")));
        }
    }
    assert_eq!(bodies[0], bodies[2]);
    assert_eq!(bodies[1], bodies[3]);
    assert!(bodies[0].contains("# seed: 7"));
}

#[test]
fn random_sweeps_follow_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut toml = preset_toml("dirichlet-baseline");
    toml = toml.replace("[sweep]", "[sweep]\nrandom = 6");
    let path = dir.path().join("s.toml");
    fs::write(&path, toml).unwrap();
    let s = path.to_str().unwrap();
    let sweep = |seed: &str, threads: &str, name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "sweep", "--scenario", s, "--out", out.to_str().unwrap(), "--seed", seed, "--threads", threads,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        body(&out.join("sweep.csv"))
    };
    let a = sweep("11", "1", "a");
    let b = sweep("11", "4", "b");
    let c = sweep("12", "2", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn unknown_and_malformed_fields_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let base = preset_toml("dirichlet-baseline");
    let cases = [
        ("extra.toml", base.replace("[solver]\n", "[solver]\ncfl = 0.5\n"), "cfl"),
        ("typed.toml", base.replace("dt = 0.001", "dt = \"small\""), "line"),
        ("broken.toml", format!("{base}\n[params\n"), "line"),
        ("bad_value.toml", base.replace("a = 1.0", "a = -1.0"), "a"),
    ];
    for (name, text, needle) in cases {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        let o = run(&["spectrum", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(code(&o), 1, "{name}: {err}");
        assert!(err.contains(needle), "{name}: {err}");
    }
    assert_eq!(code(&run(&["spectrum", "--bogus-flag"])), 1);
    assert_eq!(code(&run(&["preset", "no-such-preset"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn presets_print_and_reload() {
    let o = run(&["preset"]);
    let names = String::from_utf8(o.stdout).unwrap();
    assert_eq!(names.lines().count(), 5);
    let dir = tempfile::tempdir().unwrap();
    for name in names.lines() {
        let path = dir.path().join(format!("{name}.toml"));
        fs::write(&path, preset_toml(name)).unwrap();
        let from_file = run(&["spectrum", "--scenario", path.to_str().unwrap(), "--out", dir.path().join("f").to_str().unwrap()]);
        let from_preset = run(&["spectrum", "--preset", name, "--out", dir.path().join("p").to_str().unwrap()]);
        assert_eq!(code(&from_file), 0);
        assert_eq!(code(&from_preset), 0);
        assert_eq!(body(&dir.path().join("f/spectrum.csv")), body(&dir.path().join("p/spectrum.csv")));
    }
}

#[test]
fn extension_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["extend", "--out", out, "--l", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("extend.json")).unwrap()).unwrap();
    assert_eq!(r["l"], 3);
    assert_eq!(r["determinant_matches_factorials"], true);
    let mismatch = r["initial_mismatch_l2"].as_array().unwrap();
    assert_eq!(mismatch.len(), 4);
    assert!(mismatch.iter().all(|m| m.as_f64().unwrap() < 1e-10));
    assert_eq!(code(&run(&["extend", "--out", out, "--l", "12"])), 3);
}

#[test]
fn picard_matches_time_stepping() {
    let dir = tempfile::tempdir().unwrap();
    let toml = preset_toml("nonlinear-small")
        .replace("horizon = 30.0", "horizon = 2.0")
        .replace("dt = 0.001", "dt = 0.01")
        .replace("record_stride = 10", "record_stride = 1");
    let path = dir.path().join("s.toml");
    fs::write(&path, toml).unwrap();
    let s = path.to_str().unwrap();
    let mut series = Vec::new();
    for mode in ["--nonlinear", "--picard"] {
        let out = dir.path().join(&mode[2..]);
        let o = run(&["simulate", mode, "--scenario", s, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        series.push(csv_rows(&out.join("trajectory.csv")).1);
    }
    assert_eq!(series[0].len(), series[1].len());
    for (x, y) in series[0].iter().zip(&series[1]) {
        assert!((x[1] - y[1]).abs() < 1e-7 * x[1].abs(), "{x:?} {y:?}");
    }
}
