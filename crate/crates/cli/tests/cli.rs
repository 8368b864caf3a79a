use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const NATURAL: &str = r#"{"dipole_moment":1.0,"dipole_unit":"arb","wavenumber":1.0,"distance":20.0,"distance_unit":"arb","unit_system":"natural"}"#;
const LYMAN_ALPHA: &str = r#"{"dipole_moment":6.31e-30,"dipole_unit":"C·m","wavelength":121.5,"distance":70.3,"distance_unit":"nm","unit_system":"SI"}"#;

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Row {
    coordinate: f64,
    a: f64,
    regime: String,
    phi_total: Option<f64>,
}

fn rows(csv: &str) -> Vec<Row> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Row {
                coordinate: f[0].parse().unwrap(),
                a: f[2].parse().unwrap(),
                regime: f[3].to_string(),
                phi_total: f[6].parse().ok(),
            }
        })
        .collect()
}

fn scan(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = dir.join(name);
    let mut all = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    let o = casimir(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    fs::read_to_string(out).unwrap()
}

#[test]
fn time_scan_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let args = ["time-scan", "--scenario", NATURAL, "--min", "0", "--max", "60", "--samples", "301"];
    let first = scan(dir.path(), "a.csv", &args);
    let second = scan(dir.path(), "b.csv", &args);
    assert_eq!(first, second);
    let single = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .env("CASIMIR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(single.stdout).unwrap(), first);
}

#[test]
fn time_scan_header_and_columns() {
    let dir = TempDir::new().unwrap();
    let csv = scan(dir.path(), "t.csv", &["time-scan", "--scenario", NATURAL, "--min", "0", "--max", "1", "--samples", "3", "--units", "reduced"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# casimir "));
    assert!(lines[1].starts_with("# scenario: {"));
    assert_eq!(lines[3], "t,x0,a,regime,phi_static,phi_dyn,phi_total,force_physical");
    let r = rows(&csv);
    assert_eq!(r.len(), 3);
    assert_eq!(r[2].coordinate, 40.0);
    assert_eq!(r[2].regime, "LightCone");
    assert!(r[2].phi_total.is_none());
    // 17 significant digits
    assert!(lines[5].split(',').next().unwrap().contains("2.0000000000000000e1"));
}

#[test]
fn distance_scan_flags_exactly_the_light_cone_rows() {
    let dir = TempDir::new().unwrap();
    let csv = scan(
        dir.path(),
        "d.csv",
        &["distance-scan", "--scenario", NATURAL, "--min", "10", "--max", "30", "--samples", "41", "--t-fixed", "40"],
    );
    let r = rows(&csv);
    let flagged: Vec<f64> = r.iter().filter(|r| r.regime == "LightCone").map(|r| r.coordinate).collect();
    assert_eq!(flagged, vec![20.0]);
    for row in &r {
        assert_eq!(row.regime == "LightCone", (row.a - 1.0).abs() <= 1e-6);
        assert_eq!(row.phi_total.is_none(), row.regime == "LightCone");
    }
}

#[test]
fn distance_scan_at_t_zero_has_no_force() {
    let dir = TempDir::new().unwrap();
    let csv = scan(
        dir.path(),
        "d0.csv",
        &["distance-scan", "--scenario", NATURAL, "--min", "0.05", "--max", "25", "--samples", "500", "--t-fixed", "0"],
    );
    for row in rows(&csv) {
        assert!(row.phi_total.unwrap().abs() < 1e-9, "d = {}", row.coordinate);
    }
}

#[test]
fn static_zeros_are_spaced_by_a_quarter_wavelength() {
    let dir = TempDir::new().unwrap();
    let csv = scan(
        dir.path(),
        "z.csv",
        &["distance-scan", "--scenario", NATURAL, "--min", "1", "--max", "40", "--samples", "40", "--t-fixed", "0"],
    );
    let footer: Vec<&str> = csv.lines().skip_while(|l| !l.starts_with("# static_force_zeros")).collect();
    let count: usize = footer[0].rsplit(' ').next().unwrap().parse().unwrap();
    let d: Vec<f64> = footer[2..]
        .iter()
        .map(|l| l.trim_start_matches("# ").split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(d.len(), count);
    assert!(count > 10);
    // k0 = 1: zeros of the static force repeat every π/(2 k0) in d
    for w in d[5..].windows(2) {
        let spacing = w[1] - w[0];
        assert!((spacing / std::f64::consts::FRAC_PI_2 - 1.0).abs() < 0.05, "spacing {spacing}");
    }
}

#[test]
fn lyman_alpha_scan_runs_without_warnings() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f3.csv");
    let o = casimir(&["time-scan", "--scenario", LYMAN_ALPHA, "--min", "0", "--max", "4e-15", "--samples", "2001", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!stderr(&o).contains("warning"));
    let csv = fs::read_to_string(out).unwrap();
    assert!(!csv.contains("# warning"));
    let r = rows(&csv);
    let last_before = r.iter().filter(|r| r.regime == "BeforeRoundTrip").map(|r| r.coordinate).fold(0.0, f64::max);
    let first_after = r.iter().filter(|r| r.regime == "AfterRoundTrip").map(|r| r.coordinate).fold(f64::INFINITY, f64::min);
    let cone: Vec<f64> = r.iter().filter(|r| r.regime == "LightCone").map(|r| r.coordinate).collect();
    assert!(last_before < 4.69e-16 && first_after > 4.69e-16);
    // 7e-17 s either side of the round trip
    assert!(cone.iter().all(|t| (t - 4.69e-16).abs() < 7.1e-17));
    assert!(cone.len() > 60);
}

#[test]
fn long_si_scans_carry_the_validity_warning() {
    for doc in [LYMAN_ALPHA.to_string(), LYMAN_ALPHA.replace("C·m", "statC·cm").replace("\"SI\"", "\"Gaussian\"")] {
        let o = casimir(&["time-scan", "--scenario", &doc, "--min", "0", "--max", "2e-8", "--samples", "3"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let csv = String::from_utf8(o.stdout).unwrap();
        let w = csv.lines().find(|l| l.starts_with("# warning:")).unwrap();
        assert!(w.contains("shorter than the decay time"));
    }
    let o = casimir(&["time-scan", "--scenario", LYMAN_ALPHA, "--min", "0", "--max", "5e-9", "--samples", "3"]);
    assert!(!String::from_utf8(o.stdout).unwrap().contains("# warning"));
}

#[test]
fn oracle_check_rejects_light_cone_grid() {
    let o = casimir(&["oracle-check", "--a", "0.3,1.0", "--no-mode-sum"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("light cone"));
}

#[test]
fn oracle_check_names_a_corrupted_term() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = casimir(&[
        "oracle-check",
        "--no-mode-sum",
        "--corrupt-term",
        "after-si-pair=1.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("after-si-pair"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["suspect_terms"][0]["term"], "after-si-pair");
}

#[test]
fn oracle_check_passes_on_a_scenario_grid() {
    let o = casimir(&["oracle-check", "--scenario", NATURAL, "--t", "10,30,60", "--static-x0", "40", "--m-step", "0.002", "--no-mode-sum"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["force_checks"].as_array().unwrap().len(), 3);
    assert_eq!(report["force_checks"][0]["x0"], 40.0);
}

#[test]
fn user_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let bad_json = casimir(&["time-scan", "--scenario", "{\"distance\": 1}", "--min", "0", "--max", "1"]);
    assert_eq!(bad_json.status.code(), Some(1));
    let missing = casimir(&["time-scan", "--scenario", "/nonexistent.json", "--min", "0", "--max", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let o = casimir(&["time-scan", "--scenario", NATURAL, "--min", "0", "--max", "1", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let reversed = casimir(&["time-scan", "--scenario", NATURAL, "--min", "2", "--max", "1"]);
    assert_eq!(reversed.status.code(), Some(1));
    let threads = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(["time-scan", "--scenario", NATURAL, "--min", "0", "--max", "1"])
        .env("CASIMIR_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
    let term = casimir(&["oracle-check", "--corrupt-term", "nonsense=2"]);
    assert!(!term.status.success());
}

#[test]
fn scenario_files_are_accepted() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, NATURAL).unwrap();
    let from_file = scan(dir.path(), "f.csv", &["time-scan", "--scenario", path.to_str().unwrap(), "--min", "0", "--max", "5", "--samples", "6"]);
    let inline = scan(dir.path(), "i.csv", &["time-scan", "--scenario", NATURAL, "--min", "0", "--max", "5", "--samples", "6"]);
    assert_eq!(from_file, inline);
}

#[test]
fn presets_run_one_file_per_trace() {
    let dir = TempDir::new().unwrap();
    let o = casimir(&["presets", "run", "fig1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let one = fs::read_to_string(dir.path().join("fig1-k0-1.csv")).unwrap();
    let two = fs::read_to_string(dir.path().join("fig1-k0-2.csv")).unwrap();
    assert_ne!(rows(&one)[100].phi_total, rows(&two)[100].phi_total);
    let listed = String::from_utf8(casimir(&["presets"]).stdout).unwrap();
    assert_eq!(listed.lines().count(), 3);
    let shown = casimir(&["presets", "show", "fig2"]);
    assert!(String::from_utf8(shown.stdout).unwrap().contains("\"runs\""));
    assert_eq!(casimir(&["presets", "show", "fig9"]).status.code(), Some(1));
}

#[test]
fn fig2_preset_oscillates_around_the_static_force() {
    let dir = TempDir::new().unwrap();
    let o = casimir(&["presets", "run", "fig2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("fig2-k0-1.csv")).unwrap();
    let stat: f64 = csv.lines().filter(|l| !l.starts_with('#')).nth(5).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    let dev: Vec<(f64, f64)> = rows(&csv)
        .iter()
        .filter_map(|r| Some((r.coordinate, r.phi_total? - stat)))
        .collect();
    let crossings = dev.windows(2).filter(|w| w[0].1 * w[1].1 < 0.0).count();
    assert!(crossings >= 4);
    let early = dev.iter().filter(|(t, _)| (60.0..80.0).contains(t)).map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let late = dev.iter().filter(|(t, _)| *t > 180.0).map(|(_, v)| v.abs()).fold(0.0, f64::max);
    assert!(late < early);
}
