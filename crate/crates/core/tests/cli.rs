use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainstab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.ini");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn simulate(text: &str) -> (TempDir, Output) {
    let dir = TempDir::new().unwrap();
    let p = write_scenario(dir.path(), text);
    let out = run(&["simulate", &p]);
    (dir, out)
}

#[test]
fn misspelled_key_names_the_key() {
    let (_d, out) = simulate("[system]\norder = 2\n[controller]\nkind = pure\ncontroler = hong\n");
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("controler"), "{err}");
    assert!(err.contains("[controller]"), "{err}");
}

#[test]
fn adaptive_without_epsilon_is_rejected() {
    let (_d, out) = simulate("[system]\norder = 2\n[controller]\nkind = adaptive\n[adaptive]\nkappa = 1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("epsilon"), "{}", stderr(&out));
}

#[test]
fn nonpositive_weight_is_rejected() {
    let (_d, out) = simulate("[system]\norder = 2\nk_hom = -1\n[controller]\nkind = pure\n");
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("p_i") && err.contains("> 0"), "{err}");
}

#[test]
fn robust_run_writes_every_step() {
    let (dir, out) = simulate(
        "[system]\norder = 2\n[controller]\nkind = robust\n[uncertainty]\nphi_kind = sinusoid\nphi_offset = 0\n\
         phi_amplitude = 0.5\nphi_omega = 2\nphi_phase = 0\n[simulation]\ndt = 0.001\nhorizon = 2.5\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    assert_eq!(rows, 2501);
    assert_eq!(csv.lines().next().unwrap(), "t,z1,z2,u0,u,V1,phi_t,gamma_t");
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert!(m["tail_sup_V1"].is_number());
    assert!(m["peak_V1_after_crossing"].is_null());
}

#[test]
fn adaptive_run_reports_bounds_and_respects_them() {
    let (dir, out) = simulate(
        "[system]\norder = 2\n[controller]\nkind = adaptive\n[uncertainty]\nphi_kind = sinusoid\n\
         phi_offset = 0\nphi_amplitude = 0.5\nphi_omega = 3\nphi_phase = 0\n[adaptive]\nepsilon = 0.2\n\
         [simulation]\nhorizon = 20\nsamples = 2000\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    let tail = m["tail_sup_V1"].as_f64().unwrap();
    let cap = m["delta_cap"].as_f64().unwrap();
    assert!(tail <= cap, "{tail} > {cap}");
    assert!(m["phi_hat_ceiling"].as_f64().unwrap() >= m["tail_sup_phi_hat"].as_f64().unwrap());
}

#[test]
fn unwritable_output_is_a_config_error() {
    let (_d, out) = simulate(
        "[system]\norder = 2\n[controller]\nkind = pure\n[simulation]\nhorizon = 0.1\n\
         [output]\ntrajectory = /nonexistent-dir/x/t.csv\n",
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nonexistent-dir"), "{}", stderr(&out));
}

#[test]
fn divergence_exits_two() {
    let (_d, out) = simulate("[system]\norder = 2\nz0 = 1e300, 1e300\n[controller]\nkind = pure\n");
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn echo_prints_normalized_scenario() {
    let dir = TempDir::new().unwrap();
    let p = write_scenario(dir.path(), "[system]\norder = 1\n[controller]\nkind = pure\n[simulation]\nhorizon = 0.1\n");
    let out = run(&["simulate", &p, "--echo"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("k_hom = -0.5"), "{}", stdout(&out));
}

#[test]
fn verify_quick_is_reproducible() {
    let a = run(&["verify", "--level", "quick", "--seed", "7"]);
    let b = run(&["verify", "--level", "quick", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("FAIL"));
}

#[test]
fn verify_with_unstable_gains_fails() {
    let out = run(&["verify", "--order", "2", "--gains", "2,-3"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn dumped_defaults_run_as_is() {
    let out = run(&["--dump-defaults"]);
    assert_eq!(out.status.code(), Some(0));
    let (dir, sim) = simulate(&stdout(&out));
    assert_eq!(sim.status.code(), Some(0), "{}", stderr(&sim));
    assert!(dir.path().join("metrics.json").exists());
}

#[test]
fn synthesize_gains_matches_roots() {
    let out = run(&["synthesize-gains", "--order", "3", "--roots", "-1,-2+1i,-2-1i"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let line = |prefix: &str| -> Vec<f64> {
        let l = text.lines().find(|l| l.starts_with(prefix)).unwrap();
        l.split('=').nth(1).unwrap().split(',').map(|x| x.trim().parse().unwrap()).collect()
    };
    let got = line("characteristic");
    let want = line("from roots");
    // (s+1)(s^2+4s+5)
    for (g, w) in got.iter().zip([1.0, 5.0, 9.0, 5.0]) {
        assert!((g - w).abs() < 1e-12, "{got:?}");
    }
    assert_eq!(got.len(), want.len());
    assert!(line("gains").iter().all(|&l| l > 0.0));

    let bad = run(&["synthesize-gains", "--order", "2", "--roots", "1,-1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn bounds_prints_constants() {
    let dir = TempDir::new().unwrap();
    let p = write_scenario(
        dir.path(),
        "[system]\norder = 2\n[controller]\nkind = adaptive\n[adaptive]\nepsilon = 0.2\n[simulation]\nsamples = 2000\n",
    );
    let out = run(&["bounds", &p]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    for key in ["kappa1 = 1.75", "c = ", "alpha = ", "delta_cap = ", "nominal_convergence_time_bound = "] {
        assert!(text.contains(key), "missing {key}:\n{text}");
    }
}

#[test]
fn bad_usage_exits_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "/no/such/file.ini"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
