//! Running a scenario and persisting its results.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::controllers::UncertaintyBounds;
use crate::lyapunov::{adaptive_bounds, convergence_time_bound, estimate_constants, homogeneity_degrees, v1};
use crate::simulation::{compute_metrics, make_disturbance, simulate, Controller, Disturbance, Trajectory};
use crate::HomogeneityCertificate;

use super::scenario::{ControllerKind, Scenario};
use super::HarnessError;

/// Contents of the metrics file. `null` marks a quantity that does not
/// exist for the run (never converged, not adaptive, not certified).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub convergence_time: Option<f64>,
    #[serde(rename = "tail_inf_V1")]
    pub tail_inf_v1: f64,
    #[serde(rename = "tail_sup_V1")]
    pub tail_sup_v1: f64,
    #[serde(rename = "peak_V1_after_crossing")]
    pub peak_v1_after_crossing: Option<f64>,
    pub tail_sup_phi_hat: Option<f64>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticBounds>,
}

/// Analytic bounds reported next to the measured tails of adaptive runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticBounds {
    pub phi_bar_cap: Option<f64>,
    pub delta_cap: Option<f64>,
    pub phi_hat_ceiling: Option<f64>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub c_prime: Option<f64>,
    pub alpha_prime: Option<f64>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub trajectory_path: PathBuf,
    pub metrics_path: PathBuf,
    pub metrics: MetricsRecord,
    /// Set when the adaptive bounds could not be computed.
    pub warning: Option<String>,
}

fn controller(s: &Scenario) -> Controller<f64> {
    match s.kind {
        ControllerKind::Pure => Controller::Pure { law: s.law },
        ControllerKind::Robust => Controller::Robust { law: s.law, bounds: s.bounds },
        ControllerKind::Adaptive => Controller::Adaptive { config: s.adaptive.expect("validated adaptive scenario") },
    }
}

fn disturbance(s: &Scenario) -> Result<Disturbance<f64>, HarnessError> {
    if s.kind == ControllerKind::Pure {
        return Ok(Disturbance::nominal());
    }
    Ok(make_disturbance(s.phi_spec(), s.gamma_spec(), &s.bounds)?)
}

fn certificate(s: &Scenario) -> Result<HomogeneityCertificate<f64>, HarnessError> {
    Ok(estimate_constants(&s.hong_params()?, s.samples, s.seed)?)
}

fn analytic(s: &Scenario) -> (AnalyticBounds, Option<String>) {
    let mut out = AnalyticBounds {
        phi_bar_cap: None,
        delta_cap: None,
        phi_hat_ceiling: None,
        c: None,
        alpha: None,
        c_prime: None,
        alpha_prime: None,
    };
    let cert = match certificate(s) {
        Ok(c) => c,
        Err(e) => return (out, Some(e.to_string())),
    };
    out.c = Some(cert.c);
    out.alpha = Some(cert.alpha);
    out.c_prime = Some(cert.c_prime);
    out.alpha_prime = Some(cert.alpha_prime);
    let cfg = s.adaptive.expect("validated adaptive scenario");
    match adaptive_bounds(&s.bounds, &cfg, &cert) {
        Ok(b) => {
            out.phi_bar_cap = Some(b.phi_bar_cap);
            out.delta_cap = Some(b.delta_cap);
            out.phi_hat_ceiling = Some(b.phi_hat_ceiling);
            (out, None)
        }
        Err(e) => (out, Some(e.to_string())),
    }
}

/// Simulates a validated scenario and computes its metrics without touching
/// the file system.
pub fn execute(s: &Scenario) -> Result<(Trajectory<f64>, MetricsRecord, Option<String>), HarnessError> {
    s.validate()?;
    let hp = s.hong_params()?;
    let traj = simulate(&s.z0, &controller(s), &hp, &disturbance(s)?, &s.sim_config())?;
    // only adaptive runs have a threshold; elsewhere no sample satisfies V1 <= 0
    // before the origin is reached exactly
    let eps = s.adaptive.map_or(0.0, |a| a.epsilon);
    let m = compute_metrics(&traj, eps, s.tail_fraction, s.band)?;
    let (analytic, warning) = if s.kind == ControllerKind::Adaptive {
        let (a, w) = analytic(s);
        (Some(a), w)
    } else {
        (None, None)
    };
    let record = MetricsRecord {
        convergence_time: m.convergence_time,
        tail_inf_v1: m.tail_inf_v1,
        tail_sup_v1: m.tail_sup_v1,
        peak_v1_after_crossing: m.peak_v1_after_first_crossing,
        tail_sup_phi_hat: m.tail_sup_phi_hat,
        analytic,
    };
    Ok((traj, record, warning))
}

/// CSV with header `t,z1..zr,u0,u,V1,phi_t,gamma_t[,phi_hat,gamma_hat]`,
/// 17 significant digits per value.
pub fn write_trajectory<W: Write>(traj: &Trajectory<f64>, mut w: W) -> std::io::Result<()> {
    let mut header = String::from("t");
    for i in 1..=traj.order() {
        let _ = write!(header, ",z{i}");
    }
    header.push_str(",u0,u,V1,phi_t,gamma_t");
    if traj.is_adaptive() {
        header.push_str(",phi_hat,gamma_hat");
    }
    writeln!(w, "{header}")?;
    let mut line = String::new();
    for i in 0..traj.len() {
        line.clear();
        let _ = write!(line, "{:.16e}", traj.times()[i]);
        for z in traj.state(i) {
            let _ = write!(line, ",{z:.16e}");
        }
        let mut cols = vec![traj.u0()[i], traj.u()[i], traj.v1()[i], traj.phi()[i], traj.gamma()[i]];
        if traj.is_adaptive() {
            cols.push(traj.phi_hat()[i]);
            cols.push(traj.gamma_hat()[i]);
        }
        for c in cols {
            let _ = write!(line, ",{c:.16e}");
        }
        writeln!(w, "{line}")?;
    }
    w.flush()
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Runs `s` and writes its trajectory and metrics files. Relative output
/// paths resolve against `base`.
pub fn run_scenario(s: &Scenario, base: &Path) -> Result<RunOutput, HarnessError> {
    let (traj, metrics, warning) = execute(s)?;
    let trajectory_path = resolve(base, &s.trajectory);
    let metrics_path = resolve(base, &s.metrics);

    let f = File::create(&trajectory_path).map_err(|e| HarnessError::io(&trajectory_path, e))?;
    write_trajectory(&traj, BufWriter::new(f)).map_err(|e| HarnessError::io(&trajectory_path, e))?;

    let mut json = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
    json.push('\n');
    std::fs::write(&metrics_path, json).map_err(|e| HarnessError::io(&metrics_path, e))?;

    Ok(RunOutput { trajectory_path, metrics_path, metrics, warning })
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Analytic quantities for a scenario: homogeneity degrees, sampled
/// constants, the nominal settling-time bound and, for adaptive runs, the
/// ultimate bounds under the true uncertainty.
pub fn bounds_report(s: &Scenario) -> Result<String, HarnessError> {
    s.validate()?;
    let hp = s.hong_params()?;
    let deg = homogeneity_degrees(&hp)?;
    let mut out = String::new();
    let _ = writeln!(out, "order = {}", s.order);
    let _ = writeln!(out, "k_hom = {}", s.k_hom);
    let _ = writeln!(out, "gains = {}", fmt_list(hp.gains().as_slice()));
    let _ = writeln!(out, "weights = {}", fmt_list(hp.weights().weights()));
    let _ = writeln!(out, "kappa1 = {}", deg.kappa1);
    let _ = writeln!(out, "kappa2 = {}", deg.kappa2);
    let _ = writeln!(out, "alpha_prime = {}", deg.alpha_prime);
    let cert = certificate(s)?;
    let _ = writeln!(out, "samples = {} (seed {})", cert.n_samples, s.seed);
    let _ = writeln!(out, "c_prime = {}", cert.c_prime);
    let _ = writeln!(out, "c = {}", cert.c);
    let _ = writeln!(out, "alpha = {}", cert.alpha);
    let v0 = v1(&s.z0, &hp)?;
    let _ = writeln!(out, "V1(z0) = {v0}");
    match convergence_time_bound(v0, cert.c, cert.alpha) {
        Ok(t) => {
            let _ = writeln!(out, "nominal_convergence_time_bound = {t}");
        }
        Err(e) => {
            let _ = writeln!(out, "nominal_convergence_time_bound = unavailable ({e})");
        }
    }
    if s.kind == ControllerKind::Robust {
        let b: &UncertaintyBounds<f64> = &s.bounds;
        let _ = writeln!(out, "robust: phi_bar = {}, gamma_m = {}, gamma_M = {}", b.phi_bar, b.gamma_m, b.gamma_max);
    }
    if let Some(cfg) = s.adaptive {
        let b = adaptive_bounds(&s.bounds, &cfg, &cert)?;
        let _ = writeln!(out, "phi_bar_cap = {}", b.phi_bar_cap);
        let _ = writeln!(out, "delta_cap = {}", b.delta_cap);
        let _ = writeln!(out, "phi_hat_ceiling = {}", b.phi_hat_ceiling);
    }
    Ok(out)
}
