//! Sampled property checks across all modules.
//!
//! Every property draws from its own seeded stream, so a report depends only
//! on `(level, seed, order, gains)` and is byte-for-byte reproducible.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::controllers::{
    adaptive_u, hong_u0, phi_hat_rate, simplified_dilation, simplified_u0, AdaptiveConfig, AdaptiveState,
    HongParams, UncertaintyBounds,
};
use crate::gain_synthesis::{expand_nested, gains_from_roots, is_hurwitz, poly_from_roots, GainVector};
use crate::lyapunov::{dv1_dzr, estimate_constants, v1};
use crate::signed_algebra::{dilate, nu_epsilon, saturate, signed_power, DilationWeights};
use crate::simulation::{make_disturbance, DisturbanceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn samples(self) -> usize {
        match self {
            Level::Quick => 1_000,
            Level::Full => 100_000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub level: Level,
    pub seed: u64,
    /// Chain orders to check; defaults to `{2, 3}`.
    pub order: Option<usize>,
    /// Gains replacing the preset. Not validated, so faulty gains can be
    /// injected on purpose.
    pub gains: Option<Vec<f64>>,
}

impl VerifyOptions {
    pub fn new(level: Level, seed: u64) -> Self {
        Self { level, seed, order: None, gains: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub scope: String,
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Largest measured value; the property holds when it is `<= limit`.
    pub worst: f64,
    pub limit: f64,
    pub note: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.passed())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify level={} samples={} seed={}", self.level.name(), self.level.samples(), self.seed);
        let width = self.properties.iter().map(|p| p.name.len()).max().unwrap_or(0);
        let mut scope = "";
        for p in &self.properties {
            if p.scope != scope {
                scope = &p.scope;
                let _ = writeln!(out, "[{scope}]");
            }
            let _ = write!(
                out,
                "  {} {:width$}  checked={} violations={} max={:.3e} limit={:e}",
                if p.passed() { "PASS" } else { "FAIL" },
                p.name,
                p.checked,
                p.violations,
                p.worst,
                p.limit,
            );
            if let Some(n) = &p.note {
                let _ = write!(out, "  ({n})");
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "summary: {} properties, {} failed", self.properties.len(), failed);
        out
    }
}

struct Tally {
    limit: f64,
    checked: usize,
    violations: usize,
    worst: f64,
}

impl Tally {
    fn new(limit: f64) -> Self {
        Self { limit, checked: 0, violations: 0, worst: f64::NEG_INFINITY }
    }

    /// Records one measurement; it passes when `measure <= limit`.
    fn record(&mut self, measure: f64) {
        self.checked += 1;
        let m = if measure.is_nan() { f64::INFINITY } else { measure };
        if !(m <= self.limit) {
            self.violations += 1;
        }
        self.worst = self.worst.max(m);
    }

    fn finish(self, scope: &str, name: &'static str) -> PropertyResult {
        PropertyResult {
            scope: scope.to_string(),
            name,
            checked: self.checked,
            violations: self.violations,
            worst: self.worst,
            limit: self.limit,
            note: None,
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Random state: uniform direction, magnitude log-uniform in `[1e−2, 1e1]`.
fn random_state(rng: &mut ChaCha8Rng, r: usize) -> Vec<f64> {
    let d: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let mag = 10f64.powf(rng.random_range(-2.0..1.0));
    d.iter().map(|x| x / norm * mag).collect()
}

pub const HOMOGENEITY_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const LEVEL_SET_SLACK: f64 = 1.02;
pub const ROUND_TRIP_TOL: f64 = 1e-10;

fn check_chain(out: &mut Vec<PropertyResult>, r: usize, gains: &[f64], n: usize, seed: u64) {
    let k = HongParams::<f64>::default_k_hom(r);
    let scope = format!("r={r} k_hom={k} gains={}", gains.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","));

    let mut t = Tally::new(0.0);
    for &l in gains {
        t.record(-l);
    }
    out.push(t.finish(&scope, "gains_positive"));

    let mut t = Tally::new(0.0);
    match expand_nested(gains).and_then(|c| is_hurwitz(&c)) {
        Ok(true) => t.record(0.0),
        _ => t.record(1.0),
    }
    out.push(t.finish(&scope, "gains_hurwitz"));

    let hp = match GainVector::new(gains.to_vec()).and_then(|g| HongParams::new(r, k, g)) {
        Ok(hp) => hp,
        Err(e) => {
            let mut p = Tally::new(0.0);
            p.record(f64::INFINITY);
            let mut p = p.finish(&scope, "chain_properties");
            p.note = Some(format!("skipped: {e}"));
            out.push(p);
            return;
        }
    };

    // u0 opposes ∂V1/∂z_r and is a function of it alone
    let mut sign = Tally::new(0.0);
    let mut ident = Tally::new(IDENTITY_TOL);
    let mut pos = Tally::new(0.0);
    let mut rng = rng_for(seed, 100 + r as u64);
    let exp = hp.hong_exponents()[r - 1];
    let lr = gains[r - 1];
    for _ in 0..n {
        let z = random_state(&mut rng, r);
        let u0 = hong_u0(&z, &hp).unwrap().u0;
        let d = dv1_dzr(&z, &hp).unwrap();
        sign.record(u0 * d);
        let predicted = -lr * signed_power(d, exp).unwrap();
        ident.record(rel_err(u0, predicted));
        pos.record(-v1(&z, &hp).unwrap());
    }
    out.push(sign.finish(&scope, "u0_opposes_dV1_dzr"));
    out.push(ident.finish(&scope, "u0_function_of_dV1_dzr"));
    out.push(pos.finish(&scope, "V1_positive"));

    let (sw, sdeg) = simplified_dilation(&hp).unwrap();
    let mut hv = Tally::new(HOMOGENEITY_TOL);
    let mut hd = Tally::new(HOMOGENEITY_TOL);
    let mut hu = Tally::new(HOMOGENEITY_TOL);
    let mut hs = Tally::new(HOMOGENEITY_TOL);
    let mut rng = rng_for(seed, 200 + r as u64);
    let kappa1 = 2.0 + k;
    let kappa2 = 1.0 + (2.0 - r as f64) * k;
    let pr1 = hp.control_degree();
    for _ in 0..n {
        let z = random_state(&mut rng, r);
        let lam: f64 = rng.random_range(0.1..10.0);
        let zl = dilate(&z, lam, hp.weights()).unwrap();
        hv.record(rel_err(v1(&zl, &hp).unwrap(), lam.powf(kappa1) * v1(&z, &hp).unwrap()));
        hd.record(rel_err(dv1_dzr(&zl, &hp).unwrap(), lam.powf(kappa2) * dv1_dzr(&z, &hp).unwrap()));
        hu.record(rel_err(hong_u0(&zl, &hp).unwrap().u0, lam.powf(pr1) * hong_u0(&z, &hp).unwrap().u0));
        if hp.simplified_exponents().is_some() {
            let zs = dilate(&z, lam, &sw).unwrap();
            hs.record(
                rel_err(simplified_u0(&zs, &hp).unwrap().u0, lam.powf(sdeg) * simplified_u0(&z, &hp).unwrap().u0),
            );
        }
    }
    out.push(hv.finish(&scope, "homogeneity_V1"));
    out.push(hd.finish(&scope, "homogeneity_dV1_dzr"));
    out.push(hu.finish(&scope, "homogeneity_hong_u0"));
    let mut p = hs.finish(&scope, "homogeneity_simplified_u0");
    p.note = Some(format!("own dilation, k' = {}", sw.k_hom()));
    out.push(p);

    match estimate_constants(&hp, n, seed) {
        Ok(cert) => {
            let mut dec = Tally::new(0.0);
            dec.record(-cert.c);
            dec.checked = n;
            out.push(dec.finish(&scope, "level_set_decrease"));
            let mut b = Tally::new(LEVEL_SET_SLACK);
            let mut rng = rng_for(seed, 300 + r as u64);
            for _ in 0..n {
                let z = random_state(&mut rng, r);
                let lhs = dv1_dzr(&z, &hp).unwrap().abs();
                let rhs = cert.c_prime * v1(&z, &hp).unwrap().powf(cert.alpha_prime);
                b.record(if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY });
            }
            let mut p = b.finish(&scope, "dV1_dzr_level_set_bound");
            p.note = Some(format!("c' = {:.6}, alpha' = {:.6}, c = {:.6}", cert.c_prime, cert.alpha_prime, cert.c));
            out.push(p);
        }
        Err(e) => {
            let mut dec = Tally::new(0.0);
            dec.record(f64::INFINITY);
            dec.checked = n;
            let mut p = dec.finish(&scope, "level_set_decrease");
            p.note = Some(e.to_string());
            out.push(p);
        }
    }
}

fn check_scalar_ops(out: &mut Vec<PropertyResult>, n: usize, seed: u64) {
    let scope = "signed_algebra";
    let mut rng = rng_for(seed, 1);
    let mut odd = Tally::new(0.0);
    let mut hom = Tally::new(1e-12);
    let mut sat = Tally::new(1e-12);
    let mut ramp = Tally::new(1e-12);
    for _ in 0..n {
        let a: f64 = rng.random_range(-100.0..100.0);
        let theta: f64 = rng.random_range(0.05..4.0);
        let lam: f64 = rng.random_range(0.1..10.0);
        let p = signed_power(a, theta).unwrap();
        odd.record((p + signed_power(-a, theta).unwrap()).abs());
        hom.record(rel_err(signed_power(lam * a, theta).unwrap(), lam.powf(theta) * p));
        let s = saturate(a).unwrap();
        sat.record((s.abs() - 1.0).max(rel_err(s * a.abs().max(1.0), a)));
        let eps: f64 = rng.random_range(0.01..10.0);
        let x: f64 = rng.random_range(0.0..2.0) * eps;
        let expected = ((2.0 / eps) * (x - eps / 2.0)).clamp(0.0, 1.0);
        ramp.record((nu_epsilon(x, eps).unwrap() - expected).abs());
    }
    out.push(odd.finish(scope, "signed_power_odd"));
    out.push(hom.finish(scope, "signed_power_homogeneous"));
    out.push(sat.finish(scope, "saturation"));
    out.push(ramp.finish(scope, "nu_epsilon_ramp"));

    let mut grp = Tally::new(1e-12);
    for _ in 0..n {
        let r = rng.random_range(1..=5);
        let k = rng.random_range(-0.9 / r as f64..=0.0);
        let w = DilationWeights::new(r, k).unwrap();
        let z = random_state(&mut rng, r);
        let (l1, l2): (f64, f64) = (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0));
        let twice = dilate(&dilate(&z, l1, &w).unwrap(), l2, &w).unwrap();
        let once = dilate(&z, l1 * l2, &w).unwrap();
        let err = twice.iter().zip(&once).map(|(a, b)| rel_err(*a, *b)).fold(0.0, f64::max);
        grp.record(err);
    }
    out.push(grp.finish(scope, "dilation_group_action"));
}

/// Conjugate-closed random roots with real parts in `[−3, −0.1]`.
fn random_stable_roots(rng: &mut ChaCha8Rng, degree: usize) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let re = rng.random_range(-3.0..-0.1);
        if degree - roots.len() >= 2 && rng.random_bool(0.5) {
            let im = rng.random_range(0.1..2.0);
            roots.push(Complex64::new(re, im));
            roots.push(Complex64::new(re, -im));
        } else {
            roots.push(Complex64::new(re, 0.0));
        }
    }
    roots
}

fn check_gain_synthesis(out: &mut Vec<PropertyResult>, n: usize, seed: u64) {
    let scope = "gain_synthesis";
    let mut rng = rng_for(seed, 2);
    let mut trip = Tally::new(ROUND_TRIP_TOL);
    let mut stable = Tally::new(0.0);
    let mut unstable = Tally::new(0.0);
    for _ in 0..n {
        let degree = rng.random_range(1..=6);
        let mut roots = random_stable_roots(&mut rng, degree);
        let target = poly_from_roots(&roots);
        match gains_from_roots(&roots).and_then(|g| expand_nested(g.as_slice())) {
            Ok(c) => {
                let err = c.iter().zip(&target).map(|(a, b)| rel_err(*a, *b)).fold(0.0, f64::max);
                trip.record(err);
            }
            Err(_) => trip.record(f64::INFINITY),
        }
        stable.record(if is_hurwitz(&target).unwrap() { 0.0 } else { 1.0 });
        // push one real root (or a conjugate pair) into the right half plane
        let i = rng.random_range(0..degree);
        let shift = roots[i].re.abs() + rng.random_range(0.1..1.0);
        let (re, im) = (roots[i].re, roots[i].im.abs());
        for root in roots.iter_mut().filter(|c| c.re == re && c.im.abs() == im) {
            root.re += shift;
        }
        unstable.record(if is_hurwitz(&poly_from_roots(&roots)).unwrap() { 1.0 } else { 0.0 });
    }
    out.push(trip.finish(scope, "roots_to_gains_round_trip"));
    out.push(stable.finish(scope, "hurwitz_accepts_stable"));
    out.push(unstable.finish(scope, "hurwitz_rejects_unstable"));
}

fn check_controllers(out: &mut Vec<PropertyResult>, n: usize, seed: u64) {
    let scope = "controllers";
    let mut rng = rng_for(seed, 3);
    let cfg = AdaptiveConfig::new(1.0, 1.0, 0.5, 2.0, 0.5).unwrap();
    let mut rate = Tally::new(1e-12);
    let mut gain = Tally::new(0.0);
    for _ in 0..n {
        let v: f64 = rng.random_range(0.0..2.0);
        let phi_hat: f64 = rng.random_range(0.0..10.0);
        let r = phi_hat_rate(v, phi_hat, &cfg).unwrap();
        let excess = if v >= cfg.epsilon {
            (r - cfg.k_adapt).abs()
        } else if v <= cfg.epsilon / 2.0 {
            (r + phi_hat.powf(cfg.eta)).abs()
        } else {
            0.0
        };
        rate.record(excess);
        let u0: f64 = rng.random_range(-10.0..10.0);
        let o = adaptive_u(u0, &AdaptiveState { phi_hat }, &cfg);
        gain.record((cfg.kappa - o.gamma_hat).max(-(o.u * u0)));
    }
    out.push(rate.finish(scope, "phi_hat_rate_regimes"));
    out.push(gain.finish(scope, "adaptive_gain_and_sign"));
}

fn check_disturbances(out: &mut Vec<PropertyResult>, n: usize, seed: u64) {
    let scope = "simulation";
    let b = UncertaintyBounds::new(0.5, 0.5, 1.5).unwrap();
    let kinds = [
        (
            "disturbance_constant",
            DisturbanceSpec::Constant { value: 0.5 },
            DisturbanceSpec::Constant { value: 1.5 },
        ),
        (
            "disturbance_sinusoid",
            DisturbanceSpec::Sinusoid { offset: 0.0, amplitude: 0.5, omega: 3.0, phase: 0.3 },
            DisturbanceSpec::Sinusoid { offset: 1.0, amplitude: 0.5, omega: 7.0, phase: 0.0 },
        ),
        (
            "disturbance_piecewise_random",
            DisturbanceSpec::PiecewiseRandom { low: -0.5, high: 0.5, dwell: 0.1, seed },
            DisturbanceSpec::PiecewiseRandom { low: 0.5, high: 1.5, dwell: 0.1, seed: seed.wrapping_add(1) },
        ),
    ];
    let mut rng = rng_for(seed, 4);
    for (name, phi, gamma) in kinds {
        let d = make_disturbance(phi, gamma, &b).unwrap();
        let mut t = Tally::new(0.0);
        for _ in 0..n {
            let time: f64 = rng.random_range(0.0..1000.0);
            let p = d.phi.value(time);
            let g = d.gamma.value(time);
            t.record((p.abs() - b.phi_bar).max(b.gamma_m - g).max(g - b.gamma_max));
        }
        out.push(t.finish(scope, name));
    }
}

/// Runs every sampled property. Chain-level checks use orders `{2, 3}` with
/// the preset gains unless overridden.
pub fn verify_suite(opts: &VerifyOptions) -> VerifyReport {
    let n = opts.level.samples();
    let seed = opts.seed;
    let mut props = Vec::new();
    check_scalar_ops(&mut props, n, seed);
    check_gain_synthesis(&mut props, n, seed);
    check_controllers(&mut props, n, seed);
    check_disturbances(&mut props, n, seed);
    let chains: Vec<(usize, Vec<f64>)> = match (&opts.gains, opts.order) {
        (Some(g), _) => vec![(g.len(), g.clone())],
        (None, Some(r)) => vec![(r, preset(r))],
        (None, None) => [2, 3].into_iter().map(|r| (r, preset(r))).collect(),
    };
    for (r, gains) in chains {
        check_chain(&mut props, r, &gains, n, seed);
    }
    VerifyReport { level: opts.level, seed, properties: props }
}

fn preset(r: usize) -> Vec<f64> {
    GainVector::<f64>::preset(r).map(GainVector::into_vec).unwrap_or_default()
}
