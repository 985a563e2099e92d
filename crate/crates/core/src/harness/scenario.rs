//! Scenario documents: INI-style sections with a closed set of keys.
//!
//! ```ini
//! [system]
//! order = 2
//! k_hom = -0.25
//! gains = preset            ; or `gains = 3, 2` or `roots = -1, -2`
//! z0 = 1, 1
//!
//! [controller]
//! kind = robust             ; pure | robust | adaptive
//! law = hong                ; hong | simplified
//!
//! [uncertainty]
//! phi_bar = 0.5
//! gamma_m = 0.5
//! gamma_M = 1.5
//! phi_kind = sinusoid
//! phi_amplitude = 0.5
//! phi_omega = 3
//!
//! [simulation]
//! dt = 1e-4
//! horizon = 10
//! ```
//!
//! [`render`] writes every key explicitly, defaults included, so the echo of
//! a parsed scenario parses back to the same value.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use ini::{Ini, ParseOption, Properties};
use num_complex::Complex64;

use crate::controllers::{AdaptiveConfig, FeedbackLaw, HongParams, Switching, UncertaintyBounds};
use crate::gain_synthesis::{gains_from_roots, GainVector};
use crate::simulation::{DisturbanceSpec, Integrator, Signal, SimConfig, MIN_TAIL_SAMPLES};

use super::HarnessError;

/// Feedback wrapper applied to the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    /// `u = u0` on the unperturbed chain.
    Pure,
    Robust,
    Adaptive,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Pure => "pure",
            ControllerKind::Robust => "robust",
            ControllerKind::Adaptive => "adaptive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GainSource {
    /// Roots `−1, −2, …, −r`.
    Preset,
    Explicit(Vec<f64>),
    Roots(Vec<Complex64>),
}

/// Shape of one uncertainty signal. Piecewise-random seeds come from
/// `simulation.seed` (`seed` for φ, `seed + 1` for γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    Constant { value: f64 },
    Sinusoid { offset: f64, amplitude: f64, omega: f64, phase: f64 },
    PiecewiseRandom { low: f64, high: f64, dwell: f64 },
}

impl SignalKind {
    pub fn to_spec(self, seed: u64) -> DisturbanceSpec<f64> {
        match self {
            SignalKind::Constant { value } => DisturbanceSpec::Constant { value },
            SignalKind::Sinusoid { offset, amplitude, omega, phase } => {
                DisturbanceSpec::Sinusoid { offset, amplitude, omega, phase }
            }
            SignalKind::PiecewiseRandom { low, high, dwell } => {
                DisturbanceSpec::PiecewiseRandom { low, high, dwell, seed }
            }
        }
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub order: usize,
    pub k_hom: f64,
    pub gains: GainSource,
    pub z0: Vec<f64>,
    pub kind: ControllerKind,
    pub law: FeedbackLaw,
    pub boundary_layer: Option<f64>,
    /// Known bounds for robust runs; true bounds, hidden from the
    /// controller, for adaptive runs. Unused by pure runs.
    pub bounds: UncertaintyBounds<f64>,
    pub phi: SignalKind,
    pub gamma: SignalKind,
    pub adaptive: Option<AdaptiveConfig<f64>>,
    pub dt: f64,
    pub horizon: f64,
    pub tail_fraction: f64,
    pub band: f64,
    pub seed: u64,
    pub integrator: Integrator,
    /// Level-set samples used for the homogeneity constants.
    pub samples: usize,
    pub trajectory: String,
    pub metrics: String,
}

pub const DEFAULT_PHI_BAR: f64 = 0.5;
pub const DEFAULT_GAMMA_M: f64 = 0.5;
pub const DEFAULT_GAMMA_MAX: f64 = 1.5;

impl Scenario {
    /// Defaults for a chain of order `r` under the given controller. Adaptive
    /// scenarios still need an `epsilon`.
    pub fn defaults(order: usize, kind: ControllerKind) -> Self {
        Self {
            order,
            k_hom: HongParams::<f64>::default_k_hom(order),
            gains: GainSource::Preset,
            z0: vec![1.0; order],
            kind,
            law: FeedbackLaw::Hong,
            boundary_layer: None,
            bounds: UncertaintyBounds {
                phi_bar: DEFAULT_PHI_BAR,
                gamma_m: DEFAULT_GAMMA_M,
                gamma_max: DEFAULT_GAMMA_MAX,
            },
            phi: SignalKind::Constant { value: 0.0 },
            gamma: SignalKind::Constant { value: 1.0 },
            adaptive: None,
            dt: 1e-3,
            horizon: 10.0,
            tail_fraction: 0.2,
            band: 1e-2,
            seed: 0,
            integrator: Integrator::Rk4,
            samples: 10_000,
            trajectory: "trajectory.csv".into(),
            metrics: "metrics.json".into(),
        }
    }

    pub fn gain_vector(&self) -> Result<GainVector<f64>, HarnessError> {
        let g = match &self.gains {
            GainSource::Preset => GainVector::preset(self.order),
            GainSource::Explicit(l) => GainVector::new(l.clone()),
            GainSource::Roots(roots) => gains_from_roots(roots),
        };
        g.map_err(|e| HarnessError::Config(format!("system.gains: {e}")))
    }

    pub fn hong_params(&self) -> Result<HongParams<f64>, HarnessError> {
        HongParams::new(self.order, self.k_hom, self.gain_vector()?)
            .map_err(|e| HarnessError::Config(format!("system.k_hom: {e} (weights p_i = 1 + (i-1)k_hom must be > 0)")))
    }

    pub fn phi_spec(&self) -> DisturbanceSpec<f64> {
        self.phi.to_spec(self.seed)
    }

    pub fn gamma_spec(&self) -> DisturbanceSpec<f64> {
        self.gamma.to_spec(self.seed.wrapping_add(1))
    }

    pub fn sim_config(&self) -> SimConfig<f64> {
        SimConfig {
            dt: self.dt,
            horizon: self.horizon,
            integrator: self.integrator,
            switching: self.boundary_layer.map_or(Switching::Sign, Switching::BoundaryLayer),
        }
    }

    /// Checks every cross-field invariant.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let cfg = |key: &str, msg: String| Err(HarnessError::Config(format!("{key}: {msg}")));
        if self.order == 0 {
            return cfg("system.order", "must be at least 1".into());
        }
        match &self.gains {
            GainSource::Explicit(l) if l.len() != self.order => {
                return cfg("system.gains", format!("expected {} values, got {}", self.order, l.len()));
            }
            GainSource::Roots(r) if r.len() != self.order => {
                return cfg("system.roots", format!("expected {} roots, got {}", self.order, r.len()));
            }
            _ => {}
        }
        if self.z0.len() != self.order {
            return cfg("system.z0", format!("expected {} values, got {}", self.order, self.z0.len()));
        }
        if !self.z0.iter().all(|x| x.is_finite()) {
            return cfg("system.z0", "values must be finite".into());
        }
        let hp = self.hong_params()?;
        if self.law == FeedbackLaw::Simplified && hp.simplified_exponents().is_none() {
            return cfg("controller.law", "simplified law needs 1 + (r+1)k_hom > 0".into());
        }
        if self.kind == ControllerKind::Adaptive && self.law != FeedbackLaw::Hong {
            return cfg("controller.law", "adaptive controller uses the hong law".into());
        }
        if self.kind == ControllerKind::Pure && self.boundary_layer.is_some() {
            return cfg("controller.boundary_layer", "only meaningful for robust or adaptive runs".into());
        }
        if let Some(w) = self.boundary_layer {
            if !(w.is_finite() && w > 0.0) {
                return cfg("controller.boundary_layer", format!("{w} must be positive"));
            }
        }
        if let Err(e) = UncertaintyBounds::new(self.bounds.phi_bar, self.bounds.gamma_m, self.bounds.gamma_max) {
            return cfg("uncertainty", e.to_string());
        }
        let b = &self.bounds;
        if let Err(e) = Signal::new(self.phi_spec(), -b.phi_bar, b.phi_bar) {
            return cfg("uncertainty.phi_kind", e.to_string());
        }
        if let Err(e) = Signal::new(self.gamma_spec(), b.gamma_m, b.gamma_max) {
            return cfg("uncertainty.gamma_kind", e.to_string());
        }
        match (self.kind, &self.adaptive) {
            (ControllerKind::Adaptive, None) => return cfg("adaptive.epsilon", "missing required key".into()),
            (ControllerKind::Adaptive, Some(a)) => {
                if let Err(e) = AdaptiveConfig::new(a.kappa, a.delta, a.eta, a.k_adapt, a.epsilon) {
                    return cfg("adaptive", e.to_string());
                }
            }
            (_, Some(_)) => return cfg("adaptive", "section only valid for adaptive runs".into()),
            _ => {}
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return cfg("simulation.dt", format!("{} must be positive", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return cfg("simulation.horizon", format!("{} must be at least dt", self.horizon));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return cfg("simulation.tail_fraction", format!("{} must lie in (0, 1)", self.tail_fraction));
        }
        let steps = self.sim_config().steps();
        let start = ((1.0 - self.tail_fraction) * steps as f64 * (1.0 + 1e-12)).floor() as usize;
        if steps + 1 - start < MIN_TAIL_SAMPLES {
            return cfg(
                "simulation.tail_fraction",
                format!("tail window holds {} samples, need at least {MIN_TAIL_SAMPLES}", steps + 1 - start),
            );
        }
        if !(self.band.is_finite() && self.band > 0.0) {
            return cfg("simulation.band", format!("{} must be positive", self.band));
        }
        if self.samples == 0 {
            return cfg("simulation.samples", "must be at least 1".into());
        }
        if self.trajectory.is_empty() {
            return cfg("output.trajectory", "empty path".into());
        }
        if self.metrics.is_empty() {
            return cfg("output.metrics", "empty path".into());
        }
        Ok(())
    }
}

const SIGNAL_KEYS: [&str; 9] = ["kind", "value", "offset", "amplitude", "omega", "phase", "low", "high", "dwell"];

fn allowed_keys(section: &str) -> Option<Vec<String>> {
    let fixed: &[&str] = match section {
        "system" => &["order", "k_hom", "gains", "roots", "z0"],
        "controller" => &["kind", "law", "boundary_layer"],
        "uncertainty" => {
            let mut keys: Vec<String> = ["phi_bar", "gamma_m", "gamma_M"].iter().map(|s| s.to_string()).collect();
            for sig in ["phi", "gamma"] {
                keys.extend(SIGNAL_KEYS.iter().map(|k| format!("{sig}_{k}")));
            }
            return Some(keys);
        }
        "adaptive" => &["kappa", "delta", "eta", "k_adapt", "epsilon"],
        "simulation" => &["dt", "horizon", "tail_fraction", "band", "seed", "integrator", "samples"],
        "output" => &["trajectory", "metrics"],
        _ => return None,
    };
    Some(fixed.iter().map(|s| s.to_string()).collect())
}

struct Doc<'a> {
    ini: &'a Ini,
    used: BTreeSet<String>,
}

impl<'a> Doc<'a> {
    fn section(&self, name: &str) -> Option<&'a Properties> {
        self.ini.section(Some(name))
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let v = self.section(section)?.get(key)?;
        self.used.insert(format!("{section}.{key}"));
        Some(v)
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str, what: &str) -> Result<Option<T>, HarnessError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| invalid(section, key, v, what)),
        }
    }

    fn real(&mut self, section: &str, key: &str) -> Result<Option<f64>, HarnessError> {
        match self.get::<f64>(section, key, "a finite number")? {
            Some(x) if !x.is_finite() => {
                Err(invalid(section, key, self.section(section).unwrap().get(key).unwrap(), "a finite number"))
            }
            x => Ok(x),
        }
    }

    fn real_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64, HarnessError> {
        Ok(self.real(section, key)?.unwrap_or(default))
    }

    fn list(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>, HarnessError> {
        let Some(v) = self.raw(section, key) else { return Ok(None) };
        v.split(',')
            .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .map(Some)
            .ok_or_else(|| invalid(section, key, v, "a comma-separated list of finite numbers"))
    }

}

fn req<T>(section: &str, key: &str, v: Option<T>) -> Result<T, HarnessError> {
    v.ok_or_else(|| HarnessError::Config(format!("{section}.{key}: missing required key")))
}

fn invalid(section: &str, key: &str, value: &str, what: &str) -> HarnessError {
    HarnessError::Config(format!("{section}.{key}: invalid value '{value}', expected {what}"))
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (`j` is accepted for `i`).
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let finite = |x: f64| x.is_finite().then_some(x);
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return finite(s.parse().ok()?).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let coef = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        t => t.parse().ok().and_then(finite),
    };
    match split {
        Some(i) => Some(Complex64::new(finite(body[..i].parse().ok()?)?, coef(&body[i..])?)),
        None => Some(Complex64::new(0.0, coef(body)?)),
    }
}

fn format_complex(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

fn parse_signal(doc: &mut Doc, sig: &str, default: SignalKind) -> Result<SignalKind, HarnessError> {
    let sec = "uncertainty";
    let key = |k: &str| format!("{sig}_{k}");
    let kind = doc.raw(sec, &key("kind"));
    let signal = match kind {
        None => default,
        Some("constant") => SignalKind::Constant {
            value: req(sec, &key("value"), doc_real(doc, &key("value"))?)?,
        },
        Some("sinusoid") => SignalKind::Sinusoid {
            offset: doc.real_or(sec, &key("offset"), 0.0)?,
            amplitude: req(sec, &key("amplitude"), doc_real(doc, &key("amplitude"))?)?,
            omega: req(sec, &key("omega"), doc_real(doc, &key("omega"))?)?,
            phase: doc.real_or(sec, &key("phase"), 0.0)?,
        },
        Some("piecewise_random") => SignalKind::PiecewiseRandom {
            low: req(sec, &key("low"), doc_real(doc, &key("low"))?)?,
            high: req(sec, &key("high"), doc_real(doc, &key("high"))?)?,
            dwell: req(sec, &key("dwell"), doc_real(doc, &key("dwell"))?)?,
        },
        Some(other) => {
            return Err(invalid(sec, &key("kind"), other, "constant, sinusoid or piecewise_random"));
        }
    };
    Ok(signal)
}

fn doc_real(doc: &mut Doc, key: &str) -> Result<Option<f64>, HarnessError> {
    doc.real("uncertainty", key)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, HarnessError> {
    let opt = ParseOption { enabled_quote: false, enabled_escape: false, ..Default::default() };
    let ini = Ini::load_from_str_opt(text, opt).map_err(|e| HarnessError::Config(format!("syntax error at {e}")))?;

    let mut seen = BTreeSet::new();
    for (name, props) in ini.iter() {
        let Some(name) = name else {
            if let Some((k, _)) = props.iter().next() {
                return Err(HarnessError::Config(format!("key '{k}' appears before any section")));
            }
            continue;
        };
        let Some(keys) = allowed_keys(name) else {
            return Err(HarnessError::Config(format!("unknown section [{name}]")));
        };
        if !seen.insert(name.to_string()) {
            return Err(HarnessError::Config(format!("duplicate section [{name}]")));
        }
        for (k, _) in props.iter() {
            if !keys.iter().any(|a| a == k) {
                return Err(HarnessError::Config(format!("unknown key '{k}' in [{name}] ({name}.{k})")));
            }
            if props.get_all(k).count() > 1 {
                return Err(HarnessError::Config(format!("{name}.{k}: duplicate key")));
            }
        }
    }

    let mut doc = Doc { ini: &ini, used: BTreeSet::new() };
    let order_v = doc.get::<usize>("system", "order", "a positive integer")?;
    let order = req("system", "order", order_v)?;
    if order == 0 {
        return Err(invalid("system", "order", "0", "a positive integer"));
    }
    let kind_s = doc.raw("controller", "kind");
    let kind = match req("controller", "kind", kind_s)? {
        "pure" => ControllerKind::Pure,
        "robust" => ControllerKind::Robust,
        "adaptive" => ControllerKind::Adaptive,
        other => return Err(invalid("controller", "kind", other, "pure, robust or adaptive")),
    };
    let mut s = Scenario::defaults(order, kind);

    s.k_hom = doc.real_or("system", "k_hom", s.k_hom)?;
    let gains = doc.raw("system", "gains");
    let roots = doc.raw("system", "roots");
    s.gains = match (gains, roots) {
        (Some(_), Some(_)) => {
            return Err(HarnessError::Config("system.roots: give either gains or roots, not both".into()));
        }
        (Some("preset"), None) | (None, None) => GainSource::Preset,
        (Some(_), None) => GainSource::Explicit(doc.list("system", "gains")?.unwrap()),
        (None, Some(v)) => GainSource::Roots(
            v.split(',')
                .map(parse_complex)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| invalid("system", "roots", v, "a comma-separated list like -1, -2+1i, -2-1i"))?,
        ),
    };
    if let Some(z0) = doc.list("system", "z0")? {
        s.z0 = z0;
    }

    if let Some(law) = doc.raw("controller", "law") {
        s.law = match law {
            "hong" => FeedbackLaw::Hong,
            "simplified" => FeedbackLaw::Simplified,
            other => return Err(invalid("controller", "law", other, "hong or simplified")),
        };
    }
    s.boundary_layer = doc.real("controller", "boundary_layer")?;

    if doc.section("uncertainty").is_some() && kind == ControllerKind::Pure {
        return Err(HarnessError::Config("[uncertainty]: pure runs simulate the unperturbed chain".into()));
    }
    s.bounds.phi_bar = doc.real_or("uncertainty", "phi_bar", s.bounds.phi_bar)?;
    s.bounds.gamma_m = doc.real_or("uncertainty", "gamma_m", s.bounds.gamma_m)?;
    s.bounds.gamma_max = doc.real_or("uncertainty", "gamma_M", s.bounds.gamma_max)?;
    s.phi = parse_signal(&mut doc, "phi", s.phi)?;
    s.gamma = parse_signal(&mut doc, "gamma", s.gamma)?;

    if doc.section("adaptive").is_some() && kind != ControllerKind::Adaptive {
        return Err(HarnessError::Config("[adaptive]: section only valid when controller.kind = adaptive".into()));
    }
    if kind == ControllerKind::Adaptive {
        let eps = doc.real("adaptive", "epsilon")?;
        s.adaptive = Some(AdaptiveConfig {
            kappa: doc.real_or("adaptive", "kappa", 1.0)?,
            delta: doc.real_or("adaptive", "delta", 1.0)?,
            eta: doc.real_or("adaptive", "eta", 0.5)?,
            k_adapt: doc.real_or("adaptive", "k_adapt", 2.0)?,
            epsilon: req("adaptive", "epsilon", eps)?,
        });
    }

    s.dt = doc.real_or("simulation", "dt", s.dt)?;
    s.horizon = doc.real_or("simulation", "horizon", s.horizon)?;
    s.tail_fraction = doc.real_or("simulation", "tail_fraction", s.tail_fraction)?;
    s.band = doc.real_or("simulation", "band", s.band)?;
    s.seed = doc.get("simulation", "seed", "a non-negative integer")?.unwrap_or(s.seed);
    if let Some(v) = doc.raw("simulation", "integrator") {
        s.integrator = match v {
            "rk4" => Integrator::Rk4,
            "euler" => Integrator::Euler,
            other => return Err(invalid("simulation", "integrator", other, "rk4 or euler")),
        };
    }
    s.samples = doc.get("simulation", "samples", "a positive integer")?.unwrap_or(s.samples);

    if let Some(p) = doc.raw("output", "trajectory") {
        s.trajectory = p.to_string();
    }
    if let Some(p) = doc.raw("output", "metrics") {
        s.metrics = p.to_string();
    }

    // keys that are known but meaningless for the chosen signal kinds
    for (name, props) in ini.iter() {
        let Some(name) = name else { continue };
        for (k, _) in props.iter() {
            let path = format!("{name}.{k}");
            if !doc.used.contains(&path) {
                return Err(HarnessError::Config(format!("{path}: key does not apply to this scenario")));
            }
        }
    }

    s.validate()?;
    Ok(s)
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn render_signal(out: &mut String, sig: &str, s: &SignalKind) {
    match *s {
        SignalKind::Constant { value } => {
            let _ = writeln!(out, "{sig}_kind = constant\n{sig}_value = {value}");
        }
        SignalKind::Sinusoid { offset, amplitude, omega, phase } => {
            let _ = writeln!(
                out,
                "{sig}_kind = sinusoid\n{sig}_offset = {offset}\n{sig}_amplitude = {amplitude}\n{sig}_omega = {omega}\n{sig}_phase = {phase}"
            );
        }
        SignalKind::PiecewiseRandom { low, high, dwell } => {
            let _ = writeln!(
                out,
                "{sig}_kind = piecewise_random\n{sig}_low = {low}\n{sig}_high = {high}\n{sig}_dwell = {dwell}"
            );
        }
    }
}

/// Canonical text of a scenario with every default written out.
pub fn render(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[system]\norder = {}\nk_hom = {}", s.order, s.k_hom);
    match &s.gains {
        GainSource::Preset => out.push_str("gains = preset\n"),
        GainSource::Explicit(l) => {
            let _ = writeln!(out, "gains = {}", join(l));
        }
        GainSource::Roots(r) => {
            let roots: Vec<String> = r.iter().map(format_complex).collect();
            let _ = writeln!(out, "roots = {}", roots.join(", "));
        }
    }
    let _ = writeln!(out, "z0 = {}\n", join(&s.z0));

    let _ = writeln!(out, "[controller]\nkind = {}\nlaw = {}", s.kind.name(), s.law.name());
    if let Some(w) = s.boundary_layer {
        let _ = writeln!(out, "boundary_layer = {w}");
    }
    out.push('\n');

    if s.kind != ControllerKind::Pure {
        let b = &s.bounds;
        let _ = writeln!(out, "[uncertainty]\nphi_bar = {}\ngamma_m = {}\ngamma_M = {}", b.phi_bar, b.gamma_m, b.gamma_max);
        render_signal(&mut out, "phi", &s.phi);
        render_signal(&mut out, "gamma", &s.gamma);
        out.push('\n');
    }

    if let Some(a) = &s.adaptive {
        let _ = writeln!(
            out,
            "[adaptive]\nkappa = {}\ndelta = {}\neta = {}\nk_adapt = {}\nepsilon = {}\n",
            a.kappa, a.delta, a.eta, a.k_adapt, a.epsilon
        );
    }

    let integrator = match s.integrator {
        Integrator::Rk4 => "rk4",
        Integrator::Euler => "euler",
    };
    let _ = writeln!(
        out,
        "[simulation]\ndt = {}\nhorizon = {}\ntail_fraction = {}\nband = {}\nseed = {}\nintegrator = {}\nsamples = {}\n",
        s.dt, s.horizon, s.tail_fraction, s.band, s.seed, integrator, s.samples
    );
    let _ = writeln!(out, "[output]\ntrajectory = {}\nmetrics = {}", s.trajectory, s.metrics);
    out
}

/// Commented template printed by `--dump-defaults`.
pub fn template() -> String {
    r#"; Scenario template. Every key below shows its default; lines starting
; with ';' or '#' are comments.

[system]
; chain order r (required)
order = 2
; homogeneity parameter, default -0.5/r; all weights 1 + (i-1)k_hom must be > 0
k_hom = -0.25
; `preset` (roots -1..-r), an explicit list `l1, ..., lr`, or use
; `roots = -1, -2+1i, -2-1i` instead of `gains`
gains = preset
; initial state, default all ones
z0 = 1, 1

[controller]
; pure | robust | adaptive (required)
kind = robust
; hong | simplified (adaptive runs always use hong)
law = hong
; optional smooth sign of half-width w, off by default
; boundary_layer = 0.01

; Known bounds for robust runs, true (hidden) bounds for adaptive runs.
; Not allowed for pure runs.
[uncertainty]
phi_bar = 0.5
gamma_m = 0.5
gamma_M = 1.5
; constant (value) | sinusoid (offset, amplitude, omega, phase)
; | piecewise_random (low, high, dwell; seeded from simulation.seed)
phi_kind = constant
phi_value = 0
gamma_kind = constant
gamma_value = 1

; Only for adaptive runs; epsilon is required there.
; [adaptive]
; kappa = 1
; delta = 1
; eta = 0.5
; k_adapt = 2
; epsilon = 0.1

[simulation]
dt = 0.001
horizon = 10
tail_fraction = 0.2
band = 0.01
seed = 0
; rk4 | euler
integrator = rk4
; level-set samples for the homogeneity constants
samples = 10000

; Relative paths resolve against the scenario file's directory.
[output]
trajectory = trajectory.csv
metrics = metrics.json
"#
    .to_string()
}
