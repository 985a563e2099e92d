//! Fixed-step closed-loop simulation of the perturbed chain
//! `ż_i = z_{i+1}`, `ż_r = φ(t) + γ(t)·u`.
//!
//! The discontinuous laws are evaluated pointwise; set-valued (Filippov)
//! solutions are only approximated by the discretization, which leaves a
//! chattering band of size `O(dt·gain)` around the switching manifold. The
//! band is measured by [`compute_metrics`], not suppressed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controllers::{
    adaptive_u_with, hong_u0_unchecked, phi_hat_rate_unchecked, robust_u_with,
    simplified_u0_unchecked, AdaptiveConfig, FeedbackLaw, HongParams, Switching,
    UncertaintyBounds,
};
use crate::error::{check_len, Error, Result};
use crate::lyapunov::v1_unchecked;
use crate::scalar::{all_finite, inf_norm, Scalar};

/// Generator of one bounded uncertainty signal.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceSpec<T> {
    Constant { value: T },
    /// `offset + amplitude·sin(ω·t + phase)`.
    Sinusoid { offset: T, amplitude: T, omega: T, phase: T },
    /// Uniform draws on `[low, high]`, held for `dwell` seconds each.
    PiecewiseRandom { low: T, high: T, dwell: T, seed: u64 },
}

impl<T: Scalar> DisturbanceSpec<T> {
    /// Range the generator can reach before clamping.
    fn range(&self) -> (T, T) {
        match *self {
            DisturbanceSpec::Constant { value } => (value, value),
            DisturbanceSpec::Sinusoid { offset, amplitude, .. } => {
                (offset - amplitude.abs(), offset + amplitude.abs())
            }
            DisturbanceSpec::PiecewiseRandom { low, high, .. } => (low, high),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match *self {
            DisturbanceSpec::Constant { value } => value.is_finite(),
            DisturbanceSpec::Sinusoid { offset, amplitude, omega, phase } => {
                [offset, amplitude, omega, phase].iter().all(|x| x.is_finite())
            }
            DisturbanceSpec::PiecewiseRandom { low, high, dwell, .. } => {
                if !(dwell > T::zero()) {
                    return Err(Error::domain(format!("dwell = {dwell} must be positive")));
                }
                if low > high {
                    return Err(Error::domain(format!("low = {low} exceeds high = {high}")));
                }
                [low, high, dwell].iter().all(|x| x.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::domain("disturbance parameters must be finite"))
        }
    }
}

/// A signal `t ↦ value` confined to `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    spec: DisturbanceSpec<T>,
    lo: T,
    hi: T,
}

impl<T: Scalar> Signal<T> {
    /// Fails if the generator can leave `[lo, hi]`.
    pub fn new(spec: DisturbanceSpec<T>, lo: T, hi: T) -> Result<Self> {
        spec.validate()?;
        if !(lo <= hi) {
            return Err(Error::domain(format!("empty signal interval [{lo}, {hi}]")));
        }
        let (a, b) = spec.range();
        if a < lo || b > hi {
            return Err(Error::domain(format!(
                "disturbance range [{a}, {b}] exceeds its bounds [{lo}, {hi}]"
            )));
        }
        Ok(Self { spec, lo, hi })
    }

    pub fn spec(&self) -> &DisturbanceSpec<T> {
        &self.spec
    }

    pub fn value(&self, t: T) -> T {
        let raw = match self.spec {
            DisturbanceSpec::Constant { value } => value,
            DisturbanceSpec::Sinusoid { offset, amplitude, omega, phase } => {
                offset + amplitude * (omega * t + phase).sin()
            }
            DisturbanceSpec::PiecewiseRandom { low, high, dwell, seed } => {
                let slot = (t / dwell).floor().max(T::zero()).to_u64().unwrap_or(u64::MAX);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(slot);
                let u: f64 = rng.random();
                low + (high - low) * T::lit(u)
            }
        };
        raw.max(self.lo).min(self.hi)
    }
}

/// The pair `(φ(t), γ(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance<T> {
    pub phi: Signal<T>,
    pub gamma: Signal<T>,
}

impl<T: Scalar> Disturbance<T> {
    /// `φ ≡ 0`, `γ ≡ 1`: the pure chain.
    pub fn nominal() -> Self {
        let c = |v| Signal { spec: DisturbanceSpec::Constant { value: v }, lo: v, hi: v };
        Self { phi: c(T::zero()), gamma: c(T::one()) }
    }
}

/// Builds `(φ, γ)` confined to `[−φ̄, φ̄] × [γ_m, γ_M]`.
pub fn make_disturbance<T: Scalar>(
    phi: DisturbanceSpec<T>,
    gamma: DisturbanceSpec<T>,
    bounds: &UncertaintyBounds<T>,
) -> Result<Disturbance<T>> {
    Ok(Disturbance {
        phi: Signal::new(phi, -bounds.phi_bar, bounds.phi_bar)?,
        gamma: Signal::new(gamma, bounds.gamma_m, bounds.gamma_max)?,
    })
}

/// Feedback applied to the chain. `Pure` applies `u = u0`; pair it with
/// [`Disturbance::nominal`] for the unperturbed chain. The adaptive law never
/// sees the true uncertainty bounds and always uses Hong's nominal law.
#[derive(Debug, Clone, PartialEq)]
pub enum Controller<T> {
    Pure { law: FeedbackLaw },
    Robust { law: FeedbackLaw, bounds: UncertaintyBounds<T> },
    Adaptive { config: AdaptiveConfig<T> },
}

impl<T: Scalar> Controller<T> {
    pub fn is_adaptive(&self) -> bool {
        matches!(self, Controller::Adaptive { .. })
    }

    pub fn law(&self) -> FeedbackLaw {
        match self {
            Controller::Pure { law } | Controller::Robust { law, .. } => *law,
            Controller::Adaptive { .. } => FeedbackLaw::Hong,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    pub dt: T,
    pub horizon: T,
    pub integrator: Integrator,
    pub switching: Switching<T>,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(dt: T, horizon: T) -> Self {
        Self { dt, horizon, integrator: Integrator::Rk4, switching: Switching::Sign }
    }

    /// `floor(T/dt)`, tolerant to the representation error of `T/dt`.
    pub fn steps(&self) -> usize {
        let q = (self.horizon / self.dt).as_f64();
        (q * (1.0 + 1e-12)).floor() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::domain(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(Error::domain(format!("horizon = {} must be at least dt", self.horizon)));
        }
        self.switching.validate()?;
        Ok(())
    }
}

/// Uniformly sampled closed-loop record, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    order: usize,
    dt: T,
    adaptive: bool,
    t: Vec<T>,
    z: Vec<T>,
    u0: Vec<T>,
    u: Vec<T>,
    v1: Vec<T>,
    phi: Vec<T>,
    gamma: Vec<T>,
    phi_hat: Vec<T>,
    gamma_hat: Vec<T>,
}

/// One row of a [`Trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<'a, T> {
    pub t: T,
    pub z: &'a [T],
    pub u0: T,
    pub u: T,
    pub v1: T,
    pub phi: T,
    pub gamma: T,
    pub phi_hat: Option<T>,
    pub gamma_hat: Option<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(order: usize, dt: T, adaptive: bool) -> Self {
        Self {
            order,
            dt,
            adaptive,
            t: Vec::new(),
            z: Vec::new(),
            u0: Vec::new(),
            u: Vec::new(),
            v1: Vec::new(),
            phi: Vec::new(),
            gamma: Vec::new(),
            phi_hat: Vec::new(),
            gamma_hat: Vec::new(),
        }
    }

    fn reserve(&mut self, n: usize) {
        self.t.reserve(n);
        self.z.reserve(n * self.order);
        for col in [&mut self.u0, &mut self.u, &mut self.v1, &mut self.phi, &mut self.gamma] {
            col.reserve(n);
        }
        if self.adaptive {
            self.phi_hat.reserve(n);
            self.gamma_hat.reserve(n);
        }
    }

    /// Appends a record at `t = len()·dt`. `adaptive` carries `(φ̂, γ̂)` and
    /// must be present exactly for adaptive trajectories.
    #[allow(clippy::too_many_arguments)]
    pub fn push(&mut self, z: &[T], u0: T, u: T, v1: T, phi: T, gamma: T, adaptive: Option<(T, T)>) {
        assert_eq!(z.len(), self.order, "state length");
        assert_eq!(adaptive.is_some(), self.adaptive, "adaptive columns");
        self.t.push(self.dt * T::from_usize(self.t.len()).unwrap());
        self.z.extend_from_slice(z);
        self.u0.push(u0);
        self.u.push(u);
        self.v1.push(v1);
        self.phi.push(phi);
        self.gamma.push(gamma);
        if let Some((ph, gh)) = adaptive {
            self.phi_hat.push(ph);
            self.gamma_hat.push(gh);
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn is_adaptive(&self) -> bool {
        self.adaptive
    }

    pub fn times(&self) -> &[T] {
        &self.t
    }

    pub fn state(&self, i: usize) -> &[T] {
        &self.z[i * self.order..(i + 1) * self.order]
    }

    pub fn states(&self) -> impl Iterator<Item = &[T]> {
        self.z.chunks_exact(self.order)
    }

    pub fn v1(&self) -> &[T] {
        &self.v1
    }

    pub fn u0(&self) -> &[T] {
        &self.u0
    }

    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn gamma(&self) -> &[T] {
        &self.gamma
    }

    /// Empty for non-adaptive runs.
    pub fn phi_hat(&self) -> &[T] {
        &self.phi_hat
    }

    pub fn gamma_hat(&self) -> &[T] {
        &self.gamma_hat
    }

    pub fn sample(&self, i: usize) -> Sample<'_, T> {
        Sample {
            t: self.t[i],
            z: self.state(i),
            u0: self.u0[i],
            u: self.u[i],
            v1: self.v1[i],
            phi: self.phi[i],
            gamma: self.gamma[i],
            phi_hat: self.phi_hat.get(i).copied(),
            gamma_hat: self.gamma_hat.get(i).copied(),
        }
    }

    pub fn last_state(&self) -> Option<&[T]> {
        self.len().checked_sub(1).map(|i| self.state(i))
    }
}

/// Everything the right-hand side evaluation produces at one instant.
struct Eval<T> {
    u0: T,
    u: T,
    v1: T,
    phi: T,
    gamma: T,
    gamma_hat: T,
    phi_hat_rate: T,
}

struct ClosedLoop<'a, T: Scalar> {
    controller: &'a Controller<T>,
    hp: &'a HongParams<T>,
    disturbance: &'a Disturbance<T>,
    switching: Switching<T>,
    v: Vec<T>,
    scratch: Vec<T>,
}

impl<T: Scalar> ClosedLoop<'_, T> {
    /// `x = (z, φ̂)` for adaptive runs, `x = z` otherwise.
    fn eval(&mut self, t: T, x: &[T]) -> Eval<T> {
        let r = self.hp.order();
        let z = &x[..r];
        let u0 = match self.controller.law() {
            FeedbackLaw::Hong => hong_u0_unchecked(z, self.hp, &mut self.v),
            FeedbackLaw::Simplified => {
                let exps = self.hp.simplified_exponents().expect("validated before integration");
                simplified_u0_unchecked(z, self.hp, exps, &mut self.v)
            }
        };
        let phi = self.disturbance.phi.value(t);
        let gamma = self.disturbance.gamma.value(t);
        let v1 = v1_unchecked(z, self.hp, &mut self.scratch);
        let (u, gamma_hat, phi_hat_rate) = match self.controller {
            Controller::Pure { .. } => (u0, T::zero(), T::zero()),
            Controller::Robust { bounds, .. } => (robust_u_with(u0, bounds, self.switching), T::zero(), T::zero()),
            Controller::Adaptive { config } => {
                let out = adaptive_u_with(u0, x[r], config, self.switching);
                (out.u, out.gamma_hat, phi_hat_rate_unchecked(v1, x[r], config))
            }
        };
        Eval { u0, u, v1, phi, gamma, gamma_hat, phi_hat_rate }
    }

    fn rhs(&mut self, t: T, x: &[T], out: &mut [T]) {
        let r = self.hp.order();
        let e = self.eval(t, x);
        out[..r - 1].copy_from_slice(&x[1..r]);
        out[r - 1] = e.phi + e.gamma * e.u;
        if x.len() > r {
            out[r] = e.phi_hat_rate;
        }
    }
}

/// Integrates the closed loop from `z0` over `[0, horizon]` and records
/// every grid point, `floor(horizon/dt) + 1` rows in total.
///
/// Adaptive runs start from `φ̂ = 0`, integrate `φ̂` with the plant and clamp
/// it at zero after every step. A non-finite state aborts with
/// [`Error::Diverged`].
pub fn simulate<T: Scalar>(
    z0: &[T],
    controller: &Controller<T>,
    hp: &HongParams<T>,
    disturbance: &Disturbance<T>,
    cfg: &SimConfig<T>,
) -> Result<Trajectory<T>> {
    let r = hp.order();
    check_len(r, z0.len())?;
    if !all_finite(z0) {
        return Err(Error::domain("initial state must be finite"));
    }
    cfg.validate()?;
    if controller.law() == FeedbackLaw::Simplified && hp.simplified_exponents().is_none() {
        return Err(Error::domain("simplified law needs 1 + (r+1)k_hom > 0"));
    }

    let adaptive = controller.is_adaptive();
    let dim = if adaptive { r + 1 } else { r };
    let mut x = z0.to_vec();
    if adaptive {
        x.push(T::zero());
    }
    let mut sys = ClosedLoop {
        controller,
        hp,
        disturbance,
        switching: cfg.switching,
        v: Vec::with_capacity(r + 1),
        scratch: Vec::with_capacity(r + 1),
    };

    let steps = cfg.steps();
    let dt = cfg.dt;
    let mut traj = Trajectory::new(r, dt, adaptive);
    traj.reserve(steps + 1);

    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);
    let mut k1 = vec![T::zero(); dim];
    let mut k2 = vec![T::zero(); dim];
    let mut k3 = vec![T::zero(); dim];
    let mut k4 = vec![T::zero(); dim];
    let mut tmp = vec![T::zero(); dim];

    for n in 0..=steps {
        let t = dt * T::from_usize(n).unwrap();
        let e = sys.eval(t, &x);
        let extra = adaptive.then(|| (x[r], e.gamma_hat));
        traj.push(&x[..r], e.u0, e.u, e.v1, e.phi, e.gamma, extra);
        if n == steps {
            break;
        }
        match cfg.integrator {
            Integrator::Euler => {
                sys.rhs(t, &x, &mut k1);
                for i in 0..dim {
                    x[i] = x[i] + dt * k1[i];
                }
            }
            Integrator::Rk4 => {
                sys.rhs(t, &x, &mut k1);
                for i in 0..dim {
                    tmp[i] = x[i] + half * dt * k1[i];
                }
                sys.rhs(t + half * dt, &tmp, &mut k2);
                for i in 0..dim {
                    tmp[i] = x[i] + half * dt * k2[i];
                }
                sys.rhs(t + half * dt, &tmp, &mut k3);
                for i in 0..dim {
                    tmp[i] = x[i] + dt * k3[i];
                }
                sys.rhs(t + dt, &tmp, &mut k4);
                for i in 0..dim {
                    x[i] = x[i] + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
                }
            }
        }
        if adaptive {
            x[r] = x[r].max(T::zero());
        }
        if !all_finite(&x) {
            return Err(Error::Diverged { time: (t + dt).as_f64(), step: n + 1 });
        }
    }
    Ok(traj)
}

/// Finite-horizon summary of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics<T> {
    /// First grid time in the convergence set: `V1 ≤ ε` for adaptive runs,
    /// `‖z‖∞ ≤ band` otherwise. `None` if never reached.
    pub convergence_time: Option<T>,
    pub tail_inf_v1: T,
    pub tail_sup_v1: T,
    /// Largest `V1` strictly after the first sample with `V1 ≤ ε`.
    pub peak_v1_after_first_crossing: Option<T>,
    pub tail_sup_phi_hat: Option<T>,
    /// Largest `‖z‖∞` over the tail window.
    pub tail_sup_norm: T,
}

/// Minimum number of samples in the tail window.
pub const MIN_TAIL_SAMPLES: usize = 10;

/// Index of the first sample in the trailing `tail_fraction` of the horizon.
pub fn tail_start<T: Scalar>(traj: &Trajectory<T>, tail_fraction: T) -> usize {
    let steps = (traj.len() - 1) as f64;
    let start = (1.0 - tail_fraction.as_f64()) * steps;
    (start * (1.0 + 1e-12)).floor() as usize
}

pub fn compute_metrics<T: Scalar>(
    traj: &Trajectory<T>,
    epsilon: T,
    tail_fraction: T,
    band: T,
) -> Result<RunMetrics<T>> {
    if traj.is_empty() {
        return Err(Error::domain("trajectory is empty"));
    }
    if !(tail_fraction > T::zero() && tail_fraction < T::one()) {
        return Err(Error::domain(format!("tail_fraction = {tail_fraction} must lie in (0, 1)")));
    }
    let start = tail_start(traj, tail_fraction);
    let window = traj.len() - start;
    if window < MIN_TAIL_SAMPLES {
        return Err(Error::domain(format!(
            "tail window holds {window} samples, need at least {MIN_TAIL_SAMPLES}"
        )));
    }

    let v1 = traj.v1();
    let tail = &v1[start..];
    let tail_inf_v1 = tail.iter().fold(T::infinity(), |m, &x| m.min(x));
    let tail_sup_v1 = tail.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    let tail_sup_norm = (start..traj.len()).fold(T::zero(), |m, i| m.max(inf_norm(traj.state(i))));

    let entered = if traj.is_adaptive() {
        v1.iter().position(|&x| x <= epsilon)
    } else {
        traj.states().position(|z| inf_norm(z) <= band)
    };
    let convergence_time = entered.map(|i| traj.times()[i]);

    let peak_v1_after_first_crossing = v1
        .iter()
        .position(|&x| x <= epsilon)
        .and_then(|i| v1[i + 1..].iter().copied().reduce(T::max));

    let tail_sup_phi_hat = traj.is_adaptive().then(|| {
        traj.phi_hat()[start..].iter().fold(T::neg_infinity(), |m, &x| m.max(x))
    });

    Ok(RunMetrics {
        convergence_time,
        tail_inf_v1,
        tail_sup_v1,
        peak_v1_after_first_crossing,
        tail_sup_phi_hat,
        tail_sup_norm,
    })
}
