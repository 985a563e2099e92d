//! Lyapunov function paired with Hong's law, its homogeneity constants and
//! the convergence and adaptation bounds derived from them.
//!
//! ```text
//! V1(z) = Σ_j ∫_{v_{j−1}}^{z_j} (⌊s⌉^{β_{j−1}} − ⌊v_{j−1}⌉^{β_{j−1}}) ds
//! ```
//!
//! is evaluated in closed form. Homogeneity makes `V1` scale with degree
//! `κ1 = 2 + k` and `∂V1/∂z_r` with degree `κ2 = 1 + (2−r)k`, so constants
//! extremized over the unit level set `{V1 = 1}` extend to the whole space.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::controllers::{hong_u0_unchecked, AdaptiveConfig, HongParams, UncertaintyBounds};
use crate::error::{check_len, Error, Result};
use crate::scalar::{all_finite, inf_norm, Scalar};
use crate::signed_algebra::{dilate, signed_power_unchecked};

/// Samples drawn per independent random stream during level-set sampling.
/// Sample `n` always comes from stream `n / LEVEL_SET_CHUNK`, so a run with
/// more samples sees a superset of a shorter run's points.
pub const LEVEL_SET_CHUNK: usize = 1024;

fn check_state<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<()> {
    check_len(hp.order(), z.len())?;
    if !all_finite(z) {
        return Err(Error::domain("state must be finite"));
    }
    Ok(())
}

/// `∫_v^z (⌊s⌉^β − ⌊v⌉^β) ds` via the antiderivative `|s|^{β+1}/(β+1)`.
#[inline]
fn integral_term<T: Scalar>(z: T, v: T, beta: T) -> T {
    let b1 = beta + T::one();
    (z.abs().powf(b1) - v.abs().powf(b1)) / b1 - signed_power_unchecked(v, beta) * (z - v)
}

pub(crate) fn v1_with_controls<T: Scalar>(z: &[T], v: &[T], hp: &HongParams<T>) -> T {
    let total = z
        .iter()
        .zip(v)
        .zip(hp.beta())
        .fold(T::zero(), |acc, ((&zj, &vj), &b)| acc + integral_term(zj, vj, b));
    total.max(T::zero())
}

pub(crate) fn v1_unchecked<T: Scalar>(z: &[T], hp: &HongParams<T>, scratch: &mut Vec<T>) -> T {
    hong_u0_unchecked(z, hp, scratch);
    v1_with_controls(z, scratch, hp)
}

/// Closed-form `V1(z)`; non-negative and zero only at the origin.
pub fn v1<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<T> {
    check_state(z, hp)?;
    let mut v = Vec::with_capacity(hp.order() + 1);
    Ok(v1_unchecked(z, hp, &mut v))
}

#[inline]
pub(crate) fn dv1_dzr_with_controls<T: Scalar>(z: &[T], v: &[T], hp: &HongParams<T>) -> T {
    let r = hp.order();
    let b = hp.beta()[r - 1];
    signed_power_unchecked(z[r - 1], b) - signed_power_unchecked(v[r - 1], b)
}

/// `∂V1/∂z_r = ⌊z_r⌉^{β_{r−1}} − ⌊v_{r−1}⌉^{β_{r−1}}`.
pub fn dv1_dzr<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<T> {
    check_state(z, hp)?;
    let mut v = Vec::with_capacity(hp.order() + 1);
    hong_u0_unchecked(z, hp, &mut v);
    Ok(dv1_dzr_with_controls(z, &v, hp))
}

/// Default central-difference step `1e−6·max(1, ‖z‖∞)`.
pub fn default_fd_step<T: Scalar>(z: &[T]) -> T {
    T::lit(1e-6) * T::one().max(inf_norm(z))
}

fn gradient_fd_unchecked<T: Scalar>(z: &[T], hp: &HongParams<T>, h: T, scratch: &mut Vec<T>) -> Vec<T> {
    let mut probe = z.to_vec();
    let two_h = h + h;
    (0..z.len())
        .map(|i| {
            probe[i] = z[i] + h;
            let up = v1_unchecked(&probe, hp, scratch);
            probe[i] = z[i] - h;
            let down = v1_unchecked(&probe, hp, scratch);
            probe[i] = z[i];
            (up - down) / two_h
        })
        .collect()
}

/// Central-difference gradient of `V1` with step `h`.
pub fn v1_gradient_fd<T: Scalar>(z: &[T], hp: &HongParams<T>, h: T) -> Result<Vec<T>> {
    check_state(z, hp)?;
    if !(h.is_finite() && h > T::zero()) {
        return Err(Error::domain(format!("step h = {h} must be positive")));
    }
    let mut scratch = Vec::with_capacity(hp.order() + 1);
    Ok(gradient_fd_unchecked(z, hp, h, &mut scratch))
}

/// `dV1/dt` along the nominal closed loop `ż_i = z_{i+1}`, `ż_r = u0(z)`.
///
/// The first `r−1` partials come from central differences with
/// [`default_fd_step`], the last one from its closed form.
pub fn nominal_v1_rate<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<T> {
    check_state(z, hp)?;
    let mut scratch = Vec::with_capacity(hp.order() + 1);
    Ok(nominal_v1_rate_unchecked(z, hp, &mut scratch))
}

fn nominal_v1_rate_unchecked<T: Scalar>(z: &[T], hp: &HongParams<T>, scratch: &mut Vec<T>) -> T {
    let r = hp.order();
    let grad = gradient_fd_unchecked(z, hp, default_fd_step(z), scratch);
    let u0 = hong_u0_unchecked(z, hp, scratch);
    let last = dv1_dzr_with_controls(z, scratch, hp);
    let mut rate = last * u0;
    for i in 0..r - 1 {
        rate = rate + grad[i] * z[i + 1];
    }
    rate
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityDegrees<T> {
    /// Degree of `V1`.
    pub kappa1: T,
    /// Degree of `∂V1/∂z_r`.
    pub kappa2: T,
    /// `κ2/κ1`.
    pub alpha_prime: T,
}

/// `κ1 = 2 + k`, `κ2 = 1 + (2−r)k`, `α' = κ2/κ1`.
pub fn homogeneity_degrees<T: Scalar>(hp: &HongParams<T>) -> Result<HomogeneityDegrees<T>> {
    let k = hp.k_hom();
    let r = T::from_usize(hp.order()).unwrap();
    let kappa1 = T::lit(2.0) + k;
    let kappa2 = T::one() + (T::lit(2.0) - r) * k;
    let alpha_prime = kappa2 / kappa1;
    if !(alpha_prime > T::zero() && alpha_prime < T::one()) {
        return Err(Error::domain(format!("alpha' = {alpha_prime} is outside (0, 1)")));
    }
    Ok(HomogeneityDegrees { kappa1, kappa2, alpha_prime })
}

/// Constants certifying `|∂V1/∂z_r| ≤ c'·V1^{α'}` and `dV1/dt ≤ −c·V1^α`
/// along the nominal closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityCertificate<T> {
    pub kappa1: T,
    pub kappa2: T,
    pub alpha_prime: T,
    /// Sampled maximum of `|∂V1/∂z_r|` on `{V1 = 1}`.
    pub c_prime: T,
    /// Sampled minimum of `−dV1/dt` on `{V1 = 1}`.
    pub c: T,
    /// `(κ1 + k)/κ1`; equals one in the linear case.
    pub alpha: T,
    pub n_samples: usize,
}

/// Deterministic stream of points on `{V1 = 1}`.
///
/// Directions are uniform on the unit sphere and pushed onto the level set
/// by the dilation with `λ = V1(d)^{−1/κ1}`.
pub struct LevelSetSampler<'a, T: Scalar> {
    hp: &'a HongParams<T>,
    seed: u64,
    kappa1: T,
    index: usize,
    rng: ChaCha8Rng,
    scratch: Vec<T>,
}

impl<'a, T: Scalar> LevelSetSampler<'a, T> {
    pub fn new(hp: &'a HongParams<T>, seed: u64) -> Self {
        Self {
            hp,
            seed,
            kappa1: T::lit(2.0) + hp.k_hom(),
            index: 0,
            rng: Self::stream(seed, 0),
            scratch: Vec::with_capacity(hp.order() + 1),
        }
    }

    fn stream(seed: u64, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        rng
    }
}

impl<T: Scalar> Iterator for LevelSetSampler<'_, T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.index > 0 && self.index.is_multiple_of(LEVEL_SET_CHUNK) {
            self.rng = Self::stream(self.seed, (self.index / LEVEL_SET_CHUNK) as u64);
        }
        self.index += 1;
        let r = self.hp.order();
        loop {
            let d: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut self.rng)).collect();
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                continue;
            }
            let d: Vec<T> = d.iter().map(|x| T::lit(x / norm)).collect();
            let level = v1_unchecked(&d, self.hp, &mut self.scratch);
            if level <= T::zero() {
                continue;
            }
            let lambda = level.powf(-T::one() / self.kappa1);
            return Some(dilate(&d, lambda, self.hp.weights()).expect("unit direction dilates"));
        }
    }
}

/// Samples `{V1 = 1}` and extracts `c'` (max of `|∂V1/∂z_r|`) and `c`
/// (min of `−dV1/dt` under the nominal law). `α` follows from the degrees.
///
/// Fails with [`Error::NotCertified`] if `c ≤ 0`, i.e. some sampled point
/// of the level set is not strictly decreasing.
pub fn estimate_constants<T: Scalar>(
    hp: &HongParams<T>,
    n_samples: usize,
    seed: u64,
) -> Result<HomogeneityCertificate<T>> {
    if n_samples == 0 {
        return Err(Error::domain("n_samples must be at least 1"));
    }
    let deg = homogeneity_degrees(hp)?;
    let mut c_prime = T::zero();
    let mut c = T::infinity();
    let mut worst = None;
    let mut scratch = Vec::with_capacity(hp.order() + 1);
    for z in LevelSetSampler::new(hp, seed).take(n_samples) {
        hong_u0_unchecked(&z, hp, &mut scratch);
        c_prime = c_prime.max(dv1_dzr_with_controls(&z, &scratch, hp).abs());
        let decrease = -nominal_v1_rate_unchecked(&z, hp, &mut scratch);
        if decrease < c {
            c = decrease;
            worst = Some(z);
        }
    }
    if !(c > T::zero()) {
        return Err(Error::NotCertified(format!(
            "dV1/dt = {} > 0 on the unit level set at z = {:?} (r = {}, k_hom = {}, gains = {:?})",
            -c,
            worst.unwrap_or_default(),
            hp.order(),
            hp.k_hom(),
            hp.gains().as_slice()
        )));
    }
    let alpha = (deg.kappa1 + hp.k_hom()) / deg.kappa1;
    Ok(HomogeneityCertificate {
        kappa1: deg.kappa1,
        kappa2: deg.kappa2,
        alpha_prime: deg.alpha_prime,
        c_prime,
        c,
        alpha,
        n_samples,
    })
}

fn check_unit_open<T: Scalar>(name: &str, x: T) -> Result<()> {
    if x > T::zero() && x < T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} must lie in (0, 1)")))
    }
}

/// Settling-time bound `V1(0)^{1−α}/(c(1−α))` from `dV1/dt ≤ −c·V1^α`.
pub fn convergence_time_bound<T: Scalar>(v1_0: T, c: T, alpha: T) -> Result<T> {
    check_unit_open("alpha", alpha)?;
    if !(c.is_finite() && c > T::zero()) {
        return Err(Error::domain(format!("c = {c} must be positive")));
    }
    if !(v1_0.is_finite() && v1_0 >= T::zero()) {
        return Err(Error::domain(format!("V1(0) = {v1_0} must be non-negative")));
    }
    let e = T::one() - alpha;
    Ok(v1_0.powf(e) / (c * e))
}

/// Ultimate bounds of the adaptive closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveBounds<T> {
    /// `Φ̄ = (φ̄ + (κγ_m − 1)²/(4γ_m δ))/γ_m`.
    pub phi_bar_cap: T,
    /// Bound on the overshoot of `V1` after it first drops below `ε`.
    pub delta_cap: T,
    /// Bound on `limsup φ̂`.
    pub phi_hat_ceiling: T,
}

/// Analytic bounds of the adaptive scheme from the true uncertainty bounds,
/// the adaptive tuning and the homogeneity certificate:
///
/// ```text
/// Δ       = (ε^{1−α'} + c'(1−α')γ_m Φ̄²/(2k))^{1/(1−α')}
/// ceiling = 2Φ̄ + k·Δ^{1−α}/(c(1−α))
/// ```
pub fn adaptive_bounds<T: Scalar>(
    b: &UncertaintyBounds<T>,
    cfg: &AdaptiveConfig<T>,
    cert: &HomogeneityCertificate<T>,
) -> Result<AdaptiveBounds<T>> {
    check_unit_open("alpha'", cert.alpha_prime)?;
    check_unit_open("alpha", cert.alpha)?;
    if !(cert.c > T::zero() && cert.c_prime > T::zero()) {
        return Err(Error::domain("certificate constants c and c' must be positive"));
    }
    let gm = b.gamma_m;
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let shift = cfg.kappa * gm - T::one();
    let phi_bar_cap = (b.phi_bar + shift * shift / (four * gm * cfg.delta)) / gm;
    let e = T::one() - cert.alpha_prime;
    let inner = cfg.epsilon.powf(e) + cert.c_prime * e * gm * phi_bar_cap * phi_bar_cap / (two * cfg.k_adapt);
    let delta_cap = inner.powf(T::one() / e);
    let phi_hat_ceiling = two * phi_bar_cap + cfg.k_adapt * convergence_time_bound(delta_cap, cert.c, cert.alpha)?;
    Ok(AdaptiveBounds { phi_bar_cap, delta_cap, phi_hat_ceiling })
}
