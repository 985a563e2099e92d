//! Feedback laws for the integrator chain.
//!
//! [`hong_u0`] and [`simplified_u0`] are nominal finite-time laws for the
//! pure chain. [`robust_u`] wraps a nominal law when the uncertainty bounds
//! are known; [`adaptive_u`] together with [`phi_hat_rate`] does without
//! them.

use crate::error::{check_len, Error, Result};
use crate::gain_synthesis::GainVector;
use crate::scalar::{all_finite, Scalar};
use crate::signed_algebra::{
    nu_epsilon_unchecked, saturate_unchecked, sign, signed_power_unchecked, DilationWeights,
};

/// Exponent tables of Hong's homogeneous controller.
///
/// With `p_i = 1 + (i−1)·k_hom` (`i = 1..r+1`):
/// `α_i = p_{i+1}/p_i`, `β_0 = p_2` and `(β_i + 1)·p_{i+1} = β_0 + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HongParams<T> {
    order: usize,
    k_hom: T,
    gains: GainVector<T>,
    p: Vec<T>,
    alpha: Vec<T>,
    beta: Vec<T>,
    weights: DilationWeights<T>,
    hong_exponents: Vec<T>,
    simplified_exponents: Option<Vec<T>>,
}

impl<T: Scalar> HongParams<T> {
    pub fn new(order: usize, k_hom: T, gains: GainVector<T>) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("order must be at least 1"));
        }
        check_len(order, gains.order())?;
        if !k_hom.is_finite() {
            return Err(Error::domain("k_hom must be finite"));
        }
        if k_hom > T::zero() {
            return Err(Error::domain(format!("k_hom = {k_hom} must not be positive")));
        }
        let at = |i: usize| T::one() + T::from_usize(i).unwrap() * k_hom;
        // p[i] holds p_{i+1}
        let p: Vec<T> = (0..=order).map(at).collect();
        if let Some((i, pi)) = p.iter().enumerate().find(|(_, x)| **x <= T::zero()) {
            return Err(Error::domain(format!(
                "weight p_{} = {pi} is not positive: every p_i = 1 + (i-1)k must be > 0, i.e. k_hom > -1/r",
                i + 1
            )));
        }
        let alpha: Vec<T> = (0..order).map(|i| p[i + 1] / p[i]).collect();
        let beta0 = p[1];
        let beta: Vec<T> = (0..order)
            .map(|i| if i == 0 { beta0 } else { (beta0 + T::one()) / p[i] - T::one() })
            .collect();
        let hong_exponents = (0..order).map(|i| alpha[i] / beta[i]).collect();
        // v_{i+1} uses (1+(i+2)k)/(1+(i+1)k); needs 1+(r+1)k > 0 at i = r-1
        let simplified_exponents = if at(order + 1) > T::zero() {
            Some((0..order).map(|i| at(i + 2) / at(i + 1)).collect())
        } else {
            None
        };
        let weights = DilationWeights::new(order, k_hom)?;
        Ok(Self {
            order,
            k_hom,
            gains,
            p,
            alpha,
            beta,
            weights,
            hong_exponents,
            simplified_exponents,
        })
    }

    /// Default homogeneity parameter `−1/(2r)`, half the admissibility limit.
    pub fn default_k_hom(order: usize) -> T {
        -T::lit(0.5) / T::from_usize(order).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k_hom(&self) -> T {
        self.k_hom
    }

    pub fn gains(&self) -> &GainVector<T> {
        &self.gains
    }

    /// `p_1..p_{r+1}`.
    pub fn p(&self) -> &[T] {
        &self.p
    }

    /// `α_1..α_r`.
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// `β_0..β_{r−1}`.
    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn weights(&self) -> &DilationWeights<T> {
        &self.weights
    }

    /// `α_{i+1}/β_i` for `i = 0..r−1`.
    pub fn hong_exponents(&self) -> &[T] {
        &self.hong_exponents
    }

    /// Exponents of the simplified law, `None` when `1 + (r+1)·k_hom ≤ 0`.
    pub fn simplified_exponents(&self) -> Option<&[T]> {
        self.simplified_exponents.as_deref()
    }

    /// Degree of `u0` for Hong's law under [`Self::weights`]: `p_{r+1}`.
    pub fn control_degree(&self) -> T {
        self.p[self.order]
    }
}

/// Nominal control and the virtual controls `v_0..v_r` it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback<T> {
    pub u0: T,
    pub virtual_controls: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeedbackLaw {
    Hong,
    Simplified,
}

impl FeedbackLaw {
    pub fn name(self) -> &'static str {
        match self {
            FeedbackLaw::Hong => "hong",
            FeedbackLaw::Simplified => "simplified",
        }
    }

    pub fn evaluate<T: Scalar>(self, z: &[T], hp: &HongParams<T>) -> Result<Feedback<T>> {
        match self {
            FeedbackLaw::Hong => hong_u0(z, hp),
            FeedbackLaw::Simplified => simplified_u0(z, hp),
        }
    }
}

fn check_state<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<()> {
    check_len(hp.order, z.len())?;
    if !all_finite(z) {
        return Err(Error::domain("state must be finite"));
    }
    Ok(())
}

pub(crate) fn hong_u0_unchecked<T: Scalar>(z: &[T], hp: &HongParams<T>, v: &mut Vec<T>) -> T {
    v.clear();
    v.push(T::zero());
    for i in 0..hp.order {
        let b = hp.beta[i];
        let inner = signed_power_unchecked(z[i], b) - signed_power_unchecked(v[i], b);
        let next = -hp.gains.as_slice()[i] * signed_power_unchecked(inner, hp.hong_exponents[i]);
        v.push(next);
    }
    v[hp.order]
}

/// Hong's homogeneous law:
/// `v_0 = 0`, `v_{i+1} = −l_{i+1}·⌊⌊z_{i+1}⌉^{β_i} − ⌊v_i⌉^{β_i}⌉^{α_{i+1}/β_i}`, `u0 = v_r`.
pub fn hong_u0<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<Feedback<T>> {
    check_state(z, hp)?;
    let mut v = Vec::with_capacity(hp.order + 1);
    let u0 = hong_u0_unchecked(z, hp, &mut v);
    Ok(Feedback { u0, virtual_controls: v })
}

pub(crate) fn simplified_u0_unchecked<T: Scalar>(
    z: &[T],
    hp: &HongParams<T>,
    exps: &[T],
    v: &mut Vec<T>,
) -> T {
    v.clear();
    v.push(T::zero());
    for i in 0..hp.order {
        let next = -hp.gains.as_slice()[i] * signed_power_unchecked(z[i] - v[i], exps[i]);
        v.push(next);
    }
    v[hp.order]
}

/// Simplified law with every `β_i = 1`:
/// `v_{i+1} = −l_{i+1}·⌊z_{i+1} − v_i⌉^{(1+(i+2)k)/(1+(i+1)k)}`, `u0 = v_r`.
pub fn simplified_u0<T: Scalar>(z: &[T], hp: &HongParams<T>) -> Result<Feedback<T>> {
    check_state(z, hp)?;
    let exps = hp.simplified_exponents().ok_or_else(|| {
        Error::domain(format!(
            "simplified law needs 1 + (r+1)k_hom > 0 (r = {}, k_hom = {})",
            hp.order, hp.k_hom
        ))
    })?;
    let mut v = Vec::with_capacity(hp.order + 1);
    let u0 = simplified_u0_unchecked(z, hp, exps, &mut v);
    Ok(Feedback { u0, virtual_controls: v })
}

/// Dilation under which [`simplified_u0`] is homogeneous.
///
/// Its exponents chain the weights `1 + i·k` (`i = 1..r`); normalized so
/// that `z_1` has weight one this is the family `1 + (i−1)·k'` with
/// `k' = k/(1+k)`, and `u0` then has degree `1 + r·k'`.
pub fn simplified_dilation<T: Scalar>(hp: &HongParams<T>) -> Result<(DilationWeights<T>, T)> {
    let k = hp.k_hom;
    let k_eff = k / (T::one() + k);
    let w = DilationWeights::new(hp.order, k_eff)?;
    let degree = T::one() + T::from_usize(hp.order).unwrap() * k_eff;
    Ok((w, degree))
}

/// Known bounds `φ(t) ∈ [−φ̄, φ̄]`, `γ(t) ∈ [γ_m, γ_M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBounds<T> {
    pub phi_bar: T,
    pub gamma_m: T,
    pub gamma_max: T,
}

impl<T: Scalar> UncertaintyBounds<T> {
    pub fn new(phi_bar: T, gamma_m: T, gamma_max: T) -> Result<Self> {
        if ![phi_bar, gamma_m, gamma_max].iter().all(|x| x.is_finite()) {
            return Err(Error::domain("uncertainty bounds must be finite"));
        }
        if phi_bar < T::zero() {
            return Err(Error::domain(format!("phi_bar = {phi_bar} must be non-negative")));
        }
        if gamma_m <= T::zero() {
            return Err(Error::domain(format!("gamma_m = {gamma_m} must be positive")));
        }
        if gamma_max < gamma_m {
            return Err(Error::domain(format!("gamma_M = {gamma_max} must be >= gamma_m = {gamma_m}")));
        }
        Ok(Self { phi_bar, gamma_m, gamma_max })
    }
}

/// How `sign(u0)` is realized inside the discontinuous laws.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Switching<T> {
    /// Exact `sign` with `sign(0) = 0`.
    #[default]
    Sign,
    /// `σ(u0/w)`: a boundary layer of half-width `w`. Not the discontinuous
    /// law; for chattering studies only.
    BoundaryLayer(T),
}

impl<T: Scalar> Switching<T> {
    #[inline]
    pub fn apply(self, a: T) -> T {
        match self {
            Switching::Sign => sign(a),
            Switching::BoundaryLayer(w) => saturate_unchecked(a / w),
        }
    }

    pub fn validate(self) -> Result<Self> {
        if let Switching::BoundaryLayer(w) = self {
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::domain(format!("boundary-layer width {w} must be positive")));
            }
        }
        Ok(self)
    }
}

/// `u = (u0 + φ̄·sign(u0))/γ_m`.
pub fn robust_u<T: Scalar>(u0: T, b: &UncertaintyBounds<T>) -> T {
    robust_u_with(u0, b, Switching::Sign)
}

#[inline]
pub fn robust_u_with<T: Scalar>(u0: T, b: &UncertaintyBounds<T>, switching: Switching<T>) -> T {
    (u0 + b.phi_bar * switching.apply(u0)) / b.gamma_m
}

/// Tuning of the adaptive law. `k_adapt` is the growth rate of `φ̂` and
/// `epsilon` the Lyapunov threshold it reacts to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig<T> {
    pub kappa: T,
    pub delta: T,
    pub eta: T,
    pub k_adapt: T,
    pub epsilon: T,
}

impl<T: Scalar> AdaptiveConfig<T> {
    pub fn new(kappa: T, delta: T, eta: T, k_adapt: T, epsilon: T) -> Result<Self> {
        for (name, x) in [("kappa", kappa), ("delta", delta), ("k_adapt", k_adapt), ("epsilon", epsilon)] {
            if !(x.is_finite() && x > T::zero()) {
                return Err(Error::domain(format!("{name} = {x} must be positive")));
            }
        }
        if !(eta > T::zero() && eta < T::one()) {
            return Err(Error::domain(format!("eta = {eta} must lie in (0, 1)")));
        }
        Ok(Self { kappa, delta, eta, k_adapt, epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdaptiveState<T> {
    pub phi_hat: T,
}

impl<T: Scalar> AdaptiveState<T> {
    pub fn new() -> Self {
        Self { phi_hat: T::zero() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOutput<T> {
    pub u: T,
    pub gamma_hat: T,
}

/// `γ̂ = κ + δ|u0|`, `u = γ̂·u0 + φ̂·sign(u0)`.
pub fn adaptive_u<T: Scalar>(u0: T, st: &AdaptiveState<T>, cfg: &AdaptiveConfig<T>) -> AdaptiveOutput<T> {
    adaptive_u_with(u0, st.phi_hat, cfg, Switching::Sign)
}

#[inline]
pub fn adaptive_u_with<T: Scalar>(
    u0: T,
    phi_hat: T,
    cfg: &AdaptiveConfig<T>,
    switching: Switching<T>,
) -> AdaptiveOutput<T> {
    let gamma_hat = cfg.kappa + cfg.delta * u0.abs();
    AdaptiveOutput { u: gamma_hat * u0 + phi_hat * switching.apply(u0), gamma_hat }
}

#[inline]
pub(crate) fn phi_hat_rate_unchecked<T: Scalar>(v1: T, phi_hat: T, cfg: &AdaptiveConfig<T>) -> T {
    let nu = nu_epsilon_unchecked(v1, cfg.epsilon);
    cfg.k_adapt * nu - (T::one() - nu) * signed_power_unchecked(phi_hat, cfg.eta)
}

/// `dφ̂/dt = k·ν_ε(V1) − (1 − ν_ε(V1))·⌊φ̂⌉^η`.
pub fn phi_hat_rate<T: Scalar>(v1: T, phi_hat: T, cfg: &AdaptiveConfig<T>) -> Result<T> {
    if !(v1.is_finite() && v1 >= T::zero()) {
        return Err(Error::domain(format!("V1 = {v1} must be finite and non-negative")));
    }
    if !(phi_hat.is_finite() && phi_hat >= T::zero()) {
        return Err(Error::domain(format!("phi_hat = {phi_hat} must be finite and non-negative")));
    }
    Ok(phi_hat_rate_unchecked(v1, phi_hat, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signed_algebra::dilate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hp(order: usize, k: f64, l: &[f64]) -> HongParams<f64> {
        HongParams::new(order, k, GainVector::new(l.to_vec()).unwrap()).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn exponent_tables_r3() {
        let h = hp(3, -0.1, &[1.0 / 3.0, 1.0, 3.0]);
        let expect_p = [1.0, 0.9, 0.8, 0.7];
        let expect_a = [0.9, 8.0 / 9.0, 0.875];
        let expect_b = [0.9, 10.0 / 9.0, 1.375];
        for (a, b) in h.p().iter().zip(&expect_p) {
            assert!(close(*a, *b, 1e-14));
        }
        for (a, b) in h.alpha().iter().zip(&expect_a) {
            assert!(close(*a, *b, 1e-14));
        }
        for (a, b) in h.beta().iter().zip(&expect_b) {
            assert!(close(*a, *b, 1e-14));
        }
        // (β_i + 1) p_{i+1} = β_0 + 1
        for i in 1..3 {
            assert!(close((h.beta()[i] + 1.0) * h.p()[i], h.beta()[0] + 1.0, 1e-14));
        }
    }

    #[test]
    fn linear_case_has_unit_exponents() {
        for r in 1..=5 {
            let h = HongParams::new(r, 0.0, GainVector::preset(r).unwrap()).unwrap();
            assert!(h.p().iter().chain(h.alpha()).chain(h.beta()).all(|&x| x == 1.0));
        }
    }

    #[test]
    fn inadmissible_k_rejected() {
        let g = GainVector::repeated_root(3, -1.0).unwrap();
        let err = HongParams::new(3, -0.5, g.clone()).unwrap_err();
        assert!(err.to_string().contains("p_3 = 0"), "{err}");
        assert!(HongParams::new(3, 0.1, g.clone()).is_err());
        assert!(HongParams::new(2, -0.1, g).is_err());
    }

    #[test]
    fn hong_examples() {
        let h = hp(2, 0.0, &[0.5, 2.0]);
        let f = hong_u0(&[1.0, 1.0], &h).unwrap();
        assert_eq!(f.virtual_controls, vec![0.0, -0.5, -3.0]);
        assert_eq!(f.u0, -3.0);
        let zero = hong_u0(&[0.0, 0.0], &hp(2, -0.1, &[0.5, 2.0])).unwrap();
        assert!(zero.virtual_controls.iter().all(|&v| v == 0.0));
        assert!(hong_u0(&[1.0], &h).is_err());
        assert!(hong_u0(&[1.0, f64::NAN], &h).is_err());
    }

    #[test]
    fn simplified_examples() {
        let h = hp(2, -0.1, &[0.5, 2.0]);
        let f = simplified_u0(&[1.0, 1.0], &h).unwrap();
        assert!(close(f.virtual_controls[1], -0.5, 1e-15));
        // -2 * 1.5^(0.7/0.8)
        assert!(close(f.u0, -2.0 * 1.5f64.powf(0.875), 1e-14));
        assert!((f.u0 - (-2.8518)).abs() < 1e-4);
        assert_eq!(simplified_u0(&[0.0, 0.0], &h).unwrap().u0, 0.0);
    }

    #[test]
    fn simplified_equals_hong_when_linear() {
        let h = hp(3, 0.0, &[1.0 / 3.0, 1.0, 3.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let z: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            assert!(close(hong_u0(&z, &h).unwrap().u0, simplified_u0(&z, &h).unwrap().u0, 1e-13));
        }
    }

    #[test]
    fn simplified_needs_extra_weight() {
        // r = 1, k = -0.5: 1 + 2k = 0
        let h = hp(1, -0.5, &[1.0]);
        assert!(h.simplified_exponents().is_none());
        assert!(simplified_u0(&[1.0], &h).is_err());
        assert!(hong_u0(&[1.0], &h).is_ok());
    }

    #[test]
    fn robust_examples() {
        let b = UncertaintyBounds::new(2.0, 0.5, 1.0).unwrap();
        assert_eq!(robust_u(-3.0, &b), -10.0);
        assert_eq!(robust_u(0.0, &b), 0.0);
        let free = UncertaintyBounds::new(0.0, 0.5, 1.0).unwrap();
        assert_eq!(robust_u(1.3, &free), 2.6);
        assert!(UncertaintyBounds::new(-1.0, 0.5, 1.0).is_err());
        assert!(UncertaintyBounds::new(1.0, 0.0, 1.0).is_err());
        assert!(UncertaintyBounds::new(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn boundary_layer_switching() {
        let b = UncertaintyBounds::new(1.0, 1.0, 1.0).unwrap();
        let s = Switching::BoundaryLayer(0.1);
        assert!(close(robust_u_with(0.05, &b, s), 0.55, 1e-14));
        assert_eq!(robust_u_with(2.0, &b, s), 3.0);
        assert!(Switching::BoundaryLayer(0.0).validate().is_err());
    }

    #[test]
    fn adaptive_examples() {
        let cfg = AdaptiveConfig::new(1.0, 0.5, 0.5, 1.0, 1.0).unwrap();
        let out = adaptive_u(-2.0, &AdaptiveState { phi_hat: 1.0 }, &cfg);
        assert_eq!(out.gamma_hat, 2.0);
        assert_eq!(out.u, -5.0);
        assert_eq!(adaptive_u(0.0, &AdaptiveState { phi_hat: 7.0 }, &cfg).u, 0.0);
        // δ = 0 is outside AdaptiveConfig's invariants but the law itself reduces to κ·u0
        let static_gain = AdaptiveConfig { delta: 0.0, ..cfg };
        assert_eq!(adaptive_u(1.5, &AdaptiveState::new(), &static_gain).u, 1.5);
        assert!(AdaptiveConfig::new(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(AdaptiveConfig::new(1.0, 1.0, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn phi_hat_rate_examples() {
        let cfg = AdaptiveConfig::new(1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(phi_hat_rate(2.0, 0.0, &cfg).unwrap(), 1.0);
        assert_eq!(phi_hat_rate(2.0, 123.0, &cfg).unwrap(), 1.0);
        assert_eq!(phi_hat_rate(0.25, 4.0, &cfg).unwrap(), -2.0);
        assert_eq!(phi_hat_rate(0.75, 4.0, &cfg).unwrap(), -0.5);
        assert_eq!(phi_hat_rate(0.1, 0.0, &cfg).unwrap(), 0.0);
        assert!(phi_hat_rate(-0.1, 0.0, &cfg).is_err());
        assert!(phi_hat_rate(0.1, -1.0, &cfg).is_err());
    }

    /// Piecewise table of the adaptation law, written out case by case.
    fn piecewise_rate(v1: f64, phi: f64, cfg: &AdaptiveConfig<f64>) -> f64 {
        let eps = cfg.epsilon;
        let decay = phi.powf(cfg.eta);
        if v1 >= eps {
            cfg.k_adapt
        } else if v1 >= eps / 2.0 {
            (v1 - eps / 2.0) * 2.0 * cfg.k_adapt / eps - (eps - v1) * (2.0 / eps) * decay
        } else {
            -decay
        }
    }

    #[test]
    fn phi_hat_rate_matches_piecewise_table() {
        let cfg = AdaptiveConfig::new(1.0, 1.0, 0.3, 2.5, 0.8).unwrap();
        for i in 0..=400 {
            let v1 = 2.0 * i as f64 / 400.0;
            for j in 0..=50 {
                let phi = 5.0 * j as f64 / 50.0;
                let a = phi_hat_rate(v1, phi, &cfg).unwrap();
                let b = piecewise_rate(v1, phi, &cfg);
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "v1={v1} phi={phi}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sign_compatibility_with_lyapunov_partial() {
        let h = hp(3, -1.0 / 6.0, GainVector::<f64>::preset(3).unwrap().as_slice());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let z: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let f = hong_u0(&z, &h).unwrap();
            let d = crate::lyapunov::dv1_dzr(&z, &h).unwrap();
            assert!(f.u0 * d <= 0.0);
            assert_eq!(sign(f.u0), -sign(d));
        }
    }

    proptest! {
        #[test]
        fn hong_is_homogeneous(
            z in proptest::collection::vec(-5f64..5.0, 3),
            lam in 0.1f64..10.0,
        ) {
            let h = hp(3, -1.0 / 6.0, GainVector::<f64>::preset(3).unwrap().as_slice());
            let lhs = hong_u0(&dilate(&z, lam, h.weights()).unwrap(), &h).unwrap().u0;
            let rhs = lam.powf(h.control_degree()) * hong_u0(&z, &h).unwrap().u0;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1e-300));
        }

        #[test]
        fn simplified_is_homogeneous_under_its_dilation(
            z in proptest::collection::vec(-5f64..5.0, 3),
            lam in 0.1f64..10.0,
        ) {
            let h = hp(3, -1.0 / 6.0, GainVector::<f64>::preset(3).unwrap().as_slice());
            let (w, deg) = simplified_dilation(&h).unwrap();
            let lhs = simplified_u0(&dilate(&z, lam, &w).unwrap(), &h).unwrap().u0;
            let rhs = lam.powf(deg) * simplified_u0(&z, &h).unwrap().u0;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1e-300));
        }

        #[test]
        fn gamma_hat_increases_with_abs_u0(a in 0f64..100.0, d in 1e-3f64..10.0, delta in 0.01f64..5.0) {
            let cfg = AdaptiveConfig::new(1.0, delta, 0.5, 1.0, 1.0).unwrap();
            let st = AdaptiveState::new();
            prop_assert!(adaptive_u(a + d, &st, &cfg).gamma_hat > adaptive_u(a, &st, &cfg).gamma_hat);
            prop_assert!(adaptive_u(-(a + d), &st, &cfg).gamma_hat > adaptive_u(-a, &st, &cfg).gamma_hat);
        }

        #[test]
        fn abs_u_non_decreasing_in_phi_hat(u0 in -10f64..10.0, p1 in 0f64..10.0, dp in 0f64..10.0) {
            prop_assume!(u0 != 0.0);
            let cfg = AdaptiveConfig::new(1.0, 0.5, 0.5, 1.0, 1.0).unwrap();
            let lo = adaptive_u(u0, &AdaptiveState { phi_hat: p1 }, &cfg).u.abs();
            let hi = adaptive_u(u0, &AdaptiveState { phi_hat: p1 + dp }, &cfg).u.abs();
            prop_assert!(hi >= lo);
        }

        #[test]
        fn phi_hat_rate_sign_structure(v1 in 0f64..10.0, phi in 0f64..10.0) {
            let cfg = AdaptiveConfig::new(1.0, 1.0, 0.5, 1.5, 2.0).unwrap();
            let rate = phi_hat_rate(v1, phi, &cfg).unwrap();
            if v1 >= cfg.epsilon { prop_assert!(rate > 0.0); }
            if v1 <= cfg.epsilon / 2.0 { prop_assert!(rate <= 0.0); }
            let at_zero = phi_hat_rate(v1, 0.0, &cfg).unwrap();
            prop_assert!(at_zero >= 0.0);
        }
    }
}
