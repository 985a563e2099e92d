//! Scalar nonlinearities and the weighted dilation group.
//!
//! Every public function rejects NaN and infinities. The `*_unchecked`
//! helpers are the hot-path versions used inside feedback evaluation once
//! inputs have been validated.

use crate::error::{check_len, Error, Result};
use crate::scalar::{all_finite, Scalar};

fn finite<T: Scalar>(name: &str, a: T) -> Result<T> {
    if a.is_finite() {
        Ok(a)
    } else {
        Err(Error::domain(format!("{name} must be finite, got {a}")))
    }
}

/// `sign(a)` with `sign(0) = 0`.
#[inline]
pub fn sign<T: Scalar>(a: T) -> T {
    if a > T::zero() {
        T::one()
    } else if a < T::zero() {
        -T::one()
    } else {
        // zero, or NaN which propagates
        a
    }
}

#[inline]
pub(crate) fn signed_power_unchecked<T: Scalar>(a: T, theta: T) -> T {
    if a > T::zero() {
        a.powf(theta)
    } else if a < T::zero() {
        -(-a).powf(theta)
    } else {
        T::zero()
    }
}

/// Signed power `⌊a⌉^θ = |a|^θ·sign(a)`.
pub fn signed_power<T: Scalar>(a: T, theta: T) -> Result<T> {
    finite("a", a)?;
    finite("theta", theta)?;
    if theta <= T::zero() {
        return Err(Error::domain(format!("exponent must be positive, got {theta}")));
    }
    Ok(signed_power_unchecked(a, theta))
}

/// Saturation `σ(a) = a / max(1, |a|)`.
pub fn saturate<T: Scalar>(a: T) -> Result<T> {
    finite("a", a)?;
    Ok(saturate_unchecked(a))
}

#[inline]
pub(crate) fn saturate_unchecked<T: Scalar>(a: T) -> T {
    a / T::one().max(a.abs())
}

/// Blending ramp `ν_ε(a) = 1/2 + σ((|a| − 3ε/4)/(ε/4))/2`: zero below `ε/2`,
/// one above `ε`, affine in between.
pub fn nu_epsilon<T: Scalar>(a: T, epsilon: T) -> Result<T> {
    finite("a", a)?;
    finite("epsilon", epsilon)?;
    if epsilon <= T::zero() {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(nu_epsilon_unchecked(a, epsilon))
}

#[inline]
pub(crate) fn nu_epsilon_unchecked<T: Scalar>(a: T, epsilon: T) -> T {
    let half = T::lit(0.5);
    let arg = (a.abs() - T::lit(0.75) * epsilon) / (T::lit(0.25) * epsilon);
    half + half * saturate_unchecked(arg)
}

/// Dilation weights `p_i = 1 + (i−1)·k` for `i = 1..r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationWeights<T> {
    weights: Vec<T>,
    k_hom: T,
}

impl<T: Scalar> DilationWeights<T> {
    /// Weights of order `r` for homogeneity parameter `k_hom`. Fails if any
    /// weight is not strictly positive.
    pub fn new(order: usize, k_hom: T) -> Result<Self> {
        finite("k_hom", k_hom)?;
        if order == 0 {
            return Err(Error::domain("order must be at least 1"));
        }
        let weights: Vec<T> = (0..order)
            .map(|i| T::one() + T::from_usize(i).unwrap() * k_hom)
            .collect();
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| **w <= T::zero()) {
            return Err(Error::domain(format!(
                "dilation weight p_{} = {w} is not positive (k_hom = {k_hom})",
                i + 1
            )));
        }
        Ok(Self { weights, k_hom })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn k_hom(&self) -> T {
        self.k_hom
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }
}

/// `z ↦ (λ^{p_1}·z_1, …, λ^{p_r}·z_r)`.
pub fn dilate<T: Scalar>(z: &[T], lambda: T, w: &DilationWeights<T>) -> Result<Vec<T>> {
    check_len(w.order(), z.len())?;
    finite("lambda", lambda)?;
    if lambda <= T::zero() {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    if !all_finite(z) {
        return Err(Error::domain("state must be finite"));
    }
    Ok(z.iter()
        .zip(&w.weights)
        .map(|(&zi, &p)| lambda.powf(p) * zi)
        .collect())
}
