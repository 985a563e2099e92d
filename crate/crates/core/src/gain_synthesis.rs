//! Gains `l_1..l_r` whose nested polynomial
//! `y^r + l_r(y^{r−1} + l_{r−1}(… + l_2(y + l_1)))` is Hurwitz.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pivot magnitude below which the Routh array is considered degenerate.
pub const ROUTH_PIVOT_TOL: f64 = 1e-12;

/// Running products below this are treated as unrecoverable gains.
pub const DEGENERATE_PRODUCT_TOL: f64 = 1e-12;

/// Positive gains with a Hurwitz nested polynomial. Stored as `l_1..l_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector<T> {
    l: Vec<T>,
}

impl<T: Scalar> GainVector<T> {
    pub fn new(l: Vec<T>) -> Result<Self> {
        if l.is_empty() {
            return Err(Error::domain("gain vector is empty"));
        }
        for (i, &g) in l.iter().enumerate() {
            if !g.is_finite() || g <= T::zero() {
                return Err(Error::domain(format!("gain l_{} = {g} must be positive and finite", i + 1)));
            }
        }
        let coeffs = expand_nested(&l)?;
        if !is_hurwitz(&coeffs)? {
            return Err(Error::NotHurwitz(format!("nested polynomial of gains {l:?}")));
        }
        Ok(Self { l })
    }

    /// Gains placing every root of the nested polynomial at `root` (< 0).
    pub fn repeated_root(order: usize, root: T) -> Result<Self> {
        gains_from_roots(&vec![Complex::new(root, T::zero()); order])
    }

    /// Default preset: distinct real roots `−1, −2, …, −r`.
    pub fn preset(order: usize) -> Result<Self> {
        let roots: Vec<_> = (1..=order)
            .map(|i| Complex::new(-T::from_usize(i).unwrap(), T::zero()))
            .collect();
        gains_from_roots(&roots)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.l
    }

    pub fn order(&self) -> usize {
        self.l.len()
    }

    /// `l_i` with 1-based index.
    pub fn get(&self, i: usize) -> T {
        self.l[i - 1]
    }

    pub fn into_vec(self) -> Vec<T> {
        self.l
    }
}

/// Monic coefficients (descending powers) of the nested polynomial.
///
/// The coefficient of `y^{r−1−j}` is `l_r·l_{r−1}·…·l_{r−j}`. Gains are not
/// required to be positive here so that corrupted vectors can be inspected.
pub fn expand_nested<T: Scalar>(l: &[T]) -> Result<Vec<T>> {
    if l.is_empty() {
        return Err(Error::domain("gain vector is empty"));
    }
    let mut coeffs = Vec::with_capacity(l.len() + 1);
    coeffs.push(T::one());
    let mut prod = T::one();
    for &g in l.iter().rev() {
        prod = prod * g;
        coeffs.push(prod);
    }
    Ok(coeffs)
}

/// Monic real polynomial with the given (conjugate-closed) roots.
pub fn poly_from_roots<T: Scalar>(roots: &[Complex<T>]) -> Vec<T> {
    let mut c = vec![Complex::new(T::one(), T::zero())];
    for &root in roots {
        let mut next = vec![Complex::new(T::zero(), T::zero()); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] = next[i] + ci;
            next[i + 1] = next[i + 1] - ci * root;
        }
        c = next;
    }
    c.into_iter().map(|x| x.re).collect()
}

fn check_conjugate_closed<T: Scalar>(roots: &[Complex<T>]) -> Result<()> {
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = roots[i];
        let tol = T::lit(1e-9) * T::one().max(z.norm());
        if z.im.abs() <= tol {
            continue;
        }
        let partner = (0..roots.len()).find(|&j| !used[j] && (roots[j] - z.conj()).norm() <= tol);
        match partner {
            Some(j) => used[j] = true,
            None => {
                return Err(Error::domain(format!(
                    "root {z} has no conjugate partner"
                )))
            }
        }
    }
    Ok(())
}

/// Back-solves the nested gains from a desired set of closed-loop roots.
///
/// The coefficient of `y^{r−1}` fixes `l_r`; each following coefficient
/// divided by the running product fixes the next gain.
pub fn gains_from_roots<T: Scalar>(roots: &[Complex<T>]) -> Result<GainVector<T>> {
    if roots.is_empty() {
        return Err(Error::domain("no roots given"));
    }
    if roots.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("roots must be finite"));
    }
    check_conjugate_closed(roots)?;
    if let Some(z) = roots.iter().find(|z| z.re >= T::zero()) {
        return Err(Error::NotHurwitz(format!("root {z} is not in the open left half-plane")));
    }

    let coeffs = poly_from_roots(roots);
    let r = roots.len();
    let mut l = vec![T::zero(); r];
    let mut prod = T::one();
    for j in 1..=r {
        if prod.abs() < T::lit(DEGENERATE_PRODUCT_TOL) {
            return Err(Error::DegenerateRoots(format!(
                "running product {prod} vanishes before l_{}",
                r - j + 1
            )));
        }
        let g = coeffs[j] / prod;
        if g <= T::zero() {
            return Err(Error::DegenerateRoots(format!("implied gain l_{} = {g} is not positive", r - j + 1)));
        }
        l[r - j] = g;
        prod = prod * g;
    }
    GainVector::new(l)
}

/// Routh–Hurwitz test: true iff every root has strictly negative real part.
///
/// Coefficients are in descending powers. A first-column pivot below
/// [`ROUTH_PIVOT_TOL`] (after normalizing the leading coefficient to one)
/// counts as failure.
pub fn is_hurwitz<T: Scalar>(coeffs: &[T]) -> Result<bool> {
    if coeffs.len() < 2 {
        return Err(Error::domain("polynomial degree must be at least 1"));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("coefficients must be finite"));
    }
    let lead = coeffs[0];
    if lead == T::zero() {
        return Err(Error::domain("leading coefficient is zero"));
    }
    let c: Vec<T> = coeffs.iter().map(|&x| x / lead).collect();
    let n = c.len() - 1;
    let width = n / 2 + 1;
    let row = |start: usize| -> Vec<T> {
        (0..width)
            .map(|j| c.get(start + 2 * j).copied().unwrap_or_else(T::zero))
            .collect()
    };
    let tol = T::lit(ROUTH_PIVOT_TOL);
    let mut prev = row(0);
    let mut cur = row(1);
    if cur[0] <= tol {
        return Ok(false);
    }
    for _ in 2..=n {
        let mut next = vec![T::zero(); width];
        for j in 0..width - 1 {
            next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
        }
        if next[0] <= tol {
            return Ok(false);
        }
        prev = cur;
        cur = next;
    }
    Ok(true)
}
