//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spow(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a.abs().powf(t).copysign(a)
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Direction uniform on the sphere, magnitude log-uniform in `[1e-2, 10]`.
pub fn random_state(rng: &mut ChaCha8Rng, r: usize) -> Vec<f64> {
    let d: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let m = 10f64.powf(rng.random_range(-2.0..1.0));
    d.iter().map(|x| x / n * m).collect()
}

/// Exponent tables written out from their definitions.
pub struct Tables {
    pub p: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

pub fn tables(r: usize, k: f64) -> Tables {
    // p[i-1] = p_i, i = 1..r+1
    let p: Vec<f64> = (1..=r + 1).map(|i| 1.0 + (i as f64 - 1.0) * k).collect();
    let alpha = (1..=r).map(|i| p[i] / p[i - 1]).collect();
    let b0 = p[1];
    let beta = (0..r).map(|i| if i == 0 { b0 } else { (b0 + 1.0) / p[i] - 1.0 }).collect();
    Tables { p, alpha, beta }
}

/// Virtual controls `v_0..v_r` of Hong's law.
pub fn hong_controls(z: &[f64], l: &[f64], k: f64) -> Vec<f64> {
    let r = z.len();
    let t = tables(r, k);
    let mut v = vec![0.0];
    for i in 0..r {
        let b = t.beta[i];
        let inner = spow(z[i], b) - spow(v[i], b);
        v.push(-l[i] * spow(inner, t.alpha[i] / b));
    }
    v
}

/// Simplified law with the exponents `(1+(i+2)k)/(1+(i+1)k)`, `i = 0..r-1`.
pub fn simplified_u0(z: &[f64], l: &[f64], k: f64) -> f64 {
    let mut v = 0.0;
    for i in 0..z.len() {
        let e = (1.0 + (i as f64 + 2.0) * k) / (1.0 + (i as f64 + 1.0) * k);
        v = -l[i] * spow(z[i] - v, e);
    }
    v
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation).
pub fn quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // split at the origin where |s|^β is not smooth
    let pieces: Vec<(f64, f64)> = if lo < 0.0 && hi > 0.0 { vec![(lo, 0.0), (0.0, hi)] } else { vec![(lo, hi)] };
    let mut total = 0.0;
    for (x, y) in pieces {
        let (fx, fm, fy) = (f(x), f(0.5 * (x + y)), f(y));
        let whole = simpson(x, y, fx, fm, fy);
        total += adapt(f, x, y, fx, fm, fy, whole, tol, 50);
    }
    sign * total
}

/// `V1` as the sum of the defining integrals, each evaluated numerically.
pub fn v1_quadrature(z: &[f64], l: &[f64], k: f64) -> f64 {
    let t = tables(z.len(), k);
    let v = hong_controls(z, l, k);
    (0..z.len())
        .map(|j| {
            let b = t.beta[j];
            let vj = v[j];
            let scale = z[j].abs().max(vj.abs()).max(1e-300);
            let f = move |s: f64| spow(s, b) - spow(vj, b);
            quad(&f, vj, z[j], 1e-14 * scale.powf(b + 1.0).max(1e-300))
        })
        .sum()
}

/// Root-sign Hurwitz oracle: eigenvalues of the companion matrix. `None`
/// when the rightmost root lies within `margin` of the imaginary axis.
pub fn hurwitz_by_roots(coeffs: &[f64], margin: f64) -> Option<bool> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(true);
    }
    let a0 = coeffs[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[j + 1] / a0;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let eig = m.complex_eigenvalues();
    let max_re = eig.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re.abs() < margin {
        None
    } else {
        Some(max_re < 0.0)
    }
}

/// Monic polynomial from roots, highest power first, by direct expansion.
pub fn poly(roots: &[num_complex::Complex64]) -> Vec<f64> {
    let mut c = vec![num_complex::Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![num_complex::Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        c = next;
    }
    c.iter().map(|x| x.re).collect()
}

/// Conjugate-closed random roots with real parts in `[-3, -0.1]`.
pub fn random_stable_roots(rng: &mut ChaCha8Rng, degree: usize) -> Vec<num_complex::Complex64> {
    use num_complex::Complex64;
    let mut roots = Vec::new();
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

pub fn dilate(z: &[f64], lam: f64, weights: &[f64]) -> Vec<f64> {
    z.iter().zip(weights).map(|(x, w)| lam.powf(*w) * x).collect()
}
