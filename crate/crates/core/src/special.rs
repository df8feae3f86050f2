//! Finite-series special functions needed by the closed-form solution.
//!
//! * [`laguerre`]: `L_k(x) = Σ_{m=0}^{k} (-x)^m/(m!)² · k!/(k-m)!`
//! * [`laguerre_d1`]: the derivative `dL_k/dx`, which is what the kick
//!   terms of the solution call the associated polynomial `L_k^{(1)}`.
//!   Note this differs from the generalized Laguerre `L_k^{(1)}` of most
//!   libraries: `dL_k/dx = -L_{k-1}^{(1)}` in that convention.
//! * [`gamma_upper_int`]: `Γ(m+1, z)` for integer order and complex `z`.
//! * [`expm1_ratio`]: `(e^x - 1)/x` with the removable singularity filled in.

use num_complex::Complex;

use crate::real::{cabs, cexp, Real};
use crate::sum::{CompensatedSum, ComplexSum};

/// Laguerre polynomial `L_k(x)`, by the three-term recurrence.
pub fn laguerre<R: Real>(k: usize, x: R) -> R {
    laguerre_recurrence(k, x)
}

/// Explicit finite sum, compensated. Alternating terms make this lose
/// digits once `x` is a few units large; kept as an independent path.
pub fn laguerre_series<R: Real>(k: usize, x: R) -> R {
    let mut acc = CompensatedSum::new();
    let mut term = R::one();
    acc.add(term);
    for m in 1..=k {
        let num = R::from_i64((k - m + 1) as i64);
        let den = R::from_i64((m * m) as i64);
        term = -(term * x * num / den);
        acc.add(term);
    }
    acc.value()
}

/// `(j+1) L_{j+1} = (2j+1-x) L_j - j L_{j-1}`, forward-stable for `x >= 0`.
pub fn laguerre_recurrence<R: Real>(k: usize, x: R) -> R {
    laguerre_pair_recurrence(k, x).0
}

/// Returns `(L_k(x), L_k'(x))` via the recurrence and its derivative.
fn laguerre_pair_recurrence<R: Real>(k: usize, x: R) -> (R, R) {
    let one = R::one();
    if k == 0 {
        return (one, R::zero());
    }
    let (mut l_prev, mut l_cur) = (one, one - x);
    let (mut d_prev, mut d_cur) = (R::zero(), -one);
    for j in 1..k {
        let jr = R::from_i64(j as i64);
        let a = jr + jr + one - x;
        let inv = one / (jr + one);
        let l_next = (a * l_cur - jr * l_prev) * inv;
        let d_next = (a * d_cur - l_cur - jr * d_prev) * inv;
        l_prev = l_cur;
        l_cur = l_next;
        d_prev = d_cur;
        d_cur = d_next;
    }
    (l_cur, d_cur)
}

/// `dL_k/dx`, by the differentiated recurrence. Returns 0 for `k = 0`.
pub fn laguerre_d1<R: Real>(k: usize, x: R) -> R {
    laguerre_d1_recurrence(k, x)
}

/// Term-by-term derivative of the explicit sum.
pub fn laguerre_d1_series<R: Real>(k: usize, x: R) -> R {
    if k == 0 {
        return R::zero();
    }
    let mut acc = CompensatedSum::new();
    let mut term = -R::from_i64(k as i64);
    acc.add(term);
    for m in 2..=k {
        let num = R::from_i64((k - m + 1) as i64);
        let den = R::from_i64((m * (m - 1)) as i64);
        term = -(term * x * num / den);
        acc.add(term);
    }
    acc.value()
}

/// `(j+1) L'_{j+1} = (2j+1-x) L'_j - L_j - j L'_{j-1}`.
pub fn laguerre_d1_recurrence<R: Real>(k: usize, x: R) -> R {
    laguerre_pair_recurrence(k, x).1
}

/// Upper incomplete gamma `Γ(m+1, z) = m! e^{-z} Σ_{j=0}^{m} z^j/j!`,
/// exact for integer order and any complex `z`.
pub fn gamma_upper_int<R: Real>(m: usize, z: Complex<R>) -> Complex<R> {
    let mut acc = ComplexSum::new();
    let mut term = Complex::new(R::one(), R::zero());
    acc.add(term);
    let mut fact = R::one();
    for j in 1..=m {
        let jr = R::from_i64(j as i64);
        term = term * z / jr;
        fact *= jr;
        acc.add(term);
    }
    cexp(-z) * acc.value() * fact
}

/// Fills `out[j] = Γ(j+1, z)/j!` for `j = 0..out.len()`, given `e^{-z}`.
pub fn gamma_upper_reg_seq<R: Real>(z: Complex<R>, exp_neg_z: Complex<R>, out: &mut [Complex<R>]) {
    let mut acc = ComplexSum::new();
    let mut term = Complex::new(R::one(), R::zero());
    for (j, slot) in out.iter_mut().enumerate() {
        if j > 0 {
            term = term * z / R::from_i64(j as i64);
        }
        acc.add(term);
        *slot = exp_neg_z * acc.value();
    }
}

/// Fills `out[j] = 1 - Γ(j+1, z)/j!` (the regularized lower incomplete
/// gamma) for `j = 0..out.len()`, given `e^{-z}`.
///
/// Uses the convergent tail `e^{-z} Σ_{i>j} z^i/i!` where that series is
/// well conditioned, and the complement of the finite sum elsewhere.
pub fn gamma_lower_reg_seq<R: Real>(z: Complex<R>, exp_neg_z: Complex<R>, out: &mut [Complex<R>]) {
    if out.is_empty() {
        return;
    }
    let r = cabs(z).to_f64();
    let growth = r - z.re.to_f64();
    if r == 0.0 {
        out.iter_mut()
            .for_each(|v| *v = Complex::new(R::zero(), R::zero()));
        return;
    }
    if r <= 1.0 || (growth <= 8.0 && r <= 100.0) {
        let m_max = out.len() - 1;
        // out[j] <- z^j/j! for now; overwritten on the way back down.
        let mut power = Complex::new(R::one(), R::zero());
        out[0] = power;
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            power = power * z / R::from_i64(i as i64);
            *slot = power;
        }
        let eps = R::EPSILON;
        let mut tail = ComplexSum::new();
        let mut term = power;
        let mut i = m_max;
        loop {
            i += 1;
            term = term * z / R::from_i64(i as i64);
            tail.add(term);
            let t = cabs(term).to_f64();
            let s = cabs(tail.value()).to_f64();
            if (i as f64 > r && t <= eps * s) || t == 0.0 || i > m_max + 2000 {
                break;
            }
        }
        // tail_{j-1} = tail_j + z^j/j!
        let mut t = tail.value();
        for j in (0..=m_max).rev() {
            let pj = out[j];
            out[j] = exp_neg_z * t;
            t = t + pj;
        }
    } else {
        let one = Complex::new(R::one(), R::zero());
        gamma_upper_reg_seq(z, exp_neg_z, out);
        for v in out.iter_mut() {
            *v = one - *v;
        }
    }
}

/// `(e^x - 1)/x`, equal to 1 at `x = 0` and uniformly accurate near it.
pub fn expm1_ratio<R: Real>(x: Complex<R>) -> Complex<R> {
    let r = cabs(x).to_f64();
    if r < 0.5 {
        let eps = R::EPSILON;
        let mut acc = ComplexSum::new();
        let mut term = Complex::new(R::one(), R::zero());
        acc.add(term);
        let mut n = 1i64;
        loop {
            n += 1;
            term = term * x / R::from_i64(n);
            acc.add(term);
            if cabs(term).to_f64() <= eps * 0.25 || n > 80 {
                break;
            }
        }
        acc.value()
    } else {
        let (s, c) = x.im.sin_cos();
        let (sh, _) = (x.im / R::from_f64(2.0)).sin_cos();
        let em1 = x.re.exp_m1();
        let two = R::from_f64(2.0);
        let re = em1 * c - two * sh * sh;
        let im = x.re.exp() * s;
        Complex::new(re, im) / x
    }
}
