//! Closed-form propagation of arbitrary initial data.
//!
//! With `κ_n = πW²/Δ + i(Δg - nΔ)`, `s_k = γ(T - k)` and `rot(x) = e^{-2πix}`,
//! the amplitudes at rescaled time `T` are finite sums over the active kicks
//! `k = 1..=floor(T)` and the populated initial levels `l`. The pieces that
//! share a kick index are grouped so that every group vanishes at `T = k`:
//!
//! ```text
//! b(T) = b0 e^{-κ0 γT}
//!      + b0 α Σ_k (s_k/k) L'_k(α s_k) e^{-κ0 s_k}
//!      + iW Σ_l c_l κ_l⁻¹ [e^{-κ0 γT} - rot(lT)]
//!      + iWα Σ_l c_l rot(lT) κ_l⁻² Σ_k Σ_{j<k} C(k-1, j) (-α/κ_l)^j P(j+2, κ_l s_k)
//! ```
//!
//! where `P` is the regularized lower incomplete gamma function. The last
//! line is the Γ-sum kick term plus the geometric `(κ_l - α)^{k-1}` term,
//! combined. The ladder amplitudes `c_n(T)` are grouped the same way.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::model::{derive_params, InitialState, ModelParams, StateVector};
use crate::real::{cexp, from_c64, rot, to_c64, Precision, Real};
use crate::special::{expm1_ratio, gamma_lower_reg_seq, laguerre_d1, laguerre_d1_series};
use crate::sum::{CompensatedSum, ComplexSum};

/// Sign applied to `L'_k` in the survival kick term. [`Negated`] exists only
/// as a negative control for validation runs.
///
/// [`Negated`]: LaguerreConvention::Negated
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LaguerreConvention {
    #[default]
    Derivative,
    Negated,
}

/// Decay rates `κ_n` and their shifted form `κ̃_{l,n} = κ_l + i(l - n)Δ`.
#[derive(Clone, Copy, Debug)]
pub struct KappaTable<R: Real = f64> {
    re: R,
    delta_g: R,
    delta: R,
}

impl<R: Real> KappaTable<R> {
    pub fn new(p: &ModelParams) -> Self {
        let pi = R::pi();
        let w = R::from_f64(p.w);
        let delta = R::from_f64(p.delta);
        Self {
            re: pi * w * w / delta,
            delta_g: R::from_f64(p.delta_g),
            delta,
        }
    }

    #[inline]
    pub fn kappa(&self, n: i64) -> Complex<R> {
        Complex::new(self.re, self.delta_g - R::from_i64(n) * self.delta)
    }

    #[inline]
    pub fn kappa_tilde(&self, l: i64, n: i64) -> Complex<R> {
        let k = self.kappa(l);
        Complex::new(k.re, k.im + R::from_i64(l - n) * self.delta)
    }
}

/// Evaluates `b(T)` and `c_n(T)` in the scalar type `R`.
#[derive(Clone, Debug)]
pub struct AnalyticSolver<R: Real = f64> {
    params: ModelParams,
    alpha: R,
    gamma: R,
    w: R,
    delta_g: R,
    kappa: KappaTable<R>,
    convention: LaguerreConvention,
}

impl<R: Real> AnalyticSolver<R> {
    pub fn new(p: &ModelParams) -> Result<Self> {
        derive_params(p)?;
        let pi = R::pi();
        let w = R::from_f64(p.w);
        let delta = R::from_f64(p.delta);
        let two = R::from_f64(2.0);
        Ok(Self {
            params: *p,
            alpha: two * pi * w * w / delta,
            gamma: two * pi / delta,
            w,
            delta_g: R::from_f64(p.delta_g),
            kappa: KappaTable::new(p),
            convention: LaguerreConvention::Derivative,
        })
    }

    pub fn with_convention(mut self, convention: LaguerreConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn kappa_table(&self) -> &KappaTable<R> {
        &self.kappa
    }

    fn decoupled(&self) -> bool {
        self.params.w == 0.0
    }

    /// Survival amplitude `b(T)`.
    pub fn b(&self, init: &InitialState, t: f64) -> Result<Complex64> {
        let kicks = self.params.check_time(t)?;
        Ok(to_c64(self.b_raw(init, R::from_f64(t), kicks)))
    }

    /// Ladder amplitude `c_n(T)`.
    pub fn c(&self, init: &InitialState, n: i64, t: f64) -> Result<Complex64> {
        let kicks = self.params.check_time(t)?;
        let t = R::from_f64(t);
        let decay0 = cexp(-self.kappa.kappa(0) * self.gamma * t);
        let e0 = self.kick_decays(t, kicks);
        Ok(to_c64(self.c_raw(init, n, t, decay0, &e0)))
    }

    /// All amplitudes over the parameter window at `T`.
    pub fn state(&self, init: &InitialState, t: f64) -> Result<StateVector> {
        let window = self.params.window();
        init.check_support(&window)?;
        let kicks = self.params.check_time(t)?;
        let tr = R::from_f64(t);
        let b = to_c64(self.b_raw(init, tr, kicks));
        let decay0 = cexp(-self.kappa.kappa(0) * self.gamma * tr);
        let e0 = self.kick_decays(tr, kicks);
        let c = window
            .levels()
            .into_par_iter()
            .map(|n| to_c64(self.c_raw(init, n, tr, decay0, &e0)))
            .collect();
        Ok(StateVector { t, b, window, c })
    }

    /// `e^{-κ0 s_k}` for `k = 1..=kicks` (index `k - 1`).
    fn kick_decays(&self, t: R, kicks: usize) -> Vec<Complex<R>> {
        let k0 = self.kappa.kappa(0);
        (1..=kicks)
            .map(|k| cexp(-k0 * (self.gamma * (t - R::from_i64(k as i64)))))
            .collect()
    }

    fn b_raw(&self, init: &InitialState, t: R, kicks: usize) -> Complex<R> {
        let zero = Complex::new(R::zero(), R::zero());
        let i = Complex::new(R::zero(), R::one());
        let b0: Complex<R> = from_c64(init.b0());
        if self.decoupled() {
            let ph = cexp(Complex::new(R::zero(), -self.delta_g * self.gamma * t));
            return b0 * ph;
        }
        let k0 = self.kappa.kappa(0);
        let decay0 = cexp(-k0 * self.gamma * t);
        let mut acc = ComplexSum::new();
        acc.add(b0 * decay0);

        if b0 != zero {
            let sign = match self.convention {
                LaguerreConvention::Derivative => R::one(),
                LaguerreConvention::Negated => -R::one(),
            };
            for k in 1..=kicks {
                let s = self.gamma * (t - R::from_i64(k as i64));
                let lag = laguerre_d1(k, self.alpha * s) * sign;
                let coef = self.alpha / R::from_i64(k as i64) * s * lag;
                acc.add(b0 * cexp(-k0 * s) * coef);
            }
        }

        if !init.c0().is_empty() {
            let e0 = self.kick_decays(t, kicks);
            let mut buf = Vec::new();
            let mut ladder = ComplexSum::new();
            for &(l, cl) in init.c0() {
                let cl: Complex<R> = from_c64(cl);
                let kl = self.kappa.kappa(l);
                let inv = kl.inv();
                let ph = rot(R::from_i64(l) * t);
                let mut part = ComplexSum::new();
                part.add(inv * (decay0 - ph));
                if kicks > 0 {
                    self.fill_lower_gamma(kl, ph, t, &e0, &mut buf);
                    let kick = self.kick_sum(kl, &buf, kicks);
                    part.add(ph * kick * self.alpha * inv * inv);
                }
                ladder.add(cl * part.value());
            }
            acc.add(i * self.w * ladder.value());
        }
        acc.value()
    }

    /// Row `k - 1` (stride `kicks + 1`) receives `P(j+1, κ s_k)` for
    /// `j = 0..=k`. `rot_t = rot(mT)` for `κ = κ_m` turns the shared
    /// `e^{-κ0 s_k}` into `e^{-κ s_k}`.
    fn fill_lower_gamma(
        &self,
        kappa: Complex<R>,
        rot_t: Complex<R>,
        t: R,
        e0: &[Complex<R>],
        buf: &mut Vec<Complex<R>>,
    ) {
        let kicks = e0.len();
        let stride = kicks + 1;
        buf.clear();
        buf.resize(kicks * stride, Complex::new(R::zero(), R::zero()));
        let back = rot_t.conj();
        for (idx, &ek) in e0.iter().enumerate() {
            let k = idx + 1;
            let s = self.gamma * (t - R::from_i64(k as i64));
            let row = &mut buf[idx * stride..idx * stride + k + 1];
            gamma_lower_reg_seq(kappa * s, ek * back, row);
        }
    }

    /// `Σ_k Σ_{j<k} C(k-1, j) (-α/κ)^j P(j+2, κ s_k)` from a filled table.
    fn kick_sum(&self, kappa: Complex<R>, table: &[Complex<R>], kicks: usize) -> Complex<R> {
        let ratio = -(kappa.inv() * self.alpha);
        let stride = kicks + 1;
        let mut total = ComplexSum::new();
        for k in 1..=kicks {
            let row = &table[(k - 1) * stride..];
            let mut binom = R::one();
            let mut pow = Complex::new(R::one(), R::zero());
            let mut terms = ComplexSum::new();
            for j in 0..k {
                terms.add(pow * binom * row[j + 1]);
                pow = pow * ratio;
                binom = binom * R::from_i64((k - 1 - j) as i64) / R::from_i64(j as i64 + 1);
            }
            total.add(terms.value());
        }
        total.value()
    }

    fn c_raw(
        &self,
        init: &InitialState,
        n: i64,
        t: R,
        decay0: Complex<R>,
        e0: &[Complex<R>],
    ) -> Complex<R> {
        let zero = Complex::new(R::zero(), R::zero());
        let i = Complex::new(R::zero(), R::one());
        let kicks = e0.len();
        let rn = rot(R::from_i64(n) * t);
        let cn0: Complex<R> = from_c64(init.c0_at(n));
        if self.decoupled() {
            return rn * cn0;
        }
        let b0: Complex<R> = from_c64(init.b0());
        let kn = self.kappa.kappa(n);
        let inv_n = kn.inv();
        let mut table = Vec::new();
        if kicks > 0 {
            self.fill_lower_gamma(kn, rn, t, e0, &mut table);
        }
        let stride = kicks + 1;
        let mut acc = ComplexSum::new();

        if b0 != zero {
            let mut part = ComplexSum::new();
            part.add(-inv_n * (rn - decay0));
            if kicks > 0 {
                let kick = self.kick_sum(kn, &table, kicks);
                part.add(rn * kick * self.alpha * inv_n * inv_n);
            }
            acc.add(i * self.w * b0 * part.value());
        }

        let w2 = self.w * self.w;
        for &(l, cl) in init.c0() {
            let cl: Complex<R> = from_c64(cl);
            let kl = self.kappa.kappa(l);
            let inv_l = kl.inv();
            let dl = R::from_i64(l - n);
            let mut part = ComplexSum::new();
            part.add(-rn * phase_ratio(dl * t) * self.gamma * t);
            part.add(inv_n * (rn - decay0));
            let mut kicks_part = ComplexSum::new();
            for k in 1..=kicks {
                let row = &table[(k - 1) * stride..];
                let kr = R::from_i64(k as i64);
                let s = self.gamma * (t - kr);
                // Σ_m C(k-1, m-1) (-α)^m κ_l^{-m-1} Σ_{j<=m} κ_l^j κ_n^{-j-1} P(j+1, ·)
                let mut binom = R::one();
                let mut lead = -(inv_l * inv_l * self.alpha);
                for m in 1..=k {
                    let mut inner = ComplexSum::new();
                    let mut f = inv_n;
                    for &pj in row.iter().take(m + 1) {
                        inner.add(f * pj);
                        f = f * kl * inv_n;
                    }
                    kicks_part.add(lead * inner.value() * binom);
                    lead = lead * -(inv_l * self.alpha);
                    binom = binom * R::from_i64((k - m) as i64) / R::from_i64(m as i64);
                }
                // α (κ_l - α)^{k-1} κ_l^{-k-1} s_k E((l-n)(T-k))
                let geo = pow_usize((kl - self.alpha) * inv_l, k - 1) * inv_l * inv_l;
                kicks_part.add(geo * phase_ratio(dl * (t - kr)) * s * self.alpha);
            }
            acc.add(cl * (inv_l * part.value() + rn * kicks_part.value()) * w2);
        }
        acc.add(rn * cn0);
        acc.value()
    }
}

fn pow_usize<R: Real>(z: Complex<R>, e: usize) -> Complex<R> {
    (0..e).fold(Complex::new(R::one(), R::zero()), |acc, _| acc * z)
}

/// `(e^{-2πix} - 1)/(-2πix)`, equal to 1 at `x = 0`.
fn phase_ratio<R: Real>(x: R) -> Complex<R> {
    let two_pi = R::pi() + R::pi();
    let arg = Complex::new(R::zero(), -(two_pi * x));
    if (two_pi * x).abs().to_f64() < 0.5 {
        expm1_ratio(arg)
    } else {
        (rot(x) - Complex::new(R::one(), R::zero())) / arg
    }
}

/// Anything that can propagate an [`InitialState`] to rescaled time `T`.
pub trait Propagator: Sync {
    fn params(&self) -> &ModelParams;
    fn b(&self, init: &InitialState, t: f64) -> Result<Complex64>;
    fn c(&self, init: &InitialState, n: i64, t: f64) -> Result<Complex64>;
    fn state(&self, init: &InitialState, t: f64) -> Result<StateVector>;
}

impl<R: Real> Propagator for AnalyticSolver<R> {
    fn params(&self) -> &ModelParams {
        AnalyticSolver::params(self)
    }
    fn b(&self, init: &InitialState, t: f64) -> Result<Complex64> {
        AnalyticSolver::b(self, init, t)
    }
    fn c(&self, init: &InitialState, n: i64, t: f64) -> Result<Complex64> {
        AnalyticSolver::c(self, init, n, t)
    }
    fn state(&self, init: &InitialState, t: f64) -> Result<StateVector> {
        AnalyticSolver::state(self, init, t)
    }
}

/// Analytic solver with the scalar type chosen at run time.
#[derive(Clone, Debug)]
pub enum Solver {
    Double(AnalyticSolver<f64>),
    Extended(AnalyticSolver<DoubleDouble>),
}

impl Solver {
    pub fn new(p: &ModelParams, precision: Precision) -> Result<Self> {
        Ok(match precision {
            Precision::Double => Solver::Double(AnalyticSolver::new(p)?),
            Precision::Extended => Solver::Extended(AnalyticSolver::new(p)?),
        })
    }

    pub fn with_convention(self, convention: LaguerreConvention) -> Self {
        match self {
            Solver::Double(s) => Solver::Double(s.with_convention(convention)),
            Solver::Extended(s) => Solver::Extended(s.with_convention(convention)),
        }
    }

    pub fn precision(&self) -> Precision {
        match self {
            Solver::Double(_) => Precision::Double,
            Solver::Extended(_) => Precision::Extended,
        }
    }
}

impl Propagator for Solver {
    fn params(&self) -> &ModelParams {
        match self {
            Solver::Double(s) => s.params(),
            Solver::Extended(s) => s.params(),
        }
    }
    fn b(&self, init: &InitialState, t: f64) -> Result<Complex64> {
        match self {
            Solver::Double(s) => s.b(init, t),
            Solver::Extended(s) => s.b(init, t),
        }
    }
    fn c(&self, init: &InitialState, n: i64, t: f64) -> Result<Complex64> {
        match self {
            Solver::Double(s) => s.c(init, n, t),
            Solver::Extended(s) => s.c(init, n, t),
        }
    }
    fn state(&self, init: &InitialState, t: f64) -> Result<StateVector> {
        match self {
            Solver::Double(s) => s.state(init, t),
            Solver::Extended(s) => s.state(init, t),
        }
    }
}

/// `b(T)` in double precision.
pub fn b_general(p: &ModelParams, init: &InitialState, t: f64) -> Result<Complex64> {
    AnalyticSolver::<f64>::new(p)?.b(init, t)
}

/// `c_n(T)` in double precision.
pub fn c_general(p: &ModelParams, init: &InitialState, n: i64, t: f64) -> Result<Complex64> {
    AnalyticSolver::<f64>::new(p)?.c(init, n, t)
}

/// Full state over `p.window()` at `T`.
pub fn evolve_state(p: &ModelParams, init: &InitialState, t: f64) -> Result<StateVector> {
    AnalyticSolver::<f64>::new(p)?.state(init, t)
}

/// Zero-detuning survival amplitude for a start in the single level,
/// `e^{-βT} [1 + 2β Σ_k e^{βk} (T-k)/k · L'_k(2β(T-k))]`, summed with the
/// exponentials folded together as `e^{-β(T-k)}`.
pub fn b_special_zero_detuning(p: &ModelParams, t: f64) -> Result<Complex64> {
    let d = derive_params(p)?;
    if p.delta_g != 0.0 {
        return Err(Error::NonzeroDetuning(p.delta_g));
    }
    let kicks = p.check_time(t)?;
    let beta = d.beta;
    let mut acc = CompensatedSum::new();
    acc.add((-beta * t).exp());
    for k in 1..=kicks {
        let u = t - k as f64;
        acc.add(
            2.0 * beta * u / k as f64 * laguerre_d1_series(k, 2.0 * beta * u) * (-beta * u).exp(),
        );
    }
    Ok(Complex64::new(acc.value(), 0.0))
}

fn check_first_window(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutsideFirstWindow(t));
    }
    Ok(())
}

/// `b(T) = e^{-κ0 γT}` for a start in the single level, `0 <= T <= 1`.
pub fn first_window_b(p: &ModelParams, t: f64) -> Result<Complex64> {
    let d = derive_params(p)?;
    check_first_window(t)?;
    Ok(Complex64::new(-d.beta * t, -p.delta_g * d.gamma * t).exp())
}

/// `c_n(T) = -iW κ_n⁻¹ [e^{-2πinT} - e^{-κ0 γT}]` for a start in the single
/// level, `0 <= T <= 1`.
pub fn first_window_c(p: &ModelParams, n: i64, t: f64) -> Result<Complex64> {
    let b = first_window_b(p, t)?;
    let kn = KappaTable::<f64>::new(p).kappa(n);
    Ok(Complex64::new(0.0, -p.w) / kn * (rot(n as f64 * t) - b))
}

/// Limiting ladder population `W² / [(πW²/Δ)² + (Δg - nΔ)²]`.
pub fn lorentzian_profile(p: &ModelParams, n: i64) -> f64 {
    let width = std::f64::consts::PI * p.w * p.w / p.delta;
    let detune = p.delta_g - n as f64 * p.delta;
    p.w * p.w / (width * width + detune * detune)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_upper_int;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type C = Complex64;

    fn ground_params(delta_g: f64) -> ModelParams {
        ModelParams::new(delta_g, 1.0, 0.4).with_n_max(40)
    }

    fn mixed_state() -> InitialState {
        InitialState::normalized(
            C::new(0.3, -0.2),
            [
                (-2, C::new(0.1, 0.4)),
                (0, C::new(-0.5, 0.2)),
                (3, C::new(0.25, 0.3)),
            ],
        )
        .unwrap()
    }

    fn fact(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    /// Term-by-term transcription with no regrouping: Γ-sums and the
    /// geometric kick terms are evaluated separately.
    fn literal_b(p: &ModelParams, init: &InitialState, t: f64) -> C {
        let d = derive_params(p).unwrap();
        let (a, g) = (d.alpha, d.gamma);
        let kap = |n: i64| C::new(PI * p.w * p.w / p.delta, p.delta_g - n as f64 * p.delta);
        let i = C::i();
        let b0 = init.b0();
        let mut r = b0 * (-kap(0) * g * t).exp();
        for &(l, cl) in init.c0() {
            let kl = kap(l);
            r += i * p.w * cl / kl * rot(l as f64 * t) * ((-kl * g * t).exp() - 1.0);
        }
        for k in 1..=(t.floor() as usize) {
            let s = g * (t - k as f64);
            r += b0 * a / k as f64 * s * laguerre_d1_series(k, a * s) * (-kap(0) * s).exp();
            for &(l, cl) in init.c0() {
                let kl = kap(l);
                let ph = rot(l as f64 * (t - k as f64));
                for m in 1..=k {
                    let f = fact(k - 1) / (fact(k - m) * fact(m - 1) * fact(m));
                    r += i
                        * p.w
                        * cl
                        * (-a).powi(m as i32)
                        * f
                        * ph
                        * kl.powi(-(m as i32) - 1)
                        * gamma_upper_int(m, kl * s);
                }
                r += i * p.w * a * cl * (kl - a).powi(k as i32 - 1) * kl.powi(-(k as i32) - 1) * ph;
            }
        }
        r
    }

    fn literal_c(p: &ModelParams, init: &InitialState, n: i64, t: f64) -> C {
        let d = derive_params(p).unwrap();
        let (a, g, w) = (d.alpha, d.gamma, p.w);
        let kap = |n: i64| C::new(PI * w * w / p.delta, p.delta_g - n as f64 * p.delta);
        let e = |x: f64| expm1_ratio(C::new(0.0, -2.0 * PI * x));
        let lower = |j: usize, z: C| 1.0 - gamma_upper_int(j, z) / fact(j);
        let i = C::i();
        let b0 = init.b0();
        let kn = kap(n);
        let rn = rot(n as f64 * t);
        let d0 = (-kap(0) * g * t).exp();
        let mut r = -i * w * b0 / kn * (rn - d0);
        for &(l, cl) in init.c0() {
            let kl = kap(l);
            r += w * w * cl / kl * (-g * t * rn * e((l - n) as f64 * t) + (rn - d0) / kn);
        }
        for k in 1..=(t.floor() as usize) {
            let s = g * (t - k as f64);
            r += i * w * b0 * a / (kn * kn) * (1.0 - a / kn).powi(k as i32 - 1) * rn;
            for m in 1..=k {
                let f = fact(k - 1) / (fact(k - m) * fact(m - 1) * fact(m));
                r += i
                    * w
                    * b0
                    * f
                    * (-a).powi(m as i32)
                    * kn.powi(-(m as i32) - 1)
                    * rn
                    * gamma_upper_int(m, kn * s);
            }
            for &(l, cl) in init.c0() {
                let kl = kap(l);
                for m in 1..=k {
                    let f = fact(k - 1) / (fact(k - m) * fact(m - 1));
                    let inner: C = (0..=m)
                        .map(|j| kl.powi(j as i32) * kn.powi(-(j as i32) - 1) * lower(j, kn * s))
                        .sum();
                    r += w
                        * w
                        * cl
                        * f
                        * (-a).powi(m as i32)
                        * kl.powi(-(m as i32) - 1)
                        * rn
                        * inner;
                }
                r += w
                    * w
                    * a
                    * cl
                    * (kl - a).powi(k as i32 - 1)
                    * kl.powi(-(k as i32) - 1)
                    * s
                    * rn
                    * e((l - n) as f64 * (t - k as f64));
            }
        }
        r + rn * init.c0_at(n)
    }

    #[test]
    fn initial_condition_is_reproduced() {
        let p = ground_params(0.24);
        let init = mixed_state();
        assert!((b_general(&p, &init, 0.0).unwrap() - init.b0()).norm() < 1e-15);
        for n in -4..=4 {
            let c = c_general(&p, &init, n, 0.0).unwrap();
            assert!((c - init.c0_at(n)).norm() < 1e-15, "n={n}");
        }
        let s = evolve_state(&p, &init, 0.0).unwrap();
        assert_eq!(s.c_at(3), Some(init.c0_at(3)));
    }

    #[test]
    fn half_period_ground_values() {
        let p = ground_params(0.0);
        let g = InitialState::ground();
        let b = b_general(&p, &g, 0.5).unwrap();
        // e^{-κ0 γ/2} = e^{-0.16π²}
        assert!((b - C::new(0.206_152_992_423_982_4, 0.0)).norm() < 1e-14);
        assert!((b.norm_sqr() - 0.042_499_056_285_362_54).abs() < 1e-14);
        let c0 = c_general(&p, &g, 0, 0.5).unwrap();
        assert!(
            (c0 - C::new(0.0, -0.631_723_376_572_162_4)).norm() < 1e-12,
            "{c0}"
        );
    }

    #[test]
    fn agrees_with_literal_transcription() {
        for dg in [0.0, 0.24, -0.37] {
            let p = ground_params(dg);
            for init in [InitialState::ground(), mixed_state()] {
                for &t in &[0.3, 1.0, 1.7, 2.0, 2.45, 3.9, 5.2] {
                    let b = b_general(&p, &init, t).unwrap();
                    let lb = literal_b(&p, &init, t);
                    assert!((b - lb).norm() < 1e-10, "b dg={dg} t={t}: {b} vs {lb}");
                    for n in [-6, -2, 0, 1, 3, 11] {
                        let c = c_general(&p, &init, n, t).unwrap();
                        let lc = literal_c(&p, &init, n, t);
                        assert!((c - lc).norm() < 1e-10, "c{n} dg={dg} t={t}: {c} vs {lc}");
                    }
                }
            }
        }
    }

    #[test]
    fn special_solution_matches_general_on_200_points() {
        let p = ground_params(0.0);
        let g = InitialState::ground();
        for i in 0..200 {
            let t = 8.0 * i as f64 / 199.0;
            let a = b_general(&p, &g, t).unwrap();
            let b = b_special_zero_detuning(&p, t).unwrap();
            assert!((a - b).norm() < 1e-12, "t={t}: {a} vs {b}");
        }
        assert_eq!(b_special_zero_detuning(&p, 0.0).unwrap(), C::new(1.0, 0.0));
        assert!(matches!(
            b_special_zero_detuning(&ground_params(0.1), 1.0),
            Err(Error::NonzeroDetuning(_))
        ));
    }

    #[test]
    fn first_window_matches_general() {
        for dg in [0.0, 0.12, 0.24] {
            let p = ground_params(dg);
            let d = derive_params(&p).unwrap();
            let g = InitialState::ground();
            for i in 0..=50 {
                let t = i as f64 / 50.0;
                let b = b_general(&p, &g, t).unwrap();
                assert!((b - first_window_b(&p, t).unwrap()).norm() < 1e-12);
                assert!((b.norm_sqr() - (-d.alpha * d.gamma * t).exp()).abs() < 1e-12);
                for n in [-3, 0, 2, 17] {
                    let c = c_general(&p, &g, n, t).unwrap();
                    assert!((c - first_window_c(&p, n, t).unwrap()).norm() < 1e-12);
                }
            }
        }
        let p = ground_params(0.0);
        let b1 = first_window_b(&p, 1.0).unwrap().norm_sqr();
        assert!((b1 - 1.806_169_785_146_413_4e-3).abs() < 1e-15);
        assert!(matches!(
            first_window_b(&p, 1.5),
            Err(Error::OutsideFirstWindow(_))
        ));
    }

    #[test]
    fn decoupled_levels_only_rotate() {
        let p = ModelParams::new(0.3, 1.0, 0.0).with_n_max(8);
        let init = mixed_state();
        for &t in &[0.0, 0.7, 2.0, 5.5] {
            let s = evolve_state(&p, &init, t).unwrap();
            let expect_b = init.b0() * C::new(0.0, -0.3 * 2.0 * PI * t).exp();
            assert!((s.b - expect_b).norm() < 1e-12);
            for (n, c) in s.levels() {
                assert!((c - init.c0_at(n) * rot(n as f64 * t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn results_do_not_depend_on_window_size() {
        let init = mixed_state();
        let small = ground_params(0.24).with_n_max(10);
        let large = small.with_n_max(500);
        for &t in &[0.4, 2.3, 6.1] {
            assert_eq!(b_general(&small, &init, t), b_general(&large, &init, t));
            assert_eq!(
                c_general(&small, &init, 4, t),
                c_general(&large, &init, 4, t)
            );
        }
    }

    #[test]
    fn extended_precision_confirms_double() {
        let p = ground_params(0.24);
        let init = mixed_state();
        let lo = AnalyticSolver::<f64>::new(&p).unwrap();
        let hi = AnalyticSolver::<DoubleDouble>::new(&p).unwrap();
        for &t in &[0.5, 1.5, 3.25, 7.75] {
            let (a, b) = (lo.b(&init, t).unwrap(), hi.b(&init, t).unwrap());
            assert!((a - b).norm() < 1e-12, "b t={t}");
            for n in [-5, 0, 2, 30] {
                let (a, b) = (lo.c(&init, n, t).unwrap(), hi.c(&init, n, t).unwrap());
                assert!((a - b).norm() < 1e-12, "c{n} t={t}");
            }
        }
    }

    #[test]
    fn amplitudes_are_continuous_across_kicks() {
        let p = ground_params(0.24);
        let init = mixed_state();
        let h = 1e-6;
        // Quadratic extrapolation from each side to the kick.
        let side = |f: &dyn Fn(f64) -> C, k: f64, dir: f64| {
            3.0 * f(k + dir * h) - 3.0 * f(k + dir * 2.0 * h) + f(k + dir * 3.0 * h)
        };
        for k in [1.0, 2.0, 3.0] {
            let fb = |t: f64| b_general(&p, &init, t).unwrap();
            assert!((side(&fb, k, 1.0) - side(&fb, k, -1.0)).norm() < 1e-8);
            assert!((fb(k) - side(&fb, k, -1.0)).norm() < 1e-8);
            for n in [-2, 0, 5] {
                let fc = |t: f64| c_general(&p, &init, n, t).unwrap();
                assert!((side(&fc, k, 1.0) - side(&fc, k, -1.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn survival_slope_jumps_at_first_kick() {
        let p = ground_params(0.0);
        let g = InitialState::ground();
        let beta = derive_params(&p).unwrap().beta;
        let pb = |t: f64| b_general(&p, &g, t).unwrap().norm_sqr();
        let h = 1e-5;
        let right = (-3.0 * pb(1.0) + 4.0 * pb(1.0 + h) - pb(1.0 + 2.0 * h)) / (2.0 * h);
        let left = (3.0 * pb(1.0) - 4.0 * pb(1.0 - h) + pb(1.0 - 2.0 * h)) / (2.0 * h);
        // d|b|²/dT jumps by 2·b(1)·db_kick/dT = -4β e^{-β}.
        let jump = right - left;
        assert!((jump + 4.0 * beta * (-beta).exp()).abs() < 1e-4, "{jump}");
    }

    #[test]
    fn rejects_out_of_range_times() {
        let p = ground_params(0.0);
        let g = InitialState::ground();
        assert!(matches!(
            b_general(&p, &g, -1e-3),
            Err(Error::InvalidTime(_))
        ));
        assert!(matches!(
            b_general(&p, &g, 9.0),
            Err(Error::KMaxTooSmall { .. })
        ));
        assert!(b_general(&p.with_k_max(9), &g, 9.0).is_ok());
        assert!(matches!(
            c_general(&p, &g, 0, f64::NAN),
            Err(Error::InvalidTime(_))
        ));
    }

    #[test]
    fn kappa_tilde_reduces_to_kappa() {
        let t = KappaTable::<f64>::new(&ground_params(0.24));
        for n in -5..=5 {
            assert_eq!(t.kappa_tilde(n, n), t.kappa(n));
            assert_eq!(t.kappa_tilde(2, n), t.kappa(n));
            assert!(t.kappa(n).re > 0.0);
        }
    }

    #[test]
    fn lorentzian_values() {
        let p = ground_params(0.0);
        assert!((lorentzian_profile(&p, 0) - 0.633_257_397_764_611_1).abs() < 1e-12);
        let p = ground_params(2.7);
        let best = (-10..=10)
            .max_by(|&a, &b| lorentzian_profile(&p, a).total_cmp(&lorentzian_profile(&p, b)))
            .unwrap();
        assert_eq!(best, 3);
    }

    #[test]
    fn normalization_deficit_matches_tail_estimate() {
        let p = ModelParams::default();
        let s = evolve_state(&p, &InitialState::ground(), 2.5).unwrap();
        let d = s.norm_deficit();
        assert!(d < 5e-3, "{d}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn global_phase_commutes_with_evolution(theta in 0.0..(2.0 * PI), t in 0.0..4.0f64, dg in -1.0..1.0f64) {
            let p = ground_params(dg);
            let init = mixed_state();
            let rotated = init.with_phase(theta);
            let ph = C::from_polar(1.0, theta);
            let b = b_general(&p, &init, t).unwrap();
            let br = b_general(&p, &rotated, t).unwrap();
            prop_assert!((br - b * ph).norm() < 1e-12);
            for n in [-3, 0, 4] {
                let c = c_general(&p, &init, n, t).unwrap();
                let cr = c_general(&p, &rotated, n, t).unwrap();
                prop_assert!((cr - c * ph).norm() < 1e-12);
            }
        }
    }
}
