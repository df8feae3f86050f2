//! Brute-force reference: classical RK4 on the truncated Schrödinger system
//!
//! ```text
//! i db/dt   = Δg b + W Σ_n c_n
//! i dc_n/dt = W b + nΔ c_n
//! ```
//!
//! integrated in the rescaled time `T` (so `d/dT = γ d/dt`).

use num_complex::Complex64;

use crate::analytic::Propagator;
use crate::error::{Error, Result};
use crate::model::{derive_params, InitialState, ModelParams, StateVector};

/// Norm drift allowed per unit of rescaled time.
pub const NORM_DRIFT_PER_UNIT_T: f64 = 1e-9;

/// Fixed-step RK4 settings. The step in rescaled time is
/// `min(max_step, step_times_n_max / n_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub step_times_n_max: f64,
    pub max_step: f64,
    /// Allowed `|1 - norm|` per unit of rescaled time; `None` disables the check.
    pub norm_budget: Option<f64>,
}

impl Default for IntegratorConfig {
    /// `0.005/n_max`: the fastest phase turns by about 0.03 rad per step
    /// and RK4 amplitude damping stays inside the norm budget.
    fn default() -> Self {
        Self {
            step_times_n_max: 0.005,
            max_step: 1e-3,
            norm_budget: Some(NORM_DRIFT_PER_UNIT_T),
        }
    }
}

impl IntegratorConfig {
    /// Same step for every truncation.
    pub fn fixed(step: f64) -> Self {
        Self {
            step_times_n_max: f64::INFINITY,
            max_step: step,
            norm_budget: Some(NORM_DRIFT_PER_UNIT_T),
        }
    }

    pub fn without_norm_check(mut self) -> Self {
        self.norm_budget = None;
        self
    }

    pub fn step(&self, p: &ModelParams) -> f64 {
        self.max_step.min(self.step_times_n_max / p.n_max as f64)
    }

    fn validated_step(&self, p: &ModelParams) -> Result<f64> {
        let h = self.step(p);
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidStep(h));
        }
        Ok(h)
    }
}

/// Time derivative of a state in physical time.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDerivative {
    pub db: Complex64,
    pub dc: Vec<Complex64>,
}

/// `d/dt` of `(b, c)` on the state's own window.
pub fn rhs(p: &ModelParams, s: &StateVector) -> StateDerivative {
    let mi = Complex64::new(0.0, -1.0);
    let sum_c: Complex64 = s.c.iter().sum();
    let db = mi * (p.delta_g * s.b + p.w * sum_c);
    let dc = s
        .levels()
        .map(|(n, c)| mi * (p.w * s.b + n as f64 * p.delta * c))
        .collect();
    StateDerivative { db, dc }
}

/// `⟨ψ|H|ψ⟩` on the truncated basis.
pub fn energy(p: &ModelParams, s: &StateVector) -> f64 {
    let sum_c: Complex64 = s.c.iter().sum();
    let diag: f64 = s
        .levels()
        .map(|(n, c)| n as f64 * p.delta * c.norm_sqr())
        .sum();
    p.delta_g * s.b.norm_sqr() + diag + 2.0 * p.w * (s.b.conj() * sum_c).re
}

/// Flat-vector RK4 stepper: `y[0] = b`, `y[1 + i] = c` at window index `i`.
struct Stepper {
    /// `γΔg`, `γW` and `γ nΔ` per window slot.
    g_dg: f64,
    g_w: f64,
    g_levels: Vec<f64>,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Stepper {
    fn new(p: &ModelParams, s: &StateVector, gamma: f64) -> Self {
        let len = s.c.len() + 1;
        let zeros = vec![Complex64::new(0.0, 0.0); len];
        Self {
            g_dg: gamma * p.delta_g,
            g_w: gamma * p.w,
            g_levels: s
                .window
                .levels()
                .map(|n| gamma * n as f64 * p.delta)
                .collect(),
            k: [zeros.clone(), zeros.clone(), zeros.clone(), zeros.clone()],
            tmp: zeros,
        }
    }

    /// `out = -i γ H y`.
    fn deriv(&self, y: &[Complex64], out: &mut [Complex64]) {
        let b = y[0];
        let mut sum_c = Complex64::new(0.0, 0.0);
        for ((o, &c), &e) in out[1..].iter_mut().zip(&y[1..]).zip(&self.g_levels) {
            sum_c += c;
            let h = self.g_w * b + e * c;
            *o = Complex64::new(h.im, -h.re);
        }
        let h = self.g_dg * b + self.g_w * sum_c;
        out[0] = Complex64::new(h.im, -h.re);
    }

    fn step(&mut self, y: &mut [Complex64], h: f64) {
        let mut k = std::mem::take(&mut self.k);
        let mut tmp = std::mem::take(&mut self.tmp);
        self.deriv(y, &mut k[0]);
        for (t, (&yi, &ki)) in tmp.iter_mut().zip(y.iter().zip(&k[0])) {
            *t = yi + 0.5 * h * ki;
        }
        self.deriv(&tmp, &mut k[1]);
        for (t, (&yi, &ki)) in tmp.iter_mut().zip(y.iter().zip(&k[1])) {
            *t = yi + 0.5 * h * ki;
        }
        self.deriv(&tmp, &mut k[2]);
        for (t, (&yi, &ki)) in tmp.iter_mut().zip(y.iter().zip(&k[2])) {
            *t = yi + h * ki;
        }
        self.deriv(&tmp, &mut k[3]);
        let h6 = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += h6 * (k[0][i] + 2.0 * (k[1][i] + k[2][i]) + k[3][i]);
        }
        self.k = k;
        self.tmp = tmp;
    }
}

fn pack(s: &StateVector) -> Vec<Complex64> {
    std::iter::once(s.b).chain(s.c.iter().copied()).collect()
}

fn unpack(y: &[Complex64], t: f64, template: &StateVector) -> StateVector {
    StateVector {
        t,
        b: y[0],
        window: template.window,
        c: y[1..].to_vec(),
    }
}

/// Integrates from `T = 0` and returns the state at every grid time.
///
/// Each grid interval is covered by an integer number of equal steps no
/// longer than `cfg.step`.
pub fn integrate_grid(
    p: &ModelParams,
    init: &InitialState,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<StateVector>> {
    let max_step = cfg.validated_step(p)?;
    let gamma = derive_params(p)?.gamma;
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    let start = StateVector::from_initial(init, p.window())?;
    let mut stepper = Stepper::new(p, &start, gamma);
    let mut y = pack(&start);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / max_step).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                stepper.step(&mut y, h);
            }
        }
        t = target;
        let s = unpack(&y, t, &start);
        if let Some(budget) = cfg.norm_budget {
            let drift = s.norm_deficit();
            let allowed = budget * t.max(1.0);
            if drift > allowed {
                return Err(Error::NormDrift {
                    drift,
                    budget: allowed,
                });
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// State at `t_end`.
pub fn integrate(
    p: &ModelParams,
    init: &InitialState,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<StateVector> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::InvalidTime(t_end));
    }
    let mut states = integrate_grid(p, init, &[t_end], cfg)?;
    Ok(states.pop().expect("one grid point"))
}

/// Largest deviations between two propagations over a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deviation {
    pub n_max: usize,
    /// `max_T |b_analytic - b_ode|`
    pub b: f64,
    /// `max_T max_n |c_analytic - c_ode|`
    pub c: f64,
}

impl Deviation {
    pub fn max(&self) -> f64 {
        self.b.max(self.c)
    }
}

/// Compares `solver` against RK4 on each truncation in `n_max_values`.
///
/// The truncation of `p` is overridden by each entry of `n_max_values`, and
/// `make_solver` builds the analytic side for each.
pub fn compare_to_analytic<F>(
    p: &ModelParams,
    init: &InitialState,
    grid: &[f64],
    cfg: &IntegratorConfig,
    n_max_values: &[usize],
    make_solver: F,
) -> Result<Vec<Deviation>>
where
    F: Fn(&ModelParams) -> Result<Box<dyn Propagator>>,
{
    n_max_values
        .iter()
        .map(|&n_max| {
            let q = p.with_n_max(n_max);
            let solver = make_solver(&q)?;
            let ode = integrate_grid(&q, init, grid, cfg)?;
            let mut dev = Deviation {
                n_max,
                b: 0.0,
                c: 0.0,
            };
            for s in &ode {
                let a = solver.state(init, s.t)?;
                dev.b = dev.b.max((a.b - s.b).norm());
                let worst =
                    a.c.iter()
                        .zip(&s.c)
                        .map(|(x, y)| (x - y).norm())
                        .fold(0.0, f64::max);
                dev.c = dev.c.max(worst);
            }
            Ok(dev)
        })
        .collect()
}
