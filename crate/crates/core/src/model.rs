//! Parameters, derived constants and state containers.
//!
//! Time is always the rescaled `T = Δt/(2π)`; physical time only appears
//! inside formulas as `t = γT`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|b0|² + Σ|c_n(0)|²` accepted by [`InitialState::new`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Physical constants (ħ = 1) and numerical controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Detuning Δg of the single level from the `n = 0` ladder level.
    pub delta_g: f64,
    /// Ladder spacing Δ.
    pub delta: f64,
    /// Coupling W between the single level and every ladder level.
    pub w: f64,
    /// Basis half-width: the window holds `2 n_max + 1` ladder levels.
    pub n_max: usize,
    /// Largest kick index whose term may be active.
    pub k_max: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta_g: 0.0,
            delta: 1.0,
            w: 0.4,
            n_max: 1000,
            k_max: 8,
        }
    }
}

impl ModelParams {
    pub fn new(delta_g: f64, delta: f64, w: f64) -> Self {
        Self {
            delta_g,
            delta,
            w,
            ..Self::default()
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_delta_g(mut self, delta_g: f64) -> Self {
        self.delta_g = delta_g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(Error::InvalidSpacing(self.delta));
        }
        if !self.delta_g.is_finite() {
            return Err(Error::NonFinite("delta_g"));
        }
        if !self.w.is_finite() {
            return Err(Error::NonFinite("w"));
        }
        if self.n_max == 0 {
            return Err(Error::EmptyBasis);
        }
        Ok(())
    }

    /// Ladder levels retained in truncated sums.
    ///
    /// The window is centred on the level closest to resonance, so a shift
    /// `Δg → Δg + jΔ` relabels the window instead of moving the resonance
    /// towards its edge.
    pub fn window(&self) -> LevelWindow {
        let center = (self.delta_g / self.delta + 0.5).floor() as i64;
        LevelWindow {
            center,
            half_width: self.n_max,
        }
    }

    /// Number of kick terms switched on at rescaled time `t` (each term
    /// carries `H(T - k)` with `H(0) = 1`).
    pub fn active_kicks(t: f64) -> usize {
        t.floor().max(0.0) as usize
    }

    /// Checks `t` against the kick cutoff and returns the active kick count.
    pub fn check_time(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidTime(t));
        }
        let needed = Self::active_kicks(t);
        if needed > self.k_max {
            return Err(Error::KMaxTooSmall {
                t,
                needed,
                k_max: self.k_max,
            });
        }
        Ok(needed)
    }
}

/// Constants that the closed-form solution is written in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedParams {
    /// α = 2πW²/Δ
    pub alpha: f64,
    /// γ = 2π/Δ
    pub gamma: f64,
    /// β = 2π²W²/Δ²
    pub beta: f64,
}

pub fn derive_params(p: &ModelParams) -> Result<DerivedParams> {
    p.validate()?;
    let w2 = p.w * p.w;
    Ok(DerivedParams {
        alpha: 2.0 * PI * w2 / p.delta,
        gamma: 2.0 * PI / p.delta,
        beta: 2.0 * PI * PI * w2 / (p.delta * p.delta),
    })
}

/// Contiguous range of ladder levels `center - half_width ..= center + half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelWindow {
    pub center: i64,
    pub half_width: usize,
}

impl LevelWindow {
    pub fn lo(&self) -> i64 {
        self.center - self.half_width as i64
    }

    pub fn hi(&self) -> i64 {
        self.center + self.half_width as i64
    }

    pub fn len(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.lo()..=self.hi()).contains(&n)
    }

    pub fn index_of(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.lo()) as usize)
    }

    pub fn level_at(&self, index: usize) -> i64 {
        self.lo() + index as i64
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<i64> {
        self.lo()..=self.hi()
    }
}

/// Amplitudes at `T = 0`: `b(0)` and the nonzero `c_n(0)`, sorted by level.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialState {
    b0: Complex64,
    c0: Vec<(i64, Complex64)>,
}

impl InitialState {
    /// Builds a state, requiring unit norm within [`NORMALIZATION_TOLERANCE`].
    pub fn new<I>(b0: Complex64, c0: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        Self::with_tolerance(b0, c0, NORMALIZATION_TOLERANCE)
    }

    /// Like [`InitialState::new`] with a caller-chosen norm tolerance. The
    /// stored amplitudes are rescaled to unit norm.
    pub fn with_tolerance<I>(b0: Complex64, c0: I, tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let s = Self::build(b0, c0)?;
        let p = s.probability();
        if !p.is_finite() || (p - 1.0).abs() > tol {
            return Err(Error::NotNormalized(p));
        }
        Ok(s.rescaled(p))
    }

    /// Rescales arbitrary amplitudes to unit norm.
    pub fn normalized<I>(b0: Complex64, c0: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let s = Self::build(b0, c0)?;
        let p = s.probability();
        if !p.is_finite() {
            return Err(Error::NotNormalized(p));
        }
        if p == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(s.rescaled(p))
    }

    /// All weight on the single level.
    pub fn ground() -> Self {
        Self {
            b0: Complex64::new(1.0, 0.0),
            c0: Vec::new(),
        }
    }

    fn build<I>(b0: Complex64, c0: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut c0: Vec<(i64, Complex64)> = c0.into_iter().collect();
        c0.sort_by_key(|&(n, _)| n);
        if let Some(w) = c0.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateLevel(w[0].0));
        }
        c0.retain(|&(_, a)| a != Complex64::new(0.0, 0.0));
        Ok(Self { b0, c0 })
    }

    fn rescaled(mut self, p: f64) -> Self {
        if p != 1.0 {
            let s = p.sqrt().recip();
            self.b0 *= s;
            for (_, a) in &mut self.c0 {
                *a *= s;
            }
        }
        self
    }

    pub fn b0(&self) -> Complex64 {
        self.b0
    }

    /// Nonzero ladder amplitudes in ascending level order.
    pub fn c0(&self) -> &[(i64, Complex64)] {
        &self.c0
    }

    pub fn c0_at(&self, n: i64) -> Complex64 {
        self.c0
            .binary_search_by_key(&n, |&(l, _)| l)
            .map(|i| self.c0[i].1)
            .unwrap_or_default()
    }

    pub fn probability(&self) -> f64 {
        self.b0.norm_sqr() + self.c0.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>()
    }

    /// Same state times a global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let ph = Complex64::from_polar(1.0, theta);
        Self {
            b0: self.b0 * ph,
            c0: self.c0.iter().map(|&(n, a)| (n, a * ph)).collect(),
        }
    }

    /// Fails if any populated level falls outside `window`.
    pub fn check_support(&self, window: &LevelWindow) -> Result<()> {
        match self.c0.iter().find(|(n, _)| !window.contains(*n)) {
            Some(&(n, _)) => Err(Error::LevelOutOfWindow {
                n,
                lo: window.lo(),
                hi: window.hi(),
            }),
            None => Ok(()),
        }
    }
}

/// Amplitudes at one rescaled time over a truncation window.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub t: f64,
    pub b: Complex64,
    pub window: LevelWindow,
    /// `c[i]` is the amplitude of level `window.level_at(i)`.
    pub c: Vec<Complex64>,
}

impl StateVector {
    /// Embeds an initial state into `window` at `T = 0`.
    pub fn from_initial(init: &InitialState, window: LevelWindow) -> Result<Self> {
        init.check_support(&window)?;
        let mut c = vec![Complex64::new(0.0, 0.0); window.len()];
        for &(n, a) in init.c0() {
            c[window.index_of(n).expect("support checked")] = a;
        }
        Ok(Self {
            t: 0.0,
            b: init.b0(),
            window,
            c,
        })
    }

    pub fn c_at(&self, n: i64) -> Option<Complex64> {
        self.window.index_of(n).map(|i| self.c[i])
    }

    /// `(n, c_n)` pairs in level order.
    pub fn levels(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.window.levels().zip(self.c.iter().copied())
    }

    pub fn ladder_probability(&self) -> f64 {
        self.c.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.b.norm_sqr() + self.ladder_probability()
    }

    /// `|1 - Σ probabilities|`.
    pub fn norm_deficit(&self) -> f64 {
        (1.0 - self.total_probability()).abs()
    }
}

/// `|b|²`.
pub fn survival_probability(s: &StateVector) -> f64 {
    s.b.norm_sqr()
}
