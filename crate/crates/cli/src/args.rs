use std::path::PathBuf;
use std::str::FromStr;

use bixon_core::Precision;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "bixon",
    version,
    about = "Single level coupled to an equally spaced ladder: dynamics, temporal correlations and coherence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Amplitude of the single level and ladder population over time.
    Evolve(EvolveArgs),
    /// Leggett-Garg correlators and the K3/K3' combinations.
    Lg(SweepArgs),
    /// Relative entropy of coherence of the evolving state.
    Coherence(SweepArgs),
    /// Oracle, invariance, continuity and normalization checks.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Detuning of the single level from the ladder.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_g: f64,
    /// Ladder spacing.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Coupling strength.
    #[arg(long, default_value_t = 0.4)]
    pub w: f64,
    /// Ladder levels kept on each side of the resonant level.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Highest kick order summed; derived from the time horizon when omitted.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// End of the rescaled time grid.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid intervals on [0, t-max].
    #[arg(long)]
    pub t_steps: Option<usize>,
    /// ground | superposition | file:PATH | inline "b0=re,im;n=re,im;..."
    #[arg(long, default_value = "ground")]
    pub init: String,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// double | extended
    #[arg(long, default_value = "double")]
    pub precision: Precision,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Times at which to dump per-level amplitudes.
    #[arg(long, value_delimiter = ',', requires = "levels_out")]
    pub levels_at: Vec<f64>,
    /// Destination of the per-level dump.
    #[arg(long, requires = "levels_at")]
    pub levels_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Sweep the detuning over LO:HI:STEP and emit one summary row per value.
    #[arg(long)]
    pub sweep_delta_g: Option<Sweep>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest tolerated analytic-versus-integrator deviation at n-max.
    #[arg(long, default_value_t = 1e-3)]
    pub oracle_tol: f64,
    /// Evaluate the solution with the sign-flipped Laguerre derivative.
    #[arg(long, hide = true)]
    pub wrong_laguerre_sign: bool,
}

/// Inclusive detuning range `LO:HI:STEP`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(format!("expected LO:HI:STEP, got '{s}'"));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number '{x}': {e}"))
        };
        let sweep = Sweep {
            lo: num(lo)?,
            hi: num(hi)?,
            step: num(step)?,
        };
        if !(sweep.lo.is_finite() && sweep.hi.is_finite() && sweep.hi >= sweep.lo) {
            return Err(format!("sweep range must satisfy LO <= HI, got '{s}'"));
        }
        if !(sweep.step.is_finite() && sweep.step > 0.0) {
            return Err(format!("sweep step must be positive, got '{s}'"));
        }
        Ok(sweep)
    }
}

impl std::fmt::Display for Sweep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}
