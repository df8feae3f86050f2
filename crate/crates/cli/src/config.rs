use bixon_core::observables::uniform_grid;
use bixon_core::{InitialState, LaguerreConvention, ModelParams, Precision};

use crate::args::Common;
use crate::error::CliError;
use crate::init::InitSpec;

/// Per-command fallbacks for flags the user left out.
#[derive(Clone, Copy, Debug)]
pub struct Defaults {
    pub n_max: usize,
    pub t_max: f64,
    pub t_steps: usize,
    /// Latest time evaluated, as a multiple of `t_max`.
    pub horizon: f64,
}

impl Defaults {
    pub const SERIES: Defaults = Defaults {
        n_max: 1000,
        t_max: 8.0,
        t_steps: 1600,
        horizon: 1.0,
    };
    pub const LG: Defaults = Defaults {
        horizon: 2.0,
        ..Defaults::SERIES
    };
    pub const VALIDATE: Defaults = Defaults {
        n_max: 800,
        t_max: 3.0,
        t_steps: 12,
        horizon: 2.0,
    };
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub params: ModelParams,
    pub t_max: f64,
    pub t_steps: usize,
    pub init: InitSpec,
    pub precision: Precision,
    pub convention: LaguerreConvention,
    pub extra: Vec<(&'static str, String)>,
}

impl RunConfig {
    pub fn resolve(command: &'static str, c: &Common, d: Defaults) -> Result<Self, CliError> {
        let t_max = c.t_max.unwrap_or(d.t_max);
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(CliError::Usage(format!(
                "--t-max must be a non-negative number, got {t_max}"
            )));
        }
        let t_steps = c.t_steps.unwrap_or(d.t_steps);
        if t_steps == 0 {
            return Err(CliError::Usage("--t-steps must be at least 1".into()));
        }
        let horizon = d.horizon * t_max;
        let k_max = c.k_max.unwrap_or((horizon.floor() as usize).max(1));
        let params = ModelParams::new(c.delta_g, c.delta, c.w)
            .with_n_max(c.n_max.unwrap_or(d.n_max))
            .with_k_max(k_max);
        params.validate()?;
        params.check_time(horizon)?;
        let init = InitSpec::parse(&c.init)?;
        init.state()?.check_support(&params.window())?;
        Ok(Self {
            command,
            params,
            t_max,
            t_steps,
            init,
            precision: c.precision,
            convention: LaguerreConvention::Derivative,
            extra: Vec::new(),
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.t_max, self.t_steps)
    }

    pub fn state(&self) -> Result<InitialState, CliError> {
        self.init.state()
    }

    /// `key=value` pairs sufficient to rerun this configuration.
    pub fn provenance(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let mut kv = vec![
            ("tool", format!("bixon {}", env!("CARGO_PKG_VERSION"))),
            ("command", self.command.to_string()),
            ("delta_g", p.delta_g.to_string()),
            ("delta", p.delta.to_string()),
            ("w", p.w.to_string()),
            ("n_max", p.n_max.to_string()),
            ("k_max", p.k_max.to_string()),
            ("t_max", self.t_max.to_string()),
            ("t_steps", self.t_steps.to_string()),
            ("init", self.init.canonical()),
            ("precision", self.precision.as_str().to_string()),
        ];
        if self.convention != LaguerreConvention::Derivative {
            kv.push(("laguerre", format!("{:?}", self.convention).to_lowercase()));
        }
        kv.extend(self.extra.iter().cloned());
        kv
    }
}
