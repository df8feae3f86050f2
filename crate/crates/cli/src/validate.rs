//! Self-checks of a parameter set: agreement with the integrator, detuning
//! invariance, continuity across kicks and truncation convergence.

use bixon_core::observables::{
    lg_point, rel_entropy_coherence, transform_detuning, uniform_grid, Sign,
};
use bixon_core::oracle::{compare_to_analytic, IntegratorConfig};
use bixon_core::{InitialState, LaguerreConvention, ModelParams, Propagator, Solver};
use num_complex::Complex64;

use crate::args::ValidateArgs;
use crate::config::{Defaults, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_value, CsvWriter, Summary};

/// Deviation below which the integrator is considered exact and no
/// convergence with `n_max` is expected.
const EXACT_FLOOR: f64 = 1e-9;
const INVARIANCE_TOL: f64 = 1e-8;
const CONTINUITY_TOL: f64 = 1e-8;
const DEFICIT_TOL: f64 = 5e-3;
const DEFICIT_RATIO: f64 = 1.8;
/// Minimum shrink factor of the oracle deviation when `n_max` doubles.
const ORACLE_RATIO: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    pub pass: bool,
}

struct Suite<'a> {
    cfg: &'a RunConfig,
    oracle_tol: f64,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn push(
        &mut self,
        suite: &'static str,
        name: impl Into<String>,
        measured: f64,
        limit: f64,
        pass: bool,
    ) {
        self.checks.push(Check {
            suite,
            name: name.into(),
            measured,
            limit,
            pass,
        });
    }

    fn solver(&self, p: &ModelParams) -> bixon_core::Result<Solver> {
        Ok(Solver::new(p, self.cfg.precision)?.with_convention(self.cfg.convention))
    }

    fn states(&self) -> Result<Vec<(&'static str, InitialState)>, CliError> {
        Ok(vec![
            ("init", self.cfg.state()?),
            ("mixed", mixed_state(self.cfg.params.window().center)),
        ])
    }

    fn oracle(&mut self) -> Result<(), CliError> {
        let p = self.cfg.params;
        let n_values = [(p.n_max / 4).max(1), (p.n_max / 2).max(1), p.n_max];
        let cfg = if p.w == 0.0 {
            IntegratorConfig::fixed(2e-5)
        } else {
            IntegratorConfig::default()
        };
        let grid = self.cfg.grid();
        for (label, init) in self.states()? {
            let make = |q: &ModelParams| -> bixon_core::Result<Box<dyn Propagator>> {
                Ok(Box::new(self.solver(q)?))
            };
            let devs = compare_to_analytic(&p, &init, &grid, &cfg, &n_values, make)?;
            let d: Vec<f64> = devs.iter().map(|x| x.max()).collect();
            let ratio = d[1] / d[2];
            let converging = d[0] <= EXACT_FLOOR || (d[0] > d[1] && ratio >= ORACLE_RATIO);
            let tol = self.oracle_tol;
            self.push(
                "oracle",
                format!("deviation_{label}"),
                d[2],
                tol,
                d[2] <= tol,
            );
            self.push(
                "oracle",
                format!("convergence_{label}"),
                ratio,
                ORACLE_RATIO,
                converging,
            );
        }
        Ok(())
    }

    fn invariance(&mut self) -> Result<(), CliError> {
        let p = self.cfg.params;
        let grid = uniform_grid(self.cfg.t_max, 49);
        let ground = InitialState::ground();
        let observe = |s: &Solver, t: f64| -> Result<[f64; 3], CliError> {
            let lg = lg_point(s, t)?;
            Ok([
                lg.k3,
                lg.k3_prime,
                rel_entropy_coherence(&s.state(&ground, t)?),
            ])
        };
        let base = self.solver(&p)?;
        let reference = grid
            .iter()
            .map(|&t| observe(&base, t))
            .collect::<Result<Vec<_>, _>>()?;
        let mut worst = 0.0f64;
        for sign in [Sign::Plus, Sign::Minus] {
            for n in -2..=2 {
                let s = self.solver(&transform_detuning(&p, sign, n))?;
                for (&t, r) in grid.iter().zip(&reference) {
                    let o = observe(&s, t)?;
                    worst = (0..3).map(|i| (o[i] - r[i]).abs()).fold(worst, f64::max);
                }
            }
        }
        self.push(
            "invariance",
            "detuning_maps",
            worst,
            INVARIANCE_TOL,
            worst <= INVARIANCE_TOL,
        );
        Ok(())
    }

    fn continuity(&mut self) -> Result<(), CliError> {
        let p = self.cfg.params;
        let solver = self.solver(&p)?;
        let center = p.window().center;
        let levels: Vec<i64> = [-3, -1, 0, 1, 2, 7]
            .iter()
            .map(|d| center + d)
            .filter(|&n| p.window().contains(n))
            .collect();
        let h = 1e-6;
        let mut worst = 0.0f64;
        let kicks = (self.cfg.t_max.floor() as usize).min(p.k_max);
        for (_, init) in self.states()? {
            for k in (1..=kicks).map(|k| k as f64) {
                let jump =
                    |f: &dyn Fn(f64) -> bixon_core::Result<Complex64>| -> bixon_core::Result<f64> {
                        let side = |dir: f64| -> bixon_core::Result<Complex64> {
                            Ok(3.0 * f(k + dir * h)? - 3.0 * f(k + 2.0 * dir * h)?
                                + f(k + 3.0 * dir * h)?)
                        };
                        Ok((side(1.0)? - side(-1.0)?).norm())
                    };
                worst = worst.max(jump(&|t| solver.b(&init, t))?);
                for &n in &levels {
                    worst = worst.max(jump(&|t| solver.c(&init, n, t))?);
                }
            }
        }
        self.push(
            "continuity",
            format!("kicks_1_to_{kicks}"),
            worst,
            CONTINUITY_TOL,
            worst <= CONTINUITY_TOL,
        );
        Ok(())
    }

    fn normalization(&mut self) -> Result<(), CliError> {
        let p = self.cfg.params;
        let grid = self.cfg.grid();
        let ground = InitialState::ground();
        let deficit = |n_max: usize| -> Result<f64, CliError> {
            let s = self.solver(&p.with_n_max(n_max))?;
            let mut worst = 0.0f64;
            for &t in &grid {
                worst = worst.max(s.state(&ground, t)?.norm_deficit());
            }
            Ok(worst)
        };
        let full = deficit(p.n_max)?;
        let half = deficit((p.n_max / 2).max(1))?;
        self.push(
            "normalization",
            "deficit",
            full,
            DEFICIT_TOL,
            full <= DEFICIT_TOL,
        );
        let ratio = half / full;
        let pass = full <= 1e-12 || ratio >= DEFICIT_RATIO;
        self.push("normalization", "halving_ratio", ratio, DEFICIT_RATIO, pass);
        Ok(())
    }
}

/// A fixed spread-out state around `center`.
fn mixed_state(center: i64) -> InitialState {
    let c = |re, im| Complex64::new(re, im);
    InitialState::normalized(
        c(0.6, 0.1),
        [
            (center - 2, c(0.2, -0.3)),
            (center, c(0.1, 0.4)),
            (center + 1, c(-0.3, 0.2)),
            (center + 3, c(0.25, 0.1)),
        ],
    )
    .expect("nonzero amplitudes")
}

pub fn run_checks(cfg: &RunConfig, oracle_tol: f64) -> Result<Vec<Check>, CliError> {
    let mut s = Suite {
        cfg,
        oracle_tol,
        checks: Vec::new(),
    };
    s.oracle()?;
    s.invariance()?;
    s.continuity()?;
    s.normalization()?;
    Ok(s.checks)
}

pub fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    if !(args.oracle_tol.is_finite() && args.oracle_tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--oracle-tol must be positive, got {}",
            args.oracle_tol
        )));
    }
    let mut cfg = RunConfig::resolve("validate", &args.common, Defaults::VALIDATE)?;
    if cfg.params.n_max < 8 {
        return Err(CliError::Usage(
            "validate needs --n-max of at least 8".into(),
        ));
    }
    if args.wrong_laguerre_sign {
        cfg.convention = LaguerreConvention::Negated;
    }
    cfg.extra.push(("oracle_tol", args.oracle_tol.to_string()));
    let checks = run_checks(&cfg, args.oracle_tol)?;

    let out = args.common.out.as_deref();
    let mut csv = CsvWriter::create(out)?;
    csv.header(
        &cfg.provenance(),
        &["suite", "check", "measured", "limit", "pass"],
    )?;
    for c in &checks {
        csv.text_row(&[
            c.suite.to_string(),
            c.name.clone(),
            fmt_value(c.measured),
            fmt_value(c.limit),
            c.pass.to_string(),
        ])?;
    }
    csv.finish()?;

    let summary = Summary::new(out);
    for c in &checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        summary.line(format!(
            "{tag} {}/{}: measured {:.3e}, limit {:.3e}",
            c.suite, c.name, c.measured, c.limit
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        eprintln!("VALIDATION FAILED: {failed} of {} checks", checks.len());
        return Err(CliError::Validation { failed });
    }
    summary.line(format!("all {} checks passed", checks.len()));
    Ok(())
}
