use bixon_core::observables::{
    coherence_series, interval_sum_piecewise, lg_kinks, lg_point, lg_series, time_average,
    Direction, LGResult, TimeSeries,
};
use bixon_core::{ModelParams, Propagator, Solver};
use log::info;
use rayon::prelude::*;

use crate::args::{EvolveArgs, Sweep, SweepArgs};
use crate::config::{Defaults, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_value, CsvWriter, Summary};

fn solver(cfg: &RunConfig, p: &ModelParams) -> Result<Solver, CliError> {
    Ok(Solver::new(p, cfg.precision)?.with_convention(cfg.convention))
}

pub fn evolve(args: &EvolveArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve("evolve", &args.common, Defaults::SERIES)?;
    for &t in &args.levels_at {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!(
                "--levels-at time {t} is not a non-negative number"
            )));
        }
        cfg.params.check_time(t)?;
    }
    if !args.levels_at.is_empty() {
        let times: Vec<String> = args.levels_at.iter().map(f64::to_string).collect();
        cfg.extra.push(("levels_at", times.join(",")));
    }
    let solver = solver(&cfg, &cfg.params)?;
    let init = cfg.state()?;
    let rows = cfg
        .grid()
        .par_iter()
        .map(|&t| {
            let s = solver.state(&init, t)?;
            Ok([t, s.b.re, s.b.im, s.b.norm_sqr(), s.ladder_probability()])
        })
        .collect::<Result<Vec<_>, bixon_core::Error>>()?;

    let out = args.common.out.as_deref();
    let mut csv = CsvWriter::create(out)?;
    csv.header(
        &cfg.provenance(),
        &["T", "re_b", "im_b", "prob_b", "prob_c_total"],
    )?;
    for r in &rows {
        csv.row(r)?;
    }
    csv.finish()?;

    if let Some(path) = &args.levels_out {
        let mut dump = CsvWriter::create(Some(path))?;
        dump.header(&cfg.provenance(), &["T", "n", "re_c", "im_c", "prob_c"])?;
        for &t in &args.levels_at {
            let s = solver.state(&init, t)?;
            for (n, c) in s.levels() {
                dump.text_row(&[
                    fmt_value(t),
                    n.to_string(),
                    fmt_value(c.re),
                    fmt_value(c.im),
                    fmt_value(c.norm_sqr()),
                ])?;
            }
        }
        dump.finish()?;
    }

    let summary = Summary::new(out);
    let last = rows.last().expect("grid has at least two points");
    let deficit = rows
        .iter()
        .map(|r| (1.0 - r[3] - r[4]).abs())
        .fold(0.0, f64::max);
    summary.line(format!("prob_b(T={}) = {:.10}", last[0], last[3]));
    summary.line(format!("max norm deficit = {deficit:.3e}"));
    Ok(())
}

/// Measures of the Leggett-Garg regions over a sampled series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LgSummary {
    pub k3_above: f64,
    pub k3p_above: f64,
    pub both_below: f64,
    pub unresolved: usize,
}

pub fn summarize_lg<P: Propagator + ?Sized>(
    prop: &P,
    series: &[LGResult],
) -> Result<LgSummary, CliError> {
    let grid: Vec<f64> = series.iter().map(|r| r.tau).collect();
    let kinks = lg_kinks(grid.last().copied().unwrap_or(0.0));
    let measure = |pick: fn(&LGResult) -> f64, direction| -> Result<_, CliError> {
        let ts = TimeSeries::new(grid.clone(), series.iter().map(pick).collect())?;
        let refine =
            |t: f64| pick(&lg_point(prop, t).expect("grid times were checked against k_max"));
        Ok(interval_sum_piecewise(
            &ts,
            1.0,
            direction,
            Some(refine),
            &kinks,
        ))
    };
    let k3 = measure(|r| r.k3, Direction::Above)?;
    let k3p = measure(|r| r.k3_prime, Direction::Above)?;
    // K3 + K3' = -2 C31 <= 2, so the two regions are disjoint.
    let span = grid.last().copied().unwrap_or(0.0) - grid.first().copied().unwrap_or(0.0);
    Ok(LgSummary {
        k3_above: k3.measure,
        k3p_above: k3p.measure,
        both_below: span - k3.measure - k3p.measure,
        unresolved: k3.unresolved + k3p.unresolved,
    })
}

fn require_ground(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.init.canonical() != "ground" {
        return Err(CliError::Usage(
            "lg measures from the single level; --init must be ground".into(),
        ));
    }
    Ok(())
}

pub fn lg(args: &SweepArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve("lg", &args.common, Defaults::LG)?;
    require_ground(&cfg)?;
    let out = args.common.out.as_deref();
    if let Some(sweep) = args.sweep_delta_g {
        return lg_sweep(&mut cfg, sweep, out);
    }
    let solver = solver(&cfg, &cfg.params)?;
    let series = lg_series(&solver, &cfg.grid())?;
    let mut csv = CsvWriter::create(out)?;
    csv.header(&cfg.provenance(), &["T", "C21", "C31", "C32", "K3", "K3p"])?;
    for r in &series {
        csv.row(&[r.tau, r.c21, r.c31, r.c32, r.k3, r.k3_prime])?;
    }
    csv.finish()?;

    let s = summarize_lg(&solver, &series)?;
    let summary = Summary::new(out);
    summary.line(format!("K3>1 interval sum = {:.6}", s.k3_above));
    summary.line(format!("K3'>1 interval sum = {:.6}", s.k3p_above));
    summary.line(format!("both <= 1 interval sum = {:.6}", s.both_below));
    if s.unresolved > 0 {
        summary.line(format!(
            "warning: {} cells with unresolved crossings",
            s.unresolved
        ));
    }
    Ok(())
}

fn lg_sweep(
    cfg: &mut RunConfig,
    sweep: Sweep,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    cfg.extra.push(("sweep_delta_g", sweep.to_string()));
    let grid = cfg.grid();
    let mut csv = CsvWriter::create(out)?;
    csv.header(
        &cfg.provenance(),
        &["delta_g", "k3_above", "k3p_above", "both_below"],
    )?;
    let values = sweep.values();
    for &dg in &values {
        let p = cfg.params.with_delta_g(dg);
        let solver = solver(cfg, &p)?;
        let s = summarize_lg(&solver, &lg_series(&solver, &grid)?)?;
        info!(
            "delta_g={dg}: K3>1 {:.6}, K3'>1 {:.6}",
            s.k3_above, s.k3p_above
        );
        csv.row(&[dg, s.k3_above, s.k3p_above, s.both_below])?;
    }
    csv.finish()?;
    Summary::new(out).line(format!("swept {} detuning values", values.len()));
    Ok(())
}

pub fn coherence(args: &SweepArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve("coherence", &args.common, Defaults::SERIES)?;
    let out = args.common.out.as_deref();
    let init = cfg.state()?;
    let grid = cfg.grid();
    if let Some(sweep) = args.sweep_delta_g {
        cfg.extra.push(("sweep_delta_g", sweep.to_string()));
        let mut csv = CsvWriter::create(out)?;
        csv.header(&cfg.provenance(), &["delta_g", "c_rel_avg"])?;
        let values = sweep.values();
        for &dg in &values {
            let p = cfg.params.with_delta_g(dg);
            let avg = time_average(&coherence_series(&solver(&cfg, &p)?, &init, &grid)?);
            info!("delta_g={dg}: average coherence {avg:.6}");
            csv.row(&[dg, avg])?;
        }
        csv.finish()?;
        Summary::new(out).line(format!("swept {} detuning values", values.len()));
        return Ok(());
    }
    let series = coherence_series(&solver(&cfg, &cfg.params)?, &init, &grid)?;
    let mut csv = CsvWriter::create(out)?;
    csv.header(&cfg.provenance(), &["T", "C_rel_ent"])?;
    for (t, c) in series.grid().iter().zip(series.values()) {
        csv.row(&[*t, *c])?;
    }
    csv.finish()?;
    Summary::new(out).line(format!(
        "time-averaged C_rel_ent = {:.6}",
        time_average(&series)
    ));
    Ok(())
}
