//! The five subcommands. Each evaluates the config's grid and returns a
//! table; rows appear in grid order whatever the worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use spaser::analysis::{
    background_state, calibrate_coupling, growth_rate, steady_state_numeric, threshold_find, threshold_find_auto,
    BranchHint, CalibrationTargets, SteadyOptions,
};
use spaser::{integrate_with, AnalysisError, Flow, IntegratorControls, ModelParams, SpaserState};

use crate::config::{Initial, RunConfig};
use crate::table::{Column, SweepTable, CONVERGED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CommandKind {
    Trajectory,
    SteadySweep,
    Threshold,
    Stability,
    Calibrate,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Trajectory => "trajectory",
            CommandKind::SteadySweep => "steady-sweep",
            CommandKind::Threshold => "threshold",
            CommandKind::Stability => "stability",
            CommandKind::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Runs `kind` over the grid of `cfg` on `workers` threads. Metadata is left
/// to the caller.
pub fn run_command(kind: CommandKind, cfg: &RunConfig, workers: usize) -> Result<SweepTable, CommandError> {
    if kind == CommandKind::Calibrate {
        return calibrate(cfg);
    }
    let grid = cfg.grid();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let per_point = |point: &Vec<f64>| -> Vec<Vec<f64>> {
        let p = cfg.params_at(point);
        let rows = match kind {
            CommandKind::Trajectory => trajectory_rows(&p, cfg),
            CommandKind::SteadySweep => vec![steady_row(&p, cfg)],
            CommandKind::Threshold => vec![threshold_row(&p, cfg)],
            CommandKind::Stability => vec![stability_row(&p)],
            CommandKind::Calibrate => unreachable!(),
        };
        rows.into_iter().map(|r| point.iter().copied().chain(r).collect()).collect()
    };
    let blocks: Vec<Vec<Vec<f64>>> = pool.install(|| grid.par_iter().map(per_point).collect());

    let mut columns: Vec<Column> = cfg.sweep.iter().map(|a| Column::new(a.path.name(), a.path.unit())).collect();
    columns.extend(observable_columns(kind));
    let mut table = SweepTable::new(columns);
    for row in blocks.into_iter().flatten() {
        table.push(row);
    }
    if kind == CommandKind::Threshold {
        fill_threshold_ratio(&mut table);
    }
    Ok(table)
}

fn observable_columns(kind: CommandKind) -> Vec<Column> {
    let names: &[(&str, &str)] = match kind {
        CommandKind::Trajectory => &[
            ("t", "s"),
            ("N_n", ""),
            ("rho11", ""),
            ("rho22", ""),
            ("rho33", ""),
            ("re_rho21", ""),
            ("im_rho21", ""),
            ("trace_err", ""),
        ],
        CommandKind::SteadySweep => &[
            ("N_n", ""),
            ("n21", ""),
            ("n32", ""),
            ("nu_s", "rad/s"),
            ("excited_minus_ground", ""),
            ("residual", ""),
            ("stable", ""),
        ],
        CommandKind::Threshold => &[
            ("g_th_condition", "s^-1"),
            ("g_th_growth", "s^-1"),
            ("nu_s", "rad/s"),
            ("disagreement", ""),
            ("agrees", ""),
            ("has_threshold", ""),
            ("g_th_ratio", ""),
        ],
        CommandKind::Stability => &[
            ("gamma_s", "s^-1"),
            ("gamma_s/gamma_n", ""),
            ("leading_re", "s^-1"),
            ("leading_im", "rad/s"),
            ("nu_leading", "rad/s"),
        ],
        CommandKind::Calibrate => &[("omega_b_single", "rad/s"), ("threshold_ratio", "")],
    };
    names.iter().map(|(n, u)| Column::new(n, u)).chain([Column::new(CONVERGED, "")]).collect()
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Steady-state options derived from the single user tolerance.
pub fn steady_options(cfg: &RunConfig) -> SteadyOptions {
    let tol = cfg.run.tol;
    let mut o = SteadyOptions { tol: 1e-4 * tol, seed_amplitude: cfg.run.seed_amplitude, ..SteadyOptions::default() };
    o.controls.rel_tol = 1e-3 * tol;
    o.controls.abs_tol = 1e-6 * tol;
    o
}

pub fn trajectory_controls(cfg: &RunConfig) -> IntegratorControls {
    IntegratorControls { record_interval: cfg.run.record_interval, ..IntegratorControls::with_tolerances(cfg.run.tol, 1e-3 * cfg.run.tol) }
}

pub fn initial_state(p: &ModelParams, cfg: &RunConfig) -> Result<SpaserState, AnalysisError> {
    let seed = Complex64::new(cfg.run.seed_amplitude, 0.0);
    Ok(match cfg.run.initial {
        Initial::Ground => SpaserState::seeded_ground(cfg.run.seed_amplitude),
        Initial::Background => SpaserState::new(background_state(p)?, seed),
    })
}

fn state_row(t: f64, s: &SpaserState, converged: bool) -> Vec<f64> {
    let [r1, r2, r3] = s.rho.populations;
    vec![
        t,
        s.plasmon_number(),
        r1,
        r2,
        r3,
        s.rho.rho21.re,
        s.rho.rho21.im,
        (s.rho.trace() - 1.0).abs(),
        flag(converged),
    ]
}

fn trajectory_rows(p: &ModelParams, cfg: &RunConfig) -> Vec<Vec<f64>> {
    let s0 = match initial_state(p, cfg) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("no initial state: {e}");
            let mut row = vec![f64::NAN; 8];
            row.push(0.0);
            return vec![row];
        }
    };
    let controls = trajectory_controls(cfg);
    let mut rows = vec![state_row(0.0, &s0, true)];
    let mut last_recorded = 0.0;
    let outcome = integrate_with(&s0, p, cfg.run.t_end, &controls, |t, s| {
        if t - last_recorded >= controls.record_interval {
            rows.push(state_row(t, s, true));
            last_recorded = t;
        }
        Flow::Continue
    });
    match outcome {
        Ok(end) => {
            if rows.last().map(|r| r[0]) != Some(end.t) {
                rows.push(state_row(end.t, &end.state, true));
            }
        }
        Err(e) => {
            log::warn!("trajectory failed: {e}");
            for r in &mut rows {
                *r.last_mut().unwrap() = 0.0;
            }
            if let Some(s) = e.last_state() {
                rows.push(state_row(f64::NAN, s, false));
            }
        }
    }
    rows
}

fn steady_row(p: &ModelParams, cfg: &RunConfig) -> Vec<f64> {
    match steady_state_numeric(p, BranchHint::Spasing, &steady_options(cfg)) {
        Ok(r) => {
            let o = r.observables();
            vec![
                r.plasmon_number,
                r.n21,
                r.n32,
                r.nu_s,
                o.excited_minus_ground,
                r.residual_norm,
                flag(r.stable),
                flag(r.converged),
            ]
        }
        Err(e) => {
            log::warn!("steady state failed at g = {:e}, Ωa = {:e}: {e}", p.gain.pump_g, p.drive.omega_a_rabi);
            let mut row = vec![f64::NAN; 7];
            row.push(0.0);
            row
        }
    }
}

fn threshold_row(p: &ModelParams, cfg: &RunConfig) -> Vec<f64> {
    let found = match cfg.run.g_bracket {
        Some(b) => threshold_find(p, b),
        None => threshold_find_auto(p),
    };
    match found {
        Ok(t) => vec![
            t.g_th,
            t.g_th_growth.unwrap_or(f64::NAN),
            t.nu_s,
            t.relative_disagreement,
            flag(t.agrees),
            1.0,
            f64::NAN,
            1.0,
        ],
        // No threshold is an answer, not a failure.
        Err(AnalysisError::NoThreshold { .. }) => {
            vec![f64::NAN, f64::NAN, f64::NAN, f64::NAN, 0.0, 0.0, f64::NAN, 1.0]
        }
        Err(e) => {
            log::warn!("threshold search failed at Ωa = {:e}: {e}", p.drive.omega_a_rabi);
            vec![f64::NAN, f64::NAN, f64::NAN, f64::NAN, 0.0, 0.0, f64::NAN, 0.0]
        }
    }
}

/// Threshold of the first row over the threshold of each row.
fn fill_threshold_ratio(table: &mut SweepTable) {
    let (Some(g), Some(r)) = (table.column("g_th_condition"), table.column("g_th_ratio")) else {
        return;
    };
    let Some(first) = table.rows.first().map(|row| row[g]) else {
        return;
    };
    for row in &mut table.rows {
        row[r] = first / row[g];
    }
}

fn stability_row(p: &ModelParams) -> Vec<f64> {
    match growth_rate(p) {
        Ok(s) => vec![
            s.gamma_s,
            s.gamma_s_over_gamma_n,
            s.leading.eigenvalue.re,
            s.leading.eigenvalue.im,
            s.leading.frequency,
            1.0,
        ],
        Err(e) => {
            log::warn!("growth rate failed at g = {:e}, Ωa = {:e}: {e}", p.gain.pump_g, p.drive.omega_a_rabi);
            vec![f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, 0.0]
        }
    }
}

fn calibrate(cfg: &RunConfig) -> Result<SweepTable, CommandError> {
    if !cfg.sweep.is_empty() {
        log::warn!("calibrate ignores the sweep section");
    }
    let c = &cfg.run.calibration;
    let targets = CalibrationTargets { threshold_ratio: c.target_ratio, drive: c.drive, ..CalibrationTargets::default() };
    let mut table = SweepTable::new(observable_columns(CommandKind::Calibrate));
    match calibrate_coupling(&cfg.model, &targets, c.bracket) {
        Ok(r) => {
            for (w, ratio) in &r.curve {
                table.push(vec![*w, *ratio, 1.0]);
            }
            table.metadata.push(("calibrated_omega_b_single".into(), format!("{:.16e}", r.omega_b_single)));
            table.metadata.push(("calibrated_ratio".into(), format!("{:.16e}", r.ratio)));
            table.metadata.push(("g_th_undriven".into(), format!("{:.16e}", r.g_th_undriven)));
            table.metadata.push(("g_th_driven".into(), format!("{:.16e}", r.g_th_driven)));
        }
        Err(AnalysisError::CalibrationUnattainable { target, curve }) => {
            log::warn!("threshold ratio {target} not reached in the coupling bracket");
            for (w, ratio) in &curve {
                table.push(vec![*w, *ratio, 0.0]);
            }
            table.metadata.push(("calibrated_omega_b_single".into(), "unattainable".into()));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(table)
}
