//! The `run`, `scan`, and `stability` subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use gardner_espline::diagnostics::{
    amplification_factors, conservation, default_epsilon, linf_error, zeta_scan, Drift,
    ErrorReport,
};
use gardner_espline::espline_basis::{compute_basis_constants, SplinePieceCoefficients};
use gardner_espline::problem_model::{
    derivative_fallback, example1_spec, example2_spec, example3_spec, GardnerParameters, Grid,
    ProblemSpec, SpatialFn,
};
use gardner_espline::solver_core::{evaluate_solution, run, SplineState};

use crate::config::{emit, parse_config, Experiment, RunConfig};
use crate::error::CliError;
use crate::expr::parse_expression;
use crate::output::{csv, csv_safe, sci, write_file};

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

/// Turns a configuration into a solvable problem.  The three built-in
/// experiments keep their published parameters with only the horizon
/// overridden; a custom experiment compiles its initial-profile
/// expression and differentiates it numerically for the auxiliary field.
pub fn build_problem(config: &RunConfig) -> Result<ProblemSpec<f64>, CliError> {
    let mut spec = match config.experiment {
        Experiment::Example1 => example1_spec(config.n, config.dt, config.zeta)?,
        Experiment::Example2 => example2_spec(config.n, config.dt, config.zeta)?,
        Experiment::Example3 => example3_spec(config.n, config.dt, config.zeta)?,
        Experiment::Custom => {
            let c = config.custom.as_ref().expect("checked by parse_config");
            let params = GardnerParameters::new(c.mu1, c.mu2, c.mu3)?;
            let grid = Grid::new(c.domain.0, c.domain.1, config.n)?;
            let ast = Arc::new(parse_expression(&c.initial).expect("checked by parse_config"));
            let initial_u: SpatialFn<f64> = Arc::new(move |x: f64| ast.eval(x));
            let initial_v = derivative_fallback(&initial_u, &grid);
            ProblemSpec {
                params,
                grid,
                dt: config.dt,
                zeta: config.zeta,
                t_end: config.t_end,
                initial_u,
                initial_v,
                analytical: None,
                analytical_ux: None,
            }
        }
    };
    spec.t_end = config.t_end;
    Ok(spec)
}

pub fn cmd_run(config_path: &Path) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    run_experiment(&config)
}

/// Solves one configured experiment and writes `snapshots.csv`,
/// `conservation.csv`, `errors.csv` (only when an exact solution exists),
/// and `run_summary.txt` into the output directory.  On a numerical
/// breakdown the summary still gets written, with the failing step index,
/// before the error is propagated (exit code 2).
pub fn run_experiment(config: &RunConfig) -> Result<(), CliError> {
    let spec = build_problem(config)?;
    let steps = spec.step_count();

    // requested times snap to the nearest completed step
    let index_of = |t: f64| -> usize {
        let i = (t / spec.dt).round();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(steps)
        }
    };

    let mut wanted: BTreeSet<usize> = BTreeSet::new();
    wanted.insert(0);
    for &t in config.snapshot_times.iter().chain(config.report_times.iter()) {
        wanted.insert(index_of(t));
    }

    let mut captured: BTreeMap<usize, SplineState<f64>> = BTreeMap::new();
    let mut counter = 0usize;
    let outcome = {
        let mut observer = |st: &SplineState<f64>| {
            if wanted.contains(&counter) {
                captured.insert(counter, st.clone());
            }
            counter += 1;
        };
        run(&spec, &mut [&mut observer])
    };

    if let Err(e) = outcome {
        let cli = CliError::from(e);
        let mut summary = emit(config);
        summary.push_str(&format!("h = {}\nsteps = {}\n", spec.grid.h, steps));
        match &cli {
            CliError::Breakdown { step } => {
                summary.push_str(&format!("status = breakdown\nbreakdown_step = {step}\n"));
            }
            other => {
                summary.push_str(&format!("status = error\nerror = {other}\n"));
            }
        }
        write_file(&config.output_dir.join("run_summary.txt"), &summary)?;
        return Err(cli);
    }

    // snapshots.csv: full profiles on a uniform fine grid
    let pieces = SplinePieceCoefficients::new(spec.zeta, spec.grid.a, spec.grid.h, spec.grid.n)?;
    let span = spec.grid.b - spec.grid.a;
    let intervals = ((span * config.snapshot_density).round() as usize).max(1);
    let mut xs: Vec<f64> = (0..=intervals)
        .map(|k| spec.grid.a + span * k as f64 / intervals as f64)
        .collect();
    *xs.last_mut().expect("at least two points") = spec.grid.b;

    let mut sorted_snapshots = config.snapshot_times.clone();
    sorted_snapshots.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &target in &sorted_snapshots {
        let state = &captured[&index_of(target)];
        for &x in &xs {
            let (u, _ux, v) = evaluate_solution(state, x, &pieces)?;
            rows.push(vec![sci(state.t), sci(x), sci(u), sci(v)]);
        }
    }
    write_file(&config.output_dir.join("snapshots.csv"), &csv("t,x,u,v", &rows))?;

    // conservation.csv: invariants and their relative drifts
    let baseline = conservation(&captured[&0], &spec, None)?;
    let drift_value = |d: &Option<Drift<f64>>| d.as_ref().map(|d| d.value).unwrap_or(0.0);
    let mut sorted_reports = config.report_times.clone();
    sorted_reports.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &target in &sorted_reports {
        let state = &captured[&index_of(target)];
        let rep = conservation(state, &spec, Some(&baseline))?;
        rows.push(vec![
            sci(rep.t),
            sci(rep.m),
            sci(rep.e),
            sci(rep.h),
            sci(drift_value(&rep.c_m)),
            sci(drift_value(&rep.c_e)),
            sci(drift_value(&rep.c_h)),
        ]);
    }
    write_file(
        &config.output_dir.join("conservation.csv"),
        &csv("t,M,E,H,C_M,C_E,C_H", &rows),
    )?;

    // errors.csv: only when an exact solution exists
    let mut final_error: Option<ErrorReport<f64>> = None;
    if spec.analytical.is_some() {
        let mut rows = Vec::new();
        for &target in &sorted_reports {
            let state = &captured[&index_of(target)];
            let report = linf_error(state, &spec)?;
            rows.push(vec![
                sci(report.t),
                sci(report.linf),
                sci(spec.grid.node(report.argmax_node)),
            ]);
            final_error = Some(report);
        }
        write_file(
            &config.output_dir.join("errors.csv"),
            &csv("t,linf,argmax_x", &rows),
        )?;
    }

    let mut summary = emit(config);
    summary.push_str(&format!(
        "h = {}\nsteps = {}\nstatus = ok\n",
        spec.grid.h, steps
    ));
    write_file(&config.output_dir.join("run_summary.txt"), &summary)?;

    println!("wrote {}", config.output_dir.join("snapshots.csv").display());
    println!("wrote {}", config.output_dir.join("conservation.csv").display());
    if spec.analytical.is_some() {
        println!("wrote {}", config.output_dir.join("errors.csv").display());
    }
    println!("wrote {}", config.output_dir.join("run_summary.txt").display());
    if let Some(report) = final_error {
        println!("final linf = {} at t = {}", sci(report.linf), sci(report.t));
    }
    Ok(())
}

/// The shape-parameter grid of the `scan` subcommand: `points` values
/// from `min` to `max`, spaced linearly or in the exponent.
pub fn scan_grid(min: f64, max: f64, points: usize, log_spaced: bool) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    (0..points)
        .map(|k| {
            let f = k as f64 / (points - 1) as f64;
            if log_spaced {
                10f64.powf(min.log10() + f * (max.log10() - min.log10()))
            } else {
                min + f * (max - min)
            }
        })
        .collect()
}

pub fn cmd_scan(
    config_path: &Path,
    zeta_min: f64,
    zeta_max: f64,
    points: usize,
    log_spaced: bool,
) -> Result<(), CliError> {
    if !(zeta_min > 0.0 && zeta_min.is_finite() && zeta_max.is_finite()) {
        return Err(CliError::Usage(
            "--zeta-min and --zeta-max must be finite and > 0".to_string(),
        ));
    }
    if zeta_max < zeta_min {
        return Err(CliError::Usage(
            "--zeta-max must not be smaller than --zeta-min".to_string(),
        ));
    }
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".to_string()));
    }
    let config = load_config(config_path)?;
    let spec = build_problem(&config)?;
    let grid = scan_grid(zeta_min, zeta_max, points, log_spaced);
    let (best, table) = zeta_scan(&spec, &grid, config.t_end)?;
    let best_linf = table
        .iter()
        .find(|(z, r)| *z == best && r.is_ok())
        .and_then(|(_, r)| r.as_ref().ok().copied())
        .unwrap_or(f64::NAN);

    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|(z, r)| match r {
            Ok(l) => vec![sci(*z), sci(*l), "ok".to_string()],
            Err(e) => vec![sci(*z), String::new(), csv_safe(format!("failed: {e}"))],
        })
        .collect();
    write_file(
        &config.output_dir.join("scan.csv"),
        &csv("zeta,linf,status", &rows),
    )?;
    println!("wrote {}", config.output_dir.join("scan.csv").display());
    println!("best zeta = {} (linf = {})", sci(best), sci(best_linf));
    Ok(())
}

pub fn cmd_stability(
    config_path: &Path,
    epsilon: Option<f64>,
    phases: usize,
) -> Result<(), CliError> {
    if phases == 0 {
        return Err(CliError::Usage("--phases must be at least 1".to_string()));
    }
    if let Some(e) = epsilon {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(CliError::Usage(
                "--epsilon must be finite and >= 0".to_string(),
            ));
        }
    }
    let config = load_config(config_path)?;
    let spec = build_problem(&config)?;
    spec.validate()?;
    let k = compute_basis_constants(spec.zeta, spec.grid.h)?;
    let eps = epsilon.unwrap_or_else(|| default_epsilon(&spec));
    let grid: Vec<f64> = (0..=phases)
        .map(|j| std::f64::consts::PI * j as f64 / phases as f64)
        .collect();
    let samples = amplification_factors(&spec, &k, eps, &grid);

    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![
                sci(s.phase),
                sci(s.rho_momentum),
                sci(s.rho_constraint),
                sci(s.epsilon),
            ]
        })
        .collect();
    write_file(
        &config.output_dir.join("stability.csv"),
        &csv("phase,rho_momentum,rho_constraint,epsilon", &rows),
    )?;
    let max_momentum = samples.iter().map(|s| s.rho_momentum).fold(0.0, f64::max);
    let max_constraint = samples.iter().map(|s| s.rho_constraint).fold(0.0, f64::max);
    println!("wrote {}", config.output_dir.join("stability.csv").display());
    println!(
        "max modulus over {} phases: momentum {}, constraint {}",
        samples.len(),
        sci(max_momentum),
        sci(max_constraint)
    );
    Ok(())
}
