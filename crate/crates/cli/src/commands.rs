use std::path::{Path, PathBuf};

use abw_core::barycenter::{
    self, classical_bw_barycenter, solve_by_columns, solve_fixed_point, BarycenterProblem,
    BarycenterResult, ClassicalConfig, SolverConfig,
};
use abw_core::metrics;
use abw_core::process::{ar1_factor, GaussianProcess};
use abw_core::simulate;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::io;
use crate::{CliError, CliResult, Method, Options};

/// Tolerance of the `--check-decomposition` identity, relative to `max(1, d²)`.
pub const DECOMPOSITION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub aw2: f64,
    pub abw: f64,
    pub abw_via_columns: f64,
    pub mean_gap: f64,
}

pub fn distance_report(x: &GaussianProcess, y: &GaussianProcess) -> CliResult<DistanceReport> {
    Ok(DistanceReport {
        aw2: metrics::aw2_distance(x, y)?,
        abw: metrics::abw_distance(x.factor(), y.factor())?,
        abw_via_columns: metrics::abw_via_columns(x.factor(), y.factor())?,
        mean_gap: (x.mean() - y.mean()).norm(),
    })
}

pub fn distance(first: &Path, second: &Path, opts: &Options) -> CliResult<()> {
    let x = io::read_process(first)?;
    let y = io::read_process(second)?;
    io::check_compatible(&[x.clone(), y.clone()], &[first, second])?;
    let report = distance_report(&x, &y)?;
    let text = io::to_json(&report);
    print!("{text}");
    if let Some(out) = &opts.out {
        io::write_text(out, &text)?;
    }
    if opts.check_decomposition {
        let sq = report.abw * report.abw;
        let gap = (sq - report.abw_via_columns * report.abw_via_columns).abs();
        if gap > DECOMPOSITION_TOL * sq.max(1.0) {
            return Err(CliError::check_failed(format!(
                "column decomposition differs from the nuclear-norm form by {gap:e}"
            )));
        }
    }
    Ok(())
}

/// Uniform weights when `raw` is `None`; otherwise validated and normalized,
/// with a warning on stderr when the sum is not 1.
pub fn resolve_weights(raw: Option<&[f64]>, n: usize) -> CliResult<Vec<f64>> {
    let Some(raw) = raw else {
        return Ok(vec![1.0 / n as f64; n]);
    };
    if raw.len() != n {
        return Err(CliError::invalid(format!(
            "--weights: expected {n} values (one per input), got {}",
            raw.len()
        )));
    }
    if let Some((i, w)) = raw.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(CliError::invalid(format!("--weights: entry {i} must be positive, got {w}")));
    }
    let total: f64 = raw.iter().sum();
    if (total - 1.0).abs() <= 1e-12 {
        return Ok(raw.to_vec());
    }
    eprintln!("warning: weights sum to {total}; normalizing");
    Ok(raw.iter().map(|w| w / total).collect())
}

pub fn solver_config(opts: &Options) -> CliResult<SolverConfig> {
    let mut config = SolverConfig::default();
    if let Some(tol) = opts.tol {
        if !(tol > 0.0) {
            return Err(CliError::invalid(format!("--tol must be positive, got {tol}")));
        }
        config.tolerance = Some(tol);
    }
    if let Some(max_iter) = opts.max_iter {
        if max_iter == 0 {
            return Err(CliError::invalid("--max-iter must be at least 1"));
        }
        config.max_iterations = max_iter;
    }
    Ok(config)
}

pub fn solve(problem: &BarycenterProblem, method: Method, config: &SolverConfig) -> CliResult<BarycenterResult> {
    Ok(match method {
        Method::FixedPoint => solve_fixed_point(problem, config)?,
        Method::Columns => solve_by_columns(problem, config)?,
        Method::Oracle1d => barycenter::sign_oracle_1d(problem)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub method: String,
    pub inputs: usize,
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub objective: f64,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalDiagnostics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalDiagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Per-step variance (trace of the diagonal `d × d` block) of a covariance.
pub fn block_variances(cov: &DMatrix<f64>, d: usize) -> Vec<f64> {
    (0..cov.nrows() / d)
        .map(|t| cov.view((t * d, t * d), (d, d)).trace())
        .collect()
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::FixedPoint => "fixed-point",
        Method::Columns => "columns",
        Method::Oracle1d => "oracle-1d",
    }
}

pub fn barycenter(inputs: &[PathBuf], opts: &Options) -> CliResult<()> {
    let processes = inputs
        .iter()
        .map(|p| io::read_process(p))
        .collect::<CliResult<Vec<_>>>()?;
    io::check_compatible(&processes, inputs)?;
    let weights = resolve_weights(opts.weights.as_deref(), processes.len())?;
    let config = solver_config(opts)?;
    let method = opts.method.unwrap_or_default();
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from("barycenter_out"));

    let (means, factors) = processes.into_iter().map(GaussianProcess::into_parts).unzip();
    let problem = BarycenterProblem::new(factors, means, weights.clone())?;
    let result = solve(&problem, method, &config)?;
    let process = GaussianProcess::new(result.mean.clone(), result.factor.clone())?;
    io::write_process(&dir.join("barycenter.json"), &process)?;

    let mut classical = None;
    if opts.classical_compare {
        let covs: Vec<_> = problem.factors().iter().map(|f| f.covariance()).collect();
        let c = classical_bw_barycenter(&covs, &weights, &ClassicalConfig::default())?;
        io::write_matrix(&dir.join("classical_covariance.csv"), &c.covariance)?;
        let d = problem.d();
        let adapted = block_variances(&result.factor.covariance(), d);
        let rows: Vec<Vec<f64>> = adapted
            .iter()
            .zip(block_variances(&c.covariance, d))
            .enumerate()
            .map(|(t, (a, b))| vec![(t + 1) as f64, *a, b])
            .collect();
        io::write_table(&dir.join("comparison.csv"), &["t", "var_abw", "var_bw"], &rows)?;
        classical = Some(ClassicalDiagnostics {
            iterations: c.iterations,
            residual: c.residual,
            converged: c.converged,
        });
    }

    let diagnostics = Diagnostics {
        method: method_name(method).into(),
        inputs: problem.len(),
        weights,
        iterations: result.iterations,
        residual: result.residual,
        objective: *result.objective_trace.last().unwrap_or(&0.0),
        converged: result.converged,
        objective_trace: result.objective_trace.clone(),
        classical: classical.clone(),
    };
    io::write_json(&dir.join("diagnostics.json"), &diagnostics)?;

    if !result.converged {
        return Err(CliError::not_converged(format!(
            "barycenter iteration stopped after {} iterations (residual {:e})",
            result.iterations, result.residual
        )));
    }
    if classical.is_some_and(|c| !c.converged) {
        return Err(CliError::not_converged("classical barycenter iteration did not converge"));
    }
    Ok(())
}

pub fn ar1(spec_path: &Path, opts: &Options) -> CliResult<()> {
    let spec = io::read_ar1(spec_path)?;
    let process = GaussianProcess::centered(ar1_factor(&spec));
    match &opts.out {
        Some(out) => io::write_process(out, &process),
        None => {
            print!("{}", io::to_json(&abw_core::process::json::ProcessFile::from_process(&process)));
            Ok(())
        }
    }
}

/// Header `path_id,t1,…,tT` for `d = 1`, `path_id,t1_1,…,tT_d` otherwise.
pub fn path_header(d: usize, steps: usize) -> Vec<String> {
    let mut header = vec!["path_id".to_string()];
    for t in 1..=steps {
        if d == 1 {
            header.push(format!("t{t}"));
        } else {
            header.extend((1..=d).map(|k| format!("t{t}_{k}")));
        }
    }
    header
}

pub fn paths_csv(paths: &DMatrix<f64>, d: usize, steps: usize) -> String {
    let rows: Vec<Vec<String>> = paths
        .row_iter()
        .enumerate()
        .map(|(i, r)| {
            std::iter::once((i + 1).to_string())
                .chain(r.iter().map(|v| v.to_string()))
                .collect()
        })
        .collect();
    io::table_csv(&path_header(d, steps), &rows)
}

pub fn simulate(process_path: &Path, n_paths: usize, opts: &Options) -> CliResult<()> {
    if n_paths == 0 {
        return Err(CliError::invalid("--paths must be at least 1"));
    }
    let process = io::read_process(process_path)?;
    let paths = simulate::sample_paths(&process, n_paths, opts.seed.unwrap_or(0));
    let text = paths_csv(&paths, process.factor().d(), process.factor().steps());
    match &opts.out {
        Some(out) => io::write_text(out, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
