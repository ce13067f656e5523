//! Barycenters of Gaussian processes in adapted Bures–Wasserstein space.
//!
//! The barycenter of `(L^i, λ_i)` minimizes `Σ_i λ_i d²_ABW(L, L^i)` over
//! classes `[L]`; its mean part is the weighted mean of the input means.
//!
//! [`solve_fixed_point`] alternates between the Procrustes rotations
//! `O_i = argmin_O ‖L − L^i O‖_F` and the weighted average
//! `L ← Σ_i λ_i L^i O_i`. The objective is non-increasing along the iterates.
//! Because the rotation of block column `t` only depends on column `t`, the
//! same iteration can be run one column at a time ([`solve_by_columns`]).
//!
//! The iteration is a local method. For `T ≥ 2` the rank-constrained column
//! problems can have fixed points that are not minimizers, and which one is
//! reached depends on the initialization. [`fixed_point_residual`] and
//! [`barycenter_objective`] certify a returned candidate; for `d = 1`,
//! [`sign_oracle_1d`] computes the global minimizer exactly.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{AbwError, Result};
use crate::matcore;
use crate::metrics;
use crate::process::{BlockOrthogonal, LowerBlockFactor};

const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Relative default for the displacement threshold, `δ = 1e-10 (1 + ‖L⁰‖_F)`.
const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;
pub const MAX_ORACLE_PROCESSES: usize = 15;
/// Below this amount of work per iteration the per-input loop stays serial.
const PAR_WORK_THRESHOLD: usize = 4096;

/// Checks `N ≥ 1`, positivity, and `Σ λ_i = 1 ± 1e-12`.
pub fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(AbwError::InvalidWeights("need at least one weight".into()));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(AbwError::InvalidWeights(format!(
            "weight {i} must be positive, got {w}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(AbwError::InvalidWeights(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Input processes `a^i + L^i G` with convex weights `λ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterProblem {
    factors: Vec<LowerBlockFactor>,
    means: Vec<DVector<f64>>,
    weights: Vec<f64>,
}

impl BarycenterProblem {
    pub fn new(
        factors: Vec<LowerBlockFactor>,
        means: Vec<DVector<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        validate_weights(&weights)?;
        if factors.len() != weights.len() {
            return Err(AbwError::DimensionMismatch {
                what: "number of factors vs weights",
                left: factors.len(),
                right: weights.len(),
            });
        }
        if means.len() != weights.len() {
            return Err(AbwError::DimensionMismatch {
                what: "number of means vs weights",
                left: means.len(),
                right: weights.len(),
            });
        }
        let first = &factors[0];
        for f in &factors[1..] {
            first.same_shape(f)?;
        }
        for m in &means {
            if m.len() != first.dim() {
                return Err(AbwError::DimensionMismatch {
                    what: "mean length vs d*T",
                    left: m.len(),
                    right: first.dim(),
                });
            }
        }
        Ok(Self {
            factors,
            means,
            weights,
        })
    }

    /// Zero-mean inputs.
    pub fn centered(factors: Vec<LowerBlockFactor>, weights: Vec<f64>) -> Result<Self> {
        let dim = factors.first().map(|f| f.dim()).unwrap_or(0);
        let means = vec![DVector::zeros(dim); factors.len()];
        Self::new(factors, means, weights)
    }

    /// Zero-mean inputs with equal weights.
    pub fn uniform(factors: Vec<LowerBlockFactor>) -> Result<Self> {
        let n = factors.len();
        Self::centered(factors, vec![1.0 / n as f64; n])
    }

    pub fn factors(&self) -> &[LowerBlockFactor] {
        &self.factors
    }

    pub fn means(&self) -> &[DVector<f64>] {
        &self.means
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn d(&self) -> usize {
        self.factors[0].d()
    }

    pub fn steps(&self) -> usize {
        self.factors[0].steps()
    }

    /// `Σ λ_i L^i` in input order.
    pub fn weighted_mean_factor(&self) -> LowerBlockFactor {
        let first = &self.factors[0];
        let mut acc = DMatrix::zeros(first.dim(), first.dim());
        for (w, f) in self.weights.iter().zip(&self.factors) {
            acc += f.matrix() * *w;
        }
        LowerBlockFactor::from_lower_part(first.d(), first.steps(), acc)
            .expect("sum of block-lower factors")
    }
}

/// Starting point `L⁰` of the iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    /// `Σ λ_i L^i`.
    #[default]
    WeightedMean,
    /// The `k`-th input factor.
    Input(usize),
    Explicit(LowerBlockFactor),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Displacement threshold `δ`; `None` means `1e-10 (1 + ‖L⁰‖_F)`.
    pub tolerance: Option<f64>,
    pub max_iterations: usize,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: None,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            init: Init::WeightedMean,
        }
    }
}

impl SolverConfig {
    pub fn with_init(init: Init) -> Self {
        Self {
            init,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(AbwError::InvalidConfig(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
        }
        if self.max_iterations == 0 {
            return Err(AbwError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn initial_factor(&self, problem: &BarycenterProblem) -> Result<LowerBlockFactor> {
        match &self.init {
            Init::WeightedMean => Ok(problem.weighted_mean_factor()),
            Init::Input(k) => problem.factors.get(*k).cloned().ok_or_else(|| {
                AbwError::InvalidConfig(format!(
                    "init index {k} out of range for {} inputs",
                    problem.len()
                ))
            }),
            Init::Explicit(f) => {
                problem.factors[0].same_shape(f)?;
                Ok(f.clone())
            }
        }
    }

    fn threshold(&self, initial: &LowerBlockFactor) -> f64 {
        self.tolerance
            .unwrap_or_else(|| DEFAULT_REL_TOL * (1.0 + initial.frobenius()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterResult {
    /// Canonicalized barycenter factor.
    pub factor: LowerBlockFactor,
    /// `Σ λ_i a^i`.
    pub mean: DVector<f64>,
    /// `Σ λ_i ‖L^(k) − L^i O_i^(k)‖²_F` for each visited iterate, the last
    /// entry being the returned point.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// `‖L̄ − Σ λ_i L^i O_i(L̄)‖_F`.
    pub residual: f64,
    pub converged: bool,
}

/// `a* = Σ λ_i a^i`, accumulated in input order.
pub fn mean_barycenter(means: &[DVector<f64>], weights: &[f64]) -> Result<DVector<f64>> {
    validate_weights(weights)?;
    if means.len() != weights.len() {
        return Err(AbwError::DimensionMismatch {
            what: "number of means vs weights",
            left: means.len(),
            right: weights.len(),
        });
    }
    let dim = means[0].len();
    let mut acc = DVector::zeros(dim);
    for (m, w) in means.iter().zip(weights) {
        if m.len() != dim {
            return Err(AbwError::DimensionMismatch {
                what: "mean lengths",
                left: m.len(),
                right: dim,
            });
        }
        acc += m * *w;
    }
    Ok(acc)
}

/// Optimal rotations `O_i(L)` for every input, in input order.
fn rotations_at(problem: &BarycenterProblem, current: &LowerBlockFactor) -> Vec<BlockOrthogonal> {
    let work = problem.len() * current.dim() * current.dim();
    let rotate = |f: &LowerBlockFactor| {
        metrics::abw_optimal_rotation(current, f).expect("shapes validated by the problem")
    };
    if work >= PAR_WORK_THRESHOLD {
        problem.factors.par_iter().map(rotate).collect()
    } else {
        problem.factors.iter().map(rotate).collect()
    }
}

/// Returns `(Σ λ_i L^i O_i, Σ λ_i ‖L − L^i O_i‖²_F)`.
fn average_rotated(
    problem: &BarycenterProblem,
    current: &LowerBlockFactor,
    rotations: &[BlockOrthogonal],
) -> (LowerBlockFactor, f64) {
    let mut acc = DMatrix::zeros(current.dim(), current.dim());
    let mut objective = 0.0;
    for ((f, o), w) in problem.factors.iter().zip(rotations).zip(&problem.weights) {
        let rotated = f.right_mul(o).expect("rotation shaped from the problem");
        objective += w * (current.matrix() - rotated.matrix()).norm_squared();
        acc += rotated.matrix() * *w;
    }
    let next = LowerBlockFactor::from_lower_part(current.d(), current.steps(), acc)
        .expect("sum of block-lower factors");
    (next, objective)
}

fn check_candidate(candidate: &LowerBlockFactor, problem: &BarycenterProblem) -> Result<()> {
    problem.factors[0].same_shape(candidate)
}

/// `‖L − Σ λ_i L^i O_i(L)‖_F`, zero exactly at solutions of the fixed-point
/// equation.
pub fn fixed_point_residual(candidate: &LowerBlockFactor, problem: &BarycenterProblem) -> Result<f64> {
    check_candidate(candidate, problem)?;
    let rotations = rotations_at(problem, candidate);
    let (next, _) = average_rotated(problem, candidate, &rotations);
    Ok((candidate.matrix() - next.matrix()).norm())
}

/// `Σ λ_i d²_ABW(L, L^i)`.
pub fn barycenter_objective(candidate: &LowerBlockFactor, problem: &BarycenterProblem) -> Result<f64> {
    check_candidate(candidate, problem)?;
    let mut total = 0.0;
    for (f, w) in problem.factors.iter().zip(&problem.weights) {
        total += w * metrics::abw_distance_sq(candidate, f)?;
    }
    Ok(total)
}

/// Alternating minimization over rotations and the barycenter factor.
///
/// Stops once `‖L^(k) − L^(k−1)‖_F < δ` or after `max_iterations` updates;
/// hitting the cap is reported through `converged = false`.
pub fn solve_fixed_point(problem: &BarycenterProblem, config: &SolverConfig) -> Result<BarycenterResult> {
    config.validate()?;
    let mut current = config.initial_factor(problem)?;
    let delta = config.threshold(&current);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        let rotations = rotations_at(problem, &current);
        let (next, objective) = average_rotated(problem, &current, &rotations);
        trace.push(objective);
        let displacement = (next.matrix() - current.matrix()).norm();
        current = next;
        iterations += 1;
        if displacement < delta {
            converged = true;
            break;
        }
    }

    let rotations = rotations_at(problem, &current);
    let (next, objective) = average_rotated(problem, &current, &rotations);
    trace.push(objective);
    let residual = (current.matrix() - next.matrix()).norm();

    Ok(BarycenterResult {
        factor: current.canonicalize(),
        mean: mean_barycenter(&problem.means, &problem.weights)?,
        objective_trace: trace,
        iterations,
        residual,
        converged,
    })
}

struct ColumnRun {
    column: DMatrix<f64>,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// The alternating iteration restricted to block column `t`.
fn solve_column(
    problem: &BarycenterProblem,
    t: usize,
    start: DMatrix<f64>,
    delta: f64,
    max_iterations: usize,
) -> ColumnRun {
    let inputs: Vec<DMatrix<f64>> = problem
        .factors
        .iter()
        .map(|f| f.column_view(t).into_owned())
        .collect();
    let step = |x: &DMatrix<f64>| {
        let mut acc = DMatrix::zeros(x.nrows(), x.ncols());
        let mut objective = 0.0;
        for (xi, w) in inputs.iter().zip(&problem.weights) {
            let o = matcore::procrustes_align(&(xi.transpose() * x)).rotation;
            let rotated = xi * o;
            objective += w * (x - &rotated).norm_squared();
            acc += rotated * *w;
        }
        (acc, objective)
    };

    let mut x = start;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        let (next, objective) = step(&x);
        trace.push(objective);
        let displacement = (&next - &x).norm();
        x = next;
        iterations += 1;
        if displacement < delta {
            converged = true;
            break;
        }
    }
    trace.push(step(&x).1);
    ColumnRun {
        column: x,
        trace,
        iterations,
        converged,
    }
}

/// Solves the `T` column problems independently (in parallel) and assembles
/// the barycenter from the resulting truncated columns. Each column uses the
/// threshold `δ / sqrt(T)`, so the assembled displacement stays below `δ`.
pub fn solve_by_columns(problem: &BarycenterProblem, config: &SolverConfig) -> Result<BarycenterResult> {
    config.validate()?;
    let initial = config.initial_factor(problem)?;
    let steps = initial.steps();
    let delta = config.threshold(&initial) / (steps as f64).sqrt();

    let runs: Vec<ColumnRun> = (0..steps)
        .into_par_iter()
        .map(|t| {
            let start = initial.column_view(t).into_owned();
            solve_column(problem, t, start, delta, config.max_iterations)
        })
        .collect();

    let mut factor = LowerBlockFactor::zeros(initial.d(), steps);
    for (t, run) in runs.iter().enumerate() {
        factor.set_truncated_column(t, &run.column)?;
    }
    let longest = runs.iter().map(|r| r.trace.len()).max().unwrap_or(0);
    let objective_trace = (0..longest)
        .map(|k| {
            runs.iter()
                .map(|r| r.trace[k.min(r.trace.len() - 1)])
                .sum()
        })
        .collect();
    let residual = fixed_point_residual(&factor, problem)?;

    Ok(BarycenterResult {
        factor: factor.canonicalize(),
        mean: mean_barycenter(&problem.means, &problem.weights)?,
        objective_trace,
        iterations: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
        residual,
        converged: runs.iter().all(|r| r.converged),
    })
}

fn require_scalar(problem: &BarycenterProblem) -> Result<()> {
    if problem.d() != 1 {
        return Err(AbwError::DimensionNotScalar { d: problem.d() });
    }
    if problem.len() > MAX_ORACLE_PROCESSES {
        return Err(AbwError::TooManyProcesses {
            n: problem.len(),
            max: MAX_ORACLE_PROCESSES,
        });
    }
    Ok(())
}

/// Sign vector maximizing `‖Σ λ_i ε_i L̃_t^i‖²` for column `t` of a scalar
/// problem, with the resulting column and its squared norm.
///
/// Enumerates `ε ∈ {±1}^N` with `ε_0 = +1` in lexicographic order (`+1`
/// before `−1`); the first maximizer wins ties.
pub fn optimal_signs_1d(problem: &BarycenterProblem, t: usize) -> Result<(Vec<f64>, DVector<f64>, f64)> {
    require_scalar(problem)?;
    if t >= problem.steps() {
        return Err(AbwError::IndexOutOfRange {
            index: t,
            steps: problem.steps(),
        });
    }
    let n = problem.len();
    let columns: Vec<DVector<f64>> = problem
        .factors
        .iter()
        .zip(&problem.weights)
        .map(|(f, w)| f.column_view(t).column(0) * *w)
        .collect();

    let signs_of = |mask: usize| -> Vec<f64> {
        (0..n)
            .map(|i| {
                if i > 0 && (mask >> (n - 1 - i)) & 1 == 1 {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect()
    };
    let combine = |signs: &[f64]| {
        let mut acc = DVector::zeros(columns[0].len());
        for (c, s) in columns.iter().zip(signs) {
            acc += c * *s;
        }
        acc
    };

    let mut best: Option<(Vec<f64>, DVector<f64>, f64)> = None;
    for mask in 0..(1usize << (n - 1)) {
        let signs = signs_of(mask);
        let column = combine(&signs);
        let value = column.norm_squared();
        let better = match &best {
            None => true,
            Some((_, _, b)) => value > b + 1e-12 * b.max(1.0),
        };
        if better {
            best = Some((signs, column, value));
        }
    }
    Ok(best.expect("at least one sign vector"))
}

/// Exact barycenter of a scalar problem by exhaustive sign enumeration,
/// column by column.
pub fn sign_oracle_1d(problem: &BarycenterProblem) -> Result<BarycenterResult> {
    require_scalar(problem)?;
    let steps = problem.steps();
    let mut factor = LowerBlockFactor::zeros(1, steps);
    for t in 0..steps {
        let (_, column, _) = optimal_signs_1d(problem, t)?;
        factor.set_truncated_column(t, &DMatrix::from_column_slice(column.len(), 1, column.as_slice()))?;
    }
    let objective = barycenter_objective(&factor, problem)?;
    let residual = fixed_point_residual(&factor, problem)?;
    Ok(BarycenterResult {
        factor: factor.canonicalize(),
        mean: mean_barycenter(&problem.means, &problem.weights)?,
        objective_trace: vec![objective],
        iterations: 1,
        residual,
        converged: true,
    })
}

/// AR(1) structure test for scalar factors: for each `t ≥ 1` the ratios
/// `L_{t,s} / L_{t−1,s}` over `s < t` with `|L_{t−1,s}| > tol` must agree
/// within `tol` (relative).
pub fn is_ar1(factor: &LowerBlockFactor, tol: f64) -> Result<bool> {
    if factor.d() != 1 {
        return Err(AbwError::DimensionNotScalar { d: factor.d() });
    }
    let m = factor.matrix();
    for t in 1..factor.steps() {
        let mut ratios = (0..t)
            .filter(|&s| m[(t - 1, s)].abs() > tol)
            .map(|s| m[(t, s)] / m[(t - 1, s)]);
        if let Some(first) = ratios.next() {
            if ratios.any(|r| (r - first).abs() > tol * first.abs().max(1.0)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalConfig {
    /// Fixed-point residual threshold, relative to `1 + ‖Σ̄‖_F`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-11,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalResult {
    pub covariance: DMatrix<f64>,
    pub iterations: usize,
    /// `‖Σ̄ − Σ λ_i (Σ̄^{1/2} Σ^i Σ̄^{1/2})^{1/2}‖_F`.
    pub residual: f64,
    pub converged: bool,
}

/// `Σ_i λ_i (S^{1/2} Σ^i S^{1/2})^{1/2}`.
fn classical_mean_map(current: &DMatrix<f64>, covariances: &[DMatrix<f64>], weights: &[f64]) -> Result<DMatrix<f64>> {
    let root = matcore::psd_sqrt(current)?;
    let mut acc = DMatrix::zeros(current.nrows(), current.ncols());
    for (c, w) in covariances.iter().zip(weights) {
        let inner = matcore::symmetrize(&(&root * c * &root));
        acc += matcore::psd_sqrt(&inner)? * *w;
    }
    Ok(matcore::symmetrize(&acc))
}

/// Residual of the classical fixed-point equation at `candidate`.
pub fn classical_residual(candidate: &DMatrix<f64>, covariances: &[DMatrix<f64>], weights: &[f64]) -> Result<f64> {
    let mapped = classical_mean_map(candidate, covariances, weights)?;
    Ok((candidate - mapped).norm())
}

/// Classical Bures–Wasserstein barycenter of positive definite covariances.
///
/// Iterates `Σ ← Σ^{-1/2} (Σ_i λ_i (Σ^{1/2} Σ^i Σ^{1/2})^{1/2})² Σ^{-1/2}`
/// from the weighted arithmetic mean until the fixed-point residual drops
/// below `tolerance · (1 + ‖Σ‖_F)`. Inputs with smallest eigenvalue at or
/// below `1e-10 ‖Σ^i‖_F` receive a jitter `ε I`, `ε = 1e-10 · mean trace`.
pub fn classical_bw_barycenter(
    covariances: &[DMatrix<f64>],
    weights: &[f64],
    config: &ClassicalConfig,
) -> Result<ClassicalResult> {
    validate_weights(weights)?;
    if covariances.len() != weights.len() {
        return Err(AbwError::DimensionMismatch {
            what: "number of covariances vs weights",
            left: covariances.len(),
            right: weights.len(),
        });
    }
    if !(config.tolerance > 0.0) || config.max_iterations == 0 {
        return Err(AbwError::InvalidConfig(
            "classical solver needs tolerance > 0 and max_iterations >= 1".into(),
        ));
    }
    let n = covariances[0].nrows();
    for c in covariances {
        matcore::check_symmetric(c)?;
        if c.nrows() != n {
            return Err(AbwError::DimensionMismatch {
                what: "covariance sizes",
                left: c.nrows(),
                right: n,
            });
        }
    }
    let mean_trace = covariances.iter().map(|c| c.trace()).sum::<f64>() / covariances.len() as f64;
    let jitter = 1e-10 * mean_trace;
    let mut inputs = Vec::with_capacity(covariances.len());
    for (index, c) in covariances.iter().enumerate() {
        let c = matcore::symmetrize(c);
        let min = matcore::min_eigenvalue(&c);
        if min > 1e-10 * c.norm() {
            inputs.push(c);
            continue;
        }
        let repaired = &c + DMatrix::identity(n, n) * jitter;
        let repaired_min = matcore::min_eigenvalue(&repaired);
        if !(repaired_min > 0.5 * jitter) {
            return Err(AbwError::SingularInput {
                index,
                min_eigenvalue: min,
            });
        }
        inputs.push(repaired);
    }

    let mut current = DMatrix::zeros(n, n);
    for (c, w) in inputs.iter().zip(weights) {
        current += c * *w;
    }
    let mut iterations = 0;
    loop {
        let mapped = classical_mean_map(&current, &inputs, weights)?;
        let residual = (&current - &mapped).norm();
        if residual <= config.tolerance * (1.0 + current.norm()) {
            return Ok(ClassicalResult {
                covariance: current,
                iterations,
                residual,
                converged: true,
            });
        }
        if iterations >= config.max_iterations {
            return Ok(ClassicalResult {
                covariance: current,
                iterations,
                residual,
                converged: false,
            });
        }
        let inv_root = matcore::psd_inv_sqrt(&current, 0.0)?;
        current = matcore::symmetrize(&(&inv_root * &mapped * &mapped * &inv_root));
        iterations += 1;
    }
}
