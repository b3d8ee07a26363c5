//! Numerical maximization of the flow on the simplex: a projected-gradient
//! ascent baseline and a replicator-dynamics heuristic whose fixed points
//! expose cliques.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clique::{verify_clique, CliqueResult};
use crate::error::{Error, Result};
use crate::graph::{Graph, LoadVector};
use crate::report::{Diagnostics, Method, SolveReport};

/// Default threshold (relative to the budget) for support extraction.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-6;

/// Knobs shared by both iterative solvers.
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub max_iters: usize,
    /// Stop when the flow improves by less than `tolerance * D^2` and the
    /// iterate moves by less than `tolerance * D`.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_iters: 10_000,
            tolerance: 1e-10,
            restarts: 20,
            seed: 0,
        }
    }
}

impl SolverParams {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        Ok(())
    }
}

/// Euclidean projection onto `{ m >= 0, Σ m = total }` by sort-based
/// thresholding.
pub fn project_simplex(v: &[f64], total: f64) -> Result<LoadVector> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonPositiveTotal(total));
    }
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
    let mut cumulative = 0.0;
    let mut threshold = (sorted[0] - total).max(0.0);
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - total) / (k + 1) as f64;
        if u - t > 0.0 {
            threshold = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - threshold).max(0.0)).collect();
    let sum: f64 = out.iter().sum();
    if (sum - total).abs() > 1e-12 * total {
        // pathological magnitudes only; rescale onto the simplex
        let scale = total / sum;
        for x in &mut out {
            *x *= scale;
        }
    }
    LoadVector::with_total(out, total)
}

fn mat_vec(g: &Graph, v: &[f64]) -> Vec<f64> {
    (0..g.n()).map(|i| g.neighbor_sum_of(v, i)).collect()
}

/// Uniform sample from the simplex via normalized exponential spacings.
fn sample_simplex(rng: &mut ChaCha8Rng, n: usize, total: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut sum = 0.0;
    for _ in 0..n {
        let u: f64 = rng.gen();
        let e = -(1.0 - u).ln();
        out.push(e);
        sum += e;
    }
    for x in &mut out {
        *x *= total / sum;
    }
    out
}

/// Lexicographic order on load vectors, used to make the multi-start
/// reduction independent of evaluation order.
fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

struct StartOutcome {
    values: Vec<f64>,
    flow: f64,
    iterations: usize,
    converged: bool,
}

fn ascend_from(g: &Graph, start: Vec<f64>, total: f64, params: &SolverParams) -> StartOutcome {
    let c = g.flow_factor();
    let max_degree = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0).max(1);
    let base_step = 1.0 / (c * max_degree as f64);
    let flow_tol = params.tolerance * total * total;
    let move_tol = params.tolerance * total;

    let mut m = start;
    let mut flow = g.flow_of(&m).expect("start has length n");
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..params.max_iters {
        iterations += 1;
        let grad: Vec<f64> = mat_vec(g, &m).iter().map(|x| c * x).collect();
        let mut step = base_step;
        let mut accepted = None;
        // backtracking: halve until the projected point does not lose flow
        while step > base_step * 1e-18 {
            let trial: Vec<f64> = m.iter().zip(&grad).map(|(x, d)| x + step * d).collect();
            let projected = project_simplex(&trial, total)
                .expect("ascent iterates stay finite")
                .into_values();
            let trial_flow = g.flow_of(&projected).expect("same length");
            if trial_flow >= flow {
                accepted = Some((projected, trial_flow));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_flow)) = accepted else {
            converged = true;
            break;
        };
        let movement = m
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let gain = next_flow - flow;
        m = next;
        flow = next_flow;
        if gain < flow_tol && movement < move_tol {
            converged = true;
            break;
        }
    }
    StartOutcome {
        values: m,
        flow,
        iterations,
        converged,
    }
}

/// First-order stationarity residual at `m`: deviation of the scaled
/// gradient from a common multiplier on the support, plus any excess above
/// it off the support.
pub fn kkt_residual(g: &Graph, m: &LoadVector) -> Result<f64> {
    if m.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: m.len(),
        });
    }
    let c = g.flow_factor();
    let grad: Vec<f64> = mat_vec(g, m.values()).iter().map(|x| c * x).collect();
    let support_cut = 1e-8 * m.total();
    let support: Vec<usize> = (0..m.len()).filter(|&i| m.get(i) > support_cut).collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let mu = support.iter().map(|&i| grad[i]).sum::<f64>() / support.len() as f64;
    let mut residual = 0.0f64;
    for (i, &gi) in grad.iter().enumerate() {
        if m.get(i) > support_cut {
            residual = residual.max((gi - mu).abs());
        } else {
            residual = residual.max(gi - mu);
        }
    }
    Ok(residual.max(0.0))
}

/// Projected-gradient ascent with backtracking line search and multi-start:
/// the barycenter plus seeded random simplex points.
pub fn projected_gradient_ascent(g: &Graph, total: f64, params: &SolverParams) -> Result<SolveReport> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonPositiveTotal(total));
    }
    params.validate()?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<StartOutcome> = None;
    let mut total_iterations = 0;
    let mut all_converged = true;
    for restart in 0..params.restarts {
        let start = if restart == 0 {
            vec![total / n as f64; n]
        } else {
            sample_simplex(&mut rng, n, total)
        };
        let outcome = ascend_from(g, start, total, params);
        total_iterations += outcome.iterations;
        all_converged &= outcome.converged;
        let better = match &best {
            None => true,
            Some(b) => {
                outcome.flow > b.flow
                    || (outcome.flow == b.flow && lex_less(&outcome.values, &b.values))
            }
        };
        if better {
            best = Some(outcome);
        }
    }
    let best = best.expect("restarts >= 1");
    let loads = LoadVector::with_total(best.values, total)?;
    let stationarity = kkt_residual(g, &loads)?;
    let flow = g.flow(&loads)?;
    Ok(SolveReport {
        method: Method::ProjectedGradient,
        loads,
        flow,
        clique: None,
        trace: None,
        diagnostics: Diagnostics {
            iterations: total_iterations,
            restarts: params.restarts,
            converged: all_converged,
            stationarity: Some(stationarity),
        },
    })
}

/// One multiplicative update `m'_i = m_i (Am)_i / (mᵀAm)`, stated for a unit
/// budget and scaled in and out for a general one. Fails on a stationary
/// zero of the quadratic form.
pub fn replicator_step(g: &Graph, m: &LoadVector) -> Result<LoadVector> {
    if m.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: m.len(),
        });
    }
    let total = m.total();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonPositiveTotal(total));
    }
    let y: Vec<f64> = m.values().iter().map(|&x| x / total).collect();
    let ay = mat_vec(g, &y);
    let q: f64 = y.iter().zip(&ay).map(|(a, b)| a * b).sum();
    if q <= 0.0 {
        return Err(Error::StationaryZero);
    }
    let next: Vec<f64> = y
        .iter()
        .zip(&ay)
        .map(|(&yi, &ai)| total * yi * ai / q)
        .collect();
    LoadVector::with_total(next, total)
}

/// Replicator dynamics from seeded random interior starts; the best start is
/// reported. Flow trajectories are nondecreasing per start.
pub fn replicator_solve(g: &Graph, total: f64, params: &SolverParams) -> Result<SolveReport> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonPositiveTotal(total));
    }
    params.validate()?;
    if g.edge_count() == 0 {
        return Err(Error::DegenerateGraph);
    }
    let n = g.n();
    let move_tol = params.tolerance * total;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut total_iterations = 0;
    for _ in 0..params.restarts {
        let mut m = LoadVector::with_total(sample_simplex(&mut rng, n, total), total)?;
        let mut converged = false;
        for _ in 0..params.max_iters {
            total_iterations += 1;
            let next = match replicator_step(g, &m) {
                Ok(next) => next,
                Err(Error::StationaryZero) => {
                    // the start landed on a zero of the quadratic form;
                    // restart this attempt from a fresh perturbed point
                    m = LoadVector::with_total(sample_simplex(&mut rng, n, total), total)?;
                    continue;
                }
                Err(other) => return Err(other),
            };
            let movement = m
                .values()
                .iter()
                .zip(next.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            m = next;
            if movement < move_tol {
                converged = true;
                break;
            }
        }
        let flow = g.flow(&m)?;
        let values = m.into_values();
        let better = match &best {
            None => true,
            Some((bv, bf, _)) => flow > *bf || (flow == *bf && lex_less(&values, bv)),
        };
        if better {
            best = Some((values, flow, converged));
        }
    }
    let (values, flow, converged) = best.expect("restarts >= 1");
    Ok(SolveReport {
        method: Method::Replicator,
        loads: LoadVector::with_total(values, total)?,
        flow,
        clique: None,
        trace: None,
        diagnostics: Diagnostics {
            iterations: total_iterations,
            restarts: params.restarts,
            converged,
            stationarity: None,
        },
    })
}

/// Reads a clique out of the support of a (near-)converged load vector:
/// threshold, drop conflicting low-load vertices, then greedily extend to a
/// maximal clique.
pub fn extract_clique_from_support(
    g: &Graph,
    m: &LoadVector,
    threshold: f64,
) -> Result<CliqueResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(
            "threshold must lie strictly between 0 and 1".into(),
        ));
    }
    if m.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: m.len(),
        });
    }
    let cut = threshold * m.total();
    let mut support: Vec<usize> = (0..g.n()).filter(|&v| m.get(v) > cut).collect();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    // repair: drop the lightest conflicting vertex until a clique remains
    while !verify_clique(g, &support) {
        let mut worst = None;
        for (k, &v) in support.iter().enumerate() {
            let conflicts = support
                .iter()
                .filter(|&&u| u != v && !g.adjacent(u, v))
                .count();
            if conflicts == 0 {
                continue;
            }
            let key = (m.get(v), std::cmp::Reverse(v));
            match worst {
                Some((wk, _)) if key >= wk => {}
                _ => worst = Some((key, k)),
            }
        }
        let (_, k) = worst.expect("non-clique support has a conflict");
        support.remove(k);
    }
    // extend: add the heaviest fully-adjacent vertex until maximal
    loop {
        let mut pick: Option<(f64, usize)> = None;
        for u in 0..g.n() {
            if support.contains(&u) || !support.iter().all(|&v| g.adjacent(u, v)) {
                continue;
            }
            let better = match pick {
                None => true,
                Some((load, v)) => m.get(u) > load || (m.get(u) == load && u < v),
            };
            if better {
                pick = Some((m.get(u), u));
            }
        }
        match pick {
            Some((_, u)) => support.push(u),
            None => break,
        }
        support.sort_unstable();
    }
    CliqueResult::certified(g, support)
}
