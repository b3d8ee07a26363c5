//! Exhaustive grid search over the discretized simplex: trustworthy ground
//! truth for small instances.
//!
//! Grid counts are carried as integers and the edge weight is accumulated in
//! integer arithmetic, so the oracle itself introduces no rounding beyond
//! the final scaling.

use crate::error::{Error, Result};
use crate::graph::{Graph, LoadVector};
use crate::report::{Diagnostics, Method, SolveReport};

/// Hard cap on the number of grid points the oracle will enumerate.
pub const GRID_POINT_GUARD: u128 = 50_000_000;

/// Number of compositions of `granularity` into `n` nonnegative parts.
pub fn grid_point_count(n: usize, granularity: usize) -> u128 {
    // C(granularity + n - 1, n - 1), saturating well above the guard
    let k = (n - 1) as u128;
    let top = (granularity as u128) + k;
    let mut result: u128 = 1;
    for i in 1..=k {
        result = result.saturating_mul(top - k + i) / i;
        if result > GRID_POINT_GUARD * 1000 {
            return u128::MAX;
        }
    }
    result
}

struct GridSearch {
    /// Neighbors with a higher index, per vertex; those are the ones already
    /// assigned when the search reaches the vertex.
    above: Vec<Vec<usize>>,
    granularity: u64,
    counts: Vec<u64>,
    best_weight: u64,
    best_counts: Vec<u64>,
    evaluated: usize,
    found: bool,
}

impl GridSearch {
    /// No completion of a prefix with `rem` unplaced units can add more than
    /// `rem * (placed) + rem^2 / 2` to the weight.
    #[inline]
    fn completion_bound(&self, rem: u64) -> u64 {
        rem * (self.granularity - rem) + rem * rem / 2
    }

    /// Assigns vertices from the highest index down, so compositions are
    /// visited in ascending colexicographic order; the first maximum wins.
    /// Subtrees that cannot strictly beat the incumbent are skipped, which
    /// leaves the first-argmax semantics intact.
    fn assign(&mut self, v: usize, remaining: u64, weight: u64) {
        let s: u64 = self.above[v].iter().map(|&u| self.counts[u]).sum();
        if v == 0 {
            let total = weight + remaining * s;
            self.evaluated += 1;
            if !self.found || total > self.best_weight {
                self.counts[0] = remaining;
                self.best_weight = total;
                self.best_counts = self.counts.clone();
                self.found = true;
            }
            return;
        }
        if self.found && weight + self.completion_bound(remaining) <= self.best_weight {
            return;
        }
        for k in 0..=remaining {
            self.counts[v] = k;
            self.assign(v - 1, remaining - k, weight + k * s);
        }
        self.counts[v] = 0;
    }
}

/// Enumerates every load vector `D * (k_1, ..., k_n) / granularity` with the
/// counts summing to `granularity`, and returns the best one found. The
/// value is a lower bound on the true optimum.
pub fn grid_oracle(g: &Graph, total: f64, granularity: usize) -> Result<SolveReport> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonPositiveTotal(total));
    }
    if granularity == 0 {
        return Err(Error::InvalidArgument("granularity must be >= 1".into()));
    }
    let points = grid_point_count(g.n(), granularity);
    if points > GRID_POINT_GUARD {
        return Err(Error::SizeGuard(format!(
            "grid would hold {points} points (limit {GRID_POINT_GUARD}); lower the granularity"
        )));
    }
    let above: Vec<Vec<usize>> = (0..g.n())
        .map(|v| g.neighbors(v).filter(|&u| u > v).collect())
        .collect();
    let mut search = GridSearch {
        above,
        granularity: granularity as u64,
        counts: vec![0; g.n()],
        best_weight: 0,
        best_counts: vec![0; g.n()],
        evaluated: 0,
        found: false,
    };
    search.assign(g.n() - 1, granularity as u64, 0);

    let unit = total / granularity as f64;
    let values: Vec<f64> = search.best_counts.iter().map(|&k| k as f64 * unit).collect();
    let loads = LoadVector::with_total(values, total)?;
    let flow = g.flow_factor() * search.best_weight as f64 * unit * unit;
    Ok(SolveReport {
        method: Method::GridOracle,
        loads,
        flow,
        clique: None,
        trace: None,
        diagnostics: Diagnostics {
            iterations: search.evaluated,
            restarts: 0,
            converged: true,
            stationarity: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_grid_contains_the_optimum() {
        let g = Graph::unit(2, &[(0, 1)]).unwrap();
        let report = grid_oracle(&g, 1.0, 4).unwrap();
        assert_eq!(report.loads.values(), &[0.5, 0.5]);
        assert_eq!(report.flow, 0.25);
        assert!(report.diagnostics.iterations <= 5);
    }

    #[test]
    fn path_grid_reaches_a_quarter() {
        let g = Graph::path(3).unwrap();
        let report = grid_oracle(&g, 1.0, 4).unwrap();
        assert!(report.diagnostics.iterations <= 15);
        assert!((report.flow - 0.25).abs() < 1e-15);
        // first argmax in colexicographic order puts the pair on (0, 1)
        assert_eq!(report.loads.values(), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn triangle_grid_is_exact_when_granularity_divides() {
        let g = Graph::complete(3).unwrap();
        let report = grid_oracle(&g, 1.0, 3).unwrap();
        for v in 0..3 {
            assert!((report.loads.get(v) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((report.flow - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pendant_triangle_maximum_is_one_third() {
        let g = Graph::unit(4, &[(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let report = grid_oracle(&g, 1.0, 24).unwrap();
        assert!((report.flow - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_never_loses_value() {
        let g = Graph::petersen();
        let coarse = grid_oracle(&g, 1.0, 6).unwrap();
        let fine = grid_oracle(&g, 1.0, 12).unwrap();
        assert!(fine.flow >= coarse.flow - 1e-15);
    }

    #[test]
    fn guard_rejects_oversized_grids() {
        let g = Graph::complete(14).unwrap();
        assert!(matches!(
            grid_oracle(&g, 1.0, 28).unwrap_err(),
            Error::SizeGuard(_)
        ));
    }

    #[test]
    fn pruned_search_matches_full_enumeration() {
        // plain recursive enumeration with no bounding, as a reference
        fn full_best(g: &Graph, gran: u64) -> u64 {
            fn rec(g: &Graph, counts: &mut Vec<u64>, v: usize, rem: u64, best: &mut u64) {
                if v == 0 {
                    counts[0] = rem;
                    let w: u64 = g
                        .edges()
                        .iter()
                        .map(|&(a, b)| counts[a] * counts[b])
                        .sum();
                    *best = (*best).max(w);
                    counts[0] = 0;
                    return;
                }
                for k in 0..=rem {
                    counts[v] = k;
                    rec(g, counts, v - 1, rem - k, best);
                }
                counts[v] = 0;
            }
            let mut counts = vec![0; g.n()];
            let mut best = 0;
            rec(g, &mut counts, g.n() - 1, gran, &mut best);
            best
        }

        for seed in 0..12u64 {
            let g = Graph::gnp(6, 0.5, 400 + seed).unwrap();
            let gran = 7u64;
            let report = grid_oracle(&g, 1.0, gran as usize).unwrap();
            let reference = full_best(&g, gran) as f64 / (gran * gran) as f64;
            assert!(
                (report.flow - reference).abs() < 1e-12,
                "seed {seed}: pruned {} vs full {}",
                report.flow,
                reference
            );
        }
    }

    #[test]
    fn single_vertex_grid_is_zero() {
        let g = Graph::unit(1, &[]).unwrap();
        let report = grid_oracle(&g, 1.0, 5).unwrap();
        assert_eq!(report.flow, 0.0);
        assert_eq!(report.loads.values(), &[1.0]);
    }
}
