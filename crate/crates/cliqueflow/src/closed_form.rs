//! Analytical optima for the graph classes with known solutions: a single
//! edge pair for stars, bipartite graphs and long odd cycles; the equal
//! split for cliques; and the clique-based optimum for everything else.

use crate::clique::{verify_clique, CliqueResult};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphClass, LoadVector};
use crate::report::{Diagnostics, Method, SolveReport};

fn check_total(total: f64) -> Result<()> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonPositiveTotal(total));
    }
    Ok(())
}

/// Optimal loads for a graph whose optimum lives on one edge: half the
/// budget on each endpoint of the lexicographically smallest edge.
pub fn edge_pair_optimum(g: &Graph, total: f64) -> Result<SolveReport> {
    check_total(total)?;
    if g.edge_count() == 0 {
        return Err(Error::NoEdge);
    }
    let class = g.classify();
    let method = match class {
        GraphClass::SingleLevelTree => Method::ClosedFormSingleLevelTree,
        GraphClass::Bipartite => Method::ClosedFormBipartite,
        GraphClass::OddCycle => Method::ClosedFormOddCycle,
        GraphClass::Complete | GraphClass::General => {
            return Err(Error::WrongClass { class: class.name() })
        }
    };
    let (u, v) = g.edges()[0];
    let mut values = vec![0.0; g.n()];
    values[u] = total / 2.0;
    values[v] = total / 2.0;
    let loads = LoadVector::with_total(values, total)?;
    let flow = g.flow(&loads)?;
    Ok(SolveReport {
        method,
        loads,
        flow,
        clique: Some(CliqueResult::certified(g, vec![u, v])?),
        trace: None,
        diagnostics: Diagnostics::exact(),
    })
}

/// Optimal loads on a complete graph of `n` vertices: the equal split, with
/// flow `c * D^2 (n-1) / (2n)`.
pub fn clique_optimum(n: usize, total: f64, flow_factor: f64) -> Result<SolveReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("clique size must be >= 1".into()));
    }
    check_total(total)?;
    let share = total / n as f64;
    let pairs = (n * (n - 1) / 2) as f64;
    let flow = flow_factor * share * share * pairs;
    Ok(SolveReport {
        method: Method::ClosedFormComplete,
        loads: LoadVector::with_total(vec![share; n], total)?,
        flow,
        clique: None,
        trace: None,
        diagnostics: Diagnostics::exact(),
    })
}

/// The global maximum of the flow over the simplex for a graph with clique
/// number `omega`: `c * (D^2 / 2) * (1 - 1/omega)`.
pub fn motzkin_straus_bound(omega: usize, total: f64, flow_factor: f64) -> Result<f64> {
    if omega == 0 {
        return Err(Error::InvalidArgument("omega must be >= 1".into()));
    }
    check_total(total)?;
    Ok(flow_factor * total * total / 2.0 * (1.0 - 1.0 / omega as f64))
}

/// Optimal loads for an arbitrary graph given a clique certificate: the
/// budget split equally over the clique, zero elsewhere.
pub fn general_optimum(g: &Graph, total: f64, clique: &CliqueResult) -> Result<SolveReport> {
    check_total(total)?;
    if !verify_clique(g, clique.vertices()) {
        return Err(Error::InvalidCertificate);
    }
    let share = total / clique.size() as f64;
    let mut values = vec![0.0; g.n()];
    for &v in clique.vertices() {
        values[v] = share;
    }
    let loads = LoadVector::with_total(values, total)?;
    let flow = g.flow(&loads)?;
    Ok(SolveReport {
        method: Method::GeneralClique,
        loads,
        flow,
        clique: Some(clique.clone()),
        trace: None,
        diagnostics: Diagnostics::exact(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::max_clique_exact;

    #[test]
    fn star_places_half_on_center_and_one_leaf() {
        let g = Graph::star(5).unwrap();
        let report = edge_pair_optimum(&g, 2.0).unwrap();
        assert_eq!(report.method, Method::ClosedFormSingleLevelTree);
        assert!((report.flow - 1.0).abs() < 1e-12);
        assert_eq!(report.loads.get(0), 1.0);
        assert_eq!(report.loads.get(1), 1.0);
    }

    #[test]
    fn long_odd_cycle_pairs_up() {
        let g = Graph::cycle(9).unwrap();
        let report = edge_pair_optimum(&g, 1.0).unwrap();
        assert_eq!(report.method, Method::ClosedFormOddCycle);
        assert!((report.flow - 0.25).abs() < 1e-15);
        assert_eq!(report.loads.get(0), 0.5);
        assert_eq!(report.loads.get(1), 0.5);
    }

    #[test]
    fn complete_bipartite_collapses_to_a_quarter() {
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in 3..6 {
                edges.push((u, v));
            }
        }
        let g = Graph::unit(6, &edges).unwrap();
        let report = edge_pair_optimum(&g, 1.0).unwrap();
        assert_eq!(report.method, Method::ClosedFormBipartite);
        assert!((report.flow - 0.25).abs() < 1e-15);
    }

    #[test]
    fn disconnected_bipartite_still_pairs_up() {
        let g = Graph::unit(5, &[(0, 1), (2, 3)]).unwrap();
        let report = edge_pair_optimum(&g, 1.0).unwrap();
        assert_eq!(report.method, Method::ClosedFormBipartite);
        assert_eq!(report.loads.get(0), 0.5);
        assert_eq!(report.loads.get(1), 0.5);
        assert!((report.flow - 0.25).abs() < 1e-15);
    }

    #[test]
    fn edge_pair_rejects_wrong_class_and_edgeless() {
        let k4 = Graph::complete(4).unwrap();
        assert!(matches!(
            edge_pair_optimum(&k4, 1.0).unwrap_err(),
            Error::WrongClass { class: "complete" }
        ));
        let lonely = Graph::unit(3, &[]).unwrap();
        assert!(matches!(
            edge_pair_optimum(&lonely, 1.0).unwrap_err(),
            Error::NoEdge
        ));
    }

    #[test]
    fn clique_optimum_values() {
        let r = clique_optimum(4, 1.0, 1.0).unwrap();
        assert_eq!(r.loads.values(), &[0.25; 4]);
        assert!((r.flow - 0.375).abs() < 1e-15);

        let r2 = clique_optimum(2, 1.0, 1.0).unwrap();
        assert!((r2.flow - 0.25).abs() < 1e-15);

        let r1 = clique_optimum(1, 1.0, 1.0).unwrap();
        assert_eq!(r1.flow, 0.0);
    }

    #[test]
    fn bound_matches_formula() {
        assert!((motzkin_straus_bound(2, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((motzkin_straus_bound(3, 1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(motzkin_straus_bound(1, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn bound_agrees_with_clique_optimum() {
        for n in 1..=12 {
            let a = clique_optimum(n, 2.5, 1.5).unwrap().flow;
            let b = motzkin_straus_bound(n, 2.5, 1.5).unwrap();
            assert!((a - b).abs() <= 1e-12 * 2.5 * 2.5);
        }
    }

    #[test]
    fn general_optimum_on_petersen() {
        let g = Graph::petersen();
        let clique = max_clique_exact(&g);
        let report = general_optimum(&g, 1.0, &clique).unwrap();
        assert!((report.flow - 0.25).abs() < 1e-15);
    }

    #[test]
    fn general_optimum_on_k5_and_pendant_triangle() {
        let k5 = Graph::complete(5).unwrap();
        let clique = max_clique_exact(&k5);
        let report = general_optimum(&k5, 1.0, &clique).unwrap();
        assert!((report.flow - 0.4).abs() < 1e-15);

        let g = Graph::unit(4, &[(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let clique = max_clique_exact(&g);
        let report = general_optimum(&g, 1.0, &clique).unwrap();
        assert!((report.flow - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(report.loads.get(3), 0.0);
    }

    #[test]
    fn general_optimum_rejects_foreign_certificate() {
        let c5 = Graph::cycle(5).unwrap();
        let k4 = Graph::complete(4).unwrap();
        let clique = max_clique_exact(&k4);
        assert!(matches!(
            general_optimum(&c5, 1.0, &clique).unwrap_err(),
            Error::InvalidCertificate
        ));
    }
}
