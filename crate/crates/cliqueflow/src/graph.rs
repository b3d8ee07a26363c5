//! Graph and load representations plus the flow objective and neighborhood
//! sums consumed by every other module.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative tolerance for checking that load entries sum to the stated total.
pub const LOAD_SUM_RTOL: f64 = 1e-12;

/// Structural class of a graph, in dispatch priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphClass {
    Complete,
    SingleLevelTree,
    OddCycle,
    Bipartite,
    General,
}

impl GraphClass {
    pub fn name(self) -> &'static str {
        match self {
            GraphClass::Complete => "complete",
            GraphClass::SingleLevelTree => "single_level_tree",
            GraphClass::OddCycle => "odd_cycle",
            GraphClass::Bipartite => "bipartite",
            GraphClass::General => "general",
        }
    }
}

/// Two-coloring of a graph: every edge has one endpoint in `left` and one in
/// `right`. Isolated vertices land in `left`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Immutable simple undirected graph with bitset adjacency rows and a sorted
/// edge list. Carries the flow factor `c` applied to every edge product.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    edges: Vec<(usize, usize)>,
    flow_factor: f64,
}

#[inline]
fn word_index(v: usize) -> (usize, u64) {
    (v / 64, 1u64 << (v % 64))
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate and reversed pairs collapse
    /// to a single edge; out-of-range endpoints and self-loops are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)], flow_factor: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "graph must have at least one vertex".into(),
            ));
        }
        if !(flow_factor.is_finite() && flow_factor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "flow factor must be positive and finite, got {flow_factor}"
            )));
        }
        let words = n.div_ceil(64);
        let mut adj = vec![0u64; n * words];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop { v });
            }
            let (wu, bu) = word_index(v);
            adj[u * words + wu] |= bu;
            let (wv, bv) = word_index(u);
            adj[v * words + wv] |= bv;
        }
        let mut dedup = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let (w, b) = word_index(v);
                if adj[u * words + w] & b != 0 {
                    dedup.push((u, v));
                }
            }
        }
        Ok(Graph {
            n,
            words,
            adj,
            edges: dedup,
            flow_factor,
        })
    }

    /// Builds a graph with the default flow factor of 1.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Graph::new(n, edges, 1.0)
    }

    /// Returns a copy of this graph with a different flow factor.
    pub fn with_flow_factor(&self, flow_factor: f64) -> Result<Self> {
        Graph::new(self.n, &self.edges, flow_factor)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn flow_factor(&self) -> f64 {
        self.flow_factor
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        let (w, b) = word_index(v);
        self.adj[u * self.words + w] & b != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        let row = &self.adj[v * self.words..(v + 1) * self.words];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[v * self.words..(v + 1) * self.words];
        row.iter().enumerate().flat_map(|(wi, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Flow objective over a feasible load vector: `c * Σ_{(u,v) in E} m_u m_v`,
    /// each unordered edge counted once.
    pub fn flow(&self, m: &LoadVector) -> Result<f64> {
        self.flow_of(m.values())
    }

    /// Flow objective over a raw value vector (no feasibility requirement).
    pub fn flow_of(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: values.len(),
            });
        }
        let sum: f64 = self
            .edges
            .iter()
            .map(|&(u, v)| values[u] * values[v])
            .sum();
        Ok(self.flow_factor * sum)
    }

    /// Sum of loads over the direct neighbors of `v` (the quantity φ(v)).
    pub fn neighbor_load_sum(&self, m: &LoadVector, v: usize) -> Result<f64> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { v, n: self.n });
        }
        if m.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: m.len(),
            });
        }
        Ok(self.neighbor_sum_of(m.values(), v))
    }

    pub(crate) fn neighbor_sum_of(&self, values: &[f64], v: usize) -> f64 {
        self.neighbors(v).map(|u| values[u]).sum()
    }

    /// All neighbor load sums at once.
    pub(crate) fn neighbor_sums(&self, values: &[f64]) -> Vec<f64> {
        (0..self.n).map(|v| self.neighbor_sum_of(values, v)).collect()
    }

    /// Two-colors the graph if no odd cycle exists. Disconnected graphs are
    /// colored component by component, roots going to `left`.
    pub fn is_bipartite(&self) -> Option<Bipartition> {
        let mut color = vec![u8::MAX; self.n];
        let mut queue = Vec::new();
        for root in 0..self.n {
            if color[root] != u8::MAX {
                continue;
            }
            color[root] = 0;
            queue.push(root);
            while let Some(v) = queue.pop() {
                for u in self.neighbors(v) {
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        queue.push(u);
                    } else if color[u] == color[v] {
                        return None;
                    }
                }
            }
        }
        let left = (0..self.n).filter(|&v| color[v] == 0).collect();
        let right = (0..self.n).filter(|&v| color[v] == 1).collect();
        Some(Bipartition { left, right })
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push(u);
                }
            }
        }
        count == self.n
    }

    /// Structure tag with priority complete > single-level tree > odd cycle >
    /// bipartite > general.
    pub fn classify(&self) -> GraphClass {
        let n = self.n;
        if (0..n).all(|v| self.degree(v) == n - 1) {
            return GraphClass::Complete;
        }
        if self.edge_count() == n - 1 {
            let centers = (0..n).filter(|&v| self.degree(v) == n - 1).count();
            let leaves = (0..n).filter(|&v| self.degree(v) == 1).count();
            if centers == 1 && leaves == n - 1 {
                return GraphClass::SingleLevelTree;
            }
        }
        if n >= 5 && n % 2 == 1 && (0..n).all(|v| self.degree(v) == 2) && self.is_connected() {
            return GraphClass::OddCycle;
        }
        if self.is_bipartite().is_some() {
            return GraphClass::Bipartite;
        }
        GraphClass::General
    }

    // Named constructions used across tests and docs.

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::unit(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument("cycle needs n >= 3".into()));
        }
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Graph::unit(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
        Graph::unit(n, &edges)
    }

    /// Star with center 0 and `leaves` leaf vertices.
    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::unit(leaves + 1, &edges)
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, five spokes.
    pub fn petersen() -> Self {
        let edges = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 0),
            (5, 7),
            (7, 9),
            (9, 6),
            (6, 8),
            (8, 5),
            (0, 5),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
        ];
        Graph::unit(10, &edges).expect("static edge list is valid")
    }

    /// Seeded Erdős–Rényi G(n, p) sample; pairs are examined in lexicographic
    /// order so a seed pins the graph exactly.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::unit(n, &edges)
    }
}

/// Nonnegative per-node loads with a total budget. A zero total is allowed
/// only for evaluation purposes; solvers require a positive budget.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    values: Vec<f64>,
    total: f64,
}

impl LoadVector {
    /// Wraps raw values, deriving the total from their sum.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let total = values.iter().sum();
        LoadVector::with_total(values, total)
    }

    /// Wraps raw values, checking them against a stated total.
    pub fn with_total(values: Vec<f64>, total: f64) -> Result<Self> {
        if !total.is_finite() || total < 0.0 {
            return Err(Error::NonPositiveTotal(total));
        }
        let mut sum = 0.0;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if value < 0.0 {
                return Err(Error::NegativeLoad { index, value });
            }
            sum += value;
        }
        let tol = if total > 0.0 {
            LOAD_SUM_RTOL * total
        } else {
            LOAD_SUM_RTOL
        };
        if (sum - total).abs() > tol {
            return Err(Error::TotalMismatch { sum, total });
        }
        Ok(LoadVector { values, total })
    }

    /// The equal split of `total` over `n` nodes.
    pub fn uniform(n: usize, total: f64) -> Self {
        LoadVector {
            values: vec![total / n as f64; n],
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_smallest_connected_graph() {
        let g = Graph::unit(2, &[(0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.adjacent(0, 1));
        assert!(g.adjacent(1, 0));
    }

    #[test]
    fn deduplicates_reversed_pairs() {
        let g = Graph::unit(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::unit(3, &[(0, 0)]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop { v: 0 }));
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        let err = Graph::unit(2, &[(0, 2)]).unwrap_err();
        assert!(matches!(err, Error::EndpointOutOfRange { u: 0, v: 2, n: 2 }));
    }

    #[test]
    fn flow_on_single_edge() {
        let g = Graph::unit(2, &[(0, 1)]).unwrap();
        let m = LoadVector::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(g.flow(&m).unwrap(), 0.25);
    }

    #[test]
    fn flow_of_zero_loads_is_zero() {
        let g = Graph::cycle(5).unwrap();
        let m = LoadVector::new(vec![0.0; 5]).unwrap();
        assert_eq!(g.flow(&m).unwrap(), 0.0);
    }

    #[test]
    fn flow_on_equal_cycle() {
        let g = Graph::cycle(5).unwrap();
        let m = LoadVector::uniform(5, 1.0);
        let f = g.flow(&m).unwrap();
        assert!((f - 0.2).abs() < 1e-15);
    }

    #[test]
    fn flow_on_path_by_hand() {
        let g = Graph::path(3).unwrap();
        let m = LoadVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert!((g.flow(&m).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn flow_rejects_length_mismatch() {
        let g = Graph::path(3).unwrap();
        let m = LoadVector::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            g.flow(&m).unwrap_err(),
            Error::DimensionMismatch { expected: 3, got: 2 }
        ));
    }

    #[test]
    fn neighbor_load_sum_on_path() {
        let g = Graph::path(3).unwrap();
        let m = LoadVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.neighbor_load_sum(&m, 1).unwrap(), 4.0);
    }

    #[test]
    fn neighbor_load_sum_on_cycle_and_clique() {
        let c5 = Graph::cycle(5).unwrap();
        let m = LoadVector::uniform(5, 1.0);
        for v in 0..5 {
            assert!((c5.neighbor_load_sum(&m, v).unwrap() - 0.4).abs() < 1e-15);
        }
        let k4 = Graph::complete(4).unwrap();
        let m = LoadVector::uniform(4, 1.0);
        for v in 0..4 {
            assert!((k4.neighbor_load_sum(&m, v).unwrap() - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn neighbor_load_sum_rejects_bad_vertex() {
        let g = Graph::path(3).unwrap();
        let m = LoadVector::uniform(3, 1.0);
        assert!(matches!(
            g.neighbor_load_sum(&m, 3).unwrap_err(),
            Error::VertexOutOfRange { v: 3, n: 3 }
        ));
    }

    #[test]
    fn bipartition_of_even_cycle() {
        let g = Graph::cycle(4).unwrap();
        let parts = g.is_bipartite().unwrap();
        assert_eq!(parts.left, vec![0, 2]);
        assert_eq!(parts.right, vec![1, 3]);
    }

    #[test]
    fn odd_cycle_is_not_bipartite() {
        assert!(Graph::cycle(5).unwrap().is_bipartite().is_none());
    }

    #[test]
    fn star_bipartition_separates_center() {
        let g = Graph::star(4).unwrap();
        let parts = g.is_bipartite().unwrap();
        assert_eq!(parts.left, vec![0]);
        assert_eq!(parts.right, vec![1, 2, 3, 4]);
    }

    #[test]
    fn classify_priorities() {
        assert_eq!(Graph::complete(2).unwrap().classify(), GraphClass::Complete);
        assert_eq!(Graph::cycle(3).unwrap().classify(), GraphClass::Complete);
        assert_eq!(Graph::cycle(7).unwrap().classify(), GraphClass::OddCycle);
        assert_eq!(
            Graph::star(4).unwrap().classify(),
            GraphClass::SingleLevelTree
        );
        assert_eq!(
            Graph::path(3).unwrap().classify(),
            GraphClass::SingleLevelTree
        );
        assert_eq!(Graph::cycle(6).unwrap().classify(), GraphClass::Bipartite);
        assert_eq!(Graph::petersen().classify(), GraphClass::General);
    }

    #[test]
    fn classify_disconnected_two_regular_is_not_a_cycle() {
        // two triangles: 2-regular but disconnected and odd-cycle-free classes
        let g = Graph::unit(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g.classify(), GraphClass::General);
    }

    #[test]
    fn classify_disconnected_two_colorable_as_bipartite() {
        let g = Graph::unit(5, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.classify(), GraphClass::Bipartite);
        let parts = g.is_bipartite().unwrap();
        assert!(parts.left.contains(&4));
    }

    #[test]
    fn load_vector_rejects_negative_and_mismatch() {
        assert!(matches!(
            LoadVector::new(vec![0.5, -0.1]).unwrap_err(),
            Error::NegativeLoad { index: 1, .. }
        ));
        assert!(matches!(
            LoadVector::with_total(vec![0.5, 0.4], 1.0).unwrap_err(),
            Error::TotalMismatch { .. }
        ));
    }

}
