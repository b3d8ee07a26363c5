//! Exact and brute-force maximum-clique computation.
//!
//! The exact solver is a branch-and-bound search with a greedy-coloring upper
//! bound over a degeneracy vertex order; the brute-force enumerator is the
//! independent oracle for small instances.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Guard for the exhaustive enumerator.
pub const BRUTEFORCE_MAX_N: usize = 20;

/// A vertex set certified as a clique of its originating graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueResult {
    vertices: Vec<usize>,
}

impl CliqueResult {
    /// Certifies `vertices` as a clique of `g`. Fails when any pair is
    /// non-adjacent, a vertex repeats, or an index is out of range.
    pub fn certified(g: &Graph, mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() || !verify_clique(g, &vertices) {
            return Err(Error::InvalidCertificate);
        }
        Ok(CliqueResult { vertices })
    }

    fn from_sorted(vertices: Vec<usize>) -> Self {
        CliqueResult { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

/// True iff every pair in `s` is adjacent in `g`. Duplicates and
/// out-of-range vertices fail the check.
pub fn verify_clique(g: &Graph, s: &[usize]) -> bool {
    for (i, &u) in s.iter().enumerate() {
        if u >= g.n() {
            return false;
        }
        for &v in &s[i + 1..] {
            if u == v || !g.adjacent(u, v) {
                return false;
            }
        }
    }
    true
}

/// Degeneracy order: repeatedly remove a minimum-degree vertex (ties to the
/// lowest index). Returned in removal order.
fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut best_deg = usize::MAX;
        for v in 0..n {
            if !removed[v] && deg[v] < best_deg {
                best = v;
                best_deg = deg[v];
            }
        }
        removed[best] = true;
        order.push(best);
        for u in g.neighbors(best) {
            if !removed[u] {
                deg[u] -= 1;
            }
        }
    }
    order
}

struct Search<'a> {
    g: &'a Graph,
    rank: Vec<usize>,
    best: Vec<usize>,
}

impl<'a> Search<'a> {
    /// Greedy coloring of `cands`; returns the candidates reordered by color
    /// class with their color numbers (1-based), colors ascending.
    fn color_sort(&self, cands: &[usize]) -> Vec<(usize, usize)> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        // color vertices in degeneracy rank order for a deterministic bound
        let mut ordered = cands.to_vec();
        ordered.sort_unstable_by_key(|&v| self.rank[v]);
        for v in ordered {
            let slot = classes
                .iter()
                .position(|class| class.iter().all(|&u| !self.g.adjacent(u, v)));
            match slot {
                Some(k) => classes[k].push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut out = Vec::with_capacity(cands.len());
        for (k, class) in classes.iter().enumerate() {
            for &v in class {
                out.push((v, k + 1));
            }
        }
        out
    }

    fn expand(&mut self, current: &mut Vec<usize>, cands: &[usize]) {
        if cands.is_empty() {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            return;
        }
        let colored = self.color_sort(cands);
        // iterate from the highest color down; lower-colored prefixes cannot
        // beat the incumbent once one vertex prunes
        for idx in (0..colored.len()).rev() {
            let (v, color) = colored[idx];
            if current.len() + color <= self.best.len() {
                return;
            }
            current.push(v);
            let next: Vec<usize> = colored[..idx]
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| self.g.adjacent(u, v))
                .collect();
            self.expand(current, &next);
            current.pop();
        }
    }
}

/// Maximum clique by branch and bound. Deterministic for a given graph:
/// fixed degeneracy ordering and first-found tie-breaking.
pub fn max_clique_exact(g: &Graph) -> CliqueResult {
    let order = degeneracy_order(g);
    let mut rank = vec![0usize; g.n()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut search = Search {
        g,
        rank,
        best: Vec::new(),
    };
    let all: Vec<usize> = (0..g.n()).collect();
    let mut current = Vec::new();
    search.expand(&mut current, &all);
    let mut vertices = search.best;
    vertices.sort_unstable();
    CliqueResult::from_sorted(vertices)
}

/// Maximum clique restricted to `allowed` vertices. Returns an empty vector
/// when `allowed` is empty.
pub(crate) fn max_clique_within(g: &Graph, allowed: &[usize]) -> Vec<usize> {
    if allowed.is_empty() {
        return Vec::new();
    }
    let order = degeneracy_order(g);
    let mut rank = vec![0usize; g.n()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut search = Search {
        g,
        rank,
        best: Vec::new(),
    };
    let mut current = Vec::new();
    search.expand(&mut current, allowed);
    let mut vertices = search.best;
    vertices.sort_unstable();
    vertices
}

/// Exact clique number by exhaustive subset enumeration; guarded to
/// `n <= 20` so it stays an honest desk-scale oracle.
pub fn clique_number_bruteforce(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::SizeGuard(format!(
            "brute-force clique enumeration requires n <= {BRUTEFORCE_MAX_N}, got {n}"
        )));
    }
    let mut closed = vec![0u32; n];
    for (v, entry) in closed.iter_mut().enumerate() {
        let mut mask = 1u32 << v;
        for u in g.neighbors(v) {
            mask |= 1 << u;
        }
        *entry = mask;
    }
    let mut best = 1u32;
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() <= best {
            continue;
        }
        let mut m = mask;
        let mut ok = true;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            if mask & !closed[v] != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            best = mask.count_ones();
        }
    }
    Ok(best as usize)
}
