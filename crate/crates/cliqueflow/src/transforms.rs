//! Executable flow-preserving load-shift pipelines. Every operation returns
//! a step-by-step trace whose recorded flow values never decrease.
//!
//! All whole-load shifts move the entire source load; fractional amounts
//! appear only in equalize steps. Flow values in the trace are recomputed
//! from the actual load vector after every step.

use std::collections::{HashMap, VecDeque};

use crate::clique::{max_clique_within, verify_clique, CliqueResult};
use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph, GraphClass, LoadVector};

/// Which proof rule produced a shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRule {
    BipartiteCollapse,
    OddCycleCaseA,
    OddCycleCaseB,
    OddCycleCaseC,
    Nonadjacent,
    CliqueMerge,
    Equalize,
}

impl ShiftRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftRule::BipartiteCollapse => "bipartite_collapse",
            ShiftRule::OddCycleCaseA => "odd_cycle_case_a",
            ShiftRule::OddCycleCaseB => "odd_cycle_case_b",
            ShiftRule::OddCycleCaseC => "odd_cycle_case_c",
            ShiftRule::Nonadjacent => "nonadjacent",
            ShiftRule::CliqueMerge => "clique_merge",
            ShiftRule::Equalize => "equalize",
        }
    }
}

/// One load movement with the flow measured before and after.
#[derive(Debug, Clone)]
pub struct ShiftStep {
    pub from: usize,
    pub to: usize,
    pub amount: f64,
    pub flow_before: f64,
    pub flow_after: f64,
    pub rule: ShiftRule,
}

/// Ordered record of shifts together with the load vectors they connect.
#[derive(Debug, Clone)]
pub struct TransformTrace {
    pub steps: Vec<ShiftStep>,
    pub initial_loads: LoadVector,
    pub final_loads: LoadVector,
}

impl TransformTrace {
    /// True when every recorded step loses at most `slack` flow and the
    /// step chain is consistent.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let mut prev: Option<f64> = None;
        for step in &self.steps {
            if step.flow_after < step.flow_before - slack {
                return false;
            }
            if let Some(p) = prev {
                if (step.flow_before - p).abs() > slack {
                    return false;
                }
            }
            prev = Some(step.flow_after);
        }
        true
    }
}

/// Mutable solver state: the working load vector plus the recorded steps.
struct Tracer<'a> {
    g: &'a Graph,
    values: Vec<f64>,
    flow: f64,
    steps: Vec<ShiftStep>,
    initial: Vec<f64>,
    total: f64,
}

impl<'a> Tracer<'a> {
    fn new(g: &'a Graph, m: &LoadVector) -> Result<Self> {
        if m.len() != g.n() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                got: m.len(),
            });
        }
        let values = m.values().to_vec();
        let flow = g.flow_of(&values)?;
        Ok(Tracer {
            g,
            initial: values.clone(),
            values,
            flow,
            steps: Vec::new(),
            total: m.total(),
        })
    }

    fn phi(&self, v: usize) -> f64 {
        self.g.neighbor_sum_of(&self.values, v)
    }

    fn positives(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&v| self.values[v] > 0.0)
            .collect()
    }

    /// Moves the whole load at `from` onto `to`, zeroing the source exactly.
    fn shift_all(&mut self, from: usize, to: usize, rule: ShiftRule) {
        let amount = self.values[from];
        if amount <= 0.0 {
            return;
        }
        self.values[from] = 0.0;
        self.values[to] += amount;
        self.record(from, to, amount, rule);
    }

    /// Moves a fractional amount; callers guarantee `amount <= values[from]`.
    fn shift_amount(&mut self, from: usize, to: usize, amount: f64, rule: ShiftRule) {
        if amount <= 0.0 {
            return;
        }
        self.values[from] -= amount;
        self.values[to] += amount;
        self.record(from, to, amount, rule);
    }

    fn record(&mut self, from: usize, to: usize, amount: f64, rule: ShiftRule) {
        let flow_after = self
            .g
            .flow_of(&self.values)
            .expect("tracer vector length is fixed");
        self.steps.push(ShiftStep {
            from,
            to,
            amount,
            flow_before: self.flow,
            flow_after,
            rule,
        });
        self.flow = flow_after;
    }

    /// Equalizes the loads on a clique toward their mean with bounded moves,
    /// each of which cannot decrease the flow.
    fn equalize_within(&mut self, verts: &[usize]) {
        if verts.len() < 2 {
            return;
        }
        let mean = verts.iter().map(|&v| self.values[v]).sum::<f64>() / verts.len() as f64;
        let tiny = f64::EPSILON * 8.0 * self.total.max(1.0);
        for _ in 0..(4 * verts.len()) {
            let mut over = verts[0];
            let mut under = verts[0];
            for &v in verts {
                if self.values[v] > self.values[over] {
                    over = v;
                }
                if self.values[v] < self.values[under] {
                    under = v;
                }
            }
            let surplus = self.values[over] - mean;
            let deficit = mean - self.values[under];
            let amount = surplus.min(deficit);
            if amount <= tiny {
                break;
            }
            self.shift_amount(over, under, amount, ShiftRule::Equalize);
        }
    }

    fn finish(self) -> Result<TransformTrace> {
        Ok(TransformTrace {
            steps: self.steps,
            initial_loads: LoadVector::with_total(self.initial, self.total)?,
            final_loads: LoadVector::with_total(self.values, self.total)?,
        })
    }
}

/// Merges each side of a bipartition onto one surviving vertex by repeatedly
/// moving the minimum-φ positive vertex onto the maximum-φ one. Same-side
/// vertices are never adjacent, so every move gains `m_s (φ(t) − φ(s)) ≥ 0`.
fn collapse_side(tracer: &mut Tracer, side: &[usize], rule: ShiftRule) -> Option<usize> {
    loop {
        let positives: Vec<usize> = side
            .iter()
            .copied()
            .filter(|&v| tracer.values[v] > 0.0)
            .collect();
        if positives.len() <= 1 {
            return positives.first().copied();
        }
        // source: min φ, ties to the highest index
        let mut source = positives[0];
        for &v in &positives {
            let (pv, ps) = (tracer.phi(v), tracer.phi(source));
            if pv < ps || (pv == ps && v > source) {
                source = v;
            }
        }
        // destination: max φ among the rest, ties to the lowest index
        let mut dest = usize::MAX;
        for &v in &positives {
            if v == source {
                continue;
            }
            if dest == usize::MAX || tracer.phi(v) > tracer.phi(dest) {
                dest = v;
            }
        }
        tracer.shift_all(source, dest, rule);
    }
}

/// Collapses both sides and returns the surviving pair `(x', y')` located on
/// an edge of the graph. Relocation moves keep the flow nondecreasing.
fn collapse_onto_edge(
    tracer: &mut Tracer,
    left: &[usize],
    right: &[usize],
    rule: ShiftRule,
) -> Result<(usize, usize)> {
    let mut in_left = vec![false; tracer.g.n()];
    let mut in_right = vec![false; tracer.g.n()];
    for &v in left {
        in_left[v] = true;
    }
    for &v in right {
        in_right[v] = true;
    }
    let crossing_edge = tracer
        .g
        .edges()
        .iter()
        .copied()
        .find_map(|(u, v)| {
            if in_left[u] && in_right[v] {
                Some((u, v))
            } else if in_right[u] && in_left[v] {
                Some((v, u))
            } else {
                None
            }
        })
        .ok_or(Error::NoEdge)?;

    let x_survivor = collapse_side(tracer, left, rule);
    let y_survivor = collapse_side(tracer, right, rule);

    match (x_survivor, y_survivor) {
        (Some(x), Some(y)) => {
            if tracer.g.adjacent(x, y) {
                return Ok((x, y));
            }
            // zero-flow state: reunite the survivors on an edge
            if let Some(y2) = tracer.g.neighbors(x).find(|&u| in_right[u]) {
                tracer.shift_all(y, y2, rule);
                Ok((x, y2))
            } else if let Some(x2) = tracer.g.neighbors(y).find(|&u| in_left[u]) {
                tracer.shift_all(x, x2, rule);
                Ok((x2, y))
            } else {
                let (a, b) = crossing_edge;
                tracer.shift_all(x, a, rule);
                tracer.shift_all(y, b, rule);
                Ok((a, b))
            }
        }
        (Some(x), None) => {
            if let Some(y) = tracer.g.neighbors(x).find(|&u| in_right[u]) {
                Ok((x, y))
            } else {
                let (a, b) = crossing_edge;
                tracer.shift_all(x, a, rule);
                Ok((a, b))
            }
        }
        (None, Some(y)) => {
            if let Some(x) = tracer.g.neighbors(y).find(|&u| in_left[u]) {
                Ok((x, y))
            } else {
                let (a, b) = crossing_edge;
                tracer.shift_all(y, b, rule);
                Ok((a, b))
            }
        }
        (None, None) => Ok(crossing_edge),
    }
}

/// Concentrates each part's load onto the endpoints of a single edge without
/// decreasing the flow; the final flow equals `c · (Σ_X m) · (Σ_Y m)`.
pub fn bipartite_collapse(g: &Graph, parts: &Bipartition, m: &LoadVector) -> Result<TransformTrace> {
    let mut side = vec![u8::MAX; g.n()];
    for &v in &parts.left {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { v, n: g.n() });
        }
        side[v] = 0;
    }
    for &v in &parts.right {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { v, n: g.n() });
        }
        if side[v] == 0 {
            return Err(Error::InvalidState(format!(
                "vertex {v} appears in both parts"
            )));
        }
        side[v] = 1;
    }
    if side.contains(&u8::MAX) {
        return Err(Error::InvalidState("parts do not cover all vertices".into()));
    }
    for &(u, v) in g.edges() {
        if side[u] == side[v] {
            return Err(Error::InvalidState(format!(
                "edge ({u}, {v}) does not cross the bipartition"
            )));
        }
    }
    let mut tracer = Tracer::new(g, m)?;
    collapse_onto_edge(&mut tracer, &parts.left, &parts.right, ShiftRule::BipartiteCollapse)?;
    tracer.finish()
}

/// Walks the cycle starting at 0, taking the smaller neighbor first.
fn cycle_order(g: &Graph) -> Vec<usize> {
    let mut order = vec![0usize];
    let mut prev = usize::MAX;
    let mut cur = 0usize;
    for _ in 1..g.n() {
        let next = g
            .neighbors(cur)
            .filter(|&u| u != prev)
            .min()
            .expect("cycle vertices have two neighbors");
        order.push(next);
        prev = cur;
        cur = next;
    }
    order
}

/// Reduces any load distribution on an odd cycle of length ≥ 5 to the equal
/// split over one edge, flow `c · D²/4`, via the minimum-φ shift, a chain
/// collapse, and a final pair equalization.
pub fn odd_cycle_reduce(g: &Graph, m: &LoadVector) -> Result<TransformTrace> {
    let class = g.classify();
    if class != GraphClass::OddCycle {
        return Err(Error::WrongClass { class: class.name() });
    }
    let mut tracer = Tracer::new(g, m)?;
    let n = g.n();

    let phis: Vec<f64> = (0..n).map(|v| tracer.phi(v)).collect();
    let mut i = 0;
    for v in 1..n {
        if phis[v] < phis[i] {
            i = v;
        }
    }
    let mut j = if i == 0 { 1 } else { 0 };
    for v in 0..n {
        if v != i && phis[v] > phis[j] {
            j = v;
        }
    }

    if tracer.values[i] > 0.0 {
        let closed = |v: usize| -> Vec<usize> {
            let mut set: Vec<usize> = g.neighbors(v).collect();
            set.push(v);
            set
        };
        let ci = closed(i);
        let cj = closed(j);
        let overlap = ci.iter().filter(|v| cj.contains(v)).count();
        match overlap {
            0 => tracer.shift_all(i, j, ShiftRule::OddCycleCaseA),
            1 => tracer.shift_all(i, j, ShiftRule::OddCycleCaseB),
            2 => {
                // i and j are adjacent; route the load to j's other neighbor
                let j_plus = g
                    .neighbors(j)
                    .find(|&u| u != i)
                    .expect("cycle vertex has two neighbors");
                tracer.shift_all(i, j_plus, ShiftRule::OddCycleCaseC);
            }
            _ => unreachable!("closed neighborhoods on a cycle of length >= 5"),
        }
    }

    // the support now avoids i; two-color the remaining chain
    let order = cycle_order(g);
    let pos_of_i = order.iter().position(|&v| v == i).unwrap();
    let chain: Vec<usize> = (1..n).map(|k| order[(pos_of_i + k) % n]).collect();
    let left: Vec<usize> = chain.iter().copied().step_by(2).collect();
    let right: Vec<usize> = chain.iter().copied().skip(1).step_by(2).collect();

    let (x, y) = collapse_onto_edge(&mut tracer, &left, &right, ShiftRule::BipartiteCollapse)?;
    tracer.equalize_within(&[x, y]);
    tracer.finish()
}

fn best_nonadjacent_pair(g: &Graph, values: &[f64]) -> Option<(usize, usize, f64)> {
    let phis = g.neighbor_sums(values);
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..values.len() {
        if values[i] <= 0.0 {
            continue;
        }
        for j in 0..values.len() {
            if j == i || values[j] <= 0.0 || g.adjacent(i, j) || phis[i] > phis[j] {
                continue;
            }
            let gain = values[i] * (phis[j] - phis[i]);
            match best {
                Some((_, _, g0)) if gain <= g0 => {}
                _ => best = Some((i, j, gain)),
            }
        }
    }
    best
}

/// Picks the non-adjacent positive pair with the largest flow gain and
/// returns the whole-load shift for it, or `None` when every pair of
/// positive-load vertices is adjacent. Does not modify the loads.
pub fn nonadjacent_shift(g: &Graph, m: &LoadVector) -> Result<Option<ShiftStep>> {
    if m.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: m.len(),
        });
    }
    let values = m.values();
    let flow_before = g.flow_of(values)?;
    Ok(best_nonadjacent_pair(g, values).map(|(i, j, _)| {
        let mut after = values.to_vec();
        let amount = after[i];
        after[i] = 0.0;
        after[j] += amount;
        let flow_after = g.flow_of(&after).expect("same length");
        ShiftStep {
            from: i,
            to: j,
            amount,
            flow_before,
            flow_after,
            rule: ShiftRule::Nonadjacent,
        }
    }))
}

/// Groups the positive-load vertices into connected components and checks
/// that each one induces a clique.
fn positive_cliques(g: &Graph, values: &[f64]) -> Result<Vec<Vec<usize>>> {
    let positives: Vec<usize> = (0..values.len()).filter(|&v| values[v] > 0.0).collect();
    if positives.is_empty() {
        return Err(Error::InvalidState("no vertex carries positive load".into()));
    }
    let mut group_of = vec![usize::MAX; values.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &root in &positives {
        if group_of[root] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut component = vec![root];
        group_of[root] = id;
        let mut queue = vec![root];
        while let Some(v) = queue.pop() {
            for u in g.neighbors(v) {
                if values[u] > 0.0 && group_of[u] == usize::MAX {
                    group_of[u] = id;
                    component.push(u);
                    queue.push(u);
                }
            }
        }
        component.sort_unstable();
        groups.push(component);
    }
    for group in &groups {
        if !verify_clique(g, group) {
            return Err(Error::InvalidState(format!(
                "positive support {group:?} is not a clique"
            )));
        }
    }
    Ok(groups)
}

/// Moves all load into the target clique and equalizes it. Returns the
/// target vertex set.
fn merge_core(tracer: &mut Tracer) -> Result<Vec<usize>> {
    let groups = positive_cliques(tracer.g, &tracer.values)?;
    let target = groups
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .expect("at least one group")
        .clone();
    let mut in_target = vec![false; tracer.g.n()];
    for &v in &target {
        in_target[v] = true;
    }
    loop {
        let sources: Vec<usize> = tracer
            .positives()
            .into_iter()
            .filter(|&v| !in_target[v])
            .collect();
        if sources.is_empty() {
            break;
        }
        // greedy: the cross move with the largest flow change first
        let mut best: Option<(f64, usize, usize)> = None;
        for &s in &sources {
            let ps = tracer.phi(s);
            for &t in &target {
                let delta = tracer.values[s] * (tracer.phi(t) - ps);
                match best {
                    Some((d0, _, _)) if delta <= d0 => {}
                    _ => best = Some((delta, s, t)),
                }
            }
        }
        let (_, s, t) = best.expect("sources and target are non-empty");
        tracer.shift_all(s, t, ShiftRule::CliqueMerge);
    }
    tracer.equalize_within(&target);
    Ok(target)
}

/// Moves all load into the largest positive-support clique (ties to the
/// lowest minimum vertex index) and equalizes it; the end state carries flow
/// `c · (D²/2) (1 − 1/r)` for the chosen clique size `r`.
pub fn merge_and_equalize(g: &Graph, m: &LoadVector) -> Result<TransformTrace> {
    let mut tracer = Tracer::new(g, m)?;
    merge_core(&mut tracer)?;
    tracer.finish()
}

/// Largest clique containing `base` as a subset: `base` plus a maximum
/// clique of the common neighborhood.
fn extend_to_maximum(g: &Graph, base: &[usize]) -> Vec<usize> {
    let candidates: Vec<usize> = (0..g.n())
        .filter(|&u| !base.contains(&u) && base.iter().all(|&v| g.adjacent(u, v)))
        .collect();
    let mut ext = base.to_vec();
    ext.extend(max_clique_within(g, &candidates));
    ext.sort_unstable();
    ext
}

const RELOCATION_STATE_CAP: usize = 150_000;

/// One configuration of the surviving masses: which vertex carries which
/// load. Masses merge when a move lands on an occupied vertex.
type MassState = Vec<(usize, u64)>;

fn mass_key(masses: &[(usize, f64)]) -> MassState {
    let mut key: MassState = masses.iter().map(|&(v, x)| (v, x.to_bits())).collect();
    key.sort_unstable();
    key
}

/// Breadth-first search over whole-load moves that never lose flow, looking
/// for a configuration whose support extends to a clique of `want`
/// vertices. Returns the move sequence when one exists. When `frozen` is
/// given, masses sitting on a frozen vertex never move again, which keeps
/// the state space small when only a few loads are stranded.
fn monotone_relocation(
    g: &Graph,
    start: &[(usize, f64)],
    want: usize,
    total: f64,
    frozen: Option<&[bool]>,
) -> Option<Vec<(usize, usize)>> {
    let slack = 1e-14 * total * total;
    let reaches_goal = |masses: &[(usize, f64)]| -> bool {
        let support: Vec<usize> = masses.iter().map(|&(v, _)| v).collect();
        verify_clique(g, &support) && extend_to_maximum(g, &support).len() >= want
    };

    let start_key = mass_key(start);
    let mut visited: HashMap<MassState, Option<(MassState, usize, usize)>> = HashMap::new();
    visited.insert(start_key.clone(), None);
    let mut queue = VecDeque::new();
    queue.push_back(start.to_vec());

    while let Some(masses) = queue.pop_front() {
        if reaches_goal(&masses) {
            let mut path = Vec::new();
            let mut cur = mass_key(&masses);
            while let Some(Some((prev, from, to))) = visited.get(&cur).cloned() {
                path.push((from, to));
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        if visited.len() >= RELOCATION_STATE_CAP {
            return None;
        }
        let key = mass_key(&masses);
        let phi = |v: usize, skip: usize| -> f64 {
            masses
                .iter()
                .filter(|&&(u, _)| u != skip && g.adjacent(v, u))
                .map(|&(_, x)| x)
                .sum()
        };
        for idx in 0..masses.len() {
            let (s, x) = masses[idx];
            if frozen.is_some_and(|f| f[s]) {
                continue;
            }
            for t in 0..g.n() {
                if t == s {
                    continue;
                }
                // flow change of moving the whole mass x from s to t
                let delta = x * (phi(t, s) - phi(s, s));
                if delta < -slack {
                    continue;
                }
                let mut next: Vec<(usize, f64)> = Vec::with_capacity(masses.len());
                let mut merged = false;
                for (j, &(v, y)) in masses.iter().enumerate() {
                    if j == idx {
                        continue;
                    }
                    if v == t {
                        next.push((v, y + x));
                        merged = true;
                    } else {
                        next.push((v, y));
                    }
                }
                if !merged {
                    next.push((t, x));
                }
                if let std::collections::hash_map::Entry::Vacant(slot) =
                    visited.entry(mass_key(&next))
                {
                    slot.insert(Some((key.clone(), s, t)));
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

/// Full pipeline: drain the load onto a maximum clique with flow-preserving
/// non-adjacent shifts, then equalize there. The final flow equals the
/// Motzkin–Straus bound whenever the supplied clique is a true maximum
/// clique, and the whole trace is flow-nondecreasing whenever such a route
/// exists at all.
///
/// Shift selection differs from the standalone [`nonadjacent_shift`]: plain
/// max-gain selection can strand the load on a smaller clique that no
/// flow-preserving sequence can leave, so this pipeline harvests into the
/// target clique first (largest gain, ties lexicographic), consolidates
/// outside mass only when no harvest applies, and never drains the target.
pub fn concentrate(g: &Graph, m: &LoadVector, max_clique: &CliqueResult) -> Result<TransformTrace> {
    if !verify_clique(g, max_clique.vertices()) {
        return Err(Error::InvalidCertificate);
    }
    let mut tracer = Tracer::new(g, m)?;
    if tracer.positives().is_empty() {
        return Err(Error::InvalidState("no vertex carries positive load".into()));
    }
    let mut in_target = vec![false; g.n()];
    for &v in max_clique.vertices() {
        in_target[v] = true;
    }

    // each shift zeroes one outside vertex, so this loop runs < n times
    loop {
        let phis = g.neighbor_sums(&tracer.values);
        let mut best: Option<(f64, usize, usize)> = None;
        // harvest: move an outside load onto a non-adjacent target vertex
        for i in 0..g.n() {
            if in_target[i] || tracer.values[i] <= 0.0 {
                continue;
            }
            for &t in max_clique.vertices() {
                if g.adjacent(i, t) || phis[i] > phis[t] {
                    continue;
                }
                let gain = tracer.values[i] * (phis[t] - phis[i]);
                match best {
                    Some((g0, _, _)) if gain <= g0 => {}
                    _ => best = Some((gain, i, t)),
                }
            }
        }
        if best.is_none() {
            // consolidation among outside vertices only
            for i in 0..g.n() {
                if in_target[i] || tracer.values[i] <= 0.0 {
                    continue;
                }
                for j in 0..g.n() {
                    if j == i
                        || in_target[j]
                        || tracer.values[j] <= 0.0
                        || g.adjacent(i, j)
                        || phis[i] > phis[j]
                    {
                        continue;
                    }
                    let gain = tracer.values[i] * (phis[j] - phis[i]);
                    match best {
                        Some((g0, _, _)) if gain <= g0 => {}
                        _ => best = Some((gain, i, j)),
                    }
                }
            }
        }
        match best {
            Some((_, i, j)) => tracer.shift_all(i, j, ShiftRule::Nonadjacent),
            None => break,
        }
    }

    let stranded: Vec<usize> = tracer
        .positives()
        .into_iter()
        .filter(|&v| !in_target[v])
        .collect();
    if stranded.is_empty() {
        tracer.equalize_within(max_clique.vertices());
        return tracer.finish();
    }

    // some outside mass could not be harvested; search for any
    // flow-preserving route onto a clique of the wanted size
    let want = max_clique.size();
    let support = tracer.positives();
    let home = extend_to_maximum(g, &support);
    if verify_clique(g, &support) && home.len() >= want {
        tracer.equalize_within(&home);
        return tracer.finish();
    }
    let masses: Vec<(usize, f64)> = support.iter().map(|&v| (v, tracer.values[v])).collect();
    let found = monotone_relocation(g, &masses, want, tracer.total, Some(&in_target))
        .or_else(|| monotone_relocation(g, &masses, want, tracer.total, None));
    if let Some(path) = found {
        for (from, to) in path {
            tracer.shift_all(from, to, ShiftRule::CliqueMerge);
        }
        let home = extend_to_maximum(g, &tracer.positives());
        tracer.equalize_within(&home);
        return tracer.finish();
    }

    // no flow-preserving route exists (the support is cut off from every
    // maximum clique); relocate directly and record the dips honestly
    let target = max_clique.vertices().to_vec();
    loop {
        let sources: Vec<usize> = tracer
            .positives()
            .into_iter()
            .filter(|&v| !in_target[v])
            .collect();
        if sources.is_empty() {
            break;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for &s in &sources {
            for &t in &target {
                let mut scratch = tracer.values.clone();
                let amount = scratch[s];
                scratch[s] = 0.0;
                scratch[t] += amount;
                let delta = g.flow_of(&scratch).expect("same length") - tracer.flow;
                match best {
                    Some((d0, _, _)) if delta <= d0 => {}
                    _ => best = Some((delta, s, t)),
                }
            }
        }
        let (_, s, t) = best.expect("non-empty candidate set");
        tracer.shift_all(s, t, ShiftRule::CliqueMerge);
    }
    tracer.equalize_within(&target);
    tracer.finish()
}
