//! Discrete optimal transport and certified W₂ brackets against the volume.
//!
//! Three solvers share one result type:
//!
//! * uniform marginals a = 1/N, b = 1/M with N | M are a capacitated
//!   assignment problem. It is solved by a forward auction with ε-scaling on
//!   sparse nearest-neighbour candidate lists, then certified by a full dual
//!   pass over all N·M pairs;
//! * general marginals go through the transportation simplex (MODI);
//! * the entropic fallback is log-domain Sinkhorn with ε-scaling, a rounded
//!   feasible plan for the upper bound and a feasible dual for the lower one.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{invalid, Error, Result};
use crate::manifold::{quadrature_target, Manifold, Point, QuadratureTarget};
use crate::samplers::PointSet;

/// N·M above which the general simplex is not attempted.
pub const EXACT_SIZE_LIMIT: usize = 1 << 24;
/// N·M above which the entropic solver refuses to materialize the costs.
pub const ENTROPIC_SIZE_LIMIT: usize = 1 << 26;
/// Reduced costs below −this (relative to the largest cost) fail the
/// optimality certificate.
pub const REDUCED_COST_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    Entropic,
}

impl SolverKind {
    pub fn label(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Entropic => "entropic",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<SolverKind> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "entropic" => Ok(SolverKind::Entropic),
            _ => Err(invalid(format!("unknown solver {s:?} (exact | entropic)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OtOptions {
    pub solver: SolverKind,
    /// Auction: final ε relative to the mean nearest-neighbour cost.
    pub auction_tolerance: f64,
    /// Nearest sources offered to each target before certification.
    pub candidates: usize,
    /// Sinkhorn: final regularization relative to the mean nearest cost.
    pub entropic_epsilon: f64,
    pub entropic_max_iterations: usize,
}

impl Default for OtOptions {
    fn default() -> Self {
        OtOptions {
            solver: SolverKind::Exact,
            auction_tolerance: 1e-9,
            candidates: 24,
            entropic_epsilon: 1e-2,
            entropic_max_iterations: 5000,
        }
    }
}

/// Optimal (or bracketed) transport between two discrete measures.
#[derive(Clone, Debug)]
pub struct OtSolution {
    /// Cost of the returned feasible plan (an upper bound).
    pub value: f64,
    /// Certified lower bound from a feasible dual.
    pub lower_bound: f64,
    pub solver: SolverKind,
    /// `value − lower_bound`.
    pub gap: f64,
    /// Sparse plan (source, target, mass); empty for the entropic solver.
    pub plan: Vec<(usize, usize, f64)>,
    /// Largest absolute marginal violation of the returned plan.
    pub marginal_error: f64,
    pub notes: Vec<String>,
}

/// Source × target costs, evaluated on demand.
///
/// `proximity` is a cheap score, strictly decreasing in the cost, so that
/// scans over all pairs can skip the expensive cost evaluation.
pub trait GroundCost: Sync {
    fn sources(&self) -> usize;
    fn targets(&self) -> usize;
    fn proximity(&self, i: usize, j: usize) -> f64;
    fn cost_of(&self, proximity: f64) -> f64;
    /// A proximity p₀ such that cost ≤ `bound` implies proximity ≥ p₀.
    fn proximity_floor(&self, bound: f64) -> f64;

    fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost_of(self.proximity(i, j))
    }
}

/// Dense row-major cost matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<CostMatrix> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(invalid(format!(
                "cost matrix needs {rows}×{cols} = {} finite entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(invalid("cost matrix has non-finite entries"));
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<CostMatrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged cost matrix"));
        }
        CostMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<CostMatrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CostMatrix::new(rows, cols, data)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

impl GroundCost for CostMatrix {
    fn sources(&self) -> usize {
        self.rows
    }
    fn targets(&self) -> usize {
        self.cols
    }
    #[inline]
    fn proximity(&self, i: usize, j: usize) -> f64 {
        -self.get(i, j)
    }
    #[inline]
    fn cost_of(&self, p: f64) -> f64 {
        -p
    }
    fn proximity_floor(&self, bound: f64) -> f64 {
        -bound
    }
    #[inline]
    fn cost(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Squared geodesic distances between two point lists.
pub struct PointCost<'a> {
    pub manifold: Manifold,
    pub sources: &'a [Point],
    pub targets: &'a [Point],
}

impl GroundCost for PointCost<'_> {
    fn sources(&self) -> usize {
        self.sources.len()
    }
    fn targets(&self) -> usize {
        self.targets.len()
    }
    #[inline]
    fn proximity(&self, i: usize, j: usize) -> f64 {
        match &self.manifold {
            Manifold::Sphere2 => self.sources[i].dot(&self.targets[j]),
            Manifold::Torus(t) => -t.sq_distance(&self.sources[i].0, &self.targets[j].0),
        }
    }
    #[inline]
    fn cost_of(&self, p: f64) -> f64 {
        match &self.manifold {
            Manifold::Sphere2 => {
                let d = p.clamp(-1.0, 1.0).acos();
                d * d
            }
            Manifold::Torus(_) => -p,
        }
    }
    fn proximity_floor(&self, bound: f64) -> f64 {
        match &self.manifold {
            Manifold::Sphere2 => {
                if bound >= std::f64::consts::PI * std::f64::consts::PI {
                    f64::NEG_INFINITY
                } else {
                    bound.max(0.0).sqrt().cos() - 1e-12
                }
            }
            Manifold::Torus(_) => -bound * (1.0 + 1e-12) - 1e-300,
        }
    }
}

fn check_weights(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(invalid(format!("{what} weights are empty")));
    }
    if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(invalid(format!("{what} weights must be finite and nonnegative")));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("{what} weights sum to {s}, not 1")));
    }
    Ok(())
}

fn is_uniform(w: &[f64]) -> bool {
    let u = 1.0 / w.len() as f64;
    w.iter().all(|&x| (x - u).abs() <= 1e-12 * u)
}

/// Optimal transport between Σ a_i δ_i and Σ b_j δ_j under `cost`.
///
/// With `SolverKind::Exact` the result carries a dual certificate; instances
/// too large for the simplex fall back to the entropic solver with a note.
pub fn solve_discrete_ot(cost: &CostMatrix, a: &[f64], b: &[f64], opts: &OtOptions) -> Result<OtSolution> {
    if a.len() != cost.rows || b.len() != cost.cols {
        return Err(invalid(format!(
            "weights have lengths {}/{} but the cost is {}×{}",
            a.len(),
            b.len(),
            cost.rows,
            cost.cols
        )));
    }
    check_weights(a, "source")?;
    check_weights(b, "target")?;
    match opts.solver {
        SolverKind::Entropic => sinkhorn(cost, a, b, opts),
        SolverKind::Exact => {
            if is_uniform(a) && is_uniform(b) && cost.cols % cost.rows == 0 {
                return solve_uniform(cost, opts);
            }
            if cost.rows * cost.cols > EXACT_SIZE_LIMIT {
                let mut s = sinkhorn(cost, a, b, opts)?;
                s.notes.push(format!(
                    "N·M = {} exceeds the exact limit {EXACT_SIZE_LIMIT}; entropic fallback",
                    cost.rows * cost.cols
                ));
                return Ok(s);
            }
            transport_simplex(cost, a, b)
        }
    }
}

/// Uniform marginals a = 1/N, b = 1/M on an implicit cost, N | M.
pub fn solve_uniform<C: GroundCost>(cost: &C, opts: &OtOptions) -> Result<OtSolution> {
    let (n, m) = (cost.sources(), cost.targets());
    if n == 0 || m == 0 {
        return Err(invalid("empty transport instance"));
    }
    match opts.solver {
        SolverKind::Exact => {
            if m % n != 0 {
                return Err(invalid(format!("auction needs N | M, got N = {n}, M = {m}")));
            }
            auction(cost, opts)
        }
        SolverKind::Entropic => {
            if n * m > ENTROPIC_SIZE_LIMIT {
                return Err(invalid(format!(
                    "N·M = {} exceeds the entropic limit {ENTROPIC_SIZE_LIMIT}",
                    n * m
                )));
            }
            let dense = CostMatrix::from_fn(n, m, |i, j| cost.cost(i, j))?;
            sinkhorn(&dense, &vec![1.0 / n as f64; n], &vec![1.0 / m as f64; m], opts)
        }
    }
}

// ---------------------------------------------------------------------------
// transportation simplex

const NONE: usize = usize::MAX;

fn transport_simplex(cost: &CostMatrix, a: &[f64], b: &[f64]) -> Result<OtSolution> {
    let (n, m) = (cost.rows, cost.cols);
    let scale = cost.data.iter().fold(0.0f64, |s, c| s.max(c.abs())).max(f64::MIN_POSITIVE);
    // basic cells
    let mut cells: Vec<(usize, usize, f64)> = Vec::with_capacity(n + m - 1);
    {
        let (mut sa, mut sb) = (a.to_vec(), b.to_vec());
        let (mut i, mut j) = (0, 0);
        loop {
            let x = sa[i].min(sb[j]);
            cells.push((i, j, x));
            sa[i] -= x;
            sb[j] -= x;
            if i == n - 1 && j == m - 1 {
                break;
            }
            let row_done = sa[i] <= sb[j];
            if (row_done && i < n - 1) || j == m - 1 {
                sb[j] = (sb[j] - sa[i]).max(0.0);
                i += 1;
            } else {
                sa[i] = (sa[i] - sb[j]).max(0.0);
                j += 1;
            }
        }
    }
    debug_assert_eq!(cells.len(), n + m - 1);
    let nodes = n + m;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (k, &(i, j, _)) in cells.iter().enumerate() {
        adj[i].push(k);
        adj[n + j].push(k);
    }
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; m];
    let mut parent = vec![NONE; nodes];
    let mut order = Vec::with_capacity(nodes);
    let total = n * m;
    let block = ((total as f64).sqrt() as usize).clamp(32.min(total), total);
    let mut cursor = 0usize;
    let tol = REDUCED_COST_TOLERANCE * 1e-3 * scale;
    let max_iter = 50 * nodes * nodes + 1000;
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::LinearAlgebra("transportation simplex did not converge".into()));
        }
        // potentials by a traversal of the basis tree, u_0 = 0
        parent.iter_mut().for_each(|p| *p = NONE);
        order.clear();
        order.push(0);
        parent[0] = usize::MAX - 1;
        u[0] = 0.0;
        let mut head = 0;
        while head < order.len() {
            let node = order[head];
            head += 1;
            for &k in &adj[node] {
                let (i, j, _) = cells[k];
                let other = if node < n { n + j } else { i };
                if parent[other] == NONE {
                    parent[other] = k;
                    if other >= n {
                        v[j] = cost.get(i, j) - u[i];
                    } else {
                        u[i] = cost.get(i, j) - v[j];
                    }
                    order.push(other);
                }
            }
        }
        // block pricing
        let mut entering = None;
        let mut scanned = 0;
        while scanned < total {
            let mut best = -tol;
            let end = (scanned + block).min(total);
            for _ in scanned..end {
                let (i, j) = (cursor / m, cursor % m);
                let rc = cost.get(i, j) - u[i] - v[j];
                if rc < best {
                    best = rc;
                    entering = Some((i, j));
                }
                cursor += 1;
                if cursor == total {
                    cursor = 0;
                }
            }
            scanned = end;
            if entering.is_some() {
                break;
            }
        }
        let Some((ei, ej)) = entering else { break };
        // cycle: tree path from column ej to row ei
        let path = tree_path(&adj, &cells, n, ei, n + ej);
        // path[0] touches column ej and gets −, then alternate
        let mut theta = f64::INFINITY;
        let mut leave = NONE;
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 && cells[k].2 < theta {
                theta = cells[k].2;
                leave = k;
            }
        }
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                cells[k].2 -= theta;
            } else {
                cells[k].2 += theta;
            }
        }
        // replace the leaving cell by the entering one
        let (li, lj, _) = cells[leave];
        adj[li].retain(|&k| k != leave);
        adj[n + lj].retain(|&k| k != leave);
        cells[leave] = (ei, ej, theta);
        adj[ei].push(leave);
        adj[n + ej].push(leave);
    }
    let value: f64 = cells.iter().map(|&(i, j, x)| cost.get(i, j) * x).sum();
    let lower: f64 = a.iter().zip(&u).map(|(w, p)| w * p).sum::<f64>()
        + b.iter().zip(&v).map(|(w, p)| w * p).sum::<f64>();
    let mut min_rc = f64::INFINITY;
    for i in 0..n {
        for j in 0..m {
            min_rc = min_rc.min(cost.get(i, j) - u[i] - v[j]);
        }
    }
    let mut notes = Vec::new();
    if min_rc < -REDUCED_COST_TOLERANCE * scale {
        notes.push(format!("minimum reduced cost {min_rc:.3e}"));
    }
    let plan: Vec<(usize, usize, f64)> = cells.into_iter().filter(|c| c.2 > 0.0).collect();
    let marginal_error = marginal_error(&plan, a, b);
    Ok(OtSolution {
        value,
        lower_bound: lower.min(value),
        solver: SolverKind::Exact,
        gap: (value - lower).max(0.0),
        plan,
        marginal_error,
        notes,
    })
}

/// Cells on the tree path from row node `from` to node `to`, listed from
/// the `to` end.
fn tree_path(adj: &[Vec<usize>], cells: &[(usize, usize, f64)], n: usize, from: usize, to: usize) -> Vec<usize> {
    let mut via = vec![NONE; adj.len()];
    let mut queue = VecDeque::new();
    via[from] = usize::MAX - 1;
    queue.push_back(from);
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &k in &adj[node] {
            let (i, j, _) = cells[k];
            let other = if node < n { n + j } else { i };
            if via[other] == NONE {
                via[other] = k;
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        let k = via[node];
        path.push(k);
        let (i, j, _) = cells[k];
        node = if node < n { n + j } else { i };
    }
    path
}

fn marginal_error(plan: &[(usize, usize, f64)], a: &[f64], b: &[f64]) -> f64 {
    let mut ra = vec![0.0; a.len()];
    let mut rb = vec![0.0; b.len()];
    for &(i, j, x) in plan {
        ra[i] += x;
        rb[j] += x;
    }
    let ea = ra.iter().zip(a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let eb = rb.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ea.max(eb)
}

// ---------------------------------------------------------------------------
// auction for the capacitated assignment

#[derive(Clone, Copy, PartialEq)]
struct Score(f64, u32);

impl Eq for Score {}
impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Score {
    // reversed: BinaryHeap keeps the worst of the best on top
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// For each target, the `k` nearest sources plus every source that has the
/// target among its `reverse` nearest targets.
fn candidate_lists<C: GroundCost>(cost: &C, k: usize, reverse: usize) -> Vec<Vec<(u32, f64)>> {
    let (n, m) = (cost.sources(), cost.targets());
    let k = k.min(n);
    let reverse = reverse.min(m);
    let mut per_source: Vec<BinaryHeap<Score>> = (0..n).map(|_| BinaryHeap::with_capacity(reverse + 1)).collect();
    let mut floor_src = vec![f64::NEG_INFINITY; n];
    let mut lists: Vec<Vec<(u32, f64)>> = Vec::with_capacity(m);
    let mut heap: BinaryHeap<Score> = BinaryHeap::with_capacity(k + 1);
    for j in 0..m {
        heap.clear();
        let mut floor = f64::NEG_INFINITY;
        for i in 0..n {
            let p = cost.proximity(i, j);
            if p > floor || heap.len() < k {
                heap.push(Score(p, i as u32));
                if heap.len() > k {
                    heap.pop();
                }
                if heap.len() == k {
                    floor = heap.peek().unwrap().0;
                }
            }
            if p > floor_src[i] || per_source[i].len() < reverse {
                let h = &mut per_source[i];
                h.push(Score(p, j as u32));
                if h.len() > reverse {
                    h.pop();
                }
                if h.len() == reverse {
                    floor_src[i] = h.peek().unwrap().0;
                }
            }
        }
        lists.push(heap.iter().map(|s| (s.1, cost.cost_of(s.0))).collect());
    }
    for (i, h) in per_source.into_iter().enumerate() {
        for s in h {
            let list = &mut lists[s.1 as usize];
            if !list.iter().any(|&(src, _)| src as usize == i) {
                list.push((i as u32, cost.cost_of(s.0)));
            }
        }
    }
    for list in &mut lists {
        list.sort_by(|x, y| x.0.cmp(&y.0));
    }
    lists
}

struct Slots {
    k: usize,
    price: Vec<f64>,
    holder: Vec<u32>,
    /// per source, a binary min-heap of slot ids ordered by price
    heap: Vec<u32>,
}

const FREE: u32 = u32::MAX;

impl Slots {
    fn new(n: usize, k: usize) -> Slots {
        Slots {
            k,
            price: vec![0.0; n * k],
            holder: vec![FREE; n * k],
            heap: (0..(n * k) as u32).collect(),
        }
    }

    #[inline]
    fn min_slot(&self, i: usize) -> usize {
        self.heap[i * self.k] as usize
    }

    #[inline]
    fn min_price(&self, i: usize) -> f64 {
        self.price[self.min_slot(i)]
    }

    #[inline]
    fn second_price(&self, i: usize) -> f64 {
        let base = i * self.k;
        match self.k {
            1 => f64::INFINITY,
            2 => self.price[self.heap[base + 1] as usize],
            _ => self.price[self.heap[base + 1] as usize].min(self.price[self.heap[base + 2] as usize]),
        }
    }

    /// Restore heap order after the root of source i got more expensive.
    fn sift_root(&mut self, i: usize) {
        let base = i * self.k;
        let mut pos = 0;
        loop {
            let l = 2 * pos + 1;
            if l >= self.k {
                break;
            }
            let r = l + 1;
            let mut child = l;
            if r < self.k && self.price[self.heap[base + r] as usize] < self.price[self.heap[base + l] as usize] {
                child = r;
            }
            if self.price[self.heap[base + child] as usize] < self.price[self.heap[base + pos] as usize] {
                self.heap.swap(base + child, base + pos);
                pos = child;
            } else {
                break;
            }
        }
    }

    fn rebuild(&mut self, i: usize) {
        let base = i * self.k;
        let price = &self.price;
        self.heap[base..base + self.k].sort_by(|&x, &y| price[x as usize].total_cmp(&price[y as usize]));
    }
}

struct AuctionState {
    slots: Slots,
    /// slot held by each target
    assigned: Vec<u32>,
    /// source and cost of that slot
    assigned_cost: Vec<f64>,
    bids: u64,
}

fn run_bids(lists: &[Vec<(u32, f64)>], st: &mut AuctionState, queue: &mut VecDeque<u32>, eps: f64, cap: u64) -> bool {
    let k = st.slots.k;
    let start = st.bids;
    while let Some(j) = queue.pop_front() {
        st.bids += 1;
        if st.bids - start > cap {
            queue.push_front(j);
            return false;
        }
        let list = &lists[j as usize];
        let (mut v1, mut v2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut best, mut best_c) = (0usize, 0.0);
        for &(i, c) in list {
            let v = -c - st.slots.min_price(i as usize);
            if v > v1 {
                v2 = v1;
                v1 = v;
                best = i as usize;
                best_c = c;
            } else if v > v2 {
                v2 = v;
            }
        }
        if k >= 2 {
            v2 = v2.max(-best_c - st.slots.second_price(best));
        }
        let slot = st.slots.min_slot(best);
        let new_price = if v2.is_finite() {
            -best_c - v2 + eps
        } else {
            st.slots.price[slot] + eps
        };
        let old = st.slots.holder[slot];
        st.slots.holder[slot] = j;
        st.slots.price[slot] = new_price;
        st.slots.sift_root(best);
        st.assigned[j as usize] = slot as u32;
        st.assigned_cost[j as usize] = best_c;
        if old != FREE {
            st.assigned[old as usize] = FREE;
            queue.push_back(old);
        }
    }
    true
}

fn auction<C: GroundCost>(cost: &C, opts: &OtOptions) -> Result<OtSolution> {
    let (n, m) = (cost.sources(), cost.targets());
    let k = m / n;
    let inv_m = 1.0 / m as f64;
    if n == 1 {
        let value: f64 = (0..m).map(|j| cost.cost(0, j)).sum::<f64>() * inv_m;
        return Ok(OtSolution {
            value,
            lower_bound: value,
            solver: SolverKind::Exact,
            gap: 0.0,
            plan: (0..m).map(|j| (0, j, inv_m)).collect(),
            marginal_error: 0.0,
            notes: Vec::new(),
        });
    }
    let mut width = opts.candidates.max(2);
    let mut notes = Vec::new();
    'restart: loop {
        let mut lists = candidate_lists(cost, width, 2 * k);
        let nearest_mean = lists
            .iter()
            .map(|l| l.iter().map(|e| e.1).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            * inv_m;
        let cmax = lists.iter().flat_map(|l| l.iter().map(|e| e.1)).fold(0.0, f64::max);
        let eps_final = (opts.auction_tolerance * nearest_mean).max(1e-14 * cmax).max(1e-300);
        let mut st = AuctionState {
            slots: Slots::new(n, k),
            assigned: vec![FREE; m],
            assigned_cost: vec![0.0; m],
            bids: 0,
        };
        let cap = 200 * m as u64 + 1_000_000;
        let mut eps = (cmax / 4.0).max(eps_final);
        let mut queue: VecDeque<u32> = VecDeque::with_capacity(m);
        loop {
            st.slots.holder.iter_mut().for_each(|h| *h = FREE);
            st.assigned.iter_mut().for_each(|a| *a = FREE);
            queue.clear();
            queue.extend(0..m as u32);
            if !run_bids(&lists, &mut st, &mut queue, eps, cap) {
                if width >= n {
                    return Err(Error::LinearAlgebra("auction failed to converge on the full graph".into()));
                }
                width = (width * 2).min(n);
                notes.push(format!("candidate lists widened to {width}"));
                continue 'restart;
            }
            // keep prices small
            let lo = st.slots.price.iter().cloned().fold(f64::INFINITY, f64::min);
            st.slots.price.iter_mut().for_each(|p| *p -= lo);
            if eps <= eps_final {
                break;
            }
            eps = (eps / 5.0).max(eps_final);
        }
        // certification over all pairs, repaired until the gap closes
        for _round in 0..50 {
            let pmin: Vec<f64> = (0..n).map(|i| st.slots.min_price(i)).collect();
            let p_lo = pmin.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut upper = 0.0;
            let mut best_sum = 0.0;
            let mut violators = Vec::new();
            for j in 0..m {
                let slot = st.assigned[j] as usize;
                let src = slot / k;
                let cj = st.assigned_cost[j];
                upper += cj;
                let mut best = cj + pmin[src];
                let mut arg = src;
                let floor = cost.proximity_floor(best - p_lo);
                for i in 0..n {
                    let p = cost.proximity(i, j);
                    if p >= floor {
                        let v = cost.cost_of(p) + pmin[i];
                        if v < best {
                            best = v;
                            arg = i;
                        }
                    }
                }
                best_sum += best;
                if cj + st.slots.price[slot] > best + eps_final * (1.0 + 1e-9) {
                    violators.push((j, arg));
                }
            }
            let upper = upper * inv_m;
            let lower = best_sum * inv_m - pmin.iter().sum::<f64>() / n as f64;
            let gap = (upper - lower).max(0.0);
            if gap <= 1.5 * eps_final || violators.is_empty() {
                let plan: Vec<(usize, usize, f64)> = st
                    .assigned
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| (s as usize / k, j, inv_m))
                    .collect();
                if gap > 1.5 * eps_final {
                    notes.push(format!("certified gap {gap:.3e} above target {eps_final:.3e}"));
                }
                return Ok(OtSolution {
                    value: upper,
                    lower_bound: lower.min(upper),
                    solver: SolverKind::Exact,
                    gap,
                    plan,
                    marginal_error: 0.0,
                    notes,
                });
            }
            for &(j, i) in &violators {
                if !lists[j].iter().any(|&(s, _)| s as usize == i) {
                    lists[j].push((i as u32, cost.cost(i, j)));
                }
                let slot = st.assigned[j] as usize;
                st.slots.holder[slot] = FREE;
                st.assigned[j] = FREE;
                queue.push_back(j as u32);
            }
            if !run_bids(&lists, &mut st, &mut queue, eps_final, cap) {
                width = (width * 2).min(n);
                notes.push(format!("candidate lists widened to {width}"));
                continue 'restart;
            }
            for i in 0..n {
                st.slots.rebuild(i);
            }
        }
        return Err(Error::LinearAlgebra("auction certification did not close the gap".into()));
    }
}

// ---------------------------------------------------------------------------
// entropic

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mx = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + values.map(|v| (v - mx).exp()).sum::<f64>().ln()
}

fn sinkhorn(cost: &CostMatrix, a: &[f64], b: &[f64], opts: &OtOptions) -> Result<OtSolution> {
    let (n, m) = (cost.rows, cost.cols);
    let la: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    let lb: Vec<f64> = b.iter().map(|x| x.ln()).collect();
    let cmax = cost.data.iter().cloned().fold(0.0, f64::max);
    let nearest_mean: f64 = (0..m)
        .map(|j| (0..n).map(|i| cost.get(i, j)).fold(f64::INFINITY, f64::min) * b[j])
        .sum();
    let eps_final = (opts.entropic_epsilon * nearest_mean.max(1e-12 * cmax)).max(1e-300);
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let mut eps = (cmax / 2.0).max(eps_final);
    let mut iterations = 0;
    let mut col = vec![0.0; m];
    loop {
        for _ in 0..opts.entropic_max_iterations {
            iterations += 1;
            for j in 0..m {
                g[j] = -eps * log_sum_exp((0..n).map(|i| la[i] + (f[i] - cost.get(i, j)) / eps));
            }
            for i in 0..n {
                f[i] = -eps * log_sum_exp((0..m).map(|j| lb[j] + (g[j] - cost.get(i, j)) / eps));
            }
            // column marginal after the row update
            col.iter_mut().for_each(|c| *c = 0.0);
            for i in 0..n {
                for j in 0..m {
                    col[j] += (la[i] + lb[j] + (f[i] + g[j] - cost.get(i, j)) / eps).exp();
                }
            }
            let err: f64 = col.iter().zip(b).map(|(c, w)| (c - w).abs()).sum();
            if err < 1e-9 {
                break;
            }
        }
        if eps <= eps_final {
            break;
        }
        eps = (eps / 4.0).max(eps_final);
    }
    // rounded feasible plan
    let mut p = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            p[i * m + j] = (la[i] + lb[j] + (f[i] + g[j] - cost.get(i, j)) / eps).exp();
        }
    }
    for i in 0..n {
        let r: f64 = p[i * m..(i + 1) * m].iter().sum();
        if r > a[i] {
            let s = a[i] / r;
            p[i * m..(i + 1) * m].iter_mut().for_each(|x| *x *= s);
        }
    }
    let mut c = vec![0.0; m];
    for i in 0..n {
        for j in 0..m {
            c[j] += p[i * m + j];
        }
    }
    for j in 0..m {
        if c[j] > b[j] {
            let s = b[j] / c[j];
            for i in 0..n {
                p[i * m + j] *= s;
            }
        }
    }
    let mut er = a.to_vec();
    let mut ec = b.to_vec();
    for i in 0..n {
        for j in 0..m {
            er[i] -= p[i * m + j];
            ec[j] -= p[i * m + j];
        }
    }
    er.iter_mut().for_each(|x| *x = x.max(0.0));
    ec.iter_mut().for_each(|x| *x = x.max(0.0));
    let mass: f64 = er.iter().sum();
    let mut upper = 0.0;
    let mut ra = vec![0.0; n];
    let mut rb = vec![0.0; m];
    for i in 0..n {
        for j in 0..m {
            let mut x = p[i * m + j];
            if mass > 0.0 {
                x += er[i] * ec[j] / mass;
            }
            upper += cost.get(i, j) * x;
            ra[i] += x;
            rb[j] += x;
        }
    }
    // feasible dual: g'_j = min_i (c_ij − f_i)
    let mut lower: f64 = a.iter().zip(&f).map(|(w, x)| w * x).sum();
    for j in 0..m {
        let gj = (0..n).map(|i| cost.get(i, j) - f[i]).fold(f64::INFINITY, f64::min);
        lower += b[j] * gj;
    }
    let marginal = ra
        .iter()
        .zip(a)
        .map(|(x, y)| (x - y).abs())
        .chain(rb.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    Ok(OtSolution {
        value: upper,
        lower_bound: lower.min(upper),
        solver: SolverKind::Entropic,
        gap: (upper - lower).max(0.0),
        plan: Vec::new(),
        marginal_error: marginal,
        notes: vec![format!("{iterations} Sinkhorn iterations, final ε = {eps:.3e}")],
    })
}

// ---------------------------------------------------------------------------
// W₂ against the volume

/// W₂ between an empirical measure and the volume, with a certified bracket.
#[derive(Clone, Debug)]
pub struct W2Estimate {
    /// √(cost of the returned plan to the quantized target)
    pub value: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    /// Target size actually used.
    pub m: usize,
    /// Quantization radius of the target.
    pub q: f64,
    pub solver: SolverKind,
    /// Upper minus lower transport bound (squared-distance units).
    pub duality_gap: f64,
    pub warnings: Vec<String>,
}

/// Solves against a prebuilt target; weights must be uniform.
pub fn w2_to_target(ps: &PointSet, target: &QuadratureTarget, opts: &OtOptions) -> Result<W2Estimate> {
    let n = ps.len();
    let m = target.nodes.len();
    if n == 0 || m == 0 {
        return Err(invalid("empty point set or target"));
    }
    let cost = PointCost {
        manifold: ps.manifold,
        sources: &ps.points,
        targets: &target.nodes,
    };
    let mut warnings = Vec::new();
    if m < n {
        warnings.push(format!("target size M = {m} is below N = {n}"));
    }
    let sol = match opts.solver {
        SolverKind::Exact if m % n != 0 => {
            let a = vec![1.0 / n as f64; n];
            let dense = CostMatrix::from_fn(n, m, |i, j| cost.cost(i, j))?;
            solve_discrete_ot(&dense, &a, &target.weights, opts)?
        }
        _ => solve_uniform(&cost, opts)?,
    };
    warnings.extend(sol.notes.iter().cloned());
    let upper = sol.value.max(0.0).sqrt();
    let lower = sol.lower_bound.max(0.0).sqrt();
    Ok(W2Estimate {
        value: upper,
        bracket_low: (lower - target.radius).max(0.0),
        bracket_high: upper + target.radius,
        m,
        q: target.radius,
        solver: sol.solver,
        duality_gap: sol.gap,
        warnings,
    })
}

/// Target size used by [`w2_to_volume`]: `m` rounded up to a multiple of N
/// so the exact path stays an assignment problem.
pub fn effective_target_size(n: usize, m: usize) -> usize {
    m.max(1).div_ceil(n.max(1)) * n.max(1)
}

/// W₂((1/N)Σδ_{x_n}, Vol) through an M-node equal-area quantization.
pub fn w2_to_volume(ps: &PointSet, m: usize, opts: &OtOptions) -> Result<W2Estimate> {
    let m_eff = effective_target_size(ps.len(), m);
    let target = quadrature_target(&ps.manifold, m_eff)?;
    let mut est = w2_to_target(ps, &target, opts)?;
    if m_eff != m {
        est.warnings.push(format!("target size rounded from {m} to {m_eff}"));
    }
    Ok(est)
}

/// max over δ ∈ (0, diam/2] of δ(1 − Ncδ^d): a lower bound for W₁ ≤ W₂ for
/// every N-point configuration.
pub fn w1_packing_lower_bound(n: usize, m: &Manifold) -> f64 {
    let n = n.max(1) as f64;
    let d = m.dim() as f64;
    let c = m.ball_volume_constant();
    let delta = (1.0 / ((d + 1.0) * c * n)).powf(1.0 / d).min(m.diameter() / 2.0);
    (delta * (1.0 - n * c * delta.powf(d))).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{equal_area_partition, uniform_sample};
    use crate::rng::stream;
    use crate::samplers::sample_iid;
    use rand::Rng;
    use std::f64::consts::PI;

    /// Minimum of the transport LP over the vertices of the polytope:
    /// every choice of n+m−1 cells whose equality system is uniquely
    /// solvable with a nonnegative solution.
    fn brute_force(cost: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
        let (n, m) = (a.len(), b.len());
        let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
        let k = n + m - 1;
        let mut best = f64::INFINITY;
        let total = cells.len();
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let chosen: Vec<(usize, usize)> = (0..total).filter(|t| mask & (1 << t) != 0).map(|t| cells[t]).collect();
            // equations: rows, then columns except the last (redundant)
            let eqs = n + m - 1;
            let mut mat = vec![vec![0.0; k + 1]; eqs];
            for (v, &(i, j)) in chosen.iter().enumerate() {
                mat[i][v] = 1.0;
                if j < m - 1 {
                    mat[n + j][v] = 1.0;
                }
            }
            for i in 0..n {
                mat[i][k] = a[i];
            }
            for j in 0..m - 1 {
                mat[n + j][k] = b[j];
            }
            // Gaussian elimination with partial pivoting
            let mut singular = false;
            for col in 0..k {
                let piv = (col..eqs).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs())).unwrap();
                if mat[piv][col].abs() < 1e-12 {
                    singular = true;
                    break;
                }
                mat.swap(col, piv);
                for r in 0..eqs {
                    if r != col {
                        let f = mat[r][col] / mat[col][col];
                        for c2 in col..=k {
                            mat[r][c2] -= f * mat[col][c2];
                        }
                    }
                }
            }
            if singular {
                continue;
            }
            let x: Vec<f64> = (0..k).map(|v| mat[v][k] / mat[v][v]).collect();
            if x.iter().any(|&v| v < -1e-12) {
                continue;
            }
            let value: f64 = chosen.iter().zip(&x).map(|(&(i, j), v)| cost[i][j] * v).sum();
            best = best.min(value);
        }
        best
    }

    #[test]
    fn trivial_instances() {
        let c = CostMatrix::from_rows(&[vec![2.5]]).unwrap();
        let s = solve_discrete_ot(&c, &[1.0], &[1.0], &OtOptions::default()).unwrap();
        assert_eq!(s.value, 2.5);
        let c = CostMatrix::from_rows(&[vec![0.0, 1.0, 4.0], vec![1.0, 0.0, 1.0], vec![4.0, 1.0, 0.0]]).unwrap();
        let w = [1.0 / 3.0; 3];
        let s = solve_discrete_ot(&c, &w, &w, &OtOptions::default()).unwrap();
        assert!(s.value.abs() < 1e-15);
        let a = [0.5, 0.25, 0.25];
        let s = solve_discrete_ot(&c, &a, &w, &OtOptions::default()).unwrap();
        let rows: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| c.get(i, j)).collect()).collect();
        let oracle = brute_force(&rows, &a, &w);
        assert!((s.value - oracle).abs() < 1e-9, "{} vs {oracle}", s.value);
        // mass 1/6 crosses 0→1 and 1/12 crosses 1→2 at unit cost
        assert!((oracle - 0.25).abs() < 1e-12);
        assert!(s.marginal_error < 1e-12);
        assert!(s.gap < 1e-12);
    }

    #[test]
    fn bad_weights_are_rejected() {
        let c = CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let o = OtOptions::default();
        assert!(solve_discrete_ot(&c, &[0.5, 0.6], &[0.5, 0.5], &o).is_err());
        assert!(solve_discrete_ot(&c, &[1.5, -0.5], &[0.5, 0.5], &o).is_err());
        assert!(solve_discrete_ot(&c, &[1.0], &[0.5, 0.5], &o).is_err());
        assert!(CostMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    #[test]
    fn simplex_matches_vertex_enumeration() {
        let mut rng = stream(99);
        for case in 0..100 {
            let rows: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random::<f64>() * 5.0).collect()).collect();
            let a = random_simplex(&mut rng, 3);
            let b = if case % 4 == 0 { vec![1.0 / 3.0; 3] } else { random_simplex(&mut rng, 3) };
            let c = CostMatrix::from_rows(&rows).unwrap();
            let s = solve_discrete_ot(&c, &a, &b, &OtOptions::default()).unwrap();
            let oracle = brute_force(&rows, &a, &b);
            assert!((s.value - oracle).abs() < 1e-9, "case {case}: {} vs {oracle}", s.value);
            assert!(s.marginal_error < 1e-9);
        }
    }

    #[test]
    fn simplex_on_rectangular_and_degenerate_instances() {
        let mut rng = stream(5);
        for &(n, m) in &[(1usize, 4usize), (4, 1), (2, 5), (5, 3)] {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect();
            let a = random_simplex(&mut rng, n);
            let b = random_simplex(&mut rng, m);
            let c = CostMatrix::from_rows(&rows).unwrap();
            let s = solve_discrete_ot(&c, &a, &b, &OtOptions::default()).unwrap();
            if n * m <= 20 {
                let oracle = brute_force(&rows, &a, &b);
                assert!((s.value - oracle).abs() < 1e-9, "{n}×{m}");
            }
            assert!(s.marginal_error < 1e-12);
        }
        // integer costs with many ties
        let rows: Vec<Vec<f64>> = (0..6).map(|i| (0..6).map(|j| ((i * j) % 3) as f64).collect()).collect();
        let w = vec![1.0 / 6.0; 6];
        let c = CostMatrix::from_rows(&rows).unwrap();
        let v = vec![0.1, 0.2, 0.3, 0.1, 0.2, 0.1];
        let s = transport_simplex(&c, &v, &w).unwrap();
        assert!(s.gap < 1e-12 && s.notes.is_empty());
    }

    #[test]
    fn auction_matches_simplex() {
        let mut rng = stream(17);
        for &(n, k) in &[(2usize, 1usize), (3, 2), (5, 4), (12, 3), (30, 1)] {
            let m = n * k;
            let src: Vec<Point> = (0..n).map(|_| uniform_sample(&Manifold::Sphere2, &mut rng)).collect();
            let tgt: Vec<Point> = (0..m).map(|_| uniform_sample(&Manifold::Sphere2, &mut rng)).collect();
            let pc = PointCost {
                manifold: Manifold::Sphere2,
                sources: &src,
                targets: &tgt,
            };
            let dense = CostMatrix::from_fn(n, m, |i, j| pc.cost(i, j)).unwrap();
            let a = vec![1.0 / n as f64; n];
            let b = vec![1.0 / m as f64; m];
            let simplex = transport_simplex(&dense, &a, &b).unwrap();
            let opts = OtOptions {
                candidates: 2,
                ..OtOptions::default()
            };
            let auction = solve_uniform(&pc, &opts).unwrap();
            assert!(
                (simplex.value - auction.value).abs() < 1e-8 * simplex.value.max(1e-3),
                "n={n} k={k}: {} vs {}",
                simplex.value,
                auction.value
            );
            assert!(auction.lower_bound <= simplex.value + 1e-12);
            assert!(auction.gap <= 1e-8 * simplex.value.max(1e-3));
            assert_eq!(marginal_error(&auction.plan, &a, &b), 0.0);
        }
    }

    #[test]
    fn relabeling_does_not_change_the_value() {
        let mut rng = stream(23);
        let rows: Vec<Vec<f64>> = (0..4).map(|_| (0..6).map(|_| rng.random::<f64>()).collect()).collect();
        let a = random_simplex(&mut rng, 4);
        let b = random_simplex(&mut rng, 6);
        let s1 = solve_discrete_ot(&CostMatrix::from_rows(&rows).unwrap(), &a, &b, &OtOptions::default()).unwrap();
        let perm_r = [2, 0, 3, 1];
        let perm_c = [5, 3, 1, 0, 2, 4];
        let rows2: Vec<Vec<f64>> = perm_r.iter().map(|&i| perm_c.iter().map(|&j| rows[i][j]).collect()).collect();
        let a2: Vec<f64> = perm_r.iter().map(|&i| a[i]).collect();
        let b2: Vec<f64> = perm_c.iter().map(|&j| b[j]).collect();
        let s2 = solve_discrete_ot(&CostMatrix::from_rows(&rows2).unwrap(), &a2, &b2, &OtOptions::default()).unwrap();
        assert!((s1.value - s2.value).abs() < 1e-12);
    }

    #[test]
    fn entropic_brackets_the_exact_value() {
        let mut rng = stream(31);
        for _ in 0..5 {
            let rows: Vec<Vec<f64>> = (0..6).map(|_| (0..8).map(|_| rng.random::<f64>()).collect()).collect();
            let a = random_simplex(&mut rng, 6);
            let b = random_simplex(&mut rng, 8);
            let c = CostMatrix::from_rows(&rows).unwrap();
            let exact = solve_discrete_ot(&c, &a, &b, &OtOptions::default()).unwrap();
            let opts = OtOptions {
                solver: SolverKind::Entropic,
                ..OtOptions::default()
            };
            let ent = solve_discrete_ot(&c, &a, &b, &opts).unwrap();
            assert!(ent.value >= exact.value - 1e-12);
            assert!(ent.lower_bound <= exact.value + 1e-12);
            assert!(ent.value - ent.gap <= exact.value + 1e-12);
            assert!(ent.marginal_error < 1e-12);
            assert!(ent.gap < 0.05, "gap {}", ent.gap);
        }
    }

    #[test]
    fn target_nodes_have_zero_distance() {
        for m in [Manifold::Sphere2, Manifold::standard_torus(2).unwrap()] {
            let target = quadrature_target(&m, 64).unwrap();
            let ps = PointSet::from_points(m, target.nodes.clone()).unwrap();
            let est = w2_to_volume(&ps, 64, &OtOptions::default()).unwrap();
            assert!(est.value < 1e-7, "{}", est.value);
            assert_eq!(est.bracket_low, 0.0);
            assert!((est.bracket_high - est.value - est.q).abs() < 1e-15);
        }
    }

    #[test]
    fn single_atom_on_the_sphere() {
        let exact = ((PI * PI - 4.0) / 2.0).sqrt();
        assert!((exact - 1.7131).abs() < 1e-4);
        let ps = PointSet::from_points(Manifold::Sphere2, vec![Point::sphere(0.3, -0.4, 0.5)]).unwrap();
        let est = w2_to_volume(&ps, 8192, &OtOptions::default()).unwrap();
        assert!(est.bracket_low <= exact && exact <= est.bracket_high, "{est:?}");
        assert!((est.value - exact).abs() < 1e-2);
        assert!(w1_packing_lower_bound(1, &Manifold::Sphere2) <= exact);
    }

    #[test]
    fn single_atom_on_a_one_cell_torus() {
        let m = Manifold::standard_torus(2).unwrap();
        let x = Point::torus(&[0.1, 0.3]);
        let ps = PointSet::from_points(m, vec![x]).unwrap();
        let est = w2_to_volume(&ps, 1, &OtOptions::default()).unwrap();
        let d = m.distance(&x, &Point::torus(&[0.5, 0.5]));
        assert!((est.value - d).abs() < 1e-15);
    }

    #[test]
    fn brackets_and_rounding() {
        let m = Manifold::standard_torus(2).unwrap();
        let ps = sample_iid(&m, 7, 3).unwrap();
        let est = w2_to_volume(&ps, 50, &OtOptions::default()).unwrap();
        assert_eq!(est.m, 56);
        assert!(est.bracket_low <= est.value && est.value <= est.bracket_high);
        assert!(est.bracket_high - est.bracket_low <= 2.0 * est.q + 1e-12);
        assert!(est.warnings.iter().any(|w| w.contains("rounded")));
        // doubling M never increases q; values agree within the brackets
        let mut prev: Option<W2Estimate> = None;
        for mm in [56, 112, 224, 448] {
            let e = w2_to_volume(&ps, mm, &OtOptions::default()).unwrap();
            if let Some(p) = prev {
                assert!(e.q <= p.q + 1e-12);
                assert!((e.value - p.value).abs() <= e.q + p.q + 1e-12);
            }
            prev = Some(e);
        }
    }

    #[test]
    fn entropic_w2_brackets_exact_w2() {
        let ps = sample_iid(&Manifold::Sphere2, 10, 8).unwrap();
        let ex = w2_to_volume(&ps, 80, &OtOptions::default()).unwrap();
        let opts = OtOptions {
            solver: SolverKind::Entropic,
            ..OtOptions::default()
        };
        let en = w2_to_volume(&ps, 80, &opts).unwrap();
        assert_eq!(en.solver, SolverKind::Entropic);
        assert!(en.value >= ex.value - 1e-12);
        assert!(en.bracket_low <= ex.value && ex.value <= en.bracket_high);
    }

    #[test]
    fn packing_bound() {
        for m in [Manifold::Sphere2, Manifold::standard_torus(2).unwrap()] {
            let c = m.ball_volume_constant();
            for n in [1usize, 4, 16, 100, 1000] {
                let v = w1_packing_lower_bound(n, &m);
                let star = (1.0 / (3.0 * c * n as f64)).sqrt();
                if star <= m.diameter() / 2.0 {
                    assert!((v - 2.0 / 3.0 * star).abs() < 1e-12);
                }
                // grid search oracle over δ ∈ (0, diam/2]
                let grid = (1..=20000)
                    .map(|t| t as f64 / 20000.0 * m.diameter() / 2.0)
                    .map(|d| d * (1.0 - n as f64 * c * d * d))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(v >= grid - 1e-12 && v <= grid + 1e-6, "n={n}");
                assert!((w1_packing_lower_bound(4 * n, &m) - v / 2.0).abs() < 1e-12 || star > m.diameter() / 2.0);
            }
        }
        assert!((w1_packing_lower_bound(1, &Manifold::Sphere2) - 2.0 / 3.0 * (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn auction_on_sampled_configurations() {
        let t3 = Manifold::standard_torus(3).unwrap();
        let hex = Manifold::Torus(crate::manifold::Torus::hexagonal());
        for m in [Manifold::Sphere2, t3, hex] {
            let ps = sample_iid(&m, 40, 2).unwrap();
            let target = quadrature_target(&m, 160).unwrap();
            let est = w2_to_target(&ps, &target, &OtOptions::default()).unwrap();
            let pc = PointCost {
                manifold: m,
                sources: &ps.points,
                targets: &target.nodes,
            };
            let dense = CostMatrix::from_fn(40, 160, |i, j| pc.cost(i, j)).unwrap();
            let simplex = transport_simplex(&dense, &vec![1.0 / 40.0; 40], &vec![1.0 / 160.0; 160]).unwrap();
            assert!((est.value * est.value - simplex.value).abs() < 1e-9 * simplex.value, "{}", m.label());
            let _ = equal_area_partition(&m, 2).unwrap();
        }
    }
}
