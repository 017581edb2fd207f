//! Generalized multiway cut on trees: the reduction to multicut, and the
//! connection-pattern dynamic program for the weighted problem.
//!
//! A connection pattern is a `u32` bitmask over the terminal sets: bit `i`
//! set at vertex `u` means exactly one terminal of set `i` is still joined
//! to `u` inside `T_u`; clear means none is.

use arrayvec::ArrayVec;
use thiserror::Error;

use crate::branch::{solve_decision, SolveOptions};
use crate::model::{CutSet, EdgeId, Instance, VertexId};

pub const MAX_Q: usize = 20;
pub const INF: u64 = u64::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GmwctError {
    #[error("{0} terminal sets exceed the supported maximum of {MAX_Q}")]
    TooManySets(usize),
    #[error("instance has no terminal sets")]
    NoTerminalSets,
    #[error("vertex id {0} out of range")]
    BadVertexId(usize),
    #[error("cost vector has {0} entries for {1} edges")]
    CostCount(usize, usize),
    #[error("no terminals remain after preprocessing")]
    EmptyAfterPreprocessing,
}

/// All unordered pairs inside each terminal set, deduplicated and sorted.
pub fn expand_to_requests(terminal_sets: &[Vec<VertexId>]) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for set in terminal_sets {
        let mut s = set.clone();
        s.sort_unstable();
        s.dedup();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                out.push((s[i], s[j]));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Binary rooted tree in which leaves are exactly the terminals.
#[derive(Debug, Clone)]
pub struct PreprocessedTree {
    pub root: usize,
    /// Up to two children per vertex.
    pub children: Vec<ArrayVec<usize, 2>>,
    /// Cost of the edge to the parent (`sentinel` for synthetic edges).
    pub up_cost: Vec<u64>,
    /// Original edge realized by the edge to the parent, if any.
    pub up_edge: Vec<Option<EdgeId>>,
    /// Pattern contributed by a leaf (its set memberships).
    pub membership: Vec<u32>,
    pub sentinel: u64,
    pub q: usize,
}

impl PreprocessedTree {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn max_children(&self) -> usize {
        self.children.iter().map(|c| c.len()).max().unwrap_or(0)
    }
}

/// Builds the binary tree the dynamic program runs on: internal terminals
/// get a pendant copy behind a sentinel edge, non-terminal leaves are
/// pruned until none remain, and high-degree vertices become sentinel
/// chains.
pub fn preprocess(
    n: usize,
    edges: &[(VertexId, VertexId)],
    costs: &[u64],
    terminal_sets: &[Vec<VertexId>],
) -> Result<PreprocessedTree, GmwctError> {
    let q = terminal_sets.len();
    if q == 0 {
        return Err(GmwctError::NoTerminalSets);
    }
    if q > MAX_Q {
        return Err(GmwctError::TooManySets(q));
    }
    if costs.len() != edges.len() {
        return Err(GmwctError::CostCount(costs.len(), edges.len()));
    }
    let mut membership = vec![0u32; n];
    for (i, set) in terminal_sets.iter().enumerate() {
        for &v in set {
            if v >= n {
                return Err(GmwctError::BadVertexId(v));
            }
            membership[v] |= 1 << i;
        }
    }
    let sentinel = costs.iter().fold(0u64, |a, &c| a.saturating_add(c)).saturating_add(1);

    // Flat adjacency: the neighbors of v are nbr[start[v]..start[v + 1]].
    let mut start = vec![0usize; n + 1];
    for &(a, b) in edges {
        start[a + 1] += 1;
        start[b + 1] += 1;
    }
    for v in 0..n {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut nbr = vec![(0usize, 0 as EdgeId); 2 * edges.len()];
    for (id, &(a, b)) in edges.iter().enumerate() {
        nbr[fill[a]] = (b, id);
        fill[a] += 1;
        nbr[fill[b]] = (a, id);
        fill[b] += 1;
    }
    // Root at an inner vertex so that a terminal leaf never ends up as
    // the root and needs a pendant copy.
    let mut parent = vec![usize::MAX; n];
    let mut up_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let root = (0..n).find(|&v| start[v + 1] - start[v] >= 2).unwrap_or(0);
    parent[root] = root;
    order.push(root);
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &(u, id) in &nbr[start[v]..start[v + 1]] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                up_edge[u] = Some(id);
                order.push(u);
            }
        }
    }

    // From here on vertices are addressed by BFS position, which keeps the
    // parent lookups close to sequential in memory.
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let par: Vec<usize> = order.iter().map(|&v| pos[parent[v]]).collect();
    let mem: Vec<u32> = order.iter().map(|&v| membership[v]).collect();
    let up: Vec<Option<EdgeId>> = order.iter().map(|&v| up_edge[v]).collect();
    drop(pos);

    // Prune non-terminal leaves bottom-up: a vertex survives iff its subtree
    // holds a terminal.
    let mut keep: Vec<bool> = mem.iter().map(|&m| m != 0).collect();
    for i in (1..n).rev() {
        if keep[i] {
            keep[par[i]] = true;
        }
    }
    if !keep[0] {
        return Err(GmwctError::EmptyAfterPreprocessing);
    }
    let mut has_kids = vec![false; n];
    for i in 1..n {
        if keep[i] {
            has_kids[par[i]] = true;
        }
    }

    let mut t = PreprocessedTree {
        root: 0,
        children: Vec::with_capacity(2 * n),
        up_cost: Vec::with_capacity(2 * n),
        up_edge: Vec::with_capacity(2 * n),
        membership: Vec::with_capacity(2 * n),
        sentinel,
        q,
    };
    let mut new_id = vec![usize::MAX; n];
    let push = |t: &mut PreprocessedTree, cost: u64, edge: Option<EdgeId>, mem: u32| -> usize {
        t.children.push(ArrayVec::new());
        t.up_cost.push(cost);
        t.up_edge.push(edge);
        t.membership.push(mem);
        t.children.len() - 1
    };
    // Parents are created before children.
    for i in 0..n {
        if !keep[i] {
            continue;
        }
        let cost = up[i].map_or(0, |e| costs[e]);
        let id = push(&mut t, cost, up[i], 0);
        new_id[i] = id;
        if i != 0 {
            // Attach to the parent's current open slot (see below).
            attach(&mut t, new_id[par[i]], id, sentinel);
        }
        if mem[i] != 0 {
            if has_kids[i] {
                let pendant = push(&mut t, sentinel, None, mem[i]);
                attach(&mut t, id, pendant, sentinel);
            } else {
                t.membership[id] = mem[i];
            }
        }
    }
    t.root = new_id[0];
    Ok(t)
}

/// Adds `child` under `parent`, growing a sentinel chain when `parent`
/// already has two children. Chains descend through the second slot.
fn attach(t: &mut PreprocessedTree, parent: usize, child: usize, sentinel: u64) {
    let mut p = parent;
    loop {
        if t.children[p].len() < 2 {
            t.children[p].push(child);
            return;
        }
        let second = t.children[p][1];
        if t.up_edge[second].is_none() && t.up_cost[second] == sentinel && t.membership[second] == 0 {
            // `second` is a chain vertex.
            p = second;
            continue;
        }
        // Replace the second child by a chain vertex holding it and `child`.
        t.children.push(ArrayVec::from([second, child]));
        t.up_cost.push(sentinel);
        t.up_edge.push(None);
        t.membership.push(0);
        let chain = t.children.len() - 1;
        t.children[p][1] = chain;
        return;
    }
}

/// Cost with the number of removed edges as a secondary key.
type Val = (u64, u32);
const VINF: Val = (INF, u32::MAX);

fn add(a: Val, b: Val) -> Val {
    if a.0 == INF || b.0 == INF {
        VINF
    } else {
        (a.0.saturating_add(b.0), a.1 + b.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    None,
    /// Leaf entry.
    Leaf,
    /// One child: either kept with the same pattern, or removed.
    One { removed: bool },
    /// Two children: pattern of the first child (when kept), and which
    /// edges are removed.
    Two { first: u32, cut_a: bool, cut_b: bool },
}

/// Rows of the dynamic program.
#[derive(Debug, Clone)]
pub struct DpTable {
    pub width: usize,
    values: Vec<Val>,
    choices: Vec<Choice>,
}

impl DpTable {
    pub fn cost(&self, u: usize, pattern: u32) -> u64 {
        self.values[u * self.width + pattern as usize].0
    }

    pub fn row(&self, u: usize) -> Vec<u64> {
        (0..self.width).map(|b| self.cost(u, b as u32)).collect()
    }

    fn best(&self, u: usize) -> (u32, Val) {
        let mut best = (0u32, VINF);
        for b in 0..self.width {
            let v = self.values[u * self.width + b];
            if v < best.1 {
                best = (b as u32, v);
            }
        }
        best
    }
}

/// Leaf row: zero at the membership pattern, infinite elsewhere.
pub fn dp_leaf(membership: u32, q: usize) -> Vec<u64> {
    (0..1u32 << q).map(|b| if b == membership { 0 } else { INF }).collect()
}

/// Row of a vertex with a single child.
pub fn dp_one_child(child: &[u64], edge_cost: u64) -> Vec<u64> {
    let m = child.iter().copied().min().unwrap_or(INF);
    let removed = if m == INF { INF } else { m.saturating_add(edge_cost) };
    let mut row = child.to_vec();
    row[0] = row[0].min(removed);
    row
}

/// Row of a vertex with two children.
pub fn dp_two_children(a: &[u64], b: &[u64], cost_a: u64, cost_b: u64) -> Vec<u64> {
    let width = a.len();
    let ma = a.iter().copied().min().unwrap_or(INF);
    let mb = b.iter().copied().min().unwrap_or(INF);
    let sat = |x: u64, y: u64| if x == INF || y == INF { INF } else { x.saturating_add(y) };
    let mut row = vec![INF; width];
    for pat in 0..width {
        let mut best = INF;
        let mut sub = pat;
        loop {
            best = best.min(sat(a[sub], b[pat ^ sub]));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & pat;
        }
        best = best.min(sat(sat(ma, cost_a), b[pat]));
        best = best.min(sat(sat(mb, cost_b), a[pat]));
        row[pat] = best;
    }
    row[0] = row[0].min(sat(sat(ma, cost_a), sat(mb, cost_b)));
    row
}

/// Runs the dynamic program bottom-up without recursion.
pub fn run_dp(t: &PreprocessedTree) -> DpTable {
    let width = 1usize << t.q;
    let n = t.len();
    let mut values = vec![VINF; n * width];
    let mut choices = vec![Choice::None; n * width];
    // Post-order via an explicit stack.
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![t.root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(t.children[v].iter().copied());
    }
    let mut subs = Vec::with_capacity(width);
    for &u in order.iter().rev() {
        let base = u * width;
        match t.children[u].as_slice() {
            [] => {
                let m = t.membership[u] as usize;
                values[base + m] = (0, 0);
                choices[base + m] = Choice::Leaf;
            }
            &[c] => {
                let cb = c * width;
                let (_, mbest) = best_of(&values[cb..cb + width]);
                let removed = add(mbest, (t.up_cost[c], 1));
                for pat in 0..width {
                    let keep = values[cb + pat];
                    let (val, ch) = if pat == 0 && removed < keep {
                        (removed, Choice::One { removed: true })
                    } else {
                        (keep, Choice::One { removed: false })
                    };
                    values[base + pat] = val;
                    choices[base + pat] = ch;
                }
            }
            &[a, b] => {
                let (ab, bb) = (a * width, b * width);
                let (_, ma) = best_of(&values[ab..ab + width]);
                let (_, mb) = best_of(&values[bb..bb + width]);
                let ra = add(ma, (t.up_cost[a], 1));
                let rb = add(mb, (t.up_cost[b], 1));
                for pat in 0..width {
                    subs.clear();
                    let mut best = VINF;
                    let mut ch = Choice::None;
                    // Keep both: submasks in increasing order.
                    let mut sub = pat;
                    loop {
                        subs.push(sub);
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & pat;
                    }
                    for &s in subs.iter().rev() {
                        let v = add(values[ab + s], values[bb + (pat ^ s)]);
                        if v < best {
                            best = v;
                            ch = Choice::Two { first: s as u32, cut_a: false, cut_b: false };
                        }
                    }
                    // One removed, lower original edge id first.
                    let mut singles = [(a, true), (b, false)];
                    if t.up_edge[b] < t.up_edge[a] {
                        singles.swap(0, 1);
                    }
                    for (_, cut_first) in singles {
                        let v = if cut_first {
                            add(ra, values[bb + pat])
                        } else {
                            add(rb, values[ab + pat])
                        };
                        if v < best {
                            best = v;
                            ch = Choice::Two { first: if cut_first { 0 } else { pat as u32 }, cut_a: cut_first, cut_b: !cut_first };
                        }
                    }
                    if pat == 0 {
                        let v = add(ra, rb);
                        if v < best {
                            best = v;
                            ch = Choice::Two { first: 0, cut_a: true, cut_b: true };
                        }
                    }
                    values[base + pat] = best;
                    choices[base + pat] = ch;
                }
            }
            _ => unreachable!("preprocessed tree is binary"),
        }
    }
    DpTable { width, values, choices }
}

fn best_of(row: &[Val]) -> (u32, Val) {
    let mut best = (0u32, VINF);
    for (b, &v) in row.iter().enumerate() {
        if v < best.1 {
            best = (b as u32, v);
        }
    }
    best
}

/// Walks the choices from the root and collects removed edges.
fn backtrack(t: &PreprocessedTree, dp: &DpTable, start: u32) -> Vec<usize> {
    let width = dp.width;
    let mut removed = Vec::new();
    let mut stack = vec![(t.root, start)];
    while let Some((u, pat)) = stack.pop() {
        match dp.choices[u * width + pat as usize] {
            Choice::None => unreachable!("backtracking reached an infeasible entry"),
            Choice::Leaf => {}
            Choice::One { removed: cut } => {
                let c = t.children[u][0];
                if cut {
                    removed.push(c);
                    stack.push((c, dp.best(c).0));
                } else {
                    stack.push((c, pat));
                }
            }
            Choice::Two { first, cut_a, cut_b } => {
                let (a, b) = (t.children[u][0], t.children[u][1]);
                match (cut_a, cut_b) {
                    (false, false) => {
                        stack.push((a, first));
                        stack.push((b, pat ^ first));
                    }
                    (true, false) => {
                        removed.push(a);
                        stack.push((a, dp.best(a).0));
                        stack.push((b, pat));
                    }
                    (false, true) => {
                        removed.push(b);
                        stack.push((b, dp.best(b).0));
                        stack.push((a, pat));
                    }
                    (true, true) => {
                        removed.push(a);
                        removed.push(b);
                        stack.push((a, dp.best(a).0));
                        stack.push((b, dp.best(b).0));
                    }
                }
            }
        }
    }
    removed
}

/// Statistics of one dynamic-program run.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct DpStats {
    pub tree_vertices: usize,
    pub patterns: usize,
}

/// Minimum-cost generalized multiway cut on a weighted tree.
pub fn solve_wgmwct_raw(
    n: usize,
    edges: &[(VertexId, VertexId)],
    costs: &[u64],
    terminal_sets: &[Vec<VertexId>],
) -> Result<(u64, CutSet, DpStats), GmwctError> {
    let t = match preprocess(n, edges, costs, terminal_sets) {
        Ok(t) => t,
        Err(GmwctError::EmptyAfterPreprocessing) => return Ok((0, CutSet::new(), DpStats::default())),
        Err(e) => return Err(e),
    };
    let dp = run_dp(&t);
    let (start, (cost, _)) = dp.best(t.root);
    assert!(cost != INF, "removing every original edge is always feasible");
    let mut cut = CutSet::new();
    for v in backtrack(&t, &dp, start) {
        let e = t.up_edge[v].expect("sentinel edge in an optimal solution");
        cut.0.insert(e);
    }
    debug_assert_eq!(cut.iter().map(|e| costs[e]).sum::<u64>(), cost);
    Ok((cost, cut, DpStats { tree_vertices: t.len(), patterns: dp.width }))
}

/// Solves a terminal-set instance exactly; unit costs when it has none.
pub fn solve_wgmwct(instance: &Instance) -> Result<(u64, CutSet, DpStats), GmwctError> {
    let sets = instance.terminal_sets().ok_or(GmwctError::NoTerminalSets)?;
    let costs: Vec<u64> = (0..instance.edges().len()).map(|e| instance.cost(e)).collect();
    solve_wgmwct_raw(instance.n(), instance.edges(), &costs, sets)
}

/// Unweighted generalized multiway cut through the multicut solver.
pub fn solve_gmwct_via_mct(instance: &Instance, k: usize) -> Option<CutSet> {
    solve_decision(instance, k, &SolveOptions::default()).0
}
