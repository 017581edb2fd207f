//! Branch-and-search decision solver for multicut on trees.
//!
//! Each search node reduces its forest, picks the deepest important
//! vertices of one component and asks the phases in order for an action:
//! the auxiliary-graph rules, the case analysis, the star-graph rules and
//! the rules between sibling subtrees. A generic branch over a request path
//! backs everything up and is counted separately.

mod cases;
mod ctx;
mod gstar;
mod intertree;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{root_forest, CutSet, EditError, EdgeId, Instance, VertexId, WorkingForest};
use crate::reduce::{reduce_to_fixpoint_counted, ReductionCounts};

pub use cases::{branch_on_aux_graph, branch_on_cases};
pub use ctx::Ctx;
pub use gstar::gstar_phase;
pub use intertree::intertree_phase;

/// ρ = √(√2 + 1), the positive root of x⁴ − 2x² − 1.
pub const RHO: f64 = 1.5537739740300374;

/// Σ ρ^(−d) over a branching vector.
pub fn branching_sum(decrements: &[usize]) -> f64 {
    decrements.iter().map(|&d| RHO.powi(-(d as i32))).sum()
}

/// Whether a branching vector stays within the ρ^k leaf bound.
pub fn within_bound(decrements: &[usize]) -> bool {
    branching_sum(decrements) <= 1.0 + 1e-9
}

/// ⌈ρ^k⌉, the leaf bound at parameter `k`.
pub fn leaf_bound(k: usize) -> u64 {
    (RHO.powi(k as i32) - 1e-9).ceil().max(1.0) as u64
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BranchError {
    #[error("case analysis violation: {0}")]
    CaseAnalysisViolation(String),
}

/// One edit of a branch side, addressed by original edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Op {
    Cut(EdgeId),
    Keep(EdgeId),
    /// Keeping `edge` later in the side also keeps every edge of `chain`.
    Favor { edge: EdgeId, chain: Vec<EdgeId> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Side {
    pub ops: Vec<Op>,
}

impl Side {
    pub fn new() -> Self {
        Side::default()
    }

    /// Adds a cut unless the side already cuts that edge.
    pub fn cut(&mut self, e: EdgeId) -> &mut Self {
        if !self.ops.contains(&Op::Cut(e)) {
            self.ops.push(Op::Cut(e));
        }
        self
    }

    pub fn cut_all(&mut self, edges: impl IntoIterator<Item = EdgeId>) -> &mut Self {
        for e in edges {
            self.cut(e);
        }
        self
    }

    pub fn keep(&mut self, e: EdgeId) -> &mut Self {
        if !self.ops.contains(&Op::Keep(e)) {
            self.ops.push(Op::Keep(e));
        }
        self
    }

    pub fn favor(&mut self, edge: EdgeId, chain: Vec<EdgeId>) -> &mut Self {
        self.ops.push(Op::Favor { edge, chain });
        self
    }

    /// Budget decrement the side realizes.
    pub fn claim(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Cut(_))).count()
    }

    pub fn cuts(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.ops.iter().filter_map(|op| match op {
            Op::Cut(e) => Some(*e),
            _ => None,
        })
    }
}

/// Alternative sides of one branching step; some optimal solution is
/// consistent with at least one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchPlan {
    pub rule: &'static str,
    pub sides: Vec<Side>,
}

impl BranchPlan {
    pub fn new(rule: &'static str, sides: Vec<Side>) -> Self {
        BranchPlan { rule, sides }
    }

    pub fn signature(&self) -> Vec<usize> {
        self.sides.iter().map(Side::claim).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    /// A single side that every optimal solution may be assumed to follow.
    Forced { rule: &'static str, side: Side },
    Branch(BranchPlan),
}

impl Action {
    pub fn rule(&self) -> &'static str {
        match self {
            Action::Forced { rule, .. } => rule,
            Action::Branch(p) => p.rule,
        }
    }
}

/// Why applying a side failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyError {
    BudgetExhausted,
    InfeasibleBranch,
    /// The side contradicts itself (cut after keep, cut of a kept chain).
    Violation,
}

/// Applies the ops of a side in order.
pub fn apply_side(forest: &mut WorkingForest, side: &Side) -> Result<(), ApplyError> {
    let mut chains: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut kept: BTreeSet<EdgeId> = BTreeSet::new();
    for op in &side.ops {
        match op {
            Op::Favor { edge, chain } => {
                chains.insert(*edge, chain.clone());
                forest.record_favor(*edge, chain.clone());
            }
            Op::Cut(e) => {
                if kept.contains(e) {
                    return Err(ApplyError::Violation);
                }
                match forest.cut_edge(*e) {
                    Ok(()) => {}
                    Err(EditError::BudgetExhausted) => return Err(ApplyError::BudgetExhausted),
                    Err(_) => return Err(ApplyError::Violation),
                }
            }
            Op::Keep(e) => {
                let mut todo = vec![*e];
                if let Some(chain) = chains.get(e) {
                    todo.extend(chain.iter().copied());
                }
                for x in todo {
                    if !kept.insert(x) {
                        continue;
                    }
                    if !forest.is_live_edge(x) {
                        // Cut earlier in this side.
                        return Err(ApplyError::Violation);
                    }
                    match forest.contract_edge(x) {
                        Ok(()) => {}
                        Err(EditError::InfeasibleBranch) => return Err(ApplyError::InfeasibleBranch),
                        Err(_) => return Err(ApplyError::Violation),
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub max_depth: usize,
    /// Branching and forced steps by rule name.
    pub rules: BTreeMap<String, u64>,
    /// Reduction rule firings.
    pub reductions: BTreeMap<String, u64>,
    /// Generic request-path branches taken because no phase applied.
    pub fallback: u64,
    /// Plans whose realized vector exceeds the ρ^k bound, by rule.
    pub bound_violations: BTreeMap<String, u64>,
    /// Sides that contradicted themselves.
    pub case_violations: u64,
    /// Sides dropped because their cuts exceed the budget or they are
    /// infeasible.
    pub pruned_sides: u64,
    pub initial_k: usize,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.max_depth = self.max_depth.max(other.max_depth);
        for (k, v) in &other.rules {
            *self.rules.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.reductions {
            *self.reductions.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.bound_violations {
            *self.bound_violations.entry(k.clone()).or_default() += v;
        }
        self.fallback += other.fallback;
        self.case_violations += other.case_violations;
        self.pruned_sides += other.pruned_sides;
    }

    pub fn bound_violation_count(&self) -> u64 {
        self.bound_violations.values().sum()
    }

    fn fire(&mut self, rule: &str) {
        *self.rules.entry(rule.to_string()).or_default() += 1;
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Explore the sides of the first branching in parallel threads.
    pub parallel: bool,
    /// Rule names the selector must skip (for isolating rules in tests).
    pub disabled: BTreeSet<String>,
}

pub const FALLBACK_RULE: &str = "fallback-request-path";

/// Picks the component to work on: the lowest root with a live request.
fn target_root(forest: &WorkingForest, view: &crate::model::RootedView) -> Option<VertexId> {
    forest.requests().iter().map(|&(a, _)| view.root_of[a]).min()
}

/// Deepest important vertex of the first unsolved component, lowest id on
/// ties.
pub fn select_important_vertex(forest: &WorkingForest) -> Option<VertexId> {
    let view = forest.view();
    let root = target_root(forest, &view).or_else(|| forest.roots().iter().copied().find(|&r| forest.degree(r) > 0))?;
    view.order
        .iter()
        .copied()
        .filter(|&v| view.root_of[v] == root && view.is_important(v))
        .min_by_key(|&v| (std::cmp::Reverse(view.depth[v]), v))
}

/// Next action for a reduced forest with at least one request.
pub fn next_action(forest: &WorkingForest, opts: &SolveOptions) -> Action {
    let view = forest.view();
    let root = target_root(forest, &view).expect("forest has a request");
    let ctx = Ctx::new(forest, view, root, &opts.disabled);
    if let Some(a) = branch_on_aux_graph(&ctx) {
        return a;
    }
    if let Some(a) = branch_on_cases(&ctx) {
        return a;
    }
    if let Some(a) = gstar_phase(&ctx) {
        return a;
    }
    if let Some(a) = intertree_phase(&ctx) {
        return a;
    }
    fallback(&ctx)
}

/// Branches over the edges of the lowest live request's path; side `i`
/// keeps the first `i` edges and cuts the next one.
fn fallback(ctx: &Ctx) -> Action {
    let &(a, b) = ctx
        .forest
        .requests()
        .iter()
        .find(|&&(a, _)| ctx.view.root_of[a] == ctx.root)
        .expect("component has a request");
    let path = ctx.view.path_edges(a, b);
    let sides = (0..path.len())
        .map(|i| {
            let mut s = Side::new();
            for &e in &path[..i] {
                s.keep(e);
            }
            s.cut(path[i]);
            s
        })
        .collect();
    Action::Branch(BranchPlan::new(FALLBACK_RULE, sides))
}

struct Search<'a> {
    opts: &'a SolveOptions,
    stats: SearchStats,
}

impl Search<'_> {
    /// Explores the node owning `forest`; returns a solution if one fits.
    fn node(&mut self, mut forest: WorkingForest, depth: usize) -> Option<CutSet> {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        forest.set_node(self.stats.nodes);
        loop {
            let mut counts = ReductionCounts::default();
            let out = reduce_to_fixpoint_counted(&mut forest, &mut counts);
            for (k, v) in counts.fired {
                *self.stats.reductions.entry(k.to_string()).or_default() += v;
            }
            if out.is_infeasible() {
                self.stats.leaves += 1;
                return None;
            }
            if forest.requests().is_empty() {
                self.stats.leaves += 1;
                return Some(forest.cut_set());
            }
            if forest.budget() == Some(0) {
                self.stats.leaves += 1;
                return None;
            }
            match next_action(&forest, self.opts) {
                Action::Forced { rule, side } => {
                    self.stats.fire(rule);
                    match apply_side(&mut forest, &side) {
                        Ok(()) => continue,
                        Err(e) => {
                            if e == ApplyError::Violation {
                                self.stats.case_violations += 1;
                            }
                            self.stats.leaves += 1;
                            return None;
                        }
                    }
                }
                Action::Branch(plan) => return self.branch(forest, plan, depth),
            }
        }
    }

    fn branch(&mut self, forest: WorkingForest, plan: BranchPlan, depth: usize) -> Option<CutSet> {
        self.stats.fire(plan.rule);
        if plan.rule == FALLBACK_RULE {
            self.stats.fallback += 1;
        } else if !within_bound(&plan.signature()) {
            *self.stats.bound_violations.entry(plan.rule.to_string()).or_default() += 1;
        }
        let budget = forest.budget().unwrap_or(usize::MAX);
        let mut children = Vec::new();
        for side in &plan.sides {
            if side.claim() > budget {
                self.stats.pruned_sides += 1;
                continue;
            }
            let mut child = forest.clone();
            match apply_side(&mut child, side) {
                Ok(()) => children.push(child),
                Err(e) => {
                    if e == ApplyError::Violation {
                        self.stats.case_violations += 1;
                    }
                    self.stats.pruned_sides += 1;
                }
            }
        }
        if children.is_empty() {
            self.stats.leaves += 1;
            return None;
        }
        if self.opts.parallel && depth == 0 && children.len() > 1 {
            return self.parallel(children, depth);
        }
        for child in children {
            if let Some(cut) = self.node(child, depth + 1) {
                return Some(cut);
            }
        }
        None
    }

    /// Solves every child on its own thread; returns the first side's
    /// solution in side order. Stats include all explored children.
    fn parallel(&mut self, children: Vec<WorkingForest>, depth: usize) -> Option<CutSet> {
        let opts = SolveOptions { parallel: false, ..self.opts.clone() };
        let results: Vec<(Option<CutSet>, SearchStats)> = std::thread::scope(|s| {
            let handles: Vec<_> = children
                .into_iter()
                .map(|child| {
                    let opts = &opts;
                    s.spawn(move || {
                        let mut sub = Search { opts, stats: SearchStats::default() };
                        let r = sub.node(child, depth + 1);
                        (r, sub.stats)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
        });
        let mut found = None;
        for (r, st) in results {
            self.stats.merge(&st);
            if found.is_none() {
                found = r;
            }
        }
        found
    }
}

/// A cut of at most `k` edges separating every request, or `None`.
pub fn solve_decision(instance: &Instance, k: usize, opts: &SolveOptions) -> (Option<CutSet>, SearchStats) {
    let mut forest = root_forest(instance, None);
    forest.set_budget(Some(k));
    let mut search = Search { opts, stats: SearchStats { initial_k: k, ..SearchStats::default() } };
    let cut = search.node(forest, 0);
    (cut, search.stats)
}

/// Smallest cut, by trying k = 0, 1, 2, ... Returns the stats of the
/// successful decision call.
pub fn solve_min(instance: &Instance, opts: &SolveOptions) -> (usize, CutSet, SearchStats) {
    let mut k = 0;
    loop {
        let (cut, stats) = solve_decision(instance, k, opts);
        if let Some(cut) = cut {
            return (cut.len(), cut, stats);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_cut, Demands};

    fn inst(n: usize, edges: Vec<(usize, usize)>, reqs: Vec<(usize, usize)>) -> Instance {
        Instance::new(n, edges, Demands::Requests(reqs), None).unwrap()
    }

    #[test]
    fn rho_is_root_of_characteristic_polynomial() {
        let r2 = RHO * RHO;
        assert!((r2 * r2 - 2.0 * r2 - 1.0).abs() < 1e-12);
        assert!((RHO - (2f64.sqrt() + 1.0).sqrt()).abs() < 1e-15);
        assert_eq!(leaf_bound(0), 1);
        assert_eq!(leaf_bound(1), 2);
        assert_eq!(leaf_bound(4), 6);
    }

    #[test]
    fn branching_vectors() {
        for v in [&[1, 3][..], &[2, 2], &[3, 3, 3], &[4, 4, 4, 2], &[1, 4, 4], &[2, 2, 4], &[2, 3, 3]] {
            assert!(within_bound(v), "{v:?}");
        }
        assert!(!within_bound(&[1, 2]));
        assert!(!within_bound(&[3, 4, 4, 2]));
    }

    #[test]
    fn empty_requests() {
        let i = inst(3, vec![(0, 1), (1, 2)], vec![]);
        let (cut, _) = solve_decision(&i, 0, &SolveOptions::default());
        assert_eq!(cut, Some(CutSet::new()));
    }

    #[test]
    fn star_triangle() {
        let i = inst(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2), (2, 3), (1, 3)]);
        assert!(solve_decision(&i, 1, &SolveOptions::default()).0.is_none());
        let cut = solve_decision(&i, 2, &SolveOptions::default()).0.unwrap();
        assert_eq!(cut.len(), 2);
        assert!(verify_cut(&i, &cut));
    }

    #[test]
    fn disjoint_unit_requests() {
        let i = inst(4, vec![(0, 1), (1, 2), (2, 3)], vec![(0, 1), (2, 3)]);
        let (size, cut, _) = solve_min(&i, &SolveOptions::default());
        assert_eq!(size, 2);
        assert_eq!(cut, [0, 2].into_iter().collect());
    }

    #[test]
    fn apply_side_semantics() {
        // 0 - 1, 1 - 2, 1 - 3: favored 2 with chain [0].
        let i = inst(4, vec![(0, 1), (1, 2), (1, 3)], vec![(2, 3), (0, 3)]);
        let mut f = root_forest(&i, Some(1));
        f.set_budget(Some(1));
        let mut s = Side::new();
        s.favor(1, vec![0]).keep(1);
        apply_side(&mut f, &s).unwrap();
        assert!(!f.is_live_edge(0) && !f.is_live_edge(1));
        let mut f = root_forest(&i, Some(1));
        f.set_budget(Some(1));
        let mut s = Side::new();
        s.cut(1).cut(2);
        assert_eq!(apply_side(&mut f, &s), Err(ApplyError::BudgetExhausted));
        let mut f = root_forest(&i, Some(1));
        let mut s = Side::new();
        s.keep(0).cut(0);
        assert_eq!(apply_side(&mut f, &s), Err(ApplyError::Violation));
    }
}
