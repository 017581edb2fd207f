//! Reduction rules for multicut on trees, applied until none fires.

use std::collections::BTreeSet;

use crate::auxgraph::{self, build_gu, Graph};
use crate::model::{Demands, EdgeId, EditError, Instance, RootedView, VertexId, WorkingForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Changed,
    Fixpoint,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub kind: OutcomeKind,
    pub forced_cuts: Vec<EdgeId>,
    pub contractions: usize,
}

impl ReductionOutcome {
    fn fixpoint() -> Self {
        ReductionOutcome { kind: OutcomeKind::Fixpoint, forced_cuts: Vec::new(), contractions: 0 }
    }

    fn infeasible(forced_cuts: Vec<EdgeId>, contractions: usize) -> Self {
        ReductionOutcome { kind: OutcomeKind::Infeasible, forced_cuts, contractions }
    }

    fn changed(forced_cuts: Vec<EdgeId>, contractions: usize) -> Self {
        let kind = if forced_cuts.is_empty() && contractions == 0 {
            OutcomeKind::Fixpoint
        } else {
            OutcomeKind::Changed
        };
        ReductionOutcome { kind, forced_cuts, contractions }
    }

    pub fn is_infeasible(&self) -> bool {
        self.kind == OutcomeKind::Infeasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    UselessEdge,
    UnitRequest,
    SubtreeIsolation,
    VcExclusion,
    EvenPathCut,
    CrossCoveredContract,
    GrandparentRequest,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::UselessEdge,
        Rule::UnitRequest,
        Rule::SubtreeIsolation,
        Rule::VcExclusion,
        Rule::EvenPathCut,
        Rule::CrossCoveredContract,
        Rule::GrandparentRequest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::UselessEdge => "RR1-useless-edge",
            Rule::UnitRequest => "RR2-unit-request",
            Rule::SubtreeIsolation => "RR3-subtree-isolation",
            Rule::VcExclusion => "RR4-vc-exclusion",
            Rule::EvenPathCut => "RR5-even-path",
            Rule::CrossCoveredContract => "RR6-cross-covered",
            Rule::GrandparentRequest => "OBS-grandparent-request",
        }
    }

    pub fn apply(self, forest: &mut WorkingForest) -> ReductionOutcome {
        match self {
            Rule::UselessEdge => rule_useless_edge(forest),
            Rule::UnitRequest => rule_unit_request(forest),
            Rule::SubtreeIsolation => rule_subtree_isolation(forest),
            Rule::VcExclusion => rule_vc_exclusion(forest),
            Rule::EvenPathCut => rule_even_path_cut(forest),
            Rule::CrossCoveredContract => rule_cross_covered_contract(forest),
            Rule::GrandparentRequest => rule_grandparent_request(forest),
        }
    }
}

/// The child of `c` whose subtree holds `x` (`x` a proper descendant of `c`).
pub fn child_toward(view: &RootedView, c: VertexId, mut x: VertexId) -> VertexId {
    while view.parent[x] != Some(c) {
        x = view.parent[x].expect("x must descend from c");
    }
    x
}

/// For each vertex `u`, whether some request has exactly one endpoint in
/// `T_u` and its other endpoint in `T_{π(u)}`. Equivalently the request's
/// lowest common ancestor is `π(u)`.
pub fn local_crossing(forest: &WorkingForest, view: &RootedView) -> Vec<bool> {
    let mut mark = vec![false; view.alive.len()];
    for &(a, b) in forest.requests() {
        let c = view.lca(a, b);
        for x in [a, b] {
            if x != c {
                mark[child_toward(view, c, x)] = true;
            }
        }
    }
    mark
}

/// Number of live requests whose tree path uses each edge, indexed by the
/// lower endpoint (the child).
fn edge_usage(forest: &WorkingForest, view: &RootedView) -> Vec<usize> {
    let mut diff = vec![0i64; view.alive.len()];
    for &(a, b) in forest.requests() {
        let c = view.lca(a, b);
        diff[a] += 1;
        diff[b] += 1;
        diff[c] -= 2;
    }
    for &v in view.order.iter().rev() {
        if let Some(p) = view.parent[v] {
            diff[p] += diff[v];
        }
    }
    diff.into_iter().map(|d| d as usize).collect()
}

pub fn rule_useless_edge(forest: &mut WorkingForest) -> ReductionOutcome {
    let view = forest.view();
    let usage = edge_usage(forest, &view);
    let useless: Vec<EdgeId> = view
        .order
        .iter()
        .filter(|&&v| view.parent[v].is_some() && usage[v] == 0)
        .map(|&v| view.parent_edge[v].unwrap())
        .collect();
    let mut count = 0;
    for e in useless {
        forest.contract_edge(e).expect("useless edge carries no request");
        count += 1;
    }
    ReductionOutcome::changed(Vec::new(), count)
}

fn cut_all(forest: &mut WorkingForest, edges: Vec<EdgeId>) -> ReductionOutcome {
    if let Some(k) = forest.budget() {
        if edges.len() > k {
            return ReductionOutcome::infeasible(Vec::new(), 0);
        }
    }
    let mut done = Vec::new();
    for e in edges {
        match forest.cut_edge(e) {
            Ok(()) => done.push(e),
            Err(EditError::BudgetExhausted) => return ReductionOutcome::infeasible(done, 0),
            Err(err) => panic!("forced cut failed: {err}"),
        }
    }
    ReductionOutcome::changed(done, 0)
}

pub fn rule_unit_request(forest: &mut WorkingForest) -> ReductionOutcome {
    let edges: Vec<EdgeId> =
        forest.requests().iter().filter_map(|&(a, b)| forest.edge_between(a, b)).collect();
    cut_all(forest, edges)
}

pub fn rule_subtree_isolation(forest: &mut WorkingForest) -> ReductionOutcome {
    let view = forest.view();
    let mark = local_crossing(forest, &view);
    let target = view.order.iter().copied().filter(|&u| view.parent[u].is_some() && !mark[u]).min();
    match target {
        Some(u) => {
            forest.contract_edge(view.parent_edge[u].unwrap()).expect("no request crosses");
            ReductionOutcome::changed(Vec::new(), 1)
        }
        None => ReductionOutcome::fixpoint(),
    }
}

/// Important vertices in increasing id order.
pub fn important_vertices(view: &RootedView) -> Vec<VertexId> {
    let mut v: Vec<VertexId> = view.order.iter().copied().filter(|&u| view.is_important(u)).collect();
    v.sort_unstable();
    v
}

fn small_gu(forest: &WorkingForest, view: &RootedView, u: VertexId) -> Option<Graph> {
    let g = build_gu(forest, view, u).graph;
    (g.max_degree() <= 2).then_some(g)
}

pub fn rule_vc_exclusion(forest: &mut WorkingForest) -> ReductionOutcome {
    let view = forest.view();
    for u in important_vertices(&view) {
        let Some(g) = small_gu(forest, &view, u) else { continue };
        for l in g.nodes() {
            if !auxgraph::in_some_min_cover(&g, l).unwrap() {
                match forest.contract_edge(view.parent_edge[l].unwrap()) {
                    Ok(()) => return ReductionOutcome::changed(Vec::new(), 1),
                    Err(EditError::InfeasibleBranch) => {
                        return ReductionOutcome::infeasible(Vec::new(), 0)
                    }
                    Err(e) => panic!("contract failed: {e}"),
                }
            }
        }
    }
    ReductionOutcome::fixpoint()
}

pub fn rule_even_path_cut(forest: &mut WorkingForest) -> ReductionOutcome {
    let view = forest.view();
    let mut edges = Vec::new();
    for w in important_vertices(&view) {
        let Some(g) = small_gu(forest, &view, w) else { continue };
        for shape in auxgraph::components(&g).unwrap() {
            if shape.length() >= 2 {
                if let Some(c) = shape.even_path_cover() {
                    edges.extend(c.iter().map(|&l| view.parent_edge[l].unwrap()));
                }
            }
        }
    }
    cut_all(forest, edges)
}

/// Cross requests out of `T_w` for an important `w`: the partners, and the
/// set of children of `w` having one. `w_itself` reports whether `w` has one.
pub struct CrossInfo {
    pub w_itself: bool,
    pub children: BTreeSet<VertexId>,
}

pub fn cross_info(
    partners: &[Vec<VertexId>],
    view: &RootedView,
    w: VertexId,
) -> Option<CrossInfo> {
    let p = view.parent[w]?;
    let is_cross = |y: VertexId| view.in_subtree(y, p) && !view.in_subtree(y, w);
    let w_itself = partners[w].iter().any(|&y| is_cross(y));
    let children =
        view.children[w].iter().copied().filter(|&c| partners[c].iter().any(|&y| is_cross(y))).collect();
    Some(CrossInfo { w_itself, children })
}

/// Whether some minimum cover of `G_w` cuts every cross request of `T_w`.
pub fn cross_covered(g: &Graph, info: &CrossInfo) -> bool {
    !info.w_itself && auxgraph::min_cover_containing(g, &info.children).unwrap()
}

pub fn rule_cross_covered_contract(forest: &mut WorkingForest) -> ReductionOutcome {
    let view = forest.view();
    let partners = forest.partners();
    for w in important_vertices(&view) {
        let Some(info) = cross_info(&partners, &view, w) else { continue };
        let Some(g) = small_gu(forest, &view, w) else { continue };
        if cross_covered(&g, &info) {
            match forest.contract_edge(view.parent_edge[w].unwrap()) {
                Ok(()) => return ReductionOutcome::changed(Vec::new(), 1),
                Err(EditError::InfeasibleBranch) => return ReductionOutcome::infeasible(Vec::new(), 0),
                Err(e) => panic!("contract failed: {e}"),
            }
        }
    }
    ReductionOutcome::fixpoint()
}

pub fn rule_grandparent_request(forest: &mut WorkingForest) -> ReductionOutcome {
    let view = forest.view();
    for w in important_vertices(&view) {
        let Some(p) = view.parent[w] else { continue };
        // The exchange argument needs `u` in some minimum cover of `G_w`.
        let Some(g) = small_gu(forest, &view, w) else { continue };
        for &u in &view.children[w] {
            if forest.has_request(u, p) && auxgraph::in_some_min_cover(&g, u).unwrap() {
                return cut_all(forest, vec![view.parent_edge[u].unwrap()]);
            }
        }
    }
    ReductionOutcome::fixpoint()
}

/// Per-rule firing counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionCounts {
    pub fired: std::collections::BTreeMap<&'static str, u64>,
}

pub fn reduce_to_fixpoint(forest: &mut WorkingForest) -> ReductionOutcome {
    let mut counts = ReductionCounts::default();
    reduce_to_fixpoint_counted(forest, &mut counts)
}

/// Runs the rules in order, restarting from the first after any edit.
pub fn reduce_to_fixpoint_counted(
    forest: &mut WorkingForest,
    counts: &mut ReductionCounts,
) -> ReductionOutcome {
    let mut forced = Vec::new();
    let mut contractions = 0;
    'outer: loop {
        for rule in Rule::ALL {
            let out = rule.apply(forest);
            forced.extend(out.forced_cuts.iter().copied());
            contractions += out.contractions;
            match out.kind {
                OutcomeKind::Fixpoint => continue,
                OutcomeKind::Changed => {
                    *counts.fired.entry(rule.name()).or_default() += 1;
                    continue 'outer;
                }
                OutcomeKind::Infeasible => {
                    return ReductionOutcome::infeasible(forced, contractions);
                }
            }
        }
        return ReductionOutcome::changed(forced, contractions);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UselessEdge(VertexId),
    /// (i): a request joins a vertex and its parent.
    ParentRequest(VertexId, VertexId),
    /// (ii): no request leaves `T_u` into the rest of `T_{π(u)}`.
    IsolatedSubtree(VertexId),
    /// (iii): no request inside `T_u - u`.
    NoInnerRequest(VertexId),
    /// (v): `G_w` contains an even-length path.
    EvenPath(VertexId),
    /// (vi): a leaf child in no minimum cover of its parent's graph.
    LeafOutsideCovers(VertexId),
    /// (vii): a minimum cover of `G_w` cuts all cross requests.
    CrossCovered(VertexId),
    /// Observation: a child requests its grandparent.
    GrandparentRequest(VertexId),
}

/// Lists every checkable property of a reduced instance that fails.
/// Properties about `G_w` are checked where `Δ(G_w) ≤ 2`.
pub fn check_reduced(forest: &WorkingForest) -> Vec<Violation> {
    let view = forest.view();
    let partners = forest.partners();
    let usage = edge_usage(forest, &view);
    let mark = local_crossing(forest, &view);
    let mut out = Vec::new();
    let mut inner = vec![false; view.alive.len()];
    for &(a, b) in forest.requests() {
        let c = view.lca(a, b);
        // Every proper ancestor of c, and c itself unless it is an endpoint,
        // contains the request strictly below it.
        let mut x = if c == a || c == b { view.parent[c] } else { Some(c) };
        while let Some(y) = x {
            if inner[y] {
                break;
            }
            inner[y] = true;
            x = view.parent[y];
        }
    }
    for &u in &view.order {
        if let Some(p) = view.parent[u] {
            if usage[u] == 0 {
                out.push(Violation::UselessEdge(u));
            }
            if forest.has_request(u, p) {
                out.push(Violation::ParentRequest(u, p));
            }
            if !mark[u] {
                out.push(Violation::IsolatedSubtree(u));
            }
        }
        if !view.is_leaf(u) && !inner[u] {
            out.push(Violation::NoInnerRequest(u));
        }
    }
    for w in important_vertices(&view) {
        let Some(g) = small_gu(forest, &view, w) else { continue };
        let shapes = auxgraph::components(&g).unwrap();
        if shapes.iter().any(|s| s.is_path() && s.length() % 2 == 0) {
            out.push(Violation::EvenPath(w));
        }
        for l in g.nodes() {
            if !auxgraph::in_some_min_cover(&g, l).unwrap() {
                out.push(Violation::LeafOutsideCovers(l));
            }
        }
        if let Some(info) = cross_info(&partners, &view, w) {
            if cross_covered(&g, &info) {
                out.push(Violation::CrossCovered(w));
            }
            let p = view.parent[w].unwrap();
            for &u in &view.children[w] {
                if forest.has_request(u, p) {
                    out.push(Violation::GrandparentRequest(u));
                }
            }
        }
    }
    out
}

/// The live part of a forest as a standalone instance, with vertices
/// renumbered. Isolated vertices without requests are dropped and the
/// remaining components are chained through their roots by edges no request
/// uses, which leaves the optimum unchanged. Also returns, per new vertex,
/// the live vertex it stands for.
pub fn reduced_instance(forest: &WorkingForest) -> (Instance, Vec<VertexId>) {
    let view = forest.view();
    let touched: BTreeSet<VertexId> = forest.requests().iter().flat_map(|&(a, b)| [a, b]).collect();
    let keep: Vec<VertexId> =
        forest.live_vertices().filter(|&v| forest.degree(v) > 0 || touched.contains(&v)).collect();
    if keep.is_empty() {
        let inst = Instance::new(1, Vec::new(), Demands::Requests(Vec::new()), forest.budget()).unwrap();
        return (inst, forest.live_vertices().take(1).collect());
    }
    let mut id = vec![usize::MAX; forest.vertex_count()];
    for (i, &v) in keep.iter().enumerate() {
        id[v] = i;
    }
    let mut edges: Vec<(VertexId, VertexId)> = forest.live_edges().map(|(_, a, b)| (id[a], id[b])).collect();
    let roots: Vec<VertexId> = keep.iter().copied().filter(|&v| view.parent[v].is_none()).collect();
    for w in roots.windows(2) {
        edges.push((id[w[0]], id[w[1]]));
    }
    let reqs = forest.requests().iter().map(|&(a, b)| (id[a], id[b])).collect();
    let inst = Instance::new(keep.len(), edges, Demands::Requests(reqs), forest.budget())
        .expect("live forest plus chaining edges is a tree");
    (inst, keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::root_forest;

    fn inst(n: usize, edges: Vec<(usize, usize)>, reqs: Vec<(usize, usize)>, k: Option<usize>) -> Instance {
        Instance::new(n, edges, Demands::Requests(reqs), k).unwrap()
    }

    #[test]
    fn useless_edge_on_path() {
        let i = inst(3, vec![(0, 1), (1, 2)], vec![(0, 1)], None);
        let mut f = root_forest(&i, None);
        let out = rule_useless_edge(&mut f);
        assert_eq!(out.contractions, 1);
        assert!(!f.is_live_edge(1));
        let i = inst(3, vec![(0, 1), (1, 2)], vec![(0, 2)], None);
        let mut f = root_forest(&i, None);
        assert_eq!(rule_useless_edge(&mut f).kind, OutcomeKind::Fixpoint);
    }

    #[test]
    fn useless_leaf_of_star() {
        let i = inst(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2)], None);
        let mut f = root_forest(&i, None);
        rule_useless_edge(&mut f);
        assert!(!f.is_live_edge(2));
        assert!(f.is_live_edge(0) && f.is_live_edge(1));
    }

    #[test]
    fn unit_request_budget() {
        let i = inst(2, vec![(0, 1)], vec![(0, 1)], Some(1));
        let mut f = root_forest(&i, None);
        let out = rule_unit_request(&mut f);
        assert_eq!(out.forced_cuts, vec![0]);
        assert_eq!(f.budget(), Some(0));
        let i = inst(3, vec![(0, 1), (1, 2)], vec![(0, 1), (1, 2)], Some(1));
        let mut f = root_forest(&i, None);
        assert!(rule_unit_request(&mut f).is_infeasible());
    }

    #[test]
    fn subtree_isolation_contracts_internal_subtrees() {
        // 0 root; children 1 and 2; 1 has leaves 3,4; 2 has leaves 5,6.
        let i = inst(
            7,
            vec![(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)],
            vec![(3, 4), (5, 6)],
            None,
        );
        let mut f = root_forest(&i, None);
        assert_eq!(rule_subtree_isolation(&mut f).contractions, 1);
        assert_eq!(rule_subtree_isolation(&mut f).contractions, 1);
        assert!(!f.is_live_edge(0) && !f.is_live_edge(1));
    }

    #[test]
    fn vc_exclusion_on_even_path() {
        // Important 0 (root) with leaves 1,2,3 forming path 1-2-3.
        let i = inst(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2), (2, 3)], None);
        let mut f = root_forest(&i, None);
        assert_eq!(rule_vc_exclusion(&mut f).contractions, 1);
        assert!(!f.is_live_edge(0));
    }

    #[test]
    fn even_path_rule_cuts_middle() {
        let i = inst(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2), (2, 3)], Some(2));
        let mut f = root_forest(&i, None);
        let out = rule_even_path_cut(&mut f);
        assert_eq!(out.forced_cuts, vec![1]);
        assert_eq!(f.budget(), Some(1));
        let i = inst(6, vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], vec![(1, 2), (2, 3), (3, 4), (4, 5)], None);
        let mut f = root_forest(&i, None);
        assert_eq!(rule_even_path_cut(&mut f).forced_cuts, vec![1, 3]);
    }

    #[test]
    fn cross_covered_contract() {
        // 5 root, p=0 with w=1 (leaves 2,3) and leaf 4; 5 has leaf 6.
        let i = inst(
            7,
            vec![(5, 0), (0, 1), (1, 2), (1, 3), (0, 4), (5, 6)],
            vec![(2, 3), (2, 4), (4, 6)],
            None,
        );
        let mut f = root_forest(&i, Some(5));
        let out = rule_cross_covered_contract(&mut f);
        assert_eq!(out.contractions, 1);
        assert!(!f.is_live_edge(1));
        let i = inst(
            7,
            vec![(5, 0), (0, 1), (1, 2), (1, 3), (0, 4), (5, 6)],
            vec![(2, 3), (2, 4), (3, 6), (4, 6)],
            None,
        );
        let mut f = root_forest(&i, Some(5));
        // 3 -> 6 leaves T_0, so only 2 has a cross request: still covered.
        assert_eq!(rule_cross_covered_contract(&mut f).contractions, 1);
    }

    #[test]
    fn grandparent_request_cut() {
        let i = inst(
            7,
            vec![(5, 0), (0, 1), (1, 2), (1, 3), (0, 4), (5, 6)],
            vec![(2, 3), (2, 0), (3, 0)],
            Some(3),
        );
        let mut f = root_forest(&i, Some(5));
        let out = rule_grandparent_request(&mut f);
        assert_eq!(out.forced_cuts, vec![2]);
        // With 2 gone, 1 has a single child left and the rule is spent.
        assert_eq!(rule_grandparent_request(&mut f).kind, OutcomeKind::Fixpoint);
    }

    #[test]
    fn fixpoint_examples() {
        let i = inst(4, vec![(0, 1), (1, 2), (2, 3)], vec![], None);
        let mut f = root_forest(&i, None);
        reduce_to_fixpoint(&mut f);
        assert_eq!(f.edge_count(), 0);
        let i = inst(4, vec![(0, 1), (1, 2), (2, 3)], vec![(0, 1), (2, 3)], Some(2));
        let mut f = root_forest(&i, None);
        let out = reduce_to_fixpoint(&mut f);
        assert_eq!(out.kind, OutcomeKind::Changed);
        assert_eq!(f.budget(), Some(0));
        assert!(check_reduced(&f).is_empty());
    }

    #[test]
    fn violations_reported() {
        let i = inst(3, vec![(0, 1), (1, 2)], vec![(0, 1), (0, 2)], None);
        let f = root_forest(&i, None);
        assert!(check_reduced(&f).iter().any(|v| matches!(v, Violation::ParentRequest(..))));
        let i = inst(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2), (2, 3)], None);
        let f = root_forest(&i, None);
        assert!(check_reduced(&f).contains(&Violation::EvenPath(0)));
    }
}
