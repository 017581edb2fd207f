//! Request graphs over leaf children (`G_u`) and over the leaf children and
//! grandchildren of a vertex (`G*_p`), minimum vertex cover on graphs of
//! maximum degree two, and the structural classification used by the
//! search.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{RootedView, VertexId, WorkingForest};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuxError {
    #[error("vertex {0} has degree {1} > 2")]
    DegreeTooHigh(VertexId, usize),
    #[error("component {0:?} fits no group")]
    UnclassifiableComponent(Vec<VertexId>),
}

/// Small undirected simple graph keyed by forest vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn from_edges(
        nodes: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Self {
        let mut g = Graph::new();
        for v in nodes {
            g.add_node(v);
        }
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_node(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) {
        if a == b {
            return;
        }
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    pub fn nodes(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (&a, s) in &self.adj {
            for &b in s {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Induced subgraph without the given vertices.
    pub fn without(&self, drop: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for (&a, s) in &self.adj {
            if drop.contains(&a) {
                continue;
            }
            g.add_node(a);
            for &b in s {
                if !drop.contains(&b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn is_vertex_cover(&self, cover: &BTreeSet<VertexId>) -> bool {
        self.edges().iter().all(|(a, b)| cover.contains(a) || cover.contains(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Path,
    Cycle,
}

/// A connected component of a graph with maximum degree two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentShape {
    pub kind: ShapeKind,
    /// Paths list an endpoint first (the lower-id endpoint); cycles start at
    /// their lowest id and continue towards its lower-id neighbor.
    pub seq: Vec<VertexId>,
}

impl ComponentShape {
    /// Number of edges.
    pub fn length(&self) -> usize {
        match self.kind {
            ShapeKind::Path => self.seq.len().saturating_sub(1),
            ShapeKind::Cycle => self.seq.len(),
        }
    }

    pub fn is_path(&self) -> bool {
        self.kind == ShapeKind::Path
    }

    pub fn is_cycle(&self) -> bool {
        self.kind == ShapeKind::Cycle
    }

    pub fn tau(&self) -> usize {
        match self.kind {
            ShapeKind::Path => self.seq.len() / 2,
            ShapeKind::Cycle => self.seq.len().div_ceil(2),
        }
    }

    pub fn endpoints(&self) -> Option<(VertexId, VertexId)> {
        match self.kind {
            ShapeKind::Path => Some((self.seq[0], *self.seq.last().unwrap())),
            ShapeKind::Cycle => None,
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.seq.contains(&v)
    }

    fn positions(&self, parity: usize) -> BTreeSet<VertexId> {
        self.seq.iter().enumerate().filter(|(i, _)| i % 2 == parity).map(|(_, &v)| v).collect()
    }

    /// The unique minimum cover of an odd-length path containing endpoint `e`.
    pub fn cover_with_endpoint(&self, e: VertexId) -> Option<BTreeSet<VertexId>> {
        if !self.is_path() || self.length().is_multiple_of(2) {
            return None;
        }
        if self.seq[0] == e {
            Some(self.positions(0))
        } else if *self.seq.last().unwrap() == e {
            Some(self.positions(1))
        } else {
            None
        }
    }

    /// The unique minimum cover of an even-length path.
    pub fn even_path_cover(&self) -> Option<BTreeSet<VertexId>> {
        (self.is_path() && self.length().is_multiple_of(2)).then(|| self.positions(1))
    }

    /// The two minimum covers of an even cycle.
    pub fn even_cycle_covers(&self) -> Option<(BTreeSet<VertexId>, BTreeSet<VertexId>)> {
        (self.is_cycle() && self.length().is_multiple_of(2)).then(|| (self.positions(0), self.positions(1)))
    }

    /// One minimum cover, with deterministic tie-breaks.
    pub fn default_cover(&self) -> BTreeSet<VertexId> {
        match self.kind {
            ShapeKind::Path if self.length() % 2 == 1 => self.positions(0),
            ShapeKind::Path => self.positions(1),
            ShapeKind::Cycle if self.length().is_multiple_of(2) => self.positions(0),
            ShapeKind::Cycle => {
                let mut c = self.positions(0);
                c.insert(*self.seq.last().unwrap());
                c
            }
        }
    }

    /// Neighbors of `v` along the shape.
    pub fn shape_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let Some(i) = self.seq.iter().position(|&x| x == v) else {
            return Vec::new();
        };
        let m = self.seq.len();
        let mut out = Vec::new();
        match self.kind {
            ShapeKind::Path => {
                if i > 0 {
                    out.push(self.seq[i - 1]);
                }
                if i + 1 < m {
                    out.push(self.seq[i + 1]);
                }
            }
            ShapeKind::Cycle => {
                out.push(self.seq[(i + m - 1) % m]);
                out.push(self.seq[(i + 1) % m]);
            }
        }
        out
    }
}

/// Splits a graph of maximum degree two into paths and cycles, ordered by
/// their lowest vertex id.
pub fn components(g: &Graph) -> Result<Vec<ComponentShape>, AuxError> {
    for v in g.nodes() {
        if g.degree(v) > 2 {
            return Err(AuxError::DegreeTooHigh(v, g.degree(v)));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for start in g.nodes() {
        if seen.contains(&start) {
            continue;
        }
        // Collect the component.
        let mut comp = vec![start];
        seen.insert(start);
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for u in g.neighbors(v) {
                if seen.insert(u) {
                    comp.push(u);
                }
            }
        }
        let ends: Vec<VertexId> = comp.iter().copied().filter(|&v| g.degree(v) < 2).collect();
        let (kind, first) = if ends.is_empty() {
            (ShapeKind::Cycle, *comp.iter().min().unwrap())
        } else {
            (ShapeKind::Path, *ends.iter().min().unwrap())
        };
        let mut seq = vec![first];
        let mut prev: Option<VertexId> = None;
        let mut cur = first;
        loop {
            let mut nbrs: Vec<VertexId> = g.neighbors(cur).filter(|&u| Some(u) != prev).collect();
            nbrs.sort_unstable();
            let Some(&next) = nbrs.first() else { break };
            if next == first {
                break;
            }
            if kind == ShapeKind::Cycle && seq.len() == comp.len() {
                break;
            }
            seq.push(next);
            prev = Some(cur);
            cur = next;
        }
        out.push(ComponentShape { kind, seq });
    }
    out.sort_by_key(|c| *c.seq.iter().min().unwrap());
    Ok(out)
}

/// Result of [`min_vc_deg2`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcResult {
    pub size: usize,
    pub cover: BTreeSet<VertexId>,
    pub shapes: Vec<ComponentShape>,
}

impl VcResult {
    pub fn shape_of(&self, v: VertexId) -> Option<&ComponentShape> {
        self.shapes.iter().find(|s| s.contains(v))
    }
}

/// Minimum vertex cover of a graph with maximum degree two.
pub fn min_vc_deg2(g: &Graph) -> Result<VcResult, AuxError> {
    let shapes = components(g)?;
    let mut cover = BTreeSet::new();
    let mut size = 0;
    for s in &shapes {
        size += s.tau();
        cover.extend(s.default_cover());
    }
    Ok(VcResult { size, cover, shapes })
}

/// τ of a degree-two graph.
pub fn tau(g: &Graph) -> Result<usize, AuxError> {
    Ok(components(g)?.iter().map(|s| s.tau()).sum())
}

/// Whether `v` lies in some minimum vertex cover of `g` (Δ ≤ 2).
pub fn in_some_min_cover(g: &Graph, v: VertexId) -> Result<bool, AuxError> {
    let t = tau(g)?;
    let drop: BTreeSet<VertexId> = [v].into_iter().collect();
    Ok(tau(&g.without(&drop))? + 1 == t)
}

/// Whether some minimum vertex cover of `g` (Δ ≤ 2) contains every vertex
/// of `must`.
pub fn min_cover_containing(g: &Graph, must: &BTreeSet<VertexId>) -> Result<bool, AuxError> {
    let t = tau(g)?;
    Ok(tau(&g.without(must))? + must.len() == t)
}

/// Request graph over the leaf children of `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    pub owner: VertexId,
    pub graph: Graph,
}

pub fn build_gu(forest: &WorkingForest, view: &RootedView, u: VertexId) -> AuxGraph {
    let leaves = view.leaf_children(u);
    let set: BTreeSet<VertexId> = leaves.iter().copied().collect();
    let mut graph = Graph::new();
    for &l in &leaves {
        graph.add_node(l);
    }
    for &(a, b) in forest.requests() {
        if set.contains(&a) && set.contains(&b) {
            graph.add_edge(a, b);
        }
    }
    AuxGraph { owner: u, graph }
}

/// The four vertices of a special quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialQuadruple {
    pub w: VertexId,
    pub w_prime: VertexId,
    pub u: VertexId,
    pub v: VertexId,
}

impl SpecialQuadruple {
    pub fn members(&self) -> [VertexId; 4] {
        [self.w, self.w_prime, self.u, self.v]
    }
}

/// Partners of `x` among request endpoints inside `T_p`.
fn partners_in(
    forest: &WorkingForest,
    view: &RootedView,
    x: VertexId,
    p: VertexId,
) -> Vec<VertexId> {
    forest
        .requests()
        .iter()
        .filter_map(|&(a, b)| {
            if a == x {
                Some(b)
            } else if b == x {
                Some(a)
            } else {
                None
            }
        })
        .filter(|&y| view.in_subtree(y, p))
        .collect()
}

pub fn detect_special_quadruples(
    forest: &WorkingForest,
    view: &RootedView,
    p: VertexId,
) -> Vec<SpecialQuadruple> {
    let mut out = Vec::new();
    for &w in &view.children[p] {
        if !view.is_important(w) || view.children[w].len() != 2 {
            continue;
        }
        let (u, v) = (view.children[w][0], view.children[w][1]);
        let wp = partners_in(forest, view, w, p);
        if wp.len() != 1 {
            continue;
        }
        let w_prime = wp[0];
        if view.parent[w_prime] != Some(p) || !view.is_leaf(w_prime) {
            continue;
        }
        let ok_child = |c: VertexId, other: VertexId| {
            partners_in(forest, view, c, p).iter().all(|&y| y == other || y == w_prime)
        };
        if !ok_child(u, v) || !ok_child(v, u) || !forest.has_request(u, v) {
            continue;
        }
        let allowed = [w, u, v];
        if !partners_in(forest, view, w_prime, p).iter().all(|y| allowed.contains(y)) {
            continue;
        }
        out.push(SpecialQuadruple { w, w_prime, u, v });
    }
    out
}

/// Request graph over the leaf children and grandchildren of `p`, with
/// special-quadruple members removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarGraph {
    pub owner: VertexId,
    pub graph: Graph,
    pub quadruples: Vec<SpecialQuadruple>,
}

pub fn build_gstar(forest: &WorkingForest, view: &RootedView, p: VertexId) -> StarGraph {
    let quadruples = detect_special_quadruples(forest, view, p);
    let excluded: BTreeSet<VertexId> = quadruples.iter().flat_map(|q| q.members()).collect();
    let mut nodes = BTreeSet::new();
    for &c in &view.children[p] {
        if view.is_leaf(c) {
            nodes.insert(c);
        } else {
            for &g in &view.children[c] {
                nodes.insert(g);
            }
        }
    }
    let nodes: BTreeSet<VertexId> = nodes.difference(&excluded).copied().collect();
    let mut graph = Graph::new();
    for &v in &nodes {
        graph.add_node(v);
    }
    for &(a, b) in forest.requests() {
        if nodes.contains(&a) && nodes.contains(&b) {
            graph.add_edge(a, b);
        }
    }
    StarGraph { owner: p, graph, quadruples }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Group {
    GP1,
    GP2,
    GP3,
    GP4,
    GP5,
    GP6,
    GP7,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTag {
    pub tag: Group,
    pub members: Vec<VertexId>,
    /// The important child of the owner that holds the group (GP1, GP7).
    pub owner_child: Option<VertexId>,
}

/// Tags every component of a star graph; quadruples become GP6.
pub fn classify_groups(
    star: &StarGraph,
    view: &RootedView,
) -> Result<Vec<GroupTag>, AuxError> {
    let p = star.owner;
    let is_leaf_child = |x: VertexId| view.parent[x] == Some(p);
    let mut out = Vec::new();
    for shape in components(&star.graph)? {
        let parents: BTreeSet<VertexId> =
            shape.seq.iter().map(|&x| view.parent[x].unwrap()).collect();
        let single_gw = parents.len() == 1 && !parents.contains(&p);
        let owner_child = if single_gw { parents.iter().next().copied() } else { None };
        let tag = match (shape.kind, shape.length()) {
            (ShapeKind::Path, 1) if single_gw => Group::GP1,
            (ShapeKind::Path, 1) if shape.seq.iter().all(|&x| is_leaf_child(x)) => Group::GP2,
            (ShapeKind::Path, 3) if single_gw => Group::GP7,
            (ShapeKind::Path, 3) => Group::GP3,
            (ShapeKind::Cycle, _) if single_gw => Group::GP7,
            (ShapeKind::Cycle, 3) => Group::GP4,
            (ShapeKind::Cycle, 5) => Group::GP5,
            _ => return Err(AuxError::UnclassifiableComponent(shape.seq.clone())),
        };
        out.push(GroupTag { tag, members: shape.seq.clone(), owner_child });
    }
    for q in &star.quadruples {
        out.push(GroupTag { tag: Group::GP6, members: q.members().to_vec(), owner_child: Some(q.w) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{root_forest, Demands, Instance};

    fn path_graph(n: usize) -> Graph {
        Graph::from_edges(0..n, (1..n).map(|i| (i - 1, i)))
    }

    fn cycle_graph(n: usize) -> Graph {
        Graph::from_edges(0..n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn odd_path_cover_with_endpoint() {
        let vc = min_vc_deg2(&path_graph(4)).unwrap();
        assert_eq!(vc.size, 2);
        let c = vc.shapes[0].cover_with_endpoint(0).unwrap();
        assert_eq!(c, [0, 2].into_iter().collect());
        let c = vc.shapes[0].cover_with_endpoint(3).unwrap();
        assert_eq!(c, [1, 3].into_iter().collect());
    }

    #[test]
    fn even_path_unique_cover() {
        let vc = min_vc_deg2(&path_graph(3)).unwrap();
        assert_eq!(vc.size, 1);
        assert_eq!(vc.shapes[0].even_path_cover().unwrap(), [1].into_iter().collect());
        let five = min_vc_deg2(&path_graph(5)).unwrap();
        assert_eq!(five.shapes[0].even_path_cover().unwrap(), [1, 3].into_iter().collect());
    }

    #[test]
    fn cycles() {
        assert_eq!(min_vc_deg2(&cycle_graph(5)).unwrap().size, 3);
        let c4 = min_vc_deg2(&cycle_graph(4)).unwrap();
        let (a, b) = c4.shapes[0].even_cycle_covers().unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 2);
        assert!(a.is_disjoint(&b));
        let g = cycle_graph(4);
        assert!(g.is_vertex_cover(&a) && g.is_vertex_cover(&b));
        for n in 3..9 {
            let g = cycle_graph(n);
            let vc = min_vc_deg2(&g).unwrap();
            assert!(g.is_vertex_cover(&vc.cover));
            assert_eq!(vc.cover.len(), vc.size);
        }
    }

    #[test]
    fn degree_three_rejected() {
        let g = Graph::from_edges(0..4, [(0, 1), (0, 2), (0, 3)]);
        assert_eq!(min_vc_deg2(&g), Err(AuxError::DegreeTooHigh(0, 3)));
    }

    #[test]
    fn membership_test() {
        let g = path_graph(3);
        assert!(!in_some_min_cover(&g, 0).unwrap());
        assert!(in_some_min_cover(&g, 1).unwrap());
        let e = path_graph(2);
        assert!(in_some_min_cover(&e, 0).unwrap() && in_some_min_cover(&e, 1).unwrap());
    }

    // Vertex ids: 0 center, 1..=4 leaves.
    fn leaf_star(reqs: Vec<(usize, usize)>) -> Instance {
        Instance::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)], Demands::Requests(reqs), None).unwrap()
    }

    #[test]
    fn gu_examples() {
        let inst = leaf_star(vec![(1, 2), (2, 3)]);
        let f = root_forest(&inst, None);
        let view = f.view();
        let g = build_gu(&f, &view, 0);
        let shapes = components(&g.graph).unwrap();
        assert_eq!(shapes[0].seq, vec![1, 2, 3]);
        let inst = leaf_star(vec![(1, 2), (2, 3), (3, 4), (4, 1)]);
        let f = root_forest(&inst, None);
        let g = build_gu(&f, &f.view(), 0);
        let shapes = components(&g.graph).unwrap();
        assert!(shapes[0].is_cycle() && shapes[0].length() == 4);
        let g = build_gu(&f, &f.view(), 1);
        assert_eq!(g.graph.node_count(), 0);
    }

    // p=0 with child w=1 (children u=3, v=4), leaf sibling w'=2; extra leaf
    // z=5 under p. Root is a vertex 6 above p, with a spare leaf 7.
    fn quadruple_instance(extra: Vec<(usize, usize)>) -> Instance {
        let mut reqs = vec![(3, 4), (3, 2), (4, 2), (1, 2)];
        reqs.extend(extra);
        Instance::new(
            8,
            vec![(6, 0), (0, 1), (0, 2), (1, 3), (1, 4), (0, 5), (6, 7)],
            Demands::Requests(reqs),
            None,
        )
        .unwrap()
    }

    #[test]
    fn quadruple_detection() {
        let inst = quadruple_instance(vec![]);
        let f = root_forest(&inst, Some(6));
        let view = f.view();
        let qs = detect_special_quadruples(&f, &view, 0);
        assert_eq!(qs, vec![SpecialQuadruple { w: 1, w_prime: 2, u: 3, v: 4 }]);
        let star = build_gstar(&f, &view, 0);
        let nodes: Vec<_> = star.graph.nodes().collect();
        assert!(nodes.iter().all(|&x| x == 5), "{nodes:?}");
        let inst = quadruple_instance(vec![(2, 5)]);
        let f = root_forest(&inst, Some(6));
        assert!(detect_special_quadruples(&f, &f.view(), 0).is_empty());
    }

    #[test]
    fn quadruple_needs_two_children() {
        let inst = Instance::new(
            6,
            vec![(0, 1), (0, 2), (1, 3), (1, 4), (1, 5)],
            Demands::Requests(vec![(3, 4), (3, 2), (4, 2), (1, 2)]),
            None,
        )
        .unwrap();
        let f = root_forest(&inst, Some(0));
        assert!(detect_special_quadruples(&f, &f.view(), 0).is_empty());
    }

    #[test]
    fn group_tags() {
        // p=0; leaf children 1,2; important child 3 with children 4,5;
        // important child 6 with children 7,8.
        let edges = vec![(9, 0), (0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (0, 6), (6, 7), (6, 8), (9, 10)];
        let mk = |reqs: Vec<(usize, usize)>| {
            let inst = Instance::new(11, edges.clone(), Demands::Requests(reqs), None).unwrap();
            let f = root_forest(&inst, Some(9));
            let view = f.view();
            let star = build_gstar(&f, &view, 0);
            classify_groups(&star, &view)
        };
        let tags = mk(vec![(4, 5), (1, 2), (7, 8)]).unwrap();
        let kinds: Vec<Group> = tags.iter().map(|t| t.tag).collect();
        assert_eq!(kinds, vec![Group::GP2, Group::GP1, Group::GP1]);
        // GP4: 3-cycles u,v,x with x a leaf child.
        let tags = mk(vec![(4, 5), (4, 1), (5, 1), (2, 7), (7, 8), (8, 2)]).unwrap();
        assert!(tags.iter().any(|t| t.tag == Group::GP4 && t.members.len() == 3));
        // GP3: path 5-4-7-8 spanning two important children.
        let tags = mk(vec![(4, 5), (4, 7), (7, 8), (1, 2)]).unwrap();
        assert!(tags.iter().any(|t| t.tag == Group::GP3));
    }

    #[test]
    fn gp7_cycle_inside_one_child() {
        let edges = vec![(7, 0), (0, 1), (1, 2), (1, 3), (1, 4), (0, 5), (7, 6)];
        let inst = Instance::new(
            8,
            edges,
            Demands::Requests(vec![(2, 3), (3, 4), (2, 4)]),
            None,
        )
        .unwrap();
        let f = root_forest(&inst, Some(7));
        let view = f.view();
        let star = build_gstar(&f, &view, 0);
        let tags = classify_groups(&star, &view);
        // Leaf child 5 is isolated, so classification must refuse.
        assert!(matches!(tags, Err(AuxError::UnclassifiableComponent(_))));
        let g = star.graph.without(&[5].into_iter().collect());
        let star = StarGraph { graph: g, ..star };
        let tags = classify_groups(&star, &view).unwrap();
        assert_eq!(tags[0].tag, Group::GP7);
        assert_eq!(tags[0].owner_child, Some(1));
    }
}
