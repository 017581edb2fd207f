//! Problem instances, the mutable working forest used by the search, and
//! witness checking.
//!
//! Vertices are `0..n` internally. Every live edge of a [`WorkingForest`]
//! remembers the original tree edge it descends from, so a cut found on the
//! reduced forest maps back to original edges without any extra bookkeeping.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Request pair normalized so that the smaller id comes first.
pub fn norm(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance has no vertices")]
    Empty,
    #[error("edges do not form a tree: {0}")]
    NotATree(String),
    #[error("vertex id {0} out of range (n = {1})")]
    BadVertexId(usize, usize),
    #[error("request ({0}, {0}) joins a vertex to itself")]
    SelfRequest(usize),
    #[error("{0} costs given for {1} edges")]
    CostCount(usize, usize),
    #[error("edge costs are only allowed together with terminal sets")]
    CostsWithoutTerminalSets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Multicut on trees: explicit request pairs, unit edge costs.
    Mct,
    /// Generalized multiway cut: terminal sets, unit edge costs.
    Gmwct,
    /// Weighted generalized multiway cut: terminal sets and edge costs.
    Wgmwct,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Mct => "mct",
            Mode::Gmwct => "gmwct",
            Mode::Wgmwct => "wgmwct",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mct" => Ok(Mode::Mct),
            "gmwct" => Ok(Mode::Gmwct),
            "wgmwct" => Ok(Mode::Wgmwct),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Where the separation requirements of an instance come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Demands {
    Requests(Vec<(VertexId, VertexId)>),
    TerminalSets(Vec<Vec<VertexId>>),
}

/// Immutable problem statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    costs: Option<Vec<u64>>,
    requests: Vec<(VertexId, VertexId)>,
    terminal_sets: Option<Vec<Vec<VertexId>>>,
    k: Option<usize>,
}

impl Instance {
    /// Validates and builds an MCT/GMWCT instance with unit costs.
    pub fn new(
        n: usize,
        edges: Vec<(VertexId, VertexId)>,
        demands: Demands,
        k: Option<usize>,
    ) -> Result<Self, InstanceError> {
        build_instance(n, edges, None, demands, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (VertexId, VertexId) {
        self.edges[id]
    }

    pub fn costs(&self) -> Option<&[u64]> {
        self.costs.as_deref()
    }

    pub fn cost(&self, id: EdgeId) -> u64 {
        self.costs.as_ref().map_or(1, |c| c[id])
    }

    /// The request set; for terminal-set instances these are all same-set
    /// pairs.
    pub fn requests(&self) -> &[(VertexId, VertexId)] {
        &self.requests
    }

    pub fn terminal_sets(&self) -> Option<&[Vec<VertexId>]> {
        self.terminal_sets.as_deref()
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn with_k(mut self, k: Option<usize>) -> Self {
        self.k = k;
        self
    }

    pub fn mode(&self) -> Mode {
        match (&self.terminal_sets, &self.costs) {
            (None, _) => Mode::Mct,
            (Some(_), None) => Mode::Gmwct,
            (Some(_), Some(_)) => Mode::Wgmwct,
        }
    }

    /// Looks up the edge joining `a` and `b`.
    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let key = norm(a, b);
        self.edges.iter().position(|&(x, y)| norm(x, y) == key)
    }
}

/// Validates raw input and builds an [`Instance`].
///
/// `costs`, when present, must have one entry per edge and switches the
/// instance into weighted mode (terminal sets required).
pub fn build_instance(
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    costs: Option<Vec<u64>>,
    demands: Demands,
    k: Option<usize>,
) -> Result<Instance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    for &(a, b) in &edges {
        for v in [a, b] {
            if v >= n {
                return Err(InstanceError::BadVertexId(v, n));
            }
        }
        if a == b {
            return Err(InstanceError::NotATree(format!("self-loop at {a}")));
        }
    }
    if edges.len() != n - 1 {
        return Err(InstanceError::NotATree(format!(
            "{} edges on {} vertices",
            edges.len(),
            n
        )));
    }
    let mut uf = UnionFind::new(n);
    for &(a, b) in &edges {
        if !uf.union(a, b) {
            return Err(InstanceError::NotATree(format!("cycle through edge ({a}, {b})")));
        }
    }
    if let Some(c) = &costs {
        if c.len() != edges.len() {
            return Err(InstanceError::CostCount(c.len(), edges.len()));
        }
    }
    let (requests, terminal_sets) = match demands {
        Demands::Requests(raw) => {
            let mut set = BTreeSet::new();
            for (a, b) in raw {
                for v in [a, b] {
                    if v >= n {
                        return Err(InstanceError::BadVertexId(v, n));
                    }
                }
                if a == b {
                    return Err(InstanceError::SelfRequest(a));
                }
                set.insert(norm(a, b));
            }
            (set.into_iter().collect(), None)
        }
        Demands::TerminalSets(sets) => {
            let mut cleaned = Vec::with_capacity(sets.len());
            for s in sets {
                let mut members: Vec<VertexId> = s;
                for &v in &members {
                    if v >= n {
                        return Err(InstanceError::BadVertexId(v, n));
                    }
                }
                members.sort_unstable();
                members.dedup();
                cleaned.push(members);
            }
            (crate::gmwct::expand_to_requests(&cleaned), Some(cleaned))
        }
    };
    if costs.is_some() && terminal_sets.is_none() {
        return Err(InstanceError::CostsWithoutTerminalSets);
    }
    Ok(Instance { n, edges, costs, requests, terminal_sets, k })
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// A set of original edge ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct CutSet(pub BTreeSet<EdgeId>);

impl CutSet {
    pub fn new() -> Self {
        CutSet::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    pub fn cost(&self, instance: &Instance) -> u64 {
        self.iter().map(|e| instance.cost(e)).sum()
    }
}

impl FromIterator<EdgeId> for CutSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        CutSet(iter.into_iter().collect())
    }
}

/// True iff removing `cut` separates every request of the instance.
pub fn verify_cut(instance: &Instance, cut: &CutSet) -> bool {
    let mut uf = UnionFind::new(instance.n());
    for (id, &(a, b)) in instance.edges().iter().enumerate() {
        if !cut.contains(id) {
            uf.union(a, b);
        }
    }
    instance.requests().iter().all(|&(a, b)| uf.find(a) != uf.find(b))
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EditError {
    #[error("budget exhausted")]
    BudgetExhausted,
    #[error("contraction joins the two endpoints of a live request")]
    InfeasibleBranch,
    #[error("edge {0} is not live")]
    NoSuchEdge(EdgeId),
}

/// One recorded modification of a working forest.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum EditKind {
    Cut(EdgeId),
    Contract { edge: EdgeId, survivor: VertexId },
    Favor { vertex: VertexId, chain: Vec<EdgeId> },
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Edit {
    pub kind: EditKind,
    pub node: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct EditLog {
    pub preferred_root: Option<VertexId>,
    pub edits: Vec<Edit>,
}

/// Rooted snapshot of a working forest. Recomputed after edits; cheap at the
/// sizes the search operates on.
#[derive(Debug, Clone)]
pub struct RootedView {
    pub parent: Vec<Option<VertexId>>,
    pub parent_edge: Vec<Option<EdgeId>>,
    pub children: Vec<Vec<VertexId>>,
    pub depth: Vec<usize>,
    pub height: Vec<usize>,
    pub root_of: Vec<VertexId>,
    /// Live vertices in BFS order, component by component.
    pub order: Vec<VertexId>,
    pub tin: Vec<usize>,
    pub tout: Vec<usize>,
    pub alive: Vec<bool>,
}

impl RootedView {
    pub fn is_root(&self, v: VertexId) -> bool {
        self.alive[v] && self.parent[v].is_none()
    }

    /// A vertex with no children. Isolated roots count as leaves too, but
    /// every caller only asks about children of some vertex.
    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_empty()
    }

    /// All children are leaves (and there is at least one child).
    pub fn is_important(&self, v: VertexId) -> bool {
        !self.children[v].is_empty() && self.children[v].iter().all(|&c| self.is_leaf(c))
    }

    /// `x` lies in the subtree rooted at `u`.
    pub fn in_subtree(&self, x: VertexId, u: VertexId) -> bool {
        self.root_of[x] == self.root_of[u] && self.tin[u] <= self.tin[x] && self.tout[x] <= self.tout[u]
    }

    pub fn leaf_children(&self, u: VertexId) -> Vec<VertexId> {
        self.children[u].iter().copied().filter(|&c| self.is_leaf(c)).collect()
    }

    /// Edges on the tree path between `a` and `b` (same component).
    pub fn path_edges(&self, mut a: VertexId, mut b: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        while self.depth[a] > self.depth[b] {
            out.push(self.parent_edge[a].unwrap());
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            out.push(self.parent_edge[b].unwrap());
            b = self.parent[b].unwrap();
        }
        while a != b {
            out.push(self.parent_edge[a].unwrap());
            out.push(self.parent_edge[b].unwrap());
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        out
    }

    /// Lowest common ancestor of two vertices of one component.
    pub fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    pub fn roots(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.order.iter().copied().filter(|&v| self.parent[v].is_none())
    }
}

/// Mutable rooted forest under cut/contract edits.
#[derive(Debug, Clone)]
pub struct WorkingForest {
    alive: Vec<bool>,
    adj: Vec<BTreeMap<VertexId, EdgeId>>,
    members: Vec<Vec<VertexId>>,
    edge_ends: Vec<Option<(VertexId, VertexId)>>,
    requests: BTreeSet<(VertexId, VertexId)>,
    budget: Option<usize>,
    committed_cut: Vec<EdgeId>,
    roots: BTreeSet<VertexId>,
    log: EditLog,
    node: u64,
}

/// Roots every component of the instance tree (one component initially).
/// The root is `preferred_root` when that is an internal vertex, otherwise
/// the lowest-id internal vertex, otherwise the lowest id.
pub fn root_forest(instance: &Instance, preferred_root: Option<VertexId>) -> WorkingForest {
    let n = instance.n();
    let mut adj = vec![BTreeMap::new(); n];
    let mut edge_ends = Vec::with_capacity(instance.edges().len());
    for (id, &(a, b)) in instance.edges().iter().enumerate() {
        adj[a].insert(b, id);
        adj[b].insert(a, id);
        edge_ends.push(Some((a, b)));
    }
    let mut forest = WorkingForest {
        alive: vec![true; n],
        adj,
        members: (0..n).map(|v| vec![v]).collect(),
        edge_ends,
        requests: instance.requests().iter().copied().collect(),
        budget: instance.k(),
        committed_cut: Vec::new(),
        roots: BTreeSet::new(),
        log: EditLog { preferred_root, edits: Vec::new() },
        node: 0,
    };
    let start = match preferred_root {
        Some(r) if r < n && forest.adj[r].len() >= 2 => r,
        _ => (0..n).find(|&v| forest.adj[v].len() >= 2).unwrap_or(0),
    };
    forest.roots.insert(start);
    forest.normalize_roots();
    forest
}

impl WorkingForest {
    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn set_budget(&mut self, budget: Option<usize>) {
        self.budget = budget;
    }

    pub fn requests(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.requests
    }

    pub fn has_request(&self, a: VertexId, b: VertexId) -> bool {
        self.requests.contains(&norm(a, b))
    }

    /// Request partners of every vertex.
    pub fn partners(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.alive.len()];
        for &(a, b) in &self.requests {
            out[a].push(b);
            out[b].push(a);
        }
        out
    }

    pub fn committed_cut(&self) -> &[EdgeId] {
        &self.committed_cut
    }

    pub fn cut_set(&self) -> CutSet {
        self.committed_cut.iter().copied().collect()
    }

    pub fn log(&self) -> &EditLog {
        &self.log
    }

    pub fn set_node(&mut self, node: u64) {
        self.node = node;
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        self.alive[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.alive.len()
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.alive.len()).filter(|&v| self.alive[v])
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.adj[v].iter().map(|(&u, &e)| (u, e))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    /// Original vertices merged into live vertex `v`.
    pub fn members(&self, v: VertexId) -> &[VertexId] {
        &self.members[v]
    }

    pub fn edge_ends(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.edge_ends.get(e).copied().flatten()
    }

    pub fn is_live_edge(&self, e: EdgeId) -> bool {
        self.edge_ends(e).is_some()
    }

    pub fn live_edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edge_ends
            .iter()
            .enumerate()
            .filter_map(|(e, ends)| ends.map(|(a, b)| (e, a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ends.iter().filter(|e| e.is_some()).count()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adj[a].get(&b).copied()
    }

    pub fn roots(&self) -> &BTreeSet<VertexId> {
        &self.roots
    }

    /// Computes the rooted structure of every component.
    pub fn view(&self) -> RootedView {
        let n = self.alive.len();
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut root_of = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        for &r in &self.roots {
            root_of[r] = r;
            let start = order.len();
            order.push(r);
            let mut i = start;
            while i < order.len() {
                let v = order[i];
                i += 1;
                for (&u, &e) in &self.adj[v] {
                    if Some(u) == parent[v] {
                        continue;
                    }
                    parent[u] = Some(v);
                    parent_edge[u] = Some(e);
                    depth[u] = depth[v] + 1;
                    root_of[u] = r;
                    children[v].push(u);
                    order.push(u);
                }
            }
        }
        let mut height = vec![0; n];
        for &v in order.iter().rev() {
            if let Some(p) = parent[v] {
                height[p] = height[p].max(height[v] + 1);
            }
        }
        // Euler intervals via iterative DFS over the children lists.
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        let mut stack: Vec<(VertexId, usize)> = Vec::new();
        for &r in &self.roots {
            stack.push((r, 0));
            tin[r] = clock;
            clock += 1;
            while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
                if *idx < children[v].len() {
                    let c = children[v][*idx];
                    *idx += 1;
                    tin[c] = clock;
                    clock += 1;
                    stack.push((c, 0));
                } else {
                    tout[v] = clock;
                    clock += 1;
                    stack.pop();
                }
            }
        }
        RootedView {
            parent,
            parent_edge,
            children,
            depth,
            height,
            root_of,
            order,
            tin,
            tout,
            alive: self.alive.clone(),
        }
    }

    fn record(&mut self, kind: EditKind) {
        let node = self.node;
        self.log.edits.push(Edit { kind, node });
    }

    /// Records favor marks in the log; they do not change the forest.
    pub fn record_favor(&mut self, vertex: VertexId, chain: Vec<EdgeId>) {
        self.record(EditKind::Favor { vertex, chain });
    }

    /// Cuts a live edge: removes it, charges the budget, purges separated
    /// requests and re-roots the pieces.
    pub fn cut_edge(&mut self, e: EdgeId) -> Result<(), EditError> {
        let (a, b) = self.edge_ends(e).ok_or(EditError::NoSuchEdge(e))?;
        if let Some(k) = self.budget {
            if k == 0 {
                return Err(EditError::BudgetExhausted);
            }
            self.budget = Some(k - 1);
        }
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
        self.edge_ends[e] = None;
        self.committed_cut.push(e);
        self.record(EditKind::Cut(e));
        self.normalize_roots();
        self.purge_separated();
        Ok(())
    }

    /// Contracts a live edge, merging the child endpoint into its parent.
    pub fn contract_edge(&mut self, e: EdgeId) -> Result<(), EditError> {
        let (a, b) = self.edge_ends(e).ok_or(EditError::NoSuchEdge(e))?;
        let view = self.view();
        let survivor = if view.parent[b] == Some(a) { a } else { b };
        self.contract_into(e, survivor)
    }

    /// Contracts `e`, keeping `survivor` (one of its endpoints) as the
    /// identity of the merged vertex.
    pub fn contract_into(&mut self, e: EdgeId, survivor: VertexId) -> Result<(), EditError> {
        let (a, b) = self.edge_ends(e).ok_or(EditError::NoSuchEdge(e))?;
        assert!(survivor == a || survivor == b, "survivor must be an endpoint");
        let gone = if survivor == a { b } else { a };
        if self.requests.contains(&norm(a, b)) {
            return Err(EditError::InfeasibleBranch);
        }
        self.adj[survivor].remove(&gone);
        self.adj[gone].remove(&survivor);
        self.edge_ends[e] = None;
        let moved: Vec<(VertexId, EdgeId)> = std::mem::take(&mut self.adj[gone]).into_iter().collect();
        for (x, id) in moved {
            self.adj[x].remove(&gone);
            self.adj[x].insert(survivor, id);
            self.adj[survivor].insert(x, id);
            let (p, q) = self.edge_ends[id].unwrap();
            self.edge_ends[id] = Some(if p == gone { (survivor, q) } else { (p, survivor) });
        }
        let absorbed = std::mem::take(&mut self.members[gone]);
        self.members[survivor].extend(absorbed);
        self.alive[gone] = false;
        let touched: Vec<(VertexId, VertexId)> =
            self.requests.iter().copied().filter(|&(x, y)| x == gone || y == gone).collect();
        for (x, y) in touched {
            self.requests.remove(&(x, y));
            let other = if x == gone { y } else { x };
            self.requests.insert(norm(other, survivor));
        }
        if self.roots.remove(&gone) {
            self.roots.insert(survivor);
        }
        self.record(EditKind::Contract { edge: e, survivor });
        self.normalize_roots();
        Ok(())
    }

    /// Every component gets exactly one root, and the root is internal
    /// whenever its component has an internal vertex.
    fn normalize_roots(&mut self) {
        let n = self.alive.len();
        let mut comp = vec![usize::MAX; n];
        let mut new_roots = BTreeSet::new();
        let mut queue = VecDeque::new();
        let candidates: Vec<VertexId> =
            self.roots.iter().copied().chain(0..n).filter(|&v| self.alive[v]).collect();
        for start in candidates {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut verts = vec![start];
            comp[start] = start;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &u in self.adj[v].keys() {
                    if comp[u] == usize::MAX {
                        comp[u] = start;
                        verts.push(u);
                        queue.push_back(u);
                    }
                }
            }
            let current = if self.roots.contains(&start) { Some(start) } else { None };
            let root = match current {
                Some(r) if self.adj[r].len() >= 2 => r,
                _ => {
                    let internal = verts.iter().copied().filter(|&v| self.adj[v].len() >= 2).min();
                    internal.or(current).unwrap_or_else(|| *verts.iter().min().unwrap())
                }
            };
            new_roots.insert(root);
        }
        self.roots = new_roots;
    }

    /// Drops requests whose endpoints lie in different components.
    fn purge_separated(&mut self) {
        let view = self.view();
        self.requests.retain(|&(a, b)| view.root_of[a] == view.root_of[b]);
    }

    /// Rebuilds a forest from an instance by replaying an edit log.
    pub fn replay(instance: &Instance, log: &EditLog) -> Result<WorkingForest, EditError> {
        let mut f = root_forest(instance, log.preferred_root);
        for edit in &log.edits {
            f.node = edit.node;
            match &edit.kind {
                EditKind::Cut(e) => f.cut_edge(*e)?,
                EditKind::Contract { edge, survivor } => f.contract_into(*edge, *survivor)?,
                EditKind::Favor { vertex, chain } => f.record_favor(*vertex, chain.clone()),
            }
        }
        Ok(f)
    }

    /// Structural equality: live vertices with their members, live edges,
    /// requests, budget and committed cut.
    pub fn same_state(&self, other: &WorkingForest) -> bool {
        let members = |f: &WorkingForest| -> BTreeSet<Vec<VertexId>> {
            f.live_vertices()
                .map(|v| {
                    let mut m = f.members[v].clone();
                    m.sort_unstable();
                    m
                })
                .collect()
        };
        let label = |f: &WorkingForest, v: VertexId| -> VertexId { *f.members[v].iter().min().unwrap() };
        let edges = |f: &WorkingForest| -> BTreeSet<(EdgeId, (VertexId, VertexId))> {
            f.live_edges().map(|(e, a, b)| (e, norm(label(f, a), label(f, b)))).collect()
        };
        let reqs = |f: &WorkingForest| -> BTreeSet<(VertexId, VertexId)> {
            f.requests.iter().map(|&(a, b)| norm(label(f, a), label(f, b))).collect()
        };
        members(self) == members(other)
            && edges(self) == edges(other)
            && reqs(self) == reqs(other)
            && self.budget == other.budget
            && self.committed_cut == other.committed_cut
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3(req: Vec<(usize, usize)>, k: usize) -> Instance {
        Instance::new(3, vec![(0, 1), (1, 2)], Demands::Requests(req), Some(k)).unwrap()
    }

    #[test]
    fn builds_smallest_path_instance() {
        let inst = path3(vec![(0, 2)], 1);
        assert_eq!(inst.requests(), &[(0, 2)]);
        assert_eq!(inst.mode(), Mode::Mct);
    }

    #[test]
    fn rejects_cycle_and_self_request() {
        let err = Instance::new(3, vec![(0, 1), (1, 2), (0, 2)], Demands::Requests(vec![]), None);
        assert!(matches!(err, Err(InstanceError::NotATree(_))));
        let err = Instance::new(2, vec![(0, 1)], Demands::Requests(vec![(0, 0)]), None);
        assert_eq!(err, Err(InstanceError::SelfRequest(0)));
        let err = Instance::new(2, vec![(0, 1)], Demands::Requests(vec![(0, 5)]), None);
        assert_eq!(err, Err(InstanceError::BadVertexId(5, 2)));
    }

    #[test]
    fn rejects_disconnected_edges() {
        let err = Instance::new(4, vec![(0, 1), (0, 1), (2, 3)], Demands::Requests(vec![]), None);
        assert!(matches!(err, Err(InstanceError::NotATree(_))));
    }

    #[test]
    fn roots_at_internal_vertex() {
        let f = root_forest(&path3(vec![], 0), None);
        assert_eq!(f.roots().iter().copied().collect::<Vec<_>>(), vec![1]);
        let edge = Instance::new(2, vec![(0, 1)], Demands::Requests(vec![]), None).unwrap();
        assert_eq!(root_forest(&edge, None).roots().iter().copied().collect::<Vec<_>>(), vec![0]);
        let star = Instance::new(
            5,
            vec![(4, 0), (4, 1), (4, 2), (4, 3)],
            Demands::Requests(vec![]),
            None,
        )
        .unwrap();
        assert_eq!(root_forest(&star, Some(0)).roots().iter().copied().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn cut_purges_separated_requests() {
        let inst = path3(vec![(0, 2)], 1);
        let mut f = root_forest(&inst, None);
        f.cut_edge(0).unwrap();
        assert!(f.requests().is_empty());
        assert_eq!(f.budget(), Some(0));
        assert_eq!(f.cut_edge(1), Err(EditError::BudgetExhausted));
    }

    #[test]
    fn star_cut_separates_leaf_pair() {
        let inst =
            Instance::new(4, vec![(0, 1), (0, 2), (0, 3)], Demands::Requests(vec![(1, 2)]), Some(2))
                .unwrap();
        let mut f = root_forest(&inst, None);
        f.cut_edge(0).unwrap();
        assert!(f.requests().is_empty());
    }

    #[test]
    fn contraction_readdresses_requests() {
        let inst = path3(vec![(0, 2)], 1);
        let mut f = root_forest(&inst, None);
        f.contract_edge(0).unwrap();
        // 0 merged into the root 1.
        assert!(f.has_request(1, 2));
        assert_eq!(f.members(1).len(), 2);
        let unit = Instance::new(2, vec![(0, 1)], Demands::Requests(vec![(0, 1)]), Some(1)).unwrap();
        let mut g = root_forest(&unit, None);
        assert_eq!(g.contract_edge(0), Err(EditError::InfeasibleBranch));
    }

    #[test]
    fn contracting_request_free_leaf_absorbs_it() {
        let inst = Instance::new(
            4,
            vec![(0, 1), (1, 2), (1, 3)],
            Demands::Requests(vec![(0, 2)]),
            Some(1),
        )
        .unwrap();
        let mut f = root_forest(&inst, None);
        let e = inst.find_edge(1, 3).unwrap();
        f.contract_edge(e).unwrap();
        assert!(!f.is_alive(3));
        assert_eq!(f.requests().len(), 1);
    }

    #[test]
    fn verify_cut_examples() {
        let inst = path3(vec![(0, 2)], 1);
        assert!(verify_cut(&inst, &[1].into_iter().collect()));
        assert!(!verify_cut(&inst, &CutSet::new()));
        let star = Instance::new(
            4,
            vec![(0, 1), (0, 2), (0, 3)],
            Demands::Requests(vec![(1, 2), (2, 3), (1, 3)]),
            None,
        )
        .unwrap();
        assert!(verify_cut(&star, &[0, 1].into_iter().collect()));
    }

    #[test]
    fn replay_reproduces_forest() {
        let inst = Instance::new(
            6,
            vec![(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)],
            Demands::Requests(vec![(0, 4), (2, 5), (4, 5)]),
            Some(3),
        )
        .unwrap();
        let mut f = root_forest(&inst, None);
        f.contract_edge(inst.find_edge(1, 2).unwrap()).unwrap();
        f.cut_edge(inst.find_edge(3, 4).unwrap()).unwrap();
        f.contract_edge(inst.find_edge(0, 1).unwrap()).unwrap();
        let g = WorkingForest::replay(&inst, f.log()).unwrap();
        assert!(f.same_state(&g));
    }
}
