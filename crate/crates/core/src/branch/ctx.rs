//! Read-only view of a search node shared by the phases.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use super::Side;
use crate::auxgraph::{self, build_gu, Graph};
use crate::model::{EdgeId, RootedView, VertexId, WorkingForest};

pub struct Ctx<'a> {
    pub forest: &'a WorkingForest,
    pub view: RootedView,
    /// Root of the component being worked on.
    pub root: VertexId,
    /// Sorted request partners of each vertex.
    pub partners: Vec<Vec<VertexId>>,
    disabled: &'a BTreeSet<String>,
    graphs: RefCell<BTreeMap<VertexId, Graph>>,
}

/// Where a vertex sits relative to a height-two vertex `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    LeafChild,
    ImportantChild,
    Grandchild(VertexId),
    Outside,
}

impl<'a> Ctx<'a> {
    pub fn new(
        forest: &'a WorkingForest,
        view: RootedView,
        root: VertexId,
        disabled: &'a BTreeSet<String>,
    ) -> Self {
        let mut partners = forest.partners();
        for p in &mut partners {
            p.sort_unstable();
        }
        Ctx { forest, view, root, partners, disabled, graphs: RefCell::new(BTreeMap::new()) }
    }

    pub fn enabled(&self, rule: &str) -> bool {
        !self.disabled.contains(rule)
    }

    /// Edge from `x` to its parent.
    pub fn pe(&self, x: VertexId) -> EdgeId {
        self.view.parent_edge[x].expect("vertex has a parent")
    }

    pub fn parent(&self, x: VertexId) -> Option<VertexId> {
        self.view.parent[x]
    }

    pub fn children(&self, x: VertexId) -> &[VertexId] {
        &self.view.children[x]
    }

    pub fn is_leaf(&self, x: VertexId) -> bool {
        self.view.is_leaf(x)
    }

    pub fn in_subtree(&self, x: VertexId, u: VertexId) -> bool {
        self.view.in_subtree(x, u)
    }

    /// Important vertices of the working component, by id.
    pub fn important(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self
            .view
            .order
            .iter()
            .copied()
            .filter(|&u| self.view.root_of[u] == self.root && self.view.is_important(u))
            .collect();
        v.sort_unstable();
        v
    }

    /// Important vertices at maximum depth, by id.
    pub fn w_far(&self) -> Vec<VertexId> {
        let imp = self.important();
        let d = imp.iter().map(|&w| self.view.depth[w]).max().unwrap_or(0);
        imp.into_iter().filter(|&w| self.view.depth[w] == d).collect()
    }

    pub fn gw(&self, w: VertexId) -> Graph {
        self.graphs
            .borrow_mut()
            .entry(w)
            .or_insert_with(|| build_gu(self.forest, &self.view, w).graph)
            .clone()
    }

    /// Default minimum cover of `G_w`; `G_w` must have maximum degree two.
    pub fn vc(&self, w: VertexId) -> BTreeSet<VertexId> {
        auxgraph::min_vc_deg2(&self.gw(w)).expect("degree checked by the aux-graph rules").cover
    }

    pub fn tau(&self, w: VertexId) -> usize {
        auxgraph::tau(&self.gw(w)).expect("degree checked by the aux-graph rules")
    }

    /// Partners of `x` inside `T_{π(w)}` but outside `T_w`.
    pub fn cross(&self, w: VertexId, x: VertexId) -> Vec<VertexId> {
        let Some(p) = self.parent(w) else { return Vec::new() };
        self.partners[x]
            .iter()
            .copied()
            .filter(|&y| self.in_subtree(y, p) && !self.in_subtree(y, w))
            .collect()
    }

    /// Partners of `x` inside `T_p`, other than `x` itself.
    pub fn inside(&self, p: VertexId, x: VertexId) -> Vec<VertexId> {
        self.partners[x].iter().copied().filter(|&y| self.in_subtree(y, p)).collect()
    }

    pub fn place(&self, p: VertexId, y: VertexId) -> Place {
        match self.parent(y) {
            Some(q) if q == p => {
                if self.is_leaf(y) {
                    Place::LeafChild
                } else {
                    Place::ImportantChild
                }
            }
            Some(q) if self.parent(q) == Some(p) => Place::Grandchild(q),
            _ => Place::Outside,
        }
    }

    /// Cuts `w` together with a minimum cover of `G_w`.
    pub fn cut_with_cover(&self, side: &mut Side, w: VertexId) {
        side.cut(self.pe(w));
        for l in self.vc(w) {
            side.cut(self.pe(l));
        }
    }

    /// Adds the cuts forced on `targets` (vertices of `T_p` below `p`) once
    /// every source requesting them is joined to `p` by kept edges.
    ///
    /// Leaf children are cut; important children are cut with a cover of
    /// their graph; grandchildren are grouped by parent `w3`: a group that
    /// fits into one minimum cover of `G_{w3}` is favored and cut, otherwise
    /// `w3` is cut with a cover. Returns true if some group took the
    /// second form.
    pub fn resolve_targets(&self, side: &mut Side, p: VertexId, targets: &BTreeSet<VertexId>) -> bool {
        let mut cut_parents = BTreeSet::new();
        for &t in targets {
            if self.place(p, t) == Place::ImportantChild {
                self.cut_with_cover(side, t);
                cut_parents.insert(t);
            }
        }
        let mut groups: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for &t in targets {
            match self.place(p, t) {
                Place::LeafChild => {
                    side.cut(self.pe(t));
                }
                Place::Grandchild(w3) if !cut_parents.contains(&w3) => {
                    groups.entry(w3).or_default().insert(t);
                }
                _ => {}
            }
        }
        let mut parent_cut = false;
        for (w3, group) in groups {
            let g = self.gw(w3);
            if auxgraph::min_cover_containing(&g, &group).unwrap_or(false) {
                for &x in &group {
                    side.favor(self.pe(x), vec![self.pe(w3)]);
                    side.cut(self.pe(x));
                }
            } else {
                self.cut_with_cover(side, w3);
                parent_cut = true;
            }
        }
        parent_cut
    }

    /// Whether `G_w` has maximum degree at most two.
    pub fn small(&self, w: VertexId) -> bool {
        self.gw(w).max_degree() <= 2
    }
}
