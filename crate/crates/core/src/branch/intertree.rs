//! Rules between the sibling subtrees hanging from `g = π(p)`, where `p`
//! is the parent of a deepest important vertex.
//!
//! Each child `b` of `g` is a "blob" of height at most two. A vertex `t`
//! strictly inside a blob is favored when two exchanges hold: `t` lies in a
//! minimum cover of its parent's graph (if its parent is not `b`), and some
//! optimal cut of the blob's own requests contains `t`'s edge. Keeping a
//! favored vertex then keeps its whole path to `g`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use super::ctx::Ctx;
use super::gstar::frontier;
use super::{solve_min, Action, BranchPlan, Side, SolveOptions};
use crate::auxgraph;
use crate::model::{Demands, EdgeId, Instance, VertexId};

pub fn intertree_phase(ctx: &Ctx) -> Option<Action> {
    let mut seen = BTreeSet::new();
    for p in frontier(ctx) {
        let Some(g) = ctx.parent(p) else { continue };
        if seen.insert(g) {
            if let Some(a) = Level::new(ctx, g).action() {
                return Some(a);
            }
        }
    }
    None
}

type SubKey = (VertexId, Vec<EdgeId>, Vec<VertexId>);
/// Size and edges of an exact sub-solve, `None` when over budget.
type SubResult = Option<(usize, BTreeSet<EdgeId>)>;

struct Level<'c, 'a> {
    ctx: &'c Ctx<'a>,
    g: VertexId,
    blobs: Vec<VertexId>,
    cache: RefCell<BTreeMap<SubKey, SubResult>>,
}

/// A candidate vertex with an outside partner, and its blob.
#[derive(Clone, Copy)]
struct Cand {
    b: VertexId,
    t: VertexId,
}

impl<'c, 'a> Level<'c, 'a> {
    fn new(ctx: &'c Ctx<'a>, g: VertexId) -> Self {
        let mut blobs = ctx.children(g).to_vec();
        blobs.sort_unstable();
        Level { ctx, g, blobs, cache: RefCell::new(BTreeMap::new()) }
    }

    fn action(&self) -> Option<Action> {
        let ctx = self.ctx;
        let inner: Vec<VertexId> = self.blobs.iter().copied().filter(|&b| !ctx.is_leaf(b)).collect();
        if ctx.enabled("Case100") {
            for &b in &inner {
                let out = self.out_vertices(b);
                if out.is_empty() || out.contains(&b) {
                    continue;
                }
                if self.opt(b, &[], &out) == self.opt(b, &[], &BTreeSet::new()) {
                    let mut side = Side::new();
                    side.keep(ctx.pe(b));
                    return Some(Action::Forced { rule: "Case100", side });
                }
            }
        }
        let mut cands = Vec::new();
        for &b in &inner {
            for t in self.out_vertices(b) {
                if t != b {
                    cands.push(Cand { b, t });
                }
            }
        }
        for name in ["Case200", "Case300", "Case400", "Case500", "Case600"] {
            if !ctx.enabled(name) {
                continue;
            }
            let mut list = cands.clone();
            if name == "Case200" {
                // Case 200 also covers an important blob top with an outside partner.
                let tops = inner
                    .iter()
                    .filter(|&&b| ctx.view.is_important(b) && self.out_vertices(b).contains(&b))
                    .map(|&b| Cand { b, t: b });
                list = tops.chain(cands.iter().copied()).collect();
            }
            for c in list {
                let plan = match name {
                    "Case200" => self.case200(c),
                    "Case300" => self.case300(c),
                    "Case400" => self.case400(c),
                    "Case500" => self.case500(c),
                    _ => self.case600(c),
                };
                if let Some(plan) = plan {
                    return Some(Action::Branch(plan));
                }
            }
        }
        if ctx.enabled("intertree-top") {
            for &b in &inner {
                if self.out_vertices(b).contains(&b) {
                    let keep = self.keep_side(&[b], None, &[]);
                    let sides = [Some(self.cut_blob(b)), keep].into_iter().flatten().collect();
                    return Some(Action::Branch(BranchPlan::new("intertree-top", sides)));
                }
            }
        }
        if ctx.enabled("intertree-vertex") {
            for c in &cands {
                if let Some(plan) = self.cut_or_keep("intertree-vertex", *c, &[]) {
                    return Some(Action::Branch(plan));
                }
            }
        }
        None
    }

    // ---- Structure ----

    fn subtree(&self, h: VertexId) -> Vec<VertexId> {
        let mut out = vec![h];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            out.extend(self.ctx.children(x).iter().copied());
            i += 1;
        }
        out
    }

    fn in_tg(&self, y: VertexId) -> bool {
        self.ctx.in_subtree(y, self.g)
    }

    /// Vertices of `T_b` with a partner in `T_g` outside `T_b`.
    fn out_vertices(&self, b: VertexId) -> BTreeSet<VertexId> {
        let ctx = self.ctx;
        self.subtree(b)
            .into_iter()
            .filter(|&t| ctx.partners[t].iter().any(|&y| self.in_tg(y) && !ctx.in_subtree(y, b)))
            .collect()
    }

    /// Partners of `t` inside `T_b`, other than `b`.
    fn inner_partners(&self, b: VertexId, t: VertexId) -> Vec<VertexId> {
        self.ctx.partners[t].iter().copied().filter(|&y| y != b && self.ctx.in_subtree(y, b)).collect()
    }

    fn degree(&self, b: VertexId, t: VertexId) -> usize {
        self.inner_partners(b, t).len()
    }

    // ---- Exact optima of a blob's own requests ----

    /// Optimal cut of the requests inside `T_h` that contains the edges
    /// `forced` and separates every vertex of `sep` from `h`.
    fn opt(&self, h: VertexId, forced: &[EdgeId], sep: &BTreeSet<VertexId>) -> Option<usize> {
        self.sub(h, forced, sep).map(|r| r.0)
    }

    fn sub(&self, h: VertexId, forced: &[EdgeId], sep: &BTreeSet<VertexId>) -> Option<(usize, BTreeSet<EdgeId>)> {
        let mut f = forced.to_vec();
        f.sort_unstable();
        f.dedup();
        let key = (h, f.clone(), sep.iter().copied().collect());
        if let Some(r) = self.cache.borrow().get(&key) {
            return r.clone();
        }
        let r = self.solve_sub(h, &f, sep);
        self.cache.borrow_mut().insert(key, r.clone());
        r
    }

    fn solve_sub(&self, h: VertexId, forced: &[EdgeId], sep: &BTreeSet<VertexId>) -> Option<(usize, BTreeSet<EdgeId>)> {
        let ctx = self.ctx;
        if sep.contains(&h) {
            return None;
        }
        let verts = self.subtree(h);
        let local: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut ids = Vec::new();
        let mut by_edge = BTreeMap::new();
        for &v in &verts[1..] {
            let e = ctx.pe(v);
            by_edge.insert(e, v);
            edges.push((local[&v], local[&ctx.parent(v).unwrap()]));
            ids.push(e);
        }
        let mut reqs = Vec::new();
        for &(a, b) in ctx.forest.requests() {
            if let (Some(&x), Some(&y)) = (local.get(&a), local.get(&b)) {
                reqs.push((x, y));
            }
        }
        for &s in sep {
            reqs.push((local[&s], 0));
        }
        for e in forced {
            let v = by_edge[e];
            reqs.push((local[&v], local[&ctx.parent(v).unwrap()]));
        }
        if edges.is_empty() {
            return if reqs.is_empty() { Some((0, BTreeSet::new())) } else { None };
        }
        let inst = Instance::new(verts.len(), edges, Demands::Requests(reqs), None).ok()?;
        let (size, cut, _) = solve_min(&inst, &SolveOptions::default());
        Some((size, cut.iter().map(|i| ids[i]).collect()))
    }

    fn blob_opt(&self, h: VertexId) -> usize {
        self.opt(h, &[], &BTreeSet::new()).expect("plain blob optimum exists")
    }

    // ---- Favoring and side construction ----

    /// Edges above `t` up to its blob top, if `t` may be favored.
    fn chain(&self, b: VertexId, t: VertexId) -> Option<Vec<EdgeId>> {
        let ctx = self.ctx;
        let q = ctx.parent(t)?;
        if q != b {
            let gq = ctx.gw(q);
            if !ctx.view.is_important(q) || gq.max_degree() > 2 || !auxgraph::in_some_min_cover(&gq, t).ok()? {
                return None;
            }
        }
        if self.opt(b, &[ctx.pe(t)], &BTreeSet::new())? != self.blob_opt(b) {
            return None;
        }
        let mut chain = Vec::new();
        let mut x = q;
        loop {
            chain.push(ctx.pe(x));
            if x == b {
                break;
            }
            x = ctx.parent(x)?;
        }
        Some(chain)
    }

    /// Cuts `pe(h)` together with an optimal cut of `T_h`'s own requests.
    fn cut_isolated(&self, side: &mut Side, h: VertexId) {
        side.cut(self.ctx.pe(h));
        if !self.ctx.is_leaf(h) {
            side.cut_all(self.sub(h, &[], &BTreeSet::new()).expect("plain blob optimum exists").1);
        }
    }

    fn cut_blob(&self, b: VertexId) -> Side {
        let mut side = Side::new();
        self.cut_isolated(&mut side, b);
        side
    }

    /// Side that keeps the parent edges of `keeps` (and, through `favor`,
    /// the chain of a favored vertex) and cuts `cuts`. Every partner of a
    /// vertex now joined to `g` is then separated on its own side. `None`
    /// if two joined vertices request each other.
    fn keep_side(
        &self,
        keeps: &[VertexId],
        favor: Option<(VertexId, Vec<EdgeId>)>,
        cuts: &[EdgeId],
    ) -> Option<Side> {
        let ctx = self.ctx;
        let mut side = Side::new();
        let mut kept: BTreeSet<EdgeId> = keeps.iter().map(|&v| ctx.pe(v)).collect();
        if let Some((t, chain)) = &favor {
            side.favor(ctx.pe(*t), chain.clone());
            kept.extend(chain.iter().copied());
        }
        for &e in cuts {
            side.cut(e);
        }
        for &v in keeps {
            side.keep(ctx.pe(v));
        }
        let cut_set: BTreeSet<EdgeId> = cuts.iter().copied().collect();
        let mut joined = BTreeSet::from([self.g]);
        for v in self.subtree(self.g).into_iter().skip(1) {
            if joined.contains(&ctx.parent(v).unwrap()) && kept.contains(&ctx.pe(v)) {
                joined.insert(v);
            }
        }
        let mut groups: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for &k in &joined {
            for &y in &ctx.partners[k] {
                if !self.in_tg(y) {
                    continue;
                }
                if joined.contains(&y) {
                    return None;
                }
                let mut h = y;
                let mut separated = cut_set.contains(&ctx.pe(h));
                while !joined.contains(&ctx.parent(h).unwrap()) {
                    h = ctx.parent(h).unwrap();
                    separated |= cut_set.contains(&ctx.pe(h));
                }
                if !separated {
                    groups.entry(h).or_default().insert(y);
                }
            }
        }
        for (h, targets) in groups {
            self.separate(&mut side, h, &targets);
        }
        Some(side)
    }

    /// Cuts that separate `targets` (inside `T_h`) from `π(h)`, chosen
    /// without loss of generality: an optimal cut of `T_h` through all
    /// target edges, or else `pe(h)` with an optimal cut of `T_h` when no
    /// optimal cut of `T_h` separates them by itself.
    fn separate(&self, side: &mut Side, h: VertexId, targets: &BTreeSet<VertexId>) {
        let ctx = self.ctx;
        if targets.contains(&h) {
            self.cut_isolated(side, h);
            return;
        }
        let base = self.blob_opt(h);
        let forced: Vec<EdgeId> = targets.iter().map(|&t| ctx.pe(t)).collect();
        let mut by_parent: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for &t in targets {
            let q = ctx.parent(t).unwrap();
            if q != h {
                by_parent.entry(q).or_default().insert(t);
            }
        }
        let covers_ok = by_parent.iter().all(|(&q, group)| {
            let gq = ctx.gw(q);
            gq.max_degree() <= 2 && auxgraph::min_cover_containing(&gq, group).unwrap_or(false)
        });
        if covers_ok && self.opt(h, &forced, &BTreeSet::new()) == Some(base) {
            for &t in targets {
                side.cut(ctx.pe(t));
                if !ctx.is_leaf(t) {
                    side.cut_all(self.sub(t, &[], &BTreeSet::new()).expect("plain optimum exists").1);
                }
            }
        } else if self.opt(h, &[], targets).is_none_or(|v| v > base) {
            self.cut_isolated(side, h);
        }
    }

    fn cut_or_keep(&self, rule: &'static str, c: Cand, extra_cut: &[VertexId]) -> Option<BranchPlan> {
        let ctx = self.ctx;
        let chain = self.chain(c.b, c.t)?;
        let mut cut = Side::new();
        cut.cut(ctx.pe(c.t));
        for &x in extra_cut {
            cut.cut(ctx.pe(x));
        }
        let keep = self.keep_side(&[c.t], Some((c.t, chain)), &[]);
        Some(BranchPlan::new(rule, [Some(cut), keep].into_iter().flatten().collect()))
    }

    // ---- The cases ----

    /// `t` is important with an outside partner: branch on a child `z` of
    /// `t` that has a partner outside `T_t`; keeping `z` keeps `t`.
    fn case200(&self, c: Cand) -> Option<BranchPlan> {
        let ctx = self.ctx;
        if !ctx.view.is_important(c.t) {
            return None;
        }
        let gt = ctx.gw(c.t);
        if gt.max_degree() > 2 {
            return None;
        }
        let outside = |z: VertexId| ctx.partners[z].iter().any(|&y| self.in_tg(y) && !ctx.in_subtree(y, c.t));
        let mut best: Option<(bool, VertexId)> = None;
        for &z in ctx.children(c.t) {
            if !outside(z) {
                continue;
            }
            let both = gt.neighbors(z).any(outside);
            if best.is_none_or(|(b, _)| both && !b) {
                best = Some((both, z));
            }
        }
        let z = best?.1;
        let chain = if c.t == c.b {
            let g1 = ctx.gw(c.t);
            if !auxgraph::in_some_min_cover(&g1, z).ok()? {
                return None;
            }
            vec![ctx.pe(c.t)]
        } else {
            self.chain(c.b, z)?
        };
        let keep = self.keep_side(&[z], Some((z, chain)), &[]);
        let mut cut = Side::new();
        cut.cut(ctx.pe(z));
        Some(BranchPlan::new("Case200", [keep, Some(cut)].into_iter().flatten().collect()))
    }

    /// A leaf `t` with at least two partners inside its blob.
    fn case300(&self, c: Cand) -> Option<BranchPlan> {
        if !self.ctx.is_leaf(c.t) || self.degree(c.b, c.t) < 2 {
            return None;
        }
        self.cut_or_keep("Case300", c, &[])
    }

    /// `t` ends a length-3 path `(t, s1, s2, s3)` of requests inside its
    /// blob; cutting `t` comes with cutting `s2`.
    fn case400(&self, c: Cand) -> Option<BranchPlan> {
        let (b, t) = (c.b, c.t);
        if !self.ctx.is_leaf(t) || self.degree(b, t) != 1 {
            return None;
        }
        let s1 = self.inner_partners(b, t)[0];
        let n1 = self.inner_partners(b, s1);
        if n1.len() != 2 {
            return None;
        }
        let s2 = if n1[0] == t { n1[1] } else { n1[0] };
        let n2 = self.inner_partners(b, s2);
        if n2.len() != 2 {
            return None;
        }
        let s3 = if n2[0] == s1 { n2[1] } else { n2[0] };
        if s3 == t || self.degree(b, s3) != 1 || ![s1, s2, s3].iter().all(|&x| self.ctx.is_leaf(x)) {
            return None;
        }
        self.cut_or_keep("Case400", c, &[s2])
    }

    /// `t` and its sibling `s` form an isolated request edge under the
    /// important `q`. Keeping `t` keeps `q`, so exactly one end of another
    /// isolated edge `(y, z)` of `G_q` is cut; branch on which.
    fn case500(&self, c: Cand) -> Option<BranchPlan> {
        let ctx = self.ctx;
        let (b, t) = (c.b, c.t);
        let q = ctx.parent(t)?;
        if q == b || !ctx.is_leaf(t) || self.degree(b, t) != 1 {
            return None;
        }
        let s = self.inner_partners(b, t)[0];
        if ctx.parent(s) != Some(q) || self.degree(b, s) != 1 {
            return None;
        }
        let chain = self.chain(b, t)?;
        let mut cut = Side::new();
        cut.cut(ctx.pe(t));
        let gq = ctx.gw(q);
        let outside = |x: VertexId| ctx.partners[x].iter().any(|&y| ctx.in_subtree(y, b) && !ctx.in_subtree(y, q));
        let mut pick: Option<(bool, VertexId, VertexId)> = None;
        for y in gq.nodes() {
            if y == t || y == s || gq.degree(y) != 1 {
                continue;
            }
            let z = gq.neighbors(y).next().unwrap();
            if gq.degree(z) != 1 || z < y {
                continue;
            }
            let both = outside(y) && outside(z);
            if pick.is_none_or(|(b0, _, _)| both && !b0) {
                pick = Some((both, y, z));
            }
        }
        let mut sides = vec![cut];
        match pick {
            Some((_, y, z)) => {
                sides.extend(self.keep_side(&[t, y], Some((t, chain.clone())), &[ctx.pe(z)]));
                sides.extend(self.keep_side(&[t, z], Some((t, chain)), &[ctx.pe(y)]));
            }
            None => sides.extend(self.keep_side(&[t], Some((t, chain)), &[])),
        }
        Some(BranchPlan::new("Case500", sides))
    }

    /// Leaf children `t, s` of the blob top request each other and nothing
    /// else inside the blob, and both have outside partners: cut the blob,
    /// or keep it and cut exactly one of them.
    fn case600(&self, c: Cand) -> Option<BranchPlan> {
        let ctx = self.ctx;
        let (b, t) = (c.b, c.t);
        if ctx.parent(t) != Some(b) || !ctx.is_leaf(t) || self.degree(b, t) != 1 {
            return None;
        }
        let s = self.inner_partners(b, t)[0];
        let out = self.out_vertices(b);
        if ctx.parent(s) != Some(b) || !ctx.is_leaf(s) || self.degree(b, s) != 1 || !out.contains(&s) {
            return None;
        }
        let mut sides = vec![self.cut_blob(b)];
        sides.extend(self.keep_side(&[b, s], None, &[ctx.pe(t)]));
        sides.extend(self.keep_side(&[b, t], None, &[ctx.pe(s)]));
        Some(BranchPlan::new("Case600", sides))
    }
}
