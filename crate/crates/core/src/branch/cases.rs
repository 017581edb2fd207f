//! Rules on the auxiliary graphs of important vertices, and the case
//! analysis around a deepest important vertex `w` with parent `p`.
//!
//! "Cutting" or "keeping" a vertex means its parent edge. A cross target
//! of `x ∈ T_w` is a partner of `x` in `T_p` outside `T_w`.

use std::collections::BTreeSet;

use super::ctx::{Ctx, Place};
use super::{Action, BranchPlan, Side};
use crate::auxgraph::{self, ShapeKind};
use crate::model::VertexId;

/// Degree-three and long-odd-path branching on `G_w`, and the closing step
/// for a component that is a star.
pub fn branch_on_aux_graph(ctx: &Ctx) -> Option<Action> {
    let important = ctx.important();
    if ctx.enabled("BR1") {
        for &w in &important {
            let g = ctx.gw(w);
            let found = g.nodes().find(|&v| g.degree(v) >= 3);
            if let Some(v) = found {
                let mut keep = Side::new();
                keep.cut(ctx.pe(v));
                let mut drop = Side::new();
                drop.cut_all(g.neighbors(v).map(|n| ctx.pe(n)));
                return Some(Action::Branch(BranchPlan::new("BR1", vec![keep, drop])));
            }
        }
    }
    if ctx.enabled("BR3") {
        for &w in &important {
            let g = ctx.gw(w);
            for shape in auxgraph::components(&g).ok()? {
                if shape.is_path() && shape.length() % 2 == 1 && shape.length() >= 5 {
                    let u = shape.seq[0];
                    let cover = shape.cover_with_endpoint(u).unwrap();
                    let mut a = Side::new();
                    a.cut_all(cover.iter().map(|&l| ctx.pe(l)));
                    let mut b = Side::new();
                    b.cut(ctx.pe(shape.seq[1]));
                    return Some(Action::Branch(BranchPlan::new("BR3", vec![a, b])));
                }
            }
        }
    }
    if ctx.view.is_important(ctx.root) && ctx.enabled("solved-star") {
        let mut side = Side::new();
        side.cut_all(ctx.vc(ctx.root).iter().map(|&l| ctx.pe(l)));
        return Some(Action::Forced { rule: "solved-star", side });
    }
    None
}

type CaseFn = fn(&Ctx, VertexId, VertexId) -> Option<BranchPlan>;

const CASES: [(&str, CaseFn); 10] = [
    ("Case1", case_1),
    ("Case2", case_2),
    ("Case2.5", case_2_5),
    ("Case1.5", case_1_5),
    ("Case3", case_3),
    ("Case4", case_4),
    ("Case5", case_5),
    ("Case6", case_6),
    ("Case70", case_70),
    ("Case7", case_7),
];

/// First applicable case, in case order, over the deepest important
/// vertices in id order.
pub fn branch_on_cases(ctx: &Ctx) -> Option<Action> {
    let far: Vec<VertexId> = ctx.w_far().into_iter().filter(|&w| w != ctx.root).collect();
    for (name, case) in CASES {
        if !ctx.enabled(name) {
            continue;
        }
        for &w in &far {
            let p = ctx.parent(w).unwrap();
            if let Some(plan) = case(ctx, w, p) {
                return Some(Action::Branch(plan));
            }
        }
    }
    None
}

fn targets_of(ctx: &Ctx, w: VertexId, x: VertexId) -> BTreeSet<VertexId> {
    ctx.cross(w, x).into_iter().collect()
}

/// Side that cuts `u` alone.
fn cut_only(ctx: &Ctx, u: VertexId) -> Side {
    let mut s = Side::new();
    s.cut(ctx.pe(u));
    s
}

/// Keeps the favored child `u` (and so `w`), cuts `extra` and resolves the
/// cross targets of `u`.
fn keep_favored(ctx: &Ctx, w: VertexId, p: VertexId, u: VertexId, extra: &[VertexId]) -> Side {
    let mut s = Side::new();
    s.favor(ctx.pe(u), vec![ctx.pe(w)]).keep(ctx.pe(u));
    for &x in extra {
        s.cut(ctx.pe(x));
    }
    ctx.resolve_targets(&mut s, p, &targets_of(ctx, w, u));
    s
}

/// `w` requests an important sibling.
fn case_1(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let t = ctx.cross(w, w).into_iter().find(|&y| ctx.place(p, y) == Place::ImportantChild)?;
    let mut a = Side::new();
    ctx.cut_with_cover(&mut a, w);
    let mut b = Side::new();
    ctx.cut_with_cover(&mut b, t);
    Some(BranchPlan::new("Case1", vec![a, b]))
}

/// A degree-two vertex of `G_w` has a cross request.
fn case_2(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let g = ctx.gw(w);
    let u = ctx.children(w).iter().copied().find(|&u| g.degree(u) == 2 && !ctx.cross(w, u).is_empty())?;
    let nbrs: Vec<VertexId> = g.neighbors(u).collect();
    Some(BranchPlan::new("Case2", vec![cut_only(ctx, u), keep_favored(ctx, w, p, u, &nbrs)]))
}

/// An endpoint `u` of a length-3 path `(u, x, y, z)` of `G_w` has a cross
/// request.
fn case_2_5(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let g = ctx.gw(w);
    for shape in auxgraph::components(&g).ok()? {
        if !(shape.is_path() && shape.length() == 3) {
            continue;
        }
        let mut seq = shape.seq.clone();
        let ends = [seq[0], seq[3]];
        let Some(&u) = ends.iter().find(|&&e| !ctx.cross(w, e).is_empty()) else { continue };
        if seq[0] != u {
            seq.reverse();
        }
        let (x, y) = (seq[1], seq[2]);
        let mut a = Side::new();
        a.cut(ctx.pe(u)).cut(ctx.pe(y));
        return Some(BranchPlan::new("Case2.5", vec![a, keep_favored(ctx, w, p, u, &[x])]));
    }
    None
}

/// A child requests a non-leaf uncle.
fn case_1_5(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let g = ctx.gw(w);
    let u = ctx.children(w).iter().copied().find(|&u| {
        ctx.cross(w, u).iter().any(|&y| ctx.place(p, y) == Place::ImportantChild)
    })?;
    let nbrs: Vec<VertexId> = g.neighbors(u).collect();
    Some(BranchPlan::new("Case1.5", vec![cut_only(ctx, u), keep_favored(ctx, w, p, u, &nbrs)]))
}

/// A child has at least two cross requests.
fn case_3(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let g = ctx.gw(w);
    let u = ctx.children(w).iter().copied().find(|&u| ctx.cross(w, u).len() >= 2)?;
    let targets = ctx.cross(w, u);
    let parents: BTreeSet<Option<VertexId>> = targets
        .iter()
        .map(|&t| match ctx.place(p, t) {
            Place::Grandchild(q) => Some(q),
            _ => None,
        })
        .collect();
    let same_cousin_parent = parents.len() == 1 && parents.iter().next().unwrap().is_some();
    let rule = if same_cousin_parent { "Case3.2" } else { "Case3.1" };
    let nbrs: Vec<VertexId> = g.neighbors(u).collect();
    Some(BranchPlan::new(rule, vec![keep_favored(ctx, w, p, u, &nbrs), cut_only(ctx, u)]))
}

fn leaf_sibling_target(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<VertexId> {
    ctx.cross(w, w).into_iter().find(|&y| ctx.place(p, y) == Place::LeafChild)
}

/// `w` requests a leaf sibling and `τ(G_w) ≥ 2`.
fn case_4(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let t = leaf_sibling_target(ctx, w, p)?;
    if ctx.tau(w) < 2 {
        return None;
    }
    let mut a = Side::new();
    ctx.cut_with_cover(&mut a, w);
    Some(BranchPlan::new("Case4", vec![a, cut_only(ctx, t)]))
}

/// The single edge `uv` of `G_w`, if that is all of it.
fn single_edge(ctx: &Ctx, w: VertexId) -> Option<(VertexId, VertexId)> {
    let g = ctx.gw(w);
    let kids = ctx.children(w);
    (kids.len() == 2 && g.has_edge(kids[0], kids[1])).then(|| (kids[0], kids[1]))
}

/// `w` requests a leaf sibling `w'` and either another sibling or a child
/// of `w` requests something other than `w'`.
fn case_5(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let t = leaf_sibling_target(ctx, w, p)?;
    let (u, v) = single_edge(ctx, w)?;
    let own = targets_of(ctx, w, w);
    if own.iter().any(|&y| y != t) {
        let mut a = Side::new();
        a.cut(ctx.pe(w)).cut(ctx.pe(u));
        let mut b = Side::new();
        b.keep(ctx.pe(w));
        ctx.resolve_targets(&mut b, p, &own);
        return Some(BranchPlan::new("Case5a", vec![a, b]));
    }
    for (x, other) in [(u, v), (v, u)] {
        let tx = targets_of(ctx, w, x);
        if tx.iter().any(|&y| y != t) {
            let mut b = Side::new();
            b.favor(ctx.pe(x), vec![ctx.pe(w)]).keep(ctx.pe(x)).cut(ctx.pe(other));
            let all: BTreeSet<VertexId> = tx.union(&own).copied().collect();
            ctx.resolve_targets(&mut b, p, &all);
            return Some(BranchPlan::new("Case5b", vec![cut_only(ctx, x), b]));
        }
    }
    None
}

/// `w` requests a leaf sibling `w'` that requests something in `T_p`
/// outside `T_w`.
fn case_6(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let t = leaf_sibling_target(ctx, w, p)?;
    let _ = single_edge(ctx, w)?;
    let outer: BTreeSet<VertexId> =
        ctx.inside(p, t).into_iter().filter(|&y| !ctx.in_subtree(y, w)).collect();
    if outer.is_empty() {
        return None;
    }
    let mut b = Side::new();
    b.keep(ctx.pe(t));
    ctx.cut_with_cover(&mut b, w);
    ctx.resolve_targets(&mut b, p, &outer);
    Some(BranchPlan::new("Case6", vec![cut_only(ctx, t), b]))
}

/// Whether `x` belongs to a special quadruple under `p`.
fn in_quadruple(ctx: &Ctx, p: VertexId, x: VertexId) -> bool {
    auxgraph::detect_special_quadruples(ctx.forest, &ctx.view, p)
        .iter()
        .any(|q| q.members().contains(&x))
}

/// A leaf sibling of `w` outside special quadruples has at least three
/// requests to leaf siblings or nephews.
fn case_70(ctx: &Ctx, _w: VertexId, p: VertexId) -> Option<BranchPlan> {
    for &s in ctx.children(p) {
        if !ctx.is_leaf(s) {
            continue;
        }
        let near: BTreeSet<VertexId> = ctx
            .inside(p, s)
            .into_iter()
            .filter(|&y| matches!(ctx.place(p, y), Place::LeafChild | Place::Grandchild(_)))
            .collect();
        if near.len() < 3 || in_quadruple(ctx, p, s) {
            continue;
        }
        let all: BTreeSet<VertexId> = ctx.inside(p, s).into_iter().collect();
        let mut b = Side::new();
        b.keep(ctx.pe(s));
        let parent_cut = ctx.resolve_targets(&mut b, p, &all);
        let rule = if parent_cut {
            "Case70b"
        } else if near.iter().all(|&y| ctx.place(p, y) == Place::LeafChild) {
            "Case70a"
        } else {
            "Case70c"
        };
        return Some(BranchPlan::new(rule, vec![cut_only(ctx, s), b]));
    }
    None
}

/// Two edges `uv`, `xy` of `G_w` whose four endpoints all have cross
/// requests.
fn case_7(ctx: &Ctx, w: VertexId, p: VertexId) -> Option<BranchPlan> {
    let g = ctx.gw(w);
    let single = |x: VertexId| -> Option<VertexId> {
        let t = ctx.cross(w, x);
        (t.len() == 1).then(|| t[0])
    };
    let mut edges = Vec::new();
    for shape in auxgraph::components(&g).ok()? {
        if shape.kind == ShapeKind::Path && shape.length() == 1 {
            let (a, b) = (shape.seq[0], shape.seq[1]);
            if let (Some(ta), Some(tb)) = (single(a), single(b)) {
                edges.push(((a, ta), (b, tb)));
            }
        }
    }
    if edges.len() < 2 {
        return None;
    }
    let leaf_uncle = |y: VertexId| ctx.place(p, y) == Place::LeafChild;
    // 7.1: both ends of one edge request the same leaf uncle.
    for &((a, ta), (_, tb)) in &edges {
        let _ = a;
        if ta == tb && leaf_uncle(ta) {
            let mut s1 = Side::new();
            s1.cut(ctx.pe(ta));
            let mut s2 = Side::new();
            s2.keep(ctx.pe(ta));
            ctx.cut_with_cover(&mut s2, w);
            return Some(BranchPlan::new("Case7.1", vec![s1, s2]));
        }
    }
    let ((u, tu), (v, tv)) = edges[0];
    let ((mut x, mut tx), (mut y, mut ty)) = edges[1];
    // Orient xy so that x shares an uncle with u when possible.
    if !(tu == tx && leaf_uncle(tu)) && (tu == ty && leaf_uncle(tu) || tv == tx && leaf_uncle(tv)) {
        std::mem::swap(&mut x, &mut y);
        std::mem::swap(&mut tx, &mut ty);
    }
    // 7.2: u, x share leaf uncle A and v, y share leaf uncle B, and the
    // uncles have no other requests inside T_p.
    if tu == tx && tv == ty && tu != tv && leaf_uncle(tu) && leaf_uncle(tv) {
        let only = |t: VertexId, a: VertexId, b: VertexId| ctx.inside(p, t).iter().all(|&z| z == a || z == b);
        if only(tu, u, x) && only(tv, v, y) {
            let mut s1 = Side::new();
            ctx.cut_with_cover(&mut s1, w);
            let mut s2 = Side::new();
            s2.keep(ctx.pe(tv)).keep(ctx.pe(w)).cut(ctx.pe(tu)).cut(ctx.pe(v)).cut(ctx.pe(y));
            let mut s3 = Side::new();
            s3.keep(ctx.pe(tu)).keep(ctx.pe(w)).cut(ctx.pe(tv)).cut(ctx.pe(u)).cut(ctx.pe(x));
            return Some(BranchPlan::new("Case7.2", vec![s1, s2, s3]));
        }
    }
    let shared = tu == tx && leaf_uncle(tu);
    let rule = if shared { "Case7.3" } else { "Case7.4" };
    // v and y are favored; the four sides pick one end of each edge.
    let pe_w = ctx.pe(w);
    let mut sides = Vec::new();
    for (cut_a, cut_b) in [(u, x), (u, y), (v, x), (v, y)] {
        let mut s = Side::new();
        s.favor(ctx.pe(v), vec![pe_w]).favor(ctx.pe(y), vec![pe_w]);
        if (cut_a, cut_b) != (v, y) {
            let kept: Vec<VertexId> =
                [u, v, x, y].into_iter().filter(|&z| z != cut_a && z != cut_b).collect();
            for &k in &kept {
                s.keep(ctx.pe(k));
            }
            s.keep(pe_w);
            s.cut(ctx.pe(cut_a)).cut(ctx.pe(cut_b));
            let mut targets = BTreeSet::new();
            for &k in &kept {
                targets.extend(ctx.cross(w, k));
            }
            ctx.resolve_targets(&mut s, p, &targets);
        } else {
            s.cut(ctx.pe(cut_a)).cut(ctx.pe(cut_b));
        }
        sides.push(s);
    }
    Some(BranchPlan::new(rule, sides))
}
