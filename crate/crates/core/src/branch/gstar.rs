//! Rules on the star graph `G*_p` of a height-two vertex `p`, and the
//! closing step for a component of height two.

use std::collections::BTreeSet;

use super::ctx::{Ctx, Place};
use super::{Action, BranchPlan, Side};
use crate::auxgraph::{self, build_gstar, StarGraph};
use crate::model::VertexId;

/// Parents of the deepest important vertices, by id.
pub(super) fn frontier(ctx: &Ctx) -> Vec<VertexId> {
    let set: BTreeSet<VertexId> = ctx.w_far().into_iter().filter_map(|w| ctx.parent(w)).collect();
    set.into_iter().collect()
}

pub fn gstar_phase(ctx: &Ctx) -> Option<Action> {
    for p in frontier(ctx) {
        let star = build_gstar(ctx.forest, &ctx.view, p);
        if p == ctx.root && ctx.enabled("solved-height2") {
            if let Some(side) = solved_height2(ctx, p, &star) {
                return Some(Action::Forced { rule: "solved-height2", side });
            }
        }
        if let Some(a) = star_rules(ctx, p, &star) {
            return Some(a);
        }
    }
    None
}

fn star_rules(ctx: &Ctx, p: VertexId, star: &StarGraph) -> Option<Action> {
    if star.graph.max_degree() > 2 {
        return None;
    }
    let shapes = auxgraph::components(&star.graph).ok()?;
    if ctx.enabled("RR10") {
        for s in &shapes {
            if s.is_path() && s.length() >= 2 && s.length() % 2 == 0 {
                let mut side = Side::new();
                side.cut_all(s.even_path_cover().unwrap().iter().map(|&x| ctx.pe(x)));
                return Some(Action::Forced { rule: "RR10", side });
            }
        }
    }
    if ctx.enabled("BR4") {
        for s in &shapes {
            if s.is_path() && s.length() >= 5 && s.length() % 2 == 1 {
                return Some(Action::Branch(odd_path_split(ctx, "BR4", &s.seq, None)));
            }
        }
    }
    if ctx.enabled("BR5") {
        for s in &shapes {
            if let Some((c0, c1)) = s.even_cycle_covers() {
                let mut a = Side::new();
                a.cut_all(c0.iter().map(|&x| ctx.pe(x)));
                let mut b = Side::new();
                b.cut_all(c1.iter().map(|&x| ctx.pe(x)));
                return Some(Action::Branch(BranchPlan::new("BR5", vec![a, b])));
            }
        }
    }
    if ctx.enabled("BR5'") {
        for s in &shapes {
            if !(s.is_cycle() && s.length() >= 7 && s.length() % 2 == 1) {
                continue;
            }
            let parents: BTreeSet<VertexId> = s.seq.iter().map(|&x| ctx.parent(x).unwrap()).collect();
            if parents.len() == 1 && !parents.contains(&p) {
                continue;
            }
            let Some(start) = s.seq.iter().position(|&x| ctx.place(p, x) == Place::LeafChild) else {
                continue;
            };
            let m = s.seq.len();
            let cyc: Vec<VertexId> = (0..m).map(|i| s.seq[(start + i) % m]).collect();
            let (u1, u2, ulast) = (cyc[0], cyc[1], cyc[m - 1]);
            let mut keep = Side::new();
            for x in [u2, ulast] {
                if let Place::Grandchild(q) = ctx.place(p, x) {
                    keep.favor(ctx.pe(x), vec![ctx.pe(q)]);
                }
            }
            keep.keep(ctx.pe(u1)).cut(ctx.pe(u2)).cut(ctx.pe(ulast));
            let split = odd_path_split(ctx, "BR5'", &cyc[1..], Some(u1));
            let mut sides = vec![keep];
            sides.extend(split.sides);
            return Some(Action::Branch(BranchPlan::new("BR5'", sides)));
        }
    }
    None
}

/// Splits on the first endpoint `u` of an odd path: cut the cover through
/// `u` and keep the rest of the path, or cut `u`'s neighbor. `pre` is cut
/// on both sides first.
fn odd_path_split(ctx: &Ctx, rule: &'static str, seq: &[VertexId], pre: Option<VertexId>) -> BranchPlan {
    let cover: BTreeSet<VertexId> = seq.iter().copied().step_by(2).collect();
    let mut a = Side::new();
    let mut b = Side::new();
    if let Some(x) = pre {
        a.cut(ctx.pe(x));
        b.cut(ctx.pe(x));
    }
    a.cut_all(cover.iter().map(|&x| ctx.pe(x)));
    for &x in seq {
        if !cover.contains(&x) {
            a.keep(ctx.pe(x));
        }
    }
    b.cut(ctx.pe(seq[1]));
    BranchPlan::new(rule, vec![a, b])
}

/// Optimal cut for a component of height two rooted at `p`, when the
/// structure guarantees one: every request lies inside `G*_p` or inside one
/// special quadruple, and no important child needs its own edge (its
/// children with outside requests fit into a minimum cover of its graph
/// plus one). The cut is a minimum cover of `G*_p` plus two edges per
/// quadruple.
fn solved_height2(ctx: &Ctx, p: VertexId, star: &StarGraph) -> Option<Side> {
    if star.graph.max_degree() > 2 {
        return None;
    }
    let quad_of = |x: VertexId| star.quadruples.iter().position(|q| q.members().contains(&x));
    for &(a, b) in ctx.forest.requests() {
        if ctx.view.root_of[a] != ctx.root {
            continue;
        }
        let inside = star.graph.contains(a) && star.graph.contains(b);
        let same_quad = quad_of(a).is_some() && quad_of(a) == quad_of(b);
        if !inside && !same_quad {
            return None;
        }
    }
    let quad_w: BTreeSet<VertexId> = star.quadruples.iter().map(|q| q.w).collect();
    for &c in ctx.children(p) {
        if ctx.is_leaf(c) || quad_w.contains(&c) {
            continue;
        }
        let g = ctx.gw(c);
        let out: BTreeSet<VertexId> = ctx
            .children(c)
            .iter()
            .copied()
            .filter(|&x| ctx.partners[x].iter().any(|&y| !ctx.in_subtree(y, c)))
            .collect();
        let t = auxgraph::tau(&g).ok()?;
        let rest = auxgraph::tau(&g.without(&out)).ok()?;
        if rest + out.len() > t + 1 {
            return None;
        }
    }
    let mut side = Side::new();
    let vc = auxgraph::min_vc_deg2(&star.graph).ok()?;
    side.cut_all(vc.cover.iter().map(|&x| ctx.pe(x)));
    for q in &star.quadruples {
        side.cut(ctx.pe(q.w_prime)).cut(ctx.pe(q.u.min(q.v)));
    }
    Some(side)
}
