use treecut::branch::{solve_decision, solve_min, SolveOptions};
use treecut::gadgets::{find, GADGETS, GADGET_NAMES};
use treecut::model::{root_forest, verify_cut, CutSet};
use treecut::oracle::brute_force_min_cut;
use treecut::reduce::{OutcomeKind, Rule};

// Optima worked out by enumerating all edge subsets, kept here so that a
// regression in the oracle shows up as well.
const OPT: &[(&str, u64)] = &[
    ("RR1-useless-edge", 1),
    ("RR2-unit-request", 1),
    ("RR3-subtree-isolation", 1),
    ("RR4-vc-exclusion", 1),
    ("RR5-even-path", 1),
    ("RR6-cross-covered", 1),
    ("OBS-grandparent-request", 2),
    ("BR1", 2),
    ("BR3", 3),
    ("BR4", 4),
    ("BR5", 3),
    ("BR5'", 4),
    ("RR10", 3),
    ("Case1", 3),
    ("Case1.5", 4),
    ("Case2", 3),
    ("Case2.5", 3),
    ("Case3.1", 2),
    ("Case3.2", 4),
    ("Case4", 3),
    ("Case5a", 2),
    ("Case5b", 2),
    ("Case6", 3),
    ("Case70a", 4),
    ("Case70b", 2),
    ("Case70c", 2),
    ("Case7.1", 3),
    ("Case7.2", 3),
    ("Case7.3", 4),
    ("Case7.4", 3),
    ("Case100", 2),
    ("Case200", 3),
    ("Case300", 3),
    ("Case400", 4),
    ("Case500", 3),
    ("Case600", 5),
    ("intertree-top", 3),
    ("intertree-vertex", 3),
    ("solved-height2", 2),
    ("solved-star", 1),
    ("special-quadruple", 4),
];

fn frozen(rule: &str) -> u64 {
    OPT.iter().find(|(r, _)| *r == rule).map(|&(_, v)| v).unwrap()
}

#[test]
fn every_gadget_has_a_frozen_optimum() {
    assert_eq!(GADGET_NAMES.len(), OPT.len());
    for name in GADGET_NAMES {
        assert!(OPT.iter().any(|(r, _)| *r == name), "{name}");
    }
}

#[test]
fn oracle_matches_frozen_optima() {
    for g in GADGETS {
        let (opt, cut) = brute_force_min_cut(&g.instance()).unwrap();
        assert_eq!(opt, frozen(g.name), "{}", g.name);
        assert!(verify_cut(&g.instance(), &cut));
    }
}

#[test]
fn gadgets_fire_their_rule() {
    for g in GADGETS.iter().filter(|g| !g.direct) {
        let inst = g.instance();
        let (size, cut, stats) = solve_min(&inst, &SolveOptions::default());
        assert_eq!(size as u64, frozen(g.name), "{}", g.name);
        assert!(verify_cut(&inst, &cut), "{}", g.name);
        let fired = stats.rules.contains_key(g.rule) || stats.reductions.contains_key(g.rule);
        assert!(fired, "{} did not fire: {:?} {:?}", g.name, stats.rules, stats.reductions);
        assert_eq!(stats.fallback, 0, "{}", g.name);
    }
}

#[test]
fn even_path_gadget_fires_when_applied_alone() {
    let g = find("RR5-even-path").unwrap();
    let inst = g.instance();
    let mut forest = root_forest(&inst, None);
    let out = Rule::EvenPathCut.apply(&mut forest);
    assert_eq!(out.kind, OutcomeKind::Changed);
    assert!(!out.forced_cuts.is_empty());
    // Some optimum contains every forced cut.
    let opt = frozen(g.name) as usize;
    let m = inst.edges().len();
    let extends = (0u32..1 << m).any(|mask| {
        let cut = CutSet((0..m).filter(|&e| mask >> e & 1 == 1).collect());
        cut.len() == opt && out.forced_cuts.iter().all(|&e| cut.contains(e)) && verify_cut(&inst, &cut)
    });
    assert!(extends);
    let (size, _, _) = solve_min(&inst, &SolveOptions::default());
    assert_eq!(size, opt);
}

#[test]
fn gadget_decisions_are_tight() {
    for g in GADGETS {
        let inst = g.instance();
        let k = frozen(g.name) as usize;
        let (below, _) = solve_decision(&inst, k - 1, &SolveOptions::default());
        assert!(below.is_none(), "{}", g.name);
        let (at, _) = solve_decision(&inst, k, &SolveOptions::default());
        assert!(verify_cut(&inst, &at.unwrap()), "{}", g.name);
    }
}

#[test]
fn quadruple_gadget_holds_a_special_quadruple() {
    let inst = find("special-quadruple").unwrap().instance();
    let forest = root_forest(&inst, Some(0));
    let view = forest.view();
    let quads = treecut::auxgraph::detect_special_quadruples(&forest, &view, 0);
    assert_eq!(quads.len(), 1);
    let mut m = quads[0].members().to_vec();
    m.sort_unstable();
    assert_eq!(m, vec![7, 8, 9, 10]);
}
