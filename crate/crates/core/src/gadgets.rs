//! Small instances, each built to exercise one rule of the solver.
//!
//! Most gadgets make their rule fire inside `solve_min`. The even-path
//! reduction is shadowed by the cover-exclusion reduction in the fixpoint
//! loop (the ends of an even path lie in no minimum cover, so they are
//! contracted first), so its gadget is meant to be fed to the rule directly.

use crate::model::{Demands, Instance, VertexId};

#[derive(Debug, Clone, Copy)]
pub struct Gadget {
    pub name: &'static str,
    /// Name of the rule as it appears in the solver statistics.
    pub rule: &'static str,
    pub n: usize,
    pub edges: &'static [(VertexId, VertexId)],
    pub requests: &'static [(VertexId, VertexId)],
    /// True when the rule only fires when applied on its own.
    pub direct: bool,
}

impl Gadget {
    pub fn instance(&self) -> Instance {
        Instance::new(self.n, self.edges.to_vec(), Demands::Requests(self.requests.to_vec()), None)
            .expect("gadget is a valid instance")
    }
}

const fn g(
    rule: &'static str,
    n: usize,
    edges: &'static [(VertexId, VertexId)],
    requests: &'static [(VertexId, VertexId)],
) -> Gadget {
    Gadget { name: rule, rule, n, edges, requests, direct: false }
}

pub const GADGETS: &[Gadget] = &[
    g("RR1-useless-edge", 5, &[(1, 4), (2, 3), (3, 0), (0, 4)], &[(0, 3)]),
    g("RR2-unit-request", 5, &[(1, 4), (2, 3), (3, 0), (0, 4)], &[(0, 3)]),
    g("RR3-subtree-isolation", 5, &[(0, 1), (2, 1), (1, 4), (3, 4)], &[(0, 3)]),
    g("RR4-vc-exclusion", 5, &[(0, 2), (2, 1), (3, 1), (1, 4)], &[(0, 3), (3, 4)]),
    Gadget {
        name: "RR5-even-path",
        rule: "RR5-even-path",
        n: 5,
        edges: &[(0, 1), (1, 2), (1, 3), (1, 4)],
        requests: &[(2, 3), (3, 4)],
        direct: true,
    },
    g("RR6-cross-covered", 5, &[(1, 0), (0, 2), (3, 2), (2, 4)], &[(1, 4), (3, 4)]),
    g("OBS-grandparent-request", 5, &[(1, 4), (2, 0), (0, 4), (3, 4)], &[(0, 1), (1, 2), (1, 3), (2, 4)]),
    g(
        "BR1",
        6,
        &[(0, 2), (3, 2), (4, 1), (1, 2), (2, 5)],
        &[(0, 1), (0, 3), (0, 5), (1, 4), (2, 4)],
    ),
    g(
        "BR3",
        8,
        &[(0, 1), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
        &[(0, 4), (0, 5), (2, 3), (3, 7), (5, 7)],
    ),
    g(
        "BR4",
        13,
        &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (1, 6), (2, 7), (3, 8), (2, 9), (3, 10), (2, 11), (1, 12)],
        &[(0, 2), (0, 7), (1, 5), (2, 12), (4, 8), (4, 9), (5, 7), (7, 8), (8, 12), (9, 11)],
    ),
    g(
        "BR5",
        10,
        &[(0, 1), (1, 2), (1, 3), (1, 4), (0, 5), (2, 6), (1, 7), (2, 8), (0, 9)],
        &[(0, 2), (1, 9), (3, 4), (3, 5), (3, 8), (4, 6), (6, 8)],
    ),
    g(
        "BR5'",
        12,
        &[(0, 1), (1, 2), (1, 3), (1, 4), (1, 5), (5, 6), (5, 7), (1, 8), (8, 9), (8, 10), (0, 11)],
        &[(2, 6), (6, 7), (7, 3), (3, 9), (9, 10), (10, 4), (4, 2), (11, 5)],
    ),
    g(
        "RR10",
        12,
        &[(0, 1), (1, 2), (0, 3), (1, 4), (1, 5), (1, 6), (6, 7), (6, 8), (3, 9), (6, 10), (2, 11)],
        &[(0, 8), (2, 10), (3, 5), (4, 11), (5, 7), (7, 10)],
    ),
    g(
        "Case1",
        8,
        &[(0, 1), (1, 2), (0, 3), (1, 4), (3, 5), (3, 6), (0, 7)],
        &[(1, 3), (1, 6), (2, 4), (2, 5), (2, 6), (3, 4), (3, 7), (4, 6), (5, 6), (5, 7)],
    ),
    g(
        "Case1.5",
        9,
        &[(0, 8), (1, 3), (2, 5), (4, 7), (5, 7), (6, 8), (7, 3), (3, 8)],
        &[(0, 5), (0, 6), (1, 4), (2, 4), (2, 5), (4, 5), (5, 8)],
    ),
    g(
        "Case2",
        7,
        &[(0, 1), (0, 2), (1, 3), (1, 4), (3, 5), (1, 6)],
        &[(1, 2), (2, 3), (2, 4), (2, 5), (3, 4), (3, 6), (4, 6), (5, 6)],
    ),
    g(
        "Case2.5",
        7,
        &[(0, 1), (1, 2), (1, 3), (1, 4), (1, 5), (0, 6)],
        &[(2, 3), (2, 5), (3, 4), (4, 6), (5, 6)],
    ),
    g(
        "Case3.1",
        7,
        &[(0, 1), (1, 2), (0, 3), (1, 4), (0, 5), (3, 6)],
        &[(1, 5), (2, 3), (2, 4), (2, 5), (3, 4)],
    ),
    g(
        "Case3.2",
        14,
        &[
            (0, 1), (0, 2), (2, 3), (2, 4), (2, 5), (1, 6), (1, 7), (2, 8), (0, 9), (9, 10), (0, 11), (1, 12),
            (1, 13),
        ],
        &[(3, 5), (3, 6), (3, 10), (5, 6), (5, 9), (6, 7), (7, 11), (11, 13)],
    ),
    g("Case4", 7, &[(0, 2), (1, 4), (2, 4), (5, 4), (4, 3), (3, 6)], &[(0, 4), (1, 5), (1, 6), (5, 6)]),
    g(
        "Case5a",
        7,
        &[(0, 1), (1, 2), (1, 3), (0, 4), (1, 5), (0, 6)],
        &[(1, 4), (1, 6), (2, 4), (3, 5), (3, 6)],
    ),
    g("Case5b", 7, &[(1, 3), (4, 2), (2, 0), (5, 3), (3, 0), (0, 6)], &[(1, 4), (1, 5), (3, 6)]),
    g("Case6", 7, &[(0, 1), (0, 2), (2, 3), (0, 4), (2, 5), (0, 6)], &[(1, 4), (1, 6), (2, 6), (3, 5)]),
    g(
        "Case70a",
        15,
        &[
            (0, 1), (1, 2), (1, 3), (0, 4), (0, 5), (1, 6), (5, 7), (1, 8), (0, 9), (5, 10), (4, 11), (0, 12),
            (0, 13), (4, 14),
        ],
        &[
            (0, 6), (0, 8), (1, 4), (1, 9), (1, 10), (1, 13), (1, 14), (2, 4), (3, 4), (3, 5), (4, 8), (5, 6),
            (6, 9), (6, 12), (7, 9), (7, 10), (8, 9), (8, 12), (9, 10), (9, 13), (9, 14), (11, 12), (11, 13),
        ],
    ),
    g(
        "Case70b",
        8,
        &[(0, 1), (0, 2), (1, 3), (2, 4), (0, 5), (1, 6), (6, 7)],
        &[(2, 6), (3, 4), (3, 7), (4, 5), (4, 6)],
    ),
    g(
        "Case70c",
        12,
        &[(0, 1), (0, 2), (0, 3), (3, 4), (2, 5), (1, 6), (0, 7), (3, 8), (0, 9), (2, 10), (3, 11)],
        &[(1, 10), (5, 8), (5, 10), (6, 10), (7, 8), (9, 11)],
    ),
    g(
        "Case7.1",
        10,
        &[(0, 1), (1, 2), (2, 3), (2, 4), (2, 5), (2, 6), (1, 7), (1, 8), (0, 9)],
        &[(3, 4), (5, 6), (3, 7), (4, 7), (5, 8), (6, 8)],
    ),
    g(
        "Case7.2",
        10,
        &[(0, 1), (1, 2), (2, 3), (2, 4), (2, 5), (2, 6), (1, 7), (1, 8), (0, 9)],
        &[(3, 4), (5, 6), (3, 7), (5, 7), (4, 8), (6, 8)],
    ),
    g(
        "Case7.3",
        11,
        &[(0, 1), (1, 2), (2, 3), (2, 4), (2, 5), (2, 6), (1, 7), (1, 8), (0, 9), (1, 10)],
        &[(3, 4), (5, 6), (3, 7), (5, 7), (4, 8), (6, 10), (8, 10)],
    ),
    g(
        "Case7.4",
        12,
        &[(0, 1), (1, 2), (2, 3), (2, 4), (2, 5), (2, 6), (1, 7), (1, 8), (1, 9), (1, 10), (0, 11)],
        &[(3, 4), (5, 6), (3, 7), (5, 8), (4, 9), (6, 10)],
    ),
    g(
        "Case100",
        9,
        &[(0, 2), (5, 8), (6, 4), (7, 2), (2, 3), (3, 4), (4, 1), (1, 8)],
        &[(0, 7), (2, 6), (3, 8)],
    ),
    g(
        "Case200",
        7,
        &[(0, 1), (1, 2), (2, 3), (2, 4), (0, 5), (1, 6)],
        &[(0, 2), (2, 5), (2, 6), (3, 4), (4, 6), (5, 6)],
    ),
    g(
        "Case300",
        9,
        &[(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (4, 6), (3, 7), (4, 8)],
        &[(0, 2), (1, 6), (4, 5), (5, 6), (6, 8)],
    ),
    g(
        "Case400",
        11,
        &[(0, 1), (1, 2), (1, 3), (1, 4), (2, 5), (0, 6), (0, 7), (2, 8), (0, 9), (7, 10)],
        &[
            (0, 10), (1, 7), (1, 9), (3, 6), (3, 8), (3, 9), (3, 10), (4, 5), (5, 7), (5, 8), (6, 10), (7, 8),
        ],
    ),
    g(
        "Case500",
        9,
        &[(0, 1), (0, 2), (0, 3), (1, 4), (3, 5), (4, 6), (1, 7), (4, 8)],
        &[(1, 2), (2, 8), (3, 6), (3, 7), (4, 7), (6, 8)],
    ),
    g(
        "Case600",
        19,
        &[
            (0, 1), (1, 2), (1, 3), (1, 4), (4, 5), (2, 6), (2, 7), (1, 8), (2, 9), (4, 10), (8, 11), (3, 12),
            (1, 13), (1, 14), (0, 15), (15, 16), (13, 17), (14, 18),
        ],
        &[(0, 5), (1, 17), (4, 11), (6, 14), (7, 9), (8, 15), (9, 13), (13, 15)],
    ),
    g(
        "intertree-top",
        7,
        &[(0, 1), (1, 2), (2, 3), (2, 4), (1, 5), (0, 6)],
        &[(1, 6), (2, 5), (3, 4), (3, 5), (4, 6)],
    ),
    g(
        "intertree-vertex",
        10,
        &[(2, 0), (0, 5), (3, 6), (4, 1), (7, 1), (1, 9), (8, 6), (6, 5), (5, 9)],
        &[(0, 3), (1, 2), (1, 3), (4, 7)],
    ),
    g("solved-height2", 6, &[(0, 3), (2, 5), (4, 3), (3, 1), (1, 5)], &[(0, 4), (3, 5)]),
    g("solved-star", 5, &[(0, 4), (2, 1), (1, 3), (3, 4)], &[(2, 3)]),
    // w = 7 with children 8, 9 and leaf sibling 10 form a special
    // quadruple; the rest is the Case5a gadget, which the cases resolve.
    Gadget {
        name: "special-quadruple",
        rule: "Case5a",
        n: 11,
        edges: &[(0, 1), (1, 2), (1, 3), (0, 4), (1, 5), (0, 6), (0, 7), (7, 8), (7, 9), (0, 10)],
        requests: &[(1, 4), (1, 6), (2, 4), (3, 5), (3, 6), (8, 9), (8, 10), (9, 10), (7, 10)],
        direct: false,
    },
];

pub const GADGET_NAMES: [&str; GADGETS.len()] = {
    let mut out = [""; GADGETS.len()];
    let mut i = 0;
    while i < GADGETS.len() {
        out[i] = GADGETS[i].name;
        i += 1;
    }
    out
};

pub fn find(name: &str) -> Option<&'static Gadget> {
    GADGETS.iter().find(|g| g.name == name)
}

pub fn gadget(name: &str) -> Option<Instance> {
    find(name).map(Gadget::instance)
}
