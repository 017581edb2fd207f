//! Brute-force reference solvers and seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::auxgraph::Graph;
use crate::model::{build_instance, CutSet, Demands, Instance, InstanceError, Mode, VertexId};

pub use crate::gadgets::{gadget, GADGET_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} items exceed the brute-force limit of {1}")]
    TooLarge(usize, usize),
    #[error("bad generator spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

pub const MAX_BRUTE_EDGES: usize = 20;
pub const MAX_BRUTE_VC: usize = 20;

/// Bitmask of the edges on each request's tree path.
fn request_masks(instance: &Instance) -> Vec<u32> {
    let n = instance.n();
    let mut adj = vec![Vec::new(); n];
    for (id, &(a, b)) in instance.edges().iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    // Mask of edges from vertex 0 to every vertex; path mask is the xor.
    let mut to_root = vec![0u32; n];
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(u, id) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                to_root[u] = to_root[v] | (1 << id);
                stack.push(u);
            }
        }
    }
    instance.requests().iter().map(|&(a, b)| to_root[a] ^ to_root[b]).collect()
}

fn separates(masks: &[u32], subset: u32) -> bool {
    masks.iter().all(|&m| m & subset != 0)
}

/// Visits the `size`-subsets of `0..m` in lexicographic order until `f`
/// returns true.
fn for_each_subset(m: usize, size: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if size > m {
        return false;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == m - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum cut by exhaustive enumeration: subsets by size, then
/// lexicographically; in the weighted case the first cheapest one wins.
pub fn brute_force_min_cut(instance: &Instance) -> Result<(u64, CutSet), OracleError> {
    let m = instance.edges().len();
    if m > MAX_BRUTE_EDGES {
        return Err(OracleError::TooLarge(m, MAX_BRUTE_EDGES));
    }
    let masks = request_masks(instance);
    let weighted = instance.costs().is_some();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for size in 0..=m {
        let found = for_each_subset(m, size, |idx| {
            let subset = idx.iter().fold(0u32, |acc, &i| acc | (1 << i));
            if separates(&masks, subset) {
                let cost: u64 = idx.iter().map(|&i| instance.cost(i)).sum();
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, idx.to_vec()));
                }
                !weighted
            } else {
                false
            }
        });
        if found {
            break;
        }
    }
    let (cost, idx) = best.expect("cutting every edge always separates");
    Ok((cost, idx.into_iter().collect()))
}

/// Minimum vertex cover size by subset enumeration.
pub fn brute_force_vc(graph: &Graph) -> Result<usize, OracleError> {
    let nodes: Vec<VertexId> = graph.nodes().collect();
    if nodes.len() > MAX_BRUTE_VC {
        return Err(OracleError::TooLarge(nodes.len(), MAX_BRUTE_VC));
    }
    let pos = |v: VertexId| nodes.iter().position(|&x| x == v).unwrap();
    let edges: Vec<u32> = graph.edges().iter().map(|&(a, b)| (1 << pos(a)) | (1 << pos(b))).collect();
    let mut best = nodes.len();
    for mask in 0u32..(1u32 << nodes.len()) {
        let size = mask.count_ones() as usize;
        if size < best && edges.iter().all(|&e| e & mask != 0) {
            best = size;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeShape {
    RandomTree,
    Star,
    Caterpillar,
    Gadget(String),
}

/// Parameters of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    /// Number of edges.
    pub edges: usize,
    pub requests: usize,
    pub shape: TreeShape,
    pub mode: Mode,
    /// Number of terminal sets (terminal-set modes).
    pub q: usize,
    /// Edge costs are drawn from `0..=max_cost` (weighted mode).
    pub max_cost: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            seed: 0,
            edges: 8,
            requests: 4,
            shape: TreeShape::RandomTree,
            mode: Mode::Mct,
            q: 2,
            max_cost: 100,
        }
    }
}

/// Uniform random labelled tree on `n` vertices via a Prüfer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    if n <= 1 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn shaped_tree<R: Rng>(spec: &GenSpec, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    let n = spec.edges + 1;
    match spec.shape {
        TreeShape::Star => (1..n).map(|v| (0, v)).collect(),
        TreeShape::Caterpillar => {
            // Spine of about a third of the vertices, the rest hang off it.
            let spine = (n / 3).max(1);
            let mut edges: Vec<(usize, usize)> = (1..spine).map(|v| (v - 1, v)).collect();
            for v in spine..n {
                edges.push((rng.gen_range(0..spine), v));
            }
            edges
        }
        _ => random_tree(n, rng),
    }
}

fn sample_pairs<R: Rng>(n: usize, count: usize, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    let mut all: Vec<(usize, usize)> = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for a in 0..n {
        for b in a + 1..n {
            all.push((a, b));
        }
    }
    all.shuffle(rng);
    all.truncate(count);
    all.sort_unstable();
    all
}

/// Deterministic instance for a spec.
pub fn generate(spec: &GenSpec) -> Result<Instance, OracleError> {
    if let TreeShape::Gadget(name) = &spec.shape {
        return gadget(name).ok_or_else(|| OracleError::BadSpec(format!("unknown gadget `{name}`")));
    }
    if spec.edges == 0 && spec.requests > 0 {
        return Err(OracleError::BadSpec("requests need at least one edge".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = shaped_tree(spec, &mut rng);
    let n = spec.edges + 1;
    match spec.mode {
        Mode::Mct => {
            let reqs = sample_pairs(n, spec.requests, &mut rng);
            Ok(build_instance(n, edges, None, Demands::Requests(reqs), None)?)
        }
        Mode::Gmwct | Mode::Wgmwct => {
            if spec.q == 0 {
                return Err(OracleError::BadSpec("q must be at least 1".into()));
            }
            let mut sets = Vec::with_capacity(spec.q);
            for _ in 0..spec.q {
                let size = rng.gen_range(2..=4.min(n).max(2)).min(n);
                let mut verts: Vec<usize> = (0..n).collect();
                verts.shuffle(&mut rng);
                verts.truncate(size);
                verts.sort_unstable();
                sets.push(verts);
            }
            let costs = (spec.mode == Mode::Wgmwct)
                .then(|| (0..edges.len()).map(|_| rng.gen_range(0..=spec.max_cost)).collect());
            Ok(build_instance(n, edges, costs, Demands::TerminalSets(sets), None)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mct(n: usize, edges: Vec<(usize, usize)>, reqs: Vec<(usize, usize)>) -> Instance {
        Instance::new(n, edges, Demands::Requests(reqs), None).unwrap()
    }

    #[test]
    fn subsets_in_lex_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| {
            seen.push(s.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        for_each_subset(3, 0, |_| {
            count += 1;
            false
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn oracle_examples() {
        let unit = mct(2, vec![(0, 1)], vec![(0, 1)]);
        assert_eq!(brute_force_min_cut(&unit).unwrap(), (1, [0].into_iter().collect()));
        let star = mct(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2), (2, 3), (1, 3)]);
        assert_eq!(brute_force_min_cut(&star).unwrap(), (2, [0, 1].into_iter().collect()));
        let empty = mct(3, vec![(0, 1), (1, 2)], vec![]);
        assert_eq!(brute_force_min_cut(&empty).unwrap(), (0, CutSet::new()));
    }

    #[test]
    fn weighted_oracle_prefers_cheap_edge() {
        let inst = build_instance(
            3,
            vec![(0, 1), (1, 2)],
            Some(vec![2, 7]),
            Demands::TerminalSets(vec![vec![0, 2]]),
            None,
        )
        .unwrap();
        assert_eq!(brute_force_min_cut(&inst).unwrap(), (2, [0].into_iter().collect()));
    }

    #[test]
    fn vc_oracle() {
        assert_eq!(brute_force_vc(&Graph::from_edges([0, 1], [(0, 1)])).unwrap(), 1);
        let c5 = Graph::from_edges(0..5, (0..5).map(|i| (i, (i + 1) % 5)));
        assert_eq!(brute_force_vc(&c5).unwrap(), 3);
        assert_eq!(brute_force_vc(&Graph::new()).unwrap(), 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GenSpec { seed: 7, edges: 10, requests: 6, ..GenSpec::default() };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let star = GenSpec { shape: TreeShape::Star, edges: 5, requests: 4, ..GenSpec::default() };
        let inst = generate(&star).unwrap();
        assert_eq!(inst.n(), 6);
        assert_eq!(inst.requests().len(), 4);
        assert!(inst.edges().iter().all(|&(a, _)| a == 0));
    }

    #[test]
    fn prufer_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..30 {
            let edges = random_tree(n, &mut rng);
            assert!(build_instance(n, edges, None, Demands::Requests(vec![]), None).is_ok());
        }
    }
}
