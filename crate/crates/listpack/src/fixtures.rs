//! Bundled instances and seeded random generators.
//!
//! Three fixed instances ship with the crate: a ten-vertex width-3
//! caterpillar cover with one cyclically shifted matching, a 2-fold cover
//! of the cube whose cover graph has no independent set larger than five,
//! and a 45-vertex benchmark graph whose fractional chromatic number lies
//! just above 4. The random generators produce valid inputs for the
//! packing builders from a seeded stream, so stress runs are reproducible.

use crate::budget;
use crate::cover::CorrespondenceCover;
use crate::decomp::{CaterpillarDecomposition, EliminationForest};
use crate::graph::{Graph, LayerPartition, Vertex};
use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

/// Ceiling for the chordless-cycle sweep, which enumerates vertex subsets.
pub const ODD_CROSSING_VERTEX_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("crossing search accepts at most {limit} vertices, got {got}")]
    TooLarge { got: usize, limit: usize },
    #[error("enumeration budget of {0} exceeded")]
    Budget(u64),
}

/// The ten-vertex caterpillar instance: a maximal width-3 caterpillar with
/// pendant vertex 10, carrying a 4-fold cover whose matchings are the
/// identity everywhere except on edge (2, 4), where colour x is matched
/// with x mod 4 + 1.
pub fn shifted_caterpillar_cover() -> (CorrespondenceCover, CaterpillarDecomposition) {
    let d = CaterpillarDecomposition {
        p: 3,
        active_sets: vec![
            vec![1, 2, 3, 4],
            vec![2, 3, 5, 4],
            vec![3, 5, 4, 6],
            vec![5, 4, 6, 7],
            vec![10, 4, 6, 7],
            vec![4, 6, 7, 8],
            vec![6, 7, 8, 9],
        ],
    };
    let g = d.caterpillar_graph(10);
    let mut c = CorrespondenceCover::identity(g, 4);
    let shift: Vec<(usize, usize)> = (1..=4).map(|x| (x, x % 4 + 1)).collect();
    c.matchings.insert((2, 4), shift);
    (c, d)
}

/// The 3-dimensional cube: 4-cycles 1-2-3-4 and 5-6-7-8 joined by the four
/// parallel edges between i and i + 4.
pub fn cube_graph() -> Graph {
    Graph::new(
        8,
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (1, 4),
            (5, 6),
            (6, 7),
            (7, 8),
            (5, 8),
            (1, 5),
            (2, 6),
            (3, 7),
            (4, 8),
        ],
    )
    .expect("cube edges are valid")
}

/// All chordless cycles of `g`, one subset mask per cycle. A subset spans a
/// chordless cycle exactly when its induced subgraph is connected and
/// 2-regular, so a sweep over all subsets finds every one of them.
fn chordless_cycle_masks(g: &Graph) -> Vec<u32> {
    let n = g.vertex_count();
    let adj: Vec<u32> = (1..=n)
        .map(|v| {
            g.neighbours(v)
                .iter()
                .fold(0u32, |m, &w| m | 1 << (w - 1))
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if (mask.count_ones() as usize) < 3 {
            continue;
        }
        let mut two_regular = true;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            if (adj[v] & mask).count_ones() != 2 {
                two_regular = false;
                break;
            }
            m &= m - 1;
        }
        if !two_regular {
            continue;
        }
        let mut seen = 1u32 << mask.trailing_zeros();
        loop {
            let mut next = seen;
            let mut mm = seen;
            while mm != 0 {
                let v = mm.trailing_zeros() as usize;
                next |= adj[v] & mask;
                mm &= mm - 1;
            }
            if next == seen {
                break;
            }
            seen = next;
        }
        if seen == mask {
            out.push(mask);
        }
    }
    out
}

/// Searches for a matching of exactly `size` edges meeting every chordless
/// cycle of `g` in an odd number of edges, scanning candidate edge subsets
/// in lexicographic order over the sorted edge list so that the result is
/// deterministic. Returns `None` when no such matching exists.
///
/// Chordless cycles are enumerated exhaustively by a subset sweep rather
/// than through a cycle basis; odd intersection with a fixed edge set is
/// not implied by oddness on basis elements, since parities add under
/// symmetric difference. Demanding odd parity on every simple cycle
/// instead would be unsatisfiable here: two odd cycles whose symmetric
/// difference is again a cycle force that third cycle even, and on the
/// cube the four-faces requirement does exactly that to the six-cycles
/// with chords. The chordless family is the one the crossing-matching
/// construction needs.
pub fn find_odd_crossing_matching(
    g: &Graph,
    size: usize,
) -> Result<Option<Vec<(Vertex, Vertex)>>, FixtureError> {
    let n = g.vertex_count();
    if n > ODD_CROSSING_VERTEX_LIMIT {
        return Err(FixtureError::TooLarge {
            got: n,
            limit: ODD_CROSSING_VERTEX_LIMIT,
        });
    }
    let cycles = chordless_cycle_masks(g);
    let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    let edge_masks: Vec<u32> = edges
        .iter()
        .map(|&(u, v)| (1u32 << (u - 1)) | (1u32 << (v - 1)))
        .collect();
    let limit = budget::budget();
    let mut tried = 0u64;
    for combo in (0..edges.len()).combinations(size) {
        tried += 1;
        if tried > limit {
            return Err(FixtureError::Budget(limit));
        }
        let union: u32 = combo.iter().fold(0, |m, &i| m | edge_masks[i]);
        if union.count_ones() as usize != 2 * size {
            continue;
        }
        let odd_everywhere = cycles.iter().all(|&c| {
            combo
                .iter()
                .filter(|&&i| edge_masks[i] & c == edge_masks[i])
                .count()
                % 2
                == 1
        });
        if odd_everywhere {
            return Ok(Some(combo.into_iter().map(|i| edges[i]).collect()));
        }
    }
    Ok(None)
}

/// 2-fold cover of the cube: identity matchings everywhere except crossing
/// matchings on a triple of special edges that meets every chordless cycle
/// an odd number of times. Around any face a transversal would have to
/// switch lists an even number of times, which the odd crossing count
/// forbids, so independent sets in the cover graph stay small.
pub fn build_q3_cover() -> CorrespondenceCover {
    let g = cube_graph();
    let special = find_odd_crossing_matching(&g, 3)
        .expect("subset sweep on 8 vertices fits any budget")
        .expect("the cube admits a crossing triple");
    let mut c = CorrespondenceCover::identity(g, 2);
    for e in special {
        c.matchings.insert(e, vec![(1, 2), (2, 1)]);
    }
    c
}

/// q-fold cover of the triangle with identity matchings on edges (1, 2)
/// and (1, 3) and the cyclic shift x to x mod q + 1 on edge (2, 3).
pub fn shifted_triangle_cover(q: usize) -> CorrespondenceCover {
    let mut c = CorrespondenceCover::identity(Graph::complete(3), q);
    let shift: Vec<(usize, usize)> = (1..=q).map(|x| (x, x % q + 1)).collect();
    c.matchings.insert((2, 3), shift);
    c
}

/// Adjacency rows of the 45-vertex benchmark graph. Rows list mostly
/// higher-numbered endpoints; the builder symmetrises and deduplicates.
/// The graph is the flattening of a list system: inside each group of
/// [`build_appendix_b`]'s partition the vertices form a clique, and the
/// edges between two groups always form a partial matching.
const BENCH45_ADJ: &[(Vertex, &[Vertex])] = &[
    (1, &[2, 3, 4, 6, 9, 13, 23, 29, 32, 35, 43]),
    (2, &[3, 4, 7, 10, 14, 17, 24, 30, 33, 37]),
    (3, &[4, 5, 11, 15, 18, 38, 44]),
    (4, &[8, 12, 16, 19, 25, 31, 34, 36, 39, 45]),
    (5, &[3, 6, 7, 8, 9, 13, 20, 24, 30, 33, 37, 44]),
    (6, &[7, 8, 10, 14, 23, 26, 29, 32, 38, 40]),
    (7, &[8, 11, 15, 21, 27, 41, 43]),
    (8, &[12, 16, 22, 25, 28, 31, 34, 39, 42, 45]),
    (9, &[10, 11, 12, 13, 17, 26, 37, 41, 44]),
    (10, &[11, 12, 14, 20, 30, 35, 43]),
    (11, &[12, 15, 18, 21, 27, 29, 38, 40]),
    (12, &[16, 19, 22, 28, 31, 36, 39, 42, 45]),
    (13, &[14, 15, 16, 17, 24, 26, 41]),
    (14, &[15, 16, 20, 27, 33, 40]),
    (15, &[16, 18, 21, 23, 32, 35]),
    (16, &[19, 22, 25, 28, 34, 36, 42]),
    (17, &[18, 19]),
    (18, &[19]),
    (20, &[21, 22]),
    (21, &[22]),
    (23, &[24, 25]),
    (24, &[25]),
    (26, &[27, 28]),
    (27, &[28]),
    (29, &[30, 31]),
    (30, &[31]),
    (32, &[33, 34]),
    (33, &[34]),
    (35, &[36]),
    (37, &[38, 39]),
    (38, &[39]),
    (40, &[41, 42]),
    (41, &[42]),
    (43, &[44, 45]),
    (44, &[45]),
];

/// The bundled 45-vertex benchmark graph together with its list groups.
/// The groups record which vertices arose from a common list; they are
/// metadata only, since the fractional chromatic number is a property of
/// the graph alone.
pub fn build_appendix_b() -> (Graph, Vec<Vec<Vertex>>) {
    let mut pairs: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for &(v, nbrs) in BENCH45_ADJ {
        for &w in nbrs {
            pairs.insert(if v < w { (v, w) } else { (w, v) });
        }
    }
    let edges: Vec<(Vertex, Vertex)> = pairs.into_iter().collect();
    let g = Graph::new(45, &edges).expect("adjacency rows are valid");
    let groups: Vec<Vec<Vertex>> = vec![
        vec![1, 2, 3, 4],
        vec![5, 6, 7, 8],
        vec![9, 10, 11, 12],
        vec![13, 14, 15, 16],
        vec![17, 18, 19],
        vec![20, 21, 22],
        vec![23, 24, 25],
        vec![26, 27, 28],
        vec![29, 30, 31],
        vec![32, 33, 34],
        vec![35, 36],
        vec![37, 38, 39],
        vec![40, 41, 42],
        vec![43, 44, 45],
    ];
    (g, groups)
}

/// Deterministic generator stream for a seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph where vertex i > 1 attaches to min(d, i - 1) distinct
/// earlier vertices, so the identity order certifies degeneracy at most d.
pub fn random_degenerate_graph<R: Rng>(n: usize, d: usize, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 2..=n {
        let take = d.min(i - 1);
        for p in rand::seq::index::sample(rng, i - 1, take) {
            edges.push((p + 1, i));
        }
    }
    Graph::new(n, &edges).expect("generated edges are valid")
}

/// Cover with the given list sizes and an independently random partial
/// matching on every edge.
pub fn random_cover<R: Rng>(g: &Graph, sizes: &[usize], rng: &mut R) -> CorrespondenceCover {
    let mut c = CorrespondenceCover::unmatched(g.clone(), sizes.to_vec());
    for (u, v) in g.edges() {
        let su = sizes[u - 1];
        let sv = sizes[v - 1];
        let mut left: Vec<usize> = (1..=su).collect();
        let mut right: Vec<usize> = (1..=sv).collect();
        left.shuffle(rng);
        right.shuffle(rng);
        let m = rng.random_range(0..=su.min(sv));
        let mut pairs: Vec<(usize, usize)> = left[..m]
            .iter()
            .copied()
            .zip(right[..m].iter().copied())
            .collect();
        pairs.sort_unstable();
        if !pairs.is_empty() {
            c.matchings.insert((u, v), pairs);
        }
    }
    c
}

/// Uniform k-fold variant of [`random_cover`].
pub fn random_uniform_cover<R: Rng>(g: &Graph, k: usize, rng: &mut R) -> CorrespondenceCover {
    random_cover(g, &vec![k; g.vertex_count()], rng)
}

/// Uniform k-fold cover where every edge carries a full matching, drawn as
/// an independent random permutation of the colours.
pub fn random_permutation_cover<R: Rng>(
    g: &Graph,
    k: usize,
    rng: &mut R,
) -> CorrespondenceCover {
    let mut c = CorrespondenceCover::unmatched(g.clone(), vec![k; g.vertex_count()]);
    for (u, v) in g.edges() {
        let mut right: Vec<usize> = (1..=k).collect();
        right.shuffle(rng);
        let pairs: Vec<(usize, usize)> = (1..=k).zip(right).collect();
        if !pairs.is_empty() {
            c.matchings.insert((u, v), pairs);
        }
    }
    c
}

/// Caterpillar decomposition of width p with `extensions` extra active
/// sets, dropping a uniformly random member at each step. Vertices are
/// numbered in order of first appearance.
pub fn random_caterpillar<R: Rng>(
    p: usize,
    extensions: usize,
    rng: &mut R,
) -> CaterpillarDecomposition {
    let mut sets: Vec<Vec<Vertex>> = vec![(1..=p + 1).collect()];
    for j in 0..extensions {
        let cur = sets.last().unwrap().clone();
        let drop = rng.random_range(0..cur.len());
        let mut next: Vec<Vertex> = cur
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, v)| v)
            .collect();
        next.push(p + 2 + j);
        sets.push(next);
    }
    CaterpillarDecomposition {
        p,
        active_sets: sets,
    }
}

/// Elimination forest on n vertices: vertex 1 is a root, every later
/// vertex is a root with probability 1/4 and otherwise a child of a random
/// earlier vertex.
pub fn random_forest<R: Rng>(n: usize, rng: &mut R) -> EliminationForest {
    let mut parent: Vec<Option<Vertex>> = Vec::with_capacity(n);
    for i in 1..=n {
        if i == 1 || rng.random_range(0..4) == 0 {
            parent.push(None);
        } else {
            parent.push(Some(rng.random_range(1..i)));
        }
    }
    EliminationForest::new(parent)
}

/// Graph compatible with the forest: every parent edge is present and each
/// deeper ancestor pair becomes an edge with probability 1/2.
pub fn random_ancestor_graph<R: Rng>(f: &EliminationForest, rng: &mut R) -> Graph {
    let n = f.vertex_count();
    let mut edges = Vec::new();
    for v in 1..=n {
        let mut anc = f.parent[v - 1];
        let mut first = true;
        while let Some(a) = anc {
            if first || rng.random_range(0..2) == 0 {
                edges.push((a.min(v), a.max(v)));
            }
            first = false;
            anc = f.parent[a - 1];
        }
    }
    Graph::new(n, &edges).expect("ancestor edges are valid")
}

/// Layered instance: consecutive layers of size at most 3, sparse random
/// edges inside each layer, and for each vertex past the first layer at
/// most one random neighbour in an earlier layer.
pub fn random_layered_instance<R: Rng>(n: usize, rng: &mut R) -> (Graph, LayerPartition) {
    let mut layers: Vec<Vec<Vertex>> = Vec::new();
    let mut next = 1;
    while next <= n {
        let size = rng.random_range(1..=3.min(n - next + 1));
        layers.push((next..next + size).collect());
        next += size;
    }
    let mut edges = Vec::new();
    for (j, layer) in layers.iter().enumerate() {
        for (x, &a) in layer.iter().enumerate() {
            for &b in &layer[x + 1..] {
                if rng.random_range(0..4) == 0 {
                    edges.push((a, b));
                }
            }
        }
        if j > 0 {
            let earlier: Vec<Vertex> = layers[..j].iter().flatten().copied().collect();
            for &a in layer {
                if rng.random_range(0..4) < 3 {
                    let b = *earlier.choose(rng).unwrap();
                    edges.push((b, a));
                }
            }
        }
    }
    let g = Graph::new(n, &edges).expect("layer edges are valid");
    (g, LayerPartition::new(layers))
}
