//! Weighted flexibility along a degeneracy order: a packing distribution
//! in which every colour of every vertex keeps probability at least an
//! explicit per-vertex floor.
//!
//! The recursion peels the last vertex of the order, picks its colour
//! uniformly, deletes the matched partner of that colour at each earlier
//! neighbour, and recurses on the shrunk cover with matchings re-extended
//! to maximum. For a vertex with `f` neighbours later in the order and a
//! current list of `l` colours, the mixture keeps every colour probability
//! at least `2^-f / (l - f)`; with exact lists `l = f + 2` that floor is
//! `2^-(f+1)`, and on a `(d+2)`-fold cover of a `d`-degenerate graph it
//! stays above `2^-(d+1)`.

use crate::compose::ComposeError;
use crate::cover::{
    delete_colours, maximize_matchings, restrict_cover, Colouring, CorrespondenceCover,
};
use crate::graph::{degeneracy_order, Vertex, VertexOrder};
use crate::packing::{validate_packing, EpsilonProfile, PackingDistribution, PackingTarget};
use crate::{rat, Rat};
use std::collections::{BTreeMap, BTreeSet};

/// `2^-(f+1)` per vertex for forward degrees `f` of the order.
pub fn forward_epsilon_profile(order: &VertexOrder) -> EpsilonProfile {
    (1..=order.order.len())
        .map(|v| rat(1, 1i64 << (order.forward_degree(v) + 1)))
        .collect()
}

/// The floor the interleaved recursion actually guarantees:
/// `2^-f / (l - f)` at a vertex with forward degree `f` and list size `l`.
pub fn interleaved_epsilon_profile(c: &CorrespondenceCover, order: &VertexOrder) -> EpsilonProfile {
    (1..=order.order.len())
        .map(|v| {
            let f = order.forward_degree(v);
            rat(1, (1i64 << f) * (c.list_size(v) as i64 - f as i64))
        })
        .collect()
}

fn check_order(c: &CorrespondenceCover, order: &VertexOrder) -> Result<(), ComposeError> {
    let n = c.base.vertex_count();
    if order.order.len() != n {
        return Err(ComposeError::Precondition(format!(
            "order lists {} vertices, cover has {}",
            order.order.len(),
            n
        )));
    }
    let seen: BTreeSet<Vertex> = order.order.iter().copied().collect();
    if seen.len() != n || seen.iter().any(|&v| v < 1 || v > n) {
        return Err(ComposeError::Precondition(
            "order is not a permutation of the vertex set".into(),
        ));
    }
    Ok(())
}

/// Renames vertices so that position `i` of the order becomes vertex `i`.
fn permute_cover(c: &CorrespondenceCover, order: &[Vertex]) -> CorrespondenceCover {
    let n = c.base.vertex_count();
    let mut pos = vec![0usize; n + 1];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i + 1;
    }
    let edges: Vec<(Vertex, Vertex)> = c
        .base
        .edges()
        .map(|(u, v)| {
            let (a, b) = (pos[u], pos[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    let base = crate::graph::Graph::new(n, &edges).expect("permutation preserves the graph");
    let mut list_sizes = vec![0usize; n];
    for v in 1..=n {
        list_sizes[pos[v] - 1] = c.list_sizes[v - 1];
    }
    let mut matchings = BTreeMap::new();
    for (&(u, v), pairs) in &c.matchings {
        let (a, b) = (pos[u], pos[v]);
        if a < b {
            matchings.insert((a, b), pairs.clone());
        } else {
            matchings.insert((b, a), pairs.iter().map(|&(x, y)| (y, x)).collect());
        }
    }
    let values = c.values.as_ref().map(|vals| {
        let mut out = vec![Vec::new(); n];
        for v in 1..=n {
            out[pos[v] - 1] = vals[v - 1].clone();
        }
        out
    });
    CorrespondenceCover {
        base,
        list_sizes,
        matchings,
        values,
    }
}

type Memo = BTreeMap<(usize, Vec<Vec<usize>>), PackingDistribution>;

/// Distribution over the first `k` order positions, colours in the
/// original index space of `base`. `removed[v - 1]` holds colours already
/// deleted at position-`v` vertices.
fn peel(
    base: &CorrespondenceCover,
    k: usize,
    removed: &[BTreeSet<usize>],
    memo: &mut Memo,
) -> Result<PackingDistribution, ComposeError> {
    let key = (
        k,
        removed[..k]
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect::<Vec<Vec<usize>>>(),
    );
    if let Some(d) = memo.get(&key) {
        return Ok(d.clone());
    }
    let prefix: BTreeSet<Vertex> = (1..=k).collect();
    let (prefix_cover, _) = restrict_cover(base, &prefix);
    let removals: BTreeSet<(Vertex, usize)> = removed[..k]
        .iter()
        .enumerate()
        .flat_map(|(vi, set)| set.iter().map(move |&i| (vi + 1, i)))
        .collect();
    let (cur, maps) = delete_colours(&prefix_cover, &removals)?;
    let cur = maximize_matchings(&cur);
    let s = cur.list_size(k);
    let share = rat(1, s as i64);
    let mut entries: Vec<(Colouring, Rat)> = Vec::new();
    for x in 1..=s {
        let x_orig = maps[k - 1][x - 1];
        if k == 1 {
            entries.push((vec![x_orig], share.clone()));
            continue;
        }
        let mut next_removed = removed.to_vec();
        for &u in cur.base.neighbours(k) {
            if let Some(partner) = cur.matched_partner(k, x, u) {
                next_removed[u - 1].insert(maps[u - 1][partner - 1]);
            }
        }
        let sub = peel(base, k - 1, &next_removed, memo)?;
        for (col, w) in sub.support() {
            let mut full = col.clone();
            full.push(x_orig);
            entries.push((full, &share * w));
        }
    }
    let d = PackingDistribution::new(entries)?;
    memo.insert(key, d.clone());
    Ok(d)
}

fn run_recursion(
    c: &CorrespondenceCover,
    order: &VertexOrder,
) -> Result<PackingDistribution, ComposeError> {
    let n = c.base.vertex_count();
    if n == 0 {
        return Ok(PackingDistribution::singleton(Vec::new()));
    }
    for v in 1..=n {
        let f = order.forward_degree(v);
        if c.list_size(v) < f + 2 {
            return Err(ComposeError::Precondition(format!(
                "vertex {} has {} colours but forward degree {}",
                v,
                c.list_size(v),
                f
            )));
        }
    }
    let completed = maximize_matchings(c);
    let permuted = permute_cover(&completed, &order.order);
    let removed = vec![BTreeSet::new(); n];
    let mut memo = Memo::new();
    let d = peel(&permuted, n, &removed, &mut memo)?;
    // Undo the positional renaming.
    let mut pos = vec![0usize; n + 1];
    for (i, &v) in order.order.iter().enumerate() {
        pos[v] = i + 1;
    }
    let out = d.map_colourings(|col| (1..=n).map(|v| col[pos[v] - 1]).collect());
    let eps = interleaved_epsilon_profile(c, order);
    let report = validate_packing(c, &out, &PackingTarget::Epsilon(eps));
    if !report.is_valid() {
        return Err(ComposeError::Postcondition(report.violations.join("; ")));
    }
    Ok(out)
}

/// Flexibility on the exact profile `|L(v)| = forward_degree(v) + 2`: the
/// last vertex's colour is uniform over its 2-list, and every colour of
/// every vertex keeps probability at least `2^-(f+1)` for its forward
/// degree `f`.
pub fn degenerate_flexible_distribution(
    c: &CorrespondenceCover,
    order: &VertexOrder,
) -> Result<PackingDistribution, ComposeError> {
    check_order(c, order)?;
    for v in 1..=c.base.vertex_count() {
        if c.list_size(v) != order.forward_degree(v) + 2 {
            return Err(ComposeError::Precondition(format!(
                "vertex {} has {} colours, the profile wants {}",
                v,
                c.list_size(v),
                order.forward_degree(v) + 2
            )));
        }
    }
    let d = run_recursion(c, order)?;
    let eps = forward_epsilon_profile(order);
    let report = validate_packing(c, &d, &PackingTarget::Epsilon(eps));
    if !report.is_valid() {
        return Err(ComposeError::Postcondition(report.violations.join("; ")));
    }
    debug_assert_eq!(three_case_report(c, order, &d), Vec::<String>::new());
    Ok(d)
}

/// Per-case floors behind the exact-profile guarantee, checked against a
/// distribution: writing `vn` for the last vertex of the order and `f` for
/// forward degrees, a colour `y` at `u != vn` satisfies
/// `P(y) >= 2^-(f+1)` when `u` is not adjacent to `vn`,
/// `P(y) >= 2^-f` when `u` is adjacent and `y` is unmatched toward `vn`
/// (in the maximum-matching completion), and `P(y) >= 2^-(f+1)` when
/// matched. At `vn` itself every colour has probability exactly `1/2`.
pub fn three_case_report(
    c: &CorrespondenceCover,
    order: &VertexOrder,
    d: &PackingDistribution,
) -> Vec<String> {
    let n = c.base.vertex_count();
    let mut violations = Vec::new();
    if n == 0 {
        return violations;
    }
    let completed = maximize_matchings(c);
    let vn = *order.order.last().expect("nonempty order");
    let probs = d.probabilities(&c.list_sizes);
    for i in 1..=c.list_size(vn) {
        if probs[vn - 1][i - 1] != rat(1, 2) {
            violations.push(format!(
                "colour ({}, {}) at the last vertex has probability {}",
                vn,
                i,
                probs[vn - 1][i - 1]
            ));
        }
    }
    for v in 1..=n {
        if v == vn {
            continue;
        }
        let f = order.forward_degree(v) as i64;
        let adjacent = c.base.has_edge(v, vn);
        for i in 1..=c.list_size(v) {
            let floor = if !adjacent {
                rat(1, 1 << (f + 1))
            } else if completed.matched_partner(v, i, vn).is_some() {
                rat(1, 1 << (f + 1))
            } else {
                rat(1, 1 << f)
            };
            if probs[v - 1][i - 1] < floor {
                violations.push(format!(
                    "colour ({}, {}) has probability {} below case floor {}",
                    v,
                    i,
                    probs[v - 1][i - 1],
                    floor
                ));
            }
        }
    }
    violations
}

/// Flexibility for a `d`-degenerate base with a uniform `(d+2)`-fold
/// cover: every colour probability is at least `2^-(d+1)`. Runs the
/// interleaved recursion directly on the full lists; its per-vertex floor
/// `2^-f / (d + 2 - f)` with `f <= d` dominates `2^-(d+1)`.
pub fn flexible_for_degeneracy(
    c: &CorrespondenceCover,
    d: usize,
) -> Result<PackingDistribution, ComposeError> {
    let n = c.base.vertex_count();
    for v in 1..=n {
        if c.list_size(v) != d + 2 {
            return Err(ComposeError::Precondition(format!(
                "vertex {} has {} colours, expected the uniform {}",
                v,
                c.list_size(v),
                d + 2
            )));
        }
    }
    let order = degeneracy_order(&c.base);
    if n > 0 && order.width() > d {
        return Err(ComposeError::Precondition(format!(
            "graph has degeneracy {}, not {}",
            order.width(),
            d
        )));
    }
    let dist = run_recursion(c, &order)?;
    let eps: EpsilonProfile = vec![rat(1, 1i64 << (d + 1)); n];
    let report = validate_packing(c, &dist, &PackingTarget::Epsilon(eps));
    if !report.is_valid() {
        return Err(ComposeError::Postcondition(report.violations.join("; ")));
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use crate::graph::{cartesian_product, Graph};
    use crate::packing::enumerate_transversals;
    use num::One;

    #[test]
    fn single_vertex_two_list() {
        let c = CorrespondenceCover::unmatched(Graph::empty(1), vec![2]);
        let order = VertexOrder::new(&c.base, vec![1]);
        let d = degenerate_flexible_distribution(&c, &order).unwrap();
        assert_eq!(d.probability(1, 1), rat(1, 2));
        assert_eq!(d.probability(1, 2), rat(1, 2));
    }

    #[test]
    fn edge_with_profile_three_two() {
        let mut c = CorrespondenceCover::unmatched(Graph::complete(2), vec![3, 2]);
        c.matchings.insert((1, 2), vec![(1, 1), (2, 2)]);
        let order = VertexOrder::new(&c.base, vec![1, 2]);
        let d = degenerate_flexible_distribution(&c, &order).unwrap();
        for i in 1..=2 {
            assert_eq!(d.probability(2, i), rat(1, 2));
        }
        let probs: Vec<Rat> = (1..=3).map(|i| d.probability(1, i)).collect();
        for p in &probs {
            assert!(*p >= rat(1, 4));
            assert!(*p == rat(1, 4) || *p == rat(1, 2));
        }
        let total: Rat = probs.iter().fold(Rat::zero(), |a, p| a + p);
        assert!(total.is_one());
    }

    fn lcg(seed: u64) -> impl FnMut() -> usize {
        let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        }
    }

    /// Random graph in which vertex `i` attaches to `min(d, i - 1)` random
    /// earlier vertices. The identity order has forward degrees toward
    /// larger ids, so the reversed id order is a degeneracy order.
    fn random_degenerate(n: usize, d: usize, next: &mut impl FnMut() -> usize) -> Graph {
        let mut edges = Vec::new();
        for v in 2..=n {
            let mut pool: Vec<usize> = (1..v).collect();
            for _ in 0..d.min(v - 1) {
                let u = pool.remove(next() % pool.len());
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    fn random_exact_profile_cover(
        g: &Graph,
        order: &VertexOrder,
        next: &mut impl FnMut() -> usize,
    ) -> CorrespondenceCover {
        let sizes: Vec<usize> = (1..=g.vertex_count())
            .map(|v| order.forward_degree(v) + 2)
            .collect();
        let mut c = CorrespondenceCover::unmatched(g.clone(), sizes);
        for (u, v) in g.edges() {
            let k = c.list_size(u).min(c.list_size(v));
            let m = next() % (k + 1);
            let mut left: Vec<usize> = (1..=c.list_size(u)).collect();
            let mut right: Vec<usize> = (1..=c.list_size(v)).collect();
            let mut pairs = Vec::new();
            for _ in 0..m {
                let a = left.remove(next() % left.len());
                let b = right.remove(next() % right.len());
                pairs.push((a, b));
            }
            if !pairs.is_empty() {
                c.matchings.insert((u, v), pairs);
            }
        }
        c
    }

    #[test]
    fn random_two_degenerate_instances_meet_the_profile() {
        let mut next = lcg(31);
        for _ in 0..8 {
            let g = random_degenerate(8, 2, &mut next);
            let order = degeneracy_order(&g);
            let c = random_exact_profile_cover(&g, &order, &mut next);
            let d = degenerate_flexible_distribution(&c, &order).unwrap();
            assert!(three_case_report(&c, &order, &d).is_empty());
        }
    }

    #[test]
    fn profile_mismatch_is_rejected() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 3);
        let order = VertexOrder::new(&c.base, vec![1, 2]);
        assert!(matches!(
            degenerate_flexible_distribution(&c, &order),
            Err(ComposeError::Precondition(_))
        ));
    }

    #[test]
    fn edgeless_flexibility_is_uniform() {
        let c = CorrespondenceCover::unmatched(Graph::empty(3), vec![2; 3]);
        let d = flexible_for_degeneracy(&c, 0).unwrap();
        for v in 1..=3 {
            for i in 1..=2 {
                assert_eq!(d.probability(v, i), rat(1, 2));
            }
        }
    }

    #[test]
    fn tree_three_fold_floor_one_quarter() {
        let c = CorrespondenceCover::identity(Graph::path(4), 3);
        let d = flexible_for_degeneracy(&c, 1).unwrap();
        let probs = d.probabilities(&c.list_sizes);
        for v in 1..=4 {
            for i in 1..=3 {
                assert!(probs[v - 1][i - 1] >= rat(1, 4));
            }
        }
    }

    #[test]
    fn octahedron_seven_fold_floor_one_sixty_fourth() {
        // The octahedron as the complement of three disjoint edges.
        let g = Graph::new(
            6,
            &[
                (1, 2),
                (1, 3),
                (1, 5),
                (1, 6),
                (2, 3),
                (2, 4),
                (2, 6),
                (3, 4),
                (3, 5),
                (4, 5),
                (4, 6),
                (5, 6),
            ],
        )
        .unwrap();
        assert_eq!(g.degree_sequence(), vec![4; 6]);
        let c = CorrespondenceCover::identity(g, 7);
        let d = flexible_for_degeneracy(&c, 5).unwrap();
        let probs = d.probabilities(&c.list_sizes);
        for v in 1..=6 {
            for i in 1..=7 {
                assert!(probs[v - 1][i - 1] >= rat(1, 64));
            }
        }
    }

    #[test]
    fn degeneracy_mismatch_is_rejected() {
        let c = CorrespondenceCover::identity(Graph::complete(4), 3);
        assert!(matches!(
            flexible_for_degeneracy(&c, 1),
            Err(ComposeError::Precondition(_))
        ));
    }

    #[test]
    fn tree_support_is_a_set_of_transversals() {
        let mut next = lcg(91);
        let g = random_degenerate(7, 1, &mut next);
        let order = degeneracy_order(&g);
        let c = random_exact_profile_cover(&g, &order, &mut next);
        let d = degenerate_flexible_distribution(&c, &order).unwrap();
        let all: BTreeSet<Colouring> = enumerate_transversals(&maximize_matchings(&c))
            .unwrap()
            .into_iter()
            .collect();
        for (col, w) in d.support() {
            assert!(all.contains(col));
            assert!(*w > Rat::zero());
        }
        for v in 1..=7 {
            let total: Rat = (1..=c.list_size(v))
                .map(|i| d.probability(v, i))
                .fold(Rat::zero(), |a, p| a + p);
            assert!(total.is_one());
        }
    }

    #[test]
    fn product_of_k2s_four_fold_flexibility() {
        let k2 = Graph::complete(2);
        let c4 = cartesian_product(&k2, &k2);
        let c = CorrespondenceCover::identity(c4, 4);
        let d = flexible_for_degeneracy(&c, 2).unwrap();
        let probs = d.probabilities(&c.list_sizes);
        for v in 1..=4 {
            for i in 1..=4 {
                assert!(probs[v - 1][i - 1] >= rat(1, 8));
            }
        }
    }
}
