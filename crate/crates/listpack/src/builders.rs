//! Structural packing builders: layer-by-layer composition, elimination
//! forests, and Cartesian products. Each reduces to `compose_packing` and
//! validates its output exactly.

use crate::compose::{check_fractional, compose_packing, monotonicity_lift, ComposeError};
use crate::cover::{restrict_cover, Colouring, CorrespondenceCover};
use crate::decomp::EliminationForest;
use crate::graph::{cartesian_product, validate_layer_partition, Graph, LayerPartition, Vertex};
use crate::packing::PackingDistribution;
use num::One;
use std::collections::BTreeSet;

/// Packs each connected component of `c.base` separately with `pack`
/// (called with the component's cover and its vertices in `c`'s ids) and
/// returns the independent product.
pub fn per_component_product<F>(
    c: &CorrespondenceCover,
    pack: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover, &[Vertex]) -> Result<PackingDistribution, ComposeError>,
{
    let n = c.base.vertex_count();
    if n == 0 {
        return Ok(PackingDistribution::singleton(Vec::new()));
    }
    let comps = c.base.components();
    if comps.len() == 1 {
        let ids: Vec<Vertex> = (1..=n).collect();
        return pack(c, &ids);
    }
    let mut acc = PackingDistribution::singleton(vec![0usize; n]);
    let identity_slots: Vec<usize> = (0..n).collect();
    for comp in comps {
        let keep: BTreeSet<Vertex> = comp.iter().copied().collect();
        let (sub, ids) = restrict_cover(c, &keep);
        let d = pack(&sub, &ids)?;
        let comp_slots: Vec<usize> = ids.iter().map(|&v| v - 1).collect();
        acc = acc.product(&d, n, &identity_slots, &comp_slots);
    }
    // The product of probability-1 totals is 1; rescale is never needed.
    debug_assert!(acc.total_weight().is_one());
    Ok(acc)
}

/// Builds a fractional packing layer by layer: the last layer is composed
/// onto a recursive packing of the earlier layers. `layer_oracle` receives
/// the 1-based layer index and the (possibly reduced, mixed-profile) cover
/// of that layer.
pub fn layered_packing<F>(
    c: &CorrespondenceCover,
    lp: &LayerPartition,
    layer_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(usize, &CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    validate_layer_partition(&c.base, lp)
        .map_err(|e| ComposeError::Precondition(e.to_string()))?;
    let d = layered_rec(c, &lp.layers, layer_oracle)?;
    check_fractional(c, &d)?;
    Ok(d)
}

fn layered_rec<F>(
    c: &CorrespondenceCover,
    layers: &[Vec<Vertex>],
    layer_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(usize, &CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    let m = layers.len();
    if m == 1 {
        return layer_oracle(1, c);
    }
    let t: BTreeSet<Vertex> = layers[m - 1].iter().copied().collect();
    let prefix: BTreeSet<Vertex> = layers[..m - 1].iter().flatten().copied().collect();
    let (outer_cover, old_ids) = restrict_cover(c, &prefix);
    let mut new_id = vec![0usize; c.base.vertex_count() + 1];
    for (i, &v) in old_ids.iter().enumerate() {
        new_id[v] = i + 1;
    }
    let sub_layers: Vec<Vec<Vertex>> = layers[..m - 1]
        .iter()
        .map(|l| l.iter().map(|&v| new_id[v]).collect())
        .collect();
    let outer = layered_rec(&outer_cover, &sub_layers, layer_oracle)?;
    compose_packing(c, &t, &outer, &mut |sub| layer_oracle(m, sub))
}

/// Packs along an elimination forest: per component, the shallowest vertex
/// is the outer singleton and the rest is composed recursively. Neighbour
/// lists longer than the root's are first shrunk to the root's size by a
/// monotonicity mix, which keeps the boundary list condition satisfiable
/// on uneven profiles.
pub fn treedepth_packing(
    c: &CorrespondenceCover,
    f: &EliminationForest,
) -> Result<PackingDistribution, ComposeError> {
    f.validate(&c.base)
        .map_err(|e| ComposeError::Precondition(e.to_string()))?;
    let depths = f
        .depths()
        .map_err(|e| ComposeError::Precondition(e.to_string()))?;
    let d = td_pack(c, &(1..=c.base.vertex_count()).collect::<Vec<_>>(), &depths)?;
    check_fractional(c, &d)?;
    Ok(d)
}

fn td_pack(
    c: &CorrespondenceCover,
    ids: &[Vertex],
    depths: &[usize],
) -> Result<PackingDistribution, ComposeError> {
    per_component_product(c, &mut |sub, local_ids| {
        let sub_ids: Vec<Vertex> = local_ids.iter().map(|&l| ids[l - 1]).collect();
        td_component(sub, &sub_ids, depths)
    })
}

fn td_component(
    c: &CorrespondenceCover,
    ids: &[Vertex],
    depths: &[usize],
) -> Result<PackingDistribution, ComposeError> {
    let n = c.base.vertex_count();
    if n == 1 {
        let cols: Vec<Colouring> = (1..=c.list_size(1)).map(|i| vec![i]).collect();
        return Ok(PackingDistribution::uniform(cols));
    }
    let r = (1..=n)
        .min_by_key(|&v| (depths[ids[v - 1] - 1], v))
        .expect("component is nonempty");
    let lr = c.list_size(r);
    let mut target = c.list_sizes.clone();
    let mut shrink = false;
    for &u in c.base.neighbours(r) {
        if c.list_size(u) > lr {
            target[u - 1] = lr;
            shrink = true;
        }
    }
    if shrink {
        return monotonicity_lift(c, &target, &mut |sub| td_component(sub, ids, depths));
    }
    let t: BTreeSet<Vertex> = (1..=n).filter(|&v| v != r).collect();
    let outer =
        PackingDistribution::uniform((1..=lr).map(|i| vec![i]).collect::<Vec<Colouring>>());
    let t_vec: Vec<Vertex> = t.iter().copied().collect();
    compose_packing(c, &t, &outer, &mut |sub| {
        let inner_ids: Vec<Vertex> = t_vec.iter().map(|&l| ids[l - 1]).collect();
        td_pack(sub, &inner_ids, depths)
    })
}

/// Packs a cover of the Cartesian product of `g1` and `g2`: lists must
/// hold `k1 + deg(b)` colours at `(a, b)`, where `k1` is the fold
/// `g1_oracle` packs. A maximum-degree vertex of `g2` is peeled each step;
/// peeling keeps the local profile exact, so the boundary condition holds
/// by the degree choice.
pub fn cartesian_packing<F>(
    c: &CorrespondenceCover,
    g1: &Graph,
    g2: &Graph,
    k1: usize,
    g1_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    if c.base != cartesian_product(g1, g2) {
        return Err(ComposeError::Precondition(
            "cover base is not the product of the given factors".into(),
        ));
    }
    let n2 = g2.vertex_count();
    for a in 1..=g1.vertex_count() {
        for b in 1..=n2 {
            let v = (a - 1) * n2 + b;
            if c.list_size(v) < k1 + g2.degree(b) {
                return Err(ComposeError::Precondition(format!(
                    "list at ({}, {}) has {} colours, needs {}",
                    a,
                    b,
                    c.list_size(v),
                    k1 + g2.degree(b)
                )));
            }
        }
    }
    let d = cart_split_g1(c, g1, g2, k1, g1_oracle)?;
    check_fractional(c, &d)?;
    Ok(d)
}

/// Tree-product variant: for a forest `g2`, lists of `k1 + 1` colours
/// suffice. Leaves are peeled instead of maximum-degree vertices, and each
/// peeled copy reduces straight to the `g1` oracle.
pub fn tree_product_packing<F>(
    c: &CorrespondenceCover,
    g1: &Graph,
    tree: &Graph,
    k1: usize,
    g1_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    if c.base != cartesian_product(g1, tree) {
        return Err(ComposeError::Precondition(
            "cover base is not the product of the given factors".into(),
        ));
    }
    for comp in tree.components() {
        let inside = comp.len();
        let edges = tree
            .edges()
            .filter(|&(u, v)| comp.contains(&u) && comp.contains(&v))
            .count();
        if edges != inside - 1 {
            return Err(ComposeError::Precondition(
                "second factor is not a forest".into(),
            ));
        }
    }
    for v in c.base.vertices() {
        if c.list_size(v) < k1 + 1 {
            return Err(ComposeError::Precondition(format!(
                "list at product vertex {} has {} colours, needs {}",
                v,
                c.list_size(v),
                k1 + 1
            )));
        }
    }
    let d = split_components(c, g1, tree, &mut |sub, g1c, g2c| {
        let target = vec![k1 + 1; sub.base.vertex_count()];
        if sub.list_sizes != target {
            monotonicity_lift(sub, &target, &mut |exact| {
                tree_rec(exact, g1c, g2c, k1, g1_oracle)
            })
        } else {
            tree_rec(sub, g1c, g2c, k1, g1_oracle)
        }
    })?;
    check_fractional(c, &d)?;
    Ok(d)
}

/// Splits a product cover along connected components of both factors and
/// hands each connected-by-connected block to `pack`.
fn split_components<F>(
    c: &CorrespondenceCover,
    g1: &Graph,
    g2: &Graph,
    pack: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover, &Graph, &Graph) -> Result<PackingDistribution, ComposeError>,
{
    let n = c.base.vertex_count();
    let n2 = g2.vertex_count();
    let comps1 = g1.components();
    let comps2 = g2.components();
    if comps1.len() == 1 && comps2.len() == 1 {
        return pack(c, g1, g2);
    }
    let mut acc = PackingDistribution::singleton(vec![0usize; n]);
    let identity_slots: Vec<usize> = (0..n).collect();
    for c1 in &comps1 {
        let keep1: BTreeSet<Vertex> = c1.iter().copied().collect();
        let (g1_sub, _) = g1.induced(&keep1);
        for c2 in &comps2 {
            let keep2: BTreeSet<Vertex> = c2.iter().copied().collect();
            let (g2_sub, _) = g2.induced(&keep2);
            let keep: BTreeSet<Vertex> = c1
                .iter()
                .flat_map(|&a| c2.iter().map(move |&b| (a - 1) * n2 + b))
                .collect();
            let (sub, ids) = restrict_cover(c, &keep);
            let d = pack(&sub, &g1_sub, &g2_sub)?;
            let comp_slots: Vec<usize> = ids.iter().map(|&v| v - 1).collect();
            acc = acc.product(&d, n, &identity_slots, &comp_slots);
        }
    }
    Ok(acc)
}

fn cart_split_g1<F>(
    c: &CorrespondenceCover,
    g1: &Graph,
    g2: &Graph,
    k1: usize,
    g1_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    split_components(c, g1, g2, &mut |sub, g1c, g2c| {
        let n2c = g2c.vertex_count();
        let target: Vec<usize> = (0..sub.base.vertex_count())
            .map(|i| k1 + g2c.degree(i % n2c + 1))
            .collect();
        if sub.list_sizes != target {
            monotonicity_lift(sub, &target, &mut |exact| {
                cart_connected(exact, g1c, g2c, k1, g1_oracle)
            })
        } else {
            cart_connected(sub, g1c, g2c, k1, g1_oracle)
        }
    })
}

/// Connected case with the exact profile invariant: the cover's base is
/// `g1` times `h` in row-major order and every list at `(a, b)` has
/// exactly `k1 + deg_h(b)` colours. Peeling a maximum-degree `b0` deletes
/// exactly one colour at each `(a, b)` with `b` adjacent to `b0`, which
/// re-establishes the invariant on `h - b0`.
fn cart_connected<F>(
    c: &CorrespondenceCover,
    g1: &Graph,
    h: &Graph,
    k1: usize,
    g1_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    let nb = h.vertex_count();
    if nb == 1 {
        return g1_oracle(c);
    }
    let b0 = (1..=nb)
        .max_by_key(|&b| (h.degree(b), std::cmp::Reverse(b)))
        .expect("factor has vertices");
    let n1 = g1.vertex_count();
    let outer_ids: BTreeSet<Vertex> = (1..=n1).map(|a| (a - 1) * nb + b0).collect();
    let t: BTreeSet<Vertex> = c
        .base
        .vertices()
        .filter(|v| !outer_ids.contains(v))
        .collect();
    let (outer_cover, _) = restrict_cover(c, &outer_ids);
    let outer = monotonicity_lift(&outer_cover, &vec![k1; n1], g1_oracle)?;
    let h_minus: BTreeSet<Vertex> = (1..=nb).filter(|&b| b != b0).collect();
    let (h_sub, _) = h.induced(&h_minus);
    compose_packing(c, &t, &outer, &mut |sub| {
        split_components(sub, g1, &h_sub, &mut |piece, g1c, g2piece| {
            cart_connected(piece, g1c, g2piece, k1, g1_oracle)
        })
    })
}

fn tree_rec<F>(
    c: &CorrespondenceCover,
    g1: &Graph,
    h: &Graph,
    k1: usize,
    g1_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    let nb = h.vertex_count();
    if nb == 1 {
        let n1 = g1.vertex_count();
        return monotonicity_lift(c, &vec![k1; n1], g1_oracle);
    }
    let leaf = (1..=nb)
        .find(|&b| h.degree(b) <= 1)
        .expect("a tree has a leaf");
    let n1 = g1.vertex_count();
    let t: BTreeSet<Vertex> = (1..=n1).map(|a| (a - 1) * nb + leaf).collect();
    let prefix: BTreeSet<Vertex> = c
        .base
        .vertices()
        .filter(|v| !t.contains(v))
        .collect();
    let (outer_cover, _) = restrict_cover(c, &prefix);
    let h_minus: BTreeSet<Vertex> = (1..=nb).filter(|&b| b != leaf).collect();
    let (h_sub, _) = h.induced(&h_minus);
    let outer = tree_rec(&outer_cover, g1, &h_sub, k1, g1_oracle)?;
    compose_packing(c, &t, &outer, &mut |sub| {
        // After the forced deletions every list in the peeled copy is back
        // to k1 colours and the base is g1 itself.
        g1_oracle(sub)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::lp_oracle;
    use crate::packing::{validate_packing, PackingTarget};
    use crate::rat;

    fn lcg(seed: u64) -> impl FnMut() -> usize {
        let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        }
    }

    fn randomize_matchings(c: &mut CorrespondenceCover, full: bool, next: &mut impl FnMut() -> usize) {
        for (u, v) in c.base.edges().collect::<Vec<_>>() {
            let k = c.list_size(u).min(c.list_size(v));
            let m = if full { k } else { next() % (k + 1) };
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
            } else {
                c.matchings.remove(&(u, v));
            }
        }
    }

    #[test]
    fn layered_single_layer_is_oracle_output() {
        let c = CorrespondenceCover::identity(Graph::complete(3), 3);
        let lp = LayerPartition::new(vec![vec![1, 2, 3]]);
        let direct = lp_oracle(&c).unwrap();
        let layered = layered_packing(&c, &lp, &mut |i, sub| {
            assert_eq!(i, 1);
            lp_oracle(sub)
        })
        .unwrap();
        assert_eq!(direct, layered);
    }

    #[test]
    fn layered_c6_three_fold() {
        let c = CorrespondenceCover::identity(Graph::cycle(6), 3);
        let lp = LayerPartition::new(vec![vec![1], vec![2, 3, 4, 5, 6]]);
        let d = layered_packing(&c, &lp, &mut |_, sub| lp_oracle(sub)).unwrap();
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
    }

    #[test]
    fn layered_star_two_fold() {
        // Star with centre 1 and nine leaves, layer the centre first.
        let edges: Vec<(usize, usize)> = (2..=10).map(|l| (1, l)).collect();
        let g = Graph::new(10, &edges).unwrap();
        let c = CorrespondenceCover::identity(g, 2);
        let lp = LayerPartition::new(vec![vec![1], (2..=10).collect()]);
        let d = layered_packing(&c, &lp, &mut |_, sub| lp_oracle(sub)).unwrap();
        for v in 1..=10 {
            for i in 1..=2 {
                assert_eq!(d.probability(v, i), rat(1, 2));
            }
        }
    }

    #[test]
    fn layered_component_partition_equals_component_product() {
        let g = Graph::new(5, &[(1, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let mut next = lcg(77);
        let mut c = CorrespondenceCover::unmatched(g, vec![3; 5]);
        randomize_matchings(&mut c, true, &mut next);
        let lp = LayerPartition::new(vec![vec![1, 2], vec![3, 4, 5]]);
        let via_layers = layered_packing(&c, &lp, &mut |_, sub| lp_oracle(sub)).unwrap();
        let via_components =
            per_component_product(&c, &mut |sub, _| lp_oracle(sub)).unwrap();
        assert_eq!(via_layers, via_components);
    }

    #[test]
    fn treedepth_single_vertex() {
        let c = CorrespondenceCover::unmatched(Graph::empty(1), vec![1]);
        let f = EliminationForest::new(vec![None]);
        let d = treedepth_packing(&c, &f).unwrap();
        assert_eq!(d.support().to_vec(), vec![(vec![1], rat(1, 1))]);
    }

    #[test]
    fn treedepth_p3_centre_root_is_forced() {
        let c = CorrespondenceCover::identity(Graph::path(3), 2);
        let f = EliminationForest::new(vec![Some(2), None, Some(2)]);
        let d = treedepth_packing(&c, &f).unwrap();
        assert_eq!(
            d.support().to_vec(),
            vec![
                (vec![1, 2, 1], rat(1, 2)),
                (vec![2, 1, 2], rat(1, 2)),
            ]
        );
    }

    #[test]
    fn treedepth_k34_random_four_fold() {
        let mut edges = Vec::new();
        for a in 1..=3 {
            for b in 4..=7 {
                edges.push((a, b));
            }
        }
        let g = Graph::new(7, &edges).unwrap();
        let f = EliminationForest::new(vec![
            None,
            Some(1),
            Some(2),
            Some(3),
            Some(3),
            Some(3),
            Some(3),
        ]);
        let mut next = lcg(5);
        for _ in 0..3 {
            let mut c = CorrespondenceCover::unmatched(g.clone(), vec![4; 7]);
            randomize_matchings(&mut c, false, &mut next);
            let d = treedepth_packing(&c, &f).unwrap();
            let probs = d.probabilities(&c.list_sizes);
            for v in 1..=7 {
                for i in 1..=4 {
                    assert_eq!(probs[v - 1][i - 1], rat(1, 4));
                }
            }
        }
    }

    #[test]
    fn treedepth_shrinks_oversized_neighbour_lists() {
        // P3 rooted at the centre with a larger list at one leaf.
        let mut c = CorrespondenceCover::identity(Graph::path(3), 2);
        c.list_sizes = vec![3, 2, 2];
        c.matchings.insert((1, 2), vec![(1, 1), (2, 2)]);
        let f = EliminationForest::new(vec![Some(2), None, Some(2)]);
        let d = treedepth_packing(&c, &f).unwrap();
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        for i in 1..=3 {
            assert_eq!(d.probability(1, i), rat(1, 3));
        }
    }

    #[test]
    fn cartesian_single_vertex_second_factor() {
        let g1 = Graph::complete(3);
        let g2 = Graph::empty(1);
        let c = CorrespondenceCover::identity(cartesian_product(&g1, &g2), 3);
        let direct = lp_oracle(&c).unwrap();
        let d = cartesian_packing(&c, &g1, &g2, 3, &mut lp_oracle).unwrap();
        assert_eq!(direct, d);
    }

    #[test]
    fn cartesian_k3_by_k2_four_fold() {
        let g1 = Graph::complete(3);
        let g2 = Graph::complete(2);
        let c = CorrespondenceCover::identity(cartesian_product(&g1, &g2), 4);
        let d = cartesian_packing(&c, &g1, &g2, 3, &mut lp_oracle).unwrap();
        for v in c.base.vertices() {
            for i in 1..=4 {
                assert_eq!(d.probability(v, i), rat(1, 4));
            }
        }
    }

    #[test]
    fn cartesian_p2_by_p3_mixed_profile() {
        let g1 = Graph::path(2);
        let g2 = Graph::path(3);
        let product = cartesian_product(&g1, &g2);
        // Lists sized 2 + deg(b): columns of the middle path vertex get 4.
        let sizes: Vec<usize> = (0..6).map(|i| 2 + g2.degree(i % 3 + 1)).collect();
        let mut c = CorrespondenceCover::unmatched(product, sizes);
        let mut next = lcg(11);
        randomize_matchings(&mut c, false, &mut next);
        let d = cartesian_packing(&c, &g1, &g2, 2, &mut lp_oracle).unwrap();
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        assert_eq!(d.probability(2, 1), rat(1, 4));
        assert_eq!(d.probability(1, 1), rat(1, 3));
    }

    #[test]
    fn cartesian_disconnected_first_factor() {
        let g1 = Graph::empty(2);
        let g2 = Graph::complete(2);
        let c = CorrespondenceCover::identity(cartesian_product(&g1, &g2), 2);
        let d = cartesian_packing(&c, &g1, &g2, 1, &mut lp_oracle).unwrap();
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
    }

    #[test]
    fn tree_product_k2_by_p4_three_fold() {
        let g1 = Graph::complete(2);
        let tree = Graph::path(4);
        let mut next = lcg(21);
        for _ in 0..5 {
            let mut c =
                CorrespondenceCover::unmatched(cartesian_product(&g1, &tree), vec![3; 8]);
            randomize_matchings(&mut c, false, &mut next);
            let d = tree_product_packing(&c, &g1, &tree, 2, &mut lp_oracle).unwrap();
            assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        }
    }

    #[test]
    fn tree_product_rejects_cyclic_second_factor() {
        let g1 = Graph::complete(2);
        let g2 = Graph::cycle(3);
        let c = CorrespondenceCover::identity(cartesian_product(&g1, &g2), 3);
        assert!(matches!(
            tree_product_packing(&c, &g1, &g2, 2, &mut lp_oracle),
            Err(ComposeError::Precondition(_))
        ));
    }

    #[test]
    fn cartesian_rejects_wrong_base() {
        let g1 = Graph::complete(2);
        let g2 = Graph::complete(2);
        let c = CorrespondenceCover::identity(Graph::cycle(5), 3);
        assert!(matches!(
            cartesian_packing(&c, &g1, &g2, 2, &mut lp_oracle),
            Err(ComposeError::Precondition(_))
        ));
    }
}
