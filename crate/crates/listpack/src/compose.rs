//! Constructive packing tools: the exact LP fallback, the sublist
//! monotonicity lift, and composition of an outer packing with inner
//! packings across a boundary set.

use crate::budget;
use crate::cover::{
    delete_colours, lift_colouring, restrict_cover, Colouring, CorrespondenceCover, CoverError,
    Profile,
};
use crate::packing::{
    enumerate_transversals, validate_packing, PackingDistribution, PackingError, PackingTarget,
};
use crate::simplex::{Outcome, Simplex};
use crate::{rat, Rat};
use itertools::Itertools;
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("oracle failed: {0}")]
    Oracle(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("constructed distribution failed validation: {0}")]
    Postcondition(String),
}

/// Guards the construction: every public builder validates its output and
/// refuses to return a distribution that is not an exact fractional
/// packing.
pub(crate) fn check_fractional(
    c: &CorrespondenceCover,
    d: &PackingDistribution,
) -> Result<(), ComposeError> {
    let report = validate_packing(c, d, &PackingTarget::Fractional);
    if report.is_valid() {
        Ok(())
    } else {
        Err(ComposeError::Postcondition(report.violations.join("; ")))
    }
}

#[derive(Debug, Clone)]
pub enum PackingLpOutcome {
    Feasible(PackingDistribution),
    /// `farkas` is indexed by colour in (vertex, index) order and certifies
    /// infeasibility: it has positive inner product with the probability
    /// floors but nonpositive inner product with every transversal's
    /// incidence vector.
    Infeasible { farkas: Vec<Rat> },
}

/// Decides fractional-packing feasibility by enumerating all transversals
/// and solving the exact equality system: each colour of each vertex gets
/// probability `1/|L(v)|`. Meeting the floors forces those equalities, so
/// the systems agree.
pub fn solve_packing_lp(c: &CorrespondenceCover) -> Result<PackingLpOutcome, ComposeError> {
    let n = c.base.vertex_count();
    if n == 0 {
        return Ok(PackingLpOutcome::Feasible(PackingDistribution::singleton(
            Vec::new(),
        )));
    }
    let transversals = enumerate_transversals(c)?;
    let mut offset = vec![0usize; n + 1];
    for v in 1..=n {
        offset[v] = offset[v - 1] + c.list_size(v);
    }
    let rows = offset[n];
    let rhs: Vec<Rat> = (1..=n)
        .flat_map(|v| {
            let share = rat(1, c.list_size(v) as i64);
            std::iter::repeat(share).take(c.list_size(v))
        })
        .collect();
    let columns: Vec<(Vec<Rat>, Rat)> = transversals
        .iter()
        .map(|t| {
            let mut a = vec![Rat::zero(); rows];
            for (vi, &ci) in t.iter().enumerate() {
                a[offset[vi] + ci - 1] = Rat::one();
            }
            (a, Rat::zero())
        })
        .collect();
    let mut s = Simplex::new(rhs, columns);
    match s.solve() {
        Outcome::Optimal => {
            let weights = s.primal();
            let d = PackingDistribution::new(
                transversals.into_iter().zip(weights).collect(),
            )?;
            check_fractional(c, &d)?;
            Ok(PackingLpOutcome::Feasible(d))
        }
        Outcome::Infeasible => Ok(PackingLpOutcome::Infeasible { farkas: s.farkas() }),
        Outcome::Unbounded => unreachable!("feasibility program has constant objective"),
    }
}

/// The LP as an oracle: infeasibility becomes an oracle error.
pub fn lp_oracle(c: &CorrespondenceCover) -> Result<PackingDistribution, ComposeError> {
    match solve_packing_lp(c)? {
        PackingLpOutcome::Feasible(d) => Ok(d),
        PackingLpOutcome::Infeasible { .. } => Err(ComposeError::Oracle(
            "packing program infeasible".into(),
        )),
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Reduces packing a cover with oversized lists to packing covers with the
/// exact target profile: mixes uniformly over every joint choice of
/// `target[v]`-element sublists, calling the oracle on each restricted
/// cover. The output list probabilities are exactly `1/|L(v)|` at every
/// vertex, enlarged lists included.
pub fn monotonicity_lift<F>(
    c: &CorrespondenceCover,
    target: &Profile,
    oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    let n = c.base.vertex_count();
    if target.len() != n {
        return Err(ComposeError::Precondition(format!(
            "profile has {} entries for {} vertices",
            target.len(),
            n
        )));
    }
    for v in 1..=n {
        if target[v - 1] < 1 || target[v - 1] > c.list_size(v) {
            return Err(ComposeError::Precondition(format!(
                "target {} at vertex {} outside 1..={}",
                target[v - 1],
                v,
                c.list_size(v)
            )));
        }
    }
    let combos: u128 = (1..=n)
        .map(|v| binomial(c.list_size(v), target[v - 1]))
        .product();
    let limit = budget::budget();
    if combos > limit as u128 {
        return Err(PackingError::BudgetExceeded(combos, limit).into());
    }
    let per_vertex: Vec<Vec<Vec<usize>>> = (1..=n)
        .map(|v| {
            (1..=c.list_size(v))
                .combinations(target[v - 1])
                .collect::<Vec<_>>()
        })
        .collect();
    let share = rat(1, combos as i64);
    let mut entries: Vec<(Colouring, Rat)> = Vec::new();
    for choice in per_vertex.into_iter().multi_cartesian_product() {
        let mut removals: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (vi, keep) in choice.iter().enumerate() {
            for i in 1..=c.list_size(vi + 1) {
                if !keep.contains(&i) {
                    removals.insert((vi + 1, i));
                }
            }
        }
        let (sub, maps) = delete_colours(c, &removals)?;
        let d = oracle(&sub)?;
        for (col, w) in d.support() {
            entries.push((lift_colouring(&maps, col), &share * w));
        }
    }
    let out = PackingDistribution::new(entries)?;
    check_fractional(c, &out)?;
    Ok(out)
}

/// Composition across a boundary: given a fractional packing of the
/// restriction to `V - T`, build one for the whole cover.
///
/// Requirements: every vertex of `T` has at most one neighbour outside
/// `T`, and such a vertex `u` with outside neighbour `v` satisfies
/// `2 <= |L(u)| <= |L(v)|`.
///
/// For each outer colouring, each such `u` loses one colour: the partner of
/// the outside choice when it is matched into `L(u)`, otherwise a single
/// colour drawn so that every colour of `L(u)` is deleted with total
/// probability exactly `1/|L(u)|`. With `m` colours of `L(u)` matched
/// toward `v`, the draw puts weight `(1/lu - 1/lv) * lv/(lv - m)` on each
/// matched colour and `(1/lu) * lv/(lv - m)` on each unmatched one; paired
/// with the matched-partner event this evens out, which is where
/// `|L(u)| <= |L(v)|` is needed. The inner oracle then packs each reduced
/// cover of `T` and the mixture is returned, validated exactly.
pub fn compose_packing<F>(
    c: &CorrespondenceCover,
    t: &BTreeSet<usize>,
    outer: &PackingDistribution,
    inner_oracle: &mut F,
) -> Result<PackingDistribution, ComposeError>
where
    F: FnMut(&CorrespondenceCover) -> Result<PackingDistribution, ComposeError>,
{
    let n = c.base.vertex_count();
    let outside: BTreeSet<usize> = c.base.vertices().filter(|v| !t.contains(v)).collect();
    let outer_ids: Vec<usize> = outside.iter().copied().collect();
    let outer_pos: BTreeMap<usize, usize> =
        outer_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let (t_cover, t_ids) = restrict_cover(c, t);
    let t_pos: BTreeMap<usize, usize> =
        t_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Boundary pairs (u in T, its unique outside neighbour).
    let mut boundary: Vec<(usize, usize)> = Vec::new();
    for &u in t {
        let out_nb: Vec<usize> = c
            .base
            .neighbours(u)
            .iter()
            .copied()
            .filter(|w| !t.contains(w))
            .collect();
        match out_nb.len() {
            0 => {}
            1 => {
                let v = out_nb[0];
                if c.list_size(u) < 2 || c.list_size(u) > c.list_size(v) {
                    return Err(ComposeError::Precondition(format!(
                        "boundary vertex {} has list size {} against neighbour {} with {}",
                        u,
                        c.list_size(u),
                        v,
                        c.list_size(v)
                    )));
                }
                boundary.push((u, v));
            }
            _ => {
                return Err(ComposeError::Precondition(format!(
                    "vertex {} of the boundary set has {} outside neighbours",
                    u,
                    out_nb.len()
                )))
            }
        }
    }

    let limit = budget::budget();
    let mut inner_memo: BTreeMap<Vec<(usize, usize)>, (PackingDistribution, Vec<Vec<usize>>)> =
        BTreeMap::new();
    let mut entries: Vec<(Colouring, Rat)> = Vec::new();
    let t_slots: Vec<usize> = t_ids.iter().map(|&v| v - 1).collect();

    for (outer_col, outer_w) in outer.support() {
        // Forced deletions and per-vertex weighted deletion alternatives,
        // all in T-local colour coordinates.
        let mut forced: Vec<(usize, usize)> = Vec::new();
        let mut free: Vec<Vec<((usize, usize), Rat)>> = Vec::new();
        for &(u, v) in &boundary {
            let j = outer_col[outer_pos[&v]];
            let local_u = t_pos[&u] + 1;
            if let Some(a) = c.matched_partner(v, j, u) {
                forced.push((local_u, a));
                continue;
            }
            let lu = c.list_size(u) as i64;
            let lv = c.list_size(v) as i64;
            let matching = c.matching(u, v);
            let m = matching.len() as i64;
            let scale = rat(lv, lv - m);
            let matched_w = (rat(1, lu) - rat(1, lv)) * &scale;
            let unmatched_w = rat(1, lu) * &scale;
            let matched_left: BTreeSet<usize> = matching.iter().map(|&(a, _)| a).collect();
            let mut alts = Vec::new();
            for y in 1..=c.list_size(u) {
                let w = if matched_left.contains(&y) {
                    matched_w.clone()
                } else {
                    unmatched_w.clone()
                };
                if !w.is_zero() {
                    alts.push(((local_u, y), w));
                }
            }
            free.push(alts);
        }
        let combo_count: u128 = free.iter().map(|a| a.len() as u128).product();
        if combo_count > limit as u128 {
            return Err(PackingError::BudgetExceeded(combo_count, limit).into());
        }

        let mut combos: Vec<(Vec<(usize, usize)>, Rat)> = vec![(Vec::new(), Rat::one())];
        for alts in &free {
            combos = combos
                .into_iter()
                .cartesian_product(alts.iter())
                .map(|((mut dels, w), (d, dw))| {
                    dels.push(*d);
                    (dels, w * dw)
                })
                .collect();
        }

        for (extra, combo_w) in combos {
            let mut removal_key: Vec<(usize, usize)> = forced.clone();
            removal_key.extend(extra);
            removal_key.sort_unstable();
            removal_key.dedup();
            if !inner_memo.contains_key(&removal_key) {
                let removals: BTreeSet<(usize, usize)> =
                    removal_key.iter().copied().collect();
                let (sub, maps) = delete_colours(&t_cover, &removals)?;
                let d = inner_oracle(&sub)?;
                inner_memo.insert(removal_key.clone(), (d, maps));
            }
            let (inner, maps) = &inner_memo[&removal_key];
            let w_base = outer_w * &combo_w;
            for (col, iw) in inner.support() {
                let lifted = lift_colouring(maps, col);
                let mut full = vec![0usize; n];
                for (i, &slot) in t_slots.iter().enumerate() {
                    full[slot] = lifted[i];
                }
                for (i, &v) in outer_ids.iter().enumerate() {
                    full[v - 1] = outer_col[i];
                }
                entries.push((full, &w_base * iw));
            }
        }
    }
    let out = PackingDistribution::new(entries)?;
    check_fractional(c, &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::validate_cover;
    use crate::graph::Graph;
    use proptest::prelude::*;

    #[test]
    fn lp_feasible_on_identity_k3() {
        let c = CorrespondenceCover::identity(Graph::complete(3), 3);
        match solve_packing_lp(&c).unwrap() {
            PackingLpOutcome::Feasible(d) => {
                assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
            }
            other => panic!("expected feasible, got {:?}", other),
        }
    }

    #[test]
    fn lp_infeasible_on_identity_k4_threefold() {
        let c = CorrespondenceCover::identity(Graph::complete(4), 3);
        match solve_packing_lp(&c).unwrap() {
            PackingLpOutcome::Infeasible { farkas } => {
                // Certificate check: positive against the floors, nonpositive
                // against every transversal.
                let mut offset = vec![0usize; 5];
                for v in 1..=4 {
                    offset[v] = offset[v - 1] + 3;
                }
                let floors: Rat = (1..=4)
                    .flat_map(|v| (1..=3).map(move |i| (v, i)))
                    .map(|(v, i)| &farkas[offset[v - 1] + i - 1] * &rat(1, 3))
                    .fold(Rat::zero(), |acc, x| acc + x);
                assert!(floors > Rat::zero());
                for t in enumerate_transversals(&c).unwrap() {
                    let dot: Rat = t
                        .iter()
                        .enumerate()
                        .map(|(vi, &ci)| farkas[offset[vi] + ci - 1].clone())
                        .fold(Rat::zero(), |acc, x| acc + x);
                    assert!(dot <= Rat::zero());
                }
            }
            other => panic!("expected infeasible, got {:?}", other),
        }
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

    fn random_permutation_matchings(c: &mut CorrespondenceCover, next: &mut impl FnMut() -> usize) {
        for (u, v) in c.base.edges() {
            let k = c.list_size(u).min(c.list_size(v));
            let mut right: Vec<usize> = (1..=k).collect();
            let mut pairs = Vec::new();
            for a in 1..=k {
                let b = right.remove(next() % right.len());
                pairs.push((a, b));
            }
            c.matchings.insert((u, v), pairs);
        }
    }

    fn random_tree(n: usize, next: &mut impl FnMut() -> usize) -> Graph {
        let mut edges = Vec::new();
        for v in 2..=n {
            let parent = next() % (v - 1) + 1;
            edges.push((parent, v));
        }
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn lp_feasible_on_random_threefold_trees() {
        let mut next = lcg(2024);
        for _ in 0..40 {
            let n = next() % 5 + 3;
            let g = random_tree(n, &mut next);
            let mut c = CorrespondenceCover::unmatched(g, vec![3; n]);
            random_permutation_matchings(&mut c, &mut next);
            assert!(validate_cover(&c).is_valid());
            match solve_packing_lp(&c).unwrap() {
                PackingLpOutcome::Feasible(d) => {
                    assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
                }
                other => panic!("tree cover should be feasible, got {:?}", other),
            }
        }
    }

    #[test]
    fn lift_with_exact_profile_is_single_oracle_call() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let mut calls = 0usize;
        let mut oracle = |sub: &CorrespondenceCover| {
            calls += 1;
            assert_eq!(sub.list_sizes, vec![2, 2]);
            lp_oracle(sub)
        };
        let d = monotonicity_lift(&c, &vec![2, 2], &mut oracle).unwrap();
        assert_eq!(calls, 1);
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
    }

    #[test]
    fn lift_single_vertex_three_to_two() {
        let c = CorrespondenceCover::unmatched(Graph::empty(1), vec![3]);
        let mut calls = 0usize;
        let mut oracle = |sub: &CorrespondenceCover| {
            calls += 1;
            assert_eq!(sub.list_sizes, vec![2]);
            Ok(PackingDistribution::uniform(vec![vec![1], vec![2]]))
        };
        let d = monotonicity_lift(&c, &vec![2], &mut oracle).unwrap();
        assert_eq!(calls, 3);
        for i in 1..=3 {
            assert_eq!(d.probability(1, i), rat(1, 3));
        }
    }

    #[test]
    fn lift_k2_with_sizes_three_two() {
        let mut c = CorrespondenceCover::unmatched(Graph::complete(2), vec![3, 2]);
        c.matchings.insert((1, 2), vec![(1, 1), (2, 2)]);
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        let d = monotonicity_lift(&c, &vec![2, 2], &mut oracle).unwrap();
        for i in 1..=3 {
            assert_eq!(d.probability(1, i), rat(1, 3));
        }
        for i in 1..=2 {
            assert_eq!(d.probability(2, i), rat(1, 2));
        }
    }

    #[test]
    fn lift_rejects_oversized_target() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        assert!(matches!(
            monotonicity_lift(&c, &vec![3, 2], &mut oracle),
            Err(ComposeError::Precondition(_))
        ));
    }

    #[test]
    fn compose_isolated_vertex_gives_product() {
        let c = CorrespondenceCover::unmatched(Graph::empty(2), vec![2, 2]);
        let t: BTreeSet<usize> = [2].into_iter().collect();
        let outer = PackingDistribution::uniform(vec![vec![1], vec![2]]);
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        let d = compose_packing(&c, &t, &outer, &mut oracle).unwrap();
        assert_eq!(d.support_size(), 4);
        for v in 1..=2 {
            for i in 1..=2 {
                assert_eq!(d.probability(v, i), rat(1, 2));
            }
        }
    }

    #[test]
    fn compose_edge_with_identity_matching_is_forced() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let t: BTreeSet<usize> = [1].into_iter().collect();
        let outer = PackingDistribution::uniform(vec![vec![1], vec![2]]);
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        let d = compose_packing(&c, &t, &outer, &mut oracle).unwrap();
        assert_eq!(
            d.support().to_vec(),
            vec![
                (vec![1, 2], rat(1, 2)),
                (vec![2, 1], rat(1, 2)),
            ]
        );
    }

    #[test]
    fn compose_pendant_on_triangle() {
        let g = Graph::new(4, &[(1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let c = CorrespondenceCover::identity(g, 3);
        let t: BTreeSet<usize> = [4].into_iter().collect();
        let outer = match solve_packing_lp(&restrict_cover(&c, &[1, 2, 3].into_iter().collect()).0)
            .unwrap()
        {
            PackingLpOutcome::Feasible(d) => d,
            _ => panic!("triangle 3-fold is feasible"),
        };
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        let d = compose_packing(&c, &t, &outer, &mut oracle).unwrap();
        for v in 1..=4 {
            for i in 1..=3 {
                assert_eq!(d.probability(v, i), rat(1, 3));
            }
        }
    }

    #[test]
    fn compose_partial_matching_uses_weighted_deletion() {
        let g = Graph::new(4, &[(1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let mut c = CorrespondenceCover::identity(g, 3);
        c.matchings.insert((3, 4), vec![(1, 1)]);
        let t: BTreeSet<usize> = [4].into_iter().collect();
        let outer = match solve_packing_lp(&restrict_cover(&c, &[1, 2, 3].into_iter().collect()).0)
            .unwrap()
        {
            PackingLpOutcome::Feasible(d) => d,
            _ => panic!("triangle 3-fold is feasible"),
        };
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        let d = compose_packing(&c, &t, &outer, &mut oracle).unwrap();
        for v in 1..=4 {
            for i in 1..=3 {
                assert_eq!(d.probability(v, i), rat(1, 3));
            }
        }
    }

    #[test]
    fn compose_rejects_two_outside_neighbours() {
        let g = Graph::path(3);
        let c = CorrespondenceCover::identity(g, 2);
        let t: BTreeSet<usize> = [2].into_iter().collect();
        let outer = PackingDistribution::uniform(vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        assert!(matches!(
            compose_packing(&c, &t, &outer, &mut oracle),
            Err(ComposeError::Precondition(_))
        ));
    }

    #[test]
    fn compose_rejects_undersized_boundary_list() {
        let g = Graph::complete(2);
        let mut c = CorrespondenceCover::identity(g, 2);
        c.list_sizes = vec![1, 2];
        c.matchings.insert((1, 2), vec![(1, 1)]);
        let t: BTreeSet<usize> = [1].into_iter().collect();
        let outer = PackingDistribution::uniform(vec![vec![1], vec![2]]);
        let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
        assert!(matches!(
            compose_packing(&c, &t, &outer, &mut oracle),
            Err(ComposeError::Precondition(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn compose_on_random_pendant_instances(seed in 0u64..1000) {
            let mut next = lcg(seed);
            let base_n = next() % 3 + 2;
            let base = if next() % 2 == 0 {
                random_tree(base_n, &mut next)
            } else {
                Graph::cycle(base_n.max(3))
            };
            let bn = base.vertex_count();
            let pendants = next() % 2 + 1;
            let n = bn + pendants;
            let mut edges: Vec<(usize, usize)> = base.edges().collect();
            for p in 0..pendants {
                edges.push((next() % bn + 1, bn + p + 1));
            }
            let g = Graph::new(n, &edges).unwrap();
            let mut c = CorrespondenceCover::unmatched(g, vec![3; n]);
            // Random partial matchings, some empty.
            for (u, v) in c.base.edges() {
                let m = next() % 4;
                let mut left: Vec<usize> = (1..=3).collect();
                let mut right: Vec<usize> = (1..=3).collect();
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
            let t: BTreeSet<usize> = (bn + 1..=n).collect();
            let keep: BTreeSet<usize> = (1..=bn).collect();
            let outer = match solve_packing_lp(&restrict_cover(&c, &keep).0).unwrap() {
                PackingLpOutcome::Feasible(d) => d,
                PackingLpOutcome::Infeasible { .. } => return Ok(()),
            };
            let mut oracle = |sub: &CorrespondenceCover| lp_oracle(sub);
            let d = compose_packing(&c, &t, &outer, &mut oracle).unwrap();
            prop_assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        }
    }
}
