//! Balanced colouring families along a caterpillar decomposition.
//!
//! A family of `(p+1)!` proper colourings is kept balanced on the active
//! clique: restricting to any suffix of the clique order yields every
//! reachable partial colouring equally often. Each new vertex is coloured
//! by refining the family one clique vertex at a time, handing every
//! subgroup all but one of its inherited candidate colours; the excluded
//! colour is the matched partner where that lies in the candidate set and
//! an unmatched candidate otherwise, paired off in ascending order. The
//! final family colours every vertex with every colour equally often, so
//! its uniform distribution is an exact fractional packing.

use crate::budget;
use crate::compose::check_fractional;
use crate::cover::{complete_matchings, Colouring, CorrespondenceCover, CoverError};
use crate::decomp::{derive_orders, CaterpillarDecomposition, DecompError};
use crate::graph::{Graph, Vertex};
use crate::packing::{enumerate_transversals, PackingDistribution, PackingError};
use crate::simplex::{solve_lp, Cmp, LpProblem, LpResult};
use crate::{rat, Rat};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Largest supported width; the family holds `(p+1)!` colourings.
pub const CATERPILLAR_WIDTH_LIMIT: usize = 8;

#[derive(Debug, Error)]
pub enum CaterpillarError {
    #[error("width {0} exceeds the limit {CATERPILLAR_WIDTH_LIMIT}")]
    Budget(usize),
    #[error("family search exceeded the node budget {0}")]
    SearchBudget(u64),
    #[error("matchings unusable: {0}")]
    Matchings(String),
    #[error("balance violated: {0}")]
    Balance(String),
    #[error("cover does not fit the decomposition: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Compose(#[from] crate::compose::ComposeError),
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Multiset of proper colourings over the processed vertices, kept at
/// total size `(p+1)!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedFamily {
    pub p: usize,
    /// Processed vertices in extension order; colourings index by position.
    pub vertices: Vec<Vertex>,
    /// Colouring to multiplicity; multiplicities sum to `(p+1)!`.
    pub colourings: BTreeMap<Colouring, usize>,
}

impl BalancedFamily {
    pub fn total(&self) -> usize {
        self.colourings.values().sum()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }
}

/// True iff every suffix of `s` restricts the family to
/// `(p+1)!/(p+1-len)!` distinct colourings, each of multiplicity
/// `(p+1-len)!` for the suffix length.
pub fn check_fully_balanced(f: &BalancedFamily, s: &[Vertex]) -> bool {
    let q = f.p + 1;
    if s.len() > q || f.total() != factorial(q) {
        return false;
    }
    let positions: Option<Vec<usize>> = s.iter().map(|&v| f.position(v)).collect();
    let Some(positions) = positions else {
        return false;
    };
    for start in 0..s.len() {
        let suffix = &positions[start..];
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (col, &m) in &f.colourings {
            let key: Vec<usize> = suffix.iter().map(|&pos| col[pos]).collect();
            *counts.entry(key).or_insert(0) += m;
        }
        let mult = factorial(q - suffix.len());
        if counts.len() != factorial(q) / mult || counts.values().any(|&m| m != mult) {
            return false;
        }
    }
    true
}

fn refine(
    members: &[(Colouring, usize)],
    avail: &[usize],
    depth: usize,
    prefix_pos: &[usize],
    partners: &[Vec<usize>],
    out: &mut BTreeMap<Colouring, usize>,
) -> Result<(), CaterpillarError> {
    if depth == 0 {
        let total: usize = members.iter().map(|(_, m)| m).sum();
        if avail.is_empty() || total % avail.len() != 0 {
            return Err(CaterpillarError::Balance(format!(
                "{} colourings cannot share {} candidate colours evenly",
                total,
                avail.len()
            )));
        }
        let share = total / avail.len();
        let mut cum = 0usize;
        for (col, mult) in members {
            let mut left = *mult;
            while left > 0 {
                let slot = cum / share;
                let take = left.min((slot + 1) * share - cum);
                let mut ext = col.clone();
                ext.push(avail[slot]);
                *out.entry(ext).or_insert(0) += take;
                cum += take;
                left -= take;
            }
        }
        return Ok(());
    }
    let pos = prefix_pos[depth - 1];
    let mut groups: BTreeMap<usize, Vec<(Colouring, usize)>> = BTreeMap::new();
    for (col, m) in members {
        groups
            .entry(col[pos])
            .or_default()
            .push((col.clone(), *m));
    }
    if groups.len() != avail.len() {
        return Err(CaterpillarError::Balance(format!(
            "{} colour values at refinement depth {} against {} candidates",
            groups.len(),
            depth,
            avail.len()
        )));
    }
    // One excluded candidate per value: the matched partner when it is
    // still a candidate, otherwise an unmatched candidate, assigned in
    // ascending order on both sides.
    let mut excluded: BTreeMap<usize, usize> = BTreeMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut unmatched: Vec<usize> = Vec::new();
    for &x in groups.keys() {
        let y = partners[depth - 1][x - 1];
        if avail.contains(&y) {
            excluded.insert(x, y);
            used.insert(y);
        } else {
            unmatched.push(x);
        }
    }
    let leftover: Vec<usize> = avail.iter().copied().filter(|y| !used.contains(y)).collect();
    if leftover.len() != unmatched.len() {
        return Err(CaterpillarError::Balance(
            "candidate exclusion is not a bijection".into(),
        ));
    }
    for (x, y) in unmatched.into_iter().zip(leftover) {
        excluded.insert(x, y);
    }
    for (x, sub) in groups {
        let stop = excluded[&x];
        let sub_avail: Vec<usize> = avail.iter().copied().filter(|&y| y != stop).collect();
        refine(&sub, &sub_avail, depth - 1, prefix_pos, partners, out)?;
    }
    Ok(())
}

fn extend_family(
    f: &BalancedFamily,
    prefix: &[Vertex],
    new_vertex: Vertex,
    c: &CorrespondenceCover,
) -> Result<BalancedFamily, CaterpillarError> {
    let q = f.p + 1;
    if c.list_size(new_vertex) != q {
        return Err(CaterpillarError::Mismatch(format!(
            "vertex {} has {} colours, the family works with {}",
            new_vertex,
            c.list_size(new_vertex),
            q
        )));
    }
    let prefix_pos: Vec<usize> = prefix
        .iter()
        .map(|&w| {
            f.position(w).ok_or_else(|| {
                CaterpillarError::Mismatch(format!("vertex {w} is not processed yet"))
            })
        })
        .collect::<Result<_, _>>()?;
    let partners: Vec<Vec<usize>> = prefix
        .iter()
        .map(|&w| {
            let m = c.matching(w, new_vertex);
            let mut part = vec![0usize; q];
            for (a, b) in m {
                part[a - 1] = b;
            }
            if part.iter().any(|&b| b == 0) {
                return Err(CaterpillarError::Matchings(format!(
                    "matching between {w} and {new_vertex} is not full"
                )));
            }
            Ok(part)
        })
        .collect::<Result<_, _>>()?;
    if !check_fully_balanced(f, prefix) {
        return Err(CaterpillarError::Balance(format!(
            "family is not fully balanced on the clique order {prefix:?}"
        )));
    }
    let members: Vec<(Colouring, usize)> = f
        .colourings
        .iter()
        .map(|(k, &m)| (k.clone(), m))
        .collect();
    let avail: Vec<usize> = (1..=q).collect();
    let mut out = BTreeMap::new();
    refine(&members, &avail, prefix.len(), &prefix_pos, &partners, &mut out)?;
    let mut vertices = f.vertices.clone();
    vertices.push(new_vertex);
    let next = BalancedFamily {
        p: f.p,
        vertices,
        colourings: out,
    };
    debug_assert!({
        let mut order = prefix.to_vec();
        order.push(new_vertex);
        check_fully_balanced(&next, &order)
    });
    Ok(next)
}

/// Extends a family that is fully balanced on `prefix` with one colour of
/// `new_vertex` per colouring, leaving it fully balanced on the order
/// `prefix + [new_vertex]`. Requires full matchings between `new_vertex`
/// and every prefix vertex.
pub fn extend_clique_colourings(
    c: &CorrespondenceCover,
    prefix: &[Vertex],
    new_vertex: Vertex,
    f: &BalancedFamily,
) -> Result<BalancedFamily, CaterpillarError> {
    extend_family(f, prefix, new_vertex, c)
}

fn seed_family(p: usize, v: Vertex) -> BalancedFamily {
    let colourings = (1..=p + 1).map(|y| (vec![y], factorial(p))).collect();
    BalancedFamily {
        p,
        vertices: vec![v],
        colourings,
    }
}

/// Builds the `(p+1)!` colourings of a fully matched `(p+1)`-fold clique
/// cover, fully balanced on `order`: the first vertex takes each colour
/// `p!` times, then each later vertex enters by extension. Every vertex
/// ends up coloured with every colour exactly `p!` times.
pub fn init_clique_family(
    c: &CorrespondenceCover,
    order: &[Vertex],
) -> Result<BalancedFamily, CaterpillarError> {
    let n = c.base.vertex_count();
    if n == 0 || order.len() != n || c.base.edge_count() != n * (n - 1) / 2 {
        return Err(CaterpillarError::Mismatch(
            "expected a complete base listed once in the order".into(),
        ));
    }
    let p = n - 1;
    if p > CATERPILLAR_WIDTH_LIMIT {
        return Err(CaterpillarError::Budget(p));
    }
    for v in 1..=n {
        if c.list_size(v) != p + 1 {
            return Err(CaterpillarError::Mismatch(format!(
                "vertex {} has {} colours, expected {}",
                v,
                c.list_size(v),
                p + 1
            )));
        }
    }
    let mut fam = seed_family(p, order[0]);
    for j in 1..n {
        fam = extend_family(&fam, &order[..j], order[j], c)?;
    }
    check_uniform_colour_counts(&fam)?;
    debug_assert!(check_fully_balanced(&fam, order));
    Ok(fam)
}

/// Every vertex must be coloured with every colour exactly `p!` times.
fn check_uniform_colour_counts(f: &BalancedFamily) -> Result<(), CaterpillarError> {
    let q = f.p + 1;
    for slot in 0..f.vertices.len() {
        let mut counts = vec![0usize; q];
        for (col, &m) in &f.colourings {
            counts[col[slot] - 1] += m;
        }
        if counts.iter().any(|&c| c != factorial(f.p)) {
            return Err(CaterpillarError::Balance(format!(
                "vertex {} colour counts {:?}, expected all {}",
                f.vertices[slot],
                counts,
                factorial(f.p)
            )));
        }
    }
    Ok(())
}

/// Runs the balanced-family construction along a caterpillar
/// decomposition whose graph the cover lives on: initializes on the first
/// active set and extends once per later set, always ordering cliques so
/// that the departing vertex comes first. Returns the uniform
/// distribution over the final `(p+1)!` colourings, an exact fractional
/// packing of the `(p+1)`-fold cover.
pub fn caterpillar_packing(
    c: &CorrespondenceCover,
    d: &CaterpillarDecomposition,
) -> Result<PackingDistribution, CaterpillarError> {
    let n = c.base.vertex_count();
    let p = d.p;
    if p > CATERPILLAR_WIDTH_LIMIT {
        return Err(CaterpillarError::Budget(p));
    }
    d.validate(&c.base)?;
    if c.base != d.caterpillar_graph(n) {
        return Err(CaterpillarError::Mismatch(
            "base graph is not the full caterpillar; embed it first".into(),
        ));
    }
    for v in 1..=n {
        if c.list_size(v) != p + 1 {
            return Err(CaterpillarError::Mismatch(format!(
                "vertex {} has {} colours, expected {}",
                v,
                c.list_size(v),
                p + 1
            )));
        }
    }
    let completed = complete_matchings(c)?;
    let orders = derive_orders(d);
    let a1 = orders.sort_by_departure(&d.active_sets[0]);
    let mut fam = seed_family(p, a1[0]);
    for j in 1..a1.len() {
        fam = extend_family(&fam, &a1[..j], a1[j], &completed)?;
    }
    for i in 1..d.active_sets.len() {
        let prev: BTreeSet<Vertex> = d.active_sets[i - 1].iter().copied().collect();
        let new_vertex = *d.active_sets[i]
            .iter()
            .find(|v| !prev.contains(v))
            .expect("validated decomposition introduces one vertex per set");
        let interface: Vec<Vertex> = d.active_sets[i]
            .iter()
            .copied()
            .filter(|&v| v != new_vertex)
            .collect();
        let prefix = orders.sort_by_departure(&interface);
        fam = extend_family(&fam, &prefix, new_vertex, &completed)?;
        debug_assert!((0..=i).all(|j| {
            check_fully_balanced(&fam, &orders.sort_by_departure(&d.active_sets[j]))
        }));
    }
    if fam.total() != factorial(p + 1) {
        return Err(CaterpillarError::Balance(format!(
            "family holds {} colourings, expected {}",
            fam.total(),
            factorial(p + 1)
        )));
    }
    check_uniform_colour_counts(&fam)?;
    let slot_of: BTreeMap<Vertex, usize> = fam
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let weight = rat(1, factorial(p + 1) as i64);
    let entries: Vec<(Colouring, Rat)> = fam
        .colourings
        .iter()
        .map(|(col, &m)| {
            let by_id: Colouring = (1..=n).map(|v| col[slot_of[&v]]).collect();
            (by_id, rat(m as i64, 1) * &weight)
        })
        .collect();
    let dist = PackingDistribution::new(entries)?;
    check_fractional(c, &dist)?;
    Ok(dist)
}

/// Moves a cover onto the full caterpillar graph of its decomposition;
/// the added edges carry empty matchings, which only leaves the colouring
/// problem easier to satisfy than any completion of them.
pub fn embed_in_caterpillar(
    c: &CorrespondenceCover,
    d: &CaterpillarDecomposition,
) -> Result<CorrespondenceCover, CaterpillarError> {
    d.validate(&c.base)?;
    Ok(CorrespondenceCover {
        base: d.caterpillar_graph(c.base.vertex_count()),
        list_sizes: c.list_sizes.clone(),
        matchings: c.matchings.clone(),
        values: c.values.clone(),
    })
}

fn triangle_lists(c: &CorrespondenceCover) -> Result<usize, CaterpillarError> {
    if c.base != Graph::complete(3) {
        return Err(CaterpillarError::Mismatch("expected a triangle base".into()));
    }
    let q = c.list_size(1);
    if c.list_size(2) != q || c.list_size(3) != q {
        return Err(CaterpillarError::Mismatch("expected equal lists".into()));
    }
    Ok(q)
}

/// Whether some nonnegative weighting of the proper colourings hits every
/// proper pair of every triangle edge with equal total weight `q - 2`,
/// the balance a `q(q-1)(q-2)`-colouring family would have. This is the
/// fractional relaxation of [`triangle_family_feasible`]; a feasible
/// weighting need not round to distinct colourings.
pub fn triangle_balance_feasible(c: &CorrespondenceCover) -> Result<bool, CaterpillarError> {
    let q = triangle_lists(c)?;
    let transversals = enumerate_transversals(c)?;
    let mut rows = Vec::new();
    for (u, v) in [(1usize, 2usize), (1, 3), (2, 3)] {
        let matched: BTreeSet<(usize, usize)> = c.matching(u, v).into_iter().collect();
        for a in 1..=q {
            for b in 1..=q {
                if matched.contains(&(a, b)) {
                    continue;
                }
                let coeffs: Vec<Rat> = transversals
                    .iter()
                    .map(|t| {
                        if t[u - 1] == a && t[v - 1] == b {
                            rat(1, 1)
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect();
                rows.push((coeffs, Cmp::Eq, rat(q as i64 - 2, 1)));
            }
        }
    }
    let problem = LpProblem {
        minimize: true,
        costs: vec![Rat::zero(); transversals.len()],
        rows,
    };
    match solve_lp(&problem) {
        LpResult::Optimal { .. } => Ok(true),
        LpResult::Infeasible { .. } => Ok(false),
        LpResult::Unbounded => Err(CaterpillarError::Balance(
            "feasibility program reported unbounded".into(),
        )),
    }
}

/// Whether distinct proper colourings of a `q`-fold triangle cover can be
/// chosen so that every proper pair of every edge is used by exactly
/// `q - 2` of them; with full matchings the family then has exactly
/// `q(q-1)(q-2)` members.
///
/// Each proper colouring left out of such a family leaves behind three edge
/// pairs that the family must fill without it, so a family exists exactly
/// when discarding whole colourings can drain every pair's surplus over
/// `q - 2` to zero. The search always discards a colouring whose three
/// pairs all still carry surplus, which loses no solutions: in any valid
/// discard set, every member keeps that property until it is taken.
pub fn triangle_family_feasible(c: &CorrespondenceCover) -> Result<bool, CaterpillarError> {
    let q = triangle_lists(c)?;
    let transversals = enumerate_transversals(c)?;
    let pair = |e: usize, a: usize, b: usize| (e * q + a - 1) * q + b - 1;
    let trios: Vec<[usize; 3]> = transversals
        .iter()
        .map(|t| [pair(0, t[0], t[1]), pair(1, t[0], t[2]), pair(2, t[1], t[2])])
        .collect();
    let mut surplus = vec![0i64; 3 * q * q];
    for t in &trios {
        for &p in t {
            surplus[p] += 1;
        }
    }
    for (u, v, e) in [(1usize, 2usize, 0usize), (1, 3, 1), (2, 3, 2)] {
        let matched: BTreeSet<(usize, usize)> = c.matching(u, v).into_iter().collect();
        for a in 1..=q {
            for b in 1..=q {
                if matched.contains(&(a, b)) {
                    continue;
                }
                let p = pair(e, a, b);
                surplus[p] -= q as i64 - 2;
                if surplus[p] < 0 {
                    return Ok(false);
                }
            }
        }
    }
    let mut removed = vec![false; trios.len()];
    let mut nodes = 0u64;
    drain_surplus(&trios, &mut surplus, &mut removed, &mut nodes)
}

/// Depth-first removal of colourings until no pair surplus remains,
/// branching on a maximally constrained surplus pair.
fn drain_surplus(
    trios: &[[usize; 3]],
    surplus: &mut [i64],
    removed: &mut [bool],
    nodes: &mut u64,
) -> Result<bool, CaterpillarError> {
    *nodes += 1;
    if *nodes > budget::budget() {
        return Err(CaterpillarError::SearchBudget(*nodes));
    }
    let mut branch: Option<(i64, Vec<usize>)> = None;
    for (p, &s) in surplus.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let candidates: Vec<usize> = trios
            .iter()
            .enumerate()
            .filter(|(i, t)| {
                !removed[*i] && t.contains(&p) && t.iter().all(|&r| surplus[r] > 0)
            })
            .map(|(i, _)| i)
            .collect();
        if (candidates.len() as i64) < s {
            return Ok(false);
        }
        let slack = candidates.len() as i64 - s;
        if branch.as_ref().is_none_or(|(b, _)| slack < *b) {
            branch = Some((slack, candidates));
        }
    }
    let Some((_, candidates)) = branch else {
        return Ok(true);
    };
    for i in candidates {
        removed[i] = true;
        for &p in &trios[i] {
            surplus[p] -= 1;
        }
        if drain_surplus(trios, surplus, removed, nodes)? {
            return Ok(true);
        }
        for &p in &trios[i] {
            surplus[p] += 1;
        }
        removed[i] = false;
    }
    Ok(false)
}

/// The `q`-fold triangle cover with identity matchings on two edges and the
/// cyclic shift on the third admits no family of `q(q-1)(q-2)` distinct
/// proper colourings using every proper pair of every edge exactly `q - 2`
/// times; returns true when no such family exists. The fractional balance
/// relaxation alone does not settle this: it is feasible here for `q = 4`.
pub fn check_cyclic_shift_infeasible(q: usize) -> Result<bool, CaterpillarError> {
    if !(3..=6).contains(&q) {
        return Err(CaterpillarError::Budget(q));
    }
    Ok(!triangle_family_feasible(&crate::fixtures::shifted_triangle_cover(q))?)
}
