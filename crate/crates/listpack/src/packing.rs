//! Packing distributions over proper colourings, with exact rational
//! weights, validation, transversal enumeration, and mixing.

use crate::budget;
use crate::cover::{Colouring, CorrespondenceCover};
use crate::{rat, Rat};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackingError {
    #[error("transversal space of size {0} exceeds budget {1}")]
    BudgetExceeded(u128, u64),
    #[error("mixture weights sum to {0}, expected 1")]
    BadMixtureWeights(String),
    #[error("negative weight in distribution")]
    NegativeWeight,
    #[error("malformed packing file: {0}")]
    Malformed(String),
}

/// Per-vertex probability floor, indexed `eps[v - 1]`, each in `[0, 1]`.
pub type EpsilonProfile = Vec<Rat>;

/// A finitely supported probability distribution on colourings. Support is
/// kept sorted with duplicates merged, so equal distributions compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingDistribution {
    support: Vec<(Colouring, Rat)>,
}

impl PackingDistribution {
    /// Normalising constructor: drops zero weights, merges duplicates,
    /// sorts by colouring. Rejects negative weights; does not rescale.
    pub fn new(entries: Vec<(Colouring, Rat)>) -> Result<Self, PackingError> {
        let mut merged: BTreeMap<Colouring, Rat> = BTreeMap::new();
        for (col, w) in entries {
            if w < Rat::zero() {
                return Err(PackingError::NegativeWeight);
            }
            if w.is_zero() {
                continue;
            }
            *merged.entry(col).or_insert_with(Rat::zero) += w;
        }
        Ok(PackingDistribution {
            support: merged.into_iter().collect(),
        })
    }

    pub fn singleton(colouring: Colouring) -> Self {
        PackingDistribution {
            support: vec![(colouring, Rat::one())],
        }
    }

    pub fn uniform(colourings: Vec<Colouring>) -> Self {
        let w = rat(1, colourings.len() as i64);
        PackingDistribution::new(colourings.into_iter().map(|c| (c, w.clone())).collect())
            .expect("uniform weights are positive")
    }

    pub fn support(&self) -> &[(Colouring, Rat)] {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn total_weight(&self) -> Rat {
        self.support
            .iter()
            .fold(Rat::zero(), |acc, (_, w)| acc + w)
    }

    /// Probability that the colouring picks index `i` at vertex `v`.
    pub fn probability(&self, v: usize, i: usize) -> Rat {
        self.support
            .iter()
            .filter(|(col, _)| col[v - 1] == i)
            .fold(Rat::zero(), |acc, (_, w)| acc + w)
    }

    /// All colour probabilities at once: `out[v - 1][i - 1]`.
    pub fn probabilities(&self, list_sizes: &[usize]) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = list_sizes
            .iter()
            .map(|&k| vec![Rat::zero(); k])
            .collect();
        for (col, w) in &self.support {
            for (vi, &ci) in col.iter().enumerate() {
                out[vi][ci - 1] += w;
            }
        }
        out
    }

    /// Pushes every support colouring through `f`, merging collisions.
    pub fn map_colourings<F: Fn(&Colouring) -> Colouring>(&self, f: F) -> Self {
        PackingDistribution::new(
            self.support
                .iter()
                .map(|(col, w)| (f(col), w.clone()))
                .collect(),
        )
        .expect("weights unchanged")
    }

    /// Independent product over disjoint vertex index sets: colourings of
    /// length `n` are assembled by writing `self`'s colouring through
    /// `own_slots` and `other`'s through `other_slots` (0-based positions).
    pub fn product(
        &self,
        other: &PackingDistribution,
        n: usize,
        own_slots: &[usize],
        other_slots: &[usize],
    ) -> Self {
        let mut entries = Vec::with_capacity(self.support.len() * other.support.len());
        for (a, wa) in &self.support {
            for (b, wb) in &other.support {
                let mut col = vec![0usize; n];
                for (i, &slot) in own_slots.iter().enumerate() {
                    col[slot] = a[i];
                }
                for (i, &slot) in other_slots.iter().enumerate() {
                    col[slot] = b[i];
                }
                entries.push((col, wa * wb));
            }
        }
        PackingDistribution::new(entries).expect("products of nonnegative weights")
    }
}

/// What [`validate_packing`] checks the colour probabilities against.
#[derive(Debug, Clone)]
pub enum PackingTarget {
    /// Every colour of every vertex has probability exactly `1/|L(v)|`.
    /// Equality rather than a lower bound: the probabilities over one list
    /// sum to 1, so meeting the floor everywhere forces equality.
    Fractional,
    /// Every colour of vertex `v` has probability at least `eps[v - 1]`.
    Epsilon(EpsilonProfile),
}

#[derive(Debug, Clone, Default)]
pub struct PackingReport {
    pub violations: Vec<String>,
}

impl PackingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_packing(
    c: &CorrespondenceCover,
    d: &PackingDistribution,
    target: &PackingTarget,
) -> PackingReport {
    let mut report = PackingReport::default();
    for (w, _) in d.support.iter().map(|(c, w)| (w, c)) {
        if *w < Rat::zero() {
            report.violations.push("negative weight".into());
        }
    }
    let total = d.total_weight();
    if !total.is_one() {
        report
            .violations
            .push(format!("weights sum to {}, expected 1", total));
    }
    for (col, _) in &d.support {
        if !c.is_valid_colouring(col) {
            report
                .violations
                .push(format!("support colouring {:?} is not proper", col));
        }
    }
    if !report.is_valid() {
        return report;
    }
    let probs = d.probabilities(&c.list_sizes);
    for v in c.base.vertices() {
        for i in 1..=c.list_size(v) {
            let p = &probs[v - 1][i - 1];
            match target {
                PackingTarget::Fractional => {
                    let want = rat(1, c.list_size(v) as i64);
                    if *p != want {
                        report.violations.push(format!(
                            "colour ({}, {}) has probability {}, expected {}",
                            v, i, p, want
                        ));
                    }
                }
                PackingTarget::Epsilon(eps) => {
                    if *p < eps[v - 1] {
                        report.violations.push(format!(
                            "colour ({}, {}) has probability {} below floor {}",
                            v,
                            i,
                            p,
                            eps[v - 1]
                        ));
                    }
                }
            }
        }
    }
    report
}

/// Enumerates every proper colouring in lexicographic order (vertex 1
/// first, lowest index first). Errors when the raw product of list sizes
/// exceeds the budget.
pub fn enumerate_transversals(
    c: &CorrespondenceCover,
) -> Result<Vec<Colouring>, PackingError> {
    enumerate_transversals_with_budget(c, budget::budget())
}

pub fn enumerate_transversals_with_budget(
    c: &CorrespondenceCover,
    limit: u64,
) -> Result<Vec<Colouring>, PackingError> {
    let space: u128 = c
        .list_sizes
        .iter()
        .try_fold(1u128, |acc, &k| acc.checked_mul(k as u128))
        .unwrap_or(u128::MAX);
    if space > limit as u128 {
        return Err(PackingError::BudgetExceeded(space, limit));
    }
    let n = c.base.vertex_count();
    // Forbidden pairs against earlier neighbours only; scan order is the
    // vertex id order, so each vertex checks a fixed earlier set.
    let mut earlier: Vec<Vec<(usize, Vec<(usize, usize)>)>> = vec![Vec::new(); n];
    for (u, v) in c.base.edges() {
        earlier[v - 1].push((u, c.matching(u, v)));
    }
    let mut out = Vec::new();
    let mut col = vec![0usize; n];
    fn dfs(
        c: &CorrespondenceCover,
        earlier: &[Vec<(usize, Vec<(usize, usize)>)>],
        col: &mut Colouring,
        v: usize,
        out: &mut Vec<Colouring>,
    ) {
        let n = c.base.vertex_count();
        if v > n {
            out.push(col.clone());
            return;
        }
        'colour: for i in 1..=c.list_size(v) {
            for (u, pairs) in &earlier[v - 1] {
                if pairs.contains(&(col[*u - 1], i)) {
                    continue 'colour;
                }
            }
            col[v - 1] = i;
            dfs(c, earlier, col, v + 1, out);
        }
        col[v - 1] = 0;
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        dfs(c, &earlier, &mut col, 1, &mut out);
    }
    Ok(out)
}

/// Convex combination. Part weights must be nonnegative and sum to 1.
pub fn mix(parts: &[(Rat, PackingDistribution)]) -> Result<PackingDistribution, PackingError> {
    let total = parts
        .iter()
        .fold(Rat::zero(), |acc, (w, _)| acc + w);
    if !total.is_one() {
        return Err(PackingError::BadMixtureWeights(total.to_string()));
    }
    let mut entries = Vec::new();
    for (w, d) in parts {
        if *w < Rat::zero() {
            return Err(PackingError::NegativeWeight);
        }
        for (col, dw) in &d.support {
            entries.push((col.clone(), w * dw));
        }
    }
    PackingDistribution::new(entries)
}

impl PackingDistribution {
    /// Packing file form, tied to its cover by the cover digest.
    pub fn to_text(&self, cover_sha256: &str) -> String {
        let mut s = String::from("packing v1\n");
        let _ = writeln!(s, "cover {}", cover_sha256);
        for (col, w) in &self.support {
            let words: Vec<String> = col.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "weight {} : {}", crate::format_rat(w), words.join(" "));
        }
        s
    }

    /// Parses a packing file; returns the recorded cover digest and the
    /// distribution. Weight and colouring validity are checked against the
    /// cover separately via [`validate_packing`].
    pub fn from_text(input: &str) -> Result<(String, PackingDistribution), PackingError> {
        let mut lines = input.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some("packing v1") => {}
            other => {
                return Err(PackingError::Malformed(format!(
                    "expected 'packing v1' header, found {:?}",
                    other
                )))
            }
        }
        let sha = match lines.next() {
            Some(l) if l.starts_with("cover ") => l["cover ".len()..].trim().to_string(),
            other => {
                return Err(PackingError::Malformed(format!(
                    "expected cover digest line, found {:?}",
                    other
                )))
            }
        };
        let mut entries = Vec::new();
        for line in lines {
            let rest = line
                .strip_prefix("weight ")
                .ok_or_else(|| PackingError::Malformed(format!("bad line: {}", line)))?;
            let (wtxt, cols) = rest
                .split_once(':')
                .ok_or_else(|| PackingError::Malformed(format!("bad line: {}", line)))?;
            let w = crate::parse_rat(wtxt.trim())
                .ok_or_else(|| PackingError::Malformed(format!("bad weight: {}", wtxt)))?;
            let col: Result<Colouring, _> =
                cols.split_whitespace().map(|c| c.parse()).collect();
            let col =
                col.map_err(|_| PackingError::Malformed(format!("bad colouring: {}", cols)))?;
            entries.push((col, w));
        }
        Ok((sha, PackingDistribution::new(entries)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use proptest::prelude::*;

    #[test]
    fn single_vertex_two_list_uniform_is_fractional() {
        let c = CorrespondenceCover::unmatched(Graph::empty(1), vec![2]);
        let d = PackingDistribution::uniform(vec![vec![1], vec![2]]);
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        assert_eq!(d.probability(1, 1), rat(1, 2));
    }

    #[test]
    fn k2_identity_forced_packing() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let d = PackingDistribution::uniform(vec![vec![1, 2], vec![2, 1]]);
        assert!(validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        for v in 1..=2 {
            for i in 1..=2 {
                assert_eq!(d.probability(v, i), rat(1, 2));
            }
        }
    }

    #[test]
    fn meeting_floor_without_equality_is_rejected() {
        let c = CorrespondenceCover::unmatched(Graph::empty(1), vec![2]);
        let d = PackingDistribution::new(vec![
            (vec![1], rat(2, 3)),
            (vec![2], rat(1, 3)),
        ])
        .unwrap();
        assert!(!validate_packing(&c, &d, &PackingTarget::Fractional).is_valid());
        let eps = vec![rat(1, 3)];
        assert!(validate_packing(&c, &d, &PackingTarget::Epsilon(eps)).is_valid());
        let tight = vec![rat(1, 2)];
        assert!(!validate_packing(&c, &d, &PackingTarget::Epsilon(tight)).is_valid());
    }

    #[test]
    fn improper_support_is_rejected() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let d = PackingDistribution::uniform(vec![vec![1, 1], vec![2, 2]]);
        let report = validate_packing(&c, &d, &PackingTarget::Fractional);
        assert!(!report.is_valid());
        assert!(report.violations[0].contains("not proper"));
    }

    #[test]
    fn enumerate_k2_and_k3_identity() {
        let c2 = CorrespondenceCover::identity(Graph::complete(2), 2);
        assert_eq!(
            enumerate_transversals(&c2).unwrap(),
            vec![vec![1, 2], vec![2, 1]]
        );
        let c3 = CorrespondenceCover::identity(Graph::complete(3), 3);
        assert_eq!(enumerate_transversals(&c3).unwrap().len(), 6);
    }

    #[test]
    fn enumerate_shifted_triangle() {
        let mut c = CorrespondenceCover::identity(Graph::complete(3), 3);
        c.matchings
            .insert((2, 3), vec![(1, 2), (2, 3), (3, 1)]);
        let all = enumerate_transversals(&c).unwrap();
        assert_eq!(all.len(), 9);
        for col in &all {
            assert!(c.is_valid_colouring(col));
        }
    }

    #[test]
    fn enumeration_respects_budget() {
        let c = CorrespondenceCover::identity(Graph::complete(3), 3);
        let err = enumerate_transversals_with_budget(&c, 10).unwrap_err();
        assert!(matches!(err, PackingError::BudgetExceeded(27, 10)));
        assert!(enumerate_transversals(&c).is_ok());
    }

    #[test]
    fn mix_identity_and_two_point() {
        let d = PackingDistribution::singleton(vec![1]);
        assert_eq!(mix(&[(rat(1, 1), d.clone())]).unwrap(), d);
        let e = PackingDistribution::singleton(vec![2]);
        let m = mix(&[(rat(1, 2), d.clone()), (rat(1, 2), e)]).unwrap();
        assert_eq!(m.support_size(), 2);
        assert_eq!(m.probability(1, 1), rat(1, 2));
    }

    #[test]
    fn mixing_copies_of_same_distribution_merges() {
        let d = PackingDistribution::uniform(vec![vec![1], vec![2]]);
        let m = mix(&[
            (rat(1, 3), d.clone()),
            (rat(1, 3), d.clone()),
            (rat(1, 3), d.clone()),
        ])
        .unwrap();
        assert_eq!(m, d);
    }

    #[test]
    fn mix_rejects_bad_weight_sum() {
        let d = PackingDistribution::singleton(vec![1]);
        assert!(matches!(
            mix(&[(rat(1, 2), d)]),
            Err(PackingError::BadMixtureWeights(_))
        ));
    }

    #[test]
    fn packing_text_round_trip() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let d = PackingDistribution::uniform(vec![vec![1, 2], vec![2, 1]]);
        let txt = d.to_text(&c.sha256());
        let (sha, again) = PackingDistribution::from_text(&txt).unwrap();
        assert_eq!(sha, c.sha256());
        assert_eq!(again, d);
    }

    proptest! {
        #[test]
        fn enumeration_is_sorted_and_proper(seed in 0u64..500) {
            let mut state = seed.wrapping_add(1);
            let mut next = move || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 33) as usize
            };
            let n = next() % 4 + 1;
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    if next() % 2 == 0 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let sizes: Vec<usize> = (0..n).map(|_| next() % 3 + 1).collect();
            let mut c = CorrespondenceCover::unmatched(g.clone(), sizes.clone());
            for (u, v) in g.edges() {
                let cap = sizes[u - 1].min(sizes[v - 1]);
                let m = next() % (cap + 1);
                let mut left: Vec<usize> = (1..=sizes[u - 1]).collect();
                let mut right: Vec<usize> = (1..=sizes[v - 1]).collect();
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
            let all = enumerate_transversals(&c).unwrap();
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(&all, &sorted);
            for col in &all {
                prop_assert!(c.is_valid_colouring(col));
            }
        }

        #[test]
        fn mixing_preserves_probability_linearly(w_num in 0i64..=4) {
            let w = rat(w_num, 4);
            let d1 = PackingDistribution::uniform(vec![vec![1], vec![2]]);
            let d2 = PackingDistribution::singleton(vec![1]);
            let m = mix(&[(w.clone(), d1.clone()), (Rat::one() - w.clone(), d2.clone())]).unwrap();
            let expect =
                w.clone() * d1.probability(1, 1) + (Rat::one() - w) * d2.probability(1, 1);
            prop_assert_eq!(m.probability(1, 1), expect);
            prop_assert!(m.total_weight().is_one());
        }
    }
}
