//! The correspondence-cover data model and its transformations.
//!
//! A cover of a base graph `G` assigns each vertex `v` a list of colours,
//! addressed as `(v, i)` with `1 <= i <= |L(v)|`, and each edge `uv` a
//! partial matching between the two lists. A colouring picks one index per
//! list; it is proper when no edge's picked pair is matched. The flattened
//! cover graph materialises lists as cliques and matchings as cross edges,
//! so proper colourings are exactly the independent transversals of that
//! graph.

use crate::graph::{Graph, GraphError, Vertex};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("list sizes differ on edge ({0}, {1})")]
    UnequalLists(Vertex, Vertex),
    #[error("deleting colours would empty the list of vertex {0}")]
    EmptiedList(Vertex),
    #[error("malformed cover file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One colour choice per vertex: `colouring[v - 1]` is a 1-based index into
/// `L(v)`.
pub type Colouring = Vec<usize>;

/// Target list sizes per vertex, indexed `profile[v - 1]`.
pub type Profile = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceCover {
    pub base: Graph,
    /// `list_sizes[v - 1] = |L(v)|`.
    pub list_sizes: Vec<usize>,
    /// Keyed by `(u, v)` with `u < v`; pairs `(a, b)` match `(u, a)` to
    /// `(v, b)`. Edges absent from the map have empty matchings.
    pub matchings: BTreeMap<(Vertex, Vertex), Vec<(usize, usize)>>,
    /// For covers built from concrete colour lists: `values[v - 1][i - 1]`
    /// is the colour value behind index `i` of `L(v)`.
    pub values: Option<Vec<Vec<usize>>>,
}

/// Violations found by [`validate_cover`]; empty means valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CorrespondenceCover {
    /// Cover with the given list sizes and no matched pairs.
    pub fn unmatched(base: Graph, list_sizes: Vec<usize>) -> Self {
        CorrespondenceCover {
            base,
            list_sizes,
            matchings: BTreeMap::new(),
            values: None,
        }
    }

    /// `k`-fold cover with the identity matching on every edge.
    pub fn identity(base: Graph, k: usize) -> Self {
        let n = base.vertex_count();
        let ident: Vec<(usize, usize)> = (1..=k).map(|i| (i, i)).collect();
        let matchings = base.edges().into_iter().map(|e| (e, ident.clone())).collect();
        CorrespondenceCover {
            base,
            list_sizes: vec![k; n],
            matchings,
            values: None,
        }
    }

    pub fn list_size(&self, v: Vertex) -> usize {
        self.list_sizes[v - 1]
    }

    pub fn total_colours(&self) -> usize {
        self.list_sizes.iter().sum()
    }

    /// The matching on edge `uv` oriented from `u`'s side: pairs
    /// `(index in L(u), index in L(v))` regardless of argument order.
    pub fn matching(&self, u: Vertex, v: Vertex) -> Vec<(usize, usize)> {
        if u < v {
            self.matchings.get(&(u, v)).cloned().unwrap_or_default()
        } else {
            self.matchings
                .get(&(v, u))
                .map(|m| m.iter().map(|&(a, b)| (b, a)).collect())
                .unwrap_or_default()
        }
    }

    /// Partner of colour `(u, a)` across edge `uv`, if matched.
    pub fn matched_partner(&self, u: Vertex, a: usize, v: Vertex) -> Option<usize> {
        self.matching(u, v)
            .into_iter()
            .find(|&(x, _)| x == a)
            .map(|(_, b)| b)
    }

    /// True when the colouring is total and no edge's pair is matched.
    pub fn is_valid_colouring(&self, colouring: &Colouring) -> bool {
        if colouring.len() != self.base.vertex_count() {
            return false;
        }
        for v in self.base.vertices() {
            let i = colouring[v - 1];
            if i < 1 || i > self.list_size(v) {
                return false;
            }
        }
        for (u, v) in self.base.edges() {
            let pair = (colouring[u - 1], colouring[v - 1]);
            if self.matching(u, v).contains(&pair) {
                return false;
            }
        }
        true
    }
}

pub fn validate_cover(c: &CorrespondenceCover) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = c.base.vertex_count();
    if c.list_sizes.len() != n {
        report
            .violations
            .push(format!("{} list sizes for {} vertices", c.list_sizes.len(), n));
        return report;
    }
    for v in 1..=n {
        if c.list_sizes[v - 1] == 0 {
            report.violations.push(format!("empty list at vertex {}", v));
        }
    }
    for (&(u, v), pairs) in &c.matchings {
        if !c.base.has_edge(u, v) {
            report
                .violations
                .push(format!("matching on non-edge ({}, {})", u, v));
            continue;
        }
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        for &(a, b) in pairs {
            if a < 1 || a > c.list_sizes[u - 1] || b < 1 || b > c.list_sizes[v - 1] {
                report.violations.push(format!(
                    "pair ({}, {}) on edge ({}, {}) out of list range",
                    a, b, u, v
                ));
            }
            if !left.insert(a) || !right.insert(b) {
                report.violations.push(format!(
                    "not a matching on edge ({}, {}): colour reused by pair ({}, {})",
                    u, v, a, b
                ));
            }
        }
    }
    if let Some(values) = &c.values {
        if values.len() != n {
            report.violations.push("value map length mismatch".into());
        } else {
            for v in 1..=n {
                if values[v - 1].len() != c.list_sizes[v - 1] {
                    report
                        .violations
                        .push(format!("value map size mismatch at vertex {}", v));
                }
            }
        }
    }
    report
}

/// Builds the cover that models list colouring: for every edge, indices of
/// equal colour values are matched. The value map is retained.
pub fn list_cover_from_assignment(g: Graph, lists: &[Vec<usize>]) -> CorrespondenceCover {
    assert_eq!(lists.len(), g.vertex_count());
    let mut matchings = BTreeMap::new();
    for (u, v) in g.edges() {
        let mut pairs = Vec::new();
        for (ai, &av) in lists[u - 1].iter().enumerate() {
            if let Some(bi) = lists[v - 1].iter().position(|&bv| bv == av) {
                pairs.push((ai + 1, bi + 1));
            }
        }
        if !pairs.is_empty() {
            matchings.insert((u, v), pairs);
        }
    }
    CorrespondenceCover {
        list_sizes: lists.iter().map(|l| l.len()).collect(),
        base: g,
        matchings,
        values: Some(lists.to_vec()),
    }
}

/// Pairs unmatched indices of the two sides in ascending order until one
/// side is exhausted.
fn extend_matching_ascending(
    pairs: &[(usize, usize)],
    ku: usize,
    kv: usize,
) -> Vec<(usize, usize)> {
    let left: BTreeSet<usize> = pairs.iter().map(|&(a, _)| a).collect();
    let right: BTreeSet<usize> = pairs.iter().map(|&(_, b)| b).collect();
    let free_left: Vec<usize> = (1..=ku).filter(|a| !left.contains(a)).collect();
    let free_right: Vec<usize> = (1..=kv).filter(|b| !right.contains(b)).collect();
    let mut out = pairs.to_vec();
    out.extend(free_left.into_iter().zip(free_right));
    out.sort_unstable();
    out
}

/// Extends every matching to a perfect matching. Requires the two lists of
/// every edge to have equal size; leftovers pair up in ascending order.
pub fn complete_matchings(c: &CorrespondenceCover) -> Result<CorrespondenceCover, CoverError> {
    for (u, v) in c.base.edges() {
        if c.list_size(u) != c.list_size(v) {
            return Err(CoverError::UnequalLists(u, v));
        }
    }
    Ok(maximize_matchings(c))
}

/// Extends every matching to size `min(|L(u)|, |L(v)|)` by pairing
/// unmatched indices in ascending order. Every proper colouring of the
/// output is proper for the input.
pub fn maximize_matchings(c: &CorrespondenceCover) -> CorrespondenceCover {
    let mut matchings = BTreeMap::new();
    for (u, v) in c.base.edges() {
        let pairs = c.matching(u, v);
        let full = extend_matching_ascending(&pairs, c.list_size(u), c.list_size(v));
        if !full.is_empty() {
            matchings.insert((u, v), full);
        }
    }
    CorrespondenceCover {
        base: c.base.clone(),
        list_sizes: c.list_sizes.clone(),
        matchings,
        values: None,
    }
}

/// Induced sub-cover on `keep`. Returns the cover together with the map
/// from new vertex ids to original ids (ascending originals).
pub fn restrict_cover(
    c: &CorrespondenceCover,
    keep: &BTreeSet<Vertex>,
) -> (CorrespondenceCover, Vec<Vertex>) {
    let (sub, old_ids) = c.base.induced(keep);
    let mut new_id = BTreeMap::new();
    for (i, &old) in old_ids.iter().enumerate() {
        new_id.insert(old, i + 1);
    }
    let list_sizes = old_ids.iter().map(|&v| c.list_sizes[v - 1]).collect();
    let values = c
        .values
        .as_ref()
        .map(|vals| old_ids.iter().map(|&v| vals[v - 1].clone()).collect());
    let mut matchings = BTreeMap::new();
    for (&(u, v), pairs) in &c.matchings {
        if let (Some(&nu), Some(&nv)) = (new_id.get(&u), new_id.get(&v)) {
            // u < v and the renumbering is monotone, so nu < nv.
            matchings.insert((nu, nv), pairs.clone());
        }
    }
    (
        CorrespondenceCover {
            base: sub,
            list_sizes,
            matchings,
            values,
        },
        old_ids,
    )
}

/// Per-vertex map from the indices of a derived cover back to the indices
/// of the cover it was made from: `maps[v - 1][i - 1]` is the original
/// index behind new index `i`.
pub type IndexMaps = Vec<Vec<usize>>;

/// Applies index maps to a colouring of the derived cover.
pub fn lift_colouring(maps: &IndexMaps, colouring: &Colouring) -> Colouring {
    colouring
        .iter()
        .enumerate()
        .map(|(i, &c)| maps[i][c - 1])
        .collect()
}

/// Removes the given colours. Remaining indices compact in order; matchings
/// drop pairs that lost an endpoint. The returned maps lift colourings of
/// the new cover back to the old indices.
pub fn delete_colours(
    c: &CorrespondenceCover,
    removals: &BTreeSet<(Vertex, usize)>,
) -> Result<(CorrespondenceCover, IndexMaps), CoverError> {
    let n = c.base.vertex_count();
    let mut maps: IndexMaps = Vec::with_capacity(n);
    // old index -> new index per vertex, 0 = removed
    let mut fwd: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 1..=n {
        let mut keep = Vec::new();
        let mut f = vec![0usize; c.list_sizes[v - 1]];
        for i in 1..=c.list_sizes[v - 1] {
            if !removals.contains(&(v, i)) {
                keep.push(i);
                f[i - 1] = keep.len();
            }
        }
        if keep.is_empty() {
            return Err(CoverError::EmptiedList(v));
        }
        maps.push(keep);
        fwd.push(f);
    }
    let mut matchings = BTreeMap::new();
    for (&(u, v), pairs) in &c.matchings {
        let kept: Vec<(usize, usize)> = pairs
            .iter()
            .filter_map(|&(a, b)| {
                let na = fwd[u - 1][a - 1];
                let nb = fwd[v - 1][b - 1];
                (na != 0 && nb != 0).then_some((na, nb))
            })
            .collect();
        if !kept.is_empty() {
            matchings.insert((u, v), kept);
        }
    }
    let values = c.values.as_ref().map(|vals| {
        maps.iter()
            .enumerate()
            .map(|(vi, keep)| keep.iter().map(|&i| vals[vi][i - 1]).collect())
            .collect()
    });
    Ok((
        CorrespondenceCover {
            base: c.base.clone(),
            list_sizes: maps.iter().map(|m| m.len()).collect(),
            matchings,
            values,
        },
        maps,
    ))
}

/// Flattens the cover: one vertex per colour in list-by-list order (colour
/// `(v, i)` gets id `offset(v) + i`), cliques inside lists, matching edges
/// across base edges.
pub fn cover_graph(c: &CorrespondenceCover) -> Graph {
    let n = c.base.vertex_count();
    let mut offset = vec![0usize; n + 1];
    for v in 1..=n {
        offset[v] = offset[v - 1] + c.list_sizes[v - 1];
    }
    let id = |v: Vertex, i: usize| offset[v - 1] + i;
    let mut edges = Vec::new();
    for v in 1..=n {
        let k = c.list_sizes[v - 1];
        for i in 1..=k {
            for j in i + 1..=k {
                edges.push((id(v, i), id(v, j)));
            }
        }
    }
    for (&(u, v), pairs) in &c.matchings {
        for &(a, b) in pairs {
            edges.push((id(u, a), id(v, b)));
        }
    }
    Graph::new(offset[n], &edges).expect("cover colours index a valid graph")
}

impl CorrespondenceCover {
    /// Canonical text form: fixed line order, explicit sorted pairs. Equal
    /// covers always serialise identically, so the digest of this text
    /// identifies the cover.
    pub fn to_text(&self) -> String {
        let mut s = String::from("cover v1\n");
        let _ = writeln!(s, "graph {}", self.base.vertex_count());
        for (u, v) in self.base.edges() {
            let _ = writeln!(s, "edge {} {}", u, v);
        }
        for v in self.base.vertices() {
            let _ = writeln!(s, "list {} {}", v, self.list_sizes[v - 1]);
        }
        for (&(u, v), pairs) in &self.matchings {
            let mut sorted = pairs.clone();
            sorted.sort_unstable();
            for (a, b) in sorted {
                let _ = writeln!(s, "match {} {} {} {}", u, v, a, b);
            }
        }
        s
    }

    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }

    pub fn from_text(input: &str) -> Result<CorrespondenceCover, CoverError> {
        let mut lines = input.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some("cover v1") => {}
            other => {
                return Err(CoverError::Malformed(format!(
                    "expected 'cover v1' header, found {:?}",
                    other
                )))
            }
        }
        let mut n = None;
        let mut edges = Vec::new();
        let mut sizes: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut match_lines: Vec<(Vertex, Vertex, String)> = Vec::new();
        for line in lines {
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            match key {
                "graph" => {
                    n = rest
                        .first()
                        .and_then(|w| w.parse().ok())
                        .map(Some)
                        .ok_or_else(|| CoverError::Malformed(format!("bad line: {}", line)))?;
                }
                "edge" => {
                    if rest.len() != 2 {
                        return Err(CoverError::Malformed(format!("bad line: {}", line)));
                    }
                    let u = rest[0]
                        .parse()
                        .map_err(|_| CoverError::Malformed(format!("bad line: {}", line)))?;
                    let v = rest[1]
                        .parse()
                        .map_err(|_| CoverError::Malformed(format!("bad line: {}", line)))?;
                    edges.push((u, v));
                }
                "list" => {
                    if rest.len() != 2 {
                        return Err(CoverError::Malformed(format!("bad line: {}", line)));
                    }
                    let v: Vertex = rest[0]
                        .parse()
                        .map_err(|_| CoverError::Malformed(format!("bad line: {}", line)))?;
                    let k: usize = rest[1]
                        .parse()
                        .map_err(|_| CoverError::Malformed(format!("bad line: {}", line)))?;
                    sizes.insert(v, k);
                }
                "match" => {
                    if rest.len() < 3 {
                        return Err(CoverError::Malformed(format!("bad line: {}", line)));
                    }
                    let u: Vertex = rest[0]
                        .parse()
                        .map_err(|_| CoverError::Malformed(format!("bad line: {}", line)))?;
                    let v: Vertex = rest[1]
                        .parse()
                        .map_err(|_| CoverError::Malformed(format!("bad line: {}", line)))?;
                    match_lines.push((u, v, rest[2..].join(" ")));
                }
                _ => return Err(CoverError::Malformed(format!("bad line: {}", line))),
            }
        }
        let n = n.ok_or_else(|| CoverError::Malformed("missing graph line".into()))?;
        let base = Graph::new(n, &edges)?;
        let mut list_sizes = vec![0usize; n];
        for v in 1..=n {
            match sizes.get(&v) {
                Some(&k) if k >= 1 => list_sizes[v - 1] = k,
                _ => {
                    return Err(CoverError::Malformed(format!(
                        "missing or empty list for vertex {}",
                        v
                    )))
                }
            }
        }
        let mut matchings: BTreeMap<(Vertex, Vertex), Vec<(usize, usize)>> = BTreeMap::new();
        for (u, v, spec) in match_lines {
            if u >= v || !base.has_edge(u, v) {
                return Err(CoverError::Malformed(format!(
                    "match on missing or misordered edge ({}, {})",
                    u, v
                )));
            }
            let entry = matchings.entry((u, v)).or_default();
            if spec == "identity" {
                let k = list_sizes[u - 1].min(list_sizes[v - 1]);
                entry.extend((1..=k).map(|i| (i, i)));
            } else {
                let fields: Vec<&str> = spec.split_whitespace().collect();
                if fields.len() != 2 {
                    return Err(CoverError::Malformed(format!(
                        "bad match spec on edge ({}, {}): {}",
                        u, v, spec
                    )));
                }
                let a = fields[0]
                    .parse()
                    .map_err(|_| CoverError::Malformed(format!("bad pair: {}", spec)))?;
                let b = fields[1]
                    .parse()
                    .map_err(|_| CoverError::Malformed(format!("bad pair: {}", spec)))?;
                entry.push((a, b));
            }
        }
        let cover = CorrespondenceCover {
            base,
            list_sizes,
            matchings,
            values: None,
        };
        let report = validate_cover(&cover);
        if !report.is_valid() {
            return Err(CoverError::Malformed(report.violations.join("; ")));
        }
        Ok(cover)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_cover_of_k3_is_valid() {
        let c = CorrespondenceCover::identity(Graph::complete(3), 3);
        assert!(validate_cover(&c).is_valid());
        assert_eq!(c.total_colours(), 9);
    }

    #[test]
    fn repeated_left_endpoint_is_not_a_matching() {
        let mut c = CorrespondenceCover::unmatched(Graph::complete(2), vec![2, 2]);
        c.matchings.insert((1, 2), vec![(1, 1), (1, 2)]);
        let report = validate_cover(&c);
        assert!(!report.is_valid());
        assert!(report.violations[0].contains("not a matching"));
    }

    #[test]
    fn matching_on_non_edge_is_flagged() {
        let mut c = CorrespondenceCover::unmatched(Graph::path(3), vec![2, 2, 2]);
        c.matchings.insert((1, 3), vec![(1, 1)]);
        assert!(!validate_cover(&c).is_valid());
    }

    #[test]
    fn list_cover_equal_lists_gives_identity() {
        let c = list_cover_from_assignment(Graph::complete(2), &[vec![1, 2], vec![1, 2]]);
        assert_eq!(c.matching(1, 2), vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn list_cover_disjoint_lists_gives_empty_matching() {
        let c = list_cover_from_assignment(Graph::complete(2), &[vec![1, 2], vec![3, 4]]);
        assert!(c.matching(1, 2).is_empty());
    }

    #[test]
    fn list_cover_matching_sizes_count_common_values() {
        let lists = [vec![1, 2, 3], vec![1, 2, 3], vec![2, 3, 4]];
        let c = list_cover_from_assignment(Graph::complete(3), &lists);
        assert_eq!(c.matching(1, 2).len(), 3);
        assert_eq!(c.matching(1, 3).len(), 2);
        assert_eq!(c.matching(2, 3).len(), 2);
    }

    #[test]
    fn matching_orientation_flips() {
        let lists = [vec![1, 2], vec![2, 3]];
        let c = list_cover_from_assignment(Graph::complete(2), &lists);
        assert_eq!(c.matching(1, 2), vec![(2, 1)]);
        assert_eq!(c.matching(2, 1), vec![(1, 2)]);
        assert_eq!(c.matched_partner(1, 2, 2), Some(1));
        assert_eq!(c.matched_partner(2, 1, 1), Some(2));
        assert_eq!(c.matched_partner(1, 1, 2), None);
    }

    #[test]
    fn complete_empty_matching_becomes_identity() {
        let c = CorrespondenceCover::unmatched(Graph::complete(2), vec![3, 3]);
        let full = complete_matchings(&c).unwrap();
        assert_eq!(full.matching(1, 2), vec![(1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn complete_fills_forced_pair() {
        let mut c = CorrespondenceCover::unmatched(Graph::complete(2), vec![2, 2]);
        c.matchings.insert((1, 2), vec![(1, 2)]);
        let full = complete_matchings(&c).unwrap();
        assert_eq!(full.matching(1, 2), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn complete_rejects_unequal_lists() {
        let c = CorrespondenceCover::unmatched(Graph::complete(2), vec![2, 3]);
        assert_eq!(complete_matchings(&c), Err(CoverError::UnequalLists(1, 2)));
    }

    fn all_colourings(c: &CorrespondenceCover) -> Vec<Colouring> {
        let mut out = vec![vec![]];
        for v in c.base.vertices() {
            out = out
                .into_iter()
                .flat_map(|col| {
                    (1..=c.list_size(v)).map(move |i| {
                        let mut next = col.clone();
                        next.push(i);
                        next
                    })
                })
                .collect();
        }
        out
    }

    fn proper_colourings(c: &CorrespondenceCover) -> Vec<Colouring> {
        all_colourings(c)
            .into_iter()
            .filter(|col| c.is_valid_colouring(col))
            .collect()
    }

    #[test]
    fn completion_output_transversals_are_input_transversals() {
        // Deterministic pseudo-random partial 4-fold cover of K4.
        let mut state = 99u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..10 {
            let g = Graph::complete(4);
            let mut c = CorrespondenceCover::unmatched(g.clone(), vec![4; 4]);
            for (u, v) in g.edges() {
                let mut left: Vec<usize> = (1..=4).collect();
                let mut right: Vec<usize> = (1..=4).collect();
                let m = next() % 5;
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
            let full = complete_matchings(&c).unwrap();
            assert!(validate_cover(&full).is_valid());
            let input: BTreeSet<Colouring> = proper_colourings(&c).into_iter().collect();
            for col in proper_colourings(&full) {
                assert!(input.contains(&col));
            }
        }
    }

    #[test]
    fn complete_matchings_is_idempotent() {
        let mut c = CorrespondenceCover::unmatched(Graph::cycle(4), vec![3; 4]);
        c.matchings.insert((1, 2), vec![(2, 3)]);
        let once = complete_matchings(&c).unwrap();
        let twice = complete_matchings(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn restrict_to_all_and_none() {
        let c = CorrespondenceCover::identity(Graph::cycle(4), 2);
        let all: BTreeSet<Vertex> = c.base.vertices().collect();
        let (same, ids) = restrict_cover(&c, &all);
        assert_eq!(same, c);
        assert_eq!(ids, vec![1, 2, 3, 4]);
        let (empty, ids) = restrict_cover(&c, &BTreeSet::new());
        assert_eq!(empty.base.vertex_count(), 0);
        assert!(ids.is_empty());
    }

    #[test]
    fn restrict_renumbers_matchings() {
        let c = CorrespondenceCover::identity(Graph::path(4), 2);
        let keep: BTreeSet<Vertex> = [2, 3, 4].into_iter().collect();
        let (sub, ids) = restrict_cover(&c, &keep);
        assert_eq!(ids, vec![2, 3, 4]);
        assert_eq!(sub.base.edge_count(), 2);
        assert_eq!(sub.matching(1, 2), vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn delete_colour_shrinks_list_and_matchings() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let removals: BTreeSet<(Vertex, usize)> = [(1, 1)].into_iter().collect();
        let (d, maps) = delete_colours(&c, &removals).unwrap();
        assert_eq!(d.list_sizes, vec![1, 2]);
        assert_eq!(d.matching(1, 2), vec![(1, 2)]);
        assert_eq!(maps[0], vec![2]);
        assert_eq!(lift_colouring(&maps, &vec![1, 1]), vec![2, 1]);
    }

    #[test]
    fn delete_rejects_emptying_a_list() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 1);
        let removals: BTreeSet<(Vertex, usize)> = [(2, 1)].into_iter().collect();
        assert_eq!(
            delete_colours(&c, &removals),
            Err(CoverError::EmptiedList(2))
        );
    }

    #[test]
    fn random_deletions_round_trip() {
        let mut state = 7u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..20 {
            let c = CorrespondenceCover::identity(Graph::cycle(5), 3);
            let mut removals = BTreeSet::new();
            for v in 1..=5 {
                if next() % 2 == 0 {
                    removals.insert((v, next() % 3 + 1));
                }
            }
            let (d, maps) = delete_colours(&c, &removals).unwrap();
            assert!(validate_cover(&d).is_valid());
            for col in proper_colourings(&d) {
                let lifted = lift_colouring(&maps, &col);
                assert!(c.is_valid_colouring(&lifted));
            }
        }
    }

    #[test]
    fn cover_graph_of_twofold_k2() {
        let c = CorrespondenceCover::identity(Graph::complete(2), 2);
        let h = cover_graph(&c);
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), 4);
        assert!(h.has_edge(1, 2));
        assert!(h.has_edge(3, 4));
        assert!(h.has_edge(1, 3));
        assert!(h.has_edge(2, 4));
    }

    #[test]
    fn colouring_valid_iff_independent_transversal() {
        let mut state = 1234u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..15 {
            let n = next() % 4 + 2;
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
                let mut left: Vec<usize> = (1..=sizes[u - 1]).collect();
                let mut right: Vec<usize> = (1..=sizes[v - 1]).collect();
                let cap = left.len().min(right.len());
                let m = next() % (cap + 1);
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
            let h = cover_graph(&c);
            let mut offset = vec![0usize];
            for v in 1..=n {
                offset.push(offset[v - 1] + c.list_size(v));
            }
            for col in all_colourings(&c) {
                let picked: Vec<Vertex> = col
                    .iter()
                    .enumerate()
                    .map(|(i, &ci)| offset[i] + ci)
                    .collect();
                let independent = picked.iter().enumerate().all(|(i, &x)| {
                    picked[i + 1..].iter().all(|&y| !h.has_edge(x, y))
                });
                assert_eq!(c.is_valid_colouring(&col), independent);
            }
        }
    }

    #[test]
    fn restrict_commutes_with_cover_graph() {
        let c = CorrespondenceCover::identity(Graph::cycle(5), 2);
        let keep: BTreeSet<Vertex> = [1, 2, 3].into_iter().collect();
        let (sub, ids) = restrict_cover(&c, &keep);
        let direct = cover_graph(&sub);
        let mut offset = vec![0usize];
        for v in 1..=5 {
            offset.push(offset[v - 1] + c.list_size(v));
        }
        let kept_colours: BTreeSet<Vertex> = ids
            .iter()
            .flat_map(|&v| {
                let base = offset[v - 1];
                (1..=c.list_size(v)).map(move |i| base + i)
            })
            .collect();
        let (via_graph, _) = cover_graph(&c).induced(&kept_colours);
        assert_eq!(
            direct.edges().collect::<Vec<_>>(),
            via_graph.edges().collect::<Vec<_>>()
        );
        assert_eq!(direct.vertex_count(), via_graph.vertex_count());
    }

    #[test]
    fn text_round_trip_and_digest_stability() {
        let mut c = CorrespondenceCover::unmatched(Graph::path(3), vec![2, 2, 2]);
        c.matchings.insert((1, 2), vec![(2, 1)]);
        c.matchings.insert((2, 3), vec![(1, 1), (2, 2)]);
        let txt = c.to_text();
        let again = CorrespondenceCover::from_text(&txt).unwrap();
        assert_eq!(again.base, c.base);
        assert_eq!(again.list_sizes, c.list_sizes);
        assert_eq!(again.matchings, c.matchings);
        assert_eq!(again.sha256(), c.sha256());
        assert_eq!(c.sha256().len(), 64);
    }

    #[test]
    fn identity_shortcut_parses() {
        let txt = "cover v1\ngraph 2\nedge 1 2\nlist 1 3\nlist 2 3\nmatch 1 2 identity\n";
        let c = CorrespondenceCover::from_text(txt).unwrap();
        assert_eq!(c.matching(1, 2), vec![(1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn malformed_cover_files_rejected() {
        assert!(CorrespondenceCover::from_text("").is_err());
        assert!(CorrespondenceCover::from_text("cover v1\ngraph 2\nlist 1 2\n").is_err());
        let bad_match = "cover v1\ngraph 2\nlist 1 2\nlist 2 2\nmatch 1 2 1 1\n";
        assert!(CorrespondenceCover::from_text(bad_match).is_err());
    }
}
