//! Exact fractional chromatic numbers with verifiable certificates.
//!
//! The optimum is a weighting of independent sets covering every vertex
//! with minimum total weight. Small graphs enumerate every maximal
//! independent set up front; larger ones generate covering sets on demand,
//! pricing candidates by a maximum-weight independent set search against
//! the current duals. Either way the result carries a primal covering and
//! a dual vertex weighting that certify the value against each other
//! without trusting the solver.

use crate::cover::{cover_graph, CorrespondenceCover};
use crate::graph::{Graph, Vertex};
use crate::simplex::{Outcome, Simplex};
use crate::{format_rat, parse_rat, rat, Rat};
use num::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

/// Hard cap on solver input size.
pub const FCP_VERTEX_LIMIT: usize = 64;

/// Largest size solved by full maximal-set enumeration.
pub const FCP_ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum FcpError {
    #[error("graph has {vertices} vertices, the solver handles at most {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("solver produced an invalid certificate pair: {0}")]
    Certificate(String),
    #[error("linear program in unexpected state: {0}")]
    Lp(String),
    #[error("malformed certificate text: {0}")]
    Malformed(String),
}

/// Weighted independent sets covering every vertex with total weight at
/// least one; the total weight is an upper bound on the fractional
/// chromatic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalColouring {
    pub sets: Vec<(BTreeSet<Vertex>, Rat)>,
}

impl FractionalColouring {
    pub fn value(&self) -> Rat {
        self.sets.iter().fold(Rat::zero(), |a, (_, w)| a + w)
    }
}

/// Vertex weights whose every independent set sums to at most one; the
/// total weight is a lower bound on the fractional chromatic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualWitness {
    /// `weights[v - 1]` is the weight of vertex `v`.
    pub weights: Vec<Rat>,
}

impl DualWitness {
    pub fn value(&self) -> Rat {
        self.weights.iter().fold(Rat::zero(), |a, w| a + w)
    }
}

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    let n = g.vertex_count();
    let mut adj = vec![0u64; n];
    for (u, v) in g.edges() {
        adj[u - 1] |= 1 << (v - 1);
        adj[v - 1] |= 1 << (u - 1);
    }
    adj
}

struct MwisSearch<'a> {
    order: Vec<usize>,
    weights: &'a [Rat],
    adj: Vec<u64>,
    best_weight: Rat,
    best_set: Vec<Vertex>,
}

impl MwisSearch<'_> {
    fn run(&mut self, pos: usize, avail: u64, cur_weight: &Rat, chosen: &mut Vec<Vertex>) {
        let mut at = pos;
        while at < self.order.len() && avail & (1 << self.order[at]) == 0 {
            at += 1;
        }
        if at == self.order.len() {
            let mut set = chosen.clone();
            set.sort_unstable();
            if *cur_weight > self.best_weight
                || (*cur_weight == self.best_weight && set < self.best_set)
            {
                self.best_weight = cur_weight.clone();
                self.best_set = set;
            }
            return;
        }
        let mut bound = cur_weight.clone();
        for &j in &self.order[at..] {
            if avail & (1 << j) != 0 {
                bound += &self.weights[j];
            }
        }
        if bound < self.best_weight {
            return;
        }
        let v0 = self.order[at];
        chosen.push(v0 + 1);
        let with = cur_weight + &self.weights[v0];
        self.run(at + 1, avail & !(self.adj[v0] | (1 << v0)), &with, chosen);
        chosen.pop();
        self.run(at + 1, avail & !(1 << v0), cur_weight, chosen);
    }
}

/// Maximum-weight independent set by branch and bound, pruning with the
/// sum of the remaining weights. Ties break to the lexicographically
/// smallest vertex set; vertices of nonpositive weight never enter.
pub fn max_weight_independent_set(g: &Graph, weights: &[Rat]) -> (BTreeSet<Vertex>, Rat) {
    let n = g.vertex_count();
    assert!(n <= FCP_VERTEX_LIMIT, "graph too large for bitmask search");
    assert_eq!(weights.len(), n);
    let mut order: Vec<usize> = (0..n).filter(|&j| weights[j] > Rat::zero()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let mut avail = 0u64;
    for &j in &order {
        avail |= 1 << j;
    }
    let mut search = MwisSearch {
        order,
        weights,
        adj: adjacency_masks(g),
        best_weight: Rat::zero(),
        best_set: Vec::new(),
    };
    search.run(0, avail, &Rat::zero(), &mut Vec::new());
    (
        search.best_set.iter().copied().collect(),
        search.best_weight,
    )
}

/// All maximal independent sets, by pivoting over non-neighbourhoods.
pub fn maximal_independent_sets(g: &Graph) -> Vec<BTreeSet<Vertex>> {
    let n = g.vertex_count();
    assert!(n <= FCP_VERTEX_LIMIT, "graph too large for bitmask search");
    if n == 0 {
        return vec![BTreeSet::new()];
    }
    let adj = adjacency_masks(g);
    let full: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
    // Non-neighbourhood masks: candidates compatible with a chosen vertex.
    let compat: Vec<u64> = (0..n).map(|j| full & !adj[j] & !(1u64 << j)).collect();
    let mut out = Vec::new();
    fn expand(r: u64, mut p: u64, mut x: u64, compat: &[u64], out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot = {
            let mut best = usize::MAX;
            let mut best_count = usize::MAX;
            let mut scan = p | x;
            while scan != 0 {
                let j = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                let uncovered = (p & !compat[j]).count_ones() as usize;
                if uncovered < best_count {
                    best_count = uncovered;
                    best = j;
                }
            }
            best
        };
        let mut candidates = p & !compat[pivot];
        while candidates != 0 {
            let j = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            expand(r | (1 << j), p & compat[j], x & compat[j], compat, out);
            p &= !(1u64 << j);
            x |= 1 << j;
        }
    }
    let mut masks = Vec::new();
    expand(0, full, 0, &compat, &mut masks);
    for mask in masks {
        let mut set = BTreeSet::new();
        for j in 0..n {
            if mask & (1 << j) != 0 {
                set.insert(j + 1);
            }
        }
        out.push(set);
    }
    out.sort();
    out
}

fn greedy_maximal_extension(g: &Graph, seed: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    let mut set = seed.clone();
    for v in 1..=g.vertex_count() {
        if !set.contains(&v) && set.iter().all(|&u| !g.has_edge(u, v)) {
            set.insert(v);
        }
    }
    set
}

/// Covering LP over a fixed column family plus optional pricing: columns
/// are independent sets, every vertex needs total weight one, surplus
/// columns absorb overshoot. When `price` is set, optimality triggers a
/// search for a set of dual weight above one, which enters as a new
/// column until none exists.
fn solve_covering(
    g: &Graph,
    initial: Vec<BTreeSet<Vertex>>,
    price: bool,
) -> Result<(Rat, FractionalColouring, DualWitness), FcpError> {
    let n = g.vertex_count();
    let mut columns: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut column_sets: Vec<Option<BTreeSet<Vertex>>> = Vec::new();
    let mut known: BTreeSet<BTreeSet<Vertex>> = BTreeSet::new();
    for set in initial {
        let mut a = vec![Rat::zero(); n];
        for &v in &set {
            a[v - 1] = Rat::one();
        }
        known.insert(set.clone());
        column_sets.push(Some(set));
        columns.push((a, Rat::one()));
    }
    for r in 0..n {
        let mut a = vec![Rat::zero(); n];
        a[r] = -Rat::one();
        column_sets.push(None);
        columns.push((a, Rat::zero()));
    }
    let mut lp = Simplex::new(vec![Rat::one(); n], columns);
    loop {
        match lp.solve() {
            Outcome::Optimal => {}
            other => return Err(FcpError::Lp(format!("covering program came back {other:?}"))),
        }
        if !price {
            break;
        }
        let duals = lp.duals();
        let (set, weight) = max_weight_independent_set(g, &duals);
        if weight <= Rat::one() {
            break;
        }
        let set = greedy_maximal_extension(g, &set);
        if known.contains(&set) {
            return Err(FcpError::Lp(
                "pricing produced a column already present".into(),
            ));
        }
        let mut a = vec![Rat::zero(); n];
        for &v in &set {
            a[v - 1] = Rat::one();
        }
        known.insert(set.clone());
        column_sets.push(Some(set));
        lp.add_column(a, Rat::one());
    }
    let x = lp.primal();
    let mut sets = Vec::new();
    for (j, value) in x.iter().enumerate() {
        if let Some(set) = &column_sets[j] {
            if *value > Rat::zero() {
                sets.push((set.clone(), value.clone()));
            }
        }
    }
    let primal = FractionalColouring { sets };
    let dual = DualWitness {
        weights: lp.duals(),
    };
    Ok((lp.value(), primal, dual))
}

/// Exact fractional chromatic number with a primal covering and a dual
/// vertex weighting of equal value. The certificate pair is re-verified
/// combinatorially before it is returned.
pub fn fractional_chromatic_number(
    g: &Graph,
) -> Result<(Rat, FractionalColouring, DualWitness), FcpError> {
    let n = g.vertex_count();
    if n > FCP_VERTEX_LIMIT {
        return Err(FcpError::TooLarge {
            vertices: n,
            limit: FCP_VERTEX_LIMIT,
        });
    }
    if n == 0 {
        return Ok((
            Rat::zero(),
            FractionalColouring { sets: Vec::new() },
            DualWitness {
                weights: Vec::new(),
            },
        ));
    }
    let (value, primal, dual) = if n <= FCP_ENUMERATION_LIMIT {
        solve_covering(g, maximal_independent_sets(g), false)?
    } else {
        solve_covering(g, greedy_initial_sets(g), true)?
    };
    let report = verify_certificates(g, &primal, &dual);
    if !report.is_valid() {
        return Err(FcpError::Certificate(report.violations.join("; ")));
    }
    if report.primal_value != value || report.dual_value != value {
        return Err(FcpError::Certificate(format!(
            "value {} does not match primal {} and dual {}",
            format_rat(&value),
            format_rat(&report.primal_value),
            format_rat(&report.dual_value)
        )));
    }
    Ok((value, primal, dual))
}

/// Greedy maximal sets that together cover every vertex.
fn greedy_initial_sets(g: &Graph) -> Vec<BTreeSet<Vertex>> {
    let mut covered: BTreeSet<Vertex> = BTreeSet::new();
    let mut sets = Vec::new();
    for v in 1..=g.vertex_count() {
        if covered.contains(&v) {
            continue;
        }
        let set = greedy_maximal_extension(g, &BTreeSet::from([v]));
        covered.extend(set.iter().copied());
        sets.push(set);
    }
    sets
}

/// Outcome of checking a certificate pair against a graph; both value
/// fields are filled in even when a side fails.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub violations: Vec<String>,
    pub primal_value: Rat,
    pub dual_value: Rat,
}

impl CertificateReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a covering and a vertex weighting independently of any solver:
/// sets must be independent, cover every vertex once in total, and carry
/// nonnegative weights; the weighting must be nonnegative and sum to at
/// most one on every independent set, which is settled by a fresh
/// maximum-weight search.
pub fn verify_certificates(
    g: &Graph,
    primal: &FractionalColouring,
    dual: &DualWitness,
) -> CertificateReport {
    let n = g.vertex_count();
    let mut violations = Vec::new();
    for (idx, (set, w)) in primal.sets.iter().enumerate() {
        if *w < Rat::zero() {
            violations.push(format!("set {} has negative weight", idx + 1));
        }
        for &v in set {
            if v < 1 || v > n {
                violations.push(format!("set {} mentions vertex {} outside the graph", idx + 1, v));
            }
        }
        for &u in set {
            for &v in set {
                if u < v && g.has_edge(u, v) {
                    violations.push(format!(
                        "set {} contains the edge between {} and {}",
                        idx + 1,
                        u,
                        v
                    ));
                }
            }
        }
    }
    for v in 1..=n {
        let total = primal
            .sets
            .iter()
            .filter(|(set, _)| set.contains(&v))
            .fold(Rat::zero(), |a, (_, w)| a + w);
        if total < Rat::one() {
            violations.push(format!(
                "vertex {} is covered with weight {} below one",
                v,
                format_rat(&total)
            ));
        }
    }
    if dual.weights.len() != n {
        violations.push(format!(
            "dual weights {} vertices, the graph has {}",
            dual.weights.len(),
            n
        ));
    } else {
        for (j, w) in dual.weights.iter().enumerate() {
            if *w < Rat::zero() {
                violations.push(format!("dual weight of vertex {} is negative", j + 1));
            }
        }
        if dual.weights.iter().all(|w| *w >= Rat::zero()) {
            let (set, weight) = max_weight_independent_set(g, &dual.weights);
            if weight > Rat::one() {
                violations.push(format!(
                    "independent set {:?} has dual weight {} above one",
                    set.iter().collect::<Vec<_>>(),
                    format_rat(&weight)
                ));
            }
        }
    }
    let primal_value = primal.value();
    let dual_value = dual.value();
    if violations.is_empty() && dual_value > primal_value {
        violations.push(format!(
            "dual value {} exceeds primal value {}",
            format_rat(&dual_value),
            format_rat(&primal_value)
        ));
    }
    CertificateReport {
        violations,
        primal_value,
        dual_value,
    }
}

/// Whether the fractional chromatic number of the cover graph exceeds
/// `k`, which rules out any `k`-fold packing of covers over the same
/// base. Returns the exact value and its dual witness alongside.
pub fn packing_lower_bound(
    c: &CorrespondenceCover,
    k: usize,
) -> Result<(bool, Rat, DualWitness), FcpError> {
    let h = cover_graph(c);
    let (value, _, dual) = fractional_chromatic_number(&h)?;
    Ok((value > rat(k as i64, 1), value, dual))
}

/// Serialized certificate pair:
///
/// ```text
/// chif v1
/// value 5/2
/// set 1/2 : 1 3
/// dual 1 1/2
/// ```
pub fn certificate_to_text(value: &Rat, primal: &FractionalColouring, dual: &DualWitness) -> String {
    let mut out = String::from("chif v1\n");
    out.push_str(&format!("value {}\n", format_rat(value)));
    for (set, w) in &primal.sets {
        let members: Vec<String> = set.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("set {} : {}\n", format_rat(w), members.join(" ")));
    }
    for (j, w) in dual.weights.iter().enumerate() {
        out.push_str(&format!("dual {} {}\n", j + 1, format_rat(w)));
    }
    out
}

pub fn certificate_from_text(
    input: &str,
) -> Result<(Rat, FractionalColouring, DualWitness), FcpError> {
    let bad = |m: &str| FcpError::Malformed(m.to_string());
    let mut lines = input.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("chif v1") {
        return Err(bad("missing chif v1 header"));
    }
    let mut value = None;
    let mut sets = Vec::new();
    let mut duals: Vec<(usize, Rat)> = Vec::new();
    for line in lines {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("value ") {
            if value.is_some() {
                return Err(bad("duplicate value line"));
            }
            value = Some(parse_rat(rest.trim()).ok_or_else(|| bad("bad value rational"))?);
        } else if let Some(rest) = line.strip_prefix("set ") {
            let (w, members) = rest
                .split_once(':')
                .ok_or_else(|| bad("set line without ':'"))?;
            let weight = parse_rat(w.trim()).ok_or_else(|| bad("bad set weight"))?;
            let mut set = BTreeSet::new();
            for tok in members.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| bad("bad vertex in set line"))?;
                if !set.insert(v) {
                    return Err(bad("repeated vertex in set line"));
                }
            }
            sets.push((set, weight));
        } else if let Some(rest) = line.strip_prefix("dual ") {
            let mut parts = rest.split_whitespace();
            let v: usize = parts
                .next()
                .ok_or_else(|| bad("dual line without vertex"))?
                .parse()
                .map_err(|_| bad("bad vertex in dual line"))?;
            let w = parse_rat(parts.next().ok_or_else(|| bad("dual line without weight"))?)
                .ok_or_else(|| bad("bad dual weight"))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens on dual line"));
            }
            duals.push((v, w));
        } else {
            return Err(bad(&format!("unrecognized line: {line}")));
        }
    }
    let value = value.ok_or_else(|| bad("missing value line"))?;
    duals.sort_by_key(|&(v, _)| v);
    for (i, &(v, _)) in duals.iter().enumerate() {
        if v != i + 1 {
            return Err(bad("dual lines must cover vertices 1..=n exactly once"));
        }
    }
    Ok((
        value,
        FractionalColouring { sets },
        DualWitness {
            weights: duals.into_iter().map(|(_, w)| w).collect(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cartesian_product;

    fn unit_weights(n: usize) -> Vec<Rat> {
        vec![Rat::one(); n]
    }

    fn petersen() -> Graph {
        Graph::new(
            10,
            &[
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (1, 5),
                (6, 8),
                (8, 10),
                (7, 10),
                (7, 9),
                (6, 9),
                (1, 6),
                (2, 7),
                (3, 8),
                (4, 9),
                (5, 10),
            ],
        )
        .unwrap()
    }

    #[test]
    fn mwis_on_complete_graph_picks_one_vertex() {
        let (set, w) = max_weight_independent_set(&Graph::complete(3), &unit_weights(3));
        assert_eq!(w, Rat::one());
        assert_eq!(set, BTreeSet::from([1]));
    }

    #[test]
    fn mwis_on_five_cycle() {
        let (set, w) = max_weight_independent_set(&Graph::cycle(5), &unit_weights(5));
        assert_eq!(w, rat(2, 1));
        assert_eq!(set, BTreeSet::from([1, 3]));
    }

    #[test]
    fn mwis_respects_weights() {
        let weights = vec![rat(3, 1), Rat::one(), Rat::one(), rat(2, 1), Rat::one()];
        let (set, w) = max_weight_independent_set(&Graph::cycle(5), &weights);
        assert_eq!(w, rat(5, 1));
        assert_eq!(set, BTreeSet::from([1, 4]));
    }

    #[test]
    fn mwis_skips_nonpositive_weights() {
        let weights = vec![Rat::one(), Rat::zero(), Rat::one()];
        let (set, w) = max_weight_independent_set(&Graph::path(3), &weights);
        assert_eq!(w, rat(2, 1));
        assert_eq!(set, BTreeSet::from([1, 3]));
    }

    #[test]
    fn maximal_sets_of_small_graphs() {
        assert_eq!(maximal_independent_sets(&Graph::cycle(5)).len(), 5);
        let triangle = maximal_independent_sets(&Graph::complete(3));
        assert_eq!(
            triangle,
            vec![
                BTreeSet::from([1]),
                BTreeSet::from([2]),
                BTreeSet::from([3])
            ]
        );
        assert_eq!(
            maximal_independent_sets(&Graph::empty(3)),
            vec![BTreeSet::from([1, 2, 3])]
        );
    }

    #[test]
    fn complete_graphs_have_integer_value() {
        for n in 1..=5 {
            let (value, _, _) = fractional_chromatic_number(&Graph::complete(n)).unwrap();
            assert_eq!(value, rat(n as i64, 1));
        }
    }

    #[test]
    fn five_cycle_value_is_five_halves() {
        let (value, primal, dual) = fractional_chromatic_number(&Graph::cycle(5)).unwrap();
        assert_eq!(value, rat(5, 2));
        let report = verify_certificates(&Graph::cycle(5), &primal, &dual);
        assert!(report.is_valid());
        assert_eq!(report.primal_value, rat(5, 2));
        assert_eq!(report.dual_value, rat(5, 2));
    }

    #[test]
    fn vertex_transitive_values_match_vertex_count_over_independence() {
        for g in [Graph::cycle(5), Graph::cycle(7), petersen()] {
            let n = g.vertex_count();
            let (_, alpha) = max_weight_independent_set(&g, &unit_weights(n));
            let (value, _, _) = fractional_chromatic_number(&g).unwrap();
            assert_eq!(value, rat(n as i64, 1) / alpha);
        }
    }

    #[test]
    fn column_generation_agrees_with_enumeration() {
        for g in [
            Graph::cycle(5),
            Graph::cycle(7),
            petersen(),
            cartesian_product(&Graph::complete(3), &Graph::complete(2)),
        ] {
            let by_enumeration = solve_covering(&g, maximal_independent_sets(&g), false)
                .unwrap()
                .0;
            let by_pricing = solve_covering(&g, greedy_initial_sets(&g), true).unwrap();
            assert_eq!(by_pricing.0, by_enumeration);
            assert!(verify_certificates(&g, &by_pricing.1, &by_pricing.2).is_valid());
        }
    }

    #[test]
    fn tampered_primal_is_rejected() {
        let g = Graph::cycle(5);
        let (_, mut primal, dual) = fractional_chromatic_number(&g).unwrap();
        primal.sets[0].1 = &primal.sets[0].1 - rat(1, 4);
        let report = verify_certificates(&g, &primal, &dual);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("below one")));
    }

    #[test]
    fn tampered_dual_is_rejected() {
        let g = Graph::cycle(5);
        let (_, primal, mut dual) = fractional_chromatic_number(&g).unwrap();
        dual.weights[0] = &dual.weights[0] + Rat::one();
        let report = verify_certificates(&g, &primal, &dual);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("above one")));
    }

    #[test]
    fn dependent_set_is_rejected() {
        let g = Graph::complete(2);
        let primal = FractionalColouring {
            sets: vec![(BTreeSet::from([1, 2]), rat(2, 1))],
        };
        let dual = DualWitness {
            weights: vec![Rat::one(), Rat::one()],
        };
        let report = verify_certificates(&g, &primal, &dual);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("contains the edge")));
    }

    #[test]
    fn empty_and_single_vertex_graphs() {
        let (value, _, _) = fractional_chromatic_number(&Graph::empty(0)).unwrap();
        assert_eq!(value, Rat::zero());
        let (value, primal, dual) = fractional_chromatic_number(&Graph::empty(1)).unwrap();
        assert_eq!(value, Rat::one());
        assert!(verify_certificates(&Graph::empty(1), &primal, &dual).is_valid());
    }

    #[test]
    fn identity_triangle_cover_is_not_bounded_past_three() {
        let c = CorrespondenceCover::identity(Graph::complete(3), 3);
        let (beats_three, value, _) = packing_lower_bound(&c, 3).unwrap();
        assert!(!beats_three);
        assert_eq!(value, rat(3, 1));
    }

    #[test]
    fn certificate_text_round_trip() {
        let g = Graph::cycle(5);
        let (value, primal, dual) = fractional_chromatic_number(&g).unwrap();
        let text = certificate_to_text(&value, &primal, &dual);
        let (value2, primal2, dual2) = certificate_from_text(&text).unwrap();
        assert_eq!(value2, value);
        assert_eq!(primal2, primal);
        assert_eq!(dual2, dual);
        assert!(verify_certificates(&g, &primal2, &dual2).is_valid());
    }

    #[test]
    fn malformed_certificates_are_rejected() {
        assert!(certificate_from_text("value 1/2\n").is_err());
        assert!(certificate_from_text("chif v1\nset 1/2 : 1\n").is_err());
        assert!(certificate_from_text("chif v1\nvalue 1\ndual 2 1\n").is_err());
        assert!(certificate_from_text("chif v1\nvalue 1\nwat\n").is_err());
    }
}
