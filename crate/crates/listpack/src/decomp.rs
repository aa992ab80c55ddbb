//! Pathwidth (caterpillar) decompositions, elimination forests, and the
//! orders derived from a decomposition.
//!
//! A `p`-caterpillar on `n >= p + 1` vertices is built by starting from a
//! clique on `p + 1` vertices and repeatedly glueing a new vertex onto a
//! `p`-clique of the previous step. The active sets `A_1, ..., A_{n-p}`
//! record the clique used at each step: `|A_i| = p + 1`, consecutive sets
//! share exactly `p` vertices, and the vertex in `A_{i+1} \ A_i` is new.
//! A graph has pathwidth at most `p` iff it embeds into a `p`-caterpillar.

use crate::graph::{Graph, Vertex};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error("decomposition invalid: {0}")]
    Invalid(String),
    #[error("vertex count {0} exceeds the exact-search limit {1}")]
    ExceedsLimit(usize, usize),
    #[error("malformed decomposition file: {0}")]
    Malformed(String),
}

/// Hard cap for the exact pathwidth search.
pub const PATHWIDTH_VERTEX_LIMIT: usize = 24;

/// Active sets of a caterpillar embedding, in construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaterpillarDecomposition {
    pub p: usize,
    /// `n - p` sets of `p + 1` vertices each. The order of `active_sets[0]`
    /// fixes the start of the forward order; later sets append one new
    /// vertex each.
    pub active_sets: Vec<Vec<Vertex>>,
}

impl CaterpillarDecomposition {
    /// Checks the caterpillar shape against `g`: set sizes, one-new-vertex
    /// steps, interface sizes, full vertex coverage, and that every edge of
    /// `g` lies inside some active set.
    pub fn validate(&self, g: &Graph) -> Result<(), DecompError> {
        let n = g.vertex_count();
        let p = self.p;
        if n < p + 1 {
            return Err(DecompError::Invalid(format!(
                "graph has {} vertices but p = {} needs at least {}",
                n,
                p,
                p + 1
            )));
        }
        if self.active_sets.len() != n - p {
            return Err(DecompError::Invalid(format!(
                "expected {} active sets, found {}",
                n - p,
                self.active_sets.len()
            )));
        }
        let mut seen: BTreeSet<Vertex> = BTreeSet::new();
        let mut prev: BTreeSet<Vertex> = BTreeSet::new();
        for (i, set) in self.active_sets.iter().enumerate() {
            let as_set: BTreeSet<Vertex> = set.iter().copied().collect();
            if as_set.len() != set.len() || set.len() != p + 1 {
                return Err(DecompError::Invalid(format!(
                    "active set {} must list {} distinct vertices",
                    i + 1,
                    p + 1
                )));
            }
            for &v in set {
                if v < 1 || v > n {
                    return Err(DecompError::Invalid(format!(
                        "active set {} mentions vertex {} outside 1..={}",
                        i + 1,
                        v,
                        n
                    )));
                }
            }
            if i == 0 {
                seen.extend(&as_set);
            } else {
                let new: Vec<Vertex> = as_set.difference(&prev).copied().collect();
                if new.len() != 1 {
                    return Err(DecompError::Invalid(format!(
                        "active set {} must add exactly one vertex over its predecessor, adds {:?}",
                        i + 1,
                        new
                    )));
                }
                if seen.contains(&new[0]) {
                    return Err(DecompError::Invalid(format!(
                        "vertex {} re-enters at active set {}",
                        new[0],
                        i + 1
                    )));
                }
                seen.insert(new[0]);
            }
            prev = as_set;
        }
        if seen.len() != n {
            return Err(DecompError::Invalid(format!(
                "active sets cover {} of {} vertices",
                seen.len(),
                n
            )));
        }
        for (u, v) in g.edges() {
            let inside = self.active_sets.iter().any(|s| s.contains(&u) && s.contains(&v));
            if !inside {
                return Err(DecompError::Invalid(format!(
                    "edge ({}, {}) lies in no active set",
                    u, v
                )));
            }
        }
        Ok(())
    }

    /// The caterpillar supergraph: the union of cliques on the active sets.
    pub fn caterpillar_graph(&self, n: usize) -> Graph {
        let mut edges = Vec::new();
        for set in &self.active_sets {
            for (i, &u) in set.iter().enumerate() {
                for &v in &set[i + 1..] {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, &edges).expect("caterpillar edges are valid")
    }

    pub fn to_text(&self, n: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "caterpillar p={} n={}", self.p, n);
        for (i, set) in self.active_sets.iter().enumerate() {
            let words: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "A {}: {}", i + 1, words.join(" "));
        }
        s
    }

    pub fn from_text(input: &str) -> Result<(Self, usize), DecompError> {
        let mut lines = input.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| DecompError::Malformed("empty file".into()))?;
        let header = header.trim();
        let rest = header
            .strip_prefix("caterpillar ")
            .ok_or_else(|| DecompError::Malformed(format!("bad header: {}", header)))?;
        let mut p = None;
        let mut n = None;
        for tok in rest.split_whitespace() {
            if let Some(v) = tok.strip_prefix("p=") {
                p = v.parse().ok();
            } else if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse().ok();
            }
        }
        let (p, n): (usize, usize) = match (p, n) {
            (Some(p), Some(n)) => (p, n),
            _ => return Err(DecompError::Malformed(format!("bad header: {}", header))),
        };
        let mut active_sets = Vec::new();
        for line in lines {
            let line = line.trim();
            let rest = line
                .strip_prefix("A ")
                .ok_or_else(|| DecompError::Malformed(format!("bad line: {}", line)))?;
            let (idx, verts) = rest
                .split_once(':')
                .ok_or_else(|| DecompError::Malformed(format!("bad line: {}", line)))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| DecompError::Malformed(format!("bad index: {}", line)))?;
            if idx != active_sets.len() + 1 {
                return Err(DecompError::Malformed(format!(
                    "active sets out of order at index {}",
                    idx
                )));
            }
            let set: Result<Vec<Vertex>, _> =
                verts.split_whitespace().map(|w| w.parse()).collect();
            let set = set.map_err(|_| DecompError::Malformed(format!("bad vertex: {}", line)))?;
            active_sets.push(set);
        }
        Ok((CaterpillarDecomposition { p, active_sets }, n))
    }
}

/// The three orders read off a caterpillar decomposition.
///
/// * `forward`: `A_1` in its given order, then each step's new vertex.
/// * `reverse`: the last active set in reverse forward order, then the
///   departing vertices `A_i \ A_{i+1}` for `i = n-p-1, ..., 1`.
/// * `reverse_reversed`: `reverse` read backwards. Restricting it to any
///   `A_i` puts the departing vertex `A_i \ A_{i+1}` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedOrders {
    pub forward: Vec<Vertex>,
    pub reverse: Vec<Vertex>,
    pub reverse_reversed: Vec<Vertex>,
}

pub fn derive_orders(d: &CaterpillarDecomposition) -> DerivedOrders {
    let mut forward: Vec<Vertex> = d.active_sets[0].clone();
    let mut in_forward: BTreeSet<Vertex> = forward.iter().copied().collect();
    for set in &d.active_sets[1..] {
        for &v in set {
            if in_forward.insert(v) {
                forward.push(v);
            }
        }
    }
    let fpos = |v: Vertex| forward.iter().position(|&w| w == v).expect("in forward");

    let last = d.active_sets.last().expect("nonempty");
    let mut reverse: Vec<Vertex> = last.clone();
    reverse.sort_by_key(|&v| std::cmp::Reverse(fpos(v)));
    for i in (0..d.active_sets.len() - 1).rev() {
        let next: BTreeSet<Vertex> = d.active_sets[i + 1].iter().copied().collect();
        let departing: Vec<Vertex> = d.active_sets[i]
            .iter()
            .copied()
            .filter(|v| !next.contains(v))
            .collect();
        debug_assert_eq!(departing.len(), 1);
        reverse.extend(departing);
    }
    let reverse_reversed: Vec<Vertex> = reverse.iter().rev().copied().collect();
    DerivedOrders {
        forward,
        reverse,
        reverse_reversed,
    }
}

impl DerivedOrders {
    /// Sorts `set` by position in `reverse_reversed`.
    pub fn sort_by_departure(&self, set: &[Vertex]) -> Vec<Vertex> {
        let pos = |v: Vertex| {
            self.reverse_reversed
                .iter()
                .position(|&w| w == v)
                .expect("vertex in order")
        };
        let mut out = set.to_vec();
        out.sort_by_key(|&v| pos(v));
        out
    }
}

/// Exact pathwidth via vertex separation. Searches widths `0, 1, ...` with a
/// branch-and-bound over placement orders (failed prefix states memoised),
/// then converts the optimal order into caterpillar active sets.
pub fn pathwidth_decompose_small(g: &Graph) -> Result<CaterpillarDecomposition, DecompError> {
    let n = g.vertex_count();
    if n > PATHWIDTH_VERTEX_LIMIT {
        return Err(DecompError::ExceedsLimit(n, PATHWIDTH_VERTEX_LIMIT));
    }
    if n == 0 {
        return Err(DecompError::Invalid("graph has no vertices".into()));
    }
    let adj: Vec<u32> = (1..=n)
        .map(|v| {
            g.neighbours(v)
                .iter()
                .fold(0u32, |m, &w| m | (1 << (w - 1)))
        })
        .collect();
    for p in 0..n {
        if let Some(order) = separation_order(n, &adj, p) {
            let bags = order_to_bags(g, &order);
            let active_sets = smooth_bags(g, bags, p);
            let d = CaterpillarDecomposition { p, active_sets };
            d.validate(g).expect("constructed decomposition is valid");
            return Ok(d);
        }
    }
    unreachable!("pathwidth is at most n - 1");
}

/// Boundary size of the placed set: vertices in `placed` with a neighbour
/// outside it.
fn separation_cost(n: usize, adj: &[u32], placed: u32) -> usize {
    let outside = !placed;
    (0..n)
        .filter(|&i| placed & (1 << i) != 0 && adj[i] & outside != 0)
        .count()
}

fn separation_order(n: usize, adj: &[u32], p: usize) -> Option<Vec<Vertex>> {
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut failed: std::collections::HashSet<u32> = std::collections::HashSet::new();
    let mut order = Vec::with_capacity(n);
    fn dfs(
        n: usize,
        adj: &[u32],
        p: usize,
        full: u32,
        placed: u32,
        order: &mut Vec<Vertex>,
        failed: &mut std::collections::HashSet<u32>,
    ) -> bool {
        if placed == full {
            return true;
        }
        for i in 0..n {
            let bit = 1u32 << i;
            if placed & bit != 0 {
                continue;
            }
            let next = placed | bit;
            if failed.contains(&next) {
                continue;
            }
            if separation_cost(n, adj, next) > p {
                failed.insert(next);
                continue;
            }
            order.push(i + 1);
            if dfs(n, adj, p, full, next, order, failed) {
                return true;
            }
            order.pop();
            failed.insert(next);
        }
        false
    }
    if dfs(n, adj, p, full, 0, &mut order, &mut failed) {
        Some(order)
    } else {
        None
    }
}

/// Path-decomposition bags from a placement order: bag `i` holds the placed
/// vertex plus every earlier vertex with a neighbour at position `>= i`.
fn order_to_bags(g: &Graph, order: &[Vertex]) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v - 1] = i;
    }
    (0..n)
        .map(|i| {
            let mut bag: Vec<Vertex> = order[..i]
                .iter()
                .copied()
                .filter(|&u| g.neighbours(u).iter().any(|&w| pos[w - 1] >= i))
                .collect();
            bag.push(order[i]);
            bag.sort_unstable();
            bag
        })
        .collect()
}

/// Converts a path decomposition of width `<= p` into caterpillar active
/// sets: all bags grow to exactly `p + 1` vertices and consecutive bags
/// differ in exactly one vertex. Interval (contiguity) of every vertex's
/// bag range is preserved throughout, which is what makes each step's added
/// vertex new.
fn smooth_bags(g: &Graph, mut bags: Vec<Vec<Vertex>>, p: usize) -> Vec<Vec<Vertex>> {
    let merge_redundant = |bags: &mut Vec<Vec<Vertex>>| {
        let mut i = 0;
        while i + 1 < bags.len() {
            let a: BTreeSet<Vertex> = bags[i].iter().copied().collect();
            let b: BTreeSet<Vertex> = bags[i + 1].iter().copied().collect();
            if a.is_subset(&b) {
                bags.remove(i);
            } else if b.is_subset(&a) {
                bags.remove(i + 1);
            } else {
                i += 1;
            }
        }
    };
    merge_redundant(&mut bags);

    // Pad every bag to p + 1 vertices by borrowing from a neighbour bag.
    loop {
        merge_redundant(&mut bags);
        let Some(i) = bags.iter().position(|b| b.len() < p + 1) else {
            break;
        };
        let bag: BTreeSet<Vertex> = bags[i].iter().copied().collect();
        let mut borrowed = None;
        if i + 1 < bags.len() {
            borrowed = bags[i + 1].iter().copied().find(|v| !bag.contains(v));
        }
        if borrowed.is_none() && i > 0 {
            borrowed = bags[i - 1].iter().copied().find(|v| !bag.contains(v));
        }
        let v = borrowed.expect("a neighbour bag can always lend a vertex");
        bags[i].push(v);
        bags[i].sort_unstable();
    }

    // Interpolate multi-vertex steps into single swaps.
    let mut sets: Vec<Vec<Vertex>> = vec![bags[0].clone()];
    for next in &bags[1..] {
        let cur: BTreeSet<Vertex> = sets.last().unwrap().iter().copied().collect();
        let nxt: BTreeSet<Vertex> = next.iter().copied().collect();
        let drops: Vec<Vertex> = cur.difference(&nxt).copied().collect();
        let adds: Vec<Vertex> = nxt.difference(&cur).copied().collect();
        debug_assert_eq!(drops.len(), adds.len());
        let mut work = cur;
        for (d, a) in drops.into_iter().zip(adds) {
            work.remove(&d);
            work.insert(a);
            sets.push(work.iter().copied().collect());
        }
    }
    debug_assert_eq!(sets.len(), g.vertex_count() - p);
    sets
}

/// Rooted forest where every edge of the underlying graph joins an
/// ancestor-descendant pair. Depth counts vertices on the longest
/// root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationForest {
    /// `parent[v - 1]` is `None` for roots.
    pub parent: Vec<Option<Vertex>>,
}

impl EliminationForest {
    pub fn new(parent: Vec<Option<Vertex>>) -> Self {
        EliminationForest { parent }
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn roots(&self) -> Vec<Vertex> {
        (1..=self.parent.len())
            .filter(|&v| self.parent[v - 1].is_none())
            .collect()
    }

    pub fn children(&self, v: Vertex) -> Vec<Vertex> {
        (1..=self.parent.len())
            .filter(|&w| self.parent[w - 1] == Some(v))
            .collect()
    }

    /// 1-based depth of each vertex (roots have depth 1); errors on cycles
    /// or out-of-range parents.
    pub fn depths(&self) -> Result<Vec<usize>, DecompError> {
        let n = self.parent.len();
        let mut depth = vec![0usize; n];
        for v in 1..=n {
            if depth[v - 1] != 0 {
                continue;
            }
            let mut chain = vec![v];
            let mut cur = v;
            loop {
                match self.parent[cur - 1] {
                    None => {
                        let mut d = 1;
                        for &w in chain.iter().rev() {
                            depth[w - 1] = d;
                            d += 1;
                        }
                        break;
                    }
                    Some(par) => {
                        if par < 1 || par > n {
                            return Err(DecompError::Invalid(format!(
                                "parent {} of vertex {} out of range",
                                par, cur
                            )));
                        }
                        if depth[par - 1] != 0 {
                            let mut d = depth[par - 1] + 1;
                            for &w in chain.iter().rev() {
                                depth[w - 1] = d;
                                d += 1;
                            }
                            break;
                        }
                        if chain.contains(&par) {
                            return Err(DecompError::Invalid(format!(
                                "parent cycle through vertex {}",
                                par
                            )));
                        }
                        chain.push(par);
                        cur = par;
                    }
                }
            }
        }
        Ok(depth)
    }

    pub fn depth(&self) -> Result<usize, DecompError> {
        Ok(self.depths()?.into_iter().max().unwrap_or(0))
    }

    fn is_ancestor(&self, anc: Vertex, mut v: Vertex) -> bool {
        while let Some(par) = self.parent[v - 1] {
            if par == anc {
                return true;
            }
            v = par;
        }
        false
    }

    /// Checks shape against `g`: same vertex count, acyclic parents, and
    /// every edge joining an ancestor-descendant pair.
    pub fn validate(&self, g: &Graph) -> Result<(), DecompError> {
        if self.parent.len() != g.vertex_count() {
            return Err(DecompError::Invalid(format!(
                "forest has {} vertices, graph has {}",
                self.parent.len(),
                g.vertex_count()
            )));
        }
        self.depths()?;
        for (u, v) in g.edges() {
            if !self.is_ancestor(u, v) && !self.is_ancestor(v, u) {
                return Err(DecompError::Invalid(format!(
                    "edge ({}, {}) joins incomparable forest vertices",
                    u, v
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let depth = self.depth().unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "forest depth={}", depth);
        for v in 1..=self.parent.len() {
            match self.parent[v - 1] {
                None => {
                    let _ = writeln!(s, "parent {} root", v);
                }
                Some(p) => {
                    let _ = writeln!(s, "parent {} {}", v, p);
                }
            }
        }
        s
    }

    pub fn from_text(input: &str) -> Result<Self, DecompError> {
        let mut lines = input.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| DecompError::Malformed("empty file".into()))?
            .trim();
        let declared: usize = header
            .strip_prefix("forest depth=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| DecompError::Malformed(format!("bad header: {}", header)))?;
        let mut entries: Vec<(Vertex, Option<Vertex>)> = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "parent" {
                return Err(DecompError::Malformed(format!("bad line: {}", line)));
            }
            let v: Vertex = fields[1]
                .parse()
                .map_err(|_| DecompError::Malformed(format!("bad vertex: {}", line)))?;
            let par = if fields[2] == "root" {
                None
            } else {
                Some(
                    fields[2]
                        .parse()
                        .map_err(|_| DecompError::Malformed(format!("bad parent: {}", line)))?,
                )
            };
            entries.push((v, par));
        }
        let n = entries.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        for (v, par) in entries {
            if v < 1 || v > n || seen[v - 1] {
                return Err(DecompError::Malformed(format!(
                    "vertex {} missing or repeated",
                    v
                )));
            }
            seen[v - 1] = true;
            parent[v - 1] = par;
        }
        let f = EliminationForest::new(parent);
        let actual = f.depth()?;
        if actual != declared {
            return Err(DecompError::Malformed(format!(
                "declared depth {} but parents give depth {}",
                declared, actual
            )));
        }
        Ok(f)
    }
}
