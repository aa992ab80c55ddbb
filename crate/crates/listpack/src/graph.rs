//! Simple undirected graphs with 1-based vertex ids.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

/// 1-based vertex id.
pub type Vertex = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed DIMACS header: {0}")]
    MalformedHeader(String),
    #[error("malformed DIMACS line: {0}")]
    MalformedLine(String),
    #[error("vertex id {0} out of range 1..={1}")]
    VertexOutOfRange(Vertex, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("layer partition invalid: {0}")]
    InvalidLayerPartition(String),
}

/// An undirected simple graph. Vertices are `1..=n`; edges are stored
/// normalised as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list. Edges are
    /// normalised and deduplicated; self-loops and out-of-range ids error.
    pub fn new(n: usize, edge_list: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut edges = BTreeSet::new();
        for &(a, b) in edge_list {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if v < 1 || v > n {
                    return Err(GraphError::VertexOutOfRange(v, n));
                }
            }
            edges.insert((a.min(b), a.max(b)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u - 1].push(v);
            adj[v - 1].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, &[]).expect("edgeless graph is always valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut e = Vec::new();
        for u in 1..=n {
            for v in (u + 1)..=n {
                e.push((u, v));
            }
        }
        Graph::new(n, &e).expect("clique edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut e: Vec<_> = (1..n).map(|u| (u, u + 1)).collect();
        e.push((n, 1));
        Graph::new(n, &e).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|u| (u, u + 1)).collect();
        Graph::new(n, &e).expect("path edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        1..=self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v - 1]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v - 1].len()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (1..=self.n).map(|v| self.degree(v)).collect()
    }

    /// Induced subgraph on `keep` (ascending), with vertices renumbered
    /// `1..=keep.len()`. Returns the subgraph and the kept ids in new-id order.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> (Graph, Vec<Vertex>) {
        let kept: Vec<Vertex> = keep.iter().copied().collect();
        let index_of = |v: Vertex| kept.binary_search(&v).map(|i| i + 1);
        let mut e = Vec::new();
        for &(u, v) in &self.edges {
            if let (Ok(nu), Ok(nv)) = (index_of(u), index_of(v)) {
                e.push((nu, nv));
            }
        }
        let g = Graph::new(kept.len(), &e).expect("induced edges are valid");
        (g, kept)
    }

    /// Connected components, each as an ascending vertex list.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 1..=self.n {
            if seen[start - 1] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start - 1] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in self.neighbours(v) {
                    if !seen[w - 1] {
                        seen[w - 1] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p edge {} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "e {} {}", u, v);
        }
        s
    }
}

/// Parses DIMACS graph format: a `p edge <n> <m>` header, `e <u> <v>` edge
/// lines, `c` comment lines. Duplicate edges (either direction) collapse.
pub fn parse_dimacs(input: &str) -> Result<Graph, GraphError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if n.is_some() {
                    return Err(GraphError::MalformedHeader("duplicate header".into()));
                }
                if fields.len() != 4 || fields[1] != "edge" {
                    return Err(GraphError::MalformedHeader(line.into()));
                }
                let nv = fields[2]
                    .parse()
                    .map_err(|_| GraphError::MalformedHeader(line.into()))?;
                let _declared_m: usize = fields[3]
                    .parse()
                    .map_err(|_| GraphError::MalformedHeader(line.into()))?;
                n = Some(nv);
            }
            "e" => {
                let n = n.ok_or_else(|| {
                    GraphError::MalformedHeader("edge line before header".into())
                })?;
                if fields.len() != 3 {
                    return Err(GraphError::MalformedLine(line.into()));
                }
                let u: Vertex = fields[1]
                    .parse()
                    .map_err(|_| GraphError::MalformedLine(line.into()))?;
                let v: Vertex = fields[2]
                    .parse()
                    .map_err(|_| GraphError::MalformedLine(line.into()))?;
                if u == v {
                    return Err(GraphError::SelfLoop(u));
                }
                for x in [u, v] {
                    if x < 1 || x > n {
                        return Err(GraphError::VertexOutOfRange(x, n));
                    }
                }
                edges.push((u, v));
            }
            _ => return Err(GraphError::MalformedLine(line.into())),
        }
    }
    let n = n.ok_or_else(|| GraphError::MalformedHeader("missing p edge header".into()))?;
    Graph::new(n, &edges)
}

/// A vertex order together with each vertex's forward degree (number of
/// neighbours placed later in the order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrder {
    pub order: Vec<Vertex>,
    /// Indexed by vertex id minus one.
    pub forward_degrees: Vec<usize>,
}

impl VertexOrder {
    pub fn new(g: &Graph, order: Vec<Vertex>) -> Self {
        let mut pos = vec![0usize; g.vertex_count()];
        for (i, &v) in order.iter().enumerate() {
            pos[v - 1] = i;
        }
        let forward_degrees = (1..=g.vertex_count())
            .map(|v| {
                g.neighbours(v)
                    .iter()
                    .filter(|&&w| pos[w - 1] > pos[v - 1])
                    .count()
            })
            .collect();
        VertexOrder {
            order,
            forward_degrees,
        }
    }

    pub fn forward_degree(&self, v: Vertex) -> usize {
        self.forward_degrees[v - 1]
    }

    /// Maximum forward degree over all vertices.
    pub fn width(&self) -> usize {
        self.forward_degrees.iter().copied().max().unwrap_or(0)
    }
}

/// Degeneracy order by repeated minimum-degree removal; ties break towards
/// the smallest vertex id. The returned order lists vertices in removal
/// order, so each vertex's forward degree is its degree at removal time and
/// the maximum forward degree equals the degeneracy.
pub fn degeneracy_order(g: &Graph) -> VertexOrder {
    let n = g.vertex_count();
    let mut removed = vec![false; n];
    let mut deg: Vec<usize> = (1..=n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (1..=n)
            .filter(|&v| !removed[v - 1])
            .min_by_key(|&v| (deg[v - 1], v))
            .expect("vertices remain");
        removed[v - 1] = true;
        order.push(v);
        for &w in g.neighbours(v) {
            if !removed[w - 1] {
                deg[w - 1] -= 1;
            }
        }
    }
    VertexOrder::new(g, order)
}

/// Cartesian product. Vertex `(a, b)` gets id `(a-1) * |V(g2)| + b`
/// (row-major). `(a,b) ~ (a',b')` iff `a = a'` and `b ~ b'`, or `b = b'`
/// and `a ~ a'`.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Graph {
    let n1 = g1.vertex_count();
    let n2 = g2.vertex_count();
    let id = |a: Vertex, b: Vertex| (a - 1) * n2 + b;
    let mut edges = Vec::new();
    for a in 1..=n1 {
        for (b, b2) in g2.edges() {
            edges.push((id(a, b), id(a, b2)));
        }
    }
    for b in 1..=n2 {
        for (a, a2) in g1.edges() {
            edges.push((id(a, b), id(a2, b)));
        }
    }
    Graph::new(n1 * n2, &edges).expect("product edges are valid")
}

/// An ordered partition of the vertex set into layers `V_1, ..., V_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerPartition {
    pub layers: Vec<Vec<Vertex>>,
}

impl LayerPartition {
    pub fn new(layers: Vec<Vec<Vertex>>) -> Self {
        let layers = layers
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l
            })
            .collect();
        LayerPartition { layers }
    }

    /// 0-based layer index per vertex, or an error when not a partition.
    pub fn layer_of(&self, n: usize) -> Result<Vec<usize>, GraphError> {
        let mut layer = vec![usize::MAX; n];
        for (i, l) in self.layers.iter().enumerate() {
            for &v in l {
                if v < 1 || v > n {
                    return Err(GraphError::VertexOutOfRange(v, n));
                }
                if layer[v - 1] != usize::MAX {
                    return Err(GraphError::InvalidLayerPartition(format!(
                        "vertex {} appears in more than one layer",
                        v
                    )));
                }
                layer[v - 1] = i;
            }
        }
        if let Some(v) = layer.iter().position(|&l| l == usize::MAX) {
            return Err(GraphError::InvalidLayerPartition(format!(
                "vertex {} missing from all layers",
                v + 1
            )));
        }
        Ok(layer)
    }
}

/// Checks that `lp` partitions `V(g)` and that every vertex has at most one
/// neighbour in earlier layers (the layering used by the layered packing
/// construction).
pub fn validate_layer_partition(g: &Graph, lp: &LayerPartition) -> Result<(), GraphError> {
    let layer = lp.layer_of(g.vertex_count())?;
    for v in g.vertices() {
        let back = g
            .neighbours(v)
            .iter()
            .filter(|&&w| layer[w - 1] < layer[v - 1])
            .count();
        if back > 1 {
            return Err(GraphError::InvalidLayerPartition(format!(
                "vertex {} has {} neighbours in earlier layers",
                v, back
            )));
        }
    }
    Ok(())
}
