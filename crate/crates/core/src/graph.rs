//! Immutable undirected multigraph, edge-subset states and connected
//! components.
//!
//! Edge indices are fixed at construction and shared by every parameter
//! vector and bit-vector state in the crate. Parallel edges and self-loops
//! are allowed; graphs need not be connected (the field dynamics routinely
//! restricts sampling to disconnected subgraphs).

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Immutable undirected multigraph given by a vertex count and an ordered
/// edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("vertex count must be >= 1".into()));
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange(format!(
                    "edge {i} = ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
        }
        Ok(Graph { n, edges })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Full edge set (all bits set).
    pub fn full_edge_set(&self) -> EdgeSet {
        let mut s = EdgeSet::empty(self.edge_count());
        s.bits.fill_ones();
        s
    }

    /// Parses the edge-list text format: first line `n m`, then `m` lines
    /// `u v` with 0-based endpoints. Parsing is strict apart from trailing
    /// whitespace.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing edge count".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad edge count".into()))?;
        if it.next().is_some() {
            return Err(Error::Parse("trailing tokens on header line".into()));
        }
        let mut edges = Vec::with_capacity(m);
        for line in lines.by_ref() {
            if edges.len() == m {
                if !line.trim().is_empty() {
                    return Err(Error::Parse("unexpected content after edge list".into()));
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("edge line {} is empty", edges.len())))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad endpoint on edge line {}", edges.len())))?;
            let v: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("edge line {} lacks a second endpoint", edges.len())))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad endpoint on edge line {}", edges.len())))?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("trailing tokens on edge line {}", edges.len())));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "expected {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// An edge subset S of E as a bit vector of length m; bit i set iff edge i
/// is present.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    bits: Bits,
}

impl EdgeSet {
    pub fn empty(m: usize) -> Self {
        EdgeSet { bits: Bits::new(m) }
    }

    pub fn from_indices(m: usize, present: &[usize]) -> Self {
        let mut s = EdgeSet::empty(m);
        for &e in present {
            assert!(e < m, "edge index out of range");
            s.bits.set(e, true);
        }
        s
    }

    /// State at position `index` in the canonical enumeration (bits read as
    /// a little-endian integer).
    pub fn from_index(m: usize, index: u64) -> Self {
        EdgeSet {
            bits: Bits::from_index(m, index),
        }
    }

    /// Position in the canonical enumeration.
    pub fn to_index(&self) -> u64 {
        self.bits.to_index()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.count_ones() == 0
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        self.bits.get(e)
    }

    #[inline]
    pub fn set(&mut self, e: usize, present: bool) {
        self.bits.set(e, present);
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        self.bits.union_with(&other.bits);
    }

    /// |self xor other|, the Hamming distance between configurations.
    pub fn sym_diff_count(&self, other: &EdgeSet) -> usize {
        self.bits.xor_count(&other.bits)
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.bits.is_subset_of(&other.bits)
    }

    pub fn intersects(&self, other: &EdgeSet) -> bool {
        self.bits.intersects(&other.bits)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.to_bitstring()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        Bits::from_bitstring(s)
            .map(|bits| EdgeSet { bits })
            .ok_or_else(|| Error::Parse("edge set bit string must be over {0,1}".into()))
    }
}

impl std::fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EdgeSet({})", self.to_bitstring())
    }
}

impl serde::Serialize for EdgeSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_bitstring())
    }
}

/// Partition of the vertices into connected components of (V, S).
///
/// Component ids are canonical: components are numbered in increasing order
/// of their smallest member vertex, so equal inputs produce bit-identical
/// labelings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabeling {
    label: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl ComponentLabeling {
    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.label[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    /// Member vertices of component `c`, in increasing order.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }
}

/// Union-find over the vertices, processing edges in index order.
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        for s in self.size.iter_mut() {
            *s = 1;
        }
    }

    #[inline]
    pub fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            // Path halving.
            let gp = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = gp;
            v = gp;
        }
        v
    }

    /// Union by size; returns the surviving root.
    #[inline]
    pub fn union(&mut self, u: u32, v: u32) -> u32 {
        let mut ru = self.find(u);
        let mut rv = self.find(v);
        if ru == rv {
            return ru;
        }
        if self.size[ru as usize] < self.size[rv as usize] {
            std::mem::swap(&mut ru, &mut rv);
        }
        self.parent[rv as usize] = ru;
        self.size[ru as usize] += self.size[rv as usize];
        ru
    }
}

/// Connected components of (V, S).
pub fn connected_components(g: &Graph, s: &EdgeSet) -> Result<ComponentLabeling> {
    if s.len() != g.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "edge set length {} does not match graph edge count {}",
            s.len(),
            g.edge_count()
        )));
    }
    let mut uf = UnionFind::new(g.vertex_count());
    for e in s.iter() {
        let (u, v) = g.edge(e);
        uf.union(u as u32, v as u32);
    }
    let n = g.vertex_count();
    let mut label = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut root_id = vec![usize::MAX; n];
    for (v, lab) in label.iter_mut().enumerate() {
        let r = uf.find(v as u32) as usize;
        if root_id[r] == usize::MAX {
            root_id[r] = members.len();
            members.push(Vec::new());
        }
        let id = root_id[r];
        *lab = id;
        members[id].push(v);
    }
    Ok(ComponentLabeling { label, members })
}

/// Edges with exactly one endpoint in `vertex_set`.
pub fn boundary_edges(g: &Graph, vertex_set: &[usize]) -> Result<EdgeSet> {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in vertex_set {
        if v >= n {
            return Err(Error::IndexOutOfRange(format!(
                "vertex {v} outside 0..{n}"
            )));
        }
        inside[v] = true;
    }
    let mut cut = EdgeSet::empty(g.edge_count());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if inside[u] != inside[v] {
            cut.set(e, true);
        }
    }
    Ok(cut)
}
