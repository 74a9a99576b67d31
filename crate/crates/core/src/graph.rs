//! Immutable simple undirected graphs on the dense vertex range `0..n`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// An unordered vertex pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(u: usize, v: usize) -> Edge {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(self, v: usize) -> Option<usize> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl From<(usize, usize)> for Edge {
    fn from((u, v): (usize, usize)) -> Edge {
        Edge::new(u, v)
    }
}

/// Old-to-new and new-to-old vertex id translation produced by surgeries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap {
    to_new: Vec<Option<usize>>,
    to_old: Vec<usize>,
}

impl VertexMap {
    pub fn identity(n: usize) -> VertexMap {
        VertexMap {
            to_new: (0..n).map(Some).collect(),
            to_old: (0..n).collect(),
        }
    }

    /// Builds the map from the list of surviving old ids, in new-id order.
    /// `fresh` trailing new ids have no old counterpart and are recorded as `usize::MAX`.
    pub(crate) fn from_kept(old_n: usize, kept: &[usize]) -> VertexMap {
        let mut to_new = vec![None; old_n];
        for (new, &old) in kept.iter().enumerate() {
            to_new[old] = Some(new);
        }
        VertexMap { to_new, to_old: kept.to_vec() }
    }

    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.to_new.get(old).copied().flatten()
    }

    pub fn old_id(&self, new: usize) -> Option<usize> {
        self.to_old.get(new).copied().filter(|&v| v != usize::MAX)
    }

    pub fn old_len(&self) -> usize {
        self.to_new.len()
    }

    pub fn new_len(&self) -> usize {
        self.to_old.len()
    }

    pub(crate) fn push_fresh(&mut self) -> usize {
        self.to_old.push(usize::MAX);
        self.to_old.len() - 1
    }
}

/// A simple undirected graph. Immutable once built; surgeries return new values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, [", self.n())?;
        for (i, e) in self.edges().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "])")
    }
}

impl Graph {
    /// Builds a graph from an edge list. Repeated edges collapse; loops and
    /// out-of-range ids are rejected.
    pub fn new<I, E>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        let mut sets = vec![BTreeSet::new(); n];
        for e in edges {
            let e: Edge = e.into();
            if e.hi() >= n {
                return Err(Error::InvalidVertex { vertex: e.hi(), n });
            }
            if e.lo() == e.hi() {
                return Err(Error::Loop(e.lo()));
            }
            sets[e.lo()].insert(e.hi());
            sets[e.hi()].insert(e.lo());
        }
        Ok(Graph::from_sets(sets))
    }

    fn from_sets(sets: Vec<BTreeSet<usize>>) -> Graph {
        let adj: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adj, m }
    }

    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid clique")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).expect("valid")
    }

    /// Hub `0` joined to every vertex of the rim cycle `1..=rim`.
    pub fn wheel(rim: usize) -> Graph {
        let spokes = (1..=rim).map(|v| (0, v));
        let rim_edges = (0..rim).map(|i| (1 + i, 1 + (i + 1) % rim));
        Graph::new(rim + 1, spokes.chain(rim_edges)).expect("valid wheel")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Sorted neighbour list; panics on an out-of-range id.
    pub fn adj(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.n() })
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        Ok(self.adj[v].len())
    }

    pub fn neighbors(&self, v: usize) -> Result<BTreeSet<usize>> {
        self.check(v)?;
        Ok(self.adj[v].iter().copied().collect())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| Edge(u, v)))
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges().collect()
    }

    /// The vertices of degree exactly two.
    pub fn two_valent_vertices(&self) -> BTreeSet<usize> {
        (0..self.n()).filter(|&v| self.adj[v].len() == 2).collect()
    }

    /// Joins every pair of vertices at distance two.
    pub fn square(&self) -> Graph {
        let mut sets: Vec<BTreeSet<usize>> =
            self.adj.iter().map(|ns| ns.iter().copied().collect()).collect();
        for ns in &self.adj {
            for &u in ns {
                for &v in ns {
                    if u != v {
                        sets[u].insert(v);
                    }
                }
            }
        }
        Graph::from_sets(sets)
    }

    /// BFS distances from `s`; unreachable vertices are `None`.
    pub fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[s] = Some(0);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Removes the given vertices and relabels the survivors to `0..n'`
    /// preserving their relative order.
    pub fn delete_vertices(&self, gone: &[usize]) -> Result<(Graph, VertexMap)> {
        let mut removed = vec![false; self.n()];
        for &v in gone {
            self.check(v)?;
            removed[v] = true;
        }
        let kept: Vec<usize> = (0..self.n()).filter(|&v| !removed[v]).collect();
        let map = VertexMap::from_kept(self.n(), &kept);
        let edges = self
            .edges()
            .filter_map(|e| Some((map.new_id(e.lo())?, map.new_id(e.hi())?)));
        Ok((Graph::new(kept.len(), edges)?, map))
    }

    /// The subgraph induced by `vertices`, with local ids following the order given.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(Graph, VertexMap)> {
        for &v in vertices {
            self.check(v)?;
        }
        let map = VertexMap::from_kept(self.n(), vertices);
        let edges = self
            .edges()
            .filter_map(|e| Some((map.new_id(e.lo())?, map.new_id(e.hi())?)));
        Ok((Graph::new(vertices.len(), edges)?, map))
    }

    pub fn delete_edges<E: Into<Edge> + Copy>(&self, gone: &[E]) -> Result<Graph> {
        let gone: BTreeSet<Edge> = gone.iter().map(|&e| e.into()).collect();
        for e in &gone {
            self.check(e.hi())?;
        }
        Graph::new(self.n(), self.edges().filter(|e| !gone.contains(e)))
    }

    pub fn add_edges<E: Into<Edge> + Copy>(&self, extra: &[E]) -> Result<Graph> {
        Graph::new(self.n(), self.edges().chain(extra.iter().map(|&e| e.into())))
    }

    /// Places `other` after `self` (its vertex `v` becomes `self.n() + v`) and
    /// adds `cross` edges, each given as (vertex of `self`, vertex of `other`).
    pub fn disjoint_union_with_cross_edges(
        &self,
        other: &Graph,
        cross: &[(usize, usize)],
    ) -> Result<Graph> {
        let off = self.n();
        for &(u, v) in cross {
            self.check(u)?;
            other.check(v)?;
        }
        let edges = self
            .edges()
            .chain(other.edges().map(|e| Edge(e.lo() + off, e.hi() + off)))
            .chain(cross.iter().map(|&(u, v)| Edge(u, v + off)));
        Graph::new(off + other.n(), edges)
    }
}
