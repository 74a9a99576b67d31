//! Blocks, cutvertices, the block-cutvertex tree, blockchains, and the
//! degree-structure predicates on 2-blocks (`D(G)`, DT-graphs, edge-critical
//! blocks, reducing edges).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{precondition, Error, Result};
use crate::graph::{Edge, Graph, VertexMap};

/// Maximal 2-connected subgraphs and bridges of a connected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Sorted vertex sets, ordered lexicographically.
    pub blocks: Vec<Vec<usize>>,
    pub cutvertices: BTreeSet<usize>,
    /// For each block, the cutvertices it contains (its neighbours in bc(G)).
    pub block_cuts: Vec<Vec<usize>>,
    /// For each cutvertex, the indices of the blocks containing it.
    pub cut_blocks: BTreeMap<usize, Vec<usize>>,
}

impl BlockDecomposition {
    pub fn is_bridge(&self, i: usize) -> bool {
        self.blocks[i].len() == 2
    }

    /// Leaves of bc(G); the single block when bc(G) has no edges.
    pub fn endblocks(&self) -> Vec<usize> {
        if self.blocks.len() == 1 {
            return vec![0];
        }
        (0..self.blocks.len()).filter(|&i| self.block_cuts[i].len() == 1).collect()
    }

    /// Edges of bc(G) as (block index, cutvertex) pairs.
    pub fn bc_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.block_cuts
            .iter()
            .enumerate()
            .flat_map(|(b, cs)| cs.iter().map(move |&c| (b, c)))
    }

    pub fn block_graph(&self, g: &Graph, i: usize) -> (Graph, VertexMap) {
        g.induced_subgraph(&self.blocks[i]).expect("block vertices are valid")
    }
}

/// Hopcroft-Tarjan biconnected components with an explicit stack.
fn tarjan_blocks(g: &Graph) -> (Vec<Vec<usize>>, BTreeSet<usize>) {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut blocks = Vec::new();
    let mut cuts = BTreeSet::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        if g.adj(root).is_empty() {
            blocks.push(vec![root]);
            continue;
        }
        let mut root_children = 0;
        // (vertex, parent, next neighbour index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
            if let Some(&v) = g.adj(u).get(*idx) {
                *idx += 1;
                if disc[v] == usize::MAX {
                    edge_stack.push((u, v));
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((v, u, 0));
                } else if v != parent && disc[v] < disc[u] {
                    edge_stack.push((u, v));
                    low[u] = low[u].min(disc[v]);
                }
                continue;
            }
            stack.pop();
            if parent == usize::MAX {
                continue;
            }
            low[parent] = low[parent].min(low[u]);
            if low[u] >= disc[parent] {
                if parent != root {
                    cuts.insert(parent);
                }
                let mut block = BTreeSet::new();
                while let Some((a, b)) = edge_stack.pop() {
                    block.insert(a);
                    block.insert(b);
                    if (a, b) == (parent, u) {
                        break;
                    }
                }
                blocks.push(block.into_iter().collect());
            }
        }
        if root_children > 1 {
            cuts.insert(root);
        }
    }
    blocks.sort();
    (blocks, cuts)
}

pub fn cut_vertices(g: &Graph) -> Result<BTreeSet<usize>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(tarjan_blocks(g).1)
}

pub fn blocks(g: &Graph) -> Result<BlockDecomposition> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let (blocks, cutvertices) = tarjan_blocks(g);
    let block_cuts: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| b.iter().copied().filter(|v| cutvertices.contains(v)).collect())
        .collect();
    let mut cut_blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, cs) in block_cuts.iter().enumerate() {
        for &c in cs {
            cut_blocks.entry(c).or_default().push(i);
        }
    }
    Ok(BlockDecomposition { blocks, cutvertices, block_cuts, cut_blocks })
}

/// True iff `g` has at least three vertices, is connected and has no cutvertex.
pub fn is_two_block(g: &Graph) -> bool {
    g.n() >= 3 && g.is_connected() && tarjan_blocks(g).1.is_empty()
}

fn connected_without(g: &Graph, removed: u128) -> bool {
    let n = g.n();
    let Some(start) = (0..n).find(|&v| removed >> v & 1 == 0) else {
        return true;
    };
    let mut seen = removed | 1 << start;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in g.adj(u) {
            if seen >> v & 1 == 0 {
                seen |= 1 << v;
                stack.push(v);
            }
        }
    }
    seen.count_ones() as usize == n
}

/// Visits every `k`-subset of `0..n` as a bitmask until `f` returns true.
fn any_subset(n: usize, k: usize, f: &mut impl FnMut(u128) -> bool) -> bool {
    fn rec(start: usize, n: usize, k: usize, mask: u128, f: &mut impl FnMut(u128) -> bool) -> bool {
        if k == 0 {
            return f(mask);
        }
        (start..=n - k).any(|v| rec(v + 1, n, k - 1, mask | 1 << v, f))
    }
    rec(0, n, k, 0, f)
}

/// Vertex connectivity by separator search of increasing size; `K_n` has
/// connectivity `n - 1`.
pub fn vertex_connectivity(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > 128 {
        return Err(Error::TooLarge { n, cap: 128 });
    }
    if n <= 1 {
        return Ok(0);
    }
    for k in 0..=n - 2 {
        if any_subset(n, k, &mut |mask| !connected_without(g, mask)) {
            return Ok(k);
        }
    }
    Ok(n - 1)
}

/// A graph whose block-cutvertex tree is a path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blockchain {
    /// `B_1, ..., B_k` as sorted vertex sets.
    pub blocks: Vec<Vec<usize>>,
    /// `c_1, ..., c_{k-1}` with `c_i` shared by `B_i` and `B_{i+1}`.
    pub cutvertices: Vec<usize>,
}

impl Blockchain {
    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Vertices that are not cutvertices.
    pub fn inner_vertices(&self) -> BTreeSet<usize> {
        self.blocks
            .iter()
            .flatten()
            .copied()
            .filter(|v| !self.cutvertices.contains(v))
            .collect()
    }

    /// Inner vertices of `B_i`.
    pub fn block_inner(&self, i: usize) -> Vec<usize> {
        self.blocks[i].iter().copied().filter(|v| !self.cutvertices.contains(v)).collect()
    }

    /// Blocks containing exactly two cutvertices.
    pub fn inner_blocks(&self) -> Vec<usize> {
        (1..self.blocks.len().saturating_sub(1)).collect()
    }

    pub fn is_bridge(&self, i: usize) -> bool {
        self.blocks[i].len() == 2
    }

    /// The endpoints `c_{i-1}`, `c_i` of block `i`, where the outer ends are `None`.
    pub fn attachments(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let left = i.checked_sub(1).map(|j| self.cutvertices[j]);
        let right = self.cutvertices.get(i).copied();
        (left, right)
    }

    pub fn block_of(&self, v: usize) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].binary_search(&v).is_ok()).collect()
    }
}

/// Orders the blocks along bc(G) when it is a path. The end with the
/// lexicographically smaller vertex set becomes `B_1`.
pub fn as_blockchain(g: &Graph) -> Result<Option<Blockchain>> {
    let dec = blocks(g)?;
    as_blockchain_from(&dec)
}

pub(crate) fn as_blockchain_from(dec: &BlockDecomposition) -> Result<Option<Blockchain>> {
    if dec.blocks.len() == 1 {
        return Ok(Some(Blockchain { blocks: dec.blocks.clone(), cutvertices: Vec::new() }));
    }
    if dec.cut_blocks.values().any(|bs| bs.len() != 2)
        || dec.block_cuts.iter().any(|cs| cs.len() > 2)
    {
        return Ok(None);
    }
    let ends = dec.endblocks();
    if ends.len() != 2 {
        return Ok(None);
    }
    let start = ends[0].min(ends[1]);
    let mut order = vec![start];
    let mut cuts = Vec::new();
    let mut prev_cut = None;
    let mut cur = start;
    while let Some(&c) = dec.block_cuts[cur].iter().find(|&&c| Some(c) != prev_cut) {
        let next = dec.cut_blocks[&c].iter().copied().find(|&b| b != cur).unwrap();
        cuts.push(c);
        order.push(next);
        prev_cut = Some(c);
        cur = next;
    }
    Ok(Some(Blockchain {
        blocks: order.into_iter().map(|i| dec.blocks[i].clone()).collect(),
        cutvertices: cuts,
    }))
}

pub fn inner_vertices(bc: &Blockchain) -> BTreeSet<usize> {
    bc.inner_vertices()
}

/// Edges whose endpoints both have degree at least three.
pub fn d_edge_set(g: &Graph) -> BTreeSet<Edge> {
    g.edges().filter(|e| g.adj(e.lo()).len() >= 3 && g.adj(e.hi()).len() >= 3).collect()
}

/// Every edge touches a vertex of degree two.
pub fn is_dt_graph(g: &Graph) -> bool {
    d_edge_set(g).is_empty()
}

/// Connectivity exactly two, and deleting any single edge leaves a cutvertex.
pub fn is_edge_critical_block(g: &Graph) -> bool {
    if !is_two_block(g) {
        return false;
    }
    let every_edge_critical = g.edges().all(|e| {
        let h = g.delete_edges(&[e]).expect("edge of g");
        !is_two_block(&h)
    });
    every_edge_critical && vertex_connectivity(g).map_or(true, |k| k == 2)
}

/// Witness that `g - f` is a blockchain one of whose endblocks is a DT 2-block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducingEdge {
    pub edge: Edge,
    pub chain: Blockchain,
    /// Index into `chain.blocks` of an endblock that is a DT 2-block.
    pub dt_endblock: usize,
}

fn endblock_is_dt_block(g: &Graph, block: &[usize]) -> bool {
    let (b, _) = g.induced_subgraph(block).expect("valid block");
    is_two_block(&b) && is_dt_graph(&b)
}

/// Searches `D(g)` in lexicographic order for an edge `f` such that `g - f`
/// is a blockchain with an endblock that is a DT 2-block.
pub fn find_reducing_edge(g: &Graph) -> Result<ReducingEdge> {
    if !is_edge_critical_block(g) {
        return Err(precondition("graph is not an edge-critical block"));
    }
    let candidates = d_edge_set(g);
    if candidates.is_empty() {
        return Err(precondition("graph is already a DT-graph"));
    }
    for &f in &candidates {
        let h = g.delete_edges(&[f])?;
        let Some(chain) = as_blockchain(&h)? else {
            continue;
        };
        if chain.is_trivial() {
            continue;
        }
        let last = chain.len() - 1;
        for end in [0, last] {
            if endblock_is_dt_block(&h, &chain.blocks[end]) {
                return Ok(ReducingEdge { edge: f, chain, dt_endblock: end });
            }
        }
    }
    Err(Error::OracleFailure(format!("no edge of D(G) reduces {g:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap()
    }

    fn two_squares() -> Graph {
        // squares 0-1-2-3 and 3-4-5-6 sharing vertex 3
        Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 3)]).unwrap()
    }

    #[test]
    fn block_examples() {
        let c5 = blocks(&Graph::cycle(5)).unwrap();
        assert_eq!(c5.blocks, vec![vec![0, 1, 2, 3, 4]]);
        assert!(c5.cutvertices.is_empty());

        let tt = blocks(&two_triangles()).unwrap();
        assert_eq!(tt.blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(tt.cutvertices, BTreeSet::from([2]));

        let p4 = blocks(&Graph::path(4)).unwrap();
        assert_eq!(p4.blocks.len(), 3);
        assert!(p4.blocks.iter().all(|b| b.len() == 2));
        assert_eq!(p4.cutvertices, BTreeSet::from([1, 2]));
        assert_eq!(p4.endblocks(), vec![0, 2]);
    }

    #[test]
    fn disconnected_is_flagged() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(blocks(&g), Err(Error::Disconnected));
        assert_eq!(cut_vertices(&g), Err(Error::Disconnected));
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_two_block(&Graph::cycle(4)));
        assert_eq!(vertex_connectivity(&Graph::cycle(4)), Ok(2));
        assert!(is_two_block(&Graph::complete(4)));
        assert_eq!(vertex_connectivity(&Graph::complete(4)), Ok(3));
        assert!(!is_two_block(&Graph::path(4)));
        assert_eq!(vertex_connectivity(&Graph::path(4)), Ok(1));
        assert_eq!(vertex_connectivity(&Graph::complete_bipartite(3, 4)), Ok(3));
        assert!(!is_two_block(&Graph::complete(2)));
    }

    #[test]
    fn blockchain_examples() {
        let c4 = as_blockchain(&Graph::cycle(4)).unwrap().unwrap();
        assert!(c4.is_trivial());
        assert_eq!(c4.inner_vertices().len(), 4);

        let ss = as_blockchain(&two_squares()).unwrap().unwrap();
        assert_eq!(ss.len(), 2);
        assert_eq!(ss.cutvertices, vec![3]);
        assert_eq!(inner_vertices(&ss), BTreeSet::from([0, 1, 2, 4, 5, 6]));
        assert_eq!(ss.blocks[0], vec![0, 1, 2, 3]);

        // subdivided claw: centre 0 with legs 0-1-2, 0-3-4, 0-5-6
        let spider =
            Graph::new(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]).unwrap();
        assert_eq!(as_blockchain(&spider).unwrap(), None);

        // triangle with two pendant paths at different vertices: still a chain
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)]).unwrap();
        let chain = as_blockchain(&g).unwrap().unwrap();
        assert_eq!(chain.blocks, vec![vec![1, 3], vec![0, 1, 2], vec![2, 4]]);
        assert_eq!(chain.cutvertices, vec![1, 2]);
        assert_eq!(chain.inner_blocks(), vec![1]);
    }

    #[test]
    fn chain_direction_is_canonical() {
        let g = Graph::new(5, [(4, 3), (3, 2), (2, 1), (1, 0)]).unwrap();
        let chain = as_blockchain(&g).unwrap().unwrap();
        assert_eq!(chain.blocks[0], vec![0, 1]);
        assert_eq!(chain.cutvertices, vec![1, 2, 3]);
    }

    #[test]
    fn degree_structure_examples() {
        assert!(d_edge_set(&Graph::cycle(7)).is_empty());
        assert_eq!(d_edge_set(&Graph::complete(4)).len(), 6);
        assert!(d_edge_set(&Graph::complete_bipartite(2, 3)).is_empty());
        assert!(is_dt_graph(&Graph::cycle(5)));
        assert!(!is_dt_graph(&Graph::complete(4)));
        assert!(is_dt_graph(&Graph::complete_bipartite(2, 3)));
    }

    #[test]
    fn edge_critical_examples() {
        for n in 3..9 {
            assert!(is_edge_critical_block(&Graph::cycle(n)));
        }
        assert!(!is_edge_critical_block(&Graph::complete(4)));
        let chorded = Graph::cycle(4).add_edges(&[(0, 2)]).unwrap();
        assert!(!is_edge_critical_block(&chorded));
        assert!(is_edge_critical_block(&Graph::complete_bipartite(2, 3)));
    }

    #[test]
    fn reducing_edge_preconditions() {
        assert!(matches!(find_reducing_edge(&Graph::cycle(6)), Err(Error::Precondition(_))));
        assert!(matches!(find_reducing_edge(&Graph::complete(4)), Err(Error::Precondition(_))));
    }

    #[test]
    fn reducing_edge_on_theta_with_chord_path() {
        // Two 5-cycles 0-1-2-3-4 and 5-6-7-8-9 joined by the edges 0-5 and 2-7.
        // Deleting 0-5 leaves a chain whose end blocks are the two 5-cycles.
        let g = Graph::new(
            10,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 6), (6, 7), (7, 8), (8, 9), (9, 5), (0, 5), (2, 7)],
        )
        .unwrap();
        assert!(is_edge_critical_block(&g));
        let red = find_reducing_edge(&g).unwrap();
        assert!(d_edge_set(&g).contains(&red.edge));
        assert!(red.chain.len() >= 2);
    }
}
