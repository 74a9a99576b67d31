//! Brute-force reference oracles and corpus access shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use hamsq::harness::{Corpus, Lcg};
use hamsq::oracle::{ConstraintSpec, Kind};
use hamsq::{Edge, Graph};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn corpus(names: &[String]) -> Corpus {
    let text: String = names
        .iter()
        .map(|n| std::fs::read_to_string(corpus_path(n)).unwrap_or_else(|e| panic!("{n}: {e}")))
        .collect();
    Corpus::parse(&text).unwrap()
}

pub fn biconnected(ns: impl IntoIterator<Item = usize>) -> Corpus {
    corpus(&ns.into_iter().map(|n| format!("biconnected_n{n}.g6")).collect::<Vec<_>>())
}

pub fn connected(ns: impl IntoIterator<Item = usize>) -> Corpus {
    corpus(&ns.into_iter().map(|n| format!("connected_n{n}.g6")).collect::<Vec<_>>())
}

pub fn all_graphs(ns: impl IntoIterator<Item = usize>) -> Corpus {
    corpus(&ns.into_iter().map(|n| format!("all_n{n}.g6")).collect::<Vec<_>>())
}

/// Adjacency matrix of the square, from all-pairs BFS written out longhand.
pub fn square_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut m = vec![vec![false; n]; n];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut frontier = vec![s];
        for d in 1..=2 {
            let mut next = Vec::new();
            for &v in &frontier {
                for &u in g.adj(v) {
                    if dist[u] == usize::MAX {
                        dist[u] = d;
                        next.push(u);
                    }
                }
            }
            frontier = next;
        }
        for t in 0..n {
            m[s][t] = t != s && dist[t] <= 2;
        }
    }
    m
}

/// Every Hamiltonian route of `g²`: each cycle once per orientation and
/// starting point 0, and every path as a vertex sequence.
pub fn hamiltonian_routes(g: &Graph, kind: Kind) -> Vec<Vec<usize>> {
    let n = g.n();
    let sq = square_matrix(g);
    let mut out = Vec::new();
    if n == 0 || (kind == Kind::Cycle && n < 3) {
        return out;
    }
    let starts: Vec<usize> = if kind == Kind::Cycle { vec![0] } else { (0..n).collect() };
    for s in starts {
        let mut seq = vec![s];
        let mut used = vec![false; n];
        used[s] = true;
        permute(&sq, kind, &mut seq, &mut used, &mut out);
    }
    out
}

fn permute(sq: &[Vec<bool>], kind: Kind, seq: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let n = used.len();
    if seq.len() == n {
        if kind == Kind::Path || sq[seq[n - 1]][seq[0]] {
            out.push(seq.clone());
        }
        return;
    }
    let last = *seq.last().unwrap();
    for v in 0..n {
        if !used[v] && sq[last][v] {
            used[v] = true;
            seq.push(v);
            permute(sq, kind, seq, used, out);
            seq.pop();
            used[v] = false;
        }
    }
}

fn route_base_edges(g: &Graph, route: &[usize], kind: Kind) -> Vec<Edge> {
    let mut es: Vec<Edge> = route.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    if kind == Kind::Cycle {
        es.push(Edge::new(route[route.len() - 1], route[0]));
    }
    es.into_iter().filter(|e| g.has_edge(e.lo(), e.hi())).collect()
}

/// Tries every injective assignment of route base edges to demands.
pub fn injective_assignment_exists(g: &Graph, route: &[usize], kind: Kind, demands: &[usize]) -> bool {
    fn go(i: usize, demands: &[usize], edges: &[Edge], used: &mut Vec<bool>) -> bool {
        if i == demands.len() {
            return true;
        }
        for j in 0..edges.len() {
            if !used[j] && edges[j].contains(demands[i]) {
                used[j] = true;
                if go(i + 1, demands, edges, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let edges = route_base_edges(g, route, kind);
    go(0, demands, &edges, &mut vec![false; edges.len()])
}

/// Whether some route in `routes` satisfies `spec`, by brute force.
pub fn naive_exists(g: &Graph, routes: &[Vec<usize>], spec: &ConstraintSpec) -> bool {
    routes.iter().any(|r| {
        spec.endpoints.is_none_or(|(s, t)| r[0] == s && r[r.len() - 1] == t)
            && injective_assignment_exists(g, r, spec.kind, &spec.demands)
    })
}

fn two_connected_subset(g: &Graph, set: &[usize]) -> bool {
    if set.len() < 3 {
        return false;
    }
    let connected_minus = |skip: Option<usize>| {
        let keep: Vec<usize> = set.iter().copied().filter(|&v| Some(v) != skip).collect();
        let mut seen = BTreeSet::from([keep[0]]);
        let mut stack = vec![keep[0]];
        while let Some(v) = stack.pop() {
            for &u in g.adj(v) {
                if keep.contains(&u) && seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen.len() == keep.len()
    };
    connected_minus(None) && set.iter().all(|&v| connected_minus(Some(v)))
}

/// Cutvertices by deletion and blocks by maximal 2-connected vertex subsets
/// plus the bridges they leave over. `g` must be connected.
pub fn brute_blocks(g: &Graph) -> (BTreeSet<usize>, BTreeSet<Vec<usize>>) {
    let n = g.n();
    let cuts = (0..n)
        .filter(|&v| {
            let (h, _) = g.delete_vertices(&[v]).unwrap();
            h.n() > 0 && !h.is_connected()
        })
        .collect();
    let good: Vec<u32> = (0u32..1 << n)
        .filter(|&m| {
            let set: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
            two_connected_subset(g, &set)
        })
        .collect();
    let maximal: Vec<u32> = good.iter().copied().filter(|&m| !good.iter().any(|&o| o != m && o & m == m)).collect();
    let mut blocks: BTreeSet<Vec<usize>> =
        maximal.iter().map(|&m| (0..n).filter(|&v| m >> v & 1 == 1).collect()).collect();
    for e in g.edges() {
        let pair = 1u32 << e.lo() | 1 << e.hi();
        if !maximal.iter().any(|&m| m & pair == pair) {
            blocks.insert(vec![e.lo(), e.hi()]);
        }
    }
    if n == 1 {
        blocks.insert(vec![0]);
    }
    (cuts, blocks)
}

pub fn random_graph(rng: &mut Lcg, n: usize, density_percent: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.below(100) < density_percent {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}
