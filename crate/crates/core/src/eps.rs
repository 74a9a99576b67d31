//! W-maximal and W-sound cycles, K-to-K blockchains hanging off a cycle, and
//! EPS-graphs (an even subgraph plus a linear forest, together spanning and
//! connected) containing a prescribed cycle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::connectivity;
use crate::error::{precondition, Error, Result};
use crate::graph::{Edge, Graph};
use crate::oracle::SOLVER_CAP;

/// Every simple cycle of `g` once, as a vertex sequence starting at its
/// smallest vertex with the second vertex smaller than the last.
pub fn enumerate_cycles(g: &Graph) -> Result<Vec<Vec<usize>>> {
    if g.n() > SOLVER_CAP {
        return Err(Error::TooLarge { n: g.n(), cap: SOLVER_CAP });
    }
    let mut out = Vec::new();
    for s in 0..g.n() {
        let mut path = vec![s];
        let mut on = vec![false; g.n()];
        on[s] = true;
        extend_cycles(g, s, &mut path, &mut on, &mut out);
    }
    Ok(out)
}

fn extend_cycles(g: &Graph, s: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    for &u in g.adj(last) {
        if u == s && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        }
        if u > s && !on[u] {
            on[u] = true;
            path.push(u);
            extend_cycles(g, s, path, on, out);
            path.pop();
            on[u] = false;
        }
    }
}

fn check_w(g: &Graph, w: &[usize]) -> Result<BTreeSet<usize>> {
    let set: BTreeSet<usize> = w.iter().copied().collect();
    if set.len() != 5 || w.len() != 5 {
        return Err(precondition("W must consist of five distinct vertices"));
    }
    if let Some(&v) = set.iter().find(|&&v| v >= g.n()) {
        return Err(Error::InvalidVertex { vertex: v, n: g.n() });
    }
    Ok(set)
}

fn check_cycle(g: &Graph, k: &[usize]) -> Result<()> {
    let distinct: BTreeSet<usize> = k.iter().copied().collect();
    let closes = |i: usize| g.has_edge(k[i], k[(i + 1) % k.len()]);
    if k.len() < 3 || distinct.len() != k.len() || !(0..k.len()).all(closes) {
        return Err(precondition("K is not a cycle of the graph"));
    }
    Ok(())
}

fn hits(k: &[usize], w: &BTreeSet<usize>) -> usize {
    k.iter().filter(|v| w.contains(v)).count()
}

fn check_block(g: &Graph) -> Result<()> {
    if g.n() < 5 || !connectivity::is_two_block(g) {
        return Err(precondition("graph must be a 2-block on at least five vertices"));
    }
    Ok(())
}

/// A cycle maximizing `|V(K) ∩ W|`, the first such in enumeration order.
pub fn find_w_maximal_cycle(g: &Graph, w: &[usize]) -> Result<(Vec<usize>, usize)> {
    let wset = check_w(g, w)?;
    check_block(g)?;
    let cycles = enumerate_cycles(g)?;
    let mut best: Option<(Vec<usize>, usize)> = None;
    for c in cycles {
        let h = hits(&c, &wset);
        if best.as_ref().is_none_or(|(_, b)| h > *b) {
            best = Some((c, h));
        }
    }
    best.ok_or_else(|| Error::OracleFailure("2-block without a cycle".into()))
}

/// A subgraph of the host given by its vertices and edges (host ids).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Attachment {
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl Attachment {
    fn local(&self) -> (Graph, BTreeMap<usize, usize>) {
        let index: BTreeMap<usize, usize> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let g = Graph::new(
            self.vertices.len(),
            self.edges.iter().map(|e| (index[&e.lo()], index[&e.hi()])),
        )
        .expect("attachment edges lie on its vertices");
        (g, index)
    }
}

/// The pieces hanging off `k`: each component of `g - V(K)` together with
/// its attachment vertices on `k` and the edges joining them.
pub fn k_attachments(g: &Graph, k: &[usize]) -> Result<Vec<Attachment>> {
    let (rest, map) = g.delete_vertices(k)?;
    let on_k: BTreeSet<usize> = k.iter().copied().collect();
    let mut out = Vec::new();
    for comp in rest.components() {
        let inside: BTreeSet<usize> = comp.iter().map(|&v| map.old_id(v).unwrap()).collect();
        let mut vertices = inside.clone();
        let mut edges = BTreeSet::new();
        for &v in &inside {
            for &u in g.adj(v) {
                if inside.contains(&u) || on_k.contains(&u) {
                    vertices.insert(u);
                    edges.insert(Edge::new(u, v));
                }
            }
        }
        out.push(Attachment { vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect() });
    }
    Ok(out)
}

/// Checks the five conditions for `p` to be a W-separated K-to-K blockchain
/// based on `x`. `p` must be a subgraph of `g`; anything that is not a
/// blockchain yields `false`.
pub fn is_w_separated_ktok_blockchain(g: &Graph, k: &[usize], p: &Attachment, x: usize, w: &[usize]) -> bool {
    let on_k: BTreeSet<usize> = k.iter().copied().collect();
    if p.edges.iter().any(|e| !g.has_edge(e.lo(), e.hi()) || (on_k.contains(&e.lo()) && on_k.contains(&e.hi()))) {
        return false;
    }
    let (local, index) = p.local();
    let chain = match connectivity::as_blockchain(&local) {
        Ok(Some(c)) if !c.is_trivial() => c,
        _ => return false,
    };
    let host = |v: usize| p.vertices[v];
    let cuts: BTreeSet<usize> = chain.cutvertices.iter().map(|&c| host(c)).collect();
    if !w.iter().any(|v| cuts.contains(v)) || cuts.iter().any(|c| on_k.contains(c)) {
        return false;
    }
    if !index.contains_key(&x) || !on_k.contains(&x) {
        return false;
    }
    let block_k = |i: usize| -> BTreeSet<usize> {
        chain.blocks[i].iter().map(|&v| host(v)).filter(|v| on_k.contains(v)).collect()
    };
    let p_k: BTreeSet<usize> = p.vertices.iter().copied().filter(|v| on_k.contains(v)).collect();
    let last = chain.len() - 1;
    [(0, last), (last, 0)].into_iter().any(|(b, b2)| {
        let bk = block_k(b);
        let b2k = block_k(b2);
        let b2_all: BTreeSet<usize> = chain.blocks[b2].iter().map(|&v| host(v)).collect();
        bk.len() == 1
            && bk.contains(&x)
            && !b2k.is_empty()
            && p_k.iter().filter(|&&v| v != x).all(|v| b2_all.contains(v))
    })
}

/// Lexicographically least among the shortest paths inside `p` from `x` to
/// a vertex of `k` other than `x`.
pub fn shortest_exit(k: &[usize], p: &Attachment, x: usize) -> Option<Vec<usize>> {
    let on_k: BTreeSet<usize> = k.iter().copied().collect();
    let (local, index) = p.local();
    let s = *index.get(&x)?;
    let from_s = local.distances_from(s);
    let targets: Vec<usize> = (0..local.n())
        .filter(|&v| v != s && on_k.contains(&p.vertices[v]) && from_s[v].is_some())
        .collect();
    let d = targets.iter().map(|&v| from_s[v].unwrap()).min()?;
    // distance to the nearest target, by multi-source BFS
    let mut to_t = vec![usize::MAX; local.n()];
    let mut queue = VecDeque::new();
    for &t in targets.iter().filter(|&&t| from_s[t] == Some(d)) {
        to_t[t] = 0;
        queue.push_back(t);
    }
    while let Some(v) = queue.pop_front() {
        for &u in local.adj(v) {
            if to_t[u] == usize::MAX && u != s {
                to_t[u] = to_t[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let mut cur = s;
    let mut path = vec![x];
    for step in (0..d).rev() {
        let next = local
            .adj(cur)
            .iter()
            .copied()
            .filter(|&u| to_t[u] == step && from_s[u] == Some(d - step))
            .min_by_key(|&u| p.vertices[u])?;
        path.push(p.vertices[next]);
        cur = next;
    }
    Some(path)
}

/// Whether `seq` (first entry equal to `seq`'s last, which closes it) occurs as a
/// cyclic subsequence of `k` in either direction, with strictly increasing
/// positions after the starting vertex.
fn cyclic_subsequence(k: &[usize], seq: &[usize]) -> bool {
    let Some(start) = k.iter().position(|&v| v == seq[0]) else { return false };
    let len = k.len();
    let forwards: Vec<usize> = (0..len).map(|i| k[(start + i) % len]).collect();
    let backwards: Vec<usize> = (0..len).map(|i| k[(start + len - i) % len]).collect();
    [forwards, backwards].iter().any(|walk| {
        let mut at = 0;
        for &v in &seq[1..seq.len() - 1] {
            match walk[at + 1..].iter().position(|&u| u == v) {
                Some(i) => at += 1 + i,
                None => return false,
            }
        }
        true
    })
}

/// Evidence that a forbidden configuration is present on a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseEvidence {
    /// `w` for the three-hit clause, `a` for the two-hit clause.
    pub base: usize,
    pub blockchains: Vec<Attachment>,
    /// The shortest exits `p`, `q` (or `p_1`, `p_2`, `p_3`).
    pub paths: Vec<Vec<usize>>,
    /// The cyclic subsequence of K that was found, closing at the base.
    pub subsequence: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessReport {
    pub cycle: Vec<usize>,
    pub w: Vec<usize>,
    pub hits: usize,
    pub max_hits: usize,
    pub maximal: bool,
    pub clause2_evidence: Option<ClauseEvidence>,
    pub clause3_evidence: Option<ClauseEvidence>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.maximal
            && match self.hits {
                h if h >= 4 => true,
                3 => self.clause2_evidence.is_none(),
                2 => self.clause3_evidence.is_none(),
                _ => false,
            }
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hits {}/{}", self.hits, self.max_hits)?;
        if self.clause2_evidence.is_some() || self.clause3_evidence.is_some() {
            write!(f, ", forbidden configuration present")?;
        }
        write!(f, ", {}", if self.is_sound() { "sound" } else { "not sound" })
    }
}

fn separated_at(g: &Graph, k: &[usize], pieces: &[Attachment], base: usize, w: &[usize]) -> Vec<(Attachment, Vec<usize>)> {
    pieces
        .iter()
        .filter(|p| is_w_separated_ktok_blockchain(g, k, p, base, w))
        .filter_map(|p| Some((p.clone(), shortest_exit(k, p, base)?)))
        .collect()
}

fn meet_only_at(a: &Attachment, b: &Attachment, base: usize) -> bool {
    let sa: BTreeSet<usize> = a.vertices.iter().copied().collect();
    b.vertices.iter().filter(|v| sa.contains(v)).copied().eq([base])
}

fn clause2(g: &Graph, k: &[usize], w: &[usize], pieces: &[Attachment]) -> Option<ClauseEvidence> {
    let on_k: Vec<usize> = w.iter().copied().filter(|v| k.contains(v)).collect();
    for &base in &on_k {
        let others: Vec<usize> = on_k.iter().copied().filter(|&v| v != base).collect();
        let cands = separated_at(g, k, pieces, base, w);
        for (i, (p, pp)) in cands.iter().enumerate() {
            for (j, (q, qp)) in cands.iter().enumerate() {
                if i == j || !meet_only_at(p, q, base) {
                    continue;
                }
                for (w1, w2) in [(others[0], others[1]), (others[1], others[0])] {
                    let seq = vec![base, w1, *pp.last().unwrap(), *qp.last().unwrap(), w2, base];
                    if cyclic_subsequence(k, &seq) {
                        return Some(ClauseEvidence {
                            base,
                            blockchains: vec![p.clone(), q.clone()],
                            paths: vec![pp.clone(), qp.clone()],
                            subsequence: seq,
                        });
                    }
                }
            }
        }
    }
    None
}

fn clause3(g: &Graph, k: &[usize], w: &[usize], pieces: &[Attachment]) -> Option<ClauseEvidence> {
    let on_k: Vec<usize> = w.iter().copied().filter(|v| k.contains(v)).collect();
    for &base in k.iter().filter(|v| !w.contains(v)) {
        let cands = separated_at(g, k, pieces, base, w);
        let m = cands.len();
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    if i == j || j == l || i == l {
                        continue;
                    }
                    let (a, b, c) = (&cands[i], &cands[j], &cands[l]);
                    if !(meet_only_at(&a.0, &b.0, base) && meet_only_at(&a.0, &c.0, base) && meet_only_at(&b.0, &c.0, base)) {
                        continue;
                    }
                    for (w1, w2) in [(on_k[0], on_k[1]), (on_k[1], on_k[0])] {
                        let ends = [a, b, c].map(|x| *x.1.last().unwrap());
                        let seq = vec![base, w1, ends[0], ends[1], ends[2], w2, base];
                        if cyclic_subsequence(k, &seq) {
                            return Some(ClauseEvidence {
                                base,
                                blockchains: vec![a.0.clone(), b.0.clone(), c.0.clone()],
                                paths: vec![a.1.clone(), b.1.clone(), c.1.clone()],
                                subsequence: seq,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

fn report(g: &Graph, k: &[usize], w: &[usize], wset: &BTreeSet<usize>, max_hits: usize) -> Result<SoundnessReport> {
    let h = hits(k, wset);
    let pieces = if h == 2 || h == 3 { k_attachments(g, k)? } else { Vec::new() };
    Ok(SoundnessReport {
        cycle: k.to_vec(),
        w: w.to_vec(),
        hits: h,
        max_hits,
        maximal: h == max_hits,
        clause2_evidence: if h == 3 { clause2(g, k, w, &pieces) } else { None },
        clause3_evidence: if h == 2 { clause3(g, k, w, &pieces) } else { None },
    })
}

fn max_hits(g: &Graph, wset: &BTreeSet<usize>) -> Result<usize> {
    Ok(enumerate_cycles(g)?.iter().map(|c| hits(c, wset)).max().unwrap_or(0))
}

pub fn is_w_sound(g: &Graph, k: &[usize], w: &[usize]) -> Result<SoundnessReport> {
    let wset = check_w(g, w)?;
    check_cycle(g, k)?;
    let best = max_hits(g, &wset)?;
    report(g, k, w, &wset, best)
}

/// The first W-sound cycle among the W-maximal cycles, in enumeration order.
/// Running out of candidates is an [`Error::OracleFailure`].
pub fn find_w_sound_cycle(g: &Graph, w: &[usize]) -> Result<(Vec<usize>, SoundnessReport)> {
    let wset = check_w(g, w)?;
    check_block(g)?;
    let cycles = enumerate_cycles(g)?;
    let best = cycles.iter().map(|c| hits(c, &wset)).max().unwrap_or(0);
    for c in cycles.iter().filter(|c| hits(c, &wset) == best) {
        let r = report(g, c, w, &wset, best)?;
        if r.is_sound() {
            return Ok((c.clone(), r));
        }
    }
    Err(Error::OracleFailure(format!("no W-sound cycle for W = {w:?} among cycles with {best} hits")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsGraph {
    pub host: Graph,
    pub e_part: BTreeSet<Edge>,
    pub p_part: BTreeSet<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsViolation {
    NotInHost(Edge),
    Overlap(Edge),
    OddDegree(usize),
    LinearForestDegree(usize),
    LinearForestCycle,
    NotSpanningConnected,
    CycleNotInEven(Edge),
    PathDegreeAtW(usize),
}

impl fmt::Display for EpsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn degrees(n: usize, edges: &BTreeSet<Edge>) -> Vec<usize> {
    let mut d = vec![0; n];
    for e in edges {
        d[e.lo()] += 1;
        d[e.hi()] += 1;
    }
    d
}

/// Checks the EPS invariants of `s` from its host and two edge sets alone.
pub fn validate_eps(s: &EpsGraph) -> std::result::Result<(), EpsViolation> {
    let n = s.host.n();
    for e in s.e_part.iter().chain(&s.p_part) {
        if !s.host.has_edge(e.lo(), e.hi()) {
            return Err(EpsViolation::NotInHost(*e));
        }
    }
    if let Some(e) = s.e_part.intersection(&s.p_part).next() {
        return Err(EpsViolation::Overlap(*e));
    }
    if let Some(v) = degrees(n, &s.e_part).iter().position(|d| d % 2 == 1) {
        return Err(EpsViolation::OddDegree(v));
    }
    if let Some(v) = degrees(n, &s.p_part).iter().position(|&d| d > 2) {
        return Err(EpsViolation::LinearForestDegree(v));
    }
    let forest = Graph::new(n, s.p_part.iter().copied()).expect("host edges");
    if s.p_part.len() + forest.components().len() != n {
        return Err(EpsViolation::LinearForestCycle);
    }
    let all = Graph::new(n, s.e_part.iter().chain(&s.p_part).copied()).expect("host edges");
    if !all.is_connected() {
        return Err(EpsViolation::NotSpanningConnected);
    }
    Ok(())
}

/// [`validate_eps`] plus the side conditions: `K ⊆ E` and `d_P(w) <= 1` on `W`.
pub fn validate_eps_for(s: &EpsGraph, k: &[usize], w: &[usize]) -> std::result::Result<(), EpsViolation> {
    validate_eps(s)?;
    for i in 0..k.len() {
        let e = Edge::new(k[i], k[(i + 1) % k.len()]);
        if !s.e_part.contains(&e) {
            return Err(EpsViolation::CycleNotInEven(e));
        }
    }
    let d = degrees(s.host.n(), &s.p_part);
    if let Some(&v) = w.iter().find(|&&v| d[v] > 1) {
        return Err(EpsViolation::PathDegreeAtW(v));
    }
    Ok(())
}

type Mask = u128;

/// Searches every even subgraph `Z` of `E(G) - E(K)` (via the cycle space)
/// for an EPS-graph with `E = K ∪ Z`; for each, looks for a linear forest
/// joining the components of `E` with degree at most one at `W`. Exhaustion
/// is an [`Error::OracleFailure`].
pub fn find_eps_with_sound_cycle(g: &Graph, k: &[usize], w: &[usize]) -> Result<EpsGraph> {
    check_w(g, w)?;
    check_cycle(g, k)?;
    let edges: Vec<Edge> = g.edges().collect();
    if edges.len() > Mask::BITS as usize {
        return Err(Error::TooLarge { n: edges.len(), cap: Mask::BITS as usize });
    }
    let index: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let k_mask: Mask = (0..k.len())
        .map(|i| 1 << index[&Edge::new(k[i], k[(i + 1) % k.len()])])
        .fold(0, |a, b| a | b);

    let basis = cycle_basis(g.n(), &edges, !k_mask);
    let in_w: Vec<bool> = (0..g.n()).map(|v| w.contains(&v)).collect();
    // Gray code walk over all 2^r combinations of basis cycles.
    let r = basis.len();
    if r >= 40 {
        return Err(Error::TooLarge { n: r, cap: 40 });
    }
    let mut z: Mask = 0;
    for step in 0u64..(1u64 << r) {
        if step > 0 {
            z ^= basis[step.trailing_zeros() as usize];
        }
        let e_mask = k_mask | z;
        if let Some(p_mask) = linear_forest(g.n(), &edges, e_mask, &in_w) {
            let pick = |m: Mask| -> BTreeSet<Edge> {
                (0..edges.len()).filter(|&i| m >> i & 1 == 1).map(|i| edges[i]).collect()
            };
            return Ok(EpsGraph { host: g.clone(), e_part: pick(e_mask), p_part: pick(p_mask) });
        }
    }
    Err(Error::OracleFailure("no EPS-graph with K in E and d_P(w) <= 1 on W".into()))
}

/// Fundamental cycles of the edges selected by `allowed`, as edge masks.
fn cycle_basis(n: usize, edges: &[Edge], allowed: Mask) -> Vec<Mask> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        if allowed >> i & 1 == 1 {
            adj[e.lo()].push((e.hi(), i));
            adj[e.hi()].push((e.lo(), i));
        }
    }
    let mut tree: Mask = 0;
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(u, i) in &adj[v] {
                if depth[u] == usize::MAX {
                    depth[u] = depth[v] + 1;
                    parent[u] = Some((v, i));
                    tree |= 1 << i;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut basis = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        if allowed >> i & 1 == 0 || tree >> i & 1 == 1 {
            continue;
        }
        let mut m: Mask = 1 << i;
        let (mut a, mut b) = (e.lo(), e.hi());
        while a != b {
            if depth[a] < depth[b] {
                std::mem::swap(&mut a, &mut b);
            }
            let (p, j) = parent[a].unwrap();
            m ^= 1 << j;
            a = p;
        }
        basis.push(m);
    }
    basis
}

/// A set of edges outside `e_mask` joining all components of `(V, E)` into
/// one, with degree at most two everywhere and at most one on `W`.
fn linear_forest(n: usize, edges: &[Edge], e_mask: Mask, in_w: &[bool]) -> Option<Mask> {
    let mut comp = vec![usize::MAX; n];
    let e_graph = Graph::new(n, (0..edges.len()).filter(|&i| e_mask >> i & 1 == 1).map(|i| edges[i]))
        .expect("host edges");
    let comps = e_graph.components();
    for (c, vs) in comps.iter().enumerate() {
        for &v in vs {
            comp[v] = c;
        }
    }
    let cands: Vec<usize> = (0..edges.len())
        .filter(|&i| e_mask >> i & 1 == 0 && comp[edges[i].lo()] != comp[edges[i].hi()])
        .collect();
    let mut st = ForestSearch {
        edges,
        cands: &cands,
        in_w,
        deg: vec![0; n],
        uf: (0..comps.len()).collect(),
        comp: &comp,
        chosen: 0,
    };
    st.grow(0, comps.len() - 1).then_some(st.chosen)
}

struct ForestSearch<'a> {
    edges: &'a [Edge],
    cands: &'a [usize],
    in_w: &'a [bool],
    deg: Vec<usize>,
    uf: Vec<usize>,
    comp: &'a [usize],
    chosen: Mask,
}

impl ForestSearch<'_> {
    fn find(&self, mut c: usize) -> usize {
        while self.uf[c] != c {
            c = self.uf[c];
        }
        c
    }

    fn cap(&self, v: usize) -> usize {
        if self.in_w[v] {
            1
        } else {
            2
        }
    }

    fn grow(&mut self, from: usize, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        for j in from..self.cands.len() {
            if self.cands.len() - j < need {
                return false;
            }
            let i = self.cands[j];
            let (u, v) = (self.edges[i].lo(), self.edges[i].hi());
            if self.deg[u] >= self.cap(u) || self.deg[v] >= self.cap(v) {
                continue;
            }
            let (ru, rv) = (self.find(self.comp[u]), self.find(self.comp[v]));
            if ru == rv {
                continue;
            }
            self.uf[ru] = rv;
            self.deg[u] += 1;
            self.deg[v] += 1;
            self.chosen |= 1 << i;
            if self.grow(j + 1, need - 1) {
                return true;
            }
            self.chosen &= !(1 << i);
            self.deg[u] -= 1;
            self.deg[v] -= 1;
            self.uf[ru] = ru;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_counts() {
        assert_eq!(enumerate_cycles(&Graph::cycle(5)).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
        // K_4 has 4 triangles and 3 four-cycles
        assert_eq!(enumerate_cycles(&Graph::complete(4)).unwrap().len(), 7);
        // K_5: 10 + 15 + 12
        assert_eq!(enumerate_cycles(&Graph::complete(5)).unwrap().len(), 37);
        assert!(enumerate_cycles(&Graph::path(6)).unwrap().is_empty());
    }

    #[test]
    fn c5_is_sound() {
        let g = Graph::cycle(5);
        let w = [0, 1, 2, 3, 4];
        assert_eq!(find_w_maximal_cycle(&g, &w).unwrap(), (vec![0, 1, 2, 3, 4], 5));
        let r = is_w_sound(&g, &[0, 1, 2, 3, 4], &w).unwrap();
        assert!(r.is_sound() && r.hits == 5);
        assert_eq!(find_w_sound_cycle(&g, &w).unwrap().0, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn maximal_needs_block() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 4)]).unwrap();
        assert!(matches!(find_w_maximal_cycle(&g, &[0, 1, 2, 3, 4]), Err(Error::Precondition(_))));
        assert!(matches!(is_w_sound(&Graph::cycle(5), &[0, 1, 2, 3], &[0, 1, 2, 3]), Err(Error::Precondition(_))));
    }

    /// The 8-cycle 0..8 with ears 0-8-3 and 0-9-4, W = {0, 2, 6, 8, 9}.
    fn two_ears() -> (Graph, Vec<usize>) {
        let mut e: Vec<(usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        e.extend([(0, 8), (8, 3), (0, 9), (9, 4)]);
        (Graph::new(10, e).unwrap(), vec![0, 2, 6, 8, 9])
    }

    #[test]
    fn ear_is_separated() {
        let (g, w) = two_ears();
        let k: Vec<usize> = (0..8).collect();
        let pieces = k_attachments(&g, &k).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(is_w_separated_ktok_blockchain(&g, &k, &pieces[0], 0, &w));
        assert!(is_w_separated_ktok_blockchain(&g, &k, &pieces[0], 3, &w));
        assert!(!is_w_separated_ktok_blockchain(&g, &k, &pieces[0], 1, &w));
        assert!(!is_w_separated_ktok_blockchain(&g, &k, &pieces[0], 0, &[0, 1, 2, 3, 4]));
        assert_eq!(shortest_exit(&k, &pieces[0], 0), Some(vec![0, 8, 3]));
    }

    #[test]
    fn endblock_meeting_k_twice_is_rejected() {
        // K = 0..6; the piece is the 4-cycle 0-6-1-8 with chord 6-8, followed by bridges 6-7 and 7-3,
        // so the x-side endblock on 0 also touches K in 1.
        let mut e: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        e.extend([(0, 6), (6, 1), (1, 8), (8, 0), (6, 8), (6, 7), (7, 3)]);
        let g = Graph::new(9, e).unwrap();
        let k: Vec<usize> = (0..6).collect();
        let p = &k_attachments(&g, &k).unwrap()[0];
        let w = [7, 2, 3, 4, 5];
        assert!(!is_w_separated_ktok_blockchain(&g, &k, p, 0, &w));
        assert!(!is_w_separated_ktok_blockchain(&g, &k, p, 1, &w));
        // from the other side the chain is fine: {3, 7} meets K only in 3
        assert!(is_w_separated_ktok_blockchain(&g, &k, p, 3, &w));
    }

    #[test]
    fn forbidden_three_hit_configuration() {
        let (g, w) = two_ears();
        let k: Vec<usize> = (0..8).collect();
        let r = is_w_sound(&g, &k, &w).unwrap();
        assert_eq!((r.hits, r.max_hits), (3, 3));
        let ev = r.clause2_evidence.clone().expect("forbidden configuration");
        assert_eq!(ev.base, 0);
        assert!(!r.is_sound());
        for p in &ev.blockchains {
            assert!(is_w_separated_ktok_blockchain(&g, &k, p, 0, &w));
        }
        // dropping a W vertex on K makes the ears beat K
        let wp: BTreeSet<usize> = [0, 2, 8, 9].into();
        let beats = enumerate_cycles(&g).unwrap().iter().any(|c| hits(c, &wp) > hits(&k, &wp));
        assert!(beats);
        let (sound, rep) = find_w_sound_cycle(&g, &w).unwrap();
        assert!(rep.is_sound());
        assert_ne!(sound, k);
    }

    #[test]
    fn counterexample_family_sound_cycle() {
        let fam = crate::constructions::build_h5_counterexample(&Graph::cycle(4), 0, 1, 3).unwrap();
        let w = fam.witness_set();
        assert_eq!(find_w_maximal_cycle(&fam.graph, &w).unwrap().1, 4);
        let (_, r) = find_w_sound_cycle(&fam.graph, &w).unwrap();
        assert_eq!(r.hits, 4);
    }

    #[test]
    fn eps_on_a_cycle() {
        let g = Graph::cycle(6);
        let k: Vec<usize> = (0..6).collect();
        let s = find_eps_with_sound_cycle(&g, &k, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(s.e_part.len(), 6);
        assert!(s.p_part.is_empty());
        assert_eq!(validate_eps_for(&s, &k, &[0, 1, 2, 3, 4]), Ok(()));
    }

    #[test]
    fn eps_on_wheel() {
        let g = Graph::wheel(4);
        let k = [1, 2, 3, 4];
        let w = [0, 1, 2, 3, 4];
        let s = find_eps_with_sound_cycle(&g, &k, &w).unwrap();
        assert_eq!(validate_eps_for(&s, &k, &w), Ok(()));
        assert_eq!(s.p_part.len(), 1);
    }

    #[test]
    fn validator_rejections() {
        let g = Graph::complete(4);
        let mk = |e: &[(usize, usize)], p: &[(usize, usize)]| EpsGraph {
            host: g.clone(),
            e_part: e.iter().map(|&x| x.into()).collect(),
            p_part: p.iter().map(|&x| x.into()).collect(),
        };
        assert_eq!(validate_eps(&mk(&[(0, 1), (1, 2)], &[])), Err(EpsViolation::OddDegree(0)));
        assert_eq!(validate_eps(&mk(&[], &[(0, 1), (0, 2), (0, 3)])), Err(EpsViolation::LinearForestDegree(0)));
        assert_eq!(validate_eps(&mk(&[], &[(0, 1), (1, 2), (2, 0)])), Err(EpsViolation::LinearForestCycle));
        assert_eq!(validate_eps(&mk(&[(0, 1), (1, 2), (2, 0)], &[])), Err(EpsViolation::NotSpanningConnected));
        assert_eq!(validate_eps(&mk(&[(0, 1), (1, 2), (2, 0)], &[(2, 0), (0, 3)])), Err(EpsViolation::Overlap(Edge::new(0, 2))));
        assert_eq!(validate_eps(&mk(&[(0, 1), (1, 2), (2, 0)], &[(2, 3)])), Ok(()));
        let s = mk(&[(0, 1), (1, 2), (2, 0)], &[(2, 3), (3, 0)]);
        assert_eq!(validate_eps_for(&s, &[0, 1, 2], &[3]).err(), Some(EpsViolation::PathDegreeAtW(3)));
    }

    #[test]
    fn subsequence_is_cyclic_and_strict() {
        let k = [0, 1, 2, 3, 4, 5];
        assert!(cyclic_subsequence(&k, &[3, 5, 1, 3]));
        assert!(cyclic_subsequence(&k, &[3, 1, 5, 3]));
        assert!(!cyclic_subsequence(&k, &[3, 5, 5, 3]));
        assert!(!cyclic_subsequence(&k, &[3, 1, 5, 2, 3]));
    }
}
