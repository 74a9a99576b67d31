//! Explicit constructions on top of the exact oracle: gluing per-block paths
//! along a blockchain, replacing an endblock by a path of length three and
//! splicing a cycle back through it, and the family of 2-blocks whose squares
//! admit no Hamiltonian cycle with five prescribed witness edges.
//!
//! Every certificate built here is re-validated with
//! [`check_certificate`](crate::oracle::check_certificate) before it is returned.

use std::collections::BTreeSet;
use std::fmt;

use crate::connectivity::{self, Blockchain};
use crate::error::{precondition, Error, Result};
use crate::graph::{Edge, Graph, VertexMap};
use crate::matching::saturating_matching;
use crate::oracle::{assign_witnesses, check_certificate, Certificate, ConstraintSpec, Kind, Outcome, Solver, Witness};

fn expect_found(outcome: Outcome, what: &str) -> Result<Certificate> {
    match outcome {
        Outcome::Found(c) => Ok(c),
        Outcome::Absent { nodes } => Err(Error::OracleFailure(format!(
            "{what}: exhausted after {nodes} nodes"
        ))),
        Outcome::Unknown { nodes } => Err(Error::Timeout(format!("{what} after {nodes} nodes"))),
    }
}

fn revalidate(g: &Graph, spec: &ConstraintSpec, cert: &Certificate, what: &str) -> Result<()> {
    check_certificate(g, spec, cert)
        .map_err(|r| Error::OracleFailure(format!("{what} produced an invalid certificate: {r}")))
}

/// Per-block requirement for [`blockchain_path`]: an optional non-cutvertex
/// `u` and a vertex `v != u`, each needing its own edge of the block on the path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockDemand {
    pub u: Option<usize>,
    pub v: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedPath {
    pub certificate: Certificate,
    pub spec: ConstraintSpec,
    pub chain: Blockchain,
    /// The piece of the path spanning each block, from `c_{i-1}` to `c_i`.
    pub pieces: Vec<Vec<usize>>,
}

/// Builds a `c0`-`ck` Hamiltonian path of `g²` block by block: an F_4 path
/// in each 2-block whose `v` is not an attachment vertex, a strong F_3 path
/// when it is, and the bridge itself for bridge blocks.
pub fn blockchain_path(
    solver: &Solver,
    g: &Graph,
    c0: usize,
    ck: usize,
    demands: &[BlockDemand],
) -> Result<GluedPath> {
    let chain = connectivity::as_blockchain(g)?
        .ok_or_else(|| precondition("block-cutvertex tree is not a path"))?;
    if chain.is_trivial() {
        return Err(precondition("blockchain is trivial"));
    }
    let k = chain.len();
    if demands.len() != k {
        return Err(precondition(format!("expected {k} block demands, got {}", demands.len())));
    }
    let cuts: BTreeSet<usize> = chain.cutvertices.iter().copied().collect();
    let in_block = |v: usize, i: usize| chain.blocks[i].binary_search(&v).is_ok();
    if !in_block(c0, 0) || cuts.contains(&c0) {
        return Err(precondition("c0 must be a non-cutvertex of the first block"));
    }
    if !in_block(ck, k - 1) || cuts.contains(&ck) {
        return Err(precondition("ck must be a non-cutvertex of the last block"));
    }

    let mut order = vec![c0];
    let mut witnesses = Vec::new();
    let mut spec_demands = Vec::new();
    let mut pieces = Vec::new();
    for (i, d) in demands.iter().enumerate() {
        let start = if i == 0 { c0 } else { chain.cutvertices[i - 1] };
        let end = if i == k - 1 { ck } else { chain.cutvertices[i] };
        if !in_block(d.v, i) {
            return Err(precondition(format!("v_{} = {} is not in its block", i + 1, d.v)));
        }
        if let Some(u) = d.u {
            if !in_block(u, i) || cuts.contains(&u) {
                return Err(precondition(format!("u_{} = {u} must be a non-cutvertex of its block", i + 1)));
            }
            if u == d.v {
                return Err(precondition(format!("u_{} equals v_{}", i + 1, i + 1)));
            }
            if u == start || u == end {
                return Err(precondition(format!("u_{} coincides with a path end", i + 1)));
            }
        }

        let (piece, block_witnesses) = if chain.is_bridge(i) {
            if d.u.is_some() {
                return Err(precondition(format!("bridge block {} has no admissible u", i + 1)));
            }
            (vec![start, end], vec![Witness { vertex: d.v, edge: Edge::new(start, end) }])
        } else {
            block_piece(solver, g, &chain.blocks[i], start, end, *d)?
        };
        for w in &block_witnesses {
            spec_demands.push(w.vertex);
        }
        witnesses.extend(block_witnesses);
        order.extend_from_slice(&piece[1..]);
        pieces.push(piece);
    }

    let spec = ConstraintSpec::path(c0, ck, spec_demands);
    let certificate = Certificate { kind: Kind::Path, order, witnesses };
    revalidate(g, &spec, &certificate, "blockchain gluing")?;
    Ok(GluedPath { certificate, spec, chain, pieces })
}

fn block_piece(
    solver: &Solver,
    g: &Graph,
    block: &[usize],
    start: usize,
    end: usize,
    d: BlockDemand,
) -> Result<(Vec<usize>, Vec<Witness>)> {
    let (b, map) = g.induced_subgraph(block)?;
    let local = |v: usize| map.new_id(v).expect("vertex of the block");
    let (s, t, v) = (local(start), local(end), local(d.v));
    let u = d.u.map(local);
    let outcome = if v != s && v != t {
        let rest: Vec<usize> = u.into_iter().chain([v]).collect();
        solver.find_f_path(&b, s, t, &rest)?
    } else if let Some(u) = u {
        let i = if v == s { 1 } else { 2 };
        solver.find_strong_f3_path(&b, s, t, u, i)?
    } else {
        solver.solve(&b, &ConstraintSpec::path(s, t, vec![v]))?
    };
    let cert = expect_found(outcome, "block path")?;
    let global = |x: usize| map.old_id(x).unwrap();
    let piece = cert.order.iter().map(|&x| global(x)).collect();
    // The oracle lists witnesses in demand order, which may put v before u.
    let mut ws: Vec<Witness> = cert
        .witnesses
        .iter()
        .map(|w| Witness {
            vertex: global(w.vertex),
            edge: Edge::new(global(w.edge.lo()), global(w.edge.hi())),
        })
        .collect();
    if d.u.is_some() && ws[0].vertex != d.u.unwrap() {
        ws.swap(0, 1);
    }
    Ok((piece, ws))
}

/// The anchors of a reduced graph `G_1`, in `G_1` ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchors {
    pub x_prime: usize,
    pub x: usize,
    pub a: usize,
    pub b: usize,
    pub y: usize,
}

/// `G_1`: the host with an endblock `B` replaced by the path `x, a, b, y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndblockReduction {
    pub reduced: Graph,
    /// Host ids to `G_1` ids; `a` and `b` are the two fresh ids at the top.
    pub map: VertexMap,
    pub anchors: Anchors,
    pub block: Vec<usize>,
}

impl EndblockReduction {
    /// Translates a `G_1` id back to the host; `None` for `a` and `b`.
    pub fn host_id(&self, v: usize) -> Option<usize> {
        self.map.old_id(v)
    }
}

/// Replaces the endblock `block` (attached to the rest of `g` through the
/// edge `x_prime x` and the cutvertex `y`) by the path `x, a, b, y`.
pub fn replace_endblock_with_path(
    g: &Graph,
    block: &[usize],
    x: usize,
    y: usize,
    x_prime: usize,
) -> Result<EndblockReduction> {
    let mut block: Vec<usize> = block.to_vec();
    block.sort_unstable();
    block.dedup();
    let (b, _) = g.induced_subgraph(&block)?;
    if !connectivity::is_two_block(&b) {
        return Err(precondition("replaced block must be a 2-block"));
    }
    if block.len() == 3 {
        return Err(precondition("replaced block is a triangle"));
    }
    let inside = |v: usize| block.binary_search(&v).is_ok();
    if !inside(x) || !inside(y) || x == y {
        return Err(precondition("x and y must be distinct vertices of the block"));
    }
    if inside(x_prime) || !g.has_edge(x, x_prime) {
        return Err(precondition("x' must be an outside neighbour of x"));
    }
    for &v in &block {
        let leaks = g.adj(v).iter().filter(|&&u| !inside(u));
        let ok = match v {
            _ if v == y => true,
            _ if v == x => leaks.copied().eq([x_prime]),
            _ => leaks.count() == 0,
        };
        if !ok {
            return Err(precondition(format!("block vertex {v} has unexpected outside neighbours")));
        }
    }

    let interior: Vec<usize> = block.iter().copied().filter(|&v| v != x && v != y).collect();
    let (core, mut map) = g.delete_vertices(&interior)?;
    let core = core.delete_edges(&[(map.new_id(x).unwrap(), map.new_id(y).unwrap())])?;
    let a = map.push_fresh();
    let bb = map.push_fresh();
    let (nx, ny) = (map.new_id(x).unwrap(), map.new_id(y).unwrap());
    let reduced = Graph::new(
        core.n() + 2,
        core.edges().chain([Edge::new(nx, a), Edge::new(a, bb), Edge::new(bb, ny)]),
    )?;
    debug_assert!(reduced.n() + reduced.edge_count() < g.n() + g.edge_count());
    Ok(EndblockReduction {
        reduced,
        anchors: Anchors { x_prime: map.new_id(x_prime).unwrap(), x: nx, a, b: bb, y: ny },
        map,
        block,
    })
}

/// The five traversal patterns of the path `x, a, b, y` that are spliced directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// `..., x, a, b, y, ...`
    One,
    /// `..., x, a, b, y', ...` with `y'y` an edge
    Two,
    /// `..., x', a, b, x, ...`
    Five,
    /// `..., x', a, y, ..., y', b, x, ...` with `y'y` an edge
    Seven,
    /// `..., x', a, y, b, x, ...`
    Nine,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            CaseId::One => 1,
            CaseId::Two => 2,
            CaseId::Five => 5,
            CaseId::Seven => 7,
            CaseId::Nine => 9,
        };
        write!(f, "case {n}")
    }
}

/// A matched traversal: the case, the cycle oriented so the pattern reads
/// forwards, and `y'` where the pattern has one (all in `G_1` ids).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryCase {
    pub case: CaseId,
    pub oriented: Vec<usize>,
    pub y_prime: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Traversal {
    Base(SurgeryCase),
    /// None of the five patterns matches.
    Unreduced,
}

/// Matches the traversal of `x, a, b, y` by the cycle `h1` of `G_1²`.
pub fn classify_traversal(reduced: &Graph, h1: &Certificate, anchors: &Anchors) -> Traversal {
    if h1.kind != Kind::Cycle {
        return Traversal::Unreduced;
    }
    let Anchors { x_prime, x, a, b, y } = *anchors;
    let forward = h1.order.clone();
    let mut backward = forward.clone();
    backward.reverse();
    let mut found: Vec<SurgeryCase> = Vec::new();
    for oriented in [forward, backward] {
        let len = oriented.len();
        let pos = |v: usize| oriented.iter().position(|&u| u == v).unwrap();
        let succ = |v: usize| oriented[(pos(v) + 1) % len];
        let pred = |v: usize| oriented[(pos(v) + len - 1) % len];
        let is_y_prime = |v: usize| v != y && v != a && v != b && reduced.has_edge(v, y);
        let case = if succ(x) == a && succ(a) == b && succ(b) == y {
            Some((CaseId::One, None))
        } else if succ(x_prime) == a && succ(a) == y && succ(y) == b && succ(b) == x {
            Some((CaseId::Nine, None))
        } else if succ(x_prime) == a && succ(a) == b && succ(b) == x {
            Some((CaseId::Five, None))
        } else if succ(x_prime) == a && succ(a) == y && pred(x) == b && is_y_prime(pred(b)) {
            Some((CaseId::Seven, Some(pred(b))))
        } else if succ(x) == a && succ(a) == b && is_y_prime(succ(b)) {
            Some((CaseId::Two, Some(succ(b))))
        } else {
            None
        };
        if let Some((case, y_prime)) = case {
            found.push(SurgeryCase { case, oriented: oriented.clone(), y_prime });
        }
    }
    found.sort_by_key(|c| c.case);
    found.into_iter().next().map_or(Traversal::Unreduced, Traversal::Base)
}

/// A cycle of the host square produced by splicing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splice {
    pub certificate: Certificate,
    pub spec: ConstraintSpec,
    /// Set when no base pattern applied and the cycle came from a direct search instead.
    pub fallback: bool,
}

/// Walks the cycle `cyc` from `from` in the direction that does not start
/// with `avoid`, stopping after `to`.
fn arc(cyc: &[usize], from: usize, avoid: usize, to: usize) -> Vec<usize> {
    let len = cyc.len();
    let i = cyc.iter().position(|&v| v == from).unwrap();
    let step = if cyc[(i + 1) % len] == avoid { len - 1 } else { 1 };
    let mut out = vec![from];
    let mut j = i;
    while cyc[j] != to {
        j = (j + step) % len;
        out.push(cyc[j]);
    }
    out
}

/// Rotates `cyc` so that it starts at `v`.
fn starting_at(cyc: &[usize], v: usize) -> Vec<usize> {
    let i = cyc.iter().position(|&u| u == v).unwrap();
    let mut out = cyc.to_vec();
    out.rotate_left(i);
    out
}

/// Extends the witnessed cycle `h1` of `G_1²` to a Hamiltonian cycle of
/// `g²` by substituting oracle routes through the original endblock.
/// Witness edges of `h1` that avoid the path interior are kept verbatim.
pub fn extend_cycle_through_endblock(
    solver: &Solver,
    g: &Graph,
    red: &EndblockReduction,
    h1: &Certificate,
    traversal: &Traversal,
) -> Result<Splice> {
    let Anchors { x_prime, x, a, b, y } = red.anchors;
    let host = |v: usize| red.host_id(v).expect("anchor outside the path interior");
    let (hx, hy, hxp) = (host(x), host(y), host(x_prime));
    let demands: Vec<usize> = h1.witnesses.iter().map(|w| host(w.vertex)).collect();
    if demands.iter().any(|&v| v != hy && red.block.binary_search(&v).is_ok()) {
        return Err(precondition("witness vertices must avoid the endblock except for y"));
    }
    let spec = ConstraintSpec::cycle(demands.clone());

    let case = match traversal {
        Traversal::Base(case) => case,
        Traversal::Unreduced => {
            let outcome = solver.find_h_cycle(g, &demands)?;
            let certificate = expect_found(outcome, "fallback cycle search")?;
            return Ok(Splice { certificate, spec, fallback: true });
        }
    };

    let (bg, bmap) = g.induced_subgraph(&red.block)?;
    let blocal = |v: usize| bmap.new_id(v).unwrap();
    let bglobal = |v: usize| bmap.old_id(v).unwrap();

    // Route in G_1 ids where a and b are dropped, then translated to host ids.
    let in_g1 = |seq: &[usize]| -> Vec<usize> {
        seq.iter().copied().filter(|&v| v != a && v != b).map(host).collect()
    };
    let oriented = &case.oriented;
    let order: Vec<usize> = match case.case {
        CaseId::One | CaseId::Two => {
            // x to y path through B whose last edge y* y is an edge of B
            let path = expect_found(
                solver.solve(&bg, &ConstraintSpec::path(blocal(hx), blocal(hy), vec![blocal(hy)]))?,
                "path through the endblock",
            )?;
            let interior: Vec<usize> =
                path.order[1..path.order.len() - 1].iter().map(|&v| bglobal(v)).collect();
            let resume = if case.case == CaseId::One { y } else { case.y_prime.unwrap() };
            let mut seq = in_g1(&starting_at(oriented, resume));
            seq.extend(interior);
            seq
        }
        CaseId::Five | CaseId::Seven | CaseId::Nine => {
            let hb = expect_found(
                solver.find_thm3_cycle(&bg, blocal(hy), blocal(hx))?,
                "cycle of the endblock with both edges at y in B",
            )?;
            let hb_order: Vec<usize> = hb.order.iter().map(|&v| bglobal(v)).collect();
            let x_star = bglobal(hb.witnesses[2].edge.other(blocal(hx)).unwrap());
            match case.case {
                CaseId::Five => {
                    // H* skips y by joining its two neighbours; then drop x x*.
                    let h_star: Vec<usize> = starting_at(&hb_order, hy)[1..].to_vec();
                    let detour = arc(&h_star, x_star, hx, hx);
                    let mut seq = in_g1(&starting_at(oriented, x)[1..]);
                    seq.extend(detour);
                    seq
                }
                CaseId::Nine => {
                    let detour = arc(&hb_order, x_star, hx, hx);
                    let rotated = starting_at(oriented, x);
                    let mut seq: Vec<usize> = rotated[1..]
                        .iter()
                        .copied()
                        .filter(|&v| v != a && v != b && v != y)
                        .map(host)
                        .collect();
                    seq.extend(detour);
                    seq
                }
                _ => {
                    // x', a, y, S, y', b, x, T  becomes  x', P_1, S, y', P_2, T
                    let rot = starting_at(oriented, x_prime);
                    let ib = rot.iter().position(|&v| v == b).unwrap();
                    let s_part = &rot[3..ib - 1];
                    let t_part = &rot[ib + 2..];
                    let p1 = arc(&hb_order, x_star, hx, hy);
                    let mut p2 = arc(&hb_order, hx, x_star, hy);
                    p2.pop();
                    p2.reverse();
                    let mut seq = vec![hxp];
                    seq.extend(p1);
                    seq.extend(in_g1(s_part));
                    seq.push(host(case.y_prime.unwrap()));
                    seq.extend(p2);
                    seq.extend(in_g1(t_part));
                    seq
                }
            }
        }
    };

    let mut route: Vec<Edge> = order.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    route.push(Edge::new(order[order.len() - 1], order[0]));
    let witnesses = carry_witnesses(g, red, h1, &route)
        .or_else(|| assign_witnesses(g, &demands, &route))
        .ok_or_else(|| Error::OracleFailure(format!("{}: witnesses could not be carried over", case.case)))?;
    let mut certificate = Certificate { kind: Kind::Cycle, order, witnesses };
    certificate.canonicalize();
    revalidate(g, &spec, &certificate, "endblock splice")?;
    Ok(Splice { certificate, spec, fallback: false })
}

/// Keeps each witness edge of `h1` that avoids `a` and `b`; witnesses on the
/// replaced path are re-matched to unused host edges on the new route.
fn carry_witnesses(
    g: &Graph,
    red: &EndblockReduction,
    h1: &Certificate,
    route: &[Edge],
) -> Option<Vec<Witness>> {
    let on_route: BTreeSet<Edge> =
        route.iter().copied().filter(|e| g.has_edge(e.lo(), e.hi())).collect();

    let mut out: Vec<Option<Witness>> = vec![None; h1.witnesses.len()];
    let mut used = BTreeSet::new();
    for (i, w) in h1.witnesses.iter().enumerate() {
        let (Some(p), Some(q)) = (red.host_id(w.edge.lo()), red.host_id(w.edge.hi())) else {
            continue;
        };
        let e = Edge::new(p, q);
        if on_route.contains(&e) {
            out[i] = Some(Witness { vertex: red.host_id(w.vertex)?, edge: e });
            used.insert(e);
        }
    }
    let free: Vec<Edge> = on_route.iter().copied().filter(|e| !used.contains(e)).collect();
    let pending: Vec<usize> = (0..out.len()).filter(|&i| out[i].is_none()).collect();
    let options: Vec<Vec<usize>> = pending
        .iter()
        .map(|&i| {
            let v = red.host_id(h1.witnesses[i].vertex).unwrap_or(usize::MAX);
            (0..free.len()).filter(|&j| free[j].contains(v)).collect()
        })
        .collect();
    let assigned = saturating_matching(&options, free.len())?;
    for (&i, j) in pending.iter().zip(assigned) {
        out[i] = Some(Witness { vertex: red.host_id(h1.witnesses[i].vertex)?, edge: free[j] });
    }
    out.into_iter().collect()
}

/// A 2-block `G` with `t >= 3` new vertices each joined to exactly `x1` and `x2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleFamily {
    pub base: Graph,
    pub x1: usize,
    pub x2: usize,
    pub t: usize,
    pub graph: Graph,
    /// Ids of the added vertices, `base.n()..base.n() + t`.
    pub ys: Vec<usize>,
}

impl CounterexampleFamily {
    /// `{x1, x2, y1, y2, y3}`.
    pub fn witness_set(&self) -> Vec<usize> {
        vec![self.x1, self.x2, self.ys[0], self.ys[1], self.ys[2]]
    }
}

pub fn build_h5_counterexample(base: &Graph, x1: usize, x2: usize, t: usize) -> Result<CounterexampleFamily> {
    if t < 3 {
        return Err(precondition("t must be at least 3"));
    }
    if !connectivity::is_two_block(base) {
        return Err(precondition("base must be a 2-block"));
    }
    if x1 == x2 || x1 >= base.n() || x2 >= base.n() {
        return Err(precondition("x1 and x2 must be distinct base vertices"));
    }
    let cross: Vec<(usize, usize)> = (0..t).flat_map(|j| [(x1, j), (x2, j)]).collect();
    let graph = base.disjoint_union_with_cross_edges(&Graph::empty(t), &cross)?;
    Ok(CounterexampleFamily {
        base: base.clone(),
        x1,
        x2,
        t,
        ys: (base.n()..base.n() + t).collect(),
        graph,
    })
}

/// A set `T` of at most two vertices such that every demand's base edges all
/// touch `T`, while the demands outnumber the `2|T|` route edges available at
/// `T`. Any such `T` rules out every witnessed Hamiltonian cycle.
pub fn degree_obstruction(g: &Graph, demands: &[usize]) -> Option<Vec<usize>> {
    let covered = |t: &[usize], x: usize| {
        t.contains(&x) || g.adj(x).iter().all(|u| t.contains(u))
    };
    let n = g.n();
    let singles = (0..n).map(|u| vec![u]);
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| vec![u, v]));
    singles.chain(pairs).find(|t| {
        demands.iter().all(|&x| covered(t, x)) && demands.len() > 2 * t.len()
    })
}
