//! Exact search for Hamiltonian cycles and paths in the square of a graph,
//! subject to witness demands: each demanded vertex must be matched to its
//! own edge of the base graph lying on the route. A vertex demanded twice
//! therefore has both of its route edges in the base graph.
//!
//! Results are certificates that [`check_certificate`] re-validates from
//! scratch without sharing any code path with the search.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use crate::connectivity::{self, Blockchain};
use crate::error::{precondition, Error, Result};
use crate::graph::{Edge, Graph};
use crate::matching::saturating_matching;

/// Largest vertex count handled by the bitset search.
pub const SOLVER_CAP: usize = 64;

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(10);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Cycle,
    Path,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Cycle => "cycle",
            Kind::Path => "path",
        })
    }
}

/// What a route in `G²` has to satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintSpec {
    pub kind: Kind,
    /// Required start and end of a path.
    pub endpoints: Option<(usize, usize)>,
    /// Each entry claims a distinct base-graph edge on the route incident to it.
    pub demands: Vec<usize>,
}

impl ConstraintSpec {
    pub fn cycle(demands: Vec<usize>) -> ConstraintSpec {
        ConstraintSpec { kind: Kind::Cycle, endpoints: None, demands }
    }

    pub fn path(from: usize, to: usize, demands: Vec<usize>) -> ConstraintSpec {
        ConstraintSpec { kind: Kind::Path, endpoints: Some((from, to)), demands }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |v: usize| Error::InvalidVertex { vertex: v, n };
        if let Some(&v) = self.demands.iter().find(|&&v| v >= n) {
            return Err(bad(v));
        }
        match (self.kind, self.endpoints) {
            (Kind::Cycle, None) => Ok(()),
            (Kind::Path, Some((s, t))) => {
                if s >= n {
                    Err(bad(s))
                } else if t >= n {
                    Err(bad(t))
                } else if s == t {
                    Err(precondition("path endpoints must differ"))
                } else {
                    Ok(())
                }
            }
            _ => Err(precondition("endpoints are given exactly for paths")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Witness {
    pub vertex: usize,
    pub edge: Edge,
}

/// A Hamiltonian route of `G²` with one witness edge per demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate {
    pub kind: Kind,
    pub order: Vec<usize>,
    pub witnesses: Vec<Witness>,
}

impl Certificate {
    /// Consecutive pairs of the route, plus the closing pair for cycles.
    pub fn route_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.order.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
        if self.kind == Kind::Cycle && self.order.len() >= 3 {
            out.push(Edge::new(self.order[self.order.len() - 1], self.order[0]));
        }
        out
    }

    /// Route edges that are also edges of `g`.
    pub fn base_edges(&self, g: &Graph) -> BTreeSet<Edge> {
        self.route_edges().into_iter().filter(|e| g.has_edge(e.lo(), e.hi())).collect()
    }

    /// The two route neighbours of `v` on a cycle, or one/two on a path.
    pub fn route_neighbors(&self, v: usize) -> Vec<usize> {
        self.route_edges().into_iter().filter_map(|e| e.other(v)).collect()
    }

    /// Rotates a cycle to start at its smallest vertex, oriented towards the
    /// smaller of that vertex's two neighbours. Paths are left as they are.
    pub fn canonicalize(&mut self) {
        if self.kind != Kind::Cycle || self.order.len() < 3 {
            return;
        }
        let start = (0..self.order.len()).min_by_key(|&i| self.order[i]).unwrap();
        self.order.rotate_left(start);
        if self.order[1] > self.order[self.order.len() - 1] {
            self.order[1..].reverse();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Certificate),
    /// The search space was exhausted; `nodes` is the number of search nodes visited.
    Absent { nodes: u64 },
    /// The budget ran out first. Not a claim of absence.
    Unknown { nodes: u64 },
}

impl Outcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn into_certificate(self) -> Option<Certificate> {
        match self {
            Outcome::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Outcome::Absent { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// False when the budget stopped the search.
    pub exhausted: bool,
}

/// Why a certificate was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    KindMismatch,
    NotAPermutation,
    TooShortForCycle,
    WrongEndpoints,
    TooFar { u: usize, v: usize },
    WitnessCount { expected: usize, found: usize },
    WitnessForWrongVertex { index: usize },
    WitnessNotInGraph { index: usize },
    WitnessNotIncident { index: usize },
    WitnessNotOnRoute { index: usize },
    WitnessesNotDistinct { first: usize, second: usize },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Validates `cert` against `g` and `spec` using only breadth-first
/// distances and direct set comparisons.
pub fn check_certificate(
    g: &Graph,
    spec: &ConstraintSpec,
    cert: &Certificate,
) -> std::result::Result<(), Rejection> {
    let n = g.n();
    if cert.kind != spec.kind {
        return Err(Rejection::KindMismatch);
    }
    let mut seen = vec![false; n];
    if cert.order.len() != n {
        return Err(Rejection::NotAPermutation);
    }
    for &v in &cert.order {
        if v >= n || seen[v] {
            return Err(Rejection::NotAPermutation);
        }
        seen[v] = true;
    }
    if cert.kind == Kind::Cycle && n < 3 {
        return Err(Rejection::TooShortForCycle);
    }
    if let Some((s, t)) = spec.endpoints {
        if cert.order.first() != Some(&s) || cert.order.last() != Some(&t) {
            return Err(Rejection::WrongEndpoints);
        }
    }
    let mut pairs: Vec<(usize, usize)> = cert.order.windows(2).map(|w| (w[0], w[1])).collect();
    if cert.kind == Kind::Cycle {
        pairs.push((cert.order[n - 1], cert.order[0]));
    }
    for &(u, v) in &pairs {
        match g.distances_from(u)[v] {
            Some(d) if d <= 2 => {}
            _ => return Err(Rejection::TooFar { u, v }),
        }
    }
    if cert.witnesses.len() != spec.demands.len() {
        return Err(Rejection::WitnessCount {
            expected: spec.demands.len(),
            found: cert.witnesses.len(),
        });
    }
    for (index, (w, &x)) in cert.witnesses.iter().zip(&spec.demands).enumerate() {
        if w.vertex != x {
            return Err(Rejection::WitnessForWrongVertex { index });
        }
        if !g.has_edge(w.edge.lo(), w.edge.hi()) {
            return Err(Rejection::WitnessNotInGraph { index });
        }
        if !w.edge.contains(x) {
            return Err(Rejection::WitnessNotIncident { index });
        }
        let (a, b) = (w.edge.lo(), w.edge.hi());
        if !pairs.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a)) {
            return Err(Rejection::WitnessNotOnRoute { index });
        }
    }
    for first in 0..cert.witnesses.len() {
        for second in first + 1..cert.witnesses.len() {
            if cert.witnesses[first].edge == cert.witnesses[second].edge {
                return Err(Rejection::WitnessesNotDistinct { first, second });
            }
        }
    }
    Ok(())
}

/// Assigns a distinct base edge from `route` to every demand, preferring
/// lexicographically smaller edges.
pub fn assign_witnesses(g: &Graph, demands: &[usize], route: &[Edge]) -> Option<Vec<Witness>> {
    let mut base: Vec<Edge> =
        route.iter().copied().filter(|e| g.has_edge(e.lo(), e.hi())).collect();
    base.sort();
    base.dedup();
    let options: Vec<Vec<usize>> = demands
        .iter()
        .map(|&x| (0..base.len()).filter(|&i| base[i].contains(x)).collect())
        .collect();
    let assigned = saturating_matching(&options, base.len())?;
    Some(
        demands
            .iter()
            .zip(assigned)
            .map(|(&vertex, i)| Witness { vertex, edge: base[i] })
            .collect(),
    )
}

/// Which clause of the blockchain-cycle guarantee applies to an anchor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorCase {
    /// The anchor lies in a 2-block: both of its cycle edges are base edges.
    InTwoBlock,
    /// The anchor is the inner end of a bridge: exactly one base edge.
    OnBridge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCycle {
    pub outcome: Outcome,
    pub cases: [AnchorCase; 2],
    pub spec: ConstraintSpec,
}

/// Exact solver with a per-instance wall-clock budget.
#[derive(Clone, Copy, Debug)]
pub struct Solver {
    pub budget: Option<Duration>,
}

impl Default for Solver {
    fn default() -> Solver {
        Solver { budget: Some(DEFAULT_BUDGET) }
    }
}

impl Solver {
    pub fn with_budget(budget: Duration) -> Solver {
        Solver { budget: Some(budget) }
    }

    pub fn unlimited() -> Solver {
        Solver { budget: None }
    }

    /// First certificate in search order, or proof of absence by exhaustion.
    pub fn solve(&self, g: &Graph, spec: &ConstraintSpec) -> Result<Outcome> {
        let mut found = None;
        let stats = self.for_each_solution(g, spec, |c| {
            found = Some(c.clone());
            ControlFlow::Break(())
        })?;
        Ok(match found {
            Some(mut c) => {
                c.canonicalize();
                Outcome::Found(c)
            }
            None if stats.exhausted => Outcome::Absent { nodes: stats.nodes },
            None => Outcome::Unknown { nodes: stats.nodes },
        })
    }

    /// Calls `visit` with every satisfying route. A cycle may be reported once
    /// per orientation.
    pub fn for_each_solution<F>(&self, g: &Graph, spec: &ConstraintSpec, visit: F) -> Result<SearchStats>
    where
        F: FnMut(&Certificate) -> ControlFlow<()>,
    {
        let n = g.n();
        if n > SOLVER_CAP {
            return Err(Error::TooLarge { n, cap: SOLVER_CAP });
        }
        spec.validate(n)?;
        let deadline = self.budget.map(|b| Instant::now() + b);
        let mut search = Search::new(g, spec, deadline, visit);
        search.run();
        Ok(SearchStats { nodes: search.nodes, exhausted: !search.timed_out })
    }

    pub fn find_h_cycle(&self, g: &Graph, xs: &[usize]) -> Result<Outcome> {
        distinct(xs)?;
        if xs.len() > g.n() {
            return Err(precondition("more required vertices than vertices"));
        }
        self.solve(g, &ConstraintSpec::cycle(xs.to_vec()))
    }

    pub fn find_f_path(&self, g: &Graph, x1: usize, x2: usize, rest: &[usize]) -> Result<Outcome> {
        let mut all = vec![x1, x2];
        all.extend_from_slice(rest);
        distinct(&all)?;
        self.solve(g, &ConstraintSpec::path(x1, x2, rest.to_vec()))
    }

    /// Path from `x1` to `x2` with distinct base edges at `x3` and at
    /// `x1` (`i == 1`) or `x2` (`i == 2`).
    pub fn find_strong_f3_path(
        &self,
        g: &Graph,
        x1: usize,
        x2: usize,
        x3: usize,
        i: u8,
    ) -> Result<Outcome> {
        distinct(&[x1, x2, x3])?;
        let xi = match i {
            1 => x1,
            2 => x2,
            _ => return Err(precondition("strong index must be 1 or 2")),
        };
        self.solve(g, &ConstraintSpec::path(x1, x2, vec![x3, xi]))
    }

    /// Cycle whose two edges at `v` are base edges and which carries a
    /// further distinct base edge at `w`.
    pub fn find_thm3_cycle(&self, g: &Graph, v: usize, w: usize) -> Result<Outcome> {
        distinct(&[v, w])?;
        if !connectivity::is_two_block(g) {
            return Err(precondition("graph is not a 2-block"));
        }
        self.solve(g, &ConstraintSpec::cycle(vec![v, v, w]))
    }

    /// Cycle through a blockchain honouring both anchors `u1`, `u2`: two base
    /// edges at an anchor inside a 2-block, one at an anchor on a bridge.
    pub fn find_thm4_cycle(&self, g: &Graph, u1: usize, u2: usize) -> Result<ChainCycle> {
        let (cases, spec) = thm4_spec(g, u1, u2)?;
        let outcome = self.solve(g, &spec)?;
        Ok(ChainCycle { outcome, cases, spec })
    }
}

/// The demands for a blockchain cycle anchored at `u1`, `u2`: an anchor in
/// a 2-block is demanded twice, an anchor on an end bridge once.
pub fn thm4_spec(g: &Graph, u1: usize, u2: usize) -> Result<([AnchorCase; 2], ConstraintSpec)> {
    let chain = connectivity::as_blockchain(g)?
        .ok_or_else(|| precondition("block-cutvertex tree is not a path"))?;
    distinct(&[u1, u2])?;
    if g.n() < 3 {
        return Err(precondition("a cycle needs at least three vertices"));
    }
    let cases = chain_anchor_cases(&chain, u1, u2)?;
    let mut demands = Vec::new();
    for (u, case) in [u1, u2].into_iter().zip(cases) {
        demands.push(u);
        if case == AnchorCase::InTwoBlock {
            demands.push(u);
        }
    }
    Ok((cases, ConstraintSpec::cycle(demands)))
}

fn chain_anchor_cases(chain: &Blockchain, u1: usize, u2: usize) -> Result<[AnchorCase; 2]> {
    let inner = chain.inner_vertices();
    for u in [u1, u2] {
        if !inner.contains(&u) {
            return Err(precondition(format!("{u} is not an inner vertex")));
        }
    }
    let last = chain.len() - 1;
    let case_of = |end: usize| {
        if chain.is_bridge(end) {
            AnchorCase::OnBridge
        } else {
            AnchorCase::InTwoBlock
        }
    };
    if chain.is_trivial() {
        return Ok([case_of(0); 2]);
    }
    let in_block = |u: usize, i: usize| chain.blocks[i].binary_search(&u).is_ok();
    if in_block(u1, 0) && in_block(u2, last) {
        Ok([case_of(0), case_of(last)])
    } else if in_block(u1, last) && in_block(u2, 0) {
        Ok([case_of(last), case_of(0)])
    } else {
        Err(precondition("anchors must lie in different endblocks"))
    }
}

fn distinct(xs: &[usize]) -> Result<()> {
    let set: BTreeSet<_> = xs.iter().collect();
    if set.len() == xs.len() {
        Ok(())
    } else {
        Err(precondition("vertices must be pairwise distinct"))
    }
}

pub fn find_h_cycle(g: &Graph, xs: &[usize]) -> Result<Outcome> {
    Solver::default().find_h_cycle(g, xs)
}

pub fn find_f_path(g: &Graph, x1: usize, x2: usize, rest: &[usize]) -> Result<Outcome> {
    Solver::default().find_f_path(g, x1, x2, rest)
}

pub fn find_strong_f3_path(g: &Graph, x1: usize, x2: usize, x3: usize, i: u8) -> Result<Outcome> {
    Solver::default().find_strong_f3_path(g, x1, x2, x3, i)
}

pub fn find_thm3_cycle(g: &Graph, v: usize, w: usize) -> Result<Outcome> {
    Solver::default().find_thm3_cycle(g, v, w)
}

pub fn find_thm4_cycle(g: &Graph, u1: usize, u2: usize) -> Result<ChainCycle> {
    Solver::default().find_thm4_cycle(g, u1, u2)
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Grows a route from two ends. For cycles both ends start at a root vertex;
/// for paths they start at the two prescribed endpoints. The route is
/// complete when every vertex is placed and the two ends are adjacent in G².
struct Search<'g, F> {
    g: &'g Graph,
    n: usize,
    sq: Vec<u64>,
    kind: Kind,
    demands: Vec<usize>,
    demand_count: Vec<u8>,
    left: Vec<usize>,
    right: Vec<usize>,
    root: usize,
    visited: u64,
    full: u64,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    stopped: bool,
    visit: F,
}

impl<'g, F> Search<'g, F>
where
    F: FnMut(&Certificate) -> ControlFlow<()>,
{
    fn new(g: &'g Graph, spec: &ConstraintSpec, deadline: Option<Instant>, visit: F) -> Self {
        let n = g.n();
        let sq: Vec<u64> = {
            let sq = g.square();
            (0..n).map(|v| sq.adj(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect()
        };
        let mut demand_count = vec![0u8; n];
        for &x in &spec.demands {
            demand_count[x] += 1;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let (left, right, root) = match spec.endpoints {
            Some((s, t)) => (vec![s], vec![t], NONE),
            None => {
                let root = (0..n)
                    .min_by_key(|&v| (sq[v].count_ones(), std::cmp::Reverse(demand_count[v]), v))
                    .unwrap_or(NONE);
                (vec![root], Vec::new(), root)
            }
        };
        let visited = left.iter().chain(&right).fold(0u64, |m, &v| m | 1 << v);
        Search {
            g,
            n,
            sq,
            kind: spec.kind,
            demands: spec.demands.clone(),
            demand_count,
            left,
            right,
            root,
            visited,
            full,
            nodes: 0,
            deadline,
            timed_out: false,
            stopped: false,
            visit,
        }
    }

    fn run(&mut self) {
        if self.n == 0 || (self.kind == Kind::Cycle && self.n < 3) {
            return;
        }
        if self.demands.iter().any(|&x| self.demand_count[x] as usize > self.max_degree(x)) {
            return;
        }
        self.step();
    }

    /// Route degree of `v` in the finished route.
    fn max_degree(&self, v: usize) -> usize {
        if self.kind == Kind::Path && (v == self.left[0] || v == self.right[0]) {
            1
        } else {
            2
        }
    }

    fn end(&self, side: Side) -> usize {
        match side {
            Side::Left => *self.left.last().unwrap(),
            Side::Right => self.right.last().copied().unwrap_or(self.root),
        }
    }

    fn is_base(&self, u: usize, v: usize) -> bool {
        self.g.has_edge(u, v)
    }

    fn step(&mut self) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                    self.stopped = true;
                }
            }
        }
        if self.stopped {
            return;
        }
        let (a, b) = (self.end(Side::Left), self.end(Side::Right));
        if self.visited == self.full {
            if self.sq[a] >> b & 1 == 1 {
                self.emit();
            }
            return;
        }
        let free = self.full & !self.visited;
        let ca = self.sq[a] & free;
        let cb = self.sq[b] & free;
        let (side, cands) = if cb.count_ones() < ca.count_ones() {
            (Side::Right, cb)
        } else {
            (Side::Left, ca)
        };
        if cands == 0 {
            return;
        }
        let mut order: Vec<usize> = bits(cands).collect();
        order.sort_by_key(|&v| ((self.sq[v] & free).count_ones(), v));
        let from = self.end(side);
        for v in order {
            if self.stopped {
                return;
            }
            if self.demand_count[v] as usize > self.is_base(from, v) as usize + 1 {
                continue;
            }
            self.push(side, v);
            if self.feasible(from) {
                self.step();
            }
            self.pop(side);
        }
    }

    fn push(&mut self, side: Side, v: usize) {
        self.visited |= 1 << v;
        match side {
            Side::Left => self.left.push(v),
            Side::Right => self.right.push(v),
        }
    }

    fn pop(&mut self, side: Side) {
        let v = match side {
            Side::Left => self.left.pop(),
            Side::Right => self.right.pop(),
        }
        .unwrap();
        self.visited &= !(1 << v);
    }

    /// Necessary conditions after `closed` has received its last route edge.
    fn feasible(&self, closed: usize) -> bool {
        let free = self.full & !self.visited;
        let ends = (1u64 << self.end(Side::Left)) | (1u64 << self.end(Side::Right));
        for u in bits(free) {
            if (self.sq[u] & ((free & !(1 << u)) | ends)).count_ones() < 2 {
                return false;
            }
        }
        if self.demand_count[closed] == 0 {
            return true;
        }
        // Demands at vertices whose route edges are all fixed must still be matchable.
        let mut fixed: Vec<Edge> = Vec::new();
        for seq in [&self.left, &self.right] {
            fixed.extend(seq.windows(2).map(|w| Edge::new(w[0], w[1])));
        }
        if self.kind == Kind::Cycle {
            if let Some(&first) = self.right.first() {
                fixed.push(Edge::new(self.root, first));
            }
        }
        let done = |x: usize| {
            let deg = fixed.iter().filter(|e| e.contains(x)).count();
            deg >= self.max_degree(x)
        };
        let closed_demands: Vec<usize> = self.demands.iter().copied().filter(|&x| done(x)).collect();
        assign_witnesses(self.g, &closed_demands, &fixed).is_some()
    }

    fn emit(&mut self) {
        let mut order = self.left.clone();
        order.extend(self.right.iter().rev());
        let mut route: Vec<Edge> = order.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
        if self.kind == Kind::Cycle {
            route.push(Edge::new(order[self.n - 1], order[0]));
        }
        let Some(witnesses) = assign_witnesses(self.g, &self.demands, &route) else {
            return;
        };
        let cert = Certificate { kind: self.kind, order, witnesses };
        if (self.visit)(&cert).is_break() {
            self.stopped = true;
        }
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}
