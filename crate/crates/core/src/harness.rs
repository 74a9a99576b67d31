//! Campaigns: run one property over every admissible argument tuple of every
//! graph in a graph6 corpus, in parallel, and persist the results as a
//! line-oriented certificate file that is re-validated on load.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::connectivity;
use crate::constructions::{self, BlockDemand};
use crate::eps;
use crate::error::{precondition, Error, Result};
use crate::graph::{Edge, Graph};
use crate::graph6::{emit_graph6, parse_graph6};
use crate::oracle::{self, check_certificate, Certificate, ConstraintSpec, Kind, Outcome, Solver, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    HProperty,
    FProperty,
    StrongF3,
    Thm3,
    Thm4,
    WSound,
    Eps,
    Counterexample,
    Corollary,
    /// Random blockchains assembled from corpus blocks, glued into paths.
    Glue,
}

impl Mode {
    pub const ALL: [Mode; 10] = [
        Mode::HProperty,
        Mode::FProperty,
        Mode::StrongF3,
        Mode::Thm3,
        Mode::Thm4,
        Mode::WSound,
        Mode::Eps,
        Mode::Counterexample,
        Mode::Corollary,
        Mode::Glue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::HProperty => "h-property",
            Mode::FProperty => "f-property",
            Mode::StrongF3 => "strong-f3",
            Mode::Thm3 => "thm3",
            Mode::Thm4 => "thm4",
            Mode::WSound => "w-sound",
            Mode::Eps => "eps",
            Mode::Counterexample => "counterexample",
            Mode::Corollary => "corollary",
            Mode::Glue => "glue",
        }
    }

    fn kind(self) -> Kind {
        match self {
            Mode::FProperty | Mode::StrongF3 | Mode::Glue => Kind::Path,
            _ => Kind::Cycle,
        }
    }

    /// Whether an `absent` outcome contradicts a guaranteed existence result.
    fn absence_contradicts(self, k: usize) -> bool {
        match self {
            Mode::HProperty | Mode::FProperty => k <= 4,
            Mode::Counterexample => false,
            _ => true,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| precondition(format!("unknown mode {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetPolicy {
    All,
    /// At most `count` argument tuples per graph, drawn with the campaign seed.
    /// In glue mode, the number of blockchains to assemble.
    Sample { count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignSpec {
    pub mode: Mode,
    pub k: usize,
    pub policy: SubsetPolicy,
    pub seed: u64,
    pub timeout: Duration,
    pub jobs: usize,
    /// Skip corpus graphs with more vertices; in glue mode, the cap on the assembled order.
    pub max_n: Option<usize>,
}

impl CampaignSpec {
    pub fn new(mode: Mode, k: usize) -> CampaignSpec {
        CampaignSpec {
            mode,
            k,
            policy: SubsetPolicy::All,
            seed: 0,
            timeout: oracle::DEFAULT_BUDGET,
            jobs: 1,
            max_n: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(precondition("k must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(precondition("at least one worker is needed"));
        }
        if let SubsetPolicy::Sample { count: 0 } = self.policy {
            return Err(precondition("sample count must be at least 1"));
        }
        match self.mode {
            Mode::FProperty if self.k < 2 => Err(precondition("F_k needs k >= 2")),
            Mode::Counterexample if self.k < 3 => Err(precondition("the family needs t >= 3")),
            Mode::Glue if self.policy == SubsetPolicy::All => {
                Err(precondition("glue mode needs a sample count"))
            }
            _ => Ok(()),
        }
    }
}

/// 64-bit LCG with Knuth's MMIX constants; output is the high 31 bits.
#[derive(Clone, Debug)]
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg(seed)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 33) as u32
    }

    /// Uniform-ish draw from `0..n` by reduction modulo `n`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        self.next_u32() as usize % n
    }

    /// `count` distinct indices of `0..n` in increasing order (partial Fisher-Yates).
    pub fn choose(&mut self, n: usize, count: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        let count = count.min(n);
        for i in 0..count {
            let j = i + self.below(n - i);
            idx.swap(i, j);
        }
        let mut out = idx[..count].to_vec();
        out.sort_unstable();
        out
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325, |h, &b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub graphs: Vec<(String, Graph)>,
    pub digest: u64,
}

impl Corpus {
    pub fn parse(text: &str) -> Result<Corpus> {
        let mut graphs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let g = parse_graph6(line).map_err(|e| Error::Malformed { line: i + 1, reason: e.to_string() })?;
            graphs.push((line.to_string(), g));
        }
        Ok(Corpus { graphs, digest: fnv1a(text.as_bytes()) })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Corpus> {
        Corpus::parse(&fs::read_to_string(path)?)
    }

    pub fn from_graphs(graphs: impl IntoIterator<Item = Graph>) -> Corpus {
        let text: String = graphs.into_iter().map(|g| emit_graph6(&g) + "\n").collect();
        Corpus::parse(&text).expect("emitted graph6 parses")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Route(Certificate),
    Sound { cycle: Vec<usize>, hits: usize },
    Eps { cycle: Vec<usize>, e_part: Vec<Edge>, p_part: Vec<Edge> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordOutcome {
    Certified(Evidence),
    Absent { nodes: u64 },
    Unknown { nodes: u64 },
    Error(String),
    /// The graph is outside the class the mode is about.
    OutOfScope(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub g6: String,
    pub mode: Mode,
    pub x: Vec<usize>,
    /// Strong F_3: which endpoint carries the extra edge.
    pub strong: Option<u8>,
    /// Glue: per block, the optional `u` and the `v`.
    pub blocks: Vec<BlockDemand>,
    pub outcome: RecordOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub mode: Mode,
    pub k: usize,
    pub seed: u64,
    pub policy: SubsetPolicy,
    pub timeout_ms: u64,
    pub max_n: Option<usize>,
    pub digest: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignResult {
    pub header: Header,
    pub records: Vec<Record>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub certified: usize,
    pub absent: usize,
    pub unknown: usize,
    pub error: usize,
    pub out_of_scope: usize,
    /// Absent outcomes against an existence guarantee, or certified counterexamples.
    pub contradictions: usize,
}

impl CampaignResult {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for r in &self.records {
            match r.outcome {
                RecordOutcome::Certified(_) => c.certified += 1,
                RecordOutcome::Absent { .. } => c.absent += 1,
                RecordOutcome::Unknown { .. } => c.unknown += 1,
                RecordOutcome::Error(_) => c.error += 1,
                RecordOutcome::OutOfScope(_) => c.out_of_scope += 1,
            }
            if contradicts(self.header.mode, self.header.k, &r.outcome) {
                c.contradictions += 1;
            }
        }
        c
    }

    /// Exit status for the CLI: no errors and no contradicted expectations.
    pub fn passed(&self) -> bool {
        let c = self.counts();
        c.error == 0 && c.contradictions == 0
    }
}

fn contradicts(mode: Mode, k: usize, outcome: &RecordOutcome) -> bool {
    match outcome {
        RecordOutcome::Absent { .. } => mode.absence_contradicts(k),
        RecordOutcome::Certified(_) => mode == Mode::Counterexample,
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub total: Duration,
    pub max_instance: Duration,
}

pub struct Summary<'a>(pub &'a CampaignResult, pub Timings);

impl fmt::Display for Summary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Summary(res, t) = self;
        let c = res.counts();
        writeln!(f, "mode {}  k {}  corpus fnv1a {:016x}", res.header.mode, res.header.k, res.header.digest)?;
        writeln!(f, "records       {}", res.records.len())?;
        writeln!(f, "certified     {}", c.certified)?;
        writeln!(f, "absent        {}", c.absent)?;
        writeln!(f, "unknown       {}{}", c.unknown, if c.unknown > 0 { "  <-- timed out, undecided" } else { "" })?;
        writeln!(f, "error         {}", c.error)?;
        writeln!(f, "out of scope  {}", c.out_of_scope)?;
        writeln!(f, "contradicting {}", c.contradictions)?;
        write!(f, "elapsed {:.3}s total, {:.3}s max per instance", t.total.as_secs_f64(), t.max_instance.as_secs_f64())
    }
}

struct Instance {
    g6: String,
    graph: Graph,
    x: Vec<usize>,
    strong: Option<u8>,
    blocks: Vec<BlockDemand>,
    /// Set when the graph fails the mode's precondition; the record is emitted as is.
    verdict: Option<RecordOutcome>,
}

impl Instance {
    fn new(g6: &str, graph: &Graph, x: Vec<usize>) -> Instance {
        Instance { g6: g6.to_string(), graph: graph.clone(), x, strong: None, blocks: Vec::new(), verdict: None }
    }

    fn rejected(g6: &str, graph: &Graph, outcome: RecordOutcome) -> Instance {
        Instance { verdict: Some(outcome), ..Instance::new(g6, graph, Vec::new()) }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn tuples(mode: Mode, k: usize, g: &Graph) -> std::result::Result<Vec<(Vec<usize>, Option<u8>)>, RecordOutcome> {
    let n = g.n();
    let not_block = || RecordOutcome::Error(precondition("graph is not a 2-block").to_string());
    let plain = |v: Vec<Vec<usize>>| v.into_iter().map(|x| (x, None)).collect();
    match mode {
        Mode::HProperty => {
            if !connectivity::is_two_block(g) {
                return Err(not_block());
            }
            Ok(plain(if k <= n { subsets(n, k) } else { Vec::new() }))
        }
        Mode::FProperty => {
            if !connectivity::is_two_block(g) {
                return Err(not_block());
            }
            let mut out = Vec::new();
            for pair in subsets(n, 2) {
                let others: Vec<usize> = (0..n).filter(|v| !pair.contains(v)).collect();
                if others.len() + 2 < k {
                    continue;
                }
                for rest in subsets(others.len(), k - 2) {
                    let mut x = pair.clone();
                    x.extend(rest.iter().map(|&i| others[i]));
                    out.push((x, None));
                }
            }
            Ok(out)
        }
        Mode::StrongF3 => {
            if !connectivity::is_two_block(g) {
                return Err(not_block());
            }
            let mut out = Vec::new();
            for pair in subsets(n, 2) {
                for x3 in (0..n).filter(|v| !pair.contains(v)) {
                    for i in [1, 2] {
                        out.push((vec![pair[0], pair[1], x3], Some(i)));
                    }
                }
            }
            Ok(out)
        }
        Mode::Thm3 => {
            if !connectivity::is_two_block(g) {
                return Err(not_block());
            }
            Ok(plain((0..n).flat_map(|v| (0..n).filter(move |&w| w != v).map(move |w| vec![v, w])).collect()))
        }
        Mode::Thm4 => {
            let chain = match connectivity::as_blockchain(g) {
                Ok(Some(c)) if !c.is_trivial() => c,
                _ => return Err(RecordOutcome::OutOfScope("not a non-trivial blockchain".into())),
            };
            let ends = (chain.block_inner(0), chain.block_inner(chain.len() - 1));
            Ok(plain(ends.0.iter().flat_map(|&a| ends.1.iter().map(move |&b| vec![a, b])).collect()))
        }
        Mode::WSound | Mode::Eps => {
            if n < 5 || !connectivity::is_two_block(g) {
                return Err(RecordOutcome::Error(
                    precondition("graph is not a 2-block on at least five vertices").to_string(),
                ));
            }
            Ok(plain(subsets(n, 5)))
        }
        Mode::Counterexample => {
            if !connectivity::is_two_block(g) {
                return Err(not_block());
            }
            Ok(plain(subsets(n, 2)))
        }
        Mode::Corollary => Ok(vec![(Vec::new(), None)]),
        Mode::Glue => unreachable!("glue instances are assembled, not enumerated"),
    }
}

fn instances(spec: &CampaignSpec, corpus: &Corpus) -> Vec<Instance> {
    let mut rng = Lcg::new(spec.seed);
    if spec.mode == Mode::Glue {
        let SubsetPolicy::Sample { count } = spec.policy else { unreachable!() };
        let pool: Vec<&Graph> = corpus.graphs.iter().map(|(_, g)| g).filter(|g| connectivity::is_two_block(g)).collect();
        let max_n = spec.max_n.unwrap_or(12);
        return (0..count)
            .map(|_| {
                let (g, c0, ck, blocks) = assemble_blockchain(&mut rng, &pool, max_n);
                Instance { blocks, ..Instance::new(&emit_graph6(&g), &g, vec![c0, ck]) }
            })
            .collect();
    }
    let mut out = Vec::new();
    for (g6, g) in &corpus.graphs {
        if spec.max_n.is_some_and(|m| g.n() > m) {
            continue;
        }
        let list = match tuples(spec.mode, spec.k, g) {
            Ok(list) => list,
            Err(outcome) => {
                out.push(Instance::rejected(g6, g, outcome));
                continue;
            }
        };
        let picked: Vec<usize> = match spec.policy {
            SubsetPolicy::All => (0..list.len()).collect(),
            SubsetPolicy::Sample { count } => rng.choose(list.len(), count),
        };
        for i in picked {
            let (x, strong) = list[i].clone();
            if spec.mode == Mode::Counterexample {
                match constructions::build_h5_counterexample(g, x[0], x[1], spec.k) {
                    Ok(fam) => {
                        let h6 = emit_graph6(&fam.graph);
                        out.push(Instance::new(&h6, &fam.graph, fam.witness_set()));
                    }
                    Err(e) => out.push(Instance::rejected(g6, g, RecordOutcome::Error(e.to_string()))),
                }
                continue;
            }
            out.push(Instance { strong, ..Instance::new(g6, g, x) });
        }
    }
    out
}

/// A random non-trivial blockchain of order at most `max_n`: each block is a
/// bridge (one time in four) or a graph from `pool`, glued at a random vertex.
/// Returns the graph, path ends `c0`, `ck`, and random per-block demands.
pub fn assemble_blockchain(
    rng: &mut Lcg,
    pool: &[&Graph],
    max_n: usize,
) -> (Graph, usize, usize, Vec<BlockDemand>) {
    assert!(max_n >= 3, "a non-trivial blockchain needs three vertices");
    loop {
        let want = 2 + rng.below(4);
        let mut n = 0usize;
        let mut edges: Vec<Edge> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut cuts: Vec<usize> = Vec::new();
        for i in 0..want {
            let bridge = Graph::path(2);
            let b: &Graph = if pool.is_empty() || rng.below(4) == 0 { &bridge } else { pool[rng.below(pool.len())] };
            let fresh = if i == 0 { b.n() } else { b.n() - 1 };
            if n + fresh > max_n {
                break;
            }
            let glue_at = if i == 0 { usize::MAX } else { rng.below(b.n()) };
            let mut ids = Vec::with_capacity(b.n());
            for v in 0..b.n() {
                if v == glue_at {
                    ids.push(*cuts.last().unwrap());
                } else {
                    ids.push(n);
                    n += 1;
                }
            }
            edges.extend(b.edges().map(|e| Edge::new(ids[e.lo()], ids[e.hi()])));
            let prev = cuts.last().copied().filter(|_| i > 0);
            let choices: Vec<usize> = ids.iter().copied().filter(|&v| Some(v) != prev).collect();
            cuts.push(choices[rng.below(choices.len())]);
            let mut sorted = ids;
            sorted.sort_unstable();
            blocks.push(sorted);
        }
        if blocks.len() < 2 {
            continue;
        }
        let k = blocks.len();
        let inner_cuts = &cuts[..k - 1];
        let pick = |rng: &mut Lcg, from: &[usize], avoid: &[usize]| -> Option<usize> {
            let c: Vec<usize> = from.iter().copied().filter(|v| !avoid.contains(v)).collect();
            (!c.is_empty()).then(|| c[rng.below(c.len())])
        };
        let c0 = pick(rng, &blocks[0], &inner_cuts[..1]).unwrap();
        let ck = pick(rng, &blocks[k - 1], &inner_cuts[k - 2..]).unwrap();
        let mut demands = Vec::new();
        for (i, block) in blocks.iter().enumerate() {
            let start = if i == 0 { c0 } else { inner_cuts[i - 1] };
            let end = if i == k - 1 { ck } else { inner_cuts[i] };
            let v = block[rng.below(block.len())];
            let u = if block.len() > 2 && rng.below(4) != 0 { pick(rng, block, &[start, end, v]) } else { None };
            demands.push(BlockDemand { u, v });
        }
        let g = Graph::new(n, edges).expect("assembled edges are valid");
        return (g, c0, ck, demands);
    }
}

fn route_outcome(outcome: Outcome) -> RecordOutcome {
    match outcome {
        Outcome::Found(c) => RecordOutcome::Certified(Evidence::Route(c)),
        Outcome::Absent { nodes } => RecordOutcome::Absent { nodes },
        Outcome::Unknown { nodes } => RecordOutcome::Unknown { nodes },
    }
}

fn lift(r: Result<RecordOutcome>) -> RecordOutcome {
    r.unwrap_or_else(|e| RecordOutcome::Error(e.to_string()))
}

fn run_instance(mode: Mode, solver: &Solver, inst: &Instance) -> RecordOutcome {
    if let Some(v) = &inst.verdict {
        return v.clone();
    }
    let (g, x) = (&inst.graph, &inst.x);
    lift((|| -> Result<RecordOutcome> {
        Ok(match mode {
            Mode::HProperty | Mode::Counterexample => route_outcome(solver.find_h_cycle(g, x)?),
            Mode::FProperty => route_outcome(solver.find_f_path(g, x[0], x[1], &x[2..])?),
            Mode::StrongF3 => route_outcome(solver.find_strong_f3_path(g, x[0], x[1], x[2], inst.strong.unwrap_or(1))?),
            Mode::Thm3 => route_outcome(solver.find_thm3_cycle(g, x[0], x[1])?),
            Mode::Thm4 => route_outcome(solver.find_thm4_cycle(g, x[0], x[1])?.outcome),
            Mode::WSound => {
                let (cycle, report) = eps::find_w_sound_cycle(g, x)?;
                RecordOutcome::Certified(Evidence::Sound { cycle, hits: report.hits })
            }
            Mode::Eps => {
                let (cycle, _) = eps::find_w_sound_cycle(g, x)?;
                let s = eps::find_eps_with_sound_cycle(g, &cycle, x)?;
                eps::validate_eps_for(&s, &cycle, x)
                    .map_err(|v| Error::OracleFailure(format!("EPS search produced an invalid graph: {v}")))?;
                RecordOutcome::Certified(Evidence::Eps {
                    cycle,
                    e_part: s.e_part.into_iter().collect(),
                    p_part: s.p_part.into_iter().collect(),
                })
            }
            Mode::Corollary => match verify_corollary(solver, g) {
                Err(Error::Precondition(why)) => RecordOutcome::OutOfScope(why),
                other => route_outcome(other?),
            },
            Mode::Glue => {
                let glued = constructions::blockchain_path(solver, g, x[0], x[1], &inst.blocks)?;
                RecordOutcome::Certified(Evidence::Route(glued.certificate))
            }
        })
    })())
}

/// Runs the campaign and returns the records in instance order together with timings.
pub fn run_campaign(spec: &CampaignSpec, corpus: &Corpus) -> Result<(CampaignResult, Timings)> {
    spec.validate()?;
    let started = Instant::now();
    let list = instances(spec, corpus);
    let solver = Solver::with_budget(spec.timeout);
    let jobs = spec.jobs.min(list.len()).max(1);
    let mut done: Vec<(usize, Record, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let list = &list;
                let solver = &solver;
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for i in (j..list.len()).step_by(jobs) {
                        let inst = &list[i];
                        let t = Instant::now();
                        let outcome = run_instance(spec.mode, solver, inst);
                        let record = Record {
                            g6: inst.g6.clone(),
                            mode: spec.mode,
                            x: inst.x.clone(),
                            strong: inst.strong,
                            blocks: inst.blocks.clone(),
                            outcome,
                        };
                        out.push((i, record, t.elapsed()));
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    done.sort_by_key(|d| d.0);
    let max_instance = done.iter().map(|d| d.2).max().unwrap_or_default();
    let header = Header {
        mode: spec.mode,
        k: spec.k,
        seed: spec.seed,
        policy: spec.policy,
        timeout_ms: spec.timeout.as_millis() as u64,
        max_n: spec.max_n,
        digest: corpus.digest,
    };
    let records = done.into_iter().map(|d| d.1).collect();
    Ok((CampaignResult { header, records }, Timings { total: started.elapsed(), max_instance }))
}

/// The block at the centre of `bc(g)` when that tree is a subdivided star
/// whose centre is a block; for a blockchain, the block with the most cutvertices.
pub fn corollary_center(g: &Graph) -> Result<usize> {
    if g.n() < 3 {
        return Err(precondition("fewer than three vertices"));
    }
    let dec = connectivity::blocks(g).map_err(|_| precondition("graph is disconnected"))?;
    if dec.cut_blocks.values().any(|bs| bs.len() >= 3) {
        return Err(precondition("a cutvertex lies in three or more blocks"));
    }
    let branching: Vec<usize> = (0..dec.blocks.len()).filter(|&b| dec.block_cuts[b].len() >= 3).collect();
    let center = match branching.as_slice() {
        [] => (0..dec.blocks.len()).max_by_key(|&b| (dec.block_cuts[b].len(), std::cmp::Reverse(b))).unwrap(),
        [b] => *b,
        _ => return Err(precondition("block-cutvertex tree has two branch nodes")),
    };
    if dec.block_cuts[center].len() > 4 {
        return Err(precondition(format!("centre block has {} cutvertices", dec.block_cuts[center].len())));
    }
    Ok(center)
}

/// Certifies that `g²` is Hamiltonian for a star-structured `g` by direct
/// search. Structural violations are precondition errors.
pub fn verify_corollary(solver: &Solver, g: &Graph) -> Result<Outcome> {
    corollary_center(g)?;
    solver.solve(g, &ConstraintSpec::cycle(Vec::new()))
}

/// The constraint a stored route record must satisfy.
pub fn record_spec(mode: Mode, g: &Graph, x: &[usize], strong: Option<u8>, blocks: &[BlockDemand]) -> Result<ConstraintSpec> {
    let need = |len: usize| {
        if x.len() < len {
            Err(precondition(format!("{mode} needs {len} arguments")))
        } else {
            Ok(())
        }
    };
    Ok(match mode {
        Mode::HProperty | Mode::Counterexample | Mode::Corollary => ConstraintSpec::cycle(x.to_vec()),
        Mode::FProperty => {
            need(2)?;
            ConstraintSpec::path(x[0], x[1], x[2..].to_vec())
        }
        Mode::StrongF3 => {
            need(3)?;
            let xi = if strong == Some(2) { x[1] } else { x[0] };
            ConstraintSpec::path(x[0], x[1], vec![x[2], xi])
        }
        Mode::Thm3 => {
            need(2)?;
            ConstraintSpec::cycle(vec![x[0], x[0], x[1]])
        }
        Mode::Thm4 => {
            need(2)?;
            oracle::thm4_spec(g, x[0], x[1])?.1
        }
        Mode::Glue => {
            need(2)?;
            let d = blocks.iter().flat_map(|b| b.u.into_iter().chain([b.v])).collect();
            ConstraintSpec::path(x[0], x[1], d)
        }
        Mode::WSound | Mode::Eps => return Err(precondition("no route constraint in this mode")),
    })
}

/// Re-checks a certified record from its own fields.
pub fn revalidate(record: &Record) -> std::result::Result<(), String> {
    let RecordOutcome::Certified(ev) = &record.outcome else { return Ok(()) };
    let g = parse_graph6(&record.g6).map_err(|e| e.to_string())?;
    match ev {
        Evidence::Route(cert) => {
            let spec = record_spec(record.mode, &g, &record.x, record.strong, &record.blocks).map_err(|e| e.to_string())?;
            check_certificate(&g, &spec, cert).map_err(|r| format!("certificate rejected: {r}"))
        }
        Evidence::Sound { cycle, hits } => {
            let r = eps::is_w_sound(&g, cycle, &record.x).map_err(|e| e.to_string())?;
            if !r.is_sound() || r.hits != *hits {
                return Err(format!("stored cycle fails re-check: {r}"));
            }
            Ok(())
        }
        Evidence::Eps { cycle, e_part, p_part } => {
            let s = eps::EpsGraph {
                host: g,
                e_part: e_part.iter().copied().collect(),
                p_part: p_part.iter().copied().collect(),
            };
            eps::validate_eps_for(&s, cycle, &record.x).map_err(|v| format!("EPS graph rejected: {v}"))
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('%', "%25").replace(' ', "%20").replace('\n', "%0A")
}

fn unescape(s: &str) -> String {
    s.replace("%0A", "\n").replace("%20", " ").replace("%25", "%")
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn edges_field(es: &[Edge]) -> String {
    join(es.iter().map(|e| format!("{}-{}", e.lo(), e.hi())), ";")
}

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sample = match self.policy {
            SubsetPolicy::All => "all".to_string(),
            SubsetPolicy::Sample { count } => count.to_string(),
        };
        let max_n = self.max_n.map_or("any".to_string(), |m| m.to_string());
        write!(
            f,
            "# mode={} k={} seed={} sample={} timeout-ms={} n={} corpus-fnv1a={:016x}",
            self.mode, self.k, self.seed, sample, self.timeout_ms, max_n, self.digest
        )
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g6:{} MODE:{} X:{}", self.g6, self.mode, join(&self.x, ","))?;
        if let Some(i) = self.strong {
            write!(f, " I:{i}")?;
        }
        if !self.blocks.is_empty() {
            let d = self.blocks.iter().map(|b| {
                format!("{}/{}", b.u.map_or("_".to_string(), |u| u.to_string()), b.v)
            });
            write!(f, " D:{}", join(d, ";"))?;
        }
        let kind = self.mode.kind();
        match &self.outcome {
            RecordOutcome::Certified(Evidence::Route(c)) => {
                let wit = c.witnesses.iter().map(|w| format!("{}={}-{}", w.vertex, w.edge.lo(), w.edge.hi()));
                write!(f, " KIND:{} ORDER:{} WIT:{} OUTCOME:certified", c.kind, join(&c.order, ","), join(wit, ";"))
            }
            RecordOutcome::Certified(Evidence::Sound { cycle, hits }) => {
                write!(f, " KIND:cycle ORDER:{} HITS:{hits} OUTCOME:certified", join(cycle, ","))
            }
            RecordOutcome::Certified(Evidence::Eps { cycle, e_part, p_part }) => write!(
                f,
                " KIND:cycle ORDER:{} E:{} P:{} OUTCOME:certified",
                join(cycle, ","),
                edges_field(e_part),
                edges_field(p_part)
            ),
            RecordOutcome::Absent { nodes } => write!(f, " KIND:{kind} EXHAUSTED:{nodes} OUTCOME:absent"),
            RecordOutcome::Unknown { nodes } => write!(f, " KIND:{kind} NODES:{nodes} OUTCOME:unknown"),
            RecordOutcome::Error(e) => write!(f, " OUTCOME:error:{}", escape(e)),
            RecordOutcome::OutOfScope(e) => write!(f, " OUTCOME:out-of-scope:{}", escape(e)),
        }
    }
}

/// Serializes a result: the header, a record count, then one line per record.
pub fn render(result: &CampaignResult) -> String {
    let mut s = format!("{}\n# records={}\n", result.header, result.records.len());
    for r in &result.records {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}

pub fn write_certificates(result: &CampaignResult, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, render(result))?)
}

pub fn read_certificates(path: impl AsRef<Path>) -> Result<CampaignResult> {
    parse_certificates(&fs::read_to_string(path)?)
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::Malformed { line, reason: reason.into() }
}

fn parse_list(s: &str, line: usize) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.parse().map_err(|_| malformed(line, format!("bad vertex {t:?}")))).collect()
}

fn parse_edge(s: &str, line: usize) -> Result<Edge> {
    let (a, b) = s.split_once('-').ok_or_else(|| malformed(line, format!("bad edge {s:?}")))?;
    let p = |t: &str| t.parse::<usize>().map_err(|_| malformed(line, format!("bad edge {s:?}")));
    Ok(Edge::new(p(a)?, p(b)?))
}

fn parse_edges(s: &str, line: usize) -> Result<Vec<Edge>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|t| parse_edge(t, line)).collect()
}

fn parse_header(s: &str, line: usize) -> Result<Header> {
    let body = s.strip_prefix("# ").ok_or_else(|| malformed(line, "missing header"))?;
    let mut get = std::collections::BTreeMap::new();
    for tok in body.split(' ') {
        let (k, v) = tok.split_once('=').ok_or_else(|| malformed(line, format!("bad header field {tok:?}")))?;
        get.insert(k, v);
    }
    let field = |k: &str| get.get(k).copied().ok_or_else(|| malformed(line, format!("header lacks {k}")));
    let num = |k: &str| -> Result<u64> { field(k)?.parse().map_err(|_| malformed(line, format!("bad {k}"))) };
    let policy = match field("sample")? {
        "all" => SubsetPolicy::All,
        c => SubsetPolicy::Sample { count: c.parse().map_err(|_| malformed(line, "bad sample"))? },
    };
    let max_n = match field("n")? {
        "any" => None,
        m => Some(m.parse().map_err(|_| malformed(line, "bad n"))?),
    };
    Ok(Header {
        mode: field("mode")?.parse().map_err(|e: Error| malformed(line, e.to_string()))?,
        k: num("k")? as usize,
        seed: num("seed")?,
        policy,
        timeout_ms: num("timeout-ms")?,
        max_n,
        digest: u64::from_str_radix(field("corpus-fnv1a")?, 16).map_err(|_| malformed(line, "bad digest"))?,
    })
}

fn parse_record(s: &str, line: usize) -> Result<Record> {
    let mut fields = std::collections::BTreeMap::new();
    for tok in s.split(' ') {
        let (k, v) = tok.split_once(':').ok_or_else(|| malformed(line, format!("bad field {tok:?}")))?;
        if fields.insert(k, v).is_some() {
            return Err(malformed(line, format!("repeated field {k}")));
        }
    }
    let field = |k: &str| fields.get(k).copied().ok_or_else(|| malformed(line, format!("missing {k}")));
    let mode: Mode = field("MODE")?.parse().map_err(|e: Error| malformed(line, e.to_string()))?;
    let x = parse_list(field("X")?, line)?;
    let strong = match fields.get("I") {
        Some(i) => Some(i.parse().map_err(|_| malformed(line, "bad I"))?),
        None => None,
    };
    let mut blocks = Vec::new();
    if let Some(d) = fields.get("D") {
        for part in d.split(';') {
            let (u, v) = part.split_once('/').ok_or_else(|| malformed(line, format!("bad block demand {part:?}")))?;
            let num = |t: &str| t.parse::<usize>().map_err(|_| malformed(line, format!("bad block demand {part:?}")));
            let u = if u == "_" { None } else { Some(num(u)?) };
            blocks.push(BlockDemand { u, v: num(v)? });
        }
    }
    let out = field("OUTCOME")?;
    let kind = || -> Result<Kind> {
        match field("KIND")? {
            "cycle" => Ok(Kind::Cycle),
            "path" => Ok(Kind::Path),
            k => Err(malformed(line, format!("bad kind {k:?}"))),
        }
    };
    let count = |k: &str| -> Result<u64> { field(k)?.parse().map_err(|_| malformed(line, format!("bad {k}"))) };
    let outcome = if let Some(e) = out.strip_prefix("error:") {
        RecordOutcome::Error(unescape(e))
    } else if let Some(e) = out.strip_prefix("out-of-scope:") {
        RecordOutcome::OutOfScope(unescape(e))
    } else {
        match out {
            "absent" => {
                kind()?;
                RecordOutcome::Absent { nodes: count("EXHAUSTED")? }
            }
            "unknown" => {
                kind()?;
                RecordOutcome::Unknown { nodes: count("NODES")? }
            }
            "certified" => {
                let kind = kind()?;
                let order = parse_list(field("ORDER")?, line)?;
                if let Some(h) = fields.get("HITS") {
                    let hits = h.parse().map_err(|_| malformed(line, "bad HITS"))?;
                    RecordOutcome::Certified(Evidence::Sound { cycle: order, hits })
                } else if fields.contains_key("E") {
                    RecordOutcome::Certified(Evidence::Eps {
                        cycle: order,
                        e_part: parse_edges(field("E")?, line)?,
                        p_part: parse_edges(field("P")?, line)?,
                    })
                } else {
                    let wit = field("WIT")?;
                    let mut witnesses = Vec::new();
                    if !wit.is_empty() {
                        for w in wit.split(';') {
                            let (v, e) = w.split_once('=').ok_or_else(|| malformed(line, format!("bad witness {w:?}")))?;
                            let vertex = v.parse().map_err(|_| malformed(line, format!("bad witness {w:?}")))?;
                            witnesses.push(Witness { vertex, edge: parse_edge(e, line)? });
                        }
                    }
                    RecordOutcome::Certified(Evidence::Route(Certificate { kind, order, witnesses }))
                }
            }
            o => return Err(malformed(line, format!("bad outcome {o:?}"))),
        }
    };
    Ok(Record { g6: field("g6")?.to_string(), mode, x, strong, blocks, outcome })
}

/// Parses a certificate file and re-validates every certified record.
pub fn parse_certificates(text: &str) -> Result<CampaignResult> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let header = parse_header(first, 1)?;
    let (_, second) = lines.next().ok_or_else(|| malformed(2, "missing record count"))?;
    let expected: usize = second
        .strip_prefix("# records=")
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| malformed(2, "bad record count"))?;
    let mut records = Vec::new();
    let mut last = 2;
    for (i, l) in lines {
        last = i + 1;
        let r = parse_record(l, i + 1)?;
        if r.mode != header.mode {
            return Err(malformed(i + 1, "record mode differs from header"));
        }
        revalidate(&r).map_err(|why| malformed(i + 1, why))?;
        records.push(r);
    }
    if records.len() != expected {
        return Err(malformed(last + 1, format!("expected {expected} records, found {}", records.len())));
    }
    Ok(CampaignResult { header, records })
}
