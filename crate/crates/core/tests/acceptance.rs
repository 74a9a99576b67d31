//! End-to-end acceptance suite. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use hamsq::connectivity;
use hamsq::constructions::{
    build_h5_counterexample, classify_traversal, degree_obstruction, extend_cycle_through_endblock,
    replace_endblock_with_path, CaseId, Traversal,
};
use hamsq::harness::{self, render, run_campaign, CampaignSpec, Corpus, Lcg, Mode, RecordOutcome, SubsetPolicy};
use hamsq::oracle::{check_certificate, ConstraintSpec, Kind, Outcome, Solver};
use hamsq::{Edge, Graph};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs a campaign and requires every record certified and re-validated.
fn all_certified(mode: Mode, k: usize, corpus: &Corpus) -> Verdict {
    let mut spec = CampaignSpec::new(mode, k);
    spec.jobs = 4;
    let (res, _) = run_campaign(&spec, corpus).map_err(|e| e.to_string())?;
    let mut certified = 0;
    for r in &res.records {
        match &r.outcome {
            RecordOutcome::Certified(_) => {
                harness::revalidate(r).map_err(|why| format!("{} {:?}: {why}", r.g6, r.x))?;
                certified += 1;
            }
            RecordOutcome::OutOfScope(_) => {}
            other => return Err(format!("{mode} on {} X={:?}: {other:?}", r.g6, r.x)),
        }
    }
    ensure(certified > 0, || format!("{mode}: nothing certified"))?;
    Ok(format!("{mode} {certified}"))
}

fn criterion_1() -> Verdict {
    let counts: Vec<usize> = (4..=7).map(|n| biconnected([n]).graphs.len()).collect();
    ensure(counts == [3, 10, 56, 468], || format!("2-block counts for n = 4..7 are {counts:?}"))?;
    let n4: Vec<Graph> = biconnected([4]).graphs.into_iter().map(|(_, g)| g).collect();
    let mut edge_counts: Vec<usize> = n4.iter().map(Graph::edge_count).collect();
    edge_counts.sort();
    ensure(edge_counts == [4, 5, 6], || "n = 4 corpus is not C_4, diamond, K_4".into())?;
    let summary = all_certified(Mode::HProperty, 4, &biconnected(4..=7))?;
    Ok(format!("{summary} certificates over 537 2-blocks, n = 4..7"))
}

fn criterion_2() -> Verdict {
    let bases = [("C3", Graph::cycle(3)), ("C4", Graph::cycle(4)), ("K4", Graph::complete(4))];
    let solver = Solver::unlimited();
    let mut checked = 0;
    for (name, base) in &bases {
        for t in 3..=5 {
            for x1 in 0..base.n() {
                for x2 in x1 + 1..base.n() {
                    let fam = build_h5_counterexample(base, x1, x2, t).map_err(|e| e.to_string())?;
                    let w = fam.witness_set();
                    match solver.find_h_cycle(&fam.graph, &w).map_err(|e| e.to_string())? {
                        Outcome::Absent { nodes } => ensure(nodes > 0, || "absence without search".into())?,
                        other => return Err(format!("{name}, t = {t}, x = {x1},{x2}: {other:?}")),
                    }
                    ensure(degree_obstruction(&fam.graph, &w) == Some(vec![x1, x2]), || {
                        format!("{name}, t = {t}: degree obstruction not confirmed")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} family members absent by exhaustion and by the degree count"))
}

fn criterion_3() -> Verdict {
    let f4 = all_certified(Mode::FProperty, 4, &biconnected(4..=7))?;
    let sf3 = all_certified(Mode::StrongF3, 3, &biconnected(3..=7))?;
    let t3 = all_certified(Mode::Thm3, 2, &biconnected(3..=7))?;
    let chains: Vec<Graph> = connected(1..=8)
        .graphs
        .into_iter()
        .map(|(_, g)| g)
        .filter(|g| matches!(connectivity::as_blockchain(g), Ok(Some(c)) if !c.is_trivial()))
        .collect();
    let count = chains.len();
    let t4 = all_certified(Mode::Thm4, 2, &Corpus::from_graphs(chains))?;
    Ok(format!("{f4}, {sf3}, {t3}, {t4} over {count} non-trivial blockchains n <= 8"))
}

fn criterion_4() -> Verdict {
    let mut spec = CampaignSpec::new(Mode::Glue, 1);
    spec.policy = SubsetPolicy::Sample { count: 100 };
    spec.seed = 2024;
    spec.max_n = Some(12);
    spec.jobs = 4;
    let (res, _) = run_campaign(&spec, &biconnected(3..=6)).map_err(|e| e.to_string())?;
    let mut bridges = 0;
    for r in &res.records {
        let RecordOutcome::Certified(_) = &r.outcome else {
            return Err(format!("{} {:?}: {:?}", r.g6, r.x, r.outcome));
        };
        harness::revalidate(r)?;
        let g = hamsq::graph6::parse_graph6(&r.g6).unwrap();
        ensure(g.n() <= 12, || format!("{} has {} vertices", r.g6, g.n()))?;
        let chain = connectivity::as_blockchain(&g).unwrap().unwrap();
        ensure(!chain.is_trivial(), || "trivial chain".into())?;
        bridges += (0..chain.len()).filter(|&i| chain.is_bridge(i)).count();
    }
    ensure(res.records.len() == 100, || "expected 100 chains".into())?;
    Ok(format!("100 glued paths checked ({bridges} bridge blocks among them)"))
}

fn criterion_5() -> Verdict {
    let sound = all_certified(Mode::WSound, 5, &biconnected(5..=7))?;
    let eps = all_certified(Mode::Eps, 5, &biconnected(5..=6))?;
    Ok(format!("{sound}, {eps}"))
}

fn criterion_6() -> Verdict {
    let solver = Solver::unlimited();
    let mut rng = Lcg::new(6);
    let mut compared = 0usize;
    let mut found = 0usize;
    let corpus = all_graphs(1..=7);
    for (g6, g) in &corpus.graphs {
        let n = g.n();
        let cycles = hamiltonian_routes(g, Kind::Cycle);
        let paths = hamiltonian_routes(g, Kind::Path);
        let mut specs = vec![ConstraintSpec::cycle(vec![])];
        for _ in 0..3 {
            let m = 1 + rng.below(4);
            specs.push(ConstraintSpec::cycle((0..m).map(|_| rng.below(n)).collect()));
            let s = rng.below(n);
            let t = rng.below(n);
            let m = rng.below(4);
            specs.push(ConstraintSpec::path(s, t, (0..m).map(|_| rng.below(n)).collect()));
        }
        for spec in &specs {
            if spec.endpoints.is_some_and(|(s, t)| s == t) {
                continue;
            }
            let routes = if spec.kind == Kind::Cycle { &cycles } else { &paths };
            let naive = naive_exists(g, routes, spec);
            let fast = solver.solve(g, spec).map_err(|e| format!("{g6} {spec:?}: {e}"))?;
            if let Outcome::Found(c) = &fast {
                check_certificate(g, spec, c).map_err(|r| format!("{g6} {spec:?}: {r}"))?;
            }
            ensure(!matches!(fast, Outcome::Unknown { .. }), || format!("{g6}: unknown"))?;
            ensure(fast.is_found() == naive, || format!("{g6} {spec:?}: solver {fast:?}, naive {naive}"))?;
            compared += 1;
            found += naive as usize;
        }
    }

    let mut rng = Lcg::new(66);
    for i in 0..200 {
        let n = 1 + rng.below(50);
        let density = 2 + rng.below(20);
        let g = random_graph(&mut rng, n, density);
        let sq = g.square();
        let m = square_matrix(&g);
        for u in 0..n {
            for v in 0..n {
                ensure(sq.has_edge(u, v) == m[u][v], || format!("square mismatch on random graph {i}"))?;
            }
        }
    }

    let mut decomps = 0;
    for (g6, g) in &corpus.graphs {
        if !g.is_connected() {
            ensure(connectivity::blocks(g).is_err(), || format!("{g6}: disconnected accepted"))?;
            continue;
        }
        let dec = connectivity::blocks(g).map_err(|e| e.to_string())?;
        let (cuts, blocks) = brute_blocks(g);
        let got: std::collections::BTreeSet<Vec<usize>> = dec.blocks.iter().cloned().collect();
        ensure(dec.cutvertices == cuts && got == blocks, || format!("{g6}: blocks {got:?} vs {blocks:?}"))?;
        decomps += 1;
    }
    Ok(format!(
        "{compared} solver/naive comparisons ({found} found, {} absent), 200 squares, {decomps} block decompositions",
        compared - found
    ))
}

#[derive(Default)]
struct SurgeryTally {
    per_case: BTreeMap<CaseId, usize>,
    preserved: usize,
    rematched: usize,
}

/// Hosts: a 2-block `R` (4..5 vertices) and an endblock `B` (4..5 vertices)
/// sharing `y`, plus the edge `x x'` with `x` in `B` and `x'` in `R`.
fn surgery_hosts() -> Vec<(Graph, Vec<usize>, usize, usize, usize)> {
    let rests = biconnected(4..=5);
    let blocks = biconnected(4..=5);
    let mut out = Vec::new();
    for (_, r) in &rests.graphs {
        for (_, b) in &blocks.graphs {
            // y is vertex 0 of both; x' = 1 in R, x = the last vertex of B
            let off = r.n() - 1;
            let id = |v: usize| if v == 0 { 0 } else { v + off };
            let mut edges: Vec<Edge> = r.edges().collect();
            edges.extend(b.edges().map(|e| Edge::new(id(e.lo()), id(e.hi()))));
            let x = id(b.n() - 1);
            edges.push(Edge::new(x, 1));
            let g = Graph::new(r.n() + b.n() - 1, edges).unwrap();
            let block: Vec<usize> = (0..b.n()).map(id).collect();
            out.push((g, block, x, 0, 1));
        }
    }
    out
}

fn criterion_7() -> Verdict {
    const QUOTA: usize = 25;
    let solver = Solver::unlimited();
    let mut tally = SurgeryTally::default();
    for (g, block, x, y, xp) in surgery_hosts() {
        let red = replace_endblock_with_path(&g, &block, x, y, xp).map_err(|e| e.to_string())?;
        let g1 = &red.reduced;
        let outside: Vec<usize> = (0..g.n()).filter(|v| block.binary_search(v).is_err() || *v == y).collect();
        let demand_sets: Vec<Vec<usize>> = (0..outside.len().saturating_sub(3))
            .map(|i| outside[i..i + 4].iter().map(|&v| red.map.new_id(v).unwrap()).collect())
            .collect();
        for demands in demand_sets {
            let spec = ConstraintSpec::cycle(demands);
            let mut seen_here: BTreeMap<CaseId, usize> = BTreeMap::new();
            let mut failure = None;
            solver
                .for_each_solution(g1, &spec, |h1| {
                    let Traversal::Base(case) = classify_traversal(g1, h1, &red.anchors) else {
                        return ControlFlow::Continue(());
                    };
                    if tally.per_case.get(&case.case).copied().unwrap_or(0) >= QUOTA
                        || seen_here.get(&case.case).copied().unwrap_or(0) >= 2
                    {
                        return ControlFlow::Continue(());
                    }
                    let which = case.case;
                    let result = surgery_check(&solver, &g, &red, h1, Traversal::Base(case), &mut tally);
                    if let Err(e) = result {
                        failure = Some(format!("{which}: {e}"));
                        return ControlFlow::Break(());
                    }
                    *seen_here.entry(which).or_default() += 1;
                    *tally.per_case.entry(which).or_default() += 1;
                    ControlFlow::Continue(())
                })
                .map_err(|e| e.to_string())?;
            if let Some(f) = failure {
                return Err(f);
            }
        }
    }
    let cases = [CaseId::One, CaseId::Two, CaseId::Five, CaseId::Seven, CaseId::Nine];
    let short: Vec<String> = cases
        .iter()
        .filter(|c| tally.per_case.get(c).copied().unwrap_or(0) < 20)
        .map(|c| format!("{c}: {}", tally.per_case.get(c).copied().unwrap_or(0)))
        .collect();
    ensure(short.is_empty(), || format!("too few instances ({})", short.join(", ")))?;
    Ok(format!(
        "{:?} splices checked; {} witness edges kept verbatim, {} on the replaced path re-matched",
        tally.per_case.values().collect::<Vec<_>>(),
        tally.preserved,
        tally.rematched
    ))
}

fn surgery_check(
    solver: &Solver,
    g: &Graph,
    red: &hamsq::constructions::EndblockReduction,
    h1: &hamsq::oracle::Certificate,
    traversal: Traversal,
    tally: &mut SurgeryTally,
) -> Result<(), String> {
    let Traversal::Base(case) = &traversal else { unreachable!() };
    let splice = extend_cycle_through_endblock(solver, g, red, h1, &traversal).map_err(|e| e.to_string())?;
    ensure(!splice.fallback, || "fell back to direct search".into())?;
    check_certificate(g, &splice.spec, &splice.certificate).map_err(|r| r.to_string())?;
    let host_edge = |e: Edge| Some(Edge::new(red.host_id(e.lo())?, red.host_id(e.hi())?));
    for (old, new) in h1.witnesses.iter().zip(&splice.certificate.witnesses) {
        ensure(red.host_id(old.vertex) == Some(new.vertex), || "witness vertex changed".into())?;
        match host_edge(old.edge) {
            Some(e) => {
                ensure(e == new.edge, || format!("witness {} moved from {e} to {}", new.vertex, new.edge))?;
                tally.preserved += 1;
            }
            None => tally.rematched += 1,
        }
    }
    if case.case == CaseId::Two {
        let route: std::collections::BTreeSet<Edge> = splice.certificate.route_edges().into_iter().collect();
        for e in h1.route_edges() {
            if !red.reduced.has_edge(e.lo(), e.hi()) {
                continue;
            }
            if let Some(he) = host_edge(e) {
                ensure(route.contains(&he), || format!("case 2 lost edge {he} of H_1"))?;
            }
        }
    }
    Ok(())
}

/// Random graphs whose block-cutvertex tree is a subdivided star centred on
/// a block with at most four cutvertices.
fn star_graphs(count: usize) -> Vec<Graph> {
    let centres = biconnected(3..=6);
    let arms = [Graph::path(2), Graph::cycle(3), Graph::cycle(4), Graph::complete(4)];
    let mut rng = Lcg::new(8);
    let mut out = Vec::new();
    // the C_4 with four pendant triangles
    let mut e: Vec<(usize, usize)> = (0..4).map(|i| (i, (i + 1) % 4)).collect();
    for i in 0..4 {
        e.extend([(i, 4 + 2 * i), (4 + 2 * i, 5 + 2 * i), (5 + 2 * i, i)]);
    }
    out.push(Graph::new(12, e).unwrap());
    while out.len() < count {
        let (_, c) = &centres.graphs[rng.below(centres.graphs.len())];
        let mut n = c.n();
        let mut edges: Vec<Edge> = c.edges().collect();
        let legs = 1 + rng.below(4.min(c.n()));
        let roots = rng.choose(c.n(), legs);
        for &root in &roots {
            let mut at = root;
            for _ in 0..1 + rng.below(3) {
                let arm = &arms[rng.below(arms.len())];
                if n + arm.n() - 1 > 12 {
                    break;
                }
                let ids: Vec<usize> = (0..arm.n()).map(|v| if v == 0 { at } else { n + v - 1 }).collect();
                edges.extend(arm.edges().map(|e| Edge::new(ids[e.lo()], ids[e.hi()])));
                n += arm.n() - 1;
                at = ids[1 + rng.below(arm.n() - 1)];
            }
        }
        let g = Graph::new(n, edges).unwrap();
        if harness::corollary_center(&g).is_ok() && g.n() > c.n() {
            out.push(g);
        }
    }
    out
}

fn criterion_8() -> Verdict {
    let solver = Solver::default();
    let graphs = star_graphs(30);
    let mut largest = 0;
    for g in &graphs {
        ensure(g.n() <= 12, || format!("{} vertices", g.n()))?;
        match harness::verify_corollary(&solver, g).map_err(|e| e.to_string())? {
            Outcome::Found(c) => {
                check_certificate(g, &ConstraintSpec::cycle(vec![]), &c).map_err(|r| r.to_string())?;
            }
            other => return Err(format!("{}: {other:?}", hamsq::graph6::emit_graph6(g))),
        }
        largest = largest.max(g.n());
    }
    Ok(format!("{} star-structured graphs certified, up to n = {largest}", graphs.len()))
}

fn criterion_9() -> Verdict {
    let corpus = biconnected(4..=7);
    let glue_pool = biconnected(3..=6);
    let runs: [(Mode, usize, &Corpus); 4] = [
        (Mode::HProperty, 4, &corpus),
        (Mode::StrongF3, 3, &corpus),
        (Mode::WSound, 5, &corpus),
        (Mode::Glue, 1, &glue_pool),
    ];
    for (mode, k, corpus) in runs {
        let mut spec = CampaignSpec::new(mode, k);
        spec.policy = SubsetPolicy::Sample { count: 3 };
        spec.seed = 99;
        let mut outputs = Vec::new();
        for jobs in [1, 2, 5, 8] {
            spec.jobs = jobs;
            let (res, _) = run_campaign(&spec, corpus).map_err(|e| e.to_string())?;
            outputs.push(render(&res));
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{mode}: output depends on --jobs"))?;
        let again = run_campaign(&CampaignSpec { jobs: 3, ..spec.clone() }, corpus).map_err(|e| e.to_string())?.0;
        ensure(render(&again) == outputs[0], || format!("{mode}: rerun differs"))?;
    }
    Ok("4 campaigns byte-identical across 1, 2, 3, 5 and 8 workers".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("H_4 on all 2-blocks n = 4..7", criterion_1),
        ("H_5 counterexample family", criterion_2),
        ("F_4, strong F_3, two-vertex cycle, blockchain cycle suites", criterion_3),
        ("blockchain gluing on 100 random chains", criterion_4),
        ("W-sound cycles and EPS-graphs", criterion_5),
        ("solver and structure oracles agree with brute force", criterion_6),
        ("endblock surgeries", criterion_7),
        ("star-structured graphs have Hamiltonian squares", criterion_8),
        ("campaign output is independent of worker count", criterion_9),
    ];
    // `cargo test -- --list` and similar probes should not run the suite.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = f();
        let secs = t.elapsed().max(Duration::from_millis(1)).as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
