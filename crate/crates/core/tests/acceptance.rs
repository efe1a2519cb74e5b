//! End-to-end acceptance run: each criterion prints one PASS/FAIL line and
//! the process exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricci_foster::corpus::{random_corpus, random_nonnegative_corpus, CorpusParams, DEFAULT_SEED};
use ricci_foster::{
    curvature_report, curvature_time_derivative, einstein_check, einstein_solve, fixtures, flow,
    flow_with_surgery_to_point, monitor_trace, resistance_by_trees, resistance_profile, verify_all, EdgeId,
    FlowConfig, FlowTrace, StopReason, TerminalState, TimeLimit, WeightedGraph,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn figures() -> Vec<(&'static str, WeightedGraph)> {
    vec![
        ("branched path", fixtures::branched_path()),
        ("barbell", fixtures::barbell()),
        ("house", fixtures::house()),
        ("theta", fixtures::theta()),
    ]
}

fn corpus() -> Vec<WeightedGraph> {
    random_corpus(DEFAULT_SEED, 200, &CorpusParams::default())
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Result<f64, String> {
    let err = (got - want).abs();
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{what}: got {got}, expected {want} (error {err:.3e} > {tol:.0e})"))
    }
}

fn length_at(g: &WeightedGraph, t: f64, dt: f64) -> Result<WeightedGraph, String> {
    let cfg = FlowConfig {
        t_end: TimeLimit::At(t),
        dt,
        ..FlowConfig::default()
    };
    let trace = flow(g, &cfg).map_err(|e| e.to_string())?;
    match trace.terminal {
        TerminalState::Graph(h) if trace.stop_reason == StopReason::TimeLimit => Ok(h),
        _ => Err(format!("flow stopped early at t = {}", trace.terminal_time)),
    }
}

fn edge_len(g: &WeightedGraph, e: &str) -> f64 {
    g.edge(&EdgeId::from(e)).expect("edge exists").length
}

fn figure_reproduction() -> Outcome {
    let expected: [(&str, WeightedGraph, Vec<f64>); 4] = [
        (
            "branched path",
            fixtures::branched_path(),
            vec![1.0 / 2.0, -1.0 / 6.0, -1.0 / 6.0, 0.0, 1.0 / 2.0, 1.0 / 3.0],
        ),
        (
            "barbell",
            fixtures::barbell(),
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0],
        ),
        (
            "house",
            fixtures::house(),
            vec![3.0 / 11.0, 7.0 / 66.0, 4.0 / 33.0, 7.0 / 66.0, 13.0 / 66.0, 13.0 / 66.0],
        ),
        ("theta", fixtures::theta(), vec![16.0 / 33.0, 4.0 / 33.0, 13.0 / 33.0]),
    ];
    let mut worst = 0.0_f64;
    for (name, g, want) in expected {
        let got = curvature_report(&g).map_err(|e| e.to_string())?.curvatures();
        for (i, (a, b)) in got.iter().zip(&want).enumerate() {
            worst = worst.max(within(&format!("{name} edge {i}"), *a, *b, 1e-9)?);
        }
    }
    Ok(format!("4 figures, max error {worst:.1e}"))
}

fn curvature_and_foster_sums() -> Outcome {
    let graphs: Vec<WeightedGraph> = figures().into_iter().map(|(_, g)| g).chain(corpus()).collect();
    let (mut k, mut f) = (0.0_f64, 0.0_f64);
    for (i, g) in graphs.iter().enumerate() {
        let p = resistance_profile(g).map_err(|e| e.to_string())?;
        let r = ricci_foster::CurvatureReport::from_profile(&p);
        k = k.max(within(&format!("graph {i} Σ K"), r.total_curvature, 1.0, 1e-9)?);
        let foster: f64 = p.ratios().iter().sum();
        f = f.max(within(&format!("graph {i} Σ ω/ℓ"), foster, g.vertex_count() as f64 - 1.0, 1e-9)?);
    }
    Ok(format!("{} graphs, max |ΣK − 1| {k:.1e}, max Foster error {f:.1e}", graphs.len()))
}

fn tree_oracle_equivalence() -> Outcome {
    let mut worst = 0.0_f64;
    let mut checked = 0;
    let graphs: Vec<WeightedGraph> = figures().into_iter().map(|(_, g)| g).chain(corpus()).collect();
    for g in graphs.iter().filter(|g| g.non_loop_edge_count() <= 16) {
        let p = resistance_profile(g).map_err(|e| e.to_string())?;
        let vs = g.vertices();
        for x in 0..vs.len() {
            for y in x + 1..vs.len() {
                let t = resistance_by_trees(g, &vs[x], &vs[y]).map_err(|e| e.to_string())?;
                worst = worst.max(within("ω", p.omega_by_index(x, y), t, 1e-10)?);
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} graphs, max |ω_L − ω_τ| {worst:.1e}"))
}

fn flow_exactness() -> Outcome {
    let mut worst = 0.0_f64;
    let tree = fixtures::branched_path();
    for t in [0.5, 1.0, 1.5] {
        let h = length_at(&tree, t, 1e-3)?;
        let want = [
            ("ab", 1.0 - t / 2.0),
            ("bc", 1.0 + t / 6.0),
            ("cd", 1.0 + t / 6.0),
            ("de", 1.0),
            ("ef", 1.0 - t / 2.0),
            ("cg", 1.0 - t / 3.0),
        ];
        for (e, w) in want {
            worst = worst.max(within(&format!("tree {e} at {t}"), edge_len(&h, e), w, 1e-8)?);
        }
    }
    let lengths = [0.7, 1.3, 2.0, 0.4, 1.6];
    let cycle = fixtures::cycle(&lengths);
    let lambda = 1.0 / lengths.iter().sum::<f64>();
    for t in [0.5, 1.0, 1.5, 3.0] {
        let h = length_at(&cycle, t, 1e-3)?;
        for (i, l0) in lengths.iter().enumerate() {
            let got = edge_len(&h, &format!("e{i}"));
            worst = worst.max(within(&format!("cycle e{i} at {t}"), got, l0 * (1.0 - lambda * t), 1e-8)?);
        }
    }
    let barbell = fixtures::barbell_minimal();
    for t in [0.5, 1.0, 1.5, 4.0] {
        let h = length_at(&barbell, t, 1e-3)?;
        for (e, w) in [("e0", 3.0 - 2.0 * t / 3.0), ("e1", 1.0 + t / 3.0), ("e2", 3.0 - 2.0 * t / 3.0)] {
            worst = worst.max(within(&format!("barbell {e} at {t}"), edge_len(&h, e), w, 1e-8)?);
        }
    }
    Ok(format!("tree, 5-cycle, minimal barbell; max error {worst:.1e}"))
}

fn surgery_timeline() -> Outcome {
    let trace = flow_with_surgery_to_point(&fixtures::branched_path(), &FlowConfig::default()).map_err(|e| e.to_string())?;
    let times: Vec<f64> = trace.events.iter().map(|e| e.t).collect();
    if times.len() != 4 {
        return Err(format!("expected 4 surgeries, got {times:?}"));
    }
    for (t, want) in times.iter().zip([2.0, 3.0, 4.0, 5.0]) {
        within("surgery time", *t, want, 1e-5)?;
    }
    // just after the cg contraction at t = 3
    let post = trace
        .samples
        .iter()
        .find(|s| s.segment == 2)
        .ok_or("no sample after the second surgery")?;
    within("sample time", post.t, 3.0, 1e-5)?;
    for (e, w) in [("bc", 1.0), ("cd", 1.5), ("de", 0.5)] {
        let got = post.length_of(&EdgeId::from(e)).ok_or(format!("{e} missing at t = 3"))?;
        within(&format!("{e} at t = 3"), got, w, 1e-6)?;
    }
    if !matches!(trace.terminal, TerminalState::Point(_)) {
        return Err("did not end at a point".into());
    }
    within("terminal time", trace.terminal_time, 6.0, 1e-6)?;
    Ok(format!(
        "events at {:?}, terminal point at {:.9}",
        times.iter().map(|t| format!("{t:.9}")).collect::<Vec<_>>(),
        trace.terminal_time
    ))
}

fn traces_for_length_law() -> Result<Vec<(String, FlowTrace)>, String> {
    let mut out = Vec::new();
    let run = |g: &WeightedGraph, cfg: &FlowConfig| flow_with_surgery_to_point(g, cfg).map_err(|e| e.to_string());
    for (name, g) in figures() {
        out.push((name.to_string(), run(&g, &FlowConfig::default())?));
    }
    out.push(("minimal barbell".into(), run(&fixtures::barbell_minimal(), &FlowConfig::default())?));
    out.push(("K4".into(), run(&fixtures::complete(4), &FlowConfig::default())?));
    let params = CorpusParams {
        max_length: 2.0,
        ..CorpusParams::default()
    };
    let coarse = FlowConfig {
        dt: 1e-2,
        ..FlowConfig::default()
    };
    for (i, g) in random_corpus(DEFAULT_SEED ^ 1, 10, &params).iter().enumerate() {
        out.push((format!("random {i}"), run(g, &coarse)?));
    }
    Ok(out)
}

fn total_length_rate() -> Outcome {
    let traces = traces_for_length_law()?;
    let mut worst = 0.0_f64;
    let mut events = 0;
    for (name, trace) in &traces {
        let report = monitor_trace(trace).map_err(|e| e.to_string())?;
        let c = report.check("total-length-rate").expect("always reported");
        if !c.passed {
            return Err(format!("{name}: total-length violation {:.3e}", c.max_violation));
        }
        worst = worst.max(c.max_violation);
        within(
            &format!("{name} terminal time"),
            trace.terminal_time,
            trace.initial.total_length(),
            1e-6,
        )?;
        events += trace.events.len();
    }
    Ok(format!(
        "{} traces through {events} surgeries, max excess over allowance {worst:.1e}",
        traces.len()
    ))
}

fn nonnegative_preservation() -> Outcome {
    let graphs: Vec<(String, WeightedGraph)> = std::iter::once(("house".to_string(), fixtures::house()))
        .chain(
            random_nonnegative_corpus(DEFAULT_SEED, 20)
                .into_iter()
                .enumerate()
                .map(|(i, g)| (format!("nonnegative {i}"), g)),
        )
        .collect();
    let (mut neg, mut mono) = (0.0_f64, 0.0_f64);
    for (name, g) in &graphs {
        let trace = flow(g, &FlowConfig::default()).map_err(|e| e.to_string())?;
        let report = monitor_trace(&trace).map_err(|e| e.to_string())?;
        for check in ["nonnegative-curvature", "min-ratio-monotone"] {
            let c = report
                .check(check)
                .ok_or(format!("{name}: {check} not applicable, initial curvature negative"))?;
            if !c.passed {
                return Err(format!("{name}: {check} violated by {:.3e}", c.max_violation));
            }
        }
        neg = neg.max(report.check("nonnegative-curvature").unwrap().max_violation);
        mono = mono.max(report.check("min-ratio-monotone").unwrap().max_violation);
    }
    Ok(format!(
        "{} traces to first collapse, max K deficit {neg:.1e}, max min-K/ℓ drop {mono:.1e}",
        graphs.len()
    ))
}

fn derivative_identities() -> Outcome {
    let graphs: Vec<WeightedGraph> = figures().into_iter().map(|(_, g)| g).chain(corpus()).collect();
    let mut worst = [0.0_f64; 3];
    for (i, g) in graphs.iter().enumerate() {
        let report = verify_all(g, 1e-8);
        for (slot, name) in ["resistance-gradient-fd", "curvature-partials-fd", "euler-identity"].iter().enumerate() {
            let c = report.check(name).ok_or(format!("{name} missing"))?;
            if !c.passed {
                return Err(format!("graph {i}: {name} off by {:.3e}", c.max_violation));
            }
            worst[slot] = worst[slot].max(c.max_violation);
        }
    }

    // Curvature evolution against a central difference along the trajectory.
    let dt = 1e-4;
    let mut along = 0.0_f64;
    let subjects: Vec<WeightedGraph> = vec![fixtures::house(), fixtures::barbell(), fixtures::theta()]
        .into_iter()
        .chain(random_nonnegative_corpus(DEFAULT_SEED ^ 2, 5))
        .collect();
    for g in &subjects {
        let cfg = FlowConfig {
            t_end: TimeLimit::At(0.1),
            dt,
            sample_stride: 1,
            ..FlowConfig::default()
        };
        let trace = flow(g, &cfg).map_err(|e| e.to_string())?;
        for k in [1, 500, 998] {
            let (before, at, after) = (&trace.samples[k - 1], &trace.samples[k], &trace.samples[k + 1]);
            let h = trace.sample_graph(at).map_err(|e| e.to_string())?;
            for (j, e) in at.edges.iter().enumerate() {
                let fd = (after.curvatures[j] - before.curvatures[j]) / (after.t - before.t);
                let exact = curvature_time_derivative(&h, e).map_err(|e| e.to_string())?;
                along = along.max(within(&format!("dK/dt of {e}"), exact, fd, 1e-5)?);
            }
        }
    }
    Ok(format!(
        "gradient FD {:.1e}, partials FD {:.1e}, Euler {:.1e}, dK/dt along trajectories {along:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn rescaling_invariance() -> Outcome {
    let graphs: Vec<WeightedGraph> = figures().into_iter().map(|(_, g)| g).chain(corpus()).collect();
    let mut worst = 0.0_f64;
    for g in &graphs {
        let base = curvature_report(g).map_err(|e| e.to_string())?;
        for lam in [0.1, 3.0, 100.0] {
            let r = curvature_report(&g.scaled(lam).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            for (a, b) in base.edges.iter().zip(&r.edges) {
                worst = worst.max(within("K", b.curvature, a.curvature, 1e-10)?);
                worst = worst.max(within("F", b.foster, a.foster, 1e-10)?);
                worst = worst.max(within("arc", b.arc_forward, a.arc_forward, 1e-10)?);
            }
            for (a, b) in base.vertices.iter().zip(&r.vertices) {
                worst = worst.max(within("p", b.scalar, a.scalar, 1e-10)?);
            }
        }
    }
    Ok(format!("{} graphs × 3 factors, max change {worst:.1e}", graphs.len()))
}

fn einstein_detection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut cycle_worst = 0.0_f64;
    for n in 1..=12 {
        let lengths: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
        let g = fixtures::cycle(&lengths);
        let c = einstein_check(&g, 1e-10).map_err(|e| e.to_string())?;
        if !c.is_einstein {
            return Err(format!("{n}-cycle residual {:.3e}", c.max_residual));
        }
        within("λ", c.lambda, 1.0 / g.total_length(), 1e-15)?;
        cycle_worst = cycle_worst.max(c.max_residual);
    }
    let k4 = fixtures::complete(4);
    let mut iters = 0;
    for _ in 0..10 {
        let start: Vec<f64> = (0..6).map(|_| 1.0 + rng.random_range(-0.3..0.3)).collect();
        let g = k4.with_lengths(&start).map_err(|e| e.to_string())?;
        let s = einstein_solve(&g, 500, 1e-9).map_err(|e| e.to_string())?;
        if s.certificate.max_residual >= 1e-8 {
            return Err(format!("K4 residual {:.3e}", s.certificate.max_residual));
        }
        iters = iters.max(s.iterations);
    }
    Ok(format!(
        "12 cycles max residual {cycle_worst:.1e}; K4 from 10 perturbed starts in ≤ {iters} iterations"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("figure curvatures", figure_reproduction),
        ("curvature and Foster sums", curvature_and_foster_sums),
        ("spanning-tree oracle", tree_oracle_equivalence),
        ("closed-form flows", flow_exactness),
        ("surgery timeline", surgery_timeline),
        ("total length rate", total_length_rate),
        ("nonnegative curvature preserved", nonnegative_preservation),
        ("derivative identities", derivative_identities),
        ("rescaling invariance", rescaling_invariance),
        ("Einstein detection", einstein_detection),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
