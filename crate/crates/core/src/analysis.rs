//! Executable invariants, finite-difference oracles and Einstein networks.
//!
//! [`verify_all`] runs every static identity the curvature and resistance
//! theory guarantees against one graph and returns the largest violation of
//! each. Failures are data: the report says which identity broke and by how
//! much, it never errors.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::curvature::{curvature_partials, edge_curvatures, verify_subdivision_additivity, CurvatureReport};
use crate::error::{Error, Result};
use crate::flow::{FlowSample, FlowTrace};
use crate::graph::{EdgeId, WeightedGraph};
use crate::resistance::{resistance_by_trees, ResistanceProfile, TREE_ENUMERATION_CAP};

/// Step and agreement threshold for finite-difference cross-checks.
pub const FD_STEP: f64 = 1e-6;
pub const FD_TOLERANCE: f64 = 1e-6;

const RESCALE_FACTORS: [f64; 3] = [0.1, 3.0, 100.0];
const HOMOGENEITY_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// The identity this check exercises.
    pub property: &'static str,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Checks(Vec<CheckResult>);

impl Checks {
    fn push(&mut self, name: &'static str, property: &'static str, violation: f64, tolerance: f64) {
        // NaN never passes
        let passed = violation <= tolerance;
        self.0.push(CheckResult {
            name,
            property,
            max_violation: violation,
            tolerance,
            passed,
        });
    }

    fn push_result(&mut self, name: &'static str, property: &'static str, v: Result<f64>, tolerance: f64) {
        self.push(name, property, v.unwrap_or(f64::NAN), tolerance);
    }

    fn finish(self) -> VerificationReport {
        let passed = self.0.iter().all(|c| c.passed);
        VerificationReport { checks: self.0, passed }
    }
}

fn fold_max(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

/// Run every static invariant against `g`; identity checks use `tol`,
/// derivative checks use [`FD_TOLERANCE`].
pub fn verify_all(g: &WeightedGraph, tol: f64) -> VerificationReport {
    match ResistanceProfile::new(g) {
        Ok(profile) => verify_with_profile(g, &profile, tol),
        Err(_) => {
            let mut c = Checks::default();
            c.push("laplacian-solve", "reduced Laplacian factorizes", f64::NAN, 0.0);
            c.finish()
        }
    }
}

/// Like [`verify_all`] but the profile-based identities read resistances
/// from `profile`, which may come from elsewhere.
pub fn verify_with_profile(g: &WeightedGraph, profile: &ResistanceProfile, tol: f64) -> VerificationReport {
    let mut c = Checks::default();
    if g.is_point() {
        c.push("point", "single vertex without edges", 0.0, tol);
        return c.finish();
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let bridges = g.bridges();

    let deg_sum: usize = g.degrees().iter().sum();
    c.push("degree-sum", "sum of degrees = 2|E|", deg_sum.abs_diff(2 * m) as f64, 0.0);

    let omega = profile.omega_matrix();
    let mut sym = 0.0_f64;
    for x in 0..n {
        sym = sym.max(omega[(x, x)].abs());
        for y in 0..n {
            sym = sym.max((omega[(x, y)] - omega[(y, x)]).abs());
            if x != y && omega[(x, y)] <= 0.0 {
                sym = sym.max(omega[(x, y)].abs() + f64::MIN_POSITIVE);
            }
        }
    }
    c.push("resistance-metric", "ω(x,x)=0, ω symmetric, ω(x,y)>0", sym, tol);

    let ratio_violation = fold_max((0..m).map(|i| {
        let r = profile.ratio(i);
        let (a, b) = g.endpoints(i);
        if a == b {
            r.abs()
        } else if bridges[i] {
            (r - 1.0).abs()
        } else {
            (r - 1.0).max(-r).max(0.0)
        }
    }));
    c.push("resistance-ratio-bounds", "0 < ω_e/ℓ_e ≤ 1; bridges 1, loops 0", ratio_violation, tol);

    let foster: f64 = profile.ratios().iter().sum();
    c.push(
        "foster-sum",
        "Σ ω_e/ℓ_e = |V| − 1",
        (foster - (n as f64 - 1.0)).abs(),
        tol,
    );

    let report = CurvatureReport::from_profile(profile);
    c.push(
        "foster-coefficient-sum",
        "Σ F(e) = |E| − |V| + 1",
        (report.total_foster - g.cycle_rank() as f64).abs(),
        tol,
    );
    c.push(
        "curvature-bounds",
        "|K_e| ≤ 1",
        fold_max(report.edges.iter().map(|e| (e.curvature.abs() - 1.0).max(0.0))),
        tol,
    );
    c.push("curvature-sum", "Σ K_e = 1", (report.total_curvature - 1.0).abs(), tol);

    let mut incident = vec![0.0; n];
    for i in 0..m {
        let (a, b) = g.endpoints(i);
        incident[a] += profile.ratio(i);
        incident[b] += profile.ratio(i);
    }
    let scalar = fold_max(
        report
            .vertices
            .iter()
            .zip(&incident)
            .map(|(v, s)| (v.scalar - (1.0 - 0.5 * s)).abs())
            .chain(report.edges.iter().map(|e| (e.arc_forward + e.arc_backward - e.curvature).abs()))
            .chain([(report.total_scalar - 1.0).abs()]),
    );
    c.push(
        "scalar-curvature",
        "p_u = Σ arcs out of u = 1 − ½Σ ω/ℓ; K_e = K_uv + K_vu; Σ p_u = 1",
        scalar,
        tol,
    );

    let base = report.curvatures();
    c.push_result(
        "rescaling-invariance",
        "K(λℓ) = K(ℓ) for λ ∈ {0.1, 3, 100}",
        RESCALE_FACTORS.iter().try_fold(0.0_f64, |acc, &lam| {
            let k = edge_curvatures(g, &g.lengths().iter().map(|l| l * lam).collect::<Vec<_>>())?;
            Ok(acc.max(fold_max(k.iter().zip(&base).map(|(a, b)| (a - b).abs()))))
        }),
        tol,
    );

    c.push_result("resistance-homogeneity", "ω(λℓ) = λ ω(ℓ)", homogeneity_violation(g), tol);
    c.push_result(
        "euler-identity",
        "Σ_f ℓ_f ∂ω_e/∂ℓ_f = ω_e",
        euler_violation(g),
        tol,
    );
    c.push_result("rayleigh", "∂ω_xy/∂ℓ_f ≥ 0", rayleigh_violation(g), 0.0);
    c.push_result("parallel-rule", "ω_e = ℓ_e w/(ℓ_e + w), w = ω_e(G∖e)", parallel_violation(g), tol);

    if g.non_loop_edge_count() <= TREE_ENUMERATION_CAP {
        c.push_result("tree-oracle", "Laplacian ω = τ(G/xy)/τ(G)", tree_oracle_violation(g, profile), tol);
    }

    c.push_result(
        "subdivision-additivity",
        "K_e = K_e1 + K_e2 and F(e) = F(e1) + F(e2)",
        (0..m)
            .filter(|&i| {
                let (a, b) = g.endpoints(i);
                a != b
            })
            .try_fold(0.0_f64, |acc, i| {
                let e = &g.edges()[i].id;
                let mut worst = acc;
                for split in [0.25, 0.5] {
                    worst = worst.max(verify_subdivision_additivity(g, e, split)?.max_violation());
                }
                Ok(worst)
            }),
        tol,
    );

    let partials: Result<Vec<Vec<f64>>> = g.edges().iter().map(|e| curvature_partials(g, &e.id)).collect();
    match partials {
        Ok(p) => {
            let sign = fold_max(p.iter().enumerate().flat_map(|(e, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(f, &d)| if e == f { (-d).max(0.0) } else { d.max(0.0) })
            }));
            c.push("curvature-partial-signs", "∂K_e/∂ℓ_e ≥ 0, ∂K_e/∂ℓ_f ≤ 0", sign, 0.0);
            c.push_result(
                "curvature-partials-fd",
                "closed-form ∂K_e/∂ℓ_f = central difference",
                partials_fd_violation(g, &p),
                FD_TOLERANCE,
            );
        }
        Err(_) => {
            c.push("curvature-partial-signs", "∂K_e/∂ℓ_e ≥ 0, ∂K_e/∂ℓ_f ≤ 0", f64::NAN, 0.0);
        }
    }
    c.push_result(
        "resistance-gradient-fd",
        "(i_f^xy)² = central difference of ω_xy",
        gradient_fd_violation(g),
        FD_TOLERANCE,
    );
    c.finish()
}

fn homogeneity_violation(g: &WeightedGraph) -> Result<f64> {
    let base = ResistanceProfile::new(g)?.omega_matrix();
    let mut worst = 0.0_f64;
    for lam in HOMOGENEITY_FACTORS {
        let scaled = ResistanceProfile::new(&g.scaled(lam)?)?.omega_matrix();
        for (a, b) in scaled.iter().zip(base.iter()) {
            worst = worst.max((a - lam * b).abs() / (lam * b.abs()).max(1.0));
        }
    }
    Ok(worst)
}

fn euler_violation(g: &WeightedGraph) -> Result<f64> {
    let p = ResistanceProfile::new(g)?;
    let lengths = g.lengths();
    Ok(fold_max((0..g.edge_count()).filter_map(|i| {
        let (a, b) = g.endpoints(i);
        (a != b).then(|| {
            let lhs: f64 = p.gradient_by_index(a, b).iter().zip(&lengths).map(|(d, l)| d * l).sum();
            let w = p.omega_by_index(a, b);
            (lhs - w).abs() / w.max(1.0)
        })
    })))
}

fn rayleigh_violation(g: &WeightedGraph) -> Result<f64> {
    let p = ResistanceProfile::new(g)?;
    let n = g.vertex_count();
    let mut worst = 0.0_f64;
    for x in 0..n {
        for y in x + 1..n {
            for d in p.gradient_by_index(x, y) {
                worst = worst.max(-d);
            }
        }
    }
    Ok(worst.max(0.0))
}

fn parallel_violation(g: &WeightedGraph) -> Result<f64> {
    let p = ResistanceProfile::new(g)?;
    let bridges = g.bridges();
    let mut worst = 0.0_f64;
    for (i, e) in g.edges().iter().enumerate() {
        let (a, b) = g.endpoints(i);
        if a == b || bridges[i] {
            continue;
        }
        let w = ResistanceProfile::new(&g.without_edge(&e.id)?)?.omega_by_index(a, b);
        let expected = e.length * w / (e.length + w);
        worst = worst.max((p.omega_by_index(a, b) - expected).abs());
    }
    Ok(worst)
}

fn tree_oracle_violation(g: &WeightedGraph, p: &ResistanceProfile) -> Result<f64> {
    let vs = g.vertices();
    let mut worst = 0.0_f64;
    for x in 0..vs.len() {
        for y in x + 1..vs.len() {
            let t = resistance_by_trees(g, &vs[x], &vs[y])?;
            worst = worst.max((p.omega_by_index(x, y) - t).abs());
        }
    }
    Ok(worst)
}

fn partials_fd_violation(g: &WeightedGraph, closed: &[Vec<f64>]) -> Result<f64> {
    let m = g.edge_count();
    let mut worst = 0.0_f64;
    for f in 0..m {
        let column = fd_column(g, f, FD_STEP, |h| edge_curvatures(h, &h.lengths()))?;
        for (row, fd) in closed.iter().zip(&column) {
            worst = worst.max((row[f] - fd).abs() / row[f].abs().max(1.0));
        }
    }
    Ok(worst)
}

fn gradient_fd_violation(g: &WeightedGraph) -> Result<f64> {
    let p = ResistanceProfile::new(g)?;
    let n = g.vertex_count();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let grads: Vec<Vec<f64>> = pairs.iter().map(|&(x, y)| p.gradient_by_index(x, y)).collect();
    let mut worst = 0.0_f64;
    for f in 0..g.edge_count() {
        let column = fd_column(g, f, FD_STEP, |h| {
            let q = ResistanceProfile::new(h)?;
            Ok(pairs.iter().map(|&(x, y)| q.omega_by_index(x, y)).collect())
        })?;
        for (k, grad) in grads.iter().enumerate() {
            worst = worst.max((grad[f] - column[k]).abs() / grad[f].abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Central difference of a vector-valued function in the length of edge `f`.
fn fd_column(
    g: &WeightedGraph,
    f: usize,
    h: f64,
    func: impl Fn(&WeightedGraph) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let len = g.edges()[f].length;
    let step = h.min(len / 4.0);
    let mut plus = g.lengths();
    let mut minus = g.lengths();
    plus[f] = len + step;
    minus[f] = len - step;
    let up = func(&g.with_lengths(&plus)?)?;
    let down = func(&g.with_lengths(&minus)?)?;
    Ok(up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * step)).collect())
}

/// Central difference `(fn(ℓ_e + h) − fn(ℓ_e − h)) / 2h` with all other lengths fixed.
pub fn finite_difference(
    func: impl Fn(&WeightedGraph) -> Result<f64>,
    g: &WeightedGraph,
    e: &EdgeId,
    h: f64,
) -> Result<f64> {
    let idx = g.edge_index(e)?;
    let len = g.edges()[idx].length;
    if !(h > 0.0 && len > h) {
        return Err(Error::StepTooLarge { step: h, length: len });
    }
    let mut plus = g.lengths();
    let mut minus = g.lengths();
    plus[idx] = len + h;
    minus[idx] = len - h;
    Ok((func(&g.with_lengths(&plus)?)? - func(&g.with_lengths(&minus)?)?) / (2.0 * h))
}

/// How close `(G, ℓ)` is to `K_e = λ ℓ_e` with `λ = 1/Σℓ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinCertificate {
    pub lambda: f64,
    pub lengths: BTreeMap<EdgeId, f64>,
    pub residuals: BTreeMap<EdgeId, f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub is_einstein: bool,
}

pub fn einstein_check(g: &WeightedGraph, tol: f64) -> Result<EinsteinCertificate> {
    let k = edge_curvatures(g, &g.lengths())?;
    Ok(certificate(g, &g.lengths(), &k, tol))
}

fn certificate(g: &WeightedGraph, lengths: &[f64], k: &[f64], tol: f64) -> EinsteinCertificate {
    // forced by Σ K_e = 1
    let lambda = 1.0 / lengths.iter().sum::<f64>();
    let residuals: Vec<f64> = k.iter().zip(lengths).map(|(k, l)| k - lambda * l).collect();
    let max_residual = fold_max(residuals.iter().map(|r| r.abs()));
    let ids = g.edges().iter().map(|e| e.id.clone());
    EinsteinCertificate {
        lambda,
        lengths: ids.clone().zip(lengths.iter().copied()).collect(),
        residuals: ids.zip(residuals).collect(),
        max_residual,
        tolerance: tol,
        is_einstein: max_residual <= tol,
    }
}

/// Update rule of the Einstein search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EinsteinMethod {
    /// Newton steps on `K(ℓ) − ℓ` using the closed-form curvature partials,
    /// halved until the residual drops.
    Newton,
    /// `ℓ ← (1 − θ) ℓ + θ max(K(ℓ), floor)`. Cheap, but the Einstein point is
    /// repelling whenever the curvature Jacobian has an eigenvalue above
    /// `2/θ − 1`, as on the complete graph K4.
    FixedPoint { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EinsteinSolverOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub method: EinsteinMethod,
    /// Lengths are clamped to at least this before renormalizing.
    pub floor: f64,
}

impl Default for EinsteinSolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-8,
            method: EinsteinMethod::Newton,
            floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinSolution {
    pub graph: WeightedGraph,
    pub iterations: usize,
    pub certificate: EinsteinCertificate,
}

/// Search for lengths with `Σℓ = 1` and `K_e = ℓ_e`, starting from `g`'s own
/// lengths. A heuristic: failure to converge is evidence, not proof, that no
/// Einstein lengths exist; the error carries the best certificate found.
pub fn einstein_solve(g: &WeightedGraph, max_iter: usize, tol: f64) -> Result<EinsteinSolution> {
    einstein_solve_with(
        g,
        &EinsteinSolverOptions {
            max_iter,
            tol,
            ..Default::default()
        },
    )
}

pub fn einstein_solve_with(g: &WeightedGraph, opts: &EinsteinSolverOptions) -> Result<EinsteinSolution> {
    let floor = opts.floor;
    let normalize = |v: &mut Vec<f64>| {
        v.iter_mut().for_each(|x| *x = x.max(floor));
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
    };
    let evaluate = |lengths: &[f64]| -> Result<(Vec<f64>, EinsteinCertificate)> {
        let k = edge_curvatures(g, lengths)?;
        let cert = certificate(g, lengths, &k, opts.tol);
        Ok((k, cert))
    };
    let mut lengths = g.lengths();
    normalize(&mut lengths);
    let (mut k, mut cert) = evaluate(&lengths)?;
    let mut iterations = 0;
    while !cert.is_einstein && iterations < opts.max_iter {
        iterations += 1;
        let proposal = match opts.method {
            EinsteinMethod::FixedPoint { theta } => {
                let mut next: Vec<f64> = lengths.iter().zip(&k).map(|(l, k)| (1.0 - theta) * l + theta * k).collect();
                normalize(&mut next);
                Some(next)
            }
            EinsteinMethod::Newton => newton_step(g, &lengths, &k, cert.max_residual, &normalize, &evaluate)?,
        };
        let Some(next) = proposal else { break };
        let (next_k, next_cert) = evaluate(&next)?;
        if matches!(opts.method, EinsteinMethod::FixedPoint { .. }) || next_cert.max_residual < cert.max_residual {
            lengths = next;
            k = next_k;
            cert = next_cert;
        } else {
            break;
        }
    }
    if cert.is_einstein {
        Ok(EinsteinSolution {
            graph: g.with_lengths(&lengths)?,
            iterations,
            certificate: cert,
        })
    } else {
        Err(Error::NoConvergence(Box::new(cert)))
    }
}

/// Newton direction for `K(ℓ) − ℓ = 0`, backtracked until the max residual
/// decreases. `None` when no tried step improves.
fn newton_step(
    g: &WeightedGraph,
    lengths: &[f64],
    k: &[f64],
    current: f64,
    normalize: &impl Fn(&mut Vec<f64>),
    evaluate: &impl Fn(&[f64]) -> Result<(Vec<f64>, EinsteinCertificate)>,
) -> Result<Option<Vec<f64>>> {
    let m = lengths.len();
    let at = g.with_lengths(lengths)?;
    let mut jac = nalgebra::DMatrix::zeros(m, m);
    for (e, rec) in at.edges().iter().enumerate() {
        for (f, d) in curvature_partials(&at, &rec.id)?.into_iter().enumerate() {
            jac[(e, f)] = d;
        }
        jac[(e, e)] -= 1.0;
    }
    let rhs = nalgebra::DVector::from_iterator(m, k.iter().zip(lengths).map(|(k, l)| l - k));
    let delta = jac
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let mut step = 1.0;
    for _ in 0..30 {
        let mut next: Vec<f64> = lengths.iter().zip(delta.iter()).map(|(l, d)| l + step * d).collect();
        normalize(&mut next);
        if evaluate(&next)?.1.max_residual < current {
            return Ok(Some(next));
        }
        step *= 0.5;
    }
    Ok(None)
}

/// Slack for the trajectory monitors.
pub const TRACE_TOLERANCE: f64 = 1e-8;
/// Slack for the sign of `dω/dt` on nonnegatively curved traces.
pub const RESISTANCE_DECAY_TOLERANCE: f64 = 1e-10;

/// Check the laws every flow trajectory obeys.
///
/// Total length falls at rate one (each surgery may shed up to
/// `collapse_epsilon` per contracted edge); every length stays within `t` of
/// its start. Before the first surgery: `min K/ℓ` never decreases, the edge
/// attaining it has `dω/dt + ω K/ℓ ≤ 0`, and if the initial curvature is
/// nonnegative it stays so and no resistance grows.
pub fn monitor_trace(trace: &FlowTrace) -> Result<VerificationReport> {
    let mut c = Checks::default();
    let total0 = trace.initial.total_length();
    let initial: BTreeMap<&EdgeId, f64> = trace.initial.edges().iter().map(|e| (&e.id, e.length)).collect();

    let mut shed = vec![0.0; trace.events.len() + 1];
    for (i, ev) in trace.events.iter().enumerate() {
        shed[i + 1] = shed[i] + ev.contracted_edges.len() as f64 * trace.config.collapse_epsilon;
    }
    let total = fold_max(trace.samples.iter().map(|s| {
        ((s.total_length - (total0 - s.t)).abs() - shed[s.segment]).max(0.0)
    }));
    c.push("total-length-rate", "Σℓ(t) = Σℓ(0) − t", total, TRACE_TOLERANCE);

    let bounds = fold_max(trace.samples.iter().flat_map(|s| {
        s.edges.iter().zip(&s.lengths).map(|(e, &l)| {
            let l0 = initial[e];
            ((l0 - s.t) - l).max(l - (l0 + s.t)).max(0.0)
        })
    }));
    c.push("length-bounds", "ℓ(0) − t ≤ ℓ(t) ≤ ℓ(0) + t", bounds, TRACE_TOLERANCE);

    let pre: Vec<&FlowSample> = trace.pre_surgery_samples().collect();
    let monotone = fold_max(pre.windows(2).map(|w| (w[0].min_curvature_ratio - w[1].min_curvature_ratio).max(0.0)));
    c.push("min-ratio-monotone", "min K/ℓ nondecreasing", monotone, TRACE_TOLERANCE);

    let nonnegative = edge_curvatures(&trace.initial, &trace.initial.lengths())?
        .iter()
        .all(|&k| k >= -NONNEGATIVE_SLACK);
    let mut decay = 0.0_f64;
    let mut bound = 0.0_f64;
    let mut negative = 0.0_f64;
    for s in &pre {
        let g = trace.sample_graph(s)?;
        let dw = crate::flow::resistance_time_derivatives(&g)?;
        let p = ResistanceProfile::new(&g)?;
        let (i, _) = s
            .curvatures
            .iter()
            .zip(&s.lengths)
            .map(|(k, l)| k / l)
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, r)| if r < best.1 { (i, r) } else { best });
        bound = bound.max(dw[i] + p.edge_omega(i) * s.curvatures[i] / s.lengths[i]);
        if nonnegative {
            decay = decay.max(fold_max(dw.iter().copied()));
            negative = negative.max(fold_max(s.curvatures.iter().map(|k| -k)));
        }
    }
    c.push("min-ratio-resistance-bound", "dω_e/dt + ω_e K_e/ℓ_e ≤ 0 at argmin K/ℓ", bound.max(0.0), TRACE_TOLERANCE);
    if nonnegative {
        c.push("nonnegative-curvature", "K ≥ 0 is preserved", negative.max(0.0), TRACE_TOLERANCE);
        c.push("resistance-decay", "dω_e/dt ≤ 0 when K ≥ 0", decay.max(0.0), RESISTANCE_DECAY_TOLERANCE);
    }
    Ok(c.finish())
}

/// Initial curvatures above `−NONNEGATIVE_SLACK` count as nonnegative.
const NONNEGATIVE_SLACK: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::resistance::resistance_profile;
    use approx::assert_abs_diff_eq;

    #[test]
    fn house_passes_everything() {
        let r = verify_all(&fixtures::house(), 1e-9);
        assert!(r.passed, "{:#?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn single_edge_passes() {
        let g = WeightedGraph::from_edge_list(&[("a", "b", 1.0)]).unwrap();
        let r = verify_all(&g, 1e-9);
        assert!(r.passed);
        assert_eq!(r.check("curvature-sum").unwrap().max_violation, 0.0);
    }

    #[test]
    fn corrupted_profile_fails_foster_sum() {
        let g = fixtures::house();
        let mut omega = resistance_profile(&g).unwrap().omega_matrix();
        omega[(0, 1)] *= 1.5;
        omega[(1, 0)] *= 1.5;
        let p = ResistanceProfile::from_resistance_matrix(&g, &omega).unwrap();
        let r = verify_with_profile(&g, &p, 1e-9);
        assert!(!r.passed);
        assert!(!r.check("foster-sum").unwrap().passed);
    }

    #[test]
    fn finite_difference_basics() {
        let g = fixtures::house();
        let e: EdgeId = "floor".into();
        let c = finite_difference(|_| Ok(42.0), &g, &e, 1e-3).unwrap();
        assert_eq!(c, 0.0);
        let own = finite_difference(|h| Ok(h.edge(&e)?.length), &g, &e, 1e-3).unwrap();
        assert_abs_diff_eq!(own, 1.0, epsilon = 1e-12);
        assert!(matches!(
            finite_difference(|_| Ok(0.0), &g, &e, 2.0),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn einstein_examples() {
        let c = einstein_check(&fixtures::cycle(&[0.3, 1.7, 2.0, 0.9, 5.0]), 1e-10).unwrap();
        assert!(c.is_einstein);
        assert_abs_diff_eq!(c.lambda, 1.0 / 9.9, epsilon = 1e-15);
        let b = einstein_check(&fixtures::barbell(), 1e-10).unwrap();
        assert!(!b.is_einstein);
        assert_abs_diff_eq!(b.residuals[&EdgeId::from("e3")], -1.0 / 3.0 - 1.0 / 7.0, epsilon = 1e-12);
        assert!(einstein_check(&fixtures::complete(4), 1e-10).unwrap().is_einstein);
    }

    #[test]
    fn solver_on_cycle() {
        let s = einstein_solve(&fixtures::cycle(&[1.0, 3.0, 0.2]), 10, 1e-12).unwrap();
        assert_eq!(s.iterations, 0);
        assert_abs_diff_eq!(s.graph.total_length(), 1.0, epsilon = 1e-12);
    }
}
