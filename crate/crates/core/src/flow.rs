//! Ricci–Foster flow `dℓ_e/dt = −K_e` with collapse detection and surgery.
//!
//! The integrator is classical fixed-step RK4. A step that would bring any
//! length to `collapse_epsilon` or below is rejected and the crossing is
//! localized by bisection on the step size. At the crossing, every edge whose
//! projected collapse time lies within `collapse_epsilon` (in time) of the
//! first one is advanced to its collapse together with the rest; this groups
//! symmetric collapses that differ only by rounding into one event.
//!
//! With surgery enabled the collapsed edges are contracted and the flow
//! restarts on the quotient graph with inherited lengths. Since the
//! curvatures always sum to one, the total length drops at rate one and a
//! run to total collapse ends at `t = Σ ℓ⁽⁰⁾`. The final contraction to a
//! single point is reported as the terminal state, not as a surgery event.

use serde::Serialize;

use crate::curvature::CurvatureKernel;
use crate::error::{Error, Result};
use crate::graph::{ContractionMap, EdgeId, VertexId, WeightedGraph};
use crate::resistance::ResistanceProfile;

/// Smallest step the integrator will attempt.
pub const STEP_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeLimit {
    At(f64),
    UntilCollapse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowConfig {
    pub t_end: TimeLimit,
    pub dt: f64,
    pub sample_stride: usize,
    pub collapse_epsilon: f64,
    pub surgery_enabled: bool,
    /// Width of the bisection bracket around a collapse time.
    pub event_time_tolerance: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            t_end: TimeLimit::UntilCollapse,
            dt: 1e-3,
            sample_stride: 10,
            collapse_epsilon: 1e-9,
            surgery_enabled: false,
            event_time_tolerance: 1e-12,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_owned()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive and finite");
        }
        if !(self.collapse_epsilon.is_finite() && self.collapse_epsilon > 0.0) {
            return bad("collapse_epsilon must be positive and finite");
        }
        if self.sample_stride == 0 {
            return bad("sample_stride must be at least 1");
        }
        if !(self.event_time_tolerance.is_finite() && self.event_time_tolerance > 0.0) {
            return bad("event_time_tolerance must be positive and finite");
        }
        if let TimeLimit::At(t) = self.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return bad("t_end must be nonnegative and finite");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    /// Number of surgeries performed before this sample.
    pub segment: usize,
    pub edges: Vec<EdgeId>,
    pub lengths: Vec<f64>,
    pub curvatures: Vec<f64>,
    pub total_length: f64,
    /// `min_e K_e / ℓ_e`, `+∞` on a point.
    pub min_curvature_ratio: f64,
}

impl FlowSample {
    pub fn length_of(&self, e: &EdgeId) -> Option<f64> {
        self.edges.iter().position(|x| x == e).map(|i| self.lengths[i])
    }

    pub fn curvature_of(&self, e: &EdgeId) -> Option<f64> {
        self.edges.iter().position(|x| x == e).map(|i| self.curvatures[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurgeryEvent {
    pub t: f64,
    pub contracted_edges: Vec<EdgeId>,
    /// Lengths of the contracted edges at `t`, all at most `collapse_epsilon`.
    pub contracted_lengths: Vec<f64>,
    pub contraction: ContractionMap,
    #[serde(skip)]
    pub graph: WeightedGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TerminalState {
    Point(VertexId),
    Graph(WeightedGraph),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Reached the configured end time.
    TimeLimit,
    /// An edge collapsed and surgery was disabled.
    Collapse,
    /// Surgery reduced the graph to a single point.
    Point,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub initial: WeightedGraph,
    pub config: FlowConfig,
    pub samples: Vec<FlowSample>,
    pub events: Vec<SurgeryEvent>,
    pub terminal: TerminalState,
    pub terminal_time: f64,
    pub stop_reason: StopReason,
    /// Edges removed by the final contraction to a point, if any.
    pub final_collapse: Vec<EdgeId>,
}

impl FlowTrace {
    /// Topology in force during `segment` (lengths are those of the snapshot).
    pub fn segment_graph(&self, segment: usize) -> &WeightedGraph {
        if segment == 0 {
            &self.initial
        } else {
            &self.events[segment - 1].graph
        }
    }

    /// The graph at a sample, with the sampled lengths.
    pub fn sample_graph(&self, s: &FlowSample) -> Result<WeightedGraph> {
        self.segment_graph(s.segment).with_lengths(&s.lengths)
    }

    /// The sample closest in time to `t`.
    pub fn sample_near(&self, t: f64) -> Option<&FlowSample> {
        self.samples
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    pub fn pre_surgery_samples(&self) -> impl Iterator<Item = &FlowSample> {
        self.samples.iter().filter(|s| s.segment == 0)
    }

    /// End of the interval on which the flow exists on the initial graph.
    pub fn first_collapse_time(&self) -> f64 {
        self.events.first().map_or(self.terminal_time, |e| e.t)
    }
}

struct Segment {
    graph: WeightedGraph,
    kernel: CurvatureKernel,
    ids: Vec<EdgeId>,
}

impl Segment {
    fn new(graph: WeightedGraph) -> Self {
        Self {
            kernel: CurvatureKernel::new(&graph),
            ids: graph.edges().iter().map(|e| e.id.clone()).collect(),
            graph,
        }
    }

    fn rhs(&self, lengths: &[f64]) -> Result<Vec<f64>> {
        self.kernel.curvatures(lengths)
    }

    /// One RK4 step of `dℓ/dt = −K(ℓ)`.
    fn rk4(&self, lengths: &[f64], k1: &[f64], h: f64) -> Result<Vec<f64>> {
        let shift = |k: &[f64], c: f64| -> Vec<f64> { lengths.iter().zip(k).map(|(l, k)| l - c * k).collect() };
        let k2 = self.rhs(&shift(k1, h / 2.0))?;
        let k3 = self.rhs(&shift(&k2, h / 2.0))?;
        let k4 = self.rhs(&shift(&k3, h))?;
        Ok(lengths
            .iter()
            .enumerate()
            .map(|(i, l)| l - h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }

    fn sample(&self, t: f64, segment: usize, lengths: &[f64], curvatures: Vec<f64>) -> FlowSample {
        let min_ratio = curvatures
            .iter()
            .zip(lengths)
            .map(|(k, l)| k / l)
            .fold(f64::INFINITY, f64::min);
        FlowSample {
            t,
            segment,
            edges: self.ids.clone(),
            lengths: lengths.to_vec(),
            total_length: lengths.iter().sum(),
            curvatures,
            min_curvature_ratio: min_ratio,
        }
    }
}

/// Integrate the flow from `g` under `cfg`.
pub fn flow(g: &WeightedGraph, cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    let eps = cfg.collapse_epsilon;
    let limit = match cfg.t_end {
        TimeLimit::At(t) => t,
        TimeLimit::UntilCollapse => f64::INFINITY,
    };
    if let Some(e) = g.edges().iter().find(|e| e.length <= eps) {
        return Err(Error::InvalidConfig(format!(
            "edge `{}` starts at or below collapse_epsilon",
            e.id
        )));
    }

    let mut seg = Segment::new(g.clone());
    let mut lengths = g.lengths();
    let mut t = 0.0;
    let mut segment = 0;
    let mut samples = Vec::new();
    let mut events = Vec::new();
    let mut accepted = 0usize;
    let mut final_collapse = Vec::new();

    let mut k_now = seg.rhs(&lengths)?;
    samples.push(seg.sample(t, segment, &lengths, k_now.clone()));

    let stop_reason = loop {
        if seg.graph.is_point() {
            break StopReason::Point;
        }
        let remaining = limit - t;
        if limit.is_finite() && remaining <= STEP_FLOOR * limit.max(1.0) {
            break StopReason::TimeLimit;
        }
        let h = cfg.dt.min(remaining);
        let above = |ls: &[f64]| ls.iter().all(|&l| l > eps);

        if let Ok(next) = seg.rk4(&lengths, &k_now, h) {
            if above(&next) {
                t = if h == remaining { limit } else { t + h };
                lengths = next;
                k_now = seg.rhs(&lengths)?;
                accepted += 1;
                if accepted.is_multiple_of(cfg.sample_stride) || t == limit {
                    samples.push(seg.sample(t, segment, &lengths, k_now.clone()));
                }
                continue;
            }
        }

        // Localize the collapse inside (0, h].
        let (mut lo, mut hi) = (0.0, h);
        let mut lo_state = lengths.clone();
        while hi - lo > cfg.event_time_tolerance {
            let mid = 0.5 * (lo + hi);
            match seg.rk4(&lengths, &k_now, mid) {
                Ok(trial) if above(&trial) => {
                    lo = mid;
                    lo_state = trial;
                }
                _ => hi = mid,
            }
        }
        if lo > 0.0 {
            t += lo;
            lengths = lo_state;
            k_now = seg.rhs(&lengths)?;
        }

        // Projected collapse times from here, grouped within eps of the first.
        let until: Vec<Option<f64>> = lengths
            .iter()
            .zip(&k_now)
            .map(|(&l, &k)| (k > 0.0).then(|| ((l - eps) / k).max(0.0)))
            .collect();
        let first = until.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        if !first.is_finite() || first > 2.0 * (hi - lo) + eps {
            // The rejection came from an RK4 stage overshooting, not from a
            // collapse; keep the partial step and integrate on.
            if lo <= STEP_FLOOR {
                return Err(Error::NumericalFailure(format!(
                    "step rejected at t = {t} without progress and no edge near collapse"
                )));
            }
            accepted += 1;
            continue;
        }
        if samples.last().is_none_or(|s| s.t < t) {
            samples.push(seg.sample(t, segment, &lengths, k_now.clone()));
        }
        let group_end = until
            .iter()
            .flatten()
            .copied()
            .filter(|&d| d <= first + eps)
            .fold(first, f64::max);
        let t_event = t + group_end;
        let at_event: Vec<f64> = lengths.iter().zip(&k_now).map(|(l, k)| l - group_end * k).collect();
        let collapsed: Vec<usize> = (0..at_event.len()).filter(|&i| at_event[i] <= eps).collect();
        if t_event > limit {
            // The collapse lies past the end time; finish the run there.
            let h = limit - t;
            if h > 0.0 {
                lengths = lengths.iter().zip(&k_now).map(|(l, k)| l - h * k).collect();
                k_now = seg.rhs(&lengths)?;
                t = limit;
                samples.push(seg.sample(t, segment, &lengths, k_now.clone()));
            }
            break StopReason::TimeLimit;
        }
        if collapsed.is_empty() {
            return Err(Error::NumericalFailure(format!("collapse at t = {t_event} left no edge to contract")));
        }
        let contracted: Vec<EdgeId> = collapsed.iter().map(|&i| seg.ids[i].clone()).collect();

        if !cfg.surgery_enabled {
            t = t_event;
            break StopReason::Collapse;
        }

        let mut survivors = at_event.clone();
        for &i in &collapsed {
            survivors[i] = 1.0; // removed by the contraction below
        }
        let (quotient, contraction) = seg.graph.with_lengths(&survivors)?.contract(&contracted)?;
        t = t_event;
        seg = Segment::new(quotient);
        lengths = seg.graph.lengths();
        if seg.graph.is_point() {
            final_collapse = contracted;
            break StopReason::Point;
        }
        segment += 1;
        k_now = seg.rhs(&lengths)?;
        events.push(SurgeryEvent {
            t,
            contracted_lengths: collapsed.iter().map(|&i| at_event[i]).collect(),
            contracted_edges: contracted,
            contraction,
            graph: seg.graph.clone(),
        });
        samples.push(seg.sample(t, segment, &lengths, k_now.clone()));
        accepted = 0;
    };

    if !seg.graph.is_point() && samples.last().is_none_or(|s| s.t < t) {
        samples.push(seg.sample(t, segment, &lengths, k_now));
    }
    let terminal = if seg.graph.is_point() {
        TerminalState::Point(seg.graph.vertices()[0].clone())
    } else {
        TerminalState::Graph(seg.graph.with_lengths(&lengths)?)
    };
    Ok(FlowTrace {
        initial: g.clone(),
        config: cfg.clone(),
        samples,
        events,
        terminal,
        terminal_time: t,
        stop_reason,
        final_collapse,
    })
}

/// Run with surgery until the graph is a single point.
pub fn flow_with_surgery_to_point(g: &WeightedGraph, cfg: &FlowConfig) -> Result<FlowTrace> {
    let cfg = FlowConfig {
        surgery_enabled: true,
        t_end: TimeLimit::UntilCollapse,
        ..cfg.clone()
    };
    flow(g, &cfg)
}

/// `dω_e/dt = Σ_f (∂ω_e/∂ℓ_f)(−K_f)` for every edge, in edge order.
pub fn resistance_time_derivatives(g: &WeightedGraph) -> Result<Vec<f64>> {
    let profile = ResistanceProfile::new(g)?;
    let k = crate::curvature::CurvatureReport::from_profile(&profile).curvatures();
    Ok((0..g.edge_count())
        .map(|i| {
            let (a, b) = g.endpoints(i);
            if a == b {
                return 0.0;
            }
            profile
                .gradient_by_index(a, b)
                .iter()
                .zip(&k)
                .map(|(d, kf)| -d * kf)
                .sum()
        })
        .collect())
}

/// `dK_e/dt = −(ω_e/ℓ_e²) K_e − (1/ℓ_e) dω_e/dt` along the flow; zero on
/// loops and bridges, whose curvature does not depend on lengths.
pub fn curvature_time_derivative(g: &WeightedGraph, e: &EdgeId) -> Result<f64> {
    let idx = g.edge_index(e)?;
    let rec = &g.edges()[idx];
    if rec.is_loop() || g.bridges()[idx] {
        return Ok(0.0);
    }
    let profile = ResistanceProfile::new(g)?;
    let k = crate::curvature::CurvatureReport::from_profile(&profile).curvatures();
    let (a, b) = g.endpoints(idx);
    let omega = profile.omega_by_index(a, b);
    let d_omega: f64 = profile
        .gradient_by_index(a, b)
        .iter()
        .zip(&k)
        .map(|(d, kf)| -d * kf)
        .sum();
    let len = rec.length;
    Ok(-(omega / (len * len)) * k[idx] - d_omega / len)
}
