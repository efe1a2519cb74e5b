//! Every trajectory monitor on complete runs, through surgery where enabled.

use ricci_foster::corpus::{random_nonnegative_corpus, DEFAULT_SEED};
use ricci_foster::{fixtures, flow, flow_with_surgery_to_point, monitor_trace, FlowConfig, StopReason};

#[test]
fn nonnegative_traces_pass_all_monitors() {
    for g in std::iter::once(fixtures::house()).chain(random_nonnegative_corpus(DEFAULT_SEED ^ 3, 5)) {
        let trace = flow(&g, &FlowConfig::default()).unwrap();
        assert_eq!(trace.stop_reason, StopReason::Collapse);
        let report = monitor_trace(&trace).unwrap();
        for name in ["nonnegative-curvature", "resistance-decay", "min-ratio-resistance-bound"] {
            assert!(report.check(name).is_some(), "{name} not run");
        }
        assert!(report.passed, "{:#?}", report.failures().collect::<Vec<_>>());
    }
}

#[test]
fn surgery_runs_end_at_total_length() {
    for g in [fixtures::house(), fixtures::barbell(), fixtures::theta(), fixtures::star(&[0.5, 1.0, 2.0])] {
        let trace = flow_with_surgery_to_point(&g, &FlowConfig::default()).unwrap();
        assert_eq!(trace.stop_reason, StopReason::Point);
        assert!((trace.terminal_time - g.total_length()).abs() < 1e-6);
        assert!(trace.samples.windows(2).all(|w| w[0].t < w[1].t));
        let report = monitor_trace(&trace).unwrap();
        assert!(report.passed, "{:#?}", report.failures().collect::<Vec<_>>());
        for ev in &trace.events {
            assert!(ev.contracted_lengths.iter().all(|&l| (0.0..=1e-9).contains(&l)));
        }
    }
}
