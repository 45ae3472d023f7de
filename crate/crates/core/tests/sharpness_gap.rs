//! Two-sided sharpness claim for the log-domain counterexample family:
//! `log a - log b - δ ≤ gap ≤ 0` with `|gap|` strictly decreasing in `l`.
//! The upper side holds; the lower side and the monotonicity do not for the
//! family as defined, so this test fails.

use rte_core::analysis::sharpness_experiment;

const DELTA: f64 = 1e-6;

#[test]
fn gap_within_log_a_over_b_and_decreasing() {
    let records = sharpness_experiment(&[3, 4, 5], 1);
    let detail = records
        .iter()
        .map(|r| format!("l={} gap={:.17e} log a - log b={:.17e}", r.l, r.gap, r.log_a - r.log_b))
        .collect::<Vec<_>>()
        .join("\n");
    for r in &records {
        assert!(r.gap <= 0.0);
    }
    let lower: Vec<_> = records.iter().map(|r| r.lower_holds(DELTA)).collect();
    let decreasing = records.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs());
    assert!(lower.iter().all(|&x| x), "lower bound fails for l = 3, 4, 5: {lower:?}\n{detail}");
    assert!(decreasing, "|gap| is not strictly decreasing\n{detail}");
}
