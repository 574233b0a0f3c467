//! Full validation suite as an integration test: one line per criterion,
//! every tolerance pinned at its specified value (tolerance scale 1.0).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use spinboson::suite::{run_all, SuiteOptions};

#[test]
fn acceptance_suite_passes_at_specified_tolerances() {
    let opts = SuiteOptions::default();
    let outcomes = run_all(&opts);
    assert_eq!(outcomes.len(), 10);

    let mut all_passed = true;
    for o in &outcomes {
        println!(
            "{} criterion {:>2}: {} [{:.2}s] {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.seconds,
            o.detail
        );
        all_passed &= o.passed;
    }

    // stated runtime budgets
    let budget = |id: u32| -> Option<f64> {
        match id {
            1 => Some(30.0),
            2 => Some(60.0),
            10 => Some(300.0),
            _ => None,
        }
    };
    for o in &outcomes {
        if let Some(limit) = budget(o.id) {
            assert!(
                o.seconds < limit,
                "criterion {} took {:.1}s, budget {limit}s",
                o.id,
                o.seconds
            );
        }
    }

    assert!(all_passed, "validation suite reported failures");
}
