//! Runs every acceptance criterion in order and prints one status line each.
//!
//! Two criteria contain checks that cannot hold and stay red:
//! - criterion 7 asks for right idealisers of dimension n, but the right
//!   idealiser of C_ψ is a copy of GF(q²) (confirmed by brute force at q = 3);
//! - criterion 10 asks for (ψ^(1), ψ^(3)) at q = 3, t = 4 to be inequivalent,
//!   but an explicit certificate exists and is verified point by point.
//!
//! Each red check must fail for exactly that reason; everything else must pass.

use scattered_core::acceptance::{run, Grid};

// (criterion, check label, substring the failure detail must contain)
const KNOWN_RED: &[(u8, &str, &str)] = &[
    (7, "q=5,t=3 Right", "dim 2 (n = 6)"),
    (7, "q=3,t=4 Right", "dim 2 (n = 8)"),
    (10, "psi1!~psi3", "verified true"),
];

#[test]
fn acceptance_suite() {
    let results = run(&[], &Grid::default()).expect("valid grid");
    println!();
    for r in &results {
        println!("{}", r.report());
    }
    let mut unexpected = Vec::new();
    for r in &results {
        if r.elapsed_secs > r.limit_secs {
            unexpected.push(format!("criterion {} over time", r.id));
        }
        for c in r.failed_checks() {
            if !KNOWN_RED.iter().any(|&(id, label, _)| id == r.id && label == c.label) {
                unexpected.push(format!("criterion {}: {}: {}", r.id, c.label, c.detail));
            }
        }
    }
    for &(id, label, reason) in KNOWN_RED {
        let r = results.iter().find(|r| r.id == id).unwrap();
        let c = r.checks.iter().find(|c| c.label == label).unwrap();
        assert!(!c.passed && c.detail.contains(reason), "{id} {label}: {}", c.detail);
    }
    assert!(unexpected.is_empty(), "{unexpected:#?}");
}
