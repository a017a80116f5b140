use pft_core::verify::run_suite;
use pft_core::ExecMode;

#[test]
fn suite_passes_and_is_reproducible() {
    let a = run_suite(ExecMode::Parallel).unwrap();
    for o in &a.outcomes {
        println!(
            "{:>2} {:<24} {} measured={:e} {} {:e}",
            o.id,
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.measured,
            o.relation.symbol(),
            o.threshold
        );
    }
    assert_eq!(a.outcomes.len(), 12);
    assert!(a.all_passed());
    let b = run_suite(ExecMode::Sequential).unwrap();
    assert_eq!(a.outcomes, b.outcomes);
    assert_eq!(a.extras, b.extras);
}
