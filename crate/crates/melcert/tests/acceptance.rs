//! Runs the full acceptance suite and prints one pass/fail line per
//! criterion; the test fails if any criterion does.

#[test]
fn acceptance_criteria() {
    let results = melcert::verify::run_all();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {:2}: {} — {}", r.id, r.name, r.detail);
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
