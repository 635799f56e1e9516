//! One line per acceptance criterion, at full scale.  Run with
//! `cargo test -p cylklrw-cli --test acceptance -- --nocapture` to see them.

use cylklrw_cli::acceptance::{run_all, summary_lines, Scale, LIMITS, TITLES};
use cylklrw_cli::report::Status;

#[test]
fn acceptance_criteria() {
    let report = run_all(Scale::Full, true);
    assert_eq!(report.checks.len(), TITLES.len());
    for line in summary_lines(&report) {
        println!("{line}");
    }
    for (c, limit) in report.checks.iter().zip(LIMITS) {
        if let Some(limit) = limit {
            assert!(c.seconds < limit, "{}: {:.2} s over {limit} s", c.name, c.seconds);
        }
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| c.status != Status::Pass).map(|c| c.name.as_str()).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
