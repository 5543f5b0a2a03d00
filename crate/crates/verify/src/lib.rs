//! Acceptance suite for the `anseroid` model.
//!
//! Every check compares the model against something it does not share code
//! with: quadrature, brute-force search, finite differences, or a property the
//! closed-loop system must exhibit. Checks are grouped by module so a single
//! area can be run with a filter (`wake`, `drag`, ... or a check id like `c5`).

use std::fmt::Write as _;
use std::time::Instant;

pub mod criteria;
pub mod oracle;
pub mod properties;
pub mod scenarios;

/// Result of one check.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Self::new(false, detail)
    }
}

/// A registered check.
pub struct Check {
    pub id: &'static str,
    pub module: &'static str,
    pub title: &'static str,
    /// Numbered acceptance criterion rather than a supporting property.
    pub criterion: bool,
    pub run: fn(u64) -> Verdict,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: &'static str,
    pub module: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// All checks in execution order.
pub fn checks() -> Vec<Check> {
    let mut all = criteria::checks();
    all.extend(properties::checks());
    all
}

/// Does `filter` select this check? Matches the id, the module, or
/// `acceptance` for the numbered criteria.
pub fn selects(filter: Option<&str>, c: &Check) -> bool {
    match filter {
        None => true,
        Some(f) => {
            let f = f.trim().to_ascii_lowercase();
            f == c.id || f == c.module || (f == "acceptance" && c.criterion)
        }
    }
}

/// Run one check. A panic inside the check is reported as a failure.
pub fn run_check(c: &Check, seed: u64) -> Outcome {
    let t0 = Instant::now();
    let v = std::panic::catch_unwind(|| (c.run)(seed)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Verdict::fail(format!("panicked: {msg}"))
    });
    Outcome {
        id: c.id,
        module: c.module,
        title: c.title,
        passed: v.passed,
        detail: v.detail,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

/// Run every selected check, sequentially so wall-clock budgets are honest.
pub fn run_suite(filter: Option<&str>, seed: u64) -> Vec<Outcome> {
    run_suite_with(filter, seed, |_| {})
}

/// Like [`run_suite`], reporting each outcome as soon as it is known.
pub fn run_suite_with(filter: Option<&str>, seed: u64, mut each: impl FnMut(&Outcome)) -> Vec<Outcome> {
    checks()
        .iter()
        .filter(|c| selects(filter, c))
        .map(|c| {
            let o = run_check(c, seed);
            each(&o);
            o
        })
        .collect()
}

/// One line per outcome.
pub fn render_line(o: &Outcome) -> String {
    format!(
        "{:<4} {:<10} {:<4} {:>8.2}s  {}: {}",
        o.id,
        o.module,
        if o.passed { "PASS" } else { "FAIL" },
        o.seconds,
        o.title,
        o.detail
    )
}

pub fn table_header() -> String {
    format!("{:<4} {:<10} {:<4} {:>9}  check", "id", "module", "res", "time")
}

pub fn table_footer(outcomes: &[Outcome]) -> String {
    let passed = outcomes.iter().filter(|o| o.passed).count();
    format!("{passed}/{} passed", outcomes.len())
}

pub fn render_table(outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", table_header());
    for o in outcomes {
        let _ = writeln!(s, "{}", render_line(o));
    }
    let _ = writeln!(s, "{}", table_footer(outcomes));
    s
}
