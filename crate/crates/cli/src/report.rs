use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Acceptance bound on a measured value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    AtMost { limit: f64 },
    AtLeast { limit: f64 },
    Within { low: f64, high: f64 },
}

impl Bound {
    pub fn admits(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost { limit } => v <= limit,
            Bound::AtLeast { limit } => v >= limit,
            Bound::Within { low, high } => v >= low && v <= high,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost { limit } => write!(f, "<= {limit:e}"),
            Bound::AtLeast { limit } => write!(f, ">= {limit}"),
            Bound::Within { low, high } => write!(f, "in [{low}, {high}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// Name of the identity being checked, or "plumbing".
    pub identity: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
    pub runtime_ms: f64,
}

impl Check {
    pub fn new(id: impl Into<String>, identity: impl Into<String>, value: f64, bound: Bound) -> Self {
        Check { id: id.into(), identity: identity.into(), value, bound, passed: bound.admits(value), runtime_ms: 0.0 }
    }

    pub fn at_most(id: impl Into<String>, identity: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(id, identity, value, Bound::AtMost { limit })
    }

    pub fn within(id: impl Into<String>, identity: impl Into<String>, value: f64, low: f64, high: f64) -> Self {
        Self::new(id, identity, value, Bound::Within { low, high })
    }

    pub fn at_least(id: impl Into<String>, identity: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(id, identity, value, Bound::AtLeast { limit })
    }

    /// A check whose computation itself failed.
    pub fn failed(id: impl Into<String>, identity: impl Into<String>, bound: Bound) -> Self {
        Check { id: id.into(), identity: identity.into(), value: f64::NAN, bound, passed: false, runtime_ms: 0.0 }
    }
}

/// Runs `f` and stamps every check it returns with the elapsed time.
pub fn timed(f: impl FnOnce() -> Vec<Check>) -> Vec<Check> {
    let t = Instant::now();
    let mut checks = f();
    let ms = t.elapsed().as_secs_f64() * 1e3;
    for c in &mut checks {
        c.runtime_ms = ms;
    }
    checks
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub grids: Vec<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub runtime_ms: f64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, grids: &[usize], mut checks: Vec<Check>, runtime_ms: f64) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport { suite: suite.to_string(), seed, grids: grids.to_vec(), checks, passed, runtime_ms }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark}  {:<48} {:<28} {:>12.4e} {}", c.id, c.identity, c.value, c.bound)?;
        }
        let n_fail = self.failures().count();
        write!(
            f,
            "suite {}: {} checks, {} failed, seed {}, {:.0} ms",
            self.suite,
            self.checks.len(),
            n_fail,
            self.seed,
            self.runtime_ms
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        for b in [Bound::AtMost { limit: 1.0 }, Bound::AtLeast { limit: 0.0 }, Bound::Within { low: 0.0, high: 1.0 }] {
            assert!(!b.admits(f64::NAN));
        }
    }

    #[test]
    fn checks_are_sorted_and_verdict_follows_failures() {
        let r = SuiteReport::new(
            "x",
            0,
            &[],
            vec![Check::at_most("b", "plumbing", 2.0, 1.0), Check::at_most("a", "plumbing", 0.0, 1.0)],
            0.0,
        );
        assert_eq!(r.checks[0].id, "a");
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
    }
}
