use serde::{Deserialize, Serialize};

/// One numerical check: `lhs` against `rhs` within `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seeds: Vec<u64>,
    pub trials: usize,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            ..Self::default()
        }
    }

    /// Records `|lhs - rhs| <= tolerance`.
    pub fn equal(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        let residual = (lhs - rhs).abs();
        self.push(name.into(), lhs, rhs, residual, tolerance)
    }

    /// Records `lhs <= rhs + tolerance`; the residual is the excess, if any.
    pub fn at_most(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        let residual = (lhs - rhs).max(0.0);
        self.push(name.into(), lhs, rhs, residual, tolerance)
    }

    /// Records `lhs >= rhs - tolerance`.
    pub fn at_least(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        let residual = (rhs - lhs).max(0.0);
        self.push(name.into(), lhs, rhs, residual, tolerance)
    }

    /// Records `lhs < rhs` strictly (no tolerance).
    pub fn below(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        let pass = lhs < rhs;
        let residual = if pass { 0.0 } else { lhs - rhs };
        self.records.push(CheckRecord {
            name: name.into(),
            lhs,
            rhs,
            residual,
            tolerance: 0.0,
            pass,
        });
        pass
    }

    /// A yes/no condition, stored as `lhs = 1` or `0` against `rhs = 1`.
    pub fn flag(&mut self, name: impl Into<String>, ok: bool) -> bool {
        let v = if ok { 1.0 } else { 0.0 };
        self.push(name.into(), v, 1.0, 1.0 - v, 0.0)
    }

    fn push(&mut self, name: String, lhs: f64, rhs: f64, residual: f64, tolerance: f64) -> bool {
        let pass = residual.is_finite() && residual <= tolerance;
        self.records.push(CheckRecord {
            name,
            lhs,
            rhs,
            residual,
            tolerance,
            pass,
        });
        pass
    }

    pub fn extend(&mut self, other: VerificationReport) {
        let prefix = other.suite;
        self.records.extend(other.records.into_iter().map(|mut r| {
            r.name = format!("{prefix}/{}", r.name);
            r
        }));
        for s in other.seeds {
            if !self.seeds.contains(&s) {
                self.seeds.push(s);
            }
        }
        self.trials += other.trials;
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_kinds() {
        let mut r = VerificationReport::new("t");
        assert!(r.equal("eq", 1.0, 1.0 + 1e-12, 1e-10));
        assert!(!r.equal("neq", 1.0, 2.0, 1e-10));
        assert!(r.at_most("le", 1.0, 1.0, 0.0));
        assert!(!r.at_least("ge", 0.0, 1.0, 0.5));
        assert!(r.below("lt", -1.0, 0.0));
        assert!(!r.below("lt0", 0.0, 0.0));
        assert!(!r.equal("nan", f64::NAN, 0.0, 1.0));
        assert!(r.flag("ok", true));
        assert_eq!(r.failures().count(), 4);
        assert!(!r.passed());
    }

    #[test]
    fn extend_prefixes_names() {
        let mut a = VerificationReport::new("all");
        let mut b = VerificationReport::new("sub");
        b.seeds.push(3);
        b.trials = 2;
        b.flag("x", true);
        a.extend(b);
        assert_eq!(a.records[0].name, "sub/x");
        assert_eq!(a.seeds, vec![3]);
        assert_eq!(a.trials, 2);
        assert!(a.passed());
    }
}
