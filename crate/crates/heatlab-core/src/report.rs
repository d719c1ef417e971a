//! Shared output conventions: every float that leaves the library goes
//! through `fmt_f64` so CSV and JSON artifacts are reproducible to the bit.

use serde::{Deserialize, Serialize};

/// 17 significant digits, enough to round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Outcome of one named check. `pass` is always `max_residual <= tolerance`
/// (or the check-specific analogue); `vacuous` flags checks whose
/// hypotheses never triggered, which count as passes but are reported so a
/// silent loss of coverage is visible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub vacuous_cases: usize,
    pub detail: String,
}

impl CheckOutcome {
    pub fn from_residual(name: &str, max_residual: f64, tolerance: f64, cases: usize) -> Self {
        CheckOutcome {
            name: name.to_string(),
            pass: max_residual <= tolerance,
            max_residual,
            tolerance,
            cases,
            vacuous_cases: 0,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }

    pub fn summary_line(&self) -> String {
        let status = if !self.pass {
            "FAIL"
        } else if self.vacuous_cases == self.cases && self.cases > 0 {
            "PASS (vacuous)"
        } else {
            "PASS"
        };
        format!(
            "{status} {} residual {:.3e} tol {:.3e} cases {}{}",
            self.name,
            self.max_residual,
            self.tolerance,
            self.cases,
            if self.vacuous_cases > 0 {
                format!(" (vacuous {})", self.vacuous_cases)
            } else {
                String::new()
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips_exactly() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 1e-300, -random_ish()] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    fn random_ish() -> f64 {
        0.123456789012345678e-5
    }

    #[test]
    fn outcome_pass_is_residual_comparison() {
        let c = CheckOutcome::from_residual("x", 1e-9, 1e-8, 3);
        assert!(c.pass);
        let c = CheckOutcome::from_residual("x", 2e-8, 1e-8, 3);
        assert!(!c.pass);
    }
}
