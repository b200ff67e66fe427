//! Nonnegative certificate quantities stored as natural logarithms, so that
//! factors at the `exp(52 d^5)` scale never materialize as floats.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogBound {
    pub log_value: f64,
}

impl LogBound {
    pub const ZERO: LogBound = LogBound {
        log_value: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> LogBound {
        assert!(v >= 0.0, "LogBound holds nonnegative quantities");
        LogBound { log_value: v.ln() }
    }

    pub fn from_log(log_value: f64) -> LogBound {
        LogBound { log_value }
    }

    /// The represented value, possibly overflowing to `inf`.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn mul(&self, other: LogBound) -> LogBound {
        LogBound {
            log_value: self.log_value + other.log_value,
        }
    }

    pub fn div(&self, other: LogBound) -> LogBound {
        LogBound {
            log_value: self.log_value - other.log_value,
        }
    }

    pub fn powf(&self, e: f64) -> LogBound {
        LogBound {
            log_value: e * self.log_value,
        }
    }

    /// Sum in value space via log-sum-exp.
    pub fn add(&self, other: LogBound) -> LogBound {
        let (a, b) = (self.log_value, other.log_value);
        if a == f64::NEG_INFINITY {
            return other;
        }
        if b == f64::NEG_INFINITY {
            return *self;
        }
        let m = a.max(b);
        LogBound {
            log_value: m + ((a - m).exp() + (b - m).exp()).ln(),
        }
    }

    /// Does `v <= exp(self)` hold? Safe for astronomically large bounds.
    pub fn dominates_value(&self, v: f64) -> bool {
        if v <= 0.0 {
            return true;
        }
        v.ln() <= self.log_value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_arithmetic() {
        let a = LogBound::from_value(3.0);
        let b = LogBound::from_value(4.0);
        assert!((a.mul(b).value() - 12.0).abs() < 1e-12);
        assert!((a.add(b).value() - 7.0).abs() < 1e-12);
        assert!((b.powf(0.5).value() - 2.0).abs() < 1e-12);
        assert!((LogBound::ZERO.add(a).value() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn huge_bounds_do_not_overflow_in_log_space() {
        // exp(52 d^5) at d = 3 is far beyond f64 range.
        let huge = LogBound::from_log(52.0 * 243.0);
        let prod = huge.mul(huge);
        assert!(prod.log_value.is_finite());
        assert!(prod.dominates_value(1e300));
    }
}
