//! Growth-rate schedules for the taxonomy class. A rate maps a prompt scale
//! s to the number of value bits r(s) revealed at that scale; constructions
//! require it to stay below a quarter of log2(s) on the range they use.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateFunction {
    /// r(s) = value, independent of s. Valid once s >= 2^(4*value).
    Constant { value: u64 },
    /// r(s) = max(1, floor(log2 s) / 4). Valid once s >= 16.
    QuarterLog,
}

impl RateFunction {
    pub fn rate(&self, s: u64) -> u64 {
        match *self {
            RateFunction::Constant { value } => {
                assert!(value >= 1, "rate must be positive");
                value
            }
            RateFunction::QuarterLog => {
                assert!(s >= 1, "rate undefined at s = 0");
                (s.ilog2() as u64 / 4).max(1)
            }
        }
    }

    /// Whether r(s) <= log2(s)/4, checked exactly as 2^(4 r(s)) <= s.
    pub fn sublog_ok(&self, s: u64) -> bool {
        let r = self.rate(s);
        4 * r < 64 && (1u64 << (4 * r)) <= s
    }
}
