//! The alternating-horizons class: members carry a free bit table over the
//! marked prompts u_(m,n) = 0^m 1 0^n 1, read back by generation exactly at
//! even horizon 2m, while every odd horizon of length at least 3 collapses
//! the whole class to one behavior.
//!
//! Member definition, for a bit table alpha:
//!   1. f(u_(m,n))            = alpha_(m,n)
//!   2. f(u_(m,n) b 0^t)      = 0       for t < 2m-2
//!   3. f(u_(m,n) b 0^(2m-2)) = b
//!   4. f(anything else)      = 0
//! The echo in case 3 lands the prompt's answer bit on token 2m, and the
//! padding in case 2 keeps every intermediate token 0.

use serde::{Deserialize, Serialize};

use crate::classes::ClassError;
use crate::gen::Generator;
use crate::token::TokenString;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingParams {
    /// Window rows m in [2, m_max].
    pub m_max: u64,
    /// Window columns n in [0, n_max].
    pub n_max: u64,
    /// Row-major bit table: cell (m, n) at (m-2)*(n_max+1) + n. Cells
    /// outside the window default to 0.
    pub alpha: Vec<u8>,
}

impl AlternatingParams {
    pub fn validate(&self) -> Result<(), ClassError> {
        assert!(self.m_max >= 2, "window needs m_max >= 2");
        let want = ((self.m_max - 1) * (self.n_max + 1)) as usize;
        if self.alpha.len() != want {
            return Err(ClassError::WindowShape { got: self.alpha.len(), want });
        }
        Ok(())
    }

    pub fn alpha(&self, m: u64, n: u64) -> u8 {
        if (2..=self.m_max).contains(&m) && n <= self.n_max {
            self.alpha[((m - 2) * (self.n_max + 1) + n) as usize]
        } else {
            0
        }
    }
}

/// The marked prompt u_(m,n) = 0^m 1 0^n 1.
pub fn u_instance(m: u64, n: u64) -> TokenString {
    assert!(m >= 2, "marked prompts need m >= 2");
    let mut x = TokenString::zeros(m);
    x.push(1);
    x.extend(&TokenString::zeros(n));
    x.push(1);
    x
}

enum Shape {
    Prompt { m: u64, n: u64 },
    /// u_(m,n) b 0^t.
    Tail { m: u64, b: u8, t: u64 },
    Other,
}

fn shape(x: &TokenString) -> Shape {
    let m = x.leading_zeros();
    if m < 2 || m == x.len() {
        return Shape::Other;
    }
    let after_first = x.suffix(x.len() - m - 1);
    let n = after_first.leading_zeros();
    if n == after_first.len() {
        return Shape::Other; // 0^m 1 0^n, no second marker
    }
    let w = after_first.suffix(after_first.len() - n - 1);
    if w.is_empty() {
        return Shape::Prompt { m, n };
    }
    let b = w.get(0).unwrap();
    let rest = w.suffix(w.len() - 1);
    if rest.leading_zeros() != rest.len() {
        return Shape::Other; // a third 1 after the carried bit
    }
    Shape::Tail { m, b, t: rest.len() }
}

/// The member f_alpha for one bit table.
pub fn alternating_member(p: &AlternatingParams) -> Result<Generator, ClassError> {
    p.validate()?;
    let p = p.clone();
    let id = format!(
        "alt[{}x{}:{}]",
        p.m_max - 1,
        p.n_max + 1,
        p.alpha.iter().map(ToString::to_string).collect::<String>()
    );
    Ok(Generator::new(id, move |x: &TokenString| match shape(x) {
        Shape::Prompt { m, n } => p.alpha(m, n),
        Shape::Tail { m, b, t } if t == 2 * m - 2 => b,
        _ => 0,
    }))
}

/// Every member over the window: all 2^cells bit tables, in table order.
pub fn alternating_class(m_max: u64, n_max: u64) -> Vec<Generator> {
    let cells = ((m_max - 1) * (n_max + 1)) as usize;
    assert!(cells <= 16, "window of {cells} cells is too large to enumerate");
    (0..1u32 << cells)
        .map(|bits| {
            let alpha = (0..cells).map(|c| ((bits >> c) & 1) as u8).collect();
            alternating_member(&AlternatingParams { m_max, n_max, alpha })
                .expect("enumerated table has the right shape")
        })
        .collect()
}
