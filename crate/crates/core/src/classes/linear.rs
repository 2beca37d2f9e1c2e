//! Autoregressive linear threshold generators with exact rational
//! arithmetic, and the latch embedding that freezes a linear verdict into a
//! constant trajectory.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::gen::Generator;
use crate::token::TokenString;

/// Threshold generator f(x) = 1[ sum_{i=1}^{min(d,|x|)} w[-i] x[-i] + b >= 0 ].
///
/// Negative indices count from the end: w[-1] is the last weight and pairs
/// with the last bit of x. Inputs shorter than d use only their |x| last
/// weights. Ties go to 1, and all arithmetic is exact, so behavior at the
/// threshold is reliable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearGen {
    w: Vec<BigRational>,
    b: BigRational,
}

impl LinearGen {
    pub fn new(w: Vec<BigRational>, b: BigRational) -> Self {
        assert!(!w.is_empty(), "weight vector must be nonempty");
        LinearGen { w, b }
    }

    pub fn from_ints(w: &[i64], b: i64) -> Self {
        Self::new(w.iter().map(|&v| rat(v)).collect(), rat(b))
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.w
    }

    pub fn bias(&self) -> &BigRational {
        &self.b
    }

    pub fn eval(&self, x: &TokenString) -> u8 {
        let d = self.w.len();
        let take = d.min(x.len() as usize);
        let mut acc = self.b.clone();
        for i in 1..=take {
            if x.get(x.len() - i as u64).unwrap() == 1 {
                acc += &self.w[d - i];
            }
        }
        u8::from(!acc.is_negative())
    }

    pub fn into_generator(self) -> Generator {
        let id = format!(
            "ltf[{};{}]",
            self.w.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
            self.b
        );
        Generator::new(id, move |x: &TokenString| self.eval(x))
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Embeds the m-dimensional threshold rule (v, c) into an (m+2)-dimensional
/// generator whose trajectory latches onto its first verdict.
///
/// With L and U the min and max of <v,z> + c over z in {0,1}^m, B = max{0,U}+1
/// and A = B - L + 1, the result is f with w = (v, B, 2A), b = c - B. On a
/// prompt z∘"10" the first generated bit equals 1[<v,z>+c >= 0]; afterwards
/// any input ending "1" maps to 1 and any ending "00" maps to 0, so the
/// trajectory is that bit repeated and every horizon's last token agrees.
pub fn latch_embed(v: &[BigRational], c: &BigRational) -> LinearGen {
    assert!(!v.is_empty(), "latch embedding needs at least one coordinate");
    let neg_sum: BigRational = v.iter().filter(|w| w.is_negative()).cloned().sum();
    let pos_sum: BigRational = v.iter().filter(|w| w.is_positive()).cloned().sum();
    let l = c + &neg_sum;
    let u = c + &pos_sum;
    let b_latch = u.max(BigRational::zero()) + rat(1);
    let a = &b_latch - &l + rat(1);
    let mut w = v.to_vec();
    w.push(b_latch.clone());
    w.push(rat(2) * a);
    LinearGen::new(w, c - &b_latch)
}

pub fn latch_embed_ints(v: &[i64], c: i64) -> LinearGen {
    let vr: Vec<BigRational> = v.iter().map(|&x| rat(x)).collect();
    latch_embed(&vr, &rat(c))
}
