//! Rounding of exact binary-scaled rationals to a floating-point format.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::format::{FpFormat, RoundingMode};
use super::literal::FpLiteral;

/// Exact value `(-1)^negative * mag * 2^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Dyadic {
    pub negative: bool,
    pub mag: BigUint,
    pub exp: i64,
}

impl Dyadic {
    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    /// Exact sum. A zero result carries a positive sign; callers apply the
    /// IEEE signed-zero rules themselves.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mag << (self.exp - exp) as usize;
        let b = &other.mag << (other.exp - exp) as usize;
        if self.negative == other.negative {
            return Dyadic { negative: self.negative, mag: a + b, exp };
        }
        match a.cmp(&b) {
            Ordering::Equal => Dyadic { negative: false, mag: BigUint::zero(), exp: 0 },
            Ordering::Greater => Dyadic { negative: self.negative, mag: a - b, exp },
            Ordering::Less => Dyadic { negative: other.negative, mag: b - a, exp },
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { negative: self.negative != other.negative, mag: &self.mag * &other.mag, exp: self.exp + other.exp }
    }
}

/// Position of the most significant bit of `num / den`: the unique `e` with
/// `2^e <= num/den < 2^(e+1)`. Both arguments must be positive.
fn floor_log2(num: &BigUint, den: &BigUint) -> i64 {
    let mut e = num.bits() as i64 - den.bits() as i64;
    let below = if e >= 0 { *num < (den << e as usize) } else { (num << (-e) as usize) < *den };
    if below {
        e -= 1;
    }
    e
}

/// Rounds the nonzero value `(-1)^negative * num/den * 2^exp2` into `format`.
pub(crate) fn round_exact(
    negative: bool,
    num: &BigUint,
    den: &BigUint,
    exp2: i64,
    format: FpFormat,
    rm: RoundingMode,
) -> FpLiteral {
    debug_assert!(!num.is_zero() && !den.is_zero());
    let precision = format.sbits() as i64;
    let top = floor_log2(num, den) + exp2;
    // exponent of the unit in the last place of the result
    let mut quantum = top.max(format.emin()) - (precision - 1);

    let shift = exp2 - quantum;
    let (scaled_num, scaled_den) = if shift >= 0 {
        (num << shift as usize, den.clone())
    } else {
        (num.clone(), den << (-shift) as usize)
    };
    let (mut m, r) = scaled_num.div_rem(&scaled_den);

    let round_up = if r.is_zero() {
        false
    } else {
        let half = (&r << 1usize).cmp(&scaled_den);
        match rm {
            RoundingMode::Rne => half == Ordering::Greater || (half == Ordering::Equal && m.is_odd()),
            RoundingMode::Rna => half != Ordering::Less,
            RoundingMode::Rtp => !negative,
            RoundingMode::Rtn => negative,
            RoundingMode::Rtz => false,
        }
    };
    if round_up {
        m += 1u32;
    }
    let hidden = BigUint::one() << (precision - 1) as usize;
    if m == (&hidden << 1usize) {
        m = hidden.clone();
        quantum += 1;
    }

    if m.is_zero() {
        return FpLiteral::zero(format, negative);
    }
    if m < hidden {
        let significand = m.to_u128().expect("significand fits");
        return FpLiteral::from_fields(format, negative, 0, significand).expect("subnormal fields in range");
    }
    let unbiased = quantum + precision - 1;
    if unbiased > format.emax() {
        return overflow(format, negative, rm);
    }
    let significand = (m - hidden).to_u128().expect("significand fits");
    FpLiteral::from_fields(format, negative, (unbiased + format.bias()) as u64, significand)
        .expect("normal fields in range")
}

fn overflow(format: FpFormat, negative: bool, rm: RoundingMode) -> FpLiteral {
    let to_infinity = match rm {
        RoundingMode::Rne | RoundingMode::Rna => true,
        RoundingMode::Rtz => false,
        RoundingMode::Rtp => !negative,
        RoundingMode::Rtn => negative,
    };
    if to_infinity {
        FpLiteral::infinity(format, negative)
    } else {
        FpLiteral::max_finite(format, negative)
    }
}

/// Rounds an exact dyadic value; zero maps to a zero of sign `zero_negative`.
pub(crate) fn round_dyadic(value: &Dyadic, zero_negative: bool, format: FpFormat, rm: RoundingMode) -> FpLiteral {
    if value.is_zero() {
        return FpLiteral::zero(format, zero_negative);
    }
    round_exact(value.negative, &value.mag, &BigUint::one(), value.exp, format, rm)
}
