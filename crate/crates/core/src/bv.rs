//! Fixed-width bit-vector values with SMT-LIB `QF_BV` semantics.

use std::fmt;

use crate::sort::MAX_BITVEC_WIDTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVecValue {
    width: u32,
    bits: u128,
}

fn mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

// bit-vector ops take widths into account, unlike the std operator traits
#[allow(clippy::should_implement_trait)]
impl BitVecValue {
    /// Keeps the low `width` bits of `bits`. Panics on a width outside `1..=128`.
    pub fn new(width: u32, bits: u128) -> Self {
        assert!((1..=MAX_BITVEC_WIDTH).contains(&width), "bit-vector width {width} out of range");
        BitVecValue { width, bits: bits & mask(width) }
    }

    /// Two's-complement encoding of `value`, wrapping modulo `2^width`.
    pub fn from_signed(width: u32, value: i128) -> Self {
        BitVecValue::new(width, value as u128)
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn bits(self) -> u128 {
        self.bits
    }

    pub fn msb(self) -> bool {
        (self.bits >> (self.width - 1)) & 1 == 1
    }

    /// Two's-complement reading of the bits.
    pub fn to_signed(self) -> i128 {
        if self.width == 128 {
            return self.bits as i128;
        }
        if self.msb() {
            (self.bits as i128) - (1i128 << self.width)
        } else {
            self.bits as i128
        }
    }

    pub fn signed_min(width: u32) -> Self {
        BitVecValue::new(width, 1u128 << (width - 1))
    }

    pub fn signed_max(width: u32) -> Self {
        BitVecValue::new(width, mask(width - 1))
    }

    fn same_width(self, other: Self) {
        assert_eq!(self.width, other.width, "bit-vector width mismatch");
    }

    pub fn add(self, other: Self) -> Self {
        self.same_width(other);
        BitVecValue::new(self.width, self.bits.wrapping_add(other.bits))
    }

    pub fn sub(self, other: Self) -> Self {
        self.same_width(other);
        BitVecValue::new(self.width, self.bits.wrapping_sub(other.bits))
    }

    pub fn mul(self, other: Self) -> Self {
        self.same_width(other);
        BitVecValue::new(self.width, self.bits.wrapping_mul(other.bits))
    }

    pub fn neg(self) -> Self {
        BitVecValue::new(self.width, self.bits.wrapping_neg())
    }

    /// Unsigned division; division by zero yields all ones.
    pub fn udiv(self, other: Self) -> Self {
        self.same_width(other);
        if other.bits == 0 {
            return BitVecValue::new(self.width, u128::MAX);
        }
        BitVecValue::new(self.width, self.bits / other.bits)
    }

    /// Signed division truncating toward zero, defined through `bvudiv` as in
    /// the SMT-LIB bit-vector logic (so division by zero is total).
    pub fn sdiv(self, other: Self) -> Self {
        match (self.msb(), other.msb()) {
            (false, false) => self.udiv(other),
            (true, false) => self.neg().udiv(other).neg(),
            (false, true) => self.udiv(other.neg()).neg(),
            (true, true) => self.neg().udiv(other.neg()),
        }
    }

    /// Left shift by the unsigned value of `amount`.
    pub fn shl(self, amount: Self) -> Self {
        self.same_width(amount);
        if amount.bits >= self.width as u128 {
            return BitVecValue::new(self.width, 0);
        }
        BitVecValue::new(self.width, self.bits << amount.bits)
    }

    /// Arithmetic right shift by the unsigned value of `amount`.
    pub fn ashr(self, amount: Self) -> Self {
        self.same_width(amount);
        let shift = amount.bits.min(self.width as u128 - 1) as u32;
        let shifted = self.to_signed() >> shift;
        if amount.bits >= self.width as u128 {
            return BitVecValue::from_signed(self.width, if self.msb() { -1 } else { 0 });
        }
        BitVecValue::from_signed(self.width, shifted)
    }

    pub fn sign_extend(self, extra: u32) -> Self {
        BitVecValue::from_signed(self.width + extra, self.to_signed())
    }

    /// Bits `high..=low`.
    pub fn extract(self, high: u32, low: u32) -> Self {
        assert!(low <= high && high < self.width, "extract range out of bounds");
        BitVecValue::new(high - low + 1, self.bits >> low)
    }

    pub fn to_binary_string(self) -> String {
        (0..self.width).rev().map(|i| if (self.bits >> i) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for BitVecValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#b{}", self.to_binary_string())
    }
}

/// Bit-vector function symbols used by the fixed-point encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BvOp {
    Add,
    Sub,
    Mul,
    Sdiv,
    Neg,
    Shl,
    Ashr,
    SignExtend(u32),
    Extract(u32, u32),
}

impl BvOp {
    pub fn arity(self) -> usize {
        match self {
            BvOp::Neg | BvOp::SignExtend(_) | BvOp::Extract(..) => 1,
            _ => 2,
        }
    }

    pub fn smtlib_name(self) -> String {
        match self {
            BvOp::Add => "bvadd".into(),
            BvOp::Sub => "bvsub".into(),
            BvOp::Mul => "bvmul".into(),
            BvOp::Sdiv => "bvsdiv".into(),
            BvOp::Neg => "bvneg".into(),
            BvOp::Shl => "bvshl".into(),
            BvOp::Ashr => "bvashr".into(),
            BvOp::SignExtend(n) => format!("(_ sign_extend {n})"),
            BvOp::Extract(h, l) => format!("(_ extract {h} {l})"),
        }
    }

    pub fn apply(self, args: &[BitVecValue]) -> BitVecValue {
        match self {
            BvOp::Add => args[0].add(args[1]),
            BvOp::Sub => args[0].sub(args[1]),
            BvOp::Mul => args[0].mul(args[1]),
            BvOp::Sdiv => args[0].sdiv(args[1]),
            BvOp::Neg => args[0].neg(),
            BvOp::Shl => args[0].shl(args[1]),
            BvOp::Ashr => args[0].ashr(args[1]),
            BvOp::SignExtend(n) => args[0].sign_extend(n),
            BvOp::Extract(h, l) => args[0].extract(h, l),
        }
    }
}

/// Signed bit-vector comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BvPredicate {
    Sle,
    Slt,
    Sge,
    Sgt,
}

impl BvPredicate {
    pub fn smtlib_name(self) -> &'static str {
        match self {
            BvPredicate::Sle => "bvsle",
            BvPredicate::Slt => "bvslt",
            BvPredicate::Sge => "bvsge",
            BvPredicate::Sgt => "bvsgt",
        }
    }

    pub fn apply(self, a: BitVecValue, b: BitVecValue) -> bool {
        let (a, b) = (a.to_signed(), b.to_signed());
        match self {
            BvPredicate::Sle => a <= b,
            BvPredicate::Slt => a < b,
            BvPredicate::Sge => a >= b,
            BvPredicate::Sgt => a > b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(w: u32, v: i128) -> BitVecValue {
        BitVecValue::from_signed(w, v)
    }

    #[test]
    fn signed_reading() {
        assert_eq!(BitVecValue::new(10, 0b1110000000).to_signed(), -128);
        assert_eq!(BitVecValue::new(10, 0b0000111000).to_signed(), 56);
        assert_eq!(bv(4, -1).to_binary_string(), "1111");
    }

    #[test]
    fn sdiv_matches_truncating_division() {
        for a in -8i128..8 {
            for b in -8i128..8 {
                let q = bv(4, a).sdiv(bv(4, b));
                if b == 0 {
                    // bvudiv by zero is all ones; the sign fix-up follows the dividend
                    let expected = if a < 0 { bv(4, 1) } else { bv(4, -1) };
                    assert_eq!(q, expected, "{a} / 0");
                } else {
                    assert_eq!(q, bv(4, a / b), "{a} / {b}");
                }
            }
        }
    }

    #[test]
    fn shifts() {
        assert_eq!(bv(8, -16).ashr(bv(8, 2)), bv(8, -4));
        assert_eq!(bv(8, -3).ashr(bv(8, 1)), bv(8, -2));
        assert_eq!(bv(8, -3).ashr(bv(8, 100)), bv(8, -1));
        assert_eq!(bv(8, 3).shl(bv(8, 2)), bv(8, 12));
        assert_eq!(bv(8, 3).shl(bv(8, 9)), bv(8, 0));
    }

    #[test]
    fn extend_and_extract() {
        let v = bv(4, -3).sign_extend(4);
        assert_eq!(v, bv(8, -3));
        assert_eq!(v.extract(3, 0), bv(4, -3));
        assert_eq!(BitVecValue::new(8, 0b1011_0110).extract(5, 2), BitVecValue::new(4, 0b1101));
    }

    proptest! {
        #[test]
        fn add_sub_inverse(w in 1u32..=128, a: u128, b: u128) {
            let (x, y) = (BitVecValue::new(w, a), BitVecValue::new(w, b));
            prop_assert_eq!(x.add(y).sub(y), x);
        }

        #[test]
        fn signed_roundtrip(w in 1u32..=64, a: i64) {
            let v = BitVecValue::from_signed(w, a as i128);
            prop_assert_eq!(BitVecValue::from_signed(w, v.to_signed()), v);
        }
    }
}
