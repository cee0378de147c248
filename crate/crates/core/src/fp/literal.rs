use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::format::{FpFormat, RoundingMode};
use super::round::{round_exact, Dyadic};
use crate::error::FpError;

/// Exact rational number in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

/// IEEE-754 value classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpClass {
    Zero,
    Subnormal,
    Normal,
    Infinity,
    NaN,
}

/// A floating-point literal: sign bit, biased exponent field, stored significand
/// field (hidden bit implicit) and its format.
///
/// Arithmetic never produces a NaN other than [`FpLiteral::nan`]; other NaN bit
/// patterns only arise from explicit construction (parsing, enumeration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpLiteral {
    format: FpFormat,
    sign: bool,
    exponent: u64,
    significand: u128,
}

impl FpLiteral {
    /// Builds a literal from its three fields.
    pub fn from_fields(format: FpFormat, sign: bool, exponent: u64, significand: u128) -> Result<Self, FpError> {
        if exponent > format.exponent_mask() || significand > format.significand_mask() {
            return Err(FpError::FieldOutOfRange { format });
        }
        Ok(FpLiteral { format, sign, exponent, significand })
    }

    /// Builds a literal from bit lists, most significant bit first, as in
    /// `(fp #b0 #b100 #b00)`.
    pub fn from_bit_lists(format: FpFormat, sign: bool, exponent: &[bool], significand: &[bool]) -> Result<Self, FpError> {
        if exponent.len() != format.ebits() as usize || significand.len() != format.stored_sbits() as usize {
            return Err(FpError::FieldOutOfRange { format });
        }
        let exp = exponent.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        let sig = significand.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128);
        Self::from_fields(format, sign, exp, sig)
    }

    /// Decodes a packed `sign | exponent | significand` bit pattern.
    pub fn from_packed(format: FpFormat, bits: u128) -> Result<Self, FpError> {
        if format.width() > 128 || (format.width() < 128 && bits >> format.width() != 0) {
            return Err(FpError::FieldOutOfRange { format });
        }
        let stored = format.stored_sbits();
        let significand = bits & format.significand_mask();
        let exponent = ((bits >> stored) as u64) & format.exponent_mask();
        let sign = (bits >> (stored + format.ebits())) & 1 == 1;
        Ok(FpLiteral { format, sign, exponent, significand })
    }

    pub fn to_packed(&self) -> u128 {
        let stored = self.format.stored_sbits();
        ((self.sign as u128) << (stored + self.format.ebits())) | ((self.exponent as u128) << stored) | self.significand
    }

    pub fn zero(format: FpFormat, negative: bool) -> Self {
        FpLiteral { format, sign: negative, exponent: 0, significand: 0 }
    }

    pub fn infinity(format: FpFormat, negative: bool) -> Self {
        FpLiteral { format, sign: negative, exponent: format.exponent_mask(), significand: 0 }
    }

    /// The canonical quiet NaN: sign 0, significand MSB set.
    pub fn nan(format: FpFormat) -> Self {
        FpLiteral { format, sign: false, exponent: format.exponent_mask(), significand: 1u128 << (format.sbits() - 2) }
    }

    pub fn max_finite(format: FpFormat, negative: bool) -> Self {
        FpLiteral {
            format,
            sign: negative,
            exponent: format.exponent_mask() - 1,
            significand: format.significand_mask(),
        }
    }

    pub fn format(&self) -> FpFormat {
        self.format
    }

    pub fn sign(&self) -> bool {
        self.sign
    }

    pub fn exponent_field(&self) -> u64 {
        self.exponent
    }

    pub fn significand_field(&self) -> u128 {
        self.significand
    }

    /// Exponent bits, most significant first.
    pub fn exponent_bits(&self) -> Vec<bool> {
        (0..self.format.ebits()).rev().map(|i| (self.exponent >> i) & 1 == 1).collect()
    }

    /// Stored significand bits, most significant first.
    pub fn significand_bits(&self) -> Vec<bool> {
        (0..self.format.stored_sbits()).rev().map(|i| (self.significand >> i) & 1 == 1).collect()
    }

    pub fn class(&self) -> FpClass {
        if self.exponent == 0 {
            if self.significand == 0 {
                FpClass::Zero
            } else {
                FpClass::Subnormal
            }
        } else if self.exponent == self.format.exponent_mask() {
            if self.significand == 0 {
                FpClass::Infinity
            } else {
                FpClass::NaN
            }
        } else {
            FpClass::Normal
        }
    }

    pub fn is_nan(&self) -> bool {
        self.class() == FpClass::NaN
    }

    pub fn is_infinite(&self) -> bool {
        self.class() == FpClass::Infinity
    }

    pub fn is_zero(&self) -> bool {
        self.class() == FpClass::Zero
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.class(), FpClass::Infinity | FpClass::NaN)
    }

    /// True unless this is a NaN with a non-canonical bit pattern.
    pub fn is_canonical(&self) -> bool {
        !self.is_nan() || *self == FpLiteral::nan(self.format)
    }

    /// Maps every NaN pattern onto the canonical NaN.
    pub fn canonical(self) -> Self {
        if self.is_nan() {
            FpLiteral::nan(self.format)
        } else {
            self
        }
    }

    /// Equality in the sense of SMT-LIB `=`: all NaNs are equal, `+0` and `-0` differ.
    pub fn smt_eq(&self, other: &FpLiteral) -> bool {
        self.format == other.format && (self == other || (self.is_nan() && other.is_nan()))
    }

    /// IEEE ordering; `None` when either side is NaN.
    pub fn ieee_cmp(&self, other: &FpLiteral) -> Option<Ordering> {
        if self.is_nan() || other.is_nan() {
            return None;
        }
        if self.is_zero() && other.is_zero() {
            return Some(Ordering::Equal);
        }
        if self.format == other.format {
            let magnitude = (self.exponent, self.significand).cmp(&(other.exponent, other.significand));
            return Some(match (self.sign, other.sign) {
                (false, false) => magnitude,
                (true, true) => magnitude.reverse(),
                (false, true) => Ordering::Greater,
                (true, false) => Ordering::Less,
            });
        }
        let key = |v: &FpLiteral| -> (i8, Option<ExactRational>) {
            match v.class() {
                FpClass::Infinity => (if v.sign { -1 } else { 1 }, None),
                _ => (0, v.to_rational()),
            }
        };
        Some(key(self).cmp(&key(other)))
    }

    /// Exact value of a finite literal, or `None` for infinities and NaN.
    pub fn to_rational(&self) -> Option<ExactRational> {
        let d = self.to_dyadic()?;
        let mag = BigInt::from_biguint(if d.negative { Sign::Minus } else { Sign::Plus }, d.mag);
        Some(if d.exp >= 0 {
            BigRational::from_integer(mag << d.exp as usize)
        } else {
            BigRational::new(mag, BigInt::one() << (-d.exp) as usize)
        })
    }

    /// Nearest representable value of `q` in `format` under `rm`.
    /// Zero maps to `+0`.
    pub fn from_rational(q: &ExactRational, format: FpFormat, rm: RoundingMode) -> Self {
        if q.is_zero() {
            return FpLiteral::zero(format, false);
        }
        let negative = q.is_negative();
        let num = q.numer().magnitude().clone();
        let den = q.denom().magnitude().clone();
        round_exact(negative, &num, &den, 0, format, rm)
    }

    /// Finite literal as `(-1)^sign * mag * 2^exp`; `None` for infinities and NaN.
    pub(crate) fn to_dyadic(self) -> Option<Dyadic> {
        let stored = self.format.stored_sbits() as i64;
        match self.class() {
            FpClass::Infinity | FpClass::NaN => None,
            FpClass::Zero => Some(Dyadic { negative: self.sign, mag: BigUint::zero(), exp: 0 }),
            FpClass::Subnormal => Some(Dyadic {
                negative: self.sign,
                mag: BigUint::from(self.significand),
                exp: self.format.emin() - stored,
            }),
            FpClass::Normal => Some(Dyadic {
                negative: self.sign,
                mag: BigUint::from(self.significand | (1u128 << stored)),
                exp: self.exponent as i64 - self.format.bias() - stored,
            }),
        }
    }

    /// Host `f64` approximation, for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        match self.class() {
            FpClass::NaN => f64::NAN,
            FpClass::Infinity => {
                if self.sign {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            FpClass::Zero => {
                if self.sign {
                    -0.0
                } else {
                    0.0
                }
            }
            _ => {
                let d = self.to_dyadic().expect("finite");
                let m: f64 = d.mag.to_string().parse().unwrap_or(f64::INFINITY);
                let v = m * 2f64.powi(d.exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
                if d.negative {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

impl fmt::Display for FpLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(
            f,
            "(fp #b{} #b{} #b{})",
            self.sign as u8,
            bits(&self.exponent_bits()),
            bits(&self.significand_bits())
        )
    }
}
