use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bv::BitVecValue;
use crate::fp::{FpLiteral, RoundingMode};
use crate::sort::Sort;

/// A constant of one of the supported sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Rm(RoundingMode),
    Fp(FpLiteral),
    Bv(BitVecValue),
    Real(BigRational),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Rm(_) => Sort::RoundingMode,
            Value::Fp(v) => Sort::Float(v.format()),
            Value::Bv(v) => Sort::BitVec(v.width()),
            Value::Real(_) => Sort::Real,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_rm(&self) -> Option<RoundingMode> {
        match self {
            Value::Rm(rm) => Some(*rm),
            _ => None,
        }
    }

    pub fn as_fp(&self) -> Option<&FpLiteral> {
        match self {
            Value::Fp(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bv(&self) -> Option<BitVecValue> {
        match self {
            Value::Bv(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&BigRational> {
        match self {
            Value::Real(q) => Some(q),
            _ => None,
        }
    }

    /// Equality as the SMT-LIB `=` sees it: floating-point values compare by
    /// bit pattern, so `+0 != -0` and every NaN equals every other NaN.
    pub fn smt_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Fp(a), Value::Fp(b)) => a.smt_eq(b),
            _ => self == other,
        }
    }
}

/// Writes `q` as an SMT-LIB real term: `2.0`, `(- 4.0)`, `(/ 1.0 3.0)`.
pub fn write_real(f: &mut impl fmt::Write, q: &BigRational) -> fmt::Result {
    let negative = q.is_negative();
    if negative {
        f.write_str("(- ")?;
    }
    let numer: BigInt = q.numer().abs();
    if q.denom() == &BigInt::from(1) {
        write!(f, "{numer}.0")?;
    } else {
        write!(f, "(/ {numer}.0 {}.0)", q.denom())?;
    }
    if negative {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Rm(rm) => write!(f, "{rm}"),
            Value::Fp(v) => write!(f, "{v}"),
            Value::Bv(v) => write!(f, "{v}"),
            Value::Real(q) if q.is_zero() => f.write_str("0.0"),
            Value::Real(q) => write_real(f, q),
        }
    }
}
