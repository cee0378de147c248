use std::fmt;

use crate::error::SortError;
use crate::fp::FpFormat;

/// Widest bit-vector sort the evaluator handles.
pub const MAX_BITVEC_WIDTH: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    RoundingMode,
    Float(FpFormat),
    BitVec(u32),
    Real,
}

impl Sort {
    pub fn float(ebits: u32, sbits: u32) -> Result<Sort, SortError> {
        FpFormat::new(ebits, sbits).map(Sort::Float)
    }

    pub fn bitvec(width: u32) -> Result<Sort, SortError> {
        if width == 0 || width > MAX_BITVEC_WIDTH {
            return Err(SortError::InvalidBitVecWidth(width));
        }
        Ok(Sort::BitVec(width))
    }

    pub fn as_float(self) -> Option<FpFormat> {
        match self {
            Sort::Float(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_float(self) -> bool {
        matches!(self, Sort::Float(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::RoundingMode => f.write_str("RoundingMode"),
            Sort::Float(format) => write!(f, "{format}"),
            Sort::BitVec(w) => write!(f, "(_ BitVec {w})"),
            Sort::Real => f.write_str("Real"),
        }
    }
}
