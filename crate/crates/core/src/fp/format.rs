use std::fmt;
use std::str::FromStr;

use crate::error::SortError;

/// Largest exponent width accepted for a floating-point sort.
pub const MAX_EXPONENT_BITS: u32 = 30;
/// Largest significand width (hidden bit included) accepted for a floating-point sort.
pub const MAX_SIGNIFICAND_BITS: u32 = 120;

/// Exponent bias of an IEEE-754 style format with `ebits` exponent bits: `2^(ebits-1) - 1`.
pub fn bias(ebits: u32) -> i64 {
    (1i64 << (ebits - 1)) - 1
}

/// An `(e, s)` floating-point format. `sbits` counts the hidden bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpFormat {
    ebits: u32,
    sbits: u32,
}

impl FpFormat {
    pub const FLOAT16: FpFormat = FpFormat { ebits: 5, sbits: 11 };
    pub const FLOAT32: FpFormat = FpFormat { ebits: 8, sbits: 24 };
    pub const FLOAT64: FpFormat = FpFormat { ebits: 11, sbits: 53 };
    pub const FLOAT128: FpFormat = FpFormat { ebits: 15, sbits: 113 };

    pub fn new(ebits: u32, sbits: u32) -> Result<Self, SortError> {
        if !(2..=MAX_EXPONENT_BITS).contains(&ebits) || !(2..=MAX_SIGNIFICAND_BITS).contains(&sbits) {
            return Err(SortError::InvalidFloatFormat { ebits, sbits });
        }
        Ok(FpFormat { ebits, sbits })
    }

    pub fn ebits(self) -> u32 {
        self.ebits
    }

    pub fn sbits(self) -> u32 {
        self.sbits
    }

    /// Width of the stored significand field.
    pub fn stored_sbits(self) -> u32 {
        self.sbits - 1
    }

    /// Total number of bits in a packed literal of this format.
    pub fn width(self) -> u32 {
        1 + self.ebits + self.sbits - 1
    }

    pub fn bias(self) -> i64 {
        bias(self.ebits)
    }

    /// Largest unbiased exponent of a finite value.
    pub fn emax(self) -> i64 {
        self.bias()
    }

    /// Smallest unbiased exponent of a normal value.
    pub fn emin(self) -> i64 {
        1 - self.bias()
    }

    /// All-ones exponent field, reserved for infinities and NaN.
    pub fn exponent_mask(self) -> u64 {
        (1u64 << self.ebits) - 1
    }

    pub fn significand_mask(self) -> u128 {
        (1u128 << (self.sbits - 1)) - 1
    }

    /// Pointwise maximum of two formats.
    pub fn max(self, other: FpFormat) -> FpFormat {
        FpFormat { ebits: self.ebits.max(other.ebits), sbits: self.sbits.max(other.sbits) }
    }

    /// Pointwise `<=`.
    pub fn fits_in(self, other: FpFormat) -> bool {
        self.ebits <= other.ebits && self.sbits <= other.sbits
    }
}

impl fmt::Display for FpFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(_ FloatingPoint {} {})", self.ebits, self.sbits)
    }
}

/// IEEE-754 rounding-direction attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum RoundingMode {
    /// Round to nearest, ties to even.
    #[default]
    Rne,
    /// Round to nearest, ties away from zero.
    Rna,
    /// Round toward positive infinity.
    Rtp,
    /// Round toward negative infinity.
    Rtn,
    /// Round toward zero.
    Rtz,
}

impl RoundingMode {
    pub const ALL: [RoundingMode; 5] =
        [RoundingMode::Rne, RoundingMode::Rna, RoundingMode::Rtp, RoundingMode::Rtn, RoundingMode::Rtz];

    /// Accepts both the short (`RNE`) and long (`roundNearestTiesToEven`) SMT-LIB spellings.
    pub fn from_smtlib(name: &str) -> Option<Self> {
        Some(match name {
            "RNE" | "roundNearestTiesToEven" => RoundingMode::Rne,
            "RNA" | "roundNearestTiesToAway" => RoundingMode::Rna,
            "RTP" | "roundTowardPositive" => RoundingMode::Rtp,
            "RTN" | "roundTowardNegative" => RoundingMode::Rtn,
            "RTZ" | "roundTowardZero" => RoundingMode::Rtz,
            _ => return None,
        })
    }

    pub fn smtlib_name(self) -> &'static str {
        match self {
            RoundingMode::Rne => "RNE",
            RoundingMode::Rna => "RNA",
            RoundingMode::Rtp => "RTP",
            RoundingMode::Rtn => "RTN",
            RoundingMode::Rtz => "RTZ",
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.smtlib_name())
    }
}

impl FromStr for RoundingMode {
    type Err = SortError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RoundingMode::from_smtlib(s).ok_or_else(|| SortError::UnknownRoundingMode(s.to_string()))
    }
}
