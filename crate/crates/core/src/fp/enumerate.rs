use super::format::FpFormat;
use super::literal::FpLiteral;
use crate::error::FpError;

/// Default cap on the number of bit patterns [`enumerate_sort`] will produce.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 16;

/// Every bit pattern of `format` exactly once, in increasing packed-bit order.
/// Fails with [`FpError::SortTooLarge`] when `2^(e+s)` exceeds `bound`.
pub fn enumerate_sort(format: FpFormat, bound: u64) -> Result<impl Iterator<Item = FpLiteral>, FpError> {
    let width = format.width();
    if width >= 64 || (1u64 << width) > bound {
        return Err(FpError::SortTooLarge { format, bound });
    }
    Ok((0..(1u128 << width)).map(move |bits| FpLiteral::from_packed(format, bits).expect("bits within width")))
}
