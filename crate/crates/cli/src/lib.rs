//! Pieces of the `approxsmt` command line that are worth testing on their
//! own: backend lookup, precision specs, and benchmark records.

pub mod record;
pub mod registry;

use anyhow::{bail, Context, Result};
use approxsmt::{Approximation, FixedPoint, Precision, PrecisionMap, RealArithmetic, ReducedPrecision};
use approxsmt::{Formula, PrecisionOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ApproxKind {
    Rpfp,
    Bv,
    Ra,
    None,
}

impl ApproxKind {
    pub fn approximation(self) -> Option<&'static dyn Approximation> {
        match self {
            ApproxKind::Rpfp => Some(&ReducedPrecision),
            ApproxKind::Bv => Some(&FixedPoint),
            ApproxKind::Ra => Some(&RealArithmetic),
            ApproxKind::None => None,
        }
    }
}

/// Parses a precision spec: an integer for scalar orders, `i,f` for pairs,
/// `bot` or `top` for the binary order.
pub fn parse_precision(spec: &str, order: PrecisionOrder) -> Result<Precision> {
    let spec = spec.trim();
    let p = match order {
        PrecisionOrder::Scalar { .. } => Precision::Scalar(spec.parse().with_context(|| format!("bad precision `{spec}`"))?),
        PrecisionOrder::Pair { .. } => {
            let (i, f) = spec.split_once(',').with_context(|| format!("expected `i,f`, found `{spec}`"))?;
            Precision::Pair(
                i.trim().parse().with_context(|| format!("bad integral width `{i}`"))?,
                f.trim().parse().with_context(|| format!("bad fractional width `{f}`"))?,
            )
        }
        PrecisionOrder::Binary => match spec {
            "bot" => Precision::Bottom,
            "top" => Precision::Top,
            _ => bail!("expected `bot` or `top`, found `{spec}`"),
        },
    };
    if !order.contains(p) {
        bail!("precision {p} is outside the order's range");
    }
    Ok(p)
}

/// The precision map giving every node of `formula` the precision `p`.
pub fn uniform_map(approx: &dyn Approximation, formula: &Formula, p: Precision) -> PrecisionMap {
    approx.initial_precision(formula).map(|_| p)
}
