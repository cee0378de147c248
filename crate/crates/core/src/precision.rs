//! Precision values, their orders, and maps from labels to precisions.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Scalar(u32),
    /// Integral and fractional bit counts of a fixed-point format.
    Pair(u32, u32),
    Bottom,
    Top,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Scalar(p) => write!(f, "{p}"),
            Precision::Pair(i, frac) => write!(f, "{i},{frac}"),
            Precision::Bottom => f.write_str("bot"),
            Precision::Top => f.write_str("top"),
        }
    }
}

/// A bounded partial order on precisions with a unique top element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionOrder {
    Scalar { min: u32, max: u32 },
    Pair { min: (u32, u32), max: (u32, u32) },
    Binary,
}

impl PrecisionOrder {
    pub fn minimum(self) -> Precision {
        match self {
            PrecisionOrder::Scalar { min, .. } => Precision::Scalar(min),
            PrecisionOrder::Pair { min, .. } => Precision::Pair(min.0, min.1),
            PrecisionOrder::Binary => Precision::Bottom,
        }
    }

    pub fn top(self) -> Precision {
        match self {
            PrecisionOrder::Scalar { max, .. } => Precision::Scalar(max),
            PrecisionOrder::Pair { max, .. } => Precision::Pair(max.0, max.1),
            PrecisionOrder::Binary => Precision::Top,
        }
    }

    pub fn contains(self, p: Precision) -> bool {
        match (self, p) {
            (PrecisionOrder::Scalar { min, max }, Precision::Scalar(v)) => (min..=max).contains(&v),
            (PrecisionOrder::Pair { min, max }, Precision::Pair(i, f)) => {
                (min.0..=max.0).contains(&i) && (min.1..=max.1).contains(&f)
            }
            (PrecisionOrder::Binary, Precision::Bottom | Precision::Top) => true,
            _ => false,
        }
    }

    /// `a <= b`; precisions of different kinds are incomparable.
    pub fn leq(self, a: Precision, b: Precision) -> bool {
        match (a, b) {
            (Precision::Scalar(x), Precision::Scalar(y)) => x <= y,
            (Precision::Pair(xi, xf), Precision::Pair(yi, yf)) => xi <= yi && xf <= yf,
            (Precision::Bottom, Precision::Bottom | Precision::Top) | (Precision::Top, Precision::Top) => true,
            _ => false,
        }
    }

    pub fn is_top(self, p: Precision) -> bool {
        p == self.top()
    }

    /// Clamps `p` into the order's range.
    pub fn cap(self, p: Precision) -> Precision {
        match (self, p) {
            (PrecisionOrder::Scalar { min, max }, Precision::Scalar(v)) => Precision::Scalar(v.clamp(min, max)),
            (PrecisionOrder::Pair { min, max }, Precision::Pair(i, f)) => {
                Precision::Pair(i.clamp(min.0, max.0), f.clamp(min.1, max.1))
            }
            _ => p,
        }
    }
}

/// Precision of every node of a formula, either one shared value or one
/// value per label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrecisionMap {
    Uniform(Precision),
    PerLabel(BTreeMap<Label, Precision>),
}

impl PrecisionMap {
    /// Every label at the order's minimum.
    pub fn initial<'a>(order: PrecisionOrder, labels: impl IntoIterator<Item = &'a Label>, uniform: bool) -> Self {
        if uniform {
            PrecisionMap::Uniform(order.minimum())
        } else {
            PrecisionMap::PerLabel(labels.into_iter().map(|l| (l.clone(), order.minimum())).collect())
        }
    }

    /// Precision at `label`. Labels outside a per-label map have no entry.
    pub fn get(&self, label: &Label) -> Option<Precision> {
        match self {
            PrecisionMap::Uniform(p) => Some(*p),
            PrecisionMap::PerLabel(map) => map.get(label).copied(),
        }
    }

    pub fn values(&self) -> Box<dyn Iterator<Item = Precision> + '_> {
        match self {
            PrecisionMap::Uniform(p) => Box::new(std::iter::once(*p)),
            PrecisionMap::PerLabel(map) => Box::new(map.values().copied()),
        }
    }

    pub fn is_all_top(&self, order: PrecisionOrder) -> bool {
        self.values().all(|p| order.is_top(p))
    }

    /// Pointwise `self <= other`. Maps of different shapes compare through
    /// their values.
    pub fn leq(&self, other: &PrecisionMap, order: PrecisionOrder) -> bool {
        match (self, other) {
            (PrecisionMap::Uniform(a), PrecisionMap::Uniform(b)) => order.leq(*a, *b),
            (PrecisionMap::PerLabel(a), PrecisionMap::PerLabel(b)) => {
                a.len() == b.len() && a.iter().all(|(l, p)| b.get(l).is_some_and(|q| order.leq(*p, *q)))
            }
            (PrecisionMap::Uniform(a), PrecisionMap::PerLabel(b)) => b.values().all(|q| order.leq(*a, *q)),
            (PrecisionMap::PerLabel(a), PrecisionMap::Uniform(b)) => a.values().all(|p| order.leq(*p, *b)),
        }
    }

    /// Applies `f` to every value.
    pub fn map(&self, mut f: impl FnMut(Precision) -> Precision) -> PrecisionMap {
        match self {
            PrecisionMap::Uniform(p) => PrecisionMap::Uniform(f(*p)),
            PrecisionMap::PerLabel(map) => PrecisionMap::PerLabel(map.iter().map(|(l, p)| (l.clone(), f(*p))).collect()),
        }
    }

    /// Largest value in the map under a total order on scalars and pairs.
    pub fn max_value(&self) -> Option<Precision> {
        self.values().max_by_key(|p| match p {
            Precision::Scalar(v) => (*v, 0),
            Precision::Pair(i, f) => (*i, *f),
            Precision::Bottom => (0, 0),
            Precision::Top => (1, 0),
        })
    }
}

impl fmt::Display for PrecisionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecisionMap::Uniform(p) => write!(f, "{p}"),
            PrecisionMap::PerLabel(map) => {
                f.write_str("{")?;
                for (i, (l, p)) in map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}: {p}")?;
                }
                f.write_str("}")
            }
        }
    }
}
