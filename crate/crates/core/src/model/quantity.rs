use std::fmt;

use rust_decimal::Decimal;
use thiserror::Error;

use super::Degree;

/// A concrete-domain value: a decimal magnitude tagged with an opaque unit
/// symbol such as `EUR` or `g`. Units are never converted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quantity {
    pub magnitude: Decimal,
    pub unit: String,
}

impl Quantity {
    pub fn new(magnitude: Decimal, unit: impl Into<String>) -> Self {
        Quantity {
            magnitude: magnitude.normalize(),
            unit: unit.into(),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Gt,
    Ge,
    Lt,
    Le,
}

impl Comparator {
    pub fn keyword(self) -> &'static str {
        match self {
            Comparator::Gt => "GT",
            Comparator::Ge => "GE",
            Comparator::Lt => "LT",
            Comparator::Le => "LE",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<Self> {
        Some(match kw {
            "GT" => Comparator::Gt,
            "GE" => Comparator::Ge,
            "LT" => Comparator::Lt,
            "LE" => Comparator::Le,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unit mismatch: expected `{expected}`, found `{found}`")]
pub struct UnitMismatch {
    pub expected: String,
    pub found: String,
}

/// A crisp unary predicate over quantities, e.g. `GT 200 EUR`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConcretePredicate {
    pub comparator: Comparator,
    pub threshold: Quantity,
}

impl ConcretePredicate {
    pub fn new(comparator: Comparator, threshold: Quantity) -> Self {
        ConcretePredicate {
            comparator,
            threshold,
        }
    }

    pub fn holds(&self, value: &Quantity) -> Result<bool, UnitMismatch> {
        if value.unit != self.threshold.unit {
            return Err(UnitMismatch {
                expected: self.threshold.unit.clone(),
                found: value.unit.clone(),
            });
        }
        let (v, t) = (value.magnitude, self.threshold.magnitude);
        Ok(match self.comparator {
            Comparator::Gt => v > t,
            Comparator::Ge => v >= t,
            Comparator::Lt => v < t,
            Comparator::Le => v <= t,
        })
    }

    /// Membership degree of `value`: always exactly 0 or 1.
    pub fn degree(&self, value: &Quantity) -> Result<Degree, UnitMismatch> {
        Ok(if self.holds(value)? {
            Degree::ONE
        } else {
            Degree::ZERO
        })
    }
}

impl fmt::Display for ConcretePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.comparator.keyword(), self.threshold)
    }
}
