use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use thiserror::Error;

/// A membership degree in `[0, 1]`, stored as an exact decimal.
///
/// Values are normalized on construction so that `0.50` and `0.5` compare,
/// hash and print identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(Decimal);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("degree `{literal}` is outside [0, 1]")]
pub struct DegreeRangeError {
    pub literal: String,
}

impl Degree {
    pub const ZERO: Degree = Degree(Decimal::ZERO);
    pub const ONE: Degree = Degree(Decimal::ONE);

    pub fn new(value: Decimal) -> Result<Self, DegreeRangeError> {
        if value < Decimal::ZERO || value > Decimal::ONE {
            return Err(DegreeRangeError {
                literal: value.normalize().to_string(),
            });
        }
        Ok(Degree(value.normalize()))
    }

    /// Parses a decimal literal such as `0.6` or `1`.
    pub fn parse(literal: &str) -> Result<Self, DegreeRangeError> {
        let err = || DegreeRangeError {
            literal: literal.to_string(),
        };
        let value = Decimal::from_str(literal.trim()).map_err(|_| err())?;
        Degree::new(value).map_err(|_| err())
    }

    pub fn value(self) -> Decimal {
        self.0
    }

    /// `1 - x`.
    pub fn complement(self) -> Degree {
        Degree((Decimal::ONE - self.0).normalize())
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(self) -> bool {
        self.0 == Decimal::ONE
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Degree {
    type Err = DegreeRangeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Degree::parse(s)
    }
}

impl TryFrom<Decimal> for Degree {
    type Error = DegreeRangeError;

    fn try_from(value: Decimal) -> Result<Self, Self::Error> {
        Degree::new(value)
    }
}

/// Known lower and upper bounds on a membership degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DegreeInterval {
    lo: Degree,
    hi: Degree,
}

/// Refinement produced an empty interval.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("empty degree interval: lower bound {lo} exceeds upper bound {hi}")]
pub struct IntervalConflict {
    pub lo: Degree,
    pub hi: Degree,
}

impl DegreeInterval {
    pub const VACUOUS: DegreeInterval = DegreeInterval {
        lo: Degree::ZERO,
        hi: Degree::ONE,
    };

    pub fn new(lo: Degree, hi: Degree) -> Result<Self, IntervalConflict> {
        if lo > hi {
            return Err(IntervalConflict { lo, hi });
        }
        Ok(DegreeInterval { lo, hi })
    }

    pub fn exact(value: Degree) -> Self {
        DegreeInterval {
            lo: value,
            hi: value,
        }
    }

    pub fn lo(&self) -> Degree {
        self.lo
    }

    pub fn hi(&self) -> Degree {
        self.hi
    }

    pub fn is_vacuous(&self) -> bool {
        *self == Self::VACUOUS
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, d: Degree) -> bool {
        self.lo <= d && d <= self.hi
    }

    pub fn is_subset_of(&self, other: &DegreeInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Intersects with the given bounds. Weaker bounds are absorbed.
    pub fn refine(
        &self,
        new_lo: Option<Degree>,
        new_hi: Option<Degree>,
    ) -> Result<Self, IntervalConflict> {
        let lo = new_lo.map_or(self.lo, |l| l.max(self.lo));
        let hi = new_hi.map_or(self.hi, |h| h.min(self.hi));
        DegreeInterval::new(lo, hi)
    }

    /// Interval of the complement: `[1 - hi, 1 - lo]`.
    pub fn negate(&self) -> Self {
        DegreeInterval {
            lo: self.hi.complement(),
            hi: self.lo.complement(),
        }
    }
}

impl Default for DegreeInterval {
    fn default() -> Self {
        Self::VACUOUS
    }
}

impl fmt::Display for DegreeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
