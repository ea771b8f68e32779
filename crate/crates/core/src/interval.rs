use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bounds closer than this are treated as the same endpoint when merging
/// focal elements or matching scale terms.
pub const BOUND_EPSILON: f64 = 1e-12;

/// Closed subinterval `[lower, upper]` of the unit frame `[0, 1]`.
///
/// Point intervals are allowed; `[0, 0]` is how a scale expresses a zero rating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lower: f64,
    upper: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lower: f64,
    upper: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lower, raw.upper)
    }
}

impl Interval {
    /// The whole frame `[0, 1]`, i.e. total ignorance.
    pub const FRAME: Interval = Interval {
        lower: 0.0,
        upper: 1.0,
    };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 || upper > 1.0 || lower > upper
        {
            return Err(Error::InvalidInterval { lower, upper });
        }
        // Normalise -0.0 so equal intervals compare and hash identically.
        Ok(Self {
            lower: lower + 0.0,
            upper: upper + 0.0,
        })
    }

    pub fn point(value: f64) -> Result<Self> {
        Self::new(value, value)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains_value(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// Closed containment: `other ⊆ self`.
    pub fn contains(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    /// Closed overlap; intervals touching at an endpoint overlap.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lower.max(other.lower) <= self.upper.min(other.upper)
    }

    /// Smallest interval covering both operands.
    pub fn envelope(&self, other: &Interval) -> Interval {
        Interval {
            lower: self.lower.min(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    /// Set intersection, `None` when disjoint.
    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        self.overlaps(other).then(|| Interval {
            lower: self.lower.max(other.lower),
            upper: self.upper.min(other.upper),
        })
    }

    /// Endpoint equality within [`BOUND_EPSILON`].
    pub fn approx_eq(&self, other: &Interval) -> bool {
        (self.lower - other.lower).abs() <= BOUND_EPSILON
            && (self.upper - other.upper).abs() <= BOUND_EPSILON
    }

    /// Total order by lower bound, then upper bound.
    pub fn canonical_cmp(&self, other: &Interval) -> Ordering {
        self.lower
            .total_cmp(&other.lower)
            .then(self.upper.total_cmp(&other.upper))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.p$}, {:.p$}]", self.lower, self.upper),
            None => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    #[test]
    fn rejects_inverted_and_out_of_frame_bounds() {
        assert!(Interval::new(0.5, 0.4).is_err());
        assert!(Interval::new(-0.1, 0.4).is_err());
        assert!(Interval::new(0.1, 1.01).is_err());
        assert!(Interval::new(f64::NAN, 0.4).is_err());
        assert!(Interval::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn touching_endpoints_overlap() {
        assert!(iv(0.0, 0.0).overlaps(&iv(0.0, 0.33)));
        assert!(iv(0.2, 0.4).overlaps(&iv(0.4, 0.9)));
        assert!(!iv(0.0, 0.33).overlaps(&iv(0.34, 0.66)));
    }

    #[test]
    fn envelope_and_intersection() {
        let a = iv(0.34, 0.44);
        let b = iv(0.34, 0.66);
        assert_eq!(a.envelope(&b), b);
        assert_eq!(a.intersection(&b), Some(a));
        assert_eq!(iv(0.0, 0.1).intersection(&iv(0.2, 0.3)), None);
    }

    #[test]
    fn containment_is_closed() {
        assert!(iv(0.67, 1.0).contains(&iv(0.89, 1.0)));
        assert!(iv(0.67, 1.0).contains(&iv(0.67, 1.0)));
        assert!(!iv(0.68, 1.0).contains(&iv(0.67, 1.0)));
    }

    #[test]
    fn deserialize_validates() {
        let ok: Interval = serde_json::from_str(r#"{"lower":0.1,"upper":0.2}"#).unwrap();
        assert_eq!(ok, iv(0.1, 0.2));
        assert!(serde_json::from_str::<Interval>(r#"{"lower":0.3,"upper":0.2}"#).is_err());
    }
}
