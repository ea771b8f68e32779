//! Interval evidence from a single source.
//!
//! A [`BodyOfEvidence`] is a basic probability assignment over closed
//! subintervals of `[0, 1]`. Masses are kept at full floating precision;
//! any rounding happens at display time.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Tolerance for the unit-sum check on a body's masses.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// A linguistic term bound to a numeric interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticRating {
    term: String,
    interval: Interval,
}

impl LinguisticRating {
    pub fn new(term: impl Into<String>, interval: Interval) -> Result<Self> {
        let term = term.into();
        if term.trim().is_empty() {
            return Err(Error::InvalidScale("rating term must not be empty".into()));
        }
        Ok(Self { term, interval })
    }

    pub fn term(&self) -> &str {
        &self.term
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }
}

/// Ordered list of ratings. Intervals may overlap or nest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LinguisticRating>", into = "Vec<LinguisticRating>")]
pub struct RatingScale {
    ratings: Vec<LinguisticRating>,
}

impl TryFrom<Vec<LinguisticRating>> for RatingScale {
    type Error = Error;

    fn try_from(ratings: Vec<LinguisticRating>) -> Result<Self> {
        RatingScale::new(ratings)
    }
}

impl From<RatingScale> for Vec<LinguisticRating> {
    fn from(scale: RatingScale) -> Self {
        scale.ratings
    }
}

impl RatingScale {
    pub fn new(ratings: Vec<LinguisticRating>) -> Result<Self> {
        if ratings.is_empty() {
            return Err(Error::InvalidScale(
                "scale needs at least one rating".into(),
            ));
        }
        let mut seen = HashSet::new();
        for rating in &ratings {
            if !seen.insert(rating.term.as_str()) {
                return Err(Error::InvalidScale(format!(
                    "duplicate term {:?}",
                    rating.term
                )));
            }
        }
        Ok(Self { ratings })
    }

    pub fn ratings(&self) -> &[LinguisticRating] {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn find(&self, term: &str) -> Option<&LinguisticRating> {
        self.ratings.iter().find(|r| r.term == term)
    }

    /// Term whose interval equals `interval` (within the bound epsilon).
    pub fn term_for(&self, interval: &Interval) -> Option<&str> {
        self.ratings
            .iter()
            .find(|r| r.interval.approx_eq(interval))
            .map(|r| r.term.as_str())
    }

    /// Open gaps of `[0, 1]` not covered by any rating interval, in ascending order.
    pub fn uncovered_gaps(&self) -> Vec<(f64, f64)> {
        let mut spans: Vec<Interval> = self.ratings.iter().map(|r| r.interval).collect();
        spans.sort_by(|a, b| a.canonical_cmp(b));

        let mut gaps = Vec::new();
        // right end of the covered prefix
        let mut reach = 0.0_f64;
        for span in spans {
            if span.lower() > reach {
                gaps.push((reach, span.lower()));
            }
            reach = reach.max(span.upper());
        }
        if reach < 1.0 {
            gaps.push((reach, 1.0));
        }
        gaps
    }
}

/// A named source of evidence with a fixed number of experts (or agents,
/// instruments, queries).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpertGroup {
    name: String,
    expert_count: u32,
}

impl ExpertGroup {
    pub fn new(name: impl Into<String>, expert_count: u32) -> Result<Self> {
        if expert_count == 0 {
            return Err(Error::InvalidAssessment(
                "an expert group needs at least one expert".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            expert_count,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expert_count(&self) -> u32 {
        self.expert_count
    }
}

/// A rating given by `voter_count` experts of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    rating: LinguisticRating,
    voter_count: u32,
}

impl Assessment {
    pub fn new(rating: LinguisticRating, voter_count: u32) -> Result<Self> {
        if voter_count == 0 {
            return Err(Error::InvalidAssessment(
                "an assessment needs at least one voter".into(),
            ));
        }
        Ok(Self {
            rating,
            voter_count,
        })
    }

    pub fn rating(&self) -> &LinguisticRating {
        &self.rating
    }

    pub fn voter_count(&self) -> u32 {
        self.voter_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalElement {
    interval: Interval,
    mass: f64,
}

impl FocalElement {
    pub fn new(interval: Interval, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass <= 1.0 + MASS_SUM_TOLERANCE) {
            return Err(Error::InvalidBody(format!(
                "focal element {interval} has mass {mass}, expected (0, 1]"
            )));
        }
        Ok(Self {
            interval,
            mass: mass.min(1.0),
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Mass assignment of a single source over interval focal elements.
///
/// Invariants: at least one focal element, no two with the same interval,
/// masses in `(0, 1]` summing to 1 within [`MASS_SUM_TOLERANCE`].
/// Focal elements keep the order in which their intervals first appeared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BodyOfEvidence {
    source_name: String,
    focal_elements: Vec<FocalElement>,
}

impl BodyOfEvidence {
    /// Builds a body, merging focal elements with identical intervals.
    pub fn new(source_name: impl Into<String>, elements: Vec<FocalElement>) -> Result<Self> {
        let focal_elements = merge_identical(elements.into_iter().map(|f| (f.interval, f.mass)))
            .into_iter()
            .map(|(interval, mass)| FocalElement::new(interval, mass))
            .collect::<Result<Vec<_>>>()?;
        if focal_elements.is_empty() {
            return Err(Error::InvalidBody("no focal elements".into()));
        }
        let total: f64 = focal_elements.iter().map(|f| f.mass).sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::InvalidBody(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            source_name: source_name.into(),
            focal_elements,
        })
    }

    /// Builds a body from non-negative weights, scaling them to unit sum.
    /// Zero weights are dropped.
    pub fn from_weights(
        source_name: impl Into<String>,
        weights: impl IntoIterator<Item = (Interval, f64)>,
    ) -> Result<Self> {
        let weights: Vec<(Interval, f64)> = weights.into_iter().collect();
        if let Some((interval, w)) = weights.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidBody(format!(
                "weight {w} for {interval} is not a finite non-negative number"
            )));
        }
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(Error::InvalidBody("weights sum to zero".into()));
        }
        let elements = weights
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(interval, w)| FocalElement::new(interval, w / total))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source_name, elements)
    }

    /// Total ignorance: all mass on `[0, 1]`.
    pub fn vacuous(source_name: impl Into<String>) -> Self {
        Self {
            source_name: source_name.into(),
            focal_elements: vec![FocalElement {
                interval: Interval::FRAME,
                mass: 1.0,
            }],
        }
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn focal_elements(&self) -> &[FocalElement] {
        &self.focal_elements
    }

    pub fn len(&self) -> usize {
        self.focal_elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focal_elements.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.focal_elements.iter().map(|f| f.mass).sum()
    }

    pub fn mass_of_interval(&self, interval: &Interval) -> f64 {
        self.focal_elements
            .iter()
            .filter(|f| f.interval.approx_eq(interval))
            .fold(0.0, |acc, f| acc + f.mass)
    }

    /// Bel: total mass of focal elements contained in `query`.
    pub fn belief(&self, query: &Interval) -> f64 {
        self.focal_elements
            .iter()
            .filter(|f| query.contains(&f.interval))
            .fold(0.0, |acc, f| acc + f.mass)
    }

    /// Pl: total mass of focal elements overlapping `query`.
    pub fn plausibility(&self, query: &Interval) -> f64 {
        self.focal_elements
            .iter()
            .filter(|f| query.overlaps(&f.interval))
            .fold(0.0, |acc, f| acc + f.mass)
    }

    /// Mass-weighted means of the lower and upper bounds.
    pub fn expectation_bounds(&self) -> ExpectationBounds {
        let (lower, upper) = self.focal_elements.iter().fold((0.0, 0.0), |(lo, hi), f| {
            (
                lo + f.mass * f.interval.lower(),
                hi + f.mass * f.interval.upper(),
            )
        });
        ExpectationBounds { lower, upper }
    }

    /// Shafer discounting with reliability `alpha`: masses scale by `alpha`
    /// and `1 - alpha` moves to the frame `[0, 1]`.
    pub fn discount(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidInput(format!(
                "reliability must lie in [0, 1], got {alpha}"
            )));
        }
        if alpha == 1.0 {
            return Ok(self.clone());
        }
        let scaled = self
            .focal_elements
            .iter()
            .map(|f| (f.interval, f.mass * alpha))
            .chain(std::iter::once((Interval::FRAME, 1.0 - alpha)));
        Self::from_weights(self.source_name.clone(), scaled)
    }

    pub(crate) fn from_parts_unchecked(
        source_name: String,
        focal_elements: Vec<FocalElement>,
    ) -> Self {
        Self {
            source_name,
            focal_elements,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Mass of an assessment given by `voter_count` of `group_size` experts.
pub fn mass_of(voter_count: u32, group_size: u32) -> Result<f64> {
    if group_size == 0 || voter_count == 0 {
        return Err(Error::InvalidAssessment(
            "voter count and group size must be positive".into(),
        ));
    }
    if voter_count > group_size {
        return Err(Error::InvalidAssessment(format!(
            "{voter_count} voters exceed the group size of {group_size}"
        )));
    }
    Ok(f64::from(voter_count) / f64::from(group_size))
}

/// Turns one group's assessments into its body of evidence.
///
/// Assessments with the same interval are merged by summing voters. Experts
/// who gave no assessment contribute vacuous mass on `[0, 1]`.
pub fn build_evidence_table(
    assessments: &[Assessment],
    group: &ExpertGroup,
) -> Result<BodyOfEvidence> {
    let total: u64 = assessments.iter().map(|a| u64::from(a.voter_count)).sum();
    if total > u64::from(group.expert_count) {
        return Err(Error::InvalidAssessment(format!(
            "group {:?} has {} experts but {total} votes were given",
            group.name, group.expert_count
        )));
    }

    let mut counts: Vec<(Interval, u32)> = Vec::with_capacity(assessments.len() + 1);
    let residual = group.expert_count - total as u32;
    let entries = assessments
        .iter()
        .map(|a| (a.rating.interval, a.voter_count))
        .chain((residual > 0).then_some((Interval::FRAME, residual)));
    for (interval, votes) in entries {
        match counts
            .iter_mut()
            .find(|(seen, _)| seen.approx_eq(&interval))
        {
            Some((_, n)) => *n += votes,
            None => counts.push((interval, votes)),
        }
    }

    let focal_elements = counts
        .into_iter()
        .map(|(interval, votes)| {
            mass_of(votes, group.expert_count).and_then(|m| FocalElement::new(interval, m))
        })
        .collect::<Result<Vec<_>>>()?;
    BodyOfEvidence::new(group.name.clone(), focal_elements)
}

/// Merges equal intervals by adding their masses, keeping first-seen order.
fn merge_identical(items: impl IntoIterator<Item = (Interval, f64)>) -> Vec<(Interval, f64)> {
    let mut merged: Vec<(Interval, f64)> = Vec::new();
    for (interval, mass) in items {
        match merged
            .iter_mut()
            .find(|(seen, _)| seen.approx_eq(&interval))
        {
            Some((_, m)) => *m += mass,
            None => merged.push((interval, mass)),
        }
    }
    merged
}
