//! Conflict-normalised fusion of interval bodies of evidence.
//!
//! Every pair of focal elements from the two sources forms a cell whose
//! product mass either survives (the intervals overlap) or is counted as
//! conflict (they are disjoint). Surviving mass is attached to the
//! envelope of the pair by default, or to their intersection under
//! [`PairRule::Intersection`], and then rescaled by
//! `K = 1 / (1 - conflict)`.
//!
//! The envelope rule is not associative, so [`combine_all`] folds strictly
//! left to right.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{BodyOfEvidence, FocalElement, RatingScale};
use crate::interval::Interval;

/// Where the mass of an overlapping pair of focal elements goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairRule {
    /// Union of bounds: `[min(lowers), max(uppers)]`.
    #[default]
    Envelope,
    /// Set intersection, as in the textbook Dempster rule.
    Intersection,
}

impl PairRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairRule::Envelope => "envelope",
            PairRule::Intersection => "intersection",
        }
    }

    fn merge(&self, a: &Interval, b: &Interval) -> Option<Interval> {
        match self {
            PairRule::Envelope => a.overlaps(b).then(|| a.envelope(b)),
            PairRule::Intersection => a.intersection(b),
        }
    }
}

impl fmt::Display for PairRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "envelope" => Ok(PairRule::Envelope),
            "intersection" => Ok(PairRule::Intersection),
            other => Err(Error::InvalidInput(format!(
                "unknown semantics {other:?}, expected envelope or intersection"
            ))),
        }
    }
}

/// One cell of the pairwise intersection matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionCell {
    pub product_mass: f64,
    pub overlap: bool,
    /// Union of the two intervals; present only when they overlap.
    pub envelope: Option<Interval>,
}

/// Row `i` corresponds to `body_a`'s `i`-th focal element, column `j` to
/// `body_b`'s `j`-th.
pub fn intersection_matrix(
    body_a: &BodyOfEvidence,
    body_b: &BodyOfEvidence,
) -> Vec<Vec<IntersectionCell>> {
    body_a
        .focal_elements()
        .iter()
        .map(|fa| {
            body_b
                .focal_elements()
                .iter()
                .map(|fb| {
                    let (ia, ib) = (fa.interval(), fb.interval());
                    let overlap = ia.overlaps(&ib);
                    IntersectionCell {
                        product_mass: fa.mass() * fb.mass(),
                        overlap,
                        envelope: overlap.then(|| ia.envelope(&ib)),
                    }
                })
                .collect()
        })
        .collect()
}

/// Bookkeeping for a single pairwise fusion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationStep {
    /// 1-based; step `s` fuses source `s` (0-based) into the running result.
    pub step: usize,
    pub source: String,
    pub conflict_mass: f64,
    pub agreement_mass: f64,
    pub k_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationResult {
    pub combined: BodyOfEvidence,
    /// Conflict of the final pairwise step.
    pub conflict_mass: f64,
    /// Pre-normalisation surviving mass of the final pairwise step.
    pub agreement_mass: f64,
    /// `1 / (1 - conflict_mass)` of the final pairwise step.
    pub k_constant: f64,
    pub rule: PairRule,
    /// Every pairwise step in fusion order; empty for a single source.
    pub steps: Vec<CombinationStep>,
}

/// Fuses two bodies of evidence.
pub fn combine_pair(
    body_a: &BodyOfEvidence,
    body_b: &BodyOfEvidence,
    rule: PairRule,
) -> Result<CombinationResult> {
    let (combined, step) = fuse(body_a, body_b, rule, 1)?;
    Ok(CombinationResult {
        combined,
        conflict_mass: step.conflict_mass,
        agreement_mass: step.agreement_mass,
        k_constant: step.k_constant,
        rule,
        steps: vec![step],
    })
}

/// Left fold `((b1 ⊕ b2) ⊕ b3) ⊕ …` over `bodies` in the given order.
pub fn combine_all(bodies: &[BodyOfEvidence], rule: PairRule) -> Result<CombinationResult> {
    let (first, rest) = bodies
        .split_first()
        .ok_or_else(|| Error::InvalidInput("combination needs at least one body".into()))?;

    let mut running = first.clone();
    let mut steps = Vec::with_capacity(rest.len());
    for (offset, next) in rest.iter().enumerate() {
        let (combined, step) = fuse(&running, next, rule, offset + 1)?;
        running = combined;
        steps.push(step);
    }

    let (conflict_mass, agreement_mass, k_constant) = steps
        .last()
        .map(|s| (s.conflict_mass, s.agreement_mass, s.k_constant))
        .unwrap_or((0.0, 1.0, 1.0));
    Ok(CombinationResult {
        combined: running,
        conflict_mass,
        agreement_mass,
        k_constant,
        rule,
        steps,
    })
}

fn fuse(
    body_a: &BodyOfEvidence,
    body_b: &BodyOfEvidence,
    rule: PairRule,
    step: usize,
) -> Result<(BodyOfEvidence, CombinationStep)> {
    let mut surviving: Vec<(Interval, f64)> = Vec::with_capacity(body_a.len() * body_b.len());
    let mut conflicting: Vec<f64> = Vec::new();
    for fa in body_a.focal_elements() {
        for fb in body_b.focal_elements() {
            let product = fa.mass() * fb.mass();
            match rule.merge(&fa.interval(), &fb.interval()) {
                Some(interval) => surviving.push((interval, product)),
                None => conflicting.push(product),
            }
        }
    }
    if surviving.is_empty() {
        return Err(Error::TotalConflict { step });
    }

    // Sorting before summing makes the sums independent of operand order.
    surviving.sort_by(|(ia, ma), (ib, mb)| ia.canonical_cmp(ib).then(ma.total_cmp(mb)));
    conflicting.sort_by(f64::total_cmp);

    let conflict_mass = conflicting.iter().fold(0.0, |acc, m| acc + m);
    let agreement_mass: f64 = surviving.iter().map(|(_, m)| m).sum();
    let k_constant = 1.0 / (1.0 - conflict_mass);

    let mut merged: Vec<(Interval, f64)> = Vec::new();
    for (interval, mass) in surviving {
        match merged.last_mut() {
            Some((last, m)) if last.approx_eq(&interval) => *m += mass,
            _ => merged.push((interval, mass)),
        }
    }

    // Dividing by the surviving total equals multiplying by K in exact
    // arithmetic and keeps the unit sum tight when conflict is close to 1.
    let focal_elements = merged
        .into_iter()
        .map(|(interval, mass)| FocalElement::new(interval, mass / agreement_mass))
        .collect::<Result<Vec<_>>>()?;
    let name = format!("{} ⊕ {}", body_a.source_name(), body_b.source_name());
    let combined = BodyOfEvidence::from_parts_unchecked(name, focal_elements);

    Ok((
        combined,
        CombinationStep {
            step,
            source: body_b.source_name().to_string(),
            conflict_mass,
            agreement_mass,
            k_constant,
        },
    ))
}

/// A combined focal element with its belief and plausibility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEstimate {
    pub interval: Interval,
    pub mass: f64,
    pub belief: f64,
    pub plausibility: f64,
    pub term: Option<String>,
}

/// Orders combined focal elements by Bel descending, then Pl descending,
/// then lower bound ascending.
pub fn rank(result: &CombinationResult, scale: &RatingScale) -> Vec<RankedEstimate> {
    rank_body(&result.combined, scale)
}

pub fn rank_body(body: &BodyOfEvidence, scale: &RatingScale) -> Vec<RankedEstimate> {
    let mut ranked: Vec<RankedEstimate> = body
        .focal_elements()
        .iter()
        .map(|f| {
            let interval = f.interval();
            RankedEstimate {
                interval,
                mass: f.mass(),
                belief: body.belief(&interval),
                plausibility: body.plausibility(&interval),
                term: scale.term_for(&interval).map(str::to_owned),
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.belief
            .total_cmp(&a.belief)
            .then(b.plausibility.total_cmp(&a.plausibility))
            .then(a.interval.canonical_cmp(&b.interval))
    });
    ranked
}
