//! Interval-valued evidence fusion and innovativeness indicators.
//!
//! Expert groups (or search agents, or instruments) rate an object on a
//! linguistic scale whose terms are subintervals of `[0, 1]`. Each group's
//! ratings become a [`BodyOfEvidence`]; bodies are fused with a
//! conflict-normalised combination rule and the fused focal elements are
//! ranked by belief and plausibility. Separately, the [`indicators`] module
//! turns search statistics into novelty, relevance and implementability
//! scores.

pub mod combination;
pub mod error;
pub mod evidence;
pub mod fixtures;
pub mod indicators;
pub mod interval;
pub mod pipeline;
pub mod survey;

pub use combination::{
    combine_all, combine_pair, intersection_matrix, rank, CombinationResult, CombinationStep,
    IntersectionCell, PairRule, RankedEstimate,
};
pub use error::{Diagnostic, Error, Result, Severity};
pub use evidence::{
    build_evidence_table, mass_of, Assessment, BodyOfEvidence, ExpectationBounds, ExpertGroup,
    FocalElement, LinguisticRating, RatingScale,
};
pub use indicators::{
    implementability, local_maxima, normalize, novelty, relevance, NormalizationMode,
    ObservationSet, TimeSeries,
};
pub use interval::Interval;
pub use pipeline::{evaluate, indicator_report, EvaluateOptions, IndicatorReport, RunReport};
pub use survey::{parse_source_data, serialize_source_data, DiagramRow, SourceData};
