//! End-to-end runs over a whole document or observation file.

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::Serialize;

use crate::combination::{combine_all, rank, CombinationStep, PairRule, RankedEstimate};
use crate::error::{Error, Result};
use crate::evidence::{build_evidence_table, BodyOfEvidence, ExpectationBounds};
use crate::indicators::{
    analyze_implementability, normalize, novelty, relevance, ImplementabilityConfig,
    NormalizationMode, ObservationSet, TimeSeries,
};
use crate::survey::{
    assessments_by_group, diagram_data, DiagramRow, ObservationRecord, SourceData,
};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluateOptions {
    pub rule: PairRule,
    pub normalization: NormalizationMode,
    /// Display digits; `None` falls back to the document's `RoundDigsNumber`.
    pub round_digits: Option<u32>,
    /// RFC 3339 time stamped into the metadata, if any.
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub fusion_order: Vec<String>,
    pub semantics: PairRule,
    pub normalization: NormalizationMode,
    pub round_digits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub metadata: ReportMetadata,
    pub evaluations: Vec<Evaluation>,
}

/// Outcome for one (component, indicator) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub component_index: usize,
    pub indicator_index: usize,
    pub component: String,
    pub indicator: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Ok(Box<CellResult>),
    Failed { error: CellFailure },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub top_estimate: RankedEstimate,
    pub ranked: Vec<RankedEstimate>,
    pub conflict_mass: f64,
    pub k_constant: f64,
    pub steps: Vec<CombinationStep>,
    pub expectation: ExpectationBounds,
    /// Cumulated-mass rows of each group's body before fusion.
    pub diagram: Vec<DiagramRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub kind: FailureKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    TotalConflict,
    InvalidInput,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = (&Evaluation, &CellFailure)> {
        self.evaluations.iter().filter_map(|e| match &e.outcome {
            Outcome::Failed { error } => Some((e, error)),
            Outcome::Ok(_) => None,
        })
    }

    pub fn has_total_conflict(&self) -> bool {
        self.failures()
            .any(|(_, f)| f.kind == FailureKind::TotalConflict)
    }

    pub fn has_invalid_input(&self) -> bool {
        self.failures()
            .any(|(_, f)| f.kind == FailureKind::InvalidInput)
    }
}

/// Builds each group's body for one cell, in `ExpertGroupes` order.
pub fn group_bodies(
    data: &SourceData,
    component_index: usize,
    indicator_index: usize,
) -> Result<Vec<BodyOfEvidence>> {
    assessments_by_group(data, component_index, indicator_index)?
        .iter()
        .map(|(group, assessments)| build_evidence_table(assessments, group))
        .collect()
}

fn evaluate_cell(data: &SourceData, component: usize, indicator: usize, rule: PairRule) -> Outcome {
    let failure = |err: Error| {
        let (kind, step) = match err {
            Error::TotalConflict { step } => (FailureKind::TotalConflict, Some(step)),
            _ => (FailureKind::InvalidInput, None),
        };
        Outcome::Failed {
            error: CellFailure {
                kind,
                step,
                message: err.to_string(),
            },
        }
    };
    let bodies = match group_bodies(data, component, indicator) {
        Ok(b) => b,
        Err(e) => return failure(e),
    };
    let result = match combine_all(&bodies, rule) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let ranked = rank(&result, &data.estimate_scale);
    Outcome::Ok(Box::new(CellResult {
        top_estimate: ranked[0].clone(),
        expectation: result.combined.expectation_bounds(),
        conflict_mass: result.conflict_mass,
        k_constant: result.k_constant,
        steps: result.steps,
        diagram: diagram_data(&bodies),
        ranked,
    }))
}

/// Fuses all groups for every (component, indicator) cell. A failing cell is
/// reported in place and does not stop the others.
pub fn evaluate(data: &SourceData, options: &EvaluateOptions) -> RunReport {
    let mut evaluations =
        Vec::with_capacity(data.component_names.len() * data.indicator_names.len());
    for (c, component) in data.component_names.iter().enumerate() {
        for (i, indicator) in data.indicator_names.iter().enumerate() {
            evaluations.push(Evaluation {
                component_index: c,
                indicator_index: i,
                component: component.clone(),
                indicator: indicator.clone(),
                outcome: evaluate_cell(data, c, i, options.rule),
            });
        }
    }
    RunReport {
        metadata: ReportMetadata {
            tool: "innoscore",
            version: env!("CARGO_PKG_VERSION"),
            fusion_order: data
                .expert_groups
                .iter()
                .map(|g| g.name().to_string())
                .collect(),
            semantics: options.rule,
            normalization: options.normalization,
            round_digits: options.round_digits.unwrap_or(data.round_digits),
            generated_at: options.generated_at.clone(),
        },
        evaluations,
    }
}

/// Accepts RFC 3339, a naive date-time (read as UTC) or a bare date.
pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return Ok(t.with_timezone(&Utc));
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f") {
        return Ok(t.and_utc());
    }
    if let Ok(d) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc());
    }
    Err(Error::InvalidInput(format!(
        "timestamp {text:?} is not ISO-8601"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryAudit {
    pub query: String,
    pub hits: f64,
    pub frequency: f64,
    pub normalized_hits: f64,
    pub normalized_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotIndicators {
    pub timestamp: String,
    /// Seconds since the first snapshot.
    pub elapsed_seconds: f64,
    pub novelty: f64,
    pub relevance: f64,
    pub queries: Vec<QueryAudit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorReport {
    pub normalization: NormalizationMode,
    pub snapshots: Vec<SnapshotIndicators>,
    pub implementability: Option<f64>,
    pub novelty_maxima: Vec<String>,
    pub relevance_maxima: Vec<String>,
    pub novelty_gap_ratio: Option<f64>,
    pub relevance_gap_ratio: Option<f64>,
    pub notes: Vec<String>,
}

/// Novelty and relevance per snapshot, implementability over the series.
pub fn indicator_report(
    records: &[ObservationRecord],
    mode: NormalizationMode,
    config: &ImplementabilityConfig,
) -> Result<IndicatorReport> {
    if records.is_empty() {
        return Err(Error::InvalidInput("observation set is empty".into()));
    }
    let mut stamped: Vec<(DateTime<Utc>, &ObservationRecord)> = records
        .iter()
        .map(|r| parse_timestamp(&r.timestamp).map(|t| (t, r)))
        .collect::<Result<_>>()?;
    stamped.sort_by_key(|(t, _)| *t);

    let origin = stamped[0].0;
    let mut snapshots = Vec::new();
    for chunk in stamped.chunk_by(|a, b| a.0 == b.0) {
        let at = chunk[0].0;
        let hits = ObservationSet::with_labels(
            chunk.iter().map(|(_, r)| r.hits).collect(),
            chunk.iter().map(|(_, r)| r.query.clone()).collect(),
        )?;
        let freqs = ObservationSet::new(chunk.iter().map(|(_, r)| r.frequency).collect())?;
        let normalized_hits = normalize(&hits, mode);
        let normalized_freqs = normalize(&freqs, mode);
        snapshots.push(SnapshotIndicators {
            timestamp: at.to_rfc3339(),
            elapsed_seconds: (at - origin).num_milliseconds() as f64 / 1000.0,
            novelty: novelty(&hits, mode),
            relevance: relevance(&freqs, mode),
            queries: chunk
                .iter()
                .zip(normalized_hits.iter().zip(&normalized_freqs))
                .map(|((_, r), (&nh, &nf))| QueryAudit {
                    query: r.query.clone(),
                    hits: r.hits,
                    frequency: r.frequency,
                    normalized_hits: nh,
                    normalized_frequency: nf,
                })
                .collect(),
        });
    }

    let mut report = IndicatorReport {
        normalization: mode,
        implementability: None,
        novelty_maxima: Vec::new(),
        relevance_maxima: Vec::new(),
        novelty_gap_ratio: None,
        relevance_gap_ratio: None,
        notes: Vec::new(),
        snapshots,
    };

    if report.snapshots.len() < 2 {
        report.notes.push(
            "implementability needs at least two snapshots spanning a positive interval".into(),
        );
        return Ok(report);
    }

    let times: Vec<f64> = report.snapshots.iter().map(|s| s.elapsed_seconds).collect();
    let nov: Vec<f64> = report.snapshots.iter().map(|s| s.novelty).collect();
    let rel: Vec<f64> = report.snapshots.iter().map(|s| s.relevance).collect();
    let breakdown = analyze_implementability(
        &TimeSeries::from_parts(&times, &nov)?,
        &TimeSeries::from_parts(&times, &rel)?,
        config,
    )?;
    let stamp_of = |t: &f64| {
        report
            .snapshots
            .iter()
            .find(|s| s.elapsed_seconds == *t)
            .map(|s| s.timestamp.clone())
            .unwrap_or_default()
    };
    report.novelty_maxima = breakdown.novelty_maxima.iter().map(stamp_of).collect();
    report.relevance_maxima = breakdown.relevance_maxima.iter().map(stamp_of).collect();
    if breakdown.used_sparse_fallback() {
        report.notes.push(format!(
            "fewer than two local maxima in {}; gap ratio {} assumed (no recovery observed)",
            match (
                breakdown.novelty_maxima.len() < 2,
                breakdown.relevance_maxima.len() < 2
            ) {
                (true, true) => "both series",
                (true, false) => "the novelty series",
                _ => "the relevance series",
            },
            config.sparse_gap_ratio
        ));
    }
    report.novelty_gap_ratio = Some(breakdown.novelty_gap_ratio);
    report.relevance_gap_ratio = Some(breakdown.relevance_gap_ratio);
    report.implementability = Some(breakdown.value);
    Ok(report)
}
