//! The evaluation document and its derived tables.
//!
//! # Wire format
//!
//! A JSON object with these fields (names are case-sensitive):
//!
//! | field             | type                                        |
//! |-------------------|---------------------------------------------|
//! | `ComponentNumber` | integer ≥ 1                                 |
//! | `IndicatorNumber` | integer ≥ 1                                 |
//! | `ExpGroupsNumber` | integer ≥ 1                                 |
//! | `EstimatesNumber` | integer ≥ 1                                 |
//! | `RoundDigsNumber` | integer ≥ 0, display digits only            |
//! | `InterviewNumber` | integer ≥ 0                                 |
//! | `ComponentNames`  | array of strings, length `ComponentNumber`  |
//! | `IndicatorNames`  | array of strings, length `IndicatorNumber`  |
//! | `ExpertGroupes`   | array of `{GroupName, ExperCount}`          |
//! | `EstimateScale`   | array of `{Lingvo, LBound, UBound}`         |
//! | `InterviewRslt`   | array of `{Lingvo, LBound, UBound}`         |
//! | `FormatVersion`   | optional integer, only `1` is understood    |
//!
//! Every `InterviewRslt` entry must name a scale term with the same bounds.
//!
//! # Interview layout
//!
//! Results carry no group or component index. They are read in nested
//! order: group (as listed in `ExpertGroupes`), then component, then
//! indicator, then expert. A complete document therefore holds
//! `Σ ExperCount × ComponentNumber × IndicatorNumber` results; a different
//! `InterviewNumber` is reported as a warning.

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, Error, Result};
use crate::evidence::{Assessment, BodyOfEvidence, ExpertGroup, LinguisticRating, RatingScale};
use crate::interval::{Interval, BOUND_EPSILON};

pub const FORMAT_VERSION: u32 = 1;

/// A validated evaluation document.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceData {
    pub format_version: Option<u32>,
    pub component_count: u32,
    pub indicator_count: u32,
    pub group_count: u32,
    pub estimate_count: u32,
    pub round_digits: u32,
    pub interview_count: u32,
    pub component_names: Vec<String>,
    pub indicator_names: Vec<String>,
    pub expert_groups: Vec<ExpertGroup>,
    pub estimate_scale: RatingScale,
    pub interview_results: Vec<LinguisticRating>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Document {
    #[serde(rename = "ComponentNumber")]
    component_number: i64,
    #[serde(rename = "IndicatorNumber")]
    indicator_number: i64,
    #[serde(rename = "ExpGroupsNumber")]
    exp_groups_number: i64,
    #[serde(rename = "EstimatesNumber")]
    estimates_number: i64,
    #[serde(rename = "RoundDigsNumber")]
    round_digs_number: i64,
    #[serde(rename = "InterviewNumber")]
    interview_number: i64,
    #[serde(rename = "ComponentNames")]
    component_names: Vec<String>,
    #[serde(rename = "IndicatorNames")]
    indicator_names: Vec<String>,
    #[serde(rename = "ExpertGroupes")]
    expert_groupes: Vec<WireGroup>,
    #[serde(rename = "EstimateScale")]
    estimate_scale: Vec<WireEstimate>,
    #[serde(rename = "InterviewRslt")]
    interview_rslt: Vec<WireEstimate>,
    #[serde(
        rename = "FormatVersion",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    format_version: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WireGroup {
    #[serde(rename = "GroupName")]
    group_name: String,
    #[serde(rename = "ExperCount")]
    exper_count: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WireEstimate {
    #[serde(rename = "Lingvo")]
    lingvo: String,
    #[serde(rename = "LBound", serialize_with = "write_bound")]
    l_bound: f64,
    #[serde(rename = "UBound", serialize_with = "write_bound")]
    u_bound: f64,
}

/// Whole bounds are written as integers (`0`, `1`), the rest as floats.
fn write_bound<S: serde::Serializer>(
    value: &f64,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    if value.fract() == 0.0 && (0.0..=1.0).contains(value) {
        serializer.serialize_u64(*value as u64)
    } else {
        serializer.serialize_f64(*value)
    }
}

impl From<&LinguisticRating> for WireEstimate {
    fn from(r: &LinguisticRating) -> Self {
        Self {
            lingvo: r.term().to_string(),
            l_bound: r.interval().lower(),
            u_bound: r.interval().upper(),
        }
    }
}

impl From<&SourceData> for Document {
    fn from(data: &SourceData) -> Self {
        Self {
            component_number: data.component_count.into(),
            indicator_number: data.indicator_count.into(),
            exp_groups_number: data.group_count.into(),
            estimates_number: data.estimate_count.into(),
            round_digs_number: data.round_digits.into(),
            interview_number: data.interview_count.into(),
            component_names: data.component_names.clone(),
            indicator_names: data.indicator_names.clone(),
            expert_groupes: data
                .expert_groups
                .iter()
                .map(|g| WireGroup {
                    group_name: g.name().to_string(),
                    exper_count: g.expert_count().into(),
                })
                .collect(),
            estimate_scale: data
                .estimate_scale
                .ratings()
                .iter()
                .map(WireEstimate::from)
                .collect(),
            interview_rslt: data
                .interview_results
                .iter()
                .map(WireEstimate::from)
                .collect(),
            format_version: data.format_version.map(i64::from),
        }
    }
}

fn check_count(diags: &mut Vec<Diagnostic>, field: &str, value: i64, min: i64) {
    if value < min {
        diags.push(Diagnostic::error(
            field,
            format!("must be at least {min}, got {value}"),
        ));
    } else if value > i64::from(u32::MAX) {
        diags.push(Diagnostic::error(field, format!("{value} is too large")));
    }
}

fn check_len(
    diags: &mut Vec<Diagnostic>,
    count_field: &str,
    count: i64,
    list_field: &str,
    len: usize,
) {
    if count >= 0 && count as u64 != len as u64 {
        diags.push(Diagnostic::error(
            list_field,
            format!("{count_field} declares {count} entries but {list_field} has {len}"),
        ));
    }
}

fn validate_document(doc: &Document) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    if let Some(v) = doc.format_version {
        if v != i64::from(FORMAT_VERSION) {
            diags.push(Diagnostic::error(
                "FormatVersion",
                format!("unsupported format version {v}, expected {FORMAT_VERSION}"),
            ));
        }
    }

    check_count(&mut diags, "ComponentNumber", doc.component_number, 1);
    check_count(&mut diags, "IndicatorNumber", doc.indicator_number, 1);
    check_count(&mut diags, "ExpGroupsNumber", doc.exp_groups_number, 1);
    check_count(&mut diags, "EstimatesNumber", doc.estimates_number, 1);
    check_count(&mut diags, "RoundDigsNumber", doc.round_digs_number, 0);
    check_count(&mut diags, "InterviewNumber", doc.interview_number, 0);

    check_len(
        &mut diags,
        "ComponentNumber",
        doc.component_number,
        "ComponentNames",
        doc.component_names.len(),
    );
    check_len(
        &mut diags,
        "IndicatorNumber",
        doc.indicator_number,
        "IndicatorNames",
        doc.indicator_names.len(),
    );
    check_len(
        &mut diags,
        "ExpGroupsNumber",
        doc.exp_groups_number,
        "ExpertGroupes",
        doc.expert_groupes.len(),
    );
    check_len(
        &mut diags,
        "EstimatesNumber",
        doc.estimates_number,
        "EstimateScale",
        doc.estimate_scale.len(),
    );
    check_len(
        &mut diags,
        "InterviewNumber",
        doc.interview_number,
        "InterviewRslt",
        doc.interview_rslt.len(),
    );

    for (i, g) in doc.expert_groupes.iter().enumerate() {
        check_count(
            &mut diags,
            &format!("ExpertGroupes[{i}].ExperCount"),
            g.exper_count,
            1,
        );
    }

    let mut terms: Vec<&str> = Vec::with_capacity(doc.estimate_scale.len());
    for (i, e) in doc.estimate_scale.iter().enumerate() {
        let field = format!("EstimateScale[{i}]");
        if e.lingvo.trim().is_empty() {
            diags.push(Diagnostic::error(&field, "Lingvo must not be empty"));
        } else if terms.contains(&e.lingvo.as_str()) {
            diags.push(Diagnostic::error(
                &field,
                format!("duplicate term {:?}", e.lingvo),
            ));
        }
        terms.push(&e.lingvo);
        if Interval::new(e.l_bound, e.u_bound).is_err() {
            diags.push(Diagnostic::error(
                &field,
                format!(
                    "bounds [{}, {}] must satisfy 0 <= LBound <= UBound <= 1",
                    e.l_bound, e.u_bound
                ),
            ));
        }
    }

    for (i, r) in doc.interview_rslt.iter().enumerate() {
        let field = format!("InterviewRslt[{i}]");
        match doc.estimate_scale.iter().find(|e| e.lingvo == r.lingvo) {
            None => diags.push(Diagnostic::error(
                &field,
                format!("term {:?} is not in EstimateScale", r.lingvo),
            )),
            Some(e) => {
                if (e.l_bound - r.l_bound).abs() > BOUND_EPSILON
                    || (e.u_bound - r.u_bound).abs() > BOUND_EPSILON
                {
                    diags.push(Diagnostic::error(
                        &field,
                        format!(
                            "term {:?} has bounds [{}, {}] but EstimateScale defines [{}, {}]",
                            r.lingvo, r.l_bound, r.u_bound, e.l_bound, e.u_bound
                        ),
                    ));
                }
            }
        }
    }

    let experts: i64 = doc
        .expert_groupes
        .iter()
        .map(|g| g.exper_count.max(0))
        .sum();
    let expected = experts
        .saturating_mul(doc.component_number.max(0))
        .saturating_mul(doc.indicator_number.max(0));
    if doc.interview_number != expected {
        diags.push(Diagnostic::warning(
            "InterviewNumber",
            format!(
                "{} results declared; a complete survey of {experts} experts × {} components × {} indicators has {expected}",
                doc.interview_number, doc.component_number, doc.indicator_number
            ),
        ));
    }

    diags
}

impl TryFrom<Document> for SourceData {
    type Error = Error;

    fn try_from(doc: Document) -> Result<Self> {
        let to_u32 = |v: i64| v as u32;
        let rating =
            |e: WireEstimate| LinguisticRating::new(e.lingvo, Interval::new(e.l_bound, e.u_bound)?);
        Ok(SourceData {
            format_version: doc.format_version.map(to_u32),
            component_count: to_u32(doc.component_number),
            indicator_count: to_u32(doc.indicator_number),
            group_count: to_u32(doc.exp_groups_number),
            estimate_count: to_u32(doc.estimates_number),
            round_digits: to_u32(doc.round_digs_number),
            interview_count: to_u32(doc.interview_number),
            component_names: doc.component_names,
            indicator_names: doc.indicator_names,
            expert_groups: doc
                .expert_groupes
                .into_iter()
                .map(|g| ExpertGroup::new(g.group_name, to_u32(g.exper_count)))
                .collect::<Result<_>>()?,
            estimate_scale: RatingScale::new(
                doc.estimate_scale
                    .into_iter()
                    .map(rating)
                    .collect::<Result<_>>()?,
            )?,
            interview_results: doc
                .interview_rslt
                .into_iter()
                .map(rating)
                .collect::<Result<_>>()?,
        })
    }
}

impl SourceData {
    /// All findings for this document, including warnings.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_document(&Document::from(self))
    }

    /// Total experts over all groups.
    pub fn total_experts(&self) -> u64 {
        self.expert_groups
            .iter()
            .map(|g| u64::from(g.expert_count()))
            .sum()
    }

    /// Number of interview results a complete survey holds.
    pub fn expected_interview_count(&self) -> u64 {
        self.total_experts() * u64::from(self.component_count) * u64::from(self.indicator_count)
    }
}

/// Parses and validates a document, returning it with any warnings.
pub fn parse_source_data_with_diagnostics(document: &str) -> Result<(SourceData, Vec<Diagnostic>)> {
    let doc: Document = serde_json::from_str(document)?;
    let diags = validate_document(&doc);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(Error::Validation(diags));
    }
    Ok((SourceData::try_from(doc)?, diags))
}

pub fn parse_source_data(document: &str) -> Result<SourceData> {
    parse_source_data_with_diagnostics(document).map(|(data, _)| data)
}

/// Pretty-printed JSON with the wire field names and full-precision bounds.
pub fn serialize_source_data(data: &SourceData) -> String {
    serde_json::to_string_pretty(&Document::from(data)).expect("document serialization cannot fail")
}

/// The narrowest scale rating whose closed interval contains `value`.
/// Ties go to the rating listed first.
pub fn map_measurement_to_rating(value: f64, scale: &RatingScale) -> Result<&LinguisticRating> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidInput(format!(
            "measurement {value} is outside [0, 1]"
        )));
    }
    let mut best: Option<&LinguisticRating> = None;
    for rating in scale.ratings() {
        if rating.interval().contains_value(value)
            && best.is_none_or(|b| rating.interval().width() < b.interval().width())
        {
            best = Some(rating);
        }
    }
    best.ok_or_else(|| Error::UnmappedValue {
        value,
        gaps: scale.uncovered_gaps(),
    })
}

/// Each group's assessments for one component/indicator cell, in group order.
///
/// Results are sliced per the interview layout and identical intervals are
/// merged, keeping the order in which they first appear.
pub fn assessments_by_group(
    data: &SourceData,
    component_index: usize,
    indicator_index: usize,
) -> Result<Vec<(ExpertGroup, Vec<Assessment>)>> {
    let components = data.component_count as usize;
    let indicators = data.indicator_count as usize;
    if component_index >= components {
        return Err(Error::InvalidInput(format!(
            "component index {component_index} out of range (0..{components})"
        )));
    }
    if indicator_index >= indicators {
        return Err(Error::InvalidInput(format!(
            "indicator index {indicator_index} out of range (0..{indicators})"
        )));
    }
    let required = data.expected_interview_count();
    if (data.interview_results.len() as u64) < required {
        return Err(Error::Validation(vec![Diagnostic::error(
            "InterviewRslt",
            format!(
                "{} results present but the interview layout needs {required}",
                data.interview_results.len()
            ),
        )]));
    }

    let cell = component_index * indicators + indicator_index;
    let mut base = 0usize;
    let mut out = Vec::with_capacity(data.expert_groups.len());
    for group in &data.expert_groups {
        let n = group.expert_count() as usize;
        let start = base + cell * n;
        let mut merged: Vec<(LinguisticRating, u32)> = Vec::new();
        for rating in &data.interview_results[start..start + n] {
            match merged
                .iter_mut()
                .find(|(r, _)| r.interval().approx_eq(&rating.interval()))
            {
                Some((_, count)) => *count += 1,
                None => merged.push((rating.clone(), 1)),
            }
        }
        let assessments = merged
            .into_iter()
            .map(|(rating, count)| Assessment::new(rating, count))
            .collect::<Result<Vec<_>>>()?;
        out.push((group.clone(), assessments));
        base += n * components * indicators;
    }
    Ok(out)
}

/// One bar of the cumulated-mass diagram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramRow {
    #[serde(flatten)]
    pub interval: Interval,
    #[serde(rename = "source")]
    pub source_name: String,
    pub mass: f64,
    #[serde(rename = "cumulative")]
    pub cumulative_mass: f64,
}

pub const DIAGRAM_CSV_HEADER: [&str; 5] = ["lower", "upper", "source", "mass", "cumulative"];

/// Per source, focal elements sorted by lower then upper bound with running
/// mass totals.
pub fn diagram_data(bodies: &[BodyOfEvidence]) -> Vec<DiagramRow> {
    let mut rows = Vec::new();
    for body in bodies {
        let mut elements = body.focal_elements().to_vec();
        elements.sort_by(|a, b| a.interval().canonical_cmp(&b.interval()));
        let mut cumulative = 0.0;
        for f in elements {
            cumulative += f.mass();
            rows.push(DiagramRow {
                interval: f.interval(),
                source_name: body.source_name().to_string(),
                mass: f.mass(),
                cumulative_mass: cumulative,
            });
        }
    }
    rows
}

/// Formats a number with `digits` decimals, or at full precision when `None`.
pub fn format_number(value: f64, digits: Option<u32>) -> String {
    match digits {
        Some(d) => format!("{value:.prec$}", prec = d as usize),
        None => value.to_string(),
    }
}

/// CSV with header `lower,upper,source,mass,cumulative`.
pub fn diagram_csv(rows: &[DiagramRow], digits: Option<u32>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(DIAGRAM_CSV_HEADER)
        .and_then(|_| {
            rows.iter().try_for_each(|r| {
                writer.write_record([
                    format_number(r.interval.lower(), digits),
                    format_number(r.interval.upper(), digits),
                    r.source_name.clone(),
                    format_number(r.mass, digits),
                    format_number(r.cumulative_mass, digits),
                ])
            })
        })
        .expect("writing CSV to memory cannot fail");
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

/// A single search observation as stored in an observation file.
///
/// The file is a JSON array of
/// `{"query": text, "hits": number, "frequency": number, "timestamp": ISO-8601}`.
/// Records sharing a timestamp form one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub query: String,
    pub hits: f64,
    pub frequency: f64,
    pub timestamp: String,
}

pub fn parse_observations(text: &str) -> Result<Vec<ObservationRecord>> {
    let records: Vec<ObservationRecord> = serde_json::from_str(text)?;
    if records.is_empty() {
        return Err(Error::InvalidInput(
            "observation file holds no records".into(),
        ));
    }
    Ok(records)
}
