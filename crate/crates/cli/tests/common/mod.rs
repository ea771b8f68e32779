#![allow(dead_code)]

/// Two single-expert groups whose only ratings are disjoint.
pub const CONFLICTING: &str = r#"{
  "ComponentNumber": 1,
  "IndicatorNumber": 1,
  "ExpGroupsNumber": 2,
  "EstimatesNumber": 2,
  "RoundDigsNumber": 2,
  "InterviewNumber": 2,
  "ComponentNames": ["widget"],
  "IndicatorNames": ["novelty"],
  "ExpertGroupes": [{"GroupName": "A", "ExperCount": 1}, {"GroupName": "B", "ExperCount": 1}],
  "EstimateScale": [
    {"Lingvo": "low", "LBound": 0, "UBound": 0.3},
    {"Lingvo": "high", "LBound": 0.7, "UBound": 1}
  ],
  "InterviewRslt": [
    {"Lingvo": "low", "LBound": 0, "UBound": 0.3},
    {"Lingvo": "high", "LBound": 0.7, "UBound": 1}
  ]
}"#;

/// Declared counts disagree with the lists, and one result uses an unknown term.
pub const BROKEN: &str = r#"{
  "ComponentNumber": 2,
  "IndicatorNumber": 1,
  "ExpGroupsNumber": 1,
  "EstimatesNumber": 1,
  "RoundDigsNumber": 2,
  "InterviewNumber": 1,
  "ComponentNames": ["widget"],
  "IndicatorNames": ["novelty"],
  "ExpertGroupes": [{"GroupName": "A", "ExperCount": 0}],
  "EstimateScale": [{"Lingvo": "low", "LBound": 0, "UBound": 0.3}],
  "InterviewRslt": [{"Lingvo": "medium", "LBound": 0.3, "UBound": 0.6}]
}"#;

/// Three daily snapshots of two queries.
pub const OBSERVATIONS: &str = r#"[
  {"query": "graphene battery", "hits": 120, "frequency": 40, "timestamp": "2024-01-01"},
  {"query": "solid electrolyte", "hits": 30, "frequency": 10, "timestamp": "2024-01-01"},
  {"query": "graphene battery", "hits": 90, "frequency": 80, "timestamp": "2024-01-02"},
  {"query": "solid electrolyte", "hits": 10, "frequency": 60, "timestamp": "2024-01-02"},
  {"query": "graphene battery", "hits": 150, "frequency": 20, "timestamp": "2024-01-03"},
  {"query": "solid electrolyte", "hits": 50, "frequency": 5, "timestamp": "2024-01-03"}
]"#;

pub fn no_results(doc: &str) -> String {
    let mut value: serde_json::Value = serde_json::from_str(doc).unwrap();
    value["InterviewRslt"] = serde_json::json!([]);
    value["InterviewNumber"] = serde_json::json!(0);
    value.to_string()
}
