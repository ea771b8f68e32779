//! Stateless HTTP/JSON front end over the evaluation pipeline.
//!
//! | method | path          | body                 | response               |
//! |--------|---------------|----------------------|------------------------|
//! | POST   | `/evaluate`   | evaluation document  | run report             |
//! | POST   | `/indicators` | observation array    | indicator report       |
//! | POST   | `/diagram`    | evaluation document  | array of diagram rows  |
//! | GET    | `/health`     |                      | `{"status": "ok"}`     |
//! | GET    | `/schema`     |                      | format documentation   |
//!
//! Bad input answers 400 with diagnostics, total conflict answers 422.
//! Responses never carry timestamps, so equal requests get equal bodies.

use axum::extract::Query;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use innoscore_core::indicators::ImplementabilityConfig;
use innoscore_core::pipeline::{
    evaluate, group_bodies, indicator_report, EvaluateOptions, FailureKind,
};
use innoscore_core::survey::{
    diagram_data, parse_observations, parse_source_data_with_diagnostics,
};
use innoscore_core::{Error, NormalizationMode, PairRule};

pub fn router() -> Router {
    Router::new()
        .route("/evaluate", post(evaluate_handler).options(preflight))
        .route("/indicators", post(indicators_handler).options(preflight))
        .route("/diagram", post(diagram_handler).options(preflight))
        .route("/health", get(health))
        .route("/schema", get(schema))
        .layer(axum::middleware::map_response(allow_cross_origin))
}

async fn allow_cross_origin(mut response: Response) -> Response {
    let headers = response.headers_mut();
    headers.insert(
        header::ACCESS_CONTROL_ALLOW_ORIGIN,
        HeaderValue::from_static("*"),
    );
    headers.insert(
        header::ACCESS_CONTROL_ALLOW_METHODS,
        HeaderValue::from_static("GET, POST, OPTIONS"),
    );
    headers.insert(
        header::ACCESS_CONTROL_ALLOW_HEADERS,
        HeaderValue::from_static("content-type"),
    );
    response
}

async fn preflight() -> StatusCode {
    StatusCode::NO_CONTENT
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

async fn schema() -> Json<Value> {
    Json(schema_document())
}

fn bad_request(err: Error) -> Response {
    let body = match err {
        Error::Validation(diagnostics) => {
            json!({"error": "validation", "diagnostics": diagnostics})
        }
        Error::Parse {
            line,
            column,
            message,
        } => {
            json!({"error": "parse", "line": line, "column": column, "message": message})
        }
        other => json!({"error": "invalid_input", "message": other.to_string()}),
    };
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

#[derive(Debug, Default, Deserialize)]
struct EvaluateParams {
    semantics: Option<String>,
    norm: Option<String>,
    round: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
struct IndicatorParams {
    norm: Option<String>,
    gap_scale: Option<f64>,
    sparse_gap_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct DiagramParams {
    component: Option<usize>,
    indicator: Option<usize>,
}

fn parse_or_default<T: std::str::FromStr<Err = Error> + Default>(
    value: Option<&str>,
) -> Result<T, Error> {
    value
        .map(str::parse)
        .transpose()
        .map(Option::unwrap_or_default)
}

async fn evaluate_handler(Query(params): Query<EvaluateParams>, body: String) -> Response {
    let options = match (
        parse_or_default::<PairRule>(params.semantics.as_deref()),
        parse_or_default::<NormalizationMode>(params.norm.as_deref()),
    ) {
        (Ok(rule), Ok(normalization)) => EvaluateOptions {
            rule,
            normalization,
            round_digits: params.round,
            generated_at: None,
        },
        (Err(e), _) | (_, Err(e)) => return bad_request(e),
    };
    let data = match parse_source_data_with_diagnostics(&body) {
        Ok((data, _)) => data,
        Err(e) => return bad_request(e),
    };
    let report = evaluate(&data, &options);

    let failures: Vec<Value> = report
        .failures()
        .map(|(eval, f)| {
            json!({
                "component": eval.component,
                "indicator": eval.indicator,
                "kind": f.kind,
                "step": f.step,
                "message": f.message,
            })
        })
        .collect();
    if report.has_invalid_input() {
        return (
            StatusCode::BAD_REQUEST,
            Json(json!({"error": "invalid_input", "failures": failures})),
        )
            .into_response();
    }
    if report
        .failures()
        .any(|(_, f)| f.kind == FailureKind::TotalConflict)
    {
        return (
            StatusCode::UNPROCESSABLE_ENTITY,
            Json(json!({"error": "total_conflict", "failures": failures})),
        )
            .into_response();
    }
    Json(report).into_response()
}

async fn indicators_handler(Query(params): Query<IndicatorParams>, body: String) -> Response {
    let mode = match parse_or_default::<NormalizationMode>(params.norm.as_deref()) {
        Ok(m) => m,
        Err(e) => return bad_request(e),
    };
    let defaults = ImplementabilityConfig::default();
    let config = ImplementabilityConfig {
        gap_scale: params.gap_scale.or(defaults.gap_scale),
        sparse_gap_ratio: params.sparse_gap_ratio.unwrap_or(defaults.sparse_gap_ratio),
    };
    match parse_observations(&body).and_then(|records| indicator_report(&records, mode, &config)) {
        Ok(report) => Json(report).into_response(),
        Err(e) => bad_request(e),
    }
}

async fn diagram_handler(Query(params): Query<DiagramParams>, body: String) -> Response {
    let data = match parse_source_data_with_diagnostics(&body) {
        Ok((data, _)) => data,
        Err(e) => return bad_request(e),
    };
    if data.interview_results.is_empty() {
        return Json(Vec::<Value>::new()).into_response();
    }
    match group_bodies(
        &data,
        params.component.unwrap_or(0),
        params.indicator.unwrap_or(0),
    ) {
        Ok(bodies) => Json(diagram_data(&bodies)).into_response(),
        Err(e) => bad_request(e),
    }
}

/// Machine-readable description of the accepted formats.
pub fn schema_document() -> Value {
    let estimate = json!({"Lingvo": "string", "LBound": "number in [0, 1]", "UBound": "number in [LBound, 1]"});
    json!({
        "evaluation_document": {
            "fields": {
                "ComponentNumber": "integer >= 1",
                "IndicatorNumber": "integer >= 1",
                "ExpGroupsNumber": "integer >= 1",
                "EstimatesNumber": "integer >= 1",
                "RoundDigsNumber": "integer >= 0 (display digits)",
                "InterviewNumber": "integer >= 0",
                "ComponentNames": "array of ComponentNumber strings",
                "IndicatorNames": "array of IndicatorNumber strings",
                "ExpertGroupes": {"array of ExpGroupsNumber": {"GroupName": "string", "ExperCount": "integer >= 1"}},
                "EstimateScale": {"array of EstimatesNumber": estimate},
                "InterviewRslt": {"array of InterviewNumber": estimate},
                "FormatVersion": "optional integer, 1"
            },
            "interview_layout": "results ordered by group, then component, then indicator, then expert; complete documents hold sum(ExperCount) * ComponentNumber * IndicatorNumber results",
            "rules": [
                "every InterviewRslt term must exist in EstimateScale with identical bounds",
                "scale terms are unique and non-empty",
                "list lengths equal their declared counts"
            ]
        },
        "observation_file": {
            "array of": {"query": "string", "hits": "number >= 0", "frequency": "number >= 0", "timestamp": "ISO-8601 text"},
            "snapshots": "records sharing a timestamp form one snapshot"
        },
        "diagram_csv_header": "lower,upper,source,mass,cumulative",
        "endpoints": {
            "POST /evaluate": {"query": {"semantics": "envelope|intersection", "norm": "linear|statistical|exponential", "round": "integer"}},
            "POST /indicators": {"query": {"norm": "linear|statistical|exponential", "gap_scale": "number", "sparse_gap_ratio": "number"}},
            "POST /diagram": {"query": {"component": "index", "indicator": "index"}},
            "GET /health": {},
            "GET /schema": {}
        },
        "status_codes": {"200": "ok", "400": "invalid input with diagnostics", "422": "total conflict between sources"}
    })
}
