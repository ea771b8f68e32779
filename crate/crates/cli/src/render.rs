//! Human-readable and CSV renderings of reports.

use std::fmt::Write as _;

use innoscore_core::combination::RankedEstimate;
use innoscore_core::fixtures::{WORKED_EXAMPLE_FIRST_STEP, WORKED_EXAMPLE_REFERENCE};
use innoscore_core::pipeline::{IndicatorReport, Outcome, RunReport};
use innoscore_core::survey::format_number;
use innoscore_core::{BodyOfEvidence, CombinationResult, Interval};

/// Left-aligned text table; widths count characters, not bytes.
fn table(header: &[&str], rows: &[Vec<String>], indent: &str) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let joined = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        let _ = writeln!(out, "{indent}{}", joined.trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn interval_text(i: &Interval, digits: u32) -> String {
    format!("{i:.prec$}", prec = digits as usize)
}

fn ranked_rows(ranked: &[RankedEstimate], digits: u32) -> Vec<Vec<String>> {
    let d = Some(digits);
    ranked
        .iter()
        .enumerate()
        .map(|(k, r)| {
            vec![
                (k + 1).to_string(),
                interval_text(&r.interval, digits),
                r.term.clone().unwrap_or_else(|| "-".into()),
                format_number(r.mass, d),
                format_number(r.belief, d),
                format_number(r.plausibility, d),
            ]
        })
        .collect()
}

pub fn run_report_table(report: &RunReport) -> String {
    let digits = report.metadata.round_digits;
    let d = Some(digits);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "fusion order: {}",
        report.metadata.fusion_order.join(" → ")
    );
    let _ = writeln!(out, "semantics: {}", report.metadata.semantics);
    if let Some(at) = &report.metadata.generated_at {
        let _ = writeln!(out, "generated: {at}");
    }
    let total = report.evaluations.len();
    for (n, eval) in report.evaluations.iter().enumerate() {
        let _ = writeln!(
            out,
            "\n[{}/{total}] {} / {}",
            n + 1,
            eval.component,
            eval.indicator
        );
        match &eval.outcome {
            Outcome::Failed { error } => {
                let _ = writeln!(out, "  FAILED: {}", error.message);
            }
            Outcome::Ok(cell) => {
                if !cell.steps.is_empty() {
                    let rows: Vec<Vec<String>> = cell
                        .steps
                        .iter()
                        .map(|s| {
                            vec![
                                s.step.to_string(),
                                s.source.clone(),
                                format_number(s.conflict_mass, d),
                                format_number(s.k_constant, d),
                            ]
                        })
                        .collect();
                    out.push_str(&table(&["step", "source", "conflict", "K"], &rows, "  "));
                }
                out.push_str(&table(
                    &["rank", "interval", "term", "mass", "Bel", "Pl"],
                    &ranked_rows(&cell.ranked, digits),
                    "  ",
                ));
                let _ = writeln!(
                    out,
                    "  expectation: [{}, {}]",
                    format_number(cell.expectation.lower, d),
                    format_number(cell.expectation.upper, d)
                );
                let top = &cell.top_estimate;
                let _ = writeln!(
                    out,
                    "  top estimate: {} {}",
                    top.term.as_deref().unwrap_or("(no matching term)"),
                    interval_text(&top.interval, digits)
                );
            }
        }
    }
    out
}

pub fn run_report_csv(report: &RunReport) -> String {
    let digits = Some(report.metadata.round_digits);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header = [
        "component",
        "indicator",
        "rank",
        "lower",
        "upper",
        "term",
        "mass",
        "belief",
        "plausibility",
    ];
    let mut records = vec![header.map(String::from).to_vec()];
    for eval in &report.evaluations {
        let Outcome::Ok(cell) = &eval.outcome else {
            continue;
        };
        for (k, r) in cell.ranked.iter().enumerate() {
            records.push(vec![
                eval.component.clone(),
                eval.indicator.clone(),
                (k + 1).to_string(),
                format_number(r.interval.lower(), digits),
                format_number(r.interval.upper(), digits),
                r.term.clone().unwrap_or_default(),
                format_number(r.mass, digits),
                format_number(r.belief, digits),
                format_number(r.plausibility, digits),
            ]);
        }
    }
    for record in records {
        writer
            .write_record(record)
            .expect("writing CSV to memory cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

pub fn indicator_table(report: &IndicatorReport, digits: u32) -> String {
    let d = Some(digits);
    let mut out = String::new();
    let _ = writeln!(out, "normalization: {}", report.normalization);
    let rows: Vec<Vec<String>> = report
        .snapshots
        .iter()
        .map(|s| {
            vec![
                s.timestamp.clone(),
                s.queries.len().to_string(),
                format_number(s.novelty, d),
                format_number(s.relevance, d),
            ]
        })
        .collect();
    out.push_str(&table(&["snapshot", "queries", "Nov", "Rel"], &rows, ""));
    for s in &report.snapshots {
        let _ = writeln!(out, "\n{}", s.timestamp);
        let rows: Vec<Vec<String>> = s
            .queries
            .iter()
            .map(|q| {
                vec![
                    q.query.clone(),
                    q.hits.to_string(),
                    format_number(q.normalized_hits, d),
                    q.frequency.to_string(),
                    format_number(q.normalized_frequency, d),
                ]
            })
            .collect();
        out.push_str(&table(
            &["query", "hits", "norm", "frequency", "norm"],
            &rows,
            "  ",
        ));
    }
    match report.implementability {
        Some(imp) => {
            let _ = writeln!(out, "\nimplementability: {}", format_number(imp, d));
            let _ = writeln!(out, "novelty maxima: {}", report.novelty_maxima.join(", "));
            let _ = writeln!(
                out,
                "relevance maxima: {}",
                report.relevance_maxima.join(", ")
            );
        }
        None => {
            let _ = writeln!(out, "\nimplementability: n/a");
        }
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

/// Side-by-side comparison of the bundled worked example with the
/// published figures.
pub fn demo_comparison(
    bodies: &[BodyOfEvidence],
    result: &CombinationResult,
    terms: impl Fn(&Interval) -> Option<String>,
) -> String {
    let mut out = String::new();
    let groups: Vec<String> = bodies
        .iter()
        .map(|b| format!("{} ({} focal elements)", b.source_name(), b.len()))
        .collect();
    let _ = writeln!(out, "groups: {}", groups.join(", "));
    for s in &result.steps {
        let _ = write!(
            out,
            "step {} (+{}): conflict {:.7}, K {:.7}",
            s.step, s.source, s.conflict_mass, s.k_constant
        );
        if s.step == 1 {
            let (c, k) = WORKED_EXAMPLE_FIRST_STEP;
            let _ = write!(out, "  [published: conflict {c}, K {k}]");
        }
        out.push('\n');
    }
    out.push('\n');
    let rows: Vec<Vec<String>> = WORKED_EXAMPLE_REFERENCE
        .iter()
        .map(|&(l, u, bel, pl)| {
            let q = Interval::new(l, u).expect("reference intervals are valid");
            let got_bel = result.combined.belief(&q);
            let got_pl = result.combined.plausibility(&q);
            let ok = (got_bel - bel).abs() < 0.005 && (got_pl - pl).abs() < 0.005;
            vec![
                interval_text(&q, 2),
                terms(&q).unwrap_or_else(|| "-".into()),
                format!("{got_bel:.4}"),
                format!("{bel:.4}"),
                format!("{got_pl:.4}"),
                format!("{pl:.4}"),
                if ok { "ok" } else { "MISMATCH" }.to_string(),
            ]
        })
        .collect();
    out.push_str(&table(
        &[
            "interval",
            "term",
            "Bel",
            "published",
            "Pl",
            "published",
            "±0.005",
        ],
        &rows,
        "",
    ));
    out
}
