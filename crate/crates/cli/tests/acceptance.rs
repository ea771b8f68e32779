//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p innoscore-cli --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use innoscore_core::indicators::{
    local_maxima, normalize, novelty, relevance, ObservationSet, TimeSeries,
};
use innoscore_core::pipeline::group_bodies;
use innoscore_core::{
    combine_all, combine_pair, fixtures, implementability, intersection_matrix, parse_source_data,
    rank, serialize_source_data, BodyOfEvidence, Interval, NormalizationMode, PairRule,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, want {want} ± {tol}")
    })
}

fn iv(l: f64, u: f64) -> Interval {
    Interval::new(l, u).unwrap()
}

fn worked_bodies() -> Vec<BodyOfEvidence> {
    let data = parse_source_data(fixtures::WORKED_EXAMPLE).unwrap();
    group_bodies(&data, 0, 0).unwrap()
}

fn table_3() -> Check {
    let m_a = [
        0.0833, 0.0417, 0.0833, 0.1667, 0.0417, 0.125, 0.125, 0.0417, 0.125, 0.0417, 0.0417,
        0.0417, 0.0417,
    ];
    let published: [(usize, f64, [f64; 13]); 2] = [
        (
            3,
            0.2500,
            [
                0.020825, 0.010425, 0.020825, 0.041675, 0.010425, 0.03125, 0.03125, 0.010425,
                0.03125, 0.010425, 0.010425, 0.010425, 0.010425,
            ],
        ),
        (
            4,
            0.1875,
            [
                0.015619, 0.007819, 0.015619, 0.031256, 0.007819, 0.023438, 0.023438, 0.007819,
                0.023438, 0.007819, 0.007819, 0.007819, 0.007819,
            ],
        ),
    ];
    let bodies = worked_bodies();
    let (a, b) = (&bodies[0], &bodies[1]);
    ensure(a.len() == 13, || {
        format!("group A has {} focal elements", a.len())
    })?;
    for (i, (f, want)) in a.focal_elements().iter().zip(m_a).enumerate() {
        close(f.mass(), want, 5e-5, &format!("M(A_{})", i + 1))?;
    }
    let matrix = intersection_matrix(a, b);
    let mut checked = 0;
    for (j, m_b, row) in published {
        close(
            b.focal_elements()[j - 1].mass(),
            m_b,
            5e-5,
            &format!("M(B_{j})"),
        )?;
        for (i, want) in row.iter().enumerate() {
            close(
                matrix[i][j - 1].product_mass,
                *want,
                5e-5,
                &format!("cell (i={}, j={j})", i + 1),
            )?;
            checked += 1;
        }
    }
    // every cell is the product of its row and column masses
    for (i, fa) in a.focal_elements().iter().enumerate() {
        for (j, fb) in b.focal_elements().iter().enumerate() {
            let cell = &matrix[i][j];
            close(
                cell.product_mass,
                fa.mass() * fb.mass(),
                1e-15,
                "cell product",
            )?;
            ensure(
                cell.overlap == fa.interval().overlaps(&fb.interval()),
                || format!("overlap flag at ({}, {})", i + 1, j + 1),
            )?;
        }
    }
    Ok(format!(
        "{checked} published cells and 13 row masses within ±5e-5"
    ))
}

fn conflict_and_k() -> Check {
    let bodies = worked_bodies();
    let ab = combine_pair(&bodies[0], &bodies[1], PairRule::Envelope).map_err(|e| e.to_string())?;
    close(ab.conflict_mass, 0.7215, 0.003, "conflict")?;
    close(ab.k_constant, 3.5906, 0.01, "K")?;
    Ok(format!(
        "conflict {:.7}, K {:.7}",
        ab.conflict_mass, ab.k_constant
    ))
}

fn table_4() -> Check {
    let data = parse_source_data(fixtures::WORKED_EXAMPLE).unwrap();
    let result = combine_all(&worked_bodies(), PairRule::Envelope).map_err(|e| e.to_string())?;
    let mut got: Vec<(f64, f64)> = result
        .combined
        .focal_elements()
        .iter()
        .map(|f| (f.interval().lower(), f.interval().upper()))
        .collect();
    got.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let want = vec![
        (0.0, 0.33),
        (0.34, 0.66),
        (0.67, 1.0),
        (0.78, 0.88),
        (0.89, 1.0),
    ];
    ensure(got == want, || format!("focal intervals {got:?}"))?;
    for (l, u, bel, pl) in fixtures::WORKED_EXAMPLE_REFERENCE {
        let q = iv(l, u);
        close(result.combined.belief(&q), bel, 0.005, &format!("Bel{q}"))?;
        close(
            result.combined.plausibility(&q),
            pl,
            0.005,
            &format!("Pl{q}"),
        )?;
    }
    let top = &rank(&result, &data.estimate_scale)[0];
    ensure(
        top.interval == iv(0.67, 1.0) && top.term.as_deref() == Some("основная № 3"),
        || format!("top estimate {} {:?}", top.interval, top.term),
    )?;
    Ok("5 intervals, 10 Bel/Pl values within ±0.005, top основная № 3".into())
}

fn random_body(rng: &mut ChaCha8Rng, max_elements: usize) -> BodyOfEvidence {
    let n = rng.random_range(1..=max_elements);
    let items: Vec<(Interval, f64)> = (0..n)
        .map(|_| {
            let a: u32 = rng.random_range(0..=20);
            let b: u32 = rng.random_range(0..=20);
            let interval = iv(f64::from(a.min(b)) / 20.0, f64::from(a.max(b)) / 20.0);
            (interval, f64::from(rng.random_range(1u32..100)))
        })
        .collect();
    BodyOfEvidence::from_weights("r", items).unwrap()
}

type Raw = Vec<(f64, f64, f64)>;

fn raw(body: &BodyOfEvidence) -> Raw {
    body.focal_elements()
        .iter()
        .map(|f| (f.interval().lower(), f.interval().upper(), f.mass()))
        .collect()
}

/// Double loop over all pairs, accumulating by envelope and multiplying by K.
fn combine_oracle(a: &Raw, b: &Raw) -> Option<(Raw, f64)> {
    let mut out: Raw = Vec::new();
    let mut conflict = 0.0;
    for &(la, ua, ma) in a {
        for &(lb, ub, mb) in b {
            if la.max(lb) <= ua.min(ub) {
                let (l, u) = (la.min(lb), ua.max(ub));
                match out.iter_mut().find(|e| e.0 == l && e.1 == u) {
                    Some(e) => e.2 += ma * mb,
                    None => out.push((l, u, ma * mb)),
                }
            } else {
                conflict += ma * mb;
            }
        }
    }
    if out.is_empty() {
        return None;
    }
    let k = 1.0 / (1.0 - conflict);
    out.iter_mut().for_each(|e| e.2 *= k);
    Some((out, conflict))
}

fn property_suite() -> Check {
    const CASES: usize = 10_000;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1dea);
    let mut oracle_cases = 0;
    for case in 0..CASES {
        let fail = |what: &str| format!("case {case}: {what}");
        let max_elements = if case % 2 == 0 { 4 } else { 12 };
        let a = random_body(&mut rng, max_elements);
        let b = random_body(&mut rng, max_elements);
        for body in [&a, &b] {
            ensure((body.total_mass() - 1.0).abs() <= 1e-9, || fail("mass sum"))?;
        }
        for _ in 0..4 {
            let x: u32 = rng.random_range(0..=20);
            let y: u32 = rng.random_range(0..=20);
            let q = iv(f64::from(x.min(y)) / 20.0, f64::from(x.max(y)) / 20.0);
            ensure(a.belief(&q) <= a.plausibility(&q) + 1e-12, || {
                fail("Bel > Pl")
            })?;
        }
        let ab = combine_pair(&a, &b, PairRule::Envelope);
        let ba = combine_pair(&b, &a, PairRule::Envelope);
        let expected = if a.len() <= 4 && b.len() <= 4 {
            oracle_cases += 1;
            Some(combine_oracle(&raw(&a), &raw(&b)))
        } else {
            None
        };
        match (ab, ba) {
            (Ok(ab), Ok(ba)) => {
                ensure(raw(&ab.combined) == raw(&ba.combined), || {
                    fail("combine_pair not commutative")
                })?;
                ensure(
                    (ab.conflict_mass + ab.agreement_mass - 1.0).abs() <= 1e-9,
                    || fail("conflict + agreement != 1"),
                )?;
                ensure(ab.k_constant >= 1.0, || fail("K < 1"))?;
                ensure((ab.combined.total_mass() - 1.0).abs() <= 1e-9, || {
                    fail("combined mass sum")
                })?;
                if let Some(expected) = expected {
                    let (want, conflict) =
                        expected.ok_or_else(|| fail("oracle saw total conflict"))?;
                    let got = raw(&ab.combined);
                    let same = got.len() == want.len()
                        && want.iter().all(|w| {
                            got.iter()
                                .any(|g| g.0 == w.0 && g.1 == w.1 && (g.2 - w.2).abs() <= 1e-9)
                        });
                    ensure(same, || {
                        fail(&format!("oracle mismatch {got:?} vs {want:?}"))
                    })?;
                    close(ab.conflict_mass, conflict, 1e-12, &fail("oracle conflict"))?;
                }
            }
            (Err(_), Err(_)) => {
                if let Some(expected) = expected {
                    ensure(expected.is_none(), || fail("unexpected total conflict"))?;
                }
            }
            _ => return Err(fail("only one order failed")),
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{CASES} pairs, {oracle_cases} against the oracle, {elapsed:.2?}"
    ))
}

fn indicator_checks() -> Check {
    let obs = |v: &[f64]| ObservationSet::new(v.to_vec()).unwrap();
    let nov = novelty(&obs(&[0.0, 50.0, 100.0]), NormalizationMode::Linear);
    ensure(nov == 0.5, || format!("Nov([0, 50, 100]) = {nov}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..2_000 {
        let n = rng.random_range(1..30);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1e6)).collect();
        let set = obs(&values);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        for mode in [
            NormalizationMode::Linear,
            NormalizationMode::Statistical,
            NormalizationMode::Exponential,
        ] {
            let nv = novelty(&set, mode);
            let rl = relevance(&set, mode);
            ensure(
                (0.0..=1.0).contains(&nv) && (0.0..=1.0).contains(&rl),
                || format!("case {case} {mode}: Nov {nv}, Rel {rl}"),
            )?;
        }
        let exp = normalize(&set, NormalizationMode::Exponential);
        for (v, e) in values.iter().zip(&exp) {
            if *v == min {
                ensure(*e == 0.0, || {
                    format!("case {case}: exponential at minimum = {e}")
                })?;
            }
        }
        let times: Vec<f64> = (0..n).map(|t| t as f64).collect();
        if n >= 2 {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
            let imp = implementability(
                &TimeSeries::from_parts(&times, &a).unwrap(),
                &TimeSeries::from_parts(&times, &b).unwrap(),
            )
            .map_err(|e| e.to_string())?;
            ensure((0.0..=1.0).contains(&imp), || {
                format!("case {case}: Imp = {imp}")
            })?;
        }
    }
    ensure(
        normalize(&obs(&[0.0, 3.0, 9.0]), NormalizationMode::Exponential)[0] == 0.0,
        || "exponential with zero minimum".into(),
    )?;

    let times: Vec<f64> = (0..=10).map(f64::from).collect();
    let spikes = |at: &[usize]| -> Vec<f64> {
        (0..=10)
            .map(|t| if at.contains(&t) { 1.0 } else { 0.0 })
            .collect()
    };
    let nov_series = TimeSeries::from_parts(&times, &spikes(&[2, 6])).unwrap();
    let rel_series = TimeSeries::from_parts(&times, &spikes(&[1, 5, 9])).unwrap();
    ensure(local_maxima(&nov_series) == vec![2.0, 6.0], || {
        "novelty maxima".into()
    })?;
    ensure(local_maxima(&rel_series) == vec![1.0, 5.0, 9.0], || {
        "relevance maxima".into()
    })?;
    let imp = implementability(&nov_series, &rel_series).map_err(|e| e.to_string())?;
    ensure(imp == 0.6, || format!("Imp hand case = {imp}"))?;
    Ok("Nov([0,50,100]) = 0.5, Imp hand case = 0.6, 2000 random sets in range".into())
}

const FIELD_NAMES: [&str; 11] = [
    "ComponentNumber",
    "IndicatorNumber",
    "ExpGroupsNumber",
    "EstimatesNumber",
    "RoundDigsNumber",
    "InterviewNumber",
    "ComponentNames",
    "IndicatorNames",
    "ExpertGroupes",
    "EstimateScale",
    "InterviewRslt",
];

fn keys(value: &Value) -> Vec<String> {
    let mut k: Vec<String> = value
        .as_object()
        .map(|o| o.keys().cloned().collect())
        .unwrap_or_default();
    k.sort();
    k
}

fn format_round_trip() -> Check {
    let original: Value =
        serde_json::from_str(fixtures::SEARCH_SURVEY).map_err(|e| e.to_string())?;
    let data = parse_source_data(fixtures::SEARCH_SURVEY).map_err(|e| e.to_string())?;
    let text = serialize_source_data(&data);
    let written: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    ensure(written == original, || {
        "serialized document differs from the input".into()
    })?;
    let again = parse_source_data(&text).map_err(|e| e.to_string())?;
    ensure(serialize_source_data(&again) == text, || {
        "second round trip differs".into()
    })?;

    let mut expected: Vec<String> = FIELD_NAMES.iter().map(|s| s.to_string()).collect();
    expected.sort();
    ensure(keys(&written) == expected, || {
        format!("top-level keys {:?}", keys(&written))
    })?;
    let group_keys = keys(&written["ExpertGroupes"][0]);
    ensure(group_keys == ["ExperCount", "GroupName"], || {
        format!("group keys {group_keys:?}")
    })?;
    for list in ["EstimateScale", "InterviewRslt"] {
        let k = keys(&written[list][0]);
        ensure(k == ["LBound", "Lingvo", "UBound"], || {
            format!("{list} keys {k:?}")
        })?;
    }

    ensure(data.validate().is_empty(), || {
        format!("diagnostics {:?}", data.validate())
    })?;
    let layout = data.expected_interview_count();
    ensure(
        layout == 5 * 16 * 10 && data.interview_results.len() as u64 == layout,
        || format!("layout {layout}, results {}", data.interview_results.len()),
    )?;
    ensure(data.interview_count == 800, || "InterviewNumber".into())?;
    Ok("identity round trip, exact field names, 800 = 5·16·10·1".into())
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_innoscore"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(output.status.success(), || {
        format!(
            "{args:?} exited {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        )
    })?;
    Ok(output.stdout)
}

fn cli_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixture = dir.path().join("demo.json");
    let fixture = fixture.to_str().unwrap();
    run_cli(&["demo", "--export", fixture])?;
    let mut formats = 0;
    for format in ["json", "table", "csv"] {
        let args = ["evaluate", fixture, "--no-timestamp", "--format", format];
        let first = run_cli(&args)?;
        ensure(!first.is_empty(), || format!("{format}: empty output"))?;
        for _ in 0..2 {
            ensure(run_cli(&args)? == first, || {
                format!("{format}: output differs between runs")
            })?;
        }
        formats += 1;
    }
    Ok(format!("{formats} formats byte-identical over 3 runs"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("golden intersection matrix", table_3),
        ("golden conflict and K", conflict_and_k),
        ("golden fused Bel/Pl table", table_4),
        ("randomized property suite", property_suite),
        ("indicator checks", indicator_checks),
        ("document format round trip", format_round_trip),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.1?}]"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason} [{elapsed:.1?}]");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
