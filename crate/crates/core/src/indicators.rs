//! Novelty, relevance and implementability indicators.
//!
//! Novelty is one minus the mean normalised hit count over a set of search
//! queries: rarely found objects are new. Relevance is the mean normalised
//! access frequency. Implementability looks at how often the novelty and
//! relevance series recover, measured by the mean spacing of their local
//! maxima relative to the observed time span.
//!
//! Linear normalisation suits hit counts that fill their range evenly;
//! statistical normalisation tolerates rare outliers; exponential
//! normalisation suits unbounded maxima. The caller picks the mode.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw per-query observations (hit counts or access frequencies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    query_labels: Option<Vec<String>>,
}

impl ObservationSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("observation set is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "observation {bad} is not a finite non-negative number"
            )));
        }
        Ok(Self {
            values,
            query_labels: None,
        })
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} query labels for {} observations",
                labels.len(),
                values.len()
            )));
        }
        let mut set = Self::new(values)?;
        set.query_labels = Some(labels);
        Ok(set)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn query_labels(&self) -> Option<&[String]> {
        self.query_labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population standard deviation.
    fn std_dev(&self) -> f64 {
        let mean = self.mean();
        let var =
            self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.values.len() as f64;
        var.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    /// `(v - min) / (max - min)`; all zeros when `max == min`.
    #[default]
    Linear,
    /// `(v - mean) / std_dev`, clamped to `[0, 1]`; all zeros when `std_dev == 0`.
    Statistical,
    /// `1 - exp(1 - v / min)`, clamped; `min == 0` is replaced by 1.
    Exponential,
}

impl NormalizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationMode::Linear => "linear",
            NormalizationMode::Statistical => "statistical",
            NormalizationMode::Exponential => "exponential",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(NormalizationMode::Linear),
            "statistical" => Ok(NormalizationMode::Statistical),
            "exponential" => Ok(NormalizationMode::Exponential),
            other => Err(Error::InvalidInput(format!(
                "unknown normalization {other:?}, expected linear, statistical or exponential"
            ))),
        }
    }
}

/// Maps every observation onto `[0, 1]`.
pub fn normalize(values: &ObservationSet, mode: NormalizationMode) -> Vec<f64> {
    let raw: Vec<f64> = match mode {
        NormalizationMode::Linear => {
            let (min, max) = (values.min(), values.max());
            if max == min {
                vec![0.0; values.len()]
            } else {
                values
                    .values
                    .iter()
                    .map(|v| (v - min) / (max - min))
                    .collect()
            }
        }
        NormalizationMode::Statistical => {
            let (mean, sd) = (values.mean(), values.std_dev());
            if sd == 0.0 {
                vec![0.0; values.len()]
            } else {
                values.values.iter().map(|v| (v - mean) / sd).collect()
            }
        }
        NormalizationMode::Exponential => {
            let min = if values.min() == 0.0 {
                1.0
            } else {
                values.min()
            };
            values
                .values
                .iter()
                .map(|v| 1.0 - (1.0 - v / min).exp())
                .collect()
        }
    };
    raw.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

fn mean_normalized(values: &ObservationSet, mode: NormalizationMode) -> f64 {
    let normalized = normalize(values, mode);
    normalized.iter().sum::<f64>() / normalized.len() as f64
}

/// `1 - mean(normalize(hits))`.
pub fn novelty(hits: &ObservationSet, mode: NormalizationMode) -> f64 {
    (1.0 - mean_normalized(hits, mode)).clamp(0.0, 1.0)
}

/// `mean(normalize(frequencies))`.
pub fn relevance(frequencies: &ObservationSet, mode: NormalizationMode) -> f64 {
    mean_normalized(frequencies, mode).clamp(0.0, 1.0)
}

/// Indicator values over strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    points: Vec<(f64, f64)>,
}

impl TimeSeries {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("time series is empty".into()));
        }
        for &(t, v) in &points {
            if !t.is_finite() {
                return Err(Error::InvalidInput(format!("time {t} is not finite")));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "series value {v} at t={t} is outside [0, 1]"
                )));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput(format!(
                "times must be strictly increasing, got {} then {}",
                w[0].0, w[1].0
            )));
        }
        Ok(Self { points })
    }

    pub fn from_parts(times: &[f64], values: &[f64]) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} times for {} values",
                times.len(),
                values.len()
            )));
        }
        Self::new(times.iter().copied().zip(values.iter().copied()).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }
}

/// Times of local maxima.
///
/// A run of equal values is a maximum when each existing neighbour of the
/// run is strictly lower and the run has at least one neighbour; the first
/// time of the run is reported. Endpoints compare against their single
/// neighbour, so a monotone increasing series peaks at its last point.
pub fn local_maxima(series: &TimeSeries) -> Vec<f64> {
    let pts = &series.points;
    let n = pts.len();
    let mut maxima = Vec::new();
    let mut start = 0;
    while start < n {
        let value = pts[start].1;
        let mut end = start;
        while end + 1 < n && pts[end + 1].1 == value {
            end += 1;
        }
        let left_lower = start == 0 || pts[start - 1].1 < value;
        let right_lower = end == n - 1 || pts[end + 1].1 < value;
        let has_neighbour = start > 0 || end < n - 1;
        if left_lower && right_lower && has_neighbour {
            maxima.push(pts[start].0);
        }
        start = end + 1;
    }
    maxima
}

/// How mean gaps between maxima are mapped onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplementabilityConfig {
    /// Divisor for the mean gap; `None` uses the series span `t_m - t_0`.
    pub gap_scale: Option<f64>,
    /// Gap ratio assigned to a series with fewer than two maxima.
    pub sparse_gap_ratio: f64,
}

impl Default for ImplementabilityConfig {
    fn default() -> Self {
        Self {
            gap_scale: None,
            sparse_gap_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplementabilityBreakdown {
    pub value: f64,
    pub novelty_maxima: Vec<f64>,
    pub relevance_maxima: Vec<f64>,
    pub novelty_gap_ratio: f64,
    pub relevance_gap_ratio: f64,
    pub span: (f64, f64),
}

impl ImplementabilityBreakdown {
    /// True when either series had fewer than two maxima.
    pub fn used_sparse_fallback(&self) -> bool {
        self.novelty_maxima.len() < 2 || self.relevance_maxima.len() < 2
    }
}

const SPAN_TOLERANCE: f64 = 1e-9;

/// `1 - (g_nov + g_rel) / 2` where `g` is the normalised mean gap between
/// consecutive local maxima of each series.
pub fn implementability(nov_series: &TimeSeries, rel_series: &TimeSeries) -> Result<f64> {
    analyze_implementability(nov_series, rel_series, &ImplementabilityConfig::default())
        .map(|b| b.value)
}

pub fn analyze_implementability(
    nov_series: &TimeSeries,
    rel_series: &TimeSeries,
    config: &ImplementabilityConfig,
) -> Result<ImplementabilityBreakdown> {
    let (t0, tm) = (nov_series.start(), nov_series.end());
    if (rel_series.start() - t0).abs() > SPAN_TOLERANCE
        || (rel_series.end() - tm).abs() > SPAN_TOLERANCE
    {
        return Err(Error::InvalidInput(format!(
            "series spans differ: [{t0}, {tm}] vs [{}, {}]",
            rel_series.start(),
            rel_series.end()
        )));
    }
    if tm <= t0 {
        return Err(Error::InvalidInput(
            "implementability needs a series spanning a positive time interval".into(),
        ));
    }
    let scale = config.gap_scale.unwrap_or(tm - t0);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "gap scale {scale} must be positive"
        )));
    }
    if !(0.0..=1.0).contains(&config.sparse_gap_ratio) {
        return Err(Error::InvalidInput(format!(
            "sparse gap ratio {} must lie in [0, 1]",
            config.sparse_gap_ratio
        )));
    }

    let gap_ratio = |maxima: &[f64]| -> f64 {
        match maxima {
            [first, .., last] => {
                let mean_gap = (last - first) / (maxima.len() - 1) as f64;
                (mean_gap / scale).clamp(0.0, 1.0)
            }
            _ => config.sparse_gap_ratio,
        }
    };

    let novelty_maxima = local_maxima(nov_series);
    let relevance_maxima = local_maxima(rel_series);
    let novelty_gap_ratio = gap_ratio(&novelty_maxima);
    let relevance_gap_ratio = gap_ratio(&relevance_maxima);
    let value = (1.0 - 0.5 * (novelty_gap_ratio + relevance_gap_ratio)).clamp(0.0, 1.0);
    Ok(ImplementabilityBreakdown {
        value,
        novelty_maxima,
        relevance_maxima,
        novelty_gap_ratio,
        relevance_gap_ratio,
        span: (t0, tm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(v: &[f64]) -> ObservationSet {
        ObservationSet::new(v.to_vec()).unwrap()
    }

    fn series(values: &[f64]) -> TimeSeries {
        let times: Vec<f64> = (0..values.len()).map(|t| t as f64).collect();
        TimeSeries::from_parts(&times, values).unwrap()
    }

    #[test]
    fn linear_normalization() {
        assert_eq!(
            normalize(&obs(&[0.0, 50.0, 100.0]), NormalizationMode::Linear),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            normalize(&obs(&[7.0, 7.0]), NormalizationMode::Linear),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn exponential_normalization() {
        assert_eq!(
            normalize(&obs(&[10.0, 10.0, 10.0]), NormalizationMode::Exponential),
            vec![0.0; 3]
        );
        let n = normalize(&obs(&[10.0, 20.0]), NormalizationMode::Exponential);
        assert_eq!(n[0], 0.0);
        assert!((n[1] - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((n[1] - 0.6321).abs() < 1e-4);
        // zero minimum falls back to a unit denominator
        let n = normalize(&obs(&[0.0, 2.0]), NormalizationMode::Exponential);
        assert_eq!(n[0], 0.0);
        assert!((n[1] - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn statistical_normalization_is_clamped() {
        let n = normalize(
            &obs(&[0.0, 0.0, 0.0, 100.0]),
            NormalizationMode::Statistical,
        );
        assert!(n.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(n[0], 0.0);
        assert_eq!(n[3], 1.0);
        assert_eq!(
            normalize(&obs(&[3.0, 3.0]), NormalizationMode::Statistical),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn novelty_and_relevance_examples() {
        let hits = obs(&[0.0, 50.0, 100.0]);
        assert_eq!(novelty(&hits, NormalizationMode::Linear), 0.5);
        assert_eq!(relevance(&hits, NormalizationMode::Linear), 0.5);
        assert_eq!(
            novelty(&obs(&[5.0, 5.0, 5.0]), NormalizationMode::Linear),
            1.0
        );
        assert_eq!(relevance(&obs(&[9.0, 9.0]), NormalizationMode::Linear), 0.0);
        assert_eq!(novelty(&obs(&[42.0]), NormalizationMode::Exponential), 1.0);
        let rel = relevance(&obs(&[10.0, 20.0]), NormalizationMode::Exponential);
        assert!((rel - 0.3161).abs() < 1e-4);
    }

    #[test]
    fn observation_validation() {
        assert!(ObservationSet::new(vec![]).is_err());
        assert!(ObservationSet::new(vec![1.0, -2.0]).is_err());
        assert!(ObservationSet::new(vec![f64::NAN]).is_err());
        assert!(ObservationSet::with_labels(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn maxima_examples() {
        assert_eq!(
            local_maxima(&series(&[0.0, 1.0, 0.0, 1.0, 0.0])),
            vec![1.0, 3.0]
        );
        assert_eq!(local_maxima(&series(&[0.1, 0.2, 0.3, 0.4])), vec![3.0]);
        assert_eq!(local_maxima(&series(&[0.4, 0.3, 0.2])), vec![0.0]);
        assert_eq!(local_maxima(&series(&[0.0, 1.0, 1.0, 0.0])), vec![1.0]);
        assert!(local_maxima(&series(&[0.5, 0.5, 0.5])).is_empty());
        assert!(local_maxima(&series(&[0.5])).is_empty());
        // shoulder, not a peak
        assert_eq!(local_maxima(&series(&[0.0, 0.5, 0.5, 1.0])), vec![3.0]);
    }

    /// Independent statement of the plateau rule: index i is reported iff it
    /// starts a maximal run of equal values whose existing neighbours are
    /// both strictly lower, and the run is not the whole series.
    fn maxima_oracle(values: &[f64]) -> Vec<usize> {
        let n = values.len();
        (0..n)
            .filter(|&i| {
                let starts_run = i == 0 || values[i - 1] != values[i];
                let run_end = (i..n)
                    .take_while(|&k| values[k] == values[i])
                    .last()
                    .unwrap();
                let left = i == 0 || values[i - 1] < values[i];
                let right = run_end == n - 1 || values[run_end + 1] < values[i];
                starts_run && left && right && !(i == 0 && run_end == n - 1)
            })
            .collect()
    }

    #[test]
    fn maxima_match_exhaustive_oracle() {
        let levels = [0.0, 0.5, 1.0];
        for len in 1..=7usize {
            let total = 3usize.pow(len as u32);
            for code in 0..total {
                let mut c = code;
                let values: Vec<f64> = (0..len)
                    .map(|_| {
                        let v = levels[c % 3];
                        c /= 3;
                        v
                    })
                    .collect();
                let expected: Vec<f64> = maxima_oracle(&values)
                    .into_iter()
                    .map(|i| i as f64)
                    .collect();
                assert_eq!(
                    local_maxima(&series(&values)),
                    expected,
                    "values {values:?}"
                );
            }
        }
    }

    #[test]
    fn implementability_hand_case() {
        let times: Vec<f64> = (0..=10).map(f64::from).collect();
        let mut nov = vec![0.0; 11];
        nov[2] = 1.0;
        nov[6] = 1.0;
        let mut rel = vec![0.0; 11];
        rel[1] = 1.0;
        rel[5] = 1.0;
        rel[9] = 1.0;
        let nov = TimeSeries::from_parts(&times, &nov).unwrap();
        let rel = TimeSeries::from_parts(&times, &rel).unwrap();
        assert_eq!(local_maxima(&nov), vec![2.0, 6.0]);
        assert_eq!(local_maxima(&rel), vec![1.0, 5.0, 9.0]);
        assert_eq!(implementability(&nov, &rel).unwrap(), 0.6);
    }

    #[test]
    fn implementability_worst_case_without_maxima() {
        let flat = series(&[0.3, 0.3, 0.3]);
        let rising = series(&[0.1, 0.2, 0.3]);
        assert_eq!(implementability(&flat, &rising).unwrap(), 0.0);
        let b =
            analyze_implementability(&flat, &rising, &ImplementabilityConfig::default()).unwrap();
        assert!(b.used_sparse_fallback());
    }

    #[test]
    fn implementability_approaches_one_on_dense_recoveries() {
        let n = 1001;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = (0..n).map(|i| if i % 2 == 1 { 1.0 } else { 0.0 }).collect();
        let s = TimeSeries::from_parts(&times, &values).unwrap();
        let imp = implementability(&s, &s).unwrap();
        // one maximum every second sample: gap ratio 2 / 1000
        assert!((imp - (1.0 - 0.002)).abs() < 1e-12);
    }

    #[test]
    fn implementability_rejects_bad_spans() {
        let a = series(&[0.0, 1.0, 0.0]);
        let b = TimeSeries::from_parts(&[0.0, 1.0, 3.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(implementability(&a, &b).is_err());
        let single = series(&[0.5]);
        assert!(implementability(&single, &single).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![(0.0, 0.1), (0.0, 0.2)]).is_err());
        assert!(TimeSeries::new(vec![(0.0, 1.2)]).is_err());
    }

    #[test]
    fn custom_gap_conventions() {
        let s = series(&[0.0, 1.0, 0.0, 1.0, 0.0]);
        let config = ImplementabilityConfig {
            gap_scale: Some(8.0),
            sparse_gap_ratio: 1.0,
        };
        let b = analyze_implementability(&s, &s, &config).unwrap();
        assert_eq!(b.novelty_gap_ratio, 0.25);
        assert_eq!(b.value, 0.75);

        let flat = series(&[0.2, 0.2]);
        let config = ImplementabilityConfig {
            gap_scale: None,
            sparse_gap_ratio: 0.5,
        };
        assert_eq!(
            analyze_implementability(&flat, &flat, &config)
                .unwrap()
                .value,
            0.5
        );
    }
}
