//! Bundled example documents.

/// Three expert groups (120, 80 and 50 experts) rating one component on a
/// 13-term scale with nested main and auxiliary ratings.
pub const WORKED_EXAMPLE: &str = include_str!("../fixtures/worked_example.json");

/// Search-engine survey: 10 components, 1 indicator, 5 groups of 16,
/// a 20-term percentage scale and 800 results.
pub const SEARCH_SURVEY: &str = include_str!("../fixtures/search_survey.json");

/// Published Bel/Pl values for [`WORKED_EXAMPLE`] after fusing all three
/// groups: `(lower, upper, belief, plausibility)`, four-decimal rounding.
pub const WORKED_EXAMPLE_REFERENCE: [(f64, f64, f64, f64); 5] = [
    (0.00, 0.33, 0.1900, 0.1900),
    (0.34, 0.66, 0.1557, 0.1557),
    (0.67, 1.00, 0.6544, 0.6544),
    (0.89, 1.00, 0.0106, 0.6517),
    (0.78, 0.88, 0.0026, 0.6438),
];

/// Published conflict mass and K for the first two groups.
pub const WORKED_EXAMPLE_FIRST_STEP: (f64, f64) = (0.7214938, 3.5905837);
