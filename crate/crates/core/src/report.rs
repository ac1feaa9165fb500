//! Side-by-side tables of two quantities that should be equivalent.

use std::path::Path;

use crate::csvio::Table;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub key: f64,
    pub reference: f64,
    pub candidate: f64,
    /// `candidate / reference`, NaN on invalid rows.
    pub ratio: f64,
    /// Why the row could not be computed.
    pub error: Option<String>,
}

impl ComparisonRow {
    pub fn valid(key: f64, reference: f64, candidate: f64) -> Self {
        ComparisonRow {
            key,
            reference,
            candidate,
            ratio: candidate / reference,
            error: None,
        }
    }

    pub fn invalid(key: f64, error: impl ToString) -> Self {
        ComparisonRow {
            key,
            reference: f64::NAN,
            candidate: f64::NAN,
            ratio: f64::NAN,
            error: Some(error.to_string()),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.error.is_none() && self.ratio.is_finite() && self.ratio > 0.0
    }
}

/// Rows of `(key, reference, candidate, ratio)` with summary statistics over
/// the valid rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// Column names: key, reference, candidate.
    pub labels: [String; 3],
    pub rows: Vec<ComparisonRow>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// `ln candidate / ln reference` at the smallest valid key.
    pub log_ratio_at_smallest_key: f64,
}

impl ComparisonReport {
    pub fn new(labels: [&str; 3], rows: Vec<ComparisonRow>) -> Self {
        let valid: Vec<&ComparisonRow> = rows.iter().filter(|r| r.is_valid()).collect();
        let ratio_min = valid.iter().map(|r| r.ratio).fold(f64::NAN, f64::min);
        let ratio_max = valid.iter().map(|r| r.ratio).fold(f64::NAN, f64::max);
        let log_ratio_at_smallest_key = valid
            .iter()
            .min_by(|a, b| a.key.total_cmp(&b.key))
            .map_or(f64::NAN, |r| r.candidate.ln() / r.reference.ln());
        ComparisonReport {
            labels: labels.map(str::to_string),
            rows,
            ratio_min,
            ratio_max,
            log_ratio_at_smallest_key,
        }
    }

    pub fn keys(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.key).collect()
    }

    pub fn references(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.reference).collect()
    }

    pub fn candidates(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.candidate).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    pub fn valid_rows(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.is_valid())
    }

    pub fn all_valid(&self) -> bool {
        self.rows.iter().all(ComparisonRow::is_valid)
    }

    pub fn to_table(&self) -> Table {
        let [k, r, c] = &self.labels;
        let mut t = Table::new([k.as_str(), r.as_str(), c.as_str(), "ratio"]);
        t.rows = self
            .rows
            .iter()
            .map(|row| vec![row.key, row.reference, row.candidate, row.ratio])
            .collect();
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_table().write(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_ignores_invalid_rows() {
        let rows = vec![
            ComparisonRow::valid(0.5, 2.0, 3.0),
            ComparisonRow::invalid(0.1, "boom"),
            ComparisonRow::valid(0.25, 0.5, 0.25),
        ];
        let r = ComparisonReport::new(["delta", "phi_direct", "theta"], rows);
        assert_eq!(r.ratio_min, 0.5);
        assert_eq!(r.ratio_max, 1.5);
        assert!((r.log_ratio_at_smallest_key - 2.0).abs() < 1e-15);
        assert!(!r.all_valid());
        let t = r.to_table();
        assert_eq!(t.header, ["delta", "phi_direct", "theta", "ratio"]);
        assert!(t.rows[1][3].is_nan());
    }
}
