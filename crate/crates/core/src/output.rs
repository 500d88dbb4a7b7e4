//! Text formatting shared by the CSV and JSON writers.

/// Locale-free scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_point(x: &[f64]) -> Vec<String> {
    x.iter().map(|v| fmt_f64(*v)).collect()
}

pub fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}
