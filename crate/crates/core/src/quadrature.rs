//! Composite Gauss-Legendre panels and Chebyshev interpolation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

/// Node/weight pairs of a Gauss-Legendre rule on `[-1, 1]`, shared per order.
type NodeWeights = Arc<Vec<(f64, f64)>>;

#[derive(Debug, Clone)]
pub struct GaussRule {
    pairs: NodeWeights,
}

impl GaussRule {
    /// Rules are built once per order and reused. Orders below 2 are bumped to 2.
    pub fn new(order: usize) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<usize, NodeWeights>>> = OnceLock::new();
        let order = order.max(2);
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("gauss rule cache poisoned");
        let pairs = guard
            .entry(order)
            .or_insert_with(|| {
                let rule = GaussLegendre::new(order).expect("order >= 2");
                let mut pairs = rule.as_node_weight_pairs().to_vec();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                Arc::new(pairs)
            })
            .clone();
        Self { pairs }
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// `panels` equal sub-intervals of `[a, b]`, one rule per panel.
    pub fn panels<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                let hi = if k + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }

    /// Composite rule over `[a, b]` split first at `breaks` (points outside
    /// `(a, b)` are ignored), then into `panels` equal pieces per segment.
    pub fn panels_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        breaks: &[f64],
        panels: usize,
        mut f: F,
    ) -> f64 {
        segments(a, b, breaks)
            .windows(2)
            .map(|w| self.panels(w[0], w[1], panels, &mut f))
            .sum()
    }

    /// Node/weight list for the same composite rule as [`Self::panels_with_breaks`].
    pub fn composite_nodes(&self, a: f64, b: f64, breaks: &[f64], panels: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in segments(a, b, breaks).windows(2) {
            let h = (w[1] - w[0]) / panels.max(1) as f64;
            for k in 0..panels.max(1) {
                let lo = w[0] + h * k as f64;
                out.extend(self.mapped(lo, lo + h));
            }
        }
        out
    }
}

fn segments(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let span = hi - lo;
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo + 1e-12 * span && x < hi - 1e-12 * span)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if a > b {
        pts.reverse();
    }
    pts
}

/// Chebyshev series on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl ChebSeries {
    /// First-kind Chebyshev points on `[a, b]` for an `m`-term interpolant.
    pub fn points(a: f64, b: f64, m: usize) -> Vec<f64> {
        (0..m)
            .map(|k| {
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                0.5 * (a + b) + 0.5 * (b - a) * theta.cos()
            })
            .collect()
    }

    /// Interpolant through `values` sampled at [`Self::points`]`(a, b, values.len())`.
    pub fn from_values(a: f64, b: f64, values: &[f64]) -> Self {
        let m = values.len();
        let coeffs = (0..m)
            .map(|j| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let theta = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                        v * (j as f64 * theta).cos()
                    })
                    .sum();
                let scale = if j == 0 { 1.0 } else { 2.0 };
                scale * s / m as f64
            })
            .collect();
        Self { a, b, coeffs }
    }

    pub fn interpolate<F: FnMut(f64) -> f64>(a: f64, b: f64, m: usize, f: F) -> Self {
        let values: Vec<f64> = Self::points(a, b, m).into_iter().map(f).collect();
        Self::from_values(a, b, &values)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Magnitude of the trailing coefficients relative to the largest one;
    /// a cheap resolution indicator.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let n = self.coeffs.len();
        let tail = self.coeffs[n.saturating_sub(3)..]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        tail / max
    }
}

/// Piecewise Chebyshev interpolant on `[a, b]` split into equal panels.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCheb {
    a: f64,
    b: f64,
    pieces: Vec<ChebSeries>,
}

impl PiecewiseCheb {
    /// All sample points, panel by panel, `m` per panel.
    pub fn points(a: f64, b: f64, panels: usize, m: usize) -> Vec<f64> {
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|k| {
                let lo = a + h * k as f64;
                ChebSeries::points(lo, lo + h, m)
            })
            .collect()
    }

    /// Builds from values at [`Self::points`]`(a, b, panels, m)`.
    pub fn from_samples(a: f64, b: f64, panels: usize, m: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), panels * m, "sample count mismatch");
        let h = (b - a) / panels as f64;
        let pieces = values
            .chunks(m)
            .enumerate()
            .map(|(k, chunk)| {
                let lo = a + h * k as f64;
                ChebSeries::from_values(lo, lo + h, chunk)
            })
            .collect();
        Self { a, b, pieces }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Evaluates inside the domain; `None` outside.
    pub fn eval(&self, x: f64) -> Option<f64> {
        if !(x >= self.a && x <= self.b) {
            return None;
        }
        let n = self.pieces.len();
        let k = (((x - self.a) / (self.b - self.a)) * n as f64).floor() as usize;
        Some(self.pieces[k.min(n - 1)].eval(x))
    }

    pub fn tail_ratio(&self) -> f64 {
        let max = self
            .pieces
            .iter()
            .flat_map(|p| p.coeffs().iter())
            .fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            return 0.0;
        }
        self.pieces
            .iter()
            .map(|p| {
                let c = p.coeffs();
                c[c.len().saturating_sub(3)..].iter().fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .fold(0.0, f64::max)
            / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let rule = GaussRule::new(8);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
    }

    #[test]
    fn breaks_split_a_kink() {
        let rule = GaussRule::new(16);
        let v = rule.panels_with_breaks(-1.0, 2.0, &[0.0], 1, |x: f64| x.abs());
        assert!((v - 2.5).abs() < 1e-14);
        let nodes = rule.composite_nodes(-1.0, 2.0, &[0.0, 5.0], 2);
        assert_eq!(nodes.len(), 64);
        let s: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((s - 3.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let rule = GaussRule::new(6);
        let v = rule.panels_with_breaks(1.0, 0.0, &[0.5], 2, |x| x);
        assert!((v + 0.5).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_reproduces_smooth_function() {
        let s = ChebSeries::interpolate(0.0, 2.0, 24, |x| (x * 1.3).exp());
        for k in 0..50 {
            let x = 2.0 * k as f64 / 49.0;
            assert!((s.eval(x) - (x * 1.3).exp()).abs() < 1e-12 * (x * 1.3).exp());
        }
        assert!(s.tail_ratio() < 1e-13);
    }

    #[test]
    fn piecewise_chebyshev_tracks_a_steep_function() {
        let f = |y: f64| (-(-y).exp()).exp();
        let pts = PiecewiseCheb::points(-3.0, 5.0, 16, 24);
        let vals: Vec<f64> = pts.iter().map(|&y| f(y)).collect();
        let pc = PiecewiseCheb::from_samples(-3.0, 5.0, 16, 24, &vals);
        for k in 0..=200 {
            let y = -3.0 + 8.0 * k as f64 / 200.0;
            assert!((pc.eval(y).unwrap() - f(y)).abs() < 1e-13);
        }
        assert!(pc.eval(5.5).is_none());
    }
}
