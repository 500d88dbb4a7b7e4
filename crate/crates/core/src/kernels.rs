//! Gaussian and Newtonian kernels on the boundary `ℝⁿ⁻¹`, and convolutions of
//! their derivatives with the bump `ψ`.
//!
//! Convention: `R'ᵢψ := 2 ∂ᵢ (N(·, 0) ∗' ψ)`, which is the standard
//! `(n−1)`-dimensional Riesz transform (Fourier multiplier `−iξᵢ/|ξ|`). With
//! `ω_n` the volume of the unit ball of `ℝⁿ`, the boundary trace satisfies
//! `∂ᵢN(x', 0) = xᵢ / (nω_n |x'|ⁿ)` and `Δ'N(x', 0) = −|x'|⁻ⁿ / (nω_n)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::output::{fmt_f64, parse_f64};
use crate::profiles::SpatialBump;
use crate::quadrature::GaussRule;
use crate::{Error, Result};

/// Default exclusion margin `δ_eval`: direct quadrature needs `|x'| ≥ 1 + δ_eval`.
pub const DEFAULT_EVAL_MARGIN: f64 = 0.25;

/// Volume of the unit ball in `ℝⁿ`, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}

// Γ(k/2) for integer k ≥ 1.
fn gamma_half(k: usize) -> f64 {
    if k == 1 {
        return PI.sqrt();
    }
    if k == 2 {
        return 1.0;
    }
    (k as f64 / 2.0 - 1.0) * gamma_half(k - 2)
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `(4πt)^{-(n−1)/2} exp(−|y'|²/(4t))` with `n − 1 = y.len()`.
pub fn gaussian_prime(y: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime(t));
    }
    let d = y.len() as f64;
    Ok((4.0 * PI * t).powf(-0.5 * d) * (-norm2(y) / (4.0 * t)).exp())
}

/// Closed-form derivatives of the boundary trace `N(x', 0)` in `ℝⁿ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonTrace {
    /// `Δ'N`.
    Laplacian,
    /// `Dᵢ Δ'N`.
    DiLaplacian(usize),
    /// `D²ᵢ Δ'N`.
    DiiLaplacian(usize),
    /// `Σₖ Δ' D²ₖ N = (Δ')² N`.
    BiLaplacian,
    /// `Σₖ Dᵢ Δ' D²ₖ N`.
    DiBiLaplacian(usize),
}

/// Evaluates a [`NewtonTrace`] quantity at `x'` for space dimension `n = x.len() + 1`.
pub fn newton_trace_derivative(x: &[f64], which: NewtonTrace) -> Result<f64> {
    let n = x.len() + 1;
    let r2 = norm2(x);
    if r2 == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let axis = |i: usize| -> Result<f64> {
        x.get(i)
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("axis {i} out of range for n = {n}")))
    };
    let omega = unit_ball_volume(n);
    let r = r2.sqrt();
    let nf = n as f64;
    Ok(match which {
        NewtonTrace::Laplacian => -r.powf(-nf) / (nf * omega),
        NewtonTrace::DiLaplacian(i) => axis(i)? / (omega * r.powf(nf + 2.0)),
        NewtonTrace::DiiLaplacian(i) => {
            let xi = axis(i)?;
            (r.powf(-nf - 2.0) - (nf + 2.0) * xi * xi * r.powf(-nf - 4.0)) / omega
        }
        NewtonTrace::BiLaplacian => -3.0 / omega * r.powf(-nf - 2.0),
        NewtonTrace::DiBiLaplacian(i) => 3.0 * (nf + 2.0) / omega * axis(i)? * r.powf(-nf - 4.0),
    })
}

/// `(1/(2√π)) ∫₀^∞ τ^{-3/2} Γ'(x', τ) dτ` by quadrature in `log τ`. The exact
/// value is `−2Δ'N(x', 0)`.
pub fn heat_tail_weight(x: &[f64]) -> Result<f64> {
    let r2 = norm2(x);
    if r2 == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let d = x.len() as f64;
    let centre = r2.ln();
    let rule = GaussRule::new(16);
    let integral = rule.panels(centre - 6.0, centre + 80.0, 86, |y| {
        let tau = y.exp();
        tau.powf(-0.5 - 0.5 * d) * (4.0 * PI).powf(-0.5 * d) * (-r2 / (4.0 * tau)).exp()
    });
    Ok(integral / (2.0 * PI.sqrt()))
}

/// Heat flow of the bump, `U(x', u) = (Γ'(·, u) ∗ ψ)(x')`, and the derivatives
/// needed downstream, evaluated in one pass over the quadrature grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeatMoments {
    /// `∂ᵢU`.
    pub grad: [f64; 2],
    /// `Δ'U = ∂ᵤU`.
    pub lap: f64,
    /// `∂ᵢΔ'U`.
    pub grad_lap: [f64; 2],
    /// `(Δ')²U`.
    pub bilap: f64,
}

#[derive(Debug, Clone)]
struct ConvGrid {
    pts: Vec<[f64; 2]>,
    wts: Vec<f64>,
}

impl ConvGrid {
    fn build(bump: &SpatialBump, radial: usize, angular: usize) -> Self {
        let rule = GaussRule::new(16);
        let panels = (radial / 16).max(1);
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        if bump.dim() == 2 {
            let nodes = rule.composite_nodes(-1.0, 1.0, &[], 2 * panels);
            for (z, w) in nodes {
                let psi = bump.radial(z);
                if psi > 0.0 {
                    pts.push([z, 0.0]);
                    wts.push(w * psi);
                }
            }
        } else {
            let nodes = rule.composite_nodes(0.0, 1.0, &[], panels);
            let dtheta = 2.0 * PI / angular as f64;
            for (r, w) in nodes {
                let psi = bump.radial(r);
                if psi <= 0.0 {
                    continue;
                }
                for j in 0..angular {
                    let theta = dtheta * (j as f64 + 0.5);
                    pts.push([r * theta.cos(), r * theta.sin()]);
                    wts.push(w * r * dtheta * psi);
                }
            }
        }
        Self { pts, wts }
    }
}

/// Shared read-only state for kernel evaluations: dimension, `ω_n`, the bump,
/// its quadrature grid, and an optional radial table of `R'ψ`.
#[derive(Debug, Clone)]
pub struct KernelContext {
    n: usize,
    omega: f64,
    bump: SpatialBump,
    radial: usize,
    angular: usize,
    grid: ConvGrid,
    exclusion_radius: f64,
    riesz_table: Option<RieszTable>,
}

impl KernelContext {
    /// Default grid: 64 radial × 64 angular nodes for `n = 3`, 256 nodes for `n = 2`.
    pub fn new(bump: SpatialBump) -> Self {
        let radial = if bump.dim() == 2 { 128 } else { 64 };
        Self::with_resolution(bump, radial, 64)
    }

    /// For `n = 2` the 1-D grid over `[-1, 1]` has `2·radial` nodes.
    pub fn with_resolution(bump: SpatialBump, radial: usize, angular: usize) -> Self {
        let grid = ConvGrid::build(&bump, radial, angular);
        Self {
            n: bump.dim(),
            omega: unit_ball_volume(bump.dim()),
            bump,
            radial,
            angular,
            grid,
            exclusion_radius: 1.0 + DEFAULT_EVAL_MARGIN,
            riesz_table: None,
        }
    }

    /// Same context with both grid resolutions doubled.
    pub fn refined(&self) -> Self {
        let mut ctx = Self::with_resolution(self.bump.clone(), 2 * self.radial, 2 * self.angular);
        ctx.exclusion_radius = self.exclusion_radius;
        ctx
    }

    pub fn with_eval_margin(mut self, margin: f64) -> Self {
        self.exclusion_radius = 1.0 + margin;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Boundary dimension `n − 1`.
    pub fn boundary_dim(&self) -> usize {
        self.n - 1
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn bump(&self) -> &SpatialBump {
        &self.bump
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    pub fn grid_size(&self) -> usize {
        self.grid.pts.len()
    }

    pub fn riesz_table(&self) -> Option<&RieszTable> {
        self.riesz_table.as_ref()
    }

    pub fn set_riesz_table(&mut self, table: RieszTable) -> Result<()> {
        if table.n != self.n || table.height != self.bump.height() {
            return Err(Error::Config(format!(
                "riesz table built for n={} height={} does not match context n={} height={}",
                table.n,
                table.height,
                self.n,
                self.bump.height()
            )));
        }
        self.riesz_table = Some(table);
        Ok(())
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n - 1 {
            return Err(Error::InvalidParams(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n - 1
            )));
        }
        Ok(())
    }

    fn check_axis(&self, i: usize) -> Result<()> {
        if i >= self.n - 1 {
            return Err(Error::InvalidParams(format!("axis {i} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    fn check_exterior(&self, x: &[f64]) -> Result<()> {
        self.check_point(x)?;
        let radius = norm2(x).sqrt();
        if radius < self.exclusion_radius {
            return Err(Error::TooCloseToSupport { radius, min_radius: self.exclusion_radius });
        }
        Ok(())
    }

    fn diff(x: &[f64], z: &[f64; 2]) -> [f64; 2] {
        [x[0] - z[0], x.get(1).map_or(0.0, |v| v - z[1])]
    }

    fn convolve<F: Fn([f64; 2], f64) -> f64>(&self, x: &[f64], kernel: F) -> f64 {
        self.grid
            .pts
            .iter()
            .zip(&self.grid.wts)
            .map(|(z, w)| {
                let d = Self::diff(x, z);
                w * kernel(d, d[0] * d[0] + d[1] * d[1])
            })
            .sum()
    }

    /// `R'ᵢψ(x')` for `|x'| ≥ 1 + δ_eval`; uses the radial table when one is
    /// attached and covers `|x'|`.
    pub fn riesz_psi(&self, x: &[f64], i: usize) -> Result<f64> {
        self.check_exterior(x)?;
        self.check_axis(i)?;
        if let Some(table) = &self.riesz_table {
            let r = norm2(x).sqrt();
            if let Some(rho) = table.magnitude(r) {
                return Ok(x[i] / r * rho);
            }
        }
        Ok(self.riesz_psi_direct(x, i))
    }

    fn riesz_psi_direct(&self, x: &[f64], i: usize) -> f64 {
        let c = 2.0 / (self.n as f64 * self.omega);
        let half_n = self.n as f64 / 2.0;
        c * self.convolve(x, |d, r2| d[i] / r2.powf(half_n))
    }

    /// `Dⱼ R'ᵢψ(x')`.
    pub fn riesz_jacobian(&self, x: &[f64], i: usize, j: usize) -> Result<f64> {
        self.check_exterior(x)?;
        self.check_axis(i)?;
        self.check_axis(j)?;
        let nf = self.n as f64;
        let c = 2.0 / (nf * self.omega);
        let delta = if i == j { 1.0 } else { 0.0 };
        Ok(c * self.convolve(x, |d, r2| {
            let rn = r2.powf(0.5 * nf);
            delta / rn - nf * d[i] * d[j] / (rn * r2)
        }))
    }

    /// `Σₖ Dₖ R'ₖψ(x') = 2Δ'(N ∗' ψ)(x')`.
    pub fn div_riesz_psi(&self, x: &[f64]) -> Result<f64> {
        self.check_exterior(x)?;
        let nf = self.n as f64;
        let c = 2.0 / (nf * self.omega);
        Ok(-c * self.convolve(x, |_, r2| r2.powf(-0.5 * nf)))
    }

    /// `Δ' R'ᵢψ(x') = 2 (Dᵢ Δ'N ∗' ψ)(x')`.
    pub fn laplacian_riesz_psi(&self, x: &[f64], i: usize) -> Result<f64> {
        self.check_exterior(x)?;
        self.check_axis(i)?;
        let nf = self.n as f64;
        Ok(2.0 / self.omega * self.convolve(x, |d, r2| d[i] / r2.powf(0.5 * nf + 1.0)))
    }

    /// `Σₖ Dₖ Δ' R'ₖψ(x') = 2 ((Δ')² N ∗' ψ)(x')`.
    pub fn div_laplacian_riesz_psi(&self, x: &[f64]) -> Result<f64> {
        self.check_exterior(x)?;
        let nf = self.n as f64;
        Ok(-6.0 / self.omega * self.convolve(x, |_, r2| r2.powf(-0.5 * nf - 1.0)))
    }

    /// Heat-flow moments of the bump at `(x', u)`, `u > 0`.
    pub fn heat_moments(&self, x: &[f64], u: f64) -> Result<HeatMoments> {
        self.check_point(x)?;
        if !(u > 0.0) {
            return Err(Error::NonpositiveTime(u));
        }
        Ok(self.heat_moments_unchecked(x, u))
    }

    pub(crate) fn heat_moments_unchecked(&self, x: &[f64], u: f64) -> HeatMoments {
        let d = (self.n - 1) as f64;
        let norm = (4.0 * PI * u).powf(-0.5 * d);
        let inv4u = 1.0 / (4.0 * u);
        let inv2u = 2.0 * inv4u;
        let (a_lap, c_lap) = (inv4u / u, d * inv2u);
        let (a_gl, c_gl) = ((d + 2.0) * inv4u / u, inv2u * inv4u / u);
        let mut m = HeatMoments::default();
        for (z, w) in self.grid.pts.iter().zip(&self.grid.wts) {
            let diff = Self::diff(x, z);
            let r2 = diff[0] * diff[0] + diff[1] * diff[1];
            let g = w * (-r2 * inv4u).exp();
            if g == 0.0 {
                continue;
            }
            let lap = r2 * a_lap - c_lap;
            let gl = a_gl - r2 * c_gl;
            let bilap = d * inv2u / u - r2 * inv2u / (u * u) + lap * lap;
            m.grad[0] -= diff[0] * inv2u * g;
            m.grad[1] -= diff[1] * inv2u * g;
            m.lap += lap * g;
            m.grad_lap[0] += diff[0] * gl * g;
            m.grad_lap[1] += diff[1] * gl * g;
            m.bilap += bilap * g;
        }
        m.grad[0] *= norm;
        m.grad[1] *= norm;
        m.lap *= norm;
        m.grad_lap[0] *= norm;
        m.grad_lap[1] *= norm;
        m.bilap *= norm;
        m
    }

    /// Builds a radial table of `R'ψ` on `[r_min, r_max]`, log-spaced with
    /// ratio `e^{step}` between nodes.
    pub fn build_riesz_table(&self, r_min: f64, r_max: f64, step: f64) -> Result<RieszTable> {
        if !(r_min >= self.exclusion_radius && r_max > r_min && step > 0.0) {
            return Err(Error::InvalidParams(format!(
                "riesz table range [{r_min}, {r_max}] must start at or beyond {}",
                self.exclusion_radius
            )));
        }
        let count = ((r_max / r_min).ln() / step).ceil() as usize + 1;
        let ratio = (r_max / r_min).ln() / (count - 1) as f64;
        let mut nodes = Vec::with_capacity(count);
        for k in 0..count {
            let r = r_min * (ratio * k as f64).exp();
            let mut x = vec![0.0; self.n - 1];
            x[0] = r;
            nodes.push(RieszNode {
                r,
                rho: self.riesz_psi_direct(&x, 0),
                drho: self.riesz_jacobian(&x, 0, 0)?,
            });
        }
        Ok(RieszTable { n: self.n, height: self.bump.height(), nodes })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RieszNode {
    r: f64,
    rho: f64,
    drho: f64,
}

/// Radial profile `ρ(r)` with `R'ᵢψ(x') = (xᵢ/|x'|)·ρ(|x'|)`, tabulated with its
/// derivative and interpolated by cubic Hermite segments.
///
/// CSV layout: a header line
/// `# bls-riesz-table v1 n=<n> height=<h>`, the column line `r,rho,drho`,
/// then one row per node in increasing `r`, each value with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszTable {
    n: usize,
    height: f64,
    nodes: Vec<RieszNode>,
}

impl RieszTable {
    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0].r, self.nodes[self.nodes.len() - 1].r)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `ρ(r)`, or `None` outside the tabulated range.
    pub fn magnitude(&self, r: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(r >= lo && r <= hi) {
            return None;
        }
        let k = self.nodes.partition_point(|node| node.r <= r).clamp(1, self.nodes.len() - 1);
        let (a, b) = (self.nodes[k - 1], self.nodes[k]);
        let h = b.r - a.r;
        let s = (r - a.r) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Some(h00 * a.rho + h10 * h * a.drho + h01 * b.rho + h11 * h * b.drho)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# bls-riesz-table v1 n={} height={}\nr,rho,drho\n",
            self.n,
            fmt_f64(self.height)
        );
        for node in &self.nodes {
            let _ = writeln!(out, "{},{},{}", fmt_f64(node.r), fmt_f64(node.rho), fmt_f64(node.drho));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("riesz table: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "#" || fields[1] != "bls-riesz-table" || fields[2] != "v1" {
            return Err(bad("unrecognized header"));
        }
        let n = fields[3]
            .strip_prefix("n=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("bad n"))?;
        let height = fields[4]
            .strip_prefix("height=")
            .and_then(parse_f64)
            .ok_or_else(|| bad("bad height"))?;
        if lines.next() != Some("r,rho,drho") {
            return Err(bad("missing column line"));
        }
        let mut nodes = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let vals: Vec<f64> = line.split(',').filter_map(parse_f64).collect();
            if vals.len() != 3 {
                return Err(bad(&format!("malformed row '{line}'")));
            }
            if nodes.last().is_some_and(|p: &RieszNode| p.r >= vals[0]) {
                return Err(bad("radii must increase"));
            }
            nodes.push(RieszNode { r: vals[0], rho: vals[1], drho: vals[2] });
        }
        if nodes.len() < 2 {
            return Err(bad("need at least two nodes"));
        }
        Ok(Self { n, height, nodes })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize) -> KernelContext {
        KernelContext::new(SpatialBump::new(n, 2.0).unwrap())
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_has_unit_mass() {
        let rule = GaussRule::new(16);
        for t in [0.01f64, 0.1, 1.0] {
            let l = 12.0 * t.sqrt();
            let one_d = rule.panels(-l, l, 8, |y| gaussian_prime(&[y], t).unwrap());
            assert!((one_d - 1.0).abs() < 1e-8, "t={t}: {one_d}");
            let two_d = rule.panels(0.0, l, 8, |r| 2.0 * PI * r * gaussian_prime(&[r, 0.0], t).unwrap());
            assert!((two_d - 1.0).abs() < 1e-8, "t={t}: {two_d}");
        }
        assert!(matches!(gaussian_prime(&[1.0], 0.0), Err(Error::NonpositiveTime(_))));
    }

    #[test]
    fn heat_tail_matches_newton_laplacian() {
        for x in [vec![0.7], vec![3.0], vec![1.0, 2.0], vec![-0.3, 0.2]] {
            let lhs = heat_tail_weight(&x).unwrap();
            let rhs = -2.0 * newton_trace_derivative(&x, NewtonTrace::Laplacian).unwrap();
            assert!((lhs - rhs).abs() <= 1e-6 * rhs.abs(), "{x:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn newton_trace_rejects_origin() {
        assert!(matches!(
            newton_trace_derivative(&[0.0, 0.0], NewtonTrace::BiLaplacian),
            Err(Error::OriginSingularity)
        ));
    }

    #[test]
    fn newton_trace_consistent_with_differences() {
        let h = 1e-4;
        for x in [[1.3, -0.4], [2.0, 2.5]] {
            for i in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let f = |p: &[f64], w| newton_trace_derivative(p, w).unwrap();
                let d_lap = (f(&xp, NewtonTrace::Laplacian) - f(&xm, NewtonTrace::Laplacian)) / (2.0 * h);
                let exact = f(&x, NewtonTrace::DiLaplacian(i));
                assert!((d_lap - exact).abs() < 1e-6 * exact.abs().max(1e-3));
                let dd = (f(&xp, NewtonTrace::DiLaplacian(i)) - f(&xm, NewtonTrace::DiLaplacian(i))) / (2.0 * h);
                let exact = f(&x, NewtonTrace::DiiLaplacian(i));
                assert!((dd - exact).abs() < 1e-6 * exact.abs().max(1e-3));
                let db = (f(&xp, NewtonTrace::BiLaplacian) - f(&xm, NewtonTrace::BiLaplacian)) / (2.0 * h);
                let exact = f(&x, NewtonTrace::DiBiLaplacian(i));
                assert!((db - exact).abs() < 1e-6 * exact.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn exclusion_zone_is_enforced() {
        let c = ctx(3);
        assert!(matches!(c.riesz_psi(&[1.1, 0.0], 0), Err(Error::TooCloseToSupport { .. })));
        assert!(c.riesz_psi(&[1.0, 0.0, 0.0], 0).is_err());
    }

    #[test]
    fn riesz_is_odd_and_decays_like_far_field() {
        for n in [2, 3] {
            let c = ctx(n);
            let mass = c.bump().mass();
            let mut x = vec![0.0; n - 1];
            let mut prev: Option<f64> = None;
            for r in [8.0, 16.0, 32.0, 64.0] {
                x[0] = r;
                let plus = c.riesz_psi(&x, 0).unwrap();
                x[0] = -r;
                let minus = c.riesz_psi(&x, 0).unwrap();
                assert!((plus + minus).abs() < 1e-13 * plus.abs());
                let far = 2.0 * mass / (n as f64 * c.omega()) * r.powi(1 - n as i32);
                let ratio = plus / far;
                if let Some(p) = prev {
                    assert!((ratio - 1.0f64).abs() < (p - 1.0f64).abs() + 1e-12);
                }
                prev = Some(ratio);
            }
            assert!((prev.unwrap() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn laplacian_riesz_matches_stencil() {
        let c = ctx(3);
        let h = 1e-3;
        for r in [4.0, 8.0, 16.0] {
            let x = [r * 0.6, r * 0.8];
            let centre = c.riesz_psi(&x, 0).unwrap();
            let mut stencil = -4.0 * centre;
            for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
                stencil += c.riesz_psi(&[x[0] + dx, x[1] + dy], 0).unwrap();
            }
            stencil /= h * h;
            let exact = c.laplacian_riesz_psi(&x, 0).unwrap();
            assert!((stencil - exact).abs() < 1e-4 * exact.abs(), "r={r}: {stencil} vs {exact}");
        }
    }

    #[test]
    fn divergence_is_trace_of_jacobian() {
        let c = ctx(3);
        let x = [2.0, -1.5];
        let trace = c.riesz_jacobian(&x, 0, 0).unwrap() + c.riesz_jacobian(&x, 1, 1).unwrap();
        let div = c.div_riesz_psi(&x).unwrap();
        assert!((trace - div).abs() < 1e-13 * div.abs());
        let lap_trace: f64 = (0..2)
            .map(|i| {
                let h = 1e-4;
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                (c.laplacian_riesz_psi(&xp, i).unwrap() - c.laplacian_riesz_psi(&xm, i).unwrap()) / (2.0 * h)
            })
            .sum();
        let exact = c.div_laplacian_riesz_psi(&x).unwrap();
        assert!((lap_trace - exact).abs() < 1e-6 * exact.abs());
    }

    #[test]
    fn subordination_reproduces_riesz() {
        for n in [2, 3] {
            let c = ctx(n);
            let mut x = vec![0.0; n - 1];
            x[0] = 2.5;
            if n == 3 {
                x[1] = 1.0;
            }
            let r2 = norm2(&x);
            let lo = ((r2.sqrt() - 1.0).powi(2) / 3000.0).ln();
            let hi = r2.ln() + 70.0;
            let rule = GaussRule::new(16);
            let integral = rule.panels(lo, hi, ((hi - lo) * 2.0) as usize, |y| {
                let u = y.exp();
                u.sqrt() * c.heat_moments(&x, u).unwrap().grad[0]
            });
            let via_heat = -integral / PI.sqrt();
            let direct = c.riesz_psi(&x, 0).unwrap();
            assert!((via_heat - direct).abs() < 1e-8 * direct.abs(), "n={n}: {via_heat} vs {direct}");
        }
    }

    #[test]
    fn heat_moments_match_differences() {
        let c = ctx(3);
        let x = [1.4, 0.3];
        let u = 0.2;
        let h = 1e-4;
        let m = c.heat_moments(&x, u).unwrap();
        let dm = |dx: f64, dy: f64| c.heat_moments(&[x[0] + dx, x[1] + dy], u).unwrap();
        let lap_of_grad = (dm(h, 0.0).grad[0] - 2.0 * m.grad[0] + dm(-h, 0.0).grad[0]
            + dm(0.0, h).grad[0] - 2.0 * m.grad[0] + dm(0.0, -h).grad[0])
            / (h * h);
        assert!((lap_of_grad - m.grad_lap[0]).abs() < 1e-5 * m.grad_lap[0].abs());
        let grad_of_lap = (dm(0.0, h).lap - dm(0.0, -h).lap) / (2.0 * h);
        assert!((grad_of_lap - m.grad_lap[1]).abs() < 1e-6 * m.grad_lap[1].abs().max(1e-3));
        let bilap = (dm(h, 0.0).grad_lap[0] - dm(-h, 0.0).grad_lap[0]
            + dm(0.0, h).grad_lap[1] - dm(0.0, -h).grad_lap[1])
            / (2.0 * h);
        assert!((bilap - m.bilap).abs() < 1e-6 * m.bilap.abs());
    }

    #[test]
    fn riesz_table_round_trip_and_accuracy() {
        let mut c = ctx(3);
        let table = c.build_riesz_table(1.25, 20.0, 0.01).unwrap();
        let parsed = RieszTable::from_csv(&table.to_csv()).unwrap();
        assert_eq!(parsed, table);
        for r in [1.3, 2.71, 7.77, 19.5] {
            let x = [r * 0.8, -r * 0.6];
            let direct = c.riesz_psi(&x, 1).unwrap();
            let tabled = table.magnitude(r).unwrap() * x[1] / r;
            assert!((direct - tabled).abs() < 1e-8 * direct.abs());
        }
        c.set_riesz_table(parsed).unwrap();
        assert!(c.riesz_psi(&[30.0, 0.0], 0).is_ok());
        let other = ctx(2).build_riesz_table(1.25, 2.0, 0.1).unwrap();
        assert!(c.set_riesz_table(other).is_err());
        assert!(RieszTable::from_csv("r,rho,drho\n").is_err());
    }
}
