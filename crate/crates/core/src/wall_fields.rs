//! Wall quantities: `fᵢ`, the wall shear `D_{xₙ}wᵢ(x', 0, t)`, `D²_{xₙ}wₙ`,
//! the tangential pressure gradient, and the two-term near-wall velocity.
//!
//! `fᵢ(x', τ) = (e^{τΔ'}R'ᵢψ − R'ᵢψ)(x')` is evaluated through the heat flow
//! `U(·, u) = Γ'(·, u) ∗ ψ` of the bump instead of the Riesz transform itself:
//!
//! ```text
//! fᵢ(x', τ) = −π^{-1/2} ∫₀^τ H(σ) dσ,   H(σ) = ∫₀^∞ 2 ∂ᵢΔ'U(x', σ + w²) dw,
//! ```
//!
//! which follows from `R'ᵢψ = −π^{-1/2} ∫₀^∞ u^{-1/2} ∂ᵢU(·, u) du`. Away from
//! the support of `ψ` every integrand is smooth, so nothing is principal-valued.
//! A [`WallPoint`] tabulates the heat-flow moments once per `x'` in `log u`
//! and stores `fᵢ(x', τ)/τ` as a Chebyshev series on `τ ∈ [0, 2]`.

use std::f64::consts::PI;

use crate::kernels::{norm2, KernelContext};
use crate::profiles::BoundaryData;
use crate::quadrature::{ChebSeries, GaussRule, PiecewiseCheb};
use crate::singular_quadrature::{m_of_t, u_integral, MForm, QuadratureSpec};
use crate::{Error, Result};

/// Largest time covered by the `fᵢ/τ` tables.
pub const F_TABLE_HORIZON: f64 = 2.0;
/// Near-wall expansion is only offered for `0 ≤ xₙ ≤` this height.
pub const MAX_NEAR_WALL_HEIGHT: f64 = 0.1;

const LOG_PANEL_WIDTH: f64 = 0.5;
const LOG_PANEL_NODES: usize = 24;
// Below u = (|x'| − 1)²/(4·70) the bump's heat flow at x' is below e^{-70}.
const LOWER_EXPONENT: f64 = 70.0;
const UPPER_FACTOR: f64 = 1e8;

// A heat-flow moment tabulated in y = ln u; zero outside [u_min, u_max].
#[derive(Debug, Clone)]
struct LogTimeTable {
    u_min: f64,
    u_max: f64,
    cheb: PiecewiseCheb,
}

impl LogTimeTable {
    fn eval(&self, u: f64) -> f64 {
        if u <= self.u_min || u >= self.u_max {
            return 0.0;
        }
        self.cheb.eval(u.ln()).unwrap_or(0.0)
    }
}

/// Per-point evaluator, independent of the temporal profile and amplitude.
#[derive(Debug, Clone)]
pub struct WallPoint {
    x: Vec<f64>,
    n: usize,
    riesz: Vec<f64>,
    lap_riesz: Vec<f64>,
    div_riesz: f64,
    div_lap_riesz: f64,
    grad: Vec<LogTimeTable>,
    q: Vec<ChebSeries>,
    q_div: ChebSeries,
}

impl WallPoint {
    pub fn new(ctx: &KernelContext, x: &[f64], spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let d = ctx.boundary_dim();
        let riesz = (0..d).map(|i| ctx.riesz_psi(x, i)).collect::<Result<Vec<_>>>()?;
        let lap_riesz = (0..d).map(|i| ctx.laplacian_riesz_psi(x, i)).collect::<Result<Vec<_>>>()?;
        let div_riesz = ctx.div_riesz_psi(x)?;
        let div_lap_riesz = ctx.div_laplacian_riesz_psi(x)?;

        let r = norm2(x).sqrt();
        let u_min = (r - 1.0).powi(2) / (4.0 * LOWER_EXPONENT);
        let u_max = (r + 1.0).powi(2) * UPPER_FACTOR;
        let (y_lo, y_hi) = (u_min.ln(), u_max.ln());
        let panels = ((y_hi - y_lo) / LOG_PANEL_WIDTH).ceil() as usize;
        let ys = PiecewiseCheb::points(y_lo, y_hi, panels, LOG_PANEL_NODES);
        let moments: Vec<_> = ys.iter().map(|y| ctx.heat_moments_unchecked(x, y.exp())).collect();
        let table = |f: &dyn Fn(&crate::kernels::HeatMoments) -> f64| LogTimeTable {
            u_min,
            u_max,
            cheb: PiecewiseCheb::from_samples(
                y_lo,
                y_hi,
                panels,
                LOG_PANEL_NODES,
                &moments.iter().map(f).collect::<Vec<_>>(),
            ),
        };
        let grad = (0..d).map(|i| table(&move |m| m.grad[i])).collect();
        let grad_lap: Vec<LogTimeTable> = (0..d).map(|i| table(&move |m| m.grad_lap[i])).collect();
        let bilap = table(&|m| m.bilap);

        // H varies on the time scale (|x'| − 1)², which is short near the support.
        let m = spec.cheb_nodes * ((1.0 / (r - 1.0).powi(2)).ceil() as usize).clamp(1, 32);
        let hw = HNodes::new(r);
        let q = grad_lap.iter().map(|k| hw.quotient_series(k, m)).collect();
        let q_div = hw.quotient_series(&bilap, m);
        Ok(Self {
            x: x.to_vec(),
            n: ctx.n(),
            riesz,
            lap_riesz,
            div_riesz,
            div_lap_riesz,
            grad,
            q,
            q_div,
        })
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn riesz(&self, i: usize) -> f64 {
        self.riesz[i]
    }

    pub fn laplacian_riesz(&self, i: usize) -> f64 {
        self.lap_riesz[i]
    }

    pub fn div_riesz(&self) -> f64 {
        self.div_riesz
    }

    pub fn div_laplacian_riesz(&self) -> f64 {
        self.div_lap_riesz
    }

    /// Trailing Chebyshev coefficients of the `fᵢ/τ` series relative to the
    /// largest coefficient of any component; small means resolved.
    pub fn resolution_indicator(&self) -> f64 {
        let max_abs = |c: &[f64]| c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ratio = |series: &[&ChebSeries]| {
            let scale = series.iter().map(|s| max_abs(s.coeffs())).fold(0.0, f64::max);
            let tail = series
                .iter()
                .map(|s| max_abs(&s.coeffs()[s.coeffs().len() - 3..]))
                .fold(0.0, f64::max);
            if scale == 0.0 { 0.0 } else { tail / scale }
        };
        ratio(&self.q.iter().collect::<Vec<_>>()).max(ratio(&[&self.q_div]))
    }

    fn check_axis(&self, i: usize) -> Result<()> {
        if i >= self.n - 1 {
            return Err(Error::InvalidParams(format!("axis {i} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    fn check_tau(tau: f64) -> Result<()> {
        if !(tau > 0.0) {
            return Err(Error::NonpositiveTime(tau));
        }
        if tau > F_TABLE_HORIZON {
            return Err(Error::CacheMiss(format!("time {tau} beyond tabulated horizon {F_TABLE_HORIZON}")));
        }
        Ok(())
    }

    /// `fᵢ(x', τ)` for `0 < τ ≤ 2`.
    pub fn f(&self, i: usize, tau: f64) -> Result<f64> {
        self.check_axis(i)?;
        Self::check_tau(tau)?;
        Ok(tau * self.q[i].eval(tau))
    }

    /// `Σₖ Dₖ fₖ(x', τ)`.
    pub fn div_f(&self, tau: f64) -> Result<f64> {
        Self::check_tau(tau)?;
        Ok(tau * self.q_div.eval(tau))
    }

    fn check_data(&self, data: &BoundaryData) -> Result<()> {
        if data.bump.dim() != self.n {
            return Err(Error::InvalidParams(format!(
                "boundary data is for n = {}, wall point for n = {}",
                data.bump.dim(),
                self.n
            )));
        }
        Ok(())
    }

    // ∫₀ᵗ φ(s)(t − s)^{-1/2} g(t − s) ds with panel doubling.
    fn memory_integral<G: Fn(f64) -> f64>(&self, data: &BoundaryData, t: f64, g: G, spec: &QuadratureSpec) -> Result<f64> {
        let p = &data.profile;
        let breaks = p.breakpoints();
        let integrand = |u: f64| 2.0 * p.eval(t - u * u) * g(u * u);
        let (coarse, _) = u_integral(integrand, t, &breaks, spec.order, spec.panels);
        let (fine, mag) = u_integral(integrand, t, &breaks, spec.order, 2 * spec.panels);
        spec.accept("wall memory integral", coarse, fine, mag)
    }

    /// `D_{xₙ}wᵢ(x', 0, t)` with its two constituent terms.
    pub fn shear(&self, data: &BoundaryData, t: f64, i: usize, spec: &QuadratureSpec) -> Result<ShearDiagnostics> {
        self.check_axis(i)?;
        self.check_data(data)?;
        Self::check_tau(t)?;
        let q = &self.q[i];
        let i_f = self.memory_integral(data, t, |tau| q.eval(tau), spec)?;
        let m = m_of_t(&data.profile, t, MForm::Raw, spec)?;
        let c = data.amplitude / PI.sqrt();
        Ok(ShearDiagnostics { fterm: -c * i_f, mterm: c * self.riesz[i] * m })
    }

    /// `D²_{xₙ}wₙ(x', 0, t) = −Σₖ Dₖ D_{xₙ}wₖ`, assembled from `div f` and `div R'ψ`.
    pub fn d2_wn(&self, data: &BoundaryData, t: f64, spec: &QuadratureSpec) -> Result<f64> {
        self.check_data(data)?;
        Self::check_tau(t)?;
        let q = &self.q_div;
        let i_f = self.memory_integral(data, t, |tau| q.eval(tau), spec)?;
        let m = m_of_t(&data.profile, t, MForm::Raw, spec)?;
        Ok(-data.amplitude / PI.sqrt() * (-i_f + self.div_riesz * m))
    }

    /// `D_{xᵢ}p(x', 0, t)` split into its three terms.
    pub fn pressure_gradient(&self, data: &BoundaryData, t: f64, i: usize, spec: &QuadratureSpec) -> Result<PressureBreakdown> {
        self.check_axis(i)?;
        self.check_data(data)?;
        Self::check_tau(t)?;
        let (phi, dphi, _) = data.profile.jet(t);
        let a = data.amplitude;
        let v = &self.grad[i];
        let tail = self.memory_integral(data, t, |tau| v.eval(tau) / tau, spec)?;
        Ok(PressureBreakdown {
            laplacian_term: a * phi * self.lap_riesz[i],
            rate_term: -a * dphi * self.riesz[i],
            heat_tail_term: -a / (2.0 * PI.sqrt()) * tail,
        })
    }
}

// Quadrature in w for H(σ) = ∫₀^∞ 2K(σ + w²) dw: Gauss panels on [0, r], then
// w = r·e^y for y ∈ [0, 12].
struct HNodes {
    nodes: Vec<(f64, f64)>,
}

impl HNodes {
    fn new(r: f64) -> Self {
        let rule = GaussRule::new(16);
        let mut nodes = rule.composite_nodes(0.0, r, &[], 8);
        for (y, w) in rule.composite_nodes(0.0, 12.0, &[], 12) {
            let e = y.exp();
            nodes.push((r * e, w * r * e));
        }
        Self { nodes }
    }

    fn h(&self, k: &LogTimeTable, sigma: f64) -> f64 {
        self.nodes.iter().map(|&(w, wt)| 2.0 * wt * k.eval(sigma + w * w)).sum()
    }

    // Chebyshev series of q(τ) = −π^{-1/2} ∫₀¹ H(τx) dx on [0, 2].
    fn quotient_series(&self, k: &LogTimeTable, m: usize) -> ChebSeries {
        let h_series = ChebSeries::interpolate(0.0, F_TABLE_HORIZON, m, |sigma| self.h(k, sigma));
        let rule = GaussRule::new(m.div_ceil(2) + 1);
        ChebSeries::interpolate(0.0, F_TABLE_HORIZON, m, |tau| {
            -rule.integrate(0.0, 1.0, |x| h_series.eval(tau * x)) / PI.sqrt()
        })
    }
}

/// The two terms of the wall shear: `−(a/√π)∫φ(s)(t−s)^{-3/2}fᵢ(x', t−s) ds`
/// and `(a/√π) R'ᵢψ(x') M(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearDiagnostics {
    pub fterm: f64,
    pub mterm: f64,
}

impl ShearDiagnostics {
    pub fn value(&self) -> f64 {
        self.fterm + self.mterm
    }
}

/// `D_{xᵢ}p(x', 0, t)` as `φ(t)Δ'R'ᵢψ`, `−φ'(t)R'ᵢψ` and the heat-tail term,
/// each already multiplied by the amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureBreakdown {
    pub laplacian_term: f64,
    pub rate_term: f64,
    pub heat_tail_term: f64,
}

impl PressureBreakdown {
    pub fn value(&self) -> f64 {
        self.laplacian_term + self.rate_term + self.heat_tail_term
    }
}

/// Splitting `fᵢ = Δ'R'ᵢψ·t + remainder` with a check of the remainder against
/// `C·t^{3/2}|x'|^{-n-2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDecomposition {
    pub leading: f64,
    pub remainder: f64,
    pub within_bound: bool,
}

impl FDecomposition {
    pub fn new(point: &WallPoint, i: usize, t: f64, constant: f64) -> Result<Self> {
        let f = point.f(i, t)?;
        let leading = point.laplacian_riesz(i) * t;
        let remainder = f - leading;
        let r = norm2(point.point()).sqrt();
        let bound = constant * t.powf(1.5) * r.powi(-(point.n() as i32) - 2);
        Ok(Self { leading, remainder, within_bound: remainder.abs() <= bound })
    }
}

/// Fits the remainder constant `C` once per bump: the largest ratio
/// `|fᵢ − Δ'R'ᵢψ·t| / (t^{3/2}|x'|^{-n-2})` over `t ∈ [1e-3, 2]` at `x' = 8e₁`,
/// doubled for headroom.
pub fn fit_remainder_constant(ctx: &KernelContext, spec: &QuadratureSpec) -> Result<f64> {
    let mut x = vec![0.0; ctx.boundary_dim()];
    x[0] = 8.0;
    let point = WallPoint::new(ctx, &x, spec)?;
    let scale = 8f64.powi(-(ctx.n() as i32) - 2);
    let mut worst: f64 = 0.0;
    for k in 0..=60 {
        let t = 1e-3 * 2000f64.powf(k as f64 / 60.0);
        let rem = point.f(0, t)? - point.laplacian_riesz(0) * t;
        worst = worst.max(rem.abs() / (t.powf(1.5) * scale));
    }
    Ok(2.0 * worst)
}

/// `fᵢ(x', t)`.
pub fn f_i(ctx: &KernelContext, x: &[f64], t: f64, i: usize, spec: &QuadratureSpec) -> Result<f64> {
    WallPoint::new(ctx, x, spec)?.f(i, t)
}

/// `D_{xₙ}wᵢ(x', 0, t)` and its two terms.
pub fn wall_shear(
    ctx: &KernelContext,
    x: &[f64],
    t: f64,
    i: usize,
    data: &BoundaryData,
    spec: &QuadratureSpec,
) -> Result<(f64, ShearDiagnostics)> {
    let diag = WallPoint::new(ctx, x, spec)?.shear(data, t, i, spec)?;
    Ok((diag.value(), diag))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2Method {
    Analytic,
    /// Central differences of the wall shear with step `1e-3·|x'|`.
    FiniteDiff,
}

pub fn d2_wn(
    ctx: &KernelContext,
    x: &[f64],
    t: f64,
    data: &BoundaryData,
    spec: &QuadratureSpec,
    method: D2Method,
) -> Result<f64> {
    match method {
        D2Method::Analytic => WallPoint::new(ctx, x, spec)?.d2_wn(data, t, spec),
        D2Method::FiniteDiff => {
            ctx.check_point(x)?;
            let h = 1e-3 * norm2(x).sqrt();
            let mut div = 0.0;
            for k in 0..x.len() {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                let sp = WallPoint::new(ctx, &xp, spec)?.shear(data, t, k, spec)?.value();
                let sm = WallPoint::new(ctx, &xm, spec)?.shear(data, t, k, spec)?.value();
                div += (sp - sm) / (2.0 * h);
            }
            Ok(-div)
        }
    }
}

pub fn pressure_gradient(
    ctx: &KernelContext,
    x: &[f64],
    t: f64,
    i: usize,
    data: &BoundaryData,
    spec: &QuadratureSpec,
) -> Result<(f64, PressureBreakdown)> {
    let b = WallPoint::new(ctx, x, spec)?.pressure_gradient(data, t, i, spec)?;
    Ok((b.value(), b))
}

/// `wᵢ(x', xₙ, t) ≈ D_{xₙ}wᵢ·xₙ + ½ D_{xᵢ}p·xₙ²` for `0 ≤ xₙ ≤ 0.1`.
pub fn near_wall_velocity(shear: f64, pressure_gradient: f64, height: f64) -> Result<f64> {
    if !(height >= 0.0) || height > MAX_NEAR_WALL_HEIGHT {
        return Err(Error::HeightTooLarge(height));
    }
    Ok(shear * height + 0.5 * pressure_gradient * height * height)
}

/// All wall quantities at one `(x', t)`. `fterm`/`mterm` refer to axis 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WallSample {
    pub x: Vec<f64>,
    pub t: f64,
    pub shear: Vec<f64>,
    pub d2_wn: f64,
    pub dp_tangential: Vec<f64>,
    pub fterm: f64,
    pub mterm: f64,
}

impl WallSample {
    pub fn evaluate(point: &WallPoint, data: &BoundaryData, t: f64, spec: &QuadratureSpec) -> Result<Self> {
        let d = point.n() - 1;
        let diags = (0..d).map(|i| point.shear(data, t, i, spec)).collect::<Result<Vec<_>>>()?;
        let dp = (0..d)
            .map(|i| point.pressure_gradient(data, t, i, spec).map(|b| b.value()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x: point.point().to_vec(),
            t,
            shear: diags.iter().map(ShearDiagnostics::value).collect(),
            d2_wn: point.d2_wn(data, t, spec)?,
            dp_tangential: dp,
            fterm: diags[0].fterm,
            mterm: diags[0].mterm,
        })
    }

    pub fn csv_header(n: usize) -> String {
        let d = n - 1;
        let mut cols: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
        cols.push("t".into());
        cols.extend((1..=d).map(|k| format!("shear_{k}")));
        cols.push("d2wn".into());
        cols.extend((1..=d).map(|k| format!("dp_{k}")));
        cols.push("fterm".into());
        cols.push("mterm".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        use crate::output::fmt_f64;
        let mut cols: Vec<String> = self.x.iter().map(|v| fmt_f64(*v)).collect();
        cols.push(fmt_f64(self.t));
        cols.extend(self.shear.iter().map(|v| fmt_f64(*v)));
        cols.push(fmt_f64(self.d2_wn));
        cols.extend(self.dp_tangential.iter().map(|v| fmt_f64(*v)));
        cols.push(fmt_f64(self.fterm));
        cols.push(fmt_f64(self.mterm));
        cols.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{make_profile, ProfileFamily, SpatialBump};
    use crate::singular_quadrature::t0_star;

    fn setup(n: usize, family: ProfileFamily) -> (KernelContext, BoundaryData) {
        let bump = SpatialBump::new(n, 2.0).unwrap();
        let profile = make_profile(family, &family.default_params()).unwrap();
        (KernelContext::new(bump.clone()), BoundaryData::new(1.0, bump, profile).unwrap())
    }

    fn axis_point(n: usize, r: f64) -> Vec<f64> {
        let mut x = vec![0.0; n - 1];
        x[0] = r;
        x
    }

    #[test]
    fn small_time_limit_is_laplacian_of_riesz() {
        let spec = QuadratureSpec::default();
        for n in [2, 3] {
            let (ctx, _) = setup(n, ProfileFamily::A);
            for r in [4.0, 8.0] {
                let p = WallPoint::new(&ctx, &axis_point(n, r), &spec).unwrap();
                let ratio = p.f(0, 1e-6).unwrap() / 1e-6 / ctx.laplacian_riesz_psi(&axis_point(n, r), 0).unwrap();
                assert!((ratio - 1.0).abs() < 1e-2, "n={n} r={r}: {ratio}");
                assert!((ratio - 1.0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn matches_subordinated_semigroup() {
        let spec = QuadratureSpec::default();
        let rule = GaussRule::new(16);
        for n in [2, 3] {
            let (ctx, _) = setup(n, ProfileFamily::A);
            for (r, tau) in [(1.3, 0.5), (4.0, 0.05), (8.0, 1.7)] {
                let x = axis_point(n, r);
                let p = WallPoint::new(&ctx, &x, &spec).unwrap();
                // fᵢ(τ) = −π^{-1/2} ∫₀^∞ u^{-1/2}(∂ᵢU(u + τ) − ∂ᵢU(u)) du, split at u = e^lo.
                let grad = |u: f64| ctx.heat_moments(&x, u).unwrap().grad[0];
                let lo = ((r - 1.0f64).powi(2) / 3000.0).ln();
                let hi = (r * r).ln() + 60.0;
                let body = rule.panels(lo, hi, ((hi - lo) * 2.0) as usize, |y| {
                    let u = y.exp();
                    u.sqrt() * (grad(u + tau) - grad(u))
                });
                let head = rule.panels(0.0, (0.5 * lo).exp(), 4, |v| 2.0 * grad(v * v + tau));
                let oracle = -(body + head) / PI.sqrt();
                let got = p.f(0, tau).unwrap();
                assert!((got - oracle).abs() < 1e-7 * oracle.abs(), "n={n} r={r}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn off_axis_component_vanishes_on_the_axis() {
        let (ctx, _) = setup(3, ProfileFamily::A);
        let p = WallPoint::new(&ctx, &[0.0, 8.0], &QuadratureSpec::default()).unwrap();
        for tau in [0.01, 0.5, 2.0] {
            assert!(p.f(0, tau).unwrap().abs() < 1e-14 * p.f(1, tau).unwrap().abs());
        }
    }

    #[test]
    fn shear_is_odd_under_reflection() {
        let spec = QuadratureSpec::default();
        let (ctx, data) = setup(3, ProfileFamily::B);
        for k in 0..10 {
            let angle = 0.3 + 0.25 * k as f64;
            let r = 6.0 + k as f64;
            let x = [r * angle.cos(), r * angle.sin()];
            let t = 0.1 + 0.18 * k as f64;
            let plus = WallPoint::new(&ctx, &x, &spec).unwrap().shear(&data, t, 0, &spec).unwrap().value();
            let minus = WallPoint::new(&ctx, &[-x[0], x[1]], &spec).unwrap().shear(&data, t, 0, &spec).unwrap().value();
            assert!((plus + minus).abs() <= 1e-6 * plus.abs(), "{x:?} t={t}: {plus} {minus}");
        }
    }

    #[test]
    fn zero_profile_gives_zero_fields() {
        let spec = QuadratureSpec::default();
        let (ctx, data) = setup(2, ProfileFamily::Zero);
        let p = WallPoint::new(&ctx, &[8.0], &spec).unwrap();
        for t in [0.2, 1.0, 1.9] {
            assert_eq!(p.shear(&data, t, 0, &spec).unwrap().value(), 0.0);
            assert_eq!(p.d2_wn(&data, t, &spec).unwrap(), 0.0);
            assert_eq!(p.pressure_gradient(&data, t, 0, &spec).unwrap().value(), 0.0);
        }
    }

    #[test]
    fn analytic_d2_matches_finite_difference() {
        let spec = QuadratureSpec::default();
        for n in [2, 3] {
            let (ctx, data) = setup(n, ProfileFamily::B);
            let x = axis_point(n, 8.0);
            let a = d2_wn(&ctx, &x, 0.7, &data, &spec, D2Method::Analytic).unwrap();
            let f = d2_wn(&ctx, &x, 0.7, &data, &spec, D2Method::FiniteDiff).unwrap();
            assert!((a - f).abs() <= 1e-3 * a.abs(), "n={n}: {a} {f}");
        }
    }

    #[test]
    fn pressure_rate_term_is_riesz_times_rate() {
        let spec = QuadratureSpec::default();
        let (ctx, data) = setup(3, ProfileFamily::A);
        let x = [5.0, 3.0];
        let (_, parts) = pressure_gradient(&ctx, &x, 0.4, 1, &data, &spec).unwrap();
        let expected = -data.profile.deriv1(0.4) * ctx.riesz_psi(&x, 1).unwrap();
        assert!((parts.rate_term - expected).abs() <= 1e-12 * expected.abs());
    }

    #[test]
    fn pressure_positive_after_rise() {
        let spec = QuadratureSpec::default();
        for family in [ProfileFamily::A, ProfileFamily::B, ProfileFamily::C, ProfileFamily::D] {
            let (ctx, data) = setup(3, family);
            for r in [8.0, 16.0] {
                let p = WallPoint::new(&ctx, &axis_point(3, r), &spec).unwrap();
                for k in 1..20 {
                    let t = 1.0 + 0.05 * k as f64;
                    let dp = p.pressure_gradient(&data, t, 0, &spec).unwrap().value();
                    assert!(dp > 0.0, "{family} r={r} t={t}: {dp}");
                }
            }
        }
    }

    #[test]
    fn near_wall_expansion() {
        assert_eq!(near_wall_velocity(3.0, -2.0, 0.0).unwrap(), 0.0);
        assert!(near_wall_velocity(1e-3, -0.5, 1e-3).unwrap() > 0.0);
        assert!(near_wall_velocity(0.0, 2.0, 1e-3).unwrap() > 0.0);
        assert!(matches!(near_wall_velocity(1.0, 1.0, 0.2), Err(Error::HeightTooLarge(_))));
        assert!(near_wall_velocity(1.0, 1.0, -0.01).is_err());
    }

    #[test]
    fn remainder_bound_holds() {
        let spec = QuadratureSpec::default();
        let (ctx, _) = setup(3, ProfileFamily::A);
        let c = fit_remainder_constant(&ctx, &spec).unwrap();
        assert!(c > 0.0 && c.is_finite());
        for r in [8.0, 16.0, 32.0] {
            let p = WallPoint::new(&ctx, &axis_point(3, r), &spec).unwrap();
            for t in [1e-3, 1e-2, 0.1, 1.0] {
                let dec = FDecomposition::new(&p, 0, t, c).unwrap();
                assert!(dec.within_bound, "r={r} t={t}: {dec:?}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let spec = QuadratureSpec::default();
        let (ctx, data) = setup(3, ProfileFamily::A);
        assert!(matches!(f_i(&ctx, &[1.1, 0.0], 0.5, 0, &spec), Err(Error::TooCloseToSupport { .. })));
        let p = WallPoint::new(&ctx, &[8.0, 0.0], &spec).unwrap();
        assert!(matches!(p.f(0, 2.5), Err(Error::CacheMiss(_))));
        assert!(matches!(p.f(0, 0.0), Err(Error::NonpositiveTime(_))));
        assert!(p.f(2, 0.5).is_err());
        let (_, data2) = setup(2, ProfileFamily::A);
        assert!(p.shear(&data2, 0.5, 0, &spec).is_err());
        assert!(p.resolution_indicator() < 1e-8);
        let _ = data;
    }

    #[test]
    fn shear_signs_for_assumption_families() {
        let spec = QuadratureSpec::default();
        let (ctx, c_data) = setup(3, ProfileFamily::C);
        let p = WallPoint::new(&ctx, &axis_point(3, 8.0), &spec).unwrap();
        for k in 1..40 {
            let t = 0.05 * k as f64;
            assert!(p.shear(&c_data, t, 0, &spec).unwrap().value() > 0.0, "t={t}");
        }
        let (_, b_data) = setup(3, ProfileFamily::B);
        let t0 = t0_star(&b_data.profile, &spec).unwrap().unwrap();
        let p = WallPoint::new(&ctx, &axis_point(3, 16.0), &spec).unwrap();
        for k in 1..=10 {
            let t = t0 + 0.005 * k as f64;
            assert!(p.shear(&b_data, t, 0, &spec).unwrap().value() < 0.0, "t={t}");
        }
    }

    #[test]
    fn sample_row_layout() {
        let spec = QuadratureSpec::default();
        let (ctx, data) = setup(3, ProfileFamily::A);
        let p = WallPoint::new(&ctx, &[8.0, 0.0], &spec).unwrap();
        let s = WallSample::evaluate(&p, &data, 0.5, &spec).unwrap();
        assert_eq!(WallSample::csv_header(3), "x1,x2,t,shear_1,shear_2,d2wn,dp_1,dp_2,fterm,mterm");
        assert_eq!(s.csv_row().split(',').count(), 10);
        assert!((s.fterm + s.mterm - s.shear[0]).abs() < 1e-15);
    }
}
