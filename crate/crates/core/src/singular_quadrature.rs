//! Abel-type time integrals with a `(t − s)^{-1/2}` endpoint singularity.
//!
//! Every integral is written in the variable `u = √(t − s)`, which turns
//! `∫₀ᵗ h(s)(t − s)^{-1/2} ds` into the smooth `∫₀^{√t} 2h(t − u²) du`.
//! Profile breakpoints are mapped to `u` and used as panel boundaries.

use rayon::prelude::*;

use crate::profiles::TemporalProfile;
use crate::quadrature::GaussRule;
use crate::{Error, Result};

/// How the endpoint singularity is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substitution {
    SqrtEndpoint,
    /// Plain Gauss panels in `s`; only useful as a comparison baseline.
    None,
}

/// Panel layout and tolerance shared by all time integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub order: usize,
    pub substitution: Substitution,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Chebyshev nodes used when a time-dependent spatial quantity is tabulated.
    pub cheb_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 8,
            order: 16,
            substitution: Substitution::SqrtEndpoint,
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            cheb_nodes: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn doubled(&self) -> Self {
        Self { panels: 2 * self.panels, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.order < 2 || self.cheb_nodes < 4 {
            return Err(Error::InvalidParams(format!(
                "quadrature needs panels ≥ 1, order ≥ 2, cheb_nodes ≥ 4 (got {}, {}, {})",
                self.panels, self.order, self.cheb_nodes
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Accepts `fine` when it agrees with `coarse` to
    /// `rel_tol·max(|fine|, magnitude) + abs_tol`, where `magnitude` is the
    /// integral of the absolute integrand (guards values that cancel to near zero).
    pub fn accept(&self, context: &'static str, coarse: f64, fine: f64, magnitude: f64) -> Result<f64> {
        if (coarse - fine).abs() <= self.rel_tol * fine.abs().max(magnitude) + self.abs_tol {
            Ok(fine)
        } else {
            Err(Error::ToleranceNotMet { context, coarse, fine })
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime(t));
    }
    if t > 2.0 {
        return Err(Error::InvalidParams(format!("time {t} is outside (0, 2]")));
    }
    Ok(())
}

fn u_breaks(t: f64, s_breaks: &[f64]) -> Vec<f64> {
    s_breaks.iter().filter(|&&b| b > 0.0 && b < t).map(|&b| (t - b).sqrt()).collect()
}

/// `∫₀^{√t} g(u) du` on Gauss panels split at `√(t − b)`; returns the value and
/// the integral of `|g|`.
pub(crate) fn u_integral<G: Fn(f64) -> f64>(g: G, t: f64, s_breaks: &[f64], order: usize, panels: usize) -> (f64, f64) {
    let rule = GaussRule::new(order);
    rule.composite_nodes(0.0, t.sqrt(), &u_breaks(t, s_breaks), panels)
        .into_iter()
        .fold((0.0, 0.0), |(sum, mag), (u, w)| {
            let v = w * g(u);
            (sum + v, mag + v.abs())
        })
}

/// `∫₀ᵗ h(s)(t − s)^{-1/2} ds` at a single panel count.
pub(crate) fn abel_half_raw<H: Fn(f64) -> f64>(h: &H, t: f64, s_breaks: &[f64], spec: &QuadratureSpec, panels: usize) -> (f64, f64) {
    match spec.substitution {
        Substitution::SqrtEndpoint => u_integral(|u| 2.0 * h(t - u * u), t, s_breaks, spec.order, panels),
        Substitution::None => GaussRule::new(spec.order)
            .composite_nodes(0.0, t, s_breaks, panels)
            .into_iter()
            .fold((0.0, 0.0), |(sum, mag), (s, w)| {
                let v = w * h(s) / (t - s).sqrt();
                (sum + v, mag + v.abs())
            }),
    }
}

/// `∫₀ᵗ h(s)(t − s)^{-1/2} ds`, checked by doubling the panel count.
pub fn abel_half<H: Fn(f64) -> f64>(h: H, t: f64, s_breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let (coarse, _) = abel_half_raw(&h, t, s_breaks, spec, spec.panels);
    let (fine, mag) = abel_half_raw(&h, t, s_breaks, spec, 2 * spec.panels);
    spec.accept("abel_half", coarse, fine, mag)
}

/// `Ψ(t) = ∫₀ᵗ φ(s)(t − s)^{-1/2} ds`.
pub fn psi_integral(p: &TemporalProfile, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    abel_half(|s| p.eval(s), t, &p.breakpoints(), spec)
}

/// Equivalent expressions for `M(t) = ∫_{-∞}^t (φ(t) − φ(s))(t − s)^{-3/2} ds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MForm {
    /// Exact tail `2φ(t)t^{-1/2}` plus the vanishing-numerator integral over `(0, t)`.
    Raw,
    /// `2∫₀ᵗ φ'(s)(t − s)^{-1/2} ds`; needs `φ(0) = 0`.
    FirstIbp,
    /// `4∫₀ᵗ φ''(s)(t − s)^{1/2} ds`; needs `φ(0) = φ'(0) = 0`.
    SecondIbp,
}

// (φ(t) − φ(t − u²))/u², switching to the mean of φ' over [t − u², t] when
// the subtraction would cancel.
fn difference_quotient(p: &TemporalProfile, t: f64, u: f64, phi_t: f64) -> f64 {
    let h = u * u;
    if h >= 1e-3 {
        return (phi_t - p.eval(t - h)) / h;
    }
    GaussRule::new(8).integrate(t - h, t, |s| p.deriv1(s)) / h
}

fn m_raw(p: &TemporalProfile, t: f64, spec: &QuadratureSpec, panels: usize) -> (f64, f64) {
    let phi_t = p.eval(t);
    let tail = 2.0 * phi_t / t.sqrt();
    let (body, mag) = u_integral(|u| 2.0 * difference_quotient(p, t, u, phi_t), t, &p.breakpoints(), spec.order, panels);
    (tail + body, tail.abs() + mag)
}

fn m_second_ibp(p: &TemporalProfile, t: f64, spec: &QuadratureSpec, panels: usize) -> (f64, f64) {
    u_integral(|u| 8.0 * p.deriv2(t - u * u) * u * u, t, &p.breakpoints(), spec.order, panels)
}

fn require_start(p: &TemporalProfile, flat: bool) -> Result<()> {
    let (v, d1, _) = p.jet(0.0);
    if v != 0.0 {
        return Err(Error::Precondition(format!("{} needs φ(0) = 0", p.describe())));
    }
    if flat && d1 != 0.0 {
        return Err(Error::Precondition(format!("{} needs φ'(0) = 0", p.describe())));
    }
    Ok(())
}

/// `M(t)` by the chosen form; `0 < t ≤ 2`.
pub fn m_of_t(p: &TemporalProfile, t: f64, form: MForm, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    match form {
        MForm::Raw => {
            let (coarse, _) = m_raw(p, t, spec, spec.panels);
            let (fine, mag) = m_raw(p, t, spec, 2 * spec.panels);
            spec.accept("m_of_t", coarse, fine, mag)
        }
        MForm::FirstIbp => {
            require_start(p, false)?;
            abel_half(|s| 2.0 * p.deriv1(s), t, &p.breakpoints(), spec)
        }
        MForm::SecondIbp => {
            require_start(p, true)?;
            let (coarse, _) = m_second_ibp(p, t, spec, spec.panels);
            let (fine, mag) = m_second_ibp(p, t, spec, 2 * spec.panels);
            spec.accept("m_of_t", coarse, fine, mag)
        }
    }
}

/// `M'(t) = 2∫₀ᵗ φ''(s)(t − s)^{-1/2} ds`; needs `φ(0) = φ'(0) = 0`.
pub fn m_prime(p: &TemporalProfile, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    require_start(p, true)?;
    abel_half(|s| 2.0 * p.deriv2(s), t, &p.breakpoints(), spec)
}

/// First time in `(0, 2]` where `M` passes from positive to nonpositive:
/// scan at step `1e-2`, then bisect to `1e-8`. `None` when `M` stays positive,
/// or when it is never positive on the scan (nothing to cross from).
pub fn t0_star(p: &TemporalProfile, spec: &QuadratureSpec) -> Result<Option<f64>> {
    let m = |t: f64| m_of_t(p, t, MForm::Raw, spec);
    let mut prev: Option<f64> = None;
    for k in 1..=200 {
        let t = 0.01 * k as f64;
        let value = m(t)?;
        if value <= 0.0 {
            let Some(lo) = prev else { return Ok(None) };
            let (mut lo, mut hi) = (lo, t);
            while hi - lo > 1e-8 {
                let mid = 0.5 * (lo + hi);
                if m(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = Some(t);
    }
    Ok(None)
}

/// Sampled `M` and `M'` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub first_zero: Option<f64>,
}

impl MCurve {
    /// `M'` comes from [`m_prime`] when `φ'(0) = 0`, otherwise from a centred
    /// difference of `M` with step `1e-4`.
    pub fn compute(p: &TemporalProfile, times: &[f64], spec: &QuadratureSpec) -> Result<Self> {
        if times.windows(2).any(|w| w[0] >= w[1]) || times.iter().any(|&t| !(t > 0.0 && t < 2.0)) {
            return Err(Error::InvalidParams("times must be increasing and inside (0, 2)".into()));
        }
        let flat = p.starts_flat();
        let rows: Vec<(f64, f64)> = times
            .par_iter()
            .map(|&t| {
                let value = m_of_t(p, t, MForm::Raw, spec)?;
                let derivative = if flat {
                    m_prime(p, t, spec)?
                } else {
                    let h = 1e-4f64.min(0.5 * t);
                    let hi = (t + h).min(2.0);
                    (m_of_t(p, hi, MForm::Raw, spec)? - m_of_t(p, t - h, MForm::Raw, spec)?) / (hi - t + h)
                };
                Ok((value, derivative))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            times: times.to_vec(),
            values: rows.iter().map(|r| r.0).collect(),
            derivatives: rows.iter().map(|r| r.1).collect(),
            first_zero: t0_star(p, spec)?,
        })
    }

    /// 200 midpoints `t = (k − ½)/100`.
    pub fn standard(p: &TemporalProfile, spec: &QuadratureSpec) -> Result<Self> {
        let times: Vec<f64> = (1..=200).map(|k| (k as f64 - 0.5) / 100.0).collect();
        Self::compute(p, &times, spec)
    }
}
