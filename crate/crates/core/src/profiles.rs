//! Temporal profiles `φ`, the radial bump `ψ`, and the checks that a profile
//! realizes the unimodal and sign assumptions used by the separation results.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quadrature::GaussRule;
use crate::{Error, Result};

/// Built-in profile families plus a few test shims that are not unimodal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileFamily {
    /// `t²(2−t)²`, peak 1 at `t = 1`.
    A,
    /// Quintic rise, plateau at 1, steep quintic drop around `r₀ + δ/2`.
    B,
    /// Quintic rise, slow decay with `|φ'| ≤ ε` on `(1, 2)`.
    C,
    /// Quintic rise, cubic decline `1 − h(t−1)³`; `M' < 0` on `(1, 2)`.
    D,
    Zero,
    /// `φ(s) = s`.
    Linear,
    /// `φ(s) = s²`.
    Square,
    /// `φ(s) = sin(4πs)`.
    Sine,
}

impl ProfileFamily {
    pub fn name(self) -> &'static str {
        match self {
            ProfileFamily::A => "A",
            ProfileFamily::B => "B",
            ProfileFamily::C => "C",
            ProfileFamily::D => "D",
            ProfileFamily::Zero => "zero",
            ProfileFamily::Linear => "linear",
            ProfileFamily::Square => "square",
            ProfileFamily::Sine => "sine",
        }
    }

    /// Families that are meant to rise on `(0,1)` and fall on `(1,2)`.
    pub fn is_unimodal(self) -> bool {
        matches!(
            self,
            ProfileFamily::A | ProfileFamily::B | ProfileFamily::C | ProfileFamily::D
        )
    }

    pub fn default_params(self) -> Vec<f64> {
        match self {
            ProfileFamily::B => vec![1.5, 0.005, 0.03],
            ProfileFamily::C => vec![0.01],
            ProfileFamily::D => vec![1.0],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => ProfileFamily::A,
            "b" => ProfileFamily::B,
            "c" => ProfileFamily::C,
            "d" => ProfileFamily::D,
            "zero" => ProfileFamily::Zero,
            "linear" => ProfileFamily::Linear,
            "square" => ProfileFamily::Square,
            "sine" => ProfileFamily::Sine,
            other => return Err(Error::InvalidParams(format!("unknown profile family '{other}'"))),
        })
    }
}

// Quintic smoothstep and its derivatives on [0, 1]; constant outside.
fn step5(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let v = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        let d1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
        let d2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
        (v, d1, d2)
    }
}

const STEP5_MAX_SLOPE: f64 = 1.875;

/// The temporal factor `φ` on `[0, 2]` with analytic first and second derivatives.
/// `φ` is extended by zero for negative times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalProfile {
    family: ProfileFamily,
    params: Vec<f64>,
}

impl TemporalProfile {
    pub fn family(&self) -> ProfileFamily {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// `(φ, φ', φ'')` at `t`.
    pub fn jet(&self, t: f64) -> (f64, f64, f64) {
        if t < 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let p = &self.params;
        match self.family {
            ProfileFamily::A => {
                let u = 2.0 - t;
                (
                    t * t * u * u,
                    2.0 * t * u * (u - t),
                    2.0 * (u * u - 4.0 * t * u + t * t),
                )
            }
            ProfileFamily::B => {
                if t <= 1.0 {
                    step5(t)
                } else {
                    let (start, width) = drop_window(p[0], p[1], p[2]);
                    let height = p.get(3).copied().unwrap_or(1.0);
                    let (v, d1, d2) = step5((t - start) / width);
                    (
                        1.0 - height * v,
                        -height * d1 / width,
                        -height * d2 / (width * width),
                    )
                }
            }
            ProfileFamily::C => {
                if t <= 1.0 {
                    step5(t)
                } else {
                    let k = p[0] / STEP5_MAX_SLOPE;
                    let (v, d1, d2) = step5(t - 1.0);
                    (1.0 - k * v, -k * d1, -k * d2)
                }
            }
            ProfileFamily::D => {
                if t <= 1.0 {
                    step5(t)
                } else {
                    let h = p[0];
                    let u = t - 1.0;
                    (1.0 - h * u * u * u, -3.0 * h * u * u, -6.0 * h * u)
                }
            }
            ProfileFamily::Zero => (0.0, 0.0, 0.0),
            ProfileFamily::Linear => (t, 1.0, 0.0),
            ProfileFamily::Square => (t * t, 2.0 * t, 2.0),
            ProfileFamily::Sine => {
                let w = 4.0 * std::f64::consts::PI;
                ((w * t).sin(), w * (w * t).cos(), -w * w * (w * t).sin())
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.jet(t).0
    }

    pub fn deriv1(&self, t: f64) -> f64 {
        self.jet(t).1
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        self.jet(t).2
    }

    /// Times in `(0, 2)` where a higher derivative jumps. Quadrature panels
    /// are split at these points.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.family {
            ProfileFamily::B => {
                let (start, width) = drop_window(self.params[0], self.params[1], self.params[2]);
                vec![1.0, start, start + width]
            }
            ProfileFamily::C | ProfileFamily::D => vec![1.0],
            _ => Vec::new(),
        }
    }

    /// `(r₀, δ)` for families that carry a steep-drop window.
    pub fn drop_params(&self) -> Option<(f64, f64)> {
        (self.family == ProfileFamily::B).then(|| (self.params[0], self.params[1]))
    }

    /// `φ(0) = φ'(0) = 0`, required by the integrated-by-parts forms of `M`.
    pub fn starts_flat(&self) -> bool {
        let (v, d1, _) = self.jet(0.0);
        v == 0.0 && d1 == 0.0
    }

    pub fn describe(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|p| format!("{p}")).collect();
        format!("family={} params=[{}]", self.family, params.join(";"))
    }
}

// Drop region [start, start + width] centred on r0 + delta/2.
fn drop_window(r0: f64, delta: f64, width: f64) -> (f64, f64) {
    let centre = r0 + 0.5 * delta;
    (centre - 0.5 * width, width)
}

/// Builds a profile and validates family parameters. Unimodal families are
/// also scanned for monotonicity on a 10⁴-point grid.
pub fn make_profile(family: ProfileFamily, params: &[f64]) -> Result<TemporalProfile> {
    let params = if params.is_empty() {
        family.default_params()
    } else {
        params.to_vec()
    };
    let bad = |msg: String| Err(Error::InvalidParams(format!("family {family}: {msg}")));
    match family {
        ProfileFamily::B => {
            if params.len() < 3 || params.len() > 4 {
                return bad("expected [r0, delta, width] or [r0, delta, width, height]".into());
            }
            let (r0, delta, width) = (params[0], params[1], params[2]);
            let (start, _) = drop_window(r0, delta, width);
            if !(delta > 0.0 && width >= delta && start > 1.0 && start + width < 2.0 && r0 > 1.0) {
                return bad(format!("drop window r0={r0}, delta={delta}, width={width} must sit inside (1, 2) with width >= delta"));
            }
            let height = params.get(3).copied().unwrap_or(1.0);
            if !(height > 0.0 && height <= 1.0) {
                return bad(format!("drop height {height} must be in (0, 1]"));
            }
        }
        ProfileFamily::C => {
            if params.len() != 1 || !(params[0] > 0.0 && params[0] <= 1.0) {
                return bad("expected [eps] with 0 < eps <= 1".into());
            }
        }
        ProfileFamily::D => {
            if params.len() != 1 || !(params[0] > 0.0 && params[0] <= 1.0) {
                return bad("expected [h] with 0 < h <= 1".into());
            }
        }
        _ => {
            if !params.is_empty() {
                return bad("takes no parameters".into());
            }
        }
    }
    let profile = TemporalProfile { family, params };
    if family.is_unimodal() {
        let report = check_assumption1(&profile, 10_000);
        if !report.passed {
            return bad(format!(
                "monotonicity scan failed at {} points (first t = {})",
                report.violations.len(),
                report.violations.first().map_or(f64::NAN, |v| v.t)
            ));
        }
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ViolationKind {
    NonzeroAtOrigin,
    Negative,
    DecreasingOnRise,
    IncreasingOnFall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub t: f64,
    pub kind: ViolationKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption1Report {
    pub passed: bool,
    pub grid_size: usize,
    pub violations: Vec<Violation>,
}

const MONOTONE_TOL: f64 = 1e-10;

/// Scan check of `φ(0) = 0`, `φ ≥ 0`, `φ' ≥ 0` on `(0,1)` and `φ' ≤ 0` on `(1,2)`.
pub fn check_assumption1(p: &TemporalProfile, grid_size: usize) -> Assumption1Report {
    let grid_size = grid_size.max(100);
    let mut violations = Vec::new();
    let phi0 = p.eval(0.0);
    if phi0.abs() > MONOTONE_TOL {
        violations.push(Violation { t: 0.0, kind: ViolationKind::NonzeroAtOrigin, value: phi0 });
    }
    for k in 1..grid_size {
        let t = 2.0 * k as f64 / grid_size as f64;
        let (v, d1, _) = p.jet(t);
        if v < -MONOTONE_TOL {
            violations.push(Violation { t, kind: ViolationKind::Negative, value: v });
        }
        if t < 1.0 && d1 < -MONOTONE_TOL {
            violations.push(Violation { t, kind: ViolationKind::DecreasingOnRise, value: d1 });
        }
        if t > 1.0 && d1 > MONOTONE_TOL {
            violations.push(Violation { t, kind: ViolationKind::IncreasingOnFall, value: d1 });
        }
    }
    Assumption1Report { passed: violations.is_empty(), grid_size, violations }
}

/// The three sufficient conditions for a negative (i, ii) or positive (iii) `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AppendixCondition {
    /// `2^{3/2} φ(t) < 2^{-3/2} ∫₀¹ φ` on `(r₀, 2)` for some `r₀ ∈ (3/2, 2)`.
    I,
    /// `−δ⁻¹φ(r₀)/2 < φ' < −(3/2)√2 a₀ δ^{-1/2}` on `(r₀, r₀+δ)`.
    II,
    /// `inf_{(1,2)} φ' ≥ −¼ ∫₀¹ φ'(s)(2−s)^{-1/2} ds`.
    III,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub condition: AppendixCondition,
    pub holds: bool,
    /// Worst-case slack of the defining inequality; positive when it holds.
    pub margin: f64,
    /// `r₀` for (i) and (ii), when one was found or supplied.
    pub r0: Option<f64>,
    /// `δ` for (ii).
    pub delta: Option<f64>,
}

const CONDITION_SCAN: usize = 2000;

pub fn check_appendix_condition(p: &TemporalProfile, which: AppendixCondition) -> AppendixReport {
    match which {
        AppendixCondition::I => condition_i(p),
        AppendixCondition::II => match p.drop_params() {
            Some((r0, delta)) => condition_ii_at(p, r0, delta),
            None => condition_ii_search(p),
        },
        AppendixCondition::III => condition_iii(p),
    }
}

fn integral_0_1<F: Fn(f64) -> f64>(p: &TemporalProfile, f: F) -> f64 {
    let breaks: Vec<f64> = p.breakpoints().into_iter().filter(|&b| b < 1.0).collect();
    GaussRule::new(20).panels_with_breaks(0.0, 1.0, &breaks, 16, f)
}

fn condition_i(p: &TemporalProfile) -> AppendixReport {
    let rhs = 2f64.powf(-1.5) * integral_0_1(p, |s| p.eval(s));
    // Largest r0 in (3/2, 2) from which the strict inequality holds up to 2,
    // found by walking back from t = 2.
    let mut r0 = None;
    let mut margin = f64::INFINITY;
    for k in (1..CONDITION_SCAN).rev() {
        let t = 1.5 + 0.5 * k as f64 / CONDITION_SCAN as f64;
        let slack = rhs - 2f64.powf(1.5) * p.eval(t);
        if slack <= 0.0 {
            break;
        }
        margin = margin.min(slack);
        r0 = Some(t);
    }
    match r0 {
        Some(r0) => AppendixReport { condition: AppendixCondition::I, holds: true, margin, r0: Some(r0), delta: None },
        None => {
            let t = 2.0 - 0.5 / CONDITION_SCAN as f64;
            AppendixReport {
                condition: AppendixCondition::I,
                holds: false,
                margin: rhs - 2f64.powf(1.5) * p.eval(t),
                r0: None,
                delta: None,
            }
        }
    }
}

fn rise_slope_sup(p: &TemporalProfile) -> f64 {
    (1..CONDITION_SCAN)
        .map(|k| p.deriv1(k as f64 / CONDITION_SCAN as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn condition_ii_at(p: &TemporalProfile, r0: f64, delta: f64) -> AppendixReport {
    let a0 = rise_slope_sup(p);
    let lower = -0.5 * p.eval(r0) / delta;
    let upper = -1.5 * std::f64::consts::SQRT_2 * a0 / delta.sqrt();
    let margin = (1..200)
        .map(|k| {
            let d1 = p.deriv1(r0 + delta * k as f64 / 200.0);
            (d1 - lower).min(upper - d1)
        })
        .fold(f64::INFINITY, f64::min);
    let valid = p.deriv1(0.0) == 0.0 && r0 > 1.0 && r0 + delta < 2.0;
    AppendixReport {
        condition: AppendixCondition::II,
        holds: valid && margin > 0.0,
        margin,
        r0: Some(r0),
        delta: Some(delta),
    }
}

fn condition_ii_search(p: &TemporalProfile) -> AppendixReport {
    let deltas = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2];
    let mut best: Option<AppendixReport> = None;
    for &delta in &deltas {
        for k in 1..100 {
            let r0 = 1.0 + k as f64 / 100.0;
            if r0 + delta >= 2.0 {
                break;
            }
            let report = condition_ii_at(p, r0, delta);
            if best.as_ref().is_none_or(|b| report.margin > b.margin) {
                best = Some(report);
            }
        }
    }
    best.expect("search grid is non-empty")
}

fn condition_iii(p: &TemporalProfile) -> AppendixReport {
    let rhs = -0.25 * integral_0_1(p, |s| p.deriv1(s) / (2.0 - s).sqrt());
    let inf = (1..CONDITION_SCAN)
        .map(|k| p.deriv1(1.0 + k as f64 / CONDITION_SCAN as f64))
        .fold(f64::INFINITY, f64::min);
    let margin = inf - rhs;
    AppendixReport {
        condition: AppendixCondition::III,
        holds: p.starts_flat() && margin >= 0.0,
        margin,
        r0: None,
        delta: None,
    }
}

/// Smallest `c` with `φ(t) ≤ c·t·φ'(t)` on a scan of `(0, t1)`; infinite when
/// `φ'` vanishes where `φ > 0`.
pub fn early_rise_constant(p: &TemporalProfile, t1: f64) -> f64 {
    (1..1000)
        .map(|k| {
            let t = t1 * k as f64 / 1000.0;
            let (v, d1, _) = p.jet(t);
            if v <= 0.0 {
                0.0
            } else if t * d1 <= 0.0 {
                f64::INFINITY
            } else {
                v / (t * d1)
            }
        })
        .fold(0.0, f64::max)
}

/// Radial cutoff `ψ(r) = h·exp(1 − 1/(1−r²))` on the unit ball of `ℝⁿ⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialBump {
    dim: usize,
    height: f64,
    mass: f64,
}

/// `ψ(1/2) = h·e^{-1/3}` must exceed 1.
pub const MIN_BUMP_HEIGHT: f64 = 1.395_612_425_086_089_5;

impl SpatialBump {
    pub fn new(dim: usize, height: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParams(format!("dimension n = {dim} not in {{2, 3}}")));
        }
        if !(height > MIN_BUMP_HEIGHT) {
            return Err(Error::InvalidParams(format!(
                "bump height {height} must exceed {MIN_BUMP_HEIGHT} so that psi > 1 on |y'| <= 1/2"
            )));
        }
        let mut bump = Self { dim, height, mass: 0.0 };
        bump.mass = bump.mass_with(32);
        Ok(bump)
    }

    /// Space dimension `n`; the bump lives on `ℝⁿ⁻¹`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// `c_ψ = ∫ψ`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn radial(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= 1.0 {
            0.0
        } else {
            self.height * (1.0 - 1.0 / (1.0 - r * r)).exp()
        }
    }

    /// `∫ψ` with `panels` Gauss panels of order 16 along the radius.
    pub fn mass_with(&self, panels: usize) -> f64 {
        let rule = GaussRule::new(16);
        if self.dim == 2 {
            2.0 * rule.panels(0.0, 1.0, panels, |r| self.radial(r))
        } else {
            2.0 * std::f64::consts::PI * rule.panels(0.0, 1.0, panels, |r| self.radial(r) * r)
        }
    }
}

/// `g(y', s) = a ψ(|y'|) φ(s) eₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub amplitude: f64,
    pub bump: SpatialBump,
    pub profile: TemporalProfile,
}

impl BoundaryData {
    pub fn new(amplitude: f64, bump: SpatialBump, profile: TemporalProfile) -> Result<Self> {
        if !(amplitude > 0.0) {
            return Err(Error::InvalidParams(format!("amplitude {amplitude} must be positive")));
        }
        Ok(Self { amplitude, bump, profile })
    }

    /// Normal component `gₙ(y', s)`.
    pub fn normal_component(&self, y: &[f64], s: f64) -> f64 {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.amplitude * self.bump.radial(r) * self.profile.eval(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_unimodal() -> Vec<TemporalProfile> {
        [ProfileFamily::A, ProfileFamily::B, ProfileFamily::C, ProfileFamily::D]
            .into_iter()
            .map(|f| make_profile(f, &[]).unwrap())
            .collect()
    }

    #[test]
    fn family_a_values() {
        let p = make_profile(ProfileFamily::A, &[]).unwrap();
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(1.0), 1.0);
        assert_eq!(p.deriv1(1.0), 0.0);
        assert!((p.eval(0.5) - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for p in all_unimodal() {
            let avoid: Vec<f64> = [0.0, 1.0, 2.0].into_iter().chain(p.breakpoints()).collect();
            for k in 1..400 {
                let t = 2.0 * k as f64 / 400.0 + 1e-3;
                if avoid.iter().any(|b| (t - b).abs() < 10.0 * h) || t >= 2.0 - h {
                    continue;
                }
                let fd1 = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
                let fd2 = (p.deriv1(t + h) - p.deriv1(t - h)) / (2.0 * h);
                let scale1 = p.deriv1(t).abs().max(1.0);
                let scale2 = p.deriv2(t).abs().max(1.0);
                assert!((fd1 - p.deriv1(t)).abs() <= 1e-6 * scale1, "{} t={t}", p.describe());
                // second difference of a degree-5 piece: truncation ~h² φ''''
                assert!((fd2 - p.deriv2(t)).abs() <= 1e-6 * scale2 * 1e3, "{} t={t}", p.describe());
            }
        }
    }

    #[test]
    fn unimodal_families_pass_assumption1() {
        for p in all_unimodal() {
            assert!(check_assumption1(&p, 10_000).passed, "{}", p.describe());
        }
        let c = make_profile(ProfileFamily::C, &[0.01]).unwrap();
        assert!(check_assumption1(&c, 1000).passed);
    }

    #[test]
    fn sine_shim_fails_assumption1() {
        let p = make_profile(ProfileFamily::Sine, &[]).unwrap();
        let report = check_assumption1(&p, 1000);
        assert!(!report.passed);
        assert!(report.violations.iter().any(|v| v.kind == ViolationKind::DecreasingOnRise));
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(make_profile(ProfileFamily::B, &[1.95, 0.1, 0.2]).is_err());
        assert!(make_profile(ProfileFamily::C, &[0.0]).is_err());
        assert!(make_profile(ProfileFamily::D, &[1.5]).is_err());
        assert!(make_profile(ProfileFamily::A, &[1.0]).is_err());
        assert!("nope".parse::<ProfileFamily>().is_err());
    }

    #[test]
    fn family_b_meets_derivative_window() {
        let p = make_profile(ProfileFamily::B, &[]).unwrap();
        let report = check_appendix_condition(&p, AppendixCondition::II);
        assert!(report.holds, "{report:?}");
        assert!(report.margin > 0.0);
    }

    #[test]
    fn wide_drop_window_cannot_meet_condition_ii() {
        // φ(r0) ≤ φ(1) ≤ a0 forces δ < 1/18 for the window to be non-empty.
        let p = make_profile(ProfileFamily::B, &[1.6, 0.2, 0.25]).unwrap();
        assert!(!check_appendix_condition(&p, AppendixCondition::II).holds);
    }

    #[test]
    fn family_c_meets_condition_iii() {
        let p = make_profile(ProfileFamily::C, &[0.01]).unwrap();
        let report = check_appendix_condition(&p, AppendixCondition::III);
        assert!(report.holds && report.margin > 0.0, "{report:?}");
    }

    #[test]
    fn condition_i_finds_a_tail_for_family_b() {
        let p = make_profile(ProfileFamily::B, &[]).unwrap();
        let report = check_appendix_condition(&p, AppendixCondition::I);
        assert!(report.holds);
        let r0 = report.r0.unwrap();
        assert!(r0 > 1.5 && r0 < 1.6);
        // Family A at t → 2 has φ → 0, so some r0 near 2 always exists.
        let a = make_profile(ProfileFamily::A, &[]).unwrap();
        let ra = check_appendix_condition(&a, AppendixCondition::I);
        let rhs = 2f64.powf(-1.5) * 8.0 / 15.0;
        assert!(ra.holds);
        assert!(2f64.powf(1.5) * a.eval(ra.r0.unwrap()) < rhs);
    }

    #[test]
    fn early_rise_constant_for_family_a() {
        let p = make_profile(ProfileFamily::A, &[]).unwrap();
        // φ/(tφ') = (2−t)/(2(2−2t)) is increasing; 0.75 at t = 0.5.
        let c = early_rise_constant(&p, 0.5);
        assert!(c > 0.74 && c <= 0.75 + 1e-12, "{c}");
    }

    #[test]
    fn bump_invariants() {
        for dim in [2, 3] {
            let bump = SpatialBump::new(dim, 2.0).unwrap();
            for k in 0..=1000 {
                let r = 1.5 * k as f64 / 1000.0;
                let v = bump.radial(r);
                assert!(v >= 0.0);
                if r >= 1.0 {
                    assert_eq!(v, 0.0);
                }
                if r <= 0.5 {
                    assert!(v > 1.0);
                }
            }
            // smooth at r = 1: vanishes faster than any power
            assert!(bump.radial(0.99) < 1e-20);
            let coarse = bump.mass_with(16);
            let fine = bump.mass_with(64);
            assert!((coarse - fine).abs() <= 1e-8 * fine, "{coarse} {fine}");
        }
        assert!(SpatialBump::new(3, 1.3).is_err());
        assert!(SpatialBump::new(4, 2.0).is_err());
    }
}
