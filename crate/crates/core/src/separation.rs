//! Separation times from sign changes of the wall shear (tangential) or of
//! `D²_{xₙ}wₙ` (normal), and the reports built on top of them.

use rayon::prelude::*;
use serde::Serialize;

use crate::kernels::{norm2, KernelContext};
use crate::profiles::{BoundaryData, ProfileFamily, TemporalProfile};
use crate::singular_quadrature::{m_prime, t0_star, QuadratureSpec};
use crate::wall_fields::WallPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationKind {
    /// Sign change of `D_{xₙ}wᵢ(x', 0, ·)`.
    Tangential,
    /// Sign change of `D²_{xₙ}wₙ(x', 0, ·)`.
    Normal,
}

impl SeparationKind {
    pub fn name(self) -> &'static str {
        match self {
            SeparationKind::Tangential => "tangential",
            SeparationKind::Normal => "normal",
        }
    }
}

impl std::str::FromStr for SeparationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tangential" => Ok(Self::Tangential),
            "normal" => Ok(Self::Normal),
            other => Err(Error::Config(format!("unknown separation kind '{other}'"))),
        }
    }
}

/// Scan and admissibility settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationSpec {
    /// Smallest admissible `|x'|`.
    pub c_min: f64,
    /// Tangential searches need `|x'| ≤ cone_ratio·xᵢ`.
    pub cone_ratio: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
    /// Final bracket width.
    pub bracket_tol: f64,
    /// Scan values within this fraction of the scan maximum count as zero.
    pub ambiguity: f64,
}

impl Default for SeparationSpec {
    fn default() -> Self {
        Self {
            c_min: 4.0,
            cone_ratio: 1.0,
            t_start: 0.05,
            t_end: 1.95,
            step: 0.01,
            bracket_tol: 1e-6,
            ambiguity: 1e-12,
        }
    }
}

impl SeparationSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.c_min > 1.0
            && self.cone_ratio >= 1.0
            && self.t_start > 0.0
            && self.t_end <= 2.0
            && self.t_start < self.t_end
            && self.step > 0.0
            && self.bracket_tol > 0.0
            && self.ambiguity >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("inconsistent separation settings {self:?}")))
        }
    }

    fn scan_times(&self) -> Vec<f64> {
        let count = ((self.t_end - self.t_start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| self.t_start + self.step * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRecord {
    pub x: Vec<f64>,
    /// Zero-based; serialized 1-based like every other output.
    #[serde(serialize_with = "one_based")]
    pub axis: usize,
    pub kind: SeparationKind,
    pub t_star: f64,
    /// Quantity is positive at `t_lo` and negative at `t_hi`.
    pub t_lo: f64,
    pub t_hi: f64,
    /// Quantity positive at every scan time before the bracket.
    pub pre_window_certified: bool,
    /// Scan brackets of further `+ → −` changes after the first.
    pub later_crossings: Vec<(f64, f64)>,
}

fn one_based<S: serde::Serializer>(axis: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*axis as u64 + 1)
}

impl SeparationRecord {
    pub fn radius(&self) -> f64 {
        norm2(&self.x).sqrt()
    }
}

fn target(point: &WallPoint, data: &BoundaryData, t: f64, i: usize, kind: SeparationKind, spec: &QuadratureSpec) -> Result<f64> {
    match kind {
        SeparationKind::Tangential => Ok(point.shear(data, t, i, spec)?.value()),
        SeparationKind::Normal => point.d2_wn(data, t, spec),
    }
}

fn check_admissible(x: &[f64], i: usize, kind: SeparationKind, sspec: &SeparationSpec) -> Result<()> {
    let r = norm2(x).sqrt();
    if r < sspec.c_min {
        return Err(Error::Precondition(format!("|x'| = {r} is below c_min = {}", sspec.c_min)));
    }
    let xi = *x.get(i).ok_or_else(|| Error::InvalidParams(format!("axis {i} out of range")))?;
    // On the axis itself |x'| = xᵢ, so the cone test is inclusive.
    if kind == SeparationKind::Tangential && r > sspec.cone_ratio * xi * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "x' = {x:?} lies outside the cone |x'| ≤ {}·x_{}",
            sspec.cone_ratio,
            i + 1
        )));
    }
    Ok(())
}

/// First `+ → −` sign change of the target quantity on the scan window,
/// refined by bisection. `None` when there is no such change.
pub fn find_separation(
    ctx: &KernelContext,
    x: &[f64],
    i: usize,
    data: &BoundaryData,
    spec: &QuadratureSpec,
    sspec: &SeparationSpec,
    kind: SeparationKind,
) -> Result<Option<SeparationRecord>> {
    sspec.validate()?;
    check_admissible(x, i, kind, sspec)?;
    let point = WallPoint::new(ctx, x, spec)?;
    find_separation_at(&point, i, data, spec, sspec, kind)
}

/// As [`find_separation`] with a prebuilt [`WallPoint`]; skips the admissibility test.
pub fn find_separation_at(
    point: &WallPoint,
    i: usize,
    data: &BoundaryData,
    spec: &QuadratureSpec,
    sspec: &SeparationSpec,
    kind: SeparationKind,
) -> Result<Option<SeparationRecord>> {
    let times = sspec.scan_times();
    let values = times
        .iter()
        .map(|&t| target(point, data, t, i, kind, spec))
        .collect::<Result<Vec<_>>>()?;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(None);
    }
    let zero = sspec.ambiguity * scale;
    let crossings: Vec<usize> = (1..values.len()).filter(|&k| values[k - 1] > 0.0 && values[k] < 0.0).collect();
    let Some(&k) = crossings.first() else {
        return Ok(None);
    };
    for j in [k - 1, k] {
        if values[j].abs() <= zero {
            return Err(Error::AmbiguousSign(times[j]));
        }
    }
    let (mut lo, mut hi) = (times[k - 1], times[k]);
    while hi - lo > sspec.bracket_tol {
        let mid = 0.5 * (lo + hi);
        let v = target(point, data, mid, i, kind, spec)?;
        if v.abs() <= zero {
            return Err(Error::AmbiguousSign(mid));
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(SeparationRecord {
        x: point.point().to_vec(),
        axis: i,
        kind,
        t_star: 0.5 * (lo + hi),
        t_lo: lo,
        t_hi: hi,
        pre_window_certified: values[..k].iter().all(|&v| v > 0.0),
        later_crossings: crossings[1..].iter().map(|&j| (times[j - 1], times[j])).collect(),
    }))
}

/// Outcome of a sweep along `eᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Locus {
    pub radii: Vec<f64>,
    pub records: Vec<SeparationRecord>,
    /// `Some(true)` when `t*` strictly increases with radius over the records;
    /// `None` when fewer than two records exist.
    pub monotone: Option<bool>,
}

impl Locus {
    fn from_records(radii: &[f64], records: Vec<SeparationRecord>) -> Self {
        let monotone = (records.len() >= 2).then(|| records.windows(2).all(|w| w[0].t_star < w[1].t_star));
        Self { radii: radii.to_vec(), records, monotone }
    }
}

fn check_radii(radii: &[f64], sspec: &SeparationSpec) -> Result<()> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("radii must be strictly increasing".into()));
    }
    if let Some(r) = radii.iter().find(|&&r| r < sspec.c_min) {
        return Err(Error::Precondition(format!("radius {r} is below c_min = {}", sspec.c_min)));
    }
    Ok(())
}

/// Per-radius results of a sweep along `eᵢ`, in radius order, without
/// aborting on the first failure.
pub fn locus_outcomes(
    ctx: &KernelContext,
    radii: &[f64],
    i: usize,
    data: &BoundaryData,
    spec: &QuadratureSpec,
    sspec: &SeparationSpec,
    kind: SeparationKind,
) -> Result<Vec<(f64, Result<Option<SeparationRecord>>)>> {
    check_radii(radii, sspec)?;
    let d = ctx.boundary_dim();
    if i >= d {
        return Err(Error::InvalidParams(format!("axis {i} out of range for n = {}", ctx.n())));
    }
    Ok(radii
        .par_iter()
        .map(|&r| {
            let mut x = vec![0.0; d];
            x[i] = r;
            (r, find_separation(ctx, &x, i, data, spec, sspec, kind))
        })
        .collect())
}

/// Separation records along `eᵢ` with a monotonicity verdict.
pub fn separation_locus(
    ctx: &KernelContext,
    radii: &[f64],
    i: usize,
    data: &BoundaryData,
    spec: &QuadratureSpec,
    sspec: &SeparationSpec,
    kind: SeparationKind,
) -> Result<Locus> {
    let mut records = Vec::new();
    for (_, outcome) in locus_outcomes(ctx, radii, i, data, spec, sspec, kind)? {
        records.extend(outcome?);
    }
    Ok(Locus::from_records(radii, records))
}

/// Distances `t₀* − t*(R)` along a locus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoteReport {
    pub t0_star: f64,
    pub radii: Vec<f64>,
    pub t_stars: Vec<f64>,
    pub gaps: Vec<f64>,
    pub all_below_t0: bool,
    pub gaps_decreasing: bool,
    pub final_gap: f64,
    /// Final gap below both the first gap and `0.05`.
    pub final_gap_ok: bool,
}

impl AsymptoteReport {
    pub fn passed(&self) -> bool {
        self.all_below_t0 && self.gaps_decreasing && self.final_gap_ok
    }
}

pub fn asymptote_check(records: &[SeparationRecord], p: &TemporalProfile, spec: &QuadratureSpec) -> Result<AsymptoteReport> {
    let t0 = t0_star(p, spec)?.ok_or(Error::MissingT0Star)?;
    if records.len() < 3 {
        return Err(Error::Precondition(format!("need at least 3 records, got {}", records.len())));
    }
    let radii: Vec<f64> = records.iter().map(SeparationRecord::radius).collect();
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("records must be at increasing radii".into()));
    }
    let t_stars: Vec<f64> = records.iter().map(|r| r.t_star).collect();
    let gaps: Vec<f64> = t_stars.iter().map(|t| (t0 - t).abs()).collect();
    let final_gap = gaps[gaps.len() - 1];
    Ok(AsymptoteReport {
        t0_star: t0,
        all_below_t0: t_stars.iter().all(|&t| t < t0),
        gaps_decreasing: gaps.windows(2).all(|w| w[1] < w[0]),
        final_gap,
        final_gap_ok: final_gap < gaps[0] && final_gap < 0.05,
        radii,
        t_stars,
        gaps,
    })
}

/// Agreement of `t*ₙ` at two points of equal radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub t_first: Option<f64>,
    pub t_second: Option<f64>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    /// `φ ≡ 0`: nothing to check.
    pub vacuous: bool,
    /// `−max M'` over a 100-point grid on `(1, 2)`; positive means `M' < −e₀` holds with this `e₀`.
    pub m_prime_margin: f64,
    pub decreasing_on_1_2: bool,
    pub sign_changes: usize,
    pub t_star: Option<f64>,
    pub symmetry: Option<SymmetryCheck>,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.vacuous
            || (self.decreasing_on_1_2
                && self.sign_changes == 1
                && self.symmetry.as_ref().is_some_and(|s| s.agrees))
    }
}

/// `D²_{xₙ}wₙ(x', 0, ·)`: strict decrease on `(1, 2)`, the number of sign
/// changes on `(0, 2)`, and `t*ₙ` at two points of radius `|x'|` (angles 0 and
/// π/3 for `n = 3`, `±|x'|` for `n = 2`), which must agree to `1e-4`.
pub fn uniqueness_check(ctx: &KernelContext, x: &[f64], data: &BoundaryData, spec: &QuadratureSpec) -> Result<UniquenessReport> {
    let p = &data.profile;
    if p.family() == ProfileFamily::Zero {
        return Ok(UniquenessReport {
            vacuous: true,
            m_prime_margin: 0.0,
            decreasing_on_1_2: true,
            sign_changes: 0,
            t_star: None,
            symmetry: None,
        });
    }
    let grid: Vec<f64> = (0..100).map(|k| 1.0 + (k as f64 + 0.5) / 100.0).collect();
    let m_prime_margin = -grid
        .iter()
        .map(|&t| m_prime(p, t, spec))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let point = WallPoint::new(ctx, x, spec)?;
    let on_grid = grid.iter().map(|&t| point.d2_wn(data, t, spec)).collect::<Result<Vec<_>>>()?;
    let decreasing = on_grid.windows(2).all(|w| w[1] < w[0]);
    let scan = (1..200).map(|k| point.d2_wn(data, 0.01 * k as f64, spec)).collect::<Result<Vec<_>>>()?;
    let signs: Vec<f64> = scan.iter().filter(|v| **v != 0.0).map(|v| v.signum()).collect();
    let sign_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();

    let sspec = SeparationSpec { c_min: 1.0 + f64::EPSILON, ..SeparationSpec::default() };
    let t_star = find_separation_at(&point, 0, data, spec, &sspec, SeparationKind::Normal)?.map(|r| r.t_star);
    let r = norm2(x).sqrt();
    let (first, second) = if x.len() == 1 {
        (vec![r], vec![-r])
    } else {
        let a = std::f64::consts::FRAC_PI_3;
        (vec![r, 0.0], vec![r * a.cos(), r * a.sin()])
    };
    let normal_time = |y: &[f64]| -> Result<Option<f64>> {
        let wp = WallPoint::new(ctx, y, spec)?;
        Ok(find_separation_at(&wp, 0, data, spec, &sspec, SeparationKind::Normal)?.map(|r| r.t_star))
    };
    let (t_first, t_second) = (normal_time(&first)?, normal_time(&second)?);
    let agrees = match (t_first, t_second) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-4,
        (None, None) => true,
        _ => false,
    };
    Ok(UniquenessReport {
        vacuous: false,
        m_prime_margin,
        decreasing_on_1_2: decreasing,
        sign_changes,
        t_star,
        symmetry: Some(SymmetryCheck { first, second, t_first, t_second, agrees }),
    })
}
