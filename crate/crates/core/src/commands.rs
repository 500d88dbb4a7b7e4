//! The four `bls` subcommands. Each writes its files into `out` and returns
//! their paths; every file is a pure function of the configuration.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::fmt_f64;
use crate::profiles::{check_appendix_condition, check_assumption1, AppendixCondition, AppendixReport, Assumption1Report};
use crate::separation::{
    asymptote_check, locus_outcomes, uniqueness_check, AsymptoteReport, SeparationKind, SeparationRecord,
    UniquenessReport,
};
use crate::singular_quadrature::{m_prime, MCurve};
use crate::wall_fields::{WallPoint, WallSample};
use crate::Result;

fn write(out: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    let path = out.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn profile_tag(config: &RunConfig) -> Result<String> {
    let data = config.data()?;
    Ok(format!("n={} amplitude={} height={} {}", config.dimension, config.amplitude, config.bump.height, data.profile.describe()))
}

/// `t,M,M_prime` at 200 times in `(0, 2)`, preceded by a metadata line with `t0_star`.
pub fn cmd_m_curve(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = config.data()?;
    let spec = config.quadrature_spec()?;
    let curve = MCurve::standard(&data.profile, &spec)?;
    let marker = curve.first_zero.map_or_else(|| "none".to_string(), fmt_f64);
    let mut csv = format!("# bls m-curve {} t0_star={marker}\nt,M,M_prime\n", profile_tag(config)?);
    for ((t, m), d) in curve.times.iter().zip(&curve.values).zip(&curve.derivatives) {
        csv.push_str(&format!("{},{},{}\n", fmt_f64(*t), fmt_f64(*m), fmt_f64(*d)));
    }
    Ok(vec![write(out, &config.output.m_curve, &csv)?])
}

/// Wall samples at `r·eᵢ` for every configured axis, radius and time, in that
/// nesting order (radius-major, time-minor within an axis).
pub fn cmd_shear_field(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = config.data()?;
    let spec = config.quadrature_spec()?;
    let ctx = config.kernel_context()?;
    let d = config.dimension - 1;
    let points: Vec<Vec<f64>> = config
        .axes()
        .into_iter()
        .flat_map(|i| {
            config.sweep.radii.iter().map(move |&r| {
                let mut x = vec![0.0; d];
                x[i] = r;
                x
            })
        })
        .collect();
    let blocks: Vec<Vec<String>> = points
        .par_iter()
        .map(|x| {
            let point = WallPoint::new(&ctx, x, &spec)?;
            config
                .sweep
                .times
                .iter()
                .map(|&t| WallSample::evaluate(&point, &data, t, &spec).map(|s| s.csv_row()))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut csv = format!("# bls shear-field {}\n{}\n", profile_tag(config)?, WallSample::csv_header(config.dimension));
    for row in blocks.iter().flatten() {
        csv.push_str(row);
        csv.push('\n');
    }
    Ok(vec![write(out, &config.output.shear_field, &csv)?])
}

#[derive(Debug, Serialize)]
struct RadiusFailure {
    axis: usize,
    radius: f64,
    error: String,
}

#[derive(Debug, Serialize)]
struct PressureAtSeparation {
    radius: f64,
    axis: usize,
    t_star: f64,
    dp: f64,
    adverse: bool,
}

#[derive(Debug, Serialize)]
struct AxisSummary {
    axis: usize,
    records: usize,
    monotone: Option<bool>,
    asymptote: std::result::Result<AsymptoteReport, String>,
}

#[derive(Debug, Serialize)]
struct SeparationSummary {
    config: String,
    kind: SeparationKind,
    verdict: String,
    records: Vec<SeparationRecord>,
    failures: Vec<RadiusFailure>,
    axes: Vec<AxisSummary>,
    pressure_at_separation: Vec<PressureAtSeparation>,
    uniqueness: Option<std::result::Result<UniquenessReport, String>>,
}

fn separation_csv(records: &[SeparationRecord]) -> String {
    let mut csv = String::from("radius,axis,kind,t_star,t_lo,t_hi,pre_window_certified,later_crossings\n");
    for r in records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.radius()),
            r.axis + 1,
            r.kind.name(),
            fmt_f64(r.t_star),
            fmt_f64(r.t_lo),
            fmt_f64(r.t_hi),
            r.pre_window_certified,
            r.later_crossings.len()
        ));
    }
    csv
}

/// Separation records along each configured axis plus a JSON summary with the
/// monotonicity verdict, asymptote gaps, the pressure sign at tangential
/// separation, and (for the normal kind) the uniqueness report. Per-radius
/// failures are listed in the summary; the first one is returned after the
/// files are written.
pub fn cmd_separation(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = config.data()?;
    let spec = config.quadrature_spec()?;
    let sspec = config.separation_spec()?;
    let kind = config.separation_kind()?;
    let ctx = config.kernel_context()?;
    let mut radii = config.sweep.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    let mut axes = Vec::new();
    for i in config.axes() {
        let mut axis_records = Vec::new();
        for (radius, outcome) in locus_outcomes(&ctx, &radii, i, &data, &spec, &sspec, kind)? {
            match outcome {
                Ok(rec) => axis_records.extend(rec),
                Err(e) => {
                    failures.push(RadiusFailure { axis: i + 1, radius, error: e.to_string() });
                    first_error.get_or_insert(e);
                }
            }
        }
        let monotone = (axis_records.len() >= 2).then(|| axis_records.windows(2).all(|w| w[0].t_star < w[1].t_star));
        axes.push(AxisSummary {
            axis: i + 1,
            records: axis_records.len(),
            monotone,
            asymptote: asymptote_check(&axis_records, &data.profile, &spec).map_err(|e| e.to_string()),
        });
        records.extend(axis_records);
    }

    let pressure_at_separation = if kind == SeparationKind::Tangential {
        records
            .par_iter()
            .filter(|r| r.t_star > 1.0)
            .map(|r| {
                let point = WallPoint::new(&ctx, &r.x, &spec)?;
                let dp = point.pressure_gradient(&data, r.t_star, r.axis, &spec)?.value();
                Ok(PressureAtSeparation { radius: r.radius(), axis: r.axis + 1, t_star: r.t_star, dp, adverse: dp > 0.0 })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let uniqueness = match (kind, radii.last()) {
        (SeparationKind::Normal, Some(&r)) if data.profile.starts_flat() => {
            let mut x = vec![0.0; config.dimension - 1];
            x[0] = r;
            Some(uniqueness_check(&ctx, &x, &data, &spec).map_err(|e| e.to_string()))
        }
        _ => None,
    };

    let verdict = if records.is_empty() {
        "no separation".to_string()
    } else {
        format!("{} separation record(s)", records.len())
    };
    let summary = SeparationSummary {
        config: profile_tag(config)?,
        kind,
        verdict,
        records: records.clone(),
        failures,
        axes,
        pressure_at_separation,
        uniqueness,
    };
    let paths = vec![
        write(out, &config.output.separation_csv, &separation_csv(&records))?,
        write(out, &config.output.separation_json, &to_json(&summary))?,
    ];
    match first_error {
        Some(e) => Err(e),
        None => Ok(paths),
    }
}

#[derive(Debug, Serialize)]
struct MSignSummary {
    t0_star: Option<f64>,
    /// First and last scan times with `M < 0`.
    negative_window: Option<(f64, f64)>,
    min: f64,
    positive_throughout: bool,
    /// `max M'` on `(1, 2)` when `M'` is available.
    max_m_prime_on_1_2: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    profile: String,
    assumption1: Assumption1Report,
    appendix: Vec<AppendixReport>,
    m_sign: MSignSummary,
}

/// Assumption and appendix-condition report with a sign summary of `M` on `(0, 2)`.
pub fn cmd_check(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = config.data()?;
    let spec = config.quadrature_spec()?;
    let p = &data.profile;
    let curve = MCurve::standard(p, &spec)?;
    let negatives: Vec<f64> = curve.times.iter().zip(&curve.values).filter(|(_, m)| **m < 0.0).map(|(t, _)| *t).collect();
    let max_m_prime_on_1_2 = if p.starts_flat() {
        let values = (1..100).map(|k| m_prime(p, 1.0 + 0.01 * k as f64, &spec)).collect::<Result<Vec<_>>>()?;
        Some(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
    } else {
        None
    };
    let report = CheckReport {
        profile: profile_tag(config)?,
        assumption1: check_assumption1(p, 10_000),
        appendix: [AppendixCondition::I, AppendixCondition::II, AppendixCondition::III]
            .into_iter()
            .map(|c| check_appendix_condition(p, c))
            .collect(),
        m_sign: MSignSummary {
            t0_star: curve.first_zero,
            negative_window: negatives.first().map(|&a| (a, negatives[negatives.len() - 1])),
            min: curve.values.iter().copied().fold(f64::INFINITY, f64::min),
            positive_throughout: curve.values.iter().all(|&m| m > 0.0),
            max_m_prime_on_1_2,
        },
    };
    Ok(vec![write(out, &config.output.check, &to_json(&report))?])
}
