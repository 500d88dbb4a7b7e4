//! Boundary diagnostics for the Stokes system in the half-space driven by a
//! localized normal inflow `g(y', s) = a ψ(|y'|) φ(s) eₙ`.
//!
//! The crate evaluates the wall shear `D_{xₙ} wᵢ(x', 0, t)`, the second normal
//! derivative `D²_{xₙ} wₙ`, and the tangential pressure gradient on the wall.
//! It then locates boundary-layer separation times from sign changes of those
//! quantities.
//!
//! Module map:
//!
//! * [`profiles`]: the temporal profile `φ`, the radial bump `ψ`, and the
//!   assumption checkers.
//! * [`kernels`]: the Gaussian and Newtonian kernels, Riesz transforms of the
//!   bump, and the far-field closed forms.
//! * [`singular_quadrature`]: Abel-type time integrals, `M(t)`, `M'(t)`, and `t₀*`.
//! * [`wall_fields`]: `fᵢ`, the wall shear, `D²_{xₙ} wₙ`, the pressure gradient,
//!   and the near-wall expansion.
//! * [`separation`]: separation records, loci along an axis, and the
//!   asymptote/uniqueness reports.
//! * [`config`] and [`commands`]: the `bls` command-line front end.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod kernels;
pub mod output;
pub mod profiles;
pub mod quadrature;
pub mod separation;
pub mod singular_quadrature;
pub mod wall_fields;

pub use error::{Error, Result};
