//! Robin spectrum of balls and annuli, mode by mode.
//!
//! Separating `u(x) = φ(|x|) Y_ℓ(x/|x|)` reduces the problem to the radial
//! equation
//!
//! ```text
//! φ'' + (d−1)/ρ φ' − ℓ(ℓ+d−2)/ρ² φ + λ φ = 0
//! ```
//!
//! with `−φ'(r₁) − αφ(r₁) = 0` on an inner circle and `φ'(R) − αφ(R) = 0`
//! on the outer one. Two independent engines solve it:
//!
//! * [`shoot`] integrates from the inner boundary (or from a regular
//!   series start near the centre of a ball) and returns the outer Robin
//!   residual `F(λ)`, whose zeros are the eigenvalues;
//! * [`characteristic_det`] imposes both Robin rows on the modified Bessel
//!   form `ρ^{-p}[C₁K_ν(kρ) + C₂I_ν(kρ)]` and vanishes at `k = √(−λ)`.

mod bessel_engine;
mod profile;
mod shooting;
mod spectrum;

use serde::Serialize;

pub use bessel_engine::{characteristic_det, eigenvalue_bessel, zero_mode_characteristic};
pub use profile::Profile;
pub use shooting::{find_eigenvalues, first_eigenpair, lowest_eigenpair, shoot, EigenSearch};
pub use spectrum::{assemble_spectrum, mode_eigenvalues, Spectrum, SpectrumEntry};

use crate::domain::{ModeSpec, RobinProblem};
use crate::ode::OdeTolerance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub ode: OdeTolerance,
    /// Points of the initial sign-change scan over a λ (or k) window.
    pub scan_points: usize,
    /// Ball shooting starts at `ball_start_fraction · r`.
    pub ball_start_fraction: f64,
    /// How many times a scan interval may be subdivided when the node
    /// count reveals a missed root.
    pub max_refine_depth: usize,
    /// Profile panels per unit of `k·(r₂ − r₁)`.
    pub panel_density: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            ode: OdeTolerance::default(),
            scan_points: 400,
            ball_start_fraction: 1e-6,
            max_refine_depth: 3,
            panel_density: 1.5,
        }
    }
}

impl SolverConfig {
    /// Same configuration with both ODE tolerances set to `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self { ode: OdeTolerance { atol: tol, rtol: tol }, ..Self::default() }
    }
}

/// Which engine produced an eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Shooting,
    Bessel,
}

/// Radial eigenpair of one angular mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub problem: RobinProblem,
    pub mode: ModeSpec,
    /// Radial index, `n − 1` interior sign changes.
    pub n: usize,
    pub lambda: f64,
    /// `√(−λ)` on the negative branch, 0 otherwise.
    pub k: f64,
    /// L²(Ω)-normalised radial profile.
    pub profile: Profile,
    /// Coefficients of `K_ν` and `I_ν` (Bessel engine only, same normalisation as `profile`).
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub engine: Engine,
}

/// Robin residuals at the two boundary circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResiduals {
    /// `−φ'(r₁) − αφ(r₁)`, absent for balls.
    pub inner: Option<f64>,
    /// `φ'(R) − αφ(R)`.
    pub outer: f64,
}

impl BoundaryResiduals {
    pub fn max_abs(&self) -> f64 {
        self.outer.abs().max(self.inner.map_or(0.0, f64::abs))
    }
}

impl Eigenpair {
    pub fn boundary_residuals(&self) -> BoundaryResiduals {
        let alpha = self.problem.alpha;
        let p = &self.profile;
        let inner = self.problem.domain.inner_radius().map(|_| -p.dphi_first() - alpha * p.phi_first());
        BoundaryResiduals { inner, outer: p.dphi_last() - alpha * p.phi_last() }
    }

    /// Interior sign changes of the profile.
    pub fn node_count(&self) -> usize {
        self.profile.sign_changes()
    }

    /// Rayleigh quotient of the profile, evaluated by quadrature.
    pub fn rayleigh_quotient(&self) -> f64 {
        self.profile.rayleigh_quotient(&self.problem, self.mode)
    }
}

fn k_from_lambda(lambda: f64) -> f64 {
    if lambda < 0.0 {
        (-lambda).sqrt()
    } else {
        0.0
    }
}

/// Default search window for the lowest eigenvalue of `problem`: the upper
/// end is 0 (the first eigenvalue is negative), the lower end sits below the
/// large-α asymptote `−α² − (d−1)α/r` of the smallest boundary radius.
pub fn default_window(problem: &RobinProblem) -> (f64, f64) {
    let d = problem.dim() as f64;
    let alpha = problem.alpha;
    let domain = &problem.domain;
    let m = domain.measures();
    let r_min = domain.min_radius();
    let width = domain.outer_radius() - domain.inner_radius().unwrap_or(0.0);
    let lo = -(alpha + (d - 1.0) / r_min).powi(2) - 2.0 * alpha * m.surface / m.volume - 10.0;
    (lo.max(-(250.0 / width).powi(2)), 0.0)
}
