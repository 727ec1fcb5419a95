//! First-order shape calculus of the first Robin eigenvalue on planar
//! annuli: the Hadamard boundary integral, its finite-difference check,
//! the stationarity function `G` under volume-preserving perturbations,
//! and the Riccati variable `z = φ'/φ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::domain::{DomainSpec, RobinProblem, Shape};
use crate::error::{Error, Result};
use crate::roots::brent;
use crate::solver::{first_eigenpair, Eigenpair, SolverConfig};

/// Normal velocity prescribed on the boundary circles of an annulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryField {
    /// `V = ν` on the outer circle, 0 on the inner one.
    OuterNormal,
    /// Constant `V·ν` on each circle with zero total flux.
    VolumePreservingPair { outer_weight: f64, inner_weight: f64 },
}

impl BoundaryField {
    /// The volume-preserving pair with the given outer weight on `A_{r₁,r₂}`.
    pub fn volume_preserving(outer_weight: f64, r1: f64, r2: f64) -> Self {
        BoundaryField::VolumePreservingPair { outer_weight, inner_weight: -outer_weight * r2 / r1 }
    }

    /// `(V·ν on |x| = r₂, V·ν on |x| = r₁)`.
    pub fn normal_components(&self) -> (f64, f64) {
        match *self {
            BoundaryField::OuterNormal => (1.0, 0.0),
            BoundaryField::VolumePreservingPair { outer_weight, inner_weight } => (outer_weight, inner_weight),
        }
    }

    /// `∫_{∂Ω} V·ν dσ` in the plane.
    pub fn flux(&self, r1: f64, r2: f64) -> f64 {
        let (wo, wi) = self.normal_components();
        2.0 * PI * (wo * r2 + wi * r1)
    }

    fn check(&self, domain: &DomainSpec) -> Result<()> {
        let r2 = domain.outer_radius();
        let r1 = domain.inner_radius();
        match (self, r1) {
            (BoundaryField::VolumePreservingPair { outer_weight, inner_weight }, Some(r1)) => {
                let flux = self.flux(r1, r2);
                let scale = 2.0 * PI * (outer_weight.abs() * r2 + inner_weight.abs() * r1);
                if flux.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidParameter(format!("field is not volume preserving: flux = {flux:e}")));
                }
                Ok(())
            }
            (BoundaryField::VolumePreservingPair { .. }, None) => {
                Err(Error::InvalidParameter("a two-circle field needs an annulus".into()))
            }
            (BoundaryField::OuterNormal, _) => Ok(()),
        }
    }
}

fn check_first_planar(pair: &Eigenpair) -> Result<()> {
    if pair.problem.dim() != 2 {
        return Err(Error::Dimension(pair.problem.dim()));
    }
    if pair.mode.ell != 0 || pair.n != 1 {
        return Err(Error::Mode(format!(
            "needs the first eigenpair (l = 0, n = 1), got l = {}, n = {}",
            pair.mode.ell, pair.n
        )));
    }
    Ok(())
}

/// Hadamard derivative of λ₁ in direction `field`:
///
/// ```text
/// dλ₁(Ω, V) = ∫_{∂Ω} (|∇u₁|² − λ₁u₁² − 2α²u₁² − αHu₁²)(V·ν) dσ
/// ```
///
/// with `H = 1/r₂` on the outer circle and `H = −1/r₁` on the inner one
/// (curvature taken with respect to the outward normal of the annulus) and
/// `u₁` normalised in L²(Ω). The integrand is constant on each circle.
pub fn hadamard_derivative(pair: &Eigenpair, field: &BoundaryField) -> Result<f64> {
    check_first_planar(pair)?;
    let domain = &pair.problem.domain;
    field.check(domain)?;
    let alpha = pair.problem.alpha;
    let lambda = pair.lambda;
    let integrand = |phi: f64, dphi: f64, curvature: f64| {
        dphi * dphi - lambda * phi * phi - 2.0 * alpha * alpha * phi * phi - alpha * curvature * phi * phi
    };
    let (wo, wi) = field.normal_components();
    let r2 = domain.outer_radius();
    let p = &pair.profile;
    let mut total = 2.0 * PI * r2 * wo * integrand(p.phi_last(), p.dphi_last(), 1.0 / r2);
    if let Some(r1) = domain.inner_radius() {
        total += 2.0 * PI * r1 * wi * integrand(p.phi_first(), p.dphi_first(), -1.0 / r1);
    }
    Ok(total)
}

/// Closed form of the outer-normal derivative, `2πr₂φ²(r₂)(−λ − α² − α/r₂)`.
pub fn outer_derivative_closed_form(pair: &Eigenpair) -> f64 {
    let r2 = pair.problem.domain.outer_radius();
    let alpha = pair.problem.alpha;
    2.0 * PI * r2 * pair.profile.phi_last().powi(2) * (-pair.lambda - alpha * alpha - alpha / r2)
}

/// Floor used in the relative discrepancy of a [`DerivativeReport`].
pub const DISCREPANCY_FLOOR: f64 = 1e4 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub hadamard_value: f64,
    pub fd_value: f64,
    pub fd_step: f64,
    pub rel_discrepancy: f64,
}

impl DerivativeReport {
    pub fn new(hadamard_value: f64, fd_value: f64, fd_step: f64) -> Self {
        let rel_discrepancy = (hadamard_value - fd_value).abs() / hadamard_value.abs().max(DISCREPANCY_FLOOR);
        Self { hadamard_value, fd_value, fd_step, rel_discrepancy }
    }
}

/// The domain moved by `t·V`: `r₂ → r₂ + t V·ν`, `r₁ → r₁ − t V·ν` (the
/// outward normal of the annulus points towards the centre on the inner circle).
fn perturbed(domain: &DomainSpec, field: &BoundaryField, t: f64) -> Result<DomainSpec> {
    let (wo, wi) = field.normal_components();
    match domain.shape() {
        Shape::Ball { r } => DomainSpec::ball(domain.dim(), r + t * wo),
        Shape::Annulus { r1, r2 } => DomainSpec::annulus(domain.dim(), r1 - t * wi, r2 + t * wo),
    }
}

fn check_fd_step(domain: &DomainSpec, field: &BoundaryField, h: f64) -> Result<()> {
    let reject = |reason: String| Err(Error::FdStep { h, reason });
    if !(h.is_finite() && h > 0.0) {
        return reject("step must be finite and positive".into());
    }
    let (wo, wi) = field.normal_components();
    let speed = wo.abs().max(wi.abs());
    let r2 = domain.outer_radius();
    if h * speed.max(1e-300) < 1e-7 * r2 {
        return reject(format!("below the cancellation limit 1e-7 * r2 = {:e}", 1e-7 * r2));
    }
    let thickness = r2 - domain.inner_radius().unwrap_or(0.0);
    if h * speed > 0.02 * thickness.min(domain.min_radius()) {
        return reject("boundary displacement exceeds 2% of the smallest length scale".into());
    }
    Ok(())
}

/// Central finite difference of λ₁ along `field`, re-solving the
/// eigenproblem on the two displaced domains.
pub fn fd_derivative(problem: &RobinProblem, field: &BoundaryField, h: f64, cfg: &SolverConfig) -> Result<f64> {
    field.check(&problem.domain)?;
    check_fd_step(&problem.domain, field, h)?;
    let lambda_at = |t: f64| -> Result<f64> {
        let p = RobinProblem::new(perturbed(&problem.domain, field, t)?, problem.alpha)?;
        Ok(first_eigenpair(&p, cfg)?.lambda)
    };
    Ok((lambda_at(h)? - lambda_at(-h)?) / (2.0 * h))
}

/// Hadamard value next to its finite-difference oracle.
pub fn derivative_report(
    problem: &RobinProblem,
    field: &BoundaryField,
    h: f64,
    cfg: &SolverConfig,
) -> Result<DerivativeReport> {
    let pair = first_eigenpair(problem, cfg)?;
    let hadamard = hadamard_derivative(&pair, field)?;
    let fd = fd_derivative(problem, field, h, cfg)?;
    Ok(DerivativeReport::new(hadamard, fd, h))
}

fn planar_annulus(r1: f64, r2: f64, alpha: f64) -> Result<RobinProblem> {
    RobinProblem::new(DomainSpec::annulus(2, r1, r2)?, alpha)
}

/// `G = φ²(r₂)(k² − α² − α/r₂) − φ²(r₁)(k² − α² + α/r₁)` for a first
/// eigenpair on a planar annulus, `k² = −λ₁`.
pub fn stationarity_g_of(pair: &Eigenpair) -> Result<f64> {
    check_first_planar(pair)?;
    let r1 = pair.problem.domain.inner_radius().ok_or_else(|| Error::InvalidParameter("G needs an annulus".into()))?;
    let r2 = pair.problem.domain.outer_radius();
    let alpha = pair.problem.alpha;
    let k2 = -pair.lambda;
    let p = &pair.profile;
    Ok(p.phi_last().powi(2) * (k2 - alpha * alpha - alpha / r2)
        - p.phi_first().powi(2) * (k2 - alpha * alpha + alpha / r1))
}

pub fn stationarity_g(r1: f64, r2: f64, alpha: f64, cfg: &SolverConfig) -> Result<f64> {
    stationarity_g_of(&first_eigenpair(&planar_annulus(r1, r2, alpha)?, cfg)?)
}

/// The closed-form `dG/dr₂` obtained by differentiating `G` with
/// `φ(r₁)`, `φ(r₂)` and `k` held fixed under `r₂² − r₁² = C`:
///
/// ```text
/// 2αφ²(r₂)(k² − α² − α/r₂ + 1/(2r₂²)) + (2αφ²(r₁) r₂/r₁)(k² − α² + α/r₁ + 1/(2r₁²))
/// ```
pub fn dg_dr2_printed(r1: f64, r2: f64, alpha: f64, cfg: &SolverConfig) -> Result<f64> {
    let pair = first_eigenpair(&planar_annulus(r1, r2, alpha)?, cfg)?;
    let k2 = -pair.lambda;
    let a2 = alpha * alpha;
    let phi1 = pair.profile.phi_first().powi(2);
    let phi2 = pair.profile.phi_last().powi(2);
    Ok(2.0 * alpha * phi2 * (k2 - a2 - alpha / r2 + 1.0 / (2.0 * r2 * r2))
        + 2.0 * alpha * phi1 * r2 / r1 * (k2 - a2 + alpha / r1 + 1.0 / (2.0 * r1 * r1)))
}

/// `dG/dr₂` by central differences along the family `r₁ = √(r₂² − C)`,
/// `C = r₂² − r₁²` fixed at the base point, re-solving at both ends.
pub fn dg_dr2_fd(r1: f64, r2: f64, alpha: f64, h: f64, cfg: &SolverConfig) -> Result<f64> {
    let base = DomainSpec::annulus(2, r1, r2)?;
    let c = r2 * r2 - r1 * r1;
    // r₁ moves by about h r₂/r₁
    let field = BoundaryField::volume_preserving(1.0, r1, r2);
    check_fd_step(&base, &field, h)?;
    let g_at = |outer: f64| -> Result<f64> {
        let inner = (outer * outer - c).sqrt();
        stationarity_g(inner, outer, alpha, cfg)
    };
    Ok((g_at(r2 + h)? - g_at(r2 - h)?) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GDerivativeComparison {
    pub r1: f64,
    pub r2: f64,
    pub alpha: f64,
    pub printed: f64,
    pub fd: f64,
    pub fd_step: f64,
}

pub fn compare_dg_dr2(r1: f64, r2: f64, alpha: f64, h: f64, cfg: &SolverConfig) -> Result<GDerivativeComparison> {
    Ok(GDerivativeComparison {
        r1,
        r2,
        alpha,
        printed: dg_dr2_printed(r1, r2, alpha, cfg)?,
        fd: dg_dr2_fd(r1, r2, alpha, h, cfg)?,
        fd_step: h,
    })
}

/// Smallest α on the (increasing) grid from which the printed `dG/dr₂` is
/// positive at every later grid point, if any.
pub fn critical_alpha(r1: f64, r2: f64, alphas: &[f64], cfg: &SolverConfig) -> Result<Option<f64>> {
    let mut candidate = None;
    for &alpha in alphas {
        if dg_dr2_printed(r1, r2, alpha, cfg)? > 0.0 {
            candidate.get_or_insert(alpha);
        } else {
            candidate = None;
        }
    }
    Ok(candidate)
}

/// Inner radius of a planar annulus with `r₂² − r₁² = c` at which `G = 0`,
/// searched on `r1_window` (first sign change on a uniform scan).
pub fn find_stationary_annulus(
    c: f64,
    alpha: f64,
    r1_window: (f64, f64),
    points: usize,
    cfg: &SolverConfig,
) -> Result<Option<(f64, f64)>> {
    let g = |r1: f64| stationarity_g(r1, (r1 * r1 + c).sqrt(), alpha, cfg);
    let (lo, hi) = r1_window;
    let points = points.max(2);
    let mut prev = (lo, g(lo)?);
    for i in 1..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let gx = g(x)?;
        if gx == 0.0 || gx.signum() != prev.1.signum() {
            let r1 = brent(g, prev.0, x, prev.1, gx, crate::roots::RootTolerance::default())?;
            return Ok(Some((r1, (r1 * r1 + c).sqrt())));
        }
        prev = (x, gx);
    }
    Ok(None)
}

/// Riccati variable `z = φ'/φ` of a first eigenpair on a planar annulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiccatiTrace {
    pub lambda: f64,
    pub alpha: f64,
    pub r1: f64,
    pub r2: f64,
    pub grid: Vec<f64>,
    pub z: Vec<f64>,
    /// `dz/dr` from differentiating the panel interpolant of `z`.
    pub dz: Vec<f64>,
    /// `dz/dr + z² + z/r + λ` on the grid.
    pub residual: Vec<f64>,
    pub max_residual: f64,
    /// `sup{ρ : z(ρ) < 0}`.
    pub xi: f64,
    pub dz_at_xi: f64,
    /// `sup{ρ ∈ (ξ, r₂) : dz/dr(ρ) > 0}` over the grid.
    pub xi1: f64,
    /// `−(λ + α² + α/r₂)`.
    pub endpoint_slope: f64,
    /// `dz/dr(r₂)` from the interpolant.
    pub endpoint_slope_numeric: f64,
}

impl RiccatiTrace {
    pub fn z_inner(&self) -> f64 {
        self.z[0]
    }

    pub fn z_outer(&self) -> f64 {
        self.z[self.z.len() - 1]
    }
}

/// Panel density used by [`riccati_trace_for`]. `z` varies on the scale of
/// the boundary layer, so differentiating its interpolant needs more panels
/// than the eigenvalue does.
pub const RICCATI_PANEL_DENSITY: f64 = 4.0;

/// Solves for the first eigenpair on a grid fine enough for `dz/dr` and traces it.
pub fn riccati_trace_for(problem: &RobinProblem, cfg: &SolverConfig) -> Result<RiccatiTrace> {
    let cfg = SolverConfig { panel_density: cfg.panel_density.max(RICCATI_PANEL_DENSITY), ..*cfg };
    riccati_trace(&first_eigenpair(problem, &cfg)?)
}

/// The residual is only as small as the profile grid allows; see
/// [`riccati_trace_for`].
pub fn riccati_trace(pair: &Eigenpair) -> Result<RiccatiTrace> {
    check_first_planar(pair)?;
    let domain = &pair.problem.domain;
    let r1 = domain.inner_radius().ok_or_else(|| Error::InvalidParameter("riccati trace needs an annulus".into()))?;
    let r2 = domain.outer_radius();
    let profile = &pair.profile;
    if profile.min_value() <= 0.0 {
        return Err(Error::Positivity(format!("first eigenfunction has minimum {:e}", profile.min_value())));
    }
    let grid = profile.grid();
    let radii = profile.radii().to_vec();
    let z: Vec<f64> = profile.phi().iter().zip(profile.dphi()).map(|(p, dp)| dp / p).collect();
    let dz: Vec<f64> = radii.iter().map(|&r| grid.differentiate(&z, r)).collect();
    let lambda = pair.lambda;
    let residual: Vec<f64> =
        radii.iter().zip(z.iter().zip(&dz)).map(|(&r, (&z, &dz))| dz + z * z + z / r + lambda).collect();
    let max_residual = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let last_negative = z
        .iter()
        .rposition(|&v| v < 0.0)
        .ok_or_else(|| Error::InvalidParameter("z never negative; inner boundary condition violated".into()))?;
    let xi = if last_negative + 1 >= z.len() {
        r2
    } else {
        let zf = |r: f64| Ok::<f64, Error>(grid.interpolate(&z, r));
        let (a, b) = (radii[last_negative], radii[last_negative + 1]);
        brent(zf, a, b, z[last_negative], z[last_negative + 1], crate::roots::RootTolerance::default())?
    };
    let dz_at_xi = grid.differentiate(&z, xi);
    let xi1 = radii.iter().zip(&dz).filter(|(&r, &d)| r > xi && d > 0.0).map(|(&r, _)| r).fold(xi, f64::max);
    let alpha = pair.problem.alpha;
    Ok(RiccatiTrace {
        lambda,
        alpha,
        r1,
        r2,
        endpoint_slope: -(lambda + alpha * alpha + alpha / r2),
        endpoint_slope_numeric: dz[dz.len() - 1],
        grid: radii,
        z,
        dz,
        residual,
        max_residual,
        xi,
        dz_at_xi,
        xi1,
    })
}
