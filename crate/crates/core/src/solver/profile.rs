use crate::domain::{unit_sphere_area, DomainSpec, ModeSpec, RobinProblem};
use crate::quadrature::PanelGrid;

/// Radial function sampled with its derivative on a [`PanelGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    dim: usize,
    grid: PanelGrid,
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

impl Profile {
    pub(crate) fn new(dim: usize, grid: PanelGrid, phi: Vec<f64>, dphi: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), phi.len());
        debug_assert_eq!(grid.len(), dphi.len());
        Self { dim, grid, phi, dphi }
    }

    /// Sampling grid adapted to the oscillation/growth scale `k_scale` of
    /// the solution. Annuli whose inner radius is small compared with the
    /// panel width get geometrically graded panels next to the hole.
    pub(crate) fn grid_for(domain: &DomainSpec, k_scale: f64, density: f64) -> PanelGrid {
        let a = domain.inner_radius().unwrap_or(0.0);
        let b = domain.outer_radius();
        let len = b - a;
        let panels = ((len * k_scale.max(1.0 / len) * density).ceil() as usize + 8).clamp(12, 3000);
        let h = len / panels as f64;
        let mut breaks = vec![a];
        if a > 0.0 && a < h {
            let mut x = 2.0 * a;
            while x < a + h {
                breaks.push(x);
                x *= 2.0;
            }
        }
        let start = *breaks.last().unwrap_or(&a);
        let rest = (((b - start) / h).ceil() as usize).max(1);
        let step = (b - start) / rest as f64;
        for j in 1..rest {
            breaks.push(start + step * j as f64);
        }
        breaks.push(b);
        PanelGrid::with_breaks(breaks)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &PanelGrid {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn dphi(&self) -> &[f64] {
        &self.dphi
    }

    pub fn phi_first(&self) -> f64 {
        self.phi[0]
    }

    pub fn dphi_first(&self) -> f64 {
        self.dphi[0]
    }

    pub fn phi_last(&self) -> f64 {
        self.phi[self.phi.len() - 1]
    }

    pub fn dphi_last(&self) -> f64 {
        self.dphi[self.dphi.len() - 1]
    }

    /// φ at an arbitrary radius (panel interpolation).
    pub fn eval(&self, rho: f64) -> f64 {
        self.grid.interpolate(&self.phi, rho)
    }

    /// φ' at an arbitrary radius (panel interpolation of the sampled derivative).
    pub fn eval_derivative(&self, rho: f64) -> f64 {
        self.grid.interpolate(&self.dphi, rho)
    }

    /// `∫ g(ρ, φ, φ') ρ^{d−1} dρ` over the grid, without the sphere factor.
    pub fn radial_integral<G: Fn(f64, f64, f64) -> f64>(&self, g: G) -> f64 {
        let d1 = self.dim as i32 - 1;
        self.grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(self.phi.iter().zip(&self.dphi))
            .filter(|((_, w), _)| **w != 0.0)
            .map(|((&r, &w), (&p, &dp))| w * g(r, p, dp) * r.powi(d1))
            .sum()
    }

    /// `∫_Ω φ(|x|)² dx`.
    pub fn norm_sq(&self) -> f64 {
        unit_sphere_area(self.dim) * self.radial_integral(|_, p, _| p * p)
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        self.phi.iter_mut().for_each(|v| *v *= factor);
        self.dphi.iter_mut().for_each(|v| *v *= factor);
    }

    /// Scales to unit L²(Ω) norm with `φ(R) > 0`; returns the factor applied.
    pub(crate) fn normalize(&mut self) -> f64 {
        let sign = if self.phi_last() != 0.0 { self.phi_last().signum() } else { self.dphi_last().signum() };
        let factor = sign / self.norm_sq().sqrt();
        self.scale(factor);
        factor
    }

    pub fn min_value(&self) -> f64 {
        self.phi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Number of sign changes of φ along the grid (exact zeros skipped).
    pub fn sign_changes(&self) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for &v in &self.phi {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Robin Rayleigh quotient of `φ(|x|) Y_ℓ`, with `Y_ℓ` normalised on the sphere.
    pub fn rayleigh_quotient(&self, problem: &RobinProblem, mode: ModeSpec) -> f64 {
        let area = unit_sphere_area(self.dim);
        let d1 = self.dim as i32 - 1;
        let c = mode.angular_eigenvalue();
        let gradient = area * self.radial_integral(|r, p, dp| dp * dp + c * p * p / (r * r));
        let domain = &problem.domain;
        let mut boundary = domain.outer_radius().powi(d1) * self.phi_last().powi(2);
        if let Some(r1) = domain.inner_radius() {
            boundary += r1.powi(d1) * self.phi_first().powi(2);
        }
        (gradient - problem.alpha * area * boundary) / self.norm_sq()
    }
}
