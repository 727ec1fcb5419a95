//! Balls and annuli in ℝ^d, Robin problems on them, and angular modes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Volume of the unit ball, `ω_d = π^{d/2} / Γ(1 + d/2)`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // ω_0 = 1, ω_1 = 2, ω_d = ω_{d-2} · 2π / d
    let mut w = if dim % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = 2 - dim % 2;
    while k <= dim {
        if k >= 2 {
            w *= 2.0 * PI / k as f64;
        }
        k += 2;
    }
    w
}

/// Area of the unit sphere `S^{d-1}`, `d · ω_d`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ball { r: f64 },
    Annulus { r1: f64, r2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainSpec {
    dim: usize,
    #[serde(flatten)]
    shape: Shape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measures {
    pub volume: f64,
    pub surface: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{name} must be finite and positive, got {v}")))
    }
}

impl DomainSpec {
    pub fn ball(dim: usize, r: f64) -> Result<Self> {
        check_dim(dim)?;
        positive("radius", r)?;
        Ok(Self { dim, shape: Shape::Ball { r } })
    }

    pub fn annulus(dim: usize, r1: f64, r2: f64) -> Result<Self> {
        check_dim(dim)?;
        positive("inner radius", r1)?;
        positive("outer radius", r2)?;
        if r1 >= r2 {
            return Err(Error::InvalidDomain(format!("annulus needs r1 < r2, got r1 = {r1}, r2 = {r2}")));
        }
        Ok(Self { dim, shape: Shape::Annulus { r1, r2 } })
    }

    /// Ball of radius `(volume / ω_d)^{1/d}`.
    pub fn ball_with_volume(dim: usize, volume: f64) -> Result<Self> {
        check_dim(dim)?;
        positive("volume", volume)?;
        Self::ball(dim, (volume / unit_ball_volume(dim)).powf(1.0 / dim as f64))
    }

    /// Annulus with inner radius `r1` and outer radius fixed by `volume`.
    pub fn annulus_with_volume(dim: usize, r1: f64, volume: f64) -> Result<Self> {
        check_dim(dim)?;
        positive("volume", volume)?;
        positive("inner radius", r1)?;
        let d = dim as f64;
        let r2 = (volume / unit_ball_volume(dim) + r1.powf(d)).powf(1.0 / d);
        Self::annulus(dim, r1, r2)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn outer_radius(&self) -> f64 {
        match self.shape {
            Shape::Ball { r } => r,
            Shape::Annulus { r2, .. } => r2,
        }
    }

    pub fn inner_radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Ball { .. } => None,
            Shape::Annulus { r1, .. } => Some(r1),
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.shape, Shape::Ball { .. })
    }

    pub fn measures(&self) -> Measures {
        let d = self.dim as f64;
        let w = unit_ball_volume(self.dim);
        match self.shape {
            Shape::Ball { r } => Measures { volume: w * r.powf(d), surface: d * w * r.powf(d - 1.0) },
            Shape::Annulus { r1, r2 } => Measures {
                volume: w * (r2.powf(d) - r1.powf(d)),
                surface: d * w * (r2.powf(d - 1.0) + r1.powf(d - 1.0)),
            },
        }
    }

    /// `(∫_{∂Ω} |x|² dσ, ∫_Ω |x|² dx)` about the centre.
    pub fn second_moments(&self) -> (f64, f64) {
        let d = self.dim as f64;
        let s = unit_sphere_area(self.dim);
        let (r1, r2) = (self.inner_radius().unwrap_or(0.0), self.outer_radius());
        let boundary = match self.shape {
            Shape::Ball { r } => s * r.powf(d + 1.0),
            Shape::Annulus { .. } => s * (r2.powf(d + 1.0) + r1.powf(d + 1.0)),
        };
        (boundary, s * (r2.powf(d + 2.0) - r1.powf(d + 2.0)) / (d + 2.0))
    }

    /// Smallest boundary radius.
    pub fn min_radius(&self) -> f64 {
        self.inner_radius().unwrap_or_else(|| self.outer_radius())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDomain(format!("dimension must be >= 2, got {dim}")));
    }
    Ok(())
}

/// A domain together with the Robin parameter α of `∂u/∂ν = αu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobinProblem {
    pub domain: DomainSpec,
    pub alpha: f64,
}

impl RobinProblem {
    pub fn new(domain: DomainSpec, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be finite and > 0, got {alpha}")));
        }
        Ok(Self { domain, alpha })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Upper bound `−α σ(∂Ω)/|Ω|` obtained from the constant test function.
    pub fn negativity_bound(&self) -> f64 {
        let m = self.domain.measures();
        -self.alpha * m.surface / m.volume
    }
}

/// Angular mode ℓ of the separated problem on a radial domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeSpec {
    pub dim: usize,
    pub ell: usize,
}

impl ModeSpec {
    pub fn new(dim: usize, ell: usize) -> Self {
        Self { dim, ell }
    }

    pub fn radial(dim: usize) -> Self {
        Self::new(dim, 0)
    }

    /// `ℓ + (d − 2)/2`, the order of the Bessel functions in the radial solution.
    pub fn effective_order(&self) -> f64 {
        self.ell as f64 + (self.dim as f64 - 2.0) / 2.0
    }

    /// `ℓ(ℓ + d − 2)`, the eigenvalue of the spherical Laplacian.
    pub fn angular_eigenvalue(&self) -> f64 {
        let l = self.ell as f64;
        l * (l + self.dim as f64 - 2.0)
    }

    /// Dimension of the space of degree-ℓ spherical harmonics on `S^{d-1}`.
    pub fn multiplicity(&self) -> usize {
        let (d, l) = (self.dim, self.ell);
        if l == 0 {
            return 1;
        }
        if d == 2 {
            return 2;
        }
        let lower = if l >= 2 { binomial(l + d - 3, d - 1) } else { 0 };
        (binomial(l + d - 1, d - 1) - lower) as usize
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn unit_ball_volumes() {
        assert!(close(unit_ball_volume(2), PI));
        assert!(close(unit_ball_volume(3), 4.0 * PI / 3.0));
        assert!(close(unit_ball_volume(4), PI * PI / 2.0));
        assert!(close(unit_ball_volume(5), 8.0 * PI * PI / 15.0));
    }

    #[test]
    fn measures_examples() {
        let m = DomainSpec::ball(2, 1.0).unwrap().measures();
        assert!(close(m.volume, PI) && close(m.surface, 2.0 * PI));
        let m = DomainSpec::annulus(2, 1.0, 2.0).unwrap().measures();
        assert!(close(m.volume, 3.0 * PI) && close(m.surface, 6.0 * PI));
        let m = DomainSpec::ball(3, 1.0).unwrap().measures();
        assert!(close(m.volume, 4.0 * PI / 3.0) && close(m.surface, 4.0 * PI));
    }

    #[test]
    fn invalid_domains() {
        assert!(DomainSpec::annulus(2, 2.0, 1.0).is_err());
        assert!(DomainSpec::annulus(2, 1.0, 1.0).is_err());
        assert!(DomainSpec::ball(1, 1.0).is_err());
        assert!(DomainSpec::ball(2, -1.0).is_err());
        let ball = DomainSpec::ball(2, 1.0).unwrap();
        assert!(RobinProblem::new(ball, 0.0).is_err());
        assert!(RobinProblem::new(ball, f64::NAN).is_err());
    }

    #[test]
    fn volume_constructors() {
        let b = DomainSpec::ball_with_volume(2, PI).unwrap();
        assert!(close(b.outer_radius(), 1.0));
        let a = DomainSpec::annulus_with_volume(2, 1.0, PI).unwrap();
        assert!(close(a.outer_radius(), 2f64.sqrt()));
        assert!(close(a.measures().volume, PI));
    }

    #[test]
    fn negativity_bound_examples() {
        let b = RobinProblem::new(DomainSpec::ball(2, 1.0).unwrap(), 1.0).unwrap();
        assert!(close(b.negativity_bound(), -2.0));
        let a = RobinProblem::new(DomainSpec::annulus(2, 1.0, 2.0).unwrap(), 1.0).unwrap();
        assert!(close(a.negativity_bound(), -2.0));
    }

    #[test]
    fn harmonic_multiplicities() {
        assert_eq!(ModeSpec::new(2, 0).multiplicity(), 1);
        assert_eq!(ModeSpec::new(2, 3).multiplicity(), 2);
        for l in 0..6 {
            assert_eq!(ModeSpec::new(3, l).multiplicity(), 2 * l + 1);
        }
        // d = 4: (l + 1)^2
        for l in 0..6 {
            assert_eq!(ModeSpec::new(4, l).multiplicity(), (l + 1) * (l + 1));
        }
        assert_eq!(ModeSpec::new(3, 1).effective_order(), 1.5);
    }
}
