use crate::bessel::{bessel_ik, rgamma_one_plus, BesselOrder, MAX_ARGUMENT};
use crate::domain::{ModeSpec, RobinProblem, Shape};
use crate::error::{Error, Result};
use crate::roots::brent;

use super::shooting::{check_mode, root_tolerance, scan_brackets};
use super::{default_window, Eigenpair, Engine, Profile, SolverConfig};

/// Robin row entries `(−g'(r₁) − αg(r₁))` or `(g'(r₂) − αg(r₂))` for
/// `g(ρ) = ρ^{−p} Z(kρ)` with the common `ρ^{−p}` dropped.
fn robin_row(z: f64, z_prime: f64, k: f64, p: f64, rho: f64, alpha: f64, inner: bool) -> f64 {
    if inner {
        -k * z_prime + (p / rho - alpha) * z
    } else {
        k * z_prime - (p / rho + alpha) * z
    }
}

fn normalize_row(a: f64, b: f64) -> (f64, f64) {
    let n = a.hypot(b);
    if n == 0.0 {
        (a, b)
    } else {
        (a / n, b / n)
    }
}

/// Column-scaled matrix of the Robin system for `C₁K_ν + C₂I_ν`, with the
/// column scales. The `K` column is divided by `K_ν(kr₁)` and the `I`
/// column by `I_ν(kr₂)`, which keeps every entry O(1) or smaller.
struct AnnulusSystem {
    rows: [[f64; 2]; 2],
    scale_k: f64,
    scale_i: f64,
}

fn annulus_system(problem: &RobinProblem, mode: ModeSpec, k: f64, r1: f64, r2: f64) -> Result<AnnulusSystem> {
    let nu = BesselOrder::new(mode.effective_order())?;
    let p = (mode.dim as f64 - 2.0) / 2.0;
    let alpha = problem.alpha;
    let inner = bessel_ik(nu, k * r1)?;
    let outer = bessel_ik(nu, k * r2)?;
    let sk = inner.k;
    let si = outer.i;
    let a11 = robin_row(inner.k, inner.k_prime, k, p, r1, alpha, true) / sk;
    let a12 = robin_row(inner.i, inner.i_prime, k, p, r1, alpha, true) / si;
    let a21 = robin_row(outer.k, outer.k_prime, k, p, r2, alpha, false) / sk;
    let a22 = robin_row(outer.i, outer.i_prime, k, p, r2, alpha, false) / si;
    let (a11, a12) = normalize_row(a11, a12);
    let (a21, a22) = normalize_row(a21, a22);
    Ok(AnnulusSystem { rows: [[a11, a12], [a21, a22]], scale_k: sk, scale_i: si })
}

/// Characteristic function whose zeros in `k > 0` are the eigenvalues
/// `λ = −k²` of mode `mode`.
///
/// * Annulus: the determinant of the 2×2 Robin system for
///   `φ = ρ^{−p}[C₁K_ν(kρ) + C₂I_ν(kρ)]`, columns scaled by `K_ν(kr₁)` and
///   `I_ν(kr₂)` and rows normalised to unit length.
/// * Ball: the single outer condition on the regular solution `ρ^{−p}I_ν(kρ)`,
///   divided by `I_ν(kr)`, i.e. `k I_ν'(kr)/I_ν(kr) − p/r − α`.
pub fn characteristic_det(problem: &RobinProblem, mode: ModeSpec, k: f64) -> Result<f64> {
    check_mode(problem, mode)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Bessel(crate::bessel::BesselError::Domain(format!("k must be > 0, got {k}"))));
    }
    match problem.domain.shape() {
        Shape::Annulus { r1, r2 } => {
            let s = annulus_system(problem, mode, k, r1, r2)?;
            Ok(s.rows[0][0] * s.rows[1][1] - s.rows[0][1] * s.rows[1][0])
        }
        Shape::Ball { r } => {
            let nu = BesselOrder::new(mode.effective_order())?;
            let p = (mode.dim as f64 - 2.0) / 2.0;
            let v = bessel_ik(nu, k * r)?;
            Ok(k * v.i_prime / v.i - p / r - problem.alpha)
        }
    }
}

/// Characteristic function of the exact `λ = 0` solutions.
///
/// Ball: `φ = ρ^ℓ` gives `ℓ/r − α`. Annulus: row-normalised determinant of
/// the Robin system for `Aρ^ℓ + Bρ^{−(ℓ+d−2)}` (`A + B ln ρ` when ℓ = 0, d = 2).
pub fn zero_mode_characteristic(problem: &RobinProblem, mode: ModeSpec) -> Result<f64> {
    check_mode(problem, mode)?;
    let alpha = problem.alpha;
    let l = mode.ell as f64;
    match problem.domain.shape() {
        Shape::Ball { r } => Ok(l / r - alpha),
        Shape::Annulus { r1, r2 } => {
            let a = l;
            let b = -(l + mode.dim as f64 - 2.0);
            // (value, derivative) of the two independent solutions
            let sol = |rho: f64| -> [(f64, f64); 2] {
                let first = (rho.powf(a), a * rho.powf(a - 1.0));
                let second = if a == b { (rho.ln(), 1.0 / rho) } else { (rho.powf(b), b * rho.powf(b - 1.0)) };
                [first, second]
            };
            let [u1, u2] = sol(r1);
            let [v1, v2] = sol(r2);
            let (a11, a12) = normalize_row(-u1.1 - alpha * u1.0, -u2.1 - alpha * u2.0);
            let (a21, a22) = normalize_row(v1.1 - alpha * v1.0, v2.1 - alpha * v2.0);
            Ok(a11 * a22 - a12 * a21)
        }
    }
}

/// Lowest eigenpair of `mode` on the negative branch from the Bessel form.
/// The characteristic function is scanned downwards from the largest
/// admissible `k`; the first sign change met is the largest root, i.e. the
/// lowest eigenvalue.
pub fn eigenvalue_bessel(problem: &RobinProblem, mode: ModeSpec, cfg: &SolverConfig) -> Result<Eigenpair> {
    check_mode(problem, mode)?;
    let big_r = problem.domain.outer_radius();
    let (lo, _) = default_window(problem);
    let k_hi = (-lo).sqrt().min(MAX_ARGUMENT / big_r * (1.0 - 1e-12));
    let k_lo = k_hi / cfg.scan_points as f64;
    let mut f = |k: f64| characteristic_det(problem, mode, k);
    let brackets = scan_brackets(&mut f, k_lo, k_hi, cfg.scan_points)?;
    let Some(&(a, b, fa, fb)) = brackets.last() else {
        return Err(Error::NoRoot(format!(
            "characteristic function of mode {} has no sign change for k in [{k_lo}, {k_hi}]",
            mode.ell
        )));
    };
    let tol = root_tolerance(0.0);
    let k = if a == b { a } else { brent(&mut f, a, b, fa, fb, tol)? };
    bessel_eigenpair(problem, mode, k, cfg)
}

fn bessel_eigenpair(problem: &RobinProblem, mode: ModeSpec, k: f64, cfg: &SolverConfig) -> Result<Eigenpair> {
    let nu = BesselOrder::new(mode.effective_order())?;
    let p = (mode.dim as f64 - 2.0) / 2.0;
    let (c1, c2) = match problem.domain.shape() {
        Shape::Annulus { r1, r2 } => {
            let s = annulus_system(problem, mode, k, r1, r2)?;
            // null vector from the better-conditioned row
            let row = if s.rows[0][0].abs().max(s.rows[0][1].abs()) >= s.rows[1][0].abs().max(s.rows[1][1].abs()) {
                s.rows[0]
            } else {
                s.rows[1]
            };
            (-row[1] / s.scale_k, row[0] / s.scale_i)
        }
        Shape::Ball { .. } => (0.0, 1.0),
    };
    let grid =
        Profile::grid_for(&problem.domain, k + mode.ell as f64 / problem.domain.outer_radius(), cfg.panel_density);
    let mut phi = Vec::with_capacity(grid.len());
    let mut dphi = Vec::with_capacity(grid.len());
    for &rho in grid.nodes() {
        if rho == 0.0 {
            // limit of ρ^{−p} I_ν(kρ) = (k/2)^ν ρ^ℓ / Γ(ν+1) + …
            let lead = (0.5 * k).powf(nu.value()) * rgamma_one_plus(nu.value());
            phi.push(if mode.ell == 0 { c2 * lead } else { 0.0 });
            dphi.push(if mode.ell == 1 { c2 * lead } else { 0.0 });
            continue;
        }
        let v = bessel_ik(nu, k * rho)?;
        let scale = rho.powf(-p);
        let (kk, kk_prime) = if c1 == 0.0 { (0.0, 0.0) } else { (v.k, v.k_prime) };
        let value = scale * (c1 * kk + c2 * v.i);
        let deriv = scale * k * (c1 * kk_prime + c2 * v.i_prime) - p / rho * value;
        phi.push(value);
        dphi.push(deriv);
    }
    let mut profile = Profile::new(problem.dim(), grid, phi, dphi);
    let factor = profile.normalize();
    let n = profile.sign_changes() + 1;
    Ok(Eigenpair {
        problem: *problem,
        mode,
        n,
        lambda: -k * k,
        k,
        profile,
        c1: Some(c1 * factor),
        c2: Some(c2 * factor),
        engine: Engine::Bessel,
    })
}
