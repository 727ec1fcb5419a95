use crate::domain::{ModeSpec, RobinProblem, Shape};
use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::roots::{brent, RootTolerance};

use super::{default_window, k_from_lambda, Eigenpair, Engine, Profile, SolverConfig};

/// Initial data for the radial IVP. The state is scaled so that it is O(1)
/// at the start; multiplying by `unscale` recovers the solution normalised
/// as `φ ≈ ρ^ℓ` (ball) or `φ(r₁) = 1` (annulus).
struct Launch {
    rho0: f64,
    state: [f64; 2],
    unscale: f64,
    /// Series coefficient of the regular ball solution `ρ^ℓ(1 + cρ²)`.
    series_c: f64,
}

fn launch(problem: &RobinProblem, mode: ModeSpec, lambda: f64, cfg: &SolverConfig) -> Launch {
    match problem.domain.shape() {
        Shape::Annulus { r1, .. } => Launch { rho0: r1, state: [1.0, -problem.alpha], unscale: 1.0, series_c: 0.0 },
        Shape::Ball { r } => {
            let l = mode.ell as f64;
            let d = mode.dim as f64;
            let r0 = cfg.ball_start_fraction * r;
            let c = -lambda / (2.0 * (2.0 * l + d));
            let g = 1.0 + c * r0 * r0;
            Launch { rho0: r0, state: [g, l / r0 * g + 2.0 * c * r0], unscale: r0.powi(mode.ell as i32), series_c: c }
        }
    }
}

fn radial_rhs(mode: ModeSpec, lambda: f64) -> impl FnMut(f64, &[f64; 2]) -> [f64; 2] {
    let d1 = mode.dim as f64 - 1.0;
    let c = mode.angular_eigenvalue();
    move |rho, y| [y[1], -d1 / rho * y[1] + (c / (rho * rho) - lambda) * y[0]]
}

/// Outer Robin residual `F(λ) = φ'(R) − αφ(R)` of the solution launched
/// from the inner boundary condition (annulus) or from the regular
/// solution `φ ≈ ρ^ℓ` at the centre (ball).
pub fn shoot(problem: &RobinProblem, mode: ModeSpec, lambda: f64, cfg: &SolverConfig) -> Result<f64> {
    check_mode(problem, mode)?;
    let mut l = launch(problem, mode, lambda, cfg);
    let mut rhs = radial_rhs(mode, lambda);
    let mut ode = Dopri5::new(cfg.ode);
    let big_r = problem.domain.outer_radius();
    ode.advance(&mut rhs, l.rho0, &mut l.state, big_r)?;
    Ok((l.state[1] - problem.alpha * l.state[0]) * l.unscale)
}

pub(crate) fn check_mode(problem: &RobinProblem, mode: ModeSpec) -> Result<()> {
    if mode.dim != problem.dim() {
        return Err(Error::Mode(format!(
            "mode dimension {} differs from domain dimension {}",
            mode.dim,
            problem.dim()
        )));
    }
    Ok(())
}

/// Unnormalised shooting solution sampled on the profile grid.
pub(crate) fn shoot_profile(
    problem: &RobinProblem,
    mode: ModeSpec,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<Profile> {
    let grid = Profile::grid_for(
        &problem.domain,
        lambda.abs().sqrt() + mode.ell as f64 / problem.domain.outer_radius(),
        cfg.panel_density,
    );
    let mut l = launch(problem, mode, lambda, cfg);
    let mut rhs = radial_rhs(mode, lambda);
    let mut ode = Dopri5::new(cfg.ode);
    let nodes = grid.nodes();
    let mut phi = Vec::with_capacity(nodes.len());
    let mut dphi = Vec::with_capacity(nodes.len());
    let mut rho = l.rho0;
    let ell = mode.ell as i32;
    for &node in nodes {
        if node < l.rho0 {
            // regular series branch near the centre of a ball
            let s = node / l.rho0;
            let c = l.series_c;
            let g = 1.0 + c * node * node;
            phi.push(s.powi(ell) * g * l.unscale);
            let dv = if ell == 0 {
                2.0 * c * node
            } else {
                (mode.ell as f64 * s.powi(ell - 1) / l.rho0 * g + 2.0 * c * node * s.powi(ell)) * l.unscale
            };
            dphi.push(dv);
            continue;
        }
        ode.advance(&mut rhs, rho, &mut l.state, node)?;
        rho = node;
        phi.push(l.state[0] * l.unscale);
        dphi.push(l.state[1] * l.unscale);
    }
    Ok(Profile::new(problem.dim(), grid, phi, dphi))
}

pub(crate) fn shooting_eigenpair(
    problem: &RobinProblem,
    mode: ModeSpec,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<Eigenpair> {
    let mut profile = shoot_profile(problem, mode, lambda, cfg)?;
    profile.normalize();
    let n = profile.sign_changes() + 1;
    Ok(Eigenpair {
        problem: *problem,
        mode,
        n,
        lambda,
        k: k_from_lambda(lambda),
        profile,
        c1: None,
        c2: None,
        engine: Engine::Shooting,
    })
}

/// Sign-change brackets of `f` on a uniform grid of `points` over `[lo, hi]`.
pub(crate) fn scan_brackets<F>(f: &mut F, lo: f64, hi: f64, points: usize) -> Result<Vec<(f64, f64, f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let points = points.max(2);
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo)?;
    for i in 1..points {
        let x = if i == points - 1 { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 };
        let fx = f(x)?;
        if prev_f == 0.0 {
            out.push((prev_x, prev_x, 0.0, 0.0));
        } else if fx != 0.0 && fx.signum() != prev_f.signum() {
            out.push((prev_x, x, prev_f, fx));
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == 0.0 {
        out.push((prev_x, prev_x, 0.0, 0.0));
    }
    Ok(out)
}

pub(crate) fn root_tolerance(scale: f64) -> RootTolerance {
    RootTolerance { xtol: 1e-15 * scale.max(1.0), rtol: 2.0 * f64::EPSILON, max_iter: 300 }
}

/// Eigenvalues of one mode found in a window.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSearch {
    pub pairs: Vec<Eigenpair>,
    /// Set when `max_count` was reached before the window was exhausted.
    pub truncated: bool,
}

/// All eigenvalues of mode `mode` in `[lo, hi]`, ascending, with normalised
/// profiles. Roots are bracketed on a `scan_points` grid and polished with
/// Brent's method; a gap in the node counts of consecutive eigenfunctions
/// triggers a finer rescan of that interval.
pub fn find_eigenvalues(
    problem: &RobinProblem,
    mode: ModeSpec,
    window: (f64, f64),
    max_count: usize,
    cfg: &SolverConfig,
) -> Result<EigenSearch> {
    check_mode(problem, mode)?;
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("eigenvalue window must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    let mut pairs = roots_in(problem, mode, lo, hi, cfg.scan_points, cfg)?;
    let mut depth = 0;
    loop {
        let gap = pairs.windows(2).position(|w| w[1].node_count() != w[0].node_count() + 1);
        let Some(i) = gap else { break };
        if depth >= cfg.max_refine_depth {
            return Err(Error::GridTooCoarse(format!(
                "mode {} near lambda = {} .. {}: node counts {} and {}",
                mode.ell,
                pairs[i].lambda,
                pairs[i + 1].lambda,
                pairs[i].node_count(),
                pairs[i + 1].node_count()
            )));
        }
        depth += 1;
        let (a, b) = (pairs[i].lambda, pairs[i + 1].lambda);
        let pad = (b - a) * 1e-9;
        let extra = roots_in(problem, mode, a + pad, b - pad, cfg.scan_points, cfg)?;
        pairs.extend(extra);
        pairs.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
        pairs.dedup_by(|x, y| (x.lambda - y.lambda).abs() <= 1e-12 * x.lambda.abs().max(1.0));
    }
    let truncated = pairs.len() > max_count;
    pairs.truncate(max_count);
    Ok(EigenSearch { pairs, truncated })
}

fn roots_in(
    problem: &RobinProblem,
    mode: ModeSpec,
    lo: f64,
    hi: f64,
    points: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Eigenpair>> {
    let mut f = |lambda: f64| shoot(problem, mode, lambda, cfg);
    let brackets = scan_brackets(&mut f, lo, hi, points)?;
    let tol = root_tolerance(lo.abs().max(hi.abs()));
    let mut out = Vec::with_capacity(brackets.len());
    for (a, b, fa, fb) in brackets {
        let lambda = if a == b { a } else { brent(&mut f, a, b, fa, fb, tol)? };
        out.push(shooting_eigenpair(problem, mode, lambda, cfg)?);
    }
    Ok(out)
}

/// Lowest eigenpair of one mode. The default window is widened upwards
/// until a root appears at all. A lowest root whose eigenfunction has nodes
/// means roots below it were missed, so that stretch is rescanned more
/// finely before the window is widened downwards. Roots above the lowest
/// are never examined (their profiles may be under-resolved when they are
/// localised at the inner boundary).
pub fn lowest_eigenpair(problem: &RobinProblem, mode: ModeSpec, cfg: &SolverConfig) -> Result<Eigenpair> {
    check_mode(problem, mode)?;
    let (mut lo, mut hi) = default_window(problem);
    for _ in 0..16 {
        let mut pairs = roots_in(problem, mode, lo, hi, cfg.scan_points, cfg)?;
        let mut points = cfg.scan_points;
        for _ in 0..cfg.max_refine_depth {
            match pairs.first() {
                Some(p) if p.n > 1 => {
                    points *= 4;
                    let upper = p.lambda - (p.lambda - lo) * 1e-9;
                    let below = roots_in(problem, mode, lo, upper, points, cfg)?;
                    if below.is_empty() {
                        break;
                    }
                    pairs = below;
                }
                _ => break,
            }
        }
        match pairs.into_iter().next() {
            None => hi += (hi - lo).max(10.0),
            Some(p) if p.n == 1 => return Ok(p),
            Some(_) => lo -= hi - lo,
        }
    }
    Err(Error::NoRoot(format!("lowest eigenvalue of mode {} not located in [{lo}, {hi}]", mode.ell)))
}

/// First eigenpair of the problem (ℓ = 0, n = 1).
pub fn first_eigenpair(problem: &RobinProblem, cfg: &SolverConfig) -> Result<Eigenpair> {
    lowest_eigenpair(problem, ModeSpec::radial(problem.dim()), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    fn ball(d: usize, r: f64, alpha: f64) -> RobinProblem {
        RobinProblem::new(DomainSpec::ball(d, r).unwrap(), alpha).unwrap()
    }

    #[test]
    fn constant_solution_at_zero() {
        let cfg = SolverConfig::default();
        for d in [2, 3] {
            for alpha in [0.3, 1.0, 7.0] {
                let f = shoot(&ball(d, 1.5, alpha), ModeSpec::radial(d), 0.0, &cfg).unwrap();
                assert!((f + alpha).abs() < 1e-12, "{f}");
            }
        }
    }

    #[test]
    fn linear_solution_at_zero() {
        let cfg = SolverConfig::default();
        for d in [2, 3, 4] {
            let r = 1.7;
            let f = shoot(&ball(d, r, 1.0 / r), ModeSpec::new(d, 1), 0.0, &cfg).unwrap();
            assert!(f.abs() < 1e-11, "d={d}: {f}");
        }
    }

    #[test]
    fn mode_dimension_mismatch() {
        let cfg = SolverConfig::default();
        assert!(matches!(shoot(&ball(2, 1.0, 1.0), ModeSpec::radial(3), 0.0, &cfg), Err(Error::Mode(_))));
    }

    #[test]
    fn bad_window() {
        let cfg = SolverConfig::default();
        let p = ball(2, 1.0, 1.0);
        assert!(find_eigenvalues(&p, ModeSpec::radial(2), (1.0, -1.0), 3, &cfg).is_err());
    }

    #[test]
    fn scan_reports_exact_zero() {
        let mut f = |x: f64| Ok(x);
        let b = scan_brackets(&mut f, -1.0, 1.0, 3).unwrap();
        assert_eq!(b, vec![(0.0, 0.0, 0.0, 0.0)]);
    }

    #[test]
    fn truncation_flag() {
        let cfg = SolverConfig::default();
        let p = ball(2, 1.0, 1.0);
        let s = find_eigenvalues(&p, ModeSpec::radial(2), (-10.0, 200.0), 2, &cfg).unwrap();
        assert_eq!(s.pairs.len(), 2);
        assert!(s.truncated);
        assert_eq!(s.pairs[0].n, 1);
        assert_eq!(s.pairs[1].n, 2);
    }
}
