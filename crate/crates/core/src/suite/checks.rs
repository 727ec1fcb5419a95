use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::domain::{unit_ball_volume, unit_sphere_area, DomainSpec, ModeSpec, RobinProblem};
use crate::error::{Error, Result};
use crate::roots::{brent, RootTolerance};
use crate::shape::{
    critical_alpha, dg_dr2_fd, dg_dr2_printed, fd_derivative, hadamard_derivative, riccati_trace_for, stationarity_g,
    BoundaryField, DerivativeReport,
};
use crate::solver::{
    assemble_spectrum, eigenvalue_bessel, first_eigenpair, zero_mode_characteristic, Eigenpair, SolverConfig,
};
use crate::table::Table;

/// What a check function returns before it is wrapped into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub parameters: Value,
    pub margin: f64,
    pub passed: bool,
    pub observed: Value,
    pub tables: Vec<Table>,
    pub diagnostics: Option<String>,
}

impl CheckResult {
    fn new(parameters: Value, margin: f64, passed: bool, observed: Value, tables: Vec<Table>) -> Self {
        Self { parameters, margin, passed, observed, tables, diagnostics: None }
    }

    pub(super) fn error(e: Error) -> Self {
        Self {
            parameters: Value::Null,
            margin: f64::NAN,
            passed: false,
            observed: Value::Null,
            tables: Vec::new(),
            diagnostics: Some(e.to_string()),
        }
    }
}

fn problem(domain: DomainSpec, alpha: f64) -> Result<RobinProblem> {
    RobinProblem::new(domain, alpha)
}

fn lambda1(domain: DomainSpec, alpha: f64, cfg: &SolverConfig) -> Result<f64> {
    Ok(first_eigenpair(&problem(domain, alpha)?, cfg)?.lambda)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

/// Name fragment for per-α tables, e.g. `0.5` or `12`.
fn tag(v: f64) -> String {
    format!("{v}")
}

pub(super) fn cross_engine(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let mut table =
        Table::new("cross_engine.csv", &["r1", "r2", "alpha", "lambda_shooting", "lambda_bessel", "rel_diff"]);
    let mut worst = 0.0f64;
    for &r2 in &cfg.cross_engine_r2_grid {
        for &alpha in &cfg.cross_engine_alphas {
            let p = problem(DomainSpec::annulus(2, cfg.cross_engine_r1, r2)?, alpha)?;
            let a = first_eigenpair(&p, &s)?.lambda;
            let b = eigenvalue_bessel(&p, ModeSpec::radial(2), &s)?.lambda;
            let rel = (a - b).abs() / b.abs();
            worst = worst.max(rel);
            table.push(vec![cfg.cross_engine_r1, r2, alpha, a, b, rel]);
        }
    }
    let margin = cfg.cross_engine_rel_tol - worst;
    Ok(CheckResult::new(
        json!({
            "dim": 2,
            "r1": cfg.cross_engine_r1,
            "r2_grid": cfg.cross_engine_r2_grid,
            "alphas": cfg.cross_engine_alphas,
            "rel_tol": cfg.cross_engine_rel_tol,
        }),
        margin,
        margin >= 0.0,
        json!({ "max_rel_diff": worst }),
        vec![table],
    ))
}

pub(super) fn negativity_bound(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    // r1 = 0 marks a ball
    let mut table = Table::new("negativity_bound.csv", &["r1", "r2", "alpha", "lambda1", "bound", "slack"]);
    let mut domains = Vec::new();
    for &r2 in &cfg.cross_engine_r2_grid {
        domains.push(DomainSpec::annulus(2, cfg.cross_engine_r1, r2)?);
    }
    domains.push(DomainSpec::ball(2, cfg.bound_ball_radius)?);
    let mut margin = f64::INFINITY;
    for domain in &domains {
        for &alpha in &cfg.cross_engine_alphas {
            let p = problem(*domain, alpha)?;
            let lambda = first_eigenpair(&p, &s)?.lambda;
            let bound = p.negativity_bound();
            margin = margin.min(bound - lambda);
            table.push(vec![
                domain.inner_radius().unwrap_or(0.0),
                domain.outer_radius(),
                alpha,
                lambda,
                bound,
                bound - lambda,
            ]);
        }
    }
    Ok(CheckResult::new(
        json!({
            "dim": 2,
            "annuli_r1": cfg.cross_engine_r1,
            "annuli_r2_grid": cfg.cross_engine_r2_grid,
            "ball_radius": cfg.bound_ball_radius,
            "alphas": cfg.cross_engine_alphas,
        }),
        margin,
        margin > 0.0,
        json!({ "configurations": table.rows.len(), "min_slack": margin }),
        vec![table],
    ))
}

fn theorem1_parameters(cfg: &RunConfig) -> Value {
    json!({
        "dim": 2,
        "r1": cfg.theorem1_r1,
        "alphas": cfg.theorem1_alphas,
        "r2_grid": cfg.theorem1_r2_grid,
    })
}

pub(super) fn theorem1_monotonicity(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let mut tables = Vec::new();
    let mut min_increment = f64::INFINITY;
    let mut min_derivative = f64::INFINITY;
    for &alpha in &cfg.theorem1_alphas {
        let mut table = Table::new(format!("sweep_alpha_{}.csv", tag(alpha)), &["r2", "lambda1", "hadamard_outer"]);
        let mut previous: Option<f64> = None;
        for &r2 in &cfg.theorem1_r2_grid {
            let pair = first_eigenpair(&problem(DomainSpec::annulus(2, cfg.theorem1_r1, r2)?, alpha)?, &s)?;
            let d = hadamard_derivative(&pair, &BoundaryField::OuterNormal)?;
            if let Some(prev) = previous {
                min_increment = min_increment.min(pair.lambda - prev);
            }
            previous = Some(pair.lambda);
            min_derivative = min_derivative.min(d);
            table.push(vec![r2, pair.lambda, d]);
        }
        tables.push(table);
    }
    let margin = min_increment.min(min_derivative);
    Ok(CheckResult::new(
        theorem1_parameters(cfg),
        margin,
        margin > 0.0,
        json!({
            "min_lambda1_increment": if min_increment.is_finite() { json!(min_increment) } else { Value::Null },
            "min_outer_derivative": min_derivative,
        }),
        tables,
    ))
}

pub(super) fn hadamard_fd(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let h = cfg.fd_step;
    let r1 = cfg.theorem1_r1;
    let mut table = Table::new(
        "hadamard_fd.csv",
        &[
            "alpha",
            "r2",
            "outer_hadamard",
            "outer_fd",
            "outer_rel",
            "outer_fd_richardson",
            "pair_hadamard",
            "pair_fd",
            "pair_rel",
        ],
    );
    let mut worst = 0.0f64;
    let mut worst_richardson = 0.0f64;
    for &alpha in &cfg.theorem1_alphas {
        for &r2 in &cfg.theorem1_r2_grid {
            let p = problem(DomainSpec::annulus(2, r1, r2)?, alpha)?;
            let pair = first_eigenpair(&p, &s)?;
            let outer = BoundaryField::OuterNormal;
            let vp = BoundaryField::volume_preserving(1.0, r1, r2);
            let outer_fd = fd_derivative(&p, &outer, h, &s)?;
            let outer_fd_half = fd_derivative(&p, &outer, 0.5 * h, &s)?;
            let richardson = (4.0 * outer_fd_half - outer_fd) / 3.0;
            let o = DerivativeReport::new(hadamard_derivative(&pair, &outer)?, outer_fd, h);
            let v = DerivativeReport::new(hadamard_derivative(&pair, &vp)?, fd_derivative(&p, &vp, h, &s)?, h);
            worst = worst.max(o.rel_discrepancy).max(v.rel_discrepancy);
            worst_richardson = worst_richardson.max((richardson - o.hadamard_value).abs() / o.hadamard_value.abs());
            table.push(vec![
                alpha,
                r2,
                o.hadamard_value,
                o.fd_value,
                o.rel_discrepancy,
                richardson,
                v.hadamard_value,
                v.fd_value,
                v.rel_discrepancy,
            ]);
        }
    }
    let margin = cfg.fd_rel_tol - worst;
    let mut params = theorem1_parameters(cfg);
    params["fd_step"] = json!(h);
    params["rel_tol"] = json!(cfg.fd_rel_tol);
    Ok(CheckResult::new(
        params,
        margin,
        margin >= 0.0,
        json!({ "max_rel_discrepancy": worst, "max_rel_discrepancy_richardson_outer": worst_richardson }),
        vec![table],
    ))
}

pub(super) fn riccati(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let tol = cfg.riccati_tol;
    let mut table = Table::new(
        "riccati.csv",
        &[
            "alpha",
            "r2",
            "lambda1",
            "z_inner_error",
            "z_outer_error",
            "max_residual",
            "xi",
            "dz_at_xi",
            "endpoint_slope",
            "endpoint_slope_numeric",
        ],
    );
    let mut margin = f64::INFINITY;
    let mut passed = true;
    for &alpha in &cfg.theorem1_alphas {
        for &r2 in &cfg.theorem1_r2_grid {
            let t = riccati_trace_for(&problem(DomainSpec::annulus(2, cfg.theorem1_r1, r2)?, alpha)?, &s)?;
            let inner_err = (t.z_inner() + alpha).abs();
            let outer_err = (t.z_outer() - alpha).abs();
            let scale = t.lambda.abs().max(1.0);
            let xi_err = (t.dz_at_xi + t.lambda).abs();
            let tolerance_slacks = [tol - inner_err, tol - outer_err, tol - t.max_residual, tol * scale - xi_err];
            let strict_slacks = [r2 - t.xi, t.xi - t.r1, -t.lambda, t.dz_at_xi, t.endpoint_slope_numeric];
            passed &= tolerance_slacks.iter().all(|&v| v >= 0.0) && strict_slacks.iter().all(|&v| v > 0.0);
            margin = margin.min(min_of(tolerance_slacks)).min(min_of(strict_slacks));
            table.push(vec![
                alpha,
                r2,
                t.lambda,
                inner_err,
                outer_err,
                t.max_residual,
                t.xi,
                t.dz_at_xi,
                t.endpoint_slope,
                t.endpoint_slope_numeric,
            ]);
        }
    }
    let max_residual = table.rows.iter().map(|r| r[5]).fold(0.0, f64::max);
    let mut params = theorem1_parameters(cfg);
    params["tol"] = json!(tol);
    Ok(CheckResult::new(params, margin, passed, json!({ "max_residual": max_residual }), vec![table]))
}

pub(super) fn stationarity_sign(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let (r1, r2) = (cfg.stationarity_r1, cfg.stationarity_r2);
    let mut table = Table::new("dg_dr2.csv", &["alpha", "g", "dg_dr2_printed", "dg_dr2_fd"]);
    for &alpha in &cfg.stationarity_alphas {
        let g = stationarity_g(r1, r2, alpha, &s)?;
        let printed = dg_dr2_printed(r1, r2, alpha, &s)?;
        let fd = dg_dr2_fd(r1, r2, alpha, cfg.fd_step, &s)?;
        table.push(vec![alpha, g, printed, fd]);
    }
    let alpha_c = critical_alpha(r1, r2, &cfg.stationarity_alphas, &s)?;
    let margin = match alpha_c {
        Some(ac) => min_of(table.rows.iter().filter(|r| r[0] >= ac).map(|r| r[2])),
        None => min_of(table.rows.iter().map(|r| r[2])).min(0.0),
    };
    let fd_sign_disagreements = table.rows.iter().filter(|r| r[2].signum() != r[3].signum()).count();
    Ok(CheckResult::new(
        json!({
            "dim": 2,
            "r1": r1,
            "r2": r2,
            "alphas": cfg.stationarity_alphas,
            "fd_step": cfg.fd_step,
        }),
        margin,
        alpha_c.is_some() && margin > 0.0,
        json!({ "alpha_c": alpha_c, "fd_sign_disagreements": fd_sign_disagreements }),
        vec![table],
    ))
}

pub(super) fn asymptotics(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let [a1, a2] = cfg.asymptotics_annulus;
    let cases =
        [("ball", DomainSpec::ball(2, cfg.asymptotics_ball_radius)?), ("annulus", DomainSpec::annulus(2, a1, a2)?)];
    let mut tables = Vec::new();
    let mut margin = f64::INFINITY;
    let mut passed = true;
    let mut observed = serde_json::Map::new();
    for (name, domain) in cases {
        let big_r = domain.outer_radius();
        let mut table = Table::new(format!("asymptotics_{name}.csv"), &["alpha", "lambda1", "remainder"]);
        for &alpha in &cfg.asymptotics_alphas {
            let lambda = lambda1(domain, alpha, &s)?;
            table.push(vec![alpha, lambda, (lambda + alpha * alpha + alpha / big_r) / alpha]);
        }
        let abs: Vec<f64> = table.rows.iter().map(|r| r[2].abs()).collect();
        let decrease = min_of(abs.windows(2).map(|w| w[0] - w[1]));
        let (first, last) = (abs[0], abs[abs.len() - 1]);
        let ratio_slack = first / cfg.asymptotics_min_ratio - last;
        if decrease.is_finite() {
            passed &= decrease > 0.0;
            margin = margin.min(decrease);
        }
        passed &= ratio_slack >= 0.0;
        margin = margin.min(ratio_slack);
        observed
            .insert(name.into(), json!({ "first_remainder": first, "last_remainder": last, "ratio": first / last }));
        tables.push(table);
    }
    Ok(CheckResult::new(
        json!({
            "dim": 2,
            "ball_radius": cfg.asymptotics_ball_radius,
            "annulus": cfg.asymptotics_annulus,
            "alphas": cfg.asymptotics_alphas,
            "min_ratio": cfg.asymptotics_min_ratio,
        }),
        margin,
        passed,
        Value::Object(observed),
        tables,
    ))
}

pub(super) fn crossing(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let ball = DomainSpec::ball(2, cfg.crossing_ball_radius)?;
    let volume = ball.measures().volume;
    let annulus = DomainSpec::annulus_with_volume(2, cfg.crossing_r1, volume)?;
    let gap = |alpha: f64| -> Result<(f64, f64)> {
        let la = lambda1(annulus, alpha, &s)?;
        let lb = lambda1(ball, alpha, &s)?;
        Ok((la, lb))
    };
    let [lo, hi] = cfg.crossing_alpha_window;
    let n = cfg.crossing_scan_points;
    let mut table = Table::new("crossing.csv", &["alpha", "lambda_annulus", "lambda_ball", "gap"]);
    for i in 0..n {
        let alpha = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        let (la, lb) = gap(alpha)?;
        table.push(vec![alpha, la, lb, la - lb]);
    }
    let params = json!({
        "dim": 2,
        "ball_radius": cfg.crossing_ball_radius,
        "r1": cfg.crossing_r1,
        "r2": annulus.outer_radius(),
        "alpha_window": cfg.crossing_alpha_window,
        "scan_points": n,
        "alpha_tol": cfg.crossing_alpha_tol,
        "gap_tol": cfg.crossing_gap_tol,
    });
    let Some(i) = table.rows.windows(2).position(|w| w[0][3] <= 0.0 && w[1][3] > 0.0) else {
        let first = &table.rows[0];
        let last = &table.rows[n - 1];
        let margin = min_of(table.rows.iter().map(|r| r[3].abs())).copysign(-1.0);
        let mut r = CheckResult::new(
            params,
            margin,
            false,
            json!({ "gap_at_window_start": first[3], "gap_at_window_end": last[3] }),
            vec![table],
        );
        r.diagnostics = Some("no sign change of the gap in the alpha window".into());
        return Ok(r);
    };
    let (a, b) = (table.rows[i][0], table.rows[i + 1][0]);
    let f = |alpha: f64| gap(alpha).map(|(la, lb)| la - lb);
    let tol = RootTolerance { xtol: 1e-3 * cfg.crossing_alpha_tol, rtol: 4.0 * f64::EPSILON, max_iter: 200 };
    let alpha_star = brent(f, a, b, table.rows[i][3], table.rows[i + 1][3], tol)?;
    let (la, lb) = gap(alpha_star)?;
    let gap_star = la - lb;
    // bracket certifying the position of α*
    let delta = 0.5 * cfg.crossing_alpha_tol;
    let left = f(alpha_star - delta)?;
    let right = f(alpha_star + delta)?;
    let above = min_of(table.rows.iter().filter(|r| r[0] > alpha_star).map(|r| r[3]));
    let below = min_of(table.rows.iter().filter(|r| r[0] < alpha_star).map(|r| -r[3]));
    let gap_slack = cfg.crossing_gap_tol - gap_star.abs();
    let margin = min_of([gap_slack, above, below, right, -left]);
    let passed = gap_slack >= 0.0 && above > 0.0 && below >= 0.0 && right > 0.0 && left <= 0.0;
    let pos = table.rows.iter().position(|r| r[0] > alpha_star).unwrap_or(n);
    table.rows.insert(pos, vec![alpha_star, la, lb, gap_star]);
    Ok(CheckResult::new(
        params,
        margin,
        passed,
        json!({
            "alpha_star": alpha_star,
            "gap_at_alpha_star": gap_star,
            "bracket": [alpha_star - delta, alpha_star + delta],
            "gap_at_bracket": [left, right],
        }),
        vec![table],
    ))
}

/// Rayleigh quotient on `A_{ε,r'}` of the ball eigenfunction continued by
/// the constant `φ(r)` on `r < |x| < r'`. `ball` must be the first eigenpair
/// of a ball of radius `r`.
pub fn pinch_test_quotient(ball: &Eigenpair, eps: f64, r_prime: f64) -> f64 {
    let d = ball.problem.dim() as i32;
    let alpha = ball.problem.alpha;
    let r = ball.problem.domain.outer_radius();
    let p = &ball.profile;
    let grid = p.grid();
    let gradient = grid.integrate_range(eps, r, |rho| p.eval_derivative(rho).powi(2) * rho.powi(d - 1));
    let phi_r = p.phi_last();
    let phi_eps = p.eval(eps);
    let mass = grid.integrate_range(eps, r, |rho| p.eval(rho).powi(2) * rho.powi(d - 1))
        + phi_r * phi_r * (r_prime.powi(d) - r.powi(d)) / d as f64;
    let boundary = r_prime.powi(d - 1) * phi_r * phi_r + eps.powi(d - 1) * phi_eps * phi_eps;
    (gradient - alpha * boundary) / mass
}

/// Inner radii below this fraction of the ball radius are not resolved.
const PINCH_MIN_INNER: f64 = 1e-6;

pub(super) fn pinch(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let d = cfg.pinch_dim;
    let r = cfg.pinch_radius;
    let alpha = cfg.pinch_alpha;
    let ball = first_eigenpair(&problem(DomainSpec::ball(d, r)?, alpha)?, &s)?;
    let mut table = Table::new("pinch.csv", &["epsilon", "lambda_annulus", "lambda_ball", "rayleigh_bound_w"]);
    let mut margin = f64::INFINITY;
    let mut passed = true;
    let mut skipped = Vec::new();
    for &eps in &cfg.pinch_epsilons {
        let r_prime = (r.powi(d as i32) + eps.powi(d as i32)).powf(1.0 / d as f64);
        let w = pinch_test_quotient(&ball, eps, r_prime);
        let la = if eps < PINCH_MIN_INNER * r {
            skipped.push(eps);
            f64::NAN
        } else {
            let la = lambda1(DomainSpec::annulus(d, eps, r_prime)?, alpha, &s)?;
            let below_ball = ball.lambda - la;
            let variational = w - la + 1e-10;
            passed &= below_ball > 0.0 && variational >= 0.0;
            margin = margin.min(below_ball).min(variational);
            la
        };
        table.push(vec![eps, la, ball.lambda, w]);
    }
    let mut result = CheckResult::new(
        json!({ "dim": d, "radius": r, "alpha": alpha, "epsilons": cfg.pinch_epsilons }),
        margin,
        passed,
        json!({ "lambda_ball": ball.lambda, "skipped_epsilons": skipped }),
        vec![table],
    );
    if !skipped.is_empty() {
        result.diagnostics =
            Some(format!("direct comparison skipped for epsilon < {PINCH_MIN_INNER:e} r: {skipped:?}"));
    }
    Ok(result)
}

pub(super) fn steklov_ball(cfg: &RunConfig) -> Result<CheckResult> {
    let r = cfg.theorem2_ball_radius;
    let mut worst = 0.0f64;
    let mut observed = serde_json::Map::new();
    for &d in &cfg.theorem2_ball_dims {
        let p = 1.0 / r;
        // boundary points r·θ: coordinate axes and the normalised diagonal
        let mut directions: Vec<Vec<f64>> = (0..d)
            .flat_map(|i| {
                [1.0, -1.0].map(|sgn| {
                    let mut v = vec![0.0; d];
                    v[i] = sgn;
                    v
                })
            })
            .collect();
        directions.push(vec![1.0 / (d as f64).sqrt(); d]);
        for theta in &directions {
            let x: Vec<f64> = theta.iter().map(|t| r * t).collect();
            for i in 0..d {
                // u = x_i: ∇u = e_i, ∂u/∂ν = θ_i, Δu = 0
                worst = worst.max((theta[i] - p * x[i]).abs());
            }
            // u = 1: ∂u/∂ν = 0 = p₁ u
        }
        // Robin mode ℓ = 1 at α = p₂ has λ = 0
        let robin = problem(DomainSpec::ball(d, r)?, p)?;
        worst = worst.max(zero_mode_characteristic(&robin, ModeSpec::new(d, 1))?.abs());
        let mut eigenvalues = vec![0.0];
        eigenvalues.extend(std::iter::repeat_n(p, d));
        observed.insert(format!("d{d}"), json!({ "steklov_eigenvalues": eigenvalues }));
    }
    let margin = cfg.zero_tol - worst;
    Ok(CheckResult::new(
        json!({ "dims": cfg.theorem2_ball_dims, "radius": r, "tol": cfg.zero_tol }),
        margin,
        margin >= 0.0,
        Value::Object(observed),
        Vec::new(),
    ))
}

pub(super) fn theorem2_ball(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let r = cfg.theorem2_ball_radius;
    let tol = cfg.zero_tol;
    let mut table = Table::new("theorem2_ball.csv", &["dim", "index", "lambda"]);
    let mut margin = f64::INFINITY;
    let mut passed = true;
    for &d in &cfg.theorem2_ball_dims {
        let p = problem(DomainSpec::ball(d, r)?, 1.0 / r)?;
        let lambdas = assemble_spectrum(&p, cfg.l_max, d + 2, &s)?.expanded();
        for (i, &l) in lambdas.iter().enumerate() {
            table.push(vec![d as f64, (i + 1) as f64, l]);
        }
        let zero_slack = min_of(lambdas[1..=d].iter().map(|l| tol - l.abs()));
        let first = -lambdas[0] - tol;
        let next = lambdas[d + 1] - tol;
        passed &= zero_slack >= 0.0 && first > 0.0 && next > 0.0;
        margin = margin.min(zero_slack).min(first).min(next);
    }
    let max_zero = table
        .rows
        .iter()
        .filter(|row| row[1] >= 2.0 && row[1] <= row[0] + 1.0)
        .map(|row| row[2].abs())
        .fold(0.0, f64::max);
    Ok(CheckResult::new(
        json!({ "dims": cfg.theorem2_ball_dims, "radius": r, "l_max": cfg.l_max, "tol": tol }),
        margin,
        passed,
        json!({ "max_abs_lambda_2_to_d_plus_1": max_zero }),
        vec![table],
    ))
}

/// `(d|Ω| − (1/r)∫_{∂Ω}|x+a|²) / ∫_Ω|x+a|²` for a centred ball or annulus
/// and a shift of length `shift`. Cross terms vanish by symmetry.
pub fn eq28_bound(domain: &DomainSpec, r: f64, shift: f64) -> f64 {
    let d = domain.dim() as f64;
    let m = domain.measures();
    let (boundary, volume) = domain.second_moments();
    let a2 = shift * shift;
    (d * m.volume - (boundary + a2 * m.surface) / r) / (volume + a2 * m.volume)
}

fn theorem2_family(cfg: &RunConfig) -> Result<(f64, Vec<DomainSpec>)> {
    let r = (cfg.theorem2_volume / unit_ball_volume(2)).sqrt();
    let family = cfg
        .theorem2_r1_grid
        .iter()
        .map(|&r1| DomainSpec::annulus_with_volume(2, r1, cfg.theorem2_volume))
        .collect::<Result<Vec<_>>>()?;
    Ok((r, family))
}

fn theorem2_parameters(cfg: &RunConfig, r: f64) -> Value {
    json!({
        "dim": 2,
        "volume": cfg.theorem2_volume,
        "ball_radius": r,
        "alpha": 1.0 / r,
        "r1_grid": cfg.theorem2_r1_grid,
    })
}

pub(super) fn theorem2_annulus(cfg: &RunConfig) -> Result<CheckResult> {
    let s = cfg.solver();
    let tol = cfg.zero_tol;
    let (r, family) = theorem2_family(cfg)?;
    let mut table = Table::new("theorem2.csv", &["r1", "r2", "lambda2", "eq28_bound"]);
    let mut margin = f64::INFINITY;
    for domain in &family {
        let p = problem(*domain, 1.0 / r)?;
        let lambda2 = assemble_spectrum(&p, cfg.l_max, 2, &s)?.expanded()[1];
        let bound = eq28_bound(domain, r, 0.0);
        margin = margin.min(bound - lambda2 + tol).min(-bound + tol);
        table.push(vec![domain.inner_radius().unwrap_or(0.0), domain.outer_radius(), lambda2, bound]);
    }
    let ball_bound = eq28_bound(&DomainSpec::ball(2, r)?, r, 0.0);
    let mut params = theorem2_parameters(cfg, r);
    params["tol"] = json!(tol);
    params["l_max"] = json!(cfg.l_max);
    Ok(CheckResult::new(params, margin, margin >= 0.0, json!({ "ball_bound": ball_bound }), vec![table]))
}

pub(super) fn theorem2_center_shift(cfg: &RunConfig) -> Result<CheckResult> {
    let (r, family) = theorem2_family(cfg)?;
    let mut table = Table::new("theorem2_shift.csv", &["r1", "shift", "bound"]);
    let mut margin = f64::INFINITY;
    for domain in &family {
        let centred = eq28_bound(domain, r, 0.0);
        for &a in &cfg.theorem2_shift_grid {
            let b = eq28_bound(domain, r, a);
            if a > 0.0 {
                margin = margin.min(centred - b);
            }
            table.push(vec![domain.inner_radius().unwrap_or(0.0), a, b]);
        }
    }
    let mut params = theorem2_parameters(cfg, r);
    params["shift_grid"] = json!(cfg.theorem2_shift_grid);
    let observed = if margin.is_finite() { json!({ "min_drop": margin }) } else { json!({ "min_drop": null }) };
    Ok(CheckResult::new(params, margin, margin > 0.0, observed, vec![table]))
}

pub(super) fn weighted_isoperimetric(cfg: &RunConfig) -> Result<CheckResult> {
    let (r, family) = theorem2_family(cfg)?;
    let ball_moment = unit_sphere_area(2) * r.powi(3);
    let mut margin = f64::INFINITY;
    let mut moments = Vec::new();
    for domain in &family {
        let (boundary, _) = domain.second_moments();
        margin = margin.min(boundary - ball_moment);
        moments.push(boundary);
    }
    Ok(CheckResult::new(
        theorem2_parameters(cfg, r),
        margin,
        margin >= 0.0,
        json!({ "ball_boundary_moment": ball_moment, "annulus_boundary_moments": moments }),
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eq28_vanishes_on_the_ball() {
        for d in [2, 3, 4] {
            let ball = DomainSpec::ball(d, 1.7).unwrap();
            assert!(eq28_bound(&ball, 1.7, 0.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eq28_matches_quadrature_moments() {
        let a = DomainSpec::annulus(2, 0.5, 1.25f64.sqrt()).unwrap();
        let (gx, gw) = crate::quadrature::gauss_legendre(20);
        let (r1, r2) = (0.5, 1.25f64.sqrt());
        let volume: f64 = gx
            .iter()
            .zip(&gw)
            .map(|(x, w)| {
                let rho = r1 + (r2 - r1) * 0.5 * (x + 1.0);
                0.5 * (r2 - r1) * w * 2.0 * PI * rho.powi(3)
            })
            .sum();
        let (_, closed) = a.second_moments();
        assert!((volume - closed).abs() < 1e-13);
        let boundary = 2.0 * PI * (r2.powi(3) + r1.powi(3));
        let expected = (2.0 * PI - boundary) / volume;
        assert!((eq28_bound(&a, 1.0, 0.0) - expected).abs() < 1e-13);
        assert!(expected < 0.0);
    }

    #[test]
    fn pinch_quotient_reduces_to_ball_quotient() {
        let cfg = SolverConfig::default();
        let ball = first_eigenpair(&problem(DomainSpec::ball(2, 1.0).unwrap(), 1.0).unwrap(), &cfg).unwrap();
        let q = pinch_test_quotient(&ball, 0.0, 1.0);
        assert!((q - ball.lambda).abs() < 1e-10, "{q} vs {}", ball.lambda);
    }
}
