//! Acceptance criteria, each at its stated tolerance. One line per criterion
//! is written straight to stdout, so it shows up even when output capture
//! is on.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use robin_spectral::bessel::{bessel_ik, BesselOrder};
use robin_spectral::domain::{unit_ball_volume, DomainSpec, ModeSpec, RobinProblem};
use robin_spectral::shape::{derivative_report, hadamard_derivative, riccati_trace_for, BoundaryField};
use robin_spectral::solver::{assemble_spectrum, eigenvalue_bessel, first_eigenpair, SolverConfig};
use robin_spectral::suite::{eq28_bound, pinch_test_quotient};
use robin_spectral::Result;

type Verdict = Result<(bool, String)>;

fn cfg() -> SolverConfig {
    SolverConfig::with_tolerance(1e-12)
}

fn problem(domain: Result<DomainSpec>, alpha: f64) -> Result<RobinProblem> {
    RobinProblem::new(domain?, alpha)
}

fn lambda1(domain: Result<DomainSpec>, alpha: f64) -> Result<f64> {
    Ok(first_eigenpair(&problem(domain, alpha)?, &cfg())?.lambda)
}

const CROSS_R2: [f64; 3] = [1.5, 2.0, 4.0];
const CROSS_ALPHAS: [f64; 3] = [0.5, 1.0, 5.0];
const T1_ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const T1_R2: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 5.0];

fn c1_cross_engine() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &r2 in &CROSS_R2 {
        for &alpha in &CROSS_ALPHAS {
            let p = problem(DomainSpec::annulus(2, 1.0, r2), alpha)?;
            let a = first_eigenpair(&p, &cfg())?.lambda;
            let b = eigenvalue_bessel(&p, ModeSpec::radial(2), &cfg())?.lambda;
            worst = worst.max((a - b).abs() / a.abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 1e-8 && secs < 10.0, format!("max rel diff {worst:.2e}, {secs:.2} s")))
}

fn c2_negativity_bound() -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    let mut n = 0;
    for &alpha in &CROSS_ALPHAS {
        let domains = CROSS_R2.iter().map(|&r2| DomainSpec::annulus(2, 1.0, r2)).chain([DomainSpec::ball(2, 1.0)]);
        for d in domains {
            let p = problem(d, alpha)?;
            let slack = first_eigenpair(&p, &cfg())?.lambda - p.negativity_bound();
            worst = worst.max(slack);
            n += 1;
        }
    }
    Ok((worst < 0.0, format!("{n} configurations, max slack {worst:.4e}")))
}

fn c3_theorem1() -> Verdict {
    let mut ok = true;
    let mut min_step = f64::INFINITY;
    let mut min_deriv = f64::INFINITY;
    let mut max_fd: f64 = 0.0;
    for &alpha in &T1_ALPHAS {
        let mut prev = f64::NEG_INFINITY;
        for &r2 in &T1_R2 {
            let p = problem(DomainSpec::annulus(2, 1.0, r2), alpha)?;
            let pair = first_eigenpair(&p, &cfg())?;
            min_step = min_step.min(pair.lambda - prev);
            prev = pair.lambda;
            min_deriv = min_deriv.min(hadamard_derivative(&pair, &BoundaryField::OuterNormal)?);
            for field in [BoundaryField::OuterNormal, BoundaryField::volume_preserving(1.0, 1.0, r2)] {
                let rep = derivative_report(&p, &field, 1e-4, &cfg())?;
                max_fd = max_fd.max(rep.rel_discrepancy);
            }
        }
    }
    ok &= min_step > 0.0 && min_deriv > 0.0 && max_fd <= 1e-4;
    Ok((ok, format!("min increment {min_step:.3e}, min derivative {min_deriv:.3e}, max fd rel {max_fd:.2e}")))
}

fn c4_riccati() -> Verdict {
    let mut ok = true;
    let (mut bc, mut res, mut xi_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut min_end = f64::INFINITY;
    for &alpha in &T1_ALPHAS {
        for &r2 in &T1_R2 {
            let t = riccati_trace_for(&problem(DomainSpec::annulus(2, 1.0, r2), alpha)?, &cfg())?;
            bc = bc.max((t.z_inner() + alpha).abs()).max((t.z_outer() - alpha).abs());
            res = res.max(t.max_residual);
            xi_err = xi_err.max((t.dz_at_xi + t.lambda).abs() / t.lambda.abs().max(1.0));
            min_end = min_end.min(t.endpoint_slope_numeric).min(t.endpoint_slope);
            ok &= t.xi > t.r1 && t.xi < r2 && -t.lambda > 0.0 && t.dz_at_xi > 0.0;
        }
    }
    ok &= bc <= 1e-8 && res <= 1e-8 && xi_err <= 1e-8 && min_end > 0.0;
    Ok((ok, format!("boundary {bc:.2e}, residual {res:.2e}, |z'(xi)+lambda| {xi_err:.2e}, min z'(r2) {min_end:.3e}")))
}

fn c5_asymptotics() -> Verdict {
    let alphas = [5.0, 10.0, 20.0, 40.0];
    let mut ok = true;
    let mut ratios = Vec::new();
    for (domain, r) in [(DomainSpec::ball(2, 1.0), 1.0), (DomainSpec::annulus(2, 1.0, 2.0), 2.0)] {
        let domain = domain?;
        let mut rem = Vec::new();
        for &a in &alphas {
            let l = lambda1(Ok(domain), a)?;
            rem.push(((l + a * a + a / r) / a).abs());
        }
        ok &= rem.windows(2).all(|w| w[1] < w[0]) && rem[rem.len() - 1] * 3.0 <= rem[0];
        ratios.push(rem[0] / rem[rem.len() - 1]);
    }
    Ok((ok, format!("first/last: ball {:.2}, annulus {:.2}", ratios[0], ratios[1])))
}

fn c6_ball_multiplicity() -> Verdict {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for dim in [2, 3] {
        for r in [0.5, 1.0, 2.0] {
            let s = assemble_spectrum(&problem(DomainSpec::ball(dim, r), 1.0 / r)?, 6, dim + 1, &cfg())?;
            let ev = s.expanded();
            ok &= ev.len() == dim + 1 && ev[0] < -1e-8;
            // indices 2..=d+1 vanish
            for &l in &ev[1..] {
                worst = worst.max(l.abs());
            }
            ok &= s.entries.len() == 2 && s.entries[1].ell == 1 && s.entries[1].multiplicity == dim;
        }
    }
    ok &= worst <= 1e-8;
    Ok((ok, format!("max |lambda_2..d+1| {worst:.2e}")))
}

fn c7_theorem2_annuli() -> Verdict {
    let r = (PI / unit_ball_volume(2)).sqrt();
    let mut ok = true;
    let mut detail = Vec::new();
    for r1 in [0.25, 0.5, 0.75] {
        let a = DomainSpec::annulus_with_volume(2, r1, PI)?;
        let s = assemble_spectrum(&problem(Ok(a), 1.0 / r)?, 6, 2, &cfg())?;
        let l2 = s.expanded()[1];
        let b = eq28_bound(&a, r, 0.0);
        ok &= l2 <= b + 1e-8 && b <= 1e-8;
        detail.push(format!("{l2:.4} <= {b:.4}"));
    }
    Ok((ok, detail.join(", ")))
}

fn c8_crossing() -> Verdict {
    let r2 = 2f64.sqrt();
    let gap = |a: f64| -> Result<f64> {
        Ok(lambda1(DomainSpec::annulus(2, 1.0, r2), a)? - lambda1(DomainSpec::ball(2, 1.0), a)?)
    };
    let grid: Vec<f64> = (0..=40).map(|i| 0.1 * 500f64.powf(i as f64 / 40.0)).collect();
    let values = grid.iter().map(|&a| gap(a)).collect::<Result<Vec<_>>>()?;
    let Some(i) = values.windows(2).position(|w| (w[0] < 0.0) != (w[1] < 0.0)) else {
        return Ok((false, "no sign change in [0.1, 50]".into()));
    };
    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    let lo_sign = values[i] < 0.0;
    while hi - lo > 1e-7 {
        let m = 0.5 * (lo + hi);
        if (gap(m)? < 0.0) == lo_sign {
            lo = m;
        } else {
            hi = m;
        }
    }
    let star = 0.5 * (lo + hi);
    let bracket = (gap(star - 1e-6)? < 0.0) != (gap(star + 1e-6)? < 0.0);
    let above_ok = values[i + 1..].iter().all(|&g| g > 0.0) && gap(star + 1e-6)? > 0.0;
    Ok((bracket && above_ok, format!("alpha* = {star:.7}, annulus larger above: {above_ok}")))
}

fn c9_pinch() -> Verdict {
    let ball = first_eigenpair(&problem(DomainSpec::ball(2, 1.0), 1.0)?, &cfg())?;
    let mut ok = true;
    let mut detail = Vec::new();
    for eps in [0.05, 0.02, 0.01] {
        let rp = (1.0f64 + eps * eps).sqrt();
        let la = lambda1(DomainSpec::annulus(2, eps, rp), 1.0)?;
        let q = pinch_test_quotient(&ball, eps, rp);
        ok &= la < ball.lambda && q - la >= 0.0;
        detail.push(format!("eps {eps}: {la:.5} < {:.5}, slack {:.2e}", ball.lambda, q - la));
    }
    Ok((ok, detail.join("; ")))
}

fn c10_bessel() -> Verdict {
    let ord = |nu: f64| BesselOrder::new(nu).unwrap();
    let xs: Vec<f64> = (0..=60).map(|i| 0.1 * 500f64.powf(i as f64 / 60.0)).collect();
    let mut wr: f64 = 0.0;
    for j in 0..=20 {
        let nu = 0.25 * j as f64;
        for &x in &xs {
            let v = bessel_ik(ord(nu), x)?;
            wr = wr.max(((v.i * v.k_prime - v.i_prime * v.k) * x + 1.0).abs());
        }
    }
    let mut half: f64 = 0.0;
    for &x in &xs {
        let c = (2.0 / (PI * x)).sqrt();
        let kc = (PI / (2.0 * x)).sqrt() * (-x).exp();
        let h = bessel_ik(ord(0.5), x)?;
        let h3 = bessel_ik(ord(1.5), x)?;
        for (got, want) in
            [(h.i, c * x.sinh()), (h.k, kc), (h3.i, c * (x.cosh() - x.sinh() / x)), (h3.k, kc * (1.0 + 1.0 / x))]
        {
            half = half.max((got - want).abs() / want.abs());
        }
    }
    let mut fd: f64 = 0.0;
    for j in 0..=10 {
        let nu = 0.5 * j as f64;
        for &x in xs.iter().step_by(5) {
            let h = 1e-5 * x.min(1.0);
            let p = bessel_ik(ord(nu), x + h)?;
            let m = bessel_ik(ord(nu), x - h)?;
            let v = bessel_ik(ord(nu), x)?;
            fd = fd.max(((p.i - m.i) / (2.0 * h) - v.i_prime).abs() / v.i_prime.abs());
            fd = fd.max(((p.k - m.k) / (2.0 * h) - v.k_prime).abs() / v.k_prime.abs());
        }
    }
    Ok((
        wr <= 1e-10 && half <= 1e-12 && fd <= 1e-8,
        format!("wronskian {wr:.1e}, half-integer {half:.1e}, fd {fd:.1e}"),
    ))
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn c11_determinism() -> Verdict {
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut runs = Vec::new();
    let mut slowest = Duration::ZERO;
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_robin-spectral"))
            .args(["verify", "--suite", "all", "--out", out.to_str().unwrap()])
            .output()
            .expect("run verify");
        slowest = slowest.max(start.elapsed());
        if !status.status.success() {
            return Ok((false, format!("verify exited with {:?}", status.status.code())));
        }
        runs.push(read_all(&out));
    }
    let identical = runs[0] == runs[1];
    let secs = slowest.as_secs_f64();
    Ok((identical && secs <= 300.0, format!("{} files identical: {identical}, slowest run {secs:.1} s", runs[0].len())))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("cross-engine equivalence", c1_cross_engine),
        ("negativity bound", c2_negativity_bound),
        ("monotonicity in r2 and outer derivative", c3_theorem1),
        ("riccati mechanics", c4_riccati),
        ("large-alpha asymptotics", c5_asymptotics),
        ("ball lambda2 = 0 with multiplicity d", c6_ball_multiplicity),
        ("annulus lambda2 <= moment bound <= 0", c7_theorem2_annuli),
        ("annulus/ball crossing", c8_crossing),
        ("pinched annulus below ball", c9_pinch),
        ("bessel kernel identities", c10_bessel),
        ("determinism and runtime", c11_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let line = format!("criterion {:>2} {:<42} {}  {detail}\n", i + 1, name, if ok { "PASS" } else { "FAIL" });
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
