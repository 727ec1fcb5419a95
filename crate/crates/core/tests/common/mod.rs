//! Reference computations that share no code with the library.
#![allow(dead_code)]

/// Fixed-step RK4 integration of the radial equation
/// `φ'' + (d−1)/ρ φ' − ℓ(ℓ+d−2)/ρ² φ + λφ = 0` from the inner Robin
/// condition; returns the outer Robin residual `φ'(r₂) − αφ(r₂)`.
pub fn rk4_residual(dim: usize, ell: usize, r1: f64, r2: f64, alpha: f64, lambda: f64, steps: usize) -> f64 {
    let d1 = dim as f64 - 1.0;
    let c = (ell * (ell + dim - 2)) as f64;
    let f = |rho: f64, y: [f64; 2]| [y[1], -d1 / rho * y[1] + (c / (rho * rho) - lambda) * y[0]];
    let h = (r2 - r1) / steps as f64;
    let mut y = [1.0, -alpha];
    for i in 0..steps {
        let rho = r1 + i as f64 * h;
        let k1 = f(rho, y);
        let k2 = f(rho + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(rho + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(rho + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        // keep magnitudes bounded; only the sign of the residual matters
        let s = y[0].abs().max(y[1].abs());
        if s > 1e100 {
            y = [y[0] / s, y[1] / s];
        }
    }
    y[1] - alpha * y[0]
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Eigenvalues of one annulus mode in `[lo, hi]` by sign changes on a dense
/// λ grid, each refined by bisection at `steps` and `2·steps` RK4 steps and
/// Richardson-extrapolated (RK4 is fourth order).
pub fn rk4_mode_eigenvalues(
    dim: usize,
    ell: usize,
    r1: f64,
    r2: f64,
    alpha: f64,
    (lo, hi): (f64, f64),
    grid: usize,
    steps: usize,
) -> Vec<f64> {
    let coarse = |l: f64| rk4_residual(dim, ell, r1, r2, alpha, l, steps);
    let fine = |l: f64| rk4_residual(dim, ell, r1, r2, alpha, l, 2 * steps);
    let mut out = Vec::new();
    let mut prev = (lo, coarse(lo));
    for i in 1..=grid {
        let l = lo + (hi - lo) * i as f64 / grid as f64;
        let v = coarse(l);
        if (v < 0.0) != (prev.1 < 0.0) {
            let a = bisect(coarse, prev.0, l);
            let b = bisect(fine, prev.0, l);
            out.push((16.0 * b - a) / 15.0);
        }
        prev = (l, v);
    }
    out
}

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = (self.hi - p - e + self.lo) / d;
        let (hi, lo) = two_sum(q1, r);
        Dd { hi, lo }
    }
}

/// `I_ν(x)` for integer ν from 60 terms of the power series in double-double.
pub fn bessel_i_series_dd(nu: u32, x: f64) -> f64 {
    let q = Dd::new(x).mul(Dd::new(x)).div_f64(4.0);
    let mut term = Dd::new(1.0);
    for k in 1..=nu {
        term = term.mul(Dd::new(x)).div_f64(2.0 * k as f64);
    }
    let mut sum = term;
    for k in 1..60u32 {
        term = term.mul(q).div_f64(k as f64 * (k + nu) as f64);
        sum = sum.add(term);
    }
    sum.hi + sum.lo
}

/// `K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt` by the trapezoid rule, which
/// converges geometrically for this analytic, rapidly decaying integrand.
pub fn bessel_k_trapezoid(nu: f64, x: f64) -> f64 {
    let h: f64 = 0.01;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += v;
        if v < 1e-300 || t > 50.0 {
            break;
        }
        t += h;
    }
    h * sum
}
