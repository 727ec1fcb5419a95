//! Composite Gauss–Legendre panels with endpoint nodes, used both as the
//! sampling grid of radial profiles and for quadrature and interpolation
//! on them.

use std::f64::consts::PI;

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = m as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Points per panel interior.
pub const PANEL_ORDER: usize = 8;

/// `[a, b]` split into panels, each sampled at its two endpoints plus
/// `PANEL_ORDER` Gauss–Legendre points. Endpoints are shared between
/// neighbouring panels and carry zero quadrature weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid {
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Barycentric weights of the local interpolation nodes (reference panel).
    bary: Vec<f64>,
    /// Local nodes on [-1, 1], endpoints included.
    local: Vec<f64>,
}

impl PanelGrid {
    /// Equal-width panels.
    pub fn new(a: f64, b: f64, panels: usize) -> Self {
        assert!(b > a && panels > 0, "invalid panel grid [{a}, {b}] x {panels}");
        let h = (b - a) / panels as f64;
        let mut breaks: Vec<f64> = (0..panels).map(|p| a + h * p as f64).collect();
        breaks.push(b);
        Self::with_breaks(breaks)
    }

    /// Panels between consecutive strictly increasing `breaks`.
    pub fn with_breaks(breaks: Vec<f64>) -> Self {
        assert!(breaks.len() >= 2, "need at least one panel");
        assert!(breaks.windows(2).all(|w| w[1] > w[0]), "panel breaks must increase");
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let mut local = Vec::with_capacity(PANEL_ORDER + 2);
        local.push(-1.0);
        local.extend_from_slice(&gx);
        local.push(1.0);
        let bary: Vec<f64> = (0..local.len())
            .map(|j| {
                let prod: f64 = (0..local.len()).filter(|&k| k != j).map(|k| local[j] - local[k]).product();
                1.0 / prod
            })
            .collect();
        let panels = breaks.len() - 1;
        let mut nodes = Vec::with_capacity(panels * (PANEL_ORDER + 1) + 1);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (left, h) = (w[0], w[1] - w[0]);
            nodes.push(left);
            weights.push(0.0);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(left + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * wt);
            }
        }
        nodes.push(breaks[panels]);
        weights.push(0.0);
        Self { breaks, nodes, weights, bary, local }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    fn panel_span(&self, p: usize) -> (f64, f64) {
        (self.breaks[p], self.breaks[p + 1])
    }

    /// Panel containing `x` (clamped to the grid).
    pub fn panel_of(&self, x: f64) -> usize {
        let p = self.breaks.partition_point(|&b| b <= x);
        p.saturating_sub(1).min(self.panels() - 1)
    }

    /// Global indices of the interpolation nodes of panel `p`.
    pub fn panel_indices(&self, p: usize) -> std::ops::RangeInclusive<usize> {
        let start = p * (PANEL_ORDER + 1);
        start..=start + PANEL_ORDER + 1
    }

    fn to_local(&self, p: usize, x: f64) -> f64 {
        let (left, right) = self.panel_span(p);
        2.0 * (x - left) / (right - left) - 1.0
    }

    /// Interpolates sampled `values` at `x` with the panel polynomial.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let p = self.panel_of(x);
        let t = self.to_local(p, x);
        let base = *self.panel_indices(p).start();
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&node, &bw)) in self.local.iter().zip(&self.bary).enumerate() {
            let diff = t - node;
            if diff == 0.0 {
                return values[base + j];
            }
            let c = bw / diff;
            num += c * values[base + j];
            den += c;
        }
        num / den
    }

    /// Derivative of the panel interpolant of `values` at `x`.
    pub fn differentiate(&self, values: &[f64], x: f64) -> f64 {
        let p = self.panel_of(x);
        let t = self.to_local(p, x);
        let base = *self.panel_indices(p).start();
        let n = self.local.len();
        let (left, right) = self.panel_span(p);
        let scale = 2.0 / (right - left);
        // Derivative of the Lagrange basis evaluated directly.
        let mut total = 0.0;
        for j in 0..n {
            let mut dl = 0.0;
            for m in 0..n {
                if m == j {
                    continue;
                }
                let mut prod = self.bary[j];
                for k in 0..n {
                    if k != j && k != m {
                        prod *= t - self.local[k];
                    }
                }
                dl += prod;
            }
            total += dl * values[base + j];
        }
        total * scale
    }

    /// `∫_a^b g` where `g` is sampled at the nodes.
    pub fn integrate_samples(&self, samples: &[f64]) -> f64 {
        samples.iter().zip(&self.weights).map(|(s, w)| s * w).sum()
    }

    /// `∫_lo^hi g` for `[lo, hi] ⊂ [a, b]`, with `g` evaluated by the caller
    /// at Gauss points of each panel piece.
    pub fn integrate_range<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut g: F) -> f64 {
        let (gx, gw) = gauss_legendre(2 * PANEL_ORDER);
        let mut total = 0.0;
        for p in self.panel_of(lo)..=self.panel_of(hi) {
            let (left, right) = self.panel_span(p);
            let (left, right) = (left.max(lo), right.min(hi));
            if right <= left {
                continue;
            }
            let half = 0.5 * (right - left);
            for (x, w) in gx.iter().zip(&gw) {
                total += half * w * g(left + half * (x + 1.0));
            }
        }
        total
    }
}
