use serde::Serialize;

use crate::domain::{ModeSpec, RobinProblem};
use crate::error::{Error, Result};

use super::{default_window, find_eigenvalues, lowest_eigenpair, Eigenpair, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub multiplicity: usize,
    pub ell: usize,
    pub n: usize,
    /// Largest Robin residual of the eigenfunction at the boundary.
    pub residual: f64,
}

/// Lowest eigenvalues across angular modes, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    /// Requested number of eigenvalues counted with multiplicity.
    pub count: usize,
    /// Lowest eigenvalue of the first mode left out, `L_max + 1`.
    pub next_mode_lambda: f64,
}

impl Spectrum {
    /// `λ₁ ≤ λ₂ ≤ …`, each eigenvalue repeated by its multiplicity, truncated to `count`.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.lambda, e.multiplicity)).take(self.count).collect()
    }

    /// 1-based index range `[first, last]` an entry occupies in the expanded list.
    pub fn index_range(&self, entry: usize) -> (usize, usize) {
        let before: usize = self.entries[..entry].iter().map(|e| e.multiplicity).sum();
        (before + 1, before + self.entries[entry].multiplicity)
    }
}

/// Merges the spectra of modes `ℓ = 0..=l_max` into the first `count`
/// eigenvalues counted with multiplicity.
///
/// The window grows upwards until enough eigenvalues are collected. The
/// lowest eigenvalue of mode `l_max + 1` must lie above the last one kept
/// (eigenvalues increase with ℓ), otherwise the result could be missing
/// entries and [`Error::InsufficientLMax`] is returned.
pub fn assemble_spectrum(problem: &RobinProblem, l_max: usize, count: usize, cfg: &SolverConfig) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let dim = problem.dim();
    let (lo, _) = default_window(problem);
    let big_r = problem.domain.outer_radius();
    let mut hi = 5.0 / (big_r * big_r) + 1.0;
    for _ in 0..20 {
        let mut found: Vec<Eigenpair> = Vec::new();
        for ell in 0..=l_max {
            let search = find_eigenvalues(problem, ModeSpec::new(dim, ell), (lo, hi), usize::MAX, cfg)?;
            if let Some(first) = search.pairs.first() {
                if first.n != 1 {
                    return Err(Error::GridTooCoarse(format!(
                        "lowest root of mode {ell} in [{lo}, {hi}] has {} nodes",
                        first.n - 1
                    )));
                }
            }
            found.extend(search.pairs);
        }
        let total: usize = found.iter().map(|p| p.mode.multiplicity()).sum();
        if total < count {
            hi += hi - lo;
            continue;
        }
        found.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.mode.ell.cmp(&b.mode.ell)));
        let mut entries = Vec::new();
        let mut covered = 0;
        for p in &found {
            if covered >= count {
                break;
            }
            entries.push(SpectrumEntry {
                lambda: p.lambda,
                multiplicity: p.mode.multiplicity(),
                ell: p.mode.ell,
                n: p.n,
                residual: p.boundary_residuals().max_abs(),
            });
            covered += p.mode.multiplicity();
        }
        let threshold = entries.last().map(|e| e.lambda).unwrap_or(f64::NEG_INFINITY);
        let next = lowest_eigenpair(problem, ModeSpec::new(dim, l_max + 1), cfg)?;
        if next.lambda <= threshold {
            return Err(Error::InsufficientLMax { l_max, next: l_max + 1, next_lambda: next.lambda, threshold });
        }
        return Ok(Spectrum { entries, count, next_mode_lambda: next.lambda });
    }
    Err(Error::NoRoot(format!("fewer than {count} eigenvalues below {hi}")))
}

/// The `count` lowest eigenpairs of a single mode, growing the window upwards
/// until enough are found.
pub fn mode_eigenvalues(
    problem: &RobinProblem,
    mode: ModeSpec,
    count: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Eigenpair>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let (lo, _) = default_window(problem);
    let big_r = problem.domain.outer_radius();
    let mut hi = 5.0 / (big_r * big_r) + 1.0;
    for _ in 0..20 {
        let search = find_eigenvalues(problem, mode, (lo, hi), count, cfg)?;
        if search.pairs.len() >= count {
            if search.pairs[0].n != 1 {
                return Err(Error::GridTooCoarse(format!(
                    "lowest root of mode {} has {} nodes",
                    mode.ell,
                    search.pairs[0].n - 1
                )));
            }
            return Ok(search.pairs);
        }
        hi += hi - lo;
    }
    Err(Error::NoRoot(format!("fewer than {count} eigenvalues of mode {} below {hi}", mode.ell)))
}
