use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolverConfig;

/// Parameters of a verification run. Parsed strictly from a flat JSON
/// object: every key is required and unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out_dir: String,
    /// Absolute and relative ODE tolerance.
    pub tol: f64,
    pub scan_points: usize,
    pub l_max: usize,
    /// Absolute tolerance for eigenvalues that should vanish.
    pub zero_tol: f64,

    pub cross_engine_r1: f64,
    pub cross_engine_r2_grid: Vec<f64>,
    pub cross_engine_alphas: Vec<f64>,
    pub cross_engine_rel_tol: f64,

    pub bound_ball_radius: f64,

    pub theorem1_r1: f64,
    pub theorem1_alphas: Vec<f64>,
    pub theorem1_r2_grid: Vec<f64>,
    pub fd_step: f64,
    pub fd_rel_tol: f64,
    pub riccati_tol: f64,

    pub stationarity_r1: f64,
    pub stationarity_r2: f64,
    pub stationarity_alphas: Vec<f64>,

    pub asymptotics_ball_radius: f64,
    pub asymptotics_annulus: [f64; 2],
    pub asymptotics_alphas: Vec<f64>,
    pub asymptotics_min_ratio: f64,

    pub crossing_ball_radius: f64,
    pub crossing_r1: f64,
    pub crossing_alpha_window: [f64; 2],
    pub crossing_scan_points: usize,
    pub crossing_alpha_tol: f64,
    pub crossing_gap_tol: f64,

    pub pinch_dim: usize,
    pub pinch_radius: f64,
    pub pinch_alpha: f64,
    pub pinch_epsilons: Vec<f64>,

    pub theorem2_ball_dims: Vec<usize>,
    pub theorem2_ball_radius: f64,
    pub theorem2_volume: f64,
    pub theorem2_r1_grid: Vec<f64>,
    pub theorem2_shift_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out_dir: "results".into(),
            tol: 1e-12,
            scan_points: 400,
            l_max: 6,
            zero_tol: 1e-8,
            cross_engine_r1: 1.0,
            cross_engine_r2_grid: vec![1.5, 2.0, 4.0],
            cross_engine_alphas: vec![0.5, 1.0, 5.0],
            cross_engine_rel_tol: 1e-8,
            bound_ball_radius: 1.0,
            theorem1_r1: 1.0,
            theorem1_alphas: vec![0.5, 1.0, 2.0, 5.0],
            theorem1_r2_grid: vec![1.2, 1.5, 2.0, 3.0, 5.0],
            fd_step: 1e-4,
            fd_rel_tol: 1e-4,
            riccati_tol: 1e-8,
            stationarity_r1: 1.0,
            stationarity_r2: 2.0,
            stationarity_alphas: vec![1.0, 2.0, 5.0, 10.0, 20.0, 40.0],
            asymptotics_ball_radius: 1.0,
            asymptotics_annulus: [1.0, 2.0],
            asymptotics_alphas: vec![5.0, 10.0, 20.0, 40.0],
            asymptotics_min_ratio: 3.0,
            crossing_ball_radius: 1.0,
            crossing_r1: 1.0,
            crossing_alpha_window: [0.1, 50.0],
            crossing_scan_points: 40,
            crossing_alpha_tol: 1e-6,
            crossing_gap_tol: 1e-8,
            pinch_dim: 2,
            pinch_radius: 1.0,
            pinch_alpha: 1.0,
            pinch_epsilons: vec![0.01, 0.02, 0.05],
            theorem2_ball_dims: vec![2, 3],
            theorem2_ball_radius: 1.0,
            theorem2_volume: PI,
            theorem2_r1_grid: vec![0.25, 0.5, 0.75],
            theorem2_shift_grid: vec![0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn grid<T: PartialOrd + Copy + std::fmt::Debug>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(format!("{name} must not be empty")));
    }
    if v.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid(format!("{name} must be strictly increasing, got {v:?}")));
    }
    Ok(())
}

fn positive_grid(name: &str, v: &[f64]) -> Result<()> {
    grid(name, v)?;
    v.iter().try_for_each(|&x| positive(name, x))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol", self.tol),
            ("zero_tol", self.zero_tol),
            ("cross_engine_r1", self.cross_engine_r1),
            ("cross_engine_rel_tol", self.cross_engine_rel_tol),
            ("bound_ball_radius", self.bound_ball_radius),
            ("theorem1_r1", self.theorem1_r1),
            ("fd_step", self.fd_step),
            ("fd_rel_tol", self.fd_rel_tol),
            ("riccati_tol", self.riccati_tol),
            ("stationarity_r1", self.stationarity_r1),
            ("stationarity_r2", self.stationarity_r2),
            ("asymptotics_ball_radius", self.asymptotics_ball_radius),
            ("asymptotics_min_ratio", self.asymptotics_min_ratio),
            ("crossing_ball_radius", self.crossing_ball_radius),
            ("crossing_r1", self.crossing_r1),
            ("crossing_alpha_tol", self.crossing_alpha_tol),
            ("crossing_gap_tol", self.crossing_gap_tol),
            ("pinch_radius", self.pinch_radius),
            ("pinch_alpha", self.pinch_alpha),
            ("theorem2_ball_radius", self.theorem2_ball_radius),
            ("theorem2_volume", self.theorem2_volume),
        ] {
            positive(name, v)?;
        }
        if self.scan_points < 2 || self.crossing_scan_points < 2 {
            return Err(invalid("scan point counts must be >= 2".into()));
        }
        positive_grid("cross_engine_r2_grid", &self.cross_engine_r2_grid)?;
        positive_grid("cross_engine_alphas", &self.cross_engine_alphas)?;
        positive_grid("theorem1_alphas", &self.theorem1_alphas)?;
        positive_grid("theorem1_r2_grid", &self.theorem1_r2_grid)?;
        positive_grid("stationarity_alphas", &self.stationarity_alphas)?;
        positive_grid("asymptotics_annulus", &self.asymptotics_annulus)?;
        positive_grid("asymptotics_alphas", &self.asymptotics_alphas)?;
        positive_grid("crossing_alpha_window", &self.crossing_alpha_window)?;
        positive_grid("pinch_epsilons", &self.pinch_epsilons)?;
        grid("theorem2_ball_dims", &self.theorem2_ball_dims)?;
        positive_grid("theorem2_r1_grid", &self.theorem2_r1_grid)?;
        grid("theorem2_shift_grid", &self.theorem2_shift_grid)?;
        if self.cross_engine_r2_grid[0] <= self.cross_engine_r1 {
            return Err(invalid("cross_engine_r2_grid must lie above cross_engine_r1".into()));
        }
        if self.theorem1_r2_grid[0] <= self.theorem1_r1 {
            return Err(invalid("theorem1_r2_grid must lie above theorem1_r1".into()));
        }
        if self.stationarity_r2 <= self.stationarity_r1 {
            return Err(invalid("stationarity_r2 must exceed stationarity_r1".into()));
        }
        if self.pinch_dim < 2 {
            return Err(invalid("pinch_dim must be >= 2".into()));
        }
        if self.theorem2_ball_dims[0] < 2 {
            return Err(invalid("theorem2_ball_dims must be >= 2".into()));
        }
        if self.pinch_epsilons[self.pinch_epsilons.len() - 1] >= self.pinch_radius {
            return Err(invalid("pinch_epsilons must stay below pinch_radius".into()));
        }
        if self.theorem2_shift_grid[0] < 0.0 {
            return Err(invalid("theorem2_shift_grid must be non-negative".into()));
        }
        if self.out_dir.is_empty() {
            return Err(invalid("out_dir must not be empty".into()));
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { scan_points: self.scan_points, ..SolverConfig::with_tolerance(self.tol) }
    }
}
