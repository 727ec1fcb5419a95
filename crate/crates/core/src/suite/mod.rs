//! Named numerical checks of the spectral inequalities and asymptotics.
//!
//! Each check sweeps a configuration taken from [`RunConfig`], produces a
//! [`VerificationReport`] with the worst-case signed slack and emits its
//! data as CSV tables.

mod checks;

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

pub use checks::{eq28_bound, pinch_test_quotient, CheckResult};

use crate::config::RunConfig;
use crate::error::Result;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Theorem1,
    Theorem2,
    Asymptotics,
    Crossing,
    Pinch,
    Bound,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::All, Suite::Theorem1, Suite::Theorem2, Suite::Asymptotics, Suite::Crossing, Suite::Pinch, Suite::Bound];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Asymptotics => "asymptotics",
            Suite::Crossing => "crossing",
            Suite::Pinch => "pinch",
            Suite::Bound => "bound",
        }
    }

    fn includes(self, group: Suite) -> bool {
        self == Suite::All || self == group
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub suite: String,
    pub parameters: Value,
    pub claim: String,
    /// Worst-case signed slack; non-negative (positive for strict claims) when the claim holds.
    pub margin: f64,
    pub passed: bool,
    /// Key computed quantities.
    pub observed: Value,
    /// CSV files written next to the summary.
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub report: VerificationReport,
    pub tables: Vec<Table>,
    /// The check could not run to completion (solver or parameter error).
    pub errored: bool,
}

type CheckFn = fn(&RunConfig) -> Result<CheckResult>;

struct CheckDef {
    name: &'static str,
    group: Suite,
    claim: &'static str,
    run: CheckFn,
}

const CHECKS: &[CheckDef] = &[
    CheckDef {
        name: "cross_engine",
        group: Suite::Bound,
        claim: "|lambda1(shooting) - lambda1(bessel)| / |lambda1| <= rel_tol",
        run: checks::cross_engine,
    },
    CheckDef {
        name: "negativity_bound",
        group: Suite::Bound,
        claim: "lambda1(Omega) < -alpha |dOmega| / |Omega|",
        run: checks::negativity_bound,
    },
    CheckDef {
        name: "theorem1_monotonicity",
        group: Suite::Theorem1,
        claim: "lambda1(A_{r1,r2}) strictly increasing in r2 and d lambda1(A, V_outer) > 0",
        run: checks::theorem1_monotonicity,
    },
    CheckDef {
        name: "hadamard_fd",
        group: Suite::Theorem1,
        claim: "|hadamard - central difference| / |hadamard| <= fd_rel_tol for the outer field and a volume-preserving pair",
        run: checks::hadamard_fd,
    },
    CheckDef {
        name: "riccati",
        group: Suite::Theorem1,
        claim: "z = phi'/phi: z(r1) = -alpha, z(r2) = alpha, z' + z^2 + z/r + lambda1 = 0, exists xi < r2 with z(xi) = 0, z'(xi) = -lambda1 > 0, z'(r2) > 0",
        run: checks::riccati,
    },
    CheckDef {
        name: "stationarity_sign",
        group: Suite::Theorem1,
        claim: "closed-form dG/dr2 > 0 for alpha >= alpha_c",
        run: checks::stationarity_sign,
    },
    CheckDef {
        name: "asymptotics",
        group: Suite::Asymptotics,
        claim: "|(lambda1 + alpha^2 + alpha/R) / alpha| strictly decreasing in alpha, last <= first / min_ratio",
        run: checks::asymptotics,
    },
    CheckDef {
        name: "crossing",
        group: Suite::Crossing,
        claim: "lambda1(annulus) - lambda1(ball) changes sign at alpha*, annulus larger above alpha*",
        run: checks::crossing,
    },
    CheckDef {
        name: "pinch",
        group: Suite::Pinch,
        claim: "lambda1(A_{eps,r'}) < lambda1(B_r) and R[w] >= lambda1(A_{eps,r'})",
        run: checks::pinch,
    },
    CheckDef {
        name: "steklov_ball",
        group: Suite::Theorem2,
        claim: "p1 = 0, p2 = ... = p_{d+1} = 1/r on B_r with eigenfunctions 1, x_1, ..., x_d",
        run: checks::steklov_ball,
    },
    CheckDef {
        name: "theorem2_ball",
        group: Suite::Theorem2,
        claim: "lambda2(B_r) = ... = lambda_{d+1}(B_r) = 0 at alpha = 1/r",
        run: checks::theorem2_ball,
    },
    CheckDef {
        name: "theorem2_annulus",
        group: Suite::Theorem2,
        claim: "lambda2(A) <= (d|A| - (1/r) int_dA |x|^2) / int_A |x|^2 <= 0 at alpha = 1/r, |A| = |B_r|",
        run: checks::theorem2_annulus,
    },
    CheckDef {
        name: "theorem2_center_shift",
        group: Suite::Theorem2,
        claim: "the shifted test-function bound is maximal at a = 0",
        run: checks::theorem2_center_shift,
    },
    CheckDef {
        name: "weighted_isoperimetric",
        group: Suite::Theorem2,
        claim: "int_dA |x|^2 >= int_dB_r |x|^2 for |A| = |B_r|",
        run: checks::weighted_isoperimetric,
    },
];

/// Names of the checks run by `suite`, in report order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    let mut names: Vec<_> = CHECKS.iter().filter(|c| suite.includes(c.group)).map(|c| c.name).collect();
    names.sort_unstable();
    names
}

fn outcome(def: &CheckDef, cfg: &RunConfig) -> CheckOutcome {
    let (result, errored) = match (def.run)(cfg) {
        Ok(r) => (r, false),
        Err(e) => (CheckResult::error(e), true),
    };
    let artifacts = result.tables.iter().map(|t| t.file_name.clone()).collect();
    CheckOutcome {
        report: VerificationReport {
            check_name: def.name.to_string(),
            suite: def.group.name().to_string(),
            parameters: result.parameters,
            claim: def.claim.to_string(),
            margin: result.margin,
            passed: result.passed && !errored,
            observed: result.observed,
            artifacts,
            diagnostics: result.diagnostics,
        },
        tables: result.tables,
        errored,
    }
}

/// Runs the selected checks concurrently; outcomes are ordered by check name.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Vec<CheckOutcome> {
    let selected: Vec<&CheckDef> = CHECKS.iter().filter(|c| suite.includes(c.group)).collect();
    let mut outcomes: Vec<CheckOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = selected.iter().map(|def| s.spawn(move || outcome(def, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    outcomes.sort_by(|a, b| a.report.check_name.cmp(&b.report.check_name));
    outcomes
}

pub const SUMMARY_FILE: &str = "summary.json";

pub fn summary_json(outcomes: &[CheckOutcome]) -> String {
    let reports: Vec<&VerificationReport> = outcomes.iter().map(|o| &o.report).collect();
    let mut text = serde_json::to_string_pretty(&reports).expect("reports serialise");
    text.push('\n');
    text
}

/// Writes every table and the JSON summary into `dir`.
pub fn write_outputs(dir: &Path, outcomes: &[CheckOutcome]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for table in outcomes.iter().flat_map(|o| &o.tables) {
        table.write_to(dir)?;
    }
    std::fs::write(dir.join(SUMMARY_FILE), summary_json(outcomes))
}
