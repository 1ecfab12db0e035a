//! Scenario runner for random-function-iteration feasibility experiments:
//! declarative configs in, CSV tables and a plain-text report out.

pub mod config;
pub mod error;
pub mod registry;
pub mod runner;
pub mod scenario;

use std::fmt::Write as _;

/// Text listing of built-in problem kinds, kernels and bundled scenarios.
pub fn list_builtin() -> String {
    let mut out = String::new();
    writeln!(out, "problem kinds:").unwrap();
    for (name, desc) in registry::BUILTIN_PROBLEMS {
        writeln!(out, "  {name:<24} {desc}").unwrap();
    }
    writeln!(out, "\nkernels (integral_eq):").unwrap();
    for (name, desc) in registry::BUILTIN_KERNELS {
        writeln!(out, "  {name:<24} {desc}").unwrap();
    }
    writeln!(out, "\nbundled scenarios (scenarios/*.scn):").unwrap();
    for (name, desc) in BUNDLED_SCENARIOS {
        writeln!(out, "  {name:<32} {desc}").unwrap();
    }
    out
}

/// Bundled scenario files and the configuration each one demonstrates.
pub const BUNDLED_SCENARIOS: &[(&str, &str)] = &[
    (
        "halfspaces_03_07.scn",
        "two orthogonal halfspaces drawn 0.3/0.7 from (-1,-1): feasibility follows 1 - 0.3^n - 0.7^n",
    ),
    (
        "halfspaces_certain.scn",
        "degenerate halfspace law: feasible after exactly one step",
    ),
    (
        "lines_beta_pi2.scn",
        "random lines through the origin, beta = pi/2: uniform geometric rate, kappa = 2*beta/(beta - sin beta)",
    ),
    (
        "intervals_eps01.scn",
        "overlapping unit intervals, eps = 0.1: regularity constant diverges, no uniform rate",
    ),
    (
        "disks_rho05.scn",
        "unit disks on a circle, rho = 0.5: feasibility probability arccos((l^2+rho^2-1)/(2*l*rho))/pi",
    ),
    (
        "rotation_quarter.scn",
        "quarter-turn rotation: distance to {0} constant, never feasible",
    ),
    (
        "affine_hyperplanes_r3.scn",
        "two hyperplanes in R^3: iterates converge to the projection of the start onto their line",
    ),
    (
        "two_family_inconsistent.scn",
        "disk projections followed by an anchor projector: anchor reached in one step",
    ),
    (
        "paracontractions_1d.scn",
        "Huber and exponential-prox maps on the line: monotone convergence, no rate claim",
    ),
    (
        "integral_differentiation.scn",
        "cumulative-integration kernel with rhs t^2/2: random row projections recover the derivative",
    ),
];
