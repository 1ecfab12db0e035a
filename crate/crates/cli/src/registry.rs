//! Maps scenario problem kinds onto concrete operator families, exact
//! feasible sets, closed-form quantities and probe grids.

use std::f64::consts::{PI, TAU};

use rfi_core::chain::Problem;
use rfi_core::merit::ClosedFormFamily;
use rfi_core::operators::OperatorSpec;
use rfi_core::point::Point;
use rfi_core::sampling::{IndexDistribution, OperatorBuilder};
use rfi_core::sets::FixedPointSet;

use crate::config::ConfigError;
use crate::scenario::ProblemKind;

/// Everything the runner needs to know about a problem kind beyond the raw
/// chain: closed forms for reports and assertion targets.
pub struct ProblemBundle {
    pub problem: Problem,
    pub closed_form: Option<ClosedFormFamily>,
    /// Exact smallest regularity constant, when one exists.
    pub kappa_theory: Option<f64>,
    /// Closed-form probability that `X_n` is feasible, per step.
    pub feas_law: Option<fn(&ProblemKind, usize) -> f64>,
    /// Closed-form feasibility probability for a probe `(lambda, 0)`.
    pub feas_prob_closed: Option<fn(&ProblemKind, f64) -> f64>,
}

pub fn build_problem(kind: &ProblemKind) -> Result<ProblemBundle, ConfigError> {
    let to_cfg = |e: rfi_core::Error| ConfigError::new(e.to_string());
    match kind {
        ProblemKind::Halfspaces { p1 } => {
            let ops = vec![
                OperatorSpec::HalfspaceProjector {
                    normal: Point::xy(1.0, 0.0),
                    offset: 0.0,
                },
                OperatorSpec::HalfspaceProjector {
                    normal: Point::xy(0.0, 1.0),
                    offset: 0.0,
                },
            ];
            // indices of probability zero do not contribute to the
            // consistent set; drop them so the feasible set matches the law
            let (ops, probs, feasible) = if *p1 == 1.0 {
                (
                    vec![ops[0].clone()],
                    vec![1.0],
                    FixedPointSet::halfspaces(vec![(Point::xy(1.0, 0.0), 0.0)]),
                )
            } else if *p1 == 0.0 {
                (
                    vec![ops[1].clone()],
                    vec![1.0],
                    FixedPointSet::halfspaces(vec![(Point::xy(0.0, 1.0), 0.0)]),
                )
            } else {
                (
                    ops,
                    vec![*p1, 1.0 - *p1],
                    FixedPointSet::halfspaces(vec![
                        (Point::xy(1.0, 0.0), 0.0),
                        (Point::xy(0.0, 1.0), 0.0),
                    ]),
                )
            };
            let family = IndexDistribution::finite(ops, probs).map_err(to_cfg)?;
            let problem = Problem::single_family(family, feasible, 0.5).map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: None,
                kappa_theory: None,
                feas_law: Some(|kind, n| {
                    let ProblemKind::Halfspaces { p1 } = kind else {
                        unreachable!()
                    };
                    if *p1 == 0.0 || *p1 == 1.0 {
                        if n >= 1 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        1.0 - p1.powi(n as i32) - (1.0 - p1).powi(n as i32)
                    }
                }),
                feas_prob_closed: None,
            })
        }
        ProblemKind::Lines { beta } => {
            let family = IndexDistribution::continuous_uniform(
                0.0,
                *beta,
                OperatorBuilder::LineThroughOrigin,
            )
            .map_err(to_cfg)?;
            let problem = Problem::single_family(
                family,
                FixedPointSet::SinglePoint(Point::xy(0.0, 0.0)),
                0.5,
            )
            .map_err(to_cfg)?;
            let closed = ClosedFormFamily::Lines { beta: *beta };
            Ok(ProblemBundle {
                problem,
                kappa_theory: closed.kappa(),
                closed_form: Some(closed),
                feas_law: None,
                feas_prob_closed: None,
            })
        }
        ProblemKind::Intervals { eps } => {
            let family = IndexDistribution::continuous_uniform(
                eps - 0.5,
                0.5 - eps,
                OperatorBuilder::UnitIntervalCenter,
            )
            .map_err(to_cfg)?;
            let feasible = FixedPointSet::Box {
                lo: Point::scalar(-eps),
                hi: Point::scalar(*eps),
            };
            let problem = Problem::single_family(family, feasible, 0.5).map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: Some(ClosedFormFamily::Intervals { eps: *eps }),
                kappa_theory: None, // no finite constant exists
                feas_law: None,
                feas_prob_closed: None,
            })
        }
        ProblemKind::Disks { rho } => {
            let family = IndexDistribution::continuous_uniform(
                0.0,
                TAU,
                OperatorBuilder::DiskOnCircle {
                    rho: *rho,
                    radius: 1.0,
                },
            )
            .map_err(to_cfg)?;
            let feasible = FixedPointSet::Ball {
                center: Point::xy(0.0, 0.0),
                radius: 1.0 - rho,
            };
            let problem = Problem::single_family(family, feasible, 0.5).map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: None,
                kappa_theory: None, // regularity fails for 0 < rho < 1
                feas_law: None,
                feas_prob_closed: Some(|kind, lambda| {
                    let ProblemKind::Disks { rho } = kind else {
                        unreachable!()
                    };
                    disk_feasibility_closed_form(*rho, lambda)
                }),
            })
        }
        ProblemKind::Rotation { phi } => {
            let family =
                IndexDistribution::finite(vec![OperatorSpec::Rotation { angle: *phi }], vec![1.0])
                    .map_err(to_cfg)?;
            let problem = Problem::single_family(
                family,
                FixedPointSet::SinglePoint(Point::xy(0.0, 0.0)),
                0.5,
            )
            .map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: None,
                kappa_theory: None,
                feas_law: None,
                feas_prob_closed: None,
            })
        }
        ProblemKind::AffineHyperplanes3 {
            normal1,
            offset1,
            normal2,
            offset2,
        } => {
            let family = IndexDistribution::finite(
                vec![
                    OperatorSpec::AffineHyperplaneProjector {
                        normal: normal1.clone(),
                        offset: *offset1,
                    },
                    OperatorSpec::AffineHyperplaneProjector {
                        normal: normal2.clone(),
                        offset: *offset2,
                    },
                ],
                vec![0.5, 0.5],
            )
            .map_err(to_cfg)?;
            let feasible = FixedPointSet::affine_from_hyperplanes(
                &[(normal1.clone(), *offset1), (normal2.clone(), *offset2)],
                3,
            )
            .map_err(to_cfg)?;
            let problem = Problem::single_family(family, feasible, 0.5).map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: None,
                kappa_theory: None,
                feas_law: None,
                feas_prob_closed: None,
            })
        }
        ProblemKind::TwoFamilyDisksPoint { rho, anchor } => {
            let family = IndexDistribution::continuous_uniform(
                0.0,
                TAU,
                OperatorBuilder::DiskOnCircle {
                    rho: *rho,
                    radius: 1.0,
                },
            )
            .map_err(to_cfg)?;
            let second = IndexDistribution::finite(
                vec![OperatorSpec::PointProjector {
                    anchor: anchor.clone(),
                }],
                vec![1.0],
            )
            .map_err(to_cfg)?;
            let feasible = FixedPointSet::SinglePoint(anchor.clone());
            let problem = Problem::new(family, Some(second), feasible, 0.5).map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: None,
                kappa_theory: None,
                feas_law: None,
                feas_prob_closed: None,
            })
        }
        ProblemKind::Paracontractions1d { huber_alpha } => {
            let family = IndexDistribution::finite(
                vec![
                    OperatorSpec::Huber {
                        alpha: *huber_alpha,
                    },
                    OperatorSpec::ExpQuasiconvexProx,
                ],
                vec![0.5, 0.5],
            )
            .map_err(to_cfg)?;
            let problem =
                Problem::single_family(family, FixedPointSet::SinglePoint(Point::scalar(0.0)), 0.5)
                    .map_err(to_cfg)?;
            Ok(ProblemBundle {
                problem,
                closed_form: None,
                kappa_theory: None,
                feas_law: None,
                feas_prob_closed: None,
            })
        }
        ProblemKind::IntegralEq { .. } => Err(ConfigError::new(
            "integral_eq scenarios are run by the sweep solver, not the chain",
        )),
    }
}

/// `P(x(lambda) is feasible for a random disk)` with unit disks centered on
/// the circle of radius `rho`: `arccos((l^2 + rho^2 - 1)/(2 l rho)) / pi`,
/// clamped to the certain/impossible regimes outside the arccos domain.
pub fn disk_feasibility_closed_form(rho: f64, lambda: f64) -> f64 {
    let arg = (lambda * lambda + rho * rho - 1.0) / (2.0 * lambda * rho);
    if arg <= -1.0 {
        1.0
    } else if arg >= 1.0 {
        0.0
    } else {
        arg.acos() / PI
    }
}

/// Probe grid for the regularity sweep, per kind.
pub fn regularity_probes(kind: &ProblemKind, count: usize) -> Vec<Point> {
    match kind {
        ProblemKind::Lines { .. } => (0..count)
            .map(|i| {
                let t = TAU * i as f64 / count as f64;
                Point::xy(t.cos(), t.sin())
            })
            .collect(),
        ProblemKind::Intervals { eps } => (1..=20)
            .map(|j| Point::scalar(eps + 0.5f64.powi(j)))
            .collect(),
        _ => Vec::new(),
    }
}

/// Probes on circles of the given radii, used by the gradient-domination
/// check.
pub fn circle_probes(radii: &[f64], per_circle: usize) -> Vec<Point> {
    let mut probes = Vec::new();
    for &r in radii {
        for i in 0..per_circle {
            let t = TAU * i as f64 / per_circle as f64;
            probes.push(Point::xy(r * t.cos(), r * t.sin()));
        }
    }
    probes
}

/// One-line descriptions of the built-in problem kinds for `list`.
pub const BUILTIN_PROBLEMS: &[(&str, &str)] = &[
    (
        "halfspaces",
        "two orthogonal halfspace projectors drawn with probabilities (p1, 1-p1); \
         feasibility probability follows 1 - p1^n - (1-p1)^n",
    ),
    (
        "lines",
        "projectors onto random lines through the origin, angle uniform on [0, beta]; \
         uniformly geometric with kappa = 2*beta/(beta - sin(beta))",
    ),
    (
        "intervals",
        "projectors onto overlapping unit intervals; regularity fails near the \
         boundary of [-eps, eps], so no uniform geometric rate exists",
    ),
    (
        "disks",
        "projectors onto unit disks centered on a circle of radius rho; feasibility \
         probability of boundary points tends to one, defeating any uniform bound",
    ),
    (
        "rotation",
        "a fixed rotation: nonexpansive but not paracontractive; never approaches \
         the fixed point set {0}",
    ),
    (
        "affine_hyperplanes_3d",
        "random projections onto two hyperplanes meeting in a line; the iteration \
         converges to the projection of the start onto the intersection",
    ),
    (
        "two_family_disks_point",
        "disk projections composed with a single-point projector: the anchor is \
         reached after one step even though the family sets never intersect",
    ),
    (
        "paracontractions_1d",
        "Huber map and exponential prox on the line: paracontractive, not averaged; \
         converges without a quantitative rate target",
    ),
    (
        "integral_eq",
        "first-kind integral equation discretized on a uniform grid and solved by \
         uniformly random row projections",
    ),
];

/// One-line descriptions of the built-in kernels for `list`.
pub const BUILTIN_KERNELS: &[(&str, &str)] = &[
    (
        "indicator",
        "cumulative-integration kernel 1_{[a,t]}(s); solving recovers the derivative \
         of the right-hand side",
    ),
    ("product_ts", "separable kernel t*s"),
    ("gaussian_kernel", "narrow Gaussian smoothing kernel"),
];
