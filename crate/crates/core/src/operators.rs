//! The operator families `{T_i}`: closed-form application, fixed-point
//! residuals and sampled verification of the operator-class inequalities.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integral_eq::DiscreteL2Problem;
use crate::point::Point;
use crate::sets::FixedPointSet;
use crate::MEMBERSHIP_TOL;

/// One member of an operator family, applied by closed form.
#[derive(Clone, Debug)]
pub enum OperatorSpec {
    /// Projector onto the interval `[center - 1/2, center + 1/2]` (1-D).
    IntervalProjector { center: f64 },
    /// Projector onto the line through the origin at `angle` (2-D).
    LineProjector { angle: f64 },
    /// Projector onto a closed ball.
    BallProjector { center: Point, radius: f64 },
    /// Projector onto `{x : <normal, x> >= offset}`.
    HalfspaceProjector { normal: Point, offset: f64 },
    /// Projector onto `{x : <normal, x> = offset}`.
    AffineHyperplaneProjector { normal: Point, offset: f64 },
    /// Projector onto a single point (constant map).
    PointProjector { anchor: Point },
    /// Rotation by `angle` around the origin (2-D). Nonexpansive, not averaged.
    Rotation { angle: f64 },
    /// The Huber function with parameter `alpha > 0` as a map on the line:
    /// `x^2 / (2 alpha)` for `|x| <= alpha`, `|x| - alpha/2` beyond.
    /// Nonexpansive and paracontractive, not averaged.
    Huber { alpha: f64 },
    /// Proximal map of `x -> 1 - exp(-|x|^2)`: paracontractive but neither
    /// averaged nor nonexpansive. Evaluated by radial root finding.
    ExpQuasiconvexProx,
    /// Projector onto one row constraint of a discretized operator equation.
    RowProjector {
        problem: Arc<DiscreteL2Problem>,
        row: usize,
    },
}

/// Class membership booleans carried as metadata next to a spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassFlags {
    pub nonexpansive: bool,
    pub paracontractive: bool,
    pub averaged: bool,
}

impl OperatorSpec {
    pub fn is_projector(&self) -> bool {
        !matches!(
            self,
            OperatorSpec::Rotation { .. }
                | OperatorSpec::Huber { .. }
                | OperatorSpec::ExpQuasiconvexProx
        )
    }

    /// The averagedness constant: `1/2` for every projector, absent otherwise.
    pub fn averaged_constant(&self) -> Option<f64> {
        if self.is_projector() {
            Some(0.5)
        } else {
            None
        }
    }

    pub fn class_flags(&self) -> ClassFlags {
        match self {
            OperatorSpec::Rotation { .. } => ClassFlags {
                nonexpansive: true,
                paracontractive: false,
                averaged: false,
            },
            OperatorSpec::Huber { .. } => ClassFlags {
                nonexpansive: true,
                paracontractive: true,
                averaged: false,
            },
            OperatorSpec::ExpQuasiconvexProx => ClassFlags {
                nonexpansive: false,
                paracontractive: true,
                averaged: false,
            },
            _ => ClassFlags {
                nonexpansive: true,
                paracontractive: true,
                averaged: true,
            },
        }
    }

    /// Expected input dimension; `None` means any dimension.
    pub fn expected_dim(&self) -> Option<usize> {
        match self {
            OperatorSpec::IntervalProjector { .. } | OperatorSpec::Huber { .. } => Some(1),
            OperatorSpec::LineProjector { .. } | OperatorSpec::Rotation { .. } => Some(2),
            OperatorSpec::BallProjector { center, .. } => Some(center.dim()),
            OperatorSpec::HalfspaceProjector { normal, .. }
            | OperatorSpec::AffineHyperplaneProjector { normal, .. } => Some(normal.dim()),
            OperatorSpec::PointProjector { anchor } => Some(anchor.dim()),
            OperatorSpec::ExpQuasiconvexProx => None,
            OperatorSpec::RowProjector { problem, .. } => Some(problem.nodes()),
        }
    }

    fn check_input(&self, x: &Point) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Numeric(format!("non-finite input point {x:?}")));
        }
        if let Some(d) = self.expected_dim() {
            if x.dim() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: x.dim(),
                });
            }
        }
        Ok(())
    }
}

/// Apply `T_i` to `x` by the variant's closed form.
pub fn apply(op: &OperatorSpec, x: &Point) -> Result<Point> {
    op.check_input(x)?;
    Ok(match op {
        OperatorSpec::IntervalProjector { center } => {
            Point::scalar(x[0].clamp(center - 0.5, center + 0.5))
        }
        OperatorSpec::LineProjector { angle } => {
            // x minus its component along the line's unit normal
            let n = Point::xy(angle.sin(), -angle.cos());
            x.axpy(-n.dot(x), &n)
        }
        OperatorSpec::BallProjector { center, radius } => {
            let d = x.sub(center);
            let norm = d.norm();
            if norm <= *radius {
                x.clone()
            } else {
                center.axpy(*radius / norm, &d)
            }
        }
        OperatorSpec::HalfspaceProjector { normal, offset } => {
            let slack = normal.dot(x) - offset;
            if slack >= 0.0 {
                x.clone()
            } else {
                x.axpy(-slack / normal.norm_sq(), normal)
            }
        }
        OperatorSpec::AffineHyperplaneProjector { normal, offset } => {
            x.axpy((offset - normal.dot(x)) / normal.norm_sq(), normal)
        }
        OperatorSpec::PointProjector { anchor } => anchor.clone(),
        OperatorSpec::Rotation { angle } => {
            let (s, c) = angle.sin_cos();
            Point::xy(c * x[0] - s * x[1], s * x[0] + c * x[1])
        }
        OperatorSpec::Huber { alpha } => {
            let v = x[0];
            if v.abs() <= *alpha {
                Point::scalar(v * v / (2.0 * alpha))
            } else {
                Point::scalar(v.abs() - alpha / 2.0)
            }
        }
        OperatorSpec::ExpQuasiconvexProx => {
            let s = x.norm();
            if s == 0.0 {
                return Ok(x.clone());
            }
            let rho = solve_exp_prox_radius(s)?;
            x.scale(rho / s)
        }
        OperatorSpec::RowProjector { problem, row } => problem.project_row(*row, x)?,
    })
}

/// Unique `rho >= 0` with `(1 + 2 exp(-rho^2)) rho = s`.
///
/// The left-hand side is strictly increasing (its derivative is bounded
/// below by `1 - 4 exp(-3/2) > 0.1`), so a safeguarded Newton iteration on
/// the bracket `[0, s]` converges to the single root.
pub fn solve_exp_prox_radius(s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Numeric(format!("prox radius argument {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let f = |r: f64| (1.0 + 2.0 * (-r * r).exp()) * r - s;
    let fp = |r: f64| 1.0 + 2.0 * (-r * r).exp() * (1.0 - 2.0 * r * r);
    let (mut lo, mut hi) = (0.0f64, s);
    let mut r = s / (1.0 + 2.0 * (-s * s).exp());
    for _ in 0..200 {
        let val = f(r);
        if val.abs() <= 1e-12 {
            return Ok(r);
        }
        if val > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let step = val / fp(r);
        let mut next = r - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        r = next;
    }
    Err(Error::Solver(format!(
        "prox radius iteration did not reach 1e-12 for s = {s}"
    )))
}

/// `|| x - T x ||`; zero exactly on `Fix T`.
pub fn fixed_point_residual(op: &OperatorSpec, x: &Point) -> Result<f64> {
    Ok(apply(op, x)?.dist(x))
}

/// Result of checking the averagedness inequality on supplied pairs.
#[derive(Clone, Debug)]
pub struct AveragedReport {
    pub pair_pass: Vec<bool>,
    /// Largest value of `lhs - rhs` over the pairs (positive means violated).
    pub worst_violation: f64,
}

impl AveragedReport {
    pub fn all_pass(&self) -> bool {
        self.pair_pass.iter().all(|&p| p)
    }
}

/// Check `||Tx - Ty||^2 + ((1-a)/a) ||(x - Tx) - (y - Ty)||^2 <= ||x - y||^2`
/// on each pair, with slack `1e-9`.
pub fn verify_averaged_sampled(
    op: &OperatorSpec,
    alpha: f64,
    pairs: &[(Point, Point)],
) -> Result<AveragedReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    if pairs.is_empty() {
        return Err(Error::Config("no pairs supplied".into()));
    }
    let ratio = (1.0 - alpha) / alpha;
    let mut pair_pass = Vec::with_capacity(pairs.len());
    let mut worst = f64::NEG_INFINITY;
    for (x, y) in pairs {
        let tx = apply(op, x)?;
        let ty = apply(op, y)?;
        let lhs = tx.dist(&ty).powi(2) + ratio * x.sub(&tx).sub(&y.sub(&ty)).norm_sq();
        let rhs = x.dist(y).powi(2);
        let violation = lhs - rhs;
        worst = worst.max(violation);
        pair_pass.push(violation <= 1e-9);
    }
    Ok(AveragedReport {
        pair_pass,
        worst_violation: worst,
    })
}

/// Result of the sampled strict-contraction check toward a fixed-point set.
#[derive(Clone, Debug)]
pub struct ParacontractionReport {
    /// `(sample index, min over probes of d(x,y) - d(Tx,y))`
    pub margins: Vec<(usize, f64)>,
    pub min_margin: f64,
    pub skipped_inside: usize,
}

/// For every sample outside `fix`, check `d(Tx, y) < d(x, y)` against the
/// probe points of `fix` and report margins. Strictness is reported, not
/// asserted: margins vanish as samples approach the fixed-point set.
pub fn verify_paracontraction_sampled(
    op: &OperatorSpec,
    fix: &FixedPointSet,
    samples: &[Point],
) -> Result<ParacontractionReport> {
    let mut margins = Vec::new();
    let mut skipped = 0usize;
    let mut min_margin = f64::INFINITY;
    for (i, x) in samples.iter().enumerate() {
        if fix.dist(x) <= MEMBERSHIP_TOL {
            skipped += 1;
            continue;
        }
        let tx = apply(op, x)?;
        let probes = fix.probes_for(x);
        if probes.is_empty() {
            return Err(Error::UnsupportedOperator(
                "fixed-point set provides no probe points".into(),
            ));
        }
        let margin = probes
            .iter()
            .map(|y| x.dist(y) - tx.dist(y))
            .fold(f64::INFINITY, f64::min);
        min_margin = min_margin.min(margin);
        margins.push((i, margin));
    }
    Ok(ParacontractionReport {
        margins,
        min_margin,
        skipped_inside: skipped,
    })
}
