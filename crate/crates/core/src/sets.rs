//! Feasible sets with exact distance and nearest-point computations.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::MEMBERSHIP_TOL;

type DistFn = dyn Fn(&Point) -> f64 + Send + Sync;
type ProjectFn = dyn Fn(&Point) -> Point + Send + Sync;

/// A closed convex set `C` with an exact distance function.
///
/// All built-in variants also expose the nearest point, which the
/// regularity and paracontraction checks use for probe construction.
#[derive(Clone)]
pub enum FixedPointSet {
    SinglePoint(Point),
    Ball {
        center: Point,
        radius: f64,
    },
    /// Axis-aligned box; bounds may be +/- infinity.
    Box {
        lo: Point,
        hi: Point,
    },
    /// `base + span{directions}` with orthonormal `directions`.
    AffineSubspace {
        base: Point,
        directions: Vec<Point>,
    },
    /// Intersection of halfspaces `{x : <normal, x> >= offset}`.
    HalfspaceIntersection {
        constraints: Vec<(Point, f64)>,
        /// normals pairwise orthogonal; enables the separable fast path
        orthogonal: bool,
    },
    /// Caller-provided distance; nearest point optional.
    Custom {
        dist: Arc<DistFn>,
        project: Option<Arc<ProjectFn>>,
    },
}

impl fmt::Debug for FixedPointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointSet::SinglePoint(p) => write!(f, "SinglePoint({p:?})"),
            FixedPointSet::Ball { center, radius } => {
                write!(f, "Ball {{ center: {center:?}, radius: {radius} }}")
            }
            FixedPointSet::Box { lo, hi } => write!(f, "Box {{ lo: {lo:?}, hi: {hi:?} }}"),
            FixedPointSet::AffineSubspace { base, directions } => write!(
                f,
                "AffineSubspace {{ base: {base:?}, dim: {} }}",
                directions.len()
            ),
            FixedPointSet::HalfspaceIntersection { constraints, .. } => {
                write!(
                    f,
                    "HalfspaceIntersection({} constraints)",
                    constraints.len()
                )
            }
            FixedPointSet::Custom { project, .. } => {
                write!(f, "Custom {{ project: {} }}", project.is_some())
            }
        }
    }
}

impl FixedPointSet {
    pub fn halfspaces(constraints: Vec<(Point, f64)>) -> Self {
        let orthogonal = constraints.iter().enumerate().all(|(i, (a, _))| {
            constraints[i + 1..]
                .iter()
                .all(|(b, _)| a.dot(b).abs() <= 1e-12 * a.norm() * b.norm())
        });
        FixedPointSet::HalfspaceIntersection {
            constraints,
            orthogonal,
        }
    }

    /// Affine subspace `{x : <u_i, x> = b_i}` from a list of hyperplanes.
    ///
    /// Uses the minimum-norm particular solution and an orthonormal basis of
    /// the common null space.
    pub fn affine_from_hyperplanes(hyperplanes: &[(Point, f64)], dim: usize) -> Result<Self> {
        if hyperplanes.is_empty() {
            return Err(Error::Config("no hyperplanes given".into()));
        }
        let m = hyperplanes.len();
        let a = DMatrix::from_fn(m, dim, |i, j| hyperplanes[i].0[j]);
        let b = DVector::from_fn(m, |i, _| hyperplanes[i].1);
        let svd = a.clone().svd(true, true);
        let base = svd
            .solve(&b, 1e-12)
            .map_err(|e| Error::Solver(e.to_string()))?;
        let residual = (&a * &base - &b).norm();
        if residual > 1e-9 {
            return Err(Error::Config("hyperplanes have empty intersection".into()));
        }
        // Null-space basis from the eigendecomposition of A^T A: eigenvectors
        // with negligible eigenvalue span the common direction space.
        let gram = a.transpose() * &a;
        let eig = gram.symmetric_eigen();
        let max_ev = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-10 * max_ev.max(1.0);
        let mut directions = Vec::new();
        for j in 0..dim {
            if eig.eigenvalues[j] <= tol {
                directions.push(Point::new(
                    eig.eigenvectors.column(j).iter().cloned().collect(),
                ));
            }
        }
        Ok(FixedPointSet::AffineSubspace {
            base: Point::new(base.iter().cloned().collect()),
            directions,
        })
    }

    /// Euclidean distance from `x` to the set. Exact for all built-in variants.
    pub fn dist(&self, x: &Point) -> f64 {
        match self {
            FixedPointSet::Custom { dist, .. } => dist(x),
            _ => self
                .project(x)
                .map(|p| p.dist(x))
                .expect("built-in sets always project"),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.dist(x) <= MEMBERSHIP_TOL
    }

    /// Nearest point of the set, when computable.
    pub fn project(&self, x: &Point) -> Option<Point> {
        match self {
            FixedPointSet::SinglePoint(p) => Some(p.clone()),
            FixedPointSet::Ball { center, radius } => {
                let d = x.sub(center);
                let n = d.norm();
                if n <= *radius {
                    Some(x.clone())
                } else {
                    Some(center.axpy(*radius / n, &d))
                }
            }
            FixedPointSet::Box { lo, hi } => Some(Point::new(
                x.as_slice()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c.clamp(lo[j], hi[j]))
                    .collect(),
            )),
            FixedPointSet::AffineSubspace { base, directions } => {
                let d = x.sub(base);
                let mut p = base.clone();
                for dir in directions {
                    p = p.axpy(d.dot(dir), dir);
                }
                Some(p)
            }
            FixedPointSet::HalfspaceIntersection {
                constraints,
                orthogonal,
            } => Some(project_polyhedron(x, constraints, *orthogonal)),
            FixedPointSet::Custom { project, .. } => project.as_ref().map(|p| p(x)),
        }
    }

    /// Probe points of the set used by the sampled paracontraction check:
    /// the nearest point plus, for balls and boxes, the nearest extreme point.
    pub fn probes_for(&self, x: &Point) -> Vec<Point> {
        let mut probes = Vec::new();
        if let Some(p) = self.project(x) {
            probes.push(p);
        }
        match self {
            FixedPointSet::Ball { center, radius } => {
                let d = x.sub(center);
                let n = d.norm();
                if n > 0.0 {
                    probes.push(center.axpy(*radius / n, &d));
                }
            }
            FixedPointSet::Box { lo, hi } => {
                let vertex: Vec<f64> = x
                    .as_slice()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        if (c - lo[j]).abs() <= (c - hi[j]).abs() {
                            lo[j]
                        } else {
                            hi[j]
                        }
                    })
                    .collect();
                if vertex.iter().all(|v| v.is_finite()) {
                    probes.push(Point::new(vertex));
                }
            }
            _ => {}
        }
        probes.dedup_by(|a, b| a.dist(b) <= 1e-15);
        probes
    }
}

/// Exact projection onto `{z : <a_i, z> >= b_i for all i}`.
///
/// Orthogonal normals decouple the constraints. The general case
/// enumerates active sets and solves the KKT system for each candidate;
/// that is exact for the small constraint counts used here.
fn project_polyhedron(x: &Point, constraints: &[(Point, f64)], orthogonal: bool) -> Point {
    let feasible = constraints
        .iter()
        .all(|(a, b)| a.dot(x) >= *b - 1e-14 * (1.0 + b.abs()));
    if feasible {
        return x.clone();
    }
    if orthogonal {
        let mut p = x.clone();
        for (a, b) in constraints {
            let deficit = b - a.dot(&p);
            if deficit > 0.0 {
                p = p.axpy(deficit / a.norm_sq(), a);
            }
        }
        return p;
    }

    let k = constraints.len();
    let mut best: Option<(f64, Point)> = None;
    for mask in 1u32..(1 << k) {
        let active: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let m = active.len();
        let gram = DMatrix::from_fn(m, m, |i, j| {
            constraints[active[i]].0.dot(&constraints[active[j]].0)
        });
        let rhs = DVector::from_fn(m, |i, _| {
            constraints[active[i]].1 - constraints[active[i]].0.dot(x)
        });
        let Some(lambda) = gram.lu().solve(&rhs) else {
            continue; // linearly dependent active set; some independent subset covers it
        };
        if lambda.iter().any(|&l| l < -1e-10) {
            continue;
        }
        let mut z = x.clone();
        for (idx, &ai) in active.iter().enumerate() {
            z = z.axpy(lambda[idx], &constraints[ai].0);
        }
        let ok = constraints
            .iter()
            .all(|(a, b)| a.dot(&z) >= *b - 1e-9 * (1.0 + b.abs()));
        if !ok {
            continue;
        }
        let d = z.dist(x);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, z));
        }
    }
    best.expect("nonempty polyhedron admits a projection").1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant() -> FixedPointSet {
        FixedPointSet::halfspaces(vec![(Point::xy(1.0, 0.0), 0.0), (Point::xy(0.0, 1.0), 0.0)])
    }

    #[test]
    fn quadrant_distance_is_clamp_distance() {
        let c = quadrant();
        assert_eq!(c.dist(&Point::xy(1.0, 2.0)), 0.0);
        assert!((c.dist(&Point::xy(-1.0, -1.0)) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((c.dist(&Point::xy(-3.0, 5.0)) - 3.0).abs() < 1e-15);
        assert_eq!(
            c.project(&Point::xy(-1.0, -1.0)).unwrap(),
            Point::xy(0.0, 0.0)
        );
    }

    #[test]
    fn general_polyhedron_matches_hand_solution() {
        // {x1 >= 0} and {x1 + x2 >= 1}: non-orthogonal pair.
        let c = FixedPointSet::HalfspaceIntersection {
            constraints: vec![(Point::xy(1.0, 0.0), 0.0), (Point::xy(1.0, 1.0), 1.0)],
            orthogonal: false,
        };
        // From (-1, 0): projection onto the second plane alone gives (0, 1),
        // which is feasible; that is the true projection.
        let p = c.project(&Point::xy(-1.0, 0.0)).unwrap();
        assert!(p.dist(&Point::xy(0.0, 1.0)) < 1e-10);
        // From (0.25, 0.25) only the sum constraint is violated.
        let p = c.project(&Point::xy(0.25, 0.25)).unwrap();
        assert!(p.dist(&Point::xy(0.5, 0.5)) < 1e-12);
    }

    #[test]
    fn ball_and_box_projections() {
        let ball = FixedPointSet::Ball {
            center: Point::xy(0.0, 0.0),
            radius: 1.0,
        };
        assert!((ball.dist(&Point::xy(2.0, 0.0)) - 1.0).abs() < 1e-15);
        let b = FixedPointSet::Box {
            lo: Point::xy(0.0, 0.0),
            hi: Point::xy(1.0, 1.0),
        };
        assert!((b.dist(&Point::xy(2.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((b.dist(&Point::xy(2.0, 2.0)) - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn affine_from_two_planes_in_r3() {
        // x + y = 1 and y + z = 1 meet in a line through (e.g.) (0, 1, 0).
        let set = FixedPointSet::affine_from_hyperplanes(
            &[
                (Point::new(vec![1.0, 1.0, 0.0]), 1.0),
                (Point::new(vec![0.0, 1.0, 1.0]), 1.0),
            ],
            3,
        )
        .unwrap();
        let FixedPointSet::AffineSubspace { ref directions, .. } = set else {
            panic!("expected affine subspace");
        };
        assert_eq!(directions.len(), 1);
        // Members at distance zero, and projections satisfy both equations.
        assert!(set.dist(&Point::new(vec![0.0, 1.0, 0.0])) < 1e-10);
        let p = set.project(&Point::new(vec![3.0, -2.0, 5.0])).unwrap();
        assert!((p[0] + p[1] - 1.0).abs() < 1e-10);
        assert!((p[1] + p[2] - 1.0).abs() < 1e-10);
    }
}
