//! Chain-level behavior on the worked configurations: Fejér monotonicity,
//! convergence targets, the feasibility dichotomy and rate curves.

use std::f64::consts::PI;

use rfi_core::chain::{run_ensemble, run_trajectory, Problem, StreamKey};
use rfi_core::diagnostics::{
    classify_finite_infinite, empirical_rate, limit_curve_violation, limit_distance_curve,
    Classification,
};
use rfi_core::merit::{rate_bound, ClosedFormFamily};
use rfi_core::operators::OperatorSpec;
use rfi_core::point::Point;
use rfi_core::sampling::{IndexDistribution, InitialLaw, OperatorBuilder, RngStream};
use rfi_core::sets::FixedPointSet;
use rfi_core::MEMBERSHIP_TOL;

fn lines_problem(beta: f64) -> Problem {
    let family =
        IndexDistribution::continuous_uniform(0.0, beta, OperatorBuilder::LineThroughOrigin)
            .unwrap();
    Problem::single_family(family, FixedPointSet::SinglePoint(Point::xy(0.0, 0.0)), 0.5).unwrap()
}

#[test]
fn affine_subspace_limit_is_projection_of_start() {
    // Two hyperplanes in R^3 meeting in a line: the iteration converges to
    // the projection of the start onto the intersection.
    let mut rng = RngStream::new(2211, 0);
    for trial in 0..5 {
        let normal = |rng: &mut RngStream| {
            Point::new(vec![
                rng.standard_normal(),
                rng.standard_normal(),
                rng.standard_normal(),
            ])
        };
        let (u1, u2) = (normal(&mut rng), normal(&mut rng));
        let (b1, b2) = (rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
        let cosangle = u1.dot(&u2) / (u1.norm() * u2.norm());
        if cosangle.abs() > 0.9 {
            continue; // nearly parallel draws make the 500-step budget unfair
        }
        let family = IndexDistribution::finite(
            vec![
                OperatorSpec::AffineHyperplaneProjector {
                    normal: u1.clone(),
                    offset: b1,
                },
                OperatorSpec::AffineHyperplaneProjector {
                    normal: u2.clone(),
                    offset: b2,
                },
            ],
            vec![0.5, 0.5],
        )
        .unwrap();
        let feasible = FixedPointSet::affine_from_hyperplanes(&[(u1, b1), (u2, b2)], 3).unwrap();
        let x0 = Point::new(vec![
            rng.uniform_in(-3.0, 3.0),
            rng.uniform_in(-3.0, 3.0),
            rng.uniform_in(-3.0, 3.0),
        ]);
        let target = feasible.project(&x0).unwrap();
        let problem = Problem::single_family(family, feasible, 0.5).unwrap();
        let traj =
            run_trajectory(&problem, x0, 500, StreamKey::new(1000 + trial, 0), true).unwrap();
        let last = traj.points.as_ref().unwrap().last().unwrap().clone();
        assert!(
            last.dist(&target) <= 1e-6,
            "trial {trial}: final point {:?} vs projection {:?}",
            last,
            target
        );
    }
}

#[test]
fn fejer_monotonicity_for_projector_ensembles() {
    // random ball family around a common feasible ball
    let mut rng = RngStream::new(5150, 0);
    let mut ops = Vec::new();
    for _ in 0..6 {
        let center = Point::xy(rng.uniform_in(-0.3, 0.3), rng.uniform_in(-0.3, 0.3));
        let radius = rng.uniform_in(1.0, 2.0);
        ops.push(OperatorSpec::BallProjector { center, radius });
    }
    let probs = vec![1.0 / 6.0; 6];
    let family = IndexDistribution::finite(ops, probs).unwrap();
    // ball of radius 0.5 at the origin is inside every member set
    let feasible = FixedPointSet::Ball {
        center: Point::xy(0.0, 0.0),
        radius: 0.5,
    };
    let problem = Problem::single_family(family, feasible, 0.5).unwrap();
    let ens = run_ensemble(
        &problem,
        &InitialLaw::UniformBox {
            lo: Point::xy(-8.0, -8.0),
            hi: Point::xy(8.0, 8.0),
        },
        40,
        300,
        7,
        false,
    )
    .unwrap();
    for t in &ens.trajectories {
        for k in 0..ens.steps {
            assert!(
                t.dists[k + 1] <= t.dists[k] + 1e-9,
                "distance increased at step {k}"
            );
        }
    }
    for k in 0..ens.steps {
        assert!(ens.mean_dist[k + 1] <= ens.mean_dist[k] + 1e-9);
    }
}

#[test]
fn lines_rate_stays_below_bound_from_measured_kappa() {
    let beta = PI / 2.0;
    let problem = lines_problem(beta);
    let ens = run_ensemble(
        &problem,
        &InitialLaw::Dirac(Point::xy(1.0, 1.0)),
        60,
        2000,
        99,
        false,
    )
    .unwrap();
    let kappa = ClosedFormFamily::Lines { beta }.kappa().unwrap();
    let r_theory = rate_bound(kappa, 0.5).unwrap();
    let curve = empirical_rate(&ens, Some(r_theory)).unwrap();
    assert!(
        curve.flagged.is_empty(),
        "flagged steps {:?} (bound {r_theory})",
        curve.flagged
    );
    // the chain contracts strictly: mean distance drops by a constant
    // factor every step
    assert!(ens.mean_dist[30] < 1e-1 * ens.mean_dist[0]);
}

#[test]
fn lines_limit_curve_within_distance_bound() {
    let beta = PI / 2.0;
    let problem = lines_problem(beta);
    let k_ref = 200;
    let ens = run_ensemble(
        &problem,
        &InitialLaw::Dirac(Point::xy(1.0, 0.0)),
        k_ref,
        400,
        17,
        true,
    )
    .unwrap();
    let curve = limit_distance_curve(&ens, k_ref).unwrap();
    let slack = 2.0 * ens.mean_dist[k_ref];
    let violation = limit_curve_violation(&curve, &ens.mean_dist, slack + 1e-12);
    assert!(violation <= 0.0, "violation {violation}");
    // tighter form quoted for the early steps
    for (c, m) in curve.iter().zip(&ens.mean_dist).take(151) {
        assert!(*c <= 2.0 * m + 1e-6);
    }
}

#[test]
fn feasibility_dichotomy_on_halfspace_configurations() {
    // mixed law: uncertain at every simulated step
    let family = IndexDistribution::finite(
        vec![
            OperatorSpec::HalfspaceProjector {
                normal: Point::xy(1.0, 0.0),
                offset: 0.0,
            },
            OperatorSpec::HalfspaceProjector {
                normal: Point::xy(0.0, 1.0),
                offset: 0.0,
            },
        ],
        vec![0.3, 0.7],
    )
    .unwrap();
    let feasible =
        FixedPointSet::halfspaces(vec![(Point::xy(1.0, 0.0), 0.0), (Point::xy(0.0, 1.0), 0.0)]);
    let problem = Problem::single_family(family, feasible, 0.5).unwrap();
    let ens = run_ensemble(
        &problem,
        &InitialLaw::Dirac(Point::xy(-1.0, -1.0)),
        10,
        5000,
        41,
        false,
    )
    .unwrap();
    assert_eq!(
        classify_finite_infinite(&ens).unwrap(),
        Classification::NeverCertain
    );
    assert_eq!(ens.feas_frac[1], 0.0);
    for n in 1..=10 {
        assert!(ens.feas_frac[n] < 1.0);
    }

    // certain law: everything feasible from step one on
    let family = IndexDistribution::finite(
        vec![OperatorSpec::HalfspaceProjector {
            normal: Point::xy(1.0, 0.0),
            offset: 0.0,
        }],
        vec![1.0],
    )
    .unwrap();
    let feasible = FixedPointSet::halfspaces(vec![(Point::xy(1.0, 0.0), 0.0)]);
    let problem = Problem::single_family(family, feasible, 0.5).unwrap();
    let ens = run_ensemble(
        &problem,
        &InitialLaw::Dirac(Point::xy(-1.0, -1.0)),
        6,
        2000,
        41,
        false,
    )
    .unwrap();
    assert_eq!(
        classify_finite_infinite(&ens).unwrap(),
        Classification::OneStep
    );
    for n in 1..=6 {
        assert_eq!(ens.feas_frac[n], 1.0);
    }
}

#[test]
fn paracontraction_family_distance_decreases() {
    // Huber and the exponential prox share the fixed point 0; the chain
    // contracts toward it monotonically (no rate target is claimed).
    let family = IndexDistribution::finite(
        vec![
            OperatorSpec::Huber { alpha: 1.0 },
            OperatorSpec::ExpQuasiconvexProx,
        ],
        vec![0.5, 0.5],
    )
    .unwrap();
    let problem =
        Problem::single_family(family, FixedPointSet::SinglePoint(Point::scalar(0.0)), 0.5)
            .unwrap();
    let ens = run_ensemble(
        &problem,
        &InitialLaw::UniformBox {
            lo: Point::scalar(-6.0),
            hi: Point::scalar(6.0),
        },
        50,
        200,
        23,
        false,
    )
    .unwrap();
    for t in &ens.trajectories {
        for k in 0..ens.steps {
            assert!(t.dists[k + 1] <= t.dists[k] + 1e-12);
        }
    }
    assert!(ens.mean_dist[50] < 0.05 * ens.mean_dist[0]);
}

#[test]
fn ensemble_hit_flags_respect_membership_tolerance() {
    let problem = lines_problem(PI / 2.0);
    let ens = run_ensemble(
        &problem,
        &InitialLaw::Dirac(Point::xy(1.0, 1.0)),
        80,
        100,
        3,
        false,
    )
    .unwrap();
    for t in &ens.trajectories {
        if let Some(h) = t.hit {
            assert!(t.dists[h] <= MEMBERSHIP_TOL);
            if h > 0 {
                assert!(t.dists[h - 1] > MEMBERSHIP_TOL);
            }
        }
    }
}
