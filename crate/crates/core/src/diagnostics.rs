//! Ensemble post-processing: empirical rates, feasibility probabilities,
//! finite-vs-infinite classification, one-dimensional Wasserstein distances
//! and limit-proxy curves.

use crate::chain::Ensemble;
use crate::error::{Error, Result};
use crate::operators::fixed_point_residual;
use crate::point::Point;
use crate::sampling::{sample_index, IndexDistribution, RngStream};
use crate::MEMBERSHIP_TOL;

/// Denominators below this floor end the ratio sequence (fully converged).
const RATIO_FLOOR: f64 = 1e-12;

/// Per-step contraction ratios of the mean distance curve.
#[derive(Clone, Debug)]
pub struct RateCurve {
    pub mean_dist: Vec<f64>,
    /// `ratios[k] = mean_dist[k+1] / mean_dist[k]` while the denominator
    /// stays above the floor.
    pub ratios: Vec<f64>,
    pub r_theory: Option<f64>,
    /// Steps whose ratio exceeds `r_theory` by more than three propagated
    /// standard errors while `mean_dist[k] > 100 * MEMBERSHIP_TOL`.
    pub flagged: Vec<usize>,
}

pub fn empirical_rate(ensemble: &Ensemble, r_theory: Option<f64>) -> Result<RateCurve> {
    if ensemble.steps < 2 {
        return Err(Error::Config("rate curve needs at least 2 steps".into()));
    }
    if ensemble.mean_dist[0] <= MEMBERSHIP_TOL {
        return Err(Error::Degenerate(
            "ensemble starts feasible; no rate to measure".into(),
        ));
    }
    let mut ratios = Vec::new();
    let mut flagged = Vec::new();
    for k in 0..ensemble.steps {
        let denom = ensemble.mean_dist[k];
        if denom <= RATIO_FLOOR {
            break;
        }
        let ratio = ensemble.mean_dist[k + 1] / denom;
        ratios.push(ratio);
        if let Some(r) = r_theory {
            if denom > 100.0 * MEMBERSHIP_TOL {
                // delta-method error of the ratio, ignoring the (positive)
                // correlation between consecutive means, hence conservative
                let se = ((ensemble.dist_se[k + 1].powi(2)
                    + ratio * ratio * ensemble.dist_se[k].powi(2))
                .sqrt())
                    / denom;
                if ratio > r + 3.0 * se {
                    flagged.push(k);
                }
            }
        }
    }
    Ok(RateCurve {
        mean_dist: ensemble.mean_dist.clone(),
        ratios,
        r_theory,
        flagged,
    })
}

/// Estimated probability that a fixed point is feasible for a random index.
#[derive(Clone, Debug)]
pub struct FeasProbReport {
    pub probe: Point,
    pub p_hat: f64,
    pub std_error: f64,
    pub closed_form: Option<f64>,
}

/// Fraction of `n` index draws whose operator fixes `x` (residual within
/// the membership tolerance), with the binomial standard error.
pub fn feasibility_probability(
    family: &IndexDistribution,
    x: &Point,
    n: usize,
    rng: &mut RngStream,
) -> Result<FeasProbReport> {
    if n < 100 {
        return Err(Error::Config(
            "feasibility probability needs at least 100 draws".into(),
        ));
    }
    let mut hits = 0usize;
    for _ in 0..n {
        let op = sample_index(family, rng);
        if fixed_point_residual(&op, x)? <= MEMBERSHIP_TOL {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n as f64;
    Ok(FeasProbReport {
        probe: x.clone(),
        p_hat,
        std_error: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
        closed_form: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Every trajectory is feasible by step one (and stays so).
    OneStep,
    /// Feasibility stays uncertain at every simulated step.
    NeverCertain,
}

/// Classify an ensemble as one-step-certain or never-certain. A
/// `NeverCertain` ensemble whose empirical feasible fraction reaches one at
/// some step contradicts the dichotomy and is reported as an error.
pub fn classify_finite_infinite(ensemble: &Ensemble) -> Result<Classification> {
    let one_step = ensemble
        .trajectories
        .iter()
        .all(|t| matches!(t.hit, Some(h) if h <= 1));
    if one_step {
        return Ok(Classification::OneStep);
    }
    for (n, &frac) in ensemble.feas_frac.iter().enumerate().skip(1) {
        if frac >= 1.0 {
            return Err(Error::Inconsistency(format!(
                "never-certain ensemble reached feasible fraction 1 at step {n}"
            )));
        }
    }
    Ok(Classification::NeverCertain)
}

/// Exact 1-D Wasserstein-1 distance between two equal-size empirical laws,
/// given sorted samples: the mean absolute difference of order statistics.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "sample counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Shape("empty samples".into()));
    }
    let total: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / a.len() as f64)
}

/// Mean distance of the step-`k` iterate to the step-`k_ref` iterate, per
/// trajectory, used as a proxy for distance to the almost-sure limit.
pub fn limit_distance_curve(ensemble: &Ensemble, k_ref: usize) -> Result<Vec<f64>> {
    if k_ref > ensemble.steps {
        return Err(Error::Config(format!(
            "reference step {k_ref} beyond horizon {}",
            ensemble.steps
        )));
    }
    let m = ensemble.trajectories.len() as f64;
    let mut curve = vec![0.0; k_ref + 1];
    for t in &ensemble.trajectories {
        let points = t
            .points
            .as_ref()
            .ok_or_else(|| Error::Config("limit curve needs retained trajectory points".into()))?;
        for (k, slot) in curve.iter_mut().enumerate() {
            *slot += points[k].dist(&points[k_ref]);
        }
    }
    for slot in curve.iter_mut() {
        *slot /= m;
    }
    Ok(curve)
}

/// Worst violation of `curve[k] <= 2 * mean_dist[k] + slack`.
pub fn limit_curve_violation(curve: &[f64], mean_dist: &[f64], slack: f64) -> f64 {
    curve
        .iter()
        .zip(mean_dist)
        .map(|(c, m)| c - 2.0 * m - slack)
        .fold(f64::NEG_INFINITY, f64::max)
}
