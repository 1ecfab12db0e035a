//! The merit function `R(x) = E ||x - T_xi x||^2`, its gradient, closed
//! forms for the built-in families, regularity constants, the
//! gradient-domination (KL) check and the geometric rate bound.

use crate::chain::Problem;
use crate::error::{Error, Result};
use crate::operators::{apply, OperatorSpec};
use crate::point::Point;
use crate::sampling::{sample_index, IndexDistribution, RngStream};
use crate::MEMBERSHIP_TOL;

/// How a merit value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeritMethod {
    ClosedForm,
    MonteCarlo,
    Quadrature,
}

#[derive(Clone, Debug)]
pub struct MeritEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub method: MeritMethod,
}

/// Monte Carlo estimate of `R(x)` from `n` independent index draws.
pub fn merit_mc(
    problem: &Problem,
    x: &Point,
    n: usize,
    rng: &mut RngStream,
) -> Result<MeritEstimate> {
    if n < 2 {
        return Err(Error::Config("merit_mc needs at least 2 samples".into()));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let op = sample_index(&problem.family, rng);
        let v = apply(&op, x)?.sub(x).norm_sq();
        sum += v;
        sum_sq += v * v;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq / nf) - mean * mean).max(0.0);
    Ok(MeritEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
        method: MeritMethod::MonteCarlo,
    })
}

/// Deterministic evaluation of `R(x)`: the exact weighted sum for a finite
/// index law, composite Simpson over the index for a continuous one.
pub fn merit_quadrature(problem: &Problem, x: &Point, nodes: usize) -> Result<MeritEstimate> {
    match &problem.family {
        IndexDistribution::FiniteDiscrete { ops, probs } => {
            let mut value = 0.0;
            for (op, &p) in ops.iter().zip(probs) {
                value += p * apply(op, x)?.sub(x).norm_sq();
            }
            Ok(MeritEstimate {
                value,
                std_error: 0.0,
                n_samples: ops.len(),
                method: MeritMethod::ClosedForm,
            })
        }
        IndexDistribution::ContinuousUniform { lo, hi, builder } => {
            let n = nodes.max(3) | 1; // odd node count for Simpson
            let h = (hi - lo) / (n - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let t = lo + h * i as f64;
                let v = apply(&builder.build(t), x)?.sub(x).norm_sq();
                let w = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * v;
            }
            Ok(MeritEstimate {
                value: acc * h / 3.0 / (hi - lo),
                std_error: 0.0,
                n_samples: n,
                method: MeritMethod::Quadrature,
            })
        }
    }
}

/// Merit of the overlapping-intervals family `C_r = [r - 1/2, r + 1/2]`
/// with `r` uniform on `[eps - 1/2, 1/2 - eps]`:
/// `R(x) = ((|x|-eps)^3 + min(1-|x|-eps, 0)^3) / (3 (1-2 eps))` for `|x| >= eps`,
/// zero inside `C = [-eps, eps]`.
pub fn merit_closed_intervals(eps: f64, x: f64) -> f64 {
    debug_assert!((0.0..0.5).contains(&eps));
    let a = x.abs();
    if a < eps {
        return 0.0;
    }
    ((a - eps).powi(3) + (1.0 - a - eps).min(0.0).powi(3)) / (3.0 * (1.0 - 2.0 * eps))
}

/// Derivative of `merit_closed_intervals` in `x`.
pub fn grad_closed_intervals(eps: f64, x: f64) -> f64 {
    let a = x.abs();
    if a < eps {
        return 0.0;
    }
    let inner = (a - eps).powi(2) - (1.0 - a - eps).min(0.0).powi(2);
    x.signum() * inner / (1.0 - 2.0 * eps)
}

/// Merit of the random-lines family `C_t = R (cos t, sin t)` with
/// `t` uniform on `[0, beta]`:
/// `R(x) = [x1^2 (b - sin b cos b)/2 + x2^2 (b + sin b cos b)/2 - x1 x2 sin^2 b] / b`.
pub fn merit_closed_lines(beta: f64, x: &Point) -> f64 {
    debug_assert!(x.dim() == 2);
    let (s, c) = beta.sin_cos();
    (x[0] * x[0] * (beta - s * c) / 2.0 + x[1] * x[1] * (beta + s * c) / 2.0 - x[0] * x[1] * s * s)
        / beta
}

/// Gradient of `merit_closed_lines`.
pub fn grad_closed_lines(beta: f64, x: &Point) -> Point {
    let (s, c) = beta.sin_cos();
    Point::xy(
        (x[0] * (beta - s * c) - x[1] * s * s) / beta,
        (x[1] * (beta + s * c) - x[0] * s * s) / beta,
    )
}

/// Families whose merit function has a registered closed form.
#[derive(Clone, Copy, Debug)]
pub enum ClosedFormFamily {
    Intervals { eps: f64 },
    Lines { beta: f64 },
}

impl ClosedFormFamily {
    pub fn merit(&self, x: &Point) -> f64 {
        match self {
            ClosedFormFamily::Intervals { eps } => merit_closed_intervals(*eps, x[0]),
            ClosedFormFamily::Lines { beta } => merit_closed_lines(*beta, x),
        }
    }

    pub fn grad(&self, x: &Point) -> Point {
        match self {
            ClosedFormFamily::Intervals { eps } => Point::scalar(grad_closed_intervals(*eps, x[0])),
            ClosedFormFamily::Lines { beta } => grad_closed_lines(*beta, x),
        }
    }

    /// The smallest regularity constant `sup dist^2 / R`, when finite.
    ///
    /// For the lines family the supremum is attained in the direction
    /// halfway into the angle range and equals `2 beta / (beta - sin beta)`.
    /// The intervals family admits no finite constant.
    pub fn kappa(&self) -> Option<f64> {
        match self {
            ClosedFormFamily::Intervals { .. } => None,
            ClosedFormFamily::Lines { beta } => Some(2.0 * beta / (beta - beta.sin())),
        }
    }
}

/// Draw `n` operators from the family once, for reuse across evaluation
/// points (common random numbers).
pub fn sample_family_ops(
    family: &IndexDistribution,
    n: usize,
    rng: &mut RngStream,
) -> Vec<OperatorSpec> {
    (0..n).map(|_| sample_index(family, rng)).collect()
}

/// Empirical merit over a fixed operator sample.
pub fn merit_over_ops(ops: &[OperatorSpec], x: &Point) -> Result<f64> {
    let mut sum = 0.0;
    for op in ops {
        sum += apply(op, x)?.sub(x).norm_sq();
    }
    Ok(sum / ops.len() as f64)
}

/// Empirical gradient `2 (x - mean P x)` over a fixed projector sample.
pub fn grad_merit_over_ops(ops: &[OperatorSpec], x: &Point) -> Result<Point> {
    let mut mean_proj = Point::zeros(x.dim());
    for op in ops {
        if !op.is_projector() {
            return Err(Error::UnsupportedOperator(
                "merit gradient needs a projector family".into(),
            ));
        }
        mean_proj = mean_proj.add(&apply(op, x)?);
    }
    mean_proj = mean_proj.scale(1.0 / ops.len() as f64);
    Ok(x.sub(&mean_proj).scale(2.0))
}

/// Monte Carlo gradient of `R` at `x` from `n` index draws.
pub fn grad_merit_mc(problem: &Problem, x: &Point, n: usize, rng: &mut RngStream) -> Result<Point> {
    if !problem.family.all_projectors() {
        return Err(Error::UnsupportedOperator(
            "merit gradient needs a projector family".into(),
        ));
    }
    let ops = sample_family_ops(&problem.family, n, rng);
    grad_merit_over_ops(&ops, x)
}

/// How diagnostics evaluate `R` (and its gradient): a registered closed
/// form, or Monte Carlo with a dedicated stream per probe.
#[derive(Clone, Debug)]
pub enum MeritEvaluator {
    ClosedForm(ClosedFormFamily),
    MonteCarlo { n: usize, seed: u64 },
}

impl MeritEvaluator {
    pub fn merit(&self, problem: &Problem, x: &Point, probe_index: u64) -> Result<f64> {
        match self {
            MeritEvaluator::ClosedForm(f) => Ok(f.merit(x)),
            MeritEvaluator::MonteCarlo { n, seed } => {
                let mut rng = RngStream::new(*seed, probe_index);
                Ok(merit_mc(problem, x, *n, &mut rng)?.value)
            }
        }
    }

    pub fn grad(&self, problem: &Problem, x: &Point, probe_index: u64) -> Result<Point> {
        match self {
            MeritEvaluator::ClosedForm(f) => Ok(f.grad(x)),
            MeritEvaluator::MonteCarlo { n, seed } => {
                let mut rng = RngStream::new(*seed, probe_index);
                grad_merit_mc(problem, x, *n, &mut rng)
            }
        }
    }
}

/// Result of a regularity-constant probe sweep.
#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// `max` over probes of `dist^2(x, C) / R(x)`.
    pub kappa_hat: f64,
    pub argmax: Point,
    pub probes_used: usize,
    pub probes_skipped: usize,
    /// Set when refining the probe grid toward the feasible set grows the
    /// constant past 10x the grid value: the supremum is unbounded.
    pub divergence_flag: bool,
}

/// Sweep `dist^2 / R` over a probe grid, then refine geometrically toward
/// the feasible set from the argmax to detect an unbounded supremum.
pub fn regularity_constant(
    problem: &Problem,
    probes: &[Point],
    evaluator: &MeritEvaluator,
) -> Result<RegularityReport> {
    let mut kappa_hat = 0.0f64;
    let mut argmax = None;
    let mut used = 0usize;
    let mut skipped = 0usize;
    let mut probe_index = 0u64;
    let ratio_at = |x: &Point, idx: u64| -> Result<Option<f64>> {
        let d = problem.feasible_set.dist(x);
        if d <= MEMBERSHIP_TOL {
            return Ok(None);
        }
        let r = evaluator.merit(problem, x, idx)?;
        if r <= 0.0 {
            return Err(Error::Inconsistency(format!(
                "merit is zero at infeasible probe {x:?} (dist {d})"
            )));
        }
        Ok(Some(d * d / r))
    };

    for x in probes {
        probe_index += 1;
        match ratio_at(x, probe_index)? {
            Some(ratio) => {
                used += 1;
                if ratio > kappa_hat {
                    kappa_hat = ratio;
                    argmax = Some(x.clone());
                }
            }
            None => skipped += 1,
        }
    }
    let argmax =
        argmax.ok_or_else(|| Error::Degenerate("all probes lie in the feasible set".into()))?;

    // Refinement: walk the argmax toward its nearest feasible point at
    // geometrically shrinking distances. A bounded supremum stays put; an
    // unbounded one keeps growing.
    let mut divergence_flag = false;
    if let Some(anchor) = problem.feasible_set.project(&argmax) {
        let offset = argmax.sub(&anchor);
        let mut refined_max = kappa_hat;
        for j in 1..=16 {
            let x = anchor.axpy(0.5f64.powi(j), &offset);
            probe_index += 1;
            if let Some(ratio) = ratio_at(&x, probe_index)? {
                refined_max = refined_max.max(ratio);
            }
        }
        divergence_flag = refined_max > 10.0 * kappa_hat;
    }

    Ok(RegularityReport {
        kappa_hat,
        argmax,
        probes_used: used,
        probes_skipped: skipped,
        divergence_flag,
    })
}

/// Result of the gradient-domination check `R <= (kappa/4) ||grad R||^2`.
#[derive(Clone, Debug)]
pub struct KlReport {
    pub probe_pass: Vec<bool>,
    /// Largest `R - (kappa/4) ||grad R||^2` over probes (positive = violated).
    pub worst_slack: f64,
}

impl KlReport {
    pub fn all_pass(&self) -> bool {
        self.probe_pass.iter().all(|&p| p)
    }
}

pub fn kl_check(
    problem: &Problem,
    probes: &[Point],
    kappa: f64,
    evaluator: &MeritEvaluator,
    tol: f64,
) -> Result<KlReport> {
    if kappa <= 0.0 {
        return Err(Error::Config("kappa must be positive".into()));
    }
    if !problem.family.all_projectors() {
        return Err(Error::UnsupportedOperator(
            "gradient-domination check needs a projector family".into(),
        ));
    }
    let mut probe_pass = Vec::with_capacity(probes.len());
    let mut worst = f64::NEG_INFINITY;
    for (i, x) in probes.iter().enumerate() {
        let r = evaluator.merit(problem, x, i as u64)?;
        let g = evaluator.grad(problem, x, i as u64)?;
        let slack = r - kappa / 4.0 * g.norm_sq();
        worst = worst.max(slack);
        probe_pass.push(slack <= tol);
    }
    Ok(KlReport {
        probe_pass,
        worst_slack: worst,
    })
}

/// The geometric rate `sqrt(1 - (1-alpha) / (alpha kappa))` implied by a
/// regularity constant `kappa` and averagedness bound `alpha`.
pub fn rate_bound(kappa: f64, alpha: f64) -> Result<f64> {
    if kappa <= 0.0 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "need kappa > 0 and alpha in (0,1); got kappa = {kappa}, alpha = {alpha}"
        )));
    }
    let drop = (1.0 - alpha) / alpha / kappa;
    if drop > 1.0 {
        return Err(Error::Config(format!(
            "inconsistent pair: (1-alpha)/(alpha kappa) = {drop} exceeds 1"
        )));
    }
    Ok((1.0 - drop).sqrt())
}

/// Smallest iteration count `k` guaranteeing `P(dist(X_k, C) < eps) >= 1 - beta`
/// from a deterministic start `x` with merit `r_x0`, via the Markov bound
/// `P(dist >= eps) <= c^k sqrt(kappa R(x)) / eps`.
pub fn epsilon_fixed_point_budget(
    kappa: f64,
    alpha: f64,
    r_x0: f64,
    eps: f64,
    beta: f64,
) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Config("need eps, beta in (0,1)".into()));
    }
    if r_x0 <= 0.0 {
        return Err(Error::Config("merit at the start must be positive".into()));
    }
    let scale = (kappa * r_x0).sqrt();
    if scale <= eps {
        // dist(x, C) <= sqrt(kappa R(x)) <= eps already
        return Ok(0);
    }
    let c = rate_bound(kappa, alpha)?;
    if c == 0.0 {
        return Ok(1);
    }
    let k = ((beta * eps / scale).ln() / c.ln()).ceil();
    Ok(k.max(0.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Problem;
    use crate::sampling::OperatorBuilder;
    use crate::sets::FixedPointSet;
    use std::f64::consts::PI;

    fn lines_problem(beta: f64) -> Problem {
        let family =
            IndexDistribution::continuous_uniform(0.0, beta, OperatorBuilder::LineThroughOrigin)
                .unwrap();
        Problem::single_family(family, FixedPointSet::SinglePoint(Point::xy(0.0, 0.0)), 0.5)
            .unwrap()
    }

    fn intervals_problem(eps: f64) -> Problem {
        let family = IndexDistribution::continuous_uniform(
            eps - 0.5,
            0.5 - eps,
            OperatorBuilder::UnitIntervalCenter,
        )
        .unwrap();
        let feasible = FixedPointSet::Box {
            lo: Point::scalar(-eps),
            hi: Point::scalar(eps),
        };
        Problem::single_family(family, feasible, 0.5).unwrap()
    }

    #[test]
    fn closed_forms_known_values() {
        assert_eq!(merit_closed_intervals(0.1, 0.05), 0.0);
        assert!((merit_closed_intervals(0.0, 0.5) - 0.125 / 3.0).abs() < 1e-15);
        // (0.9^3 + (-0.1)^3) / (3 * 0.8)
        let expected = (0.9f64.powi(3) - 0.1f64.powi(3)) / 2.4;
        assert!((merit_closed_intervals(0.1, 1.0) - expected).abs() < 1e-15);
        assert!((merit_closed_intervals(0.1, 1.0) - 0.30333333333333334).abs() < 1e-14);

        let beta = PI / 2.0;
        assert_eq!(merit_closed_lines(beta, &Point::xy(0.0, 0.0)), 0.0);
        assert!((merit_closed_lines(beta, &Point::xy(1.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((merit_closed_lines(beta, &Point::xy(0.0, 1.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn intervals_closed_form_matches_direct_integral_far_out() {
        // At x = 2, eps = 0 every interval is fully below x:
        // R = int_{-1/2}^{1/2} (x - r - 1/2)^2 dr = 7/3.
        assert!((merit_closed_intervals(0.0, 2.0) - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn merit_mc_matches_closed_forms() {
        let problem = intervals_problem(0.0);
        let mut rng = RngStream::new(2024, 0);
        let est = merit_mc(&problem, &Point::scalar(0.5), 1_000_000, &mut rng).unwrap();
        let exact = 0.125 / 3.0;
        assert!(
            (est.value - exact).abs() <= 3.0 * est.std_error,
            "{} vs {exact} (se {})",
            est.value,
            est.std_error
        );

        let problem = lines_problem(PI / 2.0);
        let est = merit_mc(&problem, &Point::xy(1.0, 0.0), 1_000_000, &mut rng).unwrap();
        assert!((est.value - 0.5).abs() <= 3.0 * est.std_error);
    }

    #[test]
    fn merit_zero_on_feasible_points() {
        let problem = lines_problem(PI / 2.0);
        let mut rng = RngStream::new(1, 0);
        let est = merit_mc(&problem, &Point::xy(0.0, 0.0), 100, &mut rng).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let problem = lines_problem(PI / 2.0);
        let est = merit_quadrature(&problem, &Point::xy(0.3, -1.2), 401).unwrap();
        let exact = merit_closed_lines(PI / 2.0, &Point::xy(0.3, -1.2));
        assert!(
            (est.value - exact).abs() < 1e-10,
            "{} vs {exact}",
            est.value
        );
        assert_eq!(est.method, MeritMethod::Quadrature);
    }

    #[test]
    fn gradient_closed_and_mc() {
        // d/dx (x^3/3) = x^2 = 0.25 at x = 0.5
        assert!((grad_closed_intervals(0.0, 0.5) - 0.25).abs() < 1e-15);

        let problem = intervals_problem(0.0);
        let mut rng = RngStream::new(77, 0);
        let g = grad_merit_mc(&problem, &Point::scalar(0.5), 200_000, &mut rng).unwrap();
        assert!((g[0] - 0.25).abs() < 0.005, "MC gradient {}", g[0]);

        // Feasible point: zero gradient up to MC error.
        let g = grad_merit_mc(&problem, &Point::scalar(0.0), 50_000, &mut rng).unwrap();
        assert!(g[0].abs() < 1e-12);
    }

    #[test]
    fn gradient_rejects_non_projector_family() {
        let family =
            IndexDistribution::finite(vec![OperatorSpec::Huber { alpha: 1.0 }], vec![1.0]).unwrap();
        let problem =
            Problem::single_family(family, FixedPointSet::SinglePoint(Point::scalar(0.0)), 0.5)
                .unwrap();
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(
            grad_merit_mc(&problem, &Point::scalar(1.0), 10, &mut rng),
            Err(Error::UnsupportedOperator(_))
        ));
    }

    #[test]
    fn lines_regularity_constant() {
        let beta = PI / 2.0;
        let problem = lines_problem(beta);
        let probes: Vec<Point> = (0..10_000)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 10_000.0;
                Point::xy(t.cos(), t.sin())
            })
            .collect();
        let evaluator = MeritEvaluator::ClosedForm(ClosedFormFamily::Lines { beta });
        let report = regularity_constant(&problem, &probes, &evaluator).unwrap();
        let exact = 2.0 * beta / (beta - beta.sin());
        assert!(
            (report.kappa_hat - exact).abs() < 0.005 * exact,
            "kappa_hat {} vs {exact}",
            report.kappa_hat
        );
        assert!(!report.divergence_flag);
        // argmax sits in the direction halfway into the angle range
        let angle = report.argmax[1].atan2(report.argmax[0]);
        assert!((angle - beta / 2.0).abs() < 0.01 || (angle - (beta / 2.0 + PI)).abs() < 0.01);
    }

    #[test]
    fn intervals_regularity_diverges() {
        let eps = 0.1;
        let problem = intervals_problem(eps);
        let probes: Vec<Point> = (1..=20)
            .map(|j| Point::scalar(eps + 0.5f64.powi(j)))
            .collect();
        let evaluator = MeritEvaluator::ClosedForm(ClosedFormFamily::Intervals { eps });
        let report = regularity_constant(&problem, &probes, &evaluator).unwrap();
        assert!(report.divergence_flag);
        // ratio grows like 3 (1 - 2 eps) / (x - eps)
        assert!(report.kappa_hat > 1e5);
    }

    #[test]
    fn single_hyperplane_has_unit_constant() {
        let family = IndexDistribution::finite(
            vec![OperatorSpec::AffineHyperplaneProjector {
                normal: Point::xy(0.0, 1.0),
                offset: 0.0,
            }],
            vec![1.0],
        )
        .unwrap();
        let feasible =
            FixedPointSet::affine_from_hyperplanes(&[(Point::xy(0.0, 1.0), 0.0)], 2).unwrap();
        let problem = Problem::single_family(family, feasible, 0.5).unwrap();
        let probes: Vec<Point> = (0..50)
            .map(|i| Point::xy(i as f64 * 0.3 - 7.0, (i as f64 * 0.17).sin() + 2.0))
            .collect();
        let evaluator = MeritEvaluator::MonteCarlo { n: 16, seed: 5 };
        let report = regularity_constant(&problem, &probes, &evaluator).unwrap();
        assert!((report.kappa_hat - 1.0).abs() < 1e-9);
        assert!(!report.divergence_flag);
    }

    #[test]
    fn kl_holds_for_lines_and_fails_for_intervals() {
        let beta = PI / 2.0;
        let problem = lines_problem(beta);
        let kappa = 1.01 * ClosedFormFamily::Lines { beta }.kappa().unwrap();
        let mut probes = Vec::new();
        for &radius in &[0.1, 1.0, 10.0] {
            for i in 0..360 {
                let t = 2.0 * PI * i as f64 / 360.0;
                probes.push(Point::xy(radius * t.cos(), radius * t.sin()));
            }
        }
        probes.push(Point::xy(0.0, 0.0)); // feasible probe: 0 <= 0
        let evaluator = MeritEvaluator::ClosedForm(ClosedFormFamily::Lines { beta });
        let report = kl_check(&problem, &probes, kappa, &evaluator, 1e-12).unwrap();
        assert!(report.all_pass(), "worst slack {}", report.worst_slack);

        // Intervals: the required constant 4R/||grad R||^2 equals
        // 4(1-2eps)/(3(|x|-eps)), which blows up at the boundary, so any
        // fixed kappa fails for probes close enough to eps.
        let eps = 0.1;
        let problem = intervals_problem(eps);
        let evaluator = MeritEvaluator::ClosedForm(ClosedFormFamily::Intervals { eps });
        let near: Vec<Point> = (1..=20)
            .map(|j| Point::scalar(eps + 0.5f64.powi(j)))
            .collect();
        let report = kl_check(&problem, &near, 100.0, &evaluator, 1e-12).unwrap();
        assert!(!report.all_pass());
    }

    #[test]
    fn rate_bound_values() {
        assert_eq!(rate_bound(1.0, 0.5).unwrap(), 0.0);
        assert!((rate_bound(11.0063, 0.5).unwrap() - 0.95349).abs() < 1e-5);
        assert!((rate_bound(4.0, 0.5).unwrap() - 0.75f64.sqrt()).abs() < 1e-12);
        assert!(rate_bound(0.5, 0.5).is_err());
        for kappa in [1.0, 2.0, 5.0, 100.0] {
            let r = rate_bound(kappa, 0.5).unwrap();
            assert!((0.0..1.0).contains(&r));
        }
    }

    #[test]
    fn epsilon_budget_matches_brute_force() {
        let kappa = 11.0063;
        let (alpha, r_x0, eps, beta) = (0.5, 0.5, 1e-3, 0.05);
        let k = epsilon_fixed_point_budget(kappa, alpha, r_x0, eps, beta).unwrap();
        // brute-force oracle: smallest k with c^k sqrt(kappa R) <= beta eps
        let c = rate_bound(kappa, alpha).unwrap();
        let mut oracle = 0u64;
        let mut tail = (kappa * r_x0).sqrt();
        while tail > beta * eps {
            tail *= c;
            oracle += 1;
        }
        assert_eq!(k, oracle);
        assert_eq!(k, 226);
    }

    #[test]
    fn epsilon_budget_edge_cases() {
        // eps at least sqrt(kappa R): already within the target ball
        assert_eq!(
            epsilon_fixed_point_budget(1.0, 0.5, 0.25, 0.6, 0.1).unwrap(),
            0
        );
        // one-step convergence (c = 0)
        assert_eq!(
            epsilon_fixed_point_budget(1.0, 0.5, 0.5, 1e-3, 0.1).unwrap(),
            1
        );
        // k decreases as beta grows toward 1
        let mut last = u64::MAX;
        for beta in [0.01, 0.05, 0.2, 0.5, 0.9, 0.99] {
            let k = epsilon_fixed_point_budget(11.0063, 0.5, 0.5, 1e-3, beta).unwrap();
            assert!(k <= last);
            last = k;
        }
    }

    #[test]
    fn merit_convexity_on_random_pairs() {
        let beta = PI / 2.0;
        let mut rng = RngStream::new(42, 0);
        for _ in 0..1000 {
            let x = Point::xy(rng.uniform_in(-5.0, 5.0), rng.uniform_in(-5.0, 5.0));
            let y = Point::xy(rng.uniform_in(-5.0, 5.0), rng.uniform_in(-5.0, 5.0));
            let mid = x.add(&y).scale(0.5);
            let lhs = merit_closed_lines(beta, &mid);
            let rhs = 0.5 * merit_closed_lines(beta, &x) + 0.5 * merit_closed_lines(beta, &y);
            assert!(lhs <= rhs + 1e-9);
        }
        for _ in 0..1000 {
            let x = rng.uniform_in(-2.0, 2.0);
            let y = rng.uniform_in(-2.0, 2.0);
            let lhs = merit_closed_intervals(0.1, 0.5 * (x + y));
            let rhs = 0.5 * merit_closed_intervals(0.1, x) + 0.5 * merit_closed_intervals(0.1, y);
            assert!(lhs <= rhs + 1e-9);
        }
    }
}
