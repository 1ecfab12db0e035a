//! Random function iterations as seeded Markov chains, plus trajectory
//! ensembles and their aggregates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::apply;
use crate::point::Point;
use crate::sampling::{sample_index, sample_initial, IndexDistribution, InitialLaw, RngStream};
use crate::sets::FixedPointSet;
use crate::MEMBERSHIP_TOL;

/// A stochastic feasibility problem: one or two operator families and the
/// common fixed-point set they are consistent with.
#[derive(Clone, Debug)]
pub struct Problem {
    pub family: IndexDistribution,
    /// Second family for the two-family iteration `x -> S T x`.
    pub second_family: Option<IndexDistribution>,
    pub feasible_set: FixedPointSet,
    /// Uniform upper bound on the averagedness constants of the family.
    /// Meaningful only when every member is averaged.
    pub alpha_bar: f64,
}

impl Problem {
    pub fn new(
        family: IndexDistribution,
        second_family: Option<IndexDistribution>,
        feasible_set: FixedPointSet,
        alpha_bar: f64,
    ) -> Result<Self> {
        if !(alpha_bar > 0.0 && alpha_bar < 1.0) {
            return Err(Error::Config(format!(
                "alpha_bar must lie in (0,1), got {alpha_bar}"
            )));
        }
        for fam in std::iter::once(&family).chain(second_family.iter()) {
            if let Some(max_alpha) = fam.max_averaged_constant() {
                if max_alpha > alpha_bar + 1e-15 {
                    return Err(Error::Config(format!(
                        "alpha_bar {alpha_bar} below family's averagedness constant {max_alpha}"
                    )));
                }
            }
        }
        Ok(Problem {
            family,
            second_family,
            feasible_set,
            alpha_bar,
        })
    }

    pub fn single_family(
        family: IndexDistribution,
        feasible_set: FixedPointSet,
        alpha_bar: f64,
    ) -> Result<Self> {
        Problem::new(family, None, feasible_set, alpha_bar)
    }

    pub fn all_projectors(&self) -> bool {
        self.family.all_projectors()
            && self
                .second_family
                .as_ref()
                .is_none_or(|f| f.all_projectors())
    }
}

/// Stream-id layout: each trajectory `m` owns sub-streams for the initial
/// draw and for each family's index sequence, keeping them independent.
const STREAMS_PER_TRAJECTORY: u64 = 4;
const INIT_STREAM: u64 = 0;
const FIRST_FAMILY_STREAM: u64 = 1;
const SECOND_FAMILY_STREAM: u64 = 2;

/// Key identifying one trajectory's random streams.
#[derive(Clone, Copy, Debug)]
pub struct StreamKey {
    pub base_seed: u64,
    pub index: u64,
}

impl StreamKey {
    pub fn new(base_seed: u64, index: u64) -> Self {
        StreamKey { base_seed, index }
    }

    pub fn initial_rng(&self) -> RngStream {
        RngStream::new(
            self.base_seed,
            self.index * STREAMS_PER_TRAJECTORY + INIT_STREAM,
        )
    }

    fn family_rng(&self) -> RngStream {
        RngStream::new(
            self.base_seed,
            self.index * STREAMS_PER_TRAJECTORY + FIRST_FAMILY_STREAM,
        )
    }

    fn second_family_rng(&self) -> RngStream {
        RngStream::new(
            self.base_seed,
            self.index * STREAMS_PER_TRAJECTORY + SECOND_FAMILY_STREAM,
        )
    }
}

/// One realized path of the iteration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Retained only on request; distances are always kept.
    pub points: Option<Vec<Point>>,
    /// `dists[k] = dist(X_k, C)`, length `steps + 1`.
    pub dists: Vec<f64>,
    /// First step index with `dist <= MEMBERSHIP_TOL`.
    pub hit: Option<usize>,
    pub stream_id: u64,
}

/// One step of the iteration: draw an index per family and apply.
pub fn rfi_step(
    problem: &Problem,
    x: &Point,
    first_rng: &mut RngStream,
    second_rng: Option<&mut RngStream>,
) -> Result<Point> {
    let op = sample_index(&problem.family, first_rng);
    let mut next = apply(&op, x)?;
    if let Some(second) = &problem.second_family {
        let rng = second_rng.ok_or_else(|| {
            Error::Config("two-family problem needs a second random stream".into())
        })?;
        let op2 = sample_index(second, rng);
        next = apply(&op2, &next)?;
    }
    Ok(next)
}

/// Run a single trajectory of `steps` iterations from `x0`.
pub fn run_trajectory(
    problem: &Problem,
    x0: Point,
    steps: usize,
    key: StreamKey,
    retain_points: bool,
) -> Result<Trajectory> {
    let mut first_rng = key.family_rng();
    let mut second_rng = key.second_family_rng();
    let mut dists = Vec::with_capacity(steps + 1);
    let mut points = if retain_points {
        Some(Vec::with_capacity(steps + 1))
    } else {
        None
    };
    let mut hit = None;
    let mut x = x0;
    for k in 0..=steps {
        let d = problem.feasible_set.dist(&x);
        if hit.is_none() && d <= MEMBERSHIP_TOL {
            hit = Some(k);
        }
        dists.push(d);
        if let Some(ps) = points.as_mut() {
            ps.push(x.clone());
        }
        if k < steps {
            let second = problem.second_family.as_ref().map(|_| &mut second_rng);
            x = rfi_step(problem, &x, &mut first_rng, second)?;
        }
    }
    Ok(Trajectory {
        points,
        dists,
        hit,
        stream_id: key.index,
    })
}

/// `M` independent trajectories plus per-step aggregates.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub trajectories: Vec<Trajectory>,
    /// Arithmetic mean of `dist(X_k, C)` over trajectories.
    pub mean_dist: Vec<f64>,
    /// Standard error of `mean_dist` per step.
    pub dist_se: Vec<f64>,
    /// Fraction of trajectories with `dist(X_k, C) <= MEMBERSHIP_TOL`.
    pub feas_frac: Vec<f64>,
    pub steps: usize,
}

/// Run an ensemble. Trajectory `m` uses stream index `m`; the merge is in
/// stream order, so results are bit-identical for any worker count.
pub fn run_ensemble(
    problem: &Problem,
    initial: &InitialLaw,
    steps: usize,
    trajectories: usize,
    base_seed: u64,
    retain_points: bool,
) -> Result<Ensemble> {
    if steps < 1 || trajectories < 1 {
        return Err(Error::Config(
            "ensemble needs at least one step and one trajectory".into(),
        ));
    }
    initial.validate()?;
    let paths: Result<Vec<Trajectory>> = (0..trajectories as u64)
        .into_par_iter()
        .map(|m| {
            let key = StreamKey::new(base_seed, m);
            let x0 = sample_initial(initial, &mut key.initial_rng());
            run_trajectory(problem, x0, steps, key, retain_points)
        })
        .collect();
    let paths = paths?;

    let m = trajectories as f64;
    let mut mean_dist = vec![0.0; steps + 1];
    let mut dist_se = vec![0.0; steps + 1];
    let mut feas_frac = vec![0.0; steps + 1];
    for k in 0..=steps {
        let mut sum = 0.0;
        let mut count = 0usize;
        for t in &paths {
            let d = t.dists[k];
            sum += d;
            if d <= MEMBERSHIP_TOL {
                count += 1;
            }
        }
        let mean = sum / m;
        let mut sq = 0.0;
        for t in &paths {
            sq += (t.dists[k] - mean).powi(2);
        }
        mean_dist[k] = mean;
        dist_se[k] = if trajectories > 1 {
            (sq / (m - 1.0)).sqrt() / m.sqrt()
        } else {
            0.0
        };
        feas_frac[k] = count as f64 / m;
    }
    Ok(Ensemble {
        trajectories: paths,
        mean_dist,
        dist_se,
        feas_frac,
        steps,
    })
}

/// Hitting-time summary of an ensemble.
#[derive(Clone, Debug)]
pub struct HittingStats {
    /// `cum_frac[k]` = fraction of trajectories with hitting time <= k.
    pub cum_frac: Vec<f64>,
    /// Mean hitting time over trajectories that ever hit.
    pub mean_hit: Option<f64>,
}

pub fn hitting_stats(ensemble: &Ensemble) -> HittingStats {
    let m = ensemble.trajectories.len() as f64;
    let mut cum_frac = vec![0.0; ensemble.steps + 1];
    let mut hit_sum = 0.0;
    let mut hit_count = 0usize;
    for t in &ensemble.trajectories {
        if let Some(h) = t.hit {
            for slot in cum_frac.iter_mut().skip(h) {
                *slot += 1.0;
            }
            hit_sum += h as f64;
            hit_count += 1;
        }
    }
    for slot in cum_frac.iter_mut() {
        *slot /= m;
    }
    HittingStats {
        cum_frac,
        mean_hit: (hit_count > 0).then(|| hit_sum / hit_count as f64),
    }
}
