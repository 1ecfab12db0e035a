//! Seeded, reproducible sampling of the index law and the initial law.
//!
//! Each trajectory owns its own `RngStream`, keyed by `(base_seed,
//! stream_id)`. Distinct stream ids give statistically independent
//! sequences; equal keys reproduce sequences bit-exactly, which is what
//! makes ensembles deterministic regardless of how work is scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::OperatorSpec;
use crate::point::Point;

/// A seedable, splittable random stream (counter-based generator).
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
    pub base_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(base_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
        rng.set_stream(stream_id);
        RngStream {
            rng,
            base_seed,
            stream_id,
        }
    }

    /// One uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// One uniform draw from `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// One standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

/// Builds an operator from a continuous index parameter.
#[derive(Clone, Debug)]
pub enum OperatorBuilder {
    /// `t -> ` projector onto the line through the origin at angle `t`.
    LineThroughOrigin,
    /// `t -> ` projector onto the ball of `radius` centered at `rho * (cos t, sin t)`.
    DiskOnCircle { rho: f64, radius: f64 },
    /// `t -> ` projector onto the unit interval centered at `t`.
    UnitIntervalCenter,
}

impl OperatorBuilder {
    pub fn build(&self, t: f64) -> OperatorSpec {
        match self {
            OperatorBuilder::LineThroughOrigin => OperatorSpec::LineProjector { angle: t },
            OperatorBuilder::DiskOnCircle { rho, radius } => OperatorSpec::BallProjector {
                center: Point::xy(rho * t.cos(), rho * t.sin()),
                radius: *radius,
            },
            OperatorBuilder::UnitIntervalCenter => OperatorSpec::IntervalProjector { center: t },
        }
    }
}

/// The law of the random index.
#[derive(Clone, Debug)]
pub enum IndexDistribution {
    FiniteDiscrete {
        ops: Vec<OperatorSpec>,
        probs: Vec<f64>,
    },
    ContinuousUniform {
        lo: f64,
        hi: f64,
        builder: OperatorBuilder,
    },
}

impl IndexDistribution {
    pub fn finite(ops: Vec<OperatorSpec>, probs: Vec<f64>) -> Result<Self> {
        if ops.len() != probs.len() || ops.is_empty() {
            return Err(Error::Config(
                "finite index law needs matching, nonempty op and prob lists".into(),
            ));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::Config("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(IndexDistribution::FiniteDiscrete { ops, probs })
    }

    pub fn continuous_uniform(lo: f64, hi: f64, builder: OperatorBuilder) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Config(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(IndexDistribution::ContinuousUniform { lo, hi, builder })
    }

    pub fn all_projectors(&self) -> bool {
        match self {
            IndexDistribution::FiniteDiscrete { ops, .. } => ops.iter().all(|op| op.is_projector()),
            // every builder variant produces projectors
            IndexDistribution::ContinuousUniform { .. } => true,
        }
    }

    /// Largest averagedness constant over the family, when all members are averaged.
    pub fn max_averaged_constant(&self) -> Option<f64> {
        match self {
            IndexDistribution::FiniteDiscrete { ops, .. } => ops
                .iter()
                .map(|op| op.averaged_constant())
                .collect::<Option<Vec<_>>>()
                .map(|v| v.into_iter().fold(0.0, f64::max)),
            IndexDistribution::ContinuousUniform { .. } => Some(0.5),
        }
    }
}

/// Draw one operator index. Consumes exactly one uniform draw:
/// inverse-CDF for the finite law, an interval draw for the uniform law.
pub fn sample_index(dist: &IndexDistribution, rng: &mut RngStream) -> OperatorSpec {
    match dist {
        IndexDistribution::FiniteDiscrete { ops, probs } => {
            let u = rng.uniform();
            let mut acc = 0.0;
            for (op, &p) in ops.iter().zip(probs) {
                acc += p;
                if u < acc {
                    return op.clone();
                }
            }
            ops.last().expect("nonempty by construction").clone()
        }
        IndexDistribution::ContinuousUniform { lo, hi, builder } => {
            builder.build(rng.uniform_in(*lo, *hi))
        }
    }
}

/// The law of the starting point.
#[derive(Clone, Debug)]
pub enum InitialLaw {
    Dirac(Point),
    UniformBox { lo: Point, hi: Point },
    Gaussian { mean: Point, stddev: f64 },
}

impl InitialLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialLaw::Dirac(_) => Ok(()),
            InitialLaw::UniformBox { lo, hi } => {
                if lo.dim() != hi.dim() {
                    return Err(Error::Shape("box bounds of different dimension".into()));
                }
                if lo.as_slice().iter().zip(hi.as_slice()).any(|(a, b)| a >= b) {
                    return Err(Error::Config("uniform box needs lo < hi".into()));
                }
                Ok(())
            }
            InitialLaw::Gaussian { stddev, .. } => {
                if *stddev > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config("gaussian stddev must be positive".into()))
                }
            }
        }
    }
}

/// Draw one starting point. The Dirac law ignores the stream.
pub fn sample_initial(law: &InitialLaw, rng: &mut RngStream) -> Point {
    match law {
        InitialLaw::Dirac(p) => p.clone(),
        InitialLaw::UniformBox { lo, hi } => Point::new(
            lo.as_slice()
                .iter()
                .zip(hi.as_slice())
                .map(|(&a, &b)| rng.uniform_in(a, b))
                .collect(),
        ),
        InitialLaw::Gaussian { mean, stddev } => Point::new(
            mean.as_slice()
                .iter()
                .map(|&m| m + stddev * rng.standard_normal())
                .collect(),
        ),
    }
}
