//! Typed scenarios: declarative experiment descriptions loaded from the
//! scenario file format (see `docs/scenario-format.md`).

use std::path::{Path, PathBuf};

use rfi_core::point::Point;
use rfi_core::sampling::InitialLaw;

use crate::config::{ConfigError, RawConfig, SectionReader};

/// Which experiment family a scenario instantiates. The registry maps each
/// kind to its operator family, exact feasible set and closed forms.
#[derive(Debug, Clone)]
pub enum ProblemKind {
    /// Two orthogonal halfspace projectors drawn with probabilities
    /// `(p1, 1 - p1)`; feasible set is the intersection.
    Halfspaces { p1: f64 },
    /// Projectors onto lines through the origin at angles uniform on
    /// `[0, beta]`; feasible set `{0}`.
    Lines { beta: f64 },
    /// Projectors onto unit intervals centered uniformly on
    /// `[eps - 1/2, 1/2 - eps]`; feasible set `[-eps, eps]`.
    Intervals { eps: f64 },
    /// Projectors onto unit disks centered on a circle of radius `rho`;
    /// feasible set is the ball of radius `1 - rho`.
    Disks { rho: f64 },
    /// A single rotation by `phi`; feasible set `{0}` is never approached.
    Rotation { phi: f64 },
    /// Two fixed hyperplanes in three dimensions meeting in a line.
    AffineHyperplanes3 {
        normal1: Point,
        offset1: f64,
        normal2: Point,
        offset2: f64,
    },
    /// Two-family iteration: disk projectors followed by the projector
    /// onto a single anchor point.
    TwoFamilyDisksPoint { rho: f64, anchor: Point },
    /// One-dimensional paracontractions (Huber map and the exponential
    /// prox) sharing the fixed point 0.
    Paracontractions1d { huber_alpha: f64 },
    /// Discretized first-kind integral equation solved by random row
    /// projections.
    IntegralEq {
        kernel: String,
        rhs: String,
        a: f64,
        b: f64,
        nodes: usize,
    },
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Halfspaces { .. } => "halfspaces",
            ProblemKind::Lines { .. } => "lines",
            ProblemKind::Intervals { .. } => "intervals",
            ProblemKind::Disks { .. } => "disks",
            ProblemKind::Rotation { .. } => "rotation",
            ProblemKind::AffineHyperplanes3 { .. } => "affine_hyperplanes_3d",
            ProblemKind::TwoFamilyDisksPoint { .. } => "two_family_disks_point",
            ProblemKind::Paracontractions1d { .. } => "paracontractions_1d",
            ProblemKind::IntegralEq { .. } => "integral_eq",
        }
    }
}

/// Diagnostics toggles and their parameters.
#[derive(Debug, Clone)]
pub struct DiagnosticsConfig {
    pub rate: bool,
    pub hitting: bool,
    pub classify: bool,
    pub wasserstein: bool,
    pub limit_curve: bool,
    pub regularity: bool,
    pub regularity_probes: usize,
    pub kl: bool,
    pub kl_kappa_scale: f64,
    pub kl_radii: Vec<f64>,
    pub feas_prob: bool,
    pub feas_prob_lambdas: Vec<f64>,
    pub feas_prob_samples: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            rate: false,
            hitting: false,
            classify: false,
            wasserstein: false,
            limit_curve: false,
            regularity: false,
            regularity_probes: 10_000,
            kl: false,
            kl_kappa_scale: 1.01,
            kl_radii: vec![0.1, 1.0, 10.0],
            feas_prob: false,
            feas_prob_lambdas: Vec::new(),
            feas_prob_samples: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub steps: usize,
    pub trajectories: usize,
    pub retain_points: bool,
    pub kind: ProblemKind,
    pub initial: Option<InitialLaw>,
    pub diagnostics: DiagnosticsConfig,
}

/// Load and validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let cfg = RawConfig::parse(text)?;

    let scenario_section = cfg
        .section("scenario")
        .ok_or_else(|| ConfigError::new("missing [scenario] section"))?;
    let mut s = SectionReader::new(scenario_section);
    let name = s.require_str("name")?.to_string();
    let seed = s.opt_u64("seed")?.unwrap_or(0);
    let steps = s.require_usize("steps")?;
    let trajectories = s.opt_usize("trajectories")?.unwrap_or(1);
    let retain_points = s.opt_bool("retain_points")?.unwrap_or(false);
    let out_dir = s
        .opt_str("out_dir")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out").join(&name));
    s.finish()?;

    if steps < 1 {
        return Err(ConfigError::at(scenario_section.line, "steps must be >= 1"));
    }
    if trajectories < 1 {
        return Err(ConfigError::at(
            scenario_section.line,
            "trajectories must be >= 1",
        ));
    }

    let problem_section = cfg
        .section("problem")
        .ok_or_else(|| ConfigError::new("missing [problem] section"))?;
    let mut p = SectionReader::new(problem_section);
    let kind_name = p.require_str("kind")?.to_string();
    let kind = match kind_name.as_str() {
        "halfspaces" => {
            let p1 = p.require_f64("p1")?;
            if !(0.0..=1.0).contains(&p1) {
                return Err(ConfigError::at(
                    problem_section.line,
                    "p1 must lie in [0, 1]",
                ));
            }
            ProblemKind::Halfspaces { p1 }
        }
        "lines" => {
            let beta = p.require_f64("beta")?;
            if !(beta > 0.0 && beta < std::f64::consts::FRAC_PI_2 + 1e-12) {
                return Err(ConfigError::at(
                    problem_section.line,
                    "beta must lie in (0, pi/2]",
                ));
            }
            ProblemKind::Lines { beta }
        }
        "intervals" => {
            let eps = p.require_f64("eps")?;
            if !(0.0..0.5).contains(&eps) {
                return Err(ConfigError::at(
                    problem_section.line,
                    "eps must lie in [0, 1/2)",
                ));
            }
            ProblemKind::Intervals { eps }
        }
        "disks" => {
            let rho = p.require_f64("rho")?;
            if !(rho > 0.0 && rho < 1.0) {
                return Err(ConfigError::at(
                    problem_section.line,
                    "rho must lie in (0, 1)",
                ));
            }
            ProblemKind::Disks { rho }
        }
        "rotation" => ProblemKind::Rotation {
            phi: p.require_f64("phi")?,
        },
        "affine_hyperplanes_3d" => {
            let u1 = p.require_tuple("normal1")?;
            let u2 = p.require_tuple("normal2")?;
            if u1.len() != 3 || u2.len() != 3 {
                return Err(ConfigError::at(
                    problem_section.line,
                    "normals must be 3-dimensional tuples",
                ));
            }
            ProblemKind::AffineHyperplanes3 {
                normal1: Point::new(u1),
                offset1: p.require_f64("offset1")?,
                normal2: Point::new(u2),
                offset2: p.require_f64("offset2")?,
            }
        }
        "two_family_disks_point" => {
            let anchor = p.require_tuple("anchor")?;
            if anchor.len() != 2 {
                return Err(ConfigError::at(
                    problem_section.line,
                    "anchor must be a 2-dimensional tuple",
                ));
            }
            ProblemKind::TwoFamilyDisksPoint {
                rho: p.require_f64("rho")?,
                anchor: Point::new(anchor),
            }
        }
        "paracontractions_1d" => ProblemKind::Paracontractions1d {
            huber_alpha: p.opt_f64("huber_alpha")?.unwrap_or(1.0),
        },
        "integral_eq" => {
            let kernel = p.require_str("kernel")?.to_string();
            let rhs = p.require_str("rhs")?.to_string();
            let a = p.opt_f64("a")?.unwrap_or(0.0);
            let b = p.opt_f64("b")?.unwrap_or(1.0);
            let nodes = p.require_usize("nodes")?;
            if rfi_core::integral_eq::kernel_by_name(&kernel, a, b).is_none() {
                return Err(ConfigError::at(
                    problem_section.line,
                    format!(
                        "unknown kernel `{kernel}`; known: indicator, product_ts, gaussian_kernel"
                    ),
                ));
            }
            if rfi_core::integral_eq::rhs_by_name(&rhs).is_none() {
                return Err(ConfigError::at(
                    problem_section.line,
                    format!("unknown rhs `{rhs}`; known: t_squared_half, t_thirds, zero"),
                ));
            }
            ProblemKind::IntegralEq {
                kernel,
                rhs,
                a,
                b,
                nodes,
            }
        }
        other => {
            return Err(ConfigError::at(
                problem_section.line,
                format!(
                    "unknown problem kind `{other}`; known kinds: halfspaces, lines, intervals, \
                     disks, rotation, affine_hyperplanes_3d, two_family_disks_point, \
                     paracontractions_1d, integral_eq"
                ),
            ));
        }
    };
    p.finish()?;

    let initial = match cfg.section("initial") {
        Some(section) => Some(parse_initial(section)?),
        None => None,
    };
    if initial.is_none() && !matches!(kind, ProblemKind::IntegralEq { .. }) {
        return Err(ConfigError::new("missing [initial] section"));
    }

    let diagnostics = match cfg.section("diagnostics") {
        Some(section) => parse_diagnostics(section)?,
        None => DiagnosticsConfig::default(),
    };

    for section in &cfg.sections {
        if !["scenario", "problem", "initial", "diagnostics"].contains(&section.name.as_str()) {
            return Err(ConfigError::at(
                section.line,
                format!(
                    "unknown section [{}]; valid sections: scenario, problem, initial, diagnostics",
                    section.name
                ),
            ));
        }
    }

    let scenario = Scenario {
        name,
        seed,
        out_dir,
        steps,
        trajectories,
        retain_points,
        kind,
        initial,
        diagnostics,
    };
    validate(&scenario)?;
    Ok(scenario)
}

fn parse_initial(section: &crate::config::RawSection) -> Result<InitialLaw, ConfigError> {
    let mut r = SectionReader::new(section);
    let kind = r.require_str("kind")?.to_string();
    let law = match kind.as_str() {
        "dirac" => InitialLaw::Dirac(Point::new(r.require_tuple("point")?)),
        "uniform_box" => InitialLaw::UniformBox {
            lo: Point::new(r.require_tuple("lo")?),
            hi: Point::new(r.require_tuple("hi")?),
        },
        "gaussian" => InitialLaw::Gaussian {
            mean: Point::new(r.require_tuple("mean")?),
            stddev: r.require_f64("stddev")?,
        },
        other => {
            return Err(ConfigError::at(
                section.line,
                format!("unknown initial law `{other}`; known: dirac, uniform_box, gaussian"),
            ));
        }
    };
    r.finish()?;
    law.validate()
        .map_err(|e| ConfigError::at(section.line, e.to_string()))?;
    Ok(law)
}

fn parse_diagnostics(
    section: &crate::config::RawSection,
) -> Result<DiagnosticsConfig, ConfigError> {
    let mut r = SectionReader::new(section);
    let defaults = DiagnosticsConfig::default();
    let cfg = DiagnosticsConfig {
        rate: r.opt_bool("rate")?.unwrap_or(defaults.rate),
        hitting: r.opt_bool("hitting")?.unwrap_or(defaults.hitting),
        classify: r.opt_bool("classify")?.unwrap_or(defaults.classify),
        wasserstein: r.opt_bool("wasserstein")?.unwrap_or(defaults.wasserstein),
        limit_curve: r.opt_bool("limit_curve")?.unwrap_or(defaults.limit_curve),
        regularity: r.opt_bool("regularity")?.unwrap_or(defaults.regularity),
        regularity_probes: r
            .opt_usize("regularity_probes")?
            .unwrap_or(defaults.regularity_probes),
        kl: r.opt_bool("kl")?.unwrap_or(defaults.kl),
        kl_kappa_scale: r
            .opt_f64("kl_kappa_scale")?
            .unwrap_or(defaults.kl_kappa_scale),
        kl_radii: r.opt_tuple("kl_radii")?.unwrap_or(defaults.kl_radii),
        feas_prob: r.opt_bool("feas_prob")?.unwrap_or(defaults.feas_prob),
        feas_prob_lambdas: r
            .opt_tuple("feas_prob_lambdas")?
            .unwrap_or(defaults.feas_prob_lambdas),
        feas_prob_samples: r
            .opt_usize("feas_prob_samples")?
            .unwrap_or(defaults.feas_prob_samples),
    };
    r.finish()?;
    Ok(cfg)
}

fn validate(s: &Scenario) -> Result<(), ConfigError> {
    let dim = match &s.kind {
        ProblemKind::Intervals { .. } | ProblemKind::Paracontractions1d { .. } => Some(1),
        ProblemKind::Halfspaces { .. }
        | ProblemKind::Lines { .. }
        | ProblemKind::Disks { .. }
        | ProblemKind::Rotation { .. }
        | ProblemKind::TwoFamilyDisksPoint { .. } => Some(2),
        ProblemKind::AffineHyperplanes3 { .. } => Some(3),
        ProblemKind::IntegralEq { .. } => None,
    };
    if let (Some(dim), Some(initial)) = (dim, &s.initial) {
        let law_dim = match initial {
            InitialLaw::Dirac(p) => p.dim(),
            InitialLaw::UniformBox { lo, .. } => lo.dim(),
            InitialLaw::Gaussian { mean, .. } => mean.dim(),
        };
        if law_dim != dim {
            return Err(ConfigError::new(format!(
                "initial law dimension {law_dim} does not match problem dimension {dim}"
            )));
        }
    }
    if s.diagnostics.limit_curve && !s.retain_points {
        return Err(ConfigError::new(
            "limit_curve diagnostic requires retain_points = true",
        ));
    }
    if s.diagnostics.wasserstein && !s.retain_points {
        return Err(ConfigError::new(
            "wasserstein diagnostic requires retain_points = true",
        ));
    }
    if s.diagnostics.wasserstein && dim != Some(1) {
        return Err(ConfigError::new(
            "wasserstein diagnostic is exact in one dimension only",
        ));
    }
    Ok(())
}
