//! End-to-end analysis and the JSON report.

use crate::cycles::{pl_matrix, total_monodromy, trace, Cycle, FiberBasis, Mat2, VanishingCycle};
use crate::error::{Error, Result};
use crate::junctions::{count_simple_systems, identify_algebra, AlgebraId, Junction, JunctionBasis};
use crate::model::kodaira::FiberType;
use crate::model::templates::{deform_template, split_radius, Template};
use crate::model::WeierstrassModel;
use crate::monodromy::{extract_braid, fold, induced_automorphism, BraidWord, FoldResult, LatticeAutomorphism, SliceLoop};
use crate::tracking::{
    build_paths, fiber_is_generic, fiber_roots, find_discriminant_points, track_roots, DiscriminantPoint, Path, RootTrajectory,
    TrackingConfig,
};
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub const REPORT_VERSION: &str = "1.0";

type C64 = Complex<f64>;

#[derive(Debug, Clone)]
pub enum Source {
    Template { template: Template, params: BTreeMap<String, C64> },
    Spec { text: String, params: BTreeMap<String, C64> },
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub source: Source,
    pub radius: Option<f64>,
    pub base: C64,
    pub seed: u64,
    pub tracking: TrackingConfig,
    /// Simple systems are counted only for root systems up to this size.
    pub simple_system_max_roots: usize,
    pub search_cap: u64,
}

impl AnalysisConfig {
    pub fn template(template: Template) -> Self {
        AnalysisConfig {
            source: Source::Template { template, params: BTreeMap::new() },
            radius: None,
            base: C64::new(0.0, 0.0),
            seed: 1,
            tracking: TrackingConfig::default(),
            simple_system_max_roots: 40,
            search_cap: 50_000_000,
        }
    }

    pub fn spec(text: &str) -> Self {
        AnalysisConfig { source: Source::Spec { text: text.to_string(), params: BTreeMap::new() }, ..Self::template(Template::I(2)) }
    }
}

/// Pipeline stage, used to attribute failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Model,
    Discriminant,
    Paths,
    Tracking,
    Cycles,
    Junctions,
    Classification,
    Monodromy,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug)]
pub struct PipelineError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

impl std::error::Error for PipelineError {}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": { "stage": self.stage, "kind": self.error.kind(), "message": self.error.to_string() } })
    }
}

trait At<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> At<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|error| PipelineError { stage, error })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub template: Option<String>,
    pub fiber_type: Option<FiberType>,
    pub algebra_hint: Option<String>,
    pub f: Vec<[f64; 2]>,
    pub g: Vec<[f64; 2]>,
    pub params: BTreeMap<String, [f64; 2]>,
    pub spec: String,
    pub deformation_attempts: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigReport {
    pub radius: f64,
    pub base: [f64; 2],
    pub seed: u64,
    pub tracking: TrackingConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseFiberReport {
    pub s: [f64; 2],
    pub roots: Vec<[f64; 2]>,
    pub nudges: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub s: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub index: usize,
    pub bent: bool,
    pub merging_pair: [usize; 2],
    pub survivor: usize,
    pub samples: usize,
    pub refinements: u32,
    pub cycle: Cycle,
    pub parity: crate::cycles::ParityCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct JunctionReport {
    pub n: usize,
    pub kernel_rank: usize,
    pub kernel_basis: Vec<Junction>,
    pub gram: Vec<Vec<i64>>,
    pub roots_count: usize,
    pub roots: Vec<Junction>,
    /// Roots with every coordinate in `{-1, 0, 1}`.
    pub box1_count: usize,
    /// Roots that need a coordinate of size at least 2.
    pub box1_surplus: Vec<Junction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub label: String,
    pub rank: usize,
    pub simple_roots: Vec<Junction>,
    pub cartan: Vec<Vec<i64>>,
    pub positive_roots: usize,
    pub simple_systems: Option<u64>,
    pub matches_fiber_type: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub model: ModelReport,
    pub config: ConfigReport,
    pub base_fiber: BaseFiberReport,
    pub discriminant_points: Vec<PointReport>,
    pub paths: Vec<PathReport>,
    pub cycles: Vec<Cycle>,
    pub picard_lefschetz: Vec<Mat2>,
    pub total_monodromy: Mat2,
    pub monodromy_trace: i64,
    pub junctions: JunctionReport,
    pub algebra: AlgebraReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_monodromy: Option<OuterReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterReport {
    pub family: SliceLoop,
    pub steps: usize,
    pub braid: BraidWord,
    pub automorphism: LatticeAutomorphism,
    pub fold: FoldResult,
}

/// Everything computed by [`analyze`]; `report` is the serialisable summary.
pub struct Analysis {
    pub model: WeierstrassModel<f64>,
    pub radius: f64,
    pub base: C64,
    pub points: Vec<DiscriminantPoint<f64>>,
    pub paths: Vec<Path<f64>>,
    pub trajectories: Vec<RootTrajectory<f64>>,
    pub basis: FiberBasis<f64>,
    pub cycles: Vec<VanishingCycle>,
    pub junctions: JunctionBasis,
    pub roots: Vec<Junction>,
    pub algebra: AlgebraId,
    pub report: Report,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn analyze(cfg: &AnalysisConfig) -> std::result::Result<Analysis, PipelineError> {
    let (model, template, expected, default_radius, attempts) = match &cfg.source {
        Source::Template { template, params } => {
            let d = deform_template::<f64>(*template, params, cfg.seed).at(Stage::Model)?;
            (d.model, Some(*template), Some(d.expected_points), Some(d.radius), d.attempts)
        }
        Source::Spec { text, params } => {
            let m = WeierstrassModel::<f64>::parse_with(text, params).at(Stage::Model)?;
            (m, None, None, None, 0)
        }
    };
    let radius = match (cfg.radius, default_radius) {
        (Some(r), _) => r,
        (None, Some(r)) => r,
        (None, None) => 1.0,
    };
    log::info!("model ready, radius {radius}");
    let tc = &cfg.tracking;
    let points = find_discriminant_points(&model, radius, cfg.base, expected, tc).at(Stage::Discriminant)?;
    log::info!("{} discriminant points", points.len());

    let (base, nudges) = choose_base(&model, cfg.base, radius, tc).at(Stage::Paths)?;
    let points = if nudges > 0 { find_discriminant_points(&model, radius, base, expected, tc).at(Stage::Discriminant)? } else { points };
    let paths = build_paths(base, &points, tc).at(Stage::Paths)?;
    let basis = FiberBasis::at(&model, base, tc).at(Stage::Cycles)?;

    let traced: Vec<(RootTrajectory<f64>, VanishingCycle)> = paths
        .par_iter()
        .map(|p| {
            let tr = track_roots(&model, p, basis.roots, tc).at(Stage::Tracking)?;
            let vc = crate::cycles::vanishing_cycle(&model, p, &tr, &basis).at(Stage::Cycles)?;
            log::debug!("path {}: cycle {:?}", p.index + 1, vc.class);
            Ok((tr, vc))
        })
        .collect::<std::result::Result<_, PipelineError>>()?;
    let (trajectories, cycles): (Vec<_>, Vec<_>) = traced.into_iter().unzip();
    let classes: Vec<Cycle> = cycles.iter().map(|c| c.class).collect();

    let jb = JunctionBasis::new(classes.clone()).at(Stage::Junctions)?;
    let kernel = jb.kernel_basis().at(Stage::Junctions)?;
    let gram = jb.gram(&kernel).at(Stage::Junctions)?;
    let roots = jb.lattice_roots(&kernel, cfg.search_cap).at(Stage::Junctions)?;
    let box1: Vec<Junction> = roots.iter().filter(|r| r.iter().all(|x| x.abs() <= 1)).cloned().collect();
    let surplus: Vec<Junction> = roots.iter().filter(|r| r.iter().any(|x| x.abs() > 1)).cloned().collect();
    let algebra = identify_algebra(&jb, &roots).at(Stage::Classification)?;
    let simple_systems = if roots.len() <= cfg.simple_system_max_roots {
        Some(count_simple_systems(&jb, &roots, &algebra, cfg.search_cap).at(Stage::Classification)?)
    } else {
        None
    };
    let fiber_type = template.map(Template::fiber_type);
    let hint = fiber_type.map(|t| t.algebra());
    let matches = hint.map(|h| {
        let h = h.to_string();
        h == algebra.label || (h == "trivial" && algebra.rank == 0)
    });

    let m = total_monodromy(&classes).at(Stage::Cycles)?;
    let report = Report {
        version: REPORT_VERSION,
        model: ModelReport {
            template: template.map(Template::name),
            fiber_type,
            algebra_hint: hint.map(|h| h.to_string()),
            f: model.f().to_pairs(),
            g: model.g().to_pairs(),
            params: model.params().iter().map(|(k, v)| (k.clone(), pair(*v))).collect(),
            spec: model.to_spec_string(),
            deformation_attempts: attempts,
        },
        config: ConfigReport { radius, base: pair(base), seed: cfg.seed, tracking: tc.clone() },
        base_fiber: BaseFiberReport { s: pair(base), roots: basis.roots.iter().map(|z| pair(*z)).collect(), nudges },
        discriminant_points: points.iter().map(|p| PointReport { index: p.index + 1, s: pair(p.s), residual: p.residual }).collect(),
        paths: paths
            .iter()
            .zip(&trajectories)
            .zip(&cycles)
            .map(|((p, t), c)| PathReport {
                index: p.index + 1,
                bent: p.bent,
                merging_pair: [t.merging.0 + 1, t.merging.1 + 1],
                survivor: t.survivor + 1,
                samples: t.samples.len(),
                refinements: t.refinements,
                cycle: c.class,
                parity: c.parity.clone(),
            })
            .collect(),
        cycles: classes.clone(),
        picard_lefschetz: classes.iter().map(|&g| pl_matrix(g)).collect::<Result<_>>().at(Stage::Cycles)?,
        total_monodromy: m,
        monodromy_trace: trace(&m),
        junctions: JunctionReport {
            n: jb.len(),
            kernel_rank: kernel.len(),
            kernel_basis: kernel,
            gram,
            roots_count: roots.len(),
            roots: roots.clone(),
            box1_count: box1.len(),
            box1_surplus: surplus,
        },
        algebra: AlgebraReport {
            label: algebra.label.clone(),
            rank: algebra.rank,
            simple_roots: algebra.simple_roots.clone(),
            cartan: algebra.cartan.clone(),
            positive_roots: algebra.positive_count,
            simple_systems,
            matches_fiber_type: matches,
        },
        outer_monodromy: None,
    };
    Ok(Analysis { model, radius, base, points, paths, trajectories, basis, cycles, junctions: jb, roots, algebra, report })
}

/// Move the base point slightly if the fiber over it is degenerate.
fn choose_base(model: &WeierstrassModel<f64>, base: C64, radius: f64, tc: &TrackingConfig) -> Result<(C64, u32)> {
    for k in 0..=8u32 {
        let s = base + C64::from_polar(1e-3 * radius * k as f64, std::f64::consts::PI / 7.0 * k as f64);
        if let Some(r) = fiber_roots(model, s) {
            if fiber_is_generic(&r, tc) {
                if k > 0 {
                    log::warn!("base point nudged to {s}");
                }
                return Ok((s, k));
            }
        }
    }
    Err(Error::Degenerate(format!("no usable base fiber near {base}")))
}

/// Loop parameters for the outer monodromy computation.
#[derive(Debug, Clone, Copy)]
pub struct LoopConfig {
    pub steps: usize,
    pub radius: Option<f64>,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig { steps: 256, radius: None }
    }
}

/// Analyse the `I0*` slice and follow it once around the `t` loop.
pub fn analyze_loop(cfg: &AnalysisConfig, lp: LoopConfig) -> std::result::Result<Analysis, PipelineError> {
    let params = match &cfg.source {
        Source::Template { template: Template::I0StarSlice, params } => params.clone(),
        _ => {
            return Err(PipelineError { stage: Stage::Monodromy, error: Error::Config("monodromy needs the I0star-slice template".into()) })
        }
    };
    let mut an = analyze(cfg)?;
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(C64::new(d, 0.0));
    let t = get("t", 1.0);
    let family = SliceLoop { a: get("a", -1.0), c: get("c", 1.0), t, eps: get("eps", 1e-3), radius: lp.radius.unwrap_or(t.norm()) };
    if !(family.radius >= 0.0) || lp.steps == 0 {
        return Err(PipelineError { stage: Stage::Monodromy, error: Error::Config("loop radius must be >= 0 and steps > 0".into()) });
    }
    let word = extract_braid::<f64>(&family, an.base, an.radius, lp.steps, &cfg.tracking).at(Stage::Monodromy)?;
    let lambda = induced_automorphism(&word, &an.junctions, &an.roots).at(Stage::Monodromy)?;
    let folded = fold(&an.junctions, &an.roots, &an.algebra, &lambda, cfg.search_cap).at(Stage::Monodromy)?;
    an.report.outer_monodromy = Some(OuterReport { family, steps: lp.steps, braid: word, automorphism: lambda, fold: folded });
    Ok(an)
}

/// Radius that isolates the points near `s = 0` of a parsed model, when its
/// discriminant clearly separates `k` inner roots.
pub fn suggest_radius(model: &WeierstrassModel<f64>, k: usize) -> Option<f64> {
    split_radius(model, k)
}
