//! Post-processing of tracked solutions: classification against the unsquared
//! system, reality tests, `d₃` evaluation and extraction of the singularity
//! distance.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use log::{info, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bezout::{self, VariableGrouping};
use crate::error::{Error, Result};
use crate::geometry::{self, MotionGroup, MotionRep, RepKind, TransformedPoints};
use crate::instance::ManipulatorInstance;
use crate::poly::Polynomial;
use crate::polysys::{self, PolySystem, SquareCoeffs};
use crate::ratfunc::RationalFunc;
use crate::tracker::{self, Cluster, Pair, PathStatus, TrackConfig, TrackRun};

/// Relative tolerance on imaginary parts and representation reality conditions.
pub const REALITY_TOL: f64 = 1e-8;
/// Scaled residual below which an equation counts as satisfied.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Scaled value below which `Δ` (or `θθ̃`) counts as vanishing.
pub const DENOMINATOR_TOL: f64 = 1e-8;
/// Minimizers closer than this in `d₃` are reported together.
pub const TIE_TOL: f64 = 1e-9;
/// Negative `d₃²` values down to this are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionTag {
    Genuine,
    SpuriousDenominator,
    SquaringArtifact,
    OnKnownCurve,
}

impl SolutionTag {
    pub const ALL: [SolutionTag; 4] =
        [SolutionTag::Genuine, SolutionTag::SpuriousDenominator, SolutionTag::SquaringArtifact, SolutionTag::OnKnownCurve];

    pub fn name(self) -> &'static str {
        match self {
            SolutionTag::Genuine => "genuine",
            SolutionTag::SpuriousDenominator => "spurious-denominator",
            SolutionTag::SquaringArtifact => "squaring-artifact",
            SolutionTag::OnKnownCurve => "on-known-curve",
        }
    }
}

impl fmt::Display for SolutionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionClass {
    pub tag: SolutionTag,
    pub real_displacement: bool,
    /// `d₃²` at the solution; `None` on a vanishing denominator.
    pub distance_value: Option<Pair>,
    /// Largest scaled residual of the unsquared equations.
    pub original_residual: f64,
    /// Scaled `|Δ|` (or `|θθ̃|`); zero for representations without one.
    pub denominator: f64,
    /// Rotation part identically zero (`e₀ = e₃ = 0`, resp. `θ = θ̃ = 0`).
    pub rotation_locus: bool,
    /// Name of the matching user-supplied curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    /// Scaled residuals of `V₃` and, when present, `M`.
    pub constraint_residual: f64,
}

impl SolutionClass {
    /// `d₃ = √d₃²` for real displacements, clamping tiny negative values.
    pub fn distance(&self) -> Option<f64> {
        if !self.real_displacement {
            return None;
        }
        let v = self.distance_value?;
        if v[0] < -CLAMP_TOL {
            return None;
        }
        Some(v[0].max(0.0).sqrt())
    }
}

/// `|p(x)| / (max|coef| · max(1, ‖x‖∞)^deg)`.
pub fn scaled_residual(p: &Polynomial, x: &[Complex64]) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let cmax = p.terms().map(|(_, c)| c.to_complex().norm()).fold(0.0, f64::max);
    let xmax = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
    p.eval_complex(x).norm() / (cmax * xmax.powi(p.total_degree() as i32))
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= REALITY_TOL * (1.0 + z.norm())
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= REALITY_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Scales the homogeneous block so its largest coordinate is exactly one.
fn normalize(x: &[Complex64], block: Option<&[usize]>) -> Vec<Complex64> {
    let mut y = x.to_vec();
    if let Some(b) = block {
        let piv = b.iter().map(|&i| x[i]).fold(Complex64::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
        if piv.norm() > 0.0 {
            for &i in b {
                y[i] = x[i] / piv;
            }
            // the pivot itself is exactly one
            if let Some(&i) = b.iter().find(|&&i| x[i] == piv) {
                y[i] = Complex64::new(1.0, 0.0);
            }
        }
    }
    y
}

/// Whether a parameter point describes a real displacement.
pub fn real_displacement(kind: RepKind, params: &[Complex64]) -> bool {
    match kind {
        RepKind::Icr => near(params[2], params[0].conj()) && near(params[3], params[1].conj()),
        RepKind::Dckr => {
            // θ̃σ̄ = σ̃θ̄
            let (th, si, tht, sit) = (params[0], params[1], params[2], params[3]);
            let a = tht * si.conj();
            let b = sit * th.conj();
            (a - b).norm() <= REALITY_TOL * (1.0 + a.norm() + b.norm())
        }
        _ => params.iter().all(|&z| is_real(z)),
    }
}

struct CurveCheck {
    name: String,
    chart: Option<usize>,
    equations: Vec<Polynomial>,
}

/// Everything needed to classify points of one representation.
pub struct Classifier {
    rep: MotionRep,
    original: Vec<Polynomial>,
    block: Option<Vec<usize>>,
    denominator: Option<Polynomial>,
    rotation: Vec<usize>,
    curves: Vec<CurveCheck>,
    d2: RationalFunc,
    v3: Polynomial,
    constraint: Option<Polynomial>,
    points: TransformedPoints,
}

impl Classifier {
    /// `sys` is the solved system; its unsquared original is used when present.
    pub fn new(inst: &ManipulatorInstance, rep: &MotionRep, sys: &PolySystem) -> Result<Self> {
        let tp = geometry::transformed_points(inst, rep)?;
        let ring = tp.vars.clone();
        if sys.vars()[..] != ring[..] {
            return Err(Error::Dimension("system and representation use different variables".into()));
        }
        let original = sys.original().unwrap_or(sys).equations().to_vec();
        let rotation: Vec<usize> = match rep.kind {
            RepKind::Bgr | RepKind::Dhr | RepKind::Qbr => vec![0, 1],
            RepKind::Dckr => vec![0, 2],
            _ => Vec::new(),
        };
        let mut curves = Vec::new();
        if let Some(checks) = &inst.checks {
            for c in checks.known_curves.get(rep.kind.name()).into_iter().flatten() {
                let chart = match &c.chart {
                    Some(n) => Some(
                        ring.iter()
                            .position(|v| v == n)
                            .ok_or_else(|| Error::Parse(format!("curve chart '{n}' is not a variable")))?,
                    ),
                    None => None,
                };
                let equations =
                    c.equations.iter().map(|e| Polynomial::parse(&ring, e)).collect::<Result<Vec<_>>>()?;
                curves.push(CurveCheck { name: c.name.clone(), chart, equations });
            }
        }
        Ok(Classifier {
            rep: *rep,
            original,
            block: rep.kind.is_homogeneous().then(|| (0..rep.num_params()).collect()),
            denominator: geometry::spurious_denominator(rep.kind, &ring),
            rotation,
            curves,
            d2: geometry::distance_squared_from(inst, &tp),
            v3: geometry::singularity_polynomial_from(inst, &tp).numerator().clone(),
            constraint: geometry::constraint_polynomial(inst, rep),
            points: tp,
        })
    }

    pub fn rep(&self) -> MotionRep {
        self.rep
    }

    /// The point with its homogeneous block scaled to a unit largest coordinate.
    pub fn normalized(&self, x: &[Complex64]) -> Vec<Complex64> {
        normalize(x, self.block.as_deref())
    }

    fn on_curve(&self, x: &[Complex64]) -> Option<String> {
        for c in &self.curves {
            let mut y = x.to_vec();
            if let Some(k) = c.chart {
                if y[k].norm() <= DENOMINATOR_TOL {
                    continue;
                }
                let piv = y[k];
                for &i in self.block.as_deref().unwrap_or(&[]) {
                    y[i] /= piv;
                }
            }
            if c.equations.iter().all(|e| scaled_residual(e, &y) <= RESIDUAL_TOL) {
                return Some(c.name.clone());
            }
        }
        None
    }

    pub fn classify_point(&self, point: &[Complex64]) -> SolutionClass {
        let x = self.normalized(point);
        let original_residual = self.original.iter().map(|e| scaled_residual(e, &x)).fold(0.0, f64::max);
        let denominator = self.denominator.as_ref().map_or(0.0, |d| scaled_residual(d, &x));
        let curve = self.on_curve(&x);
        // a singular endpoint is only accurate to about the square root of its residual
        let den_tol = DENOMINATOR_TOL.max(original_residual.sqrt());
        let rotation_locus =
            !self.rotation.is_empty() && self.rotation.iter().map(|&i| x[i].norm_sqr()).sum::<f64>() <= den_tol;
        let tag = if original_residual > RESIDUAL_TOL {
            SolutionTag::SquaringArtifact
        } else if curve.is_some() {
            SolutionTag::OnKnownCurve
        } else if denominator <= den_tol && self.denominator.is_some() {
            SolutionTag::SpuriousDenominator
        } else {
            SolutionTag::Genuine
        };
        let constraint_residual = std::iter::once(&self.v3)
            .chain(self.constraint.as_ref())
            .map(|p| scaled_residual(p, &x))
            .fold(0.0, f64::max);
        SolutionClass {
            tag,
            real_displacement: real_displacement(self.rep.kind, &x[..self.rep.num_params()]),
            distance_value: self.d2.eval_complex(&x).map(|z| [z.re, z.im]),
            original_residual,
            denominator,
            rotation_locus,
            curve,
            constraint_residual,
        }
    }

    /// Fixed-frame platform points of the displacement at `point`.
    pub fn platform_points(&self, point: &[Complex64]) -> Option<[[Complex64; 2]; 3]> {
        let x = self.normalized(point);
        geometry::eval_points(&self.points, &x[..self.rep.num_params()])
    }
}

/// Classifies clustered solutions of `sys` (squared up or not).
pub fn classify(
    solutions: &[Cluster],
    inst: &ManipulatorInstance,
    rep: &MotionRep,
    sys: &PolySystem,
) -> Result<Vec<SolutionClass>> {
    let c = Classifier::new(inst, rep, sys)?;
    Ok(solutions.iter().map(|s| c.classify_point(&s.values())).collect())
}

/// Settings of the full solve pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub track: TrackConfig,
    /// Use the fixed squaring matrices for BGR and DCKR.
    pub paper_coeffs: bool,
    /// Seed of the squaring draw when no fixed matrix is used.
    pub squaring_seed: u64,
    /// Grouping spec; `None` picks the first grouping of minimal Bézout number.
    pub grouping: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { track: TrackConfig::default(), paper_coeffs: true, squaring_seed: 7, grouping: None }
    }
}

impl PipelineConfig {
    pub fn with_seed(seed: u64) -> Self {
        PipelineConfig { track: TrackConfig::with_seed(seed), ..Default::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub construction_ms: f64,
    pub bezout_ms: f64,
    pub tracking_ms: f64,
    pub analysis_ms: f64,
}

/// Output of [`solve`].
pub struct Solved {
    pub rep: MotionRep,
    pub lagrange: RationalFunc,
    pub system: PolySystem,
    pub grouping: VariableGrouping,
    pub bezout: u128,
    pub run: TrackRun,
    pub clusters: Vec<Cluster>,
    pub timings: StageTimings,
}

impl Solved {
    /// Finite endpoints counted with multiplicity.
    pub fn finite(&self) -> usize {
        self.run.count(PathStatus::Converged)
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Lagrange system, squaring up, grouping choice, tracking and clustering.
pub fn solve(inst: &ManipulatorInstance, rep: &MotionRep, cfg: &PipelineConfig) -> Result<Solved> {
    let t0 = Instant::now();
    let coeffs: SquareCoeffs = polysys::default_coeffs(rep.kind, cfg.paper_coeffs, cfg.squaring_seed);
    let (lagrange, system) = polysys::build_system(inst, rep, &coeffs)?;
    let construction_ms = ms(t0);
    let t1 = Instant::now();
    let names: Vec<String> = system.vars().to_vec();
    let grouping = match &cfg.grouping {
        Some(spec) if spec != "best" => VariableGrouping::parse(&names, spec)?,
        _ => {
            let report = bezout::search_groupings(&system)?;
            let best = report.best_groupings().next().cloned();
            best.ok_or_else(|| Error::Numeric("no square grouping".into()))?
        }
    };
    let bezout = bezout::bezout_number(&system, &grouping)?;
    let bezout_ms = ms(t1);
    let t2 = Instant::now();
    let run = tracker::track_all(&system, &grouping, &cfg.track)?;
    let tracking_ms = ms(t2);
    info!(
        "{rep}: {} paths, {} finite, {} diverged, {} failed",
        run.endpoints.len(),
        run.count(PathStatus::Converged),
        run.count(PathStatus::DivergedToInfinity),
        run.count(PathStatus::TrackingFailed)
    );
    let clusters = tracker::cluster_endpoints(&run.endpoints, None, Some(&run.homotopy), &cfg.track);
    Ok(Solved {
        rep: *rep,
        lagrange,
        system,
        grouping,
        bezout,
        run,
        clusters,
        timings: StageTimings { construction_ms, bezout_ms, tracking_ms, analysis_ms: 0.0 },
    })
}

/// A candidate closest singular configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    /// Index into the solution table.
    pub solution: usize,
    /// Real parts of the motion parameters (homogeneous ones normalised).
    pub params: Vec<f64>,
    pub multipliers: Vec<Pair>,
    /// Fixed-frame platform points of the singular pose.
    pub platform: [[f64; 2]; 3],
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub point: Vec<Pair>,
    pub multiplicity: usize,
    pub class: SolutionClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceStatus {
    Found,
    NoMinimizer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// `s3` or `e3`.
    pub metric: String,
    pub representation: String,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_note: Option<String>,
    pub status: DistanceStatus,
    pub value: Option<f64>,
    /// Primary minimizer (lexicographically smallest among ties).
    pub minimizer: Option<Minimizer>,
    /// Every minimizer within the tie tolerance, primary first.
    pub ties: Vec<Minimizer>,
    pub grouping: String,
    pub bezout: u128,
    pub finite: usize,
    pub diverged: usize,
    pub failed: usize,
    /// Per tag, counted with multiplicity.
    pub counts: BTreeMap<String, usize>,
    pub solution_table: Vec<SolutionRow>,
    pub timings: StageTimings,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Builds the report from an already solved run.
pub fn report(inst: &ManipulatorInstance, solved: &Solved) -> Result<DistanceReport> {
    let t = Instant::now();
    let rep = solved.rep;
    let cl = Classifier::new(inst, &rep, &solved.system)?;
    let np = rep.num_params();
    let mut table = Vec::with_capacity(solved.clusters.len());
    let mut counts: BTreeMap<String, usize> = SolutionTag::ALL.iter().map(|t| (t.name().to_string(), 0)).collect();
    let mut candidates = Vec::new();
    for (idx, c) in solved.clusters.iter().enumerate() {
        let x = cl.normalized(&c.values());
        let class = cl.classify_point(&x);
        *counts.entry(class.tag.name().to_string()).or_default() += c.multiplicity;
        if class.tag == SolutionTag::Genuine && class.constraint_residual <= RESIDUAL_TOL {
            if let (Some(d), Some(pts)) = (class.distance(), cl.platform_points(&x)) {
                candidates.push(Minimizer {
                    solution: idx,
                    params: x[..np].iter().map(|z| z.re).collect(),
                    multipliers: tracker::to_pairs(&x[np..]),
                    platform: pts.map(|p| [p[0].re, p[1].re]),
                    distance: d,
                });
            }
        }
        table.push(SolutionRow { point: tracker::to_pairs(&x), multiplicity: c.multiplicity, class });
    }
    let best = candidates.iter().map(|m| m.distance).fold(f64::INFINITY, f64::min);
    let mut ties: Vec<Minimizer> = candidates.into_iter().filter(|m| m.distance <= best + TIE_TOL).collect();
    ties.sort_by(|a, b| lex_cmp(&a.params, &b.params));
    let status = if ties.is_empty() { DistanceStatus::NoMinimizer } else { DistanceStatus::Found };
    if status == DistanceStatus::NoMinimizer {
        warn!("{rep}: no genuine real solution; no minimizer");
    }
    let mut timings = solved.timings.clone();
    timings.analysis_ms = ms(t);
    Ok(DistanceReport {
        metric: rep.group.metric().to_string(),
        representation: rep.kind.name().to_string(),
        mode: rep.group.to_string(),
        metric_note: rep.label_note().map(str::to_string),
        status,
        value: ties.first().map(|m| m.distance),
        minimizer: ties.first().cloned(),
        ties,
        grouping: solved.grouping.spec(),
        bezout: solved.bezout,
        finite: solved.run.count(PathStatus::Converged),
        diverged: solved.run.count(PathStatus::DivergedToInfinity),
        failed: solved.run.count(PathStatus::TrackingFailed),
        counts,
        solution_table: table,
        timings,
    })
}

/// Runs the whole pipeline and extracts the singularity distance.
pub fn singularity_distance(
    inst: &ManipulatorInstance,
    rep: &MotionRep,
    cfg: &PipelineConfig,
) -> Result<DistanceReport> {
    let solved = solve(inst, rep, cfg)?;
    report(inst, &solved)
}

/// Representations compared for each metric.
pub fn crosscheck_reps() -> Vec<MotionRep> {
    let mut v = Vec::new();
    for kind in [RepKind::Pbr, RepKind::Perr, RepKind::Icr, RepKind::Bgr, RepKind::Dckr] {
        v.push(MotionRep { kind, group: MotionGroup::Se2 });
    }
    for kind in [RepKind::Pbr, RepKind::Perr, RepKind::Icr] {
        v.push(MotionRep { kind, group: MotionGroup::S2 });
    }
    v
}

/// Tolerance of the cross-representation comparison.
pub const CROSSCHECK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub metric: String,
    pub representation: String,
    pub mode: String,
    pub value: Option<f64>,
    pub platform: Option<[[f64; 2]; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crosscheck {
    pub rows: Vec<CrosscheckRow>,
    /// Largest pairwise difference of the values per metric.
    pub spread: BTreeMap<String, f64>,
    pub agree: bool,
    /// Solution tables of disagreeing runs.
    pub diagnostics: Vec<String>,
    pub reports: Vec<DistanceReport>,
}

fn same_pose(a: &[[f64; 2]; 3], b: &[[f64; 2]; 3]) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= CROSSCHECK_TOL * (1.0 + x.abs()))
}

/// `s₃` through PBR, PERR, ICR, BGR, DCKR and `e₃` through PBR, PERR, ICR.
pub fn crosscheck_representations(inst: &ManipulatorInstance, cfg: &PipelineConfig) -> Result<Crosscheck> {
    let reports = crosscheck_reps()
        .iter()
        .map(|rep| singularity_distance(inst, rep, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(compare_reports(reports))
}

/// Pairwise comparison of distance reports sharing a metric.
pub fn compare_reports(reports: Vec<DistanceReport>) -> Crosscheck {
    let rows: Vec<CrosscheckRow> = reports
        .iter()
        .map(|r| CrosscheckRow {
            metric: r.metric.clone(),
            representation: r.representation.clone(),
            mode: r.mode.clone(),
            value: r.value,
            platform: r.minimizer.as_ref().map(|m| m.platform),
        })
        .collect();
    let mut spread = BTreeMap::new();
    let mut agree = true;
    let mut diagnostics = Vec::new();
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            if a.metric != b.metric {
                continue;
            }
            let entry = spread.entry(a.metric.clone()).or_insert(0.0f64);
            let ok = match (a.value, b.value) {
                (Some(x), Some(y)) => {
                    *entry = entry.max((x - y).abs());
                    let pose = a.ties.iter().any(|p| b.ties.iter().any(|q| same_pose(&p.platform, &q.platform)));
                    (x - y).abs() <= CROSSCHECK_TOL && pose
                }
                _ => {
                    *entry = f64::INFINITY;
                    false
                }
            };
            if !ok {
                agree = false;
                for r in [a, b] {
                    diagnostics.push(format!(
                        "{} {} {}: value {:?}\n{}",
                        r.metric,
                        r.representation,
                        r.mode,
                        r.value,
                        solution_table_text(r)
                    ));
                }
            }
        }
    }
    Crosscheck { rows, spread, agree, diagnostics, reports }
}

/// One line per solution: point, multiplicity, tag, reality and `d₃²`.
pub fn solution_table_text(r: &DistanceReport) -> String {
    let mut s = String::new();
    for (i, row) in r.solution_table.iter().enumerate() {
        let pt: Vec<String> = row.point.iter().map(|p| format!("{:.9}{:+.9}i", p[0], p[1])).collect();
        s.push_str(&format!(
            "{i:4} x{} {:<20} real={} d2={:?} [{}]\n",
            row.multiplicity,
            row.class.tag.name(),
            row.class.real_displacement,
            row.class.distance_value,
            pt.join(", ")
        ));
    }
    s
}

/// PERR S(2) solutions on the quadric `a₁² + a₂² = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadricSplit {
    /// With multiplicity.
    pub on_quadric: usize,
    pub off_quadric: usize,
    /// Summed multiplicity of the solutions with `a₁ = a₂ = 0`.
    pub at_origin: usize,
    /// `(a₃, a₄)` of the first of them.
    pub origin_translation: Option<[Pair; 2]>,
}

pub fn quadric_split(r: &DistanceReport) -> QuadricSplit {
    let mut q = QuadricSplit::default();
    for row in &r.solution_table {
        let a: Vec<Complex64> = row.point[..4].iter().map(|p| Complex64::new(p[0], p[1])).collect();
        if (a[0] * a[0] + a[1] * a[1]).norm() <= RESIDUAL_TOL {
            q.on_quadric += row.multiplicity;
            if a[0].norm() <= RESIDUAL_TOL && a[1].norm() <= RESIDUAL_TOL {
                q.at_origin += row.multiplicity;
                q.origin_translation.get_or_insert([row.point[2], row.point[3]]);
            }
        } else {
            q.off_quadric += row.multiplicity;
        }
    }
    q
}

/// Outcome of one instance-supplied reference value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub name: String,
    pub expected: f64,
    pub actual: Option<f64>,
    pub pass: bool,
}

fn parse_number(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("reference value '{s}' is not a number"));
    match s.split_once('/') {
        Some((n, d)) => Ok(n.trim().parse::<f64>().map_err(|_| bad())? / d.trim().parse::<f64>().map_err(|_| bad())?),
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn check(name: String, expected: f64, actual: Option<f64>) -> ReferenceCheck {
    let pass = actual.is_some_and(|a| (a - expected).abs() <= CROSSCHECK_TOL * expected.abs().max(1.0));
    ReferenceCheck { name, expected, actual, pass }
}

/// Compares the reports with the instance's reference data: `expected` keys are
/// a metric (`s3`, `e3`) or `"<rep> <mode> <metric>"`; `centroid` is checked
/// against the given pose and against the `a₁ = a₂ = 0` PERR S(2) solution.
pub fn reference_checks(inst: &ManipulatorInstance, reports: &[DistanceReport]) -> Result<Vec<ReferenceCheck>> {
    let Some(checks) = &inst.checks else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    if let Some([cx, cy]) = &checks.centroid {
        let want = [parse_number(cx)?, parse_number(cy)?];
        let given = inst.given_centroid().to_f64();
        for k in 0..2 {
            out.push(check(format!("given centroid[{k}]"), want[k], Some(given[k])));
        }
        for r in reports.iter().filter(|r| r.representation == RepKind::Perr.name() && r.mode == "s2") {
            let t = quadric_split(r).origin_translation;
            for k in 0..2 {
                out.push(check(format!("perr s2 centroid solution[{k}]"), want[k], t.map(|t| t[k][0])));
            }
        }
    }
    for (key, value) in &checks.expected {
        let want = parse_number(value)?;
        for r in reports {
            let full = format!("{} {} {}", r.representation, r.mode, r.metric);
            if *key == r.metric || *key == full {
                out.push(check(full, want, r.value));
            }
        }
    }
    Ok(out)
}

/// A row of the solution-count table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub representation: String,
    pub mode: String,
    pub paths: u128,
    pub finite: usize,
    pub diverged: usize,
    pub failed: usize,
    pub genuine: usize,
    pub seconds: f64,
}

impl CountRow {
    pub fn from_report(r: &DistanceReport) -> Self {
        CountRow {
            representation: r.representation.clone(),
            mode: r.mode.clone(),
            paths: r.bezout,
            finite: r.finite,
            diverged: r.diverged,
            failed: r.failed,
            genuine: r.counts.get(SolutionTag::Genuine.name()).copied().unwrap_or(0),
            seconds: r.timings.tracking_ms / 1e3,
        }
    }
}

/// CSV with one row per representation and motion group.
pub fn count_table_csv(rows: &[CountRow]) -> String {
    let mut s = String::from("representation,mode,paths,finite,diverged,failed,genuine,seconds\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{:.3}\n",
            r.representation, r.mode, r.paths, r.finite, r.diverged, r.failed, r.genuine, r.seconds
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{GivenPose, Point2};
    use num_rational::BigRational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reality_per_representation() {
        assert!(real_displacement(RepKind::Pbr, &[c(1.0, 0.0), c(-2.0, 1e-12)]));
        assert!(!real_displacement(RepKind::Perr, &[c(1.0, 1e-3), c(0.0, 0.0)]));
        let k = c(0.6, 0.8);
        let tau = c(2.0, -1.0);
        assert!(real_displacement(RepKind::Icr, &[k, tau, k.conj(), tau.conj()]));
        assert!(!real_displacement(RepKind::Icr, &[k, tau, k, tau.conj()]));
        // θ̃σ̄ = σ̃θ̄ is invariant under a common complex factor
        let s = c(0.3, -1.7);
        let (th, si) = (c(1.0, 2.0), c(-0.5, 0.25));
        assert!(real_displacement(RepKind::Dckr, &[th * s, si * s, th.conj() * s, si.conj() * s]));
    }

    #[test]
    fn normalization_fixes_the_phase() {
        let x = [c(0.0, 2.0), c(1.0, 1.0), c(5.0, 0.0)];
        let y = normalize(&x, Some(&[0, 1]));
        assert_eq!(y[0], c(1.0, 0.0));
        assert!((y[1] - c(0.5, -0.5)).norm() < 1e-15);
        assert_eq!(y[2], x[2]);
    }

    #[test]
    fn scaled_residual_is_scale_free() {
        let v = crate::poly::vars(&["x", "y"]);
        let p = Polynomial::parse(&v, "(4)*x^2 + (-4)*y").unwrap();
        assert_eq!(scaled_residual(&p, &[c(2.0, 0.0), c(4.0, 0.0)]), 0.0);
        let r = scaled_residual(&p, &[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((r - 4.0 / 4.0 / 9.0).abs() < 1e-15);
    }

    fn reference() -> ManipulatorInstance {
        let r = |n: i64| BigRational::from_integer(n.into());
        ManipulatorInstance::new(
            [Point2::from_ratios((0, 1), (0, 1)), Point2::from_ratios((7, 1), (0, 1)), Point2::from_ratios((3, 1), (5, 1))],
            [Point2::from_ratios((0, 1), (0, 1)), Point2::from_ratios((2, 1), (0, 1)), Point2::from_ratios((1, 1), (3, 2))],
            GivenPose::Motion { cos: r(0), sin: r(1), translation: Point2::from_ratios((7, 3), (11, 6)) },
        )
        .unwrap()
    }

    #[test]
    fn identity_of_a_singular_pose_is_genuine_at_distance_zero() {
        // moving P₁ onto B₁ makes the first column of V₃ vanish
        let inst = reference();
        let g = inst.given_points();
        let shift = Point2::new(-g[0].x.clone(), -g[0].y.clone());
        let moved = g.map(|p| Point2::new(&p.x + &shift.x, &p.y + &shift.y));
        let inst = inst.with_given_points(moved.clone());
        let rep = MotionRep { kind: RepKind::Pbr, group: MotionGroup::Se2 };
        let (_, sys) = polysys::build_system(&inst, &rep, &SquareCoeffs::Seeded(1)).unwrap();
        let cl = Classifier::new(&inst, &rep, &sys).unwrap();
        let f = |p: &Point2| p.to_f64();
        let pt = [f(&moved[0])[0], f(&moved[0])[1], f(&moved[1])[0], f(&moved[1])[1], 0.0, 0.0];
        let x: Vec<Complex64> = pt.iter().map(|&v| c(v, 0.0)).collect();
        let class = cl.classify_point(&x);
        assert_eq!(class.tag, SolutionTag::Genuine);
        assert!(class.real_displacement);
        assert_eq!(class.distance(), Some(0.0));
        assert!(class.constraint_residual <= RESIDUAL_TOL);
    }

    #[test]
    fn count_table_has_header_and_rows() {
        let rows = [CountRow {
            representation: "pbr".into(),
            mode: "se2".into(),
            paths: 144,
            finite: 32,
            diverged: 112,
            failed: 0,
            genuine: 32,
            seconds: 1.5,
        }];
        let csv = count_table_csv(&rows);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("pbr,se2,144,32,112,0,32,"));
    }
}
