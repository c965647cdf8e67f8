//! Multi-homogeneous homotopy continuation.
//!
//! Each variable group lives in its own projective space, fixed by a random
//! affine patch. The start system multiplies random linear forms per group,
//! so its roots are found by small linear solves and their number equals the
//! Bézout number of the grouping. Paths are tracked with an RK4 predictor and
//! Newton corrector and finished with a Cauchy-integral endgame.

pub mod linalg;
mod path;
pub mod system;

use std::time::Instant;

use log::{debug, info};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bezout::VariableGrouping;
use crate::error::{Error, Result};
use crate::par;
use crate::polysys::PolySystem;
pub use system::Homotopy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackConfig {
    pub seed: u64,
    /// Fixed `γ` as `[re, im]`; drawn from the seed when absent.
    pub gamma: Option<[f64; 2]>,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub newton_tolerance: f64,
    pub track_tolerance: f64,
    pub max_newton_iters: usize,
    pub divergence_norm: f64,
    pub endgame_start_t: f64,
    pub endgame_ratio: f64,
    pub endgame_rounds: usize,
    pub endgame_tolerance: f64,
    /// Smallest `t` reached when the endgame falls back to plain tightening.
    pub endgame_min_t: f64,
    pub cauchy_samples: usize,
    pub max_winding: u32,
    pub closure_tolerance: f64,
    pub refine_iterations: usize,
    pub cluster_radius: f64,
    pub max_steps: usize,
    pub patch_blowup: f64,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            seed: 1,
            gamma: None,
            initial_step: 0.02,
            min_step: 1e-13,
            max_step: 0.1,
            newton_tolerance: 1e-10,
            track_tolerance: 1e-9,
            max_newton_iters: 3,
            divergence_norm: 1e5,
            endgame_start_t: 0.1,
            endgame_ratio: 0.25,
            endgame_rounds: 20,
            endgame_tolerance: 1e-10,
            endgame_min_t: 1e-14,
            cauchy_samples: 16,
            max_winding: 16,
            closure_tolerance: 1e-7,
            refine_iterations: 5,
            cluster_radius: 1e-6,
            max_steps: 200_000,
            patch_blowup: 1e12,
        }
    }
}

impl TrackConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrackConfig { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.min_step && self.min_step <= self.initial_step && self.initial_step <= self.max_step && self.max_step < 1.0)
        {
            return Err(Error::Config("need 0 < min_step <= initial_step <= max_step < 1".into()));
        }
        let positive = [
            self.newton_tolerance,
            self.track_tolerance,
            self.divergence_norm,
            self.endgame_tolerance,
            self.closure_tolerance,
            self.cluster_radius,
            self.endgame_min_t,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(0.0 < self.endgame_start_t && self.endgame_start_t < 1.0 && 0.0 < self.endgame_ratio && self.endgame_ratio < 1.0)
        {
            return Err(Error::Config("endgame_start_t and endgame_ratio must lie in (0, 1)".into()));
        }
        if let Some([re, im]) = self.gamma {
            if ((re * re + im * im).sqrt() - 1.0).abs() > 1e-12 {
                return Err(Error::Config("gamma must have unit modulus".into()));
            }
        }
        if self.max_newton_iters == 0 || self.cauchy_samples < 4 || self.max_winding == 0 {
            return Err(Error::Config("iteration counts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathStatus {
    Converged,
    DivergedToInfinity,
    TrackingFailed,
}

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_pairs(v: &[Complex64]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(v: &[Pair]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub path_index: usize,
    pub status: PathStatus,
    /// Original variables: affine values, homogeneous groups scaled to a unit
    /// largest coordinate.
    pub point: Vec<Pair>,
    /// Projective coordinates on the patch.
    pub projective: Vec<Pair>,
    pub residual: f64,
    pub condition: f64,
    pub winding: u32,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Endpoint {
    pub fn values(&self) -> Vec<Complex64> {
        from_pairs(&self.point)
    }

    pub fn is_finite(&self) -> bool {
        self.status == PathStatus::Converged
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub setup_ms: f64,
    pub tracking_ms: f64,
    pub per_path_ms: f64,
}

/// All endpoints of one run plus what is needed to reproduce it.
#[derive(Clone, Debug)]
pub struct TrackRun {
    pub homotopy: Homotopy,
    pub endpoints: Vec<Endpoint>,
    pub bezout: u128,
    pub seed: u64,
    pub redraws: u32,
    pub timings: Timings,
}

impl TrackRun {
    pub fn count(&self, s: PathStatus) -> usize {
        self.endpoints.iter().filter(|e| e.status == s).count()
    }

    pub fn finite(&self) -> impl Iterator<Item = &Endpoint> {
        self.endpoints.iter().filter(|e| e.is_finite())
    }

    pub fn gamma(&self) -> Pair {
        [self.homotopy.gamma.re, self.homotopy.gamma.im]
    }
}

/// Tracks every start path of the grouping's start system.
pub fn track_all(sys: &PolySystem, grouping: &VariableGrouping, cfg: &TrackConfig) -> Result<TrackRun> {
    track_paths(sys, grouping, cfg, None)
}

/// Tracks the selected start paths only (by index into the start system).
pub fn track_paths(
    sys: &PolySystem,
    grouping: &VariableGrouping,
    cfg: &TrackConfig,
    only: Option<&[usize]>,
) -> Result<TrackRun> {
    cfg.validate()?;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gamma = cfg.gamma.map(|[re, im]| Complex64::new(re, im));
    let mut redraws = 0;
    let (homotopy, starts) = loop {
        let h = Homotopy::new(sys, grouping, &mut rng, gamma)?;
        let choices = h.start_choices();
        let starts: Option<Vec<Vec<Complex64>>> = choices.iter().map(|c| h.start_point(c)).collect();
        match starts {
            Some(s) => break (h, s),
            None if redraws < 8 => {
                redraws += 1;
                info!("degenerate start system, redrawing (attempt {redraws})");
            }
            None => return Err(Error::Numeric("could not draw a regular start system".into())),
        }
    };
    let bezout = homotopy.start_count();
    debug_assert_eq!(bezout, starts.len() as u128);
    let setup = t0.elapsed();
    let t1 = Instant::now();
    let selected: Vec<usize> = match only {
        Some(ix) => ix.iter().copied().filter(|&i| i < starts.len()).collect(),
        None => (0..starts.len()).collect(),
    };
    let endpoints = par::map(&selected, |&i| {
        let tr = path::track_path(&homotopy, starts[i].clone(), cfg);
        classify_endpoint(&homotopy, i, tr, cfg)
    });
    let tracking = t1.elapsed();
    debug!(
        "tracked {} paths: {} finite, {} at infinity, {} failed",
        endpoints.len(),
        endpoints.iter().filter(|e| e.status == PathStatus::Converged).count(),
        endpoints.iter().filter(|e| e.status == PathStatus::DivergedToInfinity).count(),
        endpoints.iter().filter(|e| e.status == PathStatus::TrackingFailed).count()
    );
    let n = endpoints.len().max(1) as f64;
    Ok(TrackRun {
        homotopy,
        endpoints,
        bezout,
        seed: cfg.seed,
        redraws,
        timings: Timings {
            setup_ms: setup.as_secs_f64() * 1e3,
            tracking_ms: tracking.as_secs_f64() * 1e3,
            per_path_ms: tracking.as_secs_f64() * 1e3 / n,
        },
    })
}

fn classify_endpoint(h: &Homotopy, index: usize, tr: path::Tracked, cfg: &TrackConfig) -> Endpoint {
    let (x, big) = h.dehomogenize(&tr.y);
    let residual = h.scaled_residual(&tr.y);
    let status = if !tr.ok {
        PathStatus::TrackingFailed
    } else if tr.at_infinity || !(big <= cfg.divergence_norm) {
        PathStatus::DivergedToInfinity
    } else if residual <= 10.0 * cfg.newton_tolerance {
        PathStatus::Converged
    } else {
        PathStatus::TrackingFailed
    };
    let message = match (status, tr.message) {
        (PathStatus::TrackingFailed, None) => Some(format!("residual {residual:.2e} above tolerance")),
        (_, m) => m,
    };
    Endpoint {
        path_index: index,
        status,
        point: to_pairs(&x),
        projective: to_pairs(&tr.y),
        residual,
        condition: tr.cond,
        winding: tr.winding,
        steps: tr.steps,
        message,
    }
}

/// Converged endpoints agreeing within the cluster radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub point: Vec<Pair>,
    pub multiplicity: usize,
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn values(&self) -> Vec<Complex64> {
        from_pairs(&self.point)
    }
}

fn close(a: &[Complex64], b: &[Complex64], coords: Option<&[usize]>, radius: f64) -> bool {
    let idx: Vec<usize> = coords.map_or_else(|| (0..a.len()).collect(), <[usize]>::to_vec);
    let scale = 1.0 + idx.iter().map(|&i| a[i].norm().max(b[i].norm())).fold(0.0, f64::max);
    idx.iter().all(|&i| (a[i] - b[i]).norm() <= radius * scale)
}

/// Groups converged endpoints whose reported coordinates (optionally only
/// `coords`) agree within `cfg.cluster_radius`. Representatives are the
/// component-wise mean, re-refined by Newton when the run is available.
pub fn cluster_endpoints(
    endpoints: &[Endpoint],
    coords: Option<&[usize]>,
    homotopy: Option<&Homotopy>,
    cfg: &TrackConfig,
) -> Vec<Cluster> {
    let finite: Vec<&Endpoint> = endpoints.iter().filter(|e| e.is_finite()).collect();
    let vals: Vec<Vec<Complex64>> = finite.iter().map(|e| e.values()).collect();
    let mut parent: Vec<usize> = (0..finite.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..finite.len() {
        for j in 0..i {
            if close(&vals[i], &vals[j], coords, cfg.cluster_radius) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; finite.len()];
    for i in 0..finite.len() {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
        .into_iter()
        .map(|g| {
            let m = g.len() as f64;
            let n = vals[g[0]].len();
            let mean: Vec<Complex64> = (0..n).map(|k| g.iter().map(|&i| vals[i][k]).sum::<Complex64>() / m).collect();
            let point = match (homotopy, g.len()) {
                (Some(h), l) if l > 1 => {
                    let ys: Vec<Vec<Complex64>> = g.iter().map(|&i| from_pairs(&finite[i].projective)).collect();
                    let ny = ys[0].len();
                    let ymean: Vec<Complex64> =
                        (0..ny).map(|k| ys.iter().map(|y| y[k]).sum::<Complex64>() / m).collect();
                    let refined = newton_at_zero(h, &ymean, cfg.refine_iterations);
                    let (x, _) = h.dehomogenize(&refined);
                    if close(&x, &mean, coords, cfg.cluster_radius) {
                        x
                    } else {
                        mean
                    }
                }
                _ => mean,
            };
            Cluster {
                point: to_pairs(&point),
                multiplicity: g.len(),
                members: g.iter().map(|&i| finite[i].path_index).collect(),
            }
        })
        .collect()
}

fn newton_at_zero(h: &Homotopy, y: &[Complex64], iters: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut best = y.to_vec();
    let mut best_res = linalg::max_abs(&h.eval(&best, zero).h);
    for _ in 0..iters {
        let e = h.eval(&best, zero);
        let Some(lu) = linalg::Lu::new(e.jac) else { break };
        let d = lu.solve(&e.h);
        let cand: Vec<Complex64> = best.iter().zip(&d).map(|(a, b)| a - b).collect();
        let res = linalg::max_abs(&h.eval(&cand, zero).h);
        if !(res < best_res) {
            break;
        }
        best = cand;
        best_res = res;
    }
    best
}

/// Header of a solutions file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionsMeta {
    pub seed: u64,
    pub gamma: Pair,
    pub grouping: String,
    pub bezout: u128,
    pub instance_hash: Option<String>,
    pub representation: Option<String>,
    pub variables: Vec<String>,
    pub timings: Timings,
    pub config: TrackConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub path_index: usize,
    pub point: Vec<Pair>,
    pub multiplicity: usize,
    pub residual: f64,
    pub status: PathStatus,
    pub winding: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionsFile {
    pub metadata: SolutionsMeta,
    pub solutions: Vec<SolutionEntry>,
}

impl SolutionsFile {
    pub fn from_run(
        run: &TrackRun,
        grouping: &VariableGrouping,
        cfg: &TrackConfig,
        instance_hash: Option<String>,
        representation: Option<String>,
    ) -> Self {
        let clusters = cluster_endpoints(&run.endpoints, None, None, cfg);
        let mut mult = vec![1usize; run.endpoints.len()];
        for c in &clusters {
            for &m in &c.members {
                mult[m] = c.multiplicity;
            }
        }
        SolutionsFile {
            metadata: SolutionsMeta {
                seed: run.seed,
                gamma: run.gamma(),
                grouping: grouping.spec(),
                bezout: run.bezout,
                instance_hash,
                representation,
                variables: grouping.names.clone(),
                timings: run.timings.clone(),
                config: cfg.clone(),
            },
            solutions: run
                .endpoints
                .iter()
                .map(|e| SolutionEntry {
                    path_index: e.path_index,
                    point: e.point.clone(),
                    multiplicity: mult[e.path_index],
                    residual: e.residual,
                    status: e.status,
                    winding: e.winding,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn univariate() -> (PolySystem, VariableGrouping) {
        let sys = PolySystem::from_strings(&["x"], &["(1)*x^2 + (-1)"]).unwrap();
        let g = VariableGrouping::parse(&["x".to_string()], "x").unwrap();
        (sys, g)
    }

    #[test]
    fn square_roots_of_one() {
        let (sys, g) = univariate();
        let run = track_all(&sys, &g, &TrackConfig::default()).unwrap();
        assert_eq!(run.endpoints.len(), 2);
        let mut xs: Vec<f64> = run.finite().map(|e| e.point[0][0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 1.0).abs() < 1e-10 && (xs[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bilinear_toy_matches_elimination() {
        // x + y = 0, xy + x + 1 = 0  ⇒  x² − x − 1 = 0, y = −x
        let sys = PolySystem::from_strings(&["x", "y"], &["(1)*x*y + (1)*x + (1)", "(1)*x + (1)*y"]).unwrap();
        let g = VariableGrouping::parse(&["x".to_string(), "y".to_string()], "x;y").unwrap();
        let run = track_all(&sys, &g, &TrackConfig::with_seed(3)).unwrap();
        assert_eq!(run.endpoints.len(), 2);
        let s5 = 5f64.sqrt();
        let mut xs: Vec<f64> = run.finite().map(|e| e.point[0][0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] - (1.0 - s5) / 2.0).abs() < 1e-10);
        assert!((xs[1] - (1.0 + s5) / 2.0).abs() < 1e-10);
        for e in run.finite() {
            assert!((e.point[0][0] + e.point[1][0]).abs() < 1e-10);
        }
    }

    #[test]
    fn double_root_and_infinity() {
        // (x − 1)² = 0 in a total-degree-3 setting: x·(x − 1)² − x³ + ... keep simple
        let sys = PolySystem::from_strings(&["x", "y"], &["(1)*x^2 + (-2)*x + (1)", "(1)*x*y + (-1)"]).unwrap();
        let g = VariableGrouping::parse(&["x".to_string(), "y".to_string()], "x,y").unwrap();
        let cfg = TrackConfig::with_seed(4);
        let run = track_all(&sys, &g, &cfg).unwrap();
        assert_eq!(run.endpoints.len(), 4);
        assert_eq!(run.count(PathStatus::Converged), 2);
        assert_eq!(run.count(PathStatus::DivergedToInfinity), 2);
        let cl = cluster_endpoints(&run.endpoints, None, Some(&run.homotopy), &cfg);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 2);
        assert!((cl[0].values()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn deterministic_across_modes() {
        let sys = PolySystem::from_strings(&["x", "y"], &["(1)*x^2 + (3)*y + (-1)", "(1)*x*y + (2)*y^2 + (1)"]).unwrap();
        let g = VariableGrouping::parse(&["x".to_string(), "y".to_string()], "x;y").unwrap();
        let cfg = TrackConfig::with_seed(8);
        let a = track_all(&sys, &g, &cfg).unwrap();
        par::set_parallel(false);
        let b = track_all(&sys, &g, &cfg).unwrap();
        par::set_parallel(true);
        assert_eq!(a.endpoints, b.endpoints);
    }
}
