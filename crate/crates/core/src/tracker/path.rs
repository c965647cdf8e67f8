//! Single-path predictor–corrector tracking and the endgame.

use num_complex::Complex64;

use super::linalg::{max_abs, Lu};
use super::system::Homotopy;
use super::TrackConfig;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug)]
pub(crate) struct Tracked {
    pub y: Vec<Complex64>,
    pub winding: u32,
    pub steps: usize,
    pub cond: f64,
    pub ok: bool,
    pub at_infinity: bool,
    pub message: Option<String>,
}

/// A path `s ↦ t(s)` with derivative, for `s` in `[0, 1]`.
trait TPath {
    fn at(&self, s: f64) -> (Complex64, Complex64);
}

struct Line {
    a: Complex64,
    b: Complex64,
}

impl TPath for Line {
    fn at(&self, s: f64) -> (Complex64, Complex64) {
        (self.a + (self.b - self.a) * s, self.b - self.a)
    }
}

struct Arc {
    r: f64,
    th0: f64,
    th1: f64,
}

impl TPath for Arc {
    fn at(&self, s: f64) -> (Complex64, Complex64) {
        let th = self.th0 + (self.th1 - self.th0) * s;
        let t = Complex64::from_polar(self.r, th);
        (t, Complex64::new(0.0, 1.0) * t * (self.th1 - self.th0))
    }
}

struct Tracker<'a> {
    h: &'a Homotopy,
    cfg: &'a TrackConfig,
    steps: usize,
    step: f64,
}

fn axpy(y: &[Complex64], a: f64, k: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(k).map(|(p, q)| p + q * a).collect()
}

impl Tracker<'_> {
    fn velocity(&self, y: &[Complex64], t: Complex64, dt: Complex64) -> Option<Vec<Complex64>> {
        let e = self.h.eval(y, t);
        let lu = Lu::new(e.jac)?;
        let rhs: Vec<Complex64> = e.ht.iter().map(|v| -v * dt).collect();
        let v = lu.solve(&rhs);
        v.iter().all(|z| z.is_finite()).then_some(v)
    }

    /// Newton at fixed `t`; returns the corrected point when the last update is
    /// below `tol` relative to the point size.
    fn correct(&self, y: &[Complex64], t: Complex64, iters: usize, tol: f64) -> Option<Vec<Complex64>> {
        let mut y = y.to_vec();
        let scale = 1.0 + max_abs(&y);
        let mut last = f64::INFINITY;
        for _ in 0..iters {
            let e = self.h.eval(&y, t);
            let lu = Lu::new(e.jac)?;
            let d = lu.solve(&e.h);
            let dn = max_abs(&d);
            if !dn.is_finite() || dn > 0.5 * last {
                return None;
            }
            for (a, b) in y.iter_mut().zip(&d) {
                *a -= b;
            }
            last = dn;
            if dn <= tol * scale {
                return Some(y);
            }
        }
        None
    }

    fn rk4(&self, y: &[Complex64], p: &dyn TPath, s: f64, ds: f64) -> Option<Vec<Complex64>> {
        let (t1, d1) = p.at(s);
        let k1 = self.velocity(y, t1, d1)?;
        let (t2, d2) = p.at(s + ds / 2.0);
        let k2 = self.velocity(&axpy(y, ds / 2.0, &k1), t2, d2)?;
        let k3 = self.velocity(&axpy(y, ds / 2.0, &k2), t2, d2)?;
        let (t4, d4) = p.at(s + ds);
        let k4 = self.velocity(&axpy(y, ds, &k3), t4, d4)?;
        Some(
            y.iter()
                .enumerate()
                .map(|(i, v)| v + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (ds / 6.0))
                .collect(),
        )
    }

    /// Tracks along `p` from `s = 0` to `s = 1`.
    fn run(&mut self, y: &mut Vec<Complex64>, p: &dyn TPath) -> Result<(), String> {
        let mut s = 0.0;
        let mut streak = 0;
        let mut h = self.step.min(self.cfg.max_step);
        while s < 1.0 {
            if self.steps >= self.cfg.max_steps {
                return Err("step budget exhausted".into());
            }
            self.steps += 1;
            let ds = h.min(1.0 - s);
            let next = self
                .rk4(y, p, s, ds)
                .and_then(|pred| {
                    let (t, _) = p.at(s + ds);
                    let c = self.correct(&pred, t, self.cfg.max_newton_iters, self.cfg.track_tolerance)?;
                    // the correction must stay small next to the predicted move,
                    // otherwise Newton may have landed on a neighbouring path
                    let jump = c.iter().zip(&pred).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    let moved = pred.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    let scale = 1.0 + max_abs(&c);
                    (jump <= 0.01 * scale && jump <= (1e-3 * moved).max(1e-9 * scale)).then_some(c)
                })
                .filter(|c| max_abs(c) < self.cfg.patch_blowup);
            match next {
                Some(c) => {
                    *y = c;
                    s += ds;
                    streak += 1;
                    if streak >= 5 {
                        h = (2.0 * h).min(self.cfg.max_step);
                        streak = 0;
                    }
                }
                None => {
                    h /= 2.0;
                    streak = 0;
                    if h < self.cfg.min_step {
                        return Err(format!("step size underflow at s = {s:.3e}"));
                    }
                }
            }
        }
        self.step = h;
        Ok(())
    }

    /// One Cauchy integral around `|t| = r`, starting from the real point `t = r`.
    /// Returns the mean of the samples and the number of loops before closure.
    fn cauchy(&mut self, y: &mut Vec<Complex64>, r: f64) -> Result<(Vec<Complex64>, u32), String> {
        let k = self.cfg.cauchy_samples;
        let start = y.clone();
        let mut sum = vec![ZERO; y.len()];
        let mut count = 0usize;
        let tau = std::f64::consts::TAU;
        for loops in 1..=self.cfg.max_winding {
            for j in 0..k {
                for (a, b) in sum.iter_mut().zip(y.iter()) {
                    *a += b;
                }
                count += 1;
                let th0 = tau * (j as f64) / (k as f64);
                let th1 = tau * ((j + 1) as f64) / (k as f64);
                self.step = self.step.max(0.25);
                if let Err(m) = self.run(y, &Arc { r, th0, th1 }) {
                    *y = start;
                    return Err(m);
                }
            }
            let gap = y.iter().zip(&start).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if gap <= self.cfg.closure_tolerance * (1.0 + max_abs(y)) {
                *y = start;
                let inv = 1.0 / count as f64;
                return Ok((sum.iter().map(|z| z * inv).collect(), loops));
            }
        }
        *y = start;
        Err("loop did not close".into())
    }

    fn refine(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut best = y.to_vec();
        let mut best_res = max_abs(&self.h.eval(&best, ZERO).h);
        for _ in 0..self.cfg.refine_iterations {
            let e = self.h.eval(&best, ZERO);
            let Some(lu) = Lu::new(e.jac) else { break };
            let d = lu.solve(&e.h);
            let cand: Vec<Complex64> = best.iter().zip(&d).map(|(a, b)| a - b).collect();
            let res = max_abs(&self.h.eval(&cand, ZERO).h);
            if !(res < best_res) {
                break;
            }
            best = cand;
            best_res = res;
        }
        best
    }
}

/// Records the size of the affine coordinates at `t = r` and returns the
/// growth rates `-d log|x| / d log t` between successive records.
fn growth(sizes: &mut Vec<(f64, f64)>, h: &Homotopy, y: &[Complex64], r: f64) -> Vec<f64> {
    sizes.push((r.ln(), h.dehomogenize(y).1.max(1e-300).ln()));
    sizes.windows(2).map(|w| (w[1].1 - w[0].1) / (w[0].0 - w[1].0).abs()).collect()
}

fn steady_growth(rates: &[f64]) -> bool {
    if rates.len() < 3 {
        return false;
    }
    let w = &rates[rates.len() - 3..];
    w.iter().all(|&v| v > 0.05) && w[2] >= 0.5 * w[0]
}

/// The coordinates follow a stable power law and are not growing, so the
/// path is inside the region where Cauchy integrals converge.
fn settled(rates: &[f64]) -> bool {
    match rates {
        [.., a, b] => *b < 0.05 && (b - a).abs() < 0.05,
        _ => false,
    }
}

/// Early exit for paths that are clearly leaving every bounded region.
fn diverging(sizes: &[(f64, f64)], rates: &[f64]) -> bool {
    steady_growth(rates) && sizes.last().is_some_and(|s| s.1 > 1e6f64.ln())
}

/// Tracks one path from `t = 1` to `t = 0`.
pub(crate) fn track_path(h: &Homotopy, y0: Vec<Complex64>, cfg: &TrackConfig) -> Tracked {
    let mut tr = Tracker { h, cfg, steps: 0, step: cfg.initial_step };
    let mut y = y0;
    let one = Complex64::new(1.0, 0.0);
    let te = Complex64::new(cfg.endgame_start_t, 0.0);
    let fail = |y: Vec<Complex64>, steps, msg: String| Tracked {
        y,
        winding: 0,
        steps,
        cond: f64::INFINITY,
        ok: false,
        at_infinity: false,
        message: Some(msg),
    };
    if let Err(m) = tr.run(&mut y, &Line { a: one, b: te }) {
        return fail(y, tr.steps, m);
    }
    // endgame: Cauchy integrals on shrinking circles, with a growth-rate
    // estimate of the affine coordinates to recognise paths going to infinity
    let mut r = cfg.endgame_start_t;
    let mut prev: Option<Vec<Complex64>> = None;
    let mut estimate = None;
    let mut sizes: Vec<(f64, f64)> = Vec::new();
    let infinite = |y: &[Complex64], steps| Tracked {
        y: y.to_vec(),
        winding: 0,
        steps,
        cond: f64::INFINITY,
        ok: true,
        at_infinity: true,
        message: None,
    };
    let tol = 10.0 * cfg.newton_tolerance;
    let mut cooldown = false;
    for _ in 0..cfg.endgame_rounds {
        let rates = growth(&mut sizes, h, &y, r);
        if diverging(&sizes, &rates) {
            return infinite(&y, tr.steps);
        }
        if settled(&rates) && !std::mem::take(&mut cooldown) {
            match tr.cauchy(&mut y, r) {
                Ok((est, c)) => {
                    if let Some(p) = &prev {
                        let d = est.iter().zip(p).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                        let scale = 1.0 + max_abs(&est);
                        // singular endpoints rarely reach the strict agreement, but
                        // their refined residual already certifies them
                        if d <= cfg.endgame_tolerance * scale
                            || (d <= 1e-6 * scale && h.scaled_residual(&tr.refine(&est)) <= tol)
                        {
                            estimate = Some((est, c));
                            break;
                        }
                    }
                    prev = Some(est);
                }
                Err(_) => cooldown = true,
            }
        }
        let r2 = r * cfg.endgame_ratio;
        tr.step = tr.step.max(0.25);
        if tr.run(&mut y, &Line { a: Complex64::new(r, 0.0), b: Complex64::new(r2, 0.0) }).is_err() {
            break;
        }
        r = r2;
    }
    let rates: Vec<f64> = sizes.windows(2).map(|w| (w[1].1 - w[0].1) / (w[0].0 - w[1].0).abs()).collect();
    if estimate.is_none() && steady_growth(&rates) {
        return infinite(&y, tr.steps);
    }
    let mut best: Option<(Vec<Complex64>, u32, f64)> = None;
    if let Some((est, c)) = estimate.or(prev.map(|p| (p, 0))) {
        let end = tr.refine(&est);
        let res = h.scaled_residual(&end);
        best = Some((end, c, res));
    }
    if best.as_ref().is_none_or(|b| b.2 > tol) {
        // plain tightening toward t = 0; the residual along the path shrinks
        // like t even when the endpoint is singular
        let mut yy = y.clone();
        while r > cfg.endgame_min_t {
            let r2 = r * cfg.endgame_ratio;
            tr.step = tr.step.max(0.25);
            let mut trial = yy.clone();
            if tr.run(&mut trial, &Line { a: Complex64::new(r, 0.0), b: Complex64::new(r2, 0.0) }).is_err() {
                break;
            }
            yy = trial;
            r = r2;
            let rates = growth(&mut sizes, h, &yy, r);
            if diverging(&sizes, &rates) {
                return infinite(&yy, tr.steps);
            }
        }
        // near t = 0 the affine coordinates of a finite endpoint settle down,
        // so steady growth over the last rounds means the path goes to infinity
        let rates: Vec<f64> = sizes.windows(2).map(|w| (w[1].1 - w[0].1) / (w[0].0 - w[1].0).abs()).collect();
        let end = tr.refine(&yy);
        let res = h.scaled_residual(&end);
        if best.as_ref().is_none_or(|b| res < b.2) {
            if steady_growth(&rates) {
                return infinite(&yy, tr.steps);
            }
            best = Some((end, 0, res));
        }
    }
    let Some((end, winding, _)) = best else {
        return fail(y, tr.steps, "endgame failed".into());
    };
    let cond = Lu::new(h.eval(&end, ZERO).jac).map_or(f64::INFINITY, |lu| lu.pivot_ratio);
    Tracked { y: end, winding, steps: tr.steps, cond, ok: true, at_infinity: false, message: None }
}
