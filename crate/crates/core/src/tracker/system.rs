//! Numeric multiprojective homotopy: homogenised target, product start system,
//! affine patches and start-point enumeration.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::linalg::{Lu, Mat};
use crate::bezout::{DegreeMatrix, VariableGrouping};
use crate::error::{Error, Result};
use crate::polysys::PolySystem;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Placement of one variable group inside the projective coordinate vector.
#[derive(Clone, Debug)]
pub struct GroupLayout {
    /// Positions in the projective vector, homogenising coordinate first for affine groups.
    pub coords: Vec<usize>,
    /// Position of the homogenising coordinate, for affine groups.
    pub hom: Option<usize>,
    /// Original variable indices, aligned with the non-homogenising coordinates.
    pub vars: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
struct Term {
    coef: Complex64,
    /// Sparse exponents over projective coordinates.
    exps: Vec<(u16, u16)>,
}

#[derive(Clone, Debug)]
struct NumPoly {
    terms: Vec<Term>,
}

impl NumPoly {
    fn eval(&self, pw: &[Vec<Complex64>]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().fold(t.coef, |acc, &(v, e)| acc * pw[v as usize][e as usize]))
            .sum()
    }

    /// Σ |cₜ|·|yᵗ|, the scale for relative residuals.
    fn eval_abs(&self, pw: &[Vec<Complex64>]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().fold(t.coef.norm(), |acc, &(v, e)| acc * pw[v as usize][e as usize].norm()))
            .sum()
    }

    /// Value and gradient (added into `grad`).
    fn eval_grad(&self, pw: &[Vec<Complex64>], grad: &mut [Complex64]) -> Complex64 {
        let mut val = ZERO;
        let mut pre: Vec<Complex64> = Vec::with_capacity(8);
        for t in &self.terms {
            let k = t.exps.len();
            pre.clear();
            let mut acc = ONE;
            for &(v, e) in &t.exps {
                pre.push(acc);
                acc *= pw[v as usize][e as usize];
            }
            val += t.coef * acc;
            let mut suf = ONE;
            for idx in (0..k).rev() {
                let (v, e) = t.exps[idx];
                let d = Complex64::new(e as f64, 0.0) * pw[v as usize][(e - 1) as usize];
                grad[v as usize] += t.coef * pre[idx] * suf * d;
                suf *= pw[v as usize][e as usize];
            }
        }
        val
    }
}

/// `H(y,t) = (1−t)·F(y) + γ·t·G(y)` on the product of projective spaces, with
/// one affine patch equation per group.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub groups: Vec<GroupLayout>,
    /// Number of projective coordinates.
    pub n: usize,
    /// Number of target equations.
    pub neq: usize,
    pub nvars: usize,
    pub var_pos: Vec<usize>,
    target: Vec<NumPoly>,
    /// `forms[i][j][k]`: k-th linear form of equation i in group j.
    forms: Vec<Vec<Vec<Vec<Complex64>>>>,
    pub degrees: Vec<Vec<u32>>,
    pub patches: Vec<Vec<Complex64>>,
    pub gamma: Complex64,
    max_exp: usize,
}

/// Values needed by the tracker at one point.
pub struct Eval {
    pub h: Vec<Complex64>,
    pub jac: Mat,
    pub ht: Vec<Complex64>,
}

pub(crate) fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

impl Homotopy {
    pub fn new(
        sys: &PolySystem,
        grouping: &VariableGrouping,
        rng: &mut ChaCha8Rng,
        gamma: Option<Complex64>,
    ) -> Result<Self> {
        let deg = DegreeMatrix::from_system(sys, grouping)?;
        if grouping.total_dim() != sys.len() {
            return Err(Error::Dimension(format!(
                "{} equations but the grouping has total dimension {}",
                sys.len(),
                grouping.total_dim()
            )));
        }
        let nvars = sys.vars().len();
        let mut groups = Vec::new();
        let mut var_pos = vec![0usize; nvars];
        let mut n = 0;
        for g in &grouping.groups {
            let mut coords = Vec::new();
            let hom = if g.homogeneous {
                None
            } else {
                coords.push(n);
                n += 1;
                Some(n - 1)
            };
            for &v in &g.vars {
                var_pos[v] = n;
                coords.push(n);
                n += 1;
            }
            groups.push(GroupLayout { coords, hom, vars: g.vars.clone(), dim: g.dim() });
        }
        let mut max_exp = 1;
        let mut target = Vec::with_capacity(sys.len());
        for (i, eq) in sys.equations().iter().enumerate() {
            let mut terms = Vec::with_capacity(eq.num_terms());
            let scale = eq.terms().map(|(_, c)| c.to_complex().norm()).fold(0.0, f64::max);
            let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            for (m, c) in eq.terms() {
                let mut exps: Vec<(u16, u16)> = Vec::new();
                for (v, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        exps.push((var_pos[v] as u16, e));
                    }
                }
                for (j, gl) in groups.iter().enumerate() {
                    if let Some(h) = gl.hom {
                        let dj = deg.rows[i][j] as u16;
                        let used: u16 = gl.vars.iter().map(|&v| m.0[v]).sum();
                        if dj > used {
                            exps.push((h as u16, dj - used));
                        }
                    }
                }
                for &(_, e) in &exps {
                    max_exp = max_exp.max(e as usize);
                }
                terms.push(Term { coef: c.to_complex() * scale, exps });
            }
            target.push(NumPoly { terms });
        }
        let forms = deg
            .rows
            .iter()
            .map(|row| {
                groups
                    .iter()
                    .zip(row)
                    .map(|(gl, &d)| {
                        (0..d).map(|_| gl.coords.iter().map(|_| random_complex(rng)).collect()).collect()
                    })
                    .collect()
            })
            .collect();
        let patches = groups.iter().map(|gl| gl.coords.iter().map(|_| random_complex(rng)).collect()).collect();
        let gamma = gamma.unwrap_or_else(|| random_unit(rng));
        Ok(Homotopy {
            groups,
            n,
            neq: sys.len(),
            nvars,
            var_pos,
            target,
            forms,
            degrees: deg.rows,
            patches,
            gamma,
            max_exp,
        })
    }

    /// Total number of unknowns and equations of the patched system.
    pub fn size(&self) -> usize {
        self.n
    }

    fn powers(&self, y: &[Complex64]) -> Vec<Vec<Complex64>> {
        y.iter()
            .map(|&z| {
                let mut p = Vec::with_capacity(self.max_exp + 1);
                p.push(ONE);
                for k in 1..=self.max_exp {
                    p.push(p[k - 1] * z);
                }
                p
            })
            .collect()
    }

    fn start_eq(&self, i: usize, y: &[Complex64], grad: Option<&mut [Complex64]>) -> Complex64 {
        let mut factors: Vec<(Complex64, usize, usize)> = Vec::new();
        for (j, gl) in self.groups.iter().enumerate() {
            for (k, f) in self.forms[i][j].iter().enumerate() {
                let v: Complex64 = gl.coords.iter().zip(f).map(|(&c, a)| a * y[c]).sum();
                factors.push((v, j, k));
            }
        }
        let m = factors.len();
        let mut pre = vec![ONE; m + 1];
        for (k, f) in factors.iter().enumerate() {
            pre[k + 1] = pre[k] * f.0;
        }
        if let Some(g) = grad {
            let mut suf = ONE;
            for idx in (0..m).rev() {
                let (v, j, k) = factors[idx];
                let w = pre[idx] * suf;
                for (&c, a) in self.groups[j].coords.iter().zip(&self.forms[i][j][k]) {
                    g[c] += w * a;
                }
                suf *= v;
            }
        }
        pre[m]
    }

    /// Target values only.
    pub fn target(&self, y: &[Complex64]) -> Vec<Complex64> {
        let pw = self.powers(y);
        self.target.iter().map(|p| p.eval(&pw)).collect()
    }

    /// Largest relative residual `|Fᵢ(y)| / Σ|cₜyᵗ|`, with each group scaled to unit size.
    pub fn relative_residual(&self, y: &[Complex64]) -> f64 {
        let yn = self.normalize_groups(y);
        let pw = self.powers(&yn);
        self.target
            .iter()
            .map(|p| {
                let s = p.eval_abs(&pw);
                if s == 0.0 {
                    0.0
                } else {
                    p.eval(&pw).norm() / s
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|Fᵢ(y)|` of the coefficient-scaled equations with each group
    /// scaled to unit size.
    pub fn scaled_residual(&self, y: &[Complex64]) -> f64 {
        let pw = self.powers(&self.normalize_groups(y));
        self.target.iter().map(|p| p.eval(&pw).norm()).fold(0.0, f64::max)
    }

    /// Each group divided by its largest-modulus coordinate.
    pub fn normalize_groups(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = y.to_vec();
        for gl in &self.groups {
            let (_, m) = gl.coords.iter().map(|&c| (c, y[c])).fold((0, ZERO), |acc, x| {
                if x.1.norm() > acc.1.norm() {
                    x
                } else {
                    acc
                }
            });
            if m.norm() > 0.0 {
                for &c in &gl.coords {
                    out[c] = y[c] / m;
                }
            }
        }
        out
    }

    pub fn eval(&self, y: &[Complex64], t: Complex64) -> Eval {
        let n = self.n;
        let pw = self.powers(y);
        let mut h = vec![ZERO; n];
        let mut ht = vec![ZERO; n];
        let mut jac = Mat::zeros(n);
        let one_t = ONE - t;
        let gt = self.gamma * t;
        let mut gf = vec![ZERO; n];
        let mut gg = vec![ZERO; n];
        for i in 0..self.neq {
            gf.iter_mut().for_each(|z| *z = ZERO);
            gg.iter_mut().for_each(|z| *z = ZERO);
            let f = self.target[i].eval_grad(&pw, &mut gf);
            let g = self.start_eq(i, y, Some(&mut gg));
            h[i] = one_t * f + gt * g;
            ht[i] = self.gamma * g - f;
            for c in 0..n {
                *jac.at_mut(i, c) = one_t * gf[c] + gt * gg[c];
            }
        }
        for (j, gl) in self.groups.iter().enumerate() {
            let r = self.neq + j;
            let mut v = -ONE;
            for (&c, a) in gl.coords.iter().zip(&self.patches[j]) {
                v += a * y[c];
                *jac.at_mut(r, c) = *a;
            }
            h[r] = v;
        }
        Eval { h, jac, ht }
    }

    /// Number of start points, which equals the Bézout number.
    pub fn start_count(&self) -> u128 {
        crate::bezout::bezout_from_degrees(
            &DegreeMatrix { rows: self.degrees.clone() },
            &self.groups.iter().map(|g| g.dim).collect::<Vec<_>>(),
        )
        .unwrap_or(0)
    }

    /// Every choice of one linear factor per equation that leaves each group
    /// with exactly `dim` chosen factors, as `(group, factor)` per equation.
    pub fn start_choices(&self) -> Vec<Vec<(u16, u16)>> {
        let mut out = Vec::new();
        let mut left: Vec<usize> = self.groups.iter().map(|g| g.dim).collect();
        let mut cur = Vec::with_capacity(self.neq);
        self.choose(0, &mut left, &mut cur, &mut out);
        out
    }

    fn choose(&self, i: usize, left: &mut [usize], cur: &mut Vec<(u16, u16)>, out: &mut Vec<Vec<(u16, u16)>>) {
        if i == self.neq {
            out.push(cur.clone());
            return;
        }
        for j in 0..self.groups.len() {
            if left[j] == 0 {
                continue;
            }
            left[j] -= 1;
            for k in 0..self.degrees[i][j] {
                cur.push((j as u16, k as u16));
                self.choose(i + 1, left, cur, out);
                cur.pop();
            }
            left[j] += 1;
        }
    }

    /// Solves the linear conditions of a start choice group by group.
    pub fn start_point(&self, choice: &[(u16, u16)]) -> Option<Vec<Complex64>> {
        let mut y = vec![ZERO; self.n];
        for (j, gl) in self.groups.iter().enumerate() {
            let m = gl.coords.len();
            let mut a = Mat::zeros(m);
            let mut b = vec![ZERO; m];
            let mut r = 0;
            for (i, &(g, k)) in choice.iter().enumerate() {
                if g as usize == j {
                    for (c, v) in self.forms[i][j][k as usize].iter().enumerate() {
                        *a.at_mut(r, c) = *v;
                    }
                    r += 1;
                }
            }
            for (c, v) in self.patches[j].iter().enumerate() {
                *a.at_mut(r, c) = *v;
            }
            b[r] = ONE;
            let lu = Lu::new(a)?;
            if lu.pivot_ratio > 1e12 {
                return None;
            }
            for (c, v) in gl.coords.iter().zip(lu.solve(&b)) {
                y[*c] = v;
            }
        }
        Some(y)
    }

    /// Affine values of the original variables; homogeneous groups are scaled
    /// so their largest-modulus coordinate is one. Returns the largest affine
    /// modulus alongside.
    pub fn dehomogenize(&self, y: &[Complex64]) -> (Vec<Complex64>, f64) {
        let mut x = vec![ZERO; self.nvars];
        let mut big = 0.0f64;
        for gl in &self.groups {
            let den = match gl.hom {
                Some(h) => y[h],
                None => gl
                    .vars
                    .iter()
                    .map(|&v| y[self.var_pos[v]])
                    .fold(ZERO, |acc, z| if z.norm() > acc.norm() { z } else { acc }),
            };
            for &v in &gl.vars {
                let z = y[self.var_pos[v]];
                let val = if den.norm() > 0.0 { z / den } else { Complex64::new(f64::INFINITY, 0.0) };
                if gl.hom.is_some() {
                    big = big.max(val.norm());
                }
                x[v] = val;
            }
            if gl.hom.is_some() && den.norm() == 0.0 {
                big = f64::INFINITY;
            }
        }
        (x, big)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bezout::VariableGrouping;
    use rand::SeedableRng;

    fn setup() -> (PolySystem, VariableGrouping) {
        let sys = PolySystem::from_strings(&["x", "y"], &["(1)*x*y + (1)*x + (1)", "(1)*x + (1)*y"]).unwrap();
        let names = vec!["x".to_string(), "y".to_string()];
        let g = VariableGrouping::parse(&names, "x;y").unwrap();
        (sys, g)
    }

    #[test]
    fn start_points_solve_start_system() {
        let (sys, g) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = Homotopy::new(&sys, &g, &mut rng, None).unwrap();
        let choices = h.start_choices();
        assert_eq!(choices.len() as u128, h.start_count());
        assert_eq!(choices.len(), 2);
        for c in &choices {
            let y = h.start_point(c).unwrap();
            let e = h.eval(&y, ONE);
            assert!(e.h.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let (sys, g) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = Homotopy::new(&sys, &g, &mut rng, None).unwrap();
        let y: Vec<Complex64> = (0..h.n).map(|_| random_complex(&mut rng)).collect();
        let t = Complex64::new(0.3, 0.1);
        let e = h.eval(&y, t);
        let eps = 1e-7;
        for c in 0..h.n {
            let mut yp = y.clone();
            yp[c] += eps;
            let ep = h.eval(&yp, t);
            for r in 0..h.n {
                let fd = (ep.h[r] - e.h[r]) / eps;
                assert!((fd - e.jac.at(r, c)).norm() < 1e-5);
            }
        }
        let et = h.eval(&y, t + eps);
        for r in 0..h.n {
            assert!(((et.h[r] - e.h[r]) / eps - e.ht[r]).norm() < 1e-5);
        }
    }
}
