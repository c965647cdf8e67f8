//! Motion representations of planar Euclidean/equiform displacements and the
//! symbolic objects built from them: the transformed platform points, the pose
//! distance `d₃²`, the singularity polynomial `V₃` and the side constraint `M`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::QI;
use crate::instance::{ManipulatorInstance, Point2};
use crate::poly::{vars, Polynomial, Vars};
use crate::ratfunc::RationalFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    /// Point based: the first two transformed platform points.
    Pbr,
    /// Planar Euler–Rodrigues.
    Perr,
    /// Isotropic coordinates.
    Icr,
    /// Blaschke–Grünwald (planar Study parameters).
    Bgr,
    /// Davidson–Hunt.
    Dhr,
    /// Quaternion based.
    Qbr,
    /// Dual Cayley–Klein.
    Dckr,
}

impl RepKind {
    pub const ALL: [RepKind; 7] =
        [RepKind::Pbr, RepKind::Perr, RepKind::Icr, RepKind::Bgr, RepKind::Dhr, RepKind::Qbr, RepKind::Dckr];

    pub fn params(self) -> &'static [&'static str] {
        match self {
            RepKind::Pbr => &["x1a", "y1a", "x2a", "y2a"],
            RepKind::Perr => &["a1", "a2", "a3", "a4"],
            RepKind::Icr => &["k", "tau", "kt", "taut"],
            RepKind::Bgr => &["e0", "e3", "t1", "t2"],
            RepKind::Dhr => &["e0", "e3", "t0", "t1", "t2", "t3"],
            RepKind::Qbr => &["e0", "e3", "f0", "f3", "t1", "t2"],
            RepKind::Dckr => &["th", "si", "tht", "sit"],
        }
    }

    pub fn is_homogeneous(self) -> bool {
        matches!(self, RepKind::Bgr | RepKind::Dhr | RepKind::Qbr | RepKind::Dckr)
    }

    pub fn is_isotropic(self) -> bool {
        matches!(self, RepKind::Icr | RepKind::Dckr)
    }

    /// Whether the formulas need `i` in their coefficients.
    pub fn complex_field(self) -> bool {
        self.is_isotropic()
    }

    pub fn name(self) -> &'static str {
        match self {
            RepKind::Pbr => "pbr",
            RepKind::Perr => "perr",
            RepKind::Icr => "icr",
            RepKind::Bgr => "bgr",
            RepKind::Dhr => "dhr",
            RepKind::Qbr => "qbr",
            RepKind::Dckr => "dckr",
        }
    }

    /// The motion group a homogeneous representation parametrises; `None` for
    /// the non-homogeneous ones, which serve both groups.
    pub fn fixed_group(self) -> Option<MotionGroup> {
        match self {
            RepKind::Bgr | RepKind::Dckr => Some(MotionGroup::Se2),
            RepKind::Dhr | RepKind::Qbr => Some(MotionGroup::S2),
            _ => None,
        }
    }

    /// Identity displacement in this representation's parameters.
    pub fn identity_params(self) -> Vec<QI> {
        let ints: &[i64] = match self {
            RepKind::Pbr => &[],
            RepKind::Perr => &[1, 0, 0, 0],
            RepKind::Icr => &[1, 0, 1, 0],
            RepKind::Bgr => &[1, 0, 0, 0],
            RepKind::Dhr => &[1, 0, 0, 0, 0, 0],
            RepKind::Qbr => &[1, 0, 1, 0, 0, 0],
            RepKind::Dckr => &[1, 0, 1, 0],
        };
        ints.iter().map(|&v| QI::from_int(v)).collect()
    }
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RepKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown representation '{s}' (pbr|perr|icr|bgr|dhr|qbr|dckr)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionGroup {
    /// Euclidean motions; the resulting distance is `s₃`.
    Se2,
    /// Equiform motions; the resulting distance is `e₃`.
    S2,
}

impl MotionGroup {
    pub fn metric(self) -> &'static str {
        match self {
            MotionGroup::Se2 => "s3",
            MotionGroup::S2 => "e3",
        }
    }
}

impl fmt::Display for MotionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MotionGroup::Se2 => "se2",
            MotionGroup::S2 => "s2",
        })
    }
}

impl FromStr for MotionGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "se2" | "euclidean" => Ok(MotionGroup::Se2),
            "s2" | "equiform" => Ok(MotionGroup::S2),
            _ => Err(Error::Usage(format!("unknown motion mode '{s}' (se2|s2)"))),
        }
    }
}

/// A representation together with the Lagrange form it is used with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MotionRep {
    pub kind: RepKind,
    pub group: MotionGroup,
}

impl MotionRep {
    /// Checks the pairing of representation and motion group.
    pub fn new(kind: RepKind, group: MotionGroup) -> Result<Self> {
        if let Some(fixed) = kind.fixed_group() {
            if fixed != group {
                return Err(Error::Usage(format!(
                    "{kind} only supports mode {fixed}; its Lagrange function is fixed"
                )));
            }
        }
        Ok(MotionRep { kind, group })
    }

    /// Homogeneous representations have a fixed group; the others default to SE(2).
    pub fn natural(kind: RepKind) -> Self {
        MotionRep { kind, group: kind.fixed_group().unwrap_or(MotionGroup::Se2) }
    }

    /// `L = d² − λV₃ − μM` (true) versus `L = d² − λV₃` (false).
    pub fn constrained(&self) -> bool {
        match self.kind {
            RepKind::Bgr | RepKind::Dckr => false,
            RepKind::Dhr | RepKind::Qbr => true,
            _ => self.group == MotionGroup::Se2,
        }
    }

    pub fn multipliers(&self) -> &'static [&'static str] {
        if self.constrained() {
            &["l", "m"]
        } else {
            &["l"]
        }
    }

    pub fn variable_names(&self) -> Vec<&'static str> {
        self.kind.params().iter().chain(self.multipliers()).copied().collect()
    }

    pub fn ring(&self) -> Vars {
        vars(&self.variable_names())
    }

    pub fn num_params(&self) -> usize {
        self.kind.params().len()
    }

    /// Whether the motion-group label disagrees with the Lagrange form the
    /// representation is tied to. BGR/DCKR use the unconstrained form yet
    /// parametrise SE(2); DHR/QBR use the constrained form yet parametrise S(2).
    pub fn label_note(&self) -> Option<&'static str> {
        match self.kind {
            RepKind::Bgr | RepKind::Dckr => {
                Some("unconstrained Lagrange form over an SE(2) parametrisation; reported as s3")
            }
            RepKind::Dhr | RepKind::Qbr => {
                Some("constrained Lagrange form over an S(2) parametrisation; reported as e3")
            }
            _ => None,
        }
    }
}

impl fmt::Display for MotionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.group)
    }
}

/// A transformed point with coordinates sharing one denominator `Π atomsₖ^denₖ`.
#[derive(Clone, Debug)]
pub struct SymPoint {
    pub x: Polynomial,
    pub y: Polynomial,
    pub den: Vec<u32>,
}

/// The isotropic pair `(z, z̃)` over a shared denominator.
#[derive(Clone, Debug)]
pub struct IsoPoint {
    pub z: Polynomial,
    pub zt: Polynomial,
    pub den: Vec<u32>,
}

/// Symbolic images `Pᵢ^α` of the three platform points.
#[derive(Clone, Debug)]
pub struct TransformedPoints {
    pub rep: MotionRep,
    pub vars: Vars,
    pub atoms: Arc<[Polynomial]>,
    pub cartesian: [SymPoint; 3],
    pub isotropic: Option<[IsoPoint; 3]>,
}

impl TransformedPoints {
    /// Point `i` as a pair of reduced rational functions (x, y), or (z, z̃) for
    /// isotropic representations when `iso` is set.
    pub fn coordinates(&self, i: usize, iso: bool) -> [RationalFunc; 2] {
        if iso {
            if let Some(p) = &self.isotropic {
                let q = &p[i];
                return [
                    RationalFunc::new(q.z.clone(), &self.atoms, q.den.clone()),
                    RationalFunc::new(q.zt.clone(), &self.atoms, q.den.clone()),
                ];
            }
        }
        let q = &self.cartesian[i];
        [
            RationalFunc::new(q.x.clone(), &self.atoms, q.den.clone()),
            RationalFunc::new(q.y.clone(), &self.atoms, q.den.clone()),
        ]
    }

    pub fn denominator(&self) -> Polynomial {
        let mut d = Polynomial::one(&self.vars);
        for (a, &e) in self.atoms.iter().zip(&self.cartesian[0].den) {
            d = &d * &a.pow(e);
        }
        d
    }
}

fn rat(r: &BigRational) -> QI {
    QI::real(r.clone())
}

fn c(vars: &Vars, v: QI) -> Polynomial {
    Polynomial::constant(vars, v)
}

/// The atoms shared by every rational function of a representation.
pub fn denominator_atoms(kind: RepKind, v: &Vars) -> Arc<[Polynomial]> {
    let var = |n: &str| Polynomial::var_named(v, n).expect("representation variable");
    match kind {
        RepKind::Bgr | RepKind::Dhr | RepKind::Qbr => {
            let e0 = var("e0");
            let e3 = var("e3");
            Arc::from(vec![&(&e0 * &e0) + &(&e3 * &e3)])
        }
        RepKind::Dckr => Arc::from(vec![var("th"), var("tht")]),
        _ => Arc::from(Vec::new()),
    }
}

/// `Δ` (or `θθ̃`) as a polynomial; `None` for non-homogeneous representations.
pub fn spurious_denominator(kind: RepKind, v: &Vars) -> Option<Polynomial> {
    let atoms = denominator_atoms(kind, v);
    if atoms.is_empty() {
        return None;
    }
    let mut d = Polynomial::one(v);
    for a in atoms.iter() {
        d = &d * a;
    }
    Some(d)
}

/// Symbolic `Pᵢ^α` for the representation.
pub fn transformed_points(inst: &ManipulatorInstance, rep: &MotionRep) -> Result<TransformedPoints> {
    inst.validate()?;
    let v = rep.ring();
    let atoms = denominator_atoms(rep.kind, &v);
    let var = |n: &str| Polynomial::var_named(&v, n).expect("representation variable");
    let plat = &inst.platform_local;
    let mk = |x: Polynomial, y: Polynomial, den: Vec<u32>| SymPoint { x, y, den };
    let from_iso = |z: Polynomial, zt: Polynomial, den: Vec<u32>| {
        // x = (z + z̃)/2, y = (z − z̃)/(2i) = −i(z − z̃)/2
        let half = QI::ratio(1, 2);
        let x = (&z + &zt).scale(&half);
        let y = (&z - &zt).scale(&QI::new(BigRational::from_integer(0.into()), BigRational::new((-1).into(), 2.into())));
        (mk(x, y, den.clone()), IsoPoint { z, zt, den })
    };

    let (cartesian, isotropic): (Vec<SymPoint>, Option<Vec<IsoPoint>>) = match rep.kind {
        RepKind::Pbr => {
            let (x1, y1, x2, y2) = (var("x1a"), var("y1a"), var("x2a"), var("y2a"));
            // The similarity sending P₁P₂ onto P₁^αP₂^α, written without square
            // roots: w = (Δx + iΔy)(u − iv)/(u² + v²) with (u, v) = P₂ − P₁.
            let uv = plat[1].sub(&plat[0]);
            let len2 = uv.norm_sqr();
            let dx = &x2 - &x1;
            let dy = &y2 - &y1;
            let (u, vv) = (rat(&(&uv.x / &len2)), rat(&(&uv.y / &len2)));
            let wr = &dx.scale(&u) + &dy.scale(&vv);
            let wi = &dy.scale(&u) - &dx.scale(&vv);
            let pts = plat
                .iter()
                .map(|p| {
                    let r = p.sub(&plat[0]);
                    let (rx, ry) = (rat(&r.x), rat(&r.y));
                    let x = &(&x1 + &wr.scale(&rx)) - &wi.scale(&ry);
                    let y = &(&y1 + &wi.scale(&rx)) + &wr.scale(&ry);
                    mk(x, y, vec![])
                })
                .collect();
            (pts, None)
        }
        RepKind::Perr => {
            let (a1, a2, a3, a4) = (var("a1"), var("a2"), var("a3"), var("a4"));
            let r11 = &(&a1 * &a1) - &(&a2 * &a2);
            let r21 = (&a1 * &a2).scale(&QI::from_int(2));
            let pts = plat
                .iter()
                .map(|p| {
                    let (px, py) = (rat(&p.x), rat(&p.y));
                    let x = &(&r11.scale(&px) - &r21.scale(&py)) + &a3;
                    let y = &(&r21.scale(&px) + &r11.scale(&py)) + &a4;
                    mk(x, y, vec![])
                })
                .collect();
            (pts, None)
        }
        RepKind::Icr => {
            let (k, tau, kt, taut) = (var("k"), var("tau"), var("kt"), var("taut"));
            let (cart, iso): (Vec<_>, Vec<_>) = plat
                .iter()
                .map(|p| {
                    let (zp, zbp) = p.isotropic();
                    let z = &k.scale(&zp) + &tau;
                    let zt = &kt.scale(&zbp) + &taut;
                    from_iso(z, zt, vec![])
                })
                .unzip();
            (cart, Some(iso))
        }
        RepKind::Bgr | RepKind::Qbr | RepKind::Dhr => {
            let (e0, e3) = (var("e0"), var("e3"));
            let (t1, t2) = (var("t1"), var("t2"));
            let two = QI::from_int(2);
            let delta = atoms[0].clone();
            // translation t = −2·(g0 + i·g3)(t1 + i·t2) with g = e, or g = f for QBR
            let (g0, g3) = match rep.kind {
                RepKind::Qbr => (var("f0"), var("f3")),
                _ => (e0.clone(), e3.clone()),
            };
            let tx = (&(&g0 * &t1) - &(&g3 * &t2)).scale(&QI::from_int(-2));
            let ty = (&(&g0 * &t2) + &(&g3 * &t1)).scale(&QI::from_int(-2));
            // linear part [[m11, −m21], [m21, m11]]
            let (m11, m21) = match rep.kind {
                RepKind::Qbr => {
                    let (f0, f3) = (var("f0"), var("f3"));
                    (&(&e0 * &f0) - &(&e3 * &f3), &(&e0 * &f3) + &(&e3 * &f0))
                }
                _ => (&(&e0 * &e0) - &(&e3 * &e3), (&e0 * &e3).scale(&two)),
            };
            let pts = plat
                .iter()
                .map(|p| {
                    let (px, py) = (rat(&p.x), rat(&p.y));
                    let lx = &m11.scale(&px) - &m21.scale(&py);
                    let ly = &m21.scale(&px) + &m11.scale(&py);
                    if rep.kind == RepKind::Dhr {
                        let (t0, t3) = (var("t0"), var("t3"));
                        let s = &(&delta + &(&e0 * &t0)) + &(&e3 * &t3);
                        let x = &(&s * &lx) + &(&delta * &tx);
                        let y = &(&s * &ly) + &(&delta * &ty);
                        mk(x, y, vec![2])
                    } else {
                        mk(&lx + &tx, &ly + &ty, vec![1])
                    }
                })
                .collect();
            (pts, None)
        }
        RepKind::Dckr => {
            let (th, si, tht, sit) = (var("th"), var("si"), var("tht"), var("sit"));
            let two = QI::from_int(2);
            let (cart, iso): (Vec<_>, Vec<_>) = plat
                .iter()
                .map(|p| {
                    let (zp, zbp) = p.isotropic();
                    // θ(θz + 2σ)/(θθ̃), θ̃(θ̃z̄ + 2σ̃)/(θθ̃)
                    let z = &th * &(&th.scale(&zp) + &si.scale(&two));
                    let zt = &tht * &(&tht.scale(&zbp) + &sit.scale(&two));
                    from_iso(z, zt, vec![1, 1])
                })
                .unzip();
            (cart, Some(iso))
        }
    };
    let to3 = |v: Vec<SymPoint>| -> [SymPoint; 3] { v.try_into().expect("three points") };
    Ok(TransformedPoints {
        rep: *rep,
        vars: v.clone(),
        atoms,
        cartesian: to3(cartesian),
        isotropic: isotropic.map(|v| v.try_into().expect("three points")),
    })
}

/// `d₃² = (1/3)·Σ ⟨Pᵢ^α − Pᵢ^γ, Pᵢ^α − Pᵢ^γ⟩`.
pub fn distance_squared(inst: &ManipulatorInstance, rep: &MotionRep) -> Result<RationalFunc> {
    let tp = transformed_points(inst, rep)?;
    Ok(distance_squared_from(inst, &tp))
}

pub fn distance_squared_from(inst: &ManipulatorInstance, tp: &TransformedPoints) -> RationalFunc {
    let v = &tp.vars;
    let given = inst.given_points();
    let d = tp.denominator();
    let mut num = Polynomial::zero(v);
    match &tp.isotropic {
        Some(iso) => {
            // (z − z^γ)(z̃ − z̃^γ) per point
            for (p, g) in iso.iter().zip(&given) {
                let (zg, zbg) = g.isotropic();
                let a = &p.z - &d.scale(&zg);
                let b = &p.zt - &d.scale(&zbg);
                num = &num + &(&a * &b);
            }
        }
        None => {
            for (p, g) in tp.cartesian.iter().zip(&given) {
                let a = &p.x - &d.scale(&rat(&g.x));
                let b = &p.y - &d.scale(&rat(&g.y));
                num = &(&num + &(&a * &a)) + &(&b * &b);
            }
        }
    }
    let exps: Vec<u32> = tp.cartesian[0].den.iter().map(|e| 2 * e).collect();
    RationalFunc::new(num.scale(&QI::ratio(1, 3)), &tp.atoms, exps)
}

/// `V₃`: the determinant whose i-th column is `(Pᵢ^α − Bᵢ ; det(Bᵢ, Pᵢ^α − Bᵢ))`.
pub fn singularity_polynomial(inst: &ManipulatorInstance, rep: &MotionRep) -> Result<RationalFunc> {
    let tp = transformed_points(inst, rep)?;
    Ok(singularity_polynomial_from(inst, &tp))
}

pub fn singularity_polynomial_from(inst: &ManipulatorInstance, tp: &TransformedPoints) -> RationalFunc {
    let d = tp.denominator();
    // columns over the common denominator D
    let cols: Vec<[Polynomial; 3]> = tp
        .cartesian
        .iter()
        .zip(&inst.base)
        .map(|(p, b)| {
            let (bx, by) = (rat(&b.x), rat(&b.y));
            let u = &p.x - &d.scale(&bx);
            let w = &p.y - &d.scale(&by);
            // det(B, P − B) = bx·(y − by) − by·(x − bx) = bx·y − by·x
            let m = &p.y.scale(&bx) - &p.x.scale(&by);
            [u, w, m]
        })
        .collect();
    let det = det3(&cols);
    let exps: Vec<u32> = tp.cartesian[0].den.iter().map(|e| 3 * e).collect();
    RationalFunc::new(det, &tp.atoms, exps)
}

/// Determinant of the 3×3 matrix given column-wise.
fn det3(cols: &[[Polynomial; 3]]) -> Polynomial {
    let m = |r: usize, c: usize| &cols[c][r];
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| &(m(r1, c1) * m(r2, c2)) - &(m(r1, c2) * m(r2, c1));
    let a = m(0, 0) * &minor(1, 2, 1, 2);
    let b = m(0, 1) * &minor(1, 2, 0, 2);
    let cc = m(0, 2) * &minor(1, 2, 0, 1);
    &(&a - &b) + &cc
}

/// The side constraint `M`, or `None` for representations without one.
pub fn constraint_polynomial(inst: &ManipulatorInstance, rep: &MotionRep) -> Option<Polynomial> {
    if !rep.constrained() {
        return None;
    }
    let v = rep.ring();
    let var = |n: &str| Polynomial::var_named(&v, n).expect("representation variable");
    let one = c(&v, QI::one());
    Some(match rep.kind {
        RepKind::Pbr => {
            let dx = &var("x2a") - &var("x1a");
            let dy = &var("y2a") - &var("y1a");
            let len2 = inst.platform_local[1].sub(&inst.platform_local[0]).norm_sqr();
            &(&(&dx * &dx) + &(&dy * &dy)) - &c(&v, rat(&len2))
        }
        RepKind::Perr => &(&(&var("a1") * &var("a1")) + &(&var("a2") * &var("a2"))) - &one,
        RepKind::Icr => &(&var("k") * &var("kt")) - &one,
        RepKind::Dhr => &(&var("e0") * &var("t3")) - &(&var("e3") * &var("t0")),
        RepKind::Qbr => &(&var("e0") * &var("f3")) - &(&var("e3") * &var("f0")),
        RepKind::Bgr | RepKind::Dckr => unreachable!("unconstrained representations"),
    })
}

/// Numeric images `Pᵢ^α` in Cartesian coordinates at a complex parameter point
/// (only the motion parameters are read). `None` on a vanishing denominator.
pub fn eval_points(tp: &TransformedPoints, params: &[Complex64]) -> Option<[[Complex64; 2]; 3]> {
    let mut point = params.to_vec();
    point.resize(tp.vars.len(), Complex64::new(0.0, 0.0));
    let d = tp.denominator().eval_complex(&point);
    if d.norm() == 0.0 {
        return None;
    }
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 3];
    for (o, p) in out.iter_mut().zip(&tp.cartesian) {
        o[0] = p.x.eval_complex(&point) / d;
        o[1] = p.y.eval_complex(&point) / d;
    }
    Some(out)
}

/// Image of a rational point under the displacement given by exact parameters.
pub fn eval_points_exact(tp: &TransformedPoints, params: &[QI]) -> Option<[[QI; 2]; 3]> {
    let mut point = params.to_vec();
    point.resize(tp.vars.len(), QI::zero());
    let d = tp.denominator().eval(&point).inv()?;
    let pts: Vec<[QI; 2]> =
        tp.cartesian.iter().map(|p| [&p.x.eval(&point) * &d, &p.y.eval(&point) * &d]).collect();
    Some([pts[0].clone(), pts[1].clone(), pts[2].clone()])
}

/// Parameter values of a rigid/equiform displacement `x ↦ s·Rot(φ)·x + t`,
/// written as complex multiplier `w = s·e^{iφ}` and translation `t`, in each
/// non-homogeneous representation. Used by tests and the distance pipeline.
pub fn params_from_similarity(
    inst: &ManipulatorInstance,
    kind: RepKind,
    w: Complex64,
    t: Complex64,
) -> Option<Vec<Complex64>> {
    let apply = |p: &Point2| {
        let [x, y] = p.to_f64();
        w * Complex64::new(x, y) + t
    };
    match kind {
        RepKind::Pbr => {
            let p1 = apply(&inst.platform_local[0]);
            let p2 = apply(&inst.platform_local[1]);
            Some(vec![p1.re.into(), p1.im.into(), p2.re.into(), p2.im.into()])
        }
        RepKind::Perr => {
            let a = w.sqrt();
            Some(vec![a.re.into(), a.im.into(), t.re.into(), t.im.into()])
        }
        RepKind::Icr => Some(vec![w, t, w.conj(), t.conj()]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::GivenPose;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    pub(crate) fn sample() -> ManipulatorInstance {
        ManipulatorInstance::new(
            [Point2::from_ratios((0, 1), (0, 1)), Point2::from_ratios((7, 1), (0, 1)), Point2::from_ratios((3, 1), (5, 1))],
            [Point2::from_ratios((0, 1), (0, 1)), Point2::from_ratios((2, 1), (0, 1)), Point2::from_ratios((1, 1), (3, 2))],
            GivenPose::Motion { cos: r(0, 1), sin: r(1, 1), translation: Point2::from_ratios((2, 1), (1, 1)) },
        )
        .unwrap()
    }

    #[test]
    fn identity_parameters_fix_points() {
        let inst = sample();
        for kind in [RepKind::Perr, RepKind::Icr, RepKind::Bgr, RepKind::Dhr, RepKind::Qbr, RepKind::Dckr] {
            let rep = MotionRep::natural(kind);
            let tp = transformed_points(&inst, &rep).unwrap();
            let pts = eval_points_exact(&tp, &kind.identity_params()).unwrap();
            for (p, q) in pts.iter().zip(&inst.platform_local) {
                assert_eq!(p[0], QI::real(q.x.clone()), "{kind}");
                assert_eq!(p[1], QI::real(q.y.clone()), "{kind}");
            }
        }
    }

    #[test]
    fn pbr_identity_and_constraint() {
        let inst = sample();
        let rep = MotionRep::new(RepKind::Pbr, MotionGroup::Se2).unwrap();
        let tp = transformed_points(&inst, &rep).unwrap();
        let p = &inst.platform_local;
        let params: Vec<QI> =
            [&p[0].x, &p[0].y, &p[1].x, &p[1].y].iter().map(|v| QI::real((*v).clone())).collect();
        let pts = eval_points_exact(&tp, &params).unwrap();
        assert_eq!(pts[2][0], QI::real(p[2].x.clone()));
        assert_eq!(pts[2][1], QI::real(p[2].y.clone()));
        let m = constraint_polynomial(&inst, &rep).unwrap();
        let mut full = params.clone();
        full.extend([QI::zero(), QI::zero()]);
        assert!(m.eval(&full).is_zero());
    }

    #[test]
    fn constraints_vanish_at_unit_parameters() {
        let inst = sample();
        let perr = MotionRep::new(RepKind::Perr, MotionGroup::Se2).unwrap();
        let m = constraint_polynomial(&inst, &perr).unwrap();
        let pt: Vec<QI> = [1, 0, 5, 7, 0, 0].iter().map(|&v| QI::from_int(v)).collect();
        assert!(m.eval(&pt).is_zero());
        let icr = MotionRep::new(RepKind::Icr, MotionGroup::Se2).unwrap();
        let m = constraint_polynomial(&inst, &icr).unwrap();
        let pt: Vec<QI> = [1, 3, 1, 2, 0, 0].iter().map(|&v| QI::from_int(v)).collect();
        assert!(m.eval(&pt).is_zero());
        assert!(constraint_polynomial(&inst, &MotionRep::natural(RepKind::Bgr)).is_none());
        assert!(constraint_polynomial(&inst, &MotionRep::natural(RepKind::Dckr)).is_none());
        assert!(constraint_polynomial(&inst, &MotionRep::new(RepKind::Perr, MotionGroup::S2).unwrap()).is_none());
    }

    #[test]
    fn identity_gives_zero_distance_for_identity_pose() {
        let mut inst = sample();
        inst.pose = GivenPose::Motion { cos: r(1, 1), sin: r(0, 1), translation: Point2::from_ratios((0, 1), (0, 1)) };
        for kind in [RepKind::Perr, RepKind::Icr, RepKind::Bgr, RepKind::Dhr, RepKind::Qbr, RepKind::Dckr] {
            let rep = MotionRep::natural(kind);
            let d2 = distance_squared(&inst, &rep).unwrap();
            let mut pt = kind.identity_params();
            pt.resize(rep.ring().len(), QI::zero());
            assert!(d2.eval(&pt).unwrap().is_zero(), "{kind}");
        }
    }

    #[test]
    fn pure_translation_distance() {
        let mut inst = sample();
        inst.pose = GivenPose::Motion { cos: r(1, 1), sin: r(0, 1), translation: Point2::from_ratios((0, 1), (0, 1)) };
        let rep = MotionRep::new(RepKind::Perr, MotionGroup::S2).unwrap();
        let d2 = distance_squared(&inst, &rep).unwrap();
        let v = rep.ring();
        let a3 = Polynomial::var_named(&v, "a3").unwrap();
        let a4 = Polynomial::var_named(&v, "a4").unwrap();
        let expect = &(&a3 * &a3) + &(&a4 * &a4);
        let one = Polynomial::one(&v);
        let restricted = d2.numerator().substitute(0, &one).substitute(1, &Polynomial::zero(&v));
        assert_eq!(restricted, expect);
    }

    fn bgr_from_dckr(th: Complex64, si: Complex64, tht: Complex64, sit: Complex64, sign: f64) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        vec![(th + tht) / 2.0, -i * (th - tht) / 2.0, sign * (si + sit) / 2.0, -sign * i * (si - sit) / 2.0]
    }

    #[test]
    fn bgr_dckr_linear_relation() {
        let inst = sample();
        let bgr = transformed_points(&inst, &MotionRep::natural(RepKind::Bgr)).unwrap();
        let dckr = transformed_points(&inst, &MotionRep::natural(RepKind::Dckr)).unwrap();
        let (th, si, tht, sit) =
            (Complex64::new(0.7, -0.3), Complex64::new(1.1, 0.4), Complex64::new(-0.2, 0.9), Complex64::new(0.5, -1.3));
        let d = eval_points(&dckr, &[th, si, tht, sit]).unwrap();
        let close = |b: &[[Complex64; 2]; 3]| b.iter().zip(&d).all(|(p, q)| (p[0] - q[0]).norm() + (p[1] - q[1]).norm() < 1e-12);
        // the translation parameters correspond up to sign
        let b = eval_points(&bgr, &bgr_from_dckr(th, si, tht, sit, -1.0)).unwrap();
        assert!(close(&b));
        let b = eval_points(&bgr, &bgr_from_dckr(th, si, tht, sit, 1.0)).unwrap();
        assert!(!close(&b));
    }

    #[test]
    fn rep_mode_pairing() {
        assert!(MotionRep::new(RepKind::Bgr, MotionGroup::S2).is_err());
        assert!(MotionRep::new(RepKind::Dhr, MotionGroup::Se2).is_err());
        assert!(MotionRep::new(RepKind::Icr, MotionGroup::S2).is_ok());
        assert_eq!("QBR".parse::<RepKind>().unwrap(), RepKind::Qbr);
        assert!("xyz".parse::<RepKind>().is_err());
    }
}
