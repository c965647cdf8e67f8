//! Lagrange functions, their critical-point systems, and squaring up.

use std::fmt;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::QI;
use crate::geometry::{self, MotionRep, RepKind};
use crate::instance::ManipulatorInstance;
use crate::poly::{vars, Polynomial, Vars};
use crate::ratfunc::RationalFunc;

/// Where an equation of a [`PolySystem`] came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Numerator of `∂L/∂var`.
    Partial { var: String },
    /// Numerator of `Σⱼ coeffs[j]·∂L/∂mⱼ` over the homogeneous block.
    SquaredUp { coeffs: Vec<String> },
    /// A side constraint entered directly.
    Constraint,
    /// No recorded origin.
    Given,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Partial { var } => write!(f, "dL/d{var}"),
            Provenance::SquaredUp { coeffs } => write!(f, "sq[{}]", coeffs.join(",")),
            Provenance::Constraint => f.write_str("constraint"),
            Provenance::Given => f.write_str("eq"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(v) = s.strip_prefix("dL/d") {
            return Ok(Provenance::Partial { var: v.to_string() });
        }
        if let Some(inner) = s.strip_prefix("sq[").and_then(|r| r.strip_suffix(']')) {
            return Ok(Provenance::SquaredUp { coeffs: inner.split(',').map(str::to_string).collect() });
        }
        match s {
            "constraint" => Ok(Provenance::Constraint),
            "eq" => Ok(Provenance::Given),
            _ => Err(Error::Parse(format!("unknown equation tag '{s}'"))),
        }
    }
}

/// A factor stripped from an equation numerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedFactor {
    pub equation: usize,
    pub factor: String,
    pub power: u32,
}

#[derive(Clone, Debug)]
pub struct PolySystem {
    vars: Vars,
    equations: Vec<Polynomial>,
    provenance: Vec<Provenance>,
    /// Indices of the homogeneous motion parameters, if any.
    homogeneous_block: Option<Vec<usize>>,
    rep: Option<MotionRep>,
    removed: Vec<RemovedFactor>,
    /// The system before squaring up.
    original: Option<Box<PolySystem>>,
}

impl PolySystem {
    pub fn new(vars: Vars, equations: Vec<Polynomial>) -> Result<Self> {
        for e in &equations {
            if e.vars()[..] != vars[..] {
                return Err(Error::Dimension("equation over a different variable list".into()));
            }
        }
        let provenance = vec![Provenance::Given; equations.len()];
        Ok(PolySystem {
            vars,
            equations,
            provenance,
            homogeneous_block: None,
            rep: None,
            removed: Vec::new(),
            original: None,
        })
    }

    /// Parses equations written in the canonical polynomial syntax.
    pub fn from_strings<S: AsRef<str>>(names: &[S], eqs: &[S]) -> Result<Self> {
        let v = vars(names);
        let polys = eqs.iter().map(|e| Polynomial::parse(&v, e.as_ref())).collect::<Result<_>>()?;
        PolySystem::new(v, polys)
    }

    pub fn with_homogeneous_block(mut self, block: Vec<usize>) -> Self {
        self.homogeneous_block = Some(block);
        self
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn homogeneous_block(&self) -> Option<&[usize]> {
        self.homogeneous_block.as_deref()
    }

    pub fn homogeneous_names(&self) -> Option<Vec<String>> {
        self.homogeneous_block.as_ref().map(|b| b.iter().map(|&i| self.vars[i].clone()).collect())
    }

    pub fn rep(&self) -> Option<MotionRep> {
        self.rep
    }

    pub fn removed_factors(&self) -> &[RemovedFactor] {
        &self.removed
    }

    pub fn original(&self) -> Option<&PolySystem> {
        self.original.as_deref()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Whether the motion-parameter equations are all homogeneous in the block.
    pub fn block_homogeneous(&self) -> bool {
        match &self.homogeneous_block {
            None => false,
            Some(b) => self.equations.iter().all(|e| e.homogeneous_degree_in(b).is_some()),
        }
    }

    /// Canonical text form: a `variables` header, optional `homogeneous`
    /// header, then one `tag: polynomial` line per equation.
    pub fn to_text(&self) -> String {
        let mut s = format!("variables {}\n", self.vars.join(","));
        if let Some(h) = self.homogeneous_names() {
            s.push_str(&format!("homogeneous {}\n", h.join(",")));
        }
        for (p, e) in self.provenance.iter().zip(&self.equations) {
            s.push_str(&format!("{p}: {e}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty system".into()))?;
        let names = header
            .strip_prefix("variables ")
            .ok_or_else(|| Error::Parse("missing 'variables' header".into()))?;
        let v = vars(&names.split(',').map(str::trim).collect::<Vec<_>>());
        let mut block = None;
        let mut equations = Vec::new();
        let mut provenance = Vec::new();
        for line in lines {
            if let Some(h) = line.strip_prefix("homogeneous ") {
                let idx = h
                    .split(',')
                    .map(|n| {
                        v.iter()
                            .position(|x| x == n.trim())
                            .ok_or_else(|| Error::Parse(format!("unknown homogeneous variable '{n}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                block = Some(idx);
                continue;
            }
            let (tag, poly) =
                line.split_once(": ").ok_or_else(|| Error::Parse(format!("malformed equation line '{line}'")))?;
            provenance.push(tag.parse()?);
            equations.push(Polynomial::parse(&v, poly)?);
        }
        let mut sys = PolySystem::new(v, equations)?;
        sys.provenance = provenance;
        sys.homogeneous_block = block;
        Ok(sys)
    }
}

/// `L = d₃² − λV₃` or `L = d₃² − λV₃ − μM`, depending on the representation.
/// For DHR and QBR the constraint enters as `M/Δ`.
pub fn lagrange(inst: &ManipulatorInstance, rep: &MotionRep) -> Result<RationalFunc> {
    let tp = geometry::transformed_points(inst, rep)?;
    let d2 = geometry::distance_squared_from(inst, &tp);
    let v3 = geometry::singularity_polynomial_from(inst, &tp);
    let ring = &tp.vars;
    let l = Polynomial::var_named(ring, "l")?;
    let mut lag = d2.sub(&v3.mul_poly(&l));
    if let Some(m) = geometry::constraint_polynomial(inst, rep) {
        let mu = Polynomial::var_named(ring, "m")?;
        // homogeneous representations take M/Δ so that L stays of degree zero
        let exps = vec![u32::from(rep.kind.is_homogeneous()); tp.atoms.len()];
        lag = lag.sub(&RationalFunc::new(&mu * &m, &tp.atoms, exps));
    }
    Ok(lag)
}

/// Strips every power of each atom dividing `p`.
fn strip_atoms(p: Polynomial, atoms: &[Polynomial], eq: usize, log: &mut Vec<RemovedFactor>) -> Polynomial {
    let mut p = p;
    if p.is_zero() {
        return p;
    }
    for a in atoms {
        let mut k = 0;
        while let Some(q) = p.div_exact(a) {
            if q.is_constant() && !q.is_zero() && a.is_constant() {
                break;
            }
            p = q;
            k += 1;
        }
        if k > 0 {
            debug!("equation {eq}: removed factor ({a})^{k}");
            log.push(RemovedFactor { equation: eq, factor: a.to_string(), power: k });
        }
    }
    p
}

/// Numerators of `∂L/∂v` for every variable, in ring order.
pub fn derive_system(lag: &RationalFunc, rep: &MotionRep) -> Result<PolySystem> {
    let ring = lag.vars().clone();
    let mut equations = Vec::with_capacity(ring.len());
    let mut provenance = Vec::with_capacity(ring.len());
    let mut removed = Vec::new();
    for (i, name) in ring.iter().enumerate() {
        let d = lag.derivative(i);
        equations.push(strip_atoms(d.numerator().clone(), lag.atoms(), i, &mut removed));
        provenance.push(Provenance::Partial { var: name.clone() });
    }
    let block = rep.kind.is_homogeneous().then(|| (0..rep.num_params()).collect());
    Ok(PolySystem {
        vars: ring,
        equations,
        provenance,
        homogeneous_block: block,
        rep: Some(*rep),
        removed,
        original: None,
    })
}

/// `Σⱼ mⱼ·∂L/∂mⱼ ≡ 0` over the motion parameters `params` (ring indices).
pub fn euler_check(lag: &RationalFunc, params: &[usize]) -> bool {
    let ring = lag.vars();
    let mut acc = RationalFunc::from_poly(Polynomial::zero(ring), lag.atoms());
    for &j in params {
        let term = lag.derivative(j).mul_poly(&Polynomial::var(ring, j));
        acc = acc.add(&term);
    }
    acc.is_zero()
}

/// How the squaring-up combinations are chosen.
#[derive(Clone, Debug)]
pub enum SquareCoeffs {
    /// `(k−1)×k` matrix supplied explicitly.
    Matrix(Vec<Vec<QI>>),
    /// Gaussian integers with parts in `[−9, 9]` from a seeded generator.
    Seeded(u64),
}

/// The fixed combinations used in the worked BGR and DCKR computations, in
/// the representation's parameter order.
pub fn paper_coefficients(kind: RepKind) -> Option<Vec<Vec<QI>>> {
    let rows: [[(i64, i64); 4]; 3] = match kind {
        // order e0, e3, t1, t2
        RepKind::Bgr => [
            [(1, -7), (2, -3), (3, 5), (4, -6)],
            [(4, 2), (3, -3), (3, -2), (3, 5)],
            [(2, 3), (3, -5), (2, -2), (3, -3)],
        ],
        // stated in the order θ, θ̃, σ, σ̃; reordered to th, si, tht, sit below
        RepKind::Dckr => [
            [(3, -1), (3, -4), (2, -3), (5, -4)],
            [(1, -2), (3, -5), (2, -3), (5, -5)],
            [(7, -1), (3, -2), (1, -2), (5, -2)],
        ],
        _ => return None,
    };
    let order: [usize; 4] = if kind == RepKind::Dckr { [0, 2, 1, 3] } else { [0, 1, 2, 3] };
    Some(
        rows.iter()
            .map(|r| order.iter().map(|&k| QI::from_ints(r[k].0, r[k].1)).collect())
            .collect(),
    )
}

/// Rank of a matrix over ℚ(i), by exact Gaussian elimination.
pub fn rank(m: &[Vec<QI>]) -> usize {
    let mut a: Vec<Vec<QI>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= &t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Draws a full-rank `(k−1)×k` matrix of small Gaussian integers.
pub fn random_coefficients(k: usize, seed: u64) -> Vec<Vec<QI>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m: Vec<Vec<QI>> = (0..k - 1)
            .map(|_| (0..k).map(|_| QI::from_ints(rng.gen_range(-9..=9), rng.gen_range(-9..=9))).collect())
            .collect();
        if rank(&m) == k - 1 {
            return m;
        }
        debug!("rank-deficient squaring draw discarded");
    }
}

/// Replaces the `k` motion-parameter equations by `k−1` combinations.
pub fn square_up(sys: &PolySystem, lag: &RationalFunc, coeffs: &SquareCoeffs) -> Result<PolySystem> {
    let block = sys
        .homogeneous_block
        .clone()
        .ok_or_else(|| Error::Usage("squaring up needs a homogeneous parameter block".into()))?;
    let k = block.len();
    let matrix = match coeffs {
        SquareCoeffs::Matrix(m) => m.clone(),
        SquareCoeffs::Seeded(s) => random_coefficients(k, *s),
    };
    if matrix.len() != k - 1 || matrix.iter().any(|r| r.len() != k) {
        return Err(Error::Dimension(format!("squaring matrix must be {}x{k}", k - 1)));
    }
    if rank(&matrix) != k - 1 {
        return Err(Error::DegenerateSquaring("coefficient matrix is not of full rank".into()));
    }
    let ring = sys.vars.clone();
    let partials: Vec<RationalFunc> = block.iter().map(|&j| lag.derivative(j)).collect();
    let mut equations = Vec::with_capacity(sys.len() - 1);
    let mut provenance = Vec::with_capacity(sys.len() - 1);
    let mut removed = Vec::new();
    for row in &matrix {
        let mut acc = RationalFunc::from_poly(Polynomial::zero(&ring), lag.atoms());
        for (c, p) in row.iter().zip(&partials) {
            acc = acc.add(&p.scale(c));
        }
        let idx = equations.len();
        equations.push(strip_atoms(acc.numerator().clone(), lag.atoms(), idx, &mut removed));
        provenance.push(Provenance::SquaredUp { coeffs: row.iter().map(QI::to_string).collect() });
    }
    for (i, (e, p)) in sys.equations.iter().zip(&sys.provenance).enumerate() {
        if !block.contains(&i) {
            equations.push(e.clone());
            provenance.push(p.clone());
        }
    }
    Ok(PolySystem {
        vars: ring,
        equations,
        provenance,
        homogeneous_block: Some(block),
        rep: sys.rep,
        removed,
        original: Some(Box::new(sys.clone())),
    })
}

/// The square system fed to the solver: the derived system, squared up when
/// the representation is homogeneous.
pub fn build_system(inst: &ManipulatorInstance, rep: &MotionRep, coeffs: &SquareCoeffs) -> Result<(RationalFunc, PolySystem)> {
    let lag = lagrange(inst, rep)?;
    let sys = derive_system(&lag, rep)?;
    if rep.kind.is_homogeneous() {
        let sq = square_up(&sys, &lag, coeffs)?;
        Ok((lag, sq))
    } else {
        Ok((lag, sys))
    }
}

/// Default squaring coefficients: the fixed matrices where available when
/// `paper` is set, otherwise a seeded draw.
pub fn default_coeffs(kind: RepKind, paper: bool, seed: u64) -> SquareCoeffs {
    match (paper, paper_coefficients(kind)) {
        (true, Some(m)) => SquareCoeffs::Matrix(m),
        _ => SquareCoeffs::Seeded(seed),
    }
}
