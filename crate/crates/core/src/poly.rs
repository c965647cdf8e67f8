//! Sparse multivariate polynomials over ℚ(i).
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic over the declared variable order. The last entry of the
//! map is therefore the leading term, which exact division relies on.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::QI;

/// Ordered variable names shared by every polynomial of one ring.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_in(&self, idx: &[usize]) -> u32 {
        idx.iter().map(|&i| self.0[i] as u32).sum()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    fn div(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, QI>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: QI) -> Self {
        let mut p = Polynomial::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Polynomial::constant(vars, QI::one())
    }

    /// The variable at position `i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0u16; vars.len()];
        e[i] = 1;
        Polynomial::from_terms(vars, [(Monomial(e), QI::one())])
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Usage(format!("unknown variable '{name}'")))?;
        Ok(Polynomial::var(vars, i))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, QI)>>(vars: &Vars, terms: I) -> Self {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "exponent length must match variable count");
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &QI) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QI)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> QI {
        self.terms.get(&Monomial::one(self.nvars())).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<(&Monomial, &QI)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i] as u32).max().unwrap_or(0)
    }

    /// Degree with respect to a group of variables taken jointly.
    pub fn degree_in_set(&self, idx: &[usize]) -> u32 {
        self.terms.keys().map(|m| m.degree_in(idx)).max().unwrap_or(0)
    }

    /// `Some(d)` when every term has degree exactly `d` in the given variables.
    /// The zero polynomial is homogeneous of every degree and reports `Some(0)`.
    pub fn homogeneous_degree_in(&self, idx: &[usize]) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree_in(idx));
        let Some(first) = it.next() else { return Some(0) };
        it.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, c: &QI) -> Self {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.conj())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[i] -= 1;
            out.add_term(nm, &(c * &QI::from_int(e as i64)));
        }
        out
    }

    pub fn eval(&self, point: &[QI]) -> QI {
        assert_eq!(point.len(), self.nvars());
        let mut acc = QI::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u32);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_complex();
                for (x, &e) in point.iter().zip(&m.0) {
                    if e > 0 {
                        t *= x.powu(e as u32);
                    }
                }
                t
            })
            .sum()
    }

    /// Sum of absolute term values at `point`; the scale used for relative residuals.
    pub fn eval_abs_terms(&self, point: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_complex().norm();
                for (x, &e) in point.iter().zip(&m.0) {
                    if e > 0 {
                        t *= x.norm().powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Replaces variable `i` by the polynomial `q` (same ring).
    pub fn substitute(&self, i: usize, q: &Polynomial) -> Self {
        assert!(self.same_ring(q));
        let maxe = self.degree_in(i);
        let mut powers = vec![Polynomial::one(&self.vars)];
        for k in 1..=maxe as usize {
            powers.push(&powers[k - 1] * q);
        }
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = rest.0[i] as usize;
            rest.0[i] = 0;
            let base = Polynomial::from_terms(&self.vars, [(rest, c.clone())]);
            out = &out + &(&base * &powers[e]);
        }
        out
    }

    /// Re-expresses the polynomial over another variable list, matching by name.
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target
                    .iter()
                    .position(|t| t == v)
                    .ok_or_else(|| Error::Usage(format!("variable '{v}' missing in target ring")))
            })
            .collect::<Result<_>>()?;
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; target.len()];
            for (k, &x) in m.0.iter().enumerate() {
                if x > 0 {
                    e[map[k]] = x;
                }
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    pub fn same_ring(&self, o: &Polynomial) -> bool {
        Arc::ptr_eq(&self.vars, &o.vars) || self.vars == o.vars
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(self.same_ring(d));
        let (dm, dc) = d.leading()?;
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let qm = rm.div(dm);
            let qc = rc * &dc_inv;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), &-(c * &qc));
            }
            quot.add_term(qm, &qc);
        }
        Some(quot)
    }

    /// Multiplies by `x_i^e`.
    pub fn shift(&self, i: usize, e: u16) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut nm = m.clone();
                    nm.0[i] += e;
                    (nm, c.clone())
                })
                .collect(),
        }
    }

    pub fn parse(vars: &Vars, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut p = Polynomial::zero(vars);
        if s == "0" {
            return Ok(p);
        }
        for term in s.split(" + ") {
            let term = term.trim();
            let rest = term
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("term '{term}' must start with '('")))?;
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced coefficient in '{term}'")))?;
            let coef: QI = rest[..close].parse()?;
            let mut e = vec![0u16; vars.len()];
            let tail = &rest[close + 1..];
            for factor in tail.split('*').filter(|f| !f.is_empty()) {
                let (name, pw) = match factor.split_once('^') {
                    Some((n, k)) => {
                        (n, k.parse::<u16>().map_err(|err| Error::Parse(format!("{factor}: {err}")))?)
                    }
                    None => (factor, 1),
                };
                let i = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable '{name}'")))?;
                e[i] += pw;
            }
            p.add_term(Monomial(e), &coef);
        }
        Ok(p)
    }
}

impl fmt::Display for Polynomial {
    /// Canonical form: terms in descending graded-lex order, every coefficient
    /// parenthesised, joined by `" + "`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, &e) in self.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> std::ops::Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        assert!(self.same_ring(o));
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        assert!(self.same_ring(o));
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        assert!(self.same_ring(o));
        let mut out = Polynomial::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&QI::from_int(-1))
    }
}

impl std::ops::Add for Polynomial {
    type Output = Polynomial;
    fn add(self, o: Polynomial) -> Polynomial {
        &self + &o
    }
}

impl std::ops::Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, o: Polynomial) -> Polynomial {
        &self - &o
    }
}

impl std::ops::Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, o: Polynomial) -> Polynomial {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Vars {
        vars(&["x", "y", "z"])
    }

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(&ring(), s).unwrap()
    }

    #[test]
    fn display_parse_round_trip() {
        let q = p("(3/2)*x^2*y + (-1+2*I)*z + (5)");
        assert_eq!(q.to_string(), "(3/2)*x^2*y + (-1+2*I)*z + (5)");
        assert_eq!(Polynomial::parse(&ring(), &q.to_string()).unwrap(), q);
        assert_eq!(p("0"), Polynomial::zero(&ring()));
    }

    #[test]
    fn degrees() {
        let q = p("(1)*x^2*y + (1)*y*z^3 + (1)");
        assert_eq!(q.total_degree(), 4);
        assert_eq!(q.degree_in(2), 3);
        assert_eq!(q.degree_in_set(&[0, 1]), 3);
        assert_eq!(q.homogeneous_degree_in(&[0, 1]), None);
        assert_eq!(p("(1)*x^2 + (3)*x*y").homogeneous_degree_in(&[0, 1]), Some(2));
    }

    #[test]
    fn exact_division() {
        let a = p("(1)*x^2 + (1)*y^2");
        let b = p("(2)*x*z + (-1)*y + (7)");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(b.div_exact(&a).is_none());
        assert!((&prod + &Polynomial::one(&ring())).div_exact(&a).is_none());
    }

    #[test]
    fn substitute_and_embed() {
        let q = p("(1)*x^2 + (1)*y");
        let s = q.substitute(0, &p("(1)*y + (1)"));
        assert_eq!(s, p("(1)*y^2 + (3)*y + (1)"));
        let bigger = vars(&["w", "x", "y", "z"]);
        let e = q.embed(&bigger).unwrap();
        assert_eq!(e.to_string(), "(1)*x^2 + (1)*y");
        assert!(e.embed(&vars(&["x"])).is_err());
    }
}
