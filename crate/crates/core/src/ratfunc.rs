//! Rational functions whose denominators are products of known atom polynomials.
//!
//! Every denominator arising from the motion representations is a power of
//! `Δ = e0² + e3²` or a product of powers of `θ` and `θ̃`. Storing the
//! denominator as an exponent vector over those atoms makes reduction a matter
//! of exact trial division, with no multivariate GCD required.

use std::sync::Arc;

use num_complex::Complex64;

use crate::field::QI;
use crate::poly::{Polynomial, Vars};

#[derive(Clone, Debug)]
pub struct RationalFunc {
    num: Polynomial,
    atoms: Arc<[Polynomial]>,
    exps: Vec<u32>,
}

impl PartialEq for RationalFunc {
    fn eq(&self, other: &Self) -> bool {
        let a = self.reduced();
        let b = other.reduced();
        if a.atoms.len() == b.atoms.len() {
            return a.num == b.num && a.exps == b.exps && a.atoms[..] == b.atoms[..];
        }
        // cross-multiplied comparison for differing atom lists
        &a.num * &b.denominator() == &b.num * &a.denominator()
    }
}

impl RationalFunc {
    pub fn from_poly(num: Polynomial, atoms: &Arc<[Polynomial]>) -> Self {
        let n = atoms.len();
        RationalFunc { num, atoms: atoms.clone(), exps: vec![0; n] }
    }

    /// `num / Π atoms[k]^exps[k]`, reduced.
    pub fn new(num: Polynomial, atoms: &Arc<[Polynomial]>, exps: Vec<u32>) -> Self {
        assert_eq!(atoms.len(), exps.len());
        RationalFunc { num, atoms: atoms.clone(), exps }.reduced()
    }

    pub fn polynomial(num: Polynomial) -> Self {
        RationalFunc { num, atoms: Arc::from(Vec::new()), exps: Vec::new() }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn atoms(&self) -> &Arc<[Polynomial]> {
        &self.atoms
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn denominator(&self) -> Polynomial {
        let mut d = Polynomial::one(self.num.vars());
        for (a, &e) in self.atoms.iter().zip(&self.exps) {
            if e > 0 {
                d = &d * &a.pow(e);
            }
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Cancels every atom that divides the numerator.
    pub fn reduced(&self) -> Self {
        let mut out = self.clone();
        if out.num.is_zero() {
            out.exps.iter_mut().for_each(|e| *e = 0);
            return out;
        }
        for k in 0..out.atoms.len() {
            while out.exps[k] > 0 {
                match out.num.div_exact(&out.atoms[k]) {
                    Some(q) => {
                        out.num = q;
                        out.exps[k] -= 1;
                    }
                    None => break,
                }
            }
        }
        out
    }

    fn unify(&self, o: &RationalFunc) -> (RationalFunc, RationalFunc) {
        if self.atoms.is_empty() && !o.atoms.is_empty() {
            return (RationalFunc::from_poly(self.num.clone(), &o.atoms), o.clone());
        }
        if o.atoms.is_empty() && !self.atoms.is_empty() {
            return (self.clone(), RationalFunc::from_poly(o.num.clone(), &self.atoms));
        }
        assert!(
            Arc::ptr_eq(&self.atoms, &o.atoms) || self.atoms[..] == o.atoms[..],
            "rational functions over different denominator atoms"
        );
        (self.clone(), o.clone())
    }

    /// Numerator rescaled to the denominator `Π atoms^target`.
    fn lifted(&self, target: &[u32]) -> Polynomial {
        let mut n = self.num.clone();
        for (k, (&t, &e)) in target.iter().zip(&self.exps).enumerate() {
            if t > e {
                n = &n * &self.atoms[k].pow(t - e);
            }
        }
        n
    }

    fn add_sub(&self, o: &RationalFunc, negate: bool) -> RationalFunc {
        let (a, b) = self.unify(o);
        let target: Vec<u32> = a.exps.iter().zip(&b.exps).map(|(x, y)| *x.max(y)).collect();
        let na = a.lifted(&target);
        let nb = b.lifted(&target);
        let num = if negate { &na - &nb } else { &na + &nb };
        RationalFunc::new(num, &a.atoms, target)
    }

    pub fn add(&self, o: &RationalFunc) -> RationalFunc {
        self.add_sub(o, false)
    }

    pub fn sub(&self, o: &RationalFunc) -> RationalFunc {
        self.add_sub(o, true)
    }

    pub fn mul(&self, o: &RationalFunc) -> RationalFunc {
        let (a, b) = self.unify(o);
        let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
        RationalFunc::new(&a.num * &b.num, &a.atoms, exps)
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunc {
        RationalFunc::new(&self.num * p, &self.atoms, self.exps.clone())
    }

    pub fn scale(&self, c: &QI) -> RationalFunc {
        RationalFunc { num: self.num.scale(c), atoms: self.atoms.clone(), exps: self.exps.clone() }
    }

    pub fn neg(&self) -> RationalFunc {
        self.scale(&QI::from_int(-1))
    }

    /// Quotient rule over the factored denominator:
    /// `d(N/ΠAₖ^eₖ) = (N'·ΠAₖ − N·Σ eₖAₖ'·Π_{j≠k}Aⱼ) / ΠAₖ^(eₖ+1)`.
    pub fn derivative(&self, i: usize) -> RationalFunc {
        let active: Vec<usize> = (0..self.atoms.len()).filter(|&k| self.exps[k] > 0).collect();
        if active.is_empty() {
            return RationalFunc {
                num: self.num.derivative(i),
                atoms: self.atoms.clone(),
                exps: self.exps.clone(),
            };
        }
        let vars = self.num.vars();
        let mut prod_all = Polynomial::one(vars);
        for &k in &active {
            prod_all = &prod_all * &self.atoms[k];
        }
        let mut num = &self.num.derivative(i) * &prod_all;
        for &k in &active {
            let dk = self.atoms[k].derivative(i);
            if dk.is_zero() {
                continue;
            }
            let mut others = Polynomial::one(vars);
            for &j in &active {
                if j != k {
                    others = &others * &self.atoms[j];
                }
            }
            let term = &(&self.num * &dk) * &others;
            num = &num - &term.scale(&QI::from_int(self.exps[k] as i64));
        }
        let mut exps = self.exps.clone();
        for &k in &active {
            exps[k] += 1;
        }
        RationalFunc::new(num, &self.atoms, exps)
    }

    /// Evaluation at a numeric point; `None` when the denominator vanishes.
    pub fn eval_complex(&self, point: &[Complex64]) -> Option<Complex64> {
        let d = self.denominator().eval_complex(point);
        if d == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(self.num.eval_complex(point) / d)
    }

    pub fn eval(&self, point: &[QI]) -> Option<QI> {
        let d = self.denominator().eval(point);
        d.inv().map(|di| &self.num.eval(point) * &di)
    }

    /// Substitutes variable `i` by a polynomial. Atoms are substituted too, so the
    /// result is returned over its expanded denominator.
    pub fn substitute(&self, i: usize, q: &Polynomial) -> (Polynomial, Polynomial) {
        (self.num.substitute(i, q), self.denominator().substitute(i, q))
    }

    pub fn embed(&self, target: &Vars) -> crate::error::Result<RationalFunc> {
        let atoms: Vec<Polynomial> =
            self.atoms.iter().map(|a| a.embed(target)).collect::<crate::error::Result<_>>()?;
        Ok(RationalFunc { num: self.num.embed(target)?, atoms: atoms.into(), exps: self.exps.clone() })
    }

    /// `(deg numerator, deg denominator)` restricted to the variables `idx`.
    pub fn degrees_in(&self, idx: &[usize]) -> (u32, u32) {
        (self.num.degree_in_set(idx), self.denominator().degree_in_set(idx))
    }

    /// `(total deg numerator, total deg denominator)`.
    pub fn total_degrees(&self) -> (u32, u32) {
        (self.num.total_degree(), self.denominator().total_degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    fn setup() -> (Vars, Arc<[Polynomial]>) {
        let v = vars(&["a", "b", "c"]);
        let delta = Polynomial::parse(&v, "(1)*a^2 + (1)*b^2").unwrap();
        (v, Arc::from(vec![delta]))
    }

    #[test]
    fn reduction_cancels_atom_powers() {
        let (v, atoms) = setup();
        let n = Polynomial::parse(&v, "(1)*a^2*c + (1)*b^2*c").unwrap();
        let r = RationalFunc::new(n, &atoms, vec![2]);
        assert_eq!(r.exponents(), &[1]);
        assert_eq!(r.numerator().to_string(), "(1)*c");
        let again = r.reduced();
        assert_eq!(again.numerator(), r.numerator());
        assert_eq!(again.exponents(), r.exponents());
    }

    #[test]
    fn quotient_rule_matches_definition() {
        let (v, atoms) = setup();
        let n = Polynomial::parse(&v, "(3)*a*c + (1)*b^3").unwrap();
        let r = RationalFunc::new(n.clone(), &atoms, vec![1]);
        let d = r.derivative(0);
        // check d · Δ² == N_a·Δ − N·Δ_a
        let delta = &atoms[0];
        let lhs = d.numerator() * &delta.pow(2 - d.exponents()[0]);
        let rhs = &(&n.derivative(0) * delta) - &(&n * &delta.derivative(0));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn add_sub_to_zero() {
        let (v, atoms) = setup();
        let n = Polynomial::parse(&v, "(2)*c").unwrap();
        let r = RationalFunc::new(n, &atoms, vec![3]);
        let z = r.sub(&r);
        assert!(z.is_zero());
        assert!(z.is_polynomial());
        let two = r.add(&r);
        assert_eq!(two, r.scale(&QI::from_int(2)));
    }
}
