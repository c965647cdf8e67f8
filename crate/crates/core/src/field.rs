//! Exact Gaussian rationals, the coefficient field ℚ(i).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An element `re + im·i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QI {
    pub re: BigRational,
    pub im: BigRational,
}

impl QI {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        QI { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        QI { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        QI::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        QI::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        QI::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        QI::from_ints(0, 1)
    }

    pub fn zero() -> Self {
        QI::default()
    }

    pub fn one() -> Self {
        QI::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QI::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `re² + im²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(QI::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QI::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Rationalizes a float by continued fractions; used by the `--inexact` input mode.
    pub fn rationalize(x: f64, tol: f64) -> Result<BigRational, Error> {
        if !x.is_finite() {
            return Err(Error::Parse(format!("cannot rationalize {x}")));
        }
        let sign = if x < 0.0 { -1 } else { 1 };
        let mut v = x.abs();
        // convergents h/k
        let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
        let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
        for _ in 0..64 {
            let a = v.floor();
            let ai = BigInt::from(a as i64);
            let h2 = &ai * &h1 + &h0;
            let k2 = &ai * &k1 + &k0;
            h0 = std::mem::replace(&mut h1, h2);
            k0 = std::mem::replace(&mut k1, k2);
            let approx = BigRational::new(h1.clone(), k1.clone());
            if (rat_to_f64(&approx) - x.abs()).abs() <= tol {
                return Ok(approx * BigInt::from(sign));
            }
            let frac = v - a;
            if frac < 1e-300 {
                break;
            }
            v = 1.0 / frac;
        }
        Ok(BigRational::new(h1, k1) * BigInt::from(sign))
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // scale huge numerators/denominators down before dividing
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as u64;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if n.is_sign_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Parses a single rational such as `-11/6`, `3` or `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        // exact decimal
        let neg = ip.trim_start().starts_with('-');
        let ip = ip.trim().trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n = BigInt::from_str(&digits).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n = BigInt::from_str(s).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    Ok(BigRational::from_integer(n))
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QI {
    /// `a/b`, `c/d*I` or `a/b+c/d*I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}*I", fmt_rat(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}*I", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
            }
        }
    }
}

impl fmt::Debug for QI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for QI {
    type Err = Error;

    /// Accepts the `Display` forms, plus `I`, `-I` and `a/b-I`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        let Some(body) = s.strip_suffix('I') else {
            return Ok(QI::real(parse_rational(&s)?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // split at the last top-level sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (re_part, im_part) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other)?,
        };
        let re = if re_part.is_empty() { BigRational::zero() } else { parse_rational(re_part)? };
        Ok(QI::new(re, im))
    }
}

impl From<BigRational> for QI {
    fn from(r: BigRational) -> Self {
        QI::real(r)
    }
}

impl<'a> Add<&'a QI> for &'a QI {
    type Output = QI;
    fn add(self, o: &QI) -> QI {
        QI::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a QI> for &'a QI {
    type Output = QI;
    fn sub(self, o: &QI) -> QI {
        QI::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a QI> for &'a QI {
    type Output = QI;
    fn mul(self, o: &QI) -> QI {
        if self.im.is_zero() && o.im.is_zero() {
            return QI::real(&self.re * &o.re);
        }
        QI::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a QI> for &'a QI {
    type Output = QI;
    fn div(self, o: &QI) -> QI {
        self * &o.inv().expect("division by zero in QI")
    }
}

impl Neg for &QI {
    type Output = QI;
    fn neg(self) -> QI {
        QI::new(-&self.re, -&self.im)
    }
}

impl Neg for QI {
    type Output = QI;
    fn neg(self) -> QI {
        QI::new(-self.re, -self.im)
    }
}

impl Add for QI {
    type Output = QI;
    fn add(self, o: QI) -> QI {
        &self + &o
    }
}

impl Sub for QI {
    type Output = QI;
    fn sub(self, o: QI) -> QI {
        &self - &o
    }
}

impl Mul for QI {
    type Output = QI;
    fn mul(self, o: QI) -> QI {
        &self * &o
    }
}

impl Div for QI {
    type Output = QI;
    fn div(self, o: QI) -> QI {
        &self / &o
    }
}

impl AddAssign<&QI> for QI {
    fn add_assign(&mut self, o: &QI) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&QI> for QI {
    fn sub_assign(&mut self, o: &QI) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&QI> for QI {
    fn mul_assign(&mut self, o: &QI) {
        *self = &*self * o;
    }
}
