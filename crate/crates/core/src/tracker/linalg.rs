//! Dense complex linear algebra for small systems.

use num_complex::Complex64;

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

/// LU factorisation with partial pivoting.
pub struct Lu {
    lu: Mat,
    piv: Vec<usize>,
    /// Ratio of the largest to the smallest pivot modulus.
    pub pivot_ratio: f64,
}

impl Lu {
    pub fn new(mut m: Mat) -> Option<Lu> {
        let n = m.n;
        let mut piv: Vec<usize> = (0..n).collect();
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, m.at(i, k).norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(best > 0.0) || !best.is_finite() {
                return None;
            }
            pmax = pmax.max(best);
            pmin = pmin.min(best);
            if p != k {
                for j in 0..n {
                    m.a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let inv = m.at(k, k).inv();
            for i in k + 1..n {
                let f = m.at(i, k) * inv;
                *m.at_mut(i, k) = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let v = m.at(k, j);
                        *m.at_mut(i, j) -= f * v;
                    }
                }
            }
        }
        Some(Lu { lu: m, piv, pivot_ratio: pmax / pmin })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu.at(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu.at(i, j) * x[j];
            }
            x[i] = s / self.lu.at(i, i);
        }
        x
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let c = |r: f64, i: f64| Complex64::new(r, i);
        let mut m = Mat::zeros(3);
        let vals = [c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0), c(1.0, -1.0), c(3.0, 0.0), c(0.0, 2.0), c(4.0, 0.0), c(1.0, 1.0), c(-1.0, 0.0)];
        m.a.copy_from_slice(&vals);
        let x = [c(1.0, 2.0), c(-1.0, 0.5), c(0.25, -3.0)];
        let b: Vec<Complex64> = (0..3).map(|i| (0..3).map(|j| m.at(i, j) * x[j]).sum()).collect();
        let lu = Lu::new(m).unwrap();
        let y = lu.solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-12);
        }
        assert!(Lu::new(Mat::zeros(2)).is_none());
    }
}
