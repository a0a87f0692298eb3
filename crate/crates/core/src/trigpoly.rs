//! Exact-degree trigonometric polynomial arithmetic.
//!
//! Degrees are carried in the type and never inferred from coefficient
//! magnitude: every construction in this crate knows the degree of its
//! output in advance, so sampling-based coefficient extraction is exact
//! up to rounding.

use crate::error::{Error, Result};
use crate::scalar::{inum, lit, num, Real};

/// `a0 + sum_k (a[k-1] cos kx + b[k-1] sin kx)`, degree = `a.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly<T> {
    pub a0: T,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// Slope `A` plus a periodic trigonometric part: `A x + periodic(x)`.
#[derive(Debug, Clone)]
pub struct LinearPlusTrig<T> {
    pub slope: T,
    pub periodic: TrigPoly<T>,
}

/// Alias for the sign polynomial built from a breakpoint set (degree `s`).
pub type PiPoly<T> = TrigPoly<T>;

// Rotation recurrences drift by ~k*eps; re-anchor with a direct sin/cos
// evaluation every RESYNC steps.
const RESYNC: usize = 256;

impl<T: Real> TrigPoly<T> {
    pub fn zero(degree: usize) -> Self {
        TrigPoly {
            a0: T::zero(),
            a: vec![T::zero(); degree],
            b: vec![T::zero(); degree],
        }
    }

    pub fn constant(c: T) -> Self {
        TrigPoly {
            a0: c,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn new(a0: T, a: Vec<T>, b: Vec<T>) -> Self {
        assert_eq!(a.len(), b.len(), "coefficient lists must share a length");
        TrigPoly { a0, a, b }
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: T) -> T {
        let (zr, zi) = (x.cos(), x.sin());
        let (mut cr, mut ci) = (T::one(), T::zero());
        let mut acc = self.a0;
        for k in 0..self.degree() {
            if (k + 1) % RESYNC == 0 {
                let kx = num::<T>(k + 1) * x;
                cr = kx.cos();
                ci = kx.sin();
            } else {
                let nr = cr * zr - ci * zi;
                ci = cr * zi + ci * zr;
                cr = nr;
            }
            acc = acc + self.a[k] * cr + self.b[k] * ci;
        }
        acc
    }

    /// Values at the uniform grid `x_m = -pi + 2 pi m / points`.
    pub fn eval_uniform(&self, points: usize) -> Vec<T> {
        let step = lit::<T>(2.0) * T::PI() / num(points);
        let mut out = vec![self.a0; points];
        let (mut cr_s, mut ci_s): (Vec<T>, Vec<T>) = (Vec::new(), Vec::new());
        // Per-harmonic sweep keeps the inner loop a pure fused multiply-add.
        for m in 0..points {
            let x = -T::PI() + num::<T>(m) * step;
            cr_s.push(x.cos());
            ci_s.push(x.sin());
        }
        let mut rr = vec![T::one(); points];
        let mut ri = vec![T::zero(); points];
        for k in 0..self.degree() {
            if (k + 1) % RESYNC == 0 {
                for m in 0..points {
                    let kx = num::<T>(k + 1) * (-T::PI() + num::<T>(m) * step);
                    rr[m] = kx.cos();
                    ri[m] = kx.sin();
                }
            } else {
                for m in 0..points {
                    let nr = rr[m] * cr_s[m] - ri[m] * ci_s[m];
                    ri[m] = rr[m] * ci_s[m] + ri[m] * cr_s[m];
                    rr[m] = nr;
                }
            }
            let (ak, bk) = (self.a[k], self.b[k]);
            if ak != T::zero() || bk != T::zero() {
                for m in 0..points {
                    out[m] = out[m] + ak * rr[m] + bk * ri[m];
                }
            }
        }
        out
    }

    /// Term-wise derivative; degree preserved.
    pub fn derivative(&self) -> TrigPoly<T> {
        let d = self.degree();
        let mut a = vec![T::zero(); d];
        let mut b = vec![T::zero(); d];
        for k in 0..d {
            let kk = num::<T>(k + 1);
            a[k] = kk * self.b[k];
            b[k] = -kk * self.a[k];
        }
        TrigPoly {
            a0: T::zero(),
            a,
            b,
        }
    }

    /// Antiderivative split into `slope * x` (from the mean) plus a
    /// zero-mean periodic part. The caller re-adds any integration constant.
    pub fn antiderivative_split(&self) -> LinearPlusTrig<T> {
        let d = self.degree();
        let mut a = vec![T::zero(); d];
        let mut b = vec![T::zero(); d];
        for k in 0..d {
            let kk = num::<T>(k + 1);
            // int a cos kx = a sin(kx)/k ; int b sin kx = -b cos(kx)/k
            a[k] = -self.b[k] / kk;
            b[k] = self.a[k] / kk;
        }
        LinearPlusTrig {
            slope: self.a0,
            periodic: TrigPoly {
                a0: T::zero(),
                a,
                b,
            },
        }
    }

    /// Exact coefficient recovery from `values.len()` equispaced samples on
    /// `[-pi, pi)`. Exact to rounding whenever the sampled function is a
    /// trigonometric polynomial of degree <= `degree` and
    /// `values.len() >= 2 * degree + 1`.
    pub fn from_samples(values: &[T], degree: usize) -> Result<TrigPoly<T>> {
        let l = values.len();
        if l < 2 * degree + 1 {
            return Err(Error::TooFewSamples {
                required: 2 * degree + 1,
                got: l,
            });
        }
        let step = lit::<T>(2.0) * T::PI() / num(l);
        let mut a0 = T::zero();
        let mut a = vec![T::zero(); degree];
        let mut b = vec![T::zero(); degree];
        for (m, &v) in values.iter().enumerate() {
            let x = -T::PI() + num::<T>(m) * step;
            a0 += v;
            let (zr, zi) = (x.cos(), x.sin());
            let (mut cr, mut ci) = (T::one(), T::zero());
            for k in 0..degree {
                if (k + 1) % RESYNC == 0 {
                    let kx = num::<T>(k + 1) * x;
                    cr = kx.cos();
                    ci = kx.sin();
                } else {
                    let nr = cr * zr - ci * zi;
                    ci = cr * zi + ci * zr;
                    cr = nr;
                }
                a[k] += v * cr;
                b[k] += v * ci;
            }
        }
        let inv = T::one() / num::<T>(l);
        let two = lit::<T>(2.0);
        for k in 0..degree {
            a[k] = a[k] * two * inv;
            b[k] = b[k] * two * inv;
        }
        Ok(TrigPoly {
            a0: a0 * inv,
            a,
            b,
        })
    }

    /// Fit a function known to be a trigonometric polynomial of the given
    /// degree, oversampling by a factor 2 beyond the minimal 2*degree+1.
    pub fn fit(f: impl Fn(T) -> T, degree: usize) -> TrigPoly<T> {
        let l = 2 * (2 * degree + 1);
        let step = lit::<T>(2.0) * T::PI() / num(l);
        let values: Vec<T> = (0..l)
            .map(|m| f(-T::PI() + num::<T>(m) * step))
            .collect();
        Self::from_samples(&values, degree).expect("sample count is sufficient by construction")
    }

    /// Pointwise product; degree is the sum of the factor degrees.
    pub fn multiply(&self, other: &TrigPoly<T>) -> TrigPoly<T> {
        // Complex-coefficient convolution: c_k = (a_k - i b_k)/2, c_{-k} = conj.
        let (dp, dq) = (self.degree(), other.degree());
        let d = dp + dq;
        let half = lit::<T>(0.5);
        let cplx = |p: &TrigPoly<T>, k: i64| -> (T, T) {
            if k == 0 {
                (p.a0, T::zero())
            } else {
                let idx = (k.unsigned_abs() as usize) - 1;
                if idx >= p.degree() {
                    (T::zero(), T::zero())
                } else if k > 0 {
                    (p.a[idx] * half, -p.b[idx] * half)
                } else {
                    (p.a[idx] * half, p.b[idx] * half)
                }
            }
        };
        // sum over the lower-degree factor so the cost is O(d * min(dp, dq))
        let (lo, hi, dlo, dhi) = if dp <= dq {
            (self, other, dp, dq)
        } else {
            (other, self, dq, dp)
        };
        let mut a0 = T::zero();
        let mut a = vec![T::zero(); d];
        let mut b = vec![T::zero(); d];
        for k in 0..=(d as i64) {
            let (mut re, mut im) = (T::zero(), T::zero());
            for j in -(dlo as i64)..=(dlo as i64) {
                let m = k - j;
                if m.unsigned_abs() as usize > dhi {
                    continue;
                }
                let (pr, pi) = cplx(lo, j);
                let (qr, qi) = cplx(hi, m);
                re = re + pr * qr - pi * qi;
                im = im + pr * qi + pi * qr;
            }
            if k == 0 {
                a0 = re;
            } else {
                let two = lit::<T>(2.0);
                a[(k - 1) as usize] = re * two;
                b[(k - 1) as usize] = -im * two;
            }
        }
        TrigPoly { a0, a, b }
    }

    /// `p(x - c)`: rotate each harmonic by `k c`.
    pub fn shifted(&self, c: T) -> TrigPoly<T> {
        let d = self.degree();
        let mut a = vec![T::zero(); d];
        let mut b = vec![T::zero(); d];
        for k in 0..d {
            let kc = num::<T>(k + 1) * c;
            let (cc, sc) = (kc.cos(), kc.sin());
            a[k] = self.a[k] * cc - self.b[k] * sc;
            b[k] = self.a[k] * sc + self.b[k] * cc;
        }
        TrigPoly { a0: self.a0, a, b }
    }

    pub fn scaled(&self, c: T) -> TrigPoly<T> {
        TrigPoly {
            a0: self.a0 * c,
            a: self.a.iter().map(|&v| v * c).collect(),
            b: self.b.iter().map(|&v| v * c).collect(),
        }
    }

    /// Accumulate `coef * other` into `self`, growing the degree as needed.
    pub fn accumulate(&mut self, coef: T, other: &TrigPoly<T>) {
        if other.degree() > self.degree() {
            self.a.resize(other.degree(), T::zero());
            self.b.resize(other.degree(), T::zero());
        }
        self.a0 += coef * other.a0;
        for k in 0..other.degree() {
            self.a[k] += coef * other.a[k];
            self.b[k] += coef * other.b[k];
        }
    }

    pub fn add(&self, other: &TrigPoly<T>) -> TrigPoly<T> {
        let mut out = self.clone();
        out.accumulate(T::one(), other);
        out
    }

    /// Largest harmonic with a coefficient above `tol` (0 when none).
    pub fn effective_degree(&self, tol: T) -> usize {
        for k in (0..self.degree()).rev() {
            if self.a[k].abs() > tol || self.b[k].abs() > tol {
                return k + 1;
            }
        }
        0
    }
}

impl<T: Real> LinearPlusTrig<T> {
    pub fn value(&self, x: T) -> T {
        self.slope * x + self.periodic.eval(x)
    }

    /// Derivative is a pure trigonometric polynomial (slope becomes `a0`).
    pub fn derivative(&self) -> TrigPoly<T> {
        let mut d = self.periodic.derivative();
        d.a0 += self.slope;
        d
    }

    pub fn scaled(&self, c: T) -> LinearPlusTrig<T> {
        LinearPlusTrig {
            slope: self.slope * c,
            periodic: self.periodic.scaled(c),
        }
    }

    pub fn accumulate(&mut self, coef: T, other: &LinearPlusTrig<T>) {
        self.slope += coef * other.slope;
        self.periodic.accumulate(coef, &other.periodic);
    }
}

/// The `2s` breakpoints, stored in decreasing order (`points[0]` largest),
/// with periodic extension `y(i) = y(i + 2s) + 2 pi`.
#[derive(Debug, Clone)]
pub struct BreakpointSet<T> {
    points: Vec<T>,
}

impl<T: Real> BreakpointSet<T> {
    /// Points may be given in any order; they must be distinct, even in
    /// count, and lie in `[-pi, pi)`.
    pub fn new(points: &[T]) -> Result<Self> {
        if points.is_empty() || points.len() % 2 != 0 {
            return Err(Error::InvalidBreakpoints(format!(
                "need a positive even count, got {}",
                points.len()
            )));
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|p, q| q.partial_cmp(p).expect("breakpoints must be finite"));
        for w in sorted.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::InvalidBreakpoints(
                    "breakpoints must be pairwise distinct".into(),
                ));
            }
        }
        if !(sorted[0] < T::PI()) || !(*sorted.last().unwrap() >= -T::PI()) {
            return Err(Error::InvalidBreakpoints(
                "breakpoints must lie in [-pi, pi)".into(),
            ));
        }
        Ok(BreakpointSet { points: sorted })
    }

    /// Number of breakpoint pairs `s` (the count is `2s`).
    pub fn pairs(&self) -> usize {
        self.points.len() / 2
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Points in decreasing order: `point(0)` is `y_1` in 1-based indexing.
    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// `y_i` for any integer `i` (1-based), via `y_i = y_{i+2s} + 2 pi`.
    pub fn y(&self, i: i64) -> T {
        let m = self.points.len() as i64;
        let q = (i - 1).div_euclid(m);
        let rem = (i - 1).rem_euclid(m) as usize;
        self.points[rem] - lit::<T>(2.0) * T::PI() * inum(q)
    }

    /// Direct product evaluation of the sign polynomial
    /// `prod_i sin((x - y_i)/2)`.
    pub fn pi_eval(&self, x: T) -> T {
        let half = lit::<T>(0.5);
        self.points
            .iter()
            .map(|&y| ((x - y) * half).sin())
            .fold(T::one(), |acc, v| acc * v)
    }

    /// The sign polynomial as an exact degree-`s` trigonometric polynomial.
    pub fn sign_poly(&self) -> PiPoly<T> {
        TrigPoly::fit(|x| self.pi_eval(x), self.pairs())
    }

    /// Distance from `x` to the nearest breakpoint, over all periodic images.
    pub fn distance_to_nearest(&self, x: T) -> T {
        let two_pi = lit::<T>(2.0) * T::PI();
        self.points
            .iter()
            .map(|&y| {
                let mut d = (x - y) % two_pi;
                if d > T::PI() {
                    d -= two_pi;
                }
                if d < -T::PI() {
                    d += two_pi;
                }
                d.abs()
            })
            .fold(T::infinity(), T::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn eval_constant_and_cos() {
        let c = TrigPoly::constant(1.0);
        assert_eq!(c.eval(0.7), 1.0);
        let cosx = TrigPoly::new(0.0, vec![1.0], vec![0.0]);
        assert!(close(cosx.eval(0.0), 1.0, 1e-15));
    }

    #[test]
    fn derivative_examples() {
        let c = TrigPoly::constant(3.0);
        assert_eq!(c.derivative(), TrigPoly::zero(0));
        let sinx = TrigPoly::new(0.0, vec![0.0], vec![1.0]);
        let d = sinx.derivative();
        assert!(close(d.a[0], 1.0, 0.0) && close(d.b[0], 0.0, 0.0));
        let cos3 = TrigPoly::new(0.0, vec![0.0, 0.0, 1.0], vec![0.0; 3]);
        let d = cos3.derivative();
        assert!(close(d.b[2], -3.0, 0.0));
    }

    #[test]
    fn antiderivative_examples() {
        let one = TrigPoly::constant(1.0);
        let s = one.antiderivative_split();
        assert_eq!(s.slope, 1.0);
        assert_eq!(s.periodic.effective_degree(0.0), 0);

        let cosx = TrigPoly::new(0.0, vec![1.0], vec![0.0]);
        let s = cosx.antiderivative_split();
        assert_eq!(s.slope, 0.0);
        assert!(close(s.periodic.b[0], 1.0, 0.0)); // sin x

        let sin2 = TrigPoly::new(0.0, vec![0.0, 0.0], vec![0.0, 1.0]);
        let s = sin2.antiderivative_split();
        assert!(close(s.periodic.a[1], -0.5, 0.0)); // -cos(2x)/2
    }

    #[test]
    fn antiderivative_round_trip() {
        let p = TrigPoly::new(0.4, vec![0.3, -1.2, 0.0], vec![2.0, 0.1, -0.7]);
        let s = p.antiderivative_split();
        let mut back = s.periodic.derivative();
        back.a0 += s.slope;
        for x in [-3.0, -0.5, 0.0, 1.1, 2.9] {
            assert!(close(back.eval(x), p.eval(x), 1e-13));
        }
    }

    #[test]
    fn from_samples_examples() {
        let vals = vec![2.5; 9];
        let p = TrigPoly::from_samples(&vals, 2).unwrap();
        assert!(close(p.a0, 2.5, 1e-14));
        assert!(p.effective_degree(1e-13) == 0);

        let l = 16;
        let vals: Vec<f64> = (0..l)
            .map(|m| (2.0 * (-PI + 2.0 * PI * m as f64 / l as f64)).cos())
            .collect();
        let p = TrigPoly::from_samples(&vals, 3).unwrap();
        assert!(close(p.a[1], 1.0, 1e-13));
        assert!(close(p.a[0], 0.0, 1e-13) && close(p.a[2], 0.0, 1e-13));
        assert!(p.b.iter().all(|&v| v.abs() < 1e-13));
    }

    #[test]
    fn from_samples_too_few() {
        let vals = vec![0.0; 4];
        assert!(matches!(
            TrigPoly::<f64>::from_samples(&vals, 2),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn multiply_identities() {
        let cosx = TrigPoly::new(0.0, vec![1.0], vec![0.0]);
        let sinx = TrigPoly::new(0.0, vec![0.0], vec![1.0]);
        let one = TrigPoly::constant(1.0);

        let p = cosx.multiply(&one);
        for x in [0.3, 1.7] {
            assert!(close(p.eval(x), x.cos(), 1e-14));
        }

        let cc = cosx.multiply(&cosx); // 1/2 + cos(2x)/2
        assert!(close(cc.a0, 0.5, 1e-14));
        assert!(close(cc.a[1], 0.5, 1e-14));

        let sc = sinx.multiply(&cosx); // sin(2x)/2
        assert!(close(sc.b[1], 0.5, 1e-14));
        assert!(close(sc.a0, 0.0, 1e-14));
    }

    #[test]
    fn shifted_matches_pointwise() {
        let p = TrigPoly::new(0.2, vec![1.0, -0.3], vec![0.5, 0.8]);
        let q = p.shifted(0.9);
        for x in [-2.0, 0.0, 1.3] {
            assert!(close(q.eval(x), p.eval(x - 0.9), 1e-13));
        }
    }

    #[test]
    fn breakpoints_accessor_and_pi() {
        let y = BreakpointSet::new(&[PI / 2.0, -PI / 2.0]).unwrap();
        assert_eq!(y.pairs(), 1);
        // y_i - y_{i+2s} = 2 pi
        for i in -3..4i64 {
            assert!(close(y.y(i) - y.y(i + 2), 2.0 * PI, 1e-15));
        }
        // Pi(x) = -cos(x)/2 for this pair
        let pi_poly = y.sign_poly();
        assert!(close(pi_poly.eval(0.0), -0.5, 1e-13));
        assert!(close(pi_poly.a[0], -0.5, 1e-13));

        let y2 = BreakpointSet::new(&[0.0, -PI]).unwrap();
        let p2 = y2.sign_poly();
        // sin(x/2) sin((x+pi)/2) = sin(x)/2
        assert!(close(p2.b[0], 0.5, 1e-13));

        let y4 = BreakpointSet::new(&[-2.0, -1.0, 0.5, 2.0]).unwrap();
        let p4 = y4.sign_poly();
        let direct = 1.0f64.sin() * 0.5f64.sin() * (-0.25f64).sin() * (-1.0f64).sin();
        assert!(close(p4.eval(0.0), direct, 1e-13));
    }

    #[test]
    fn breakpoints_reject_bad_input() {
        assert!(BreakpointSet::new(&[0.0]).is_err());
        assert!(BreakpointSet::new(&[0.0, 0.0]).is_err());
        assert!(BreakpointSet::new(&[PI, 0.0]).is_err());
    }

    #[test]
    fn periodicity_of_eval() {
        let p = TrigPoly::new(0.1, vec![0.7, 0.0, -0.2], vec![0.0, 1.5, 0.3]);
        for x in [-1.0, 0.4, 2.2] {
            assert!(close(p.eval(x + 2.0 * PI), p.eval(x), 1e-12));
        }
    }
}
