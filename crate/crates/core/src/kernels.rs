//! Jackson-type kernels `(sin(nt/2)/sin(t/2))^{2l} / gamma`, their
//! normalizers, moment integrals, and numerical estimation of the kernel
//! constants that the theory only asserts to exist.

use crate::error::{Error, Result};
use crate::quad::{integrate_gl, integrate_periodic};
use crate::scalar::{lit, num, Real};
use crate::trigpoly::TrigPoly;

/// A Jackson-type kernel with its computed normalizer.
#[derive(Debug, Clone, Copy)]
pub struct KernelSpec<T> {
    pub l: usize,
    pub n: usize,
    pub gamma: T,
}

/// Numerically estimated kernel constants over a declared `n`-range.
#[derive(Debug, Clone, Copy)]
pub struct KernelConstants<T> {
    pub l: usize,
    /// `max n^{2l-1} / gamma` (lower normalizer bound, inverted).
    pub c9: T,
    /// `max gamma / n^{2l-1}` (upper normalizer bound).
    pub c10: T,
    /// Uniform bound on tail moments weighted by `(1 + n delta)^{2l-nu-1}`.
    pub c11: T,
    /// Supremum of the symmetric moments `int (1+n|t|)^nu J dt`, `nu <= 2l-2`.
    pub c12: T,
}

/// `(sin(nt/2)/sin(t/2))^{2l}` with the removable singularity handled by its
/// limit value `n^{2l}`.
fn raw_kernel<T: Real>(l: usize, n: usize, t: T) -> T {
    let half = lit::<T>(0.5);
    let denom = (t * half).sin();
    if denom.abs() < lit(1e-8) {
        return num::<T>(n).powi(2 * l as i32);
    }
    let ratio = (num::<T>(n) * t * half).sin() / denom;
    ratio.powi(2 * l as i32)
}

/// Normalizer `gamma = int_{-pi}^{pi} (sin(nt/2)/sin(t/2))^{2l} dt`.
///
/// The integrand is a trigonometric polynomial of degree `l(n-1)`, so the
/// uniform periodic rule below is exact to rounding.
pub fn gamma<T: Real>(l: usize, n: usize) -> T {
    assert!(l >= 1 && n >= 1);
    let points = (8 * l * n).max(4096);
    integrate_periodic(|t| raw_kernel(l, n, t), points)
}

impl<T: Real> KernelSpec<T> {
    pub fn new(l: usize, n: usize) -> Self {
        KernelSpec {
            l,
            n,
            gamma: gamma(l, n),
        }
    }

    /// Degree of the kernel as a trigonometric polynomial.
    pub fn degree(&self) -> usize {
        self.l * (self.n - 1)
    }

    pub fn eval(&self, t: T) -> T {
        raw_kernel(self.l, self.n, t) / self.gamma
    }

    /// The kernel as an exact trigonometric polynomial of degree `l(n-1)`.
    pub fn poly(&self) -> TrigPoly<T> {
        TrigPoly::fit(|t| self.eval(t), self.degree())
    }

    /// Tail moment `int_delta^pi (1 + n t)^nu J(t) dt`.
    pub fn moment(&self, nu: usize, delta: T) -> Result<T> {
        let max = 2 * self.l - 2;
        if nu > max {
            return Err(Error::MomentOrderOutOfRange { nu, max });
        }
        let panels = (4 * self.l * self.n).max(256);
        let n = num::<T>(self.n);
        Ok(integrate_gl(
            |t| (T::one() + n * t).powi(nu as i32) * self.eval(t),
            delta,
            T::PI(),
            panels,
        ))
    }

    /// Symmetric moment `int_{-pi}^{pi} (1 + n|t|)^nu J(t) dt` (kernel is even).
    pub fn symmetric_moment(&self, nu: usize) -> Result<T> {
        Ok(self.moment(nu, T::zero())? * lit(2.0))
    }
}

/// Estimate the kernel constants for power `l` over the given orders.
pub fn estimate_constants<T: Real>(l: usize, n_range: &[usize]) -> Result<KernelConstants<T>> {
    if n_range.is_empty() {
        return Err(Error::EmptyInput("kernel estimation n-range"));
    }
    let mut c9 = T::zero();
    let mut c10 = T::zero();
    let mut c11 = T::zero();
    let mut c12 = T::zero();
    for &n in n_range {
        let spec = KernelSpec::<T>::new(l, n);
        let pow = num::<T>(n).powi(2 * l as i32 - 1);
        c10 = c10.max(spec.gamma / pow);
        c9 = c9.max(pow / spec.gamma);
        for nu in 0..=(2 * l - 2) {
            c12 = c12.max(spec.symmetric_moment(nu)?);
            // delta-grid for the weighted tail bound
            for k in 0..=16usize {
                let delta = T::PI() * num::<T>(k) / num::<T>(16);
                let weight =
                    (T::one() + num::<T>(n) * delta).powi((2 * l) as i32 - nu as i32 - 1);
                c11 = c11.max(spec.moment(nu, delta)? * weight);
            }
        }
    }
    Ok(KernelConstants {
        l,
        c9,
        c10,
        c11,
        c12,
    })
}
