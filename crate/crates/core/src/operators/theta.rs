//! The unconstrained smoothing operator: a linear combination of kernel
//! convolutions of shifted copies of the input, built so that functions
//! with `r` derivatives are reproduced at the rate `n^{-r}` while the
//! output stays a trigonometric polynomial of the kernel's degree.
//!
//! For a periodic `G` the operator is
//!
//! ```text
//! Theta(x) = -(-1)^r int sum_{j=1}^{r} (-1)^{r-j} C(r,j) G(x + j t) J_{l,n}(t) dt
//! ```
//!
//! which acts diagonally on harmonics: the k-th Fourier coefficient of `G`
//! is multiplied by `-(-1)^r sum_j (-1)^{r-j} C(r,j) mu(jk)` where
//! `mu(q) = int cos(q t) J(t) dt`. Constants are reproduced exactly
//! (the factor at `k = 0` telescopes to 1).

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::scalar::{lit, num, Real};
use crate::trigpoly::TrigPoly;

/// Apply the smoothing operator of order `n`, kernel power `l`, and
/// smoothness `r` to a 2pi-periodic function.
///
/// The input's Fourier coefficients are extracted from equispaced samples
/// (oversampled twice beyond the minimal count) and the extraction is
/// repeated at twice the sampling rate; if the two results drift apart the
/// input was not smooth enough to resolve and the call fails.
pub fn build_theta<T: Real>(
    n: usize,
    l: usize,
    r: usize,
    g: impl Fn(T) -> T,
) -> Result<TrigPoly<T>> {
    if l <= r + 2 {
        return Err(Error::KernelPowerTooSmall { l, min: r + 2 });
    }
    let kernel = KernelSpec::<T>::new(l, n);
    let kpoly = kernel.poly();
    let degree = kernel.degree();
    let base = apply(&kpoly, degree, r, &g, 2 * (2 * degree + 1))?;
    let fine = apply(&kpoly, degree, r, &g, 4 * (2 * degree + 1))?;
    let mut scale = T::one().max(base.a0.abs());
    let mut drift = (base.a0 - fine.a0).abs();
    for k in 0..degree {
        scale = scale.max(base.a[k].abs()).max(base.b[k].abs());
        drift = drift
            .max((base.a[k] - fine.a[k]).abs())
            .max((base.b[k] - fine.b[k]).abs());
    }
    if drift > lit::<T>(1e-7) * scale {
        return Err(Error::RefinementFailed(format!(
            "smoothing coefficients moved by {} under sample doubling",
            drift.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(fine)
}

/// One extraction pass: sample, project onto harmonics, rescale each by the
/// operator's diagonal factor.
fn apply<T: Real>(
    kpoly: &TrigPoly<T>,
    degree: usize,
    r: usize,
    g: &impl Fn(T) -> T,
    samples: usize,
) -> Result<TrigPoly<T>> {
    let step = lit::<T>(2.0) * T::PI() / num(samples);
    let values: Vec<T> = (0..samples)
        .map(|m| g(-T::PI() + num::<T>(m) * step))
        .collect();
    let mut out = TrigPoly::from_samples(&values, degree)?;
    // mu(q) = int cos(q t) J(t) dt: pi * a_q for q >= 1, exactly 1 at q = 0.
    let mu = |q: usize| -> T {
        if q == 0 {
            T::one()
        } else if q <= degree {
            T::PI() * kpoly.a[q - 1]
        } else {
            T::zero()
        }
    };
    let outer = if r % 2 == 0 { -T::one() } else { T::one() };
    for k in 1..=degree {
        let mut factor = T::zero();
        let mut binom = num::<T>(r); // C(r, 1)
        for j in 1..=r {
            let signed = if (r - j) % 2 == 0 { binom } else { -binom };
            factor += signed * mu(j * k);
            binom = binom * num::<T>(r - j) / num::<T>(j + 1);
        }
        factor = outer * factor;
        out.a[k - 1] *= factor;
        out.b[k - 1] *= factor;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::sup_error;
    use std::f64::consts::PI;

    #[test]
    fn rejects_small_kernel_power() {
        assert!(matches!(
            build_theta::<f64>(8, 4, 2, |_| 0.0),
            Err(Error::KernelPowerTooSmall { .. })
        ));
    }

    #[test]
    fn reproduces_constants_exactly() {
        for r in [2usize, 3] {
            let theta = build_theta::<f64>(8, r + 4, r, |_| 1.7).unwrap();
            assert!((theta.a0 - 1.7).abs() < 1e-12);
            assert!(theta.effective_degree(1e-12) == 0);
        }
        let zero = build_theta::<f64>(8, 6, 2, |_| 0.0).unwrap();
        assert!(zero.a0.abs() < 1e-14);
    }

    #[test]
    fn smooth_input_approximated_at_the_rate() {
        // G = sin x scaled into the unit smoothness ball for each r; the
        // error times n^r must stay bounded as n grows.
        for r in [2usize, 3] {
            let mut worst: f64 = 0.0;
            for n in [8usize, 16, 32] {
                let g = |x: f64| x.sin();
                let theta = build_theta::<f64>(n, r + 4, r, g).unwrap();
                let err = sup_error(g, &theta, 4096);
                worst = worst.max(err * (n as f64).powi(r as i32));
            }
            assert!(worst < 50.0, "r = {r}: scaled error {worst}");
        }
    }

    #[test]
    fn near_diagonal_action_on_low_harmonics() {
        // each harmonic is rescaled, never rotated: a pure cosine input
        // yields a pure cosine output with a factor close to 1 for k << n
        let theta = build_theta::<f64>(32, 6, 2, |x: f64| (2.0 * x).cos()).unwrap();
        assert!(theta.a0.abs() < 1e-10);
        assert!(theta.b.iter().all(|&v| v.abs() < 1e-10));
        for (k, &v) in theta.a.iter().enumerate() {
            if k != 1 {
                assert!(v.abs() < 1e-10, "leak into harmonic {}", k + 1);
            }
        }
        assert!((theta.a[1] - 1.0).abs() < 0.05);
    }

    #[test]
    fn output_is_periodic_polynomial_of_kernel_degree() {
        let theta = build_theta::<f64>(6, 7, 3, |x: f64| x.sin() + 0.3 * (3.0 * x).cos())
            .unwrap();
        assert_eq!(theta.degree(), 7 * 5);
        for x in [-1.2, 0.4] {
            assert!((theta.eval(x + 2.0 * PI) - theta.eval(x)).abs() < 1e-11);
        }
    }
}
