//! Smooth step approximants: the normalized antiderivative of
//! `J_{l,n}(t - x*) Pi(t) / Pi(x*)`, which rises from 0 to 1 across one
//! period while turning monotone exactly where the sign polynomial says so.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::scalar::{lit, num, Real};
use crate::trigpoly::{BreakpointSet, LinearPlusTrig, TrigPoly};

/// Unit step at `x*`: 0 for `x <= x*`, 1 otherwise.
pub fn chi<T: Real>(x: T, x_star: T) -> T {
    if x <= x_star {
        T::zero()
    } else {
        T::one()
    }
}

/// Localization weight `min{1, 1/(n |sin((x - x*)/2)|)}`.
pub fn delta_n<T: Real>(n: usize, x: T, x_star: T) -> T {
    let s = ((x - x_star) * lit::<T>(0.5)).sin().abs();
    let inv = num::<T>(n) * s;
    if inv <= T::one() {
        T::one()
    } else {
        T::one() / inv
    }
}

/// Center admissibility: every periodic image of `x*` stays at least
/// `2 s c12 pi / n` away from the breakpoints.
pub fn admissible<T: Real>(x_star: T, y: &BreakpointSet<T>, n: usize, c12_max: T) -> bool {
    let bound = num::<T>(2 * y.pairs()) * c12_max * T::PI() / num(n);
    y.distance_to_nearest(x_star) >= bound
}

/// A kernel prepared for repeated step construction at many centers.
pub struct StepKernel<T> {
    pub spec: KernelSpec<T>,
    pub poly: TrigPoly<T>,
}

impl<T: Real> StepKernel<T> {
    pub fn new(l: usize, n: usize) -> Self {
        let spec = KernelSpec::new(l, n);
        let poly = spec.poly();
        StepKernel { spec, poly }
    }
}

/// Step approximant with its normalizer and construction parameters.
#[derive(Debug, Clone)]
pub struct StepApproximant<T> {
    pub value: LinearPlusTrig<T>,
    pub x_star: T,
    /// Normalizer: the raw full-period increment before rescaling.
    pub d: T,
    pub l: usize,
    pub n: usize,
    pub breakpoints: BreakpointSet<T>,
}

impl<T: Real> StepApproximant<T> {
    /// One-off construction; builds the kernel polynomial internally.
    pub fn build(l: usize, n: usize, x_star: T, y: &BreakpointSet<T>) -> Result<Self> {
        build_step(&StepKernel::new(l, n), x_star, y)
    }

    pub fn eval(&self, x: T) -> T {
        self.value.value(x)
    }

    pub fn derivative(&self) -> TrigPoly<T> {
        self.value.derivative()
    }
}

/// Build the step approximant centered at `x*` for breakpoints `y`.
///
/// The integrand is assembled as an exact trigonometric polynomial and
/// antidifferentiated symbolically; the integration constant is fixed by
/// `T(x* - pi) = 0` and the result rescaled so the full-period increment
/// is exactly 1.
pub fn build_step<T: Real>(
    kernel: &StepKernel<T>,
    x_star: T,
    y: &BreakpointSet<T>,
) -> Result<StepApproximant<T>> {
    build_step_with_sign_poly(kernel, x_star, y, &y.sign_poly())
}

/// As [`build_step`] but reusing a precomputed sign polynomial.
pub fn build_step_with_sign_poly<T: Real>(
    kernel: &StepKernel<T>,
    x_star: T,
    y: &BreakpointSet<T>,
    sign_poly: &TrigPoly<T>,
) -> Result<StepApproximant<T>> {
    let pi_star = y.pi_eval(x_star);
    if pi_star.abs() < lit(1e-12) {
        return Err(Error::DegenerateCenter {
            x_star: x_star.to_f64().unwrap_or(f64::NAN),
        });
    }
    let integrand = kernel
        .poly
        .shifted(x_star)
        .multiply(&sign_poly.scaled(T::one() / pi_star));
    let two_pi = lit::<T>(2.0) * T::PI();
    let d = two_pi * integrand.a0;
    if d.abs() < lit(1e-12) {
        return Err(Error::DegenerateCenter {
            x_star: x_star.to_f64().unwrap_or(f64::NAN),
        });
    }
    let anti = integrand.antiderivative_split();
    let offset = -(anti.slope * (x_star - T::PI()) + anti.periodic.eval(x_star - T::PI()));
    let inv_d = T::one() / d;
    let mut periodic = anti.periodic.clone();
    periodic.a0 += offset;
    Ok(StepApproximant {
        value: LinearPlusTrig {
            slope: anti.slope * inv_d,
            periodic: periodic.scaled(inv_d),
        },
        x_star,
        d,
        l: kernel.spec.l,
        n: kernel.spec.n,
        breakpoints: y.clone(),
    })
}

/// Measure `sup |chi - T|` in dyadic distance bands from the center and fit
/// the log-log decay exponent against the localization weight.
pub fn step_sup_error<T: Real>(step: &StepApproximant<T>) -> T {
    let n = step.n;
    let h = T::PI() / num(n);
    let x_star = step.x_star;
    let samples_per_band = 64usize;
    let mut logs: Vec<(T, T)> = Vec::new();
    let mut k = 1usize;
    loop {
        let lo = h * num::<T>(1 << k);
        let hi = h * num::<T>(1 << (k + 1));
        if lo >= T::PI() {
            break;
        }
        let hi = hi.min(T::PI());
        let mut worst = T::zero();
        for side in [T::one(), -T::one()] {
            for m in 0..samples_per_band {
                let dist = lo + (hi - lo) * num::<T>(m) / num(samples_per_band);
                let x = x_star + side * dist;
                let err = (chi(x, x_star) - step.eval(x)).abs();
                worst = worst.max(err);
            }
        }
        let delta = delta_n(n, x_star + lo, x_star);
        if worst > T::zero() {
            logs.push((delta.ln(), worst.ln()));
        }
        k += 1;
    }
    // least-squares slope of log err against log delta
    let m = num::<T>(logs.len());
    let sx: T = logs.iter().map(|p| p.0).sum();
    let sy: T = logs.iter().map(|p| p.1).sum();
    let sxx: T = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: T = logs.iter().map(|p| p.0 * p.1).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}
