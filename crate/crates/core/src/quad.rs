//! Quadrature helpers: a periodic rectangle rule (spectrally accurate for
//! smooth periodic integrands, exact for band-limited ones) and a composite
//! Gauss-Legendre rule for non-periodic intervals.

use crate::scalar::{lit, num, Real};

/// Uniform-grid rule over one full period `[-pi, pi]`. For a trigonometric
/// polynomial of degree < `points` this is exact to rounding.
pub fn integrate_periodic<T: Real>(f: impl Fn(T) -> T, points: usize) -> T {
    let step = lit::<T>(2.0) * T::PI() / num(points);
    let mut acc = T::zero();
    for m in 0..points {
        acc += f(-T::PI() + num::<T>(m) * step);
    }
    acc * step
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Composite 8-point Gauss-Legendre over `[a, b]` with `panels` subintervals.
pub fn integrate_gl<T: Real>(f: impl Fn(T) -> T, a: T, b: T, panels: usize) -> T {
    if !(b > a) {
        return T::zero();
    }
    let width = (b - a) / num(panels);
    let half = lit::<T>(0.5);
    let mut acc = T::zero();
    for p in 0..panels {
        let lo = a + width * num(p);
        let mid = lo + width * half;
        let scale = width * half;
        let mut panel = T::zero();
        for i in 0..8 {
            panel += lit::<T>(GL_WEIGHTS[i]) * f(mid + scale * lit(GL_NODES[i]));
        }
        acc += panel * scale;
    }
    acc
}
