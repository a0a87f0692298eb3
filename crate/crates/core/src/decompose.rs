//! The smoothing split `f = G1 + G2`: polynomial bump functions gluing the
//! truncated derivative `g1` (equal to `f'` on the flat-dilated region,
//! zero outside the next dilation), its antiderivative `G1` with linear
//! part `B`, and the complementary `G2` with periodic part `tildeG2`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::partition::{PartitionState, UniformGrid};
use crate::quad::integrate_gl;
use crate::scalar::{lit, num, Real};

/// Normalized bump `S_j` on `I_j`: the incomplete integral of
/// `(t - x_j)^{r-2} (x_{j-1} - t)^{r-2}`, rescaled to rise from 0 at `x_j`
/// to 1 at `x_{j-1}`. Evaluated in closed form via the binomial expansion.
pub fn bump_s<T: Real>(grid: &UniformGrid<T>, j: i64, r: usize, x: T) -> Result<T> {
    assert!(r >= 2);
    let left = grid.x(j);
    let u = (x - left) / grid.h;
    let slack = lit::<T>(1e-9);
    if u < -slack || u > T::one() + slack {
        return Err(Error::PointOutsideInterval {
            x: x.to_f64().unwrap_or(f64::NAN),
            j,
        });
    }
    let u = u.max(T::zero()).min(T::one());
    Ok(incomplete_beta_ratio(r - 2, u))
}

/// `int_0^u t^m (1-t)^m dt / int_0^1 t^m (1-t)^m dt` for integer `m`.
fn incomplete_beta_ratio<T: Real>(m: usize, u: T) -> T {
    let mut numer = T::zero();
    let mut denom = T::zero();
    let mut binom = T::one();
    for k in 0..=m {
        let power = num::<T>(m + 1 + k);
        let signed = if k % 2 == 0 { binom } else { -binom };
        numer += signed * u.powi((m + 1 + k) as i32) / power;
        denom += signed / power;
        binom = binom * num::<T>(m - k) / num::<T>(k + 1);
    }
    numer / denom
}

/// Which rule produces `g1` on a given interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G1Rule {
    /// interval inside the first dilation: `g1 = f'`
    Full,
    /// outside the second dilation: `g1 = 0`
    Zero,
    /// transition with the flat region on the right: `g1 = f' S_j`
    RampUp,
    /// transition with the flat region on the left: `g1 = f' (1 - S_j)`
    RampDown,
}

/// The assembled split with precomputed per-interval integrals of `g1`.
pub struct SplitFunctions<T> {
    pub partition: PartitionState<T>,
    f: Arc<dyn Fn(T) -> T + Send + Sync>,
    fprime: Arc<dyn Fn(T) -> T + Send + Sync>,
    r: usize,
    rules: Vec<G1Rule>,
    /// prefix[k] = integral of g1 from the window's left endpoint over the
    /// first k intervals (ascending in x)
    prefix: Vec<T>,
    /// transition residues whose both neighbors lie in the first dilation
    /// (the orientation test is then degenerate; flagged for diagnostics)
    pub ambiguous_transitions: Vec<usize>,
    /// mean of g1 over one period (the linear slope of G1)
    pub b: T,
}

impl<T: Real> SplitFunctions<T> {
    pub fn build(
        f: Arc<dyn Fn(T) -> T + Send + Sync>,
        fprime: Arc<dyn Fn(T) -> T + Send + Sync>,
        r: usize,
        partition: PartitionState<T>,
    ) -> Self {
        let m = partition.grid.residues();
        let mut rules = vec![G1Rule::Zero; m];
        let mut ambiguous = Vec::new();
        for res in 0..m {
            rules[res] = if partition.m_star[res] {
                G1Rule::Full
            } else if !partition.m_2star[res] {
                G1Rule::Zero
            } else {
                // transition: orientation decided by whether the second
                // interval to the left stays clear of the outer dilation
                let j = res as i64;
                let left_in = partition.m_star[partition.grid.residue(j + 1)];
                let right_in = partition.m_star[partition.grid.residue(j - 1)];
                if left_in && right_in {
                    ambiguous.push(res);
                }
                if !partition.omega[partition.grid.residue(j + 2)] {
                    G1Rule::RampUp
                } else {
                    G1Rule::RampDown
                }
            };
        }
        let mut split = SplitFunctions {
            partition,
            f,
            fprime,
            r,
            rules,
            prefix: Vec::new(),
            ambiguous_transitions: ambiguous,
            b: T::zero(),
        };
        // per-interval integrals in ascending-x window order
        let w = split.partition.window_start;
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(T::zero());
        for k in 0..m {
            let j = w + (m - k) as i64; // interval between ascending points k, k+1
            let int = split.integral_over(j);
            let last = *prefix.last().expect("nonempty prefix");
            prefix.push(last + int);
        }
        split.b = prefix[m] / (lit::<T>(2.0) * T::PI());
        split.prefix = prefix;
        split
    }

    fn rule_of(&self, j: i64) -> G1Rule {
        self.rules[self.partition.grid.residue(j)]
    }

    /// `g1` at one point (2pi-periodic by construction).
    pub fn g1_at(&self, x: T) -> T {
        let grid = &self.partition.grid;
        let j = grid.interval_index(x);
        let fp = (self.fprime)(x);
        match self.rule_of(j) {
            G1Rule::Full => fp,
            G1Rule::Zero => T::zero(),
            rule => {
                // reduce x into the representative interval for the bump
                let s = bump_s(grid, j, self.r, x).expect("x within its own interval");
                match rule {
                    G1Rule::RampUp => fp * s,
                    _ => fp * (T::one() - s),
                }
            }
        }
    }

    fn integral_over(&self, j: i64) -> T {
        let grid = &self.partition.grid;
        match self.rule_of(j) {
            G1Rule::Zero => T::zero(),
            _ => integrate_gl(|x| self.g1_at(x), grid.x(j), grid.x(j - 1), 8),
        }
    }

    /// `G1(x) = f(0) + int_0^x g1` (linear part `b` plus a periodic part).
    pub fn g1_antiderivative_at(&self, x: T) -> T {
        (self.f)(T::zero()) + self.integral_from_zero(x)
    }

    fn integral_from_zero(&self, x: T) -> T {
        self.raw_integral(x) - self.raw_integral(T::zero())
    }

    /// Integral of g1 from the window's left endpoint to x (any real x).
    fn raw_integral(&self, x: T) -> T {
        let grid = &self.partition.grid;
        let m = grid.residues();
        let two_pi = lit::<T>(2.0) * T::PI();
        let a = grid.x(self.partition.window_start + m as i64);
        let wraps = ((x - a) / two_pi).floor();
        let xr = x - wraps * two_pi;
        // count whole intervals between a and xr
        let j = grid.interval_index(xr);
        let k = (self.partition.window_start + m as i64 - j) as usize; // intervals fully left of I_j
        let whole = self.prefix[k.min(m)];
        let partial = match self.rule_of(j) {
            G1Rule::Zero => T::zero(),
            _ => integrate_gl(|t| self.g1_at(t), grid.x(j), xr, 4),
        };
        wraps * self.prefix[m] + whole + partial
    }

    pub fn g2_prime_at(&self, x: T) -> T {
        (self.fprime)(x) - self.g1_at(x)
    }

    pub fn g2_at(&self, x: T) -> T {
        (self.f)(x) - self.g1_antiderivative_at(x)
    }

    /// Periodic part of `G2`: `G2(x) + b x`.
    pub fn tilde_g2_at(&self, x: T) -> T {
        self.g2_at(x) + self.b * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::UniformGrid;
    use std::f64::consts::PI;

    fn neg_sin_split(n: usize, r: usize) -> SplitFunctions<f64> {
        let grid = UniformGrid::<f64>::new(n);
        let partition = PartitionState::build(|x: f64| -x.cos(), r, grid, 32).unwrap();
        SplitFunctions::build(
            Arc::new(|x: f64| -x.sin()),
            Arc::new(|x: f64| -x.cos()),
            r,
            partition,
        )
    }

    #[test]
    fn bump_closed_forms() {
        let g = UniformGrid::<f64>::new(8);
        let (left, right) = (g.x(3), g.x(2));
        let mid = 0.5 * (left + right);
        // r = 2: linear ramp
        assert!((bump_s(&g, 3, 2, mid).unwrap() - 0.5).abs() < 1e-14);
        assert!((bump_s(&g, 3, 2, left + 0.25 * g.h).unwrap() - 0.25).abs() < 1e-13);
        // endpoints for every r
        for r in 2..=5 {
            assert!(bump_s(&g, 3, r, left).unwrap().abs() < 1e-14);
            assert!((bump_s(&g, 3, r, right).unwrap() - 1.0).abs() < 1e-13);
            // symmetric integrand: midpoint is exactly 1/2
            assert!((bump_s(&g, 3, r, mid).unwrap() - 0.5).abs() < 1e-13);
        }
        assert!(matches!(
            bump_s(&g, 3, 3, right + 0.5),
            Err(Error::PointOutsideInterval { .. })
        ));
    }

    #[test]
    fn bump_matches_quadrature_oracle() {
        let g = UniformGrid::<f64>::new(8);
        let (left, right) = (g.x(3), g.x(2));
        for r in [3usize, 4] {
            let m = (r - 2) as i32;
            let b = integrate_gl(
                |t: f64| (t - left).powi(m) * (right - t).powi(m),
                left,
                right,
                16,
            );
            for frac in [0.2, 0.55, 0.9] {
                let x = left + frac * g.h;
                let oracle = integrate_gl(
                    |t: f64| (t - left).powi(m) * (right - t).powi(m),
                    left,
                    x,
                    16,
                ) / b;
                assert!((bump_s(&g, 3, r, x).unwrap() - oracle).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn bump_endpoint_derivatives_vanish() {
        // one-sided finite differences of order q <= r-2 vanish at the ends
        let g = UniformGrid::<f64>::new(8);
        let r = 4;
        let eps = 1e-4;
        let left = g.x(3);
        let s = |x: f64| bump_s(&g, 3, r, x).unwrap();
        let d1 = (s(left + eps) - s(left)) / eps;
        let d2 = (s(left + 2.0 * eps) - 2.0 * s(left + eps) + s(left)) / (eps * eps);
        // the third derivative does not vanish at the endpoint, so the
        // one-sided differences carry truncation terms of order
        // eps^2 / h^3 (~2e-6) and eps / h^3 (~1e-1) respectively; a
        // non-vanishing s'' would instead show up at order 1 / h (~100)
        assert!(d1.abs() < 1e-5);
        assert!(d2.abs() < 0.5);
    }

    #[test]
    fn g1_matches_rules_on_samples() {
        let split = neg_sin_split(16, 2);
        let p = &split.partition;
        let fp = |x: f64| -x.cos();
        for i in 0..4096 {
            let x = -PI + 2.0 * PI * (i as f64 + 0.5) / 4096.0;
            let g1 = split.g1_at(x);
            if p.in_m_star(x) {
                assert!((g1 - fp(x)).abs() < 1e-13);
            }
            if !p.in_m_2star(x) {
                assert_eq!(g1, 0.0);
            }
            // sign preservation against Pi = -cos(x)/2
            let pi_x = -0.5 * x.cos();
            assert!(g1 * pi_x >= -1e-12);
            assert!((fp(x) - g1) * pi_x >= -1e-12);
        }
        assert!(split.ambiguous_transitions.is_empty());
    }

    #[test]
    fn g1_is_continuous_across_transition_edges() {
        let split = neg_sin_split(16, 2);
        let grid = &split.partition.grid;
        for j in split.partition.window() {
            let edge = grid.x(j);
            let below = split.g1_at(edge - 1e-9);
            let above = split.g1_at(edge + 1e-9);
            assert!(
                (below - above).abs() < 1e-7,
                "jump at x_{j}: {below} vs {above}"
            );
        }
    }

    #[test]
    fn linear_part_and_periodicity() {
        let split = neg_sin_split(16, 2);
        // b matches an independent quadrature of g1 over one period
        let direct = integrate_gl(|x| split.g1_at(x), -PI, PI, 512) / (2.0 * PI);
        assert!((split.b - direct).abs() < 1e-10);
        // G1 increment over one period is 2 pi b
        let inc = split.g1_antiderivative_at(1.3 + 2.0 * PI) - split.g1_antiderivative_at(1.3);
        assert!((inc - 2.0 * PI * split.b).abs() < 1e-10);
        // tildeG2 periodic
        for x in [-2.5, -0.3, 0.9, 2.9] {
            let d = split.tilde_g2_at(x + 2.0 * PI) - split.tilde_g2_at(x);
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn trivial_splits() {
        // flat f: no packs -> g1 = f' everywhere -> G2 constant 0
        let grid = UniformGrid::<f64>::new(8);
        let partition = PartitionState::build(|_| 0.0, 2, grid, 16).unwrap();
        assert!(!partition.has_packs());
        let split = SplitFunctions::build(
            Arc::new(|_| 0.25),
            Arc::new(|_| 0.0),
            2,
            partition,
        );
        assert_eq!(split.b, 0.0);
        for x in [-3.0, 0.0, 1.7] {
            assert!((split.g1_antiderivative_at(x) - 0.25).abs() < 1e-14);
            assert!(split.g2_at(x).abs() < 1e-14);
        }
    }

    #[test]
    fn g2_prime_properties() {
        let split = neg_sin_split(32, 2);
        let p = &split.partition;
        let fp = |x: f64| -x.cos();
        for i in 0..4096 {
            let x = -PI + 2.0 * PI * (i as f64 + 0.5) / 4096.0;
            let g2p = split.g2_prime_at(x);
            if p.in_m_star(x) {
                assert!(g2p.abs() < 1e-13);
            }
            if !p.in_m_2star(x) {
                assert!((g2p - fp(x)).abs() < 1e-13);
            }
        }
    }
}
