//! Independent oracles and measurements: divided differences, the
//! comonotonicity margin, sup-norm error with local refinement, and
//! log-log convergence-rate fitting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, num, Real};
use crate::trigpoly::TrigPoly;

/// Classical divided difference over pairwise distinct nodes.
pub fn divided_difference<T: Real>(nodes: &[T], values: &[T]) -> Result<T> {
    if nodes.len() != values.len() {
        return Err(Error::LengthMismatch {
            nodes: nodes.len(),
            values: values.len(),
        });
    }
    if nodes.is_empty() {
        return Err(Error::EmptyInput("divided difference nodes"));
    }
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if a == b {
                return Err(Error::DuplicateNodes);
            }
        }
    }
    let mut table: Vec<T> = values.to_vec();
    for order in 1..nodes.len() {
        for k in 0..nodes.len() - order {
            table[k] = (table[k + 1] - table[k]) / (nodes[k + order] - nodes[k]);
        }
    }
    Ok(table[0])
}

/// Normalized comonotonicity margin: the minimum of `tau'(x) Pi(x)` over a
/// uniform grid, divided by the maximum of `|tau' Pi|`. Zero when the
/// product vanishes identically; `-1` is the worst possible violation.
pub fn comonotonicity_margin<T: Real>(tau: &TrigPoly<T>, pi: &TrigPoly<T>, grid_points: usize) -> T {
    assert!(grid_points >= 2);
    let deriv = tau.derivative();
    let dv = deriv.eval_uniform(grid_points);
    let pv = pi.eval_uniform(grid_points);
    let mut min = T::infinity();
    let mut max_abs = T::zero();
    for (d, p) in dv.iter().zip(&pv) {
        let prod = *d * *p;
        min = min.min(prod);
        max_abs = max_abs.max(prod.abs());
    }
    if max_abs < lit(1e-300) {
        T::zero()
    } else {
        min / max_abs
    }
}

/// `max |f - tau|` over a uniform grid, sharpened by golden-section search
/// around the grid argmax.
pub fn sup_error<T: Real>(f: impl Fn(T) -> T, tau: &TrigPoly<T>, grid_points: usize) -> T {
    assert!(grid_points >= 2);
    let tv = tau.eval_uniform(grid_points);
    let two_pi = lit::<T>(2.0) * T::PI();
    let step = two_pi / num(grid_points);
    let mut best = T::zero();
    let mut best_x = -T::PI();
    for (m, t) in tv.iter().enumerate() {
        let x = -T::PI() + step * num(m);
        let e = (f(x) - *t).abs();
        if e > best {
            best = e;
            best_x = x;
        }
    }
    // golden-section refinement on the bracketing interval
    let g = |x: T| (f(x) - tau.eval(x)).abs();
    let phi = lit::<T>(0.618_033_988_749_894_8);
    let mut a = best_x - step;
    let mut b = best_x + step;
    let mut c = b - (b - a) * phi;
    let mut d = a + (b - a) * phi;
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * phi;
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * phi;
            fd = g(d);
        }
        if (b - a).abs() < lit(1e-13) {
            break;
        }
    }
    best.max(fc).max(fd)
}

/// Least-squares fit of `log error` against `log n`.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub n_values: Vec<usize>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate<T: Real>(n_values: &[usize], errors: &[T]) -> Result<RateFit> {
    if n_values.len() != errors.len() {
        return Err(Error::LengthMismatch {
            nodes: n_values.len(),
            values: errors.len(),
        });
    }
    if n_values.len() < 3 {
        return Err(Error::EmptyInput("rate fit (needs at least 3 points)"));
    }
    let errs_f64: Vec<f64> = errors
        .iter()
        .map(|e| e.to_f64().unwrap_or(f64::NAN))
        .collect();
    if errs_f64.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::NonPositiveError);
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs_f64.iter().map(|&e| e.ln()).collect();
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let mean_y = sy / m;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        n_values: n_values.to_vec(),
        errors: errs_f64,
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::BreakpointSet;
    use std::f64::consts::PI;

    #[test]
    fn divided_difference_basics() {
        // leading coefficient of x^2
        let nodes = [0.0, 1.0, 2.0];
        let values: Vec<f64> = nodes.iter().map(|x| x * x).collect();
        assert!((divided_difference(&nodes, &values).unwrap() - 1.0).abs() < 1e-14);

        // constants vanish at order >= 1
        let c = [5.0f64, 5.0, 5.0, 5.0];
        let n4 = [0.1, 0.4, 1.0, 2.5];
        assert!(divided_difference(&n4, &c).unwrap().abs() < 1e-14);

        assert!(matches!(
            divided_difference(&[0.0, 0.0], &[1.0, 2.0]),
            Err(Error::DuplicateNodes)
        ));
        assert!(matches!(
            divided_difference(&[0.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn divided_difference_permutation_symmetric() {
        let nodes = [0.3, -1.2, 2.0, 0.9];
        let f = |x: f64| (2.0 * x).sin();
        let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let base = divided_difference(&nodes, &values).unwrap();
        let perm_nodes = [2.0, 0.3, 0.9, -1.2];
        let perm_values: Vec<f64> = perm_nodes.iter().map(|&x| f(x)).collect();
        let perm = divided_difference(&perm_nodes, &perm_values).unwrap();
        assert!((base - perm).abs() < 1e-10 * base.abs().max(1.0));
    }

    #[test]
    fn margin_closed_forms() {
        let y = BreakpointSet::new(&[PI / 2.0, -PI / 2.0]).unwrap();
        let pi_poly = y.sign_poly();

        let constant = TrigPoly::constant(3.0);
        assert_eq!(comonotonicity_margin(&constant, &pi_poly, 512), 0.0);

        // tau = -sin x: tau' Pi = cos^2 x / 2 >= 0, margin 0 at the zeros
        let neg_sin = TrigPoly::fit(|x: f64| -x.sin(), 1);
        let m = comonotonicity_margin(&neg_sin, &pi_poly, 4096);
        assert!(m.abs() < 1e-10);

        // tau = sin x: worst case, margin -1
        let sin = TrigPoly::fit(|x: f64| x.sin(), 1);
        let m = comonotonicity_margin(&sin, &pi_poly, 4096);
        assert!((m + 1.0).abs() < 1e-10);
    }

    #[test]
    fn sup_error_cases() {
        let p = TrigPoly::fit(|x: f64| 0.3 + x.cos(), 1);
        assert!(sup_error(|x: f64| 0.3 + x.cos(), &p, 256) < 1e-12);

        let zero = TrigPoly::zero(0);
        let e = sup_error(|x: f64| x.sin(), &zero, 256);
        assert!((e - 1.0).abs() < 1e-9);

        // refinement sharpens a coarse grid: max of |sin| between grid points
        let coarse = sup_error(|x: f64| x.sin(), &zero, 7);
        assert!(coarse > 0.99 && coarse <= 1.0 + 1e-12);
    }

    #[test]
    fn rate_fit() {
        let fit = fit_rate(&[1, 2, 4], &[1.0, 0.125, 1.0 / 64.0]).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-12);
        assert!(fit.r_squared > 0.999_999);

        let flat = fit_rate(&[1, 2, 4, 8], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(flat.slope.abs() < 1e-12);

        assert!(matches!(
            fit_rate(&[1, 2, 4], &[1.0, 0.0, 0.1]),
            Err(Error::NonPositiveError)
        ));
        assert!(matches!(
            fit_rate(&[1, 2], &[1.0, 0.5]),
            Err(Error::EmptyInput(_))
        ));
    }
}
