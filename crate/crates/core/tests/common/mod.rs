//! Shared helpers for integration tests: an adaptive Simpson integrator
//! independent of the crate's own quadrature, so normalizations can be
//! cross-checked against a second implementation.

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson_step(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson_step(fa, flm, fm, a, m);
        let right = simpson_step(fm, frm, fb, m, b);
        // the first splits are forced: oscillatory integrands can alias on
        // the coarse samples and fake agreement with the whole-interval rule
        let forced = depth > 32;
        if depth == 0 || (!forced && (left + right - whole).abs() <= 15.0 * tol) {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_step(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Uniform sample points covering one period `[-pi, pi)`.
pub fn period_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| {
        -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / points as f64
    })
}
