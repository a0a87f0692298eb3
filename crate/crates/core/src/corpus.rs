//! Built-in test instances: closed-form piecewise monotone functions with
//! known breakpoints, scaled so the relevant derivative norms stay at or
//! below 1. All entries are double precision.

use std::sync::Arc;

use crate::trigpoly::{BreakpointSet, TrigPoly};

pub type Evaluable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub struct CorpusEntry {
    pub id: &'static str,
    pub f: Evaluable,
    pub fprime: Evaluable,
    /// breakpoints in decreasing order within [-pi, pi)
    pub breakpoints: Vec<f64>,
    /// largest smoothness order the recorded scaling supports
    pub r_max: usize,
    /// multiplicative normalization applied to the raw closed form
    pub scale: f64,
}

impl CorpusEntry {
    pub fn breakpoint_set(&self) -> BreakpointSet<f64> {
        BreakpointSet::new(&self.breakpoints).expect("corpus breakpoints are valid")
    }

    /// Minimum of `f'(x) Pi(x)` over a dense sample (membership check for
    /// the comonotone class).
    pub fn comonotone_residual(&self, samples: usize) -> f64 {
        let pi = self.breakpoint_set();
        let mut min = f64::INFINITY;
        for i in 0..samples {
            let x = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            min = min.min((self.fprime)(x) * pi.pi_eval(x));
        }
        min
    }
}

fn sup_on_grid(f: impl Fn(f64) -> f64, samples: usize) -> f64 {
    (0..samples)
        .map(|i| {
            let x = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / samples as f64;
            f(x).abs()
        })
        .fold(0.0, f64::max)
}

fn single_pair() -> Vec<f64> {
    vec![std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2]
}

fn const_entry() -> CorpusEntry {
    CorpusEntry {
        id: "const",
        f: Arc::new(|_| 0.3),
        fprime: Arc::new(|_| 0.0),
        breakpoints: single_pair(),
        r_max: 4,
        scale: 1.0,
    }
}

fn neg_sin() -> CorpusEntry {
    CorpusEntry {
        id: "neg_sin",
        f: Arc::new(|x: f64| -x.sin()),
        fprime: Arc::new(|x: f64| -x.cos()),
        breakpoints: single_pair(),
        r_max: 4,
        scale: 1.0,
    }
}

/// `f' = -cos x (1 + sin(2x)/2)`, antiderivative `-sin x + cos^3 x / 3`,
/// rescaled so the second derivative stays within 1.
fn neg_sin_warped() -> CorpusEntry {
    let raw_f = |x: f64| -x.sin() + x.cos().powi(3) / 3.0;
    let raw_fp = |x: f64| -x.cos() * (1.0 + 0.5 * (2.0 * x).sin());
    let raw_fpp = |x: f64| x.sin() + 2.0 * x.cos() * x.sin().powi(2) - x.cos().powi(3);
    let scale = 1.0 / sup_on_grid(raw_fpp, 100_000).max(1.0);
    CorpusEntry {
        id: "neg_sin_warped",
        f: Arc::new(move |x| scale * raw_f(x)),
        fprime: Arc::new(move |x| scale * raw_fp(x)),
        breakpoints: single_pair(),
        r_max: 2,
        scale,
    }
}

/// Two breakpoint pairs: `f' = Pi(x) q(x)` with
/// `q = 1 + u cos kx + v sin kx` strictly positive, `(u, v)` the
/// minimum-norm solution of the zero-mean condition on the strongest
/// harmonic `k` of `Pi`, so `f` is periodic with a closed trigonometric
/// form.
fn two_pair() -> CorpusEntry {
    let breakpoints = vec![2.0, 0.5, -1.0, -2.0];
    let y = BreakpointSet::new(&breakpoints).expect("valid two-pair breakpoints");
    let pi = y.sign_poly();
    // zero mean of Pi q: 2 pi a0 + u pi a_k + v pi b_k = 0; the strongest
    // harmonic minimizes the amplitude sqrt(u^2 + v^2) = 2|a0| / |(a_k, b_k)|
    let k = (0..pi.a.len())
        .max_by(|&i, &j| {
            let ni = f64::hypot(pi.a[i], pi.b[i]);
            let nj = f64::hypot(pi.a[j], pi.b[j]);
            ni.total_cmp(&nj)
        })
        .expect("sign polynomial has harmonics");
    let (a0, ak, bk) = (pi.a0, pi.a[k], pi.b[k]);
    let denom = ak * ak + bk * bk;
    let u = -2.0 * a0 * ak / denom;
    let v = -2.0 * a0 * bk / denom;
    debug_assert!(u.hypot(v) < 1.0, "weight must stay strictly positive");
    let mut q = TrigPoly::<f64>::zero(k + 1);
    q.a0 = 1.0;
    q.a[k] = u;
    q.b[k] = v;
    let fprime_poly = pi.multiply(&q);
    debug_assert!(fprime_poly.a0.abs() < 1e-12);
    let f_anti = fprime_poly.antiderivative_split();
    debug_assert!(f_anti.slope.abs() < 1e-12);
    let f_poly = f_anti.periodic;
    // scale so every derivative norm up to r_max stays within 1
    let r_max = 3;
    let mut worst: f64 = 1.0;
    let mut d = f_poly.clone();
    for _ in 0..r_max {
        d = d.derivative();
        worst = worst.max(sup_on_grid(|x| d.eval(x), 100_000));
    }
    let scale = 1.0 / worst;
    let fp = fprime_poly.scaled(scale);
    let fv = f_poly.scaled(scale);
    CorpusEntry {
        id: "two_pair",
        f: Arc::new(move |x| fv.eval(x)),
        fprime: Arc::new(move |x| fp.eval(x)),
        breakpoints,
        r_max,
        scale,
    }
}

pub fn corpus() -> Vec<CorpusEntry> {
    vec![const_entry(), neg_sin(), neg_sin_warped(), two_pair()]
}

pub fn entry(id: &str) -> Option<CorpusEntry> {
    corpus().into_iter().find(|e| e.id == id)
}
