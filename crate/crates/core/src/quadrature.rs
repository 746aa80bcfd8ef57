//! Gauss–Legendre rules and a globally adaptive panel integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// The 16-point rule used by all panel integrators.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Gauss–Legendre nodes and weights mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target (against the running integral of |f|).
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Cap on the number of panels.
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_depth: 40,
            max_panels: 200_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: Complex64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gl16_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let (x, w) = gl16();
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let mut s = Complex64::new(0.0, 0.0);
    let mut sa = 0.0;
    for (t, wt) in x.iter().zip(w) {
        let v = f(c + h * t);
        s += v * *wt;
        sa += v.norm() * wt;
    }
    (s * h, sa * h.abs())
}

fn make_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let m = 0.5 * (a + b);
    let (whole, _) = gl16_panel(f, a, b);
    let (l, la) = gl16_panel(f, a, m);
    let (r, ra) = gl16_panel(f, m, b);
    let value = l + r;
    Panel {
        a,
        b,
        depth,
        value,
        abs_value: la + ra,
        error: (whole - value).norm(),
    }
}

/// Integrates `f` over consecutive intervals delimited by `breaks` (sorted,
/// at least two entries) with global adaptive bisection of GL16 panels.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, breaks: &[f64], opts: AdaptiveOptions) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Panel> = Vec::new();
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            heap.push(make_panel(&f, pair[0], pair[1], 0));
        }
    }
    let mut total_err: f64;
    loop {
        let (val, abs_val, err) = heap
            .iter()
            .chain(finished.iter())
            .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |acc, p| {
                (acc.0 + p.value, acc.1 + p.abs_value, acc.2 + p.error)
            });
        let _ = val;
        total_err = err;
        let target = opts.abs_tol.max(opts.rel_tol * abs_val);
        if total_err <= target || heap.is_empty() || heap.len() + finished.len() >= opts.max_panels {
            break;
        }
        // Split a batch of the worst panels before re-summing.
        let batch = (heap.len() / 4).max(1);
        for _ in 0..batch {
            let Some(p) = heap.pop() else { break };
            if p.error <= target * 1e-3 {
                heap.push(p);
                break;
            }
            if p.depth >= opts.max_depth {
                finished.push(p);
                continue;
            }
            let m = 0.5 * (p.a + p.b);
            heap.push(make_panel(&f, p.a, m, p.depth + 1));
            heap.push(make_panel(&f, m, p.b, p.depth + 1));
        }
    }
    let value = heap
        .iter()
        .chain(finished.iter())
        .fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    let abs_val: f64 = heap.iter().chain(finished.iter()).map(|p| p.abs_value).sum();
    let target = opts.abs_tol.max(opts.rel_tol * abs_val);
    if total_err > target {
        return Err(Error::QuadratureFailure {
            achieved: total_err,
            requested: target,
        });
    }
    Ok(Integral {
        value,
        error: total_err,
        panels: heap.len() + finished.len(),
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: AdaptiveOptions) -> Result<(f64, f64)> {
    let r = integrate(|t| Complex64::new(f(t), 0.0), breaks, opts)?;
    Ok((r.value.re, r.error))
}

/// Sorts, dedups and clips breakpoints to [a, b], always including both ends.
pub fn breakpoints(a: f64, b: f64, inner: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = inner.into_iter().filter(|t| *t > a && *t < b).collect();
    v.push(a);
    v.push(b);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    v
}
