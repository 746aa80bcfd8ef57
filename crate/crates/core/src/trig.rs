//! Real trigonometric polynomials and their real roots on an angle interval.

use faer::{c64, Mat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const TWO_PI: f64 = std::f64::consts::TAU;

/// `a_0 + Σ_k (a_k cos kθ + b_k sin kθ)`.
///
/// `a` holds `a_0..a_K`; `b` holds `b_1..b_K` (so `b[0]` multiplies `sin θ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self { a, b }
    }

    pub fn constant(c: f64) -> Self {
        Self { a: vec![c], b: vec![] }
    }

    /// Highest harmonic with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        let mut k = self.a.len().max(self.b.len() + 1).saturating_sub(1);
        while k > 0 && self.a.get(k).copied().unwrap_or(0.0) == 0.0 && self.b.get(k - 1).copied().unwrap_or(0.0) == 0.0 {
            k -= 1;
        }
        k
    }

    pub fn a_k(&self, k: usize) -> f64 {
        self.a.get(k).copied().unwrap_or(0.0)
    }

    pub fn b_k(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.b.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = self.a_k(0);
        for k in 1..=self.degree() {
            let (sn, cs) = (k as f64 * theta).sin_cos();
            s += self.a_k(k) * cs + self.b_k(k) * sn;
        }
        s
    }

    /// Term-by-term derivative in θ.
    pub fn derivative(&self) -> TrigPoly {
        let d = self.degree();
        let mut a = vec![0.0; d + 1];
        let mut b = vec![0.0; d];
        for k in 1..=d {
            let kf = k as f64;
            a[k] = kf * self.b_k(k);
            b[k - 1] = -kf * self.a_k(k);
        }
        TrigPoly { a, b }
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Exponential coefficient p_k of `Σ p_k e^{ikθ}`, for |k| ≤ degree.
    pub fn exp_coefficient(&self, k: i64) -> Complex64 {
        let ku = k.unsigned_abs() as usize;
        if ku == 0 {
            return Complex64::new(self.a_k(0), 0.0);
        }
        let (a, b) = (self.a_k(ku), self.b_k(ku));
        if k > 0 {
            Complex64::new(0.5 * a, -0.5 * b)
        } else {
            Complex64::new(0.5 * a, 0.5 * b)
        }
    }

    /// Largest absolute coefficient, used as a scale for thresholds.
    pub fn scale(&self) -> f64 {
        self.a.iter().chain(self.b.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// All θ in [lo, hi] with `self(θ) = 0`, including tangential zeros.
    pub fn zeros_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let k = self.degree();
        if k == 0 {
            return Vec::new();
        }
        let mut out = if k <= 8 {
            self.companion_zeros(lo, hi)
        } else {
            self.sampled_zeros(lo, hi)
        };
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() < 1e-7);
        out
    }

    fn companion_zeros(&self, lo: f64, hi: f64) -> Vec<f64> {
        let k = self.degree();
        let n = 2 * k;
        // Coefficients of z^K p(θ) as a degree-2K polynomial in z = e^{iθ}.
        let coeffs: Vec<Complex64> = (0..=n).map(|j| self.exp_coefficient(j as i64 - k as i64)).collect();
        let lead = coeffs[n];
        let comp = Mat::<c64>::from_fn(n, n, |i, j| {
            if i == 0 {
                let v = -coeffs[n - 1 - j] / lead;
                c64::new(v.re, v.im)
            } else if i == j + 1 {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let eig = match comp.eigenvalues() {
            Ok(e) => e,
            Err(_) => return self.sampled_zeros(lo, hi),
        };
        let scale = self.scale().max(f64::MIN_POSITIVE);
        let mut out = Vec::new();
        for z in eig {
            let r = (z.re * z.re + z.im * z.im).sqrt();
            if (r - 1.0).abs() > 1e-5 {
                continue;
            }
            let theta0 = z.im.atan2(z.re);
            let theta = self.polish(theta0);
            if self.eval(theta).abs() > 1e-9 * scale {
                continue;
            }
            if let Some(t) = lift_into(theta, lo, hi, 1e-12) {
                out.push(t);
            }
        }
        out
    }

    fn sampled_zeros(&self, lo: f64, hi: f64) -> Vec<f64> {
        let samples = 512usize;
        let h = (hi - lo) / samples as f64;
        let scale = self.scale().max(f64::MIN_POSITIVE);
        let d = self.derivative();
        let vals: Vec<f64> = (0..=samples).map(|i| self.eval(lo + h * i as f64)).collect();
        let mut out = Vec::new();
        for i in 0..samples {
            let (x0, x1) = (lo + h * i as f64, lo + h * (i + 1) as f64);
            let (f0, f1) = (vals[i], vals[i + 1]);
            if f0 == 0.0 {
                out.push(x0);
            } else if f0 * f1 < 0.0 {
                out.push(bisect(|t| self.eval(t), x0, x1));
            }
        }
        if vals[samples] == 0.0 {
            out.push(hi);
        }
        // Tangential zeros show up as small local minima of |p|.
        for i in 1..samples {
            let (f0, f1, f2) = (vals[i - 1].abs(), vals[i].abs(), vals[i + 1].abs());
            if f1 <= f0 && f1 <= f2 && vals[i - 1] * vals[i + 1] > 0.0 {
                let x0 = lo + h * (i - 1) as f64;
                let x2 = lo + h * (i + 1) as f64;
                let (d0, d2) = (d.eval(x0), d.eval(x2));
                if d0 * d2 < 0.0 {
                    let t = bisect(|s| d.eval(s), x0, x2);
                    if self.eval(t).abs() <= 1e-10 * scale {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Newton polish that never moves more than a small step.
    fn polish(&self, mut theta: f64) -> f64 {
        let d = self.derivative();
        for _ in 0..8 {
            let f = self.eval(theta);
            let fp = d.eval(theta);
            if fp == 0.0 {
                break;
            }
            let step = f / fp;
            if !step.is_finite() || step.abs() > 1e-3 {
                break;
            }
            theta -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        theta
    }
}

/// Bisection on a sign-changing bracket down to 1e-14 width.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    if f(b) == 0.0 {
        return b;
    }
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Maps an angle onto the representative inside [lo - tol, hi + tol], if any.
pub(crate) fn lift_into(theta: f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let mut t = lo + (theta - lo).rem_euclid(TWO_PI);
    if t > hi + tol && (t - TWO_PI) >= lo - tol {
        t -= TWO_PI;
    }
    if t >= lo - tol && t <= hi + tol {
        Some(t.clamp(lo, hi))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_cos() {
        let p = TrigPoly::new(vec![0.0, 1.0], vec![]);
        let d = p.derivative();
        assert_eq!(d.a, vec![0.0, 0.0]);
        assert_eq!(d.b, vec![-1.0]);
    }

    #[test]
    fn zeros_of_sin_on_full_circle() {
        let p = TrigPoly::new(vec![0.0], vec![1.0]);
        let z = p.zeros_in(0.0, TWO_PI);
        assert!(z.len() >= 2);
        assert!(z.iter().any(|t| t.abs() < 1e-12 || (t - TWO_PI).abs() < 1e-12));
        assert!(z.iter().any(|t| (t - std::f64::consts::PI).abs() < 1e-12));
    }

    #[test]
    fn companion_and_sampling_agree() {
        let p = TrigPoly::new(vec![0.1, 0.3, -0.2, 0.05], vec![0.4, 0.1, -0.3]);
        let mut a = p.companion_zeros(0.0, TWO_PI);
        let mut b = p.sampled_zeros(0.0, TWO_PI);
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn tangential_zero_is_found() {
        // 1 - cos θ touches zero at θ = 0.
        let p = TrigPoly::new(vec![1.0, -1.0], vec![]);
        let z = p.zeros_in(-1.0, 1.0);
        assert_eq!(z.len(), 1);
        assert!(z[0].abs() < 1e-6);
    }
}
