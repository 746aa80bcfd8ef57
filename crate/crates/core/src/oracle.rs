//! Finite sections of the Toeplitz matrix and the weak spectral measures of
//! their eigen-decompositions.

use faer::{c64, Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelset;
use crate::spectral::{self, SpectralWeight};
use crate::symbol::PiecewiseSymbol;

/// Coefficient magnitude below which the imaginary parts are treated as zero.
const REAL_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone)]
enum Vectors {
    /// Eigenvectors diag(e^{ijφ}) W with W real.
    Real(Mat<f64>, f64),
    Complex(Mat<c64>),
}

/// φ with c_k e^{−ikφ} real for every k, if one exists.
fn real_phase(c: &[Complex64]) -> Option<f64> {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    let is_real = |phi: f64| {
        c.iter()
            .enumerate()
            .all(|(k, x)| (x * Complex64::from_polar(1.0, -(k as f64) * phi)).im.abs() <= REAL_THRESHOLD * scale)
    };
    if is_real(0.0) {
        return Some(0.0);
    }
    let (k0, lead) = c.iter().enumerate().skip(1).find(|(_, x)| x.norm() > 1e-8 * scale)?;
    let k0f = k0 as f64;
    (0..k0)
        .map(|j| lead.arg() / k0f + std::f64::consts::PI * j as f64 / k0f)
        .find(|&phi| is_real(phi))
}

/// An N×N section with its eigenvalues (ascending) and orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct FiniteSection {
    n: usize,
    coefficients: Vec<Complex64>,
    hermitian_residual: f64,
    eigenvalues: Vec<f64>,
    vectors: Vectors,
}

/// Section of the symbol's Toeplitz matrix, entries M[j][k] = ω̂(j − k).
pub fn build_section(sym: &PiecewiseSymbol, n: usize) -> Result<FiniteSection> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("section size must be at least 2, got {n}")));
    }
    let plus: Vec<Complex64> = (0..n as i64).map(|k| sym.fourier_coefficient(k)).collect();
    let minus: Vec<Complex64> = (0..n as i64).map(|k| sym.fourier_coefficient(-k)).collect();
    let residual = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p.conj() - m).norm())
        .fold(0.0, f64::max);
    let mut section = section_from_coefficients(&plus, n)?;
    section.hermitian_residual = residual;
    Ok(section)
}

/// Section built from c_0..c_{N−1}, with c_{−k} = conj(c_k) by construction.
pub fn section_from_coefficients(coefficients: &[Complex64], n: usize) -> Result<FiniteSection> {
    if n < 2 || coefficients.len() < n {
        return Err(Error::InvalidArgument(format!(
            "need N ≥ 2 and N coefficients, got N = {n} with {}",
            coefficients.len()
        )));
    }
    let c = &coefficients[..n];
    let entry = |j: usize, k: usize| -> Complex64 {
        if j >= k {
            c[j - k]
        } else {
            c[k - j].conj()
        }
    };
    let (eigenvalues, vectors) = if let Some(phi) = real_phase(c) {
        let m = Mat::<f64>::from_fn(n, n, |j, k| {
            (entry(j, k) * Complex64::from_polar(1.0, -(j as f64 - k as f64) * phi)).re
        });
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
        let s = evd.S().column_vector().iter().copied().collect::<Vec<_>>();
        (s, Vectors::Real(evd.U().to_owned(), phi))
    } else {
        let m = Mat::<c64>::from_fn(n, n, |j, k| entry(j, k));
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
        let s = evd.S().column_vector().iter().map(|x| x.re).collect::<Vec<_>>();
        (s, Vectors::Complex(evd.U().to_owned()))
    };
    Ok(FiniteSection {
        n,
        coefficients: c.to_vec(),
        hermitian_residual: 0.0,
        eigenvalues,
        vectors,
    })
}

impl FiniteSection {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// max_k |ω̂(−k) − conj(ω̂(k))| of the coefficients that built the matrix.
    pub fn hermitian_residual(&self) -> f64 {
        self.hermitian_residual
    }

    pub fn is_real(&self) -> bool {
        matches!(self.vectors, Vectors::Real(..))
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        if j >= k {
            self.coefficients[j - k]
        } else {
            self.coefficients[k - j].conj()
        }
    }

    /// Coefficients ⟨x, v_k⟩ = v_k^H x for every eigenvector.
    pub fn project(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let get = |i: usize| x.get(i).copied().unwrap_or_default();
        match &self.vectors {
            Vectors::Real(u, phi) => {
                let rot = |i: usize| get(i) * Complex64::from_polar(1.0, -(i as f64) * phi);
                let rhs = Mat::<f64>::from_fn(n, 2, |i, j| if j == 0 { rot(i).re } else { rot(i).im });
                let p = u.transpose() * &rhs;
                (0..n).map(|k| Complex64::new(p[(k, 0)], p[(k, 1)])).collect()
            }
            Vectors::Complex(u) => {
                let rhs = Mat::<c64>::from_fn(n, 1, |i, _| get(i));
                let p = u.adjoint() * &rhs;
                (0..n).map(|k| p[(k, 0)]).collect()
            }
        }
    }

    /// max |V^H V − I|; cubic cost, meant for small sections.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        match &self.vectors {
            Vectors::Real(u, _) => {
                let g = u.transpose() * u;
                for i in 0..n {
                    for j in 0..n {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((g[(i, j)] - target).abs());
                    }
                }
            }
            Vectors::Complex(u) => {
                let g = u.adjoint() * u;
                for i in 0..n {
                    for j in 0..n {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((g[(i, j)] - c64::new(target, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }

    /// max_k ‖M v_k − λ_k v_k‖ over a few eigenpairs spread across the spectrum.
    pub fn eigen_residual(&self, samples: usize) -> f64 {
        let n = self.n;
        let step = (n / samples.max(1)).max(1);
        let mut worst = 0.0f64;
        for k in (0..n).step_by(step) {
            let v: Vec<Complex64> = match &self.vectors {
                Vectors::Real(u, phi) => (0..n)
                    .map(|i| Complex64::from_polar(u[(i, k)], i as f64 * phi))
                    .collect(),
                Vectors::Complex(u) => (0..n).map(|i| u[(i, k)]).collect(),
            };
            for j in 0..n {
                let mv: Complex64 = (0..n).map(|i| self.entry(j, i) * v[i]).sum();
                worst = worst.max((mv - self.eigenvalues[k] * v[j]).norm());
            }
        }
        worst
    }

    /// (g(T_N) x, y) = Σ_k g(λ_k) ⟨x, v_k⟩ conj(⟨y, v_k⟩).
    pub fn weak_measure_vectors<G: Fn(f64) -> f64>(&self, x: &[Complex64], y: &[Complex64], g: G) -> Complex64 {
        let a = self.project(x);
        let b = if std::ptr::eq(x, y) { a.clone() } else { self.project(y) };
        self.eigenvalues
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(l, (p, q))| p * q.conj() * g(*l))
            .sum()
    }

    /// Largest fraction of eigenvalues falling in one of `bins` equal bins on [lo, hi].
    pub fn max_bin_fraction(&self, lo: f64, hi: f64, bins: usize) -> f64 {
        let mut counts = vec![0usize; bins.max(1)];
        let w = (hi - lo) / counts.len() as f64;
        for &l in &self.eigenvalues {
            let b = (((l - lo) / w).floor().max(0.0) as usize).min(counts.len() - 1);
            counts[b] += 1;
        }
        counts.into_iter().max().unwrap_or(0) as f64 / self.n as f64
    }
}

/// Truncated coefficients conj(u)^n of K_u together with the tail bound |u|^N/(1 − |u|).
pub fn k_vector(u: Complex64, n: usize) -> Result<(Vec<Complex64>, f64)> {
    let r = u.norm();
    if !(r < 1.0) {
        return Err(Error::BadPoint(format!("kernel point {u} is not inside the disk")));
    }
    let uc = u.conj();
    let mut out = Vec::with_capacity(n);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        out.push(p);
        p *= uc;
    }
    Ok((out, r.powi(n as i32) / (1.0 - r)))
}

/// (g(T_N) K_u^N, K_v^N).
pub fn oracle_weak_measure(section: &FiniteSection, u: Complex64, v: Complex64, g: &dyn SpectralWeight) -> Result<Complex64> {
    let (ku, _) = k_vector(u, section.n())?;
    let (kv, _) = k_vector(v, section.n())?;
    Ok(section.weak_measure_vectors(&ku, &kv, |t| g.eval(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub n: usize,
    pub u: Complex64,
    pub v: Complex64,
    pub oracle: Complex64,
    pub analytic: Complex64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    /// Error trend along N is non-increasing for every point pair.
    pub monotone: bool,
    pub pass: bool,
}

/// Slack allowed when comparing successive errors that sit at the floor.
pub fn non_increasing(errors: &[f64]) -> bool {
    errors.windows(2).all(|w| w[1] <= 1.05 * w[0] + 1e-9)
}

/// Compares the oracle against the analytic weak measure for every pair and N.
/// Pass requires the largest N to meet `tolerance` (plus the truncation tail)
/// and a non-increasing error trend.
pub fn validate(
    sym: &PiecewiseSymbol,
    interval: (f64, f64),
    g: &dyn SpectralWeight,
    points: &[(Complex64, Complex64)],
    n_list: &[usize],
    tolerance: f64,
) -> Result<ValidationReport> {
    let sections = n_list.iter().map(|&n| build_section(sym, n)).collect::<Result<Vec<_>>>()?;
    validate_with_sections(sym, interval, g, points, &sections.iter().collect::<Vec<_>>(), tolerance)
}

/// [`validate`] with sections built by the caller.
pub fn validate_with_sections(
    sym: &PiecewiseSymbol,
    interval: (f64, f64),
    g: &dyn SpectralWeight,
    points: &[(Complex64, Complex64)],
    sections: &[&FiniteSection],
    tolerance: f64,
) -> Result<ValidationReport> {
    let (a, b) = interval;
    if !levelset::is_open_admissible(sym, a, b) {
        return Err(Error::InadmissibleInterval(a, b));
    }
    let (g1, g2) = sym.essential_range();
    let (lo, hi) = g.support();
    let outside = hi <= g1 || lo >= g2;
    let mut rows = Vec::new();
    let mut monotone = true;
    for &(u, v) in points {
        let analytic = if outside {
            Complex64::new(0.0, 0.0)
        } else {
            spectral::weak_measure(sym, interval, u, v, g)?
        };
        let mut errors = Vec::new();
        for s in sections {
            let (_, tu) = k_vector(u, s.n())?;
            let (_, tv) = k_vector(v, s.n())?;
            let oracle = oracle_weak_measure(s, u, v, g)?;
            let error = (oracle - analytic).norm();
            let tol = tolerance + 2.0 * tu.max(tv);
            errors.push(error);
            rows.push(ValidationRow {
                n: s.n(),
                u,
                v,
                oracle,
                analytic,
                error,
                tolerance: tol,
                pass: error <= tol,
            });
        }
        monotone &= non_increasing(&errors);
    }
    let nmax = sections.iter().map(|s| s.n()).max().unwrap_or(0);
    let pass = monotone && rows.iter().filter(|r| r.n == nmax).all(|r| r.pass);
    Ok(ValidationReport { rows, monotone, pass })
}
