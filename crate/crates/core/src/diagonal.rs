//! The diagonalizing map Φ on kernel combinations, its adjoint, the
//! regularized map Φ^(r) and the isometry and intertwining checks.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelset;
use crate::oracle::FiniteSection;
use crate::quadrature::gauss_legendre_on;
use crate::spectral::{self, SpectralFrame};
use crate::symbol::PiecewiseSymbol;

/// f = Σ_i c_i K_{z_i}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyVector {
    terms: Vec<(Complex64, Complex64)>,
}

impl HardyVector {
    /// Terms are (coefficient, point); points must be distinct and inside the disk.
    pub fn new(terms: Vec<(Complex64, Complex64)>) -> Result<Self> {
        for (i, (_, z)) in terms.iter().enumerate() {
            if !(z.norm() < 1.0) {
                return Err(Error::BadPoint(format!("kernel point {z} is not inside the disk")));
            }
            if terms[..i].iter().any(|(_, w)| (w - z).norm() == 0.0) {
                return Err(Error::InvalidArgument(format!("repeated kernel point {z}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn kernel(z: Complex64) -> Result<Self> {
        Self::new(vec![(Complex64::new(1.0, 0.0), z)])
    }

    pub fn terms(&self) -> &[(Complex64, Complex64)] {
        &self.terms
    }

    /// f(w) = Σ c_i / (1 − conj(z_i) w).
    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.terms.iter().map(|(c, z)| c / (1.0 - z.conj() * w)).sum()
    }

    /// Taylor coefficient of order n: Σ c_i conj(z_i)^n.
    pub fn taylor(&self, n: usize) -> Complex64 {
        self.terms.iter().map(|(c, z)| c * z.conj().powu(n as u32)).sum()
    }

    /// (f, g) in H².
    pub fn inner(&self, other: &HardyVector) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (c, z) in &self.terms {
            for (d, w) in &other.terms {
                s += c * d.conj() / (1.0 - z.conj() * w);
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Truncated coefficient vector (first n Taylor coefficients).
    pub fn coefficients(&self, n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (c, z) in &self.terms {
            let zc = z.conj();
            let mut p = Complex64::new(1.0, 0.0);
            for o in out.iter_mut() {
                *o += c * p;
                p *= zc;
            }
        }
        out
    }
}

/// (Φf)(λ) on a grid of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalizedVector {
    pub lambdas: Vec<f64>,
    pub components: Vec<Vec<Complex64>>,
}

/// Gauss–Legendre nodes on Λ with one spectral frame per node.
#[derive(Debug, Clone)]
pub struct SpectralGrid<'a> {
    pub interval: (f64, f64),
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub frames: Vec<SpectralFrame<'a>>,
}

impl<'a> SpectralGrid<'a> {
    /// Builds `n` Gauss–Legendre nodes on an admissible open interval.
    pub fn new(sym: &'a PiecewiseSymbol, interval: (f64, f64), n: usize) -> Result<Self> {
        let (a, b) = interval;
        if !levelset::is_open_admissible(sym, a, b) {
            return Err(Error::InadmissibleInterval(a, b));
        }
        let (nodes, weights) = gauss_legendre_on(n, a, b);
        let frames = nodes
            .par_iter()
            .map(|&t| spectral::spectral_frame(sym, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            interval,
            nodes,
            weights,
            frames,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ_k w_k Σ_j F_kj conj(G_kj).
    pub fn inner(&self, f: &[Vec<Complex64>], g: &[Vec<Complex64>]) -> Complex64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (fk, gk))| fk.iter().zip(gk).map(|(x, y)| x * y.conj()).sum::<Complex64>() * *w)
            .sum()
    }

    pub fn norm(&self, f: &[Vec<Complex64>]) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    /// Φf at every node.
    pub fn phi(&self, f: &HardyVector) -> Result<DiagonalizedVector> {
        let components = self
            .frames
            .par_iter()
            .map(|fr| phi_map(f, fr))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalizedVector {
            lambdas: self.nodes.clone(),
            components,
        })
    }
}

/// (Φf)_j(λ) = Σ_i c_i conj(φ_j(z_i;λ)).
pub fn phi_map(f: &HardyVector, frame: &SpectralFrame<'_>) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); frame.m];
    for (c, z) in f.terms() {
        for (o, p) in out.iter_mut().zip(frame.eigenfunctions(*z)?) {
            *o += c * p.conj();
        }
    }
    Ok(out)
}

/// (Φ*g)(z) = Σ_j ∫_Λ φ_j(z;λ) g_j(λ) dλ on the grid.
pub fn phi_adjoint(grid: &SpectralGrid<'_>, g: &[Vec<Complex64>], z: Complex64) -> Result<Complex64> {
    if g.len() != grid.len() {
        return Err(Error::InvalidArgument("grid function has the wrong length".into()));
    }
    let parts = grid
        .frames
        .par_iter()
        .zip(g.par_iter())
        .zip(grid.weights.par_iter())
        .map(|((fr, gk), w)| -> Result<Complex64> {
            let phis = fr.eigenfunctions(z)?;
            Ok(phis.iter().zip(gk).map(|(p, v)| p * v).sum::<Complex64>() * *w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().sum())
}

/// Taylor coefficients a_0..a_{count−1} of every branch φ_j(·;λ), from an FFT
/// on a circle whose radius keeps both aliasing and amplification small.
pub fn taylor_coefficients(frame: &SpectralFrame<'_>, count: usize) -> Result<Vec<Vec<Complex64>>> {
    let count = count.max(1);
    let radius = 0.9f64.powf((64.0 / count as f64).min(1.0));
    let samples = (8 * count).max(256).next_power_of_two();
    let mut buffers = vec![vec![Complex64::new(0.0, 0.0); samples]; frame.m];
    let values = (0..samples)
        .into_par_iter()
        .map(|k| frame.eigenfunctions(Complex64::from_polar(radius, TAU * k as f64 / samples as f64)))
        .collect::<Result<Vec<_>>>()?;
    for (k, v) in values.into_iter().enumerate() {
        for (j, x) in v.into_iter().enumerate() {
            buffers[j][k] = x;
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(samples);
    Ok(buffers
        .into_iter()
        .map(|mut buf| {
            fft.process(&mut buf);
            let mut scale = 1.0 / samples as f64;
            buf.truncate(count);
            for a in buf.iter_mut() {
                *a *= scale;
                scale /= radius;
            }
            buf
        })
        .collect())
}

/// Σ_n f̂_n conj(a_n^{(j)}) r^n for an H² function with Taylor coefficients f̂.
pub fn phi_from_taylor(frame: &SpectralFrame<'_>, coeffs: &[Complex64], r: f64) -> Result<Vec<Complex64>> {
    let a = taylor_coefficients(frame, coeffs.len())?;
    Ok(a.iter()
        .map(|aj| {
            let mut rn = 1.0;
            let mut s = Complex64::new(0.0, 0.0);
            for (f, x) in coeffs.iter().zip(aj) {
                s += f * x.conj() * rn;
                rn *= r;
            }
            s
        })
        .collect())
}

/// Nonnegative Fourier coefficients of uniform boundary samples, trimmed
/// after the last one above 1e-15 of the largest.
pub fn boundary_taylor(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut coeffs: Vec<Complex64> = buf.iter().take(n / 2).map(|c| c / n as f64).collect();
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let keep = coeffs.iter().rposition(|c| c.norm() > 1e-15 * top).map_or(1, |p| p + 1);
    coeffs.truncate(keep.min(1024));
    coeffs
}

/// (Φ^(r) f)_j(λ) = ∫ f(ζ) conj(φ_j(rζ;λ)) dm(ζ) from uniform boundary samples.
pub fn phi_r(samples: &[Complex64], frame: &SpectralFrame<'_>, r: f64) -> Result<Vec<Complex64>> {
    if samples.len() < 512 {
        return Err(Error::InvalidArgument(format!(
            "need at least 512 boundary samples, got {}",
            samples.len()
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("r must lie in (0, 1), got {r}")));
    }
    phi_from_taylor(frame, &boundary_taylor(samples), r)
}

/// ‖Φ(Φ*g) − g‖ on the grid, with Φ*g represented by its first `count`
/// Taylor coefficients. Orders beyond about twice the node count alias on the grid.
pub fn surjectivity_residual(grid: &SpectralGrid<'_>, g: &[Vec<Complex64>], count: usize) -> Result<f64> {
    if g.len() != grid.len() {
        return Err(Error::InvalidArgument("grid function has the wrong length".into()));
    }
    let taylor = grid
        .frames
        .par_iter()
        .map(|fr| taylor_coefficients(fr, count))
        .collect::<Result<Vec<_>>>()?;
    let mut h = vec![Complex64::new(0.0, 0.0); count];
    for ((a, gk), w) in taylor.iter().zip(g).zip(&grid.weights) {
        for (aj, gj) in a.iter().zip(gk) {
            for (hn, an) in h.iter_mut().zip(aj) {
                *hn += an * gj * *w;
            }
        }
    }
    let back: Vec<Vec<Complex64>> = taylor
        .par_iter()
        .zip(g.par_iter())
        .map(|(a, gk)| {
            a.iter()
                .zip(gk)
                .map(|(aj, gj)| h.iter().zip(aj).map(|(hn, an)| hn * an.conj()).sum::<Complex64>() - gj)
                .collect()
        })
        .collect();
    Ok(grid.norm(&back))
}

/// Boundary samples of f on `n` uniform points.
pub fn boundary_samples(f: &HardyVector, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| f.eval(Complex64::from_polar(1.0, TAU * k as f64 / n as f64)))
        .collect()
}

/// Values of ⟨1_X Φf, Φg⟩ compared with two independent references.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningReport {
    pub phi_side: Complex64,
    pub stone_side: Complex64,
    pub oracle_side: Option<Complex64>,
    pub residual_stone: f64,
    pub residual_oracle: Option<f64>,
}

/// Compares ⟨1_X Φf, Φg⟩ with (E(X)f, g) from the Stone formula and, when a
/// section is supplied, from the finite-section oracle.
pub fn intertwining_check(
    sym: &PiecewiseSymbol,
    f: &HardyVector,
    g: &HardyVector,
    x: &[(f64, f64)],
    nodes: usize,
    section: Option<&FiniteSection>,
) -> Result<IntertwiningReport> {
    let mut phi_side = Complex64::new(0.0, 0.0);
    let mut stone_side = Complex64::new(0.0, 0.0);
    for &(a, b) in x {
        if !levelset::is_open_admissible(sym, a, b) {
            return Err(Error::InadmissibleInterval(a, b));
        }
        let grid = SpectralGrid::new(sym, (a, b), nodes)?;
        let pf = grid.phi(f)?;
        let pg = grid.phi(g)?;
        phi_side += grid.inner(&pf.components, &pg.components);
        let parts = grid
            .nodes
            .par_iter()
            .zip(grid.weights.par_iter())
            .map(|(&t, w)| -> Result<Complex64> {
                let mut s = Complex64::new(0.0, 0.0);
                for (c, u) in f.terms() {
                    for (d, v) in g.terms() {
                        // (E K_u, K_v) has density conj(φ(u))φ(v); (E f, g) pairs c_i with conj(d_k).
                        s += c * d.conj() * spectral::stone_density(sym, *u, *v, t, 1e-2)?;
                    }
                }
                Ok(s * *w)
            })
            .collect::<Result<Vec<_>>>()?;
        stone_side += parts.into_iter().sum::<Complex64>();
    }
    let oracle_side = section.map(|s| {
        let fv = f.coefficients(s.n());
        let gv = g.coefficients(s.n());
        s.weak_measure_vectors(&fv, &gv, |t| x.iter().any(|&(a, b)| t > a && t < b) as u8 as f64)
    });
    Ok(IntertwiningReport {
        phi_side,
        stone_side,
        oracle_side,
        residual_stone: (phi_side - stone_side).norm(),
        residual_oracle: oracle_side.map(|o| (phi_side - o).norm()),
    })
}

/// ⟨q(λ) Φf, Φg⟩ over Λ on a grid.
pub fn multiplication_form(grid: &SpectralGrid<'_>, f: &HardyVector, g: &HardyVector, q: &[f64]) -> Result<Complex64> {
    let pf = grid.phi(f)?;
    let pg = grid.phi(g)?;
    let mut s = Complex64::new(0.0, 0.0);
    for ((t, w), (fk, gk)) in grid.nodes.iter().zip(&grid.weights).zip(pf.components.iter().zip(&pg.components)) {
        let qv = q.iter().rev().fold(0.0, |acc, c| acc * t + c);
        s += fk.iter().zip(gk).map(|(x, y)| x * y.conj()).sum::<Complex64>() * (w * qv);
    }
    Ok(s)
}

/// Orthogonality relation of the regular preset: the Taylor coefficients of
/// φ(·;λ) are √(2/π)(1−λ²)^{1/4} U_n(λ).
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if n == 0 {
        return u0;
    }
    for _ in 1..n {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// Regular-preset density (2/π)√(1−λ²) U_n(λ) U_m(λ) of (E p_n, p_m).
pub fn regular_monomial_density(n: usize, m: usize, lambda: f64) -> f64 {
    (2.0 / PI) * (1.0 - lambda * lambda).sqrt() * chebyshev_u(n, lambda) * chebyshev_u(m, lambda)
}
