//! Singular circle quadrature and the outer-function building blocks:
//! Q(z;λ), ξ(z;λ), the outer function F_λ, the phase A(z;λ), the rational
//! function L(z;λ), the coefficients c_j and boundary values of ξ.
//!
//! The quadrature subtracts every root ζ_r of ω − λ analytically:
//! ln|ω − λ| = Σ_r ln|ζ − ζ_r| + g with g smooth between jumps, and the
//! Schwarz integral of ln|ζ − ζ_r| is exactly ln(1 − ζ̄_r z). Only g is
//! integrated numerically.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::h;
use crate::levelset::{self, Arc, Coverage, LevelSet, GUARD_BAND};
use crate::quadrature::{self, gl16, AdaptiveOptions};
use crate::symbol::PiecewiseSymbol;

/// Radius below which the fixed node set is used for Q(z).
const FAST_RADIUS: f64 = 0.97;
/// Largest panel width of the fixed node set.
const MAX_PANEL: f64 = TAU / 128.0;
/// Panel cap for the fixed node set.
const MAX_PANELS: usize = 100_000;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Result of a Schwarz-integral evaluation with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub value: Complex64,
    pub achieved: f64,
    pub panels: usize,
}

/// Approach direction for boundary values of ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// Radial limit from inside the disk (ζ+).
    Inside,
    /// Radial limit from outside the disk (ζ−).
    Outside,
}

/// Quadrature of ln|ω − λ| against circle kernels, built once per level.
#[derive(Debug, Clone)]
pub struct SingularQuadrature {
    symbol: PiecewiseSymbol,
    lambda: f64,
    roots: Vec<f64>,
    root_points: Vec<Complex64>,
    /// Sorted breakpoints covering [base, base + 2π].
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    node_conj: Vec<Complex64>,
    /// Weights including the 1/2π of dm.
    weights: Vec<f64>,
    g: Vec<f64>,
    mean_log: f64,
    achieved: f64,
    panels: usize,
    tol: f64,
    max_depth: u32,
}

impl SingularQuadrature {
    /// Builds the quadrature for level λ; λ must stay clear of Λ_exc.
    pub fn new(sym: &PiecewiseSymbol, lambda: f64) -> Result<Self> {
        Self::with_tolerance(sym, lambda, 1e-10, 40)
    }

    pub fn with_tolerance(sym: &PiecewiseSymbol, lambda: f64, tol: f64, max_depth: u32) -> Result<Self> {
        levelset::check_level(sym, lambda)?;
        let roots: Vec<f64> = levelset::level_roots(sym, lambda).iter().map(|r| r.angle).collect();
        let root_points = roots.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let base = 0.0;
        let mut inner: Vec<f64> = sym.jumps().iter().map(|j| j.angle).collect();
        inner.extend(sym.seams());
        inner.extend(roots.iter().copied());
        let breaks = quadrature::breakpoints(base, base + TAU, inner.into_iter().map(|t| t.rem_euclid(TAU)));
        let mut q = Self {
            symbol: sym.clone(),
            lambda,
            roots,
            root_points,
            breaks,
            nodes: vec![],
            node_conj: vec![],
            weights: vec![],
            g: vec![],
            mean_log: 0.0,
            achieved: 0.0,
            panels: 0,
            tol,
            max_depth,
        };
        q.build_nodes()?;
        Ok(q)
    }

    fn build_nodes(&mut self) -> Result<()> {
        let (x, w) = gl16();
        let mut stack: Vec<(f64, f64, u32)> = Vec::new();
        for pair in self.breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let count = ((b - a) / MAX_PANEL).ceil().max(1.0) as usize;
            let h = (b - a) / count as f64;
            for k in 0..count {
                let lo = a + h * k as f64;
                let hi = if k + 1 == count { b } else { lo + h };
                stack.push((lo, hi, 0));
            }
        }
        // Value and roundoff floor: ln|ω − λ| loses about ε(|ω| + |λ|)/|ω − λ| to cancellation.
        let panel = |a: f64, b: f64| -> (f64, f64) {
            let hh = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            let (mut v, mut noise) = (0.0, 0.0);
            for (t, wt) in x.iter().zip(w) {
                let theta = c + hh * t;
                let omega = self.symbol.value(theta);
                v += wt * self.g_at(theta);
                noise += wt * (omega.abs() + self.lambda.abs() + 1.0) / (omega - self.lambda).abs();
            }
            (v * hh, 8.0 * f64::EPSILON * noise * hh)
        };
        let mut achieved = 0.0;
        let mut accepted: Vec<(f64, f64)> = Vec::new();
        while let Some((a, b, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let (whole, n0) = panel(a, b);
            let (left, n1) = panel(a, m);
            let (right, n2) = panel(m, b);
            let diff = (whole - left - right).abs();
            let budget = 1e-3 * self.tol * (b - a) / TAU + n0 + n1 + n2;
            if diff <= budget {
                achieved += diff / TAU;
                accepted.push((a, b));
            } else if depth >= self.max_depth || accepted.len() + stack.len() >= MAX_PANELS {
                return Err(Error::QuadratureFailure {
                    achieved: diff,
                    requested: self.tol,
                });
            } else {
                stack.push((a, m, depth + 1));
                stack.push((m, b, depth + 1));
            }
        }
        accepted.sort_by(|p, q| p.0.total_cmp(&q.0));
        for (a, b) in &accepted {
            let hh = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            for (t, wt) in x.iter().zip(w) {
                let theta = c + hh * t;
                self.nodes.push(theta);
                self.node_conj.push(Complex64::from_polar(1.0, -theta));
                self.weights.push(wt * hh / TAU);
                self.g.push(self.g_at(theta));
            }
        }
        self.panels = accepted.len();
        self.achieved = achieved;
        self.mean_log = self.weights.iter().zip(&self.g).map(|(w, g)| w * g).sum();
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn achieved(&self) -> f64 {
        self.achieved
    }

    /// ∫ ln|ω − λ| dm.
    pub fn mean_log(&self) -> f64 {
        self.mean_log
    }

    /// Σ_r ln|ζ − ζ_r| at angle θ.
    fn root_log(&self, theta: f64) -> f64 {
        self.roots
            .iter()
            .map(|&r| (2.0 * (0.5 * (theta - r)).sin()).abs().ln())
            .sum()
    }

    /// The smooth remainder g(θ) = ln|ω − λ| − Σ_r ln|ζ − ζ_r|.
    fn g_at(&self, theta: f64) -> f64 {
        (self.symbol.value(theta) - self.lambda).abs().ln() - self.root_log(theta)
    }

    /// Σ_r ln(1 − ζ̄_r z), the exact Schwarz integral of the root part.
    fn root_part(&self, z: Complex64) -> Complex64 {
        self.root_points.iter().map(|zr| (1.0 - zr.conj() * z).ln()).sum()
    }

    /// Q(z;λ) = ∫ ln|ω − λ| H(z ζ̄) dm for |z| ≠ 1.
    pub fn q(&self, z: Complex64) -> Result<QValue> {
        let r = z.norm();
        if !r.is_finite() || (r - 1.0).abs() <= 1e-14 {
            return Err(Error::BadPoint(format!("Q needs |z| ≠ 1, got {z}")));
        }
        if r > 1.0 {
            let inner = self.q(1.0 / z.conj())?;
            return Ok(QValue {
                value: -inner.value.conj(),
                ..inner
            });
        }
        if r <= FAST_RADIUS {
            let s: Complex64 = self
                .node_conj
                .iter()
                .zip(self.weights.iter().zip(&self.g))
                .map(|(e, (w, g))| h(z * e) * (w * g))
                .sum();
            return Ok(QValue {
                value: self.root_part(z) + s,
                achieved: self.achieved,
                panels: self.panels,
            });
        }
        self.q_adaptive(z)
    }

    fn q_adaptive(&self, z: Complex64) -> Result<QValue> {
        let tz = z.arg().rem_euclid(TAU);
        // Reference value near arg z; shifted off roots where g is a limit.
        let near = self
            .roots
            .iter()
            .any(|&r| crate::symbol::angle_distance(r, tz) < 1e-7)
            || self.symbol.distance_to_jump(tz) < 1e-7;
        let g0 = if near { self.g_at(tz + 1e-6) } else { self.g_at(tz) };
        let mut breaks = self.breaks.clone();
        breaks.push(tz);
        let breaks = quadrature::breakpoints(0.0, TAU, breaks);
        let opts = AdaptiveOptions {
            abs_tol: 1e-3 * self.tol,
            rel_tol: 1e-3 * self.tol,
            max_depth: self.max_depth,
            max_panels: 400_000,
        };
        let res = quadrature::integrate(
            |t| {
                let e = Complex64::from_polar(1.0, -t);
                h(z * e) * ((self.g_at(t) - g0) / TAU)
            },
            &breaks,
            opts,
        )?;
        Ok(QValue {
            value: self.root_part(z) + g0 + res.value,
            achieved: res.error,
            panels: res.panels,
        })
    }

    /// ξ(z;λ) = exp(−Q/2).
    pub fn xi(&self, z: Complex64) -> Result<Complex64> {
        Ok((-0.5 * self.q(z)?.value).exp())
    }

    /// Conjugate function of ln|ω − λ| at angle θ.
    pub fn conjugate_log(&self, theta: f64) -> Result<f64> {
        let t0 = theta.rem_euclid(TAU);
        if self.symbol.distance_to_jump(t0) < 1e-10 {
            return Err(Error::BoundaryUndefined(format!("angle {theta} is a jump point")));
        }
        if self.roots.iter().any(|&r| crate::symbol::angle_distance(r, t0) < 1e-10) {
            return Err(Error::BoundaryUndefined(format!("angle {theta} is a root of ω − λ")));
        }
        let zeta = Complex64::from_polar(1.0, t0);
        let root_part: f64 = self.root_points.iter().map(|zr| (1.0 - zr.conj() * zeta).arg()).sum();
        let g0 = self.g_at(t0);
        let (lo, hi) = (t0 - PI, t0 + PI);
        let inner = self
            .breaks
            .iter()
            .flat_map(|&b| [b - TAU, b, b + TAU])
            .chain(std::iter::once(t0));
        let breaks = quadrature::breakpoints(lo, hi, inner);
        let opts = AdaptiveOptions {
            abs_tol: 1e-3 * self.tol,
            rel_tol: 1e-3 * self.tol,
            max_depth: self.max_depth,
            max_panels: 400_000,
        };
        let (v, _) = quadrature::integrate_real(
            |t| {
                let d = 0.5 * (t0 - t);
                if d == 0.0 {
                    return 0.0;
                }
                (self.g_at(t) - g0) * d.cos() / d.sin()
            },
            &breaks,
            opts,
        )?;
        Ok(root_part + v / TAU)
    }

    /// σ(ζ,λ), the unimodular common factor of both boundary values of ξ.
    pub fn boundary_sigma(&self, theta: f64) -> Result<Complex64> {
        let c = self.conjugate_log(theta)?;
        Ok(Complex64::from_polar(1.0, -0.5 * c))
    }

    /// ξ(ζ±;λ) = σ |ω(ζ) − λ|^{∓1/2}.
    pub fn boundary_xi(&self, theta: f64, side: Approach) -> Result<Complex64> {
        let sigma = self.boundary_sigma(theta)?;
        let d = (self.symbol.value(theta) - self.lambda).abs();
        Ok(match side {
            Approach::Inside => sigma / d.sqrt(),
            Approach::Outside => sigma * d.sqrt(),
        })
    }

    /// Radial limit of ξ by second-order Richardson over δ ∈ {δ₀, δ₀/2, δ₀/4}.
    pub fn boundary_xi_radial(&self, theta: f64, side: Approach, delta0: f64) -> Result<Complex64> {
        let zeta = Complex64::from_polar(1.0, theta);
        let at = |d: f64| -> Result<Complex64> {
            let r = match side {
                Approach::Inside => 1.0 - d,
                Approach::Outside => 1.0 + d,
            };
            self.xi(zeta * r)
        };
        let v1 = at(delta0)?;
        let v2 = at(0.5 * delta0)?;
        let v4 = at(0.25 * delta0)?;
        Ok((8.0 * v4 - 6.0 * v2 + v1) / 3.0)
    }
}

/// Q(z;λ) for a single point.
pub fn q_function(sym: &PiecewiseSymbol, z: Complex64, lambda: f64) -> Result<QValue> {
    SingularQuadrature::new(sym, lambda)?.q(z)
}

/// ξ(z;λ) for a single point.
pub fn xi(sym: &PiecewiseSymbol, z: Complex64, lambda: f64) -> Result<Complex64> {
    SingularQuadrature::new(sym, lambda)?.xi(z)
}

/// F_λ(z) = exp(½∫ ln(ω − λ) H(z ζ̄) dm) for λ below the essential infimum.
pub fn outer_f(sym: &PiecewiseSymbol, z: Complex64, lambda: f64) -> Result<Complex64> {
    let (g1, _) = sym.essential_range();
    if !(lambda < g1) {
        return Err(Error::RequiresBelowInfimum { lambda, gamma1: g1 });
    }
    if z.norm() >= 1.0 {
        return Err(Error::BadPoint(format!("outer function needs |z| < 1, got {z}")));
    }
    let q = SingularQuadrature::new(sym, lambda)?.q(z)?;
    Ok((0.5 * q.value).exp())
}

/// σ(ζ,λ) at angle θ.
pub fn boundary_sigma(sym: &PiecewiseSymbol, theta: f64, lambda: f64) -> Result<Complex64> {
    SingularQuadrature::new(sym, lambda)?.boundary_sigma(theta)
}

/// ξ(ζ±;λ) at angle θ.
pub fn boundary_xi(sym: &PiecewiseSymbol, theta: f64, lambda: f64, side: Approach) -> Result<Complex64> {
    SingularQuadrature::new(sym, lambda)?.boundary_xi(theta, side)
}

/// Closed form of (π/2)∫_Γ H(z ζ̄) dm for |z| ≠ 1.
pub fn phase_a_closed(arcs: &[Arc], z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if (r - 1.0).abs() <= 1e-14 {
        return Err(Error::BadPoint(format!("phase needs |z| ≠ 1, got {z}")));
    }
    let m: f64 = arcs.iter().map(Arc::measure).sum();
    let mut s = Complex64::new(0.0, 0.0);
    if r < 1.0 {
        for a in arcs {
            s += (1.0 - z * a.alpha_point().conj()).ln() - (1.0 - z * a.beta_point().conj()).ln();
        }
        Ok(FRAC_PI_2 * m + 0.5 * I * s)
    } else {
        for a in arcs {
            s += (1.0 - a.alpha_point() / z).ln() - (1.0 - a.beta_point() / z).ln();
        }
        Ok(-FRAC_PI_2 * m + 0.5 * I * s)
    }
}

/// Phase over a level set, including the empty and full sentinels.
pub fn phase_a_level(level: &LevelSet, z: Complex64) -> Result<Complex64> {
    match level.coverage {
        Coverage::Empty => Ok(Complex64::new(0.0, 0.0)),
        Coverage::Full => Ok(Complex64::new(if z.norm() < 1.0 { FRAC_PI_2 } else { -FRAC_PI_2 }, 0.0)),
        Coverage::Partial => phase_a_closed(&level.arcs, z),
    }
}

/// (π/2)∫_{Γ(λ)} H(z ζ̄) dm by adaptive quadrature over the arcs.
pub fn phase_a_integral(sym: &PiecewiseSymbol, z: Complex64, lambda: f64) -> Result<QValue> {
    if (z.norm() - 1.0).abs() <= 1e-14 {
        return Err(Error::BadPoint(format!("phase needs |z| ≠ 1, got {z}")));
    }
    let level = levelset::sublevel_set(sym, lambda)?;
    let opts = AdaptiveOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-14,
        max_depth: 50,
        max_panels: 200_000,
    };
    let f = |t: f64| h(z * Complex64::from_polar(1.0, -t)) / TAU;
    let tz = z.arg();
    let mut total = Complex64::new(0.0, 0.0);
    let mut achieved = 0.0;
    let mut panels = 0;
    let spans: Vec<(f64, f64)> = match level.coverage {
        Coverage::Empty => vec![],
        Coverage::Full => vec![(0.0, TAU)],
        Coverage::Partial => level.arcs.iter().map(|a| (a.alpha, a.beta)).collect(),
    };
    for (a, b) in spans {
        let breaks = quadrature::breakpoints(a, b, [tz - TAU, tz, tz + TAU, tz + 2.0 * TAU]);
        let r = quadrature::integrate(f, &breaks, opts)?;
        total += r.value;
        achieved += r.error;
        panels += r.panels;
    }
    Ok(QValue {
        value: FRAC_PI_2 * total,
        achieved,
        panels,
    })
}

/// Arcs, coefficients c_j and ρ_j = √c_j at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcData {
    pub lambda: f64,
    pub arcs: Vec<Arc>,
    pub c: Vec<f64>,
    pub rho: Vec<f64>,
    pub measure: f64,
}

/// c_j = (1/2π) |β_j − α_j| Π_{l≠j} |β_j − α_l| |β_j − β_l|⁻¹, the residue
/// weight of L at β_j.
pub fn coefficients_c(lambda: f64, arcs: &[Arc]) -> Result<ArcData> {
    let n = arcs.len();
    for j in 0..n {
        for l in (j + 1)..n {
            if (arcs[j].beta_point() - arcs[l].beta_point()).norm() < 1e-8 {
                return Err(Error::MergedSingularities(j, l));
            }
        }
    }
    let c: Vec<f64> = (0..n)
        .map(|j| {
            let b = arcs[j].beta_point();
            let ratio: f64 = (0..n)
                .filter(|&l| l != j)
                .map(|l| (b - arcs[l].alpha_point()).norm() / (b - arcs[l].beta_point()).norm())
                .product();
            (b - arcs[j].alpha_point()).norm() * ratio / TAU
        })
        .collect();
    let rho = c.iter().map(|v| v.sqrt()).collect();
    Ok(ArcData {
        lambda,
        arcs: arcs.to_vec(),
        c,
        rho,
        measure: arcs.iter().map(Arc::measure).sum(),
    })
}

/// L(z) = (i/π) e^{−πi m(Γ)} Π_j (1 − z ᾱ_j)/(1 − z β̄_j).
pub fn l_function(arcs: &[Arc], z: Complex64) -> Result<Complex64> {
    let m: f64 = arcs.iter().map(Arc::measure).sum();
    let mut v = I / PI * Complex64::from_polar(1.0, -PI * m);
    for a in arcs {
        let den = 1.0 - z * a.beta_point().conj();
        if den.norm() <= 1e-14 {
            return Err(Error::Pole(format!("L has a pole at z = {z}")));
        }
        v *= (1.0 - z * a.alpha_point().conj()) / den;
    }
    Ok(v)
}

/// Partial-fraction form Σ c_j H(z β̄_j) + (i/π) cos(π m(Γ)).
pub fn l_partial_fractions(data: &ArcData, z: Complex64) -> Result<Complex64> {
    let mut v = I / PI * (PI * data.measure).cos();
    for (a, c) in data.arcs.iter().zip(&data.c) {
        let w = z * a.beta_point().conj();
        if (1.0 - w).norm() <= 1e-14 {
            return Err(Error::Pole(format!("L has a pole at z = {z}")));
        }
        v += *c * h(w);
    }
    Ok(v)
}

/// Largest relative discrepancy between the two forms of L at `samples`
/// pseudo-random points of |z| < 3 kept at least 0.05 from every pole.
pub fn l_check(arcs: &[Arc], samples: usize, seed: u64) -> Result<f64> {
    let data = coefficients_c(0.0, arcs)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < samples {
        let z = Complex64::from_polar(3.0 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
        if arcs.iter().any(|a| (z - a.beta_point()).norm() < 0.05) {
            continue;
        }
        let l1 = l_function(arcs, z)?;
        let l2 = l_partial_fractions(&data, z)?;
        worst = worst.max((l1 - l2).norm() / 1.0f64.max(l1.norm()));
        done += 1;
    }
    Ok(worst)
}

/// Samples of μ(t;z) = ∫_{ω<t} 𝒫 on a grid of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuMeasure {
    pub z: Complex64,
    pub samples: Vec<(f64, f64)>,
}

/// μ(t;z) at one level. Exceptional levels are evaluated as left limits.
pub fn mu_at(sym: &PiecewiseSymbol, z: Complex64, t: f64) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(Error::BadPoint(format!("μ needs |z| < 1, got {z}")));
    }
    let t = match levelset::exceptional_set(sym).nearest(t) {
        Some((e, d)) if d < GUARD_BAND => e - 2.0 * GUARD_BAND,
        _ => t,
    };
    let level = levelset::sublevel_set_unchecked(sym, t)?;
    Ok(match level.coverage {
        Coverage::Empty => 0.0,
        Coverage::Full => 1.0,
        Coverage::Partial => (2.0 / PI) * phase_a_closed(&level.arcs, z)?.re,
    })
}

pub fn mu_measure(sym: &PiecewiseSymbol, z: Complex64, t_grid: &[f64]) -> Result<MuMeasure> {
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let samples = grid
        .into_iter()
        .map(|t| mu_at(sym, z, t).map(|m| (t, m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MuMeasure { z, samples })
}

/// ∫ ln|t − ζλ| dμ(t;z), integrated by parts against μ.
pub fn mu_log_potential(sym: &PiecewiseSymbol, z: Complex64, spectral: Complex64) -> Result<f64> {
    let (g1, g2) = sym.essential_range();
    let (lr, eps) = (spectral.re, spectral.im);
    let mut inner = levelset::exceptional_set(sym).all();
    inner.push(lr);
    let breaks = quadrature::breakpoints(g1, g2, inner);
    let opts = AdaptiveOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_depth: 50,
        max_panels: 100_000,
    };
    let (v, _) = quadrature::integrate_real(
        |t| {
            let mu = mu_at(sym, z, t).unwrap_or(f64::NAN);
            let d = t - lr;
            mu * d / (d * d + eps * eps)
        },
        &breaks,
        opts,
    )?;
    Ok((spectral - g2).norm().ln() - v)
}
