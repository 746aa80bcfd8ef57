//! Spectral frames, generalized eigenfunctions, the spectral density kernel,
//! resolvent forms and weak spectral integrals.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{self, ArcData, SingularQuadrature};
use crate::kernels::h;
use crate::levelset::{self, Arc, Coverage, LevelSet};
use crate::quadrature::{self, AdaptiveOptions};
use crate::symbol::PiecewiseSymbol;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest accepted disagreement between the two density forms.
pub const FORM_TOLERANCE: f64 = 1e-8;

/// Everything needed to evaluate eigenfunctions at one admissible level.
#[derive(Debug, Clone)]
pub struct SpectralFrame<'a> {
    symbol: &'a PiecewiseSymbol,
    pub lambda: f64,
    pub level: LevelSet,
    pub arcdata: ArcData,
    pub m: usize,
    quad: SingularQuadrature,
}

/// Both evaluations of the density kernel at one (u, v).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    /// Σ_j conj(φ_j(u)) φ_j(v).
    pub value: Complex64,
    /// (1/π)(1 − ūv)⁻¹ conj(ξ(u)) ξ(v) sin(conj(A(u)) + A(v)).
    pub closed_form: Complex64,
    /// |value − closed_form| scaled by the Cauchy–Schwarz bound.
    pub discrepancy: f64,
}

/// Assembles the level set, the coefficients c_j and the quadrature at λ.
pub fn spectral_frame(sym: &PiecewiseSymbol, lambda: f64) -> Result<SpectralFrame<'_>> {
    let level = levelset::sublevel_set(sym, lambda)?;
    if level.coverage != Coverage::Partial {
        return Err(Error::OutsideRange(lambda));
    }
    let arcdata = hardy::coefficients_c(lambda, &level.arcs)?;
    let quad = SingularQuadrature::new(sym, lambda)?;
    let m = level.arcs.len();
    Ok(SpectralFrame {
        symbol: sym,
        lambda,
        level,
        arcdata,
        m,
        quad,
    })
}

impl<'a> SpectralFrame<'a> {
    pub fn symbol(&self) -> &'a PiecewiseSymbol {
        self.symbol
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcdata.arcs
    }

    pub fn measure(&self) -> f64 {
        self.arcdata.measure
    }

    pub fn quadrature(&self) -> &SingularQuadrature {
        &self.quad
    }

    pub fn xi(&self, z: Complex64) -> Result<Complex64> {
        self.quad.xi(z)
    }

    pub fn phase(&self, z: Complex64) -> Result<Complex64> {
        hardy::phase_a_closed(self.arcs(), z)
    }

    fn check_branch(&self, j: usize) -> Result<()> {
        if j >= self.m {
            return Err(Error::BranchOutOfRange { index: j, m: self.m });
        }
        Ok(())
    }

    fn check_interior(z: Complex64) -> Result<()> {
        if !(z.norm() < 1.0) {
            return Err(Error::BadPoint(format!("interior evaluation needs |z| < 1, got {z}")));
        }
        Ok(())
    }

    /// φ_j(z;λ) = e^{−πi m(Γ)/2} ρ_j ξ(z) K_{β_j}(z) e^{iA(z)}, branch `j` counted from 0.
    pub fn eigenfunction(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check_branch(j)?;
        Ok(self.eigenfunctions(z)?[j])
    }

    /// All branches φ_0..φ_{m−1} at one interior point.
    pub fn eigenfunctions(&self, z: Complex64) -> Result<Vec<Complex64>> {
        Self::check_interior(z)?;
        let common = Complex64::from_polar(1.0, -FRAC_PI_2 * self.measure()) * self.xi(z)? * (I * self.phase(z)?).exp();
        Ok(self
            .arcs()
            .iter()
            .zip(&self.arcdata.rho)
            .map(|(a, rho)| common * *rho / (1.0 - z * a.beta_point().conj()))
            .collect())
    }

    /// Product form ρ_j ξ (1 − zβ̄_j)⁻¹ Π_l (1 − zᾱ_l)^{−1/2} (1 − zβ̄_l)^{1/2}
    /// with a principal branch for every half power.
    pub fn eigenfunction_product(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check_branch(j)?;
        Self::check_interior(z)?;
        let mut p = self.arcdata.rho[j] * self.xi(z)? / (1.0 - z * self.arcs()[j].beta_point().conj());
        for a in self.arcs() {
            p *= (1.0 - z * a.beta_point().conj()).sqrt() / (1.0 - z * a.alpha_point().conj()).sqrt();
        }
        Ok(p)
    }

    /// Exterior partner ρ_j e^{−πi m(Γ)} ξ(z)(1 − zβ̄_j)⁻¹ Π_l (1 − α_l/z)^{−1/2}(1 − β_l/z)^{1/2}.
    pub fn eigenfunction_ext(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check_branch(j)?;
        if !(z.norm() > 1.0) || !z.norm().is_finite() {
            return Err(Error::BadPoint(format!("exterior evaluation needs |z| > 1, got {z}")));
        }
        let pole = 1.0 - z * self.arcs()[j].beta_point().conj();
        if pole.norm() <= 1e-14 * z.norm() {
            return Err(Error::Pole(format!("exterior eigenfunction at z = {z}")));
        }
        let mut p = self.arcdata.rho[j] * Complex64::from_polar(1.0, -PI * self.measure()) * self.xi(z)? / pole;
        for a in self.arcs() {
            p *= (1.0 - a.beta_point() / z).sqrt() / (1.0 - a.alpha_point() / z).sqrt();
        }
        Ok(p)
    }

    /// |(ω(ζ) − λ) φ_j((1−δ)ζ) − φ_j^ext((1+δ)ζ)|.
    pub fn rh_residual(&self, j: usize, theta: f64, delta: f64) -> Result<f64> {
        self.check_branch(j)?;
        if !(delta > 0.0 && delta < 0.1) {
            return Err(Error::InvalidArgument(format!(
                "radial offset must lie in (0, 0.1), got {delta}; use boundary_xi for boundary values"
            )));
        }
        if self.symbol.distance_to_jump(theta) < 1e-10 {
            return Err(Error::BoundaryUndefined(format!("angle {theta} is a jump point")));
        }
        for a in self.arcs() {
            for e in [a.alpha, a.beta] {
                if crate::symbol::angle_distance(e, theta) < 1e-10 {
                    return Err(Error::BoundaryUndefined(format!("angle {theta} is an arc endpoint")));
                }
            }
        }
        let w = self.symbol.value(theta) - self.lambda;
        if w.abs() < 1e-12 {
            return Err(Error::BoundaryUndefined(format!("ω(ζ) = λ at angle {theta}")));
        }
        let zeta = Complex64::from_polar(1.0, theta);
        let inner = self.eigenfunction(j, zeta * (1.0 - delta))?;
        let outer = self.eigenfunction_ext(j, zeta * (1.0 + delta))?;
        Ok((w * inner - outer).norm())
    }

    /// Density of (E(λ)K_u, K_v) in both forms.
    pub fn density(&self, u: Complex64, v: Complex64) -> Result<DensityValue> {
        let pu = self.eigenfunctions(u)?;
        let pv = self.eigenfunctions(v)?;
        let value: Complex64 = pu.iter().zip(&pv).map(|(a, b)| a.conj() * b).sum();
        let closed_form = self.density_closed_form(u, v)?;
        let nu: f64 = pu.iter().map(|a| a.norm_sqr()).sum();
        let nv: f64 = pv.iter().map(|a| a.norm_sqr()).sum();
        let scale = (nu * nv).sqrt().max(f64::MIN_POSITIVE);
        let discrepancy = (value - closed_form).norm() / scale;
        if !(discrepancy <= FORM_TOLERANCE) {
            return Err(Error::FormMismatch(discrepancy));
        }
        Ok(DensityValue {
            value,
            closed_form,
            discrepancy,
        })
    }

    fn density_closed_form(&self, u: Complex64, v: Complex64) -> Result<Complex64> {
        let xu = self.xi(u)?;
        let xv = self.xi(v)?;
        let au = self.phase(u)?;
        let av = self.phase(v)?;
        Ok(xu.conj() * xv * (au.conj() + av).sin() / (PI * (1.0 - u.conj() * v)))
    }

    /// Gram matrix [density(u_i, u_j)] over a point set.
    pub fn gram(&self, points: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let phis = points.iter().map(|&p| self.eigenfunctions(p)).collect::<Result<Vec<_>>>()?;
        Ok(phis
            .iter()
            .map(|pi| {
                phis.iter()
                    .map(|pj| pi.iter().zip(pj).map(|(a, b)| a.conj() * b).sum())
                    .collect()
            })
            .collect())
    }

    /// Arcs of the complementary set Γ̃ = T \ closure(Γ), in the order (β_j, α_{j+1}).
    pub fn complementary_arcs(&self) -> Vec<Arc> {
        let arcs = self.arcs();
        let n = arcs.len();
        (0..n)
            .map(|j| {
                let next = &arcs[(j + 1) % n];
                let mut a = Arc::new(arcs[j].beta, next.alpha);
                a.alpha_kind = arcs[j].beta_kind;
                a.beta_kind = next.alpha_kind;
                a
            })
            .collect()
    }

    /// Eigenfunctions built from Γ̃ in place of Γ: poles at the α endpoints and
    /// coefficients ρ̃_j taken from Γ̃.
    pub fn alt_eigenfunction(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check_branch(j)?;
        Self::check_interior(z)?;
        let tilde = self.complementary_arcs();
        let data = hardy::coefficients_c(self.lambda, &tilde)?;
        let phase = hardy::phase_a_closed(&tilde, z)?;
        let common = Complex64::from_polar(1.0, -FRAC_PI_2 * data.measure) * self.xi(z)? * (I * phase).exp();
        Ok(common * data.rho[j] / (1.0 - z * tilde[j].beta_point().conj()))
    }

    /// (∫ |φ_j(rζ)|^p dm)^{1/p} by the trapezoid rule on `samples` points.
    pub fn hp_mean(&self, j: usize, p: f64, r: f64, samples: usize) -> Result<f64> {
        self.check_branch(j)?;
        let mut s = 0.0;
        for k in 0..samples {
            let z = Complex64::from_polar(r, TAU * (k as f64 + 0.5) / samples as f64);
            s += self.eigenfunction(j, z)?.norm().powf(p);
        }
        Ok((s / samples as f64).powf(1.0 / p))
    }
}

/// (1 − ūv)⁻¹ exp(−½ ∫ ln(ω − ζλ)(H(v ζ̄) + H(ū ζ)) dm), principal logarithm.
pub fn resolvent_form(sym: &PiecewiseSymbol, u: Complex64, v: Complex64, spectral: Complex64) -> Result<Complex64> {
    if !(u.norm() < 1.0 && v.norm() < 1.0) {
        return Err(Error::BadPoint(format!("resolvent form needs |u|, |v| < 1, got {u}, {v}")));
    }
    let (g1, g2) = sym.essential_range();
    let dist = if spectral.re < g1 {
        (spectral - g1).norm()
    } else if spectral.re > g2 {
        (spectral - g2).norm()
    } else {
        spectral.im.abs()
    };
    if dist < 1e-8 {
        return Err(Error::OnCut(format!("{spectral}")));
    }
    let mut inner: Vec<f64> = sym.jumps().iter().map(|j| j.angle).collect();
    inner.extend(sym.seams());
    inner.extend(sym.critical_points().iter().filter_map(|c| c.angle));
    if spectral.re > g1 && spectral.re < g2 {
        inner.extend(levelset::level_roots(sym, spectral.re).iter().map(|r| r.angle));
    }
    inner.push(v.arg());
    inner.push(u.arg());
    let breaks = quadrature::breakpoints(0.0, TAU, inner.into_iter().map(|t| t.rem_euclid(TAU)));
    let opts = AdaptiveOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_depth: 50,
        max_panels: 400_000,
    };
    let ub = u.conj();
    let res = quadrature::integrate(
        |t| {
            let e = Complex64::from_polar(1.0, t);
            let lg = (sym.value(t) - spectral).ln();
            lg * (h(v * e.conj()) + h(ub * e)) / TAU
        },
        &breaks,
        opts,
    )?;
    Ok((-0.5 * res.value).exp() / (1.0 - ub * v))
}

/// Stone-formula density (2πi)⁻¹[R(λ+iε) − R(λ−iε)] with second-order
/// Richardson extrapolation over ε ∈ {ε₀, ε₀/2, ε₀/4}.
pub fn stone_density(sym: &PiecewiseSymbol, u: Complex64, v: Complex64, lambda: f64, eps0: f64) -> Result<Complex64> {
    let jump = |e: f64| -> Result<Complex64> {
        let up = resolvent_form(sym, u, v, Complex64::new(lambda, e))?;
        let down = resolvent_form(sym, u, v, Complex64::new(lambda, -e))?;
        Ok((up - down) / (2.0 * PI * I))
    };
    let d1 = jump(eps0)?;
    let d2 = jump(0.5 * eps0)?;
    let d4 = jump(0.25 * eps0)?;
    Ok((8.0 * d4 - 6.0 * d2 + d1) / 3.0)
}

/// A bounded real function of λ with known compact support.
pub trait SpectralWeight: Sync {
    fn eval(&self, lambda: f64) -> f64;
    /// Closed interval outside of which the function vanishes.
    fn support(&self) -> (f64, f64);
}

/// C^∞ bump exp(1 − 1/(1 − x²)) with x = (λ − center)/radius, peak value 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
}

impl SpectralWeight for Bump {
    fn eval(&self, lambda: f64) -> f64 {
        let x = (lambda - self.center) / self.radius;
        if x.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - x * x)).exp()
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// Polynomial Σ c_k λ^k restricted to [lo, hi]; `coeffs = [1.0]` is the indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialOn {
    pub coeffs: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl PolynomialOn {
    pub fn indicator(lo: f64, hi: f64) -> Self {
        Self { coeffs: vec![1.0], lo, hi }
    }
}

impl SpectralWeight for PolynomialOn {
    fn eval(&self, lambda: f64) -> f64 {
        if lambda < self.lo || lambda > self.hi {
            return 0.0;
        }
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// ∫_Λ g(λ) Σ_j conj(φ_j(u;λ)) φ_j(v;λ) dλ by adaptive Gauss–Legendre panels.
pub fn weak_measure(
    sym: &PiecewiseSymbol,
    interval: (f64, f64),
    u: Complex64,
    v: Complex64,
    g: &dyn SpectralWeight,
) -> Result<Complex64> {
    let (a, b) = interval;
    if !levelset::is_open_admissible(sym, a, b) {
        return Err(Error::InadmissibleInterval(a, b));
    }
    let (lo, hi) = g.support();
    if lo < a || hi > b {
        return Err(Error::InvalidArgument(format!(
            "weight supported on [{lo}, {hi}] reaches outside ({a}, {b})"
        )));
    }
    if !(hi > lo) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let failure = std::sync::Mutex::new(None);
    let opts = AdaptiveOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_depth: 30,
        max_panels: 20_000,
    };
    let res = quadrature::integrate(
        |t| {
            let w = g.eval(t);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            match spectral_frame(sym, t).and_then(|f| f.density(u, v)) {
                Ok(d) => d.value * w,
                Err(e) => {
                    failure.lock().expect("lock").get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &[lo, hi],
        opts,
    )?;
    if let Some(e) = failure.into_inner().expect("lock") {
        return Err(e);
    }
    Ok(res.value)
}
