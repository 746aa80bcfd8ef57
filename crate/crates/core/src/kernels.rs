//! Schwarz, Poisson and reproducing kernels together with the arc identities
//! used by the closed-form evaluations.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

const POLE_GUARD: f64 = 1e-14;

/// H(z) = (1 + z)/(1 − z) without a pole check.
#[inline]
pub fn h(z: Complex64) -> Complex64 {
    (1.0 + z) / (1.0 - z)
}

/// H(z) = (1 + z)/(1 − z).
pub fn schwarz_h(z: Complex64) -> Result<Complex64> {
    if (1.0 - z).norm() <= POLE_GUARD {
        return Err(Error::Pole(format!("Schwarz kernel at z = {z}")));
    }
    Ok(h(z))
}

/// 𝒫(r, θ) = (1/2π)(1 − r²)/(1 − 2r cos θ + r²).
pub fn poisson_p(r: f64, theta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("Poisson kernel needs 0 ≤ r < 1, got {r}")));
    }
    Ok((1.0 - r * r) / (TAU * (1.0 - 2.0 * r * theta.cos() + r * r)))
}

/// K_u(z) = 1/(1 − ū z).
pub fn reproducing_k(u: Complex64, z: Complex64) -> Result<Complex64> {
    let d = 1.0 - u.conj() * z;
    if d.norm() <= POLE_GUARD {
        return Err(Error::Pole(format!("reproducing kernel K_{u} at z = {z}")));
    }
    Ok(1.0 / d)
}

/// Normalized counterclockwise measure of the arc from angle α to angle β.
pub fn arc_measure(alpha: f64, beta: f64) -> f64 {
    (beta - alpha).rem_euclid(TAU) / TAU
}

/// Residual of H(ūz) + H(v z̄) = 2(1 − ūv|z|²) K_u(z) conj(K_v(z)).
pub fn toz_residual(z: Complex64, u: Complex64, v: Complex64) -> f64 {
    let lhs = h(u.conj() * z) + h(v * z.conj());
    let ku = 1.0 / (1.0 - u.conj() * z);
    let kv = 1.0 / (1.0 - v.conj() * z);
    let rhs = 2.0 * (1.0 - u.conj() * v * z.norm_sqr()) * ku * kv.conj();
    (lhs - rhs).norm()
}

/// Maximum residual of the three identities for the arc Γ = (α, β) and a
/// point ζ outside it:
/// β ᾱ = e^{2πi m(Γ)}, i e^{−πi m(Γ)}(1 − β ᾱ) = |β − α| and
/// e^{−πi m(Γ)}(1 − ζ ᾱ)/(1 − ζ β̄) = |ζ − α|/|ζ − β|.
pub fn arc_identities(alpha: f64, beta: f64, zeta: f64) -> f64 {
    let a = Complex64::from_polar(1.0, alpha);
    let b = Complex64::from_polar(1.0, beta);
    let z = Complex64::from_polar(1.0, zeta);
    let m = arc_measure(alpha, beta);
    let phase = Complex64::from_polar(1.0, -PI * m);
    let r1 = (b * a.conj() - Complex64::from_polar(1.0, TAU * m)).norm();
    let r2 = (Complex64::i() * phase * (1.0 - b * a.conj()) - (b - a).norm()).norm();
    let lhs = phase * (1.0 - z * a.conj()) / (1.0 - z * b.conj());
    let rhs = (z - a).norm() / (z - b).norm();
    let r3 = (lhs - rhs).norm() / 1.0f64.max(rhs);
    r1.max(r2).max(r3)
}
