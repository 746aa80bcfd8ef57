#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use toeplitz_spectral::symbol::{PiecewiseSymbol, SymbolPiece, TrigPoly};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform point in the disk of radius `rmax`.
pub fn disk_point(rng: &mut StdRng, rmax: f64) -> Complex64 {
    Complex64::from_polar(rmax * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>())
}

/// −cos 2θ on the upper half circle, then 2 and −2 on the two lower quarters.
pub fn fig2_symbol() -> PiecewiseSymbol {
    PiecewiseSymbol::new(vec![
        SymbolPiece {
            theta_start: 0.0,
            theta_end: PI,
            poly: TrigPoly::new(vec![0.0, 0.0, -1.0], vec![]),
        },
        SymbolPiece {
            theta_start: PI,
            theta_end: 1.5 * PI,
            poly: TrigPoly::constant(2.0),
        },
        SymbolPiece {
            theta_start: 1.5 * PI,
            theta_end: TAU,
            poly: TrigPoly::constant(-2.0),
        },
    ])
    .expect("valid symbol")
}

/// √(2/(1 − 2λz + z²)) continued from √2 at z = 0.
pub fn regular_xi(z: Complex64, lambda: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, lambda.acos());
    2f64.sqrt() / ((1.0 - z * e).sqrt() * (1.0 - z * e.conj()).sqrt())
}

/// √(2/π)(1 − λ²)^{1/4}/(1 − 2λz + z²).
pub fn regular_phi(z: Complex64, lambda: f64) -> Complex64 {
    (2.0 / PI).sqrt() * (1.0 - lambda * lambda).powf(0.25) / (1.0 - 2.0 * lambda * z + z * z)
}

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

fn sigma(lambda: f64) -> f64 {
    (1.0 / lambda - 1.0).ln() / TAU
}

/// Eigenfunction of the indicator of the arc (t1, t2) in product form,
/// without the factor λ^{−1/2} carried by ξ.
pub fn singular_phi_literal(z: Complex64, lambda: f64, t1: f64, t2: f64) -> Complex64 {
    let s = sigma(lambda);
    let m = (t2 - t1).rem_euclid(TAU) / TAU;
    let z1 = Complex64::from_polar(1.0, t1);
    let z2 = Complex64::from_polar(1.0, t2);
    let rho = ((z1 - z2).norm() / TAU).sqrt();
    let p1 = ((1.0 - z / z1).ln() * c(-0.5, -s)).exp();
    let p2 = ((1.0 - z / z2).ln() * c(-0.5, s)).exp();
    rho * (-PI * s * m).exp() * p1 * p2
}

/// Literal product form multiplied by λ^{−1/2}.
pub fn singular_phi(z: Complex64, lambda: f64, t1: f64, t2: f64) -> Complex64 {
    singular_phi_literal(z, lambda, t1, t2) / lambda.sqrt()
}

/// Exterior partner ρ λ^{1/2} e^{π(σ+i)m} ζ₁ z⁻¹ (1 − ζ₁/z)^{−1/2−iσ} (1 − ζ₂/z)^{−1/2+iσ}.
pub fn singular_phi_ext(z: Complex64, lambda: f64, t1: f64, t2: f64) -> Complex64 {
    let s = sigma(lambda);
    let m = (t2 - t1).rem_euclid(TAU) / TAU;
    let z1 = Complex64::from_polar(1.0, t1);
    let z2 = Complex64::from_polar(1.0, t2);
    let rho = ((z1 - z2).norm() / TAU).sqrt();
    let p1 = ((1.0 - z1 / z).ln() * c(-0.5, -s)).exp();
    let p2 = ((1.0 - z2 / z).ln() * c(-0.5, s)).exp();
    rho * lambda.sqrt() * (c(PI * s * m, PI * m)).exp() * z1 / z * p1 * p2
}
