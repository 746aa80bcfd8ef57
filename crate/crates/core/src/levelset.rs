//! Sublevel sets Γ(λ) = {ω < λ}, exceptional levels and spectral multiplicity.
//!
//! Walking counterclockwise, Γ(λ) is entered at downward crossings of the
//! level (a root with ω′ < 0, or a jump with ω(η−0) > ω(η+0)) and left at
//! upward crossings. Entry points are the α endpoints and exit points the β
//! endpoints of the arcs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{JumpClass, PiecewiseSymbol};
use crate::trig::bisect;

/// Levels closer than this to an exceptional value are rejected.
pub const GUARD_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Root,
    Jump,
}

/// A counterclockwise arc from `alpha` to `beta`, with `alpha < beta < alpha + 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_kind: EndpointKind,
    pub beta_kind: EndpointKind,
}

impl Arc {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let a = alpha.rem_euclid(TAU);
        let mut len = (beta - alpha).rem_euclid(TAU);
        if len == 0.0 {
            len = TAU;
        }
        Self {
            alpha: a,
            beta: a + len,
            alpha_kind: EndpointKind::Root,
            beta_kind: EndpointKind::Root,
        }
    }

    pub fn length(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Normalized measure, length / 2π.
    pub fn measure(&self) -> f64 {
        self.length() / TAU
    }

    pub fn alpha_point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha)
    }

    pub fn beta_point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.beta)
    }

    /// Whether θ lies in the open arc.
    pub fn contains(&self, theta: f64) -> bool {
        let d = (theta - self.alpha).rem_euclid(TAU);
        d > 0.0 && d < self.length()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Empty,
    Partial,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub lambda: f64,
    pub coverage: Coverage,
    pub arcs: Vec<Arc>,
}

impl LevelSet {
    pub fn measure(&self) -> f64 {
        match self.coverage {
            Coverage::Empty => 0.0,
            Coverage::Full => 1.0,
            Coverage::Partial => self.arcs.iter().map(Arc::measure).sum(),
        }
    }

    pub fn multiplicity(&self) -> usize {
        self.arcs.len()
    }

    pub fn contains(&self, theta: f64) -> bool {
        match self.coverage {
            Coverage::Empty => false,
            Coverage::Full => true,
            Coverage::Partial => self.arcs.iter().any(|a| a.contains(theta)),
        }
    }
}

/// A simple root of ω = λ with the sign of ω′ there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRoot {
    pub angle: f64,
    pub slope: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub thresholds: Vec<f64>,
    pub critical: Vec<f64>,
}

impl ExceptionalSet {
    /// Λ_thr ∪ Λ_cr, sorted and deduplicated.
    pub fn all(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.thresholds.iter().chain(&self.critical).copied().collect();
        sort_dedup(&mut v);
        v
    }

    /// The exceptional value nearest to λ and its distance.
    pub fn nearest(&self, lambda: f64) -> Option<(f64, f64)> {
        self.thresholds
            .iter()
            .chain(&self.critical)
            .map(|&e| (e, (e - lambda).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub n_plus: usize,
    pub n_minus: usize,
    pub s_plus: usize,
    pub s_minus: usize,
    pub m: usize,
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * 1.0f64.max(y.abs()));
}

pub fn exceptional_set(sym: &PiecewiseSymbol) -> ExceptionalSet {
    let mut thresholds: Vec<f64> = sym.jumps().iter().flat_map(|j| [j.left, j.right]).collect();
    let mut critical: Vec<f64> = sym.critical_points().iter().map(|c| c.value).collect();
    sort_dedup(&mut thresholds);
    sort_dedup(&mut critical);
    ExceptionalSet { thresholds, critical }
}

/// Rejects levels within [`GUARD_BAND`] of Λ_exc.
pub fn check_level(sym: &PiecewiseSymbol, lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("level {lambda} is not finite")));
    }
    if let Some((nearest, distance)) = exceptional_set(sym).nearest(lambda) {
        if distance < GUARD_BAND {
            return Err(Error::ExceptionalLevel {
                lambda,
                nearest,
                distance,
            });
        }
    }
    Ok(())
}

/// All roots of ω(e^{iθ}) = λ in piece interiors, with the sign of ω′.
pub fn solve_level(sym: &PiecewiseSymbol, lambda: f64) -> Result<Vec<LevelRoot>> {
    check_level(sym, lambda)?;
    Ok(level_roots(sym, lambda))
}

/// Root finding without the exceptional-level guard. Tangential roots at
/// critical values may be missed.
pub fn level_roots(sym: &PiecewiseSymbol, lambda: f64) -> Vec<LevelRoot> {
    let mut out: Vec<LevelRoot> = Vec::new();
    for (i, piece) in sym.pieces().iter().enumerate() {
        if piece.poly.is_constant() {
            continue;
        }
        let mut cuts: Vec<f64> = sym
            .critical_points()
            .iter()
            .filter(|c| c.piece == i)
            .filter_map(|c| c.angle)
            .map(|a| crate::trig::lift_into(a, piece.theta_start, piece.theta_end, 0.0).unwrap_or(a))
            .filter(|a| *a > piece.theta_start && *a < piece.theta_end)
            .collect();
        cuts.push(piece.theta_start);
        cuts.push(piece.theta_end);
        cuts.sort_by(f64::total_cmp);
        let f = |t: f64| piece.poly.eval(t) - lambda;
        let d = sym.derivative_poly(i);
        for w in cuts.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let (f0, f1) = (f(x0), f(x1));
            if f0 == 0.0 || f1 == 0.0 || (f0 < 0.0) == (f1 < 0.0) {
                continue;
            }
            let mut t = bisect(f, x0, x1);
            // Newton polish kept inside the bracket.
            for _ in 0..3 {
                let dv = d.eval(t);
                if dv == 0.0 {
                    break;
                }
                let next = t - f(t) / dv;
                if next > x0 && next < x1 {
                    t = next;
                }
            }
            let slope = if f1 > f0 { 1 } else { -1 };
            let angle = t.rem_euclid(TAU);
            if !out.iter().any(|r| crate::symbol::angle_distance(r.angle, angle) < 1e-12) {
                out.push(LevelRoot { angle, slope });
            }
        }
    }
    out.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    out
}

/// Γ(λ) for an admissible level.
pub fn sublevel_set(sym: &PiecewiseSymbol, lambda: f64) -> Result<LevelSet> {
    check_level(sym, lambda)?;
    sublevel_set_unchecked(sym, lambda)
}

/// Γ(λ) without the exceptional-level guard.
pub fn sublevel_set_unchecked(sym: &PiecewiseSymbol, lambda: f64) -> Result<LevelSet> {
    let (g1, g2) = sym.essential_range();
    if lambda <= g1 {
        return Ok(LevelSet {
            lambda,
            coverage: Coverage::Empty,
            arcs: vec![],
        });
    }
    if lambda > g2 {
        return Ok(LevelSet {
            lambda,
            coverage: Coverage::Full,
            arcs: vec![],
        });
    }
    // (angle, entering Γ, kind)
    let mut crossings: Vec<(f64, bool, EndpointKind)> = level_roots(sym, lambda)
        .into_iter()
        .map(|r| (r.angle, r.slope < 0, EndpointKind::Root))
        .collect();
    for j in sym.jumps() {
        if j.class == JumpClass::Zero {
            continue;
        }
        let (lo, hi) = (j.left.min(j.right), j.left.max(j.right));
        if lambda > lo && lambda < hi {
            crossings.push((j.angle.rem_euclid(TAU), j.class == JumpClass::Plus, EndpointKind::Jump));
        }
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
    if crossings.is_empty() {
        // Probe away from jumps to decide between empty and full.
        let probe = (0..16)
            .map(|k| k as f64 * TAU / 16.0 + 0.1)
            .find(|t| sym.distance_to_jump(*t) > 1e-6)
            .unwrap_or(0.1);
        let coverage = if sym.value(probe) < lambda {
            Coverage::Full
        } else {
            Coverage::Empty
        };
        return Ok(LevelSet {
            lambda,
            coverage,
            arcs: vec![],
        });
    }
    let n = crossings.len();
    if n % 2 != 0 {
        return Err(Error::CountingInconsistency(format!(
            "odd number of level crossings ({n}) at λ = {lambda}"
        )));
    }
    let start = crossings.iter().position(|c| c.1).ok_or_else(|| {
        Error::CountingInconsistency(format!("no downward crossing at λ = {lambda}"))
    })?;
    let mut arcs = Vec::with_capacity(n / 2);
    for k in 0..n / 2 {
        let a = crossings[(start + 2 * k) % n];
        let b = crossings[(start + 2 * k + 1) % n];
        if !a.1 || b.1 {
            return Err(Error::CountingInconsistency(format!(
                "level crossings do not alternate at λ = {lambda}"
            )));
        }
        let mut arc = Arc::new(a.0, b.0);
        arc.alpha_kind = a.2;
        arc.beta_kind = b.2;
        arcs.push(arc);
    }
    arcs.sort_by(|x, y| x.alpha.total_cmp(&y.alpha));
    Ok(LevelSet {
        lambda,
        coverage: Coverage::Partial,
        arcs,
    })
}

/// Counts crossings at one admissible level: (n⁺, n⁻, m).
fn crossing_counts(sym: &PiecewiseSymbol, lambda: f64) -> Result<(usize, usize, usize)> {
    let roots = solve_level(sym, lambda)?;
    let n_plus = roots.iter().filter(|r| r.slope < 0).count();
    let n_minus = roots.len() - n_plus;
    let m = sublevel_set(sym, lambda)?.multiplicity();
    Ok((n_plus, n_minus, m))
}

/// Counting functions and multiplicity on Λ = (λ₁, λ₂).
pub fn counting_report(sym: &PiecewiseSymbol, interval: (f64, f64)) -> Result<CountReport> {
    let (a, b) = interval;
    if !is_admissible(sym, a, b) {
        return Err(Error::InadmissibleInterval(a, b));
    }
    let mid = 0.5 * (a + b);
    let (n_plus, n_minus, m_arcs) = crossing_counts(sym, mid)?;
    for k in 1..=5 {
        let t = a + (b - a) * k as f64 / 6.0;
        let (np, nm, ma) = crossing_counts(sym, t)?;
        if (np, nm, ma) != (n_plus, n_minus, m_arcs) {
            return Err(Error::CountingInconsistency(format!(
                "crossing counts change inside ({a}, {b}) at λ = {t}"
            )));
        }
    }
    let spanning = |class: JumpClass| {
        sym.jump_intervals()
            .iter()
            .filter(|j| j.sign == class && j.lo <= a && b <= j.hi)
            .count()
    };
    let s_plus = spanning(JumpClass::Plus);
    let s_minus = spanning(JumpClass::Minus);
    let m = n_plus + s_plus;
    if m != n_minus + s_minus {
        return Err(Error::CountingInconsistency(format!(
            "n⁺+s⁺ = {m} but n⁻+s⁻ = {}",
            n_minus + s_minus
        )));
    }
    if m != m_arcs {
        return Err(Error::CountingInconsistency(format!(
            "counting gives m = {m} but Γ has {m_arcs} arcs"
        )));
    }
    Ok(CountReport {
        n_plus,
        n_minus,
        s_plus,
        s_minus,
        m,
    })
}

/// Whether [a, b] lies in (γ₁, γ₂) and stays clear of Λ_exc.
pub fn is_admissible(sym: &PiecewiseSymbol, a: f64, b: f64) -> bool {
    let (g1, g2) = sym.essential_range();
    if !(a.is_finite() && b.is_finite() && a < b && a > g1 && b < g2) {
        return false;
    }
    exceptional_set(sym)
        .all()
        .iter()
        .all(|&e| e < a - GUARD_BAND || e > b + GUARD_BAND)
}

/// Whether the open interval (a, b) avoids Λ_exc (endpoints may be exceptional).
pub fn is_open_admissible(sym: &PiecewiseSymbol, a: f64, b: f64) -> bool {
    let (g1, g2) = sym.essential_range();
    a.is_finite()
        && b.is_finite()
        && a < b
        && a >= g1
        && b <= g2
        && exceptional_set(sym).all().iter().all(|&e| e <= a || e >= b)
}

/// Maximal open intervals of (γ₁, γ₂) \ Λ_exc.
pub fn admissible_intervals(sym: &PiecewiseSymbol) -> Vec<(f64, f64)> {
    let (g1, g2) = sym.essential_range();
    let mut pts = vec![g1, g2];
    pts.extend(exceptional_set(sym).all().into_iter().filter(|&e| e > g1 && e < g2));
    sort_dedup(&mut pts);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}
