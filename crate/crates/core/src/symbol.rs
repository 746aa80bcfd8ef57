//! Bounded real piecewise trigonometric-polynomial symbols on the unit circle.
//!
//! A symbol is an ordered list of pieces covering the circle. Each piece owns
//! a closed angle interval `[theta_start, theta_end]` (with `theta_end` allowed
//! to exceed 2π for pieces that wrap through angle zero) and a [`TrigPoly`].
//! Piece boundaries where the one-sided values or derivatives disagree form
//! the jump set.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::trig::TrigPoly;

/// One-sided limits are taken counterclockwise (`Plus`, θ+0) or clockwise
/// (`Minus`, θ−0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpClass {
    /// ω(η−0) > ω(η+0).
    Plus,
    /// ω(η−0) < ω(η+0).
    Minus,
    /// Continuous, with mismatched one-sided derivatives.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpPoint {
    pub angle: f64,
    pub left: f64,
    pub right: f64,
    pub class: JumpClass,
}

/// The closed value interval spanned by a genuine jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpInterval {
    pub k: usize,
    pub lo: f64,
    pub hi: f64,
    pub sign: JumpClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolPiece {
    pub theta_start: f64,
    pub theta_end: f64,
    pub poly: TrigPoly,
}

impl SymbolPiece {
    pub fn length(&self) -> f64 {
        self.theta_end - self.theta_start
    }
}

/// A critical point of a piece, or a plateau piece (`angle` is then `None`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub piece: usize,
    pub angle: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSymbol {
    pieces: Vec<SymbolPiece>,
    derivatives: Vec<TrigPoly>,
    jumps: Vec<JumpPoint>,
    /// Piece boundaries that are not jumps (smooth seams).
    seams: Vec<f64>,
    critical: Vec<CriticalPoint>,
    range: (f64, f64),
    name: Option<String>,
}

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PieceSpec {
    theta_start: f64,
    theta_end: f64,
    a: Vec<f64>,
    #[serde(default)]
    b: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SymbolDoc {
    pieces: Vec<PieceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl PiecewiseSymbol {
    /// Builds and validates a symbol from pieces in any order.
    pub fn new(pieces: Vec<SymbolPiece>) -> Result<Self> {
        Self::with_name(pieces, None)
    }

    pub fn with_name(mut pieces: Vec<SymbolPiece>, name: Option<String>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidSymbol("no pieces".into()));
        }
        for p in pieces.iter_mut() {
            if !(p.theta_start.is_finite() && p.theta_end.is_finite()) {
                return Err(Error::InvalidSymbol("non-finite angle".into()));
            }
            if p.poly.a.is_empty() {
                p.poly.a.push(0.0);
            }
            if p.poly.a.iter().chain(&p.poly.b).any(|v| !v.is_finite()) {
                return Err(Error::InvalidSymbol("non-finite coefficient".into()));
            }
            let len = p.theta_end - p.theta_start;
            if !(len > 0.0 && len <= TAU + BOUNDARY_TOL) {
                return Err(Error::InvalidSymbol(format!(
                    "piece [{}, {}] has length outside (0, 2π]",
                    p.theta_start, p.theta_end
                )));
            }
            if !(0.0..TAU).contains(&p.theta_start) {
                let shift = TAU * (p.theta_start / TAU).floor();
                p.theta_start -= shift;
                p.theta_end -= shift;
                if p.theta_start >= TAU {
                    p.theta_start -= TAU;
                    p.theta_end -= TAU;
                }
            }
        }
        pieces.sort_by(|x, y| x.theta_start.total_cmp(&y.theta_start));
        let n = pieces.len();
        for i in 0..n {
            let next_start = if i + 1 < n {
                pieces[i + 1].theta_start
            } else {
                pieces[0].theta_start + TAU
            };
            if (pieces[i].theta_end - next_start).abs() > BOUNDARY_TOL * TAU {
                return Err(Error::InvalidSymbol(format!(
                    "pieces do not tile the circle: piece ending at {} is followed by a piece starting at {}",
                    pieces[i].theta_end, next_start
                )));
            }
        }
        let derivatives: Vec<TrigPoly> = pieces.iter().map(|p| p.poly.derivative()).collect();

        let mut jumps = Vec::new();
        let mut seams = Vec::new();
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let eta = pieces[i].theta_start;
            let left = pieces[prev].poly.eval(pieces[prev].theta_end);
            let right = pieces[i].poly.eval(eta);
            let scale = 1.0f64.max(left.abs()).max(right.abs());
            if (left - right).abs() > BOUNDARY_TOL * scale {
                let class = if left > right { JumpClass::Plus } else { JumpClass::Minus };
                jumps.push(JumpPoint { angle: eta, left, right, class });
                continue;
            }
            let dl = derivatives[prev].eval(pieces[prev].theta_end);
            let dr = derivatives[i].eval(eta);
            let dscale = 1.0f64.max(dl.abs()).max(dr.abs());
            if (dl - dr).abs() > 1e-10 * dscale {
                jumps.push(JumpPoint {
                    angle: eta,
                    left,
                    right,
                    class: JumpClass::Zero,
                });
            } else if n > 1 {
                seams.push(eta);
            }
        }

        let mut critical = Vec::new();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, p) in pieces.iter().enumerate() {
            let (s, e) = (p.theta_start, p.theta_end);
            for v in [p.poly.eval(s), p.poly.eval(e)] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if p.poly.is_constant() {
                critical.push(CriticalPoint {
                    piece: i,
                    angle: None,
                    value: p.poly.a_k(0),
                });
                continue;
            }
            for t in derivatives[i].zeros_in(s, e) {
                let v = p.poly.eval(t);
                lo = lo.min(v);
                hi = hi.max(v);
                let t = if n == 1 { t.rem_euclid(TAU) } else { t };
                let duplicate = critical.iter().any(|c: &CriticalPoint| {
                    c.piece == i && c.angle.is_some_and(|a| angle_distance(a, t) < 1e-10)
                });
                if !duplicate {
                    critical.push(CriticalPoint {
                        piece: i,
                        angle: Some(t),
                        value: v,
                    });
                }
            }
        }
        let span = hi - lo;
        if !(span > 1e-14 * 1.0f64.max(hi.abs()).max(lo.abs())) {
            return Err(Error::ConstantSymbol);
        }
        Ok(Self {
            pieces,
            derivatives,
            jumps,
            seams,
            critical,
            range: (lo, hi),
            name,
        })
    }

    /// ω(e^{iθ}) = cos θ.
    pub fn preset_regular() -> Self {
        Self::with_name(
            vec![SymbolPiece {
                theta_start: 0.0,
                theta_end: TAU,
                poly: TrigPoly::new(vec![0.0, 1.0], vec![]),
            }],
            Some("regular".into()),
        )
        .expect("regular preset is valid")
    }

    /// Indicator of the counterclockwise arc from e^{iθ₁} to e^{iθ₂}.
    pub fn preset_singular(theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite()) {
            return Err(Error::InvalidSymbol("non-finite arc endpoint".into()));
        }
        let t1 = theta1.rem_euclid(TAU);
        let len = (theta2 - theta1).rem_euclid(TAU);
        if len < 1e-12 || TAU - len < 1e-12 {
            return Err(Error::InvalidSymbol("arc (ζ₁, ζ₂) must not be the full circle".into()));
        }
        let t2 = (t1 + len).rem_euclid(TAU);
        Self::with_name(
            vec![
                SymbolPiece {
                    theta_start: t1,
                    theta_end: t1 + len,
                    poly: TrigPoly::constant(1.0),
                },
                SymbolPiece {
                    theta_start: t2,
                    theta_end: t2 + (TAU - len),
                    poly: TrigPoly::constant(0.0),
                },
            ],
            Some(format!("singular:{theta1}:{theta2}")),
        )
    }

    /// Resolves `"regular"` or `"singular:θ1:θ2"`; angles accept `pi`
    /// multiples such as `pi/2`, `-pi` or `1.5*pi`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "regular" {
            return Ok(Self::preset_regular());
        }
        if let Some(rest) = name.strip_prefix("singular:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("expected singular:θ1:θ2, got {name}")));
            }
            let t1 = parse_angle(parts[0])?;
            let t2 = parse_angle(parts[1])?;
            return Self::preset_singular(t1, t2);
        }
        Err(Error::Parse(format!("unknown preset {name}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SymbolDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let pieces = doc
            .pieces
            .into_iter()
            .map(|p| SymbolPiece {
                theta_start: p.theta_start,
                theta_end: p.theta_end,
                poly: TrigPoly::new(p.a, p.b),
            })
            .collect();
        Self::with_name(pieces, doc.name)
    }

    pub fn to_json(&self) -> String {
        let doc = SymbolDoc {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceSpec {
                    theta_start: p.theta_start,
                    theta_end: p.theta_end,
                    a: p.poly.a.clone(),
                    b: p.poly.b.clone(),
                })
                .collect(),
            name: self.name.clone(),
        };
        serde_json::to_string(&doc).expect("symbol serializes")
    }

    /// Adds a constant to every piece.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut poly = p.poly.clone();
                poly.a[0] += c;
                SymbolPiece { poly, ..p.clone() }
            })
            .collect();
        Self::with_name(pieces, self.name.as_ref().map(|n| format!("{n}+{c}")))
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn pieces(&self) -> &[SymbolPiece] {
        &self.pieces
    }

    pub fn jumps(&self) -> &[JumpPoint] {
        &self.jumps
    }

    pub fn seams(&self) -> &[f64] {
        &self.seams
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.critical
    }

    pub fn derivative_poly(&self, piece: usize) -> &TrigPoly {
        &self.derivatives[piece]
    }

    /// Jump intervals Λ_k for the genuine (nonzero) jumps, indexed into [`Self::jumps`].
    pub fn jump_intervals(&self) -> Vec<JumpInterval> {
        self.jumps
            .iter()
            .enumerate()
            .filter(|(_, j)| j.class != JumpClass::Zero)
            .map(|(k, j)| JumpInterval {
                k,
                lo: j.left.min(j.right),
                hi: j.left.max(j.right),
                sign: j.class,
            })
            .collect()
    }

    /// (γ₁, γ₂).
    pub fn essential_range(&self) -> (f64, f64) {
        self.range
    }

    /// Index of the piece owning angle θ and the lifted angle inside it.
    pub fn locate(&self, theta: f64) -> (usize, f64) {
        let t = theta.rem_euclid(TAU);
        let idx = self.pieces.partition_point(|p| p.theta_start <= t);
        // idx == 0 means t precedes every start, so it belongs to the wrapping last piece.
        let i = if idx == 0 { self.pieces.len() - 1 } else { idx - 1 };
        let p = &self.pieces[i];
        if t >= p.theta_start && t <= p.theta_end {
            return (i, t);
        }
        let last = self.pieces.len() - 1;
        let lp = &self.pieces[last];
        if t + TAU <= lp.theta_end + BOUNDARY_TOL {
            return (last, t + TAU);
        }
        (i, t)
    }

    /// Angle distance from θ to the nearest jump point.
    pub fn distance_to_jump(&self, theta: f64) -> f64 {
        self.jumps
            .iter()
            .map(|j| angle_distance(theta, j.angle))
            .fold(f64::INFINITY, f64::min)
    }

    fn jump_at(&self, theta: f64) -> Option<&JumpPoint> {
        self.jumps.iter().find(|j| angle_distance(theta, j.angle) <= 1e-14 * TAU)
    }

    /// Value at θ; errors at a genuine jump.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if let Some(j) = self.jump_at(theta) {
            if j.class != JumpClass::Zero {
                return Err(Error::AmbiguousAtJump(theta));
            }
        }
        Ok(self.value(theta))
    }

    /// Value at θ without any jump check; used on quadrature nodes.
    pub fn value(&self, theta: f64) -> f64 {
        let (i, t) = self.locate(theta);
        self.pieces[i].poly.eval(t)
    }

    pub fn eval_one_sided(&self, eta: f64, side: Side) -> f64 {
        if let Some(j) = self.jump_at(eta) {
            return match side {
                Side::Minus => j.left,
                Side::Plus => j.right,
            };
        }
        let t = eta.rem_euclid(TAU);
        for p in &self.pieces {
            for lift in [t, t + TAU] {
                let at_start = (lift - p.theta_start).abs() <= BOUNDARY_TOL;
                let at_end = (lift - p.theta_end).abs() <= BOUNDARY_TOL;
                if (side == Side::Plus && at_start) || (side == Side::Minus && at_end) {
                    return p.poly.eval(lift);
                }
            }
        }
        self.value(eta)
    }

    /// dω(e^{iθ})/dθ; errors at jump points (including derivative jumps).
    pub fn eval_derivative(&self, theta: f64) -> Result<f64> {
        if self.jump_at(theta).is_some() {
            return Err(Error::AtJump(theta));
        }
        Ok(self.derivative(theta))
    }

    pub(crate) fn derivative(&self, theta: f64) -> f64 {
        let (i, t) = self.locate(theta);
        self.derivatives[i].eval(t)
    }

    /// ∫ ω(ζ) ζ̄ⁿ dm(ζ), by exact integration of each piece.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for p in &self.pieces {
            let full = (p.length() - TAU).abs() <= 1e-15;
            let deg = p.poly.degree() as i64;
            for k in -deg..=deg {
                let pk = p.poly.exp_coefficient(k);
                if pk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let q = k - n;
                let integral = if q == 0 {
                    Complex64::new(p.length() / TAU, 0.0)
                } else if full {
                    Complex64::new(0.0, 0.0)
                } else {
                    // (e^{iqb} − e^{iqa}) / (2πiq) = e^{iq(a+b)/2} sin(q(b−a)/2) / (πq)
                    let qf = q as f64;
                    let mid = 0.5 * qf * (p.theta_start + p.theta_end);
                    let half = 0.5 * qf * (p.theta_end - p.theta_start);
                    Complex64::from_polar(half.sin() / (PI * qf), mid)
                };
                total += pk * integral;
            }
        }
        total
    }
}

/// Smallest absolute angle difference on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Parses a decimal angle or a `pi` multiple (`pi`, `-pi/2`, `1.5*pi`, `3pi/4`).
pub fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("cannot parse angle {s:?}"));
    let Some(pos) = s.find("pi") else { return Err(bad()) };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let head = head.trim_end_matches('*').trim();
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let div = if tail.is_empty() {
        1.0
    } else {
        tail.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?
    };
    Ok(coef * PI / div)
}
