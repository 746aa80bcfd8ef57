//! Parsers for the textual argument formats.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use toeplitz_spectral::diagonal::HardyVector;
use toeplitz_spectral::levelset;
use toeplitz_spectral::symbol::PiecewiseSymbol;

use crate::Failure;

/// Built-in name, or a JSON file when the argument names an existing path.
pub fn symbol(arg: &str) -> Result<PiecewiseSymbol, Failure> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?;
        PiecewiseSymbol::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))
    } else {
        PiecewiseSymbol::from_name(arg).map_err(|e| Failure::Usage(e.to_string()))
    }
}

fn number(s: &str) -> Result<f64, Failure> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Failure::Usage(format!("not a number: {s:?}")))
}

fn numbers(s: &str, count: usize) -> Result<Vec<f64>, Failure> {
    let v = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if v.len() != count {
        return Err(Failure::Usage(format!("expected {count} comma-separated numbers, got {s:?}")));
    }
    Ok(v)
}

pub fn complex(s: &str) -> Result<Complex64, Failure> {
    let v = numbers(s, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

pub fn pair(s: &str) -> Result<(f64, f64), Failure> {
    let v = numbers(s, 2)?;
    Ok((v[0], v[1]))
}

/// Parses `a,b` and checks it against the admissible intervals.
pub fn interval(sym: &PiecewiseSymbol, s: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = pair(s)?;
    if !(a < b) {
        return Err(Failure::Usage(format!("interval needs a < b, got {s:?}")));
    }
    if !levelset::is_open_admissible(sym, a, b) {
        return Err(Failure::Analysis(toeplitz_spectral::Error::InadmissibleInterval(a, b)));
    }
    Ok((a, b))
}

/// `polar:rmax:nr:ntheta` (origin first, then rings outward) or `re,im;re,im;...`.
pub fn zgrid(s: &str) -> Result<Vec<Complex64>, Failure> {
    if let Some(rest) = s.strip_prefix("polar:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::Usage(format!("polar grid needs rmax:nr:ntheta, got {s:?}")));
        }
        let rmax = number(parts[0])?;
        let nr: usize = parts[1].parse().map_err(|_| Failure::Usage(format!("bad ring count {:?}", parts[1])))?;
        let nt: usize = parts[2].parse().map_err(|_| Failure::Usage(format!("bad angle count {:?}", parts[2])))?;
        if !(rmax > 0.0) || nr == 0 || nt == 0 {
            return Err(Failure::Usage(format!("polar grid needs rmax > 0 and positive counts, got {s:?}")));
        }
        let mut out = vec![Complex64::new(0.0, 0.0)];
        for i in 1..=nr {
            let r = rmax * i as f64 / nr as f64;
            for k in 0..nt {
                out.push(Complex64::from_polar(r, TAU * k as f64 / nt as f64));
            }
        }
        return Ok(out);
    }
    s.split(';').filter(|p| !p.trim().is_empty()).map(complex).collect()
}

/// `ure,uim,vre,vim;...`.
pub fn point_pairs(s: &str) -> Result<Vec<(Complex64, Complex64)>, Failure> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let v = numbers(p, 4)?;
            Ok((Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])))
        })
        .collect()
}

#[derive(Deserialize)]
struct Term {
    c: [f64; 2],
    z: [f64; 2],
}

pub fn vector(path: &Path) -> Result<HardyVector, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let terms: Vec<Term> = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad vector file: {e}")))?;
    HardyVector::new(
        terms
            .into_iter()
            .map(|t| (Complex64::new(t.c[0], t.c[1]), Complex64::new(t.z[0], t.z[1])))
            .collect(),
    )
    .map_err(|e| Failure::Usage(e.to_string()))
}

/// `n:value` for the fault-injection flag.
pub fn perturbation(s: &str) -> Result<(usize, f64), Failure> {
    let (n, v) = s
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("perturbation needs n:value, got {s:?}")))?;
    let n = n.trim().parse().map_err(|_| Failure::Usage(format!("bad coefficient index {n:?}")))?;
    Ok((n, number(v)?))
}
