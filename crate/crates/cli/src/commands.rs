//! Subcommand implementations.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;
use toeplitz_spectral::diagonal::SpectralGrid;
use toeplitz_spectral::oracle::{self, FiniteSection};
use toeplitz_spectral::quadrature::gauss_legendre_on;
use toeplitz_spectral::spectral::{self, Bump};
use toeplitz_spectral::symbol::PiecewiseSymbol;
use toeplitz_spectral::{hardy, levelset};

use crate::args::Command;
use crate::parse;
use crate::Failure;

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), Failure> {
    let mut w = sink(path)?;
    writeln!(w, "{}", serde_json::to_string(value).expect("json value serializes"))?;
    w.flush()?;
    Ok(())
}

/// CSV rows of plain numbers and labels, floats in shortest round-trip form.
struct Table {
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    fn new(path: Option<&Path>, header: &[&str]) -> Result<Self, Failure> {
        let mut writer = csv::Writer::from_writer(sink(path)?);
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    fn row(&mut self, fields: &[String]) -> Result<(), Failure> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(mut self) -> Result<(), Failure> {
        self.writer.flush()?;
        Ok(())
    }
}

fn f(x: f64) -> String {
    format!("{x}")
}

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Spectrum { symbol, output } => {
            let s = parse::symbol(&symbol.symbol)?;
            let (g1, g2) = s.essential_range();
            let exc = levelset::exceptional_set(&s);
            let intervals: Vec<[f64; 2]> = levelset::admissible_intervals(&s).into_iter().map(|(a, b)| [a, b]).collect();
            emit_json(
                output.output.as_deref(),
                &json!({
                    "symbol": s.name(),
                    "essential_range": [g1, g2],
                    "exceptional": { "thresholds": exc.thresholds, "critical": exc.critical },
                    "admissible_intervals": intervals,
                }),
            )
        }
        Command::Levelset { symbol, lambda, output } => {
            let s = parse::symbol(&symbol.symbol)?;
            let level = levelset::sublevel_set(&s, lambda)?;
            emit_json(
                output.output.as_deref(),
                &json!({
                    "lambda": lambda,
                    "coverage": level.coverage,
                    "arcs": level.arcs,
                    "measure": level.measure(),
                    "m": level.multiplicity(),
                }),
            )
        }
        Command::Multiplicity { symbol, interval, output } => {
            let s = parse::symbol(&symbol.symbol)?;
            let iv = parse::interval(&s, &interval)?;
            let rep = levelset::counting_report(&s, iv)?;
            emit_json(
                output.output.as_deref(),
                &json!({
                    "m": rep.m,
                    "interval": [iv.0, iv.1],
                    "n_plus": rep.n_plus,
                    "n_minus": rep.n_minus,
                    "s_plus": rep.s_plus,
                    "s_minus": rep.s_minus,
                }),
            )
        }
        Command::Xi { symbol, lambda, zgrid, output } => {
            let s = parse::symbol(&symbol.symbol)?;
            let points = parse::zgrid(&zgrid)?;
            let fr = spectral::spectral_frame(&s, lambda)?;
            let mut t = Table::new(output.output.as_deref(), &["z_re", "z_im", "xi_re", "xi_im"])?;
            for z in points {
                let x = fr.xi(z)?;
                t.row(&[f(z.re), f(z.im), f(x.re), f(x.im)])?;
            }
            t.finish()
        }
        Command::Phase { symbol, lambda, zgrid, output } => {
            let s = parse::symbol(&symbol.symbol)?;
            let points = parse::zgrid(&zgrid)?;
            let fr = spectral::spectral_frame(&s, lambda)?;
            let mut t = Table::new(
                output.output.as_deref(),
                &["z_re", "z_im", "closed_re", "closed_im", "integral_re", "integral_im"],
            )?;
            for z in points {
                let a = fr.phase(z)?;
                let b = hardy::phase_a_integral(&s, z, lambda)?.value;
                t.row(&[f(z.re), f(z.im), f(a.re), f(a.im), f(b.re), f(b.im)])?;
            }
            t.finish()
        }
        Command::Density {
            symbol,
            u,
            v,
            lambda,
            interval,
            nodes,
            output,
        } => {
            let s = parse::symbol(&symbol.symbol)?;
            let (u, v) = (parse::complex(&u)?, parse::complex(&v)?);
            let lambdas = match (lambda, interval) {
                (Some(l), None) => vec![l],
                (None, Some(iv)) => {
                    let (a, b) = parse::interval(&s, &iv)?;
                    gauss_legendre_on(nodes, a, b).0
                }
                _ => return Err(Failure::Usage("density needs exactly one of --lambda or --interval".into())),
            };
            let mut t = Table::new(
                output.output.as_deref(),
                &["lambda", "value_re", "value_im", "closed_re", "closed_im", "discrepancy"],
            )?;
            for l in lambdas {
                let d = spectral::spectral_frame(&s, l)?.density(u, v)?;
                t.row(&[
                    f(l),
                    f(d.value.re),
                    f(d.value.im),
                    f(d.closed_form.re),
                    f(d.closed_form.im),
                    f(d.discrepancy),
                ])?;
            }
            t.finish()
        }
        Command::Eigenfun {
            symbol,
            lambda,
            branch,
            zgrid,
            output,
        } => {
            let s = parse::symbol(&symbol.symbol)?;
            let points = parse::zgrid(&zgrid)?;
            let fr = spectral::spectral_frame(&s, lambda)?;
            if branch == 0 || branch > fr.m {
                return Err(Failure::Usage(format!("branch must lie in 1..={}, got {branch}", fr.m)));
            }
            let j = branch - 1;
            let mut t = Table::new(output.output.as_deref(), &["z_re", "z_im", "phi_re", "phi_im"])?;
            for z in points {
                let p = if z.norm() > 1.0 {
                    fr.eigenfunction_ext(j, z)?
                } else {
                    fr.eigenfunction(j, z)?
                };
                t.row(&[f(z.re), f(z.im), f(p.re), f(p.im)])?;
            }
            t.finish()
        }
        Command::Diagonalize {
            symbol,
            interval,
            vector,
            nodes,
            output,
        } => {
            let s = parse::symbol(&symbol.symbol)?;
            let iv = parse::interval(&s, &interval)?;
            let vec = parse::vector(&vector)?;
            let grid = SpectralGrid::new(&s, iv, nodes)?;
            let phi = grid.phi(&vec)?;
            let mut t = Table::new(output.output.as_deref(), &["lambda", "weight", "branch", "re", "im"])?;
            for ((l, w), comps) in phi.lambdas.iter().zip(&grid.weights).zip(&phi.components) {
                for (j, x) in comps.iter().enumerate() {
                    t.row(&[f(*l), f(*w), (j + 1).to_string(), f(x.re), f(x.im)])?;
                }
            }
            t.finish()
        }
        Command::Validate {
            symbol,
            interval,
            n,
            points,
            bump,
            tolerance,
            perturb_coefficient,
            output,
        } => validate(&symbol.symbol, &interval, &n, points, bump, tolerance, perturb_coefficient, output),
    }
}

#[allow(clippy::too_many_arguments)]
fn validate(
    symbol: &str,
    interval: &str,
    n_list: &[usize],
    points: Option<String>,
    bump: Option<String>,
    tolerance: f64,
    perturb: Option<String>,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let s: PiecewiseSymbol = parse::symbol(symbol)?;
    let iv = parse::interval(&s, interval)?;
    if n_list.is_empty() || n_list.iter().any(|&n| n < 2) {
        return Err(Failure::Usage("--n needs section sizes of at least 2".into()));
    }
    let pairs = match points {
        Some(p) => parse::point_pairs(&p)?,
        None => vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))],
    };
    let g = match bump {
        Some(b) => {
            let (center, radius) = parse::pair(&b)?;
            Bump { center, radius }
        }
        None => Bump {
            center: 0.5 * (iv.0 + iv.1),
            radius: 0.45 * (iv.1 - iv.0),
        },
    };
    let perturb = perturb.as_deref().map(parse::perturbation).transpose()?;
    let nmax = *n_list.iter().max().expect("non-empty");
    let mut coeffs: Vec<Complex64> = (0..nmax as i64).map(|k| s.fourier_coefficient(k)).collect();
    if let Some((k, value)) = perturb {
        if k >= nmax {
            return Err(Failure::Usage(format!("coefficient index {k} exceeds the largest section size")));
        }
        coeffs[k] += value;
    }
    let sections: Vec<FiniteSection> = n_list
        .iter()
        .map(|&n| {
            if perturb.is_some() {
                oracle::section_from_coefficients(&coeffs, n)
            } else {
                oracle::build_section(&s, n)
            }
        })
        .collect::<Result<_, _>>()?;
    let refs: Vec<&FiniteSection> = sections.iter().collect();
    let report = oracle::validate_with_sections(&s, iv, &g, &pairs, &refs, tolerance)?;

    let csv_path = output.as_ref().map(|p| p.with_extension("csv"));
    let mut t = Table::new(
        csv_path.as_deref(),
        &[
            "n",
            "u_re",
            "u_im",
            "v_re",
            "v_im",
            "oracle_re",
            "oracle_im",
            "analytic_re",
            "analytic_im",
            "error",
            "tolerance",
            "pass",
        ],
    )?;
    for r in &report.rows {
        t.row(&[
            r.n.to_string(),
            f(r.u.re),
            f(r.u.im),
            f(r.v.re),
            f(r.v.im),
            f(r.oracle.re),
            f(r.oracle.im),
            f(r.analytic.re),
            f(r.analytic.im),
            f(r.error),
            f(r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    t.finish()?;
    let max_error = report
        .rows
        .iter()
        .filter(|r| r.n == nmax)
        .map(|r| r.error)
        .fold(0.0, f64::max);
    let summary = json!({
        "pass": report.pass,
        "monotone": report.monotone,
        "n_max": nmax,
        "max_error_at_n_max": max_error,
        "tolerance": tolerance,
        "bump": { "center": g.center, "radius": g.radius },
        "perturbed": perturb.map(|(k, v)| json!({ "n": k, "value": v })),
    });
    match output {
        Some(p) => emit_json(Some(&p.with_extension("json")), &summary)?,
        None => eprintln!("{}", serde_json::to_string(&summary).expect("json value serializes")),
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "max error {max_error:e} at N = {nmax}, monotone = {}",
            report.monotone
        )))
    }
}
