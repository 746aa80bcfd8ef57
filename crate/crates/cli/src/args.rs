//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "toeplitz",
    version,
    about = "Spectral data of self-adjoint Toeplitz operators with piecewise smooth symbols",
    after_help = "Symbols: a built-in name (`regular`, `singular:θ1:θ2` with angles such as `0`, `pi/2`, `1.5*pi`) or a JSON file.\n\
                  Exit codes: 0 success, 1 usage error, 2 analysis error, 3 validation failure.\n\
                  TOEPLITZ_THREADS caps the number of worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SymbolArg {
    /// Built-in symbol name or path to a symbol JSON file.
    #[arg(long)]
    pub symbol: String,
}

#[derive(Debug, Args)]
pub struct OutputArg {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Essential range, exceptional sets and admissible intervals (JSON).
    Spectrum {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Sublevel set Γ(λ) as arcs (JSON).
    Levelset {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Counting functions and spectral multiplicity on an interval (JSON).
    Multiplicity {
        #[command(flatten)]
        symbol: SymbolArg,
        /// Interval `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// ξ(z;λ) on a point grid.
    #[command(after_help = "CSV columns: z_re,z_im,xi_re,xi_im")]
    Xi {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// `polar:rmax:nr:ntheta` or `re,im;re,im;...`.
        #[arg(long, allow_hyphen_values = true)]
        zgrid: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Phase A(z;λ) in closed form and by quadrature.
    #[command(after_help = "CSV columns: z_re,z_im,closed_re,closed_im,integral_re,integral_im")]
    Phase {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        zgrid: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Spectral density of (E(λ)K_u, K_v) at one level or on Gauss–Legendre nodes.
    #[command(after_help = "CSV columns: lambda,value_re,value_im,closed_re,closed_im,discrepancy")]
    Density {
        #[command(flatten)]
        symbol: SymbolArg,
        /// Point u as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Point v as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "interval")]
        lambda: Option<f64>,
        /// Interval `a,b` sampled at `--nodes` Gauss–Legendre nodes.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Generalized eigenfunction φ_j (interior) or its exterior partner (|z| > 1).
    #[command(after_help = "CSV columns: z_re,z_im,phi_re,phi_im")]
    Eigenfun {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Branch, counted from 1.
        #[arg(long, default_value_t = 1)]
        branch: usize,
        #[arg(long, allow_hyphen_values = true)]
        zgrid: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Components of Φf on Gauss–Legendre nodes of an interval.
    #[command(after_help = "Vector file: JSON list of {\"c\":[re,im],\"z\":[re,im]}.\nCSV columns: lambda,weight,branch,re,im")]
    Diagonalize {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long)]
        vector: PathBuf,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Finite-section oracle against the analytic weak measure.
    #[command(after_help = "CSV columns: n,u_re,u_im,v_re,v_im,oracle_re,oracle_im,analytic_re,analytic_im,error,tolerance,pass\n\
                            With --output PREFIX the table goes to PREFIX.csv and the summary to PREFIX.json;\n\
                            otherwise the table goes to stdout and the summary to stderr.")]
    Validate {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        /// Section sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "512,1024,2048,4096")]
        n: Vec<usize>,
        /// Point pairs `ure,uim,vre,vim;...`; default is u = v = 0.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Bump `center,radius`; default fills 90% of the interval.
        #[arg(long, allow_hyphen_values = true)]
        bump: Option<String>,
        #[arg(long, default_value_t = 5e-3)]
        tolerance: f64,
        /// Add `value` to Fourier coefficient `n` (and its mirror) before building sections.
        #[arg(long, allow_hyphen_values = true)]
        perturb_coefficient: Option<String>,
        /// Output prefix.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}
