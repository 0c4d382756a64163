use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Lattice harmonic oscillator: spectra, coherent states, scattering lengths
/// and ring pair correlations as CSV.
#[derive(Debug, Parser)]
#[command(name = "latosc", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file (`key = value` lines) or a previous output file whose
    /// header is reused.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for output files; overrides `out_dir` from the config.
    #[arg(long, global = true, env = "LATOSC_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Also write a gnuplot script next to each CSV.
    #[arg(long, global = true)]
    pub emit_plot: bool,

    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of the number operator.
    Spectrum(SpectrumArgs),
    /// Analytic ground state and its uncertainty product.
    Groundstate(GroundArgs),
    /// Coherent-state residual table.
    Coherent(CoherentArgs),
    /// Angular-momentum commutator decay under refinement.
    Angular(AngularArgs),
    /// Scattering length versus impurity position.
    Scattering(ScatteringArgs),
    /// Pair correlation of the many-body ring ground state.
    Manybody(ManybodyArgs),
    /// Run the invariant checks and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rep {
    Site,
    Kspace,
}

impl Rep {
    pub fn name(self) -> &'static str {
        match self {
            Rep::Site => "site",
            Rep::Kspace => "kspace",
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub gamma_d: f64,
    #[arg(long, value_enum)]
    pub rep: Rep,
    #[arg(long, default_value_t = 20)]
    pub n_eigs: usize,
    /// Output file; defaults to `spectrum_<rep>.csv` in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroundArgs {
    #[arg(long)]
    pub gamma_d: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Defined,
    Displacement,
    Eigenstate,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Defined => "defined",
            Kind::Displacement => "displacement",
            Kind::Eigenstate => "eigenstate",
        }
    }
}

#[derive(Debug, Args)]
pub struct CoherentArgs {
    #[arg(long)]
    pub gamma_d: f64,
    #[arg(long, value_enum, default_value_t = Kind::Defined)]
    pub kind: Kind,
    /// Amplitude as `re,im`; repeatable. Without it, `coherent_alphas` seeded
    /// amplitudes are drawn (lattice multiples for the eigenstate form).
    #[arg(long, value_name = "RE,IM", value_parser = parse_alpha, allow_hyphen_values = true)]
    pub alpha: Vec<(f64, f64)>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_alpha(s: &str) -> Result<(f64, f64), String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
    if re.is_finite() && im.is_finite() {
        Ok((re, im))
    } else {
        Err("alpha must be finite".into())
    }
}

#[derive(Debug, Args)]
pub struct AngularArgs {
    /// Lattice spacings of the refinement sequence.
    #[arg(long, value_delimiter = ',', default_values_t = [0.4, 0.2, 0.1])]
    pub d: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScatteringArgs {
    /// Potential depths `m V0 L^2 / hbar^2`, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub v0: Vec<f64>,
    /// Impurity positions per curve; overrides `n_theta`.
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Main output file; the inset goes to `<stem>_inset.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Mc,
}

#[derive(Debug, Args)]
pub struct ManybodyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Overrides `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `coeff_c`.
    #[arg(long)]
    pub coeff_c: Option<f64>,
    /// Pair-correlation file; the radial profile goes to `<stem>_radial.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Oscillator,
    Coherent,
    Angular,
    Scattering,
    Manybody,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Overrides `coeff_c`.
    #[arg(long)]
    pub coeff_c: Option<f64>,
    /// Report file; defaults to `verify.csv` in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
