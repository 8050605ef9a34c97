use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::grid_spec::GridSpec;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "mpemba", version, about = "Relaxation and Mpemba-effect computations for a driven dissipative qubit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state locus over a grid of couplings.
    Locus(LocusArgs),
    /// Rates, bifurcation point and strong-Mpemba coupling (JSON).
    Spectrum(SpectrumArgs),
    /// Single trajectory from the steady state at --gamma-i.
    Evolve(EvolveArgs),
    /// Slow- and fast-mode coefficients over a grid of initial couplings.
    ScanAminus(ScanAminusArgs),
    /// Crossing time and post-crossing gap over a grid of cold couplings.
    ScanSme(ScanSmeArgs),
    /// Cold and hot relaxation curves with their crossing report.
    DemoMpemba(DemoArgs),
    /// No-direct-strong-effect report plus invariant checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Closed,
    Ode,
    Trotter,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModelArgs {
    /// Final (bath) coupling γ_f/Ω.
    #[arg(long)]
    pub gamma_f: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = EngineChoice::Closed)]
    pub engine: EngineChoice,
    /// Number of uniform time steps (trotter steps for the trotter engine).
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Final time in units of 1/γ_f.
    #[arg(long, default_value_t = 4.0)]
    pub total_time: f64,
}

#[derive(Debug, Args)]
pub struct LocusArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value = "1e-2:1e3:50:log")]
    pub grid: GridSpec,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub gamma_i: GammaI,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct ScanAminusArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "1e-3:1e3:400:log")]
    pub grid: GridSpec,
}

#[derive(Debug, Args)]
pub struct ScanSmeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.77)]
    pub gamma_i_hot: f64,
    #[arg(long, default_value = "1e-3:0.76:200:log")]
    pub grid: GridSpec,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Cold initial coupling, or `sme` for the strong-Mpemba coupling.
    #[arg(long, default_value = "sme")]
    pub gamma_i_cold: GammaI,
    #[arg(long, default_value = "0.77")]
    pub gamma_i_hot: GammaI,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Simulate tomography with this many shots per axis.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Apply polynomial smoothing before locating the crossing.
    #[arg(long)]
    pub smooth: bool,
    #[arg(long, default_value_t = 7)]
    pub smooth_window: usize,
    #[arg(long, default_value_t = 3)]
    pub smooth_degree: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// α grid for the no-direct-strong-effect report (α ∈ (1/2, 1]).
    #[arg(long, default_value = "0.55:1:20:lin")]
    pub alpha_grid: GridSpec,
    /// Number of γ_f′ values per α, log-spaced in (γ_b′, 100].
    #[arg(long, default_value_t = 20)]
    pub gamma_f_points: usize,
}

/// A coupling value or the strong-Mpemba coupling of the final bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaI {
    Value(f64),
    Sme,
}

impl FromStr for GammaI {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("sme") {
            return Ok(GammaI::Sme);
        }
        s.parse::<f64>().map(GammaI::Value).map_err(|e| format!("expected a number or 'sme': {e}"))
    }
}
