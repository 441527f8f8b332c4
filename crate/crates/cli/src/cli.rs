use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Params;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "dirnet",
    version,
    about = "Scattering spectra and heralded entanglement on a two-arm nanoparticle array",
    after_help = "All rates are in units of the interparticle coupling g_np. \
                  Set DIRNET_THREADS to bound the worker pool."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// |t|^2 spectra of the two-arm network versus probe detuning.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit every branch instead of the one set by --qd1/--qd2.
        #[arg(long)]
        all_branches: bool,
        /// Also emit amplitudes for light injected at source 2.
        #[arg(long)]
        both_sources: bool,
        /// Add complex amplitudes as re/im column pairs.
        #[arg(long)]
        amplitudes: bool,
    },
    /// Transmission, reflection and absorption of a single arm (n defaults to 1).
    Dir {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs the protocol once and prints beta, F, eta, C and rho.
    Entangle {
        #[command(flatten)]
        common: CommonArgs,
        /// Sweep instead of a single run; emits CSV.
        #[arg(long = "sweep", value_name = "NAME=START:STOP:STEPS")]
        sweep: Vec<String>,
        /// Metrics for --sweep [default: fidelity,efficiency,concurrence_lb,beta]
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
    },
    /// Grid sweep over one or two parameters.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Swept parameter: alpha, g_inout, gamma0, n, delta0, ddelta, kappa, dw, j or gamma_qd.
        #[arg(long = "axis", value_name = "NAME=START:STOP:STEPS", required = true)]
        axes: Vec<String>,
        /// Comma-separated metrics [default: fidelity,efficiency]
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
    },
    /// Weak-coupling and weak-excitation checks. Exits with 2 on a warning.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Smallest acceptable weak-excitation ratio.
        #[arg(long, default_value_t = dirnet::validity::WEAK_EXCITATION_THRESHOLD)]
        threshold: f64,
    },
}

/// Flags shared by every subcommand. Each one overrides the same key in
/// `--config`.
#[derive(Debug, Default, Clone, Args)]
pub struct CommonArgs {
    /// File of `key = value` lines; `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Nanoparticles per arm.
    #[arg(long)]
    pub n: Option<String>,
    /// Interparticle coupling (the unit of every rate).
    #[arg(long)]
    pub g_np: Option<String>,
    #[arg(long)]
    pub g_inout: Option<String>,
    /// Nanoparticle damping Gamma_0.
    #[arg(long)]
    pub gamma0: Option<String>,
    /// Dot-particle coupling J for both dots.
    #[arg(long)]
    pub j: Option<String>,
    /// Dipole decay rate for both dots.
    #[arg(long)]
    pub gamma_qd: Option<String>,
    /// Mean dot detuning; dot 1 sits at delta0 + ddelta, dot 2 at delta0 - ddelta.
    #[arg(long, allow_hyphen_values = true)]
    pub delta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ddelta: Option<String>,
    /// Source-1 amplitude: `re,im` or a real magnitude.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Lumped detection efficiency in [0, 1].
    #[arg(long)]
    pub kappa: Option<String>,
    /// Initial amplitudes c_g1,c_m1,c_g2,c_m2.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Probe detuning, a single value or START:STOP:STEPS.
    #[arg(long, allow_hyphen_values = true)]
    pub dw: Option<String>,
    /// State of dot 1 for spectra: g or m.
    #[arg(long)]
    pub qd1: Option<String>,
    /// State of dot 2 for spectra: g or m.
    #[arg(long)]
    pub qd2: Option<String>,
    /// Amplitude transmission of the input nanowires.
    #[arg(long)]
    pub insertion: Option<String>,
    /// Particle resonance omega_0 / g_np for the weak-coupling check.
    #[arg(long)]
    pub omega0: Option<String>,
    /// Mean photon number of the source-1 pulse [default: |alpha|^2].
    #[arg(long)]
    pub n_bar: Option<String>,
    /// Pulse duration in units of 1/g_np.
    #[arg(long)]
    pub dtau: Option<String>,
    /// Write CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn params(&self) -> Result<Params> {
        let mut p = Params::default();
        if let Some(path) = &self.config {
            p.load_file(path)?;
        }
        let flags = [
            ("n", &self.n),
            ("g_np", &self.g_np),
            ("g_inout", &self.g_inout),
            ("gamma0", &self.gamma0),
            ("j", &self.j),
            ("gamma_qd", &self.gamma_qd),
            ("delta0", &self.delta0),
            ("ddelta", &self.ddelta),
            ("alpha", &self.alpha),
            ("kappa", &self.kappa),
            ("init", &self.init),
            ("dw", &self.dw),
            ("qd1", &self.qd1),
            ("qd2", &self.qd2),
            ("insertion", &self.insertion),
            ("omega0", &self.omega0),
            ("n_bar", &self.n_bar),
            ("dtau", &self.dtau),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                p.set(key, v)
                    .map_err(|e| crate::error::CliError::usage(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        Ok(p)
    }
}
