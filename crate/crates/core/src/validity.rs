//! Guards for the approximations behind the linear model.
//!
//! None of these alter a solve; they only label whether a parameter point
//! sits inside the weak-coupling and weak-excitation regimes.

use crate::error::{Error, Result};
use crate::model::NetworkConfig;

/// Largest coupling allowed, as a fraction of `omega_0`.
pub const WEAK_COUPLING_FRACTION: f64 = 0.1;
/// Default minimum for the weak-excitation ratio.
pub const WEAK_EXCITATION_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    /// Inside the bound but with no margin left.
    AtBound,
    Fail,
    Unchecked,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::AtBound => "at-bound",
            Self::Fail => "fail",
            Self::Unchecked => "unchecked",
        }
    }
}

/// One coupling compared against `0.1 omega_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCheck {
    pub name: &'static str,
    /// Coupling in units of `omega_0`.
    pub value_over_omega0: f64,
    /// `0.1 - value`, in units of `omega_0`.
    pub margin: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakCouplingReport {
    pub status: CheckStatus,
    pub checks: Vec<CouplingCheck>,
}

pub fn weak_coupling_check(config: &NetworkConfig) -> WeakCouplingReport {
    let Some(omega0) = config.omega0_over_gnp else {
        return WeakCouplingReport {
            status: CheckStatus::Unchecked,
            checks: Vec::new(),
        };
    };
    let (g_h, g_v) = config.beam_splitter();
    let checks: Vec<_> = [
        ("g_np", config.g_np),
        ("g_inout", config.g_inout),
        ("g_h", g_h),
        ("g_v", g_v),
    ]
    .into_iter()
    .map(|(name, g)| {
        let value = g.abs() / omega0;
        let margin = WEAK_COUPLING_FRACTION - value;
        let status = if margin.abs() <= 1e-12 {
            CheckStatus::AtBound
        } else if margin > 0.0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CouplingCheck {
            name,
            value_over_omega0: value,
            margin,
            status,
        }
    })
    .collect();

    let status = if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        CheckStatus::Fail
    } else if checks.iter().any(|c| c.status == CheckStatus::AtBound) {
        CheckStatus::AtBound
    } else {
        CheckStatus::Pass
    };
    WeakCouplingReport { status, checks }
}

impl WeakCouplingReport {
    /// True unless a coupling exceeds the bound.
    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass | CheckStatus::AtBound)
    }
}

/// Ratio of the dipole's saturation scale to the input photon flux,
///
/// ```text
/// [J^2/g + delta^2 (g + Gamma0)^2 / (4 J^2 g)] / (n_bar / dtau)
/// ```
///
/// which must be much larger than one for the dipole to stay unsaturated.
/// Returns infinity for an empty pulse.
pub fn weak_excitation_margin(
    j: f64,
    g_inout: f64,
    gamma0: f64,
    delta: f64,
    n_bar: f64,
    dtau: f64,
) -> Result<f64> {
    if !(j > 0.0) {
        return Err(Error::InvalidPulse(format!("J must be > 0, got {j}")));
    }
    if !(g_inout > 0.0) {
        return Err(Error::InvalidPulse(format!("g_inout must be > 0, got {g_inout}")));
    }
    if !(dtau > 0.0) {
        return Err(Error::InvalidPulse(format!("pulse duration must be > 0, got {dtau}")));
    }
    if !(n_bar >= 0.0) {
        return Err(Error::InvalidPulse(format!("mean photon number must be >= 0, got {n_bar}")));
    }
    let lhs = j * j / g_inout
        + delta * delta * (g_inout + gamma0).powi(2) / (4.0 * j * j * g_inout);
    if n_bar == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(lhs / (n_bar / dtau))
}

/// Gaussian input wave packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig {
    /// Mean photon number of the packet.
    pub mean_photons: f64,
    /// Pulse duration, in units of `1/g_np`.
    pub duration: f64,
    /// Full width at half maximum of `|alpha(w)|^2`.
    pub fwhm: f64,
    /// Carrier detuning from the particle resonance.
    pub center: f64,
}

impl PulseConfig {
    pub fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    pub fn from_sigma(mean_photons: f64, duration: f64, sigma: f64) -> Self {
        Self {
            mean_photons,
            duration,
            fwhm: sigma * 2.0 * (2.0 * std::f64::consts::LN_2).sqrt(),
            center: 0.0,
        }
    }
}

/// `sqrt(n_bar) (2 pi sigma^2)^(-1/4) exp(-(w - w_c)^2 / (4 sigma^2))` on a grid.
pub fn gaussian_spectrum(pulse: &PulseConfig, omega_grid: &[f64]) -> Result<Vec<f64>> {
    let sigma = pulse.sigma();
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidPulse(format!("bandwidth must be > 0, got {}", pulse.fwhm)));
    }
    if !(pulse.mean_photons >= 0.0) {
        return Err(Error::InvalidPulse("mean photon number must be >= 0".into()));
    }
    let peak = pulse.mean_photons.sqrt() * (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    Ok(omega_grid
        .iter()
        .map(|w| peak * (-(w - pulse.center).powi(2) / (4.0 * sigma * sigma)).exp())
        .collect())
}

/// Size-dependent particle damping `v_F / lambda_B + v_F / R`.
pub fn matthiessen_damping(v_fermi: f64, lambda_bulk: f64, radius: f64) -> Result<f64> {
    for (name, v) in [("v_F", v_fermi), ("lambda_B", lambda_bulk), ("R", radius)] {
        if !(v > 0.0) {
            return Err(Error::InvalidMaterial(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(v_fermi / lambda_bulk + v_fermi / radius)
}
