//! Dipole-induced reflection on a single arm.
//!
//! One chain of nanoparticles with a dipole on the first particle, fed from
//! a source nanowire on particle 1 and drained on particle `n`. For `n = 1`
//! the amplitudes have a closed form that doubles as an oracle for the
//! general solver.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_arm_network, BranchLabel, CoupledModeNetwork, Port, QdConfig};
use crate::scattering::solve_scattering;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmConfig {
    pub n: usize,
    pub g_np: f64,
    pub g_inout: f64,
    pub gamma0: f64,
    pub qd: QdConfig,
}

impl Default for ArmConfig {
    fn default() -> Self {
        Self {
            n: 1,
            g_np: 1.0,
            g_inout: 0.5,
            gamma0: 0.1,
            qd: QdConfig::default(),
        }
    }
}

impl ArmConfig {
    pub fn network(&self) -> Result<CoupledModeNetwork> {
        build_arm_network(self.n, self.g_np, self.g_inout, self.gamma0, self.qd)
    }
}

/// Transmission, reflection and particle absorption at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSpectrumPoint {
    pub dw: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub absorption: f64,
    /// Flux lost through the dipole's own decay.
    pub dipole_loss: f64,
}

/// Complex amplitudes `(t, r, b)` of a single particle carrying both
/// nanowires and the dipole.
pub fn single_site_closed_form(
    g_inout: f64,
    gamma0: f64,
    qd: &QdConfig,
    dw: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let g = Complex64::from(g_inout);
    let cavity = Complex64::new(g_inout + gamma0 / 2.0, -dw);
    let loss = Complex64::new(gamma0 / 2.0, -dw);
    let coupling = (g_inout * gamma0).sqrt();

    let j = if qd.coupled { qd.j } else { 0.0 };
    if j == 0.0 {
        if cavity.norm() == 0.0 {
            return Err(Error::SingularResponse);
        }
        return Ok((g / cavity, -loss / cavity, coupling / cavity));
    }

    let dipole = Complex64::new(qd.gamma / 2.0, qd.delta - dw);
    let j2 = Complex64::from(j * j);
    let denom = j2 + dipole * cavity;
    if denom.norm() == 0.0 {
        return Err(Error::SingularResponse);
    }
    let t = g * dipole / denom;
    let r = -(j2 + dipole * loss) / denom;
    let b = coupling * dipole / denom;
    Ok((t, r, b))
}

/// `F_p = (2 J^2 / gamma) / (g_inout + Gamma0/2)`.
pub fn purcell_factor(j: f64, gamma: f64, g_inout: f64, gamma0: f64) -> Result<f64> {
    if j == 0.0 {
        return Ok(0.0);
    }
    if gamma <= 0.0 {
        return Err(Error::InfinitePurcell);
    }
    Ok(2.0 * j * j / gamma / (g_inout + gamma0 / 2.0))
}

/// Resonant `(t, r, b)` of the single site written through the Purcell factor
/// and the bare-particle amplitudes `t0, r0, a0`.
pub fn resonant_amplitudes_via_purcell(
    j: f64,
    gamma: f64,
    g_inout: f64,
    gamma0: f64,
) -> Result<(f64, f64, f64)> {
    let fp = purcell_factor(j, gamma, g_inout, gamma0)?;
    let cavity = g_inout + gamma0 / 2.0;
    let t0 = g_inout / cavity;
    let r0 = -(gamma0 / 2.0) / cavity;
    let a0 = (g_inout * gamma0).sqrt() / cavity;
    Ok((t0 / (fp + 1.0), -(fp - r0) / (fp + 1.0), a0 / (fp + 1.0)))
}

/// Per-point single-arm spectrum from the general network solver.
pub fn arm_spectrum(arm: &ArmConfig, dw_grid: &[f64]) -> Result<Vec<ArmSpectrumPoint>> {
    let net = arm.network()?;
    dw_grid
        .iter()
        .map(|&dw| {
            if !dw.is_finite() {
                return Err(Error::InvalidParameter("non-finite detuning in grid".into()));
            }
            arm_point(&net, dw)
        })
        .collect()
}

fn arm_point(net: &CoupledModeNetwork, dw: f64) -> Result<ArmSpectrumPoint> {
    let s = solve_scattering(net, BranchLabel::GG, dw)?;
    let transmission = s.t(Port::Source1, Port::Drain1).norm_sqr();
    let reflection = s.t(Port::Source1, Port::Source1).norm_sqr();
    let absorption = s.bath(Port::Source1).iter().map(|b| b.norm_sqr()).sum::<f64>();
    Ok(ArmSpectrumPoint {
        dw,
        transmission,
        reflection,
        absorption,
        dipole_loss: 1.0 - transmission - reflection - absorption,
    })
}

/// The default probe grid: 601 points over `[-3, 3]`.
pub fn default_dw_grid() -> Vec<f64> {
    crate::linspace(-3.0, 3.0, 601)
}
