//! Heralded entanglement from coherent inputs and a drain-1 click.
//!
//! Each branch `|xy>` of the two dots maps the input coherent states
//! `|alpha>_s1 |beta>_s2` onto a product of output coherent states. Tracing
//! out every field after a (possibly inefficient) detection at drain 1
//! leaves the dots in
//!
//! ```text
//! rho[xy, x'y'] ~ w_xy w*_x'y' <mu1'|P|mu1> prod_{other modes} <nu'|nu>
//! ```
//!
//! with `w_xy = c_x1 c_y2`. The trace of the unnormalised matrix is the
//! heralding probability.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_network, BranchLabel, NetworkConfig, Port};
use crate::scattering::{solve_scattering, ScatteringSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Heralding probabilities at or below this count as no detection.
pub const DETECTION_FLOOR: f64 = 1e-20;

const STATE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// Initial qubit amplitudes `(c_g1 |g> + c_m1 |m>) (c_g2 |g> + c_m2 |m>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitAmplitudes {
    pub c_g1: Complex64,
    pub c_m1: Complex64,
    pub c_g2: Complex64,
    pub c_m2: Complex64,
}

impl InitAmplitudes {
    pub fn new(c_g1: Complex64, c_m1: Complex64, c_g2: Complex64, c_m2: Complex64) -> Result<Self> {
        let init = Self {
            c_g1,
            c_m1,
            c_g2,
            c_m2,
        };
        for (label, norm) in [
            ("QD1", c_g1.norm_sqr() + c_m1.norm_sqr()),
            ("QD2", c_g2.norm_sqr() + c_m2.norm_sqr()),
        ] {
            if !((norm - 1.0).abs() <= 1e-12) {
                return Err(Error::InvalidInit(format!("{label} amplitudes have norm {norm}")));
            }
        }
        Ok(init)
    }

    /// Both dots in `(|g> + |m>)/sqrt(2)`.
    pub fn equal_superposition() -> Self {
        let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            c_g1: h,
            c_m1: h,
            c_g2: h,
            c_m2: h,
        }
    }

    pub fn weight(&self, branch: BranchLabel) -> Complex64 {
        match branch {
            BranchLabel::GG => self.c_g1 * self.c_g2,
            BranchLabel::GM => self.c_g1 * self.c_m2,
            BranchLabel::MG => self.c_m1 * self.c_g2,
            BranchLabel::MM => self.c_m1 * self.c_m2,
        }
    }
}

impl Default for InitAmplitudes {
    fn default() -> Self {
        Self::equal_superposition()
    }
}

/// Output coherent amplitudes of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentOutputs {
    pub branch: BranchLabel,
    /// Source nanowires `xi_1, xi_2`.
    pub xi: [Complex64; 2],
    /// Drain nanowires `mu_1, mu_2`.
    pub mu: [Complex64; 2],
    /// Bath of each particle `chi_1 .. chi_{2n+2}`.
    pub chi: Vec<Complex64>,
}

impl CoherentOutputs {
    /// Every mode except drain 1, in a fixed order.
    fn traced_modes(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.xi
            .iter()
            .copied()
            .chain(std::iter::once(self.mu[1]))
            .chain(self.chi.iter().copied())
    }
}

/// Density matrix of the two dots over `{gg, gm, mg, mm}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensityMatrix {
    m: Matrix4<Complex64>,
}

impl TwoQubitDensityMatrix {
    /// Checks hermiticity, unit trace and positivity before accepting `m`.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).norm();
        if !(herm <= STATE_TOL) {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let trace = m.trace();
        if !((trace - 1.0).norm() <= STATE_TOL) {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        let rho = Self { m };
        let min_eig = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    pub fn from_pure(psi: [Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(psi);
        let norm = v.norm();
        let v = v / Complex64::from(norm);
        Self::new(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix4::identity() * Complex64::from(0.25),
        }
    }

    /// Entry in row `p`, column `q`, counted from 1.
    pub fn entry(&self, p: usize, q: usize) -> Complex64 {
        self.m[(p - 1, q - 1)]
    }

    pub fn get(&self, row: BranchLabel, col: BranchLabel) -> Complex64 {
        self.m[(row.index(), col.index())]
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = self.m.symmetric_eigenvalues();
        [e[0], e[1], e[2], e[3]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub rho: TwoQubitDensityMatrix,
    pub fidelity: f64,
    pub efficiency: f64,
    pub concurrence_lb: f64,
    /// Scattering sets in branch order.
    pub scattering: Vec<ScatteringSet>,
    /// Coherent outputs in branch order.
    pub outputs: Vec<CoherentOutputs>,
}

/// Input amplitude into source 2 that cancels the `|mm>` branch at drain 1.
pub fn matching_beta(alpha: Complex64, s_mm: &ScatteringSet) -> Result<Complex64> {
    let t2 = s_mm.t(Port::Source2, Port::Drain1);
    if t2.norm() == 0.0 {
        return Err(Error::MatchingUndefined);
    }
    Ok(-alpha * s_mm.t(Port::Source1, Port::Drain1) / t2)
}

pub fn branch_outputs(s: &ScatteringSet, alpha: Complex64, beta: Complex64) -> CoherentOutputs {
    let mix = |to: Port| alpha * s.t(Port::Source1, to) + beta * s.t(Port::Source2, to);
    let chi = s
        .bath(Port::Source1)
        .iter()
        .zip(s.bath(Port::Source2))
        .map(|(b1, b2)| alpha * b1 + beta * b2)
        .collect();
    CoherentOutputs {
        branch: s.branch,
        xi: [mix(Port::Source1), mix(Port::Source2)],
        mu: [mix(Port::Drain1), mix(Port::Drain2)],
        chi,
    }
}

/// `<nu|mu>` for coherent states.
pub fn coherent_overlap(nu: Complex64, mu: Complex64) -> Complex64 {
    (nu.conj() * mu - (mu.norm_sqr() + nu.norm_sqr()) / 2.0).exp()
}

/// `<nu| P |mu>` for a non-resolving detector of efficiency `kappa`,
/// `P = 1 - sum_n (1 - kappa)^n |n><n|`.
pub fn detector_overlap(nu: Complex64, mu: Complex64, kappa: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidEfficiency(kappa));
    }
    let z = nu.conj() * mu;
    let prefactor = (z * (1.0 - kappa) - (mu.norm_sqr() + nu.norm_sqr()) / 2.0).exp();
    Ok(prefactor * exp_m1(z * kappa))
}

/// `exp(z) - 1` without cancellation for small `|z|`.
fn exp_m1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (z.im / 2.0).sin();
    Complex64::new(
        z.re.exp_m1() * c - 2.0 * half * half,
        z.re.exp() * s,
    )
}

/// Normalised post-click state of the dots and its heralding probability.
pub fn postselected_state(
    outputs: &[CoherentOutputs],
    init: &InitAmplitudes,
    kappa: f64,
) -> Result<(TwoQubitDensityMatrix, f64)> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidEfficiency(kappa));
    }
    let mut by_branch: [Option<&CoherentOutputs>; 4] = [None; 4];
    for o in outputs {
        by_branch[o.branch.index()] = Some(o);
    }

    let mut rho = Matrix4::from_element(ZERO);
    for p in BranchLabel::ALL {
        let wp = init.weight(p);
        let Some(op) = by_branch[p.index()] else {
            if wp.norm() == 0.0 {
                continue;
            }
            return Err(Error::InvalidParameter(format!("missing outputs for branch {p}")));
        };
        for q in BranchLabel::ALL {
            let wq = init.weight(q);
            if wp.norm() == 0.0 || wq.norm() == 0.0 {
                continue;
            }
            let oq = by_branch[q.index()]
                .ok_or_else(|| Error::InvalidParameter(format!("missing outputs for branch {q}")))?;
            let fields: Complex64 = op
                .traced_modes()
                .zip(oq.traced_modes())
                .map(|(ket, bra)| coherent_overlap(bra, ket))
                .product();
            let click = detector_overlap(oq.mu[0], op.mu[0], kappa)?;
            rho[(p.index(), q.index())] = wp * wq.conj() * fields * click;
        }
    }

    let eta = rho.trace().re;
    if !(eta > DETECTION_FLOOR) {
        return Err(Error::NoDetectionProbability { eta });
    }
    let rho = rho / Complex64::from(eta);
    Ok((TwoQubitDensityMatrix::new(rho)?, eta))
}

/// Overlap with `(|mg> - |gm>)/sqrt(2)`.
pub fn fidelity(rho: &TwoQubitDensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    let herm = (m - m.adjoint()).norm();
    if !(herm <= STATE_TOL) {
        return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
    }
    let f = 0.5 * (rho.entry(2, 2) + rho.entry(3, 3) - rho.entry(2, 3) - rho.entry(3, 2)).re;
    if !(-PSD_TOL..=1.0 + PSD_TOL).contains(&f) {
        return Err(Error::InvalidState(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}

pub fn concurrence_lower_bound(fidelity: f64) -> f64 {
    (2.0 * fidelity - 1.0).max(0.0)
}

/// Knobs of a single protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Coherent amplitude injected into source 1.
    pub alpha: Complex64,
    pub init: InitAmplitudes,
    /// Lumped outcoupling and detector efficiency.
    pub kappa: f64,
    /// Probe detuning from the particle resonance.
    pub dw: f64,
    /// Amplitude transmission of the input nanowires; scales both inputs.
    pub insertion: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            alpha: Complex64::from(0.5),
            init: InitAmplitudes::equal_superposition(),
            kappa: 1.0,
            dw: 0.0,
            insertion: 1.0,
        }
    }
}

pub fn run_protocol(config: &NetworkConfig, params: &ProtocolParams) -> Result<ProtocolResult> {
    if !(params.insertion >= 0.0 && params.insertion <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "insertion transmission {} outside [0, 1]",
            params.insertion
        )));
    }
    let net = build_network(config)?;
    let scattering = BranchLabel::ALL
        .iter()
        .map(|&b| solve_scattering(&net, b, params.dw))
        .collect::<Result<Vec<_>>>()?;

    let alpha = params.alpha * params.insertion;
    let beta = matching_beta(alpha, &scattering[BranchLabel::MM.index()])?;
    let outputs: Vec<_> = scattering
        .iter()
        .map(|s| branch_outputs(s, alpha, beta))
        .collect();
    let (rho, efficiency) = postselected_state(&outputs, &params.init, params.kappa)?;
    let fidelity = fidelity(&rho)?;
    Ok(ProtocolResult {
        alpha,
        beta,
        rho,
        fidelity,
        efficiency,
        concurrence_lb: concurrence_lower_bound(fidelity),
        scattering,
        outputs,
    })
}
