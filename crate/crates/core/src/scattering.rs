//! Frequency-domain steady state of the coupled-mode network.
//!
//! With node amplitudes `a ~ exp(-i w t)` and the dipoles eliminated, the
//! steady state of every branch solves `M a = drive`, where
//!
//! ```text
//! M_kk = -i dw + Gamma0/2 + (ports at k) g_inout/2 + Sigma_k(dw)
//! M_kj = -i g_kj
//! ```
//!
//! and a unit input at a source injects `sqrt(g_inout)` at its node. Output
//! amplitudes follow from `out = sqrt(rate) a - in`. The hopping sign is
//! chosen so that a drain pair behind the splitter sees `t_d2 = i t_d1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{qd_self_energy, BranchLabel, CoupledModeNetwork, Port};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative residual accepted from the dense solve.
pub const SOLVER_RESIDUAL_TOL: f64 = 1e-12;
/// Most negative flux residual tolerated before a solve is declared broken.
pub const FLUX_TOL: f64 = 1e-9;

/// Square matrix over the network nodes; row `k - 1` belongs to node `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix {
    matrix: DMatrix<Complex64>,
}

impl DynamicalMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Entry between nodes `i` and `j` (1-based).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i - 1, j - 1)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }
}

pub fn assemble_dynamical_matrix(
    net: &CoupledModeNetwork,
    branch: BranchLabel,
    dw: f64,
) -> Result<DynamicalMatrix> {
    let n = net.node_count();
    let mut m = DMatrix::from_element(n, n, ZERO);
    for k in 1..=n {
        let ports = net.port_multiplicity(k) as f64;
        m[(k - 1, k - 1)] = Complex64::new(
            net.bath_rate() / 2.0 + ports * net.port_rate() / 2.0,
            -dw,
        );
    }
    for d in net.active_dipoles(branch) {
        m[(d.node - 1, d.node - 1)] += qd_self_energy(&d.qd, dw)?;
    }
    for e in net.edges() {
        let c = Complex64::new(0.0, -e.coupling);
        m[(e.a - 1, e.b - 1)] += c;
        m[(e.b - 1, e.a - 1)] += c;
    }
    Ok(DynamicalMatrix { matrix: m })
}

/// Drive vector for a unit-amplitude input at `source`.
pub fn source_drive(net: &CoupledModeNetwork, source: Port) -> DVector<Complex64> {
    let mut b = DVector::from_element(net.node_count(), ZERO);
    if let Some(node) = net.port_node(source) {
        b[node - 1] = Complex64::new(net.port_rate().sqrt(), 0.0);
    }
    b
}

/// Steady-state node amplitudes, one vector per source in network order.
pub fn node_amplitudes(
    net: &CoupledModeNetwork,
    branch: BranchLabel,
    dw: f64,
) -> Result<Vec<(Port, DVector<Complex64>)>> {
    let m = assemble_dynamical_matrix(net, branch, dw)?.into_matrix();
    let lu = m.clone().lu();

    let u = lu.u();
    let diag = u.diagonal();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for z in diag.iter() {
        lo = lo.min(z.norm());
        hi = hi.max(z.norm());
    }
    let condition = hi / lo;
    if !condition.is_finite() || condition > 1.0 / f64::EPSILON {
        return Err(Error::NumericallySingular { condition });
    }

    net.sources()
        .map(|(port, _)| {
            let b = source_drive(net, port);
            let a = lu
                .solve(&b)
                .ok_or(Error::NumericallySingular { condition })?;
            let residual = (&m * &a - &b).norm();
            let scale = m.norm() * a.norm() + b.norm();
            if !(residual <= SOLVER_RESIDUAL_TOL * scale) {
                return Err(Error::NumericallySingular { condition });
            }
            Ok((port, a))
        })
        .collect()
}

/// Amplitudes out of the network for a unit input at one source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceResponse {
    pub source: Port,
    /// `t[source -> port]` for every port of the network.
    pub to_port: Vec<(Port, Complex64)>,
    /// `t[source -> b_k]` for nodes `k = 1..=N`.
    pub to_bath: Vec<Complex64>,
}

impl SourceResponse {
    pub fn output_flux(&self) -> f64 {
        self.to_port.iter().map(|(_, t)| t.norm_sqr()).sum::<f64>()
            + self.to_bath.iter().map(|t| t.norm_sqr()).sum::<f64>()
    }
}

/// Transition amplitudes of one branch at one probe detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSet {
    pub branch: BranchLabel,
    pub dw: f64,
    pub responses: Vec<SourceResponse>,
}

impl ScatteringSet {
    pub fn response(&self, source: Port) -> Option<&SourceResponse> {
        self.responses.iter().find(|r| r.source == source)
    }

    pub fn try_t(&self, from: Port, to: Port) -> Option<Complex64> {
        self.response(from)?
            .to_port
            .iter()
            .find(|(p, _)| *p == to)
            .map(|&(_, t)| t)
    }

    /// Amplitude from source `from` into port `to`.
    ///
    /// Panics when either port is absent from the network that produced the set.
    pub fn t(&self, from: Port, to: Port) -> Complex64 {
        self.try_t(from, to)
            .unwrap_or_else(|| panic!("no amplitude {} -> {}", from.as_str(), to.as_str()))
    }

    pub fn bath(&self, from: Port) -> &[Complex64] {
        self.response(from).map(|r| r.to_bath.as_slice()).unwrap_or(&[])
    }
}

pub fn solve_scattering(
    net: &CoupledModeNetwork,
    branch: BranchLabel,
    dw: f64,
) -> Result<ScatteringSet> {
    let sqrt_port = net.port_rate().sqrt();
    let sqrt_bath = net.bath_rate().sqrt();
    let responses = node_amplitudes(net, branch, dw)?
        .into_iter()
        .map(|(source, a)| {
            let to_port = net
                .ports()
                .iter()
                .map(|&(port, node)| {
                    let mut t = sqrt_port * a[node - 1];
                    if port == source {
                        t -= 1.0;
                    }
                    (port, t)
                })
                .collect();
            let to_bath = a.iter().map(|x| sqrt_bath * x).collect();
            SourceResponse {
                source,
                to_port,
                to_bath,
            }
        })
        .collect();
    Ok(ScatteringSet {
        branch,
        dw,
        responses,
    })
}

/// `1 - sum |t|^2`, maximised over sources. Positive values are flux taken
/// by the dipoles; any source gaining flux is an error.
pub fn flux_balance_residual(s: &ScatteringSet) -> Result<f64> {
    let per_source: Vec<f64> = s.responses.iter().map(|r| 1.0 - r.output_flux()).collect();
    let worst = per_source.iter().copied().fold(f64::INFINITY, f64::min);
    if worst < -FLUX_TOL {
        return Err(Error::FluxViolation { residual: worst });
    }
    Ok(per_source.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Stop once `|x_{k+1} - x_k| / (h |x_{k+1}|)` falls below this.
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_steps: 20_000_000,
        }
    }
}

/// Relaxes the classical equations of motion in time until they settle.
///
/// Works in the frame rotating at the probe frequency and keeps each active
/// dipole as its own linear degree of freedom
/// (`d sigma/dt = -(gamma/2 + i(delta - dw)) sigma - i J a`), so nothing is
/// shared with the eliminated frequency-domain solve. Integration is
/// classical RK4 from the empty network.
pub fn steady_state_oracle(
    net: &CoupledModeNetwork,
    branch: BranchLabel,
    dw: f64,
    options: OracleOptions,
) -> Result<Vec<(Port, DVector<Complex64>)>> {
    if !(net.total_damping() > 0.0) {
        return Err(Error::OracleDiverged(
            "network has no dissipation, no steady state exists".into(),
        ));
    }

    let n = net.node_count();
    let dipoles: Vec<_> = net.active_dipoles(branch).copied().collect();
    let dim = n + dipoles.len();

    // dx/dt = -A x + b
    let mut a = DMatrix::from_element(dim, dim, ZERO);
    for k in 1..=n {
        let ports = net.port_multiplicity(k) as f64;
        a[(k - 1, k - 1)] = Complex64::new(
            net.bath_rate() / 2.0 + ports * net.port_rate() / 2.0,
            -dw,
        );
    }
    for e in net.edges() {
        a[(e.a - 1, e.b - 1)] += Complex64::new(0.0, -e.coupling);
        a[(e.b - 1, e.a - 1)] += Complex64::new(0.0, -e.coupling);
    }
    for (i, d) in dipoles.iter().enumerate() {
        let s = n + i;
        let node = d.node - 1;
        a[(s, s)] = Complex64::new(d.qd.gamma / 2.0, d.qd.delta - dw);
        a[(s, node)] = Complex64::new(0.0, d.qd.j);
        a[(node, s)] = Complex64::new(0.0, d.qd.j);
    }

    let row_norm = (0..dim)
        .map(|r| a.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let h = 1.0 / row_norm.max(1e-300);

    net.sources()
        .map(|(port, node)| {
            let mut b = DVector::from_element(dim, ZERO);
            b[node - 1] = Complex64::new(net.port_rate().sqrt(), 0.0);
            let x = relax(&a, &b, h, options)?;
            Ok((port, x.rows(0, n).into_owned()))
        })
        .collect()
}

fn relax(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    h: f64,
    options: OracleOptions,
) -> Result<DVector<Complex64>> {
    let f = |x: &DVector<Complex64>| b - a * x;
    let mut x = DVector::from_element(b.len(), ZERO);
    for _ in 0..options.max_steps {
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * Complex64::from(h / 2.0)));
        let k3 = f(&(&x + &k2 * Complex64::from(h / 2.0)));
        let k4 = f(&(&x + &k3 * Complex64::from(h)));
        let step = (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4)
            * Complex64::from(h / 6.0);
        x += &step;

        let size = x.norm();
        if !size.is_finite() {
            return Err(Error::OracleDiverged("amplitudes blew up".into()));
        }
        if size > 0.0 && step.norm() / (h * size) < options.tolerance {
            return Ok(x);
        }
    }
    Err(Error::OracleDiverged(format!(
        "no convergence within {} steps",
        options.max_steps
    )))
}
