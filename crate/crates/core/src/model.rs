//! Domain types and the coupled-mode network graph.
//!
//! All rates are expressed in units of the interparticle coupling `g_np`.
//! Nodes are numbered from 1 to `2n + 2`: the left arm occupies `1..=n`,
//! the beam-splitter corners are `n, n+1, n+2, n+3` and the right arm runs
//! `n+3..=2n+2`. Source 1 couples to node 1, source 2 to node `2n+2`,
//! drain 1 to node `n+1` and drain 2 to node `n+2`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coupling of one quantum dot to its adjacent nanoparticle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdConfig {
    /// Vacuum Rabi coupling `J`.
    pub j: f64,
    /// Dipole decay rate `gamma`.
    pub gamma: f64,
    /// Detuning of the g-e transition from the nanoparticle resonance.
    pub delta: f64,
    /// Whether the dipole couples at all. A dot held in `|m>` is modelled
    /// as absent, so this flag is cleared for it.
    pub coupled: bool,
}

impl QdConfig {
    pub fn new(j: f64, gamma: f64, delta: f64) -> Result<Self> {
        let qd = Self {
            j,
            gamma,
            delta,
            coupled: true,
        };
        qd.validate()?;
        Ok(qd)
    }

    pub fn decoupled(self) -> Self {
        Self {
            coupled: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j >= 0.0 && self.j.is_finite()) {
            return Err(Error::InvalidParameter(format!("J must be >= 0, got {}", self.j)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter("delta must be finite".into()));
        }
        Ok(())
    }
}

impl Default for QdConfig {
    fn default() -> Self {
        Self {
            j: 0.3,
            gamma: 0.001,
            delta: 0.0,
            coupled: true,
        }
    }
}

/// Physical rates of the two-arm array with its four-particle beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Nanoparticles per arm.
    pub n: usize,
    /// Interparticle coupling; the reference rate.
    pub g_np: f64,
    /// Nanowire-to-nanoparticle coupling.
    pub g_inout: f64,
    /// Nanoparticle damping `Gamma_0`.
    pub gamma0: f64,
    pub qd1: QdConfig,
    pub qd2: QdConfig,
    /// Natural frequency `omega_0 / g_np`, used only by validity checks.
    pub omega0_over_gnp: Option<f64>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            n: 2,
            g_np: 1.0,
            g_inout: 0.5,
            gamma0: 0.1,
            qd1: QdConfig::default(),
            qd2: QdConfig::default(),
            omega0_over_gnp: None,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidGeometry(format!(
                "need at least 2 nanoparticles per arm, got {}",
                self.n
            )));
        }
        if !(self.g_np > 0.0 && self.g_np.is_finite()) {
            return Err(Error::InvalidParameter(format!("g_np must be > 0, got {}", self.g_np)));
        }
        if !(self.g_inout > 0.0 && self.g_inout.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "g_inout must be > 0, got {}",
                self.g_inout
            )));
        }
        if !(self.gamma0 >= 0.0 && self.gamma0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be >= 0, got {}",
                self.gamma0
            )));
        }
        self.qd1.validate()?;
        self.qd2.validate()
    }

    /// Sets `delta_1 = delta0 + ddelta` and `delta_2 = delta0 - ddelta`.
    pub fn with_detunings(mut self, delta0: f64, ddelta: f64) -> Self {
        self.qd1.delta = delta0 + ddelta;
        self.qd2.delta = delta0 - ddelta;
        self
    }

    pub fn beam_splitter(&self) -> (f64, f64) {
        beam_splitter_couplings(self.g_inout, self.gamma0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitState {
    G,
    M,
}

/// Joint state of QD1 and QD2. The declaration order is the density-matrix
/// basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    GG,
    GM,
    MG,
    MM,
}

impl BranchLabel {
    pub const ALL: [BranchLabel; 4] = [Self::GG, Self::GM, Self::MG, Self::MM];

    pub fn from_states(qd1: QubitState, qd2: QubitState) -> Self {
        match (qd1, qd2) {
            (QubitState::G, QubitState::G) => Self::GG,
            (QubitState::G, QubitState::M) => Self::GM,
            (QubitState::M, QubitState::G) => Self::MG,
            (QubitState::M, QubitState::M) => Self::MM,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn qd1(self) -> QubitState {
        match self {
            Self::GG | Self::GM => QubitState::G,
            Self::MG | Self::MM => QubitState::M,
        }
    }

    pub fn qd2(self) -> QubitState {
        match self {
            Self::GG | Self::MG => QubitState::G,
            Self::GM | Self::MM => QubitState::M,
        }
    }

    pub fn state_of(self, qubit: Qubit) -> QubitState {
        match qubit {
            Qubit::First => self.qd1(),
            Qubit::Second => self.qd2(),
        }
    }

    /// Branch seen after swapping the two dots.
    pub fn swapped(self) -> Self {
        Self::from_states(self.qd2(), self.qd1())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::GG => "gg",
            Self::GM => "gm",
            Self::MG => "mg",
            Self::MM => "mm",
        }
    }
}

impl std::str::FromStr for BranchLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gg" => Ok(Self::GG),
            "gm" => Ok(Self::GM),
            "mg" => Ok(Self::MG),
            "mm" => Ok(Self::MM),
            other => Err(Error::InvalidParameter(format!("unknown branch '{other}'"))),
        }
    }
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Source1,
    Source2,
    Drain1,
    Drain2,
}

impl Port {
    pub const ALL: [Port; 4] = [Self::Source1, Self::Source2, Self::Drain1, Self::Drain2];

    pub fn is_source(self) -> bool {
        matches!(self, Self::Source1 | Self::Source2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Source1 => "s1",
            Self::Source2 => "s2",
            Self::Drain1 => "d1",
            Self::Drain2 => "d2",
        }
    }

    /// Port label after the left/right mirror of the two-arm network.
    pub fn mirrored(self) -> Self {
        match self {
            Self::Source1 => Self::Source2,
            Self::Source2 => Self::Source1,
            Self::Drain1 => Self::Drain2,
            Self::Drain2 => Self::Drain1,
        }
    }
}

impl std::str::FromStr for Port {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1" => Ok(Self::Source1),
            "s2" => Ok(Self::Source2),
            "d1" => Ok(Self::Drain1),
            "d2" => Ok(Self::Drain2),
            other => Err(Error::InvalidParameter(format!("unknown port '{other}'"))),
        }
    }
}

/// Undirected coupling between two nodes (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSite {
    pub node: usize,
    pub qubit: Qubit,
    pub qd: QdConfig,
}

/// Node/edge structure of a nanoparticle network with its ports, baths and
/// attached dipoles.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledModeNetwork {
    node_count: usize,
    edges: Vec<Edge>,
    ports: Vec<(Port, usize)>,
    port_rate: f64,
    bath_rate: f64,
    dipoles: Vec<DipoleSite>,
}

impl CoupledModeNetwork {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn ports(&self) -> &[(Port, usize)] {
        &self.ports
    }

    pub fn sources(&self) -> impl Iterator<Item = (Port, usize)> + '_ {
        self.ports.iter().copied().filter(|(p, _)| p.is_source())
    }

    pub fn port_node(&self, port: Port) -> Option<usize> {
        self.ports.iter().find(|(p, _)| *p == port).map(|&(_, node)| node)
    }

    /// Number of nanowires attached to `node`.
    pub fn port_multiplicity(&self, node: usize) -> usize {
        self.ports.iter().filter(|(_, k)| *k == node).count()
    }

    pub fn port_rate(&self) -> f64 {
        self.port_rate
    }

    pub fn bath_rate(&self) -> f64 {
        self.bath_rate
    }

    pub fn dipoles(&self) -> &[DipoleSite] {
        &self.dipoles
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
            .map(|e| e.coupling)
            .sum()
    }

    /// Dipoles that couple in the given branch.
    pub fn active_dipoles(&self, branch: BranchLabel) -> impl Iterator<Item = &DipoleSite> + '_ {
        self.dipoles
            .iter()
            .filter(move |d| d.qd.coupled && branch.state_of(d.qubit) == QubitState::G)
    }

    /// Sum of every linear damping channel in the eliminated node picture.
    pub fn total_damping(&self) -> f64 {
        self.node_count as f64 * self.bath_rate
            + self.ports.len() as f64 * self.port_rate
            + self.dipoles.iter().map(|d| d.qd.gamma).sum::<f64>()
    }
}

/// Couplings `(g_h, g_v)` that make the four-particle junction a 50/50
/// splitter at resonance.
pub fn beam_splitter_couplings(g_inout: f64, gamma0: f64) -> (f64, f64) {
    let g_h = (g_inout + gamma0) / 2.0;
    (g_h, std::f64::consts::SQRT_2 * g_h)
}

/// Two arms of `n` particles joined by the beam splitter.
pub fn build_network(config: &NetworkConfig) -> Result<CoupledModeNetwork> {
    config.validate()?;
    let n = config.n;
    let (g_h, g_v) = config.beam_splitter();

    let mut edges = Vec::with_capacity(2 * (n - 1) + 4);
    for i in 1..n {
        edges.push(Edge {
            a: i,
            b: i + 1,
            coupling: config.g_np,
        });
    }
    for i in (n + 3)..(2 * n + 2) {
        edges.push(Edge {
            a: i,
            b: i + 1,
            coupling: config.g_np,
        });
    }
    edges.push(Edge {
        a: n,
        b: n + 3,
        coupling: g_h,
    });
    edges.push(Edge {
        a: n + 1,
        b: n + 2,
        coupling: g_h,
    });
    edges.push(Edge {
        a: n,
        b: n + 1,
        coupling: g_v,
    });
    edges.push(Edge {
        a: n + 2,
        b: n + 3,
        coupling: g_v,
    });

    Ok(CoupledModeNetwork {
        node_count: 2 * n + 2,
        edges,
        ports: vec![
            (Port::Source1, 1),
            (Port::Source2, 2 * n + 2),
            (Port::Drain1, n + 1),
            (Port::Drain2, n + 2),
        ],
        port_rate: config.g_inout,
        bath_rate: config.gamma0,
        dipoles: vec![
            DipoleSite {
                node: 1,
                qubit: Qubit::First,
                qd: config.qd1,
            },
            DipoleSite {
                node: 2 * n + 2,
                qubit: Qubit::Second,
                qd: config.qd2,
            },
        ],
    })
}

/// A single chain of `n` particles with the source and the dipole on node 1
/// and the drain on node `n`. For `n = 1` both nanowires touch the same
/// particle.
pub fn build_arm_network(
    n: usize,
    g_np: f64,
    g_inout: f64,
    gamma0: f64,
    qd: QdConfig,
) -> Result<CoupledModeNetwork> {
    if n < 1 {
        return Err(Error::InvalidGeometry("an arm needs at least one particle".into()));
    }
    if !(g_inout >= 0.0 && gamma0 >= 0.0 && g_np >= 0.0) {
        return Err(Error::InvalidParameter("arm rates must be non-negative".into()));
    }
    qd.validate()?;
    let edges = (1..n)
        .map(|i| Edge {
            a: i,
            b: i + 1,
            coupling: g_np,
        })
        .collect();
    Ok(CoupledModeNetwork {
        node_count: n,
        edges,
        ports: vec![(Port::Source1, 1), (Port::Drain1, n)],
        port_rate: g_inout,
        bath_rate: gamma0,
        dipoles: vec![DipoleSite {
            node: 1,
            qubit: Qubit::First,
            qd,
        }],
    })
}

/// Response of an adiabatically eliminated dipole seen by its nanoparticle,
/// `J^2 / (gamma/2 + i(delta - dw))`, with `sigma_z` pinned at -1.
pub fn qd_self_energy(qd: &QdConfig, dw: f64) -> Result<Complex64> {
    if !qd.coupled || qd.j == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let denom = Complex64::new(qd.gamma / 2.0, qd.delta - dw);
    if denom.norm() == 0.0 {
        return Err(Error::SingularSelfEnergy { delta: qd.delta });
    }
    Ok(Complex64::new(qd.j * qd.j, 0.0) / denom)
}

/// Rough physical footprint of one arm: `n` times the particle pitch.
pub fn arm_length(n: usize, pitch: f64) -> f64 {
    n as f64 * pitch
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn edge_set(net: &CoupledModeNetwork) -> Vec<(usize, usize, f64)> {
        let mut v: Vec<_> = net
            .edges()
            .iter()
            .map(|e| (e.a.min(e.b), e.a.max(e.b), e.coupling))
            .collect();
        v.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        v
    }

    #[test]
    fn beam_splitter_values() {
        let (h, v) = beam_splitter_couplings(0.5, 0.1);
        assert_relative_eq!(h, 0.3, epsilon = 1e-15);
        assert_relative_eq!(v, 0.3 * 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(beam_splitter_couplings(0.0, 0.0), (0.0, 0.0));
        let (h, v) = beam_splitter_couplings(2.0, 0.1);
        assert_relative_eq!(h, 1.05, epsilon = 1e-15);
        assert_relative_eq!(v, 1.4849242404917498, epsilon = 1e-12);
    }

    #[test]
    fn n2_layout() {
        let net = build_network(&NetworkConfig::default()).unwrap();
        assert_eq!(net.node_count(), 6);
        let (h, v) = beam_splitter_couplings(0.5, 0.1);
        assert_eq!(
            edge_set(&net),
            vec![
                (1, 2, 1.0),
                (2, 3, v),
                (2, 5, h),
                (3, 4, h),
                (4, 5, v),
                (5, 6, 1.0)
            ]
        );
        assert_eq!(net.port_node(Port::Source1), Some(1));
        assert_eq!(net.port_node(Port::Source2), Some(6));
        assert_eq!(net.port_node(Port::Drain1), Some(3));
        assert_eq!(net.port_node(Port::Drain2), Some(4));
    }

    #[test]
    fn n3_and_n40_sizes() {
        let cfg = NetworkConfig {
            n: 3,
            ..Default::default()
        };
        let net = build_network(&cfg).unwrap();
        assert_eq!(net.node_count(), 8);
        assert_eq!(net.port_node(Port::Drain1), Some(4));
        assert_eq!(net.port_node(Port::Drain2), Some(5));

        let cfg = NetworkConfig {
            n: 40,
            ..Default::default()
        };
        let net = build_network(&cfg).unwrap();
        assert_eq!(net.node_count(), 82);
        assert_relative_eq!(arm_length(40, 150.0), 6000.0);
    }

    #[test]
    fn edge_count_and_no_cross_couplings() {
        for n in 2..12 {
            let cfg = NetworkConfig {
                n,
                ..Default::default()
            };
            let net = build_network(&cfg).unwrap();
            assert_eq!(net.edges().len(), 2 * (n - 1) + 4);
            assert_eq!(net.coupling(n, n + 2), 0.0);
            assert_eq!(net.coupling(n + 1, n + 3), 0.0);
            assert_eq!(net.coupling(n - 1, n + 1), 0.0);
        }
    }

    #[test]
    fn mirror_symmetry() {
        for n in 2..8 {
            let cfg = NetworkConfig {
                n,
                ..Default::default()
            };
            let net = build_network(&cfg).unwrap();
            let m = |i: usize| 2 * n + 3 - i;
            for e in net.edges() {
                assert_eq!(net.coupling(m(e.a), m(e.b)), e.coupling);
            }
            for &(p, node) in net.ports() {
                assert_eq!(net.port_node(p.mirrored()), Some(m(node)));
            }
        }
    }

    #[test]
    fn rejects_short_arms() {
        let cfg = NetworkConfig {
            n: 1,
            ..Default::default()
        };
        assert!(matches!(build_network(&cfg), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn self_energy_cases() {
        let qd = QdConfig::new(0.3, 0.001, 0.0).unwrap();
        let s = qd_self_energy(&qd, 0.0).unwrap();
        assert_relative_eq!(s.re, 180.0, epsilon = 1e-9);
        assert_eq!(s.im, 0.0);
        assert_eq!(qd_self_energy(&qd.decoupled(), 0.0).unwrap(), Complex64::new(0.0, 0.0));

        let bare = QdConfig::new(0.0, 0.2, 0.7).unwrap();
        assert_eq!(qd_self_energy(&bare, -1.3).unwrap(), Complex64::new(0.0, 0.0));

        let lossless = QdConfig::new(0.3, 0.0, 0.4).unwrap();
        assert!(matches!(
            qd_self_energy(&lossless, 0.4),
            Err(Error::SingularSelfEnergy { .. })
        ));
        assert!(qd_self_energy(&lossless, 0.5).is_ok());
    }

    #[test]
    fn self_energy_is_passive() {
        let qd = QdConfig::new(0.4, 0.05, 0.3).unwrap();
        for k in -300..=300 {
            let dw = k as f64 * 0.01;
            assert!(qd_self_energy(&qd, dw).unwrap().re >= 0.0);
        }
    }

    #[test]
    fn branch_order_and_parse() {
        let idx: Vec<_> = BranchLabel::ALL.iter().map(|b| b.index()).collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert_eq!("Mg".parse::<BranchLabel>().unwrap(), BranchLabel::MG);
        assert_eq!(BranchLabel::GM.swapped(), BranchLabel::MG);
        assert_eq!(BranchLabel::GM.qd1(), QubitState::G);
        assert_eq!(BranchLabel::GM.qd2(), QubitState::M);
    }
}
