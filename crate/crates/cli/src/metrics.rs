//! Named per-point quantities that sweeps can record.
//!
//! | name                     | columns                    |
//! |--------------------------|----------------------------|
//! | `fidelity`               | 1                          |
//! | `efficiency`             | 1                          |
//! | `concurrence_lb`         | 1                          |
//! | `beta`                   | `beta_re`, `beta_im`       |
//! | `rho_PQ` (P, Q in 1..=4) | `rho_PQ_re`, `rho_PQ_im`   |
//! | `t_<from><to>_<branch>`  | re/im pair                 |
//! | `abs2_t_<from><to>_<branch>` | 1                      |
//! | `arm_t`, `arm_r`, `arm_a`, `arm_loss` | 1             |
//! | `purcell`                | 1                          |
//!
//! `<from>` is `s1` or `s2`; `<to>` is a port (`s1 s2 d1 d2`) or a bath
//! `b<k>`. Protocol quantities that are undefined at a point (no heralding
//! probability, or no matching input) are written as NaN.

use std::fmt;
use std::str::FromStr;

use dirnet::dir::{arm_spectrum, purcell_factor, ArmConfig, ArmSpectrumPoint};
use dirnet::entangle::{run_protocol, ProtocolResult};
use dirnet::model::{build_network, BranchLabel, Port};
use dirnet::scattering::{solve_scattering, ScatteringSet};
use dirnet::{Complex64, Error};

use crate::config::Params;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Port(Port),
    /// Bath of node `k`, counted from 1.
    Bath(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Port(p) => f.write_str(p.as_str()),
            Target::Bath(k) => write!(f, "b{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Amplitude {
    pub from: Port,
    pub to: Target,
    pub branch: BranchLabel,
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t_{}{}_{}", self.from.as_str(), self.to, self.branch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Fidelity,
    Efficiency,
    ConcurrenceLb,
    Beta,
    Rho(usize, usize),
    T(Amplitude),
    Abs2T(Amplitude),
    ArmT,
    ArmR,
    ArmA,
    ArmLoss,
    Purcell,
}

fn parse_amplitude(s: &str) -> Option<Amplitude> {
    let rest = s.strip_prefix("t_")?;
    let (path, branch) = rest.rsplit_once('_')?;
    let from: Port = path.get(..2)?.parse().ok()?;
    if !from.is_source() {
        return None;
    }
    let to = match path.get(2..)? {
        bath if bath.starts_with('b') => {
            let k: usize = bath[1..].parse().ok()?;
            if k == 0 {
                return None;
            }
            Target::Bath(k)
        }
        port => Target::Port(port.parse().ok()?),
    };
    Some(Amplitude {
        from,
        to,
        branch: branch.parse().ok()?,
    })
}

impl FromStr for Metric {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let metric = match s {
            "fidelity" => Some(Metric::Fidelity),
            "efficiency" => Some(Metric::Efficiency),
            "concurrence_lb" => Some(Metric::ConcurrenceLb),
            "beta" => Some(Metric::Beta),
            "arm_t" => Some(Metric::ArmT),
            "arm_r" => Some(Metric::ArmR),
            "arm_a" => Some(Metric::ArmA),
            "arm_loss" => Some(Metric::ArmLoss),
            "purcell" => Some(Metric::Purcell),
            _ => {
                if let Some(pq) = s.strip_prefix("rho_") {
                    let d: Vec<usize> = pq.chars().filter_map(|c| c.to_digit(10)).map(|d| d as usize).collect();
                    match d.as_slice() {
                        [p, q] if pq.len() == 2 && (1..=4).contains(p) && (1..=4).contains(q) => {
                            Some(Metric::Rho(*p, *q))
                        }
                        _ => None,
                    }
                } else if let Some(rest) = s.strip_prefix("abs2_") {
                    parse_amplitude(rest).map(Metric::Abs2T)
                } else {
                    parse_amplitude(s).map(Metric::T)
                }
            }
        };
        metric.ok_or_else(|| CliError::usage(format!("unknown metric '{s}'")))
    }
}

impl Metric {
    pub fn columns(&self) -> Vec<String> {
        let pair = |base: String| vec![format!("{base}_re"), format!("{base}_im")];
        match self {
            Metric::Fidelity => vec!["fidelity".into()],
            Metric::Efficiency => vec!["efficiency".into()],
            Metric::ConcurrenceLb => vec!["concurrence_lb".into()],
            Metric::Beta => pair("beta".into()),
            Metric::Rho(p, q) => pair(format!("rho_{p}{q}")),
            Metric::T(a) => pair(a.to_string()),
            Metric::Abs2T(a) => vec![format!("abs2_{a}")],
            Metric::ArmT => vec!["arm_t".into()],
            Metric::ArmR => vec!["arm_r".into()],
            Metric::ArmA => vec!["arm_a".into()],
            Metric::ArmLoss => vec!["arm_loss".into()],
            Metric::Purcell => vec!["purcell".into()],
        }
    }

    fn needs_protocol(&self) -> bool {
        matches!(
            self,
            Metric::Fidelity | Metric::Efficiency | Metric::ConcurrenceLb | Metric::Beta | Metric::Rho(..)
        )
    }

    fn needs_arm(&self) -> bool {
        matches!(self, Metric::ArmT | Metric::ArmR | Metric::ArmA | Metric::ArmLoss)
    }
}

pub fn parse_metrics(names: &[String]) -> Result<Vec<Metric>> {
    if names.is_empty() {
        return Err(CliError::usage("no metrics requested"));
    }
    names.iter().map(|n| n.parse()).collect()
}

pub fn header(metrics: &[Metric]) -> Vec<String> {
    metrics.iter().flat_map(Metric::columns).collect()
}

/// Scattering sets and protocol outcome of one parameter point, computed on
/// demand.
struct PointState<'a> {
    params: &'a Params,
    protocol: Option<Option<ProtocolResult>>,
    sets: [Option<ScatteringSet>; 4],
    arm: Option<ArmSpectrumPoint>,
}

impl PointState<'_> {
    fn protocol(&mut self) -> Result<Option<&ProtocolResult>> {
        if self.protocol.is_none() {
            let cfg = self.params.network()?;
            let outcome = match run_protocol(&cfg, &self.params.protocol()?) {
                Ok(r) => Some(r),
                Err(Error::NoDetectionProbability { .. } | Error::MatchingUndefined) => None,
                Err(e) => return Err(e.into()),
            };
            self.protocol = Some(outcome);
        }
        Ok(self.protocol.as_ref().and_then(|p| p.as_ref()))
    }

    fn scattering(&mut self, branch: BranchLabel) -> Result<&ScatteringSet> {
        let i = branch.index();
        if self.sets[i].is_none() {
            let from_protocol = match &self.protocol {
                Some(Some(r)) => Some(r.scattering[i].clone()),
                _ => None,
            };
            let set = match from_protocol {
                Some(s) => s,
                None => {
                    let net = build_network(&self.params.network()?)?;
                    solve_scattering(&net, branch, self.params.point_dw()?)?
                }
            };
            self.sets[i] = Some(set);
        }
        Ok(self.sets[i].as_ref().unwrap())
    }

    fn arm(&mut self) -> Result<ArmSpectrumPoint> {
        if self.arm.is_none() {
            let p = self.params;
            let arm = ArmConfig {
                n: p.n_or(1),
                g_np: p.g_np,
                g_inout: p.g_inout,
                gamma0: p.gamma0,
                qd: p.arm_qd()?,
            };
            self.arm = Some(arm_spectrum(&arm, &[p.point_dw()?])?[0]);
        }
        Ok(self.arm.unwrap())
    }

    fn amplitude(&mut self, a: &Amplitude) -> Result<Complex64> {
        let s = self.scattering(a.branch)?;
        match a.to {
            Target::Port(p) => Ok(s.t(a.from, p)),
            Target::Bath(k) => s.bath(a.from).get(k - 1).copied().ok_or_else(|| {
                CliError::usage(format!("bath b{k} does not exist in a network with {} nodes", s.bath(a.from).len()))
            }),
        }
    }
}

/// Values of `metrics` at one parameter point, flattened as in [`header`].
pub fn evaluate(params: &Params, metrics: &[Metric]) -> Result<Vec<f64>> {
    let mut st = PointState {
        params,
        protocol: None,
        sets: Default::default(),
        arm: None,
    };
    if metrics.iter().any(Metric::needs_protocol) {
        st.protocol()?;
    }
    if metrics.iter().any(Metric::needs_arm) {
        st.arm()?;
    }

    let mut row = Vec::new();
    for m in metrics {
        let proto = st.protocol.as_ref().and_then(|p| p.as_ref());
        match m {
            Metric::Fidelity => row.push(proto.map_or(f64::NAN, |r| r.fidelity)),
            Metric::Efficiency => row.push(proto.map_or(f64::NAN, |r| r.efficiency)),
            Metric::ConcurrenceLb => row.push(proto.map_or(f64::NAN, |r| r.concurrence_lb)),
            Metric::Beta => {
                let b = proto.map_or(Complex64::new(f64::NAN, f64::NAN), |r| r.beta);
                row.extend([b.re, b.im]);
            }
            Metric::Rho(p, q) => {
                let v = proto.map_or(Complex64::new(f64::NAN, f64::NAN), |r| r.rho.entry(*p, *q));
                row.extend([v.re, v.im]);
            }
            Metric::T(a) => {
                let t = st.amplitude(a)?;
                row.extend([t.re, t.im]);
            }
            Metric::Abs2T(a) => row.push(st.amplitude(a)?.norm_sqr()),
            Metric::ArmT => row.push(st.arm()?.transmission),
            Metric::ArmR => row.push(st.arm()?.reflection),
            Metric::ArmA => row.push(st.arm()?.absorption),
            Metric::ArmLoss => row.push(st.arm()?.dipole_loss),
            Metric::Purcell => {
                let qd = params.arm_qd()?;
                let j = if qd.coupled { qd.j } else { 0.0 };
                row.push(match purcell_factor(j, qd.gamma, params.g_inout, params.gamma0) {
                    Ok(f) => f,
                    Err(Error::InfinitePurcell) => f64::INFINITY,
                    Err(e) => return Err(e.into()),
                });
            }
        }
    }
    Ok(row)
}
