//! Run parameters, `key = value` config files and their mapping onto the
//! simulator's types.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use dirnet::entangle::{InitAmplitudes, ProtocolParams};
use dirnet::model::{NetworkConfig, QdConfig, QubitState};
use dirnet::Complex64;

use crate::error::{CliError, Result};
use crate::range::Range;

/// Parameters that may be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    GInout,
    Gamma0,
    N,
    Delta0,
    Ddelta,
    Kappa,
    Dw,
    J,
    GammaQd,
}

impl SweepParam {
    pub const ALL: [SweepParam; 10] = [
        Self::Alpha,
        Self::GInout,
        Self::Gamma0,
        Self::N,
        Self::Delta0,
        Self::Ddelta,
        Self::Kappa,
        Self::Dw,
        Self::J,
        Self::GammaQd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::GInout => "g_inout",
            Self::Gamma0 => "gamma0",
            Self::N => "n",
            Self::Delta0 => "delta0",
            Self::Ddelta => "ddelta",
            Self::Kappa => "kappa",
            Self::Dw => "dw",
            Self::J => "j",
            Self::GammaQd => "gamma_qd",
        }
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|p| p.as_str()).collect();
                CliError::usage(format!("unknown sweep parameter '{s}' (one of {})", names.join(", ")))
            })
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a command needs, defaulting to the reference parameter set
/// `g_inout = 0.5, Gamma0 = 0.1, J = 0.3, gamma = 0.001`.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Particles per arm; commands pick their own default when unset.
    pub n: Option<usize>,
    pub g_np: f64,
    pub g_inout: f64,
    pub gamma0: f64,
    pub j: f64,
    pub gamma_qd: f64,
    pub delta0: f64,
    pub ddelta: f64,
    pub alpha: Complex64,
    pub kappa: f64,
    /// `c_g1, c_m1, c_g2, c_m2`.
    pub init: [f64; 4],
    pub insertion: f64,
    pub dw: Option<Range>,
    pub qd1: QubitState,
    pub qd2: QubitState,
    pub omega0: Option<f64>,
    pub n_bar: Option<f64>,
    pub dtau: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            n: None,
            g_np: 1.0,
            g_inout: 0.5,
            gamma0: 0.1,
            j: 0.3,
            gamma_qd: 0.001,
            delta0: 0.0,
            ddelta: 0.0,
            alpha: Complex64::from(0.5),
            kappa: 1.0,
            init: [h, h, h, h],
            insertion: 1.0,
            dw: None,
            qd1: QubitState::G,
            qd2: QubitState::G,
            omega0: None,
            n_bar: None,
            dtau: None,
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{key}: '{value}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn count(value: f64) -> Result<usize> {
    let r = value.round();
    if (value - r).abs() > 1e-9 || r < 0.0 {
        return Err(CliError::usage(format!("n must be a non-negative integer, got {value}")));
    }
    Ok(r as usize)
}

/// `re,im` or a bare real magnitude.
pub fn parse_complex(value: &str) -> Result<Complex64> {
    match value.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(number("alpha", re)?, number("alpha", im)?)),
        None => Ok(Complex64::from(number("alpha", value)?)),
    }
}

fn parse_state(key: &str, value: &str) -> Result<QubitState> {
    match value.trim() {
        "g" => Ok(QubitState::G),
        "m" => Ok(QubitState::M),
        other => Err(CliError::usage(format!("{key}: expected g or m, got '{other}'"))),
    }
}

impl Params {
    /// Applies one `key = value` setting. Keys use underscores or hyphens.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "n" => self.n = Some(count(number("n", value)?)?),
            "g_np" => self.g_np = number(&key, value)?,
            "g_inout" => self.g_inout = number(&key, value)?,
            "gamma0" => self.gamma0 = number(&key, value)?,
            "j" => self.j = number(&key, value)?,
            "gamma_qd" => self.gamma_qd = number(&key, value)?,
            "delta0" => self.delta0 = number(&key, value)?,
            "ddelta" => self.ddelta = number(&key, value)?,
            "alpha" => self.alpha = parse_complex(value)?,
            "kappa" => self.kappa = number(&key, value)?,
            "insertion" => self.insertion = number(&key, value)?,
            "init" => {
                let parts = value
                    .split(',')
                    .map(|p| number("init", p))
                    .collect::<Result<Vec<_>>>()?;
                self.init = parts.try_into().map_err(|_| {
                    CliError::usage("init: expected four values c_g1,c_m1,c_g2,c_m2")
                })?;
            }
            "dw" => self.dw = Some(value.parse()?),
            "qd1" => self.qd1 = parse_state(&key, value)?,
            "qd2" => self.qd2 = parse_state(&key, value)?,
            "omega0" => self.omega0 = Some(number(&key, value)?),
            "n_bar" => self.n_bar = Some(number(&key, value)?),
            "dtau" => self.dtau = Some(number(&key, value)?),
            _ => return Err(CliError::usage(format!("unknown parameter '{key}'"))),
        }
        Ok(())
    }

    /// Sets a swept parameter. Sweeping `alpha` keeps its phase.
    pub fn set_swept(&mut self, param: SweepParam, v: f64) -> Result<()> {
        match param {
            SweepParam::Alpha => {
                let phase = if self.alpha.norm() > 0.0 { self.alpha.arg() } else { 0.0 };
                self.alpha = Complex64::from_polar(v, phase);
            }
            SweepParam::GInout => self.g_inout = v,
            SweepParam::Gamma0 => self.gamma0 = v,
            SweepParam::N => self.n = Some(count(v)?),
            SweepParam::Delta0 => self.delta0 = v,
            SweepParam::Ddelta => self.ddelta = v,
            SweepParam::Kappa => self.kappa = v,
            SweepParam::Dw => self.dw = Some(Range::point(v)),
            SweepParam::J => self.j = v,
            SweepParam::GammaQd => self.gamma_qd = v,
        }
        Ok(())
    }

    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        self.apply_text(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", i + 1)))?;
            self.set(key, value)
                .map_err(|e| CliError::usage(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    fn qd(&self, delta: f64, state: QubitState) -> Result<QdConfig> {
        let qd = QdConfig::new(self.j, self.gamma_qd, delta)?;
        Ok(match state {
            QubitState::G => qd,
            QubitState::M => qd.decoupled(),
        })
    }

    /// Dot 1 as seen by a single arm, honouring `qd1`.
    pub fn arm_qd(&self) -> Result<QdConfig> {
        self.qd(self.delta0 + self.ddelta, self.qd1)
    }

    /// Two-arm network with `delta_1,2 = delta0 +- ddelta`. Both dots are
    /// coupled here; branches decide which of them take part.
    pub fn network(&self) -> Result<NetworkConfig> {
        let cfg = NetworkConfig {
            n: self.n_or(2),
            g_np: self.g_np,
            g_inout: self.g_inout,
            gamma0: self.gamma0,
            qd1: QdConfig::new(self.j, self.gamma_qd, 0.0)?,
            qd2: QdConfig::new(self.j, self.gamma_qd, 0.0)?,
            omega0_over_gnp: self.omega0,
        }
        .with_detunings(self.delta0, self.ddelta);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Probe detuning for single-point commands.
    pub fn point_dw(&self) -> Result<f64> {
        match self.dw {
            None => Ok(0.0),
            Some(r) if r.is_point() => Ok(r.start),
            Some(r) => Err(CliError::usage(format!(
                "dw = {r} is a range; sweep it with --axis dw=... instead"
            ))),
        }
    }

    pub fn protocol(&self) -> Result<ProtocolParams> {
        let [g1, m1, g2, m2] = self.init.map(Complex64::from);
        Ok(ProtocolParams {
            alpha: self.alpha,
            init: InitAmplitudes::new(g1, m1, g2, m2)?,
            kappa: self.kappa,
            dw: self.point_dw()?,
            insertion: self.insertion,
        })
    }
}
