//! Subcommand bodies. Each returns whether the run ended with a validity
//! warning; errors bubble up to the exit-code mapping in `lib.rs`.

use std::io::Write;
use std::path::Path;

use dirnet::dir::{arm_spectrum, purcell_factor, ArmConfig};
use dirnet::entangle::run_protocol;
use dirnet::model::{build_network, BranchLabel, Port};
use dirnet::scattering::solve_scattering;
use dirnet::validity::{weak_coupling_check, weak_excitation_margin, CheckStatus};
use dirnet::Error;

use crate::config::{Params, SweepParam};
use crate::error::{CliError, Result};
use crate::metrics::{evaluate, header, parse_metrics, Amplitude, Metric, Target};
use crate::output::{fmt, write_csv};
use crate::range::{Axis, Range};
use crate::sweep::run_sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Warn,
}

fn default_spectrum_grid() -> Range {
    Range {
        start: -3.0,
        stop: 3.0,
        steps: 601,
    }
}

pub fn spectrum(
    params: &Params,
    all_branches: bool,
    both_sources: bool,
    amplitudes: bool,
    out: Option<&Path>,
) -> Result<Status> {
    let branches = if all_branches {
        BranchLabel::ALL.to_vec()
    } else {
        vec![BranchLabel::from_states(params.qd1, params.qd2)]
    };
    let sources: &[Port] = if both_sources {
        &[Port::Source1, Port::Source2]
    } else {
        &[Port::Source1]
    };
    let mut metrics = Vec::new();
    for &branch in &branches {
        for &from in sources {
            for to in Port::ALL {
                let a = Amplitude {
                    from,
                    to: Target::Port(to),
                    branch,
                };
                metrics.push(Metric::Abs2T(a));
                if amplitudes {
                    metrics.push(Metric::T(a));
                }
            }
        }
    }
    let axis = Axis {
        param: SweepParam::Dw,
        range: params.dw.unwrap_or_else(default_spectrum_grid),
    };
    let (cols, rows) = run_sweep(params, &[axis], &metrics)?;
    write_csv(out, &cols, &rows)?;
    Ok(Status::Ok)
}

pub fn dir(params: &Params, out: Option<&Path>) -> Result<Status> {
    let arm = ArmConfig {
        n: params.n_or(1),
        g_np: params.g_np,
        g_inout: params.g_inout,
        gamma0: params.gamma0,
        qd: params.arm_qd()?,
    };
    let grid = params.dw.unwrap_or_else(default_spectrum_grid).points();
    let rows: Vec<Vec<f64>> = arm_spectrum(&arm, &grid)?
        .into_iter()
        .map(|p| vec![p.dw, p.transmission, p.reflection, p.absorption, p.dipole_loss])
        .collect();
    let cols = ["dw", "transmission", "reflection", "absorption", "dipole_loss"].map(String::from);
    write_csv(out, &cols, &rows)?;
    Ok(Status::Ok)
}

/// Columns of the single-run entangle report.
pub fn report_metrics() -> Vec<Metric> {
    let mut m = vec![Metric::Fidelity, Metric::Efficiency, Metric::ConcurrenceLb, Metric::Beta];
    for p in 1..=4 {
        for q in 1..=4 {
            m.push(Metric::Rho(p, q));
        }
    }
    m
}

fn explain(e: Error) -> CliError {
    match e {
        Error::NoDetectionProbability { eta } => CliError::usage(format!(
            "no detection probability at drain 1 (eta = {eta:e}): no branch with weight in the \
             initial state sends light to drain 1. Check --alpha, --kappa and --init."
        )),
        Error::MatchingUndefined => CliError::usage(
            "matching condition undefined: source 2 does not reach drain 1 in the |mm> branch",
        ),
        e => e.into(),
    }
}

pub fn entangle(
    params: &Params,
    sweep: &[String],
    metric_names: &[String],
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Status> {
    if !sweep.is_empty() {
        let axes = sweep.iter().map(|s| s.parse()).collect::<Result<Vec<Axis>>>()?;
        let metrics = if metric_names.is_empty() {
            vec![Metric::Fidelity, Metric::Efficiency, Metric::ConcurrenceLb, Metric::Beta]
        } else {
            parse_metrics(metric_names)?
        };
        let (cols, rows) = run_sweep(params, &axes, &metrics)?;
        write_csv(out, &cols, &rows)?;
        return Ok(Status::Ok);
    }
    if !metric_names.is_empty() {
        return Err(CliError::usage("--metrics only applies together with --sweep"));
    }

    let res = run_protocol(&params.network()?, &params.protocol()?).map_err(explain)?;
    let metrics = report_metrics();
    let cols = header(&metrics);
    let row = evaluate(params, &metrics)?;
    let io = |e| CliError::io("writing report", e);
    writeln!(stdout, "alpha_re = {}", fmt(res.alpha.re)).map_err(io)?;
    writeln!(stdout, "alpha_im = {}", fmt(res.alpha.im)).map_err(io)?;
    for (c, v) in cols.iter().zip(&row) {
        writeln!(stdout, "{c} = {}", fmt(*v)).map_err(io)?;
    }
    if let Some(path) = out {
        write_csv(Some(path), &cols, &[row])?;
    }
    Ok(Status::Ok)
}

pub fn sweep(params: &Params, axes: &[String], metric_names: &[String], out: Option<&Path>) -> Result<Status> {
    let axes = axes.iter().map(|s| s.parse()).collect::<Result<Vec<Axis>>>()?;
    let metrics = if metric_names.is_empty() {
        vec![Metric::Fidelity, Metric::Efficiency]
    } else {
        parse_metrics(metric_names)?
    };
    let (cols, rows) = run_sweep(params, &axes, &metrics)?;
    write_csv(out, &cols, &rows)?;
    Ok(Status::Ok)
}

fn excitation_line(
    label: &str,
    j: f64,
    params: &Params,
    delta: f64,
    n_bar: f64,
    threshold: f64,
) -> (String, bool) {
    let Some(dtau) = params.dtau else {
        return (format!("weak excitation ({label}): unchecked (no --dtau)"), false);
    };
    match weak_excitation_margin(j, params.g_inout, params.gamma0, delta, n_bar, dtau) {
        Ok(ratio) => {
            let ok = ratio >= threshold;
            let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
            (
                format!(
                    "weak excitation ({label}): {} ratio = {} (n_bar = {}, dtau = {}, threshold {})",
                    status.as_str(),
                    fmt(ratio),
                    fmt(n_bar),
                    fmt(dtau),
                    threshold
                ),
                !ok,
            )
        }
        Err(e) => (format!("weak excitation ({label}): unchecked ({e})"), false),
    }
}

pub fn validate(params: &Params, threshold: f64, stdout: &mut dyn Write) -> Result<Status> {
    let cfg = params.network()?;
    let mut lines = Vec::new();
    let mut warn = false;

    let report = weak_coupling_check(&cfg);
    match params.omega0 {
        Some(w0) => lines.push(format!(
            "weak coupling: {} (omega0 / g_np = {})",
            report.status.as_str(),
            fmt(w0)
        )),
        None => lines.push("weak coupling: unchecked (no --omega0)".into()),
    }
    for c in &report.checks {
        lines.push(format!(
            "  {:<8} {} x omega0, margin {} [{}]",
            c.name,
            fmt(c.value_over_omega0),
            fmt(c.margin),
            c.status.as_str()
        ));
    }
    warn |= matches!(report.status, CheckStatus::Fail | CheckStatus::AtBound);

    // Source 2 carries the matched amplitude; its photon number scales with |beta / alpha|^2.
    let alpha = params.alpha * params.insertion;
    let n1 = params.n_bar.unwrap_or(alpha.norm_sqr());
    let (l1, w1) = excitation_line("source 1", cfg.qd1.j, params, cfg.qd1.delta, n1, threshold);
    lines.push(l1);
    warn |= w1;

    let net = build_network(&cfg)?;
    let mm = solve_scattering(&net, BranchLabel::MM, params.point_dw()?)?;
    let t2 = mm.t(Port::Source2, Port::Drain1);
    if t2.norm() > 0.0 {
        let ratio = (mm.t(Port::Source1, Port::Drain1) / t2).norm_sqr();
        let n2 = n1 * ratio;
        let (l2, w2) = excitation_line("source 2", cfg.qd2.j, params, cfg.qd2.delta, n2, threshold);
        lines.push(l2);
        warn |= w2;
    } else {
        lines.push("weak excitation (source 2): unchecked (matching undefined)".into());
    }

    match purcell_factor(cfg.qd1.j, cfg.qd1.gamma, cfg.g_inout, cfg.gamma0) {
        Ok(fp) => lines.push(format!("purcell factor: {}", fmt(fp))),
        Err(e) => lines.push(format!("purcell factor: {e}")),
    }
    lines.push(format!("overall: {}", if warn { "warn" } else { "ok" }));

    for l in lines {
        writeln!(stdout, "{l}").map_err(|e| CliError::io("writing report", e))?;
    }
    Ok(if warn { Status::Warn } else { Status::Ok })
}
