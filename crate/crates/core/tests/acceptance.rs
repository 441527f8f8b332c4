//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any of them fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use dirnet::dir::{purcell_factor, resonant_amplitudes_via_purcell, single_site_closed_form};
use dirnet::entangle::{postselected_state, run_protocol, InitAmplitudes, ProtocolParams};
use dirnet::model::{build_arm_network, build_network, BranchLabel, NetworkConfig, Port, QdConfig};
use dirnet::scattering::{
    node_amplitudes, solve_scattering, steady_state_oracle, OracleOptions,
};
use dirnet::{linspace, Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn fig2(n: usize) -> NetworkConfig {
    NetworkConfig {
        n,
        ..Default::default()
    }
}

fn protocol(cfg: &NetworkConfig, alpha: f64) -> dirnet::Result<dirnet::entangle::ProtocolResult> {
    run_protocol(
        cfg,
        &ProtocolParams {
            alpha: Complex64::from(alpha),
            ..Default::default()
        },
    )
}

/// Single-site amplitudes written out directly, independent of the library.
fn literal_single_site(g: f64, g0: f64, j: f64, gamma: f64, delta: f64, dw: f64) -> [Complex64; 3] {
    let i = Complex64::i();
    let d = gamma / 2.0 + i * (delta - dw);
    let den = j * j + d * (g + g0 / 2.0 - i * dw);
    [
        g * d / den,
        -(j * j + d * (g0 / 2.0 - i * dw)) / den,
        (g * g0).sqrt() * d / den,
    ]
}

fn closed_form_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = rng.gen_range(0.05..3.0);
        let g0 = rng.gen_range(0.0..1.0);
        let j = rng.gen_range(0.0..1.0);
        let gamma = rng.gen_range(1e-4..0.5);
        let delta = rng.gen_range(-1.0..1.0);
        let dw = rng.gen_range(-3.0..3.0);
        let qd = QdConfig::new(j, gamma, delta).map_err(err)?;
        let arm = build_arm_network(1, 1.0, g, g0, qd).map_err(err)?;
        let s = solve_scattering(&arm, BranchLabel::GG, dw).map_err(err)?;
        let solver = [
            s.t(Port::Source1, Port::Drain1),
            s.t(Port::Source1, Port::Source1),
            s.bath(Port::Source1)[0],
        ];
        let closed = single_site_closed_form(g, g0, &qd, dw).map_err(err)?;
        let expect = literal_single_site(g, g0, j, gamma, delta, dw);
        for (k, e) in expect.iter().enumerate() {
            let lib = [closed.0, closed.1, closed.2][k];
            worst = worst.max((solver[k] - e).norm()).max((lib - e).norm());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 draws, max deviation {worst:.1e}"))
}

fn dir_limit() -> Outcome {
    let (_, r, _) = resonant_amplitudes_via_purcell(0.3, 0.001, 0.5, 0.1).map_err(err)?;
    let mut out = Vec::new();
    for n in [2, 3] {
        let net = build_network(&fig2(n)).map_err(err)?;
        for b in [BranchLabel::GG, BranchLabel::GM] {
            let refl = solve_scattering(&net, b, 0.0)
                .map_err(err)?
                .t(Port::Source1, Port::Source1)
                .norm_sqr();
            ensure(refl >= 0.99, || format!("n={n} {b}: |t_s1s1|^2 = {refl}"))?;
            out.push(refl);
        }
    }
    let lo = out.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("min |t_s1s1|^2 = {lo:.6} (single-site estimate {:.6})", r * r))
}

fn beam_splitter_identities() -> Outcome {
    let (mut dev, mut cross) = (0.0f64, 0.0f64);
    for n in 2..=6 {
        let net = build_network(&fig2(n)).map_err(err)?;
        for b in BranchLabel::ALL {
            let s = solve_scattering(&net, b, 0.0).map_err(err)?;
            let d1 = s.t(Port::Source1, Port::Drain1).norm_sqr();
            let d2 = s.t(Port::Source1, Port::Drain2).norm_sqr();
            dev = dev.max((d1 - d2).abs());
            cross = cross.max(s.t(Port::Source1, Port::Source2).norm_sqr());
        }
    }
    ensure(dev <= 1e-10, || format!("drain imbalance {dev:e}"))?;
    ensure(cross < 1e-20, || format!("|t_s1s2|^2 = {cross:e}"))?;
    Ok(format!("imbalance {dev:.1e}, |t_s1s2|^2 {cross:.1e}"))
}

fn flux_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut cfg = NetworkConfig {
            n: rng.gen_range(2..=8),
            g_inout: rng.gen_range(0.05..3.0),
            gamma0: rng.gen_range(0.0..1.0),
            ..Default::default()
        };
        cfg.qd1 = QdConfig::new(rng.gen_range(0.0..1.0), 0.0, rng.gen_range(-1.0..1.0)).map_err(err)?;
        cfg.qd2 = QdConfig::new(rng.gen_range(0.0..1.0), 0.0, rng.gen_range(-1.0..1.0)).map_err(err)?;
        let net = build_network(&cfg).map_err(err)?;
        let dw = rng.gen_range(-3.0..3.0);
        for b in BranchLabel::ALL {
            let s = solve_scattering(&net, b, dw).map_err(err)?;
            for r in &s.responses {
                worst = worst.max((r.output_flux() - 1.0).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max |sum - 1| = {worst:e}"))?;
    Ok(format!("100 draws, max |sum |t|^2 - 1| = {worst:.1e}"))
}

fn matched_beta() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut dev, mut leak) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let qd = QdConfig::new(rng.gen_range(0.05..1.0), rng.gen_range(1e-4..0.1), rng.gen_range(-0.5..0.5))
            .map_err(err)?;
        let sym = NetworkConfig {
            n: rng.gen_range(2..=10),
            g_inout: rng.gen_range(0.05..3.0),
            gamma0: rng.gen_range(0.0..1.0),
            qd1: qd,
            qd2: qd,
            ..Default::default()
        };
        let alpha = Complex64::from_polar(rng.gen_range(0.01..3.0), rng.gen_range(-3.0..3.0));
        let params = ProtocolParams {
            alpha,
            ..Default::default()
        };
        let res = run_protocol(&sym, &params).map_err(err)?;
        dev = dev.max((res.beta / res.alpha - Complex64::i()).norm());
        leak = leak.max(res.outputs[BranchLabel::MM.index()].mu[0].norm());

        let asym = sym.with_detunings(rng.gen_range(-0.3..0.3), rng.gen_range(0.01..0.3));
        let res = run_protocol(&asym, &params).map_err(err)?;
        leak = leak.max(res.outputs[BranchLabel::MM.index()].mu[0].norm());
    }
    ensure(dev <= 1e-10, || format!("|beta/alpha - i| = {dev:e}"))?;
    ensure(leak < 1e-13, || format!("|mu1^mm| = {leak:e}"))?;
    Ok(format!("|beta/alpha - i| <= {dev:.1e}, |mu1^mm| <= {leak:.1e}"))
}

fn fig3_asymptotes() -> Outcome {
    let cfg = fig2(2);
    let weak = protocol(&cfg, 0.01).map_err(err)?;
    let strong = protocol(&cfg, 10.0).map_err(err)?;
    ensure(weak.fidelity >= 0.99, || format!("F(0.01) = {}", weak.fidelity))?;
    ensure((strong.fidelity - 0.5).abs() <= 0.02, || format!("F(10) = {}", strong.fidelity))?;
    ensure((strong.efficiency - 0.5).abs() <= 0.02, || format!("eta(10) = {}", strong.efficiency))?;
    Ok(format!(
        "F(0.01) = {:.6}, F(10) = {:.6}, eta(10) = {:.6}",
        weak.fidelity, strong.fidelity, strong.efficiency
    ))
}

fn literal_entry_reduction() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for alpha in [0.1, 0.5, 2.0] {
            let res = protocol(&fig2(n), alpha).map_err(err)?;
            for p in [2, 3] {
                worst = worst.max((res.rho.entry(p, p) - 0.5).norm());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max |rho_pp - 1/2| = {worst:e}"))?;
    Ok(format!("max |rho_22,33 - 1/2| = {worst:.1e}"))
}

fn loss_robustness() -> Outcome {
    let (mut f, mut eta) = (Vec::new(), Vec::new());
    for g0 in linspace(0.01, 1.0, 100) {
        let cfg = NetworkConfig {
            gamma0: g0,
            ..fig2(2)
        };
        let res = protocol(&cfg, 0.5).map_err(err)?;
        f.push(res.fidelity);
        eta.push(res.efficiency);
    }
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (flo, fhi) = span(&f);
    let (elo, ehi) = span(&eta);
    ensure(fhi - flo <= 0.1, || format!("F spread {}", fhi - flo))?;
    ensure(ehi >= 2.0 * elo, || format!("eta ratio {}", ehi / elo))?;
    Ok(format!("F spread {:.4}, eta ratio {:.2}", fhi - flo, ehi / elo))
}

fn length_robustness() -> Outcome {
    let grid = linspace(0.05, 3.0, 60);
    let mut lowest = f64::INFINITY;
    for n in 2..=20 {
        let mut best: Option<(f64, f64, f64)> = None;
        for &g in &grid {
            let cfg = NetworkConfig {
                g_inout: g,
                ..fig2(n)
            };
            let res = protocol(&cfg, 0.5).map_err(err)?;
            if best.map_or(true, |(_, e, _)| res.efficiency > e) {
                best = Some((g, res.efficiency, res.fidelity));
            }
        }
        let (g, _, f) = best.unwrap();
        ensure(f >= 0.8, || format!("n={n}: F = {f} at g_inout = {g}"))?;
        lowest = lowest.min(f);
    }
    Ok(format!("n = 2..20, lowest F at optimal eta = {lowest:.4}"))
}

fn detuning_symmetry() -> Outcome {
    let mut asym = 0.0f64;
    for n in [2, 3] {
        for d0 in linspace(-0.2, 0.2, 9) {
            for dd in linspace(0.01, 0.2, 5) {
                let f = |d0: f64, dd: f64| -> dirnet::Result<f64> {
                    Ok(protocol(&fig2(n).with_detunings(d0, dd), 0.5)?.fidelity)
                };
                let base = f(d0, dd).map_err(err)?;
                asym = asym.max((base - f(d0, -dd).map_err(err)?).abs());
                asym = asym.max((base - f(-d0, dd).map_err(err)?).abs());
            }
        }
        let line_b = linspace(0.0, 0.2, 21)
            .into_iter()
            .map(|d0| protocol(&fig2(n).with_detunings(d0, 0.0), 0.5).map(|r| r.fidelity))
            .collect::<dirnet::Result<Vec<_>>>()
            .map_err(err)?;
        ensure(line_b.windows(2).all(|w| w[1] > w[0]), || {
            format!("n={n}: line B not increasing {line_b:?}")
        })?;
    }
    ensure(asym <= 1e-9, || format!("max |F(d0,dd) - F(d0,-dd)| = {asym:e}"))?;
    Ok(format!("max asymmetry {asym:.1e}, line B increasing for n = 2, 3"))
}

fn detector_monotonicity() -> Outcome {
    let mut configs = Vec::new();
    for n in [2, 3, 6] {
        configs.push((fig2(n), 0.5));
        configs.push((fig2(n).with_detunings(0.05, 0.03), 1.5));
    }
    for (cfg, alpha) in configs {
        let res = protocol(&cfg, alpha).map_err(err)?;
        let init = InitAmplitudes::equal_superposition();
        let eta = linspace(0.0, 1.0, 21)
            .into_iter()
            .map(|k| match postselected_state(&res.outputs, &init, k) {
                Ok((_, e)) => Ok(e),
                Err(Error::NoDetectionProbability { eta }) => Ok(eta),
                Err(e) => Err(e),
            })
            .collect::<dirnet::Result<Vec<_>>>()
            .map_err(err)?;
        ensure(eta.windows(2).all(|w| w[1] >= w[0]), || {
            format!("n={}: eta not monotone {eta:?}", cfg.n)
        })?;
    }
    Ok("eta nondecreasing on 21-point kappa grids for 6 configurations".into())
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=6 {
        let net = build_network(&fig2(n)).map_err(err)?;
        for b in BranchLabel::ALL {
            for dw in [-1.0, 0.0, 0.7] {
                let fd = node_amplitudes(&net, b, dw).map_err(err)?;
                let td = steady_state_oracle(&net, b, dw, OracleOptions::default()).map_err(err)?;
                for ((_, x), (_, y)) in fd.iter().zip(&td) {
                    worst = worst.max((x - y).norm() / x.norm());
                }
            }
        }
    }
    ensure(worst <= 1e-8, || format!("max relative deviation {worst:e}"))?;
    Ok(format!("60 cases, max relative deviation {worst:.1e}"))
}

fn purcell_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (j, gamma) = (rng.gen_range(0.0..1.0), rng.gen_range(1e-4..0.5));
        let (g, g0) = (rng.gen_range(0.05..3.0), rng.gen_range(0.0..1.0));
        let qd = QdConfig::new(j, gamma, 0.0).map_err(err)?;
        let (t, r, b) = single_site_closed_form(g, g0, &qd, 0.0).map_err(err)?;
        let (tp, rp, bp) = resonant_amplitudes_via_purcell(j, gamma, g, g0).map_err(err)?;
        worst = worst
            .max((t - tp).norm())
            .max((r - rp).norm())
            .max((b - bp).norm());
    }
    ensure(worst <= 1e-12, || format!("Purcell vs closed form {worst:e}"))?;

    let fp = purcell_factor(0.3, 0.001, 0.5, 0.1).map_err(err)?;
    let grid = dirnet::dir::default_dw_grid();
    let step = grid[1] - grid[0];
    for delta in [0.0, 0.2] {
        let arm = dirnet::dir::ArmConfig {
            qd: QdConfig::new(0.3, 0.001, delta).map_err(err)?,
            ..Default::default()
        };
        let pts = dirnet::dir::arm_spectrum(&arm, &grid).map_err(err)?;
        let peak = pts
            .iter()
            .max_by(|a, b| a.reflection.total_cmp(&b.reflection))
            .unwrap();
        ensure((peak.dw - delta).abs() <= step, || {
            format!("delta={delta}: reflection peak at {}", peak.dw)
        })?;
    }
    Ok(format!("deviation {worst:.1e}; reflection peaks at delta (F_p = {fp:.2})"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("closed-form oracle", closed_form_oracle),
        ("DIR limit", dir_limit),
        ("beam-splitter identities", beam_splitter_identities),
        ("flux conservation", flux_conservation),
        ("matched beta", matched_beta),
        ("weak/strong input asymptotes", fig3_asymptotes),
        ("density-matrix entry reduction", literal_entry_reduction),
        ("loss robustness", loss_robustness),
        ("length robustness", length_robustness),
        ("detuning symmetry and line B", detuning_symmetry),
        ("detector monotonicity", detector_monotonicity),
        ("oracle equivalence", oracle_equivalence),
        ("Purcell consistency", purcell_consistency),
    ];
    let mut failed = 0;
    for (id, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", id + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", id + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
