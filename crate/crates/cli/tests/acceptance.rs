//! Acceptance gate: every stated criterion runs at its stated tolerance and
//! prints one pass/fail line, then the test asserts that all of them passed.
//!
//! The criteria run sequentially inside a single test so the per-criterion
//! runtime budgets are measured without contention from sibling tests.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hst_core::bernstein::{
    catalog, transform_identity_residual, verify_levy_khintchine, ExponentKind, ExponentSpec,
};
use hst_core::halfspace::HPoint;
use hst_core::kernels::{
    green_radial, jump_density_radial, verify_green_asymptotics, verify_green_mass_ratio,
    verify_j_asymptotics, QuadratureConfig,
};
use hst_core::montecarlo::{dichotomy_experiment, sample_subordinator_increment, McConfig};
use hst_core::special::log_grid;
use hst_core::thinness::{
    burdzy_integral, minimal_thinness_verdict, thorn_criterion_brownian, thorn_criterion_stable,
    IntegralVerdict, ProfileSpec, SetKind, SetSpec, VerdictStatus,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Frozen regression baselines for the dichotomy experiment (seed 42,
/// n = 10^4, dt = 0.002, heights 0.4/0.2/0.1). Captured on first run;
/// the estimator is bit-deterministic so equality is exact.
const DICHOTOMY_THIN_BASELINE: [f64; 3] =
    [0.3289701460520296, 0.2353530310402599, 0.19084119323077672];
const DICHOTOMY_NONTHIN_BASELINE: [f64; 3] =
    [0.7173724228875469, 0.7722656945125386, 1.0969343224151369];

struct Outcome {
    line: String,
    pass: bool,
}

fn check(
    outcomes: &mut Vec<Outcome>,
    label: &str,
    budget: Option<Duration>,
    body: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = budget {
        if elapsed > budget {
            pass = false;
            detail = format!("{detail}; runtime exceeded the {}s budget", budget.as_secs());
        }
    }
    let line = format!(
        "criterion {:02} {label}: {} ({detail}) [{:.2}s]",
        outcomes.len() + 1,
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    println!("{line}");
    outcomes.push(Outcome { line, pass });
}

fn core<T>(r: hst_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn stable(alpha: f64, d: usize) -> Result<ExponentSpec, String> {
    core(ExponentSpec::new(ExponentKind::Stable { alpha }, d))
}

fn graph_set(profile: ProfileSpec, lipschitz_a: f64, d: usize) -> Result<SetSpec, String> {
    core(SetSpec::new(
        SetKind::LipschitzGraph { profile, lipschitz_a },
        d,
    ))
}

fn converged_value(v: &IntegralVerdict, what: &str) -> Result<f64, String> {
    if v.status != VerdictStatus::Converges {
        return Err(format!("{what}: expected Converges, got {}", v.status.as_str()));
    }
    v.value.ok_or_else(|| format!("{what}: Converges without a value"))
}

fn require_diverges(v: &IntegralVerdict, what: &str) -> Result<(), String> {
    if v.status != VerdictStatus::Diverges {
        return Err(format!("{what}: expected Diverges, got {}", v.status.as_str()));
    }
    Ok(())
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();

    check(
        &mut outcomes,
        "transform identities",
        Some(Duration::from_secs(10)),
        criterion_transform_identities,
    );
    check(
        &mut outcomes,
        "stable exact scalings",
        Some(Duration::from_secs(5)),
        criterion_stable_scalings,
    );
    check(&mut outcomes, "riesz cross-check", None, criterion_riesz);
    check(
        &mut outcomes,
        "asymptotics sweeps",
        Some(Duration::from_secs(30)),
        criterion_asymptotics_sweeps,
    );
    check(
        &mut outcomes,
        "graph criterion values",
        Some(Duration::from_secs(5)),
        criterion_graph_values,
    );
    check(
        &mut outcomes,
        "process independence",
        Some(Duration::from_secs(5)),
        criterion_process_independence,
    );
    check(&mut outcomes, "thorn criteria", None, criterion_thorns);
    check(
        &mut outcomes,
        "subordinator law",
        Some(Duration::from_secs(30)),
        criterion_subordinator_law,
    );
    check(
        &mut outcomes,
        "hitting dichotomy",
        Some(Duration::from_secs(120)),
        criterion_dichotomy,
    );
    check(&mut outcomes, "determinism", None, criterion_determinism);

    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| o.line.as_str())
        .collect();
    assert!(
        failed.is_empty(),
        "{} of {} acceptance criteria failed:\n{}",
        failed.len(),
        outcomes.len(),
        failed.join("\n")
    );
}

/// |phi * L[u] - 1| and the exponent reconstructed from its triplet, both to
/// 1e-6 on a 25-point log grid across the whole catalog.
fn criterion_transform_identities() -> Result<String, String> {
    let grid = core(log_grid(1e-2, 1e4, 4))?;
    if grid.len() != 25 {
        return Err(format!("expected 25 grid points, got {}", grid.len()));
    }
    let mut max_residual = 0.0_f64;
    let mut max_reconstruction = 0.0_f64;
    for spec in catalog(3) {
        for &lambda in &grid {
            let residual = core(transform_identity_residual(&spec, lambda))?;
            if residual > 1e-6 {
                return Err(format!(
                    "{:?}: transform residual {residual:.3e} at lambda={lambda:.3e}",
                    spec.kind()
                ));
            }
            max_residual = max_residual.max(residual);
        }
        let report = core(verify_levy_khintchine(&spec, &grid, 1e-6))?;
        if !report.pass {
            return Err(format!(
                "{:?}: reconstruction deviation {:.3e} at lambda={:.3e}",
                spec.kind(),
                report.max_rel_deviation,
                report.worst_lambda
            ));
        }
        max_reconstruction = max_reconstruction.max(report.max_rel_deviation);
    }
    Ok(format!(
        "4 specs x 25 lambdas, max residual {max_residual:.1e}, max reconstruction {max_reconstruction:.1e}"
    ))
}

/// G(l r)/G(r) = l^{a-d} and j(l r)/j(r) = l^{-a-d} to 1e-8 relative on 100
/// seeded random pairs per (alpha, d) combination.
fn criterion_stable_scalings() -> Result<String, String> {
    let quad = QuadratureConfig {
        rel_tol: 1e-12,
        ..QuadratureConfig::default()
    };
    let mut worst_green = 0.0_f64;
    let mut worst_jump = 0.0_f64;
    for d in [2_usize, 3] {
        for alpha in [0.5, 1.0, 1.5] {
            let spec = stable(alpha, d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let pairs: Vec<(f64, f64)> = (0..100)
                .map(|_| {
                    let r = 10.0_f64.powf(-2.0 + 2.0 * rng.random::<f64>());
                    let scale = 0.5 * 8.0_f64.powf(rng.random::<f64>());
                    (r, scale)
                })
                .collect();
            let deviations: Vec<Result<(f64, f64), String>> = pairs
                .par_iter()
                .map(|&(r, scale)| {
                    let g_base = core(green_radial(&spec, r, &quad))?.value;
                    let g_scaled = core(green_radial(&spec, scale * r, &quad))?.value;
                    let green_dev =
                        (g_scaled / g_base / scale.powf(alpha - d as f64) - 1.0).abs();
                    let j_base = core(jump_density_radial(&spec, r, &quad))?.value;
                    let j_scaled = core(jump_density_radial(&spec, scale * r, &quad))?.value;
                    let jump_dev =
                        (j_scaled / j_base / scale.powf(-(alpha + d as f64)) - 1.0).abs();
                    Ok((green_dev, jump_dev))
                })
                .collect();
            for dev in deviations {
                let (green_dev, jump_dev) = dev?;
                if green_dev > 1e-8 || jump_dev > 1e-8 {
                    return Err(format!(
                        "alpha={alpha} d={d}: green deviation {green_dev:.3e}, jump deviation {jump_dev:.3e}"
                    ));
                }
                worst_green = worst_green.max(green_dev);
                worst_jump = worst_jump.max(jump_dev);
            }
        }
    }
    Ok(format!(
        "600 pairs, worst green deviation {worst_green:.1e}, worst jump deviation {worst_jump:.1e}"
    ))
}

/// Quadrature G for Stable{1}, d=3 against the closed form 1/(2 pi^2 r^2).
fn criterion_riesz() -> Result<String, String> {
    let quad = QuadratureConfig {
        rel_tol: 1e-10,
        ..QuadratureConfig::default()
    };
    let spec = stable(1.0, 3)?;
    let mut worst = 0.0_f64;
    for r in [0.01, 0.1, 1.0] {
        let g = core(green_radial(&spec, r, &quad))?.value;
        let oracle = 1.0 / (2.0 * PI * PI * r * r);
        let dev = (g / oracle - 1.0).abs();
        if dev > 1e-6 {
            return Err(format!("r={r}: deviation {dev:.3e} from the Riesz kernel"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("r in {{0.01, 0.1, 1}}, worst deviation {worst:.1e}"))
}

/// Spread <= 20 for the green, jump and green-mass sweeps on [1e-3, 1] for
/// the mixed and relativistic exponents, plus the 5% drift refinement for
/// the Brownian-plus-stable exponent at r = 1e-3.
fn criterion_asymptotics_sweeps() -> Result<String, String> {
    let grid = core(log_grid(1e-3, 1.0, 8))?;
    let quad = QuadratureConfig::default();
    let mut max_spread = 0.0_f64;
    let specs = [
        core(ExponentSpec::new(
            ExponentKind::StableMix { alpha: 1.5, beta: 0.5 },
            3,
        ))?,
        core(ExponentSpec::new(
            ExponentKind::RelativisticStable { alpha: 1.0, m: 1.0 },
            3,
        ))?,
    ];
    for spec in &specs {
        let green = core(verify_green_asymptotics(spec, &grid, 20.0, &quad))?;
        let jump = core(verify_j_asymptotics(spec, &grid, 20.0, &quad))?;
        let mass = core(verify_green_mass_ratio(spec, &grid, 20.0, &quad))?;
        for (name, report) in [
            ("green", &green.ratio),
            ("jump", &jump.ratio),
            ("green-mass", &mass),
        ] {
            if !report.pass {
                return Err(format!(
                    "{:?} {name} sweep: spread {:.2} exceeds 20",
                    spec.kind(),
                    report.spread
                ));
            }
            max_spread = max_spread.max(report.spread);
        }
    }
    let drifted = core(ExponentSpec::new(
        ExponentKind::BrownianPlusStable { a: 1.0, b: 1.0, beta: 1.0 },
        3,
    ))?;
    let green = core(verify_green_asymptotics(&drifted, &grid, 20.0, &quad))?;
    let refinement = green
        .brownian_refinement
        .ok_or("drift exponent did not produce the small-r refinement")?;
    if refinement.r != grid[0] {
        return Err(format!(
            "refinement evaluated at r={} instead of the smallest grid point",
            refinement.r
        ));
    }
    if !refinement.pass || (refinement.normalized - 1.0).abs() > 0.05 {
        return Err(format!(
            "drift refinement off by {:.2}% at r=1e-3",
            100.0 * (refinement.normalized - 1.0).abs()
        ));
    }
    Ok(format!(
        "max sweep spread {max_spread:.2} of 20, drift refinement off by {:.2}%",
        100.0 * (refinement.normalized - 1.0).abs()
    ))
}

/// Graph criterion values: r^{3/2} converges to 4 pi (0.1%), r diverges
/// within 60 shells, and the log-corrected borderline splits by log power
/// with the convergent value sigma_{d-2} (0.5%).
fn criterion_graph_values() -> Result<String, String> {
    let sigma_1 = 2.0 * PI;

    let conv = core(burdzy_integral(&core(ProfileSpec::power_law(1.0, 1.5))?, 3))?;
    let conv_value = converged_value(&conv, "r^1.5")?;
    let conv_dev = (conv_value / (4.0 * PI) - 1.0).abs();
    if conv_dev > 1e-3 {
        return Err(format!("r^1.5 value {conv_value:.6} vs 4 pi, off {conv_dev:.2e}"));
    }

    let div = core(burdzy_integral(&core(ProfileSpec::power_law(1.0, 1.0))?, 3))?;
    require_diverges(&div, "r")?;
    if div.shells_used > 60 {
        return Err(format!("r divergence took {} shells", div.shells_used));
    }

    let log_div = core(burdzy_integral(
        &core(ProfileSpec::power_log(1.0, 1.0, 1.0))?,
        3,
    ))?;
    require_diverges(&log_div, "r/log")?;

    let log_conv = core(burdzy_integral(
        &core(ProfileSpec::power_log(1.0, 1.0, 2.0))?,
        3,
    ))?;
    let log_value = converged_value(&log_conv, "r/log^2")?;
    let log_dev = (log_value / sigma_1 - 1.0).abs();
    if log_dev > 5e-3 {
        return Err(format!("r/log^2 value {log_value:.6} vs 2 pi, off {log_dev:.2e}"));
    }

    Ok(format!(
        "4 pi off {conv_dev:.1e}, divergence in {} shells, log-borderline split with 2 pi off {log_dev:.1e}",
        div.shells_used
    ))
}

/// The minimal-thinness status of a Lipschitz graph is the same under every
/// catalog exponent, for six example profiles.
fn criterion_process_independence() -> Result<String, String> {
    let tab_grid = core(log_grid(1e-6, 1.0, 10))?;
    let profiles: Vec<(&str, ProfileSpec, f64)> = vec![
        ("r", core(ProfileSpec::power_law(1.0, 1.0))?, 1.0),
        ("r^1.5", core(ProfileSpec::power_law(1.0, 1.5))?, 2.0),
        ("0.5 r^1.2", core(ProfileSpec::power_law(0.5, 1.2))?, 1.0),
        ("r/log", core(ProfileSpec::power_log(1.0, 1.0, 1.0))?, 2.0),
        ("r/log^2", core(ProfileSpec::power_log(1.0, 1.0, 2.0))?, 3.0),
        (
            "tabulated r",
            core(ProfileSpec::tabulated(
                tab_grid.clone(),
                tab_grid.clone(),
                1.0,
            ))?,
            1.0,
        ),
    ];
    let specs = catalog(3);
    let mut summary = Vec::new();
    for (name, profile, lipschitz_a) in profiles {
        let mut statuses = Vec::new();
        for spec in &specs {
            let set = graph_set(profile.clone(), lipschitz_a, 3)?;
            let verdict = core(minimal_thinness_verdict(&set, spec))?;
            if !verdict.process_independent {
                return Err(format!("{name}: verdict not flagged process independent"));
            }
            statuses.push(verdict.status);
        }
        if statuses.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!(
                "{name}: statuses differ across the catalog: {statuses:?}"
            ));
        }
        summary.push(format!("{name}={}", statuses[0].as_str()));
    }
    Ok(format!("6 profiles x 4 specs agree: {}", summary.join(", ")))
}

/// Thorn criteria reproduce the worked examples, with converged values
/// matching their antiderivative oracles to 0.5%.
fn criterion_thorns() -> Result<String, String> {
    let r_15 = core(ProfileSpec::power_law(1.0, 1.5))?;
    let r_1 = core(ProfileSpec::power_law(1.0, 1.0))?;
    let r_2 = core(ProfileSpec::power_law(1.0, 2.0))?;
    let log_1 = core(ProfileSpec::power_log(1.0, 1.0, 1.0))?;
    let log_2 = core(ProfileSpec::power_log(1.0, 1.0, 2.0))?;

    let brownian_conv = core(thorn_criterion_brownian(&r_15, 4))?;
    let bvalue = converged_value(&brownian_conv, "brownian d=4 r^1.5")?;
    let bdev = (bvalue / 2.0 - 1.0).abs();
    if bdev > 5e-3 {
        return Err(format!("brownian d=4 r^1.5 value {bvalue:.6} vs 2"));
    }
    require_diverges(
        &core(thorn_criterion_brownian(&r_1, 4))?,
        "brownian d=4 r",
    )?;
    require_diverges(
        &core(thorn_criterion_brownian(&r_2, 3))?,
        "brownian d=3 r^2",
    )?;

    let stable_conv = core(thorn_criterion_stable(&log_2, 3, 1.0))?;
    let svalue = converged_value(&stable_conv, "stable d=3 r/log^2")?;
    let sdev = (svalue / 1.0 - 1.0).abs();
    if sdev > 5e-3 {
        return Err(format!("stable d=3 r/log^2 value {svalue:.6} vs 1"));
    }
    require_diverges(
        &core(thorn_criterion_stable(&log_1, 3, 1.0))?,
        "stable d=3 r/log",
    )?;
    require_diverges(&core(thorn_criterion_stable(&r_1, 3, 1.0))?, "stable d=3 r")?;

    Ok(format!(
        "6 examples, value 2 off {bdev:.1e}, value 1 off {sdev:.1e}"
    ))
}

/// Empirical Laplace transform of 10^5 subordinator increments matches
/// e^{-dt phi(lambda)} within 3 standard errors for every catalog spec.
fn criterion_subordinator_law() -> Result<String, String> {
    let dt = 0.01;
    let n = 100_000;
    let mut worst_z = 0.0_f64;
    for spec in catalog(3) {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut draws = Vec::with_capacity(n);
        for _ in 0..n {
            draws.push(core(sample_subordinator_increment(&spec, dt, &mut rng))?.value);
        }
        for lambda in [0.5, 1.0, 2.0] {
            let transformed: Vec<f64> = draws.iter().map(|s| (-lambda * s).exp()).collect();
            let mean = transformed.iter().sum::<f64>() / n as f64;
            let var = transformed
                .iter()
                .map(|t| (t - mean).powi(2))
                .sum::<f64>()
                / (n as f64 - 1.0);
            let se = (var / n as f64).sqrt().max(1e-12);
            let target = (-dt * spec.phi(lambda)).exp();
            let z = (mean - target).abs() / se;
            if z > 3.0 {
                return Err(format!(
                    "{:?} lambda={lambda}: {mean:.6} vs {target:.6} is {z:.1} standard errors",
                    spec.kind()
                ));
            }
            worst_z = worst_z.max(z);
        }
    }
    Ok(format!(
        "4 specs x 3 lambdas x 1e5 increments, worst deviation {worst_z:.2} standard errors"
    ))
}

/// Frozen-seed hitting dichotomy: the divergent-profile estimates strictly
/// exceed the convergent-profile estimates at every height and do not decay
/// as the start approaches the boundary.
fn criterion_dichotomy() -> Result<String, String> {
    let spec = stable(1.0, 2)?;
    let thin = graph_set(core(ProfileSpec::power_law(1.0, 1.5))?, 2.0, 2)?;
    let nonthin = graph_set(core(ProfileSpec::power_law(1.0, 1.0))?, 1.0, 2)?;
    let heights = [0.4, 0.2, 0.1];
    let start = core(HPoint::new(vec![0.0], heights[0]))?;
    let cfg = McConfig::new(42, 10_000, 0.002, start);
    let report = core(dichotomy_experiment(&spec, &thin, &nonthin, &heights, &cfg))?;

    for ((height, nonthin_est), thin_est) in heights
        .iter()
        .zip(&report.nonthin_estimates)
        .zip(&report.thin_estimates)
    {
        if nonthin_est <= thin_est {
            return Err(format!(
                "height {height}: divergent estimate {nonthin_est:.4} does not exceed convergent {thin_est:.4}"
            ));
        }
    }
    if report.monotone_trend < 0.0 {
        return Err(format!(
            "divergent-profile estimates decay toward the boundary: {:?}",
            report.nonthin_estimates
        ));
    }
    if report.thin_estimates != DICHOTOMY_THIN_BASELINE
        || report.nonthin_estimates != DICHOTOMY_NONTHIN_BASELINE
    {
        return Err(format!(
            "estimates drifted from frozen baselines: thin {:?} vs {:?}, nonthin {:?} vs {:?}",
            report.thin_estimates,
            DICHOTOMY_THIN_BASELINE,
            report.nonthin_estimates,
            DICHOTOMY_NONTHIN_BASELINE
        ));
    }
    Ok(format!(
        "thin {:?} < nonthin {:?}, trend {:+.4}",
        report.thin_estimates, report.nonthin_estimates, report.monotone_trend
    ))
}

/// The simulate verb is byte-deterministic: identical configs give identical
/// CSVs, across repeat runs and across 1 vs 8 threads.
fn criterion_determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = serde_json::json!({
        "dimension": 2,
        "process": {"kind": "stable", "alpha": 1.0},
        "set": {
            "kind": "lipschitz_graph",
            "profile": {"kind": "power_law", "c": 1.0, "beta": 1.5},
            "lipschitz_a": 2.0
        },
        "mc": {"seed": 7, "n_paths": 2000, "dt": 0.01, "heights": [0.4, 0.2]}
    });
    let cfg_path = tmp.path().join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string(&config).unwrap())
        .map_err(|e| e.to_string())?;

    let run = |out: &Path, threads: Option<&str>| -> Result<Vec<u8>, String> {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_halfspace-thinness"));
        cmd.env_remove("HST_SEED");
        cmd.args(["simulate", "--config"]);
        cmd.arg(&cfg_path);
        cmd.arg("--out");
        cmd.arg(out);
        if let Some(t) = threads {
            cmd.args(["--threads", t]);
        }
        let output = cmd.output().map_err(|e| e.to_string())?;
        if output.status.code() != Some(0) {
            return Err(format!(
                "simulate exited {:?}: {}",
                output.status.code(),
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        std::fs::read(out.join("hitting.csv")).map_err(|e| e.to_string())
    };

    let first = run(&tmp.path().join("a"), None)?;
    let second = run(&tmp.path().join("b"), None)?;
    if first != second {
        return Err("repeat runs differ byte-for-byte".into());
    }
    let single = run(&tmp.path().join("t1"), Some("1"))?;
    let eight = run(&tmp.path().join("t8"), Some("8"))?;
    if single != eight {
        return Err("1-thread and 8-thread runs differ byte-for-byte".into());
    }
    if single != first {
        return Err("threaded runs differ from the default-thread run".into());
    }
    Ok(format!(
        "4 runs byte-identical ({} bytes of CSV)",
        first.len()
    ))
}
