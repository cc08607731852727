//! Command-line front end: parses a JSON run configuration, dispatches to
//! kernel sweeps, thinness criteria, Monte Carlo hitting estimates or the
//! self-check property suite, and writes CSV reports.
//!
//! Exit codes are a stable contract: 0 pass, 1 usage or config error,
//! 2 quantitative check failure, 3 inconclusive verdict.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use hst_core::bernstein::ExponentKind;
use hst_core::config::{load_config, Config};
use hst_core::csvnum::{sig17, sig17_opt};
use hst_core::halfspace::HPoint;
use hst_core::kernels::{
    kernel_table, verify_green_asymptotics, verify_green_mass_ratio, verify_j_asymptotics,
};
use hst_core::montecarlo::{hitting_sweep, McConfig};
use hst_core::thinness::{
    beurling_dahlberg_integral, burdzy_integral, minimal_thinness_verdict,
    thorn_criterion_brownian, thorn_criterion_stable, IntegralVerdict, SetKind, VerdictStatus,
};
use hst_core::verify::{format_property_table, run_property_suite, VerifyOptions};
use hst_core::{Error, Result};

#[derive(Parser)]
#[command(name = "halfspace-thinness", version, about = "Kernels, thinness criteria and Monte Carlo checks for subordinate Brownian motion in the half-space", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Tabulate G, j, V over the radial grid and run comparability sweeps
    Kernels(RunArgs),
    /// Evaluate the thinness criteria for the configured set
    Thinness(RunArgs),
    /// Estimate the hitting functional by killed-path simulation
    Simulate(RunArgs),
    /// Run the self-check property suite
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV reports (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Dotted-path config overrides, e.g. --set process.alpha=1.5
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Overwrite existing output files
    #[arg(long)]
    force: bool,
    /// Worker threads (default: config `threads`, then available cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Maps error kinds to the exit-code contract: caller mistakes are 1,
/// numerical or simulation failures are 2.
fn classify(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Io(_) => 1,
        Error::Tolerance { .. }
        | Error::Inversion { .. }
        | Error::Quantitative(_)
        | Error::AllCensored { .. } => 2,
    }
}

/// A verb implementation: config, output directory, force flag, exit code.
type VerbRunner = fn(&Config, &Path, bool) -> Result<u8>;

fn dispatch(cli: Cli) -> Result<u8> {
    let (args, verb): (&RunArgs, VerbRunner) = match &cli.verb {
        Verb::Kernels(a) => (a, run_kernels),
        Verb::Thinness(a) => (a, run_thinness),
        Verb::Simulate(a) => (a, run_simulate),
        Verb::Verify(a) => (a, run_verify),
    };

    let mut overrides = args.set.clone();
    if matches!(cli.verb, Verb::Simulate(_)) {
        if let Ok(raw) = std::env::var("HST_SEED") {
            let seed: u64 = raw.parse().map_err(|_| {
                Error::config(format!("HST_SEED must be an unsigned 64-bit integer, got '{raw}'"))
            })?;
            overrides.push(format!("mc.seed={seed}"));
        }
    }
    let cfg = load_config(&args.config, &overrides)?;

    if let Some(n) = args.threads.or(cfg.threads) {
        if n == 0 {
            return Err(Error::config("threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    }

    verb(&cfg, &args.out, args.force)
}

/// Writes one report file, refusing to overwrite without --force.
fn write_output(dir: &Path, name: &str, content: &str, force: bool) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    if path.exists() && !force {
        return Err(Error::config(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    std::fs::write(&path, content)?;
    Ok(())
}

fn run_kernels(cfg: &Config, out: &Path, force: bool) -> Result<u8> {
    let spec = cfg.process_spec()?;
    let grid = cfg.r_grid()?;
    let q = cfg.quadrature()?;
    let bound = cfg.spread_bound()?;

    let table = kernel_table(&spec, &grid, &q)?;
    write_output(out, "kernels.csv", &table.to_csv(), force)?;

    let mut ratios = String::from("sweep,x,ratio\n");
    let mut failures: Vec<String> = Vec::new();

    let green = verify_green_asymptotics(&spec, &grid, bound, &q)?;
    for (x, v) in &green.ratio.points {
        ratios.push_str(&format!("green,{},{}\n", sig17(*x), sig17(*v)));
    }
    println!(
        "green sweep: spread {:.4} (bound {}) {}",
        green.ratio.spread,
        bound,
        if green.ratio.pass { "pass" } else { "FAIL" }
    );
    if !green.ratio.pass {
        failures.push(format!(
            "green spread {:.4} exceeds bound {bound}",
            green.ratio.spread
        ));
    }
    if let Some(b) = green.brownian_refinement {
        ratios.push_str(&format!(
            "green_brownian_refinement,{},{}\n",
            sig17(b.r),
            sig17(b.normalized)
        ));
        println!(
            "brownian refinement at r={}: normalized {:.6} {}",
            b.r,
            b.normalized,
            if b.pass { "pass" } else { "FAIL" }
        );
        if !b.pass {
            failures.push(format!(
                "brownian refinement off by {:.3e} at r={}",
                (b.normalized - 1.0).abs(),
                b.r
            ));
        }
    }

    if spec.alpha_index() < 2.0 {
        let jump = verify_j_asymptotics(&spec, &grid, bound, &q)?;
        for (x, v) in &jump.ratio.points {
            ratios.push_str(&format!("jump,{},{}\n", sig17(*x), sig17(*v)));
        }
        println!(
            "jump sweep: spread {:.4} (bound {}), doubling constant {:.4} {}",
            jump.ratio.spread,
            bound,
            jump.doubling_constant,
            if jump.pass { "pass" } else { "FAIL" }
        );
        if !jump.pass {
            failures.push(format!(
                "jump spread {:.4} exceeds bound {bound}",
                jump.ratio.spread
            ));
        }
    } else {
        println!("jump sweep: skipped (scaling index 2 has no jump-comparability target)");
    }

    let mass = verify_green_mass_ratio(&spec, &grid, bound, &q)?;
    for (x, v) in &mass.points {
        ratios.push_str(&format!("green_mass,{},{}\n", sig17(*x), sig17(*v)));
    }
    println!(
        "green mass sweep: spread {:.4} (bound {}) {}",
        mass.spread,
        bound,
        if mass.pass { "pass" } else { "FAIL" }
    );
    if !mass.pass {
        failures.push(format!("green mass spread {:.4} exceeds bound {bound}", mass.spread));
    }

    write_output(out, "ratios.csv", &ratios, force)?;

    if failures.is_empty() {
        Ok(0)
    } else {
        for f in &failures {
            eprintln!("quantitative check failed: {f}");
        }
        Ok(2)
    }
}

fn run_thinness(cfg: &Config, out: &Path, force: bool) -> Result<u8> {
    let spec = cfg.process_spec()?;
    let set = cfg.set_spec()?;
    let max_shells = cfg.max_shells()?;
    let d = set.dimension();

    let mut rows: Vec<(&'static str, IntegralVerdict, bool)> = Vec::new();
    match set.kind() {
        SetKind::LipschitzGraph { profile, .. } => {
            rows.push(("burdzy", burdzy_integral(profile, d)?, true));
            rows.push((
                "beurling_dahlberg",
                beurling_dahlberg_integral(&set, max_shells)?,
                true,
            ));
        }
        SetKind::Thorn { profile } => {
            rows.push(("thorn_brownian", thorn_criterion_brownian(profile, d)?, false));
            if let ExponentKind::Stable { alpha } = spec.kind() {
                rows.push((
                    "thorn_stable",
                    thorn_criterion_stable(profile, d, alpha)?,
                    false,
                ));
            }
        }
        SetKind::BoxUnion { .. } => {
            rows.push((
                "beurling_dahlberg",
                beurling_dahlberg_integral(&set, max_shells)?,
                true,
            ));
        }
    }

    let mut csv = String::from("criterion,status,value,error_bound,shells_used,process_independent\n");
    for (name, v, pi) in &rows {
        let (value, error_bound) = if v.status == VerdictStatus::Converges {
            (sig17_opt(v.value), sig17(v.error_bound))
        } else {
            (String::new(), String::new())
        };
        csv.push_str(&format!(
            "{name},{},{value},{error_bound},{},{pi}\n",
            v.status.as_str(),
            v.shells_used
        ));
        match v.status {
            VerdictStatus::Converges => println!(
                "criterion {name}: Converges to {:.6e} (error bound {:.3e}, {} shells)",
                v.value.unwrap_or(f64::NAN),
                v.error_bound,
                v.shells_used
            ),
            _ => println!("criterion {name}: {} ({} shells)", v.status.as_str(), v.shells_used),
        }
    }
    write_output(out, "verdict.csv", &csv, force)?;

    let verdict = minimal_thinness_verdict(&set, &spec)?;
    let flavor = if verdict.ordinary_thinness {
        "ordinary thinness at the vertex"
    } else {
        "minimal thinness at 0"
    };
    let scope = if verdict.process_independent {
        "process independent"
    } else {
        "process specific"
    };
    println!("{flavor}: {} ({}, {scope})", verdict.status.as_str(), verdict.criterion);

    if rows.iter().any(|(_, v, _)| v.status == VerdictStatus::Inconclusive) {
        Ok(3)
    } else {
        Ok(0)
    }
}

fn run_simulate(cfg: &Config, out: &Path, force: bool) -> Result<u8> {
    let spec = cfg.process_spec()?;
    let set = cfg.set_spec()?;
    let mc = cfg.mc_section()?;

    let start = HPoint::new(vec![0.0; cfg.dimension - 1], mc.heights[0])?;
    let mut run_cfg = McConfig::new(mc.seed, mc.n_paths, mc.dt, start);
    run_cfg.max_time = mc.max_time;
    run_cfg.refine_near_boundary = mc.refine_near_boundary;

    let reports = hitting_sweep(&spec, &set, &mc.heights, &run_cfg)?;

    let mut csv =
        String::from("height,estimate,std_error,n_hit,n_exit,n_censored,seed,censored_flag\n");
    for (h, r) in mc.heights.iter().zip(&reports) {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            sig17(*h),
            sig17(r.estimate),
            sig17(r.std_error),
            r.n_hit,
            r.n_exited_without_hit,
            r.n_censored,
            r.seed,
            r.diagnostics.censored_flag
        ));
        println!(
            "height {}: estimate {:.6e} +- {:.3e} (hit {}, exit {}, censored {})",
            h, r.estimate, r.std_error, r.n_hit, r.n_exited_without_hit, r.n_censored
        );
    }
    write_output(out, "hitting.csv", &csv, force)?;
    println!("seed: {}", mc.seed);
    Ok(0)
}

fn run_verify(cfg: &Config, _out: &Path, _force: bool) -> Result<u8> {
    // The config is required to exist and parse (it supplies `threads`);
    // the suite itself runs on the built-in catalog.
    let _ = cfg;
    let u_scale = match std::env::var("HST_FAULT_U_SCALE") {
        Ok(raw) => raw.parse().map_err(|_| {
            Error::config(format!("HST_FAULT_U_SCALE must be a number, got '{raw}'"))
        })?,
        Err(_) => 1.0,
    };
    let outcomes = run_property_suite(&VerifyOptions { u_scale });
    print!("{}", format_property_table(&outcomes));
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    if failed == 0 {
        println!("all {} properties pass", outcomes.len());
        Ok(0)
    } else {
        eprintln!("{failed} of {} properties failed", outcomes.len());
        Ok(2)
    }
}
