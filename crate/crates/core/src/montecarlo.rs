//! Path-level Monte Carlo for the subordinate processes: exact-in-law
//! subordinator increments, killed path skeletons on a time grid, and
//! hitting-functional estimates for candidate sets.
//!
//! Reproducibility contract: every path owns stream `path_index` of a
//! counter-mode generator seeded with the run seed, paths are collected in
//! index order, and the final reduction is serial, so reports are
//! bit-identical across runs and thread counts.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::bernstein::{ExponentKind, ExponentSpec};
use crate::error::{Error, Result};
use crate::halfspace::HPoint;
use crate::kernels::renewal_surrogate;
use crate::thinness::{SetKind, SetSpec};

/// Default censoring horizon.
pub const DEFAULT_MAX_TIME: f64 = 50.0;
/// Censored-fraction threshold above which a report is flagged.
pub const CENSORED_FLAG_FRACTION: f64 = 0.05;
/// Hard sanity bound on the hitting estimator; beyond it the run fails.
const ESTIMATE_HARD_BOUND: f64 = 1.5;
/// Near-boundary refinement: halve dt while x_d < 10 x the displacement
/// scale of the current step size, at most 12 times.
const REFINEMENT_MULTIPLE: f64 = 10.0;
const MAX_REFINEMENT_LEVELS: u32 = 12;
/// Rejection budget per tilted draw before the step is split in two.
const MAX_TILT_ATTEMPTS: u32 = 64;
const MAX_TILT_DEPTH: u32 = 32;

/// Run parameters for path simulation.
#[derive(Clone, Debug)]
pub struct McConfig {
    pub seed: u64,
    pub n_paths: u64,
    pub dt: f64,
    pub max_time: f64,
    pub start: HPoint,
    pub refine_near_boundary: bool,
}

impl McConfig {
    /// Config with the default censoring horizon and refinement enabled.
    pub fn new(seed: u64, n_paths: u64, dt: f64, start: HPoint) -> Self {
        McConfig {
            seed,
            n_paths,
            dt,
            max_time: DEFAULT_MAX_TIME,
            start,
            refine_near_boundary: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::domain("n_paths must be at least 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::domain("dt must be positive"));
        }
        if !(self.max_time.is_finite() && self.max_time > 0.0) {
            return Err(Error::domain("max_time must be positive"));
        }
        Ok(())
    }

    /// Hard step budget per path: refinement can shrink dt 4096-fold near
    /// the boundary, so a pathological hover is cut off rather than spun.
    fn step_cap(&self) -> u64 {
        10.0_f64.mul_add(self.max_time / self.dt, 1000.0).min(1e18) as u64
    }
}

/// One subordinator increment together with how many times the tilted
/// sampler ran out of its rejection budget while producing it.
#[derive(Clone, Copy, Debug)]
pub struct IncrementSample {
    pub value: f64,
    pub tilt_cap_events: u32,
}

/// Standardized positive rho-stable variate, E[e^{-lambda S}] =
/// e^{-lambda^rho}, 0 < rho < 1, by the Kanter representation
/// S = sin(rho u) sin((1-rho)u)^{(1-rho)/rho} / (sin(u)^{1/rho} W^{(1-rho)/rho}),
/// u uniform on (0, pi), W standard exponential. Evaluated in log space;
/// the astronomically rare overflow is clamped at e^700.
pub fn sample_positive_stable(rho: f64, rng: &mut ChaCha8Rng) -> f64 {
    debug_assert!(0.0 < rho && rho < 1.0);
    let u = loop {
        let u = std::f64::consts::PI * rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let w = loop {
        let w: f64 = Exp1.sample(rng);
        if w > 0.0 {
            break w;
        }
    };
    let ln_s = (rho * u).sin().ln() - u.sin().ln() / rho
        + (1.0 - rho) / rho * (((1.0 - rho) * u).sin().ln() - w.ln());
    ln_s.min(700.0).exp()
}

/// Increment of the subordinator over a step of length dt, exact in law:
/// E[e^{-lambda dS}] = e^{-dt phi(lambda)} for the spec's exponent.
///
/// Stable steps scale a standardized positive stable draw; the relativistic
/// family is sampled by exponential tilting (accept a stable proposal T
/// with probability e^{-theta T}); the mix adds two independent stable
/// draws; Brownian-plus-stable adds the deterministic drift a dt, so its
/// increments exceed a dt strictly.
pub fn sample_subordinator_increment(
    spec: &ExponentSpec,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<IncrementSample> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain("dt must be positive"));
    }
    let sample = match spec.kind() {
        ExponentKind::Stable { alpha } => IncrementSample {
            value: dt.powf(2.0 / alpha) * sample_positive_stable(alpha / 2.0, rng),
            tilt_cap_events: 0,
        },
        ExponentKind::RelativisticStable { alpha, m } => {
            let mut events = 0;
            let value = tilted_stable_increment(alpha, m, dt, rng, &mut events, 0);
            IncrementSample {
                value,
                tilt_cap_events: events,
            }
        }
        ExponentKind::StableMix { alpha, beta } => IncrementSample {
            value: dt.powf(2.0 / alpha) * sample_positive_stable(alpha / 2.0, rng)
                + dt.powf(2.0 / beta) * sample_positive_stable(beta / 2.0, rng),
            tilt_cap_events: 0,
        },
        ExponentKind::BrownianPlusStable { a, b, beta } => IncrementSample {
            value: a * dt
                + b * b * dt.powf(2.0 / beta) * sample_positive_stable(beta / 2.0, rng),
            tilt_cap_events: 0,
        },
    };
    Ok(sample)
}

/// Tilted draw for the relativistic exponent: proposals are stable
/// increments for the same dt, accepted with probability e^{-theta T}. The
/// acceptance rate is e^{-m dt}, so when the budget is exhausted the step
/// is resampled as two independent half steps (exact by infinite
/// divisibility) and the event is counted.
fn tilted_stable_increment(
    alpha: f64,
    m: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
    events: &mut u32,
    depth: u32,
) -> f64 {
    let theta = m.powf(2.0 / alpha);
    let mut last = 0.0;
    for _ in 0..MAX_TILT_ATTEMPTS {
        let t = dt.powf(2.0 / alpha) * sample_positive_stable(alpha / 2.0, rng);
        last = t;
        if rng.random::<f64>() < (-theta * t).exp() {
            return t;
        }
    }
    *events += 1;
    if depth >= MAX_TILT_DEPTH {
        // Unreachable in practice: acceptance is e^{-m dt / 2^depth} -> 1.
        return last;
    }
    tilted_stable_increment(alpha, m, 0.5 * dt, rng, events, depth + 1)
        + tilted_stable_increment(alpha, m, 0.5 * dt, rng, events, depth + 1)
}

/// Discrete killed path: positions on the time grid up to and including
/// the first point outside the half-space (if any), with the subordinator's
/// running value alongside.
#[derive(Clone, Debug)]
pub struct PathSkeleton {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub subordinator_values: Vec<f64>,
    /// Index of the first grid point with x_d <= 0; None when the path was
    /// censored at the horizon (or the step cap) instead.
    pub exit_index: Option<usize>,
    pub tilt_cap_events: u32,
    pub step_capped: bool,
}

enum StepOutcome {
    Interior,
    Exited,
    Censored { step_capped: bool },
}

/// Single-path stepper shared by the skeleton and estimator drivers so the
/// variate order (one increment, then d normals, coordinates in order) is
/// fixed in exactly one place.
struct PathWalker<'a> {
    spec: &'a ExponentSpec,
    coords: Vec<f64>,
    time: f64,
    subordinator: f64,
    dt: f64,
    max_time: f64,
    /// Displacement scales per refinement level; empty disables refinement.
    deltas: &'a [f64],
    steps_left: u64,
    tilt_cap_events: u32,
}

impl<'a> PathWalker<'a> {
    fn new(spec: &'a ExponentSpec, cfg: &McConfig, deltas: &'a [f64]) -> Self {
        let mut coords = cfg.start.x_tilde().to_vec();
        coords.push(cfg.start.x_d());
        PathWalker {
            spec,
            coords,
            time: 0.0,
            subordinator: 0.0,
            dt: cfg.dt,
            max_time: cfg.max_time,
            deltas,
            steps_left: cfg.step_cap(),
            tilt_cap_events: 0,
        }
    }

    fn x_d(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    fn advance(&mut self, rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        if self.time >= self.max_time {
            return Ok(StepOutcome::Censored { step_capped: false });
        }
        if self.steps_left == 0 {
            return Ok(StepOutcome::Censored { step_capped: true });
        }
        self.steps_left -= 1;

        // Smallest halving level whose displacement scale the current
        // height clears; the deepest level otherwise.
        let mut level = self.deltas.len().saturating_sub(1);
        let x_d = self.x_d();
        for (l, delta) in self.deltas.iter().enumerate() {
            if x_d >= REFINEMENT_MULTIPLE * delta {
                level = l;
                break;
            }
        }
        let dt_step = self.dt / f64::powi(2.0, level as i32);

        let inc = sample_subordinator_increment(self.spec, dt_step, rng)?;
        self.tilt_cap_events += inc.tilt_cap_events;
        self.subordinator += inc.value;
        let sd = (2.0 * inc.value).sqrt();
        for c in &mut self.coords {
            let z: f64 = StandardNormal.sample(rng);
            *c += sd * z;
        }
        self.time += dt_step;

        if self.x_d() <= 0.0 {
            Ok(StepOutcome::Exited)
        } else {
            Ok(StepOutcome::Interior)
        }
    }
}

/// Displacement scale delta(dt) = V̂^{-1}(sqrt(dt)) per refinement level,
/// found by bisection on the exact V̂; empty when refinement is off.
fn refinement_deltas(spec: &ExponentSpec, cfg: &McConfig) -> Result<Vec<f64>> {
    if !cfg.refine_near_boundary {
        return Ok(Vec::new());
    }
    (0..=MAX_REFINEMENT_LEVELS)
        .map(|level| {
            let dt = cfg.dt / f64::powi(2.0, level as i32);
            inverse_renewal_surrogate(spec, dt.sqrt())
        })
        .collect()
}

/// t with V̂(t) = y; V̂ is continuous and strictly increasing with full
/// range (0, inf), so log-space bisection converges from a wide bracket.
fn inverse_renewal_surrogate(spec: &ExponentSpec, y: f64) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::domain("displacement scale requires y > 0"));
    }
    let mut lo = 1e-120_f64;
    let mut hi = 1e120_f64;
    if renewal_surrogate(spec, lo)? >= y {
        return Ok(lo);
    }
    if renewal_surrogate(spec, hi)? <= y {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if renewal_surrogate(spec, mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Simulate one killed path on the time grid, recording every grid point.
pub fn simulate_killed_path(
    spec: &ExponentSpec,
    cfg: &McConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PathSkeleton> {
    cfg.validate()?;
    if spec.dimension() != cfg.start.dimension() {
        return Err(Error::domain("dimension mismatch between spec and start point"));
    }
    let deltas = refinement_deltas(spec, cfg)?;
    let mut walker = PathWalker::new(spec, cfg, &deltas);
    let mut skeleton = PathSkeleton {
        times: vec![0.0],
        positions: vec![walker.coords.clone()],
        subordinator_values: vec![0.0],
        exit_index: None,
        tilt_cap_events: 0,
        step_capped: false,
    };
    loop {
        match walker.advance(rng)? {
            StepOutcome::Censored { step_capped } => {
                skeleton.step_capped = step_capped;
                break;
            }
            outcome => {
                skeleton.times.push(walker.time);
                skeleton.positions.push(walker.coords.clone());
                skeleton.subordinator_values.push(walker.subordinator);
                if matches!(outcome, StepOutcome::Exited) {
                    skeleton.exit_index = Some(skeleton.times.len() - 1);
                    break;
                }
            }
        }
    }
    skeleton.tilt_cap_events = walker.tilt_cap_events;
    Ok(skeleton)
}

/// Sampler health counters accompanying a hitting report.
#[derive(Clone, Copy, Debug, Default)]
pub struct McDiagnostics {
    pub tilt_cap_events: u64,
    pub step_cap_events: u64,
    /// Censored paths exceeded the reporting threshold (5%).
    pub censored_flag: bool,
}

/// Monte Carlo estimate of the hitting functional
/// E[h(X_{T_A}); T_A < tau_H] / h(start) with h(x) = V̂(x_d) |x|^{-d},
/// evaluated at the first grid point inside A.
#[derive(Clone, Debug)]
pub struct HittingReport {
    pub estimate: f64,
    pub std_error: f64,
    pub n_hit: u64,
    pub n_exited_without_hit: u64,
    pub n_censored: u64,
    pub seed: u64,
    pub diagnostics: McDiagnostics,
}

enum PathEnd {
    Hit(f64),
    Exit,
    Censored { step_capped: bool },
}

struct PathRun {
    end: PathEnd,
    tilt_cap_events: u32,
}

fn hitting_weight(spec: &ExponentSpec, coords: &[f64]) -> Result<f64> {
    let d = coords.len();
    let x_d = coords[d - 1];
    let vhat = renewal_surrogate(spec, x_d)?;
    let norm_sq: f64 = coords.iter().map(|c| c * c).sum();
    Ok(vhat * norm_sq.sqrt().powi(-(d as i32)))
}

fn run_one_path(
    spec: &ExponentSpec,
    set: &SetSpec,
    cfg: &McConfig,
    deltas: &[f64],
    base_weight: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PathRun> {
    let mut walker = PathWalker::new(spec, cfg, deltas);
    if set.contains_coords(&walker.coords) {
        return Ok(PathRun {
            end: PathEnd::Hit(hitting_weight(spec, &walker.coords)? / base_weight),
            tilt_cap_events: 0,
        });
    }
    loop {
        let outcome = walker.advance(rng)?;
        let end = match outcome {
            StepOutcome::Interior => {
                if set.contains_coords(&walker.coords) {
                    PathEnd::Hit(hitting_weight(spec, &walker.coords)? / base_weight)
                } else {
                    continue;
                }
            }
            StepOutcome::Exited => PathEnd::Exit,
            StepOutcome::Censored { step_capped } => PathEnd::Censored { step_capped },
        };
        return Ok(PathRun {
            end,
            tilt_cap_events: walker.tilt_cap_events,
        });
    }
}

/// Estimate the hitting functional of `set` from `cfg.start` over
/// `cfg.n_paths` independent paths. Censored paths are excluded from the
/// average (they carry a flag, not a value); a run where every path is
/// censored is an error, as is an estimate outside [0, 1.5].
pub fn estimate_hitting_functional(
    spec: &ExponentSpec,
    set: &SetSpec,
    cfg: &McConfig,
) -> Result<HittingReport> {
    cfg.validate()?;
    if spec.dimension() != cfg.start.dimension() || spec.dimension() != set.dimension() {
        return Err(Error::domain(
            "dimension mismatch between spec, set and start point",
        ));
    }
    let mut start_coords = cfg.start.x_tilde().to_vec();
    start_coords.push(cfg.start.x_d());
    let base_weight = hitting_weight(spec, &start_coords)?;
    let deltas = refinement_deltas(spec, cfg)?;

    let runs: Vec<PathRun> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|path_index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(path_index);
            run_one_path(spec, set, cfg, &deltas, base_weight, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut weights = Vec::with_capacity(runs.len());
    let mut n_hit = 0u64;
    let mut n_exit = 0u64;
    let mut n_censored = 0u64;
    let mut diagnostics = McDiagnostics::default();
    for run in &runs {
        diagnostics.tilt_cap_events += u64::from(run.tilt_cap_events);
        match run.end {
            PathEnd::Hit(w) => {
                n_hit += 1;
                weights.push(w);
            }
            PathEnd::Exit => {
                n_exit += 1;
                weights.push(0.0);
            }
            PathEnd::Censored { step_capped } => {
                n_censored += 1;
                if step_capped {
                    diagnostics.step_cap_events += 1;
                }
            }
        }
    }
    if weights.is_empty() {
        return Err(Error::AllCensored {
            n_paths: cfg.n_paths,
            max_time: cfg.max_time,
            detail: "every path was censored before hitting or exiting".into(),
        });
    }

    let n_eff = weights.len() as f64;
    let estimate = weights.iter().sum::<f64>() / n_eff;
    let std_error = if weights.len() < 2 {
        f64::INFINITY
    } else {
        let var = weights.iter().map(|w| (w - estimate).powi(2)).sum::<f64>() / (n_eff - 1.0);
        (var / n_eff).sqrt()
    };
    if !(0.0..=ESTIMATE_HARD_BOUND).contains(&estimate) {
        return Err(Error::Quantitative(format!(
            "hitting estimate {estimate} outside [0, {ESTIMATE_HARD_BOUND}]"
        )));
    }
    diagnostics.censored_flag =
        n_censored as f64 > CENSORED_FLAG_FRACTION * cfg.n_paths as f64;
    Ok(HittingReport {
        estimate,
        std_error,
        n_hit,
        n_exited_without_hit: n_exit,
        n_censored,
        seed: cfg.seed,
        diagnostics,
    })
}

/// Hitting reports for start points (0, ..., 0, h), one per height, all
/// with the same seed (so runs over identical sets coincide exactly).
/// `cfg.start` is ignored in favor of the sweep's start points.
pub fn hitting_sweep(
    spec: &ExponentSpec,
    set: &SetSpec,
    heights: &[f64],
    cfg: &McConfig,
) -> Result<Vec<HittingReport>> {
    if heights.is_empty() {
        return Err(Error::domain("height sweep requires at least one height"));
    }
    if !heights.iter().all(|h| h.is_finite() && *h > 0.0) {
        return Err(Error::domain("heights must be positive"));
    }
    heights
        .iter()
        .map(|h| {
            let mut run_cfg = cfg.clone();
            run_cfg.start = HPoint::new(vec![0.0; spec.dimension() - 1], *h)?;
            estimate_hitting_functional(spec, set, &run_cfg)
        })
        .collect()
}

/// Paired hitting sweeps over a minimally thin and a non-minimally-thin
/// graph set, plus the trend of the non-thin estimates as the start height
/// descends.
#[derive(Clone, Debug)]
pub struct DichotomyReport {
    pub heights: Vec<f64>,
    pub thin_estimates: Vec<f64>,
    pub thin_std_errors: Vec<f64>,
    pub nonthin_estimates: Vec<f64>,
    pub nonthin_std_errors: Vec<f64>,
    /// Minimum consecutive difference of the non-thin estimates in the
    /// order the heights are listed (infinite for a single height);
    /// nonnegative means the sequence is non-decreasing.
    pub monotone_trend: f64,
    pub seed: u64,
}

/// Run both sweeps with shared seeds. Both sets must be Lipschitz graphs:
/// the dichotomy contrasts hitting behavior of graph sets on either side
/// of the graph criterion.
pub fn dichotomy_experiment(
    spec: &ExponentSpec,
    thin_set: &SetSpec,
    nonthin_set: &SetSpec,
    heights: &[f64],
    cfg: &McConfig,
) -> Result<DichotomyReport> {
    for set in [thin_set, nonthin_set] {
        if !matches!(set.kind(), SetKind::LipschitzGraph { .. }) {
            return Err(Error::domain(
                "dichotomy experiment requires Lipschitz graph sets",
            ));
        }
    }
    if heights.is_empty() {
        return Err(Error::domain("dichotomy requires at least one height"));
    }
    let thin = hitting_sweep(spec, thin_set, heights, cfg)?;
    let nonthin = hitting_sweep(spec, nonthin_set, heights, cfg)?;
    let monotone_trend = nonthin
        .windows(2)
        .map(|w| w[1].estimate - w[0].estimate)
        .fold(f64::INFINITY, f64::min);
    Ok(DichotomyReport {
        heights: heights.to_vec(),
        thin_estimates: thin.iter().map(|r| r.estimate).collect(),
        thin_std_errors: thin.iter().map(|r| r.std_error).collect(),
        nonthin_estimates: nonthin.iter().map(|r| r.estimate).collect(),
        nonthin_std_errors: nonthin.iter().map(|r| r.std_error).collect(),
        monotone_trend,
        seed: cfg.seed,
    })
}
