//! Catalog of subordinator Laplace exponents and their densities.
//!
//! Each catalog member is a complete Bernstein function
//! φ(λ) = a λ + ∫_0^∞ (1 − e^{−λ t}) η(t) dt
//! with known drift a and Lévy density η. The potential density u is the
//! inverse Laplace transform of 1/φ: closed form for the stable exponent,
//! numerical inversion (Talbot, Gaver–Stehfest fallback) for the rest.
//! `verify_levy_khintchine` closes the loop by reconstructing φ from (a, η)
//! with quadrature and reporting the worst relative deviation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laplace::{gaver_stehfest, talbot, STEHFEST_TERMS, TALBOT_NODES};
use crate::quad::{march_down, march_up, Estimate, QuadTol};
use crate::special::gamma;

/// Which subordinator drives the process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentKind {
    /// φ(λ) = λ^{α/2}, 0 < α < 2.
    Stable { alpha: f64 },
    /// φ(λ) = (λ + m^{2/α})^{α/2} − m, 0 < α < 2, m > 0.
    RelativisticStable { alpha: f64, m: f64 },
    /// φ(λ) = λ^{α/2} + λ^{β/2}, 0 < β < α < 2.
    StableMix { alpha: f64, beta: f64 },
    /// φ(λ) = a λ + b^β λ^{β/2}, a > 0, b > 0, 0 < β < 2.
    BrownianPlusStable { a: f64, b: f64, beta: f64 },
}

/// A validated exponent together with the ambient dimension.
///
/// `alpha_index` is the scaling index at infinity: α for the pure-jump
/// members and exactly 2 when a drift is present. Dimension constraints
/// keep every member transient: d ≥ 2 in general, d ≥ 3 when φ is linear
/// near zero (RelativisticStable, BrownianPlusStable), since those behave
/// like Brownian motion at large scales.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentSpec {
    kind: ExponentKind,
    dimension: usize,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && 0.0 < alpha && alpha < 2.0) {
        return Err(Error::domain("alpha out of range (0,2)"));
    }
    Ok(())
}

/// ln(1 + z) without cancellation for small |z|.
fn ln_1p_complex(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    Complex64::new(
        0.5 * (2.0 * x + x * x + y * y).ln_1p(),
        y.atan2(1.0 + x),
    )
}

/// e^w − 1 without cancellation for small |w|.
fn exp_m1_complex(w: Complex64) -> Complex64 {
    let ex = w.re.exp_m1();
    let (sin_y, cos_y) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    Complex64::new(ex * cos_y - 2.0 * half * half, (ex + 1.0) * sin_y)
}

impl ExponentSpec {
    pub fn new(kind: ExponentKind, dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::domain("dimension must be at least 2"));
        }
        match kind {
            ExponentKind::Stable { alpha } => check_alpha(alpha)?,
            ExponentKind::RelativisticStable { alpha, m } => {
                check_alpha(alpha)?;
                if !(m.is_finite() && m > 0.0) {
                    return Err(Error::domain("m must be positive"));
                }
                if dimension < 3 {
                    return Err(Error::domain(
                        "relativistic stable requires dimension >= 3 (recurrent in the plane)",
                    ));
                }
            }
            ExponentKind::StableMix { alpha, beta } => {
                check_alpha(alpha)?;
                if !(beta.is_finite() && 0.0 < beta && beta < alpha) {
                    return Err(Error::domain("beta out of range (0,alpha)"));
                }
            }
            ExponentKind::BrownianPlusStable { a, b, beta } => {
                if !(beta.is_finite() && 0.0 < beta && beta < 2.0) {
                    return Err(Error::domain("beta out of range (0,2)"));
                }
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::domain("a must be positive"));
                }
                if !(b.is_finite() && b > 0.0) {
                    return Err(Error::domain("b must be positive"));
                }
                if dimension < 3 {
                    return Err(Error::domain(
                        "brownian plus stable requires dimension >= 3",
                    ));
                }
            }
        }
        Ok(ExponentSpec { kind, dimension })
    }

    pub fn kind(&self) -> ExponentKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Scaling index at infinity: φ(λ) ≍ λ^{alpha_index/2} ℓ(λ) as λ → ∞.
    pub fn alpha_index(&self) -> f64 {
        match self.kind {
            ExponentKind::Stable { alpha } => alpha,
            ExponentKind::RelativisticStable { alpha, .. } => alpha,
            ExponentKind::StableMix { alpha, .. } => alpha,
            ExponentKind::BrownianPlusStable { .. } => 2.0,
        }
    }

    /// Drift coefficient of the subordinator (zero for pure-jump members).
    pub fn drift(&self) -> f64 {
        match self.kind {
            ExponentKind::BrownianPlusStable { a, .. } => a,
            _ => 0.0,
        }
    }

    /// Laplace exponent φ(λ), λ > 0.
    pub fn phi(&self, lambda: f64) -> f64 {
        debug_assert!(lambda > 0.0);
        match self.kind {
            ExponentKind::Stable { alpha } => lambda.powf(alpha / 2.0),
            ExponentKind::RelativisticStable { alpha, m } => {
                // (λ+θ)^{α/2} − θ^{α/2} written so λ ≪ θ does not cancel:
                // θ^{α/2} = m by construction.
                let theta = m.powf(2.0 / alpha);
                m * (0.5 * alpha * (lambda / theta).ln_1p()).exp_m1()
            }
            ExponentKind::StableMix { alpha, beta } => {
                lambda.powf(alpha / 2.0) + lambda.powf(beta / 2.0)
            }
            ExponentKind::BrownianPlusStable { a, b, beta } => {
                a * lambda + b.powf(beta) * lambda.powf(beta / 2.0)
            }
        }
    }

    /// φ continued to the cut plane C \ (−∞, 0], needed by the inversion
    /// contour. Principal branches throughout.
    pub fn phi_complex(&self, s: Complex64) -> Complex64 {
        match self.kind {
            ExponentKind::Stable { alpha } => s.powf(alpha / 2.0),
            ExponentKind::RelativisticStable { alpha, m } => {
                // Cancellation-free form; the inversion contour shrinks
                // toward the origin as t grows, making |s| ≪ θ routine.
                let theta = m.powf(2.0 / alpha);
                exp_m1_complex(ln_1p_complex(s / theta) * (0.5 * alpha)) * m
            }
            ExponentKind::StableMix { alpha, beta } => s.powf(alpha / 2.0) + s.powf(beta / 2.0),
            ExponentKind::BrownianPlusStable { a, b, beta } => {
                s * a + s.powf(beta / 2.0) * b.powf(beta)
            }
        }
    }

    /// Lévy density η(t), t > 0, of the subordinator.
    pub fn levy_density(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain("levy density requires t > 0"));
        }
        Ok(self.levy_density_unchecked(t))
    }

    fn levy_density_unchecked(&self, t: f64) -> f64 {
        fn stable_density(alpha: f64, t: f64) -> f64 {
            let rho = alpha / 2.0;
            rho / gamma(1.0 - rho) * t.powf(-1.0 - rho)
        }
        match self.kind {
            ExponentKind::Stable { alpha } => stable_density(alpha, t),
            ExponentKind::RelativisticStable { alpha, m } => {
                let theta = m.powf(2.0 / alpha);
                stable_density(alpha, t) * (-theta * t).exp()
            }
            ExponentKind::StableMix { alpha, beta } => {
                stable_density(alpha, t) + stable_density(beta, t)
            }
            ExponentKind::BrownianPlusStable { b, beta, .. } => {
                b.powf(beta) * stable_density(beta, t)
            }
        }
    }

    /// Potential density u(t): the density whose Laplace transform is 1/φ.
    ///
    /// Closed form t^{α/2−1}/Γ(α/2) for the stable member; fixed-Talbot
    /// inversion otherwise, with a Gaver–Stehfest retry when Talbot returns
    /// something non-finite or non-positive (u is strictly positive).
    pub fn potential_density(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain("potential density requires t > 0"));
        }
        if let ExponentKind::Stable { alpha } = self.kind {
            let rho = alpha / 2.0;
            return Ok(t.powf(rho - 1.0) / gamma(rho));
        }
        let hat = |s: Complex64| Complex64::new(1.0, 0.0) / self.phi_complex(s);
        let v = talbot(hat, t, TALBOT_NODES);
        if v.is_finite() && v > 0.0 {
            return Ok(v);
        }
        let v2 = gaver_stehfest(|s| 1.0 / self.phi(s), t, STEHFEST_TERMS);
        if v2.is_finite() && v2 > 0.0 {
            return Ok(v2);
        }
        Err(Error::Inversion {
            at: t,
            residual: v2,
            tolerance: 0.0,
        })
    }
}

fn integral_tol() -> QuadTol {
    QuadTol::new(0.0, 1e-10, 200)
}

const BLOCK: f64 = 4.0;
const MAX_BLOCKS: u32 = 400;

/// ∫_0^∞ f(t) dt split at `t_split`, both halves in log coordinates.
fn split_log_integral<F: Fn(f64) -> f64>(f: F, t_split: f64, tol: &QuadTol) -> Result<Estimate> {
    let s0 = t_split.ln();
    let g = |s: f64| {
        let t = s.exp();
        t * f(t)
    };
    let lower = march_down(&g, s0, BLOCK, tol, MAX_BLOCKS);
    let upper = march_up(&g, s0, BLOCK, tol, MAX_BLOCKS);
    let value = lower.value + upper.value;
    let error = lower.error + upper.error;
    if !(lower.converged && upper.converged) {
        return Err(Error::Tolerance {
            value,
            achieved: error,
            requested: tol.threshold(value),
            max_refinements: tol.max_refinements,
        });
    }
    Ok(Estimate { value, error })
}

/// φ(λ) rebuilt from drift and Lévy density:
/// a λ + ∫_0^∞ (1 − e^{−λ t}) η(t) dt, split at t = 1/λ.
pub fn reconstructed_phi(spec: &ExponentSpec, lambda: f64) -> Result<Estimate> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain("lambda must be positive"));
    }
    let tol = integral_tol();
    let jump = split_log_integral(
        |t| -(-lambda * t).exp_m1() * spec.levy_density_unchecked(t),
        1.0 / lambda,
        &tol,
    )?;
    Ok(Estimate {
        value: spec.drift() * lambda + jump.value,
        error: jump.error,
    })
}

/// ∫_0^∞ e^{−λ t} u(t) dt, split at t = 1/λ. Should equal 1/φ(λ).
pub fn potential_transform(spec: &ExponentSpec, lambda: f64) -> Result<Estimate> {
    potential_transform_scaled(spec, lambda, 1.0)
}

/// Fault-injection variant of [`potential_transform`]: every u(t) sample is
/// multiplied by `u_scale`. Used by the self-check runner to prove the
/// transform-identity test actually fails when fed a corrupted density.
pub fn potential_transform_scaled(
    spec: &ExponentSpec,
    lambda: f64,
    u_scale: f64,
) -> Result<Estimate> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain("lambda must be positive"));
    }
    let tol = integral_tol();
    let out = split_log_integral(
        // NaN poisons the quadrature, so inversion failures surface as a
        // non-finite rather than being silently skipped.
        |t| match spec.potential_density(t) {
            Ok(u) => u_scale * u * (-lambda * t).exp(),
            Err(_) => f64::NAN,
        },
        1.0 / lambda,
        &tol,
    )?;
    if out.value.is_finite() {
        Ok(out)
    } else {
        Err(Error::Inversion {
            at: lambda,
            residual: f64::NAN,
            tolerance: 0.0,
        })
    }
}

/// |φ(λ) · ∫ e^{−λt} u(t) dt − 1|, the transform-identity residual.
pub fn transform_identity_residual(spec: &ExponentSpec, lambda: f64) -> Result<f64> {
    let est = potential_transform(spec, lambda)?;
    Ok((spec.phi(lambda) * est.value - 1.0).abs())
}

/// Outcome of a Lévy–Khintchine reconstruction sweep.
#[derive(Clone, Debug)]
pub struct LevyKhintchineReport {
    pub max_rel_deviation: f64,
    pub worst_lambda: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub deviations: Vec<(f64, f64)>,
}

/// Reconstructs φ on `lambda_grid` from (drift, η) and compares with the
/// closed form, reporting the maximum relative deviation.
pub fn verify_levy_khintchine(
    spec: &ExponentSpec,
    lambda_grid: &[f64],
    tolerance: f64,
) -> Result<LevyKhintchineReport> {
    if lambda_grid.is_empty() {
        return Err(Error::domain("lambda grid must be non-empty"));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let mut max_dev = 0.0f64;
    let mut worst = lambda_grid[0];
    let mut deviations = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let rebuilt = reconstructed_phi(spec, lambda)?;
        let exact = spec.phi(lambda);
        let dev = ((rebuilt.value - exact) / exact).abs();
        deviations.push((lambda, dev));
        if dev > max_dev {
            max_dev = dev;
            worst = lambda;
        }
    }
    Ok(LevyKhintchineReport {
        max_rel_deviation: max_dev,
        worst_lambda: worst,
        tolerance,
        pass: max_dev <= tolerance,
        deviations,
    })
}

/// Reference parameter choices covering all four exponent families:
/// Stable{alpha: 1}, RelativisticStable{alpha: 1, m: 1}, StableMix{1.5, 0.5}
/// and BrownianPlusStable{1, 1, 1}. Families whose constraints exclude the
/// dimension are omitted (the relativistic and Brownian-plus-stable ones
/// need d >= 3, so `catalog(2)` has two entries).
///
/// Panics if `dimension < 2`.
pub fn catalog(dimension: usize) -> Vec<ExponentSpec> {
    let mut specs = vec![ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, dimension)
        .expect("catalog requires dimension >= 2")];
    if dimension >= 3 {
        specs.push(
            ExponentSpec::new(ExponentKind::RelativisticStable { alpha: 1.0, m: 1.0 }, dimension)
                .unwrap(),
        );
    }
    specs.push(
        ExponentSpec::new(
            ExponentKind::StableMix {
                alpha: 1.5,
                beta: 0.5,
            },
            dimension,
        )
        .unwrap(),
    );
    if dimension >= 3 {
        specs.push(
            ExponentSpec::new(
                ExponentKind::BrownianPlusStable {
                    a: 1.0,
                    b: 1.0,
                    beta: 1.0,
                },
                dimension,
            )
            .unwrap(),
        );
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn catalog_phi_closed_forms() {
        let d = 3;
        let stable = ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, d).unwrap();
        assert_relative_eq!(stable.phi(4.0), 2.0, max_relative = 1e-15);

        let rel =
            ExponentSpec::new(ExponentKind::RelativisticStable { alpha: 1.0, m: 1.0 }, d).unwrap();
        assert_relative_eq!(rel.phi(3.0), 1.0, max_relative = 1e-15);

        let mix = ExponentSpec::new(
            ExponentKind::StableMix {
                alpha: 1.5,
                beta: 0.5,
            },
            d,
        )
        .unwrap();
        assert_relative_eq!(mix.phi(1.0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(mix.phi(16.0), 16f64.powf(0.75) + 2.0, max_relative = 1e-15);

        let bs = ExponentSpec::new(
            ExponentKind::BrownianPlusStable {
                a: 2.0,
                b: 3.0,
                beta: 1.0,
            },
            d,
        )
        .unwrap();
        assert_relative_eq!(bs.phi(4.0), 8.0 + 6.0, max_relative = 1e-15);
        assert_relative_eq!(bs.alpha_index(), 2.0);
        assert_relative_eq!(bs.drift(), 2.0);
    }

    #[test]
    fn validation_rejects_out_of_range_parameters() {
        assert!(ExponentSpec::new(ExponentKind::Stable { alpha: 0.0 }, 3).is_err());
        assert!(ExponentSpec::new(ExponentKind::Stable { alpha: 2.0 }, 3).is_err());
        assert!(ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, 1).is_err());
        assert!(
            ExponentSpec::new(ExponentKind::RelativisticStable { alpha: 1.0, m: 0.0 }, 3).is_err()
        );
        // Linear-at-zero exponents are recurrent in the plane.
        assert!(
            ExponentSpec::new(ExponentKind::RelativisticStable { alpha: 1.0, m: 1.0 }, 2).is_err()
        );
        assert!(ExponentSpec::new(
            ExponentKind::StableMix {
                alpha: 0.5,
                beta: 1.5
            },
            2
        )
        .is_err());
        assert!(ExponentSpec::new(
            ExponentKind::BrownianPlusStable {
                a: 1.0,
                b: 1.0,
                beta: 1.0
            },
            2
        )
        .is_err());
    }

    #[test]
    fn stable_levy_density_reference_value() {
        // η(1) = (α/2)/Γ(1 − α/2) at α = 1 is 1/(2 sqrt(pi)).
        let spec = ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, 3).unwrap();
        assert_relative_eq!(
            spec.levy_density(1.0).unwrap(),
            0.5 / PI.sqrt(),
            max_relative = 1e-13
        );
        assert!(spec.levy_density(0.0).is_err());
    }

    #[test]
    fn mix_levy_density_is_componentwise_sum() {
        let mix = ExponentSpec::new(
            ExponentKind::StableMix {
                alpha: 1.5,
                beta: 0.5,
            },
            2,
        )
        .unwrap();
        let a = ExponentSpec::new(ExponentKind::Stable { alpha: 1.5 }, 2).unwrap();
        let b = ExponentSpec::new(ExponentKind::Stable { alpha: 0.5 }, 2).unwrap();
        for t in [0.1, 1.0, 7.3] {
            assert_relative_eq!(
                mix.levy_density(t).unwrap(),
                a.levy_density(t).unwrap() + b.levy_density(t).unwrap(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn relativistic_density_has_exponential_tilt() {
        // For α = 1, m = 1 the density is the stable one times e^{-t}; the
        // log-slope over [5, 20] is 1 + 1.5/t-ish, safely inside (1.0, 1.3).
        let spec =
            ExponentSpec::new(ExponentKind::RelativisticStable { alpha: 1.0, m: 1.0 }, 3).unwrap();
        let slope = (spec.levy_density(5.0).unwrap() / spec.levy_density(20.0).unwrap()).ln() / 15.0;
        assert!(slope > 1.0 && slope < 1.3, "slope {slope}");
    }

    #[test]
    fn stable_potential_density_closed_form() {
        let spec = ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, 3).unwrap();
        assert_relative_eq!(
            spec.potential_density(1.0).unwrap(),
            1.0 / PI.sqrt(),
            max_relative = 1e-13
        );
        // u(t) = t^{α/2-1}/Γ(α/2) tends to the flat density 1 as α → 2.
        let near2 = ExponentSpec::new(ExponentKind::Stable { alpha: 1.999 }, 3).unwrap();
        for t in [0.5, 1.0, 2.0] {
            assert!((near2.potential_density(t).unwrap() - 1.0).abs() < 5e-3);
        }
    }

    #[test]
    fn numeric_potential_density_matches_transform() {
        for spec in catalog(3) {
            for lambda in [0.07, 1.0, 31.0] {
                let res = transform_identity_residual(&spec, lambda).unwrap();
                assert!(res < 1e-6, "{:?} lambda={lambda}: residual {res:.2e}", spec.kind());
            }
        }
    }

    #[test]
    fn relativistic_phi_and_potential_density_survive_extreme_arguments() {
        // phi(λ) ~ (α/2)θ^{α/2−1}·λ as λ → 0 and u(t) → 1/phi'(0) as t → ∞.
        // Naive evaluation of (λ+θ)^{α/2} − m cancels to zero near λ = 0,
        // which used to poison inversion at large t.
        let spec =
            ExponentSpec::new(ExponentKind::RelativisticStable { alpha: 1.0, m: 1.0 }, 3).unwrap();
        assert_relative_eq!(spec.phi(1e-30), 0.5e-30, max_relative = 1e-12);
        for t in [1e10, 1e20, 1e26] {
            let u = spec.potential_density(t).unwrap();
            assert_relative_eq!(u, 2.0, max_relative = 1e-6);
        }
    }

    #[test]
    fn brownian_plus_stable_potential_density_approaches_reciprocal_drift() {
        // u(0+) = 1/a for a subordinator with drift a.
        let spec = ExponentSpec::new(
            ExponentKind::BrownianPlusStable {
                a: 2.0,
                b: 1.0,
                beta: 1.0,
            },
            3,
        )
        .unwrap();
        let u = spec.potential_density(1e-10).unwrap();
        assert_relative_eq!(u, 0.5, max_relative = 1e-4);
    }

    #[test]
    fn levy_khintchine_reconstruction_passes_catalog() {
        let grid = [0.1, 1.0, 10.0, 100.0];
        for spec in catalog(3) {
            let rep = verify_levy_khintchine(&spec, &grid, 1e-6).unwrap();
            assert!(
                rep.pass,
                "{:?}: max dev {:.2e} at lambda {}",
                spec.kind(),
                rep.max_rel_deviation,
                rep.worst_lambda
            );
        }
    }

    #[test]
    fn reconstruction_includes_drift_term() {
        let spec = ExponentSpec::new(
            ExponentKind::BrownianPlusStable {
                a: 1.0,
                b: 1.0,
                beta: 1.0,
            },
            3,
        )
        .unwrap();
        let est = reconstructed_phi(&spec, 1.0).unwrap();
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn empty_lambda_grid_is_rejected() {
        let spec = ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, 3).unwrap();
        assert!(verify_levy_khintchine(&spec, &[], 1e-6).is_err());
    }

    #[test]
    fn phi_is_increasing_and_midpoint_concave() {
        for spec in catalog(3) {
            let grid: Vec<f64> = (0..60).map(|i| 1e-3 * 1.3f64.powi(i)).collect();
            for w in grid.windows(2) {
                assert!(spec.phi(w[1]) > spec.phi(w[0]), "{:?}", spec.kind());
                let mid = 0.5 * (w[0] + w[1]);
                let chord = 0.5 * (spec.phi(w[0]) + spec.phi(w[1]));
                assert!(
                    spec.phi(mid) >= chord - 1e-12 * chord.abs(),
                    "{:?} concavity at {}",
                    spec.kind(),
                    mid
                );
            }
        }
    }

    #[test]
    fn log_log_slope_recovers_alpha_index_at_infinity() {
        for spec in catalog(3) {
            let lam = 1e8;
            let slope = spec.phi(lam).ln() / lam.ln();
            assert!(
                (slope - spec.alpha_index() / 2.0).abs() < 0.02,
                "{:?}: slope {slope}",
                spec.kind()
            );
        }
    }

    #[test]
    fn densities_are_completely_monotone_to_second_order() {
        // Spot check: decreasing and convex along a geometric grid.
        for spec in catalog(3) {
            let ts: Vec<f64> = (0..24).map(|i| 0.01 * 1.6f64.powi(i)).collect();
            for w in ts.windows(3) {
                let (e0, e1, e2) = (
                    spec.levy_density(w[0]).unwrap(),
                    spec.levy_density(w[1]).unwrap(),
                    spec.levy_density(w[2]).unwrap(),
                );
                assert!(e0 > e1 && e1 > e2, "eta not decreasing for {:?}", spec.kind());
                let (u0, u1, u2) = (
                    spec.potential_density(w[0]).unwrap(),
                    spec.potential_density(w[1]).unwrap(),
                    spec.potential_density(w[2]).unwrap(),
                );
                // Inverted densities flatten at large t; allow inversion noise.
                let slack = 1e-9 * u1.abs();
                assert!(
                    u0 >= u1 - slack && u1 >= u2 - slack,
                    "u not non-increasing for {:?} at {:?}",
                    spec.kind(),
                    w
                );
            }
        }
    }

    #[test]
    fn fault_hook_scales_the_transform() {
        let spec = ExponentSpec::new(ExponentKind::Stable { alpha: 1.0 }, 3).unwrap();
        let clean = potential_transform_scaled(&spec, 1.0, 1.0).unwrap();
        let scaled = potential_transform_scaled(&spec, 1.0, 1.01).unwrap();
        assert_relative_eq!(scaled.value / clean.value, 1.01, max_relative = 1e-9);
    }
}
