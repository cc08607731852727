//! Small special-function helpers shared across modules.

use crate::error::{Error, Result};

/// Gamma function. Thin wrapper so the chosen backend is swappable in one
/// place; accuracy is pinned by tests to 1e-12 relative on (0, 10].
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// log Γ(x) for x > 0, used where Γ itself would overflow or underflow.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Surface area of the unit sphere S^{k} embedded in R^{k+1}:
/// sigma_k = 2 pi^{(k+1)/2} / Gamma((k+1)/2).
///
/// k = 0 gives 2 (two points), k = 1 gives 2 pi, k = 2 gives 4 pi.
pub fn sphere_surface(k: usize) -> f64 {
    let half = (k as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// Surface area of the unit sphere in R^d, i.e. |S^{d-1}|.
pub fn unit_sphere_area(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    Ok(sphere_surface(d - 1))
}

/// Euclidean norm of a coordinate slice.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Squared distance between two coordinate slices of equal length.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Points r_0 < r_1 < ... spanning [lo, hi] with `per_decade` points per
/// factor of 10, endpoints included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::domain("log grid requires 0 < lo < hi, both finite"));
    }
    if per_decade == 0 {
        return Err(Error::domain("log grid requires at least one point per decade"));
    }
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let r = lo * 10f64.powf(decades * i as f64 / n as f64);
        out.push(r.min(hi));
    }
    *out.last_mut().unwrap() = hi;
    Ok(out)
}
