//! Half-space geometry and the two-sided kernel bounds that hold there.
//!
//! Points of H = {x_d > 0} carry their distance to the boundary as the last
//! coordinate. The Green function of the killed process and the Martin
//! kernel both admit two-sided comparisons against closed-form centers
//! built from the free kernel G and the renewal surrogate V̂; the
//! comparability constants are not explicit, so they enter as caller-chosen
//! parameters and the bounds are symmetric multiplicative envelopes.
//! For the stable exponent the Martin kernel is known exactly and doubles
//! as the oracle for the envelope checks.

use crate::bernstein::ExponentSpec;
use crate::error::{Error, Result};
use crate::kernels::{green_radial, renewal_surrogate, QuadratureConfig};

/// Radius of the window where the two-sided bounds are quantitatively
/// backed; outside it results carry a warning, not an error.
pub const COMPARABILITY_RADIUS: f64 = 1.0;

/// A point of the open half-space H = {x = (x̃, x_d) : x_d > 0}.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoint {
    x_tilde: Vec<f64>,
    x_d: f64,
}

impl HPoint {
    pub fn new(x_tilde: Vec<f64>, x_d: f64) -> Result<Self> {
        if !x_tilde.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("point coordinates must be finite"));
        }
        if !(x_d.is_finite() && x_d > 0.0) {
            return Err(Error::domain("interior points require x_d > 0"));
        }
        Ok(HPoint { x_tilde, x_d })
    }

    pub fn x_tilde(&self) -> &[f64] {
        &self.x_tilde
    }

    pub fn x_d(&self) -> f64 {
        self.x_d
    }

    /// Ambient dimension d.
    pub fn dimension(&self) -> usize {
        self.x_tilde.len() + 1
    }

    /// Distance to ∂H, which for the half-space is just the last coordinate.
    pub fn dist_to_boundary(&self) -> f64 {
        self.x_d
    }

    pub fn dist(&self, other: &HPoint) -> f64 {
        debug_assert_eq!(self.dimension(), other.dimension());
        let planar: f64 = self
            .x_tilde
            .iter()
            .zip(&other.x_tilde)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (planar + (self.x_d - other.x_d).powi(2)).sqrt()
    }

    pub fn dist_to_boundary_point(&self, z: &BoundaryPoint) -> f64 {
        debug_assert_eq!(self.dimension(), z.dimension());
        let planar: f64 = self
            .x_tilde
            .iter()
            .zip(&z.z_tilde)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (planar + self.x_d * self.x_d).sqrt()
    }

    /// Euclidean norm |x|.
    pub fn norm(&self) -> f64 {
        let planar: f64 = self.x_tilde.iter().map(|v| v * v).sum();
        (planar + self.x_d * self.x_d).sqrt()
    }
}

/// A point (z̃, 0) of the boundary hyperplane.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    z_tilde: Vec<f64>,
}

impl BoundaryPoint {
    pub fn new(z_tilde: Vec<f64>) -> Result<Self> {
        if !z_tilde.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("point coordinates must be finite"));
        }
        Ok(BoundaryPoint { z_tilde })
    }

    pub fn origin(dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::domain("dimension must be at least 2"));
        }
        Ok(BoundaryPoint {
            z_tilde: vec![0.0; dimension - 1],
        })
    }

    pub fn z_tilde(&self) -> &[f64] {
        &self.z_tilde
    }

    pub fn dimension(&self) -> usize {
        self.z_tilde.len() + 1
    }

    pub fn norm(&self) -> f64 {
        self.z_tilde.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// The normalization point x₀ = (0̃, 1) used by Martin-kernel conventions.
pub fn normalization_point(dimension: usize) -> Result<HPoint> {
    if dimension < 2 {
        return Err(Error::domain("dimension must be at least 2"));
    }
    HPoint::new(vec![0.0; dimension - 1], 1.0)
}

/// Symmetric multiplicative envelope around a computed center value.
#[derive(Clone, Copy, Debug)]
pub struct KernelBounds {
    pub lower: f64,
    pub upper: f64,
    pub comparability_constant: f64,
}

impl KernelBounds {
    fn around(center: f64, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 1.0) {
            return Err(Error::domain("comparability constant must be >= 1"));
        }
        if !(center.is_finite() && center > 0.0) {
            return Err(Error::domain("kernel center must be positive"));
        }
        Ok(KernelBounds {
            lower: center / c,
            upper: center * c,
            comparability_constant: c,
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// A kernel estimate: center value, its envelope, and whether the request
/// left the quantitatively backed window.
#[derive(Clone, Copy, Debug)]
pub struct BoundedKernelValue {
    pub center: f64,
    pub bounds: KernelBounds,
    pub range_warning: bool,
}

fn check_dimensions(spec: &ExponentSpec, dims: &[usize]) -> Result<()> {
    if dims.iter().any(|d| *d != spec.dimension()) {
        return Err(Error::domain("dimension mismatch between spec and points"));
    }
    Ok(())
}

/// Two-sided estimate of the half-space Green function:
/// center = (1 ∧ V̂(δ(x))/V̂(r)) (1 ∧ V̂(δ(y))/V̂(r)) G(r) with r = |x−y|.
/// Symmetric in (x, y); the center never exceeds the free G(r).
pub fn green_halfspace_bounds(
    spec: &ExponentSpec,
    x: &HPoint,
    y: &HPoint,
    comparability_constant: f64,
    q: &QuadratureConfig,
) -> Result<BoundedKernelValue> {
    check_dimensions(spec, &[x.dimension(), y.dimension()])?;
    if x == y {
        return Err(Error::domain("half-space green bounds require x != y"));
    }
    let r = x.dist(y);
    let g = green_radial(spec, r, q)?;
    let v_r = renewal_surrogate(spec, r)?;
    let fx = (renewal_surrogate(spec, x.dist_to_boundary())? / v_r).min(1.0);
    let fy = (renewal_surrogate(spec, y.dist_to_boundary())? / v_r).min(1.0);
    let center = fx * fy * g.value;
    let range_warning = r >= COMPARABILITY_RADIUS
        || x.dist_to_boundary().min(y.dist_to_boundary()) >= COMPARABILITY_RADIUS;
    Ok(BoundedKernelValue {
        center,
        bounds: KernelBounds::around(center, comparability_constant)?,
        range_warning,
    })
}

/// Two-sided estimate of the Martin kernel at boundary point z:
/// center = V̂(δ(x)) |x−z|^{−d} (1+|z|²)^{d/2}.
pub fn martin_kernel_bounds(
    spec: &ExponentSpec,
    x: &HPoint,
    z: &BoundaryPoint,
    comparability_constant: f64,
) -> Result<BoundedKernelValue> {
    check_dimensions(spec, &[x.dimension(), z.dimension()])?;
    let r = x.dist_to_boundary_point(z);
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::domain("martin kernel requires x != z"));
    }
    let d = spec.dimension() as f64;
    let v = renewal_surrogate(spec, x.dist_to_boundary())?;
    let center = v * r.powf(-d) * (1.0 + z.norm().powi(2)).powf(0.5 * d);
    let range_warning =
        z.norm() >= COMPARABILITY_RADIUS || r >= 0.5 * COMPARABILITY_RADIUS;
    Ok(BoundedKernelValue {
        center,
        bounds: KernelBounds::around(center, comparability_constant)?,
        range_warning,
    })
}

/// Where a Martin kernel is anchored: a finite boundary point or infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum MartinTarget {
    Boundary(BoundaryPoint),
    Infinity,
}

/// Exact Martin kernel of the rotationally symmetric stable process in H
/// (α = 2 gives the killed-Brownian kernel of the same shape):
/// M(x, z) = δ(x)^{α/2} |x−z|^{−d} (1+|z|²)^{d/2}, M(x, ∞) = δ(x)^{α/2}.
pub fn stable_martin_kernel(
    alpha: f64,
    dimension: usize,
    x: &HPoint,
    target: &MartinTarget,
) -> Result<f64> {
    if !(alpha.is_finite() && 0.0 < alpha && alpha <= 2.0) {
        return Err(Error::domain("alpha out of range (0,2]"));
    }
    if dimension < 2 || x.dimension() != dimension {
        return Err(Error::domain("dimension mismatch between request and point"));
    }
    let half = 0.5 * alpha;
    match target {
        MartinTarget::Infinity => Ok(x.dist_to_boundary().powf(half)),
        MartinTarget::Boundary(z) => {
            if z.dimension() != dimension {
                return Err(Error::domain("dimension mismatch between request and point"));
            }
            let r = x.dist_to_boundary_point(z);
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::domain("martin kernel requires x != z"));
            }
            let d = dimension as f64;
            Ok(x.dist_to_boundary().powf(half)
                * r.powf(-d)
                * (1.0 + z.norm().powi(2)).powf(0.5 * d))
        }
    }
}

/// Boundary-Harnack diagnostic over samples of one nonnegative function h:
/// the largest pairwise ratio of h(x)/V̂(δ(x)). For h harmonic and vanishing
/// near a boundary ball the ratio stays bounded by a constant depending
/// only on the window; the check records the observed maximum.
#[derive(Clone, Copy, Debug)]
pub struct BhpReport {
    pub max_pair_ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn bhp_ratio_check(
    spec: &ExponentSpec,
    h_samples: &[(HPoint, f64)],
    bound: f64,
) -> Result<BhpReport> {
    if h_samples.is_empty() {
        return Err(Error::domain("bhp check requires at least one sample"));
    }
    if !(bound.is_finite() && bound >= 1.0) {
        return Err(Error::domain("bhp bound must be >= 1"));
    }
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for (x, h) in h_samples {
        check_dimensions(spec, &[x.dimension()])?;
        if !(h.is_finite() && *h > 0.0) {
            return Err(Error::domain("bhp samples must be positive"));
        }
        let t = h / renewal_surrogate(spec, x.dist_to_boundary())?;
        lo = lo.min(t);
        hi = hi.max(t);
    }
    let max_pair_ratio = hi / lo;
    Ok(BhpReport {
        max_pair_ratio,
        bound,
        pass: max_pair_ratio <= bound,
    })
}
