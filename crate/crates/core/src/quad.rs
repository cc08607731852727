//! Adaptive Gauss–Kronrod quadrature with honest error estimates.
//!
//! A 7/15 Gauss–Kronrod panel supplies the local value/error pair and a
//! worst-segment bisection loop drives the global estimate. Semi-infinite
//! integrals are handled by block marching: fixed-width blocks are summed
//! until a block's contribution is negligible relative to the running total,
//! and a geometric extrapolation of the last block ratio is folded into the
//! reported error as the truncation term. Callers are expected to have
//! substituted variables so integrands decay at least geometrically in the
//! marching variable; the marching loop reports failure when they do not.

/// Tolerance request for one integral. The integral is accepted once the
/// accumulated error estimate drops below `max(abs_tol, rel_tol * |value|)`.
#[derive(Clone, Copy, Debug)]
pub struct QuadTol {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl QuadTol {
    pub fn new(abs_tol: f64, rel_tol: f64, max_refinements: u32) -> Self {
        QuadTol {
            abs_tol,
            rel_tol,
            max_refinements,
        }
    }

    pub fn threshold(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Tightened request, used when an outer computation needs headroom.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadTol {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_refinements: self.max_refinements,
        }
    }
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol::new(1e-10, 1e-8, 200)
    }
}

/// Result of one quadrature. `converged` records whether the tolerance was
/// met; the value and error estimate are meaningful either way.
#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evals: u64,
}

/// A value with its accumulated numerical error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl QuadOutcome {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value,
            error: self.error,
        }
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with
// the embedded 7-point Gauss weights. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    value: f64,
    error: f64,
}

/// One 7/15 panel over [a, b] with the QUADPACK error rescaling.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [[0.0f64; 2]; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = [f1, f2];
        let sum = f1 + f2;
        resk += WGK[j] * sum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j][0] - reskh).abs() + (fv[j][1] - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1f64.min((200.0 * err / resasc).powf(1.5));
    }
    let eps = f64::EPSILON;
    let floor = 50.0 * eps * resabs;
    if floor > f64::MIN_POSITIVE / (50.0 * eps) {
        err = err.max(floor);
    }
    Panel { value, error: err }
}

/// Adaptive quadrature over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: &QuadTol) -> QuadOutcome {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive quadrature over [points[0], points[last]] with the interior
/// points used as initial segment boundaries (kinks, corners, split points).
/// Points must be finite and strictly increasing.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: &QuadTol,
) -> QuadOutcome {
    assert!(points.len() >= 2, "need at least two segment boundaries");
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));

    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }

    let mut evals: u64 = 0;
    let mut segs: Vec<Seg> = Vec::with_capacity(points.len() + 16);
    for w in points.windows(2) {
        let p = gk15(&mut f, w[0], w[1]);
        evals += 15;
        segs.push(Seg {
            a: w[0],
            b: w[1],
            value: p.value,
            error: p.error,
        });
    }

    let mut refinements = 0;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return QuadOutcome {
                value: total,
                error: f64::INFINITY,
                converged: false,
                evals,
            };
        }
        if err <= tol.threshold(total) {
            return QuadOutcome {
                value: total,
                error: err,
                converged: true,
                evals,
            };
        }
        if refinements >= tol.max_refinements {
            return QuadOutcome {
                value: total,
                error: err,
                converged: false,
                evals,
            };
        }

        // Deterministic worst-first selection: largest error, leftmost wins ties.
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            if s.error > segs[worst].error {
                worst = i;
            }
        }
        let Seg { a, b, .. } = segs[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // Width underflow: cannot refine further.
            let total: f64 = segs.iter().map(|s| s.value).sum();
            let err: f64 = segs.iter().map(|s| s.error).sum();
            return QuadOutcome {
                value: total,
                error: err,
                converged: err <= tol.threshold(total),
                evals,
            };
        }
        let left = gk15(&mut f, a, mid);
        let right = gk15(&mut f, mid, b);
        evals += 30;
        segs[worst] = Seg {
            a,
            b: mid,
            value: left.value,
            error: left.error,
        };
        segs.push(Seg {
            a: mid,
            b,
            value: right.value,
            error: right.error,
        });
        refinements += 1;
    }
}

/// Outcome of block marching, with the index of the last block evaluated.
#[derive(Clone, Copy, Debug)]
pub struct MarchOutcome {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evals: u64,
    pub blocks: u32,
}

impl MarchOutcome {
    pub fn quad(self) -> QuadOutcome {
        QuadOutcome {
            value: self.value,
            error: self.error,
            converged: self.converged,
            evals: self.evals,
        }
    }
}

fn march<F: FnMut(f64) -> f64>(
    mut f: F,
    s0: f64,
    block: f64,
    upward: bool,
    tol: &QuadTol,
    max_blocks: u32,
) -> MarchOutcome {
    assert!(block > 0.0 && block.is_finite());
    let mut total = 0.0f64;
    let mut err = 0.0f64;
    let mut evals = 0u64;
    let mut prev_mag: Option<f64> = None;
    let mut last_ratio = 0.5f64; // geometric fallback when only one block seen
    let mut quiet_blocks = 0u32;

    for k in 0..max_blocks {
        let (a, b) = if upward {
            (s0 + k as f64 * block, s0 + (k + 1) as f64 * block)
        } else {
            (s0 - (k + 1) as f64 * block, s0 - k as f64 * block)
        };
        let inner = integrate(&mut f, a, b, &tol.scaled(0.25));
        evals += inner.evals;
        total += inner.value;
        err += inner.error;

        let mag = inner.value.abs();
        if !mag.is_finite() {
            return MarchOutcome {
                value: total,
                error: f64::INFINITY,
                converged: false,
                evals,
                blocks: k + 1,
            };
        }
        if let Some(p) = prev_mag {
            if p > 0.0 && mag > 0.0 {
                last_ratio = mag / p;
            }
        }
        if mag > 0.0 {
            prev_mag = Some(mag);
        }

        let negligible = mag <= 0.01 * tol.threshold(total);
        if negligible {
            quiet_blocks += 1;
        } else {
            quiet_blocks = 0;
        }
        if quiet_blocks >= 2 {
            // Truncation: extrapolate the remaining tail geometrically from
            // the last observed decay ratio; refuse ratios near 1.
            let q = last_ratio.min(0.95);
            let tail = if let Some(p) = prev_mag {
                p * q / (1.0 - q)
            } else {
                0.0
            };
            return MarchOutcome {
                value: total,
                error: err + tail.min(tol.threshold(total)),
                converged: true,
                evals,
                blocks: k + 1,
            };
        }
    }

    MarchOutcome {
        value: total,
        error: err + prev_mag.unwrap_or(0.0),
        converged: false,
        evals,
        blocks: max_blocks,
    }
}

/// ∫_{s0}^{∞} f(s) ds by fixed-width block marching.
pub fn march_up<F: FnMut(f64) -> f64>(
    f: F,
    s0: f64,
    block: f64,
    tol: &QuadTol,
    max_blocks: u32,
) -> MarchOutcome {
    march(f, s0, block, true, tol, max_blocks)
}

/// ∫_{-∞}^{s0} f(s) ds by fixed-width block marching.
pub fn march_down<F: FnMut(f64) -> f64>(
    f: F,
    s0: f64,
    block: f64,
    tol: &QuadTol,
    max_blocks: u32,
) -> MarchOutcome {
    march(f, s0, block, false, tol, max_blocks)
}
