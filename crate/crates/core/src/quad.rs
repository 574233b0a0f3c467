//! Adaptive Gauss–Kronrod quadrature tuned for the oscillatory bath
//! integrands of this crate, plus a symmetric-excision principal-value
//! integrator with Richardson extrapolation.
//!
//! The integrands we face oscillate on two scales at once (the elapsed
//! time `t` and the sound-travel scale `R/c`), so a single adaptive pass
//! starting from one interval wastes most of its budget discovering the
//! oscillation. Instead the driver seeds the subdivision with segments no
//! wider than the shortest oscillation period and then refines the worst
//! segments until the combined error estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [-1, 1] (positive half; symmetric).
#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 7-point Gauss weights embedded in the 15-point rule.
#[allow(clippy::excessive_precision)]
const WG15: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Tolerances and budget for one quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on the total number of segments (initial + refinements).
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_segments: 400_000,
        }
    }
}

impl QuadOptions {
    /// Loosen (or tighten) both tolerances by a multiplicative factor.
    pub fn scaled(self, factor: f64) -> Self {
        QuadOptions {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..self
        }
    }
}

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub segments: usize,
}

/// Compensated (Kahan) accumulator; keeps segment sums reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Apply the 15-point Gauss–Kronrod rule on [a, b].
///
/// Returns (kronrod estimate, error estimate). The nodes are interior, so
/// `f` is never evaluated at the endpoints; integrands with a removable
/// endpoint singularity (e.g. at omega = 0) are safe.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK15[7];
    let mut gauss = fc * WG15[3];
    let mut resabs = kronrod.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for (j, &x) in XGK15.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        kronrod += WGK15[j] * fsum;
        resabs += WGK15[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG15[j / 2] * fsum;
        }
    }

    let mean = kronrod * 0.5;
    let mut resasc = WGK15[7] * (fc - mean).abs();
    for (j, &v) in fv.iter().enumerate().take(7) {
        resasc += WGK15[j] * ((v - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();

    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error estimate; ties broken by left endpoint for
        // reproducibility
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

/// Build the initial segment edges for [a, b]: never wider than `scale`
/// (the shortest oscillation period), split additionally at each interior
/// breakpoint.
pub fn oscillatory_edges(a: f64, b: f64, scale: f64, breakpoints: &[f64]) -> Vec<f64> {
    assert!(b > a, "empty integration domain");
    let mut knots: Vec<f64> = vec![a, b];
    knots.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    // cap the seed count; the adaptive pass can still refine further
    let min_width = (b - a) / 150_000.0;
    let width = scale.max(min_width);

    let mut edges = Vec::new();
    for pair in knots.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let n = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        for i in 0..n {
            edges.push(lo + h * i as f64);
        }
    }
    edges.push(b);
    edges
}

/// Integrate `f` over the union of the segments defined by `edges`,
/// refining adaptively until the summed error estimate meets tolerance.
pub fn integrate_edges<F: Fn(f64) -> f64>(
    f: &F,
    edges: &[f64],
    opts: &QuadOptions,
) -> Result<Quadrature> {
    assert!(edges.len() >= 2);
    let mut heap: BinaryHeap<Segment> = BinaryHeap::with_capacity(edges.len() + 64);
    for pair in edges.windows(2) {
        let (value, error) = gauss_kronrod_15(f, pair[0], pair[1]);
        heap.push(Segment {
            a: pair[0],
            b: pair[1],
            value,
            error,
        });
    }

    let tolerance_met = |heap: &BinaryHeap<Segment>| {
        let mut v = KahanSum::default();
        let mut e = KahanSum::default();
        for s in heap.iter() {
            v.add(s.value);
            e.add(s.error);
        }
        let target = opts.abs_tol.max(opts.rel_tol * v.value().abs());
        (v.value(), e.value(), target)
    };

    let (_, mut error, mut target) = tolerance_met(&heap);
    // refine in batches; re-totalling every split would be quadratic
    while error > target && heap.len() < opts.max_segments {
        let batch = (heap.len() / 8).clamp(1, 1024);
        for _ in 0..batch {
            let worst = match heap.pop() {
                Some(s) => s,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval at floating-point resolution; keep as is
                heap.push(worst);
                break;
            }
            for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
                let (v, e) = gauss_kronrod_15(f, lo, hi);
                heap.push(Segment {
                    a: lo,
                    b: hi,
                    value: v,
                    error: e,
                });
            }
        }
        let totals = tolerance_met(&heap);
        error = totals.1;
        target = totals.2;
    }

    // deterministic final sum: ascending by left endpoint
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut v = KahanSum::default();
    let mut e = KahanSum::default();
    for s in &segs {
        v.add(s.value);
        e.add(s.error);
    }
    let value = v.value();
    let error = e.value();
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());

    if error > target {
        return Err(Error::IntegrationFailure {
            residual: error,
            target,
        });
    }
    Ok(Quadrature {
        value,
        abs_error: error,
        segments: segs.len(),
    })
}

/// Convenience wrapper: oscillation-aware segmentation, then refinement.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    scale: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<Quadrature> {
    let edges = oscillatory_edges(a, b, scale, breakpoints);
    integrate_edges(f, &edges, opts)
}

/// Result of a principal-value integration.
#[derive(Debug, Clone, Copy)]
pub struct PvQuadrature {
    pub value: f64,
    /// Spread between the last two Richardson levels.
    pub extrapolation_spread: f64,
    /// Summed quadrature error of the excised integrals.
    pub quad_error: f64,
}

/// Cauchy principal value of `f` over [a, b] around a simple pole.
///
/// Symmetric excision of half-width eps is applied at the pole for
/// eps in {1e-2, 1e-3, 1e-4} * pole, and the leftover O(eps) bias is
/// removed by two levels of linear Richardson extrapolation. Segments are
/// graded geometrically towards the excision edges so the 1/(omega - pole)
/// growth is resolved.
pub fn principal_value<F: Fn(f64) -> f64>(
    f: &F,
    pole: f64,
    a: f64,
    b: f64,
    scale: f64,
    opts: &QuadOptions,
) -> Result<PvQuadrature> {
    assert!(pole > a && pole < b, "pole must lie inside the domain");
    let fractions = [1e-2, 1e-3, 1e-4];
    let mut estimates = [0.0f64; 3];
    let mut quad_error = 0.0f64;

    for (i, frac) in fractions.iter().enumerate() {
        let eps = frac * pole;
        let mut breaks = Vec::new();
        // geometric grading on both flanks of the pole
        let mut w = eps;
        while w < (b - a) && w < 16.0 * fractions[0] * pole {
            breaks.push(pole - w);
            breaks.push(pole + w);
            w *= 2.0;
        }

        let lo_edges = oscillatory_edges(a, pole - eps, scale, &breaks);
        let hi_edges = oscillatory_edges(pole + eps, b, scale, &breaks);
        let lo = integrate_edges(f, &lo_edges, opts)?;
        let hi = integrate_edges(f, &hi_edges, opts)?;
        estimates[i] = lo.value + hi.value;
        quad_error = quad_error.max(lo.abs_error + hi.abs_error);
    }

    // I(eps) = PV + b*eps + O(eps^3): eliminate the linear term twice
    let lin = |e1: f64, i1: f64, e2: f64, i2: f64| (i2 * e1 - i1 * e2) / (e1 - e2);
    let e: Vec<f64> = fractions.iter().map(|f| f * pole).collect();
    let r1 = lin(e[0], estimates[0], e[1], estimates[1]);
    let r2 = lin(e[1], estimates[1], e[2], estimates[2]);
    let spread = (r2 - r1).abs();

    // extrapolation is declared non-convergent when the two levels disagree
    // far beyond both the quadrature error and a loose relative band; the
    // error carries the last two raw excision estimates
    let band = 1e-2 * r2.abs() + 1e3 * quad_error + opts.abs_tol;
    if !spread.is_finite() || spread > band {
        return Err(Error::ExtrapolationDiverged {
            first: estimates[1],
            second: estimates[2],
        });
    }

    Ok(PvQuadrature {
        value: r2,
        extrapolation_spread: spread,
        quad_error,
    })
}
