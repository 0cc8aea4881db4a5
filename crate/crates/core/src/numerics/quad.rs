//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Infinite limits are handled by truncation against a declared Gaussian envelope
//! `|f(x)| <= amplitude * exp(-((x - center) / scale)^2 / 2)`: the range is cut where
//! the envelope drops below `abs_tol / 100` and the envelope's tail mass is added to
//! the error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::normal::std_normal_cdf;
use crate::{Error, Result};

/// Refinement budget in integrand evaluations.
pub const MAX_EVALUATIONS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error bound estimate (non-negative).
    pub err_estimate: f64,
    pub evaluations: usize,
}

/// Gaussian tail bound used to truncate infinite integration limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEnvelope {
    pub center: f64,
    pub scale: f64,
    pub amplitude: f64,
}

impl TailEnvelope {
    pub fn gaussian(center: f64, scale: f64, amplitude: f64) -> Self {
        TailEnvelope { center, scale, amplitude }
    }

    /// Distance (in units of `scale`) beyond which the envelope is below `level`.
    fn cutoff(&self, level: f64) -> f64 {
        let ratio = self.amplitude / level;
        if ratio <= 1.0 {
            0.0
        } else {
            (2.0 * ratio.ln()).sqrt()
        }
    }

    /// Integral of the envelope beyond `t` scale units on one side.
    fn tail_mass(&self, t: f64) -> f64 {
        self.amplitude * self.scale * (2.0 * std::f64::consts::PI).sqrt() * std_normal_cdf(-t)
    }
}

impl Default for TailEnvelope {
    fn default() -> Self {
        TailEnvelope::gaussian(0.0, 1.0, 1.0)
    }
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_evaluations: usize,
    pub envelope: TailEnvelope,
    /// Interior points where the integrand may have a kink.
    pub breakpoints: Vec<f64>,
}

impl QuadOptions {
    pub fn new(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            max_evaluations: MAX_EVALUATIONS,
            envelope: TailEnvelope::default(),
            breakpoints: Vec::new(),
        }
    }

    pub fn envelope(mut self, envelope: TailEnvelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn breakpoints(mut self, points: &[f64]) -> Self {
        self.breakpoints = points.to_vec();
        self
    }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `abs_tol`.
pub fn quad_integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64) -> Result<QuadResult> {
    quad_integrate_with(f, lo, hi, &QuadOptions::new(abs_tol))
}

pub fn quad_integrate_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidParams(format!("abs_tol > 0 required, got {}", opts.abs_tol)));
    }
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(Error::InvalidParams(format!("quadrature needs lo < hi, got [{lo}, {hi}]")));
    }

    let env = &opts.envelope;
    let mut tail_err = 0.0;
    let cut = env.cutoff(opts.abs_tol / 100.0);
    let (mut a, mut b) = (lo, hi);
    if lo.is_infinite() {
        a = env.center - env.scale * cut;
        tail_err += env.tail_mass(cut);
    }
    if hi.is_infinite() {
        b = env.center + env.scale * cut;
        tail_err += env.tail_mass(cut);
    }
    if a >= b {
        // The whole range lies in the negligible tail.
        return Ok(QuadResult { value: 0.0, err_estimate: tail_err, evaluations: 1 });
    }

    let mut cuts = vec![a];
    let mut bps: Vec<f64> = opts.breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    bps.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    bps.dedup();
    cuts.extend(bps);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let seg = Segment::new(&f, w[0], w[1]);
        evaluations += 15;
        total += seg.value;
        total_err += seg.err;
        heap.push(seg);
    }

    let min_width = 64.0 * f64::EPSILON * (b - a);
    while total_err + tail_err > opts.abs_tol {
        if evaluations + 30 > opts.max_evaluations {
            return Err(Error::NonConvergence {
                value: total,
                err_estimate: total_err + tail_err,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else { break };
        if worst.hi - worst.lo <= min_width {
            // Cannot be refined further; keep it and give up on tightening.
            heap.push(worst);
            return Err(Error::NonConvergence {
                value: total,
                err_estimate: total_err + tail_err,
                evaluations,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = Segment::new(&f, worst.lo, mid);
        let right = Segment::new(&f, mid, worst.hi);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        // Re-sum periodically to keep the running totals free of drift.
        if evaluations % 30_000 < 30 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let err: f64 = heap.iter().map(|s| s.err).sum::<f64>() + tail_err;
    Ok(QuadResult { value, err_estimate: err.max(0.0), evaluations })
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl Segment {
    fn new<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Self {
        let (value, err) = gauss_kronrod_15(f, lo, hi);
        Segment { lo, hi, value, err }
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
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
        self.err.total_cmp(&other.err)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Returns (Kronrod estimate, |Kronrod − Gauss|).
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}
