//! Shared numerical primitives.

mod grid;
pub mod ks;
mod normal;
mod quad;
mod rng;

pub use grid::Grid1D;
pub use normal::{std_normal_cdf, std_normal_pdf, FRAC_1_SQRT_2PI};
pub use quad::{quad_integrate, quad_integrate_with, QuadOptions, QuadResult, TailEnvelope, MAX_EVALUATIONS};
pub use rng::{
    block_rng, cumulative, draw_index, rademacher_stream, rademacher_sum, run_blocks, uniform01, SeedSpec,
    StreamRng, MC_BLOCK,
};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().copied().collect::<KahanSum>().value() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = xs
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<KahanSum>()
        .value();
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}
