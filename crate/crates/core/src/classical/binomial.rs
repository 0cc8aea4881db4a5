use serde::{Deserialize, Serialize};

use crate::numerics::{std_normal_cdf, KahanSum};
use crate::{Error, Result};

/// Normalised Binomial(n, p) probabilities on the window of k where they do not
/// underflow, built by the ratio recurrence outward from the mode.
fn binomial_window(n: u64, p: f64) -> (u64, Vec<f64>) {
    let log_odds = (p / (1.0 - p)).ln();
    let mode = (((n + 1) as f64 * p).floor() as u64).min(n);
    const FLOOR: f64 = -745.0;

    let mut up = Vec::new();
    let mut l = 0.0;
    let mut k = mode;
    while k < n {
        l += ((n - k) as f64 / (k + 1) as f64).ln() + log_odds;
        if l < FLOOR {
            break;
        }
        up.push(l);
        k += 1;
    }
    let mut down = Vec::new();
    let mut l = 0.0;
    let mut k = mode;
    while k > 0 {
        l -= ((n - k + 1) as f64 / k as f64).ln() + log_odds;
        if l < FLOOR {
            break;
        }
        down.push(l);
        k -= 1;
    }
    let lo = mode - down.len() as u64;
    let logs: Vec<f64> = down.iter().rev().copied().chain(std::iter::once(0.0)).chain(up).collect();
    let weights: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let total = weights.iter().copied().collect::<KahanSum>().value();
    (lo, weights.into_iter().map(|w| w / total).collect())
}

fn binomial_mass_where(n: u64, p: f64, keep: impl Fn(u64) -> bool) -> f64 {
    let (lo, probs) = binomial_window(n, p);
    probs
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(lo + *i as u64))
        .map(|(_, w)| *w)
        .collect::<KahanSum>()
        .value()
}

/// Exact P(a < (S_n − np)/√(np(1−p)) ≤ b) for S_n ~ Binomial(n, p).
pub fn binomial_standardized_prob(n: u64, p: f64, a: f64, b: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams(format!("p must lie in (0, 1), got {p}")));
    }
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    if !(a < b) {
        return Err(Error::InvalidParams(format!("need a < b, got a={a}, b={b}")));
    }
    let mean = n as f64 * p;
    let sd = (mean * (1.0 - p)).sqrt();
    Ok(binomial_mass_where(n, p, |k| {
        let z = (k as f64 - mean) / sd;
        a < z && z <= b
    }))
}

/// Inputs to Laplace's approximation of P(|S_n − np − z| ≤ a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceParams {
    pub n: u64,
    pub p: f64,
    pub z: f64,
    pub a: f64,
}

impl LaplaceParams {
    pub fn new(n: u64, p: f64, z: f64, a: f64) -> Result<Self> {
        let lp = LaplaceParams { n, p, z, a };
        lp.validate()?;
        Ok(lp)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParams(format!("need n >= 1 and p in (0, 1), got n={}, p={}", self.n, self.p)));
        }
        if !(self.z.abs() < 1.0) || !(self.a >= 0.0) {
            return Err(Error::InvalidParams(format!("need |z| < 1 and a >= 0, got z={}, a={}", self.z, self.a)));
        }
        let (x, x_prime) = self.x_pair();
        if !(x > 0.0 && x_prime > 0.0) {
            return Err(Error::InvalidParams(format!("need x = np + z > 0 and x' = n(1-p) - z > 0, got {x}, {x_prime}")));
        }
        Ok(())
    }

    /// (x, x') = (np + z, n(1 − p) − z).
    pub fn x_pair(&self) -> (f64, f64) {
        let n = self.n as f64;
        (n * self.p + self.z, n * (1.0 - self.p) - self.z)
    }
}

/// 2(Φ(a√n/√(xx')) − Φ(0)) + √n/√(2πx'x)·exp(−a²n/(2x'x)).
pub fn laplace_approx(lp: &LaplaceParams) -> Result<f64> {
    lp.validate()?;
    let n = lp.n as f64;
    let (x, x_prime) = lp.x_pair();
    let xx = x * x_prime;
    let normal_part = 2.0 * (std_normal_cdf(lp.a * n.sqrt() / xx.sqrt()) - std_normal_cdf(0.0));
    let correction = n.sqrt() / (2.0 * std::f64::consts::PI * xx).sqrt() * (-lp.a * lp.a * n / (2.0 * xx)).exp();
    Ok(normal_part + correction)
}

/// Exact P(|S_n − np − z| ≤ a) by binomial summation.
pub fn laplace_exact(lp: &LaplaceParams) -> Result<f64> {
    lp.validate()?;
    let center = lp.n as f64 * lp.p + lp.z;
    Ok(binomial_mass_where(lp.n, lp.p, |k| (k as f64 - center).abs() <= lp.a))
}
