//! The two explicit nonlinear normal densities and their parameter-selection rules.
//!
//! `chen_epstein_pdf` is the limit density for mean uncertainty with symmetric,
//! one-sided monotone test functions; `cez_pdf` is the limit density for variance
//! uncertainty with S-shaped test functions.

mod params;

pub use params::{
    select_mean_limit_params, select_variance_limit_params, Convexity, DensityParams, Envelope,
    MeanInterval, Monotonicity, Side, VarianceInterval,
};

use serde::{Deserialize, Serialize};

use crate::numerics::{
    quad_integrate_with, std_normal_cdf, Grid1D, QuadOptions, QuadResult, TailEnvelope, FRAC_1_SQRT_2PI,
};
use crate::report::{Cell, Table};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ChenEpstein,
    Cez,
}

/// Mills ratio Φ(−z)/φ(z).
fn mills_ratio(z: f64) -> f64 {
    if z < 8.0 {
        return std_normal_cdf(-z) / (FRAC_1_SQRT_2PI * (-0.5 * z * z).exp());
    }
    // Continued fraction 1/(z + 1/(z + 2/(z + 3/(z + ...)))), evaluated bottom-up.
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + k as f64 / tail;
    }
    1.0 / tail
}

/// Chen–Epstein density f^{α,β,c}(y). All real parameters are admissible.
pub fn chen_epstein_pdf(p: &DensityParams, y: f64) -> f64 {
    let DensityParams { alpha, beta, c } = *p;
    let dist_c = (y - c).abs();
    let offset = (c - beta).abs();
    let quad = (y - beta) * (y - beta) - 2.0 * alpha * (dist_c - offset) + alpha * alpha;
    let first = FRAC_1_SQRT_2PI * (-0.5 * quad).exp();
    if alpha == 0.0 {
        return first;
    }
    let z = offset + dist_c + alpha;
    let second = if z <= 5.0 {
        alpha * (2.0 * alpha * dist_c).exp() * std_normal_cdf(-z)
    } else {
        // α e^{2α|y−c|} φ(z) R(z), combined in the exponent to avoid overflow.
        alpha * FRAC_1_SQRT_2PI * (2.0 * alpha * dist_c - 0.5 * z * z).exp() * mills_ratio(z)
    };
    first - second
}

/// Chen–Epstein–Zhang density q^{α,β,c}(y); requires α, β > 0.
///
/// σ(y) = α on [c, ∞) and β on (−∞, c); sgn(0) is taken as +1.
pub fn cez_pdf(p: &DensityParams, y: f64) -> Result<f64> {
    p.check_cez()?;
    Ok(cez_pdf_unchecked(p, y))
}

fn cez_pdf_unchecked(p: &DensityParams, y: f64) -> f64 {
    let DensityParams { alpha, beta, c } = *p;
    let sigma = |x: f64| if x >= c { alpha } else { beta };
    let s0 = sigma(0.0);
    let sy = sigma(y);
    let sign = if y >= c { 1.0 } else { -1.0 };
    let start = c / s0;
    let scaled = (y - c) / sy;
    let direct = (-0.5 * (start + scaled).powi(2)).exp();
    let reflected = (-0.5 * (start.abs() + scaled.abs()).powi(2)).exp();
    FRAC_1_SQRT_2PI / sy * (direct + (beta - alpha) / (beta + alpha) * sign * reflected)
}

/// Density of `family` at `y`.
pub fn pdf(family: Family, p: &DensityParams, y: f64) -> Result<f64> {
    match family {
        Family::ChenEpstein => Ok(chen_epstein_pdf(p, y)),
        Family::Cez => cez_pdf(p, y),
    }
}

/// Gaussian envelope dominating `|phi| * density` when `|phi| <= phi_bound`.
fn tail_envelope(family: Family, p: &DensityParams, phi_bound: f64) -> TailEnvelope {
    match family {
        Family::ChenEpstein => {
            let a = p.alpha.abs();
            let amp = 2.0 * (0.5 * a * a + 2.0 * a * (p.c - p.beta).abs()).exp();
            TailEnvelope::gaussian(p.beta, std::f64::consts::SQRT_2, amp * phi_bound)
        }
        Family::Cez => {
            let lo = p.alpha.min(p.beta);
            let hi = p.alpha.max(p.beta);
            let amp = 2.0 / lo * (0.5 * (p.c / lo).powi(2)).exp();
            TailEnvelope::gaussian(p.c, std::f64::consts::SQRT_2 * hi, amp * phi_bound)
        }
    }
}

/// ∫ φ(y)·density(y) dy over ℝ, for |φ| ≤ `phi_bound`.
pub fn integrate_against<F: Fn(f64) -> f64>(
    family: Family,
    p: &DensityParams,
    phi: F,
    phi_bound: f64,
    abs_tol: f64,
    extra_breakpoints: &[f64],
) -> Result<QuadResult> {
    if family == Family::Cez {
        p.check_cez()?;
    }
    let mut bps = vec![p.c, 0.0];
    bps.extend_from_slice(extra_breakpoints);
    let opts = QuadOptions::new(abs_tol)
        .envelope(tail_envelope(family, p, phi_bound.max(f64::MIN_POSITIVE)))
        .breakpoints(&bps);
    let density = |y: f64| match family {
        Family::ChenEpstein => chen_epstein_pdf(p, y),
        Family::Cez => cez_pdf_unchecked(p, y),
    };
    quad_integrate_with(|y| phi(y) * density(y), f64::NEG_INFINITY, f64::INFINITY, &opts)
}

/// Total mass of the density over ℝ.
pub fn total_mass(family: Family, p: &DensityParams, abs_tol: f64) -> Result<QuadResult> {
    integrate_against(family, p, |_| 1.0, 1.0, abs_tol, &[])
}

/// A density tabulated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub family: Family,
    pub params: DensityParams,
    pub rows: Vec<(f64, f64)>,
}

impl DensityCurve {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["y", "density"]);
        for &(y, d) in &self.rows {
            t.push(vec![Cell::Num(y), Cell::Num(d)]);
        }
        t
    }

    /// Indices of strict interior local maxima.
    pub fn local_maxima(&self) -> Vec<usize> {
        let d: Vec<f64> = self.rows.iter().map(|r| r.1).collect();
        (1..d.len().saturating_sub(1))
            .filter(|&i| d[i] > d[i - 1] && d[i] > d[i + 1])
            .collect()
    }

    pub fn argmax(&self) -> (f64, f64) {
        self.rows
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, r| if r.1 > best.1 { r } else { best })
    }
}

pub fn emit_density_curve(p: &DensityParams, family: Family, grid: &Grid1D) -> Result<DensityCurve> {
    if family == Family::Cez {
        p.check_cez()?;
    }
    let rows = grid
        .iter()
        .map(|y| Ok((y, pdf(family, p, y)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityCurve { family, params: *p, rows })
}

/// Curves for a parameter sweep, computed in parallel, returned in input order.
pub fn emit_density_curves(
    sweep: &[(DensityParams, Family)],
    grid: &Grid1D,
) -> Result<Vec<DensityCurve>> {
    crate::parallel::map_indexed(sweep.len(), |i| emit_density_curve(&sweep[i].0, sweep[i].1, grid))
        .into_iter()
        .collect()
}

impl DensityParams {
    pub(crate) fn check_cez(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParams(format!(
                "q density requires alpha > 0 and beta > 0, got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}
