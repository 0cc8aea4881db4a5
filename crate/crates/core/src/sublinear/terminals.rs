use super::test_function::{make_s_shaped, Growth, SShapeSpec, Shape, TestFunction};
use crate::densities::{Convexity, Envelope, Monotonicity};
use crate::numerics::std_normal_cdf;
use crate::{Error, Result};

/// Names accepted by [`named_terminal`].
pub const TERMINAL_NAMES: [&str; 6] = ["gauss", "gauss-half", "abs", "neg-abs", "normal-cdf", "tanh"];

/// Built-in terminals:
///
/// | name | φ(x) |
/// |---|---|
/// | `gauss` | e^{−x²} |
/// | `gauss-half` | e^{−x²/2} |
/// | `abs` | \|x\| |
/// | `neg-abs` | −\|x\| |
/// | `normal-cdf` | Φ(x) |
/// | `tanh` | tanh(x) |
pub fn named_terminal(name: &str) -> Result<TestFunction> {
    let zero = Shape::centered(0.0);
    let f = match name {
        "gauss" => TestFunction::new(name, |x: f64| (-x * x).exp(), Growth::BoundedWithLimits { neg: 0.0, pos: 0.0 })
            .with_shape(zero.symmetric().monotone(Monotonicity::Decreasing)),
        "gauss-half" => {
            TestFunction::new(name, |x: f64| (-0.5 * x * x).exp(), Growth::BoundedWithLimits { neg: 0.0, pos: 0.0 })
                .with_shape(zero.symmetric().monotone(Monotonicity::Decreasing))
        }
        "abs" => TestFunction::new(name, f64::abs, Growth::LinearGrowth)
            .with_shape(zero.symmetric().monotone(Monotonicity::Increasing).convexity(Convexity::Convex)),
        "neg-abs" => TestFunction::new(name, |x: f64| -x.abs(), Growth::LinearGrowth)
            .with_shape(zero.symmetric().monotone(Monotonicity::Decreasing).convexity(Convexity::Concave)),
        "normal-cdf" => TestFunction::new(name, std_normal_cdf, Growth::BoundedWithLimits { neg: 0.0, pos: 1.0 })
            .with_shape(zero.monotone(Monotonicity::Increasing)),
        "tanh" => TestFunction::new(name, f64::tanh, Growth::BoundedWithLimits { neg: -1.0, pos: 1.0 })
            .with_shape(zero.monotone(Monotonicity::Increasing).convexity(Convexity::Concave)),
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown terminal '{other}'; expected one of {} or s-shaped",
                TERMINAL_NAMES.join(", ")
            )))
        }
    };
    Ok(f)
}

/// S-shaped terminal over a named φ₁.
pub fn s_shaped_terminal(phi1: &str, c: f64, theta: f64, envelope: Envelope) -> Result<TestFunction> {
    make_s_shaped(&SShapeSpec::new(named_terminal(phi1)?, c, theta)?, envelope)
}
