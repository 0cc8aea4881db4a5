use std::fmt;
use std::sync::Arc;

use crate::densities::{Convexity, Envelope, Monotonicity};
use crate::{Error, Result};

pub type Rule = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// Finite limits at −∞ and +∞.
    BoundedWithLimits { neg: f64, pos: f64 },
    LinearGrowth,
}

/// Declared shape about a centre c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub center: f64,
    pub symmetric: bool,
    pub monotone_right: Option<Monotonicity>,
    pub convexity_right: Option<Convexity>,
    /// Set on S-shaped terminals: which construction, and its θ.
    pub s_shape: Option<(Envelope, f64)>,
}

impl Shape {
    pub fn centered(center: f64) -> Self {
        Shape { center, symmetric: false, monotone_right: None, convexity_right: None, s_shape: None }
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn monotone(mut self, m: Monotonicity) -> Self {
        self.monotone_right = Some(m);
        self
    }

    pub fn convexity(mut self, c: Convexity) -> Self {
        self.convexity_right = Some(c);
        self
    }
}

/// An evaluable terminal payoff with growth class and optional shape metadata.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    rule: Rule,
    pub growth: Growth,
    pub shape: Option<Shape>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("shape", &self.shape)
            .finish()
    }
}

/// Distance from the centre used by the limit and symmetry audits.
const FAR: f64 = 1e6;

impl TestFunction {
    pub fn new(name: impl Into<String>, rule: impl Fn(f64) -> f64 + Send + Sync + 'static, growth: Growth) -> Self {
        TestFunction { name: name.into(), rule: Arc::new(rule), growth, shape: None }
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = Some(shape);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.rule)(x)
    }

    pub fn rule(&self) -> Rule {
        self.rule.clone()
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.growth, Growth::BoundedWithLimits { .. })
    }

    /// Checks declared limits at ±10⁶ (to 1e-9) and declared symmetry (to 1e-12).
    pub fn audit(&self) -> Result<()> {
        if let Growth::BoundedWithLimits { neg, pos } = self.growth {
            let (at_neg, at_pos) = (self.eval(-FAR), self.eval(FAR));
            if (at_neg - neg).abs() > 1e-9 || (at_pos - pos).abs() > 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "{}: declared limits ({neg}, {pos}) but values at -/+1e6 are ({at_neg}, {at_pos})",
                    self.name
                )));
            }
        }
        if let Some(shape) = self.shape {
            if shape.symmetric {
                for k in 0..=2000 {
                    let x = k as f64 * 0.01;
                    let d = (self.eval(shape.center + x) - self.eval(shape.center - x)).abs();
                    if d > 1e-12 {
                        return Err(Error::InvalidParams(format!(
                            "{}: declared symmetric about {} but differs by {d:e} at offset {x}",
                            self.name, shape.center
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Rough sup |φ| over the bulk and the limits; used to size quadrature tails.
    pub fn magnitude(&self) -> f64 {
        let bulk = (-4000..=4000).map(|k| self.eval(k as f64 * 0.01).abs()).fold(0.0, f64::max);
        match self.growth {
            Growth::BoundedWithLimits { neg, pos } => bulk.max(neg.abs()).max(pos.abs()),
            Growth::LinearGrowth => bulk,
        }
    }

    pub fn constant(value: f64) -> Self {
        TestFunction::new(format!("const({value})"), move |_| value, Growth::BoundedWithLimits { neg: value, pos: value })
    }

    pub fn plus(&self, other: &TestFunction) -> Self {
        let (a, b) = (self.rule.clone(), other.rule.clone());
        let growth = match (self.growth, other.growth) {
            (Growth::BoundedWithLimits { neg: n1, pos: p1 }, Growth::BoundedWithLimits { neg: n2, pos: p2 }) => {
                Growth::BoundedWithLimits { neg: n1 + n2, pos: p1 + p2 }
            }
            _ => Growth::LinearGrowth,
        };
        TestFunction::new(format!("{}+{}", self.name, other.name), move |x| a(x) + b(x), growth)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let a = self.rule.clone();
        let growth = match self.growth {
            Growth::BoundedWithLimits { neg, pos } => Growth::BoundedWithLimits { neg: lambda * neg, pos: lambda * pos },
            g => g,
        };
        let mut out = TestFunction::new(format!("{lambda}*{}", self.name), move |x| lambda * a(x), growth);
        if lambda > 0.0 {
            out.shape = self.shape;
        }
        out
    }

    /// −φ, with monotonicity and convexity metadata flipped.
    pub fn negated(&self) -> Self {
        let a = self.rule.clone();
        let growth = match self.growth {
            Growth::BoundedWithLimits { neg, pos } => Growth::BoundedWithLimits { neg: -neg, pos: -pos },
            g => g,
        };
        let mut out = TestFunction::new(format!("-{}", self.name), move |x| -a(x), growth);
        out.shape = self.shape.map(|s| Shape {
            center: s.center,
            symmetric: s.symmetric,
            monotone_right: s.monotone_right.map(|m| match m {
                Monotonicity::Increasing => Monotonicity::Decreasing,
                Monotonicity::Decreasing => Monotonicity::Increasing,
            }),
            convexity_right: s.convexity_right.map(|c| match c {
                Convexity::Concave => Convexity::Convex,
                Convexity::Convex => Convexity::Concave,
            }),
            s_shape: None,
        });
        out
    }
}

/// Sign of the second difference of `f` on [from, from + 40], if it never changes.
pub fn detect_convexity(f: &dyn Fn(f64) -> f64, from: f64) -> Option<Convexity> {
    let h = 1e-2;
    let (mut convex, mut concave) = (true, true);
    for k in 1..4000 {
        let x = from + k as f64 * h;
        let d2 = f(x + h) - 2.0 * f(x) + f(x - h);
        let slack = 1e-12 * (1.0 + f(x).abs());
        convex &= d2 >= -slack;
        concave &= d2 <= slack;
    }
    match (convex, concave) {
        (true, false) => Some(Convexity::Convex),
        (false, true) => Some(Convexity::Concave),
        _ => None,
    }
}

/// φ₁, the junction c, and θ = σ̲/σ̄.
#[derive(Debug, Clone)]
pub struct SShapeSpec {
    pub phi1: TestFunction,
    pub c: f64,
    pub theta: f64,
}

impl SShapeSpec {
    pub fn new(phi1: TestFunction, c: f64, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidTheta(theta));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParams("c must be finite".into()));
        }
        Ok(SShapeSpec { phi1, c, theta })
    }
}

/// Glues φ₁ on [c, ∞) to a reflected, rescaled copy on (−∞, c).
///
/// φ uses −θ φ₁(−(x−c)/θ + c) + (1+θ) φ₁(c) on the left; φ̄ swaps θ for 1/θ.
/// Convexity on the right is detected numerically, so an S-shape whose φ₁ changes
/// curvature on [c, ∞) carries no convexity claim.
pub fn make_s_shaped(spec: &SShapeSpec, envelope: Envelope) -> Result<TestFunction> {
    if !(spec.theta > 0.0 && spec.theta <= 1.0) {
        return Err(Error::InvalidTheta(spec.theta));
    }
    let k = match envelope {
        Envelope::Phi => spec.theta,
        Envelope::Phibar => 1.0 / spec.theta,
    };
    let c = spec.c;
    let phi1 = spec.phi1.rule();
    let at_c = phi1(c);
    let rule = {
        let phi1 = phi1.clone();
        move |x: f64| {
            if x >= c {
                phi1(x)
            } else {
                -k * phi1(-(x - c) / k + c) + (1.0 + k) * at_c
            }
        }
    };
    let growth = match spec.phi1.growth {
        Growth::BoundedWithLimits { pos, .. } => Growth::BoundedWithLimits { neg: -k * pos + (1.0 + k) * at_c, pos },
        Growth::LinearGrowth => Growth::LinearGrowth,
    };
    let convexity = detect_convexity(&*phi1, c);
    let tag = match envelope {
        Envelope::Phi => "phi",
        Envelope::Phibar => "phibar",
    };
    let mut shape = Shape::centered(c);
    shape.convexity_right = convexity;
    shape.s_shape = Some((envelope, spec.theta));
    Ok(TestFunction::new(format!("s-shaped-{tag}({},c={c},theta={})", spec.phi1.name, spec.theta), rule, growth)
        .with_shape(shape))
}
