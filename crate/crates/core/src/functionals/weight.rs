use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `φ(x) = x^α`, `α ≥ 0`.
    Power { alpha: f64 },
    /// `φ = 1_{[0,t]}`.
    Indicator { t: f64 },
    /// Piecewise linear through `[x, φ(x)]` knots with increasing `x`, constant
    /// before the first and after the last knot.
    Table { knots: Vec<[f64; 2]> },
    Constant { c: f64 },
}

/// An edge weight `φ: [0, ∞] → [0, ∞]`.
///
/// `φ(∞)` is what an infinite edge (a Voronoi ray) contributes. It defaults to
/// the limit of the formula: `∞` for a positive power, `0` for an indicator,
/// the constant otherwise, and must be given explicitly for tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WeightFn {
    #[serde(flatten)]
    pub kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_infinity: Option<f64>,
    /// Polynomial growth order, for the record only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_order: Option<f64>,
}

impl WeightFn {
    fn of(kind: WeightKind) -> Self {
        WeightFn {
            kind,
            at_infinity: None,
            growth_order: None,
        }
    }

    pub fn power(alpha: f64) -> Self {
        let mut w = Self::of(WeightKind::Power { alpha });
        w.growth_order = Some(alpha);
        w
    }

    /// `φ(x) = x`, with `φ(∞) = ∞`.
    pub fn identity() -> Self {
        Self::power(1.0)
    }

    pub fn indicator(t: f64) -> Self {
        Self::of(WeightKind::Indicator { t })
    }

    pub fn constant(c: f64) -> Self {
        Self::of(WeightKind::Constant { c })
    }

    pub fn table(knots: Vec<[f64; 2]>, at_infinity: f64) -> Self {
        Self::of(WeightKind::Table { knots }).with_infinity(at_infinity)
    }

    pub fn with_infinity(mut self, value: f64) -> Self {
        self.at_infinity = Some(value);
        self
    }

    /// The same weight with `φ(∞) = 0`, as Voronoi functionals require.
    pub fn vanishing_at_infinity(self) -> Self {
        self.with_infinity(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWeight(m));
        match &self.kind {
            WeightKind::Power { alpha } if !(alpha.is_finite() && *alpha >= 0.0) => {
                return bad(format!("power exponent must be finite and ≥ 0, got {alpha}"))
            }
            WeightKind::Indicator { t } if !(*t >= 0.0) => return bad(format!("indicator threshold must be ≥ 0, got {t}")),
            WeightKind::Constant { c } if !(c.is_finite() && *c >= 0.0) => {
                return bad(format!("constant must be finite and ≥ 0, got {c}"))
            }
            WeightKind::Table { knots } => {
                if knots.is_empty() {
                    return bad("table needs at least one knot".into());
                }
                if knots.iter().any(|k| !(k[0] >= 0.0 && k[0].is_finite() && k[1] >= 0.0 && k[1].is_finite())) {
                    return bad("table knots must be finite and nonnegative".into());
                }
                if knots.windows(2).any(|w| w[0][0] >= w[1][0]) {
                    return bad("table knots must have strictly increasing x".into());
                }
                if self.at_infinity.is_none() {
                    return bad("table weights need an explicit value at infinity".into());
                }
            }
            _ => {}
        }
        if let Some(v) = self.at_infinity {
            if !(v >= 0.0) {
                return bad(format!("value at infinity must be ≥ 0, got {v}"));
            }
        }
        Ok(())
    }

    /// `φ(∞)`.
    pub fn value_at_infinity(&self) -> f64 {
        if let Some(v) = self.at_infinity {
            return v;
        }
        match &self.kind {
            WeightKind::Power { alpha } if *alpha == 0.0 => 1.0,
            WeightKind::Power { .. } => f64::INFINITY,
            WeightKind::Indicator { .. } => 0.0,
            WeightKind::Table { knots } => knots.last().map_or(0.0, |k| k[1]),
            WeightKind::Constant { c } => *c,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.value_at_infinity();
        }
        match &self.kind {
            WeightKind::Power { alpha } => x.powf(*alpha),
            WeightKind::Indicator { t } => f64::from(u8::from(x <= *t)),
            WeightKind::Constant { c } => *c,
            WeightKind::Table { knots } => {
                let i = knots.partition_point(|k| k[0] <= x);
                if i == 0 {
                    knots[0][1]
                } else if i == knots.len() {
                    knots[i - 1][1]
                } else {
                    let (a, b) = (knots[i - 1], knots[i]);
                    a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
                }
            }
        }
    }

    /// `γ` with `φ(ax) = a^γ φ(x)` on finite lengths, when there is one.
    pub fn homogeneity(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Power { alpha } => Some(alpha),
            WeightKind::Constant { .. } => Some(0.0),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        assert_eq!(WeightFn::power(2.0).eval(3.0), 9.0);
        assert_eq!(WeightFn::power(0.0).eval(0.0), 1.0);
        assert_eq!(WeightFn::identity().eval(f64::INFINITY), f64::INFINITY);
        assert_eq!(WeightFn::identity().vanishing_at_infinity().eval(f64::INFINITY), 0.0);
        assert_eq!(WeightFn::indicator(1.0).eval(1.0), 1.0);
        assert_eq!(WeightFn::indicator(1.0).eval(1.0 + 1e-12), 0.0);
        let t = WeightFn::table(vec![[0.0, 0.0], [1.0, 2.0], [3.0, 2.0]], 2.0);
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(10.0), 2.0);
        assert_eq!(t.eval(f64::INFINITY), 2.0);
    }

    #[test]
    fn validation() {
        assert!(WeightFn::power(-1.0).validate().is_err());
        assert!(WeightFn::of(WeightKind::Table { knots: vec![[0.0, 1.0]] }).validate().is_err());
        assert!(WeightFn::table(vec![[1.0, 1.0], [0.5, 1.0]], 0.0).validate().is_err());
        assert!(WeightFn::indicator(0.0).validate().is_ok());
    }

    #[test]
    fn serde_shape() {
        let w: WeightFn = serde_json::from_str(r#"{"kind":"power","alpha":1,"at_infinity":0}"#).unwrap();
        assert_eq!(w, WeightFn::power(1.0).vanishing_at_infinity().tap_growth(None));
        let back: WeightFn = serde_json::from_value(serde_json::to_value(&w).unwrap()).unwrap();
        assert_eq!(back, w);
    }

    impl WeightFn {
        fn tap_growth(mut self, g: Option<f64>) -> Self {
            self.growth_order = g;
            self
        }
    }
}
