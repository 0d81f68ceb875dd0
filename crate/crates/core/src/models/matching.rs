//! Matching functions: bijections from a constrained parameter space onto the
//! real line, so that split and merge can mix parameters linearly.

use crate::error::{Error, Result};

/// Domain of a single parameter component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSpace {
    /// `(-inf, inf)`, matched by the identity.
    Real,
    /// `(0, inf)`, matched by `ln`.
    Positive,
    /// `[0, 1]`, matched by `logit` on the open interior.
    UnitInterval,
}

impl ParamSpace {
    pub fn contains(self, x: f64) -> bool {
        match self {
            ParamSpace::Real => x.is_finite(),
            ParamSpace::Positive => x.is_finite() && x > 0.0,
            ParamSpace::UnitInterval => (0.0..=1.0).contains(&x),
        }
    }

    pub fn transform(self) -> Transform {
        match self {
            ParamSpace::Real => Transform::Identity,
            ParamSpace::Positive => Transform::Log,
            ParamSpace::UnitInterval => Transform::Logit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Log,
    Logit,
}

impl Transform {
    /// `m(x)`. Boundary points (`0` for log, `0`/`1` for logit) are rejected.
    pub fn forward(self, x: f64) -> Result<f64> {
        let y = match self {
            Transform::Identity => x,
            Transform::Log if x > 0.0 => x.ln(),
            Transform::Logit if x > 0.0 && x < 1.0 => x.ln() - (-x).ln_1p(),
            _ => f64::NAN,
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain(format!("{self:?} matching undefined at {x}")))
        }
    }

    /// `m^{-1}(y)`.
    pub fn inverse(self, y: f64) -> f64 {
        match self {
            Transform::Identity => y,
            Transform::Log => y.exp(),
            Transform::Logit => {
                if y >= 0.0 {
                    1.0 / (1.0 + (-y).exp())
                } else {
                    let e = y.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// `ln m'(x)`, the log-derivative of the matching function at `x`.
    pub fn ln_derivative(self, x: f64) -> Result<f64> {
        match self {
            Transform::Identity => Ok(0.0),
            Transform::Log if x > 0.0 => Ok(-x.ln()),
            Transform::Logit if x > 0.0 && x < 1.0 => Ok(-(x.ln() + (-x).ln_1p())),
            _ => Err(Error::Domain(format!(
                "{self:?} matching has no derivative at {x}"
            ))),
        }
    }
}

/// Componentwise matching function for a parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    transforms: Vec<Transform>,
}

impl Matching {
    pub fn new(transforms: Vec<Transform>) -> Self {
        Self { transforms }
    }

    pub fn from_spaces(spaces: &[ParamSpace]) -> Self {
        Self::new(spaces.iter().map(|s| s.transform()).collect())
    }

    pub fn dim(&self) -> usize {
        self.transforms.len()
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    /// Componentwise `m(theta)`.
    pub fn apply(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        self.transforms
            .iter()
            .zip(theta)
            .map(|(t, &x)| t.forward(x))
            .collect()
    }

    /// Componentwise `m^{-1}(y)`.
    pub fn invert(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        Ok(self
            .transforms
            .iter()
            .zip(y)
            .map(|(t, &v)| t.inverse(v))
            .collect())
    }

    /// `sum_c ln m_c'(theta_c)`: log of the product of componentwise derivatives.
    pub fn ln_derivative(&self, theta: &[f64]) -> Result<f64> {
        self.check_dim(theta)?;
        self.transforms
            .iter()
            .zip(theta)
            .map(|(t, &x)| t.ln_derivative(x))
            .sum()
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.transforms.len() {
            return Err(Error::Domain(format!(
                "expected a {}-vector, got {}",
                self.transforms.len(),
                v.len()
            )));
        }
        Ok(())
    }
}
