//! Polynomial weights `v_s(z) = (1 + |z|²)^{s/2}` and their tensor variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `m ≡ 1`.
    Unit,
    /// `v_s` of the whole point.
    Full,
    /// `v_s ⊗ 1`: `v_s` of the first half of the coordinates.
    FirstFactor,
    /// `1 ⊗ v_s`: `v_s` of the second half of the coordinates.
    SecondFactor,
}

impl WeightKind {
    fn name(self) -> &'static str {
        match self {
            WeightKind::Unit => "1",
            WeightKind::Full => "v_s",
            WeightKind::FirstFactor => "v_s⊗1",
            WeightKind::SecondFactor => "1⊗v_s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub s: f64,
    pub kind: WeightKind,
}

impl Weight {
    pub fn unit() -> Self {
        Self {
            s: 0.0,
            kind: WeightKind::Unit,
        }
    }

    pub fn full(s: f64) -> Self {
        Self {
            s,
            kind: WeightKind::Full,
        }
    }

    pub fn first(s: f64) -> Self {
        Self {
            s,
            kind: WeightKind::FirstFactor,
        }
    }

    pub fn second(s: f64) -> Self {
        Self {
            s,
            kind: WeightKind::SecondFactor,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.kind == WeightKind::Unit || self.s == 0.0
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        weight_eval(self, point)
    }
}

/// `(1 + |y|²)^{s/2}`.
pub fn v_s(s: f64, y: &[f64]) -> f64 {
    let r2: f64 = y.iter().map(|v| v * v).sum();
    (1.0 + r2).powf(s / 2.0)
}

pub fn weight_eval(m: &Weight, point: &[f64]) -> Result<f64> {
    let dim = point.len();
    let bad = || Error::WeightDimension {
        kind: m.kind.name(),
        dim,
    };
    match m.kind {
        WeightKind::Unit => Ok(1.0),
        WeightKind::Full if dim > 0 => Ok(v_s(m.s, point)),
        WeightKind::FirstFactor if dim == 2 || dim == 4 => Ok(v_s(m.s, &point[..dim / 2])),
        WeightKind::SecondFactor if dim == 2 || dim == 4 => Ok(v_s(m.s, &point[dim / 2..])),
        _ => Err(bad()),
    }
}
