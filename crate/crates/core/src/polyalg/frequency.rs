use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normal frequency vector `ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(Vec<f64>);

impl Frequency {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::Domain("frequency vector is empty".into()));
        }
        if let Some(bad) = omega.iter().find(|w| !w.is_finite()) {
            return Err(Error::Domain(format!(
                "frequency entry {bad} is not finite"
            )));
        }
        Ok(Frequency(omega))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    pub fn dot(&self, k: &[i64]) -> f64 {
        self.0.iter().zip(k).map(|(w, &k)| w * k as f64).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Frequency(self.0.iter().map(|w| w * s).collect())
    }
}

impl std::ops::Index<usize> for Frequency {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
