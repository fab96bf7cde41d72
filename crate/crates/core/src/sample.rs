use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance for the zero-mean and unit-norm invariants of [`CenteredUnit`].
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// A raw data vector of length `n >= 2` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    id: Option<String>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len() });
        }
        if let Some(position) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { position });
        }
        Ok(Sample { values, id: None })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Centered, unit-norm representative of a sample.
///
/// Lives on the sphere inside the hyperplane of zero-mean vectors (the
/// hyperplane normal to `(1, ..., 1)`). Two samples have absolute correlation
/// distance zero exactly when their representatives agree up to sign.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredUnit {
    values: Vec<f64>,
    source_id: Option<String>,
}

impl CenteredUnit {
    /// Wraps already-centered unit values, checking both invariants.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len() });
        }
        if let Some(position) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { position });
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        if libm::fabs(mean) > UNIT_TOLERANCE {
            return Err(Error::Domain {
                what: "mean of centered unit",
                value: mean,
            });
        }
        let norm = libm::sqrt(values.iter().map(|v| v * v).sum::<f64>());
        if libm::fabs(norm - 1.0) > UNIT_TOLERANCE {
            return Err(Error::Domain {
                what: "norm of centered unit",
                value: norm,
            });
        }
        Ok(CenteredUnit {
            values,
            source_id: None,
        })
    }

    pub(crate) fn from_values_unchecked(values: Vec<f64>, source_id: Option<String>) -> Self {
        CenteredUnit { values, source_id }
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = Some(id.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_id(&self) -> Option<&str> {
        self.source_id.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The antipodal representative; it has distance zero to `self`.
    pub fn negated(&self) -> Self {
        CenteredUnit {
            values: self.values.iter().map(|v| -v).collect(),
            source_id: self.source_id.clone(),
        }
    }

    /// A representative is also a valid sample.
    pub fn to_sample(&self) -> Sample {
        Sample {
            values: self.values.clone(),
            id: self.source_id.clone(),
        }
    }
}

/// Absolute correlation distance, always in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Distance(f64);

impl Distance {
    pub const ZERO: Distance = Distance(0.0);
    pub const MAX: Distance = Distance(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Distance(value))
        } else {
            Err(Error::Domain {
                what: "distance",
                value,
            })
        }
    }

    /// Clamps a raw value into `[0, 1]`. NaN maps to 1.
    pub(crate) fn clamped(value: f64) -> Self {
        if value.is_nan() {
            return Distance(1.0);
        }
        Distance(value.clamp(0.0, 1.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Distance> for f64 {
    fn from(d: Distance) -> f64 {
        d.0
    }
}
