//! Duration samplers for the four families used by the service model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RandomStream;

/// Smallest duration any sampler emits, in minutes.
pub const MIN_DURATION: f64 = 0.01;

/// Redraws attempted before a normal sample is clamped to [`MIN_DURATION`].
const MAX_NORMAL_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Exponential,
    /// Normal truncated below at [`MIN_DURATION`].
    #[serde(rename = "normal")]
    TruncatedNormal,
    Uniform,
    Constant,
}

/// A duration distribution in minutes.
///
/// `p1` is the mean (exponential, normal), the lower bound (uniform) or the
/// value (constant). `p2` is the standard deviation (normal) or the upper
/// bound (uniform) and is ignored otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub family: Family,
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid {family:?} distribution: {field} {reason}")]
pub struct InvalidSpec {
    pub family: Family,
    pub field: &'static str,
    pub reason: &'static str,
}

impl DistributionSpec {
    pub const fn exponential(mean: f64) -> Self {
        Self { family: Family::Exponential, p1: mean, p2: 0.0 }
    }

    pub const fn normal(mean: f64, sd: f64) -> Self {
        Self { family: Family::TruncatedNormal, p1: mean, p2: sd }
    }

    pub const fn uniform(min: f64, max: f64) -> Self {
        Self { family: Family::Uniform, p1: min, p2: max }
    }

    pub const fn constant(value: f64) -> Self {
        Self { family: Family::Constant, p1: value, p2: 0.0 }
    }

    pub fn validate(&self) -> Result<(), InvalidSpec> {
        let bad = |field, reason| Err(InvalidSpec { family: self.family, field, reason });
        if !self.p1.is_finite() {
            return bad("p1", "must be finite");
        }
        if !self.p2.is_finite() {
            return bad("p2", "must be finite");
        }
        match self.family {
            Family::Exponential if self.p1 <= 0.0 => bad("p1", "(mean) must be > 0"),
            Family::TruncatedNormal if self.p2 < 0.0 => bad("p2", "(sd) must be >= 0"),
            Family::Uniform if self.p1 > self.p2 => bad("p2", "(max) must be >= p1 (min)"),
            Family::Constant if self.p1 < 0.0 => bad("p1", "(value) must be >= 0"),
            _ => Ok(()),
        }
    }

    /// Analytic mean of the untruncated distribution.
    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Exponential | Family::TruncatedNormal | Family::Constant => self.p1,
            Family::Uniform => 0.5 * (self.p1 + self.p2),
        }
    }

    /// Draws one duration, validating the spec first.
    pub fn sample(&self, stream: &mut RandomStream) -> Result<f64, InvalidSpec> {
        self.validate()?;
        Ok(self.sample_unchecked(stream))
    }

    /// Draws one duration from a spec already known to be valid.
    pub fn sample_unchecked(&self, stream: &mut RandomStream) -> f64 {
        match self.family {
            Family::Exponential => {
                // Inverse CDF; 1 - u lies in (0, 1].
                let u = stream.next_f64();
                (-self.p1 * libm::log(1.0 - u)).max(MIN_DURATION)
            }
            Family::TruncatedNormal => {
                for _ in 0..MAX_NORMAL_REDRAWS {
                    let v = self.p1 + self.p2 * standard_normal(stream);
                    if v >= MIN_DURATION {
                        return v;
                    }
                }
                MIN_DURATION
            }
            Family::Uniform => {
                let v = self.p1 + (self.p2 - self.p1) * stream.next_f64();
                v.clamp(self.p1, self.p2).max(MIN_DURATION)
            }
            Family::Constant => self.p1.max(MIN_DURATION),
        }
    }
}

/// Box-Muller, cosine branch. Always consumes exactly two uniforms.
fn standard_normal(stream: &mut RandomStream) -> f64 {
    let u1 = 1.0 - stream.next_f64();
    let u2 = stream.next_f64();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(std::f64::consts::TAU * u2)
}
