//! Asymptotic uncertainty of two-parameter fits.

use serde::Serialize;

use crate::error::Result;
use crate::numerics::{invert_information, two_sided_z, Info2x2};

pub const DEFAULT_CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamInterval {
    pub variance: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ParamInterval {
    fn gaussian(estimate: f64, variance: f64, z: f64) -> Self {
        let half = z * variance.sqrt();
        Self {
            variance,
            lo: estimate - half,
            hi: estimate + half,
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Covariance-derived summary for an `(E₀, rate)` estimate pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainty {
    pub e0: ParamInterval,
    /// The proportionality coefficient (`C` or `K`).
    pub rate: ParamInterval,
    /// Signed covariance of the two estimates.
    pub cov: f64,
    /// Normalized coupling of the information matrix,
    /// `J₁₂ / sqrt(J₁₁ J₂₂)`. The estimates themselves are correlated with
    /// coefficient `-rho`.
    pub rho: f64,
    pub level: f64,
}

impl Uncertainty {
    /// Inverts `info`, ordered as `(E₀, rate)`, into variances and Gaussian
    /// intervals at `level`.
    pub(crate) fn from_information(
        info: &Info2x2,
        e0_hat: f64,
        rate_hat: f64,
        level: f64,
    ) -> Result<Self> {
        let z = two_sided_z(level)?;
        let cov = invert_information(info)?;
        Ok(Self {
            e0: ParamInterval::gaussian(e0_hat, cov.var1, z),
            rate: ParamInterval::gaussian(rate_hat, cov.var2, z),
            cov: cov.cov,
            rho: info.normalized_coupling(),
            level,
        })
    }
}
