//! Mean square error of the fused estimate under uniform quantization.
//!
//! Every node observes `theta + n_i` with noise variance `sigma2`, clamps the
//! reading to `[-W, W]` and quantizes it with an `S`-bit uniform quantizer of
//! step `2W / (2^S - 1)`. The quantization noise then has variance `step^2 / 12`,
//! and fusing `K` identical nodes gives
//!
//! ```text
//! MSE = (sigma2 + W^2 / (3 (2^S - 1)^2)) / K
//! ```
//!
//! Note the quantization term is squared in `(2^S - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationParams {
    /// Observation noise variance, identical for every node.
    pub sigma2: f64,
    /// Signal half-range: readings lie in `[-W, W]`.
    #[serde(rename = "W")]
    pub half_range: f64,
    /// Quantizer resolution in bits per node.
    #[serde(rename = "S")]
    pub bits: u32,
}

impl Default for EstimationParams {
    fn default() -> Self {
        Self {
            sigma2: 1.0,
            half_range: 1.0,
            bits: 10,
        }
    }
}

impl EstimationParams {
    pub fn new(sigma2: f64, half_range: f64, bits: u32) -> Result<Self> {
        let params = Self {
            sigma2,
            half_range,
            bits,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "sigma2 must be finite and >= 0, got {}",
                self.sigma2
            )));
        }
        if !(self.half_range.is_finite() && self.half_range > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "W must be finite and > 0, got {}",
                self.half_range
            )));
        }
        if self.bits == 0 {
            return Err(Error::InvalidScenario("S must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of quantizer levels minus one, `2^S - 1`, as a real.
    fn level_gaps(&self) -> f64 {
        2f64.powi(self.bits.min(1023) as i32) - 1.0
    }

    /// Quantization step `2W / (2^S - 1)`.
    pub fn step(&self) -> f64 {
        2.0 * self.half_range / self.level_gaps()
    }

    /// Quantization noise variance `step^2 / 12`.
    pub fn quantization_variance(&self) -> f64 {
        let step = self.step();
        step * step / 12.0
    }

    /// Error variance contributed by one node.
    pub fn per_node_variance(&self) -> f64 {
        self.sigma2 + self.quantization_variance()
    }
}

/// MSE of the fused estimate from `k` collected nodes.
///
/// `k = 0` means no data reached the fusion center and the error is unbounded.
pub fn mse(params: &EstimationParams, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::NoDataCollected);
    }
    Ok(params.per_node_variance() / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_noise_vanishes_with_many_bits() {
        let p = EstimationParams::new(1.0, 1.0, 40).unwrap();
        assert!((mse(&p, 10).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn two_bit_example() {
        let p = EstimationParams::new(1.0, 1.0, 2).unwrap();
        let expected = 1.0 + (2.0f64 / 3.0).powi(2) / 12.0;
        assert!((mse(&p, 1).unwrap() - expected).abs() < 1e-15);
        assert!((mse(&p, 1).unwrap() - 1.037_037_037).abs() < 1e-9);
    }

    #[test]
    fn one_bit_example() {
        let p = EstimationParams::new(0.0, 3.0, 1).unwrap();
        assert!((mse(&p, 3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_nodes_is_an_error() {
        let p = EstimationParams::default();
        assert!(matches!(mse(&p, 0), Err(Error::NoDataCollected)));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(EstimationParams::new(-1.0, 1.0, 2).is_err());
        assert!(EstimationParams::new(1.0, 0.0, 2).is_err());
        assert!(EstimationParams::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn monotone_in_k_and_bits() {
        let p = EstimationParams::new(0.5, 2.0, 3).unwrap();
        let base = mse(&p, 1).unwrap();
        for k in 1..50 {
            let m = mse(&p, k).unwrap();
            assert!(mse(&p, k + 1).unwrap() < m);
            assert!((m * k as f64 - base).abs() < 1e-12);
        }
        for s in 1..20 {
            let lo = EstimationParams::new(0.5, 2.0, s).unwrap();
            let hi = EstimationParams::new(0.5, 2.0, s + 1).unwrap();
            assert!(mse(&hi, 4).unwrap() < mse(&lo, 4).unwrap());
        }
    }
}
