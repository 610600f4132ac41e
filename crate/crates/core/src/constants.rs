//! Dimension constants of the Sierpinski gasket.

use serde::Serialize;

/// Hausdorff dimension `ln 3 / ln 2`.
pub const HAUSDORFF_DIM: f64 = 1.584_962_500_721_156_2;
/// Walk dimension `ln 5 / ln 2`.
pub const WALK_DIM: f64 = 2.321_928_094_887_362_3;

/// The dimension constants and the thresholds derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractalConstants {
    pub d_h: f64,
    pub d_w: f64,
    /// `d_h / d_w`, the Weyl exponent of the eigenvalue counting function.
    pub spectral_ratio: f64,
    /// `d_h / (2 d_w)`, the parameter of the log-correlated field.
    pub critical_s: f64,
    /// `d_w - d_h`, the Hölder exponent of functions in the Laplacian domain.
    pub holder_gap: f64,
}

impl FractalConstants {
    pub const fn new() -> Self {
        FractalConstants {
            d_h: HAUSDORFF_DIM,
            d_w: WALK_DIM,
            spectral_ratio: HAUSDORFF_DIM / WALK_DIM,
            critical_s: HAUSDORFF_DIM / (2.0 * WALK_DIM),
            holder_gap: WALK_DIM - HAUSDORFF_DIM,
        }
    }

    /// Upper end of the interval on which `(-Δ)^{-s}` smooths at rate `s d_w - d_h/2`.
    pub fn upper_smoothing_s(&self) -> f64 {
        1.0 - self.critical_s
    }

    /// Hölder exponent `min(s d_w - d_h/2, d_w - d_h)` of the field density for `s > critical_s`.
    pub fn holder_exponent(&self, s: f64) -> f64 {
        (s * self.d_w - 0.5 * self.d_h).min(self.holder_gap)
    }

    /// Decay exponent `d_h - s d_w` of the Riesz kernel in the singular regime.
    pub fn riesz_singular_exponent(&self, s: f64) -> f64 {
        self.d_h - s * self.d_w
    }
}

impl Default for FractalConstants {
    fn default() -> Self {
        Self::new()
    }
}

pub const CONSTANTS: FractalConstants = FractalConstants::new();

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_logarithm_ratios() {
        let c = FractalConstants::new();
        let ln2 = 2f64.ln();
        assert!((c.d_h - 3f64.ln() / ln2).abs() < 1e-14);
        assert!((c.d_w - 5f64.ln() / ln2).abs() < 1e-14);
        assert!((c.spectral_ratio - 3f64.ln() / 5f64.ln()).abs() < 1e-14);
        assert!((c.critical_s - 3f64.ln() / (2.0 * 5f64.ln())).abs() < 1e-14);
        assert!((c.holder_gap - (5.0f64 / 3.0).ln() / ln2).abs() < 1e-14);
    }

    #[test]
    fn reported_decimals() {
        let c = CONSTANTS;
        assert!((c.d_h - 1.5849625007).abs() < 1e-10);
        assert!((c.d_w - 2.3219280949).abs() < 1e-10);
        assert!((c.spectral_ratio - 0.6826061945).abs() < 1e-10);
        assert!((c.critical_s - 0.3413030972).abs() < 1e-10);
        assert!((c.holder_gap - 0.7369655942).abs() < 1e-10);
    }

    #[test]
    fn holder_exponent_saturates() {
        let c = CONSTANTS;
        assert!((c.holder_exponent(0.5) - 0.368_482_797).abs() < 1e-8);
        assert_eq!(c.holder_exponent(1.0), c.holder_gap);
        assert_eq!(c.holder_exponent(2.0), c.holder_gap);
        // crossover sits exactly at 1 - critical_s
        let s = c.upper_smoothing_s();
        assert!((s * c.d_w - 0.5 * c.d_h - c.holder_gap).abs() < 1e-14);
    }
}
