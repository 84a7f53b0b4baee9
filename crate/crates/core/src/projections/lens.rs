//! Brown–Conrady lens distortion in view coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::ViewCoord;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LensDistortionCoeffs {
    /// `k₁, k₂, …` multiplying `r², r⁴, …`.
    #[serde(default)]
    pub radial: Vec<f64>,
    #[serde(default)]
    pub thin_prism: [f64; 2],
    #[serde(default)]
    pub decentering: [f64; 2],
}

impl LensDistortionCoeffs {
    pub fn validate(&self) -> Result<()> {
        let all = self.radial.iter().chain(&self.thin_prism).chain(&self.decentering);
        if all.into_iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::domain("lens distortion coefficients must be finite"))
        }
    }

    pub fn is_identity(&self) -> bool {
        self.radial.iter().all(|&k| k == 0.0)
            && self.thin_prism == [0.0; 2]
            && self.decentering == [0.0; 2]
    }
}

pub fn brown_conrady(f: ViewCoord, c: &LensDistortionCoeffs) -> ViewCoord {
    let r2 = f.x * f.x + f.y * f.y;
    // Horner over r²: k₁r² + k₂r⁴ + …
    let radial = c.radial.iter().rev().fold(0.0, |acc, &k| (acc + k) * r2);
    let prism = c.thin_prism[0] * f.x + c.thin_prism[1] * f.y;
    let gain = 1.0 + radial + prism;
    ViewCoord::new(
        f.x * gain + c.decentering[0] * r2,
        f.y * gain + c.decentering[1] * r2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let f = ViewCoord::new(0.3, -0.7);
        assert_eq!(brown_conrady(f, &LensDistortionCoeffs::default()), f);

        let k1 = LensDistortionCoeffs { radial: vec![0.1], ..Default::default() };
        let g = brown_conrady(ViewCoord::new(0.5, 0.0), &k1);
        assert_abs_diff_eq!(g.x, 0.5125, epsilon = 1e-15);
        assert_eq!(g.y, 0.0);

        let busy = LensDistortionCoeffs {
            radial: vec![0.3, -0.2, 0.05],
            thin_prism: [0.01, 0.02],
            decentering: [0.03, -0.04],
        };
        assert_eq!(brown_conrady(ViewCoord::new(0.0, 0.0), &busy), ViewCoord::new(0.0, 0.0));
    }

    #[test]
    fn term_by_term_oracle() {
        let c = LensDistortionCoeffs {
            radial: vec![0.2, -0.1],
            thin_prism: [0.05, -0.03],
            decentering: [0.01, 0.02],
        };
        let (x, y) = (0.4f64, -0.3f64);
        let r2 = x * x + y * y;
        let radial = 0.2 * r2 - 0.1 * r2 * r2;
        let prism = 0.05 * x - 0.03 * y;
        let g = brown_conrady(ViewCoord::new(x, y), &c);
        assert_abs_diff_eq!(g.x, x + radial * x + prism * x + 0.01 * r2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.y, y + radial * y + prism * y + 0.02 * r2, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        let c = LensDistortionCoeffs { radial: vec![f64::NAN], ..Default::default() };
        assert!(c.validate().is_err());
    }

    proptest! {
        #[test]
        fn zero_coefficients_are_identity(x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let zero = LensDistortionCoeffs { radial: vec![0.0, 0.0], ..Default::default() };
            prop_assert_eq!(brown_conrady(ViewCoord::new(x, y), &zero), ViewCoord::new(x, y));
        }

        #[test]
        fn decentering_fixes_origin(q1 in -1.0f64..1.0, q2 in -1.0f64..1.0) {
            let c = LensDistortionCoeffs { decentering: [q1, q2], ..Default::default() };
            prop_assert_eq!(brown_conrady(ViewCoord::new(0.0, 0.0), &c), ViewCoord::new(0.0, 0.0));
        }
    }
}
