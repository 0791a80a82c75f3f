use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::material::MaterialModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Stretch along y, free lateral contraction.
    Uniaxial,
    Equibiaxial,
}

/// Tearing-energy factors k with G = 2 k W c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TearingFactors {
    pub lambda: f64,
    pub k_lake: f64,
    pub k_lindley: f64,
    /// Needs the deformed crack opening; equibiaxial only.
    pub k_yeoh: Option<f64>,
    /// Far-field energy density of the uncracked body [Pa].
    pub w_far: f64,
    pub c: f64,
}

impl TearingFactors {
    pub fn g(&self, k: f64) -> f64 {
        2.0 * k * self.w_far * self.c
    }

    pub fn g_lake(&self) -> f64 {
        self.g(self.k_lake)
    }

    pub fn g_lindley(&self) -> f64 {
        self.g(self.k_lindley)
    }

    pub fn g_yeoh(&self) -> Option<f64> {
        self.k_yeoh.map(|k| self.g(k))
    }
}

pub fn k_lake(lambda: f64) -> f64 {
    PI / lambda.sqrt()
}

pub fn k_lindley(lambda: f64) -> f64 {
    (2.95 - 0.08 * (1.0 - lambda)) / lambda.sqrt()
}

/// In-plane deformation gradient of the uncracked incompressible sheet.
pub fn far_field(lambda: f64, ext: Extension) -> Matrix2<f64> {
    match ext {
        Extension::Uniaxial => Matrix2::new(lambda.powf(-0.5), 0.0, 0.0, lambda),
        Extension::Equibiaxial => Matrix2::new(lambda, 0.0, 0.0, lambda),
    }
}

/// Equibiaxial stress of an incompressible sheet: 2 (λ - λ^-5)(∂W/∂I1 + λ² ∂W/∂I2).
pub fn yeoh_stress(lambda: f64, material: &MaterialModel) -> Result<f64> {
    let (w1, w2) = material.invariant_derivatives().ok_or_else(|| {
        Error::InvalidInput("Yeoh stress needs an incompressible invariant-based model".into())
    })?;
    Ok(2.0 * (lambda - lambda.powi(-5)) * (w1 + lambda * lambda * w2))
}

/// Factors at stretch `lambda` for a crack of (half-)length `c`; `b` is the semi-axis of
/// the opened crack, used by the Yeoh factor under equibiaxial extension.
pub fn tearing_factors(
    lambda: f64,
    ext: Extension,
    material: &MaterialModel,
    c: f64,
    b: Option<f64>,
) -> Result<TearingFactors> {
    if !(lambda >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "tearing factors need a stretch >= 1, got {lambda}"
        )));
    }
    if !material.is_plane_stress() {
        return Err(Error::InvalidInput(
            "tearing factors are defined for incompressible sheets".into(),
        ));
    }
    let w_far = material.strain_energy(&far_field(lambda, ext))?;
    let k_yeoh = match (ext, b) {
        (Extension::Equibiaxial, Some(b)) if w_far > 0.0 => {
            Some(yeoh_stress(lambda, material)? * PI * b / (4.0 * w_far * c))
        }
        _ => None,
    };
    Ok(TearingFactors {
        lambda,
        k_lake: k_lake(lambda),
        k_lindley: k_lindley(lambda),
        k_yeoh,
        w_far,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_stretch() {
        assert!((k_lake(1.0) - PI).abs() < 1e-15);
        assert!((k_lindley(1.0) - 2.95).abs() < 1e-15);
        assert!((k_lindley(2.0) - 3.03 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn yeoh_stress_is_the_energy_derivative() {
        // equibiaxial nominal stress = (1/2) dW/dλ for the sheet
        let m = MaterialModel::NeoHookeanIncompressiblePS {
            mu: 0.4225e6,
            thickness: 1.0,
        };
        let lam = 1.3;
        let h = 1e-6;
        let w = |l: f64| {
            m.strain_energy(&far_field(l, Extension::Equibiaxial))
                .unwrap()
        };
        let fd = (w(lam + h) - w(lam - h)) / (2.0 * h) / 2.0;
        let s = yeoh_stress(lam, &m).unwrap();
        assert!((fd / s - 1.0).abs() < 1e-7, "{fd} {s}");
    }
}
