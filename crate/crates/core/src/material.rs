//! Hyperelastic laws: second Piola-Kirchhoff stress and material tangent, pushed
//! forward to Cauchy stress and spatial tangent.
//!
//! Plane stress models are incompressible: the out-of-plane stretch is
//! eliminated through C33 = 1 / det(C̄) and the thickness follows t = T / sqrt(det C̄).

use nalgebra::{Matrix2, Matrix3};

use crate::error::{Error, Result};

/// Fourth-order 2D tensor, index [i][j][k][l].
pub type Tensor4 = [[[[f64; 2]; 2]; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialModel {
    /// Small-strain isotropic elasticity (plane strain), used for linear runs.
    LinearElastic { lambda: f64, mu: f64 },
    /// Logarithmic compressible Neo-Hookean, plane strain.
    NeoHookeanCompressible { lambda: f64, mu: f64 },
    /// Incompressible Neo-Hookean, plane stress.
    NeoHookeanIncompressiblePS { mu: f64, thickness: f64 },
    /// Incompressible Mooney-Rivlin, W = mu1/2 (I1 - 3) - mu2/2 (I2 - 3), plane stress.
    MooneyRivlinPS { mu1: f64, mu2: f64, thickness: f64 },
}

/// Material response at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct StressTangent {
    /// Cauchy stress [Pa].
    pub sigma: Matrix2<f64>,
    /// Spatial tangent, Voigt [xx, yy, xy] with engineering shear.
    pub ce: Matrix3<f64>,
    /// Volume ratio; det(F̄) t/T for plane stress.
    pub j_det: f64,
    /// Current thickness (plane stress only).
    pub thickness: Option<f64>,
    /// Stored energy per undeformed volume.
    pub energy: f64,
    /// Second Piola-Kirchhoff stress.
    pub pk2: Matrix2<f64>,
}

/// Lamé parameters from Young's modulus and Poisson's ratio.
pub fn lame_from_engineering(e: f64, nu: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) {
        return Err(Error::InvalidInput(format!(
            "Young's modulus must be positive, got {e}"
        )));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(Error::InvalidInput(format!(
            "Poisson's ratio must lie in (-1, 0.5), got {nu}"
        )));
    }
    Ok((
        e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
        e / (2.0 * (1.0 + nu)),
    ))
}

/// Young's modulus and Poisson's ratio from Lamé parameters.
pub fn engineering_from_lame(lambda: f64, mu: f64) -> (f64, f64) {
    (
        mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu),
        lambda / (2.0 * (lambda + mu)),
    )
}

const VOIGT: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];

pub fn to_voigt(c: &Tensor4) -> Matrix3<f64> {
    Matrix3::from_fn(|a, b| {
        let (i, j) = VOIGT[a];
        let (k, l) = VOIGT[b];
        c[i][j][k][l]
    })
}

pub fn tensor_from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Tensor4 {
    let mut c = [[[[0.0; 2]; 2]; 2]; 2];
    for (i, ci) in c.iter_mut().enumerate() {
        for (j, cij) in ci.iter_mut().enumerate() {
            for (k, cijk) in cij.iter_mut().enumerate() {
                for (l, v) in cijk.iter_mut().enumerate() {
                    *v = f(i, j, k, l);
                }
            }
        }
    }
    c
}

/// sigma = (1/J) F S F^T,  c_ijkl = (1/J) F_im F_jn F_kp F_lq C_mnpq.
pub fn push_forward(
    f: &Matrix2<f64>,
    s: &Matrix2<f64>,
    cm: &Tensor4,
    j: f64,
) -> Result<(Matrix2<f64>, Tensor4)> {
    if !(j > 0.0) || !(f.determinant() > 0.0) {
        return Err(Error::Inversion {
            element: usize::MAX,
            det: f.determinant(),
        });
    }
    let sigma = f * s * f.transpose() / j;
    // contract one index at a time
    let mut t1 = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for n in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    t1[i][n][p][q] = (0..2).map(|m| f[(i, m)] * cm[m][n][p][q]).sum();
                }
            }
        }
    }
    let mut t2 = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for jj in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    t2[i][jj][p][q] = (0..2).map(|n| f[(jj, n)] * t1[i][n][p][q]).sum();
                }
            }
        }
    }
    let mut t3 = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for jj in 0..2 {
            for k in 0..2 {
                for q in 0..2 {
                    t3[i][jj][k][q] = (0..2).map(|p| f[(k, p)] * t2[i][jj][p][q]).sum();
                }
            }
        }
    }
    let c =
        tensor_from_fn(|i, jj, k, l| (0..2).map(|q| f[(l, q)] * t3[i][jj][k][q]).sum::<f64>() / j);
    Ok((sigma, c))
}

/// Symmetrised A-product: 1/2 (A_ik A_jl + A_il A_jk).
fn sym_product(a: &Matrix2<f64>) -> Tensor4 {
    tensor_from_fn(|i, j, k, l| 0.5 * (a[(i, k)] * a[(j, l)] + a[(i, l)] * a[(j, k)]))
}

fn outer(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Tensor4 {
    tensor_from_fn(|i, j, k, l| a[(i, j)] * b[(k, l)])
}

fn combine(terms: &[(f64, &Tensor4)]) -> Tensor4 {
    tensor_from_fn(|i, j, k, l| terms.iter().map(|(s, t)| s * t[i][j][k][l]).sum())
}

impl MaterialModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MaterialModel::LinearElastic { lambda, mu }
            | MaterialModel::NeoHookeanCompressible { lambda, mu } => mu > 0.0 && lambda + mu > 0.0,
            MaterialModel::NeoHookeanIncompressiblePS { mu, thickness } => {
                mu > 0.0 && thickness > 0.0
            }
            MaterialModel::MooneyRivlinPS {
                mu1,
                mu2,
                thickness,
            } => mu1 - mu2 > 0.0 && thickness > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "inadmissible material parameters {self:?}"
            )))
        }
    }

    pub fn is_plane_stress(&self) -> bool {
        matches!(
            self,
            MaterialModel::NeoHookeanIncompressiblePS { .. } | MaterialModel::MooneyRivlinPS { .. }
        )
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, MaterialModel::LinearElastic { .. })
    }

    /// Small-strain shear modulus.
    pub fn shear_modulus(&self) -> f64 {
        match *self {
            MaterialModel::LinearElastic { mu, .. }
            | MaterialModel::NeoHookeanCompressible { mu, .. } => mu,
            MaterialModel::NeoHookeanIncompressiblePS { mu, .. } => mu,
            MaterialModel::MooneyRivlinPS { mu1, mu2, .. } => mu1 - mu2,
        }
    }

    /// Small-strain (E, nu); incompressible models give nu = 1/2.
    pub fn engineering_constants(&self) -> (f64, f64) {
        match *self {
            MaterialModel::LinearElastic { lambda, mu }
            | MaterialModel::NeoHookeanCompressible { lambda, mu } => {
                engineering_from_lame(lambda, mu)
            }
            _ => (3.0 * self.shear_modulus(), 0.5),
        }
    }

    /// Derivatives of the incompressible energy with respect to I1 and I2.
    pub fn invariant_derivatives(&self) -> Option<(f64, f64)> {
        match *self {
            MaterialModel::NeoHookeanIncompressiblePS { mu, .. } => Some((0.5 * mu, 0.0)),
            MaterialModel::MooneyRivlinPS { mu1, mu2, .. } => Some((0.5 * mu1, -0.5 * mu2)),
            _ => None,
        }
    }

    /// Second Piola-Kirchhoff stress, material tangent, energy, volume ratio and thickness.
    pub fn material_response(
        &self,
        f: &Matrix2<f64>,
    ) -> Result<(Matrix2<f64>, Tensor4, f64, f64, Option<f64>)> {
        let det_f = f.determinant();
        if !self.is_linear() && !(det_f > 0.0) {
            return Err(Error::Inversion {
                element: usize::MAX,
                det: det_f,
            });
        }
        let c = f.transpose() * f;
        let id = Matrix2::identity();
        match *self {
            MaterialModel::LinearElastic { lambda, mu } => {
                // small strain: S is the linear stress, F ignored beyond its gradient
                let eps = (f + f.transpose()) * 0.5 - id;
                let s = id * (lambda * eps.trace()) + eps * (2.0 * mu);
                let cm = combine(&[(lambda, &outer(&id, &id)), (2.0 * mu, &sym_product(&id))]);
                let w = 0.5 * lambda * eps.trace().powi(2) + mu * (eps * eps).trace();
                Ok((s, cm, w, 1.0, None))
            }
            MaterialModel::NeoHookeanCompressible { lambda, mu } => {
                let j = det_f;
                let lnj = j.ln();
                let ci = c.try_inverse().unwrap();
                let s = (id - ci) * mu + ci * (lambda * lnj);
                let cm = combine(&[
                    (lambda, &outer(&ci, &ci)),
                    (2.0 * (mu - lambda * lnj), &sym_product(&ci)),
                ]);
                // plane strain: C33 = 1
                let w = 0.5 * lambda * lnj * lnj - mu * lnj + 0.5 * mu * (c.trace() + 1.0 - 3.0);
                Ok((s, cm, w, j, None))
            }
            MaterialModel::NeoHookeanIncompressiblePS { mu, thickness } => {
                let d = c.determinant();
                let a = c.try_inverse().unwrap();
                let s = (id - a / d) * mu;
                let cm = combine(&[
                    (2.0 * mu / d, &outer(&a, &a)),
                    (2.0 * mu / d, &sym_product(&a)),
                ]);
                let w = 0.5 * mu * (c.trace() + 1.0 / d - 3.0);
                let t = thickness / d.sqrt();
                Ok((s, cm, w, det_f * t / thickness, Some(t)))
            }
            MaterialModel::MooneyRivlinPS {
                mu1,
                mu2,
                thickness,
            } => {
                let d = c.determinant();
                let a = c.try_inverse().unwrap();
                let tr = c.trace();
                let s = (id - a / d) * mu1 - (a * d + id / d - a * (tr / d)) * mu2;
                let aa = outer(&a, &a);
                let ia = sym_product(&a);
                let ida = outer(&id, &a);
                let aid = outer(&a, &id);
                let cm = combine(&[
                    (2.0 * mu1 / d, &aa),
                    (2.0 * mu1 / d, &ia),
                    (-2.0 * mu2 * d, &aa),
                    (2.0 * mu2 * d, &ia),
                    (2.0 * mu2 / d, &ida),
                    (2.0 * mu2 / d, &aid),
                    (-2.0 * mu2 * tr / d, &aa),
                    (-2.0 * mu2 * tr / d, &ia),
                ]);
                let i1 = tr + 1.0 / d;
                let i2 = d + tr / d;
                let w = 0.5 * mu1 * (i1 - 3.0) - 0.5 * mu2 * (i2 - 3.0);
                let t = thickness / d.sqrt();
                Ok((s, cm, w, det_f * t / thickness, Some(t)))
            }
        }
    }

    /// Cauchy stress and spatial tangent at in-plane deformation gradient `f`.
    pub fn evaluate(&self, f: &Matrix2<f64>) -> Result<StressTangent> {
        let (s, cm, w, j, t) = self.material_response(f)?;
        if self.is_linear() {
            return Ok(StressTangent {
                sigma: s,
                ce: to_voigt(&cm),
                j_det: 1.0,
                thickness: None,
                energy: w,
                pk2: s,
            });
        }
        let (sigma, c) = push_forward(f, &s, &cm, j)?;
        Ok(StressTangent {
            sigma,
            ce: to_voigt(&c),
            j_det: j,
            thickness: t,
            energy: w,
            pk2: s,
        })
    }

    /// Stored energy per undeformed volume.
    pub fn strain_energy(&self, f: &Matrix2<f64>) -> Result<f64> {
        Ok(self.material_response(f)?.2)
    }

    /// First Piola-Kirchhoff stress P = F S (the linear model returns its small-strain stress).
    pub fn pk1(&self, f: &Matrix2<f64>) -> Result<Matrix2<f64>> {
        let (s, ..) = self.material_response(f)?;
        Ok(if self.is_linear() { s } else { f * s })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_examples() {
        let (l, m) = lame_from_engineering(50e3, 0.45).unwrap();
        assert!((m - 17241.379310344826).abs() < 1e-9);
        assert!((l - 155172.41379310345).abs() < 1e-7);
        let (e, nu) = engineering_from_lame(l, m);
        assert!((e / 50e3 - 1.0).abs() < 1e-12 && (nu - 0.45).abs() < 1e-12);
        let (l, m) = lame_from_engineering(2.0, 0.0).unwrap();
        assert_eq!((l, m), (0.0, 1.0));
        assert!(lame_from_engineering(1.0, 0.5).is_err());
    }

    #[test]
    fn compressible_stress_matches_closed_form() {
        let (lambda, mu) = (2.0, 1.5);
        let m = MaterialModel::NeoHookeanCompressible { lambda, mu };
        let f = Matrix2::new(1.1, 0.0, 0.0, 1.0);
        let r = m.evaluate(&f).unwrap();
        let j: f64 = 1.1;
        let expect_xx = (lambda * j.ln() + mu * (1.21 - 1.0)) / j;
        let expect_yy = lambda * j.ln() / j;
        assert!((r.sigma[(0, 0)] - expect_xx).abs() < 1e-13);
        assert!((r.sigma[(1, 1)] - expect_yy).abs() < 1e-13);
    }

    #[test]
    fn mooney_rivlin_reduces_to_neo_hookean() {
        let f = Matrix2::new(1.3, 0.1, -0.05, 0.9);
        let a = MaterialModel::MooneyRivlinPS {
            mu1: 2.0,
            mu2: 0.0,
            thickness: 1.0,
        }
        .evaluate(&f)
        .unwrap();
        let b = MaterialModel::NeoHookeanIncompressiblePS {
            mu: 2.0,
            thickness: 1.0,
        }
        .evaluate(&f)
        .unwrap();
        assert!((a.sigma - b.sigma).norm() <= 1e-12 * b.sigma.norm());
        assert!((a.ce - b.ce).norm() <= 1e-12 * b.ce.norm());
    }
}
