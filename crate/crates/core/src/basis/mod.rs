//! Mean value shape functions, polygon quadrature and gradient correction.

mod correction;
mod mvc;
mod patch;
mod quadrature;

pub use correction::{boundary_flux, correct_gradients, correction_vectors, evaluate_scheme};
pub use mvc::{mean_value_grad, mean_value_shape, ShapeEval};
pub use patch::{isotropic_voigt, patch_mesh, run_patch_test, PATCH_KAPPA, PATCH_MU};
pub use quadrature::{
    canonical_polygon, collapsed_rule, gauss_legendre, map_rule, triangle_rule, triangulate,
    triangulate_quadrature, two_level_quadrature, QuadratureScheme, DEFAULT_ORDER, ENRICHED_ORDER,
};
