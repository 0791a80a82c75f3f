//! Crack geometry, node / element classification and the enriched approximation.

mod classify;
mod crack;
mod kinematics;

pub use classify::{
    classify, split_polygon, CutLine, ElementKind, EnrichmentMap, NodeEnrichment, MIN_SIDE_FRACTION,
};
pub use crack::{tip_branch_polar, ClosestPoint, CrackGeometry};
pub use kinematics::{
    build_b_g, deformation_gradient, element_quadrature, gather, integrate_element,
    spatial_gradients, xfem_jacobians, BasisOptions, ElementContext, ElementIntegration,
    FunctionEval, FunctionKind, Jacobians, QuadPoint,
};
