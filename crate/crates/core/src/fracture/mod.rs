//! Crack-tip post-processing: domain J-integral, stress intensity factors by the
//! interaction integral, and tearing-energy factors for rubber sheets.

mod jintegral;
mod sif;
mod tearing;

pub use jintegral::{crack_opening, j_integral, JDomain};
pub use sif::{
    hooke, interaction_integral, stress_intensity_factors, williams_displacement,
    williams_gradient, LefmConstants, Mode,
};
pub use tearing::{
    far_field, k_lake, k_lindley, tearing_factors, yeoh_stress, Extension, TearingFactors,
};
