//! Squeezed thermal states: the (r, φ, ε) parametrization, the normal-ordered
//! (K, J, B) form, Gaussian moments, Wigner functions and the variance map.

mod factor;
mod gaussian;
mod params;
mod varmap;
mod wigner;

pub use factor::{
    b_of, factorize, factorize_lambda, factorized_product, factorized_state, j_of, k_of,
    normal_ordered_trace, pair_creation_exponential, squeezed_thermal, unfactorize, FactorizedForm,
};
pub use gaussian::{moments_from_density, to_gaussian_moments, variance_x, GaussianMoments};
pub use params::{wrap_phase, SqueezeParams};
pub use varmap::{thermal_variance, variance_db, variance_map, VarianceMapGrid, VarianceMapPoint};
pub use wigner::{gaussian_wigner, wigner, wigner_from_density, WignerField, WignerGrid};
