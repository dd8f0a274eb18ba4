//! Two-photon Raman shortcuts: laser-to-control maps, the transfer matrices
//! linking (κ, α) to the motion of the factorized state, their inversion,
//! and the forward parameter flow used to check it.

mod flow;
mod lasers;
mod transfer;

pub use flow::{
    closed_squeeze_design, duration_for_phase, forward_parameter_flow, in_physical_domain, invert_controls,
    jc_invert_controls, solve_controls, ClosedRamanDesign, ControlSource, FlowTrajectory, RamanControls, RamanPoint,
    StateFlow, MAX_CONDITION,
};
pub use lasers::{
    alpha_from_lasers, decompose_alpha, HierarchyTier, JcLaserConfig, LaserDecomposition, RamanLaserConfig,
};
pub use transfer::{condition_number, jc_transfer_matrix, transfer_matrix, variant_matrix, Variant};
