//! Trap-frequency shortcuts: quintic reference schedules, the closed control
//! frequency, the open controls (ω_c², γ) with engineered position dephasing,
//! and the operator builders used to check them.

mod controls;
mod operators;
mod schedule;

pub use controls::{
    control_frequency_closed, control_open, control_open_isentropic, ClosedTrapControl, ThermalProfile,
    TrapControls, TrapFlags, TrapPoint,
};
pub use operators::{
    b_form_dissipator, cd_hamiltonian, control_dissipator, instantaneous_ladder, trap_hamiltonian,
};
pub use schedule::{make_quintic, quintic, time_grid, Schedule};
