//! Time evolution: dense Lindblad integration, the Gaussian moment oracle,
//! the stochastic unraveling, the full two-level ion model and protocol
//! verification.

mod gaussian;
mod ion;
mod lindblad;
mod model;
mod stochastic;
mod verify;

pub use gaussian::{evolve_covariance, moment_rhs, LadderMoments};
pub use ion::{full_ion_model, IonModelSpec, IonRun};
pub use lindblad::{check_resolution, integrate_master, FockGenerator, IntegrateOptions, Trajectory};
pub use model::{FnModel, Instant, LinearJump, MasterModel, Quadratic, RamanDissipator, RamanModel, TrapModel, TrapTableModel};
pub use stochastic::{ensemble_average, stochastic_trajectory, EnsembleResult, PureTrajectory, StochasticRunSpec};
pub use verify::{
    gaussian_entropy, gaussian_fidelity, rate_segments, verify_protocol, DesignedPath, Direction, RamanPath, RamanShape,
    SegmentCheck, TrajectoryRow, VerificationReport, VerifyOptions,
};
