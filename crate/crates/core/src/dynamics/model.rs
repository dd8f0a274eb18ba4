use crate::fock_core::{Banded, C64};
use crate::raman_protocol::{RamanControls, Variant};
use crate::trap_protocol::{TrapControls, TrapPoint};
use crate::{Error, Result, UnitSystem};

/// H/ħ = e a†a + g a² + g* a†².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub number: f64,
    pub pair: C64,
}

/// Jump operator L = u a + v a† entering as rate·(LρL† − ½{L†L, ρ}).
/// The rate is signed; a negative rate is anti-diffusion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearJump {
    pub rate: f64,
    pub u: C64,
    pub v: C64,
}

impl LinearJump {
    pub fn operator(&self, n: usize) -> Banded {
        Banded::linear(n, self.u, self.v)
    }

    /// L = L† (up to the truncation edge).
    pub fn is_hermitian(&self) -> bool {
        (self.u - self.v.conj()).norm() < 1e-14
    }
}

/// Generator of the master equation at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct Instant {
    pub hamiltonian: Quadratic,
    pub jumps: Vec<LinearJump>,
    /// Coefficient c of c(XρX − Tr(XρX)ρ), X = a + a†.
    pub renormalized: f64,
}

impl Instant {
    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().fold(self.renormalized.abs(), |m, j| m.max(j.rate.abs()))
    }

    /// Sum of signed dissipative rates; its sign decides the well-posed direction.
    pub fn net_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).sum::<f64>() + self.renormalized
    }
}

/// Quadratic time-dependent master equation in the ω₀ number basis.
pub trait MasterModel: Sync {
    fn at(&self, t: f64) -> Instant;
    /// Reference frequency of the number basis.
    fn omega0(&self) -> f64;
    fn units(&self) -> UnitSystem;
}

/// p²/2m + ½mω_c²x² with dephasing −γ[x, [x, ρ]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapModel {
    pub controls: TrapControls,
    /// Multiplies γ; 0 switches the engineered dephasing off.
    pub dephasing_scale: f64,
}

impl TrapModel {
    pub fn new(controls: TrapControls) -> Self {
        Self { controls, dephasing_scale: 1.0 }
    }
}

/// Generator of the trap model for given ω_c² and γ.
fn trap_instant(w0: f64, wc2: f64, gamma: f64, units: UnitSystem) -> Instant {
    let g = 0.25 * (wc2 / w0 - w0);
    let x02 = units.x0(w0).powi(2);
    let one = C64::new(1.0, 0.0);
    Instant {
        hamiltonian: Quadratic { number: 0.5 * (w0 + wc2 / w0), pair: C64::new(g, 0.0) },
        jumps: vec![LinearJump { rate: 2.0 * gamma * x02, u: one, v: one }],
        renormalized: 0.0,
    }
}

impl MasterModel for TrapModel {
    fn at(&self, t: f64) -> Instant {
        let gamma = self.dephasing_scale * self.controls.gamma(t);
        trap_instant(self.controls.omega0(), self.controls.omega_c_sq(t), gamma, self.controls.units)
    }

    fn omega0(&self) -> f64 {
        self.controls.omega0()
    }

    fn units(&self) -> UnitSystem {
        self.controls.units
    }
}

/// Trap model driven by a sampled control table, linearly interpolated.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapTableModel {
    points: Vec<TrapPoint>,
    omega0: f64,
    units: UnitSystem,
}

impl TrapTableModel {
    /// The reference frequency is the first ω_t of the table.
    pub fn new(points: Vec<TrapPoint>, units: UnitSystem) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidSpec(format!("control table needs at least 2 rows, got {}", points.len())));
        }
        if points.windows(2).any(|w| !(w[1].t > w[0].t)) || points[0].t != 0.0 {
            return Err(Error::InvalidSpec("control table times must start at 0 and increase".into()));
        }
        let omega0 = points[0].omega_t;
        if !(omega0 > 0.0) {
            return Err(Error::InvalidFrequency(omega0));
        }
        Ok(Self { points, omega0, units })
    }

    pub fn tf(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.t)
    }

    pub fn points(&self) -> &[TrapPoint] {
        &self.points
    }
}

impl MasterModel for TrapTableModel {
    fn at(&self, t: f64) -> Instant {
        let p = &self.points;
        let k = p.partition_point(|q| q.t <= t).clamp(1, p.len() - 1);
        let (a, b) = (&p[k - 1], &p[k]);
        let s = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        let lerp = |x: f64, y: f64| x * (1.0 - s) + y * s;
        trap_instant(self.omega0, lerp(a.omega_c_sq, b.omega_c_sq), lerp(a.gamma, b.gamma), self.units)
    }

    fn omega0(&self) -> f64 {
        self.omega0
    }

    fn units(&self) -> UnitSystem {
        self.units
    }
}

/// Form of the engineered dissipator in the Raman scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RamanDissipator {
    /// 2κ(D(a) + D(a†)).
    Rwa,
    /// −κ[X_t, [X_t, ρ]], X_t = a e^{−iω₀t} + a† e^{iω₀t}.
    Exact { omega0: f64 },
}

/// H = ħ(α a² + α* a†²) in the frame rotating at ω₀, with the engineered
/// dissipator of the chosen variant.
#[derive(Clone, Debug, PartialEq)]
pub struct RamanModel {
    pub controls: RamanControls,
    pub dissipator: RamanDissipator,
    pub omega0: f64,
    pub units: UnitSystem,
}

impl RamanModel {
    pub fn new(controls: RamanControls, omega0: f64, units: UnitSystem) -> Self {
        Self { controls, dissipator: RamanDissipator::Rwa, omega0, units }
    }
}

impl MasterModel for RamanModel {
    fn at(&self, t: f64) -> Instant {
        let (alpha, kappa) = self.controls.at(t);
        let hamiltonian = Quadratic { number: 0.0, pair: alpha };
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match self.controls.variant {
            Variant::FourLaser => Instant { hamiltonian, jumps: Vec::new(), renormalized: 0.25 * kappa },
            Variant::TwoLaser => {
                let jumps = match self.dissipator {
                    RamanDissipator::Rwa => vec![
                        LinearJump { rate: 2.0 * kappa, u: one, v: zero },
                        LinearJump { rate: 2.0 * kappa, u: zero, v: one },
                    ],
                    RamanDissipator::Exact { omega0 } => {
                        let e = C64::from_polar(1.0, -omega0 * t);
                        vec![LinearJump { rate: 2.0 * kappa, u: e, v: e.conj() }]
                    }
                };
                Instant { hamiltonian, jumps, renormalized: 0.0 }
            }
        }
    }

    fn omega0(&self) -> f64 {
        self.omega0
    }

    fn units(&self) -> UnitSystem {
        self.units
    }
}

/// Model given by a closure, for tests and ad-hoc generators.
pub struct FnModel<F: Fn(f64) -> Instant + Sync> {
    pub f: F,
    pub omega0: f64,
    pub units: UnitSystem,
}

impl<F: Fn(f64) -> Instant + Sync> MasterModel for FnModel<F> {
    fn at(&self, t: f64) -> Instant {
        (self.f)(t)
    }
    fn omega0(&self) -> f64 {
        self.omega0
    }
    fn units(&self) -> UnitSystem {
        self.units
    }
}
