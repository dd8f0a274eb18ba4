use serde::{Deserialize, Serialize};

/// Values of ħ and m. Frequencies are passed explicitly where needed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

impl UnitSystem {
    /// Ground-state extension x₀ = √(ħ/(2mω)).
    pub fn x0(&self, omega: f64) -> f64 {
        (self.hbar / (2.0 * self.mass * omega)).sqrt()
    }

    /// Momentum scale p₀ = √(ħmω/2), so that x₀p₀ = ħ/2.
    pub fn p0(&self, omega: f64) -> f64 {
        (self.hbar * self.mass * omega / 2.0).sqrt()
    }
}
