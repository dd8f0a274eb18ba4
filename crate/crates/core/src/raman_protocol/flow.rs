use super::lasers::decompose_alpha;
use super::transfer::{condition_number, variant_matrix, Variant};
use crate::fock_core::C64;
use crate::squeezed_state::{factorize, normal_ordered_trace, unfactorize, wrap_phase, FactorizedForm, SqueezeParams};
use crate::trap_protocol::{make_quintic, time_grid, Schedule};
use crate::{Error, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Largest 3×3 condition number accepted by the inversion.
pub const MAX_CONDITION: f64 = 1e8;

/// Quintic interpolation of (J_R, J_I, B) between two factorized states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFlow {
    pub jr: Schedule,
    pub ji: Schedule,
    pub b: Schedule,
}

/// Whether (J, B) is the factorized form of a normalizable state.
pub fn in_physical_domain(j: C64, b: f64) -> bool {
    let j2 = j.norm_sqr();
    b > 0.0 && 4.0 * j2 < 1.0 && (-b).exp() < (1.0 - 4.0 * j2).sqrt()
}

impl StateFlow {
    pub fn from_forms(initial: &FactorizedForm, target: &FactorizedForm, tf: f64) -> Result<Self> {
        Ok(Self {
            jr: make_quintic(initial.j.re, target.j.re, tf)?,
            ji: make_quintic(initial.j.im, target.j.im, tf)?,
            b: make_quintic(initial.b, target.b, tf)?,
        })
    }

    pub fn between(initial: &SqueezeParams, target: &SqueezeParams, tf: f64) -> Result<Self> {
        Self::from_forms(&factorize(initial)?, &factorize(target)?, tf)
    }

    pub fn tf(&self) -> f64 {
        self.b.tf
    }

    pub fn j(&self, t: f64) -> C64 {
        C64::new(self.jr.value(t), self.ji.value(t))
    }

    pub fn b(&self, t: f64) -> f64 {
        self.b.value(t)
    }

    /// (J̇_R, J̇_I, Ḃ).
    pub fn velocity(&self, t: f64) -> Vector3<f64> {
        Vector3::new(self.jr.d1(t), self.ji.d1(t), self.b.d1(t))
    }

    /// Factorized form at `t`, K fixed by unit trace.
    pub fn form(&self, t: f64) -> Result<FactorizedForm> {
        let (j, b) = (self.j(t), self.b(t));
        let tr = normal_ordered_trace(j.norm(), b)?;
        Ok(FactorizedForm { k: C64::new(1.0 / tr, 0.0), j, b })
    }

    pub fn params(&self, t: f64) -> Result<SqueezeParams> {
        unfactorize(&self.form(t)?)
    }

    /// λ(t) = −ε(t).
    pub fn lambda(&self, t: f64) -> Result<f64> {
        Ok(self.params(t)?.lambda())
    }

    pub fn check_domain(&self, grid_points: usize) -> Result<()> {
        for t in time_grid(self.tf(), grid_points) {
            if !in_physical_domain(self.j(t), self.b(t)) {
                return Err(Error::DesignInfeasible {
                    t,
                    reason: format!("(J, B) = ({}, {}) is not a physical state", self.j(t), self.b(t)),
                });
            }
        }
        Ok(())
    }
}

/// One control sample, in the column order of the CSV output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamanPoint {
    pub t: f64,
    #[serde(rename = "alpha_R")]
    pub alpha_r: f64,
    #[serde(rename = "alpha_I")]
    pub alpha_i: f64,
    pub abs_alpha: f64,
    pub phase_diff: f64,
    pub kappa: f64,
}

impl RamanPoint {
    pub fn new(t: f64, alpha: C64, kappa: f64) -> Self {
        let dec = decompose_alpha(alpha, (0.0, 1.0), 1.0);
        Self { t, alpha_r: alpha.re, alpha_i: alpha.im, abs_alpha: dec.abs_alpha, phase_diff: dec.phase_diff, kappa }
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_r, self.alpha_i)
    }
}

/// Exact evaluator behind a control table, when one is known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControlSource {
    Table,
    Flow(StateFlow),
    /// Unitary squeezing along r(t): α = iṙ/2, κ = 0.
    Closed(Schedule),
}

/// α(t) and κ(t) sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamanControls {
    pub variant: Variant,
    pub points: Vec<RamanPoint>,
    pub max_condition: f64,
    #[serde(skip, default = "table")]
    pub source: ControlSource,
}

fn table() -> ControlSource {
    ControlSource::Table
}

/// Solve M(J, B) v_c = v_sq at one time point.
pub fn solve_controls(variant: Variant, j: C64, b: f64, v_sq: Vector3<f64>, t: f64) -> Result<(Vector3<f64>, f64)> {
    let m = variant_matrix(variant, j, b);
    let cond = condition_number(&m);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::DesignInfeasible { t, reason: format!("transfer matrix condition number {cond:e}") });
    }
    let v = m
        .full_piv_lu()
        .solve(&v_sq)
        .ok_or_else(|| Error::DesignInfeasible { t, reason: "singular transfer matrix".into() })?;
    Ok((v, cond))
}

impl RamanControls {
    pub fn from_points(variant: Variant, points: Vec<RamanPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidSchedule("control table needs at least two rows".into()));
        }
        if points.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidSchedule("control table times must increase".into()));
        }
        Ok(Self { variant, points, max_condition: f64::NAN, source: ControlSource::Table })
    }

    pub fn tf(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.t)
    }

    /// (α, κ) at `t`: exact when the source is known, else linear interpolation.
    pub fn at(&self, t: f64) -> (C64, f64) {
        match self.source {
            ControlSource::Flow(flow) => {
                match solve_controls(self.variant, flow.j(t), flow.b(t), flow.velocity(t), t) {
                    Ok((v, _)) => (C64::new(v[1], v[2]), v[0]),
                    Err(_) => self.interpolate(t),
                }
            }
            ControlSource::Closed(r) => (C64::new(0.0, 0.5 * r.d1(t)), 0.0),
            ControlSource::Table => self.interpolate(t),
        }
    }

    fn interpolate(&self, t: f64) -> (C64, f64) {
        let p = &self.points;
        let k = p.partition_point(|q| q.t <= t).clamp(1, p.len() - 1);
        let (a, b) = (&p[k - 1], &p[k]);
        let s = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        (a.alpha() * (1.0 - s) + b.alpha() * s, a.kappa * (1.0 - s) + b.kappa * s)
    }

    pub fn kappa_max(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.kappa.abs()))
    }

    pub fn alpha_max(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.abs_alpha))
    }

    /// κ < 0 somewhere: the engineered term is not of Lindblad form there.
    pub fn non_lindblad(&self) -> bool {
        self.points.iter().any(|p| p.kappa < 0.0)
    }

    /// Copy with κ forced to zero (table-driven), for negative controls.
    pub fn without_dissipation(&self) -> Self {
        let points = self.points.iter().map(|p| RamanPoint { kappa: 0.0, ..*p }).collect();
        Self { variant: self.variant, points, max_condition: self.max_condition, source: ControlSource::Table }
    }
}

fn invert_with(variant: Variant, flow: &StateFlow, grid_points: usize) -> Result<RamanControls> {
    flow.check_domain(grid_points)?;
    let mut points = Vec::with_capacity(grid_points);
    let mut max_cond: f64 = 0.0;
    for t in time_grid(flow.tf(), grid_points) {
        let (v, cond) = solve_controls(variant, flow.j(t), flow.b(t), flow.velocity(t), t)?;
        max_cond = max_cond.max(cond);
        points.push(RamanPoint::new(t, C64::new(v[1], v[2]), v[0]));
    }
    Ok(RamanControls { variant, points, max_condition: max_cond, source: ControlSource::Flow(*flow) })
}

/// Two-laser controls realizing `flow`.
pub fn invert_controls(flow: &StateFlow, grid_points: usize) -> Result<RamanControls> {
    invert_with(Variant::TwoLaser, flow, grid_points)
}

/// Four-laser controls; the dephasing rate is a square there, so κ < 0 is infeasible.
pub fn jc_invert_controls(flow: &StateFlow, grid_points: usize) -> Result<RamanControls> {
    let c = invert_with(Variant::FourLaser, flow, grid_points)?;
    let scale = c.kappa_max().max(c.alpha_max()).max(1e-300);
    if let Some(p) = c.points.iter().find(|p| p.kappa < -1e-12 * scale) {
        return Err(Error::DesignInfeasible {
            t: p.t,
            reason: format!("four-laser scheme needs κ ≥ 0 but the flow requires κ = {:e}", p.kappa),
        });
    }
    Ok(c)
}

/// Integrated (J, B) path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub t: Vec<f64>,
    pub j: Vec<C64>,
    pub b: Vec<f64>,
}

impl FlowTrajectory {
    /// Largest deviation from `flow` over all samples, max over |ΔJ_R|, |ΔJ_I|, |ΔB|.
    pub fn max_deviation(&self, flow: &StateFlow) -> f64 {
        self.t.iter().zip(&self.j).zip(&self.b).fold(0.0, |m, ((&t, j), b)| {
            let dj = j - flow.j(t);
            m.max(dj.re.abs()).max(dj.im.abs()).max((b - flow.b(t)).abs())
        })
    }

    pub fn final_form(&self) -> Result<FactorizedForm> {
        let (j, b) = (*self.j.last().unwrap(), *self.b.last().unwrap());
        Ok(FactorizedForm { k: C64::new(1.0 / normal_ordered_trace(j.norm(), b)?, 0.0), j, b })
    }
}

/// RK4 integration of (J̇_R, J̇_I, Ḃ) = M(J, B)·(κ, α_R, α_I) over [0, tf].
pub fn forward_parameter_flow(controls: &RamanControls, initial: &FactorizedForm, steps: usize) -> Result<FlowTrajectory> {
    let steps = steps.max(1);
    let tf = controls.tf();
    let h = tf / steps as f64;
    let rhs = |t: f64, y: Vector3<f64>| -> Vector3<f64> {
        let (alpha, kappa) = controls.at(t);
        variant_matrix(controls.variant, C64::new(y[0], y[1]), y[2]) * Vector3::new(kappa, alpha.re, alpha.im)
    };
    let mut y = Vector3::new(initial.j.re, initial.j.im, initial.b);
    let mut out = FlowTrajectory { t: vec![0.0], j: vec![initial.j], b: vec![initial.b] };
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, y);
        let k2 = rhs(t + 0.5 * h, y + k1 * (0.5 * h));
        let k3 = rhs(t + 0.5 * h, y + k2 * (0.5 * h));
        let k4 = rhs(t + h, y + k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let j = C64::new(y[0], y[1]);
        let tn = (k + 1) as f64 * h;
        if !in_physical_domain(j, y[2]) {
            return Err(Error::IllPosed { t: tn, reason: format!("(J, B) = ({j}, {}) left the physical domain", y[2]) });
        }
        out.t.push(tn);
        out.j.push(j);
        out.b.push(y[2]);
    }
    Ok(out)
}

/// Closed (unitary) squeezing: |α| = ṙ/2 along a squeezing schedule r(t).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedRamanDesign {
    pub r: Schedule,
    pub omega0: f64,
}

pub fn closed_squeeze_design(r: Schedule, omega0: f64, grid_points: usize) -> Result<ClosedRamanDesign> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidFrequency(omega0));
    }
    let mut sign = 0.0;
    for t in time_grid(r.tf, grid_points) {
        let d = r.d1(t);
        if d != 0.0 {
            if sign != 0.0 && d.signum() != sign {
                return Err(Error::SignSplit(t));
            }
            sign = d.signum();
        }
    }
    Ok(ClosedRamanDesign { r, omega0 })
}

impl ClosedRamanDesign {
    pub fn abs_alpha(&self, t: f64) -> f64 {
        0.5 * self.r.d1(t).abs()
    }

    /// α = iṙ/2 keeps the squeezing phase at 0 in the frame rotating at ω₀.
    pub fn alpha(&self, t: f64) -> C64 {
        C64::new(0.0, 0.5 * self.r.d1(t))
    }

    /// Lab-frame squeezing phase at tf: −2ω₀tf, wrapped.
    pub fn final_phase(&self) -> f64 {
        wrap_phase(-2.0 * self.omega0 * self.r.tf)
    }

    pub fn controls(&self, grid_points: usize) -> RamanControls {
        let points = time_grid(self.r.tf, grid_points).into_iter().map(|t| RamanPoint::new(t, self.alpha(t), 0.0)).collect();
        RamanControls { variant: Variant::TwoLaser, points, max_condition: 1.0, source: ControlSource::Closed(self.r) }
    }
}

/// Shortest positive duration whose closed protocol ends at lab phase `phi_f`.
pub fn duration_for_phase(phi_f: f64, omega0: f64) -> f64 {
    let mut x = (-phi_f).rem_euclid(2.0 * std::f64::consts::PI);
    if x == 0.0 {
        x = 2.0 * std::f64::consts::PI;
    }
    x / (2.0 * omega0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn flow(lf: f64, rf: f64, phif: f64) -> StateFlow {
        let a = SqueezeParams::thermal(1.0).unwrap();
        let b = SqueezeParams::new(rf, phif, -lf).unwrap();
        StateFlow::between(&a, &b, 1.0).unwrap()
    }

    #[test]
    fn isothermal_identity_needs_no_control() {
        let c = invert_controls(&flow(-1.0, 0.0, 0.0), 1001).unwrap();
        assert!(c.kappa_max() < 1e-14 && c.alpha_max() < 1e-14);
    }

    #[test]
    fn cooling_and_heating_have_opposite_kappa() {
        let cool = invert_controls(&flow(-2.0, 0.0, 0.0), 1001).unwrap();
        let heat = invert_controls(&flow(-0.5, 0.0, 0.0), 1001).unwrap();
        let mid = 500;
        assert!(cool.points[mid].kappa < 0.0 && heat.points[mid].kappa > 0.0);
        assert!(cool.non_lindblad() && !heat.non_lindblad());
    }

    #[test]
    fn mirrored_squeezing_same_kappa() {
        let plus = invert_controls(&flow(-2.0, 1.0, FRAC_PI_4), 1001).unwrap();
        let minus = invert_controls(&flow(-2.0, -1.0, FRAC_PI_4), 1001).unwrap();
        for (p, m) in plus.points.iter().zip(&minus.points) {
            assert!((p.kappa - m.kappa).abs() < 1e-9);
            assert!((p.alpha() + m.alpha()).norm() < 1e-9);
        }
    }

    #[test]
    fn round_trip_through_forward_flow() {
        let f = flow(-2.0, 1.0, FRAC_PI_4);
        let c = invert_controls(&f, 1001).unwrap();
        let table = RamanControls::from_points(c.variant, c.points.clone()).unwrap();
        let traj = forward_parameter_flow(&table, &factorize(&SqueezeParams::thermal(1.0).unwrap()).unwrap(), 1000).unwrap();
        assert!(traj.max_deviation(&f) < 1e-4, "{}", traj.max_deviation(&f));
        let p = unfactorize(&traj.final_form().unwrap()).unwrap();
        assert!((p.r() - 1.0).abs() < 1e-3 && (p.phi() - FRAC_PI_4).abs() < 1e-3 && (p.epsilon() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn zero_controls_freeze_flow() {
        let pts = vec![RamanPoint::new(0.0, C64::new(0.0, 0.0), 0.0), RamanPoint::new(1.0, C64::new(0.0, 0.0), 0.0)];
        let c = RamanControls::from_points(Variant::TwoLaser, pts).unwrap();
        let f0 = factorize(&SqueezeParams::new(0.4, 0.3, 1.2).unwrap()).unwrap();
        let traj = forward_parameter_flow(&c, &f0, 50).unwrap();
        assert_eq!(*traj.j.last().unwrap(), f0.j);
        assert_eq!(*traj.b.last().unwrap(), f0.b);
    }

    #[test]
    fn four_laser_sign_structure() {
        assert!(jc_invert_controls(&flow(-0.5, 0.0, 0.0), 1001).is_ok());
        assert!(matches!(jc_invert_controls(&flow(-2.0, 0.0, 0.0), 1001), Err(Error::DesignInfeasible { .. })));
        let heat = jc_invert_controls(&flow(-0.5, 0.0, 0.0), 1001).unwrap();
        assert!(heat.alpha_max() > 1e-6);
    }

    #[test]
    fn closed_design_law() {
        let r = make_quintic(0.0, 4.0, 1.0).unwrap();
        let d = closed_squeeze_design(r, 1.0, 1001).unwrap();
        let t = 0.37;
        assert!((d.abs_alpha(t) - 2.0 * crate::trap_protocol::quintic(t).1).abs() < 1e-12);
        assert_eq!(d.final_phase(), wrap_phase(-2.0));
        assert!((duration_for_phase(-1.0, 1.0) - 0.5).abs() < 1e-15);
    }
}
