use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::LinearFlow;
use crate::spectral::{forward_transform, inverse_transform, GridSpec};

use super::energy::{check_alpha, conserved_energy, energy, nonlinearity};
use super::state::KgState;

/// Magnitude beyond which a run is declared blown up.
pub const BLOWUP_GUARD: f64 = 1e12;

/// Kick-drift-kick Strang splitting with a cached exact linear flow.
#[derive(Clone, Debug)]
pub struct Stepper {
    alpha: f64,
    dt: f64,
    flow: LinearFlow,
}

impl Stepper {
    /// `dt` may be negative (backward stepping) but not zero.
    pub fn new(grid: GridSpec, dt: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::InvalidParams(format!("time step must be finite and nonzero, got {dt}")));
        }
        Ok(Self { alpha, dt, flow: LinearFlow::new(grid, dt)? })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn kick(&self, s: &KgState) -> Result<crate::spectral::Field> {
        let f = nonlinearity(s.u(), self.alpha);
        s.ut().axpby(Complex64::new(1.0, 0.0), &f, Complex64::new(-0.5 * self.dt, 0.0))
    }

    pub fn step(&self, s: &KgState) -> Result<KgState> {
        if s.grid() != self.flow.grid() {
            return Err(Error::GridMismatch);
        }
        let ut_half = self.kick(s)?;
        let mut u_hat = forward_transform(s.u());
        let mut ut_hat = forward_transform(&ut_half);
        self.flow.apply_spectra(&mut u_hat, &mut ut_hat);
        let time = s.time() + self.dt;
        let drifted = KgState::from_parts_unchecked(inverse_transform(&u_hat), inverse_transform(&ut_hat), time);
        let ut = self.kick(&drifted)?;
        let out = KgState::from_parts_unchecked(drifted.u().clone(), ut, time);
        let m = out.max_abs();
        if !(m <= BLOWUP_GUARD) {
            return Err(Error::Overflow { time });
        }
        Ok(out)
    }
}

/// One Strang step `ut -= dt/2 N(u); (u, ut) <- 𝕂(dt)(u, ut); ut -= dt/2 N(u)`.
pub fn strang_step(s: &KgState, dt: f64, alpha: f64) -> Result<KgState> {
    Stepper::new(s.grid(), dt, alpha)?.step(s)
}

/// Scalar quantity recorded along a trajectory.
pub trait Observer {
    fn name(&self) -> String;
    fn observe(&mut self, s: &KgState) -> f64;
}

/// `E(u, u_t)` as an observer.
pub struct EnergyObserver {
    pub alpha: f64,
}

impl Observer for EnergyObserver {
    fn name(&self) -> String {
        "energy".into()
    }

    fn observe(&mut self, s: &KgState) -> f64 {
        energy(s, self.alpha)
    }
}

/// The invariant `‖u_t‖² + ‖u‖²_{H¹} + (2/(α+1))‖u‖^{α+1}_{α+1}`.
pub struct ConservedEnergyObserver {
    pub alpha: f64,
}

impl Observer for ConservedEnergyObserver {
    fn name(&self) -> String {
        "conserved_energy".into()
    }

    fn observe(&mut self, s: &KgState) -> f64 {
        conserved_energy(s, self.alpha)
    }
}

/// Any closure `(name, |s| value)`.
pub struct FnObserver<F> {
    name: String,
    f: F,
}

impl<F: FnMut(&KgState) -> f64> FnObserver<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F: FnMut(&KgState) -> f64> Observer for FnObserver<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn observe(&mut self, s: &KgState) -> f64 {
        (self.f)(s)
    }
}

/// Named time series aligned with [`Trajectory::times`].
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// Uniformly sampled solution history.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub observables: Vec<Series>,
    /// Snapshots every `stride` steps (each carries its own time).
    pub states: Vec<KgState>,
    pub last: KgState,
}

impl Trajectory {
    /// Trajectory whose snapshots are exactly `states`, assumed uniform.
    pub fn from_states(states: Vec<KgState>) -> Result<Self> {
        let last = states.last().cloned().ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
        let times: Vec<f64> = states.iter().map(KgState::time).collect();
        let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
        Ok(Self { dt, times, observables: Vec::new(), states, last })
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    pub fn grid(&self) -> GridSpec {
        self.last.grid()
    }
}

/// Snapshot policy for [`evolve_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolveOptions {
    /// Keep every `stride`-th state (0 keeps only the initial and final state).
    pub stride: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { stride: 1 }
    }
}

/// Steps `⌈T/dt⌉` times with the uniform step `T / ⌈T/dt⌉`, recording the
/// observers after every step.
pub fn evolve(
    s0: &KgState,
    t_end: f64,
    dt: f64,
    alpha: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    evolve_with(s0, t_end, dt, alpha, observers, EvolveOptions::default())
}

pub fn evolve_with(
    s0: &KgState,
    t_end: f64,
    dt: f64,
    alpha: f64,
    observers: &mut [&mut dyn Observer],
    opts: EvolveOptions,
) -> Result<Trajectory> {
    check_alpha(alpha)?;
    if !(t_end >= 0.0 && t_end.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!("need T >= 0 and dt > 0, got T = {t_end}, dt = {dt}")));
    }
    let steps = (t_end / dt * (1.0 - 1e-12)).ceil() as usize;
    let h = if steps == 0 { dt } else { t_end / steps as f64 };
    let t0 = s0.time();
    let mut observables: Vec<Series> =
        observers.iter().map(|o| Series { name: o.name(), values: Vec::with_capacity(steps + 1) }).collect();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = vec![s0.clone()];
    let record = |s: &KgState, observers: &mut [&mut dyn Observer], observables: &mut Vec<Series>| {
        for (o, series) in observers.iter_mut().zip(observables.iter_mut()) {
            series.values.push(o.observe(s));
        }
    };
    record(s0, observers, &mut observables);
    times.push(t0);
    let mut current = s0.clone();
    if steps > 0 {
        let stepper = Stepper::new(s0.grid(), h, alpha)?;
        for i in 1..=steps {
            let next = stepper.step(&current)?;
            // pin times to the uniform lattice
            current = next.with_time(t0 + i as f64 * h);
            record(&current, observers, &mut observables);
            times.push(current.time());
            if (opts.stride > 0 && i % opts.stride == 0) || (opts.stride == 0 && i == steps) {
                states.push(current.clone());
            }
        }
    }
    Ok(Trajectory { dt: h, times, observables, states, last: current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Field;

    fn state() -> KgState {
        let g = GridSpec::new(1, 32, 2).unwrap();
        let u = Field::from_real_fn(g, |x| (x[0] / 2.0).sin() * 0.5);
        KgState::new(u, Field::zeros(g), 0.0).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = GridSpec::new(2, 8, 1).unwrap();
        let s = strang_step(&KgState::zeros(g), 0.1, 3.0).unwrap();
        assert!(s.is_zero());
        assert!((s.time() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(strang_step(&state(), 0.0, 3.0).is_err());
        assert!(strang_step(&state(), 0.1, 0.5).is_err());
    }

    #[test]
    fn huge_data_trips_the_guard() {
        let s = state();
        let big = KgState::new(s.u().scale_real(1e11), Field::zeros(s.grid()), 0.0).unwrap();
        assert!(matches!(strang_step(&big, 0.1, 3.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn zero_horizon_gives_single_sample() {
        let mut e = EnergyObserver { alpha: 3.0 };
        let tr = evolve(&state(), 0.0, 0.1, 3.0, &mut [&mut e]).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.series("energy").unwrap().len(), 1);
    }

    #[test]
    fn uniform_step_count() {
        let tr = evolve(&state(), 1.0, 0.3, 3.0, &mut []).unwrap();
        assert_eq!(tr.times.len(), 5);
        assert!((tr.dt - 0.25).abs() < 1e-15);
        assert_eq!(tr.states.len(), 5);
        let tr = evolve_with(&state(), 1.0, 0.1, 3.0, &mut [], EvolveOptions { stride: 0 }).unwrap();
        assert_eq!(tr.states.len(), 2);
        assert_eq!(tr.times.len(), 11);
    }
}
