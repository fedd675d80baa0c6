use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::lp_norm;
use crate::spectral::{forward_transform, inverse_transform, Spectrum};

use super::energy::{check_alpha, nonlinearity};
use super::state::KgState;
use super::strang::{Trajectory, BLOWUP_GUARD};

/// `𝒯u(t) = K'(t)φ + K(t)ψ - ∫₀ᵗ K(t-τ) |u|^{α-1}u(τ) dτ` and its time
/// derivative, on the sample times of `candidate` (trapezoid rule in `τ`).
///
/// `data` supplies `(φ, ψ)` at the first sample time.
pub fn duhamel_map(candidate: &Trajectory, data: &KgState, alpha: f64) -> Result<Trajectory> {
    check_alpha(alpha)?;
    let states = &candidate.states;
    if states.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let grid = data.grid();
    if states.iter().any(|s| s.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let t0 = states[0].time();
    let dt = if states.len() > 1 { states[1].time() - t0 } else { 0.0 };
    let omega = grid.bracket();
    let phi = forward_transform(data.u());
    let psi = forward_transform(data.ut());
    let len = grid.len();
    let mut c_sum = vec![Complex64::default(); len];
    let mut s_sum = vec![Complex64::default(); len];
    let mut prev: Option<(Vec<f64>, Vec<f64>, Spectrum)> = None;
    let mut out = Vec::with_capacity(states.len());
    for (m, s) in states.iter().enumerate() {
        let tau = m as f64 * dt;
        let cos: Vec<f64> = omega.iter().map(|w| (tau * w).cos()).collect();
        let sin: Vec<f64> = omega.iter().map(|w| (tau * w).sin()).collect();
        let f_hat = forward_transform(&nonlinearity(s.u(), alpha));
        if let Some((pc, ps, pf)) = &prev {
            let half = 0.5 * dt;
            for j in 0..len {
                let (a, b) = (pf.coefficients()[j], f_hat.coefficients()[j]);
                c_sum[j] += half * (a * pc[j] + b * cos[j]);
                s_sum[j] += half * (a * ps[j] + b * sin[j]);
            }
        }
        let mut u_hat = Spectrum::zeros(grid);
        let mut ut_hat = Spectrum::zeros(grid);
        for j in 0..len {
            let (c, sn, w) = (cos[j], sin[j], omega[j]);
            let i_k = (sn * c_sum[j] - c * s_sum[j]) / w;
            let i_kp = c * c_sum[j] + sn * s_sum[j];
            u_hat.coefficients_mut()[j] = c * phi.coefficients()[j] + (sn / w) * psi.coefficients()[j] - i_k;
            ut_hat.coefficients_mut()[j] = -(w * sn) * phi.coefficients()[j] + c * psi.coefficients()[j] - i_kp;
        }
        let next = KgState::from_parts_unchecked(inverse_transform(&u_hat), inverse_transform(&ut_hat), t0 + tau);
        if !(next.max_abs() <= BLOWUP_GUARD) {
            return Err(Error::Overflow { time: t0 + tau });
        }
        out.push(next);
        prev = Some((cos, sin, f_hat));
    }
    Trajectory::from_states(out)
}

/// Solution of the free equation sampled at `t0 + m·dt`, `m = 0..=steps`.
pub fn linear_trajectory(data: &KgState, dt: f64, steps: usize) -> Result<Trajectory> {
    let zero = Trajectory::from_states(
        (0..=steps).map(|m| KgState::zeros(data.grid()).with_time(data.time() + m as f64 * dt)).collect(),
    )?;
    duhamel_map(&zero, data, 1.0)
}

/// `sup_m ‖u_m - w_m‖_{L²}` over two sampled trajectories.
pub fn sup_l2_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.states.len() != b.states.len() {
        return Err(Error::InvalidParams("trajectories have different lengths".into()));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.states.iter().zip(&b.states) {
        worst = worst.max(lp_norm(&x.u().sub(y.u())?, 2.0));
    }
    Ok(worst)
}

/// Result of the fixed-point iteration.
#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    /// Largest successive-distance ratio, the first ratio excluded when
    /// more are available; zero if the iteration converged immediately.
    pub contraction_factor: f64,
    pub iterations: usize,
    /// `sup_t ‖u^{k+1} - u^k‖_{L²}` per iteration.
    pub distances: Vec<f64>,
}

/// Iteration limits for [`picard_solve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 50 }
    }
}

/// Iterates [`duhamel_map`] from the free evolution of `data` on
/// `[0, T]` with `T/dt` uniform steps until successive iterates are within
/// `tol` in `sup_t L²`.
pub fn picard_solve(data: &KgState, alpha: f64, t_end: f64, dt: f64, opts: PicardOptions) -> Result<PicardOutcome> {
    check_alpha(alpha)?;
    let steps = crate::propagator::step_count(t_end, dt)?;
    let mut current = linear_trajectory(data, dt, steps)?;
    let scale = current.states.iter().map(|s| lp_norm(s.u(), 2.0)).fold(0.0, f64::max);
    let floor = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    for iteration in 1..=opts.max_iter {
        let next = duhamel_map(&current, data, alpha)?;
        let dist = sup_l2_distance(&next, &current)?;
        if let Some(&last) = distances.last() {
            if last > floor {
                ratios.push(dist / last);
            }
        }
        distances.push(dist);
        current = next;
        if !dist.is_finite() || (distances[0] > 0.0 && dist > 1e8 * distances[0].max(scale)) {
            return Err(Error::NoContraction {
                ratio: ratios.last().copied().unwrap_or(f64::INFINITY),
                iterations: iteration,
            });
        }
        if dist <= opts.tol {
            let contraction_factor = match ratios.len() {
                0 => 0.0,
                1 => ratios[0],
                _ => ratios[1..].iter().copied().fold(0.0, f64::max),
            };
            return Ok(PicardOutcome { trajectory: current, contraction_factor, iterations: iteration, distances });
        }
    }
    Err(Error::NoContraction { ratio: ratios.last().copied().unwrap_or(f64::NAN), iterations: opts.max_iter })
}

/// `2(1-α) / (d + 2 - α(d-2))`, the power of the data size in the local
/// existence time.
pub fn local_time_exponent(alpha: f64, d: usize) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::OutOfRange(format!("need α >= 1, got {alpha}")));
    }
    if d >= 4 {
        let top = d as f64 / (d as f64 - 3.0);
        if alpha > top {
            return Err(Error::OutOfRange(format!("need α <= d/(d-3) = {top} in dimension {d}, got {alpha}")));
        }
    }
    let den = d as f64 + 2.0 - alpha * (d as f64 - 2.0);
    if !(den > 0.0) {
        return Err(Error::OutOfRange(format!("d + 2 - α(d-2) = {den} is not positive")));
    }
    Ok(2.0 * (1.0 - alpha) / den)
}

/// Settings for [`contraction_time`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionSweep {
    /// Largest contraction factor counted as contracting.
    pub threshold: f64,
    /// Time samples per horizon.
    pub samples: usize,
    /// Bracket `[lo, hi]` searched for the horizon.
    pub t_lo: f64,
    pub t_hi: f64,
    /// Bisection steps in `log T`.
    pub bisections: usize,
    pub max_iter: usize,
}

impl Default for ContractionSweep {
    fn default() -> Self {
        Self { threshold: 0.5, samples: 40, t_lo: 1e-3, t_hi: 20.0, bisections: 24, max_iter: 60 }
    }
}

/// Contraction factor of the Picard iteration on `[0, T]`, or `None` if it
/// fails to contract.
pub fn contraction_factor_at(
    data: &KgState,
    alpha: f64,
    t_end: f64,
    samples: usize,
    max_iter: usize,
) -> Result<Option<f64>> {
    let dt = t_end / samples as f64;
    match picard_solve(data, alpha, t_end, dt, PicardOptions { tol: 1e-11, max_iter }) {
        Ok(out) => Ok(Some(out.contraction_factor)),
        Err(Error::NoContraction { .. }) | Err(Error::Overflow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Largest horizon `T` (by bisection in `log T`) on which the Picard
/// iteration contracts with factor below the threshold.
pub fn contraction_time(data: &KgState, alpha: f64, sweep: ContractionSweep) -> Result<f64> {
    let ok = |t: f64| -> Result<bool> {
        Ok(
            matches!(contraction_factor_at(data, alpha, t, sweep.samples, sweep.max_iter)?, Some(f) if f < sweep.threshold),
        )
    };
    let (mut lo, mut hi) = (sweep.t_lo.ln(), sweep.t_hi.ln());
    if !ok(sweep.t_lo)? {
        return Err(Error::OutOfRange(format!("no contraction even at T = {}", sweep.t_lo)));
    }
    if ok(sweep.t_hi)? {
        return Ok(sweep.t_hi);
    }
    for _ in 0..sweep.bisections {
        let mid = 0.5 * (lo + hi);
        if ok(mid.exp())? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
