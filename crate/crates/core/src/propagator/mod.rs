//! Exact linear Klein-Gordon flows, applied in frequency space.
//!
//! With `B = ⟨D⟩ = (I - Δ)^{1/2}`:
//! `K(t) = sin(tB)/B`, `K'(t) = cos(tB)`, and the solution of the linear
//! equation with data `(φ, ψ)` is `u = K'(t)φ + K(t)ψ`,
//! `u_t = -B sin(tB)φ + K'(t)ψ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::highlow::is_admissible;
use crate::norms::{lp_norm, modulation_norm_with, sobolev_norm, NormParams, WindowFamily};
use crate::spectral::{apply_even_table, forward_transform, inverse_transform, Field, GridSpec, Spectrum};

/// `B f`, the multiplier `⟨ξ⟩`.
pub fn apply_b(f: &Field) -> Field {
    apply_even_table(f, &f.grid().bracket())
}

/// `B^{-1} f`, the multiplier `⟨ξ⟩^{-1}`.
pub fn apply_b_inv(f: &Field) -> Field {
    let table: Vec<f64> = f.grid().bracket().into_iter().map(|b| 1.0 / b).collect();
    apply_even_table(f, &table)
}

/// `K(t) f`, the multiplier `sin(t⟨ξ⟩)/⟨ξ⟩`.
pub fn apply_k(f: &Field, t: f64) -> Field {
    let table: Vec<f64> = f.grid().bracket().into_iter().map(|b| (t * b).sin() / b).collect();
    apply_even_table(f, &table)
}

/// `K'(t) f`, the multiplier `cos(t⟨ξ⟩)`.
pub fn apply_kprime(f: &Field, t: f64) -> Field {
    let table: Vec<f64> = f.grid().bracket().into_iter().map(|b| (t * b).cos()).collect();
    apply_even_table(f, &table)
}

/// Symbol tables of the linear flow over a fixed time `t`.
#[derive(Clone, Debug)]
pub struct LinearFlow {
    grid: GridSpec,
    t: f64,
    bracket: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl LinearFlow {
    pub fn new(grid: GridSpec, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::OutOfRange(format!("evolution time {t} is not finite")));
        }
        let bracket = grid.bracket();
        let cos = bracket.iter().map(|b| (t * b).cos()).collect();
        let sin = bracket.iter().map(|b| (t * b).sin()).collect();
        Ok(Self { grid, t, bracket, cos, sin })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Evolves spectra of `(u, u_t)` in place.
    pub fn apply_spectra(&self, u: &mut Spectrum, ut: &mut Spectrum) {
        let it = u.coefficients_mut().iter_mut().zip(ut.coefficients_mut());
        for (j, (a, b)) in it.enumerate() {
            let (c, s, w) = (self.cos[j], self.sin[j], self.bracket[j]);
            let (a0, b0) = (*a, *b);
            *a = a0 * c + b0 * (s / w);
            *b = -a0 * (w * s) + b0 * c;
        }
    }

    /// `𝕂(t)(φ, ψ)`.
    pub fn apply(&self, phi: &Field, psi: &Field) -> Result<(Field, Field)> {
        if phi.grid() != self.grid || psi.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut u = forward_transform(phi);
        let mut ut = forward_transform(psi);
        self.apply_spectra(&mut u, &mut ut);
        let real = phi.is_real() && psi.is_real();
        let finish = |s: &Spectrum| {
            let f = inverse_transform(s);
            if real {
                f.project_real()
            } else {
                f
            }
        };
        Ok((finish(&u), finish(&ut)))
    }

    /// `e^{-itB} v` in frequency space.
    pub fn halfwave_spectrum(&self, v: &mut Spectrum) {
        for (j, c) in v.coefficients_mut().iter_mut().enumerate() {
            *c *= Complex64::new(self.cos[j], -self.sin[j]);
        }
    }
}

/// `𝕂(t)(φ, ψ) = (K'φ + Kψ, (Δ - I)Kφ + K'ψ)`.
pub fn semigroup_apply(phi: &Field, psi: &Field, t: f64) -> Result<(Field, Field)> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    LinearFlow::new(phi.grid(), t)?.apply(phi, psi)
}

/// `‖u‖²_{H¹} + ‖u_t‖²_{L²}`, the quantity preserved by the linear flow.
pub fn linear_energy(u: &Field, ut: &Field) -> f64 {
    sobolev_norm(u, 1.0).powi(2) + sobolev_norm(ut, 0.0).powi(2)
}

/// The half-wave flow `e^{-it⟨ξ⟩} v`.
pub fn halfwave(v: &Field, t: f64) -> Field {
    let grid = v.grid();
    let mut s = forward_transform(v);
    for (c, b) in s.coefficients_mut().iter_mut().zip(grid.bracket()) {
        *c *= Complex64::from_polar(1.0, -t * b);
    }
    inverse_transform(&s)
}

/// Number of uniform steps `T / dt`, requiring `dt` to divide `T`.
pub fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && t_end >= 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidParams(format!("need T >= 0 and dt > 0, got T = {t_end}, dt = {dt}")));
    }
    let m = (t_end / dt).round();
    if (m * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
        return Err(Error::InvalidParams(format!("dt = {dt} does not divide T = {t_end}")));
    }
    Ok(m as usize)
}

/// Discretized `‖u‖_{L^q([0,T], L^r)} / (‖φ‖_{H¹} + ‖ψ‖_{L²})` for the free
/// flow. Finite `q` uses the left rectangle rule over the `T/dt` steps;
/// `q = ∞` takes the maximum over all samples including `t = T`.
pub fn strichartz_ratio(phi: &Field, psi: &Field, q: f64, r: f64, t_end: f64, dt: f64) -> Result<f64> {
    let d = phi.grid().dim();
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    if !is_admissible(q, r, d) {
        return Err(Error::NotAdmissible { q, r, d });
    }
    let steps = step_count(t_end, dt)?;
    let den = sobolev_norm(phi, 1.0) + sobolev_norm(psi, 0.0);
    if den == 0.0 {
        return Err(Error::Undefined("Strichartz ratio of zero data"));
    }
    let flow = LinearFlow::new(phi.grid(), dt)?;
    let mut u = forward_transform(phi);
    let mut ut = forward_transform(psi);
    let real = phi.is_real() && psi.is_real();
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        if i > 0 {
            flow.apply_spectra(&mut u, &mut ut);
        }
        let mut field = inverse_transform(&u);
        if real {
            field = field.project_real();
        }
        samples.push(lp_norm(&field, r));
    }
    let num = if q.is_infinite() {
        samples.iter().copied().fold(0.0, f64::max)
    } else {
        (samples[..steps].iter().map(|v| dt * v.powf(q)).sum::<f64>()).powf(1.0 / q)
    };
    Ok(num / den)
}

/// `sup_t ‖e^{-itB} v‖_{M} / ‖v‖_{M}` over the given times.
pub fn halfwave_growth(v: &Field, np: NormParams, times: &[f64]) -> Result<f64> {
    let family = WindowFamily::new(v.grid());
    let spec = forward_transform(v);
    let base = modulation_norm_with(&family, &spec, np);
    if base == 0.0 {
        return Err(Error::Undefined("modulation growth of the zero field"));
    }
    let bracket = v.grid().bracket();
    let mut worst: f64 = 0.0;
    for &t in times {
        let mut s = spec.clone();
        for (c, b) in s.coefficients_mut().iter_mut().zip(&bracket) {
            *c *= Complex64::from_polar(1.0, -t * b);
        }
        worst = worst.max(modulation_norm_with(&family, &s, np) / base);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(1, 32, 2).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let f = Field::from_real_fn(grid(), |x| (x[0] / 2.0).sin() + 0.3);
        assert!(apply_k(&f, 0.0).max_abs() < 1e-15);
        let back = apply_kprime(&f, 0.0);
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn step_count_requires_divisibility() {
        assert_eq!(step_count(1.0, 0.25).unwrap(), 4);
        assert_eq!(step_count(0.1, 0.001).unwrap(), 100);
        assert!(step_count(1.0, 0.3).is_err());
        assert!(step_count(1.0, 0.0).is_err());
    }

    #[test]
    fn non_finite_time_is_rejected() {
        assert!(LinearFlow::new(grid(), f64::NAN).is_err());
    }

    #[test]
    fn strichartz_rejects_zero_data_and_bad_pairs() {
        let z = Field::zeros(grid());
        assert!(matches!(strichartz_ratio(&z, &z, f64::INFINITY, 2.0, 1.0, 0.5), Err(Error::Undefined(_))));
        assert!(matches!(strichartz_ratio(&z, &z, 4.0, 2.0, 1.0, 0.5), Err(Error::NotAdmissible { .. })));
    }
}
