//! Seeded synthetic initial data for the high-low experiment.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::compute_theta;
use crate::error::{Error, Result};
use crate::norms::{bracket, lp_norm};
use crate::solver::KgState;
use crate::spectral::{inverse_transform, Field, GridSpec, Spectrum, MAX_DIM};

/// Largest cutoff at which the interpolation datum pins its scalings.
pub const FIT_TOP: usize = 16;
/// Half-width of each frequency packet.
const HALF_WIDTH: f64 = 0.5;
/// Largest chirp rate as a fraction of `L / (2·HALF_WIDTH)`.
const CHIRP_FRACTION: f64 = 0.8;
/// Baseband grid size in units of `P`.
const BASEBAND_FACTOR: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DatumFamily {
    /// Chirped unit-width packets whose low-part `H¹` norm grows like
    /// `N^{α̃}` and whose high-part `M¹_{r,r'}` norm decays like `N^{-1}`.
    Interpolation,
    /// Flat per-box atoms with magnitudes `⟨k⟩^{-s0}`.
    PowerLaw { s0: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatumSpec {
    pub family: DatumFamily,
    pub alpha: f64,
    pub p: f64,
    /// Overall factor applied to both components.
    pub amplitude: f64,
    pub seed: u64,
}

/// Builds `(φ, ψ)`; `ψ` is `B` applied to an independent-phase copy of `φ`.
pub fn synthetic_datum(grid: GridSpec, spec: &DatumSpec) -> Result<KgState> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (phi, psi) = match spec.family {
        DatumFamily::Interpolation => interpolation_spectra(grid, spec.alpha, spec.p, &mut rng)?,
        DatumFamily::PowerLaw { s0 } => power_law_spectra(grid, s0, &mut rng)?,
    };
    let finish = |mut s: Spectrum, lift: bool| -> Result<Field> {
        let table = grid.bracket();
        for (c, b) in s.coefficients_mut().iter_mut().zip(&table) {
            *c *= spec.amplitude * if lift { *b } else { 1.0 };
        }
        hermitian(&mut s);
        inverse_transform(&s).checked_real()
    };
    KgState::new(finish(phi, false)?, finish(psi, true)?, 0.0)
}

fn mirror_index(grid: GridSpec, flat: usize) -> usize {
    let mut m = grid.unflatten(flat);
    for slot in &mut m[..grid.dim()] {
        *slot = (grid.n() - *slot) % grid.n();
    }
    grid.flatten(&m)
}

/// `c(ξ) <- c(ξ) + conj c(-ξ)`.
fn hermitian(s: &mut Spectrum) {
    let grid = s.grid();
    let src = s.coefficients().to_vec();
    for (flat, c) in s.coefficients_mut().iter_mut().enumerate() {
        *c = src[flat] + src[mirror_index(grid, flat)].conj();
    }
}

fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Chirped bump centred at `center`: `bump((ξ-c)/w) e^{-iτ(ξ-c)²}`.
fn packet(xi: f64, center: f64, tau: f64) -> Complex64 {
    let eta = xi - center;
    let b = bump(eta / HALF_WIDTH);
    if b == 0.0 {
        return Complex64::default();
    }
    Complex64::from_polar(b, -tau * eta * eta)
}

struct Baseband {
    grid: GridSpec,
    r: f64,
}

impl Baseband {
    fn field(&self, tau: f64) -> Field {
        let coeffs = (0..self.grid.len()).map(|j| packet(self.grid.frequency_1d(j), 0.0, tau)).collect();
        inverse_transform(&Spectrum::from_coefficients(self.grid, coeffs).expect("sized to grid"))
    }

    /// `(‖f‖_2, ‖f‖_r)` of the centred packet.
    fn norms(&self, tau: f64) -> (f64, f64) {
        let f = self.field(tau);
        (lp_norm(&f, 2.0), lp_norm(&f, self.r))
    }

    fn ratio(&self, tau: f64) -> f64 {
        let (l2, lr) = self.norms(tau);
        lr / l2
    }

    /// Chirp rate whose ratio hits `target`, clamped to `[0, tau_max]`.
    fn solve(&self, target: f64, r0: f64, r_min: f64, tau_max: f64) -> f64 {
        if target >= r0 {
            return 0.0;
        }
        if target <= r_min {
            return tau_max;
        }
        let (mut lo, mut hi) = (0.0, tau_max);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.ratio(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Packet `k` (`k >= 1`) occupies frequencies `(k-1, k)`. Its `H¹` mass is
/// `H(k) - H(k-1)` with `H(N) = N^{2α̃}` for `k <= 16`, and its weighted
/// `L^r` mass is `G(k-1) - G(k)` with `G(N) = N^{-r'}` for `k >= 3`; the
/// chirp rate trades `L^r` against `L²` to meet both at once.
fn interpolation_spectra<R: Rng>(grid: GridSpec, alpha: f64, p: f64, rng: &mut R) -> Result<(Spectrum, Spectrum)> {
    if grid.dim() != 1 {
        return Err(Error::InvalidParams("the interpolation datum is one-dimensional".into()));
    }
    let (_, alpha_tilde) = compute_theta(p, alpha).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let pscale = grid.period_scale();
    let boxes = grid.band_limit().floor() as usize;
    if boxes < 5 {
        return Err(Error::InvalidParams(format!("need at least 5 resolved boxes, have {boxes}")));
    }
    let count = boxes - 2;
    let top = FIT_TOP.min(count);
    let r = 2.0 * alpha;
    let r_dual = r / (r - 1.0);
    let h_cum = |n: f64| n.powf(2.0 * alpha_tilde);
    let g_cum = |n: f64| n.powf(-r_dual);
    let h: Vec<f64> = (1..=top).map(|k| h_cum(k as f64) - h_cum(k as f64 - 1.0)).collect();
    let mut g: Vec<f64> =
        (1..=count).map(|k| if k >= 3 { g_cum(k as f64 - 1.0) - g_cum(k as f64) } else { 0.0 }).collect();
    let tail: f64 = g[top..].iter().sum();
    if tail > 0.0 {
        let scale = g_cum(top as f64) / tail;
        g[top..].iter_mut().for_each(|v| *v *= scale);
    }
    let base = Baseband { grid: GridSpec::new(1, BASEBAND_FACTOR * pscale, pscale)?, r };
    let tau_max = CHIRP_FRACTION * grid.side() / (2.0 * HALF_WIDTH);
    let r0 = base.ratio(0.0);
    let r_min = base.ratio(tau_max);
    let want = |k: usize| g[k - 1].powf(1.0 / r_dual) / h[k - 1].sqrt();
    let peak = (3..=top).map(want).fold(0.0, f64::max);
    let sc = if peak > 0.0 { r0 / peak } else { 1.0 };

    let bracket_table = grid.bracket();
    let mut phi = Spectrum::zeros(grid);
    let mut psi = Spectrum::zeros(grid);
    let phases: Vec<(f64, f64)> =
        (0..count).map(|_| (2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>())).collect();
    for k in 1..=count {
        let tau = if (3..=top).contains(&k) {
            base.solve(want(k) * sc, r0, r_min, tau_max)
        } else if k < 3 {
            0.0
        } else {
            tau_max
        };
        let center = k as f64 - 0.5;
        let lo = (k - 1) * pscale + 1;
        let hi = k * pscale - 1;
        let support: Vec<(usize, Complex64)> =
            (lo..=hi).map(|j| (j, packet(j as f64 / pscale as f64, center, tau))).collect();
        let amp = if k <= top {
            let h1: f64 = support.iter().map(|&(j, c)| bracket_table[j].powi(2) * c.norm_sqr()).sum::<f64>().sqrt();
            h[k - 1].sqrt() / h1
        } else {
            let (_, lr) = base.norms(tau);
            (g[k - 1].powf(1.0 / r_dual) / sc) / (bracket(&[k as f64]) * lr)
        };
        let (a, b) = phases[k - 1];
        for &(j, c) in &support {
            phi.coefficients_mut()[j] += c * Complex64::from_polar(amp, a);
            psi.coefficients_mut()[j] += c * Complex64::from_polar(amp, b);
        }
    }
    Ok((phi, psi))
}

/// Constant coefficient `⟨k⟩^{-s0} e^{iθ_k}` on the lattice points nearest
/// to each fully resolved box centre `k`.
fn power_law_spectra<R: Rng>(grid: GridSpec, s0: f64, rng: &mut R) -> Result<(Spectrum, Spectrum)> {
    if !s0.is_finite() {
        return Err(Error::InvalidParams(format!("decay s0 = {s0} must be finite")));
    }
    let d = grid.dim();
    let k_top = grid.band_limit().floor() as i64 - 1;
    if k_top < 1 {
        return Err(Error::InvalidParams("grid resolves no full box".into()));
    }
    let span = (2 * k_top + 1) as usize;
    let total = span.pow(d as u32);
    let phases: Vec<(f64, f64)> =
        (0..total).map(|_| (2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>())).collect();
    let mut phi = Spectrum::zeros(grid);
    let mut psi = Spectrum::zeros(grid);
    for flat in 0..grid.len() {
        let xi = grid.frequency(flat);
        let mut code = 0usize;
        let mut k = [0.0; MAX_DIM];
        let mut inside = true;
        for axis in 0..d {
            let ki = xi[axis].round() as i64;
            inside &= ki.abs() <= k_top;
            k[axis] = ki as f64;
            code = code * span + (ki + k_top).clamp(0, span as i64 - 1) as usize;
        }
        if !inside {
            continue;
        }
        let mag = 0.5 * bracket(&k[..d]).powf(-s0);
        let (a, b) = phases[code];
        phi.coefficients_mut()[flat] = Complex64::from_polar(mag, a);
        psi.coefficients_mut()[flat] = Complex64::from_polar(mag, b);
    }
    Ok((phi, psi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datum_is_seed_deterministic() {
        let g = GridSpec::new(1, 512, 16).unwrap();
        let spec = DatumSpec { family: DatumFamily::Interpolation, alpha: 3.0, p: 2.3, amplitude: 1.0, seed: 4 };
        let a = synthetic_datum(g, &spec).unwrap();
        let b = synthetic_datum(g, &spec).unwrap();
        assert_eq!(a, b);
        let c = synthetic_datum(g, &DatumSpec { seed: 5, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn power_law_datum_is_real_and_band_limited() {
        let g = GridSpec::new(2, 32, 2).unwrap();
        let spec = DatumSpec { family: DatumFamily::PowerLaw { s0: 1.5 }, alpha: 3.0, p: 2.3, amplitude: 2.0, seed: 1 };
        let s = synthetic_datum(g, &spec).unwrap();
        assert!(s.u().is_real() && s.ut().is_real());
        assert!(s.u().max_abs() > 0.0);
    }

    #[test]
    fn interpolation_needs_one_dimension_and_enough_boxes() {
        let spec = DatumSpec { family: DatumFamily::Interpolation, alpha: 3.0, p: 2.3, amplitude: 1.0, seed: 0 };
        assert!(synthetic_datum(GridSpec::new(2, 64, 2).unwrap(), &spec).is_err());
        assert!(synthetic_datum(GridSpec::new(1, 64, 8).unwrap(), &spec).is_err());
    }
}
