use crate::error::{Error, Result};
use crate::norms::{modulation_norm_with, sobolev_norm, spectrum_sobolev_norm, NormParams, WindowFamily};
use crate::solver::KgState;
use crate::spectral::{forward_transform, inverse_transform, Field};

/// Data split at a sharp frequency cutoff.
#[derive(Clone, Debug)]
pub struct SplitData {
    /// Frequencies with `|ξ|_∞ <= N`.
    pub low: KgState,
    /// The remainder.
    pub high: KgState,
    pub cutoff: f64,
}

fn check_cutoff(data: &KgState, cutoff: f64) -> Result<()> {
    let band = data.grid().band_limit();
    if !(cutoff >= 0.0 && cutoff <= band) {
        return Err(Error::CutoffOutOfBand { cutoff, band });
    }
    Ok(())
}

fn low_pass(f: &Field, mask: &[bool]) -> Field {
    let mut s = forward_transform(f);
    for (c, &keep) in s.coefficients_mut().iter_mut().zip(mask) {
        if !keep {
            *c = Default::default();
        }
    }
    inverse_transform(&s)
}

/// `low` keeps `|ξ|_∞ <= N`, `high = data - low`.
pub fn split_data(data: &KgState, cutoff: f64) -> Result<SplitData> {
    check_cutoff(data, cutoff)?;
    let slack = 1e-12 * cutoff.max(1.0);
    let mask: Vec<bool> = data.grid().frequency_sup_norm().into_iter().map(|r| r <= cutoff + slack).collect();
    let u_low = low_pass(data.u(), &mask).project_real();
    let ut_low = low_pass(data.ut(), &mask).project_real();
    let u_high = data.u().sub(&u_low)?;
    let ut_high = data.ut().sub(&ut_low)?;
    Ok(SplitData {
        low: KgState::new(u_low, ut_low, data.time())?,
        high: KgState::new(u_high, ut_high, data.time())?,
        cutoff,
    })
}

/// Norms that measure the two halves of a split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitNorms {
    /// `‖φ_N‖_{H¹}`.
    pub low_u: f64,
    /// `‖ψ_N‖_{L²}`.
    pub low_ut: f64,
    /// `‖φ^N‖_{M¹_{r,r'}}`.
    pub high_u: f64,
    /// `‖ψ^N‖_{M_{r,r'}}`.
    pub high_ut: f64,
}

impl SplitNorms {
    pub fn low(&self) -> f64 {
        self.low_u + self.low_ut
    }

    pub fn high(&self) -> f64 {
        self.high_u + self.high_ut
    }
}

/// Measures a split with `H¹ × L²` on the low part and `M¹_{r,r'} × M_{r,r'}`
/// on the high part.
pub fn split_norms(split: &SplitData, r: f64) -> Result<SplitNorms> {
    let family = WindowFamily::new(split.high.grid());
    let m1 = NormParams::dual_pair(r, 1.0)?;
    let m0 = NormParams::dual_pair(r, 0.0)?;
    Ok(SplitNorms {
        low_u: sobolev_norm(split.low.u(), 1.0),
        low_ut: sobolev_norm(split.low.ut(), 0.0),
        high_u: modulation_norm_with(&family, &forward_transform(split.high.u()), m1),
        high_ut: modulation_norm_with(&family, &forward_transform(split.high.ut()), m0),
    })
}

/// `min_{N ∈ cutoffs} (‖low(N)‖ + t ‖high(N)‖)`, an upper bound for the
/// K-functional of `data` between `H¹ × L²` and `M¹_{r,r'} × M_{r,r'}`.
pub fn k_functional_estimate(data: &KgState, t: f64, cutoffs: &[f64], r: f64) -> Result<f64> {
    if cutoffs.is_empty() {
        return Err(Error::EmptyCutoffSet);
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParams(format!("K-functional needs t > 0, got {t}")));
    }
    let mut best = f64::INFINITY;
    for &n in cutoffs {
        let norms = split_norms(&split_data(data, n)?, r)?;
        best = best.min(norms.low() + t * norms.high());
    }
    Ok(best)
}

/// Low-part `H¹` norm straight from the spectrum, for cheap cutoff sweeps.
pub fn low_sobolev_norm(f: &Field, cutoff: f64) -> f64 {
    let grid = f.grid();
    let mut s = forward_transform(f);
    for (c, r) in s.coefficients_mut().iter_mut().zip(grid.frequency_sup_norm()) {
        if r > cutoff + 1e-12 * cutoff.max(1.0) {
            *c = Default::default();
        }
    }
    spectrum_sobolev_norm(&s, 1.0)
}
