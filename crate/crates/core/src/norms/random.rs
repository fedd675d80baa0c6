use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{inverse_transform, Field, GridSpec, Spectrum, MAX_DIM};

/// Distribution of random band-limited test fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFieldSpec {
    /// Upper end of the uniformly drawn band `[1, band_max]` (sup-norm in `ξ`).
    pub band_max: f64,
    /// Upper end of the uniformly drawn spectral decay exponent `[0, decay_max]`.
    pub decay_max: f64,
    /// Hermitian-symmetrize the coefficients.
    pub real: bool,
}

impl Default for RandomFieldSpec {
    fn default() -> Self {
        Self { band_max: 6.0, decay_max: 2.0, real: false }
    }
}

/// Gaussian coefficients `~ ⟨ξ⟩^{-decay}` on `|ξ|_∞ <= band`.
///
/// Coefficients are drawn in lexicographic wavenumber order over the band,
/// so the same seed yields the same function on every grid with the same
/// period scale that resolves the band.
pub fn random_band_limited<R: Rng + ?Sized>(
    grid: GridSpec,
    band: f64,
    decay: f64,
    real: bool,
    rng: &mut R,
) -> Result<Field> {
    if !(band >= 0.0 && band < grid.band_limit()) {
        return Err(Error::CutoffOutOfBand { cutoff: band, band: grid.band_limit() });
    }
    let p = grid.period_scale() as f64;
    let j_max = (band * p).floor() as i64;
    let d = grid.dim();
    let span = (2 * j_max + 1) as usize;
    let mut spec = Spectrum::zeros(grid);
    let mut idx = [0usize; MAX_DIM];
    for mut code in 0..span.pow(d as u32) {
        let mut xi = [0.0; MAX_DIM];
        for axis in (0..d).rev() {
            let j = (code % span) as i64 - j_max;
            code /= span;
            idx[axis] = grid.index_of_wavenumber(j).expect("band below limit");
            xi[axis] = j as f64 / p;
        }
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let weight = super::bracket(&xi[..d]).powf(-decay);
        spec.coefficients_mut()[grid.flatten(&idx)] = Complex64::new(re, im) * weight;
    }
    if real {
        let mirrored: Vec<Complex64> = (0..grid.len())
            .map(|flat| {
                let mut m = grid.unflatten(flat);
                for slot in &mut m[..d] {
                    *slot = (grid.n() - *slot) % grid.n();
                }
                spec.coefficients()[grid.flatten(&m)].conj()
            })
            .collect();
        for (c, m) in spec.coefficients_mut().iter_mut().zip(mirrored) {
            *c = (*c + m) * 0.5;
        }
        return inverse_transform(&spec).checked_real();
    }
    Ok(inverse_transform(&spec))
}

/// Draws the band and decay from `spec`, then the field.
pub fn random_field<R: Rng + ?Sized>(grid: GridSpec, spec: &RandomFieldSpec, rng: &mut R) -> Result<Field> {
    let band = rng.random_range(1.0..=spec.band_max);
    let decay = rng.random_range(0.0..=spec.decay_max);
    random_band_limited(grid, band, decay, spec.real, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::forward_transform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn same_seed_same_function_on_refined_grid() {
        let coarse = GridSpec::new(1, 64, 4).unwrap();
        let fine = GridSpec::new(1, 128, 4).unwrap();
        let a = random_band_limited(coarse, 3.0, 1.0, true, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_band_limited(fine, 3.0, 1.0, true, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        for (i, va) in a.values().iter().enumerate() {
            assert!((va - b.values()[2 * i]).norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_stays_in_band() {
        let g = GridSpec::new(2, 32, 2).unwrap();
        let f = random_band_limited(g, 2.5, 0.5, false, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let s = forward_transform(&f);
        let sup = g.frequency_sup_norm();
        for (c, r) in s.coefficients().iter().zip(sup) {
            if r > 2.5 {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn real_flag_gives_real_samples() {
        let g = GridSpec::new(2, 16, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = RandomFieldSpec { real: true, ..Default::default() };
        let f = random_field(g, &RandomFieldSpec { band_max: 3.0, ..spec }, &mut rng).unwrap();
        assert!(f.is_real());
    }

    #[test]
    fn band_beyond_grid_is_rejected() {
        let g = GridSpec::new(1, 16, 2).unwrap();
        let r = random_band_limited(g, 4.0, 0.0, false, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::CutoffOutOfBand { .. })));
    }
}
