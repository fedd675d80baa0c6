//! Lebesgue, Sobolev and modulation norms on lattice fields.

mod calibration;
mod random;
mod window;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{apply_even_table, forward_transform, inverse_transform, Field, Spectrum};

pub use calibration::{calibrate, Calibration, EmbeddingConstant, RatioInterval};
pub use random::{random_band_limited, random_field, RandomFieldSpec};
pub use window::{sigma, sigma_1d, smoothstep, window_profile, WindowFamily};

/// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Japanese bracket `(1 + |x|²)^{1/2}`.
pub fn bracket(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("{name} = {v} is not in [1, ∞]")))
    }
}

/// Exponents of a modulation norm `M^s_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    p: f64,
    q: f64,
    s: f64,
}

impl NormParams {
    pub fn new(p: f64, q: f64, s: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        if !s.is_finite() {
            return Err(Error::InvalidExponent(format!("weight s = {s} must be finite")));
        }
        Ok(Self { p, q, s })
    }

    /// `(p, p', s)`.
    pub fn dual_pair(p: f64, s: f64) -> Result<Self> {
        Self::new(p, conjugate(p), s)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p_conjugate(&self) -> f64 {
        conjugate(self.p)
    }
}

fn lp_of_values<'a>(values: impl Iterator<Item = &'a Complex64> + Clone, weight: f64, p: f64) -> f64 {
    let max = values.clone().map(|v| v.norm()).fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let sum: f64 = values.map(|v| (v.norm() / max).powf(p)).sum();
    max * (weight * sum).powf(1.0 / p)
}

/// `ℓ^q` norm of a nonnegative sequence.
pub fn lq_sum(terms: &[f64], q: f64) -> f64 {
    let max = terms.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() || max == 0.0 {
        return max;
    }
    max * terms.iter().map(|t| (t / max).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Discrete `L^p` norm with quadrature weight `(2πP/n)^d`; `p = ∞` is the
/// maximum magnitude.
///
/// # Panics
/// If `p < 1` or `p` is NaN.
pub fn lp_norm(f: &Field, p: f64) -> f64 {
    assert!(p >= 1.0, "Lebesgue exponent {p} is not in [1, ∞]");
    lp_of_values(f.values().iter(), f.grid().cell_volume(), p)
}

/// `(Σ_ξ ⟨ξ⟩^{2s} |f̂(ξ)|²)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    spectrum_sobolev_norm(&forward_transform(f), s)
}

pub fn spectrum_sobolev_norm(spec: &Spectrum, s: f64) -> f64 {
    if s == 0.0 {
        return spec.l2_norm();
    }
    let weights: Vec<f64> = spec.grid().bracket().into_iter().map(|b| b.powf(2.0 * s)).collect();
    spec.weighted_norm(&weights)
}

/// Frequency-localized piece `□_k f = F^{-1} σ_k F f`.
pub fn box_op(f: &Field, k: &[i64]) -> Result<Field> {
    let family = WindowFamily::new(f.grid());
    box_op_with(&family, &forward_transform(f), k)
}

/// `□_k` applied to a precomputed spectrum.
pub fn box_op_with(family: &WindowFamily, spec: &Spectrum, k: &[i64]) -> Result<Field> {
    if family.grid() != spec.grid() {
        return Err(Error::GridMismatch);
    }
    let support = family.support(k)?;
    let mut out = Spectrum::zeros(spec.grid());
    let src = spec.coefficients();
    let dst = out.coefficients_mut();
    for (flat, w) in support {
        dst[flat] = src[flat] * w;
    }
    Ok(inverse_transform(&out))
}

/// Per-box norms `‖□_k f‖_p` for every box that carries spectrum.
pub fn box_norms(family: &WindowFamily, spec: &Spectrum, p: f64) -> Result<Vec<(Vec<i64>, f64)>> {
    let mut out = Vec::new();
    for k in family.boxes() {
        let support = family.support(&k)?;
        if support.iter().all(|&(flat, _)| spec.coefficients()[flat] == Complex64::default()) {
            continue;
        }
        let piece = box_op_with(family, spec, &k)?;
        out.push((k, lp_norm(&piece, p)));
    }
    Ok(out)
}

/// `‖{⟨k⟩^s ‖□_k f‖_p}_k‖_{ℓ^q}` over the boxes meeting the lattice.
pub fn modulation_norm(f: &Field, np: NormParams) -> f64 {
    let family = WindowFamily::new(f.grid());
    modulation_norm_with(&family, &forward_transform(f), np)
}

pub fn modulation_norm_with(family: &WindowFamily, spec: &Spectrum, np: NormParams) -> f64 {
    let terms: Vec<f64> = box_norms(family, spec, np.p)
        .expect("family matches spectrum grid")
        .into_iter()
        .map(|(k, norm)| {
            let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            bracket(&kf).powf(np.s) * norm
        })
        .collect();
    lq_sum(&terms, np.q)
}

/// `(I - Δ)^{σ/2}`, the multiplier `⟨ξ⟩^σ`.
pub fn bessel_potential(f: &Field, sigma: f64) -> Field {
    let table: Vec<f64> = f.grid().bracket().into_iter().map(|b| b.powf(sigma)).collect();
    apply_even_table(f, &table)
}

/// `‖f‖_p / ‖f‖_{M_{p,p'}}` for `p >= 2`.
pub fn embedding_ratio(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::InvalidExponent(format!("embedding needs p >= 2, got {p}")));
    }
    let den = modulation_norm(f, NormParams::dual_pair(p, 0.0)?);
    if den == 0.0 {
        return Err(Error::Undefined("embedding ratio of the zero field"));
    }
    Ok(lp_norm(f, p) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn conjugate_exponents() {
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert!((conjugate(4.0) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn norm_params_validate() {
        assert!(NormParams::new(0.5, 2.0, 0.0).is_err());
        assert!(NormParams::new(2.0, f64::NAN, 0.0).is_err());
        assert!(NormParams::new(2.0, 2.0, f64::INFINITY).is_err());
        assert!(NormParams::new(f64::INFINITY, 1.0, -1.0).is_ok());
    }

    #[test]
    fn constant_field_lp() {
        let g = GridSpec::new(1, 32, 1).unwrap();
        let f = Field::from_real_fn(g, |_| -3.0);
        for p in [1.0, 2.0, 3.5] {
            let want = 3.0 * (2.0 * std::f64::consts::PI).powf(1.0 / p);
            assert!((lp_norm(&f, p) - want).abs() < 1e-12 * want);
        }
        assert_eq!(lp_norm(&f, f64::INFINITY), 3.0);
    }

    #[test]
    fn lq_sum_cases() {
        assert_eq!(lq_sum(&[], 2.0), 0.0);
        assert_eq!(lq_sum(&[3.0, 4.0], f64::INFINITY), 4.0);
        assert!((lq_sum(&[3.0, 4.0], 2.0) - 5.0).abs() < 1e-15);
        assert!((lq_sum(&[3.0, 4.0], 1.0) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn embedding_of_zero_is_undefined() {
        let f = Field::zeros(GridSpec::new(1, 16, 2).unwrap());
        assert!(matches!(embedding_ratio(&f, 4.0), Err(Error::Undefined(_))));
        assert!(matches!(embedding_ratio(&f, 1.5), Err(Error::InvalidExponent(_))));
    }
}
