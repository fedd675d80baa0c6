use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft;
use super::grid::{GridSpec, MAX_DIM};
use crate::error::{Error, Result};

/// Relative imaginary residue tolerated in a field flagged as real.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// Complex samples of a function on the periodic lattice.
///
/// Real-valued data carries `real = true`; operations that are known to
/// preserve realness (real linear combinations, real even multipliers)
/// project the imaginary round-off away and keep the flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
    real: bool,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::default(); grid.len()], real: true }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Self { grid, values, real: false })
    }

    pub fn from_real_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let mut f = Self::from_values(grid, values)?;
        f.real = true;
        Ok(f)
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let x = grid.position(flat);
                f(&x[..grid.dim()])
            })
            .collect();
        Self { grid, values, real: false }
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let x = grid.position(flat);
                Complex64::new(f(&x[..grid.dim()]), 0.0)
            })
            .collect();
        Self { grid, values, real: true }
    }

    /// The lattice mode `exp(i⟨ξ_j, x⟩)` with `ξ_j = j / P`.
    pub fn plane_wave(grid: GridSpec, wavenumbers: &[i64]) -> Result<Self> {
        if wavenumbers.len() != grid.dim() {
            return Err(Error::InvalidGrid("wavenumber vector has the wrong length".into()));
        }
        for &j in wavenumbers {
            if grid.index_of_wavenumber(j).is_none() {
                return Err(Error::InvalidGrid(format!("wavenumber {j} is not on the lattice")));
            }
        }
        let p = grid.period_scale() as f64;
        Ok(Self::from_fn(grid, |x| {
            let phase: f64 = x.iter().zip(wavenumbers).map(|(xi, &j)| xi * j as f64 / p).sum();
            Complex64::from_polar(1.0, phase)
        }))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary magnitude.
    pub fn imag_residue(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::default())
    }

    /// Drops the imaginary part and flags the field as real.
    pub fn project_real(mut self) -> Self {
        for v in &mut self.values {
            v.im = 0.0;
        }
        self.real = true;
        self
    }

    /// Like [`Field::project_real`], but fails if the dropped part exceeds
    /// `REAL_TOLERANCE` relative to the field magnitude.
    pub fn checked_real(self) -> Result<Self> {
        let residue = self.imag_residue();
        if residue > REAL_TOLERANCE * self.max_abs() {
            return Err(Error::NotReal { residue });
        }
        Ok(self.project_real())
    }

    pub fn re(&self) -> Self {
        let values = self.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect();
        Self { grid: self.grid, values, real: true }
    }

    pub fn im(&self) -> Self {
        let values = self.values.iter().map(|v| Complex64::new(v.im, 0.0)).collect();
        Self { grid: self.grid, values, real: true }
    }

    /// `self + i·other` for two real fields.
    pub fn complexify(&self, imaginary: &Field) -> Result<Self> {
        self.zip_with(imaginary, false, |a, b| Complex64::new(a.re, b.re))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let values = self.values.iter().map(|v| v * factor).collect();
        Self { grid: self.grid, values, real: self.real && factor.im == 0.0 }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, self.real && other.real, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, self.real && other.real, |a, b| a - b)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: Complex64, other: &Field, b: Complex64) -> Result<Self> {
        let real = self.real && other.real && a.im == 0.0 && b.im == 0.0;
        self.zip_with(other, real, |x, y| a * x + b * y)
    }

    /// Pointwise map; the result is flagged real only if `real` is set.
    pub fn map(&self, real: bool, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self { grid: self.grid, values, real }
    }

    fn zip_with(&self, other: &Field, real: bool, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values, real })
    }
}

/// Discrete Fourier coefficients with unitary normalization.
///
/// A field `f` is represented as `f(x) = V^{-1/2} Σ_j c_j exp(i⟨ξ_j, x⟩)`
/// with `V = (2πP)^d`, so that `Σ |c_j|²` equals the discrete `L²` norm
/// squared `(2πP/n)^d Σ |f(x)|²` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coefficients(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at the lattice frequency with the given wavenumbers.
    pub fn coefficient(&self, wavenumbers: &[i64]) -> Option<Complex64> {
        let mut idx = [0usize; MAX_DIM];
        for (axis, &j) in wavenumbers.iter().enumerate().take(self.grid.dim()) {
            idx[axis] = self.grid.index_of_wavenumber(j)?;
        }
        Some(self.coeffs[self.grid.flatten(&idx)])
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(Σ_j w_j |c_j|²)^{1/2}` for a per-frequency weight table.
    pub fn weighted_norm(&self, weights: &[f64]) -> f64 {
        self.coeffs.iter().zip(weights).map(|(c, w)| w * c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies coefficient `j` by `table[j]`.
    pub fn scale_by(&mut self, table: &[f64]) {
        for (c, m) in self.coeffs.iter_mut().zip(table) {
            *c *= m;
        }
    }
}

/// Unitary forward transform.
pub fn forward_transform(f: &Field) -> Spectrum {
    let grid = f.grid();
    let mut coeffs = f.values().to_vec();
    fft::transform(&mut coeffs, grid.n(), grid.dim(), FftDirection::Forward);
    let factor = grid.volume().sqrt() / grid.len() as f64;
    for c in &mut coeffs {
        *c *= factor;
    }
    Spectrum { grid, coeffs }
}

/// Unitary inverse transform; the result is flagged complex.
pub fn inverse_transform(s: &Spectrum) -> Field {
    let grid = s.grid();
    let mut values = s.coefficients().to_vec();
    fft::transform(&mut values, grid.n(), grid.dim(), FftDirection::Inverse);
    let factor = 1.0 / grid.volume().sqrt();
    for v in &mut values {
        *v *= factor;
    }
    Field { grid, values, real: false }
}

/// Applies a table of real multipliers that is even in `ξ`. Such symbols map
/// real fields to real fields, so the realness flag is kept.
pub(crate) fn apply_even_table(f: &Field, table: &[f64]) -> Field {
    let mut s = forward_transform(f);
    s.scale_by(table);
    let out = inverse_transform(&s);
    if f.is_real() {
        out.project_real()
    } else {
        out
    }
}

/// Applies the Fourier multiplier with symbol `m(ξ)`.
pub fn apply_multiplier(f: &Field, symbol: impl Fn(&[f64]) -> Complex64) -> Result<Field> {
    let grid = f.grid();
    let mut s = forward_transform(f);
    for (flat, c) in s.coefficients_mut().iter_mut().enumerate() {
        let xi = grid.frequency(flat);
        let m = symbol(&xi[..grid.dim()]);
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::NonFiniteSymbol { frequency: xi[..grid.dim()].to_vec() });
        }
        *c *= m;
    }
    Ok(inverse_transform(&s))
}

/// `∫ f dx` by the rectangle rule with weight `(2πP/n)^d`.
pub fn integrate(f: &Field) -> Complex64 {
    f.values().iter().sum::<Complex64>() * f.grid().cell_volume()
}

/// `⟨f, g⟩ = ∫ f · conj(g) dx`.
pub fn l2_inner(f: &Field, g: &Field) -> Result<Complex64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let sum: Complex64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b.conj()).sum();
    Ok(sum * f.grid().cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1(n: usize, p: usize) -> GridSpec {
        GridSpec::new(1, n, p).unwrap()
    }

    #[test]
    fn zero_field_has_zero_spectrum() {
        let g = GridSpec::new(2, 8, 2).unwrap();
        let s = forward_transform(&Field::zeros(g));
        assert!(s.coefficients().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn plane_wave_hits_a_single_coefficient() {
        let g = GridSpec::new(2, 8, 2).unwrap();
        let f = Field::plane_wave(g, &[3, -2]).unwrap();
        let s = forward_transform(&f);
        let peak = s.coefficient(&[3, -2]).unwrap();
        assert!((peak.re - g.volume().sqrt()).abs() < 1e-12 * g.volume().sqrt());
        let rest: f64 = s.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>() - peak.norm_sqr();
        assert!(rest.abs() < 1e-20 * g.volume());
    }

    #[test]
    fn integrate_constant_is_exact() {
        let g = grid1(64, 1);
        let f = Field::from_real_fn(g, |_| 1.0);
        let v = integrate(&f);
        assert!((v.re - 2.0 * PI).abs() < 1e-13);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn plane_wave_self_inner_product_is_box_volume() {
        for (d, n, p) in [(1, 16, 3), (2, 8, 2), (3, 4, 1)] {
            let g = GridSpec::new(d, n, p).unwrap();
            let mut j = vec![1i64; d];
            j[0] = -2;
            let f = Field::plane_wave(g, &j).unwrap();
            let ip = l2_inner(&f, &f).unwrap();
            assert!((ip.re - g.volume()).abs() < 1e-12 * g.volume());
            assert!(ip.im.abs() < 1e-12 * g.volume());
        }
    }

    #[test]
    fn inner_product_rejects_mismatched_grids() {
        let a = Field::zeros(grid1(8, 1));
        let b = Field::zeros(grid1(8, 2));
        assert!(matches!(l2_inner(&a, &b), Err(Error::GridMismatch)));
        assert!(matches!(a.add(&b), Err(Error::GridMismatch)));
    }

    #[test]
    fn inner_product_conjugates_second_argument() {
        let g = grid1(16, 1);
        let f = Field::plane_wave(g, &[1]).unwrap();
        let ip = l2_inner(&f.scale(Complex64::new(0.0, 1.0)), &f).unwrap();
        assert!((ip - Complex64::new(0.0, g.volume())).norm() < 1e-12);
        let ip = l2_inner(&f, &f.scale(Complex64::new(0.0, 1.0))).unwrap();
        assert!((ip - Complex64::new(0.0, -g.volume())).norm() < 1e-12);
    }

    #[test]
    fn non_finite_symbol_is_rejected() {
        let g = grid1(8, 1);
        let f = Field::from_real_fn(g, |x| x[0].sin());
        let err = apply_multiplier(&f, |xi| Complex64::new(1.0 / xi[0], 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSymbol { .. }));
    }

    #[test]
    fn identity_symbol_is_identity() {
        let g = grid1(32, 2);
        let f = Field::from_fn(g, |x| Complex64::new(x[0].cos(), (2.0 * x[0]).sin()));
        let out = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn checked_real_rejects_complex_data() {
        let g = grid1(8, 1);
        let f = Field::plane_wave(g, &[1]).unwrap();
        assert!(matches!(f.clone().checked_real(), Err(Error::NotReal { .. })));
        assert!(f.re().checked_real().is_ok());
    }
}
