use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension supported by the lattice code.
pub const MAX_DIM: usize = 3;

/// Geometry of the periodic box `[0, 2πP)^d` sampled with `n` points per axis.
///
/// Values are stored row-major (axis 0 slowest). In frequency space the
/// natural FFT order is kept: index `j < n/2` carries wavenumber `j`, index
/// `j >= n/2` carries `j - n`; the physical frequency is `wavenumber / P`.
/// Integer frequencies sit exactly on the lattice, so each unit cube of
/// frequency space holds `P^d` lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    period_scale: usize,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, period_scale: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("points per axis {n} must be even and >= 2")));
        }
        if period_scale == 0 {
            return Err(Error::InvalidGrid("period scale must be positive".into()));
        }
        let total = (n as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > (1u128 << 31) {
            return Err(Error::InvalidGrid(format!("{n}^{dim} points is too large")));
        }
        Ok(Self { dim, n, period_scale })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period_scale(&self) -> usize {
        self.period_scale
    }

    /// Total number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Side length `2πP` of the periodic box.
    pub fn side(&self) -> f64 {
        2.0 * PI * self.period_scale as f64
    }

    /// Grid spacing `2πP / n`.
    pub fn spacing(&self) -> f64 {
        self.side() / self.n as f64
    }

    /// Quadrature weight of one lattice point, `(2πP/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume `(2πP)^d` of the box.
    pub fn volume(&self) -> f64 {
        self.side().powi(self.dim as i32)
    }

    /// Half-width `n / (2P)` of the resolved frequency band.
    pub fn band_limit(&self) -> f64 {
        self.n as f64 / (2.0 * self.period_scale as f64)
    }

    /// Signed wavenumber of a 1-D index in natural FFT order.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.n as i64;
        let j = index as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Inverse of [`GridSpec::wavenumber`]; `None` if not represented.
    pub fn index_of_wavenumber(&self, wavenumber: i64) -> Option<usize> {
        let n = self.n as i64;
        if wavenumber < -n / 2 || wavenumber >= n / 2 {
            None
        } else {
            Some(wavenumber.rem_euclid(n) as usize)
        }
    }

    /// Frequency `j / P` of a 1-D index.
    pub fn frequency_1d(&self, index: usize) -> f64 {
        self.wavenumber(index) as f64 / self.period_scale as f64
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.n;
            rest /= self.n;
        }
        out
    }

    pub fn flatten(&self, indices: &[usize]) -> usize {
        indices[..self.dim].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Frequency vector of a flat index (unused trailing entries are zero).
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            xi[axis] = self.frequency_1d(idx[axis]);
        }
        xi
    }

    /// Physical coordinates of a flat index.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    /// `|ξ|²` at every lattice frequency, in storage order.
    pub fn frequency_norm_sq(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.n).map(|j| self.frequency_1d(j).powi(2)).collect();
        let mut out = Vec::with_capacity(self.len());
        for flat in 0..self.len() {
            let idx = self.unflatten(flat);
            out.push(idx[..self.dim].iter().map(|&j| axis[j]).sum());
        }
        out
    }

    /// Japanese bracket `⟨ξ⟩ = (1 + |ξ|²)^{1/2}` at every lattice frequency.
    pub fn bracket(&self) -> Vec<f64> {
        self.frequency_norm_sq().into_iter().map(|s| (1.0 + s).sqrt()).collect()
    }

    /// `max_i |ξ_i|` at every lattice frequency.
    pub fn frequency_sup_norm(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.n).map(|j| self.frequency_1d(j).abs()).collect();
        (0..self.len())
            .map(|flat| {
                let idx = self.unflatten(flat);
                idx[..self.dim].iter().map(|&j| axis[j]).fold(0.0, f64::max)
            })
            .collect()
    }

    /// Integer box indices `k` (per axis) whose window support `(k-1, k+1)`
    /// meets the frequency lattice.
    pub fn box_range(&self) -> (i64, i64) {
        let p = self.period_scale as i64;
        let half = self.n as i64 / 2;
        // box k holds lattice wavenumber j iff |j - kP| < P
        let min = -(half - 1 + p).div_euclid(p);
        let max = (half - 2 + p).div_euclid(p);
        (min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_oversized_grids() {
        assert!(GridSpec::new(1, 63, 1).is_err());
        assert!(GridSpec::new(4, 8, 1).is_err());
        assert!(GridSpec::new(1, 8, 0).is_err());
        assert!(GridSpec::new(3, 4096, 1).is_err());
    }

    #[test]
    fn natural_order_frequencies() {
        let g = GridSpec::new(1, 8, 2).unwrap();
        let xi: Vec<f64> = (0..8).map(|j| g.frequency_1d(j)).collect();
        assert_eq!(xi, vec![0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5]);
        for j in 0..8 {
            assert_eq!(g.index_of_wavenumber(g.wavenumber(j)), Some(j));
        }
        assert_eq!(g.index_of_wavenumber(4), None);
    }

    #[test]
    fn integer_frequencies_are_resolved() {
        let g = GridSpec::new(1, 64, 4).unwrap();
        let m = (g.band_limit() - 1.0) as i64;
        for k in -m..=m {
            assert!(g.index_of_wavenumber(k * 4).is_some());
        }
    }

    #[test]
    fn box_range_covers_lattice() {
        for (n, p) in [(64, 4), (32, 1), (20, 3), (8, 8)] {
            let g = GridSpec::new(1, n, p).unwrap();
            let (lo, hi) = g.box_range();
            let pp = p as i64;
            for idx in 0..n {
                let j = g.wavenumber(idx);
                let hits = (lo..=hi).filter(|k| (j - k * pp).abs() < pp).count();
                assert!(hits >= 1, "n={n} P={p} j={j}");
            }
            // the extreme boxes actually touch the lattice
            let touches = |k: i64| (0..n).any(|idx| (g.wavenumber(idx) - k * pp).abs() < pp);
            assert!(touches(lo) && touches(hi));
            assert!(!touches(lo - 1) && !touches(hi + 1));
        }
    }

    #[test]
    fn flatten_round_trip() {
        let g = GridSpec::new(3, 6, 1).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.flatten(&g.unflatten(flat)), flat);
        }
    }
}
