use crate::error::{Error, Result};
use crate::spectral::{GridSpec, MAX_DIM};

fn smooth_ramp_half(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// `C^∞` step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smoothstep(t: f64) -> f64 {
    let a = smooth_ramp_half(t);
    let b = smooth_ramp_half(1.0 - t);
    if a + b == 0.0 {
        // unreachable for finite t, kept for NaN safety
        0.0
    } else {
        a / (a + b)
    }
}

/// Transition profile: 1 on `|x| <= 1/2`, 0 on `|x| >= 1`, smooth between.
pub fn window_profile(x: f64) -> f64 {
    smoothstep(2.0 * (1.0 - x.abs()))
}

/// One-dimensional normalized window `φ(x - k) / Σ_m φ(x - m)`.
pub fn sigma_1d(k: i64, x: f64) -> f64 {
    let lo = x.floor() as i64;
    let num = window_profile(x - k as f64);
    if num == 0.0 {
        return 0.0;
    }
    let den: f64 = (lo - 1..=lo + 2).map(|m| window_profile(x - m as f64)).sum();
    num / den
}

/// Box window `σ_k(ξ) = ρ(ξ - k) / Σ_m ρ(ξ - m)` with `ρ(ξ) = Π_i φ(ξ_i)`.
///
/// The normalizing sum factorizes over axes, so `σ_k` is the product of the
/// one-dimensional windows.
pub fn sigma(k: &[i64], xi: &[f64]) -> f64 {
    k.iter().zip(xi).map(|(&ki, &x)| sigma_1d(ki, x)).product()
}

/// Lattice weight of one box along one axis: indices and window values.
#[derive(Clone, Debug)]
struct AxisSupport {
    indices: Vec<usize>,
    weights: Vec<f64>,
}

/// Box windows tabulated on the lattice of one grid.
#[derive(Clone, Debug)]
pub struct WindowFamily {
    grid: GridSpec,
    k_min: i64,
    k_max: i64,
}

impl WindowFamily {
    pub fn new(grid: GridSpec) -> Self {
        let (k_min, k_max) = grid.box_range();
        Self { grid, k_min, k_max }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Per-axis range of boxes that meet the lattice.
    pub fn box_range(&self) -> (i64, i64) {
        (self.k_min, self.k_max)
    }

    /// Every box index meeting the lattice, in lexicographic order.
    pub fn boxes(&self) -> Vec<Vec<i64>> {
        let d = self.grid.dim();
        let span = (self.k_max - self.k_min + 1) as usize;
        (0..span.pow(d as u32))
            .map(|mut code| {
                let mut k = vec![0; d];
                for slot in k.iter_mut().rev() {
                    *slot = self.k_min + (code % span) as i64;
                    code /= span;
                }
                k
            })
            .collect()
    }

    pub fn check_box(&self, k: &[i64]) -> Result<()> {
        let ok = k.len() == self.grid.dim() && k.iter().all(|&ki| ki >= self.k_min && ki <= self.k_max);
        if ok {
            Ok(())
        } else {
            Err(Error::BoxOutOfRange { k: k.to_vec(), min: self.k_min, max: self.k_max })
        }
    }

    fn axis_support(&self, k: i64) -> AxisSupport {
        let p = self.grid.period_scale() as i64;
        let half = self.grid.n() as i64 / 2;
        let lo = (k * p - p + 1).max(-half);
        let hi = (k * p + p - 1).min(half - 1);
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        for j in lo..=hi {
            let w = sigma_1d(k, j as f64 / p as f64);
            if w > 0.0 {
                indices.push(self.grid.index_of_wavenumber(j).expect("wavenumber in band"));
                weights.push(w);
            }
        }
        AxisSupport { indices, weights }
    }

    /// Flat lattice indices where `σ_k > 0`, with the window values.
    pub fn support(&self, k: &[i64]) -> Result<Vec<(usize, f64)>> {
        self.check_box(k)?;
        let d = self.grid.dim();
        let axes: Vec<AxisSupport> = k.iter().map(|&ki| self.axis_support(ki)).collect();
        let sizes: Vec<usize> = axes.iter().map(|a| a.indices.len()).collect();
        let total: usize = sizes.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut idx = [0usize; MAX_DIM];
        for mut code in 0..total {
            let mut w = 1.0;
            for axis in (0..d).rev() {
                let i = code % sizes[axis];
                code /= sizes[axis];
                idx[axis] = axes[axis].indices[i];
                w *= axes[axis].weights[i];
            }
            out.push((self.grid.flatten(&idx), w));
        }
        Ok(out)
    }

    /// `σ_k` at every lattice frequency, in storage order.
    pub fn symbol(&self, k: &[i64]) -> Result<Vec<f64>> {
        let mut table = vec![0.0; self.grid.len()];
        for (flat, w) in self.support(k)? {
            table[flat] = w;
        }
        Ok(table)
    }

    /// `max_ξ |Σ_k σ_k(ξ) - 1|` over the lattice.
    pub fn partition_of_unity_error(&self) -> f64 {
        let mut total = vec![0.0; self.grid.len()];
        for k in self.boxes() {
            for (flat, w) in self.support(&k).expect("box in range") {
                total[flat] += w;
            }
        }
        total.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }
}
