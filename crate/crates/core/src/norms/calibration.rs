use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    bessel_potential, box_norms, bracket, conjugate, lp_norm, lq_sum, random_field, spectrum_sobolev_norm,
    RandomFieldSpec, WindowFamily,
};
use crate::error::Result;
use crate::spectral::{forward_transform, GridSpec};

/// Observed range `[min, max]` of a norm ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioInterval {
    pub min: f64,
    pub max: f64,
}

impl RatioInterval {
    fn empty() -> Self {
        Self { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }

    fn include(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    /// `[min / (1 + tol), max · (1 + tol)]`.
    pub fn widened(&self, tol: f64) -> Self {
        Self { min: self.min / (1.0 + tol), max: self.max * (1.0 + tol) }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    /// Largest relative change of either endpoint.
    pub fn relative_change(&self, other: &Self) -> f64 {
        let a = ((self.min - other.min) / self.min).abs();
        let b = ((self.max - other.max) / self.max).abs();
        a.max(b)
    }
}

/// Measured constants for the `(p, p', ·)` norms at one exponent `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConstant {
    pub p: f64,
    /// `‖f‖_p / ‖f‖_{M_{p,p'}}`; `max` is the empirical embedding constant.
    pub embedding: RatioInterval,
    /// `‖⟨D⟩f‖_{M_{p,p'}} / ‖f‖_{M^1_{p,p'}}`.
    pub bessel: RatioInterval,
}

/// Norm-equivalence constants measured over a seeded sample of random fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub grid: GridSpec,
    pub seed: u64,
    pub samples: usize,
    pub fields: RandomFieldSpec,
    /// `‖f‖_{M^0_{2,2}} / ‖f‖_{L²}`.
    pub modulation_over_sobolev_s0: RatioInterval,
    /// `‖f‖_{M^1_{2,2}} / ‖f‖_{H¹}`.
    pub modulation_over_sobolev_s1: RatioInterval,
    pub embedding: Vec<EmbeddingConstant>,
}

impl Calibration {
    pub fn embedding_for(&self, p: f64) -> Option<&EmbeddingConstant> {
        self.embedding.iter().find(|e| e.p == p)
    }
}

fn weighted_modulation(norms: &[(Vec<i64>, f64)], q: f64, s: f64) -> f64 {
    let terms: Vec<f64> = norms
        .iter()
        .map(|(k, v)| {
            let kf: Vec<f64> = k.iter().map(|&x| x as f64).collect();
            bracket(&kf).powf(s) * v
        })
        .collect();
    lq_sum(&terms, q)
}

/// Sweeps `samples` random fields drawn from a `ChaCha8Rng` seeded with
/// `seed` and records the extreme ratios.
pub fn calibrate(
    grid: GridSpec,
    seed: u64,
    samples: usize,
    fields: RandomFieldSpec,
    embedding_ps: &[f64],
) -> Result<Calibration> {
    let family = WindowFamily::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s0 = RatioInterval::empty();
    let mut s1 = RatioInterval::empty();
    let mut emb: Vec<(RatioInterval, RatioInterval)> =
        embedding_ps.iter().map(|_| (RatioInterval::empty(), RatioInterval::empty())).collect();
    for _ in 0..samples {
        let f = random_field(grid, &fields, &mut rng)?;
        let spec = forward_transform(&f);
        let two = box_norms(&family, &spec, 2.0)?;
        s0.include(weighted_modulation(&two, 2.0, 0.0) / spectrum_sobolev_norm(&spec, 0.0));
        s1.include(weighted_modulation(&two, 2.0, 1.0) / spectrum_sobolev_norm(&spec, 1.0));
        let lifted = forward_transform(&bessel_potential(&f, 1.0));
        for (&p, (e, b)) in embedding_ps.iter().zip(emb.iter_mut()) {
            let q = conjugate(p);
            let norms = box_norms(&family, &spec, p)?;
            e.include(lp_norm(&f, p) / weighted_modulation(&norms, q, 0.0));
            let lifted_norms = box_norms(&family, &lifted, p)?;
            b.include(weighted_modulation(&lifted_norms, q, 0.0) / weighted_modulation(&norms, q, 1.0));
        }
    }
    Ok(Calibration {
        grid,
        seed,
        samples,
        fields,
        modulation_over_sobolev_s0: s0,
        modulation_over_sobolev_s1: s1,
        embedding: embedding_ps
            .iter()
            .zip(emb)
            .map(|(&p, (embedding, bessel))| EmbeddingConstant { p, embedding, bessel })
            .collect(),
    })
}
