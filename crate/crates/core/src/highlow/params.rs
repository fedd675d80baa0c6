use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the admissibility inequality.
const ADMISSIBLE_SLACK: f64 = 1e-12;

/// Interpolation exponents `(θ̃, α̃)` for `1/p = (1-θ̃)/2 + θ̃/(2α)` and
/// `α̃ = θ̃ / (1 - θ̃)`.
pub fn compute_theta(p: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(p > 2.0 && p < 2.0 * alpha) {
        return Err(Error::OutOfRange(format!("need 2 < p < 2α = {}, got p = {p}", 2.0 * alpha)));
    }
    let theta = (0.5 - 1.0 / p) / (0.5 - 1.0 / (2.0 * alpha));
    Ok((theta, theta / (1.0 - theta)))
}

/// Upper end of the admissible integrability range `(2, p_max)`.
pub fn p_max(alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::OutOfRange(format!("need α >= 1, got {alpha}")));
    }
    if alpha <= 2.0 {
        return Ok(2.0 * alpha);
    }
    let a = (alpha + 1.0) * (alpha - 2.0);
    Ok(2.0 * alpha * (a + 2.0) / (alpha * a + 2.0))
}

/// `α̃(α+1)(α-2)/2 < 1`.
pub fn growth_condition_ok(alpha: f64, alpha_tilde: f64) -> bool {
    alpha_tilde * (alpha + 1.0) * (alpha - 2.0) / 2.0 < 1.0
}

/// `(e₁, e₂) = (1 + α̃(α+1)(2-α)/2, α + α̃(α+1)/2)`.
pub fn exponent_pair(alpha: f64, alpha_tilde: f64) -> Result<(f64, f64)> {
    let e1 = 1.0 + alpha_tilde * (alpha + 1.0) * (2.0 - alpha) / 2.0;
    let e2 = alpha + alpha_tilde * (alpha + 1.0) / 2.0;
    if !(e1 > 0.0) {
        return Err(Error::ConditionViolated(format!(
            "α̃(α+1)(α-2)/2 < 1 fails for α = {alpha}, α̃ = {alpha_tilde} (e₁ = {e1})"
        )));
    }
    Ok((e1, e2))
}

/// Time horizon `N^{e₁}` over which the modified Hamiltonian stays controlled.
pub fn predicted_t(cutoff: f64, alpha: f64, alpha_tilde: f64) -> Result<f64> {
    let (e1, _) = exponent_pair(alpha, alpha_tilde)?;
    Ok(cutoff.powf(e1))
}

/// Exponent `α̃(α+1) / (2 + α̃(α+1)(2-α))` of the bound
/// `‖(u, u_t)(t) - 𝕂(t)(u, u_t)(0)‖ ≲ (1+t)^{…}`.
pub fn deviation_exponent(alpha: f64, alpha_tilde: f64) -> f64 {
    let a = alpha_tilde * (alpha + 1.0);
    a / (2.0 + a * (2.0 - alpha))
}

/// Exponent `q` solving `1/q + d/r = d/2 - 1`; `∞` when `1/q = 0`.
pub fn qa(r: f64, d: usize) -> Result<f64> {
    if !(r >= 2.0) {
        return Err(Error::InvalidExponent(format!("need r >= 2, got {r}")));
    }
    // 1/q = (d(r-2) - 2r) / (2r)
    let num = d as f64 * (r - 2.0) - 2.0 * r;
    if num < 0.0 {
        return Err(Error::NegativeReciprocal { reciprocal: num / (2.0 * r) });
    }
    Ok(if num == 0.0 { f64::INFINITY } else { 2.0 * r / num })
}

/// `q, r >= 2` and `1/q + (d-1)/(2r) <= (d-1)/4`.
pub fn is_admissible(q: f64, r: f64, d: usize) -> bool {
    if !(q >= 2.0 && r >= 2.0) {
        return false;
    }
    let dm = d as f64 - 1.0;
    1.0 / q + dm / (2.0 * r) <= dm / 4.0 + ADMISSIBLE_SLACK
}

/// Exponents of the high-low experiment, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighLowParams {
    dim: usize,
    alpha: f64,
    p: f64,
    cutoff: f64,
    theta: f64,
    alpha_tilde: f64,
    p_max: f64,
}

impl HighLowParams {
    pub fn new(dim: usize, alpha: f64, p: f64, cutoff: f64) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::InvalidParams(format!("α >= 1 violated: α = {alpha}")));
        }
        let p_max = p_max(alpha)?;
        if !(p > 2.0) {
            return Err(Error::InvalidParams(format!("p > 2 violated: p = {p}")));
        }
        if !(p < p_max) {
            return Err(Error::InvalidParams(format!("p < p_max(α) violated: p = {p} >= p_max({alpha}) = {p_max}")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParams(format!("N > 0 violated: N = {cutoff}")));
        }
        let (theta, alpha_tilde) = compute_theta(p, alpha).map_err(|e| Error::InvalidParams(e.to_string()))?;
        if !growth_condition_ok(alpha, alpha_tilde) {
            return Err(Error::InvalidParams(format!("α̃(α+1)(α-2)/2 < 1 violated: α = {alpha}, α̃ = {alpha_tilde}")));
        }
        Ok(Self { dim, alpha, p, cutoff, theta, alpha_tilde, p_max })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `r = 2α`.
    pub fn r(&self) -> f64 {
        2.0 * self.alpha
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha_tilde(&self) -> f64 {
        self.alpha_tilde
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn exponents(&self) -> (f64, f64) {
        exponent_pair(self.alpha, self.alpha_tilde).expect("validated at construction")
    }

    pub fn predicted_t(&self) -> f64 {
        self.cutoff.powf(self.exponents().0)
    }

    pub fn deviation_exponent(&self) -> f64 {
        deviation_exponent(self.alpha, self.alpha_tilde)
    }
}
