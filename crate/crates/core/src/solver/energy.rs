use crate::error::{Error, Result};
use crate::norms::sobolev_norm;
use crate::spectral::Field;

use super::state::{FirstOrderState, KgState};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("α >= 1 violated: α = {alpha}")))
    }
}

/// Pointwise `|u|^{α-1} u` of the real part of `u`; zero where `u = 0`.
pub fn nonlinearity(u: &Field, alpha: f64) -> Field {
    let e = alpha - 1.0;
    u.map(true, |z| {
        let x = z.re;
        let y = if x == 0.0 { 0.0 } else { x.abs().powf(e) * x };
        y.into()
    })
}

/// `∫ |Re u|^{α+1} dx`.
pub fn potential(u: &Field, alpha: f64) -> f64 {
    let e = alpha + 1.0;
    u.values().iter().map(|z| z.re.abs().powf(e)).sum::<f64>() * u.grid().cell_volume()
}

/// `E = ‖u_t‖² + ‖u‖²_{H¹} + (1/(α+1)) ‖u‖^{α+1}_{α+1}`.
///
/// Along solutions the conserved combination carries twice this potential
/// weight, see [`conserved_energy`].
pub fn energy(s: &KgState, alpha: f64) -> f64 {
    quadratic_part(s) + potential(s.u(), alpha) / (alpha + 1.0)
}

/// `‖u_t‖² + ‖u‖²_{H¹} + (2/(α+1)) ‖u‖^{α+1}_{α+1}`, invariant under the
/// nonlinear flow. Equals `2H(v)`.
pub fn conserved_energy(s: &KgState, alpha: f64) -> f64 {
    quadratic_part(s) + 2.0 * potential(s.u(), alpha) / (alpha + 1.0)
}

fn quadratic_part(s: &KgState) -> f64 {
    sobolev_norm(s.ut(), 0.0).powi(2) + sobolev_norm(s.u(), 1.0).powi(2)
}

/// `H(v) = ∫ ½|Bv|² + (1/(α+1)) |Re v|^{α+1} dx`.
pub fn hamiltonian(v: &FirstOrderState, alpha: f64) -> f64 {
    field_hamiltonian(v.v(), alpha)
}

pub fn field_hamiltonian(v: &Field, alpha: f64) -> f64 {
    0.5 * sobolev_norm(v, 1.0).powi(2) + potential(v, alpha) / (alpha + 1.0)
}
