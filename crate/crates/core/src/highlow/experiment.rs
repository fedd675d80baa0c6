use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::HighLowParams;
use super::split::split_data;
use crate::error::{Error, Result};
use crate::norms::sobolev_norm;
use crate::propagator::{apply_b, LinearFlow};
use crate::solver::{conserved_energy, energy, field_hamiltonian, nonlinearity, to_first_order, KgState, Stepper};
use crate::spectral::{forward_transform, inverse_transform, l2_inner, Field};

/// `I'(t)` from the evolution law:
/// `Im ⟨N(Re v) - N(Re ṽ), Bṽ⟩` with `N(u) = |u|^{α-1}u` and `⟨f, g⟩ = ∫ f ḡ`.
pub fn i_prime_rhs(v: &Field, v_tilde: &Field, alpha: f64) -> Result<f64> {
    let diff = nonlinearity(&v.re(), alpha).sub(&nonlinearity(&v_tilde.re(), alpha))?;
    Ok(l2_inner(&diff, &apply_b(v_tilde))?.im)
}

/// Agreement between centred differences of `I` and the evolution law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IPrimeCheck {
    pub max_abs_residual: f64,
    pub max_abs_rhs: f64,
    /// `max_abs_residual / max_abs_rhs`, or the absolute residual if the
    /// right side vanishes identically.
    pub relative_residual: f64,
}

/// Compares `(I_{m+1} - I_{m-1}) / (t_{m+1} - t_{m-1})` with `rhs_m` at
/// every interior sample.
pub fn i_prime_check(times: &[f64], i_series: &[f64], rhs: &[f64]) -> Result<IPrimeCheck> {
    let n = times.len();
    if n < 3 || i_series.len() != n || rhs.len() != n {
        return Err(Error::TooFewSamples { needed: 3, got: n.min(i_series.len()).min(rhs.len()) });
    }
    let mut max_res: f64 = 0.0;
    let mut max_rhs: f64 = 0.0;
    for m in 1..n - 1 {
        let fd = (i_series[m + 1] - i_series[m - 1]) / (times[m + 1] - times[m - 1]);
        max_res = max_res.max((fd - rhs[m]).abs());
        max_rhs = max_rhs.max(rhs[m].abs());
    }
    let relative_residual = if max_rhs > 0.0 { max_res / max_rhs } else { max_res };
    Ok(IPrimeCheck { max_abs_residual: max_res, max_abs_rhs: max_rhs, relative_residual })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Slope of `log y` against `log x` over the positive samples.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).unzip();
    fit_slope(&lx, &ly)
}

/// Time series and verdicts of one high-low run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub params: HighLowParams,
    pub t_end: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    /// `I(t) = H(ṽ(t))`.
    pub i_series: Vec<f64>,
    pub e_series: Vec<f64>,
    pub conserved_energy_series: Vec<f64>,
    /// `‖ṽ(t)‖_{H¹}`.
    pub tilde_h1_series: Vec<f64>,
    /// `‖v(t) - e^{-itB} v(0)‖_{H¹}`.
    pub deviation_series: Vec<f64>,
    /// Evolution-law value of `I'(t)`.
    pub i_prime_rhs_series: Vec<f64>,
    pub i_prime: IPrimeCheck,
    /// `I(t) <= 2 I(0)` at every sample.
    pub hamiltonian_window_ok: bool,
    pub max_i_ratio: f64,
    /// Fitted slope of `log deviation` against `log(1+t)` over the second
    /// half of the run.
    pub deviation_slope: Option<f64>,
    pub predicted_deviation_exponent: f64,
    pub predicted_t: f64,
}

/// Evolves `data` to `T` and tracks `ṽ = v - e^{-itB}Φ^N`, where `Φ^N` is
/// the first-order form of the high part of the data.
pub fn run_experiment(data: &KgState, params: &HighLowParams, t_end: f64, dt: f64) -> Result<ExperimentReport> {
    if data.grid().dim() != params.dim() {
        return Err(Error::InvalidParams(format!(
            "data dimension {} differs from parameter dimension {}",
            data.grid().dim(),
            params.dim()
        )));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!("need T >= 0 and dt > 0, got T = {t_end}, dt = {dt}")));
    }
    let alpha = params.alpha();
    let grid = data.grid();
    let split = split_data(data, params.cutoff())?;
    let high_hat = forward_transform(to_first_order(&split.high).v());
    let v0_hat = forward_transform(to_first_order(data).v());
    let bracket = grid.bracket();

    let steps = (t_end / dt * (1.0 - 1e-12)).ceil() as usize;
    let h = if steps == 0 { dt } else { t_end / steps as f64 };
    let stepper = if steps > 0 { Some(Stepper::new(grid, h, alpha)?) } else { None };

    let mut report = ExperimentReport {
        params: *params,
        t_end,
        dt: h,
        times: Vec::with_capacity(steps + 1),
        i_series: Vec::with_capacity(steps + 1),
        e_series: Vec::with_capacity(steps + 1),
        conserved_energy_series: Vec::with_capacity(steps + 1),
        tilde_h1_series: Vec::with_capacity(steps + 1),
        deviation_series: Vec::with_capacity(steps + 1),
        i_prime_rhs_series: Vec::with_capacity(steps + 1),
        i_prime: IPrimeCheck { max_abs_residual: 0.0, max_abs_rhs: 0.0, relative_residual: 0.0 },
        hamiltonian_window_ok: true,
        max_i_ratio: 0.0,
        deviation_slope: None,
        predicted_deviation_exponent: params.deviation_exponent(),
        predicted_t: params.predicted_t(),
    };

    let mut state = data.clone();
    for m in 0..=steps {
        if m > 0 {
            let stepper = stepper.as_ref().expect("steps > 0");
            state = stepper.step(&state)?.with_time(m as f64 * h);
        }
        let t = m as f64 * h;
        let flow = LinearFlow::new(grid, t)?;
        let v = to_first_order(&state).into_field();
        let mut w_hat = high_hat.clone();
        flow.halfwave_spectrum(&mut w_hat);
        let v_tilde = v.sub(&inverse_transform(&w_hat))?;
        let mut free_hat = v0_hat.clone();
        flow.halfwave_spectrum(&mut free_hat);
        let v_hat = forward_transform(&v);
        let deviation = v_hat
            .coefficients()
            .iter()
            .zip(free_hat.coefficients())
            .zip(&bracket)
            .map(|((a, b), w): ((&Complex64, &Complex64), &f64)| w * w * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        report.times.push(t);
        report.i_series.push(field_hamiltonian(&v_tilde, alpha));
        report.e_series.push(energy(&state, alpha));
        report.conserved_energy_series.push(conserved_energy(&state, alpha));
        report.tilde_h1_series.push(sobolev_norm(&v_tilde, 1.0));
        report.deviation_series.push(deviation);
        report.i_prime_rhs_series.push(i_prime_rhs(&v, &v_tilde, alpha)?);
    }

    let i0 = report.i_series[0];
    report.hamiltonian_window_ok = report.i_series.iter().all(|&i| i <= 2.0 * i0);
    report.max_i_ratio = if i0 > 0.0 { report.i_series.iter().copied().fold(0.0, f64::max) / i0 } else { 0.0 };
    if report.times.len() >= 3 {
        report.i_prime = i_prime_check(&report.times, &report.i_series, &report.i_prime_rhs_series)?;
    }
    let half = report.times.len() / 2;
    let shifted: Vec<f64> = report.times[half..].iter().map(|t| 1.0 + t).collect();
    report.deviation_slope = log_log_slope(&shifted, &report.deviation_series[half..]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
        assert!(fit_slope(&[1.0], &[2.0]).is_none());
        assert!(fit_slope(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn i_prime_check_needs_three_samples() {
        assert!(matches!(i_prime_check(&[0.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn i_prime_check_on_exact_derivative() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        let i: Vec<f64> = times.iter().map(|t| t * t).collect();
        let rhs: Vec<f64> = times.iter().map(|t| 2.0 * t).collect();
        let c = i_prime_check(&times, &i, &rhs).unwrap();
        assert!(c.max_abs_residual < 1e-12);
    }
}
