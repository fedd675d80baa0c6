use std::thread;

use anyhow::{Context, Result};
use kgmod::highlow::{
    is_admissible, qa, run_experiment, split_data, split_norms, synthetic_datum, DatumFamily, DatumSpec,
    ExperimentReport, HighLowParams, IPrimeCheck,
};
use kgmod::norms::{
    box_norms, calibrate, embedding_ratio, lp_norm, modulation_norm_with, random_field, sobolev_norm, NormParams,
    RandomFieldSpec, WindowFamily,
};
use kgmod::propagator::{semigroup_apply, step_count, strichartz_ratio};
use kgmod::solver::{
    evolve_with, local_time_exponent, picard_solve, sup_l2_distance, ConservedEnergyObserver, EnergyObserver,
    EvolveOptions, KgState, PicardOptions,
};
use kgmod::spectral::{forward_transform, Field, GridSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{Artifacts, RunOutput};
use crate::scenario::{DataKind, Family, Scenario};
use crate::{CliError, Command, RunConfig};

fn infeasible(msg: impl Into<String>) -> anyhow::Error {
    CliError::ScenarioInfeasible(msg.into()).into()
}

fn grid(s: &Scenario) -> Result<GridSpec> {
    GridSpec::new(s.d, s.n, s.period).map_err(|e| infeasible(e.to_string()))
}

fn highlow_params(s: &Scenario) -> Result<HighLowParams> {
    HighLowParams::new(s.d, s.alpha, s.p, s.cutoff).map_err(|e| infeasible(e.to_string()))
}

fn datum_spec(s: &Scenario, seed: u64) -> DatumSpec {
    let family = match s.family {
        Family::Interpolation => DatumFamily::Interpolation,
        Family::PowerLaw => DatumFamily::PowerLaw { s0: s.s0 },
    };
    DatumSpec { family, alpha: s.alpha, p: s.p, amplitude: s.amplitude, seed }
}

/// Initial data selected by the `data` key.
pub fn initial_data(s: &Scenario) -> Result<KgState> {
    let g = grid(s)?;
    let a = s.amplitude;
    let state = match s.data {
        DataKind::Zero => KgState::zeros(g),
        DataKind::Gaussian => {
            let centre = g.side() / 2.0;
            let p = g.period_scale() as f64;
            let u =
                Field::from_real_fn(g, |x| a * x.iter().map(|v| (-(v - centre).powi(2) / 2.0).exp()).product::<f64>());
            let ut = Field::from_real_fn(g, |x| a * 0.3 * (x[0] / p).sin());
            KgState::new(u, ut, 0.0)?
        }
        DataKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let spec = RandomFieldSpec { real: true, ..RandomFieldSpec::default() };
            let u = random_field(g, &spec, &mut rng)?.scale_real(a);
            let ut = random_field(g, &spec, &mut rng)?.scale_real(a);
            KgState::new(u, ut, 0.0)?
        }
        DataKind::Synthetic => synthetic_datum(g, &datum_spec(s, s.seed))?,
    };
    Ok(state)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let s = &cfg.scenario;
    if !(s.dt > 0.0 && s.dt.is_finite()) {
        return Err(infeasible(format!("dt > 0 violated: dt = {}", s.dt)));
    }
    let mut out = Artifacts::new(&cfg.out, s);
    match cfg.command {
        Command::Params => params(s, &mut out)?,
        Command::Norms => norms(s, &mut out)?,
        Command::Evolve => evolve(s, &mut out)?,
        Command::Picard => picard(s, &mut out)?,
        Command::Strichartz => strichartz(s, &mut out)?,
        Command::Calibrate => calibration(s, &mut out)?,
        Command::Highlow => highlow(s, cfg.jobs, &mut out)?,
    }
    out.finish()
}

#[derive(Serialize)]
struct QaEntry {
    d: usize,
    r: f64,
    q: Option<crate::scenario::Exponent>,
    note: Option<String>,
}

fn params(s: &Scenario, out: &mut Artifacts) -> Result<()> {
    let hp = highlow_params(s)?;
    let (e1, e2) = hp.exponents();
    let qa_table: Vec<QaEntry> = [3usize, 4]
        .into_iter()
        .map(|d| match qa(hp.r(), d) {
            Ok(q) => QaEntry { d, r: hp.r(), q: Some(crate::scenario::Exponent(q)), note: None },
            Err(e) => QaEntry { d, r: hp.r(), q: None, note: Some(e.to_string()) },
        })
        .collect();
    out.note(format!("p_max = {}", hp.p_max()));
    out.note(format!("theta = {}, alpha_tilde = {}", hp.theta(), hp.alpha_tilde()));
    for e in &qa_table {
        match &e.q {
            Some(q) => out.note(format!("q_a(r = {}, d = {}) = {}", e.r, e.d, q)),
            None => out.note(format!("q_a(r = {}, d = {}) undefined: {}", e.r, e.d, e.note.as_deref().unwrap_or(""))),
        }
    }
    out.note(format!("exponents e1 = {e1}, e2 = {e2}"));
    out.note(format!("predicted_T = {}", hp.predicted_t()));
    out.json(
        "report.json",
        &json!({
            "p_max": hp.p_max(),
            "theta": hp.theta(),
            "alpha_tilde": hp.alpha_tilde(),
            "r": hp.r(),
            "exponents": { "e1": e1, "e2": e2 },
            "predicted_T": hp.predicted_t(),
            "deviation_exponent": hp.deviation_exponent(),
            "q_a": qa_table,
        }),
    )
}

fn norms(s: &Scenario, out: &mut Artifacts) -> Result<()> {
    let data = initial_data(s)?;
    let u = data.u();
    let g = u.grid();
    let family = WindowFamily::new(g);
    let spec = forward_transform(u);
    let r = 2.0 * s.alpha;
    let mut modulation = Vec::new();
    for np in [
        NormParams::new(2.0, 2.0, 0.0)?,
        NormParams::new(2.0, 2.0, 1.0)?,
        NormParams::dual_pair(s.p, 0.0)?,
        NormParams::dual_pair(s.p, 1.0)?,
        NormParams::dual_pair(r, 1.0)?,
    ] {
        modulation.push(json!({
            "p": np.p(),
            "q": np.q(),
            "s": np.s(),
            "value": modulation_norm_with(&family, &spec, np),
        }));
    }
    let embedding = if data.u().is_zero() { None } else { Some(embedding_ratio(u, s.p)?) };
    out.json(
        "report.json",
        &json!({
            "lp": lp_norm(u, s.p),
            "sobolev_s0": sobolev_norm(u, 0.0),
            "sobolev_s1": sobolev_norm(u, 1.0),
            "modulation": modulation,
            "embedding_ratio": embedding,
        }),
    )?;
    let mut header: Vec<String> = (0..g.dim()).map(|i| format!("k{i}")).collect();
    header.push("box_norm".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = box_norms(&family, &spec, s.p)?.into_iter().map(|(k, v)| {
        let mut row: Vec<f64> = k.iter().map(|&x| x as f64).collect();
        row.push(v);
        row
    });
    out.csv("boxes.csv", &header, rows)?;
    out.field("u", u)
}

fn evolve(s: &Scenario, out: &mut Artifacts) -> Result<()> {
    let data = initial_data(s)?;
    let mut e = EnergyObserver { alpha: s.alpha };
    let mut h = ConservedEnergyObserver { alpha: s.alpha };
    let tr = evolve_with(&data, s.t_end, s.dt, s.alpha, &mut [&mut e, &mut h], EvolveOptions { stride: s.stride })?;
    let energy = tr.series("energy").context("energy series")?.to_vec();
    let conserved = tr.series("conserved_energy").context("conserved energy series")?.to_vec();
    let h0 = conserved[0];
    let drift = if h0 > 0.0 {
        conserved.iter().map(|v| (v - h0).abs()).fold(0.0, f64::max) / h0
    } else {
        conserved.iter().map(|v| v.abs()).fold(0.0, f64::max)
    };
    let rows = tr.times.iter().zip(&energy).zip(&conserved).map(|((t, e), c)| vec![*t, *e, *c]);
    out.csv("series.csv", &["t", "energy", "conserved_energy"], rows)?;
    out.json(
        "report.json",
        &json!({
            "steps": tr.times.len() - 1,
            "dt": tr.dt,
            "energy_initial": energy[0],
            "energy_final": energy[energy.len() - 1],
            "conserved_energy_relative_drift": drift,
            "snapshots": tr.states.iter().map(|st| st.time()).collect::<Vec<_>>(),
        }),
    )?;
    out.field("u0", data.u())?;
    out.field("ut0", data.ut())?;
    out.field("u_final", tr.last.u())?;
    out.field("ut_final", tr.last.ut())
}

fn picard(s: &Scenario, out: &mut Artifacts) -> Result<()> {
    let data = initial_data(s)?;
    let pic = picard_solve(&data, s.alpha, s.t_end, s.dt, PicardOptions::default())?;
    let split = evolve_with(&data, s.t_end, s.dt, s.alpha, &mut [], EvolveOptions { stride: 1 })?;
    let gap = sup_l2_distance(&pic.trajectory, &split)?;
    let rows = pic.distances.iter().enumerate().map(|(i, d)| vec![(i + 1) as f64, *d]);
    out.csv("distances.csv", &["iteration", "distance"], rows)?;
    out.json(
        "report.json",
        &json!({
            "contraction_factor": pic.contraction_factor,
            "iterations": pic.iterations,
            "distances": pic.distances,
            "distance_to_splitting": gap,
            "local_time_exponent": local_time_exponent(s.alpha, s.d).ok(),
        }),
    )
}

fn strichartz(s: &Scenario, out: &mut Artifacts) -> Result<()> {
    let (q, r) = (s.q.0, s.r.0);
    if !is_admissible(q, r, s.d) {
        return Err(infeasible(format!("1/q + (d-1)/(2r) <= (d-1)/4 violated: q = {}, r = {}, d = {}", s.q, s.r, s.d)));
    }
    let data = initial_data(s)?;
    let ratio = strichartz_ratio(data.u(), data.ut(), q, r, s.t_end, s.dt)?;
    let steps = step_count(s.t_end, s.dt)?;
    let mut rows = Vec::with_capacity(steps + 1);
    for m in 0..=steps {
        let t = m as f64 * s.dt;
        let (u, _) = semigroup_apply(data.u(), data.ut(), t)?;
        rows.push(vec![t, lp_norm(&u, r)]);
    }
    out.csv("lr_norm.csv", &["t", "lr_norm"], rows)?;
    out.json("report.json", &json!({ "ratio": ratio, "admissible": true }))
}

/// Embedding exponents recorded by `calibrate`: `p`, `4` and `r = 2α`.
pub fn calibration_exponents(s: &Scenario) -> Vec<f64> {
    let mut ps: Vec<f64> = Vec::new();
    for p in [s.p, 4.0, 2.0 * s.alpha] {
        if p >= 2.0 && !ps.iter().any(|&x| (x - p).abs() < 1e-12) {
            ps.push(p);
        }
    }
    ps.sort_by(f64::total_cmp);
    ps
}

fn calibration(s: &Scenario, out: &mut Artifacts) -> Result<()> {
    let g = grid(s)?;
    let cal = calibrate(g, s.seed, s.samples, RandomFieldSpec::default(), &calibration_exponents(s))?;
    out.json("calibration.json", &cal)
}

#[derive(Serialize)]
struct SplitRow {
    cutoff: f64,
    low_u: f64,
    low_ut: f64,
    high_u: f64,
    high_ut: f64,
}

#[derive(Serialize)]
struct RunSummary {
    seed: u64,
    t_end: f64,
    dt: f64,
    predicted_t: f64,
    hamiltonian_window_ok: bool,
    max_i_ratio: f64,
    i_prime: IPrimeCheck,
    deviation_slope: Option<f64>,
    predicted_deviation_exponent: f64,
    conserved_energy_relative_drift: f64,
    splits: Vec<SplitRow>,
}

struct HighlowRun {
    seed: u64,
    data: KgState,
    report: ExperimentReport,
    splits: Vec<SplitRow>,
}

fn highlow_one(s: &Scenario, params: &HighLowParams, seed: u64) -> Result<HighlowRun> {
    let g = grid(s)?;
    let data = synthetic_datum(g, &datum_spec(s, seed))?;
    let t_end = s.t_factor * params.predicted_t();
    let report = run_experiment(&data, params, t_end, s.dt)?;
    let mut splits = Vec::new();
    for cutoff in [1.0, 2.0, 4.0, 8.0, 16.0] {
        if cutoff > g.band_limit() {
            break;
        }
        let n = split_norms(&split_data(&data, cutoff)?, params.r())?;
        splits.push(SplitRow { cutoff, low_u: n.low_u, low_ut: n.low_ut, high_u: n.high_u, high_ut: n.high_ut });
    }
    Ok(HighlowRun { seed, data, report, splits })
}

fn highlow(s: &Scenario, jobs: usize, out: &mut Artifacts) -> Result<()> {
    let params = highlow_params(s)?;
    if !(s.t_factor > 0.0 && s.t_factor <= 1.0) {
        return Err(infeasible(format!("0 < T_factor <= 1 violated: T_factor = {}", s.t_factor)));
    }
    if s.replicas == 0 {
        return Err(infeasible("replicas >= 1 violated: replicas = 0"));
    }
    let seeds: Vec<u64> = (0..s.replicas as u64).map(|i| s.seed.wrapping_add(i)).collect();
    let workers = jobs.clamp(1, seeds.len());
    let mut results: Vec<Option<Result<HighlowRun>>> = (0..seeds.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let seeds = &seeds;
                let params = &params;
                scope.spawn(move || {
                    seeds
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, &seed)| (i, highlow_one(s, params, seed)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("highlow worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let mut summaries = Vec::new();
    for r in results {
        let run = r.expect("every seed is assigned")?;
        let rep = &run.report;
        let h0 = rep.conserved_energy_series[0];
        let drift = if h0 > 0.0 {
            rep.conserved_energy_series.iter().map(|v| (v - h0).abs()).fold(0.0, f64::max) / h0
        } else {
            0.0
        };
        let rows = (0..rep.times.len()).map(|m| {
            vec![
                rep.times[m],
                rep.i_series[m],
                rep.e_series[m],
                rep.conserved_energy_series[m],
                rep.tilde_h1_series[m],
                rep.deviation_series[m],
                rep.i_prime_rhs_series[m],
            ]
        });
        out.csv(
            &format!("highlow_seed{}.csv", run.seed),
            &["t", "I", "energy", "conserved_energy", "tilde_h1", "deviation", "i_prime_rhs"],
            rows,
        )?;
        out.field(&format!("u0_seed{}", run.seed), run.data.u())?;
        out.field(&format!("ut0_seed{}", run.seed), run.data.ut())?;
        summaries.push(RunSummary {
            seed: run.seed,
            t_end: rep.t_end,
            dt: rep.dt,
            predicted_t: rep.predicted_t,
            hamiltonian_window_ok: rep.hamiltonian_window_ok,
            max_i_ratio: rep.max_i_ratio,
            i_prime: rep.i_prime,
            deviation_slope: rep.deviation_slope,
            predicted_deviation_exponent: rep.predicted_deviation_exponent,
            conserved_energy_relative_drift: drift,
            splits: run.splits,
        });
    }
    let all_ok = summaries.iter().all(|r| r.hamiltonian_window_ok);
    out.json(
        "report.json",
        &json!({
            "theta": params.theta(),
            "alpha_tilde": params.alpha_tilde(),
            "exponents": { "e1": params.exponents().0, "e2": params.exponents().1 },
            "hamiltonian_window_ok": all_ok,
            "runs": summaries,
        }),
    )
}
