use approx::assert_relative_eq;
use kgmod::norms::{
    bessel_potential, box_op, calibrate, conjugate, embedding_ratio, lp_norm, modulation_norm, random_band_limited,
    sigma, sobolev_norm, window_profile, Calibration, NormParams, WindowFamily,
};
use kgmod::spectral::{forward_transform, l2_inner, Field, GridSpec};
use kgmod::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn calibration_fixture() -> Calibration {
    let text = include_str!("fixtures/calibration_d1.json");
    serde_json::from_str(text).expect("fixture parses")
}

fn band_limited(grid: GridSpec, band: f64, seed: u64) -> Field {
    random_band_limited(grid, band, 0.5, false, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn partition_of_unity_on_the_lattice() {
    for (d, n, p) in [(1, 512, 4), (2, 128, 4), (3, 16, 2), (1, 30, 7)] {
        let w = WindowFamily::new(GridSpec::new(d, n, p).unwrap());
        assert!(w.partition_of_unity_error() <= 1e-12, "d={d} n={n} P={p}");
    }
}

#[test]
fn windows_are_translates_with_bounded_support() {
    let g = GridSpec::new(2, 32, 4).unwrap();
    for flat in 0..g.len() {
        let xi = g.frequency(flat);
        let s0 = sigma(&[0, 0], &xi[..2]);
        assert!(s0 >= 0.0);
        if xi[0].abs() >= 1.0 || xi[1].abs() >= 1.0 {
            assert_eq!(s0, 0.0);
        }
        for k in [[1i64, -2], [3, 0], [-1, 1]] {
            let shifted = [xi[0] - k[0] as f64, xi[1] - k[1] as f64];
            assert_relative_eq!(sigma(&k, &xi[..2]), sigma(&[0, 0], &shifted), epsilon = 1e-15);
        }
    }
    assert_eq!(window_profile(0.3), 1.0);
}

#[test]
fn lebesgue_norms() {
    let g = GridSpec::new(1, 64, 1).unwrap();
    assert_eq!(lp_norm(&Field::zeros(g), 3.0), 0.0);
    let c = Field::from_real_fn(g, |_| 2.5);
    assert_relative_eq!(lp_norm(&c, 3.0), 2.5 * (2.0 * std::f64::consts::PI).powf(1.0 / 3.0), max_relative = 1e-13);

    let f = band_limited(GridSpec::new(1, 128, 2).unwrap(), 5.0, 3);
    let h = f.grid().cell_volume();
    let brute = (h * f.values().iter().map(|v| v.norm().powi(4)).sum::<f64>()).powf(0.25);
    assert_relative_eq!(lp_norm(&f, 4.0), brute, max_relative = 1e-12);
    let inner = l2_inner(&f, &f).unwrap().re.sqrt();
    assert_relative_eq!(lp_norm(&f, 2.0), inner, max_relative = 1e-12);
    let max = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert_eq!(lp_norm(&f, f64::INFINITY), max);
}

#[test]
fn sobolev_norms() {
    let g = GridSpec::new(1, 64, 4).unwrap();
    let f = band_limited(g, 5.0, 1);
    assert_relative_eq!(sobolev_norm(&f, 0.0), lp_norm(&f, 2.0), max_relative = 1e-12);
    let mode = Field::plane_wave(g, &[6]).unwrap().scale_real(1.0 / g.volume().sqrt());
    assert_relative_eq!(lp_norm(&mode, 2.0), 1.0, max_relative = 1e-12);
    assert_relative_eq!(sobolev_norm(&mode, 1.0), (1.0f64 + 1.5 * 1.5).sqrt(), max_relative = 1e-12);
    let lowered = bessel_potential(&f, -1.0);
    assert_relative_eq!(sobolev_norm(&lowered, 1.0), sobolev_norm(&f, 0.0), max_relative = 1e-12);
}

#[test]
fn box_of_a_centred_mode_is_the_mode() {
    let g = GridSpec::new(2, 32, 4).unwrap();
    let k0 = [2i64, -1];
    let f = Field::plane_wave(g, &[8, -4]).unwrap();
    let w = WindowFamily::new(g);
    for k in w.boxes() {
        let piece = box_op(&f, &k).unwrap();
        let diff = if k == k0 { piece.sub(&f).unwrap().max_abs() } else { piece.max_abs() };
        assert!(diff < 1e-12, "box {k:?}");
    }
    assert!(box_op(&Field::zeros(g), &[0, 0]).unwrap().is_zero());
}

#[test]
fn boxes_resum_to_the_field() {
    for (d, n, p) in [(1, 128, 4), (2, 32, 2)] {
        let g = GridSpec::new(d, n, p).unwrap();
        let f = band_limited(g, 0.9 * g.band_limit(), 11);
        let w = WindowFamily::new(g);
        let mut total = Field::zeros(g);
        for k in w.boxes() {
            total = total.add(&box_op(&f, &k).unwrap()).unwrap();
        }
        assert!(total.sub(&f).unwrap().max_abs() <= 1e-10 * f.max_abs());
    }
}

#[test]
fn box_output_lives_in_the_window_support() {
    let g = GridSpec::new(1, 64, 4).unwrap();
    let f = band_limited(g, 7.0, 2);
    let piece = forward_transform(&box_op(&f, &[3]).unwrap());
    for (j, c) in piece.coefficients().iter().enumerate() {
        let xi = g.frequency_1d(j);
        if (xi - 3.0).abs() >= 1.0 {
            assert!(c.norm() < 1e-12);
        }
    }
}

#[test]
fn out_of_range_box_is_an_error() {
    let g = GridSpec::new(1, 64, 4).unwrap();
    let f = band_limited(g, 3.0, 0);
    let (_, hi) = g.box_range();
    assert!(matches!(box_op(&f, &[hi + 1]), Err(Error::BoxOutOfRange { .. })));
}

#[test]
fn boxes_two_apart_are_orthogonal() {
    let g = GridSpec::new(2, 32, 2).unwrap();
    let f = band_limited(g, 5.0, 4);
    for (k, kp) in [([0i64, 0], [2i64, 0]), ([1, -1], [1, 1]), ([-2, 3], [1, 0])] {
        let twice = box_op(&box_op(&f, &k).unwrap(), &kp).unwrap();
        assert!(twice.max_abs() <= 1e-12 * f.max_abs());
    }
}

#[test]
fn modulation_norm_of_a_single_box_field() {
    let g = GridSpec::new(1, 64, 4).unwrap();
    let f = Field::plane_wave(g, &[-12]).unwrap().scale(Complex64::new(0.5, 0.5));
    assert_eq!(modulation_norm(&Field::zeros(g), NormParams::new(2.0, 2.0, 0.0).unwrap()), 0.0);
    for (p, q, s) in [(2.0, 2.0, 0.0), (4.0, 1.5, 1.0), (1.0, f64::INFINITY, -0.5), (6.0, 1.2, 2.0)] {
        let m = modulation_norm(&f, NormParams::new(p, q, s).unwrap());
        let want = (10.0f64).powf(s / 2.0) * lp_norm(&f, p);
        assert_relative_eq!(m, want, max_relative = 1e-12);
    }
}

#[test]
fn single_box_embedding_ratio_is_at_most_one() {
    let g = GridSpec::new(1, 64, 4).unwrap();
    let f = Field::plane_wave(g, &[8]).unwrap();
    for p in [2.0, 3.0, 4.0, 6.0] {
        assert!(embedding_ratio(&f, p).unwrap() <= 1.0 + 1e-10);
    }
    assert!(matches!(embedding_ratio(&Field::zeros(g), 4.0), Err(Error::Undefined(_))));
}

#[test]
fn bessel_potential_properties() {
    let g = GridSpec::new(1, 64, 4).unwrap();
    let f = band_limited(g, 6.0, 9);
    let same = bessel_potential(&f, 0.0);
    assert!(same.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs());
    let back = bessel_potential(&bessel_potential(&f, 1.7), -1.7);
    assert!(back.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs());
    let mode = Field::plane_wave(g, &[10]).unwrap();
    let scaled = bessel_potential(&mode, 2.0);
    let factor = 1.0 + 2.5 * 2.5;
    assert!(scaled.sub(&mode.scale_real(factor)).unwrap().max_abs() < 1e-12 * factor);
}

#[test]
fn calibrated_constants_hold_for_fresh_fields() {
    let cal = calibration_fixture();
    let tol = 0.05;
    let s0 = cal.modulation_over_sobolev_s0.widened(tol);
    let s1 = cal.modulation_over_sobolev_s1.widened(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(cal.seed ^ 0x9e37_79b9_7f4a_7c15);
    let e = cal.embedding_for(4.0).expect("p = 4 calibrated");
    let bessel = e.bessel.widened(tol);
    for _ in 0..200 {
        let f = kgmod::norms::random_field(cal.grid, &cal.fields, &mut rng).unwrap();
        let r0 = modulation_norm(&f, NormParams::new(2.0, 2.0, 0.0).unwrap()) / sobolev_norm(&f, 0.0);
        let r1 = modulation_norm(&f, NormParams::new(2.0, 2.0, 1.0).unwrap()) / sobolev_norm(&f, 1.0);
        assert!(s0.contains(r0) && s1.contains(r1), "{r0} {r1}");
        assert!(embedding_ratio(&f, 4.0).unwrap() <= e.embedding.max * (1.0 + tol));
        let iso = modulation_norm(&bessel_potential(&f, 1.0), NormParams::dual_pair(4.0, 0.0).unwrap())
            / modulation_norm(&f, NormParams::dual_pair(4.0, 1.0).unwrap());
        assert!(bessel.contains(iso), "{iso}");
    }
}

#[test]
fn calibration_is_reproducible_and_refinement_stable() {
    let fixture = calibration_fixture();
    let samples = 100;
    let coarse = calibrate(fixture.grid, 3, samples, fixture.fields, &[4.0]).unwrap();
    let again = calibrate(fixture.grid, 3, samples, fixture.fields, &[4.0]).unwrap();
    assert_eq!(coarse, again);
    let fine_grid = GridSpec::new(1, 2 * fixture.grid.n(), fixture.grid.period_scale()).unwrap();
    let fine = calibrate(fine_grid, 3, samples, fixture.fields, &[4.0]).unwrap();
    assert!(coarse.modulation_over_sobolev_s0.relative_change(&fine.modulation_over_sobolev_s0) <= 0.05);
    assert!(coarse.modulation_over_sobolev_s1.relative_change(&fine.modulation_over_sobolev_s1) <= 0.05);
    let (a, b) = (coarse.embedding[0].embedding.max, fine.embedding[0].embedding.max);
    assert!(((a - b) / a).abs() <= 0.05);
}

#[test]
fn fixture_matches_its_generator() {
    let fixture = calibration_fixture();
    assert_eq!(fixture.samples, 1000);
    let ps: Vec<f64> = fixture.embedding.iter().map(|e| e.p).collect();
    let fresh = calibrate(fixture.grid, fixture.seed, 50, fixture.fields, &ps).unwrap();
    // a prefix of the sweep stays inside the full sweep's range
    assert!(fresh.modulation_over_sobolev_s0.min >= fixture.modulation_over_sobolev_s0.min);
    assert!(fresh.modulation_over_sobolev_s0.max <= fixture.modulation_over_sobolev_s0.max);
}

fn pair_strategy() -> impl Strategy<Value = (Field, Field)> {
    let g = GridSpec::new(1, 32, 2).unwrap();
    (any::<u64>(), any::<u64>(), 1.0f64..7.0)
        .prop_map(move |(a, b, band)| (band_limited(g, band, a), band_limited(g, band, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn modulation_norm_is_a_norm((f, g) in pair_strategy(), c in -5.0f64..5.0, p in 1.0f64..8.0, q in 1.0f64..8.0, s in -1.0f64..2.0) {
        let np = NormParams::new(p, q, s).unwrap();
        let nf = modulation_norm(&f, np);
        let ng = modulation_norm(&g, np);
        let sum = modulation_norm(&f.add(&g).unwrap(), np);
        prop_assert!(sum <= (nf + ng) * (1.0 + 1e-12));
        let scaled = modulation_norm(&f.scale(Complex64::new(c, 0.3 * c)), np);
        prop_assert!((scaled - c.abs() * (1.09f64).sqrt() * nf).abs() <= 1e-10 * nf.max(1e-300) * c.abs().max(1.0));
    }

    #[test]
    fn modulation_norm_is_monotone_in_weight((f, _) in pair_strategy(), p in 1.0f64..8.0, s1 in -2.0f64..2.0, ds in 0.0f64..2.0) {
        let q = conjugate(p.max(1.01));
        let a = modulation_norm(&f, NormParams::new(p, q, s1).unwrap());
        let b = modulation_norm(&f, NormParams::new(p, q, s1 + ds).unwrap());
        prop_assert!(a <= b * (1.0 + 1e-12));
    }
}
