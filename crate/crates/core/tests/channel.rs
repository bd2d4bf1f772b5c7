use nearfocus_core::beamforming::{focal_power, mrt_weights, multi_focal_weights, quantize_phases, BeamWeights};
use nearfocus_core::channel::{
    correlation, fraunhofer_distance, orthogonality_profile, steering_vector, wavelength_for, GainModel,
};
use nearfocus_core::geometry::{Point3, UniformPlanarArray};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

fn lambda() -> f64 {
    299_792_458.0 / 28e9
}

fn elaa(side: usize) -> UniformPlanarArray {
    UniformPlanarArray::square(side, 0.5, wavelength_for(28e9)).unwrap()
}

/// Element positions rebuilt from the grid formula, independent of the library.
fn scalar_positions(side: usize, spacing: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let c = (side as f64 - 1.0) / 2.0;
    for i in 0..side {
        for j in 0..side {
            out.push(((i as f64 - c) * spacing, 0.0, (j as f64 - c) * spacing));
        }
    }
    out
}

/// Brute-force phase-only correlation from scalar distances.
fn correlation_oracle(side: usize, r1: (f64, f64, f64), r2: (f64, f64, f64)) -> f64 {
    let lam = lambda();
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y, z) in scalar_positions(side, lam / 2.0) {
        let d1 = ((r1.0 - x).powi(2) + (r1.1 - y).powi(2) + (r1.2 - z).powi(2)).sqrt();
        let d2 = ((r2.0 - x).powi(2) + (r2.1 - y).powi(2) + (r2.2 - z).powi(2)).sqrt();
        let phi = -2.0 * PI * (d1 - d2) / lam;
        re += phi.cos();
        im += phi.sin();
    }
    (re * re + im * im).sqrt() / (side * side) as f64
}

#[test]
fn steering_vector_matches_scalar_recomputation() {
    let lam = lambda();
    let arr = elaa(60);
    let point = Point3::new(0.0, 1.0, 0.0);
    for gain in [GainModel::Unit, GainModel::InverseDistance] {
        let a = steering_vector(&arr, point, gain).unwrap();
        assert_eq!(a.len(), 3600);
        for (n, (x, y, z)) in scalar_positions(60, lam / 2.0).into_iter().enumerate() {
            let d = (x * x + (1.0 - y).powi(2) + z * z).sqrt();
            assert!((a.distances_m()[n] - d).abs() <= 1e-12 * d);
            let g = match gain {
                GainModel::Unit => 1.0,
                GainModel::InverseDistance => lam / (4.0 * PI * d),
            };
            let expected = Complex64::new((2.0 * PI * d / lam).cos(), -(2.0 * PI * d / lam).sin()) * g;
            let got = a.entries()[n];
            assert!((got - expected).norm() <= 1e-12 * expected.norm(), "element {n}");
        }
    }
}

#[test]
fn phase_tracks_distance() {
    let arr = elaa(20);
    let a = steering_vector(&arr, Point3::new(0.2, 0.8, -0.1), GainModel::InverseDistance).unwrap();
    for (x, d) in a.entries().iter().zip(a.distances_m()) {
        let r = x.arg() + 2.0 * PI * d / a.wavelength_m();
        let wrapped = r - 2.0 * PI * (r / (2.0 * PI)).round();
        assert!(wrapped.abs() < 1e-9);
        assert!(x.norm() > 0.0 && x.norm().is_finite());
    }
}

#[test]
fn fraunhofer_of_elaa() {
    let df = fraunhofer_distance(&elaa(60));
    let d = 59.0 * lambda() / 2.0 * 2f64.sqrt();
    assert!((df - 2.0 * d * d / lambda()).abs() < 1e-9);
    assert!((df - 37.3).abs() < 0.05);
    assert!(Point3::new(0.0, 1.0, -0.5).norm() < df);
}

#[test]
fn correlation_decays_with_array_size() {
    let r1 = Point3::new(0.0, 1.0, 0.0);
    let r2 = Point3::new(0.3, 1.0, 0.0);
    let small = correlation_oracle(6, (0.0, 1.0, 0.0), (0.3, 1.0, 0.0));
    let large = correlation_oracle(60, (0.0, 1.0, 0.0), (0.3, 1.0, 0.0));
    let lib_small = correlation(
        &steering_vector(&elaa(6), r1, GainModel::Unit).unwrap(),
        &steering_vector(&elaa(6), r2, GainModel::Unit).unwrap(),
    )
    .unwrap();
    let lib_large = correlation(
        &steering_vector(&elaa(60), r1, GainModel::Unit).unwrap(),
        &steering_vector(&elaa(60), r2, GainModel::Unit).unwrap(),
    )
    .unwrap();
    assert!((lib_small - small).abs() < 1e-10);
    assert!((lib_large - large).abs() < 1e-10);
    assert!(large < small);
    assert!(large < 0.1, "correlation {large}");
}

#[test]
fn orthogonality_profile_trend() {
    let r1 = Point3::new(0.0, 1.0, 0.0);
    let r2 = Point3::new(0.3, 1.0, 0.0);
    let prof = orthogonality_profile(&elaa(2), r1, r2, &[(6, 6), (20, 20), (60, 60)]).unwrap();
    assert_eq!(prof.iter().map(|p| p.0).collect::<Vec<_>>(), vec![36, 400, 3600]);
    assert!(prof[2].1 < prof[0].1);
    assert!((prof[1].1 - correlation_oracle(20, (0.0, 1.0, 0.0), (0.3, 1.0, 0.0))).abs() < 1e-10);
}

#[test]
fn far_field_has_no_radial_discrimination() {
    let dir = Point3::new(0.3, 1.0, 0.2).normalized().unwrap();
    let prof = orthogonality_profile(&elaa(6), dir * 100.0, dir * 200.0, &[(6, 6)]).unwrap();
    assert!(prof[0].1 > 0.99, "{}", prof[0].1);
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

#[test]
fn mrt_beats_random_phase_draws() {
    let arr = elaa(60);
    let a = steering_vector(&arr, Point3::new(0.0, 1.0, 0.0), GainModel::InverseDistance).unwrap();
    let best = a.response(mrt_weights(&a, false).weights()).unwrap().norm();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let scale = 1.0 / 60.0;
    for _ in 0..1000 {
        let w: Vec<Complex64> = (0..3600)
            .map(|_| Complex64::from_polar(scale, rng.random_range(0.0..2.0 * PI)))
            .collect();
        assert!(a.response(&w).unwrap().norm() < best);
    }
}

#[test]
fn mrt_is_optimal_among_unit_norm_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for side in [1usize, 2, 4, 8, 16] {
        let arr = elaa(side);
        let a = steering_vector(&arr, Point3::new(0.1, 0.9, -0.2), GainModel::InverseDistance).unwrap();
        let w = mrt_weights(&a, false);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let best = a.response(w.weights()).unwrap().norm();
        // Cauchy-Schwarz: |a^T w| <= |a| for unit-norm w.
        assert!((best - a.norm()).abs() <= 1e-12 * a.norm());
        let draws = if side == 1 { 100 } else { 10_000 };
        for _ in 0..draws {
            let r = random_unit(&mut rng, side * side);
            assert!(a.response(&r).unwrap().norm() <= best * (1.0 + 1e-12));
        }
    }
}

#[test]
fn mrt_phases_cancel_channel_phases() {
    let arr = elaa(8);
    let a = steering_vector(&arr, Point3::new(0.0, 0.5, 0.1), GainModel::InverseDistance).unwrap();
    for phase_only in [false, true] {
        let w = mrt_weights(&a, phase_only);
        for (x, y) in a.entries().iter().zip(w.weights()) {
            assert!((x * y).arg().abs() < 1e-12);
        }
        assert!((w.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn quantization_ratios() {
    let arr = elaa(60);
    let a = steering_vector(&arr, Point3::new(0.0, 1.0, 0.0), GainModel::InverseDistance).unwrap();
    let w = mrt_weights(&a, false);
    let full = focal_power(&a, &w).unwrap();
    let q4 = focal_power(&a, &quantize_phases(&w, 4).unwrap()).unwrap() / full;
    let q1 = focal_power(&a, &quantize_phases(&w, 1).unwrap()).unwrap() / full;
    eprintln!("4-bit ratio {q4:.6}, 1-bit ratio {q1:.6}");
    assert!((0.95..=1.0).contains(&q4));
    assert!(q1 >= 0.3 && q1 < q4);
}

#[test]
fn quantized_weights_are_on_grid_and_idempotent() {
    let arr = elaa(8);
    let a = steering_vector(&arr, Point3::new(0.2, 0.7, 0.0), GainModel::Unit).unwrap();
    let w = mrt_weights(&a, false);
    for bits in 1..=6u32 {
        let q = quantize_phases(&w, bits).unwrap();
        assert_eq!(q.phase_bits(), Some(bits));
        let step = 2.0 * PI / f64::from(1u32 << bits);
        for (x, y) in w.weights().iter().zip(q.weights()) {
            let k = y.arg() / step;
            assert!((k - k.round()).abs() < 1e-9);
            assert!((x.norm() - y.norm()).abs() < 1e-15);
            let err = (y / x).arg().abs();
            assert!(err <= PI / f64::from(1u32 << bits) + 1e-12);
        }
        let again = quantize_phases(&q, bits).unwrap();
        for (x, y) in q.weights().iter().zip(again.weights()) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}

#[test]
fn multi_focal_cross_term_shrinks_with_size() {
    let r1 = Point3::new(0.0, 1.0, 0.0);
    let r2 = Point3::new(0.3, 1.0, 0.0);
    let cross = |side: usize| {
        let arr = elaa(side);
        let a1 = steering_vector(&arr, r1, GainModel::Unit).unwrap();
        let a2 = steering_vector(&arr, r2, GainModel::Unit).unwrap();
        let w = multi_focal_weights(&[a1, a2.clone()], &[0.5, 0.5]).unwrap();
        assert_eq!(w.rf_chains(), 2);
        // Chain 0 points at r1; its leakage towards r2 relative to N.
        let chain = BeamWeights::single(w.per_chain()[0].clone());
        let n = (side * side) as f64;
        a2.response(chain.weights()).unwrap().norm() / (0.5f64.sqrt() / n.sqrt()) / n
    };
    let small = cross(6);
    let large = cross(60);
    assert!((small - correlation_oracle(6, (0.0, 1.0, 0.0), (0.3, 1.0, 0.0))).abs() < 1e-10);
    assert!(large < small);
}

#[test]
fn combined_weights_are_chain_sums() {
    let arr = elaa(10);
    let a: Vec<_> = [Point3::new(-0.2, 1.0, 0.0), Point3::new(0.2, 1.0, 0.1), Point3::new(0.0, 0.6, 0.0)]
        .iter()
        .map(|&p| steering_vector(&arr, p, GainModel::InverseDistance).unwrap())
        .collect();
    let w = multi_focal_weights(&a, &[0.2, 0.3, 0.5]).unwrap();
    for n in 0..w.len() {
        let s: Complex64 = w.per_chain().iter().map(|c| c[n]).sum();
        assert!((s - w.weights()[n]).norm() <= 1e-12);
    }
    for (c, p) in w.per_chain().iter().zip([0.2, 0.3, 0.5]) {
        let norm2: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        assert!((norm2 - p).abs() < 1e-12);
    }
}
