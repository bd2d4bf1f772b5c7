use nearfocus_core::beamforming::mrt_weights;
use nearfocus_core::channel::{steering_vector, wavelength_for, GainModel};
use nearfocus_core::field::{evaluate_field, FieldEvaluator, FieldMap};
use nearfocus_core::geometry::{ArrayPlane, Point3, SamplingGrid, UniformPlanarArray};
use nearfocus_core::metrics::{bfr, hpbw, mrt_profile, size_tradeoff, spacing_tradeoff, ProfileLine, ProfileMode};

const DFP4: Point3 = Point3 { x: 0.0, y: 1.0, z: -0.5 };

fn elaa(side: usize, spacing: f64) -> UniformPlanarArray {
    UniformPlanarArray::square(side, spacing, wavelength_for(28e9)).unwrap()
}

/// Half-power width along y through `dfp` located by bisection on the
/// continuous field, independent of the sampled profile.
fn hpbw_bisection(array: &UniformPlanarArray, dfp: Point3) -> f64 {
    let gain = GainModel::InverseDistance;
    let a = steering_vector(array, dfp, gain).unwrap();
    let eval = FieldEvaluator::new(array, &mrt_weights(&a, false), gain).unwrap();
    let f = |t: f64| eval.power(&Point3::new(dfp.x, dfp.y + t, dfp.z)).unwrap();
    // Locate the peak near the focal point by golden-section search.
    let (mut lo, mut hi) = (-0.2, 0.05);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t0 = 0.5 * (lo + hi);
    let half = f(t0) / 2.0;
    let cross = |dir: f64| {
        let mut step = 0.001;
        while f(t0 + dir * step) > half {
            step += 0.001;
        }
        let (mut inside, mut outside) = (step - 0.001, step);
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if f(t0 + dir * mid) > half {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    cross(-1.0) + cross(1.0)
}

#[test]
fn fig4a_hpbw_matches_paper_and_oracle() {
    let line = ProfileLine::default();
    for (spacing, paper_cm) in [(0.5, 8.5), (1.0, 4.9)] {
        let array = elaa(60, spacing);
        let (pos, pow) = mrt_profile(&array, DFP4, &line, GainModel::InverseDistance).unwrap();
        let got = hpbw(&pos, &pow).unwrap().width_m;
        let oracle = hpbw_bisection(&array, DFP4);
        eprintln!("spacing {spacing}: sampled {:.4} cm, bisection {:.4} cm", got * 100.0, oracle * 100.0);
        assert!((got - oracle).abs() < 2e-4, "sampled {got} vs oracle {oracle}");
        assert!((got * 100.0 - paper_cm).abs() <= 0.15 * paper_cm);
    }
}

#[test]
fn fig4a_spacing_tradeoff() {
    let rows = spacing_tradeoff(
        &elaa(60, 0.5),
        DFP4,
        &[0.5, 1.0, 1.5],
        &ProfileLine::default(),
        GainModel::InverseDistance,
    )
    .unwrap();
    let best = rows.iter().max_by(|a, b| a.dfp_power.total_cmp(&b.dfp_power)).unwrap();
    assert_eq!(best.spacing_wavelengths, 0.5);
    assert_eq!(rows[0].relative_power, 1.0);
    // Unit-norm MRT delivers |a|^2 at the focal point.
    for r in &rows {
        let a = steering_vector(&elaa(60, r.spacing_wavelengths), DFP4, GainModel::InverseDistance).unwrap();
        assert!((r.dfp_power - a.norm() * a.norm()).abs() <= 1e-12 * r.dfp_power);
    }
    let drop_pp = (1.0 - rows[1].relative_power) * 100.0;
    eprintln!("drop 0.5 -> 1: {drop_pp:.3} pp");
    assert!((drop_pp - 4.0).abs() <= 3.0);
    assert!(rows.windows(2).all(|w| w[1].hpbw_m < w[0].hpbw_m));
}

#[test]
fn fig4b_size_tradeoff() {
    let sides = [10usize, 20, 30, 40, 50, 60];
    let rows = size_tradeoff(&elaa(2, 0.5), DFP4, &sides, &ProfileLine::default(), GainModel::InverseDistance).unwrap();
    let widths: Vec<f64> = rows.iter().map(|r| r.hpbw.as_ref().unwrap().width_m).collect();
    eprintln!("fig4b widths {widths:?}");
    assert!(widths.windows(2).all(|w| w[1] < w[0]));
    let (pos, pow) = mrt_profile(&elaa(60, 0.5), DFP4, &ProfileLine::default(), GainModel::InverseDistance).unwrap();
    assert_eq!(widths[5], hpbw(&pos, &pow).unwrap().width_m);
}

#[test]
fn single_element_has_no_half_power_crossing() {
    let rows = size_tradeoff(
        &elaa(2, 0.5),
        DFP4,
        &[1],
        &ProfileLine {
            mode: ProfileMode::Axis(Point3::X),
            half_length_m: 0.05,
            samples: 101,
        },
        GainModel::Unit,
    )
    .unwrap();
    assert!(rows[0].hpbw.is_err());
}

/// Independent BFR: bin power by distance and accumulate.
fn bfr_oracle(map: &FieldMap, dfp: Point3, eta: f64) -> f64 {
    let grid = map.grid();
    let mut pairs: Vec<(f64, f64)> = (0..grid.len())
        .map(|i| (grid.point(i).distance(&dfp), map.power()[i]))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = map.power().iter().sum();
    let mut acc = 0.0;
    for (d, p) in pairs {
        acc += p;
        if acc >= eta * total {
            return d;
        }
    }
    f64::INFINITY
}

fn transverse_map(side: usize) -> FieldMap {
    let array = elaa(side, 0.5);
    let dfp = Point3::new(0.0, 1.0, 0.0);
    let grid = SamplingGrid::window(
        Point3::new(0.0, 1.0, 0.0),
        (Point3::X, -0.5, 0.5),
        (Point3::Z, -0.5, 0.5),
        101,
    )
    .unwrap();
    let a = steering_vector(&array, dfp, GainModel::InverseDistance).unwrap();
    evaluate_field(&array, &mrt_weights(&a, false), &grid, GainModel::InverseDistance).unwrap()
}

#[test]
fn fig1b_bfr_contrast() {
    let dfp = Point3::new(0.0, 1.0, 0.0);
    let small = transverse_map(6);
    let large = transverse_map(60);
    let (bs, bl) = (bfr(&small, dfp, 0.9).unwrap(), bfr(&large, dfp, 0.9).unwrap());
    assert_eq!(bs.radius_m, bfr_oracle(&small, dfp, 0.9));
    assert_eq!(bl.radius_m, bfr_oracle(&large, dfp, 0.9));
    eprintln!("BFR 6x6 {:.4} m, 60x60 {:.4} m", bs.radius_m, bl.radius_m);
    assert!(bl.radius_m < 0.5 * bs.radius_m);
    assert!(large.max_power() > small.max_power());
}

#[test]
fn hpbw_invariant_under_rigid_rotation() {
    // Same scenario with the aperture on the xy plane: (x, y, z) -> (x, z, y).
    let lambda = wavelength_for(28e9);
    let xz = UniformPlanarArray::new(30, 30, lambda / 2.0, Point3::ORIGIN, ArrayPlane::XZ, lambda).unwrap();
    let xy = UniformPlanarArray::new(30, 30, lambda / 2.0, Point3::ORIGIN, ArrayPlane::XY, lambda).unwrap();
    let line1 = ProfileLine::default();
    let line2 = ProfileLine {
        mode: ProfileMode::Axis(Point3::Z),
        ..line1
    };
    let (p1, w1) = mrt_profile(&xz, DFP4, &line1, GainModel::InverseDistance).unwrap();
    let (p2, w2) = mrt_profile(&xy, Point3::new(0.0, -0.5, 1.0), &line2, GainModel::InverseDistance).unwrap();
    let (h1, h2) = (hpbw(&p1, &w1).unwrap(), hpbw(&p2, &w2).unwrap());
    let cell = 1.0 / 1000.0;
    assert!((h1.width_m - h2.width_m).abs() <= 2.0 * cell);
}
