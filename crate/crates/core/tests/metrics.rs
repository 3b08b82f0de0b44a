use num_complex::Complex64;
use polyannulus::metrics::*;
use polyannulus::{acm, synth, PlanarMesh, TriMesh};
use proptest::prelude::*;

fn corner_angle(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    // law of cosines
    let (x, y, z) = ((a - b).norm(), (c - b).norm(), (a - c).norm());
    ((x * x + y * y - z * z) / (2.0 * x * y)).acos().to_degrees()
}

#[test]
fn stretched_equilateral_triangle() {
    let s3 = 3f64.sqrt();
    let tri = TriMesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, s3 / 2.0, 0.0]], vec![[0, 1, 2]]).unwrap();
    let z = [Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, s3 / 2.0)];
    let uv = PlanarMesh::on(&tri, z.to_vec()).unwrap();
    let d = angular_distortion(&tri, &uv).unwrap();
    let expected: Vec<f64> = (0..3)
        .map(|c| corner_angle(z[(c + 2) % 3], z[c], z[(c + 1) % 3]) - 60.0)
        .collect();
    for (got, want) in d.values().zip(&expected) {
        assert!((got - want).abs() < 1e-10, "{got} {want}");
    }
    assert!((expected[2] - (2.0 * (2.0 / s3).atan().to_degrees() - 60.0)).abs() < 1e-10);
}

#[test]
fn identity_and_reflection_reports() {
    let m = synth::flat_annulus(0.4, 4, 24);
    let uv = PlanarMesh::from_xy(&m);
    let r = full_report(&m, &uv).unwrap();
    assert!(r.mean_abs_d < 1e-10 && r.mean_abs_mu < 1e-12 && r.flips == 0);
    assert!(r.area_distortion < 1e-12);
    assert_eq!(r.angle_hist.iter().sum::<usize>(), 3 * m.num_faces());

    let flipped = full_report(&m, &uv.map(|z| z.conj())).unwrap();
    assert_eq!(flipped.flips, m.num_faces());
}

#[test]
fn report_json_field_names() {
    let m = synth::flat_annulus(0.4, 3, 16);
    let r = full_report(&m, &PlanarMesh::from_xy(&m).map(|z| z * z.norm())).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "angle_hist",
            "area_distortion",
            "clamped_faces",
            "excluded_corners",
            "flips",
            "max_abs_mu",
            "mean_abs_d",
            "mean_abs_mu"
        ]
    );
    assert_eq!(r.angle_hist.len(), HISTOGRAM_BINS);
}

#[test]
fn degenerate_corners_are_excluded() {
    let tri = TriMesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], vec![[0, 1, 2]]).unwrap();
    let uv = PlanarMesh::on(&tri, vec![Complex64::new(0.0, 0.0); 3]).unwrap();
    let d = angular_distortion(&tri, &uv).unwrap();
    assert_eq!(d.excluded, 3);
    assert_eq!(d.mean_abs(), 0.0);
    assert_eq!(d.histogram().iter().sum::<usize>(), 0);
}

#[test]
fn pipeline_output_report_is_finite() {
    let m = synth::bumpy_annulus(48);
    let r = full_report(&m, &acm(&m).unwrap().uv).unwrap();
    assert_eq!(r.flips, 0);
    for x in [r.mean_abs_d, r.mean_abs_mu, r.max_abs_mu, r.area_distortion] {
        assert!(x.is_finite() && x >= 0.0);
    }
    assert!(r.magnification.iter().zip(&r.shrinkage).all(|(a, b)| a >= b && *b > 0.0));
}

fn warp(z: Complex64, a: f64, b: f64) -> Complex64 {
    z + a * z * z + b * z.conj()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn similarity_invariance(s in 0.1f64..10.0, t in 0.0f64..6.28, dx in -5.0f64..5.0, dy in -5.0f64..5.0, a in -0.2f64..0.2, b in -0.2f64..0.2) {
        let m = synth::lift(&synth::flat_annulus(0.4, 3, 20), |x, y| 0.2 * x * y);
        let uv = PlanarMesh::from_xy(&m).map(|z| warp(z, a, b));
        let moved = uv.map(|z| z * Complex64::from_polar(s, t) + Complex64::new(dx, dy));
        let (r1, r2) = (full_report(&m, &uv).unwrap(), full_report(&m, &moved).unwrap());
        for (x, y) in r1.angle_d.iter().zip(&r2.angle_d) {
            prop_assert!((x.unwrap() - y.unwrap()).abs() < 1e-8);
        }
        prop_assert!((r1.mean_abs_mu - r2.mean_abs_mu).abs() < 1e-10);
        prop_assert!((r1.area_distortion - r2.area_distortion).abs() < 1e-10);
        prop_assert_eq!(r1.flips, r2.flips);
    }

    #[test]
    fn swapping_roles_negates_d(a in -0.2f64..0.2, b in -0.2f64..0.2) {
        let m = synth::flat_annulus(0.4, 3, 20);
        let uv = PlanarMesh::from_xy(&m).map(|z| warp(z, a, b));
        let other = TriMesh::from_planar(&uv).unwrap();
        let d1 = angular_distortion(&m, &uv).unwrap();
        let d2 = angular_distortion(&other, &PlanarMesh::from_xy(&m)).unwrap();
        for (x, y) in d1.values().zip(d2.values()) {
            prop_assert!((x + y).abs() < 1e-9);
        }
    }

    #[test]
    fn face_angle_differences_cancel(a in -0.2f64..0.2, b in -0.2f64..0.2) {
        let m = synth::flat_annulus(0.5, 2, 16);
        let d = angular_distortion(&m, &PlanarMesh::from_xy(&m).map(|z| warp(z, a, b))).unwrap();
        for f in d.d.chunks(3) {
            prop_assert!(f.iter().map(|x| x.unwrap()).sum::<f64>().abs() < 1e-9);
        }
        prop_assert_eq!(d.histogram().iter().sum::<usize>(), 3 * m.num_faces());
    }
}
