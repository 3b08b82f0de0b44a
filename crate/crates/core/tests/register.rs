use polyannulus::register::{register, register_domains};
use polyannulus::{pacm, synth, Error, TriMesh};

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[test]
fn self_registration_is_identity() {
    let m = synth::bumpy_three_holes(0.05);
    let d = pacm(&m).unwrap();
    let pairs: Vec<_> = d.hole_loops.iter().map(|&h| (h, h)).collect();
    let r = register_domains(&m, &d, &m, &d, &pairs).unwrap();
    let worst = r.points.iter().zip(m.vertices()).map(|(a, b)| dist(*a, *b)).fold(0.0, f64::max);
    assert!(worst < 0.01 * m.bbox_diagonal(), "{worst}");
    assert!(r.rotation.abs() < 1e-9);
}

#[test]
fn swapping_symmetric_holes_gives_the_symmetry() {
    // invariant under the half turn (x, y) -> (-x, -y)
    let flat = synth::disk_with_holes(&[(0.4, 0.0, 0.15), (-0.4, 0.0, 0.15)], 0.04, 0.0);
    let m = synth::lift(&flat, |x, y| 0.2 * (x * x - y * y) + 0.1 * (2.0 * x * y).sin());
    let d = pacm(&m).unwrap();
    let (a, b) = (d.hole_loops[0], d.hole_loops[1]);
    let r = register_domains(&m, &d, &m, &d, &[(a, b), (b, a)]).unwrap();
    let worst = r
        .points
        .iter()
        .zip(m.vertices())
        .map(|(p, q)| dist(*p, [-q[0], -q[1], q[2]]))
        .fold(0.0, f64::max);
    assert!(worst < 0.02 * m.bbox_diagonal(), "{worst}");
}

#[test]
fn hole_count_mismatch_is_argument_error() {
    let two = synth::disk_with_holes(&[(0.4, 0.0, 0.15), (-0.4, 0.0, 0.15)], 0.08, 0.0);
    let three = synth::bumpy_three_holes(0.1);
    assert!(matches!(register(&two, &three, &[]), Err(Error::Argument(_))));
}

#[test]
fn non_bijective_correspondence_is_argument_error() {
    let m: TriMesh = synth::disk_with_holes(&[(0.4, 0.0, 0.15), (-0.4, 0.0, 0.15)], 0.08, 0.0);
    let d = pacm(&m).unwrap();
    let h = d.hole_loops[0];
    assert!(matches!(register_domains(&m, &d, &m, &d, &[(h, h), (h, h)]), Err(Error::Argument(_))));
}
