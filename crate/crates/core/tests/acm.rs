use std::f64::consts::TAU;

use num_complex::Complex64;
use polyannulus::acm::{loop_radii, qc_correct_annulus, CutStart};
use polyannulus::{acm, acm_with, synth, AcmOptions, Error, PlanarMesh, TriMesh};

fn radii_hold(mesh: &TriMesh, r: &polyannulus::AnnulusResult) {
    let outer = loop_radii(&r.uv, &mesh.boundary_loops()[r.outer_loop]);
    let inner = loop_radii(&r.uv, &mesh.boundary_loops()[r.inner_loop]);
    assert!(outer.iter().all(|x| (x - 1.0).abs() < 1e-9));
    assert!(inner.iter().all(|x| (x - r.inner_radius).abs() < 1e-9));
    assert!(((-TAU * r.length).exp() - r.inner_radius).abs() < 1e-15);
}

#[test]
fn flat_annuli_recover_their_modulus() {
    for r in [0.2, 0.35, 0.5] {
        let mesh = synth::flat_annulus_balanced(r, 128);
        let out = acm(&mesh).unwrap();
        radii_hold(&mesh, &out);
        assert!((out.inner_radius - r).abs() / r < 0.01, "{r}: {}", out.inner_radius);
        assert_eq!(out.stages.last().unwrap().flips, 0);
        assert_eq!(
            out.stages.iter().map(|s| s.stage).collect::<Vec<_>>(),
            ["disk", "rectangle", "annulus", "corrected"]
        );
    }
}

#[test]
fn flat_annulus_map_is_a_rotation() {
    let mesh = synth::flat_annulus_balanced(0.35, 128);
    let out = acm(&mesh).unwrap();
    let p = mesh.vertices()[out.seam.p()];
    let rot = Complex64::new(p[0], p[1]) / out.uv.coords[out.seam.p()];
    for (w, q) in out.uv.coords.iter().zip(mesh.vertices()) {
        assert!((w * rot - Complex64::new(q[0], q[1])).norm() < 5e-3);
    }
}

#[test]
fn curved_annulus_is_embedded_and_bounded() {
    let mesh = synth::bumpy_annulus(64);
    let out = acm(&mesh).unwrap();
    radii_hold(&mesh, &out);
    let last = out.stages.last().unwrap();
    assert_eq!(last.flips, 0);
    assert!(last.max_abs_mu < 1.0);
}

#[test]
fn acm_is_idempotent() {
    let mesh = synth::bumpy_annulus(64);
    let first = acm(&mesh).unwrap();
    let again = acm(&TriMesh::from_planar(&first.uv).unwrap()).unwrap();
    assert!((again.inner_radius - first.inner_radius).abs() / first.inner_radius < 0.01);
}

#[test]
fn modulus_is_similarity_invariant() {
    let mesh = synth::bumpy_annulus(48);
    let m = synth::rotation([0.6, 0.0, 0.8], 0.8);
    let scaled = m.map(|row| row.map(|x| 3.0 * x));
    let moved = synth::transform(&mesh, scaled);
    let a = acm(&mesh).unwrap().inner_radius;
    let b = acm(&moved).unwrap().inner_radius;
    assert!((a - b).abs() < 1e-6, "{a} {b}");
}

#[test]
fn lowest_index_start_is_available() {
    let mesh = synth::flat_annulus_balanced(0.4, 64);
    let out = acm_with(&mesh, &AcmOptions { start: CutStart::LowestIndex, ..Default::default() }).unwrap();
    let inner = &mesh.boundary_loops()[out.inner_loop];
    assert_eq!(out.seam.p(), *inner.iter().min().unwrap());
    radii_hold(&mesh, &out);
}

#[test]
fn skip_correction_leaves_three_stages() {
    let mesh = synth::flat_annulus_balanced(0.4, 48);
    let out = acm_with(&mesh, &AcmOptions { skip_correction: true, ..Default::default() }).unwrap();
    assert_eq!(out.stages.len(), 3);
}

#[test]
fn wrong_loop_count_is_topology_error() {
    for mesh in [synth::unit_disk(4, 24), synth::bumpy_three_holes(0.1)] {
        assert!(matches!(acm(&mesh), Err(Error::Topology(_))));
    }
}

#[test]
fn planar_input_round_trip() {
    let mesh = synth::flat_annulus_balanced(0.5, 48);
    let uv = PlanarMesh::from_xy(&mesh);
    let back = TriMesh::from_planar(&uv).unwrap();
    assert_eq!(back.faces(), mesh.faces());
}

#[test]
fn annulus_correction_cancels_interior_twist() {
    let mesh = synth::bumpy_annulus(96);
    assert!(mesh.num_faces() >= 2000);
    let out = acm(&mesh).unwrap();
    let r = out.inner_radius;
    let twist = |amount: f64| {
        out.uv.map(|z| {
            let t = (z.norm() - r) / (1.0 - r);
            z * Complex64::from_polar(1.0, amount * (std::f64::consts::PI * t).sin())
        })
    };
    let mean = |uv: &PlanarMesh| polyannulus::acm::StageRecord::measure("", &mesh, uv).unwrap().mean_abs_mu;
    let bent = twist(0.3);
    let fixed = qc_correct_annulus(&mesh, &bent).unwrap();
    assert!(mean(&fixed) <= 0.5 * mean(&bent), "{} {}", mean(&bent), mean(&fixed));
    for l in mesh.boundary_loops() {
        for &v in l {
            assert!((fixed.coords[v] - bent.coords[v]).norm() < 1e-12);
        }
    }
    let other = qc_correct_annulus(&mesh, &twist(-0.2)).unwrap();
    for (a, b) in fixed.coords.iter().zip(&other.coords) {
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn annulus_correction_keeps_conformal_input() {
    let mesh = synth::flat_annulus_balanced(0.4, 64);
    let uv = PlanarMesh::from_xy(&mesh);
    let out = qc_correct_annulus(&mesh, &uv).unwrap();
    for (a, b) in out.coords.iter().zip(&uv.coords) {
        assert!((a - b).norm() < 1e-9);
    }
}
