//! Synthetic meshes with known conformal structure, used as fixtures.

use std::f64::consts::TAU;

use delaunator::{triangulate, Point};

use crate::mesh::{Face, Point3, TriMesh};

/// Ring-by-segment grid of a flat annulus with inner radius `inner` and outer
/// radius 1. Radii are log-spaced so the cells are close to similar.
///
/// Vertex `(ring, seg)` has id `ring * segments + seg`; ring 0 is the inner
/// circle. Faces come in pairs per cell, cell `(ring, seg)` owning faces
/// `2 * (ring * segments + seg)` and the next one.
pub fn flat_annulus(inner: f64, rings: usize, segments: usize) -> TriMesh {
    let radii: Vec<f64> = (0..=rings)
        .map(|i| inner.powf((rings - i) as f64 / rings as f64))
        .collect();
    polar_grid(radii.len(), segments, |i, t| [radii[i] * t.cos(), radii[i] * t.sin(), 0.0])
}

/// Annulus grid with ring count chosen so cells are close to square.
pub fn flat_annulus_balanced(inner: f64, segments: usize) -> TriMesh {
    let rings = ((-inner.ln()) * segments as f64 / TAU).round().max(1.0) as usize;
    flat_annulus(inner, rings, segments)
}

fn polar_grid(rings: usize, segments: usize, place: impl Fn(usize, f64) -> Point3) -> TriMesh {
    let mut v = Vec::with_capacity(rings * segments);
    for i in 0..rings {
        for j in 0..segments {
            v.push(place(i, TAU * j as f64 / segments as f64));
        }
    }
    let id = |i: usize, j: usize| i * segments + (j % segments);
    let mut f = Vec::new();
    for i in 0..rings - 1 {
        for j in 0..segments {
            let (a, b, c, d) = (id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j));
            if (i + j) % 2 == 0 {
                f.push([a, d, c]);
                f.push([a, c, b]);
            } else {
                f.push([a, d, b]);
                f.push([d, c, b]);
            }
        }
    }
    TriMesh::new(v, f).expect("polar grid is a valid annulus")
}

/// Open cylinder of the given radius and height; both boundary loops have the
/// same length.
pub fn cylinder(radius: f64, height: f64, segments: usize, rows: usize) -> TriMesh {
    polar_grid(rows + 1, segments, |i, t| {
        [radius * t.cos(), radius * t.sin(), height * i as f64 / rows as f64]
    })
}

/// Unit disk: a centre vertex and `rings` concentric rings, ring `k` carrying
/// `max(6k, 6)` vertices up to `boundary_segments` on the outer ring.
pub fn unit_disk(rings: usize, boundary_segments: usize) -> TriMesh {
    let mut v: Vec<Point3> = vec![[0.0, 0.0, 0.0]];
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..=rings {
        let n = if k == rings {
            boundary_segments
        } else {
            (6 * k).min(boundary_segments).max(6)
        };
        let r = k as f64 / rings as f64;
        let ids = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                v.push([r * t.cos(), r * t.sin(), 0.0]);
                v.len() - 1
            })
            .collect();
        ring_ids.push(ids);
    }
    let mut f = Vec::new();
    for j in 0..ring_ids[1].len() {
        let r = &ring_ids[1];
        f.push([0, r[j], r[(j + 1) % r.len()]]);
    }
    for k in 1..rings {
        zip_rings(&v, &ring_ids[k], &ring_ids[k + 1], &mut f);
    }
    TriMesh::new(v, f).expect("disk grid is valid")
}

/// Triangulates the band between two concentric rings ordered by angle.
fn zip_rings(v: &[Point3], inner: &[usize], outer: &[usize], f: &mut Vec<Face>) {
    let angle = |id: usize, turn: usize| v[id][1].atan2(v[id][0]).rem_euclid(TAU) + TAU * turn as f64;
    let (ni, no) = (inner.len(), outer.len());
    let (mut i, mut o) = (0usize, 0usize);
    while i < ni || o < no {
        let a = inner[i % ni];
        let b = outer[o % no];
        let next_i = angle(inner[(i + 1) % ni], (i + 1) / ni);
        let next_o = angle(outer[(o + 1) % no], (o + 1) / no);
        if o >= no || (i < ni && next_i <= next_o) {
            f.push([a, b, inner[(i + 1) % ni]]);
            i += 1;
        } else {
            f.push([a, b, outer[(o + 1) % no]]);
            o += 1;
        }
    }
}

/// Unit square `[0,1]^2` as an `n`-by-`n` grid of cells, two triangles each.
pub fn square_grid(n: usize) -> TriMesh {
    rect_grid(1.0, 1.0, n, n)
}

pub fn rect_grid(width: f64, height: f64, nx: usize, ny: usize) -> TriMesh {
    let mut v = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            v.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut f = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if (i + j) % 2 == 0 {
                f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                f.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                f.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    TriMesh::new(v, f).expect("grid is valid")
}

/// Delaunay mesh of the unit disk with circular holes `(cx, cy, r)`, target
/// edge length `spacing`. `wobble` perturbs the outer boundary radially by
/// `1 + wobble * sin(3t)` (0 keeps it round).
pub fn disk_with_holes(holes: &[(f64, f64, f64)], spacing: f64, wobble: f64) -> TriMesh {
    let outer_r = |t: f64| 1.0 + wobble * (3.0 * t).sin();
    let mut pts: Vec<Point> = Vec::new();
    let n_outer = (TAU / spacing).ceil() as usize;
    for j in 0..n_outer {
        let t = TAU * j as f64 / n_outer as f64;
        pts.push(Point {
            x: outer_r(t) * t.cos(),
            y: outer_r(t) * t.sin(),
        });
    }
    for &(cx, cy, r) in holes {
        let n = ((TAU * r / spacing).ceil() as usize).max(12);
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            pts.push(Point {
                x: cx + r * t.cos(),
                y: cy + r * t.sin(),
            });
        }
    }
    // hexagonal lattice, kept clear of the boundaries
    let dy = spacing * 3f64.sqrt() / 2.0;
    let rows = (2.0 * (1.0 + wobble.abs()) / dy).ceil() as i64;
    for row in -rows..=rows {
        let y = row as f64 * dy;
        let shift = if row.rem_euclid(2) == 1 { 0.5 * spacing } else { 0.0 };
        let cols = (2.0 * (1.0 + wobble.abs()) / spacing).ceil() as i64;
        for col in -cols..=cols {
            let x = col as f64 * spacing + shift;
            let (rad, t) = ((x * x + y * y).sqrt(), y.atan2(x));
            if rad > outer_r(t) - 0.7 * spacing {
                continue;
            }
            if holes
                .iter()
                .any(|&(cx, cy, r)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() < r + 0.7 * spacing)
            {
                continue;
            }
            pts.push(Point { x, y });
        }
    }
    let tri = triangulate(&pts);
    let mut faces = Vec::new();
    for t in tri.triangles.chunks(3) {
        let (a, b, c) = (&pts[t[0]], &pts[t[1]], &pts[t[2]]);
        let (gx, gy) = ((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        if (gx * gx + gy * gy).sqrt() > outer_r(gy.atan2(gx)) {
            continue;
        }
        if holes
            .iter()
            .any(|&(cx, cy, r)| (gx - cx).powi(2) + (gy - cy).powi(2) < r * r)
        {
            continue;
        }
        let area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        if area.abs() < 1e-12 * spacing * spacing {
            continue;
        }
        // delaunator emits clockwise triangles
        faces.push([t[0], t[2], t[1]]);
    }
    let v: Vec<Point3> = pts.iter().map(|p| [p.x, p.y, 0.0]).collect();
    TriMesh::new(v, faces).expect("perforated disk is a valid poly-annulus")
}

/// Replaces each vertex's z by `height(x, y)`.
pub fn lift(mesh: &TriMesh, height: impl Fn(f64, f64) -> f64) -> TriMesh {
    let v = mesh
        .vertices()
        .iter()
        .map(|p| [p[0], p[1], height(p[0], p[1])])
        .collect();
    TriMesh::new(v, mesh.faces().to_vec()).expect("lifting keeps connectivity")
}

/// Applies a linear map to every vertex.
pub fn transform(mesh: &TriMesh, m: [[f64; 3]; 3]) -> TriMesh {
    let v = mesh
        .vertices()
        .iter()
        .map(|p| {
            [0, 1, 2].map(|r| m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2])
        })
        .collect();
    TriMesh::new(v, mesh.faces().to_vec()).expect("transform keeps connectivity")
}

/// Rotation about the unit axis `axis` by `angle` radians.
pub fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let [x, y, z] = axis;
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Smooth bumps used by the curved fixtures.
pub fn bumps(x: f64, y: f64) -> f64 {
    0.25 * (2.0 * x).sin() * (1.5 * y).cos() + 0.15 * (-(x - 0.3).powi(2) * 4.0 - (y + 0.2).powi(2) * 4.0).exp()
}

/// Curved annulus of about `segments^2 * 0.17` vertices: a flat annulus with
/// inner radius 0.35 lifted by [`bumps`].
pub fn bumpy_annulus(segments: usize) -> TriMesh {
    lift(&flat_annulus_balanced(0.35, segments), bumps)
}

/// Curved disk with three holes; `spacing` 0.024 gives about 7K vertices.
pub fn bumpy_three_holes(spacing: f64) -> TriMesh {
    let flat = disk_with_holes(
        &[(0.45, 0.1, 0.16), (-0.35, 0.35, 0.13), (-0.15, -0.45, 0.18)],
        spacing,
        0.0,
    );
    lift(&flat, bumps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_layout() {
        let m = flat_annulus(0.3, 4, 16);
        assert_eq!(m.num_vertices(), 5 * 16);
        assert_eq!(m.num_faces(), 2 * 4 * 16);
        assert_eq!(m.boundary_loops().len(), 2);
        assert_eq!(m.boundary_loops()[0].len(), 16);
    }

    #[test]
    fn disk_is_a_disk() {
        let m = unit_disk(6, 48);
        assert_eq!(m.boundary_loops().len(), 1);
        assert_eq!(m.boundary_loops()[0].len(), 48);
        let p = crate::mesh::PlanarMesh::from_xy(&m);
        assert!((0..m.num_faces()).all(|f| p.signed_area(f) > 0.0));
    }

    #[test]
    fn holes_are_counted() {
        let m = disk_with_holes(&[(0.4, 0.0, 0.15), (-0.4, 0.0, 0.15)], 0.08, 0.0);
        assert_eq!(m.boundary_loops().len(), 3);
        let p = crate::mesh::PlanarMesh::from_xy(&m);
        assert!((0..m.num_faces()).all(|f| p.signed_area(f) > 0.0));
    }

    #[test]
    fn cylinder_loops_equal() {
        let m = cylinder(1.0, 2.0, 12, 4);
        assert!((m.loop_length(0) - m.loop_length(1)).abs() < 1e-12);
    }
}
