//! Registration of two poly-annuli with matched holes through their circle
//! domains.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::beltrami::BeltramiField;
use crate::error::{Error, Result};
use crate::lbs::{lbs_solve, ConstraintSet};
use crate::mesh::{PlanarMesh, Point3, TriMesh};
use crate::pacm::{pacm, CircularDomain};

/// Image of one source vertex: containing target face and barycentric weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub face: usize,
    pub bary: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct Registration {
    /// Target surface point of each source vertex.
    pub points: Vec<Point3>,
    pub locations: Vec<Location>,
    /// Planar map between the two circle domains.
    pub planar: PlanarMesh,
    /// Global rotation applied when matching boundary circles.
    pub rotation: f64,
}

/// Bucket grid over the faces of a planar mesh for point location.
pub struct FaceLocator<'a> {
    mesh: &'a PlanarMesh,
    origin: Complex64,
    cell: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<usize>>,
    reach: f64,
}

fn barycentric(c: [Complex64; 3], p: Complex64) -> [f64; 3] {
    let [a, b, d] = c;
    let det = ((b - a).conj() * (d - a)).im;
    let l1 = ((p - a).conj() * (d - a)).im / det;
    let l2 = ((b - a).conj() * (p - a)).im / det;
    [1.0 - l1 - l2, l1, l2]
}

fn closest_on_segment(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    ((p - a - d * t).norm(), t)
}

impl<'a> FaceLocator<'a> {
    pub fn new(mesh: &'a PlanarMesh) -> Self {
        let (mut lo, mut hi) = (mesh.coords[0], mesh.coords[0]);
        for z in &mesh.coords {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let mut reach: f64 = 0.0;
        for f in 0..mesh.num_faces() {
            let c = mesh.corners(f);
            for i in 0..3 {
                reach = reach.max((c[i] - c[(i + 1) % 3]).norm());
            }
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(f64::MIN_POSITIVE);
        let per_side = ((mesh.num_faces() as f64).sqrt().ceil() as usize).max(1);
        let cell = span / per_side as f64;
        let origin = lo - Complex64::new(reach, reach);
        let n = per_side + 2 * (reach / cell).ceil() as usize + 2;
        let mut loc = Self {
            mesh,
            origin,
            cell,
            dims: (n, n),
            buckets: vec![Vec::new(); n * n],
            reach,
        };
        for f in 0..mesh.num_faces() {
            let c = mesh.corners(f);
            let (x0, y0) = loc.index(Complex64::new(
                c.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
                c.iter().map(|z| z.im).fold(f64::INFINITY, f64::min),
            ));
            let (x1, y1) = loc.index(Complex64::new(
                c.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
                c.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max),
            ));
            for x in x0..=x1 {
                for y in y0..=y1 {
                    loc.buckets[y * n + x].push(f);
                }
            }
        }
        loc
    }

    fn index(&self, z: Complex64) -> (usize, usize) {
        let clamp = |t: f64, n: usize| (t.floor().max(0.0) as usize).min(n - 1);
        (
            clamp((z.re - self.origin.re) / self.cell, self.dims.0),
            clamp((z.im - self.origin.im) / self.cell, self.dims.1),
        )
    }

    /// Face containing `p`, or the nearest face within the longest edge
    /// length (for points just outside polygonal boundaries).
    pub fn locate(&self, p: Complex64) -> Option<Location> {
        let (x, y) = self.index(p);
        for &f in &self.buckets[y * self.dims.0 + x] {
            let b = barycentric(self.mesh.corners(f), p);
            if b.iter().all(|&l| l >= -1e-12) {
                return Some(Location { face: f, bary: b });
            }
        }
        let r = (self.reach / self.cell).ceil() as usize;
        let mut seen = HashSet::new();
        let mut best: Option<(f64, Location)> = None;
        for yy in y.saturating_sub(r)..=(y + r).min(self.dims.1 - 1) {
            for xx in x.saturating_sub(r)..=(x + r).min(self.dims.0 - 1) {
                for &f in &self.buckets[yy * self.dims.0 + xx] {
                    if !seen.insert(f) {
                        continue;
                    }
                    let c = self.mesh.corners(f);
                    for i in 0..3 {
                        let (d, t) = closest_on_segment(p, c[i], c[(i + 1) % 3]);
                        if d <= self.reach && best.map_or(true, |(bd, _)| d < bd) {
                            let mut bary = [0.0; 3];
                            bary[i] = 1.0 - t;
                            bary[(i + 1) % 3] = t;
                            best = Some((d, Location { face: f, bary }));
                        }
                    }
                }
            }
        }
        best.map(|(_, l)| l)
    }
}

/// Registers `surface1` onto `surface2` with holes matched according to
/// `correspondence` (pairs of inner loop ids).
pub fn register(
    surface1: &TriMesh,
    surface2: &TriMesh,
    correspondence: &[(usize, usize)],
) -> Result<Registration> {
    let (n1, n2) = (surface1.boundary_loops().len(), surface2.boundary_loops().len());
    if n1 != n2 {
        return Err(Error::Argument(format!("hole counts differ ({} vs {})", n1.saturating_sub(1), n2.saturating_sub(1))));
    }
    let d1 = pacm(surface1)?;
    let d2 = pacm(surface2)?;
    register_domains(surface1, &d1, surface2, &d2, correspondence)
}

/// Registration from precomputed circle domains.
pub fn register_domains(
    surface1: &TriMesh,
    d1: &CircularDomain,
    surface2: &TriMesh,
    d2: &CircularDomain,
    correspondence: &[(usize, usize)],
) -> Result<Registration> {
    let k = d1.hole_loops.len();
    if d2.hole_loops.len() != k {
        return Err(Error::Argument(format!("hole counts differ ({k} vs {})", d2.hole_loops.len())));
    }
    let valid = correspondence.len() == k
        && correspondence.iter().map(|p| p.0).collect::<HashSet<_>>() == d1.hole_loops.iter().copied().collect()
        && correspondence.iter().map(|p| p.1).collect::<HashSet<_>>() == d2.hole_loops.iter().copied().collect();
    if !valid {
        return Err(Error::Argument("hole correspondence is not a bijection between inner loops".into()));
    }
    let pairs: Vec<_> = correspondence
        .iter()
        .map(|&(a, b)| (a, d1.hole_of_loop(a).unwrap(), d2.hole_of_loop(b).unwrap()))
        .collect();
    let s: Complex64 = pairs.iter().map(|(_, c1, c2)| c1.center.conj() * c2.center).sum();
    let rotation = if s.norm() > 1e-12 { s.arg() } else { 0.0 };
    let spin = Complex64::from_polar(1.0, rotation);

    let mut fixed = Vec::new();
    for &v in &surface1.boundary_loops()[d1.outer_loop] {
        let z = d1.uv.coords[v];
        fixed.push((v, z / z.norm() * spin));
    }
    for (a, c1, c2) in &pairs {
        for &v in &surface1.boundary_loops()[*a] {
            let w = d1.uv.coords[v] - c1.center;
            fixed.push((v, c2.center + w / w.norm() * c2.radius * spin));
        }
    }
    let planar = lbs_solve(
        &d1.uv,
        &BeltramiField::zeros(surface1.num_faces()),
        &ConstraintSet::fixed_points(fixed),
    )?;

    let locator = FaceLocator::new(&d2.uv);
    let mut locations = Vec::with_capacity(planar.num_vertices());
    let mut failed = Vec::new();
    for (v, &z) in planar.coords.iter().enumerate() {
        match locator.locate(z) {
            Some(l) => locations.push(l),
            None => {
                failed.push(v);
                locations.push(Location { face: 0, bary: [1.0, 0.0, 0.0] });
            }
        }
    }
    if !failed.is_empty() {
        return Err(Error::Registration { vertices: failed });
    }
    let p2 = surface2.vertices();
    let points = locations
        .iter()
        .map(|l| {
            let f = surface2.faces()[l.face];
            let mut out = [0.0; 3];
            for i in 0..3 {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += l.bary[i] * p2[f[i]][k];
                }
            }
            out
        })
        .collect();
    Ok(Registration {
        points,
        locations,
        planar,
        rotation,
    })
}
