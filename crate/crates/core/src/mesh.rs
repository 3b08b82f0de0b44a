//! Indexed triangle meshes with boundary bookkeeping.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];
pub type Face = [usize; 3];

/// A connected, consistently oriented, genus-0 triangle mesh with at least one
/// boundary loop.
///
/// Boundary loops are stored with the surface on their left, each starting at
/// its lowest vertex index, and sorted by that starting index.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    faces: Arc<[Face]>,
    boundary_loops: Vec<Vec<usize>>,
}

/// Per-vertex planar coordinates on a fixed triangle connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMesh {
    pub faces: Arc<[Face]>,
    pub coords: Vec<Complex64>,
}

impl PlanarMesh {
    pub fn new(faces: Arc<[Face]>, coords: Vec<Complex64>) -> Result<Self> {
        let max = faces.iter().flatten().copied().max();
        if let Some(max) = max {
            if max >= coords.len() {
                return Err(Error::Argument(format!(
                    "face references vertex {max} but only {} coordinates given",
                    coords.len()
                )));
            }
        }
        Ok(Self { faces, coords })
    }

    /// Coordinates on the connectivity of `mesh`.
    pub fn on(mesh: &TriMesh, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() != mesh.num_vertices() {
            return Err(Error::Argument(format!(
                "{} coordinates for a mesh with {} vertices",
                coords.len(),
                mesh.num_vertices()
            )));
        }
        Ok(Self {
            faces: mesh.faces.clone(),
            coords,
        })
    }

    /// The xy-projection of a mesh.
    pub fn from_xy(mesh: &TriMesh) -> Self {
        let coords = mesh
            .vertices
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Self {
            faces: mesh.faces.clone(),
            coords,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn corners(&self, face: usize) -> [Complex64; 3] {
        let [a, b, c] = self.faces[face];
        [self.coords[a], self.coords[b], self.coords[c]]
    }

    /// Signed area of a face (positive for anti-clockwise).
    pub fn signed_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.corners(face);
        0.5 * ((b - a).conj() * (c - a)).im
    }

    pub fn with_coords(&self, coords: Vec<Complex64>) -> Self {
        assert_eq!(coords.len(), self.coords.len());
        Self {
            faces: self.faces.clone(),
            coords,
        }
    }

    /// Same coordinates mapped through `f`.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.with_coords(self.coords.iter().map(|&z| f(z)).collect())
    }

    /// Side length of the coordinate bounding box (the larger of its extents).
    pub fn bbox_scale(&self) -> f64 {
        let (mut lo, mut hi) = (
            Complex64::new(f64::INFINITY, f64::INFINITY),
            Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for z in &self.coords {
            lo.re = lo.re.min(z.re);
            lo.im = lo.im.min(z.im);
            hi.re = hi.re.max(z.re);
            hi.im = hi.im.max(z.im);
        }
        (hi.re - lo.re).max(hi.im - lo.im).max(0.0)
    }
}

impl TriMesh {
    /// Validates, orients and indexes a mesh.
    ///
    /// Orientation is propagated breadth-first from face 0, keeping face 0's
    /// winding.
    pub fn new(vertices: Vec<Point3>, faces: Vec<Face>) -> Result<Self> {
        let nv = vertices.len();
        if faces.is_empty() {
            return Err(Error::Topology("mesh has no faces".into()));
        }
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= nv) {
                return Err(Error::Argument(format!("face {fi} references a missing vertex")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Argument(format!("face {fi} repeats a vertex")));
            }
        }
        let mut used = vec![false; nv];
        faces.iter().flatten().for_each(|&v| used[v] = true);
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Topology(format!("vertex {v} is not referenced by any face")));
        }

        let mut faces = faces;
        let edge_faces = edge_face_map(&faces)?;
        orient(&mut faces, &edge_faces)?;

        let boundary_loops = extract_loops(nv, &faces, &edge_faces)?;
        if boundary_loops.is_empty() {
            return Err(Error::Topology("closed surface unsupported".into()));
        }
        let chi = nv as i64 - edge_faces.len() as i64 + faces.len() as i64;
        let b = boundary_loops.len() as i64;
        if chi != 2 - b {
            return Err(Error::Topology(format!(
                "Euler characteristic {chi} with {b} boundary loops; only genus-0 surfaces are supported"
            )));
        }

        Ok(Self {
            vertices,
            faces: faces.into(),
            boundary_loops,
        })
    }

    /// A planar mesh lifted to z = 0.
    pub fn from_planar(planar: &PlanarMesh) -> Result<Self> {
        let vertices = planar.coords.iter().map(|z| [z.re, z.im, 0.0]).collect();
        Self::new(vertices, planar.faces.to_vec())
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn shared_faces(&self) -> Arc<[Face]> {
        self.faces.clone()
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        // Each interior edge is seen twice as a half-edge, boundary edges once.
        let boundary: usize = self.boundary_loops.iter().map(Vec::len).sum();
        (3 * self.faces.len() + boundary) / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    /// Index of the loop containing `v`, if `v` is a boundary vertex.
    pub fn loop_of_vertex(&self, v: usize) -> Option<usize> {
        self.boundary_loops.iter().position(|l| l.contains(&v))
    }

    /// Per-vertex loop membership (`None` for interior vertices).
    pub fn boundary_membership(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.vertices.len()];
        for (li, l) in self.boundary_loops.iter().enumerate() {
            for &v in l {
                m[v] = Some(li);
            }
        }
        m
    }

    pub fn loop_length(&self, id: usize) -> f64 {
        let l = &self.boundary_loops[id];
        (0..l.len())
            .map(|i| dist(&self.vertices[l[i]], &self.vertices[l[(i + 1) % l.len()]]))
            .sum()
    }

    /// Sorted neighbor lists of every vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for f in self.faces.iter() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for n in &mut adj {
            n.sort_unstable();
            n.dedup();
        }
        adj
    }

    /// Undirected edges as `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| ordered(f[k], f[(k + 1) % 3])))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.faces[face].map(|v| self.vertices[v]);
        0.5 * norm(&cross(&sub(&b, &a), &sub(&c, &a)))
    }

    /// Isometric embedding of a face in the plane: first corner at the origin,
    /// second on the positive real axis, third in the upper half-plane.
    pub fn flattened_face(&self, face: usize) -> [Complex64; 3] {
        let [a, b, c] = self.faces[face].map(|v| self.vertices[v]);
        let ab = sub(&b, &a);
        let ac = sub(&c, &a);
        let len = norm(&ab);
        let x = dot(&ab, &ac) / len;
        let y = norm(&cross(&ab, &ac)) / len;
        [Complex64::new(0.0, 0.0), Complex64::new(len, 0.0), Complex64::new(x, y)]
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        dist(&lo, &hi)
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_face_map(faces: &[Face]) -> Result<HashMap<(usize, usize), Vec<usize>>> {
    let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(faces.len() * 2);
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let e = ordered(f[k], f[(k + 1) % 3]);
            let entry = map.entry(e).or_default();
            entry.push(fi);
            if entry.len() > 2 {
                return Err(Error::Topology(format!(
                    "non-manifold edge ({}, {}) has more than two incident faces",
                    e.0, e.1
                )));
            }
        }
    }
    Ok(map)
}

fn has_directed(f: &Face, a: usize, b: usize) -> bool {
    (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b)
}

fn orient(faces: &mut [Face], edge_faces: &HashMap<(usize, usize), Vec<usize>>) -> Result<()> {
    let mut visited = vec![false; faces.len()];
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    let mut seen = 1;
    while let Some(fi) = queue.pop_front() {
        let f = faces[fi];
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            for &gi in &edge_faces[&ordered(a, b)] {
                if gi == fi {
                    continue;
                }
                let same_direction = has_directed(&faces[gi], a, b);
                if visited[gi] {
                    if same_direction {
                        return Err(Error::Topology("surface is not orientable".into()));
                    }
                } else {
                    if same_direction {
                        faces[gi].swap(1, 2);
                    }
                    visited[gi] = true;
                    seen += 1;
                    queue.push_back(gi);
                }
            }
        }
    }
    if seen != faces.len() {
        return Err(Error::Topology("mesh is not connected".into()));
    }
    Ok(())
}

fn extract_loops(
    nv: usize,
    faces: &[Face],
    edge_faces: &HashMap<(usize, usize), Vec<usize>>,
) -> Result<Vec<Vec<usize>>> {
    let mut next = vec![usize::MAX; nv];
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if edge_faces[&ordered(a, b)].len() == 1 {
                if next[a] != usize::MAX {
                    return Err(Error::Topology(format!(
                        "vertex {a} is pinched between boundary loops"
                    )));
                }
                next[a] = b;
            }
        }
    }
    let mut visited = vec![false; nv];
    let mut loops = Vec::new();
    for start in 0..nv {
        if next[start] == usize::MAX || visited[start] {
            continue;
        }
        let mut l = Vec::new();
        let mut v = start;
        loop {
            if visited[v] {
                return Err(Error::Topology(format!("boundary walk revisits vertex {v}")));
            }
            visited[v] = true;
            l.push(v);
            v = next[v];
            if v == usize::MAX {
                return Err(Error::Topology("open boundary chain".into()));
            }
            if v == start {
                break;
            }
        }
        loops.push(l);
    }
    Ok(loops)
}

pub(crate) fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Point3, b: &Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &Point3, b: &Point3) -> f64 {
    norm(&sub(a, b))
}
