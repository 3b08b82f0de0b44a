//! Initial flattenings: the arc-length disk harmonic map and the periodic
//! rectangular quasi-conformal map with its optimal aspect ratio.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::beltrami::{
    beltrami_of_surface_map, compose_with_derivatives, mean_abs, surface_to_flat_derivatives,
};
use crate::error::{Error, Result};
use crate::lbs::{element_stiffness, lbs_solve, ConstraintSet};
use crate::mesh::{PlanarMesh, TriMesh};
use crate::sparse::{ReducedSystem, ScalarConstraints};
use crate::surgery::SeamRecord;

/// Boundary angles proportional to cumulative edge length, starting at 0 on
/// `loop_[0]`.
pub fn arc_length_angles(mesh: &TriMesh, loop_: &[usize]) -> Vec<f64> {
    let p = mesh.vertices();
    let n = loop_.len();
    let lengths: Vec<f64> = (0..n)
        .map(|i| crate::mesh::dist(&p[loop_[i]], &p[loop_[(i + 1) % n]]))
        .collect();
    let total: f64 = lengths.iter().sum();
    let mut acc = 0.0;
    let mut theta = Vec::with_capacity(n);
    for l in &lengths {
        theta.push(TAU * acc / total);
        acc += l;
    }
    theta
}

/// Cotangent-Laplacian elements of the surface, using each face's
/// isometric flattening.
pub fn cotangent_elements(mesh: &TriMesh) -> Vec<crate::sparse::ElementMatrix> {
    (0..mesh.num_faces())
        .map(|f| element_stiffness(mesh.flattened_face(f), [1.0, 0.0, 1.0]))
        .collect()
}

/// Harmonic map of a topological disk onto the unit disk, boundary placed by
/// arc length with angle 0 at `start` (default: first vertex of the loop).
pub fn disk_harmonic_map(mesh: &TriMesh, start: Option<usize>) -> Result<PlanarMesh> {
    if mesh.boundary_loops().len() != 1 || mesh.euler_characteristic() != 1 {
        return Err(Error::Precondition("disk harmonic map needs a topological disk".into()));
    }
    let mut loop_ = mesh.boundary_loops()[0].clone();
    if let Some(s) = start {
        let at = loop_
            .iter()
            .position(|&v| v == s)
            .ok_or_else(|| Error::Argument(format!("start vertex {s} is not on the boundary")))?;
        loop_.rotate_left(at);
    }
    let theta = arc_length_angles(mesh, &loop_);
    let elements = cotangent_elements(mesh);
    let n = mesh.num_vertices();
    let solve = |coord: fn(f64) -> f64| -> Result<Vec<f64>> {
        let c = ScalarConstraints {
            dirichlet: loop_.iter().zip(&theta).map(|(&v, &t)| (v, coord(t))).collect(),
            pairs: vec![],
        };
        ReducedSystem::new(n, mesh.faces(), &elements, &c)?.solve()
    };
    let x = solve(f64::cos)?;
    let y = solve(f64::sin)?;
    PlanarMesh::on(mesh, x.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// Boundary sides of the rectangle `[0, L] x [0, 1]`. Each side lists its
/// vertices in anticlockwise boundary order, corners included.
#[derive(Debug, Clone, PartialEq)]
pub struct RectLayout {
    pub length: f64,
    /// `[p, q, q', p']` at `(0,0)`, `(L,0)`, `(L,1)`, `(0,1)`.
    pub corners: [usize; 4],
    pub bottom: Vec<usize>,
    pub right: Vec<usize>,
    pub top: Vec<usize>,
    pub left: Vec<usize>,
}

impl RectLayout {
    /// Splits the sliced mesh's boundary at the four seam corners.
    pub fn from_seam(sliced: &TriMesh, seam: &SeamRecord) -> Result<Self> {
        let mut l = sliced
            .boundary_loops()
            .first()
            .filter(|_| sliced.boundary_loops().len() == 1)
            .ok_or_else(|| Error::Precondition("sliced mesh must have one boundary loop".into()))?
            .clone();
        let at = |l: &[usize], v: usize| {
            l.iter()
                .position(|&x| x == v)
                .ok_or_else(|| Error::Consistency(format!("corner {v} missing from the boundary")))
        };
        let p = at(&l, seam.p())?;
        l.rotate_left(p);
        let (iq, iqt, ipt) = (at(&l, seam.q())?, at(&l, seam.q_twin())?, at(&l, seam.p_twin())?);
        if !(iq < iqt && iqt < ipt) {
            return Err(Error::Consistency("seam corners out of order along the boundary".into()));
        }
        let bottom = l[..=iq].to_vec();
        let right = l[iq..=iqt].to_vec();
        let top = l[iqt..=ipt].to_vec();
        let mut left = l[ipt..].to_vec();
        left.push(l[0]);
        if !bottom.iter().copied().eq(seam.bottom()) || !top.iter().rev().copied().eq(seam.top()) {
            return Err(Error::Consistency("rectangle sides do not follow the cut path".into()));
        }
        Ok(Self {
            length: 1.0,
            corners: [seam.p(), seam.q(), seam.q_twin(), seam.p_twin()],
            bottom,
            right,
            top,
            left,
        })
    }

    /// Constraints for the unit-length rectangle with periodic `u` across the cut.
    pub fn constraints(&self, seam: &SeamRecord) -> ConstraintSet {
        let mut c = ConstraintSet::default();
        c.dirichlet_u.extend(self.left.iter().map(|&v| (v, 0.0)));
        c.dirichlet_u.extend(self.right.iter().map(|&v| (v, 1.0)));
        c.dirichlet_v.extend(self.bottom.iter().map(|&v| (v, 0.0)));
        c.dirichlet_v.extend(self.top.iter().map(|&v| (v, 1.0)));
        let m = seam.twin_pairs.len();
        c.pairs_u.extend(seam.twin_pairs[1..m - 1].iter().copied());
        c
    }
}

/// Quasi-conformal map from the harmonic disk onto the unit square whose
/// Beltrami coefficient matches the inverse disk map, with the cut path on
/// the horizontal sides and periodic horizontal coordinates across it.
pub fn rectangular_qc_map(
    sliced: &TriMesh,
    disk: &PlanarMesh,
    seam: &SeamRecord,
) -> Result<(PlanarMesh, RectLayout)> {
    let layout = RectLayout::from_seam(sliced, seam)?;
    let mu = beltrami_of_surface_map(sliced, disk)?;
    let rect = lbs_solve(disk, &mu, &layout.constraints(seam))?;
    Ok((rect, layout))
}

/// Mean `|mu|` of the map surface -> rectangle after stretching the
/// rectangle horizontally by `length`, as a closure over `length`.
pub fn length_objective(sliced: &TriMesh, rect: &PlanarMesh) -> Result<impl Fn(f64) -> f64> {
    let d = surface_to_flat_derivatives(sliced, rect)?;
    let mu_f: Vec<Complex64> = d.iter().map(|(fz, fzb)| fzb / fz).collect();
    let f_z: Vec<Complex64> = d.iter().map(|(fz, _)| *fz).collect();
    Ok(move |length: f64| {
        let k = Complex64::new((length - 1.0) / (length + 1.0), 0.0);
        let g = vec![k; mu_f.len()];
        match compose_with_derivatives(&mu_f, &f_z, &g) {
            Ok(mu) => mean_abs(&mu),
            Err(_) => f64::INFINITY,
        }
    })
}

pub const LENGTH_RANGE: (f64, f64) = (1e-2, 1e2);
pub const LENGTH_TOLERANCE: f64 = 1e-4;

/// Golden-section minimization of `f` over `log(L)` in `[lo, hi]`, stopped
/// when the bracket's relative width in `L` is below `tol`.
pub fn golden_section_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    // width in log space approximates relative width in L
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp());
        }
    }
    (0.5 * (a + b)).exp()
}

/// Optimal rectangle length and the horizontally rescaled rectangle.
pub fn optimal_length(sliced: &TriMesh, rect: &PlanarMesh) -> Result<(f64, PlanarMesh)> {
    let objective = length_objective(sliced, rect)?;
    let length = golden_section_log(&objective, LENGTH_RANGE.0, LENGTH_RANGE.1, LENGTH_TOLERANCE);
    Ok((length, rect.map(|z| Complex64::new(length * z.re, z.im))))
}
