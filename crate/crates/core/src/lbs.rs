//! Linear Beltrami solver: reconstructs a quasi-conformal map with a
//! prescribed Beltrami coefficient by solving two anisotropic Laplace
//! equations `div(A grad u) = 0`, `div(A grad v) = 0` with linear elements.

use num_complex::Complex64;

use crate::beltrami::BeltramiField;
use crate::error::{Error, Result};
use crate::mesh::PlanarMesh;
use crate::sparse::{ElementMatrix, ReducedSystem, ScalarConstraints};

/// Point and periodic constraints for the two coordinate systems.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    pub dirichlet_u: Vec<(usize, f64)>,
    pub dirichlet_v: Vec<(usize, f64)>,
    pub pairs_u: Vec<(usize, usize)>,
    pub pairs_v: Vec<(usize, usize)>,
}

impl ConstraintSet {
    /// Pins the listed vertices to the given complex positions.
    pub fn fixed_points(points: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let mut c = Self::default();
        for (v, z) in points {
            c.dirichlet_u.push((v, z.re));
            c.dirichlet_v.push((v, z.im));
        }
        c
    }

    fn scalar(&self) -> (ScalarConstraints, ScalarConstraints) {
        (
            ScalarConstraints {
                dirichlet: self.dirichlet_u.clone(),
                pairs: self.pairs_u.clone(),
            },
            ScalarConstraints {
                dirichlet: self.dirichlet_v.clone(),
                pairs: self.pairs_v.clone(),
            },
        )
    }
}

/// Entries `(a1, a2, a3)` of the symmetric coefficient matrix
/// `A = [[a1, a2], [a2, a3]]` for a Beltrami coefficient `rho + i eta`.
pub fn lbs_coefficients(mu: Complex64) -> [f64; 3] {
    let (rho, eta) = (mu.re, mu.im);
    let den = 1.0 - rho * rho - eta * eta;
    [
        ((rho - 1.0).powi(2) + eta * eta) / den,
        -2.0 * eta / den,
        ((rho + 1.0).powi(2) + eta * eta) / den,
    ]
}

/// Linear-element stiffness `area * grad(phi_i)^T A grad(phi_j)` of one
/// triangle. With `A = I` this is the cotangent Laplacian.
pub fn element_stiffness(corners: [Complex64; 3], a: [f64; 3]) -> ElementMatrix {
    let [z0, z1, z2] = corners;
    let area2 = ((z1 - z0).conj() * (z2 - z0)).im;
    // grad(phi_i) = rot90(z_k - z_j) / (2 * signed area)
    let grads = [z2 - z1, z0 - z2, z1 - z0].map(|e| Complex64::new(-e.im, e.re) / area2);
    let area = 0.5 * area2.abs();
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (gi, gj) = (grads[i], grads[j]);
            let agj = (a[0] * gj.re + a[1] * gj.im, a[1] * gj.re + a[2] * gj.im);
            k[i][j] = area * (gi.re * agj.0 + gi.im * agj.1);
        }
    }
    k
}

/// Element matrices of the Beltrami system on `domain`.
pub fn stiffness(domain: &PlanarMesh, mu: &BeltramiField) -> Result<Vec<ElementMatrix>> {
    if mu.len() != domain.num_faces() {
        return Err(Error::Argument(format!(
            "{} coefficients for {} faces",
            mu.len(),
            domain.num_faces()
        )));
    }
    let eps = crate::beltrami::DEGENERATE_AREA * domain.bbox_scale().powi(2);
    (0..domain.num_faces())
        .map(|f| {
            let m = mu.mu[f];
            if !(m.norm() < 1.0) {
                return Err(Error::Precondition(format!("|mu| = {} >= 1 on face {f}", m.norm())));
            }
            if domain.signed_area(f).abs() <= eps {
                return Err(Error::Degenerate { face: f });
            }
            Ok(element_stiffness(domain.corners(f), lbs_coefficients(m)))
        })
        .collect()
}

/// Solves for the map `domain -> plane` with Beltrami coefficient `mu`
/// subject to `constraints`; unconstrained boundary is natural (zero flux).
pub fn lbs_solve(domain: &PlanarMesh, mu: &BeltramiField, constraints: &ConstraintSet) -> Result<PlanarMesh> {
    let elements = stiffness(domain, mu)?;
    let (cu, cv) = constraints.scalar();
    let n = domain.num_vertices();
    let u = ReducedSystem::new(n, &domain.faces, &elements, &cu)?.solve()?;
    let v = ReducedSystem::new(n, &domain.faces, &elements, &cv)?.solve()?;
    Ok(domain.with_coords(u.into_iter().zip(v).map(|(x, y)| Complex64::new(x, y)).collect()))
}
