//! Per-face complex derivatives and Beltrami coefficients of piecewise-linear
//! maps, and the composition rule for Beltrami coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{PlanarMesh, TriMesh};

/// Faces with `|mu|` at or above this are rescaled onto it.
pub const MU_CLAMP: f64 = 0.9999;

/// Relative area below which a source face counts as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-15;

/// One Beltrami coefficient per face.
#[derive(Debug, Clone, PartialEq)]
pub struct BeltramiField {
    pub mu: Vec<Complex64>,
    /// Number of faces whose coefficient was clamped to [`MU_CLAMP`].
    pub clamped: usize,
}

impl BeltramiField {
    /// Wraps raw coefficients, clamping any with `|mu| >= MU_CLAMP`.
    pub fn new(mut mu: Vec<Complex64>) -> Self {
        let mut clamped = 0;
        for m in &mut mu {
            let r = m.norm();
            if r >= MU_CLAMP || !r.is_finite() {
                *m = if r.is_finite() && r > 0.0 {
                    *m * (MU_CLAMP / r)
                } else {
                    Complex64::new(MU_CLAMP, 0.0)
                };
                clamped += 1;
            }
        }
        Self { mu, clamped }
    }

    pub fn zeros(faces: usize) -> Self {
        Self::constant(faces, Complex64::new(0.0, 0.0))
    }

    pub fn constant(faces: usize, mu: Complex64) -> Self {
        Self::new(vec![mu; faces])
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mean_abs(&self) -> f64 {
        mean_abs(&self.mu)
    }

    pub fn max_abs(&self) -> f64 {
        self.mu.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

pub fn mean_abs(mu: &[Complex64]) -> f64 {
    if mu.is_empty() {
        return 0.0;
    }
    mu.iter().map(|m| m.norm()).sum::<f64>() / mu.len() as f64
}

/// `(f_z, f_zbar)` of the affine map taking triangle `src` onto `dst`, or
/// `None` if `src` has less than `min_area` area.
pub fn triangle_derivatives(
    src: [Complex64; 3],
    dst: [Complex64; 3],
    min_area: f64,
) -> Option<(Complex64, Complex64)> {
    let (e1, e2) = (src[1] - src[0], src[2] - src[0]);
    let (d1, d2) = (dst[1] - dst[0], dst[2] - dst[0]);
    // f(z) = a z + b conj(z) + c; det = e1 conj(e2) - e2 conj(e1) = -4i * area
    let det = e1 * e2.conj() - e2 * e1.conj();
    if 0.25 * det.im.abs() <= min_area {
        return None;
    }
    let a = (d1 * e2.conj() - d2 * e1.conj()) / det;
    let b = (e1 * d2 - e2 * d1) / det;
    Some((a, b))
}

fn min_area(scale: f64) -> f64 {
    DEGENERATE_AREA * scale * scale
}

fn check_shared(source: &PlanarMesh, target: &PlanarMesh) -> Result<()> {
    if source.faces != target.faces || source.num_vertices() != target.num_vertices() {
        return Err(Error::Argument("maps do not share connectivity".into()));
    }
    Ok(())
}

/// Complex partials of the piecewise-linear map `source -> target` on one face.
pub fn face_derivatives(
    source: &PlanarMesh,
    target: &PlanarMesh,
    face: usize,
) -> Result<(Complex64, Complex64)> {
    check_shared(source, target)?;
    let eps = min_area(source.bbox_scale());
    triangle_derivatives(source.corners(face), target.corners(face), eps).ok_or(Error::Degenerate { face })
}

/// Complex partials on every face.
pub fn map_derivatives(source: &PlanarMesh, target: &PlanarMesh) -> Result<Vec<(Complex64, Complex64)>> {
    check_shared(source, target)?;
    let eps = min_area(source.bbox_scale());
    (0..source.num_faces())
        .map(|f| {
            triangle_derivatives(source.corners(f), target.corners(f), eps).ok_or(Error::Degenerate { face: f })
        })
        .collect()
}

fn quotient(derivs: &[(Complex64, Complex64)]) -> Result<Vec<Complex64>> {
    derivs
        .iter()
        .enumerate()
        .map(|(f, &(fz, fzb))| {
            if fz.norm() == 0.0 {
                Err(Error::Degenerate { face: f })
            } else {
                Ok(fzb / fz)
            }
        })
        .collect()
}

/// Beltrami coefficient of the piecewise-linear map `source -> target`.
pub fn beltrami_from_maps(source: &PlanarMesh, target: &PlanarMesh) -> Result<BeltramiField> {
    Ok(BeltramiField::new(quotient(&map_derivatives(source, target)?)?))
}

/// Partials of the map from each planar face onto its surface triangle laid
/// flat isometrically (planar face as the source).
pub fn flat_to_surface_derivatives(
    surface: &TriMesh,
    flat: &PlanarMesh,
) -> Result<Vec<(Complex64, Complex64)>> {
    check_connectivity(surface, flat)?;
    let eps = min_area(flat.bbox_scale());
    (0..flat.num_faces())
        .map(|f| {
            triangle_derivatives(flat.corners(f), surface.flattened_face(f), eps).ok_or(Error::Degenerate { face: f })
        })
        .collect()
}

/// Partials of the map from each surface triangle (laid flat) onto its
/// planar image.
pub fn surface_to_flat_derivatives(
    surface: &TriMesh,
    flat: &PlanarMesh,
) -> Result<Vec<(Complex64, Complex64)>> {
    check_connectivity(surface, flat)?;
    let eps = min_area(surface.bbox_diagonal());
    (0..flat.num_faces())
        .map(|f| {
            triangle_derivatives(surface.flattened_face(f), flat.corners(f), eps).ok_or(Error::Degenerate { face: f })
        })
        .collect()
}

fn check_connectivity(surface: &TriMesh, flat: &PlanarMesh) -> Result<()> {
    if flat.faces.as_ref() != surface.faces() || flat.num_vertices() != surface.num_vertices() {
        return Err(Error::Argument("surface and planar mesh do not share connectivity".into()));
    }
    Ok(())
}

/// Beltrami coefficient, on the planar domain, of the inverse of the
/// parameterization `surface -> flat`.
pub fn beltrami_of_surface_map(surface: &TriMesh, flat: &PlanarMesh) -> Result<BeltramiField> {
    Ok(BeltramiField::new(quotient(&flat_to_surface_derivatives(surface, flat)?)?))
}

/// Beltrami coefficient of `g ∘ f` given `mu_f`, the per-face `f_z`, and
/// `mu_g` sampled on the image faces.
pub fn compose_with_derivatives(
    mu_f: &[Complex64],
    f_z: &[Complex64],
    mu_g: &[Complex64],
) -> Result<Vec<Complex64>> {
    if mu_f.len() != f_z.len() || mu_f.len() != mu_g.len() {
        return Err(Error::Argument("Beltrami fields differ in length".into()));
    }
    mu_f.iter()
        .zip(f_z)
        .zip(mu_g)
        .enumerate()
        .map(|(face, ((&mf, &fz), &mg))| {
            let rot = fz.conj() / fz;
            let den = Complex64::new(1.0, 0.0) + rot * mf.conj() * mg;
            if den.norm() < 1e-14 || !rot.is_finite() {
                return Err(Error::Degenerate { face });
            }
            Ok((mf + rot * mg) / den)
        })
        .collect()
}

/// Beltrami coefficient of `g ∘ f` where `f` is the map `source -> target`.
pub fn compose_beltrami(
    mu_f: &BeltramiField,
    f: (&PlanarMesh, &PlanarMesh),
    mu_g: &BeltramiField,
) -> Result<BeltramiField> {
    let fz: Vec<Complex64> = map_derivatives(f.0, f.1)?.into_iter().map(|(fz, _)| fz).collect();
    Ok(BeltramiField::new(compose_with_derivatives(&mu_f.mu, &fz, &mu_g.mu)?))
}

/// Per-face Jacobian determinant `|f_z|^2 - |f_zbar|^2` and the number of
/// faces where it is not positive.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianReport {
    pub det: Vec<f64>,
    pub flips: usize,
}

pub fn jacobian_sign(source: &PlanarMesh, target: &PlanarMesh) -> Result<JacobianReport> {
    let det: Vec<f64> = map_derivatives(source, target)?
        .into_iter()
        .map(|(fz, fzb)| fz.norm_sqr() - fzb.norm_sqr())
        .collect();
    let flips = det.iter().filter(|&&j| j <= 0.0).count();
    Ok(JacobianReport { det, flips })
}

/// Number of faces of `uv` whose orientation disagrees with the surface.
pub fn count_flips(surface: &TriMesh, uv: &PlanarMesh) -> Result<usize> {
    Ok(surface_to_flat_derivatives(surface, uv)?
        .into_iter()
        .filter(|(fz, fzb)| fz.norm_sqr() - fzb.norm_sqr() <= 0.0)
        .count())
}
