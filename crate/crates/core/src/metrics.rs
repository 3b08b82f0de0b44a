//! Distortion measures of a parameterization.

use serde::Serialize;

use crate::beltrami::{surface_to_flat_derivatives, MU_CLAMP};
use crate::error::{Error, Result};
use crate::mesh::{sub, PlanarMesh, TriMesh};
use crate::mobius::{normalized_planar_areas, normalized_surface_areas};

pub const HISTOGRAM_BINS: usize = 36;
const DEGENERATE_EDGE: f64 = 1e-14;

/// Angle differences in degrees, three per face in corner order; `None` for
/// corners where either angle is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularDistortion {
    pub d: Vec<Option<f64>>,
    pub excluded: usize,
}

impl AngularDistortion {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.d.iter().flatten().copied()
    }

    pub fn mean_abs(&self) -> f64 {
        let n = self.d.len() - self.excluded;
        if n == 0 {
            return 0.0;
        }
        self.values().map(f64::abs).sum::<f64>() / n as f64
    }

    /// Counts over 5-degree bins covering [-90, 90]; values outside land in
    /// the end bins.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; HISTOGRAM_BINS];
        let width = 180.0 / HISTOGRAM_BINS as f64;
        for d in self.values() {
            let b = ((d + 90.0) / width).floor().clamp(0.0, (HISTOGRAM_BINS - 1) as f64);
            h[b as usize] += 1;
        }
        h
    }
}

fn angle(a: [f64; 2], b: [f64; 2]) -> Option<f64> {
    let (la, lb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
    if la <= DEGENERATE_EDGE || lb <= DEGENERATE_EDGE {
        return None;
    }
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    Some(cross.abs().atan2(dot))
}

fn surface_angle(a: [f64; 3], b: [f64; 3]) -> Option<f64> {
    let (la, lb) = (crate::mesh::norm(&a), crate::mesh::norm(&b));
    if la <= DEGENERATE_EDGE || lb <= DEGENERATE_EDGE {
        return None;
    }
    let c = crate::mesh::cross(&a, &b);
    Some(crate::mesh::norm(&c).atan2(crate::mesh::dot(&a, &b)))
}

/// Per-corner difference between the planar and the surface angle.
pub fn angular_distortion(surface: &TriMesh, uv: &PlanarMesh) -> Result<AngularDistortion> {
    if uv.faces.as_ref() != surface.faces() || uv.num_vertices() != surface.num_vertices() {
        return Err(Error::Argument("surface and planar mesh do not share connectivity".into()));
    }
    let p = surface.vertices();
    let mut d = Vec::with_capacity(3 * surface.num_faces());
    let mut excluded = 0;
    for face in surface.faces() {
        for c in 0..3 {
            let (i, j, k) = (face[(c + 2) % 3], face[c], face[(c + 1) % 3]);
            let s = surface_angle(sub(&p[i], &p[j]), sub(&p[k], &p[j]));
            let (zi, zj, zk) = (uv.coords[i], uv.coords[j], uv.coords[k]);
            let t = angle([zi.re - zj.re, zi.im - zj.im], [zk.re - zj.re, zk.im - zj.im]);
            match (s, t) {
                (Some(s), Some(t)) => d.push(Some((t - s).to_degrees())),
                _ => {
                    d.push(None);
                    excluded += 1;
                }
            }
        }
    }
    Ok(AngularDistortion { d, excluded })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub angle_hist: Vec<usize>,
    pub mean_abs_d: f64,
    pub mean_abs_mu: f64,
    pub max_abs_mu: f64,
    pub flips: usize,
    pub area_distortion: f64,
    pub clamped_faces: usize,
    pub excluded_corners: usize,
    #[serde(skip)]
    pub angle_d: Vec<Option<f64>>,
    /// Per-face `|f_z| (1 + |mu|)`.
    #[serde(skip)]
    pub magnification: Vec<f64>,
    /// Per-face `|f_z| (1 - |mu|)`.
    #[serde(skip)]
    pub shrinkage: Vec<f64>,
}

/// Area-weighted mean of `|log(a / A)|` over normalized face areas.
pub fn area_distortion(surface: &TriMesh, uv: &PlanarMesh) -> f64 {
    normalized_planar_areas(uv)
        .iter()
        .zip(normalized_surface_areas(surface))
        .map(|(a, r)| r * (a / r).ln().abs())
        .sum()
}

pub fn full_report(surface: &TriMesh, uv: &PlanarMesh) -> Result<MetricsReport> {
    let angles = angular_distortion(surface, uv)?;
    let deriv = surface_to_flat_derivatives(surface, uv)?;
    let n = deriv.len().max(1) as f64;
    let (mut sum, mut max, mut flips, mut clamped) = (0.0, 0.0f64, 0, 0);
    let mut magnification = Vec::with_capacity(deriv.len());
    let mut shrinkage = Vec::with_capacity(deriv.len());
    for (fz, fzb) in &deriv {
        let m = (fzb / fz).norm();
        sum += m;
        max = max.max(m);
        if m >= MU_CLAMP {
            clamped += 1;
        }
        if fz.norm_sqr() - fzb.norm_sqr() <= 0.0 {
            flips += 1;
        }
        magnification.push(fz.norm() * (1.0 + m));
        shrinkage.push(fz.norm() * (1.0 - m));
    }
    Ok(MetricsReport {
        angle_hist: angles.histogram(),
        mean_abs_d: angles.mean_abs(),
        mean_abs_mu: sum / n,
        max_abs_mu: max,
        flips,
        area_distortion: area_distortion(surface, uv),
        clamped_faces: clamped,
        excluded_corners: angles.excluded,
        angle_d: angles.d,
        magnification,
        shrinkage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use num_complex::Complex64;

    #[test]
    fn identity_has_no_distortion() {
        let m = synth::unit_disk(4, 24);
        let r = full_report(&m, &PlanarMesh::from_xy(&m)).unwrap();
        assert!(r.mean_abs_d < 1e-10);
        assert!(r.mean_abs_mu < 1e-10);
        assert!(r.area_distortion < 1e-10);
        assert_eq!(r.flips, 0);
        assert_eq!(r.angle_hist.iter().sum::<usize>(), 3 * m.num_faces());
    }

    #[test]
    fn reflection_flips_everything() {
        let m = synth::square_grid(4);
        let uv = PlanarMesh::from_xy(&m).map(|z| z.conj());
        let r = full_report(&m, &uv).unwrap();
        assert_eq!(r.flips, m.num_faces());
        assert!(r.mean_abs_d < 1e-10);
    }

    #[test]
    fn corner_sums_vanish() {
        let m = synth::square_grid(3);
        let uv = PlanarMesh::from_xy(&m).map(|z| Complex64::new(2.0 * z.re + 0.3 * z.im, z.im));
        let a = angular_distortion(&m, &uv).unwrap();
        for f in a.d.chunks(3) {
            let s: f64 = f.iter().map(|x| x.unwrap()).sum();
            assert!(s.abs() < 1e-10);
        }
    }
}
