//! Disk automorphisms `(z - a) / (1 - conj(a) z)` and the area-distortion
//! search over them.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::mesh::{PlanarMesh, TriMesh};

/// Largest `|alpha|` considered by the search.
pub const MAX_RADIUS: f64 = 0.95;
const GRID: usize = 32;
const REFINE_TOLERANCE: f64 = 1e-6;

/// Parameter of a disk automorphism, stored in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusParam {
    pub r: f64,
    pub theta: f64,
}

impl MobiusParam {
    pub const IDENTITY: Self = Self { r: 0.0, theta: 0.0 };

    pub fn from_alpha(alpha: Complex64) -> Self {
        let r = alpha.norm();
        assert!(r < 1.0, "|alpha| must be below 1");
        Self {
            r,
            theta: if r == 0.0 { 0.0 } else { alpha.arg().rem_euclid(TAU) },
        }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        disk_automorphism(self.alpha(), z)
    }
}

pub fn disk_automorphism(alpha: Complex64, z: Complex64) -> Complex64 {
    (z - alpha) / (Complex64::new(1.0, 0.0) - alpha.conj() * z)
}

/// Face areas of the surface normalized to sum to one.
pub fn normalized_surface_areas(surface: &TriMesh) -> Vec<f64> {
    let a: Vec<f64> = (0..surface.num_faces()).map(|f| surface.face_area(f)).collect();
    let total: f64 = a.iter().sum();
    a.into_iter().map(|x| x / total).collect()
}

/// Absolute planar face areas normalized to sum to one, floored away from 0.
pub fn normalized_planar_areas(uv: &PlanarMesh) -> Vec<f64> {
    let a: Vec<f64> = (0..uv.num_faces()).map(|f| uv.signed_area(f).abs()).collect();
    let total: f64 = a.iter().sum();
    a.into_iter().map(|x| (x / total).max(f64::MIN_POSITIVE)).collect()
}

/// `sum_T A_T log(a_T / A_T)^2` for normalized reference areas `A` and
/// planar areas `a`.
pub fn area_energy(reference: &[f64], uv: &PlanarMesh) -> f64 {
    normalized_planar_areas(uv)
        .iter()
        .zip(reference)
        .map(|(a, r)| r * (a / r).ln().powi(2))
        .sum()
}

/// Result of [`mobius_correct`].
#[derive(Debug, Clone)]
pub struct MobiusCorrection {
    pub uv: PlanarMesh,
    pub param: MobiusParam,
    pub energy_before: f64,
    pub energy_after: f64,
}

/// Finds the disk automorphism minimizing area distortion against the surface
/// and applies it: a 32 x 32 polar grid over `|alpha| <= 0.95`, then a compass
/// search in the alpha plane down to a step of 1e-6.
pub fn mobius_correct(surface: &TriMesh, uv: &PlanarMesh) -> MobiusCorrection {
    let reference = normalized_surface_areas(surface);
    let energy = |alpha: Complex64| -> f64 {
        if alpha.norm() > MAX_RADIUS {
            return f64::INFINITY;
        }
        area_energy(&reference, &uv.map(|z| disk_automorphism(alpha, z)))
    };
    let e0 = energy(Complex64::new(0.0, 0.0));
    let (mut best, mut best_e) = (Complex64::new(0.0, 0.0), e0);
    for i in 0..GRID {
        let r = MAX_RADIUS * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let a = Complex64::from_polar(r, TAU * j as f64 / GRID as f64);
            let e = energy(a);
            if e < best_e {
                best = a;
                best_e = e;
            }
        }
    }
    let mut step = MAX_RADIUS / (GRID - 1) as f64;
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)].map(|(x, y)| Complex64::new(x, y));
    while step > REFINE_TOLERANCE {
        let mut improved = false;
        for d in dirs {
            let a = best + d * step;
            let e = energy(a);
            if e < best_e {
                best = a;
                best_e = e;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let param = MobiusParam::from_alpha(best);
    MobiusCorrection {
        uv: uv.map(|z| disk_automorphism(best, z)),
        param,
        energy_before: e0,
        energy_after: best_e,
    }
}
