//! Annulus conformal map for surfaces with one hole.
//!
//! The surface is cut along a shortest path from the inner to the outer
//! boundary, flattened onto the unit disk, mapped quasi-conformally onto a
//! rectangle with periodic cut sides, stretched to its optimal length,
//! wrapped onto an annulus by the exponential map, welded back together and
//! finally corrected by a quasi-conformal composition with fixed boundary.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::beltrami::{beltrami_of_surface_map, surface_to_flat_derivatives};
use crate::error::{Error, Result};
use crate::flatten::{disk_harmonic_map, optimal_length, rectangular_qc_map};
use crate::lbs::{lbs_solve, ConstraintSet};
use crate::mesh::{PlanarMesh, TriMesh};
use crate::surgery::{classify_boundaries, closest_start, shortest_path, slice_along_path, SeamRecord};

/// Distortion of one intermediate map of a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: &'static str,
    pub mean_abs_mu: f64,
    pub max_abs_mu: f64,
    pub flips: usize,
}

impl StageRecord {
    pub fn measure(stage: &'static str, surface: &TriMesh, uv: &PlanarMesh) -> Result<Self> {
        let d = surface_to_flat_derivatives(surface, uv)?;
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        let mut flips = 0;
        for (fz, fzb) in &d {
            let m = (fzb / fz).norm();
            sum += m;
            max = max.max(m);
            if fz.norm_sqr() - fzb.norm_sqr() <= 0.0 {
                flips += 1;
            }
        }
        Ok(Self {
            stage,
            mean_abs_mu: sum / d.len().max(1) as f64,
            max_abs_mu: max,
            flips,
        })
    }
}

/// Choice of the inner-boundary vertex where the cut path starts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CutStart {
    /// The inner vertex nearest to the outer boundary.
    #[default]
    Closest,
    /// The lowest-index inner vertex.
    LowestIndex,
}

#[derive(Debug, Clone, Default)]
pub struct AcmOptions {
    pub start: CutStart,
    /// Outer boundary loop id; defaults to the longest loop.
    pub outer: Option<usize>,
    /// Skip the final quasi-conformal composition.
    pub skip_correction: bool,
}

#[derive(Debug, Clone)]
pub struct AnnulusResult {
    /// Parameterization on the original connectivity.
    pub uv: PlanarMesh,
    /// `exp(-2 pi L)`.
    pub inner_radius: f64,
    /// Optimal rectangle length `L`.
    pub length: f64,
    pub outer_loop: usize,
    pub inner_loop: usize,
    pub seam: SeamRecord,
    pub stages: Vec<StageRecord>,
}

/// `exp(2 pi (z - L))` per vertex.
pub fn exponential_map(rect: &PlanarMesh, length: f64) -> PlanarMesh {
    rect.map(|z| (TAU * (z - length)).exp())
}

/// Tolerance above which welded twin images are considered inconsistent.
pub const WELD_TOLERANCE: f64 = 1e-6;

/// Merges each pair of cut copies into the original vertex (at the average
/// of the two images) and restores the unsliced connectivity.
pub fn weld_seam(annulus: &PlanarMesh, seam: &SeamRecord, original: &TriMesh) -> Result<PlanarMesh> {
    let n = seam.original_vertex_count;
    if original.num_vertices() != n || annulus.num_vertices() != n + seam.path.len() {
        return Err(Error::Argument("seam record does not match the meshes".into()));
    }
    let mut coords = annulus.coords[..n].to_vec();
    for &(top, bottom) in &seam.twin_pairs {
        let (a, b) = (annulus.coords[top], annulus.coords[bottom]);
        let gap = (a - b).norm();
        if !(gap <= WELD_TOLERANCE) {
            return Err(Error::Consistency(format!(
                "cut copies of vertex {bottom} land {gap:.3e} apart"
            )));
        }
        coords[bottom] = 0.5 * (a + b);
    }
    PlanarMesh::on(original, coords)
}

/// Quasi-conformal correction with every boundary vertex held in place:
/// composes `uv` with the solution of the Beltrami equation for the
/// coefficient of its inverse.
pub fn qc_correct(surface: &TriMesh, uv: &PlanarMesh) -> Result<PlanarMesh> {
    let mu = beltrami_of_surface_map(surface, uv)?;
    let fixed = ConstraintSet::fixed_points(
        surface
            .boundary_loops()
            .iter()
            .flatten()
            .map(|&v| (v, uv.coords[v])),
    );
    lbs_solve(uv, &mu, &fixed)
}

pub fn qc_correct_annulus(surface: &TriMesh, annulus: &PlanarMesh) -> Result<PlanarMesh> {
    qc_correct(surface, annulus)
}

pub fn acm(surface: &TriMesh) -> Result<AnnulusResult> {
    acm_with(surface, &AcmOptions::default())
}

pub fn acm_with(surface: &TriMesh, options: &AcmOptions) -> Result<AnnulusResult> {
    let n = surface.boundary_loops().len();
    if n != 2 {
        return Err(Error::Topology(format!(
            "annulus map needs exactly 2 boundary loops, found {n}"
        )));
    }
    let classes = classify_boundaries(surface, options.outer)?;
    let (outer, inner) = (classes.outer, classes.inner[0]);

    let start = match options.start {
        CutStart::LowestIndex => None,
        CutStart::Closest => Some(closest_start(surface, inner, outer)?),
    };
    let path = shortest_path(surface, inner, outer, start)?;
    let (sliced, seam) = slice_along_path(surface, &path)?;
    let mut stages = Vec::new();

    let disk = disk_harmonic_map(&sliced, Some(seam.p()))?;
    stages.push(StageRecord::measure("disk", &sliced, &disk)?);

    let (rect1, _) = rectangular_qc_map(&sliced, &disk, &seam)?;
    let (length, rect) = optimal_length(&sliced, &rect1)?;
    stages.push(StageRecord::measure("rectangle", &sliced, &rect)?);

    let wrapped = exponential_map(&rect, length);
    let mut uv = weld_seam(&wrapped, &seam, surface)?;
    stages.push(StageRecord::measure("annulus", surface, &uv)?);

    if !options.skip_correction {
        uv = qc_correct_annulus(surface, &uv)?;
        stages.push(StageRecord::measure("corrected", surface, &uv)?);
    }

    Ok(AnnulusResult {
        uv,
        inner_radius: (-TAU * length).exp(),
        length,
        outer_loop: outer,
        inner_loop: inner,
        seam,
        stages,
    })
}

/// Radius of every vertex of a loop.
pub fn loop_radii(uv: &PlanarMesh, loop_: &[usize]) -> Vec<f64> {
    loop_.iter().map(|&v| uv.coords[v].norm()).collect()
}

/// `z` rotated so that vertex `anchor` lies on the positive real axis.
pub fn align_rotation(uv: &PlanarMesh, anchor: usize) -> PlanarMesh {
    let r = uv.coords[anchor];
    let rot = if r.norm() > 0.0 { r.conj() / r.norm() } else { Complex64::new(1.0, 0.0) };
    uv.map(|z| z * rot)
}
