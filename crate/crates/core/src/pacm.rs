//! Poly-annulus conformal map: surfaces with `k` holes onto the unit disk
//! with `k` circular holes.
//!
//! Holes are circularized one at a time by filling the others and running the
//! annulus map without its final correction. The composite is then balanced by
//! a disk automorphism, the holes are snapped onto their inscribed circles and
//! a last quasi-conformal composition with fixed boundary restores
//! conformality.

use num_complex::Complex64;

use crate::acm::{acm_with, qc_correct, AcmOptions, StageRecord};
use crate::beltrami::count_flips;
use crate::error::{Error, Result};
use crate::mesh::{PlanarMesh, TriMesh};
use crate::mobius::{mobius_correct, MobiusParam};
use crate::surgery::{classify_boundaries, fill_holes_except, remove_filled, BoundaryClasses};

/// Largest fraction of flipped faces tolerated after one hole iteration.
pub const MAX_FLIP_FRACTION: f64 = 0.05;
const CHEBYSHEV_GRID: usize = 65;
const CHEBYSHEV_REFINEMENTS: usize = 3;
const MIN_HOLE_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

/// Algebraic least-squares circle through the points.
pub fn fit_circle(points: &[Complex64]) -> Circle {
    let n = points.len() as f64;
    let m = points.iter().sum::<Complex64>() / n;
    // centred normal equations of x^2 + y^2 + D x + E y + F = 0
    let (mut suu, mut svv, mut suv, mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (u, v) = (p.re - m.re, p.im - m.im);
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let (b1, b2) = (0.5 * (suuu + suvv), 0.5 * (svvv + svuu));
    let det = suu * svv - suv * suv;
    let c = if det.abs() > 0.0 {
        Complex64::new((b1 * svv - b2 * suv) / det, (suu * b2 - suv * b1) / det)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let center = m + c;
    let radius = points.iter().map(|p| (p - center).norm()).sum::<f64>() / n;
    Circle { center, radius }
}

/// Max deviation of the points from their mean distance to the best-fit
/// centre, divided by that mean distance.
pub fn circularity_defect(points: &[Complex64]) -> f64 {
    let c = fit_circle(points);
    let dev = points
        .iter()
        .map(|p| ((p - c.center).norm() - c.radius).abs())
        .fold(0.0, f64::max);
    dev / c.radius
}

/// Circularity defect of every listed loop after one hole iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct KoebeIteration {
    /// Loop id (in the input surface) circularized by this iteration.
    pub hole: usize,
    pub flips: usize,
    /// `(loop id, defect)` for every hole circularized so far.
    pub defects: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct KoebeResult {
    pub uv: PlanarMesh,
    pub classes: BoundaryClasses,
    pub iterations: Vec<KoebeIteration>,
}

pub fn koebe_loop(surface: &TriMesh) -> Result<PlanarMesh> {
    Ok(koebe_loop_with(surface, None)?.uv)
}

/// Circularizes the inner holes one after another. Each iteration treats the
/// previous planar result as its source geometry.
pub fn koebe_loop_with(surface: &TriMesh, outer: Option<usize>) -> Result<KoebeResult> {
    let loops = surface.boundary_loops();
    if loops.len() < 2 {
        return Err(Error::Topology(format!(
            "poly-annulus map needs at least 2 boundary loops, found {}",
            loops.len()
        )));
    }
    let classes = classify_boundaries(surface, outer)?;
    let anchor = |id: usize| loops[id][0];
    let mut source = surface.clone();
    let mut uv = PlanarMesh::from_xy(surface);
    let mut iterations = Vec::new();
    for (step, &hole) in classes.inner.iter().enumerate() {
        let local = |id: usize, m: &TriMesh| {
            m.loop_of_vertex(anchor(id))
                .ok_or_else(|| Error::Consistency(format!("loop {id} lost during hole filling")))
        };
        let current = BoundaryClasses {
            outer: local(classes.outer, &source)?,
            inner: classes.inner.iter().map(|&h| local(h, &source)).collect::<Result<_>>()?,
        };
        let (filled, record) = fill_holes_except(&source, &current, local(hole, &source)?)?;
        let options = AcmOptions {
            outer: Some(local(classes.outer, &filled)?),
            skip_correction: true,
            ..Default::default()
        };
        let annulus = acm_with(&filled, &options)?;
        uv = remove_filled(&filled, &record, &annulus.uv)?;
        let flips = count_flips(&source, &uv)?;
        if flips as f64 > MAX_FLIP_FRACTION * surface.num_faces() as f64 {
            return Err(Error::Geometry(format!(
                "hole iteration {} flipped {flips} of {} faces",
                step + 1,
                surface.num_faces()
            )));
        }
        let defects = classes.inner[..=step]
            .iter()
            .map(|&h| {
                let pts: Vec<Complex64> = loops[h].iter().map(|&v| uv.coords[v]).collect();
                (h, circularity_defect(&pts))
            })
            .collect();
        iterations.push(KoebeIteration { hole, flips, defects });
        source = TriMesh::from_planar(&uv)?;
    }
    Ok(KoebeResult { uv, classes, iterations })
}

fn polygon_contains(poly: &[Complex64], p: Complex64) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if p.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = if d.norm_sqr() > 0.0 {
        (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + d * t)).norm()
}

fn polygon_distance(poly: &[Complex64], p: Complex64) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Maximum inscribed circle of a simple polygon by multi-resolution grid
/// search for its Chebyshev centre.
pub fn chebyshev_center(poly: &[Complex64]) -> Result<Circle> {
    let (mut lo, mut hi) = (poly[0], poly[0]);
    for p in poly {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let mut half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im);
    let mut center = 0.5 * (lo + hi);
    let mut best = Circle { center, radius: 0.0 };
    let last = (CHEBYSHEV_GRID - 1) as f64;
    for _ in 0..=CHEBYSHEV_REFINEMENTS {
        let cell = 2.0 * half / last;
        for i in 0..CHEBYSHEV_GRID {
            for j in 0..CHEBYSHEV_GRID {
                let p = center + Complex64::new(-half + cell * i as f64, -half + cell * j as f64);
                if !polygon_contains(poly, p) {
                    continue;
                }
                let r = polygon_distance(poly, p);
                if r > best.radius {
                    best = Circle { center: p, radius: r };
                }
            }
        }
        center = best.center;
        half = 2.0 * cell;
    }
    if best.radius < MIN_HOLE_RADIUS {
        return Err(Error::Geometry(format!("degenerate hole (inscribed radius {:.3e})", best.radius)));
    }
    Ok(best)
}

/// Moves every vertex of each hole loop radially onto the hole's maximum
/// inscribed circle. Other vertices are untouched.
pub fn project_holes(uv: &PlanarMesh, holes: &[Vec<usize>]) -> Result<(PlanarMesh, Vec<Circle>)> {
    let mut coords = uv.coords.clone();
    let mut circles = Vec::with_capacity(holes.len());
    for l in holes {
        let poly: Vec<Complex64> = l.iter().map(|&v| uv.coords[v]).collect();
        let c = chebyshev_center(&poly)?;
        for &v in l {
            let d = uv.coords[v] - c.center;
            coords[v] = c.center + d * (c.radius / d.norm());
        }
        circles.push(c);
    }
    Ok((uv.with_coords(coords), circles))
}

pub fn qc_correct_disk(surface: &TriMesh, uv: &PlanarMesh) -> Result<PlanarMesh> {
    qc_correct(surface, uv)
}

#[derive(Debug, Clone)]
pub struct CircularDomain {
    pub uv: PlanarMesh,
    /// Inscribed circles, one per entry of `hole_loops`.
    pub holes: Vec<Circle>,
    /// Inner loop ids of the input surface, in processing order.
    pub hole_loops: Vec<usize>,
    pub outer_loop: usize,
    pub mobius: MobiusParam,
    pub mobius_energy: (f64, f64),
    pub koebe: Vec<KoebeIteration>,
    pub stages: Vec<StageRecord>,
}

impl CircularDomain {
    pub fn hole_of_loop(&self, loop_id: usize) -> Option<Circle> {
        self.hole_loops.iter().position(|&h| h == loop_id).map(|i| self.holes[i])
    }
}

#[derive(Debug, Clone, Default)]
pub struct PacmOptions {
    pub outer: Option<usize>,
    pub skip_correction: bool,
}

pub fn pacm(surface: &TriMesh) -> Result<CircularDomain> {
    pacm_with(surface, &PacmOptions::default())
}

pub fn pacm_with(surface: &TriMesh, options: &PacmOptions) -> Result<CircularDomain> {
    let koebe = koebe_loop_with(surface, options.outer)?;
    let mut stages = vec![StageRecord::measure("koebe", surface, &koebe.uv)?];

    let moved = mobius_correct(surface, &koebe.uv);
    let outer = &surface.boundary_loops()[koebe.classes.outer];
    let mut coords = moved.uv.coords.clone();
    for &v in outer {
        let r = coords[v].norm();
        coords[v] /= r;
    }
    let balanced = moved.uv.with_coords(coords);
    stages.push(StageRecord::measure("mobius", surface, &balanced)?);

    let hole_loops: Vec<Vec<usize>> = koebe
        .classes
        .inner
        .iter()
        .map(|&h| surface.boundary_loops()[h].clone())
        .collect();
    let (mut uv, holes) = project_holes(&balanced, &hole_loops)?;
    stages.push(StageRecord::measure("projected", surface, &uv)?);

    if !options.skip_correction {
        uv = qc_correct_disk(surface, &uv)?;
        stages.push(StageRecord::measure("corrected", surface, &uv)?);
    }

    Ok(CircularDomain {
        uv,
        holes,
        hole_loops: koebe.classes.inner.clone(),
        outer_loop: koebe.classes.outer,
        mobius: moved.param,
        mobius_energy: (moved.energy_before, moved.energy_after),
        koebe: koebe.iterations,
        stages,
    })
}

/// Radius `R` of the concentric annulus `R < |z| < 1` conformally equivalent
/// to the unit disk minus the closed disk `|z - c| <= r`.
pub fn equivalent_inner_radius(hole: Circle) -> f64 {
    let (c, r) = (hole.center.norm(), hole.radius);
    let s = 1.0 + r * r - c * c;
    (s - (s * s - 4.0 * r * r).max(0.0).sqrt()) / (2.0 * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle_points(c: Complex64, r: f64, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| c + Complex64::from_polar(r, TAU * i as f64 / n as f64)).collect()
    }

    #[test]
    fn fit_recovers_circle() {
        let c = fit_circle(&circle_points(Complex64::new(0.3, -0.2), 0.15, 40));
        assert!((c.center - Complex64::new(0.3, -0.2)).norm() < 1e-12);
        assert!((c.radius - 0.15).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_center_of_square() {
        let sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(x, y)| Complex64::new(x, y));
        let c = chebyshev_center(&sq).unwrap();
        assert!((c.center - Complex64::new(0.5, 0.5)).norm() < 1e-6);
        assert!((c.radius - 0.5).abs() < 1e-6);
    }

    #[test]
    fn concentric_equivalent_radius() {
        let r = equivalent_inner_radius(Circle { center: Complex64::new(0.0, 0.0), radius: 0.3 });
        assert!((r - 0.3).abs() < 1e-15);
    }

    #[test]
    fn equivalent_radius_is_mobius_invariant() {
        // image of |z| = 0.3 under the automorphism with alpha = 0.4
        let a = Complex64::new(0.4, 0.0);
        let pts: Vec<Complex64> = circle_points(Complex64::new(0.0, 0.0), 0.3, 64)
            .into_iter()
            .map(|z| crate::mobius::disk_automorphism(a, z))
            .collect();
        let r = equivalent_inner_radius(fit_circle(&pts));
        assert!((r - 0.3).abs() < 1e-10, "{r}");
    }
}
