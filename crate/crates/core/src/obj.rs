//! Wavefront OBJ reading and writing (triangles only).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{Face, PlanarMesh, Point3, TriMesh};

/// Raw records of an OBJ file: positions, triangles, and per-vertex texture
/// coordinates when every face corner carries one consistently.
#[derive(Debug, Clone, Default)]
pub struct ObjData {
    pub vertices: Vec<Point3>,
    pub faces: Vec<Face>,
    pub uv: Option<Vec<[f64; 2]>>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn resolve(token: &str, count: usize, line: usize) -> Result<usize> {
    let raw: i64 = token
        .parse()
        .map_err(|_| format_err(line, format!("bad index `{token}`")))?;
    let idx = if raw < 0 { count as i64 + raw } else { raw - 1 };
    if idx < 0 || idx as usize >= count {
        return Err(format_err(line, format!("index {raw} out of range")));
    }
    Ok(idx as usize)
}

pub fn parse_obj(text: &str) -> Result<ObjData> {
    let mut vertices = Vec::new();
    let mut texcoords: Vec<[f64; 2]> = Vec::new();
    let mut faces = Vec::new();
    let mut corner_uv: Vec<Option<[usize; 3]>> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let mut it = raw.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in &mut p {
                    let tok = it.next().ok_or_else(|| format_err(line, "vertex needs 3 coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| format_err(line, format!("bad coordinate `{tok}`")))?;
                }
                vertices.push(p);
            }
            Some("vt") => {
                let mut t = [0.0; 2];
                for c in &mut t {
                    let tok = it.next().ok_or_else(|| format_err(line, "vt needs 2 coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| format_err(line, format!("bad texture coordinate `{tok}`")))?;
                }
                texcoords.push(t);
            }
            Some("f") => {
                let corners: Vec<&str> = it.collect();
                if corners.len() != 3 {
                    return Err(format_err(
                        line,
                        format!("face has {} corners; only triangles are supported", corners.len()),
                    ));
                }
                let mut f = [0; 3];
                let mut t = [0; 3];
                let mut has_t = true;
                for (k, c) in corners.iter().enumerate() {
                    let mut parts = c.split('/');
                    f[k] = resolve(parts.next().unwrap_or(""), vertices.len(), line)?;
                    match parts.next() {
                        Some(s) if !s.is_empty() => t[k] = resolve(s, texcoords.len(), line)?,
                        _ => has_t = false,
                    }
                }
                faces.push(f);
                corner_uv.push(has_t.then_some(t));
            }
            _ => {}
        }
    }

    let uv = per_vertex_uv(vertices.len(), &faces, &texcoords, &corner_uv);
    Ok(ObjData {
        vertices,
        faces,
        uv,
    })
}

fn per_vertex_uv(
    nv: usize,
    faces: &[Face],
    texcoords: &[[f64; 2]],
    corner_uv: &[Option<[usize; 3]>],
) -> Option<Vec<[f64; 2]>> {
    if faces.is_empty() || texcoords.is_empty() {
        return None;
    }
    let mut uv: Vec<Option<[f64; 2]>> = vec![None; nv];
    for (f, t) in faces.iter().zip(corner_uv) {
        let t = (*t)?;
        for k in 0..3 {
            let val = texcoords[t[k]];
            match uv[f[k]] {
                None => uv[f[k]] = Some(val),
                // a vertex with several distinct vt values is a seam; not a single chart
                Some(old) if old != val => return None,
                _ => {}
            }
        }
    }
    uv.into_iter().collect()
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<ObjData> {
    parse_obj(&fs::read_to_string(path)?)
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let data = read_obj(path)?;
    TriMesh::new(data.vertices, data.faces)
}

/// Loads a mesh and, if present, its per-vertex texture coordinates.
pub fn load_mesh_with_uv(path: impl AsRef<Path>) -> Result<(TriMesh, Option<PlanarMesh>)> {
    let data = read_obj(path)?;
    let mesh = TriMesh::new(data.vertices, data.faces)?;
    let uv = match data.uv {
        Some(uv) => Some(PlanarMesh::on(
            &mesh,
            uv.into_iter().map(|[u, v]| Complex64::new(u, v)).collect(),
        )?),
        None => None,
    };
    Ok((mesh, uv))
}

pub fn write_obj_string(mesh: &TriMesh, uv: Option<&PlanarMesh>) -> Result<String> {
    if let Some(uv) = uv {
        if uv.num_vertices() != mesh.num_vertices() {
            return Err(Error::Argument(format!(
                "{} texture coordinates for {} vertices",
                uv.num_vertices(),
                mesh.num_vertices()
            )));
        }
    }
    let mut s = String::new();
    for p in mesh.vertices() {
        writeln!(s, "v {:.9} {:.9} {:.9}", p[0], p[1], p[2]).unwrap();
    }
    if let Some(uv) = uv {
        for z in &uv.coords {
            writeln!(s, "vt {:.9} {:.9}", z.re, z.im).unwrap();
        }
    }
    for f in mesh.faces() {
        let [a, b, c] = f.map(|v| v + 1);
        if uv.is_some() {
            writeln!(s, "f {a}/{a} {b}/{b} {c}/{c}").unwrap();
        } else {
            writeln!(s, "f {a} {b} {c}").unwrap();
        }
    }
    Ok(s)
}

pub fn save_mesh(mesh: &TriMesh, uv: Option<&PlanarMesh>, path: impl AsRef<Path>) -> Result<()> {
    let s = write_obj_string(mesh, uv)?;
    fs::write(path, s)?;
    Ok(())
}
