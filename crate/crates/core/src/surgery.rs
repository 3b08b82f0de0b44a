//! Topological surgery: boundary classification, cut paths, slicing along a
//! path, and temporary hole filling.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::mesh::{dist, Face, PlanarMesh, TriMesh};

/// Outer loop id and inner loop ids (longest first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryClasses {
    pub outer: usize,
    pub inner: Vec<usize>,
}

/// Designates the outer boundary and orders the inner ones.
///
/// Without an override the longest loop is outer; ties go to the loop whose
/// lowest vertex index is smaller. Inner loops are sorted by decreasing length
/// with the same tie rule.
pub fn classify_boundaries(mesh: &TriMesh, outer_override: Option<usize>) -> Result<BoundaryClasses> {
    let n = mesh.boundary_loops().len();
    if n == 0 {
        return Err(Error::Topology("mesh has no boundary".into()));
    }
    let mut order: Vec<(usize, f64)> = (0..n).map(|i| (i, mesh.loop_length(i))).collect();
    // Loops are stored sorted by their lowest vertex, so the id doubles as the tie-break key.
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    let outer = match outer_override {
        Some(id) if id >= n => {
            return Err(Error::Argument(format!("outer loop {id} does not exist ({n} loops)")))
        }
        Some(id) => id,
        None => order[0].0,
    };
    let inner = order.into_iter().map(|(i, _)| i).filter(|&i| i != outer).collect();
    Ok(BoundaryClasses { outer, inner })
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    vertex: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest edge path from a vertex of `from_loop` to any vertex of `to_loop`.
///
/// The source defaults to the lowest-index vertex of `from_loop`. Boundary
/// vertices other than the source and the `to_loop` targets cannot appear on
/// the path, so its interior is strictly interior to the surface.
pub fn shortest_path(
    mesh: &TriMesh,
    from_loop: usize,
    to_loop: usize,
    start: Option<usize>,
) -> Result<Vec<usize>> {
    let loops = mesh.boundary_loops();
    if from_loop >= loops.len() || to_loop >= loops.len() {
        return Err(Error::Argument("boundary loop id out of range".into()));
    }
    if from_loop == to_loop {
        return Err(Error::Argument("cut path needs two distinct boundary loops".into()));
    }
    let source = match start {
        Some(v) if !loops[from_loop].contains(&v) => {
            return Err(Error::Argument(format!("start vertex {v} is not on loop {from_loop}")))
        }
        Some(v) => v,
        None => *loops[from_loop].iter().min().unwrap(),
    };

    let membership = mesh.boundary_membership();
    let adj = mesh.adjacency();
    let pts = mesh.vertices();
    let nv = mesh.num_vertices();
    let mut best = vec![f64::INFINITY; nv];
    let mut prev = vec![usize::MAX; nv];
    let mut heap = BinaryHeap::new();
    best[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        vertex: source,
    });
    let mut target = None;
    while let Some(State { cost, vertex }) = heap.pop() {
        if cost > best[vertex] {
            continue;
        }
        if membership[vertex] == Some(to_loop) {
            target = Some(vertex);
            break;
        }
        for &w in &adj[vertex] {
            // Other boundary vertices carry infinite weight.
            if matches!(membership[w], Some(l) if l != to_loop) {
                continue;
            }
            let c = cost + dist(&pts[vertex], &pts[w]);
            if c < best[w] {
                best[w] = c;
                prev[w] = vertex;
                heap.push(State { cost: c, vertex: w });
            }
        }
    }
    let mut v = target.ok_or_else(|| {
        Error::Topology(format!("no admissible path from loop {from_loop} to loop {to_loop}"))
    })?;
    let mut path = vec![v];
    while v != source {
        v = prev[v];
        path.push(v);
    }
    path.reverse();
    Ok(path)
}

/// Vertex of `from_loop` closest to `to_loop` along admissible paths (ties
/// go to the lower index).
pub fn closest_start(mesh: &TriMesh, from_loop: usize, to_loop: usize) -> Result<usize> {
    let loops = mesh.boundary_loops();
    if from_loop >= loops.len() || to_loop >= loops.len() || from_loop == to_loop {
        return Err(Error::Argument("need two distinct boundary loop ids".into()));
    }
    let membership = mesh.boundary_membership();
    let adj = mesh.adjacency();
    let pts = mesh.vertices();
    let mut best = vec![f64::INFINITY; mesh.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &v in &loops[to_loop] {
        best[v] = 0.0;
        heap.push(State { cost: 0.0, vertex: v });
    }
    while let Some(State { cost, vertex }) = heap.pop() {
        if cost > best[vertex] || membership[vertex] == Some(from_loop) {
            continue;
        }
        for &w in &adj[vertex] {
            if matches!(membership[w], Some(l) if l != from_loop) {
                continue;
            }
            let c = cost + dist(&pts[vertex], &pts[w]);
            if c < best[w] {
                best[w] = c;
                heap.push(State { cost: c, vertex: w });
            }
        }
    }
    let mut candidates = loops[from_loop].clone();
    candidates.sort_unstable();
    candidates
        .into_iter()
        .filter(|&v| best[v].is_finite())
        .min_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap_or(Ordering::Equal))
        .ok_or_else(|| Error::Topology(format!("no admissible path from loop {from_loop} to loop {to_loop}")))
}

pub fn path_length(mesh: &TriMesh, path: &[usize]) -> f64 {
    path.windows(2)
        .map(|w| dist(&mesh.vertices()[w[0]], &mesh.vertices()[w[1]]))
        .sum()
}

/// Bookkeeping of a slice along a cut path.
///
/// Original vertices keep their ids; the copy of `path[i]` is vertex
/// `original_vertex_count + i`. Faces on the left of the path (walking from the
/// inner to the outer boundary) keep the originals, faces on the right use the
/// copies.
#[derive(Debug, Clone, PartialEq)]
pub struct SeamRecord {
    pub path: Vec<usize>,
    /// `(top_copy, bottom_copy)` per path vertex, in path order.
    pub twin_pairs: Vec<(usize, usize)>,
    /// `[p, p', q, q']`: inner endpoint, its copy, outer endpoint, its copy.
    pub corner_ids: [usize; 4],
    pub original_vertex_count: usize,
}

impl SeamRecord {
    pub fn p(&self) -> usize {
        self.corner_ids[0]
    }
    pub fn p_twin(&self) -> usize {
        self.corner_ids[1]
    }
    pub fn q(&self) -> usize {
        self.corner_ids[2]
    }
    pub fn q_twin(&self) -> usize {
        self.corner_ids[3]
    }
    /// Path vertices as seen from below (originals).
    pub fn bottom(&self) -> impl Iterator<Item = usize> + '_ {
        self.twin_pairs.iter().map(|&(_, b)| b)
    }
    /// Path vertex copies.
    pub fn top(&self) -> impl Iterator<Item = usize> + '_ {
        self.twin_pairs.iter().map(|&(t, _)| t)
    }
}

/// Cuts the surface open along `path`, which must run from one boundary loop
/// to a different one through interior vertices.
pub fn slice_along_path(mesh: &TriMesh, path: &[usize]) -> Result<(TriMesh, SeamRecord)> {
    let m = path.len();
    if m < 2 {
        return Err(Error::Argument("cut path needs at least two vertices".into()));
    }
    let mut sorted = path.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Argument("cut path is not simple".into()));
    }
    let membership = mesh.boundary_membership();
    let (start_loop, end_loop) = (membership[path[0]], membership[path[m - 1]]);
    if start_loop.is_none() || end_loop.is_none() || start_loop == end_loop {
        return Err(Error::Argument(
            "cut path endpoints must lie on two distinct boundary loops".into(),
        ));
    }
    if path[1..m - 1].iter().any(|&v| membership[v].is_some()) {
        return Err(Error::Argument("cut path interior touches the boundary".into()));
    }

    let faces = mesh.faces();
    let nv = mesh.num_vertices();
    let position: HashMap<usize, usize> = path.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let is_cut = |a: usize, b: usize| match (position.get(&a), position.get(&b)) {
        (Some(&i), Some(&j)) => i.abs_diff(j) == 1,
        _ => false,
    };

    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for &v in f {
            if position.contains_key(&v) {
                incident.entry(v).or_default().push(fi);
            }
        }
    }
    // Faces owning half-edge b->a of a path edge a->b lie right of the path.
    let mut right_seed: HashMap<usize, usize> = HashMap::new();
    let mut left_seed: HashMap<usize, usize> = HashMap::new();
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (x, y) = (f[k], f[(k + 1) % 3]);
                if x == b && y == a {
                    right_seed.insert(a, fi);
                    right_seed.insert(b, fi);
                } else if x == a && y == b {
                    left_seed.insert(a, fi);
                    left_seed.insert(b, fi);
                }
            }
        }
        if !right_seed.contains_key(&a) || !left_seed.contains_key(&a) {
            return Err(Error::Argument(format!("cut edge ({a}, {b}) is not an interior edge")));
        }
    }

    let mut new_faces: Vec<Face> = faces.to_vec();
    for (i, &v) in path.iter().enumerate() {
        let fan = &incident[&v];
        let sector = local_sector(faces, v, fan, right_seed[&v], &is_cut);
        if sector.contains(&left_seed[&v]) {
            return Err(Error::Argument(format!(
                "cut path does not separate the neighbourhood of vertex {v}"
            )));
        }
        let copy = nv + i;
        for fi in sector {
            for slot in new_faces[fi].iter_mut() {
                if *slot == v {
                    *slot = copy;
                }
            }
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    vertices.extend(path.iter().map(|&v| mesh.vertices()[v]));
    let sliced = TriMesh::new(vertices, new_faces)?;
    if sliced.boundary_loops().len() != 1 || sliced.euler_characteristic() != 1 {
        return Err(Error::Consistency("slicing did not produce a topological disk".into()));
    }
    let record = SeamRecord {
        path: path.to_vec(),
        twin_pairs: path.iter().enumerate().map(|(i, &v)| (nv + i, v)).collect(),
        corner_ids: [path[0], nv, path[m - 1], nv + m - 1],
        original_vertex_count: nv,
    };
    Ok((sliced, record))
}

/// Faces around `v` reachable from `seed` without crossing a cut edge.
fn local_sector(
    faces: &[Face],
    v: usize,
    fan: &[usize],
    seed: usize,
    is_cut: &impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    let others = |fi: usize| -> [usize; 2] {
        let f = faces[fi];
        let k = f.iter().position(|&x| x == v).unwrap();
        [f[(k + 1) % 3], f[(k + 2) % 3]]
    };
    let mut sector = vec![seed];
    let mut stack = vec![seed];
    while let Some(fi) = stack.pop() {
        for w in others(fi) {
            if is_cut(v, w) {
                continue;
            }
            for &gi in fan {
                if !sector.contains(&gi) && others(gi).contains(&w) {
                    sector.push(gi);
                    stack.push(gi);
                }
            }
        }
    }
    sector
}

/// Re-identifies the twin vertices of a sliced mesh, restoring the original
/// connectivity. Used to check slicing round trips.
pub fn weld_faces(sliced: &TriMesh, seam: &SeamRecord) -> Vec<Face> {
    let n = seam.original_vertex_count;
    sliced
        .faces()
        .iter()
        .map(|f| f.map(|v| if v >= n { seam.path[v - n] } else { v }))
        .collect()
}

/// A hole closed by a fan around an added centre vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FilledHole {
    pub loop_id: usize,
    pub center: usize,
    pub faces: std::ops::Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FillRecord {
    pub holes: Vec<FilledHole>,
    pub original_vertex_count: usize,
    pub original_face_count: usize,
}

impl FillRecord {
    pub fn is_empty(&self) -> bool {
        self.holes.is_empty()
    }
}

/// Closes every inner boundary loop except `keep` with a centroid fan.
///
/// Added vertices and faces are appended, so original ids are unchanged.
pub fn fill_holes_except(
    mesh: &TriMesh,
    classes: &BoundaryClasses,
    keep: usize,
) -> Result<(TriMesh, FillRecord)> {
    if !classes.inner.contains(&keep) {
        return Err(Error::Argument(format!("loop {keep} is not an inner boundary")));
    }
    let mut vertices = mesh.vertices().to_vec();
    let mut faces = mesh.faces().to_vec();
    let mut record = FillRecord {
        holes: Vec::new(),
        original_vertex_count: mesh.num_vertices(),
        original_face_count: mesh.num_faces(),
    };
    for &id in &classes.inner {
        if id == keep {
            continue;
        }
        let l = &mesh.boundary_loops()[id];
        let mut c = [0.0; 3];
        for &v in l {
            for k in 0..3 {
                c[k] += mesh.vertices()[v][k];
            }
        }
        c.iter_mut().for_each(|x| *x /= l.len() as f64);
        let center = vertices.len();
        vertices.push(c);
        let first = faces.len();
        for i in 0..l.len() {
            let (a, b) = (l[i], l[(i + 1) % l.len()]);
            faces.push([b, a, center]);
        }
        record.holes.push(FilledHole {
            loop_id: id,
            center,
            faces: first..faces.len(),
        });
    }
    if record.is_empty() {
        return Ok((mesh.clone(), record));
    }
    Ok((TriMesh::new(vertices, faces)?, record))
}

/// Drops the vertices and faces added by [`fill_holes_except`].
pub fn remove_filled(filled: &TriMesh, record: &FillRecord, coords: &PlanarMesh) -> Result<PlanarMesh> {
    let extra_v = record.holes.len();
    let extra_f: usize = record.holes.iter().map(|h| h.faces.len()).sum();
    let consistent = filled.num_vertices() == record.original_vertex_count + extra_v
        && filled.num_faces() == record.original_face_count + extra_f
        && coords.num_vertices() == filled.num_vertices()
        && record
            .holes
            .iter()
            .all(|h| h.center >= record.original_vertex_count && h.faces.start >= record.original_face_count);
    if !consistent {
        return Err(Error::Argument("fill record does not match the mesh".into()));
    }
    let faces: Vec<Face> = filled.faces()[..record.original_face_count].to_vec();
    Ok(PlanarMesh {
        faces: faces.into(),
        coords: coords.coords[..record.original_vertex_count].to_vec(),
    })
}
