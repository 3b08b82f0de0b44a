//! Assembly of P1 stiffness systems with Dirichlet elimination and exact DOF
//! merging, solved with a sparse Cholesky factorization.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};

use crate::error::{Error, Result};
use crate::mesh::Face;

pub type ElementMatrix = [[f64; 3]; 3];

/// Relative residual required of every solve.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Scalar constraints on one coordinate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarConstraints {
    pub dirichlet: Vec<(usize, f64)>,
    pub pairs: Vec<(usize, usize)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeps numbering deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

enum Dof {
    Free(usize),
    Fixed(f64),
}

/// The reduced system for one coordinate, factorized once and reusable for
/// several right-hand sides that share the same constrained set.
pub struct ReducedSystem {
    dof: Vec<Dof>,
    class: Vec<usize>,
    matrix: SparseColMat<usize, f64>,
    factor: Factor,
    /// Coupling of free rows to fixed columns, as `(free_row, vertex, value)`.
    coupling: Vec<(usize, usize, f64)>,
}

enum Factor {
    Llt(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
}

impl Factor {
    fn solve(&self, b: &Col<f64>) -> Col<f64> {
        match self {
            Factor::Llt(f) => f.solve(b),
            Factor::Lu(f) => f.solve(b),
        }
    }
}

impl ReducedSystem {
    /// Builds and factorizes the system `K x = 0` on the unknowns left free
    /// by `constraints`. The Dirichlet values themselves enter only at solve
    /// time, through the vertices listed in `constraints.dirichlet`.
    pub fn new(
        num_vertices: usize,
        faces: &[Face],
        elements: &[ElementMatrix],
        constraints: &ScalarConstraints,
    ) -> Result<Self> {
        let n = num_vertices;
        let mut uf = UnionFind::new(n);
        let mut in_pair = vec![false; n];
        for &(a, b) in &constraints.pairs {
            if a >= n || b >= n {
                return Err(Error::Argument(format!("paired vertex ({a}, {b}) out of range")));
            }
            in_pair[a] = true;
            in_pair[b] = true;
            uf.union(a, b);
        }
        let mut fixed: Vec<Option<f64>> = vec![None; n];
        for &(v, val) in &constraints.dirichlet {
            if v >= n {
                return Err(Error::Argument(format!("constrained vertex {v} out of range")));
            }
            if in_pair[v] {
                return Err(Error::Argument(format!(
                    "vertex {v} is both Dirichlet-constrained and paired"
                )));
            }
            if !val.is_finite() {
                return Err(Error::Argument(format!("non-finite value for vertex {v}")));
            }
            fixed[v] = Some(val);
        }
        let class: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
        let mut dof: Vec<Dof> = (0..n).map(|_| Dof::Fixed(0.0)).collect();
        let mut free = 0;
        for v in 0..n {
            if class[v] != v {
                continue;
            }
            dof[v] = match fixed[v] {
                Some(val) => Dof::Fixed(val),
                None => {
                    free += 1;
                    Dof::Free(free - 1)
                }
            };
        }

        check_anchored(n, faces, &class, &dof)?;

        let mut triplets = Vec::with_capacity(faces.len() * 9);
        let mut coupling = Vec::new();
        for (f, k) in faces.iter().zip(elements) {
            for a in 0..3 {
                let Dof::Free(row) = dof[class[f[a]]] else { continue };
                for b in 0..3 {
                    match dof[class[f[b]]] {
                        Dof::Free(col) => triplets.push(Triplet::new(row, col, k[a][b])),
                        Dof::Fixed(_) => coupling.push((row, class[f[b]], k[a][b])),
                    }
                }
            }
        }
        let matrix = SparseColMat::try_new_from_triplets(free, free, &triplets)
            .map_err(|e| Error::Solver(format!("assembly failed: {e:?}")))?;
        let factor = match matrix.sp_cholesky(Side::Lower) {
            Ok(llt) => Factor::Llt(llt),
            Err(_) => Factor::Lu(
                matrix
                    .sp_lu()
                    .map_err(|e| Error::Solver(format!("factorization failed: {e:?}")))?,
            ),
        };
        Ok(Self {
            dof,
            class,
            matrix,
            factor,
            coupling,
        })
    }

    pub fn num_free(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_cholesky(&self) -> bool {
        matches!(self.factor, Factor::Llt(_))
    }

    pub fn matrix(&self) -> &SparseColMat<usize, f64> {
        &self.matrix
    }

    /// Solves with the Dirichlet values registered at construction.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let value = |c: usize| match self.dof[c] {
            Dof::Fixed(v) => v,
            Dof::Free(_) => unreachable!(),
        };
        let nf = self.num_free();
        let mut rhs = Col::<f64>::zeros(nf);
        for &(row, c, k) in &self.coupling {
            rhs[row] -= k * value(c);
        }
        let mut x = self.factor.solve(&rhs);
        let bnorm = rhs.norm_l2();
        let mut rel = if bnorm > 0.0 {
            self.residual(&x, &rhs).norm_l2() / bnorm
        } else {
            0.0
        };
        let mut steps = 0;
        while rel > SOLVER_TOLERANCE && steps < 3 {
            let r = self.residual(&x, &rhs);
            let dx = self.factor.solve(&r);
            x += &dx;
            rel = self.residual(&x, &rhs).norm_l2() / bnorm;
            steps += 1;
        }
        if !(rel <= SOLVER_TOLERANCE) {
            return Err(Error::Solver(format!("relative residual {rel:.3e} above tolerance")));
        }
        Ok((0..self.class.len())
            .map(|v| match self.dof[self.class[v]] {
                Dof::Free(i) => x[i],
                Dof::Fixed(val) => val,
            })
            .collect())
    }

    /// `rhs - K x`
    fn residual(&self, x: &Col<f64>, rhs: &Col<f64>) -> Col<f64> {
        let mut r = rhs.clone();
        let m = self.matrix.as_ref();
        for j in 0..m.ncols() {
            let rows = m.row_idx_of_col_raw(j);
            let vals = m.val_of_col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                r[i] -= v * x[j];
            }
        }
        r
    }
}

/// Every connected component of free unknowns must touch a fixed value,
/// otherwise the reduced matrix is singular.
fn check_anchored(n: usize, faces: &[Face], class: &[usize], dof: &[Dof]) -> Result<()> {
    let mut uf = UnionFind::new(n);
    for f in faces {
        uf.union(class[f[0]], class[f[1]]);
        uf.union(class[f[1]], class[f[2]]);
    }
    let mut anchored = vec![false; n];
    let mut used = vec![false; n];
    for v in 0..n {
        let c = class[v];
        let root = uf.find(c);
        used[root] = true;
        if matches!(dof[c], Dof::Fixed(_)) {
            anchored[root] = true;
        }
    }
    // isolated vertices never appear in a face and stay at their own class
    let referenced: Vec<bool> = {
        let mut r = vec![false; n];
        faces.iter().flatten().for_each(|&v| r[class[v]] = true);
        r
    };
    for v in 0..n {
        let root = uf.find(class[v]);
        if referenced[class[v]] && used[root] && !anchored[root] {
            return Err(Error::Solver(
                "constrained system is singular: a component has no fixed value".into(),
            ));
        }
    }
    Ok(())
}

/// Convenience: build, factorize and solve in one go.
pub fn solve_scalar(
    num_vertices: usize,
    faces: &[Face],
    elements: &[ElementMatrix],
    constraints: &ScalarConstraints,
) -> Result<Vec<f64>> {
    ReducedSystem::new(num_vertices, faces, elements, constraints)?.solve()
}
