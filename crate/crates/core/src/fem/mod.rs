//! Linear-triangle discretization of `Δu = f` with Dirichlet data, including
//! hole loops that carry a single unknown constant each.

pub mod solver;
pub mod sparse;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{LoopTag, ScalarField, TriMesh};
use crate::quadrature::{self, Point};
pub use solver::{Method, SolveStats, SolverOptions};
pub use sparse::CsrMatrix;

/// Right-hand side `f` of `Δu = f`.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    Constant(f64),
    /// One value per triangle.
    PerElement(&'a [f64]),
    Function(&'a dyn Fn(Point) -> f64),
}

impl std::fmt::Debug for Source<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Constant(c) => write!(f, "Constant({c})"),
            Source::PerElement(v) => write!(f, "PerElement({} values)", v.len()),
            Source::Function(_) => write!(f, "Function"),
        }
    }
}

/// Unconstrained stiffness matrix and load vector. The discrete equations at
/// free nodes read `K u = -load`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub mesh: Arc<TriMesh>,
    pub matrix: CsrMatrix,
    /// `∫ f N_i dA`
    pub load: Vec<f64>,
}

impl LinearSystem {
    /// `-load - K u`, the residual of the unconstrained equations.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.matrix.mul(u).iter().zip(&self.load).map(|(ku, f)| -f - ku).collect()
    }

    /// `½ uᵀKu + loadᵀu`, the discrete energy whose minimizer solves the system.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let ku = self.matrix.mul(u);
        u.iter().zip(&ku).zip(&self.load).map(|((ui, kui), fi)| 0.5 * ui * kui + fi * ui).sum()
    }
}

/// Element stiffness `area · ∇N_a · ∇N_b`.
pub fn element_matrix(grads: &[[f64; 2]; 3], area: f64) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] = area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
        }
    }
    k
}

pub fn assemble(mesh: &Arc<TriMesh>, source: Source<'_>) -> Result<LinearSystem> {
    let n = mesh.node_count();
    let nt = mesh.triangle_count();
    if let Source::PerElement(v) = source {
        if v.len() != nt {
            return Err(Error::FieldMismatch(format!("{} source values for {} triangles", v.len(), nt)));
        }
    }
    let floor = 1e-14 * mesh.diameter().powi(2);
    let mut triplets = Vec::with_capacity(9 * nt);
    let mut load = vec![0.0; n];
    for t in 0..nt {
        let (grads, area) = mesh.basis_gradients(t);
        if !(area > floor) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        let tri = mesh.triangles()[t];
        let ke = element_matrix(&grads, area);
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((tri[a], tri[b], ke[a][b]));
            }
        }
        match source {
            Source::Constant(c) => {
                for &i in &tri {
                    load[i] += c * area / 3.0;
                }
            }
            Source::PerElement(v) => {
                for &i in &tri {
                    load[i] += v[t] * area / 3.0;
                }
            }
            Source::Function(f) => {
                let verts = mesh.vertices(t);
                for (q, bary) in quadrature::BARYCENTRIC.iter().enumerate() {
                    let fq = f(quadrature::points(&verts)[q]) * quadrature::WEIGHT * area;
                    for a in 0..3 {
                        load[tri[a]] += fq * bary[a];
                    }
                }
            }
        }
    }
    if let Some(i) = load.iter().position(|v| !v.is_finite()) {
        return Err(Error::FieldMismatch(format!("non-finite source load at node {i}")));
    }
    Ok(LinearSystem { mesh: Arc::clone(mesh), matrix: CsrMatrix::from_triplets(n, triplets), load })
}

#[derive(Debug, Clone, PartialEq)]
pub enum HoleMode {
    /// Hole nodes take their values from the boundary data.
    Fixed,
    /// Each hole loop is one unknown; `extra_rhs[k]` is added to its equation.
    Floating { extra_rhs: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dof {
    Free(usize),
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub field: ScalarField,
    /// Solved hole values in floating mode, empty otherwise.
    pub hole_constants: Vec<f64>,
    pub stats: SolveStats,
}

/// Applies boundary data (indexed by node, read only on boundary nodes) and
/// solves the condensed system.
pub fn solve_dirichlet(
    sys: &LinearSystem,
    boundary: &[Option<f64>],
    mode: &HoleMode,
    opts: &SolverOptions,
) -> Result<DirichletSolution> {
    let mesh = &sys.mesh;
    let n = mesh.node_count();
    let holes = mesh.hole_count();
    if boundary.len() != n {
        return Err(Error::FieldMismatch(format!("{} boundary entries for {} nodes", boundary.len(), n)));
    }
    if let HoleMode::Floating { extra_rhs } = mode {
        if extra_rhs.len() != holes {
            return Err(Error::FieldMismatch(format!("{} hole loads for {} holes", extra_rhs.len(), holes)));
        }
    }
    let floating = matches!(mode, HoleMode::Floating { .. });
    let loops = mesh.node_loops();
    let mut dofs = Vec::with_capacity(n);
    let mut free = if floating { holes } else { 0 };
    for (node, tag) in loops.iter().enumerate() {
        let dof = match tag {
            Some(LoopTag::Hole(k)) if floating => Dof::Free(*k),
            Some(tag) => match boundary[node] {
                Some(v) if v.is_finite() => Dof::Fixed(v),
                _ => return Err(Error::MissingBoundaryData { node, tag: *tag }),
            },
            None => {
                free += 1;
                Dof::Free(free - 1)
            }
        };
        dofs.push(dof);
    }
    let mut rhs = vec![0.0; free];
    if let HoleMode::Floating { extra_rhs } = mode {
        rhs[..holes].copy_from_slice(extra_rhs);
    }
    let mut triplets = Vec::with_capacity(sys.matrix.nnz());
    for i in 0..n {
        let Dof::Free(a) = dofs[i] else { continue };
        rhs[a] -= sys.load[i];
        for (j, v) in sys.matrix.row(i) {
            match dofs[j] {
                Dof::Free(b) => triplets.push((a, b, v)),
                Dof::Fixed(g) => rhs[a] -= v * g,
            }
        }
    }
    let reduced = CsrMatrix::from_triplets(free, triplets);
    let (x, stats) = solver::solve(&reduced, &rhs, opts)?;
    let values = dofs
        .iter()
        .map(|d| match *d {
            Dof::Free(a) => x[a],
            Dof::Fixed(g) => g,
        })
        .collect();
    let hole_constants = if floating { x[..holes].to_vec() } else { Vec::new() };
    Ok(DirichletSolution { field: ScalarField::new(Arc::clone(mesh), values)?, hole_constants, stats })
}

/// Element gradients of the piecewise-linear interpolant.
pub fn gradient_field(u: &ScalarField) -> Vec<[f64; 2]> {
    let mesh = &u.mesh;
    (0..mesh.triangle_count())
        .map(|t| {
            let (g, _) = mesh.basis_gradients(t);
            let tri = mesh.triangles()[t];
            let mut d = [0.0; 2];
            for a in 0..3 {
                d[0] += u.values[tri[a]] * g[a][0];
                d[1] += u.values[tri[a]] * g[a][1];
            }
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Material, SectionSpec, Shape};
    use crate::mesh::{refine, triangulate};

    fn mesh(shape: Shape, h: f64) -> Arc<TriMesh> {
        let s = SectionSpec::new("t", shape, Material::new(1.0, 0.3).unwrap()).unwrap();
        Arc::new(triangulate(&s, h).unwrap())
    }

    fn square(h: f64) -> Arc<TriMesh> {
        mesh(Shape::Rectangle { width: 1.0, height: 1.0 }, h)
    }

    fn disk(h: f64) -> Arc<TriMesh> {
        mesh(Shape::Circle { radius: 1.0 }, h)
    }

    fn zero_data(m: &TriMesh) -> Vec<Option<f64>> {
        m.node_loops().iter().map(|t| t.map(|_| 0.0)).collect()
    }

    #[test]
    fn reference_element() {
        let tags = vec![Some(LoopTag::Outer); 3];
        let m = TriMesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], &tags, vec![(LoopTag::Outer, None)])
            .unwrap();
        let sys = assemble(&Arc::new(m), Source::Constant(0.0)).unwrap();
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((sys.matrix.get(i, j) - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn load_and_kernel() {
        let m = square(0.1);
        let sys = assemble(&m, Source::Constant(-2.0)).unwrap();
        assert!((sys.load.iter().sum::<f64>() + 2.0).abs() < 1e-13);
        let ones = vec![1.0; m.node_count()];
        assert!(sys.matrix.mul(&ones).iter().all(|r| r.abs() < 1e-12));
        assert!(sys.matrix.symmetry_defect() < 1e-12);
        let f = |p: Point| -2.0 + 0.0 * p[0];
        let via_fn = assemble(&m, Source::Function(&f)).unwrap();
        for (a, b) in sys.load.iter().zip(&via_fn.load) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn patch_test() {
        let m = square(0.1);
        let sys = assemble(&m, Source::Constant(0.0)).unwrap();
        let data: Vec<Option<f64>> = m.node_loops().iter().zip(m.nodes()).map(|(t, p)| t.map(|_| p[0])).collect();
        let sol = solve_dirichlet(&sys, &data, &HoleMode::Fixed, &SolverOptions::default()).unwrap();
        for (u, p) in sol.field.values.iter().zip(m.nodes()) {
            assert!((u - p[0]).abs() < 1e-9);
        }
        for g in gradient_field(&sol.field) {
            assert!((g[0] - 1.0).abs() < 1e-9 && g[1].abs() < 1e-9);
        }
    }

    #[test]
    fn cg_path_matches_direct() {
        let m = disk(0.05);
        let sys = assemble(&m, Source::Constant(-2.0)).unwrap();
        let data = zero_data(&m);
        let direct = solve_dirichlet(&sys, &data, &HoleMode::Fixed, &SolverOptions::default()).unwrap();
        let opts = SolverOptions { direct_threshold: 0, ..Default::default() };
        let iter = solve_dirichlet(&sys, &data, &HoleMode::Fixed, &opts).unwrap();
        assert_eq!(direct.stats.method, Method::Cholesky);
        assert_eq!(iter.stats.method, Method::Cg);
        assert!(iter.stats.relative_residual <= 1e-10);
        for (a, b) in direct.field.values.iter().zip(&iter.field.values) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn disk_center_value() {
        let m = disk(0.05);
        let sys = assemble(&m, Source::Constant(-2.0)).unwrap();
        let sol = solve_dirichlet(&sys, &zero_data(&m), &HoleMode::Fixed, &SolverOptions::default()).unwrap();
        let centre = m.nodes().iter().position(|p| p[0].hypot(p[1]) < 1e-12).unwrap();
        assert!((sol.field.values[centre] - 0.5).abs() / 0.5 < 0.01);
    }

    #[test]
    fn annulus_hole_constant() {
        let mut prev = f64::INFINITY;
        for h in [0.1, 0.05, 0.025] {
            let m = mesh(Shape::Annulus { outer: 1.0, inner: 0.5 }, h);
            let sys = assemble(&m, Source::Constant(-2.0)).unwrap();
            let extra: Vec<f64> = m.hole_areas().iter().map(|a| 2.0 * a).collect();
            let sol = solve_dirichlet(&sys, &zero_data(&m), &HoleMode::Floating { extra_rhs: extra }, &SolverOptions::default())
                .unwrap();
            let err = (sol.hole_constants[0] - 0.375).abs();
            assert!(err < prev);
            prev = err;
            let hole_nodes: Vec<usize> =
                m.node_loops().iter().enumerate().filter(|(_, t)| **t == Some(LoopTag::Hole(0))).map(|(i, _)| i).collect();
            assert!(hole_nodes.iter().all(|&i| sol.field.values[i] == sol.hole_constants[0]));
        }
        assert!(prev < 2e-3);
    }

    #[test]
    fn galerkin_orthogonality() {
        let m = disk(0.05);
        let f = |p: Point| -2.0 + p[0] * p[1];
        let sys = assemble(&m, Source::Function(&f)).unwrap();
        let opts = SolverOptions { direct_threshold: 0, ..Default::default() };
        let sol = solve_dirichlet(&sys, &zero_data(&m), &HoleMode::Fixed, &opts).unwrap();
        let r = sys.residual(&sol.field.values);
        let rhs_norm = sys.load.iter().map(|x| x * x).sum::<f64>().sqrt();
        let loops = m.node_loops();
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..20 {
            let v: Vec<f64> = loops
                .iter()
                .map(|t| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    if t.is_some() {
                        0.0
                    } else {
                        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
                    }
                })
                .collect();
            let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = v.iter().zip(&r).map(|(a, b)| a * b).sum();
            assert!(dot.abs() / vn <= 1e-10 * rhs_norm);
        }
    }

    #[test]
    fn energy_decreases_under_refinement() {
        // The minimum of ½|∇u|² - 2u over nested spaces is non-increasing;
        // equivalently the torsion-type functional 2∫u grows toward π/2.
        let mut m = disk(0.2);
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            let sys = assemble(&m, Source::Constant(-2.0)).unwrap();
            let sol = solve_dirichlet(&sys, &zero_data(&m), &HoleMode::Fixed, &SolverOptions::default()).unwrap();
            let e = sys.energy(&sol.field.values);
            assert!(e <= last + 1e-12 * e.abs());
            last = e;
            m = Arc::new(refine(&m));
        }
        assert!((last + std::f64::consts::PI / 4.0).abs() < 0.01);
    }

    #[test]
    fn maximum_principle() {
        let m = disk(0.05);
        let sys = assemble(&m, Source::Constant(-2.0)).unwrap();
        let sol = solve_dirichlet(&sys, &zero_data(&m), &HoleMode::Fixed, &SolverOptions::default()).unwrap();
        for (u, t) in sol.field.values.iter().zip(m.node_loops()) {
            if t.is_none() {
                assert!(*u > 0.0);
            }
        }
    }

    #[test]
    fn gradients() {
        let m = square(0.05);
        let q = ScalarField::from_fn(Arc::clone(&m), |p| p[0] * p[0] + p[1] * p[1]);
        for (t, g) in gradient_field(&q).iter().enumerate() {
            let c = m.centroid(t);
            assert!((g[0] - 2.0 * c[0]).abs() <= 2.0 * m.h() && (g[1] - 2.0 * c[1]).abs() <= 2.0 * m.h());
        }
        let k = ScalarField::from_fn(Arc::clone(&m), |_| 3.0);
        assert!(gradient_field(&k).iter().all(|g| g[0].abs() < 1e-12 && g[1].abs() < 1e-12));
    }

    #[test]
    fn missing_data_is_reported() {
        let m = square(0.3);
        let sys = assemble(&m, Source::Constant(1.0)).unwrap();
        let data = vec![None; m.node_count()];
        assert!(matches!(
            solve_dirichlet(&sys, &data, &HoleMode::Fixed, &SolverOptions::default()),
            Err(Error::MissingBoundaryData { tag: LoopTag::Outer, .. })
        ));
    }
}
