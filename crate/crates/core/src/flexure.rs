//! Saint-Venant flexure for a unit shear force along a principal axis, in
//! stress variables `s = s0 + curl φ`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{assemble, gradient_field, solve_dirichlet, HoleMode, SolveStats, SolverOptions, Source};
use crate::field::{Direction, FieldOrigin, TangentialStressField};
use crate::mesh::{mesh_props, LoopTag, ScalarField, TriMesh};
use crate::quadrature::{self, Point};

/// Dirichlet data for the flexure potential on the outer loop.
#[derive(Debug, Clone)]
pub struct BoundaryPotential {
    /// Indexed by node; `None` off the boundary.
    pub data: Vec<Option<f64>>,
    /// Value accumulated on returning to the start node.
    pub closure: f64,
    pub max_abs: f64,
}

impl BoundaryPotential {
    pub fn closure_defect(&self) -> f64 {
        if self.max_abs > 0.0 {
            self.closure.abs() / self.max_abs
        } else {
            self.closure.abs()
        }
    }
}

/// Particular field with unit resultant: `(0, -x2²/(2I))` for `e2`,
/// `(-x1²/(2I), 0)` for `e1`, where `I` is the matching second moment.
pub fn particular_field(direction: Direction, inertia: f64, x: Point) -> [f64; 2] {
    match direction {
        Direction::E2 => [0.0, -x[1] * x[1] / (2.0 * inertia)],
        Direction::E1 => [-x[0] * x[0] / (2.0 * inertia), 0.0],
    }
}

/// `g(P) = -∫ s0·n dτ` accumulated counterclockwise from the first node of
/// the outer loop, exact on straight edges.
pub fn boundary_potential(mesh: &TriMesh, direction: Direction, inertia: f64) -> Result<BoundaryPotential> {
    if mesh.hole_count() > 0 {
        return Err(Error::MultiplyConnected { holes: mesh.hole_count() });
    }
    if !(inertia > 0.0) {
        return Err(Error::InvalidSection(format!("second moment must be positive, got {inertia}")));
    }
    let loops = mesh.loops();
    let (_, outer) = loops
        .iter()
        .find(|(t, _)| *t == LoopTag::Outer)
        .ok_or_else(|| Error::InvalidMesh("no outer loop".into()))?;
    let nodes = mesh.nodes();
    let mut data = vec![None; mesh.node_count()];
    let mut g = 0.0f64;
    let mut max_abs = 0.0f64;
    for k in 0..outer.len() {
        let (i, j) = (outer[k], outer[(k + 1) % outer.len()]);
        data[i] = Some(g);
        max_abs = max_abs.max(g.abs());
        let (p, q) = (nodes[i], nodes[j]);
        g += match direction {
            Direction::E2 => -(q[0] - p[0]) * (p[1] * p[1] + p[1] * q[1] + q[1] * q[1]) / (6.0 * inertia),
            Direction::E1 => (q[1] - p[1]) * (p[0] * p[0] + p[0] * q[0] + q[0] * q[0]) / (6.0 * inertia),
        };
    }
    Ok(BoundaryPotential { data, closure: g, max_abs })
}

#[derive(Debug, Clone)]
pub struct FlexureSolution {
    pub potential: ScalarField,
    pub stress: TangentialStressField,
    pub direction: Direction,
    pub nu: f64,
    /// Realized `(T1, T2)`.
    pub resultant: [f64; 2],
    /// Superposed uniform twist; always zero.
    pub twist_constant: f64,
    pub closure_defect: f64,
    pub stats: SolveStats,
}

/// Solves `-Δφ = (ν/(1+ν)) (x1 d2 - x2 d1) / I` with the boundary data that
/// makes `s·n = 0`.
pub fn solve_flexure(mesh: &Arc<TriMesh>, nu: f64, direction: Direction, opts: &SolverOptions) -> Result<FlexureSolution> {
    if !(nu > -1.0 && nu < 0.5) {
        return Err(Error::InvalidMaterial(format!("Poisson ratio {nu} outside (-1, 0.5)")));
    }
    let props = mesh_props(mesh);
    let inertia = match direction {
        Direction::E2 => props.i1,
        Direction::E1 => props.i2,
    };
    let bp = boundary_potential(mesh, direction, inertia)?;
    if bp.closure_defect() > 1e-8 {
        return Err(Error::InvalidSection(format!(
            "flexure data does not close (defect {:e}); the centroid must be at the origin",
            bp.closure_defect()
        )));
    }
    let amp = nu / (1.0 + nu) / inertia;
    let d = direction.unit();
    let f = move |x: Point| -amp * (x[0] * d[1] - x[1] * d[0]);
    let mut sys = assemble(mesh, Source::Function(&f))?;
    // ∫ s0·curl N_i: zero in exact arithmetic for interior nodes, kept so the
    // ν = 0 field is the discrete energy minimizer to rounding.
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let (grads, area) = mesh.basis_gradients(t);
        let pts = quadrature::points(&mesh.vertices(t));
        let mut mean = [0.0; 2];
        for p in pts {
            let s0 = particular_field(direction, inertia, p);
            mean[0] += s0[0] / 3.0;
            mean[1] += s0[1] / 3.0;
        }
        for a in 0..3 {
            let curl = [grads[a][1], -grads[a][0]];
            sys.load[tri[a]] += area * (mean[0] * curl[0] + mean[1] * curl[1]);
        }
    }
    let sol = solve_dirichlet(&sys, &bp.data, &HoleMode::Fixed, opts)?;
    let grads = gradient_field(&sol.field);
    let samples = (0..mesh.triangle_count())
        .map(|t| {
            let pts = quadrature::points(&mesh.vertices(t));
            let g = grads[t];
            pts.map(|p| {
                let s0 = particular_field(direction, inertia, p);
                [s0[0] + g[1], s0[1] - g[0]]
            })
        })
        .collect();
    let stress = TangentialStressField::from_samples(Arc::clone(mesh), samples, FieldOrigin::Flexure { direction, nu })?;
    let resultant = stress.resultant();
    Ok(FlexureSolution {
        potential: sol.field,
        stress,
        direction,
        nu,
        resultant,
        twist_constant: 0.0,
        closure_defect: bp.closure_defect(),
        stats: sol.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{normalize_section, Material, SectionSpec, Shape};
    use crate::mesh::triangulate;

    fn mesh(shape: Shape, h: f64) -> Arc<TriMesh> {
        let s = SectionSpec::new("t", shape, Material::new(1.0, 0.3).unwrap()).unwrap();
        Arc::new(triangulate(&normalize_section(&s).unwrap().spec, h).unwrap())
    }

    #[test]
    fn rectangle_data_on_edges() {
        let (b, h) = (2.0, 1.0);
        let m = mesh(Shape::Rectangle { width: b, height: h }, 0.1);
        let i1 = b * h * h * h / 12.0;
        let bp = boundary_potential(&m, Direction::E2, i1).unwrap();
        assert!(bp.closure_defect() < 1e-10);
        let slope = (h / 2.0) * (h / 2.0) / (2.0 * i1);
        let nodes = m.nodes();
        let start = m.loops()[0].1[0];
        let g0 = bp.data[start].unwrap();
        let p0 = nodes[start];
        for (i, g) in bp.data.iter().enumerate() {
            let Some(g) = g else { continue };
            let p = nodes[i];
            if (p[1].abs() - h / 2.0).abs() < 1e-12 && (p0[1] - p[1]).abs() < 1e-12 {
                // along the same horizontal edge as the start node
                let s = if p[1] < 0.0 { -slope } else { slope };
                assert!((g - g0 - s * (p[0] - p0[0])).abs() < 1e-12);
            }
        }
        // vertical edges carry constant data
        let right: Vec<f64> = (0..m.node_count()).filter(|&i| (nodes[i][0] - b / 2.0).abs() < 1e-12).map(|i| bp.data[i].unwrap()).collect();
        assert!(right.iter().all(|v| (v - right[0]).abs() < 1e-12));
    }

    #[test]
    fn circle_data_symmetry() {
        let m = mesh(Shape::Circle { radius: 1.0 }, 0.1);
        let bp = boundary_potential(&m, Direction::E2, std::f64::consts::FRAC_PI_4).unwrap();
        assert!(bp.closure_defect() < 1e-10);
        let nodes = m.nodes();
        let vals: Vec<(Point, f64)> = (0..m.node_count()).filter_map(|i| bp.data[i].map(|g| (nodes[i], g))).collect();
        let mean = vals.iter().map(|v| v.1).sum::<f64>() / vals.len() as f64;
        let find = |q: Point| vals.iter().find(|(p, _)| (p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9).map(|v| v.1 - mean);
        for (p, g) in &vals {
            let g = g - mean;
            if let Some(m) = find([p[0], -p[1]]) {
                assert!((g - m).abs() < 1e-9);
            }
            if let Some(m) = find([-p[0], p[1]]) {
                assert!((g + m).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rectangle_parabolic_profile() {
        for (b, h) in [(1.0, 1.0), (1.0, 2.0), (5.0, 1.0)] {
            let m = mesh(Shape::Rectangle { width: b, height: h }, 0.1 * h.min(b));
            let f = solve_flexure(&m, 0.0, Direction::E2, &SolverOptions::default()).unwrap();
            let i1 = b * h * h * h / 12.0;
            let worst = f.stress.integrate(|x, s| s[0].abs() + (s[1] - (h * h / 4.0 - x[1] * x[1]) / (2.0 * i1)).abs());
            assert!(worst < 1e-8, "{worst}");
            assert!((f.resultant[1] - 1.0).abs() < 1e-10 && f.resultant[0].abs() < 1e-10);
        }
    }

    #[test]
    fn energy_grows_with_nu() {
        let m = mesh(Shape::Ellipse { a: 2.0, b: 1.0 }, 0.1);
        let mut last = 0.0;
        for nu in [0.0, 0.15, 0.3, 0.45] {
            let e = solve_flexure(&m, nu, Direction::E2, &SolverOptions::default()).unwrap().stress.norm_sq();
            assert!(e >= last * (1.0 - 1e-12));
            last = e;
        }
    }

    #[test]
    fn e1_mirrors_e2() {
        let a = solve_flexure(&mesh(Shape::Rectangle { width: 1.0, height: 2.0 }, 0.1), 0.3, Direction::E2, &SolverOptions::default())
            .unwrap();
        let b = solve_flexure(&mesh(Shape::Rectangle { width: 2.0, height: 1.0 }, 0.1), 0.3, Direction::E1, &SolverOptions::default())
            .unwrap();
        assert!((a.stress.norm_sq() - b.stress.norm_sq()).abs() < 1e-3 * a.stress.norm_sq());
        assert!((b.resultant[0] - 1.0).abs() < 1e-10 && b.resultant[1].abs() < 1e-10);
    }

    #[test]
    fn holes_are_rejected() {
        let m = mesh(Shape::Annulus { outer: 1.0, inner: 0.5 }, 0.1);
        assert!(matches!(
            solve_flexure(&m, 0.3, Direction::E2, &SolverOptions::default()),
            Err(Error::MultiplyConnected { holes: 1 })
        ));
    }
}
