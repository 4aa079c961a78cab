//! Saint-Venant torsion through the Prandtl stress function, normalized to
//! unit shear modulus times twist rate.

use std::sync::Arc;

use crate::error::Result;
use crate::fem::{assemble, gradient_field, solve_dirichlet, HoleMode, SolveStats, SolverOptions, Source};
use crate::field::{FieldOrigin, TangentialStressField};
use crate::mesh::{ScalarField, TriMesh};

#[derive(Debug, Clone)]
pub struct TorsionSolution {
    pub phi: ScalarField,
    pub hole_constants: Vec<f64>,
    pub stress: TangentialStressField,
    /// Twisting moment about `+e3`.
    pub mt: f64,
    /// Torsion constant `2∫φ + 2 Σ c_k A_k`.
    pub jt: f64,
    /// `∫ |∇φ|² dA`
    pub energy: f64,
    pub stats: SolveStats,
}

/// Minimizes `∫ (½|∇φ|² - 2φ) - 2 Σ c_k A_k` with `φ = 0` on the outer loop
/// and one free constant `c_k` per hole.
pub fn solve_torsion(mesh: &Arc<TriMesh>, opts: &SolverOptions) -> Result<TorsionSolution> {
    let sys = assemble(mesh, Source::Constant(-2.0))?;
    let hole_areas = mesh.hole_areas();
    let extra_rhs = hole_areas.iter().map(|a| 2.0 * a).collect();
    let data: Vec<Option<f64>> = mesh.node_loops().iter().map(|t| t.map(|_| 0.0)).collect();
    let sol = solve_dirichlet(&sys, &data, &HoleMode::Floating { extra_rhs }, opts)?;
    let grads = gradient_field(&sol.field);
    let stress_values: Vec<[f64; 2]> = grads.iter().map(|g| [g[1], -g[0]]).collect();
    let stress = TangentialStressField::from_elements(Arc::clone(mesh), &stress_values, FieldOrigin::Torsion)?;
    let jt = 2.0 * sol.field.integral() + 2.0 * sol.hole_constants.iter().zip(&hole_areas).map(|(c, a)| c * a).sum::<f64>();
    let ku = sys.matrix.mul(&sol.field.values);
    let energy = sol.field.values.iter().zip(&ku).map(|(u, k)| u * k).sum();
    Ok(TorsionSolution { phi: sol.field, hole_constants: sol.hole_constants, stress, mt: jt, jt, energy, stats: sol.stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::equality_deviation;
    use crate::geometry::{Material, SectionSpec, Shape};
    use crate::mesh::triangulate;
    use std::f64::consts::PI;

    fn solve(shape: Shape, h: f64) -> TorsionSolution {
        let s = SectionSpec::new("t", shape, Material::new(1.0, 0.3).unwrap()).unwrap();
        solve_torsion(&Arc::new(triangulate(&s, h).unwrap()), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn circle() {
        let t = solve(Shape::Circle { radius: 1.0 }, 0.05);
        assert!((t.jt - PI / 2.0).abs() / (PI / 2.0) < 0.01);
        assert!((t.energy - t.jt).abs() / t.jt < 1e-9);
        let mesh = t.stress.mesh();
        for tri in 0..mesh.triangle_count() {
            let c = mesh.centroid(tri);
            let s = t.stress.element_value(tri);
            assert!((s[0].hypot(s[1]) - c[0].hypot(c[1])).abs() < 0.05);
        }
        assert!(equality_deviation(&t.stress.recovered()).unwrap().deviation < 0.01);
    }

    #[test]
    fn annulus() {
        let t = solve(Shape::Annulus { outer: 1.0, inner: 0.5 }, 0.05);
        let exact = PI / 2.0 * (1.0 - 0.0625);
        assert!((t.jt - exact).abs() / exact < 0.01);
        assert!((t.hole_constants[0] - 0.375).abs() < 0.01);
        assert!((t.energy - t.jt).abs() / t.jt < 1e-9);
    }

    #[test]
    fn moment_matches_stress_function_formula() {
        for shape in [Shape::Rectangle { width: 1.0, height: 1.0 }, Shape::Annulus { outer: 1.0, inner: 0.5 }] {
            let t = solve(shape, 0.1);
            assert!((t.stress.moment() - t.mt).abs() / t.mt < 1e-10);
            let r = t.stress.resultant();
            let l1 = t.stress.l1_norm();
            assert!(r[0].abs() <= 1e-8 * l1 && r[1].abs() <= 1e-8 * l1);
        }
    }

    #[test]
    fn square_is_far_from_equality() {
        let t = solve(Shape::Rectangle { width: 1.0, height: 1.0 }, 0.05);
        assert!((t.jt - 0.140577).abs() / 0.140577 < 0.01);
        assert!(equality_deviation(&t.stress).unwrap().deviation >= 0.1);
        assert!(t.stress.mantle_defect() < 0.2);
    }
}
