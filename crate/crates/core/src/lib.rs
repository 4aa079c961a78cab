//! Stiffness identification for linearly elastic rods from Saint-Venant
//! cross-section stress fields.
//!
//! The crate meshes a cross section, solves the torsion and flexure problems in
//! stress-function form on linear triangles, and evaluates the energy ratios
//! that define the shear, torsion, extension and bending factors and the
//! matching rod stiffnesses. A seeded generator of admissible stress fields
//! exercises the lower bounds `χ ≥ 1` well beyond the exact solutions.

// `!(x > 0.0)` style comparisons are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod factors;
pub mod fem;
pub mod field;
pub mod flexure;
pub mod fuzz;
pub mod geometry;
pub mod mesh;
pub mod oracles;
pub mod pipeline;
pub mod quadrature;
pub mod report;
pub mod torsion;

pub use error::{Error, Result};
pub use factors::{compute_factor, identify_stiffness, resultants, tangential_energy, FactorKind, FieldRef, Resultants};
pub use fem::{assemble, gradient_field, solve_dirichlet, HoleMode, LinearSystem, SolverOptions, Source};
pub use field::{equality_deviation, AxialStressField, Direction, FieldOrigin, TangentialStressField};
pub use flexure::{boundary_potential, solve_flexure, FlexureSolution};
pub use fuzz::{check_bounds, random_axial, random_shear_like, random_torsion_like, SampleKind};
pub use geometry::{analytic_props, load_section, normalize_section, parse_section, Material, SectionProps, SectionSpec, Shape};
pub use mesh::{mesh_props, refine, triangulate, LoopTag, ScalarField, TriMesh};
pub use oracles::{oracle_lookup, OracleEntry};
pub use pipeline::{compute, converge, fuzz, FuzzConfig, RunConfig};
pub use report::FactorReport;
pub use torsion::{solve_torsion, TorsionSolution};
