//! Conforming linear-triangle meshes of normalized sections.
//!
//! Boundary edges are stored in the orientation of their owning triangle, so
//! the domain always lies to their left: the outer loop runs counterclockwise
//! and hole loops run clockwise. Curved loops carry their exact parametric
//! description and every boundary node on them is kept on the curve, both at
//! construction and after each refinement.

mod earclip;
mod refine;
mod structured;
pub mod vtk;

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{SectionProps, SectionSpec, Shape};
use crate::quadrature::{self, Point};

pub use refine::refine;

/// Default cap on the number of triangles a single mesh may hold.
pub const DEFAULT_ELEMENT_BUDGET: usize = 2_000_000;

/// Environment variable overriding [`DEFAULT_ELEMENT_BUDGET`].
pub const ELEMENT_BUDGET_ENV: &str = "SVSECTION_ELEMENT_BUDGET";

/// Minimum interior angle accepted on an ear-clipped seed triangulation.
pub const MIN_SEED_ANGLE_DEG: f64 = 15.0;

pub fn element_budget() -> usize {
    std::env::var(ELEMENT_BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ELEMENT_BUDGET)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LoopTag {
    Outer,
    Hole(usize),
}

/// Exact description of a curved boundary loop, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Curve {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
}

impl Curve {
    /// Projects `p` onto the curve along the ray from the origin (in the
    /// parameter plane for ellipses).
    pub fn snap(&self, p: Point) -> Point {
        let (a, b) = match *self {
            Curve::Circle { radius } => (radius, radius),
            Curve::Ellipse { a, b } => (a, b),
        };
        let (u, v) = (p[0] / a, p[1] / b);
        let r = u.hypot(v);
        [a * u / r, b * v / r]
    }

    /// Signed defect of the implicit equation, in length units.
    pub fn distance_defect(&self, p: Point) -> f64 {
        match *self {
            Curve::Circle { radius } => p[0].hypot(p[1]) - radius,
            Curve::Ellipse { a, b } => ((p[0] / a).hypot(p[1] / b) - 1.0) * a.min(b),
        }
    }

    pub fn point_at(&self, theta: f64) -> Point {
        let (a, b) = match *self {
            Curve::Circle { radius } => (radius, radius),
            Curve::Ellipse { a, b } => (a, b),
        };
        [a * theta.cos(), b * theta.sin()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: LoopTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    curves: Vec<(LoopTag, Option<Curve>)>,
    h: f64,
    refinements: usize,
}

/// Circumdiameter `abc / (2K)` of a triangle.
pub fn circumdiameter(v: &[Point; 3]) -> f64 {
    let d = |p: Point, q: Point| (p[0] - q[0]).hypot(p[1] - q[1]);
    let (a, b, c) = (d(v[1], v[2]), d(v[0], v[2]), d(v[0], v[1]));
    let k = 0.5 * crate::geometry::polygon::orient(v[0], v[1], v[2]).abs();
    a * b * c / (2.0 * k)
}

pub fn min_angle(v: &[Point; 3]) -> f64 {
    let mut m = f64::MAX;
    for i in 0..3 {
        let (p, q, r) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
        let u = [q[0] - p[0], q[1] - p[1]];
        let w = [r[0] - p[0], r[1] - p[1]];
        let ang = (u[0] * w[1] - u[1] * w[0]).abs().atan2(u[0] * w[0] + u[1] * w[1]);
        m = m.min(ang);
    }
    m
}

impl TriMesh {
    /// Builds a mesh from raw parts. Boundary edges are found as edges used by a
    /// single triangle and tagged by the loop of their end nodes.
    pub fn from_parts(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        node_loops: &[Option<LoopTag>],
        curves: Vec<(LoopTag, Option<Curve>)>,
    ) -> Result<Self> {
        let mut uses: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = uses.entry((a.min(b), a.max(b))).or_insert((0, [a, b]));
                e.0 += 1;
            }
        }
        let mut boundary_edges = Vec::new();
        // Walk triangles again so edge order is deterministic.
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if uses[&(a.min(b), a.max(b))].0 != 1 {
                    continue;
                }
                let tag = match (node_loops.get(a).copied().flatten(), node_loops.get(b).copied().flatten()) {
                    (Some(x), Some(y)) if x == y => x,
                    _ => return Err(Error::InvalidMesh(format!("boundary edge ({a}, {b}) has inconsistent loop tags"))),
                };
                boundary_edges.push(BoundaryEdge { nodes: [a, b], tag });
            }
        }
        Self::with_boundary(nodes, triangles, boundary_edges, curves, 0)
    }

    pub(crate) fn with_boundary(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        curves: Vec<(LoopTag, Option<Curve>)>,
        refinements: usize,
    ) -> Result<Self> {
        let h = triangles.iter().map(|t| circumdiameter(&[nodes[t[0]], nodes[t[1]], nodes[t[2]]])).fold(0.0, f64::max);
        let mesh = TriMesh { nodes, triangles, boundary_edges, curves, h, refinements };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn curves(&self) -> &[(LoopTag, Option<Curve>)] {
        &self.curves
    }

    pub fn curve(&self, tag: LoopTag) -> Option<Curve> {
        self.curves.iter().find(|(t, _)| *t == tag).and_then(|(_, c)| *c)
    }

    /// Largest element circumdiameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of uniform refinements applied since construction.
    pub fn refinements(&self) -> usize {
        self.refinements
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn hole_count(&self) -> usize {
        self.curves.iter().filter(|(t, _)| matches!(t, LoopTag::Hole(_))).count()
    }

    #[inline]
    pub fn vertices(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    #[inline]
    pub fn area(&self, t: usize) -> f64 {
        let v = self.vertices(t);
        0.5 * crate::geometry::polygon::orient(v[0], v[1], v[2])
    }

    /// Gradients of the three barycentric basis functions and the area.
    #[inline]
    pub fn basis_gradients(&self, t: usize) -> ([[f64; 2]; 3], f64) {
        let [p0, p1, p2] = self.vertices(t);
        let two_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
        let inv = 1.0 / two_area;
        (
            [
                [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
                [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
                [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
            ],
            0.5 * two_area,
        )
    }

    pub fn centroid(&self, t: usize) -> Point {
        let v = self.vertices(t);
        [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0]
    }

    /// Loop membership of every node (`None` for interior nodes).
    pub fn node_loops(&self) -> Vec<Option<LoopTag>> {
        let mut tags = vec![None; self.nodes.len()];
        for e in &self.boundary_edges {
            tags[e.nodes[0]] = Some(e.tag);
            tags[e.nodes[1]] = Some(e.tag);
        }
        tags
    }

    /// Boundary loops as ordered node lists, following edge orientation and
    /// starting from the smallest node index of each loop.
    pub fn loops(&self) -> Vec<(LoopTag, Vec<usize>)> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut by_tag: std::collections::BTreeMap<LoopTag, usize> = Default::default();
        for e in &self.boundary_edges {
            next.insert(e.nodes[0], e.nodes[1]);
            let s = by_tag.entry(e.tag).or_insert(e.nodes[0]);
            *s = (*s).min(e.nodes[0]);
        }
        by_tag
            .into_iter()
            .map(|(tag, start)| {
                let mut lp = vec![start];
                let mut cur = next[&start];
                while cur != start {
                    lp.push(cur);
                    cur = next[&cur];
                }
                (tag, lp)
            })
            .collect()
    }

    /// Areas enclosed by the hole loops of the mesh, indexed by hole number.
    pub fn hole_areas(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.hole_count()];
        for (tag, lp) in self.loops() {
            if let LoopTag::Hole(k) = tag {
                let pts: Vec<Point> = lp.iter().map(|&i| self.nodes[i]).collect();
                out[k] = crate::geometry::polygon::signed_area(&pts).abs();
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        let interior_twice = 3 * self.triangles.len() - self.boundary_edges.len();
        interior_twice / 2 + self.boundary_edges.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in &self.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.triangles.len()).map(|t| min_angle(&self.vertices(t))).fold(f64::MAX, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let diam = self.diameter();
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&k| k >= n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {i} has invalid node indices {t:?}")));
            }
            let a = self.area(i);
            if !(a > 1e-14 * diam * diam) {
                return Err(Error::DegenerateTriangle { index: i, area: a });
            }
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                *directed.entry(e).or_default() += 1;
            }
        }
        let mut boundary = 0usize;
        for (&(a, b), &c) in &directed {
            if c > 1 {
                return Err(Error::InvalidMesh(format!("edge ({a}, {b}) used twice with the same orientation")));
            }
            if !directed.contains_key(&(b, a)) {
                boundary += 1;
            }
        }
        if boundary != self.boundary_edges.len() {
            return Err(Error::InvalidMesh(format!(
                "{} boundary edges recorded but {boundary} found",
                self.boundary_edges.len()
            )));
        }
        for e in &self.boundary_edges {
            if directed.contains_key(&(e.nodes[1], e.nodes[0])) || !directed.contains_key(&(e.nodes[0], e.nodes[1])) {
                return Err(Error::InvalidMesh(format!("edge {:?} is not a boundary edge", e.nodes)));
            }
            if let Some(curve) = self.curve(e.tag) {
                for &k in &e.nodes {
                    if curve.distance_defect(self.nodes[k]).abs() > 1e-12 * diam {
                        return Err(Error::InvalidMesh(format!("boundary node {k} is off its curve")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A nodal scalar field on a mesh.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub mesh: Arc<TriMesh>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::FieldMismatch(format!("{} values for {} nodes", values.len(), mesh.node_count())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::FieldMismatch("non-finite nodal value".into()));
        }
        Ok(ScalarField { mesh, values })
    }

    pub fn from_fn(mesh: Arc<TriMesh>, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|&p| f(p)).collect();
        ScalarField { mesh, values }
    }

    /// `∫ u dA` of the piecewise-linear interpolant.
    pub fn integral(&self) -> f64 {
        (0..self.mesh.triangle_count())
            .map(|t| {
                let [a, b, c] = self.mesh.triangles()[t];
                self.mesh.area(t) * (self.values[a] + self.values[b] + self.values[c]) / 3.0
            })
            .sum()
    }
}

/// Meshes a normalized section with maximum circumdiameter at most `h_target`.
pub fn triangulate(spec: &SectionSpec, h_target: f64) -> Result<TriMesh> {
    triangulate_with_budget(spec, h_target, element_budget())
}

pub fn triangulate_with_budget(spec: &SectionSpec, h_target: f64, budget: usize) -> Result<TriMesh> {
    spec.validate()?;
    let diameter = spec.shape.diameter();
    if !(h_target > 0.0 && h_target < diameter / 2.0) {
        return Err(Error::InvalidMeshSize { h: h_target, diameter });
    }
    match &spec.shape {
        Shape::Circle { radius } => structured::ellipse(*radius, *radius, h_target, budget),
        Shape::Ellipse { a, b } => structured::ellipse(*a, *b, h_target, budget),
        Shape::Annulus { outer, inner } => structured::annulus(*outer, *inner, h_target, budget),
        Shape::Rectangle { width, height } => structured::rectangle(*width, *height, h_target, budget),
        Shape::Polygon { outer, holes } => {
            let mut mesh = earclip::seed_mesh(outer, holes)?;
            while mesh.h() > h_target {
                let requested = 4 * mesh.triangle_count();
                if requested > budget {
                    return Err(Error::ElementBudget { requested, budget });
                }
                mesh = refine(&mesh);
            }
            Ok(TriMesh { refinements: 0, ..mesh })
        }
    }
}

/// Area, centroid and second moments of the meshed region by exact quadrature.
pub fn mesh_props(mesh: &TriMesh) -> SectionProps {
    let (mut a, mut sx, mut sy, mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for t in 0..mesh.triangle_count() {
        let v = mesh.vertices(t);
        let area = mesh.area(t);
        a += area;
        for p in quadrature::points(&v) {
            let w = quadrature::WEIGHT * area;
            sx += w * p[0];
            sy += w * p[1];
            xx += w * p[0] * p[0];
            yy += w * p[1] * p[1];
            xy += w * p[0] * p[1];
        }
    }
    SectionProps { area: a, centroid: [sx / a, sy / a], i1: yy, i2: xx, i12: xy, jo: yy + xx }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{analytic_props, normalize_section, Material};
    use std::f64::consts::PI;

    fn spec(shape: Shape) -> SectionSpec {
        SectionSpec::new("t", shape, Material::new(1.0, 0.0).unwrap()).unwrap()
    }

    fn l_shape() -> SectionSpec {
        let outer = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        normalize_section(&spec(Shape::Polygon { outer, holes: vec![] })).unwrap().spec
    }

    #[test]
    fn unit_square_grid() {
        let m = triangulate(&spec(Shape::Rectangle { width: 1.0, height: 1.0 }), 0.6).unwrap();
        assert_eq!(m.node_count(), 16);
        assert!(m.h() <= 0.6);
        let area: f64 = (0..m.triangle_count()).map(|t| m.area(t)).sum();
        assert!((area - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disk_area_deficit() {
        let m = triangulate(&spec(Shape::Circle { radius: 1.0 }), 0.1).unwrap();
        assert!(m.h() <= 0.1);
        let p = mesh_props(&m);
        assert!((p.area - PI).abs() / PI <= 0.01);
        assert!(p.area < PI);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn annulus_topology() {
        let m = triangulate(&spec(Shape::Annulus { outer: 1.0, inner: 0.5 }), 0.1).unwrap();
        let tags: Vec<LoopTag> = m.loops().into_iter().map(|(t, _)| t).collect();
        assert_eq!(tags, vec![LoopTag::Outer, LoopTag::Hole(0)]);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.hole_count(), 1);
        let ha = m.hole_areas()[0];
        assert!((ha - PI * 0.25).abs() < 0.01);
    }

    #[test]
    fn curved_nodes_on_curve() {
        let m = triangulate(&spec(Shape::Ellipse { a: 2.0, b: 1.0 }), 0.2).unwrap();
        let c = m.curve(LoopTag::Outer).unwrap();
        for (_, lp) in m.loops() {
            for i in lp {
                assert!(c.distance_defect(m.nodes()[i]).abs() < 1e-12 * 4.0);
            }
        }
        let r = refine(&refine(&m));
        r.validate().unwrap();
    }

    #[test]
    fn polygon_props_are_exact() {
        let s = l_shape();
        let m = triangulate(&s, 0.2).unwrap();
        let (p, q) = (mesh_props(&m), analytic_props(&s));
        assert!((p.area - q.area).abs() < 1e-12);
        assert!((p.i1 - q.i1).abs() < 1e-12 && (p.i2 - q.i2).abs() < 1e-12 && (p.i12 - q.i12).abs() < 1e-12);
        assert!(m.min_angle() > MIN_SEED_ANGLE_DEG.to_radians());
    }

    #[test]
    fn polygon_with_hole() {
        let outer = vec![[-2.0, -2.0], [2.0, -2.0], [2.0, 2.0], [-2.0, 2.0]];
        let hole = vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]];
        let s = spec(Shape::Polygon { outer, holes: vec![hole] });
        let m = triangulate(&s, 0.5).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!((mesh_props(&m).area - 12.0).abs() < 1e-12);
        assert!((m.hole_areas()[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn disk_props_converge_second_order() {
        let s = spec(Shape::Circle { radius: 1.0 });
        let mut m = triangulate(&s, 0.2).unwrap();
        let exact = analytic_props(&s).jo;
        let mut errs = vec![];
        for _ in 0..4 {
            errs.push((mesh_props(&m).jo - exact).abs());
            m = refine(&m);
        }
        for w in errs.windows(2).skip(1) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "order {order}");
        }
        let m = triangulate(&s, 0.05).unwrap();
        assert!((mesh_props(&m).jo - PI / 2.0).abs() / (PI / 2.0) < 0.01);
    }

    #[test]
    fn ellipse_props_converge_second_order() {
        let s = spec(Shape::Ellipse { a: 2.0, b: 1.0 });
        let mut m = triangulate(&s, 0.4).unwrap();
        let exact = analytic_props(&s).jo;
        let mut errs = vec![];
        for _ in 0..4 {
            errs.push((mesh_props(&m).jo - exact).abs());
            m = refine(&m);
        }
        for w in errs.windows(2).skip(1) {
            assert!((w[0] / w[1]).log2() >= 1.8);
        }
    }

    #[test]
    fn mesh_size_limits() {
        let s = spec(Shape::Circle { radius: 1.0 });
        assert!(matches!(triangulate(&s, 1.5), Err(Error::InvalidMeshSize { .. })));
        assert!(matches!(triangulate(&s, 0.0), Err(Error::InvalidMeshSize { .. })));
        assert!(matches!(triangulate_with_budget(&s, 0.01, 1000), Err(Error::ElementBudget { budget: 1000, .. })));
    }
}
