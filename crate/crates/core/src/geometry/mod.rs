//! Section shapes, isotropic material constants, normalization to centroidal
//! principal axes, and closed-form geometric properties.

mod file;
pub mod polygon;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Point;
use polygon::RawMoments;

pub use file::{load_section, parse_section};

/// Isotropic material given by shear modulus and Poisson ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Material {
    #[serde(rename = "G")]
    pub shear_modulus: f64,
    pub nu: f64,
}

impl Material {
    pub fn new(shear_modulus: f64, nu: f64) -> Result<Self> {
        let m = Material { shear_modulus, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn from_young(young: f64, nu: f64) -> Result<Self> {
        Material::new(young / (2.0 * (1.0 + nu)), nu)
    }

    pub fn young(&self) -> f64 {
        2.0 * self.shear_modulus * (1.0 + self.nu)
    }

    /// First Lamé coefficient, `2 G ν / (1 - 2ν)`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.shear_modulus * self.nu / (1.0 - 2.0 * self.nu)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shear_modulus.is_finite() && self.shear_modulus > 0.0) {
            return Err(Error::InvalidMaterial(format!("G must be positive, got {}", self.shear_modulus)));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(Error::InvalidMaterial(format!("nu must lie in (-1, 0.5), got {}", self.nu)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Shape {
    Circle { radius: f64 },
    Annulus { outer: f64, inner: f64 },
    Rectangle { width: f64, height: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon {
        outer: Vec<Point>,
        #[serde(default)]
        holes: Vec<Vec<Point>>,
    },
}

impl Shape {
    pub fn hole_count(&self) -> usize {
        match self {
            Shape::Annulus { .. } => 1,
            Shape::Polygon { holes, .. } => holes.len(),
            _ => 0,
        }
    }

    /// Largest distance between two points of the section.
    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Circle { radius } => 2.0 * radius,
            Shape::Annulus { outer, .. } => 2.0 * outer,
            Shape::Rectangle { width, height } => width.hypot(*height),
            Shape::Ellipse { a, b } => 2.0 * a.max(*b),
            Shape::Polygon { outer, .. } => polygon::max_vertex_distance(outer),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionSpec {
    pub name: String,
    pub shape: Shape,
    pub material: Material,
}

/// Loop numbering used in polygon errors: 0 is the outer loop, `k + 1` is hole `k`.
fn loop_err(loop_index: usize, reason: impl Into<String>) -> Error {
    Error::InvalidPolygon { loop_index, reason: reason.into() }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSection(format!("{name} must be a positive length, got {v}")))
    }
}

impl SectionSpec {
    pub fn new(name: impl Into<String>, shape: Shape, material: Material) -> Result<Self> {
        let spec = SectionSpec { name: name.into(), shape, material };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        match &self.shape {
            Shape::Circle { radius } => positive("radius", *radius),
            Shape::Annulus { outer, inner } => {
                positive("outer", *outer)?;
                positive("inner", *inner)?;
                if inner >= outer {
                    return Err(Error::InvalidSection(format!("annulus inner radius {inner} must be below outer {outer}")));
                }
                Ok(())
            }
            Shape::Rectangle { width, height } => {
                positive("width", *width)?;
                positive("height", *height)
            }
            Shape::Ellipse { a, b } => {
                positive("a", *a)?;
                positive("b", *b)
            }
            Shape::Polygon { outer, holes } => validate_polygon(outer, holes),
        }
    }
}

fn validate_polygon(outer: &[Point], holes: &[Vec<Point>]) -> Result<()> {
    let loops = std::iter::once(outer).chain(holes.iter().map(|h| h.as_slice()));
    for (k, lp) in loops.enumerate() {
        if lp.len() < 3 {
            return Err(loop_err(k, format!("needs at least 3 vertices, has {}", lp.len())));
        }
        if lp.iter().flatten().any(|c| !c.is_finite()) {
            return Err(loop_err(k, "non-finite coordinate"));
        }
        if !polygon::is_simple(lp) {
            return Err(loop_err(k, "loop is self-intersecting"));
        }
        let area = polygon::signed_area(lp);
        if k == 0 && area <= 0.0 {
            return Err(loop_err(k, "outer loop must be counterclockwise"));
        }
        if k > 0 && area >= 0.0 {
            return Err(loop_err(k, "hole loops must be clockwise"));
        }
    }
    for (k, hole) in holes.iter().enumerate() {
        if polygon::loops_touch(outer, hole) || !hole.iter().all(|&p| polygon::contains(outer, p)) {
            return Err(loop_err(k + 1, "hole is not strictly inside the outer loop"));
        }
        for (j, other) in holes.iter().enumerate().take(k) {
            if polygon::loops_touch(hole, other) || polygon::contains(other, hole[0]) || polygon::contains(hole, other[0]) {
                return Err(loop_err(k + 1, format!("hole overlaps hole {j}")));
            }
        }
    }
    Ok(())
}

/// Rigid motion applied by [`normalize_section`]: first translate, then rotate
/// counterclockwise by `-rotation` so the principal direction at angle
/// `rotation` becomes the new `x1` axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RigidTransform {
    pub translation: Point,
    pub rotation: f64,
}

impl RigidTransform {
    pub fn is_identity(&self) -> bool {
        self.translation == [0.0, 0.0] && self.rotation == 0.0
    }

    pub fn apply(&self, p: Point) -> Point {
        let x = p[0] + self.translation[0];
        let y = p[1] + self.translation[1];
        let (s, c) = self.rotation.sin_cos();
        [c * x + s * y, -s * x + c * y]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub spec: SectionSpec,
    pub transform: RigidTransform,
}

/// Geometric properties; second moments are taken about the coordinate origin,
/// which is the centroid once the section is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionProps {
    #[serde(rename = "A")]
    pub area: f64,
    pub centroid: Point,
    /// `∫ x2² dA`
    #[serde(rename = "I1")]
    pub i1: f64,
    /// `∫ x1² dA`
    #[serde(rename = "I2")]
    pub i2: f64,
    /// `∫ x1 x2 dA`
    #[serde(rename = "I12")]
    pub i12: f64,
    /// `∫ |x|² dA`, always `i1 + i2`
    #[serde(rename = "Jo")]
    pub jo: f64,
}

impl SectionProps {
    pub fn from_moments(m: &RawMoments) -> Self {
        SectionProps { area: m.area, centroid: m.centroid(), i1: m.yy, i2: m.xx, i12: m.xy, jo: m.yy + m.xx }
    }
}

/// Angle of the principal direction that becomes `x1`, chosen so that afterwards
/// `I1 <= I2`, with the smallest rotation in `(-π/2, π/2]`; returns 0 for
/// isotropic tensors.
fn principal_angle(xx: f64, yy: f64, xy: f64) -> f64 {
    let spread = (2.0 * xy).hypot(xx - yy);
    if spread <= 1e-12 * (xx + yy) {
        return 0.0;
    }
    0.5 * (2.0 * xy).atan2(xx - yy)
}

fn polygon_moments(outer: &[Point], holes: &[Vec<Point>]) -> RawMoments {
    let mut m = RawMoments::of_loop(outer);
    for h in holes {
        m.add(&RawMoments::of_loop(h));
    }
    m
}

/// Translates the section so its area centroid is the origin and rotates it onto
/// principal axes. Primitives are centred and principal by construction and pass
/// through untouched.
pub fn normalize_section(spec: &SectionSpec) -> Result<Normalized> {
    spec.validate()?;
    let Shape::Polygon { outer, holes } = &spec.shape else {
        return Ok(Normalized { spec: spec.clone(), transform: RigidTransform::default() });
    };
    let m = polygon_moments(outer, holes);
    let c = m.centroid();
    let a = m.area;
    let xx = m.xx - a * c[0] * c[0];
    let yy = m.yy - a * c[1] * c[1];
    let xy = m.xy - a * c[0] * c[1];
    let transform = RigidTransform { translation: [-c[0], -c[1]], rotation: principal_angle(xx, yy, xy) };
    let map = |lp: &Vec<Point>| lp.iter().map(|&p| transform.apply(p)).collect::<Vec<_>>();
    let shape = Shape::Polygon { outer: map(outer), holes: holes.iter().map(map).collect() };
    let out = SectionSpec { name: spec.name.clone(), shape, material: spec.material };
    out.validate()?;
    Ok(Normalized { spec: out, transform })
}

/// Closed-form properties for primitives, Green's-theorem sums for polygons.
pub fn analytic_props(spec: &SectionSpec) -> SectionProps {
    use std::f64::consts::PI;
    let disk = |r: f64| (PI * r * r, PI * r.powi(4) / 4.0);
    let (area, i1, i2, i12, centroid) = match &spec.shape {
        Shape::Circle { radius } => {
            let (a, i) = disk(*radius);
            (a, i, i, 0.0, [0.0, 0.0])
        }
        Shape::Annulus { outer, inner } => {
            let (ao, io) = disk(*outer);
            let (ai, ii) = disk(*inner);
            (ao - ai, io - ii, io - ii, 0.0, [0.0, 0.0])
        }
        Shape::Rectangle { width: b, height: h } => (b * h, b * h.powi(3) / 12.0, h * b.powi(3) / 12.0, 0.0, [0.0, 0.0]),
        Shape::Ellipse { a, b } => (PI * a * b, PI * a * b.powi(3) / 4.0, PI * a.powi(3) * b / 4.0, 0.0, [0.0, 0.0]),
        Shape::Polygon { outer, holes } => {
            let m = polygon_moments(outer, holes);
            (m.area, m.yy, m.xx, m.xy, m.centroid())
        }
    };
    SectionProps { area, centroid, i1, i2, i12, jo: i1 + i2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mat() -> Material {
        Material::new(1.0, 0.3).unwrap()
    }

    fn l_shape() -> SectionSpec {
        let outer = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        SectionSpec::new("L", Shape::Polygon { outer, holes: vec![] }, mat()).unwrap()
    }

    /// Midpoint-rule sum on an n×n grid over the bounding box of the loop.
    fn grid_oracle(pts: &[Point], n: usize) -> (f64, Point) {
        let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p[0]), b.max(p[0])));
        let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p[1]), b.max(p[1])));
        let (dx, dy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
        let (mut a, mut sx, mut sy) = (0.0, 0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let p = [x0 + (i as f64 + 0.5) * dx, y0 + (j as f64 + 0.5) * dy];
                if polygon::contains(pts, p) {
                    a += dx * dy;
                    sx += p[0] * dx * dy;
                    sy += p[1] * dx * dy;
                }
            }
        }
        (a, [sx / a, sy / a])
    }

    #[test]
    fn circle_passes_through() {
        let s = SectionSpec::new("c", Shape::Circle { radius: 1.0 }, mat()).unwrap();
        let n = normalize_section(&s).unwrap();
        assert_eq!(n.spec, s);
        assert!(n.transform.is_identity());
    }

    #[test]
    fn corner_anchored_rectangle_is_centred() {
        let outer = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        let s = SectionSpec::new("r", Shape::Polygon { outer, holes: vec![] }, mat()).unwrap();
        let n = normalize_section(&s).unwrap();
        assert_eq!(n.transform.translation, [-1.0, -0.5]);
        assert_eq!(n.transform.rotation, 0.0);
        let Shape::Polygon { outer, .. } = &n.spec.shape else { unreachable!() };
        assert_eq!(outer[0], [-1.0, -0.5]);
    }

    #[test]
    fn l_shape_centroid_matches_grid_oracle() {
        let s = l_shape();
        let Shape::Polygon { outer, .. } = &s.shape else { unreachable!() };
        let (grid_area, grid_c) = grid_oracle(outer, 2000);
        let p = analytic_props(&s);
        assert!((p.area - grid_area).abs() / grid_area < 1e-6);
        assert!((p.centroid[0] - grid_c[0]).abs() < 1e-6);
        assert!((p.centroid[1] - grid_c[1]).abs() < 1e-6);
        // 2x2 square minus the unit square [1,2]²
        assert!((p.centroid[0] - 5.0 / 6.0).abs() < 1e-14);

        let n = normalize_section(&s).unwrap();
        assert!((n.transform.translation[0] + 5.0 / 6.0).abs() < 1e-14);
        assert!((n.transform.rotation.abs() - PI / 4.0).abs() < 1e-12);
        let q = analytic_props(&n.spec);
        assert!(q.centroid[0].abs() < 1e-14 && q.centroid[1].abs() < 1e-14);
        assert!(q.i12.abs() < 1e-13);
        assert!(q.i1 <= q.i2);
    }

    #[test]
    fn normalize_is_idempotent() {
        let n1 = normalize_section(&l_shape()).unwrap();
        let n2 = normalize_section(&n1.spec).unwrap();
        let (Shape::Polygon { outer: a, .. }, Shape::Polygon { outer: b, .. }) = (&n1.spec.shape, &n2.spec.shape) else {
            unreachable!()
        };
        let d = n1.spec.shape.diameter();
        for (p, q) in a.iter().zip(b) {
            assert!((p[0] - q[0]).abs() < 1e-12 * d && (p[1] - q[1]).abs() < 1e-12 * d);
        }
    }

    #[test]
    fn primitive_props() {
        let c = analytic_props(&SectionSpec::new("c", Shape::Circle { radius: 1.0 }, mat()).unwrap());
        assert!((c.area - PI).abs() < 1e-15 && (c.i1 - PI / 4.0).abs() < 1e-15 && (c.jo - PI / 2.0).abs() < 1e-15);
        let a = analytic_props(&SectionSpec::new("a", Shape::Annulus { outer: 1.0, inner: 0.5 }, mat()).unwrap());
        assert!((a.area - 2.356194490192345).abs() < 1e-12);
        assert!((a.jo - 1.4726215563702154).abs() < 1e-12);
        let s = analytic_props(&SectionSpec::new("s", Shape::Rectangle { width: 1.0, height: 1.0 }, mat()).unwrap());
        assert_eq!((s.area, s.i1, s.i2), (1.0, 1.0 / 12.0, 1.0 / 12.0));
        assert!((s.jo - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn polygon_errors_name_the_loop() {
        let cw = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let e = SectionSpec::new("x", Shape::Polygon { outer: cw.clone(), holes: vec![] }, mat()).unwrap_err();
        assert!(matches!(e, Error::InvalidPolygon { loop_index: 0, .. }));

        let outer = vec![[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
        let outside = vec![[5.0, 5.0], [5.0, 6.0], [6.0, 6.0], [6.0, 5.0]];
        let e = SectionSpec::new("x", Shape::Polygon { outer: outer.clone(), holes: vec![outside] }, mat()).unwrap_err();
        assert!(matches!(e, Error::InvalidPolygon { loop_index: 1, .. }));

        let h1 = vec![[1.0, 1.0], [1.0, 2.0], [2.0, 2.0], [2.0, 1.0]];
        let h2 = vec![[1.5, 1.5], [1.5, 2.5], [2.5, 2.5], [2.5, 1.5]];
        let e = SectionSpec::new("x", Shape::Polygon { outer, holes: vec![h1, h2] }, mat()).unwrap_err();
        assert!(matches!(e, Error::InvalidPolygon { loop_index: 2, .. }));
    }

    #[test]
    fn material_conversions() {
        let m = Material::from_young(2.6, 0.3).unwrap();
        assert!((m.shear_modulus - 1.0).abs() < 1e-15);
        assert!((m.young() - 2.6).abs() < 1e-15);
        assert!(Material::new(1.0, 0.5).is_err());
        assert!(Material::new(-1.0, 0.2).is_err());
    }
}
