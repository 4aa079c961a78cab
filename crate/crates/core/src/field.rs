//! Cross-sectional stress fields: the tangential traction `(S31, S32)` and the
//! axial component `S33`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{ScalarField, TriMesh};
use crate::quadrature::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    E1,
    E2,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::E1 => "e1",
            Direction::E2 => "e2",
        }
    }

    pub fn unit(self) -> [f64; 2] {
        match self {
            Direction::E1 => [1.0, 0.0],
            Direction::E2 => [0.0, 1.0],
        }
    }
}

/// Which problem produced a field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum FieldOrigin {
    Torsion,
    Flexure { direction: Direction, nu: f64 },
    Fuzz { family: String, seed: u64 },
    Synthetic,
}

/// Tangential traction sampled at the three quadrature points of every
/// triangle. Fields derived from linear potentials repeat one value per
/// triangle.
#[derive(Debug, Clone)]
pub struct TangentialStressField {
    mesh: Arc<TriMesh>,
    samples: Vec<[[f64; 2]; 3]>,
    pub origin: FieldOrigin,
    /// Factor applied to the field as produced by its generator.
    pub scale: f64,
}

impl TangentialStressField {
    pub fn from_samples(mesh: Arc<TriMesh>, samples: Vec<[[f64; 2]; 3]>, origin: FieldOrigin) -> Result<Self> {
        if samples.len() != mesh.triangle_count() {
            return Err(Error::FieldMismatch(format!("{} samples for {} triangles", samples.len(), mesh.triangle_count())));
        }
        if samples.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::FieldMismatch("non-finite stress value".into()));
        }
        Ok(TangentialStressField { mesh, samples, origin, scale: 1.0 })
    }

    /// Piecewise-constant field from one value per triangle.
    pub fn from_elements(mesh: Arc<TriMesh>, values: &[[f64; 2]], origin: FieldOrigin) -> Result<Self> {
        Self::from_samples(mesh, values.iter().map(|&v| [v; 3]).collect(), origin)
    }

    pub fn from_fn(mesh: Arc<TriMesh>, f: impl Fn(Point) -> [f64; 2], origin: FieldOrigin) -> Result<Self> {
        let samples = (0..mesh.triangle_count())
            .map(|t| {
                let p = quadrature::points(&mesh.vertices(t));
                [f(p[0]), f(p[1]), f(p[2])]
            })
            .collect();
        Self::from_samples(mesh, samples, origin)
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn samples(&self) -> &[[[f64; 2]; 3]] {
        &self.samples
    }

    /// Mean of the samples of triangle `t`.
    pub fn element_value(&self, t: usize) -> [f64; 2] {
        let s = &self.samples[t];
        [(s[0][0] + s[1][0] + s[2][0]) / 3.0, (s[0][1] + s[1][1] + s[2][1]) / 3.0]
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let samples = self.samples.iter().map(|s| s.map(|v| [lambda * v[0], lambda * v[1]])).collect();
        TangentialStressField { mesh: Arc::clone(&self.mesh), samples, origin: self.origin.clone(), scale: self.scale * lambda }
    }

    /// `∫ g(x, s(x)) dA` by the three-point rule.
    pub fn integrate(&self, mut g: impl FnMut(Point, [f64; 2]) -> f64) -> f64 {
        let mut total = 0.0;
        for t in 0..self.mesh.triangle_count() {
            let area = self.mesh.area(t);
            let pts = quadrature::points(&self.mesh.vertices(t));
            let mut acc = 0.0;
            for (p, s) in pts.iter().zip(&self.samples[t]) {
                acc += g(*p, *s);
            }
            total += quadrature::WEIGHT * area * acc;
        }
        total
    }

    /// `∫ |s|² dA`
    pub fn norm_sq(&self) -> f64 {
        self.integrate(|_, s| s[0] * s[0] + s[1] * s[1])
    }

    /// `(∫ S31 dA, ∫ S32 dA)`
    pub fn resultant(&self) -> [f64; 2] {
        [self.integrate(|_, s| s[0]), self.integrate(|_, s| s[1])]
    }

    /// `∫ (x1 S32 - x2 S31) dA`, positive about `+e3`.
    pub fn moment(&self) -> f64 {
        self.integrate(|x, s| x[0] * s[1] - x[1] * s[0])
    }

    pub fn l1_norm(&self) -> f64 {
        self.integrate(|_, s| s[0].hypot(s[1]))
    }

    pub fn max_norm(&self) -> f64 {
        self.samples.iter().flatten().map(|s| s[0].hypot(s[1])).fold(0.0, f64::max)
    }

    /// Largest `|s·n|` over boundary edges, using the value of the adjacent
    /// triangle, relative to the largest sample magnitude.
    pub fn mantle_defect(&self) -> f64 {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            for k in 0..3 {
                owner.insert((tri[k], tri[(k + 1) % 3]), t);
            }
        }
        let nodes = self.mesh.nodes();
        let mut worst = 0.0f64;
        for e in self.mesh.boundary_edges() {
            let [a, b] = e.nodes;
            let Some(&t) = owner.get(&(a, b)) else { continue };
            let (p, q) = (nodes[a], nodes[b]);
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            let n = [(q[1] - p[1]) / len, -(q[0] - p[0]) / len];
            let s = self.element_value(t);
            worst = worst.max((s[0] * n[0] + s[1] * n[1]).abs());
        }
        let m = self.max_norm();
        if m > 0.0 {
            worst / m
        } else {
            0.0
        }
    }

    /// Continuous piecewise-linear field obtained by area-weighted nodal
    /// averaging of the element values.
    pub fn recovered(&self) -> Self {
        let n = self.mesh.node_count();
        let mut acc = vec![[0.0; 2]; n];
        let mut weight = vec![0.0; n];
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let area = self.mesh.area(t);
            let v = self.element_value(t);
            for &i in tri {
                acc[i][0] += area * v[0];
                acc[i][1] += area * v[1];
                weight[i] += area;
            }
        }
        let nodal: Vec<[f64; 2]> = acc.iter().zip(&weight).map(|(a, w)| [a[0] / w, a[1] / w]).collect();
        let samples = self
            .mesh
            .triangles()
            .iter()
            .map(|tri| {
                quadrature::BARYCENTRIC.map(|b| {
                    let mut s = [0.0; 2];
                    for k in 0..3 {
                        s[0] += b[k] * nodal[tri[k]][0];
                        s[1] += b[k] * nodal[tri[k]][1];
                    }
                    s
                })
            })
            .collect();
        TangentialStressField { mesh: Arc::clone(&self.mesh), samples, origin: self.origin.clone(), scale: self.scale }
    }

    /// Cell averages of `(S31, S32)` for export.
    pub fn element_values(&self) -> Vec<[f64; 2]> {
        (0..self.samples.len()).map(|t| self.element_value(t)).collect()
    }
}

/// Result of projecting a field onto the rigid-rotation family `c e3 × x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityDeviation {
    pub deviation: f64,
    pub c: f64,
}

/// `min_c ‖s - c e3×x‖ / ‖s‖` in L², with the minimizing `c`.
pub fn equality_deviation(field: &TangentialStressField) -> Result<EqualityDeviation> {
    let energy = field.norm_sq();
    if !(energy > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let num = field.integrate(|x, s| -x[1] * s[0] + x[0] * s[1]);
    let den = field.integrate(|x, _| x[0] * x[0] + x[1] * x[1]);
    let c = num / den;
    let rest = field.integrate(|x, s| {
        let (d0, d1) = (s[0] + c * x[1], s[1] - c * x[0]);
        d0 * d0 + d1 * d1
    });
    Ok(EqualityDeviation { deviation: (rest / energy).sqrt(), c })
}

/// Axial stress `S33` as a nodal piecewise-linear field.
#[derive(Debug, Clone)]
pub struct AxialStressField {
    pub values: ScalarField,
    pub origin: FieldOrigin,
}

impl AxialStressField {
    pub fn new(values: ScalarField, origin: FieldOrigin) -> Self {
        AxialStressField { values, origin }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.values.mesh
    }

    /// `∫ g(x, S33) dA` by the three-point rule.
    pub fn integrate(&self, mut g: impl FnMut(Point, f64) -> f64) -> f64 {
        let mesh = &self.values.mesh;
        let u = &self.values.values;
        let mut total = 0.0;
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let pts = quadrature::points(&mesh.vertices(t));
            let mut acc = 0.0;
            for (q, b) in quadrature::BARYCENTRIC.iter().enumerate() {
                let s = b[0] * u[tri[0]] + b[1] * u[tri[1]] + b[2] * u[tri[2]];
                acc += g(pts[q], s);
            }
            total += quadrature::WEIGHT * mesh.area(t) * acc;
        }
        total
    }

    /// `∫ S33 dA`
    pub fn force(&self) -> f64 {
        self.values.integral()
    }

    /// `∫ x2 S33 dA`
    pub fn moment_about_e1(&self) -> f64 {
        self.integrate(|x, s| x[1] * s)
    }

    /// `∫ x1 S33 dA`
    pub fn moment_about_e2(&self) -> f64 {
        self.integrate(|x, s| x[0] * s)
    }

    pub fn norm_sq(&self) -> f64 {
        self.integrate(|_, s| s * s)
    }
}
