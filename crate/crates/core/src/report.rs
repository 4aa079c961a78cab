//! Report types and deterministic JSON/CSV rendering.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::field::Direction;
use crate::fem::Method;
use crate::geometry::{Material, RigidTransform};

/// Pretty JSON with every float written with 17 significant digits.
pub struct FixedFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for FixedFormatter<'_> {
    fn default() -> Self {
        FixedFormatter { inner: PrettyFormatter::with_indent(b"  ") }
    }
}

impl Formatter for FixedFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_f64(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// `{:.16e}`, which is valid JSON for finite values.
pub fn format_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        "null".into()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFormatter::default());
    value.serialize(&mut ser).expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, Serialize)]
pub struct PropsOut {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "Jo")]
    pub jo: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionOut {
    #[serde(rename = "Jt")]
    pub jt: f64,
    pub chi_t: f64,
    pub stiff_t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShearOut {
    pub direction: Direction,
    pub nu: f64,
    pub chi_s: f64,
    pub stiff_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxialOut {
    pub chi_e: f64,
    pub stiff_e: f64,
    pub chi_b: f64,
    pub stiff_b: f64,
    /// Bending about the `x2` axis: `M = ∫ x1 S33`, `J = I2`.
    pub chi_b_x2: f64,
    pub stiff_b_x2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverOut {
    pub method: Method,
    pub iterations: usize,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShearLevel {
    pub direction: Direction,
    pub nu: f64,
    /// `∫ |s|² dA`
    pub energy: f64,
    /// Resultant along `direction`.
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_transverse")]
    pub t_transverse: f64,
    pub chi_s: f64,
    pub closure_defect: f64,
    pub mantle_defect: f64,
}

/// Raw values of one mesh level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub h: f64,
    pub nodes: usize,
    pub triangles: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "Jo")]
    pub jo: f64,
    #[serde(rename = "Jt")]
    pub jt: f64,
    /// `∫ |∇φ|² dA`
    pub torsion_energy: f64,
    /// `∫ (x1 S32 - x2 S31) dA`
    pub torsion_moment: f64,
    pub duality_gap: f64,
    pub chi_t: f64,
    pub hole_constants: Vec<f64>,
    pub torsion_solver: SolverOut,
    pub shear: Vec<ShearLevel>,
    pub chi_e: f64,
    pub chi_b: f64,
    pub chi_b_x2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub torsion: &'static str,
    pub flexure: &'static str,
    pub moment_sign: &'static str,
    pub twist_constant: f64,
    pub extrapolation: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            torsion: "G theta = 1; phi = 0 on the outer loop, one floating constant per hole",
            flexure: "unit shear force along the stated direction; S33 grows with +x3",
            moment_sign: "Mt positive about +e3",
            twist_constant: 0.0,
            extrapolation: "Richardson on the two finest levels, assumed order 2",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub section: String,
    pub material: MaterialOut,
    pub transform: RigidTransform,
    pub h_target: f64,
    pub h_finest: f64,
    pub refinements: usize,
    pub rtol: f64,
    pub conventions: Conventions,
    #[serde(rename = "observed_order_Jt")]
    pub observed_order_jt: Option<f64>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub levels: Vec<LevelRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaterialOut {
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
}

impl From<&Material> for MaterialOut {
    fn from(m: &Material) -> Self {
        MaterialOut { g: m.shear_modulus, e: m.young(), nu: m.nu }
    }
}

/// Factors and stiffnesses of one section.
#[derive(Debug, Clone, Serialize)]
pub struct FactorReport {
    pub props: PropsOut,
    pub torsion: TorsionOut,
    pub shear: Vec<ShearOut>,
    pub axial: AxialOut,
    pub provenance: Provenance,
}

impl FactorReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn all_checks_passed(&self) -> bool {
        self.provenance.checks.iter().all(|c| c.passed)
    }

    pub fn shear(&self, direction: Direction, nu: f64) -> Option<&ShearOut> {
        self.shear.iter().find(|s| s.direction == direction && (s.nu - nu).abs() < 1e-12)
    }
}
